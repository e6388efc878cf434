//! The n-cyclic cover `π: X → Y` branched along a smooth `B ∈ |L^n|`.
//!
//! `X` is modelled on the pulled-back lattice `π*NS(Y)`: same generators as
//! `Y`, pairing multiplied by `n`, polarization `π*H`. Every class the
//! covering formulas need (`π*L = B₁`, `K_X`, `π*H`) lives there.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::rational::{frac, q, Q};
use crate::sheaf::{FormalSheaf, SplitBundle};

/// Trial-division primality, enough for characteristics.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicCover {
    base: SurfaceModel,
    line: DivisorClass,
    degree: u32,
    char_p: u64,
    surface: SurfaceModel,
}

/// Which constant to subtract in the simplified pushforward slope
/// `μ(π_*E) = μ(E)/n − c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeConstant {
    /// `c = (n−1)/2 · deg L`, forced by the degree formula.
    Derived,
    /// `c = (n−1) · deg L`, which disagrees with the degree formula
    /// whenever `deg L ≠ 0`. Kept only so the discrepancy stays testable.
    Uncorrected,
}

/// Note attached to any result that relies on the simplified slope.
pub const SLOPE_CONSTANT_NOTE: &str = "erratum: simplified pushforward slope uses the constant \
((n-1)/2)*deg L implied by the degree formula and pi_*O_X; the constant (n-1)*deg L does not \
match either, and mu(Omega_X) = (n*deg Omega_Y + (n-1)*deg B)/2 includes the division by rank 2";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchDegrees {
    /// `B·H` on the base.
    #[serde(with = "crate::rational::serde_q")]
    pub on_base: Q,
    /// `B₁·π*H` on the cover.
    #[serde(with = "crate::rational::serde_q")]
    pub on_cover: Q,
}

/// `π_*π*F = F ⊕ F(−L) ⊕ … ⊕ F(−(n−1)L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushPullDecomposition {
    pub pieces: Vec<FormalSheaf>,
    pub total: FormalSheaf,
}

impl CyclicCover {
    pub fn new(base: SurfaceModel, line: DivisorClass, degree: u32, char_p: u64) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidCover(format!(
                "cover degree must be at least 2, got {degree}"
            )));
        }
        if char_p != 0 && !is_prime(char_p) {
            return Err(Error::InvalidCover(format!(
                "characteristic must be 0 or a prime, got {char_p}"
            )));
        }
        if char_p != 0 && u64::from(degree) % char_p == 0 {
            return Err(Error::InvalidCover(format!(
                "characteristic {char_p} divides the cover degree {degree}"
            )));
        }
        base.check_class(&line)?;
        let n = i64::from(degree);
        let canonical = base.canonical() + &line.scale_int(n - 1);
        let surface = base.scaled(format!("{}~cover(n={degree})", base.name()), n, canonical);
        Ok(CyclicCover {
            base,
            line,
            degree,
            char_p,
            surface,
        })
    }

    pub fn base(&self) -> &SurfaceModel {
        &self.base
    }

    /// The model of `X` on the pulled-back lattice.
    pub fn surface(&self) -> &SurfaceModel {
        &self.surface
    }

    pub fn line_class(&self) -> &DivisorClass {
        &self.line
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn char_p(&self) -> u64 {
        self.char_p
    }

    fn n(&self) -> Q {
        q(self.degree.into())
    }

    /// `B = n·L`.
    pub fn branch_class(&self) -> DivisorClass {
        self.line.scale_int(self.degree.into())
    }

    /// `L·H` on the base.
    pub fn line_degree(&self) -> Q {
        self.base
            .degree(&self.line)
            .expect("checked at construction")
    }

    pub fn branch_degrees(&self) -> BranchDegrees {
        let on_base = self
            .base
            .degree(&self.branch_class())
            .expect("checked at construction");
        // B₁ = π*L.
        let on_cover = self
            .surface
            .degree(
                &self
                    .pullback_class(&self.line)
                    .expect("checked at construction"),
            )
            .expect("checked at construction");
        assert_eq!(on_base, on_cover, "deg B and deg B1 must agree");
        BranchDegrees { on_base, on_cover }
    }

    /// `π*D`: same coordinates, read in the n-scaled lattice.
    pub fn pullback_class(&self, d: &DivisorClass) -> Result<DivisorClass> {
        self.base.check_class(d)?;
        Ok(d.clone())
    }

    pub fn pullback_sheaf(&self, f: &FormalSheaf) -> Result<FormalSheaf> {
        let c1 = self.pullback_class(f.c1())?;
        FormalSheaf::new(f.rank(), c1)
    }

    pub fn pullback_split(&self, b: &SplitBundle) -> Result<SplitBundle> {
        SplitBundle::new(
            b.summands()
                .iter()
                .map(|s| self.pullback_class(s))
                .collect::<Result<_>>()?,
        )
    }

    /// `K_X = π*(K_Y + (n−1)L)`.
    pub fn canonical_x(&self) -> &DivisorClass {
        self.surface.canonical()
    }

    /// `n·deg Ω_Y + (n−1)·deg B`, evaluated on the base.
    pub fn canonical_degree_formula(&self) -> Q {
        let n = self.n();
        &n * self.base.cotangent_degree() + (&n - q(1)) * self.branch_degrees().on_base
    }

    pub fn cotangent_x(&self) -> FormalSheaf {
        FormalSheaf::cotangent(&self.surface)
    }

    /// `μ(Ω_X) = (n·deg Ω_Y + (n−1)·deg B) / 2`.
    pub fn cotangent_x_slope(&self) -> Q {
        self.canonical_degree_formula() / q(2)
    }

    /// `π_*O_X = O ⊕ L⁻¹ ⊕ … ⊕ L^{−(n−1)}`.
    pub fn pushforward_o(&self) -> SplitBundle {
        let summands = (0..i64::from(self.degree))
            .map(|i| self.line.scale_int(-i))
            .collect();
        SplitBundle::new(summands).expect("n >= 2 summands")
    }

    pub fn pushforward_pullback(&self, f: &FormalSheaf) -> Result<PushPullDecomposition> {
        self.base.check_class(f.c1())?;
        let pieces: Vec<FormalSheaf> = (0..i64::from(self.degree))
            .map(|i| f.twist(&self.line.scale_int(-i)))
            .collect();
        let total = FormalSheaf::direct_sum(&pieces)?;
        Ok(PushPullDecomposition { pieces, total })
    }

    /// Degree of `π_*E` on `Y` for `E` on `X`:
    /// `(rank π_*E / 2)·deg Ω_Y − (rank E / 2)·deg Ω_X + deg E`,
    /// degrees on `X` against `π*H`.
    pub fn pushforward_degree(&self, e: &FormalSheaf) -> Result<Q> {
        let rank_e = q(e.rank().into());
        let rank_push = self.n() * &rank_e;
        let deg_omega_x = self.surface.cotangent_degree();
        let deg_e = e.degree(&self.surface)?;
        Ok(rank_push / q(2) * self.base.cotangent_degree() - rank_e / q(2) * deg_omega_x + deg_e)
    }

    pub fn pushforward_rank(&self, e: &FormalSheaf) -> u32 {
        self.degree * e.rank()
    }

    pub fn pushforward_slope(&self, e: &FormalSheaf) -> Result<Q> {
        Ok(self.pushforward_degree(e)? / q(self.pushforward_rank(e).into()))
    }

    /// `μ(E)/n − c` with the chosen constant.
    pub fn pushforward_slope_simplified(
        &self,
        e: &FormalSheaf,
        constant: SlopeConstant,
    ) -> Result<Q> {
        let n = self.n();
        let c = match constant {
            SlopeConstant::Derived => frac(i64::from(self.degree) - 1, 2) * self.line_degree(),
            SlopeConstant::Uncorrected => (&n - q(1)) * self.line_degree(),
        };
        Ok(e.slope(&self.surface)? / n - c)
    }

    /// `μ(Ω_Y) − μ(Ω_X)/n + μ(E)/n`.
    pub fn pushforward_slope_via_cotangents(&self, e: &FormalSheaf) -> Result<Q> {
        let n = self.n();
        let mu_y = FormalSheaf::cotangent(&self.base).slope(&self.base)?;
        let mu_x = self.cotangent_x().slope(&self.surface)?;
        Ok(mu_y - mu_x / &n + e.slope(&self.surface)? / n)
    }

    /// `K_X ≡ 0`.
    pub fn is_canonically_trivial(&self) -> bool {
        self.canonical_x().is_zero()
    }

    pub fn has_trivial_line(&self) -> bool {
        self.line.coefficients().iter().all(Zero::is_zero)
    }
}

impl fmt::Display for CyclicCover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-cyclic cover of {} with L = {}",
            self.degree,
            self.base.name(),
            self.line.display_with(self.base.generators())
        )?;
        if self.char_p != 0 {
            write!(f, " (char {})", self.char_p)?;
        }
        Ok(())
    }
}

/// The plane cover branched along a smooth curve of degree `d` (`n | d`).
pub fn plane_cover(n: u32, d: u32, char_p: u64) -> Result<CyclicCover> {
    if d == 0 {
        return Err(Error::InvalidArgument(
            "branch degree must be positive".into(),
        ));
    }
    if n == 0 || !d.is_multiple_of(n) {
        return Err(Error::InvalidArgument(format!(
            "no line bundle L with L^{n} = O({d}): {n} does not divide {d}"
        )));
    }
    let l = i64::from(d / n);
    CyclicCover::new(
        SurfaceModel::projective_plane(),
        DivisorClass::from_integers(&[l]),
        n,
        char_p,
    )
}
