//! Frobenius pushforwards on surfaces in characteristic `p`.
//!
//! `F*F_*W` carries a canonical filtration `V_•` whose graded pieces on a
//! surface are
//!
//! ```text
//! V_l/V_{l+1} = W ⊗ Sym^l Ω                               (l < p)
//!             = W ⊗ Sym^{2(p-1)-l} Ω ⊗ ω^{l-(p-1)}        (p ≤ l ≤ 2(p-1))
//! ```
//!
//! Only ranks and first Chern classes of these pieces are computed. Degrees
//! of `F_*W` follow from the convention `deg_H(F*E) = p·deg_H(E)`, with the
//! polarization held fixed on source and target.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cover::{is_prime, plane_cover, CyclicCover};
use crate::criteria::{p2_cover, Certificate, CertificateBuilder, StabilityLevel, TheoremId};
use crate::error::{Error, Result};
use crate::lattice::SurfaceModel;
use crate::rational::{format_rational, q, Q};
use crate::sheaf::FormalSheaf;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusContext {
    p: u32,
    surface: SurfaceModel,
    cotangent: FormalSheaf,
    canonical_degree: Q,
}

impl FrobeniusContext {
    pub fn new(p: u32, surface: SurfaceModel) -> Result<Self> {
        if !is_prime(p.into()) {
            return Err(Error::InvalidArgument(format!(
                "characteristic must be prime, got {p}"
            )));
        }
        let cotangent = FormalSheaf::cotangent(&surface);
        let canonical_degree = surface.cotangent_degree();
        Ok(FrobeniusContext {
            p,
            surface,
            cotangent,
            canonical_degree,
        })
    }

    /// Context on the total space of a cyclic cover. `p` must not divide
    /// the cover degree; a cover built in characteristic zero may be
    /// reinterpreted in any such `p`.
    pub fn from_cover(cover: &CyclicCover, p: u32) -> Result<Self> {
        if !is_prime(p.into()) {
            return Err(Error::InvalidArgument(format!(
                "characteristic must be prime, got {p}"
            )));
        }
        if cover.char_p() != 0 && cover.char_p() != u64::from(p) {
            return Err(Error::InvalidArgument(format!(
                "cover is in characteristic {}, not {p}",
                cover.char_p()
            )));
        }
        if cover.degree().is_multiple_of(p) {
            return Err(Error::InvalidCover(format!(
                "characteristic {p} divides the cover degree {}",
                cover.degree()
            )));
        }
        Self::new(p, cover.surface().clone())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn surface(&self) -> &SurfaceModel {
        &self.surface
    }

    pub fn cotangent(&self) -> &FormalSheaf {
        &self.cotangent
    }

    /// `K_X·H`.
    pub fn canonical_degree(&self) -> &Q {
        &self.canonical_degree
    }

    /// Highest filtration index, `2(p−1)`.
    pub fn top_index(&self) -> u32 {
        2 * (self.p - 1)
    }

    /// `ω^{⊗k}` as a rank-one sheaf.
    fn canonical_power(&self, k: u32) -> FormalSheaf {
        FormalSheaf::line(self.surface.canonical().scale_int(k.into()))
    }

    /// `T^l(Ω)` on a surface.
    pub fn twist_sheaf(&self, l: u32) -> Result<FormalSheaf> {
        if l > self.top_index() {
            return Err(Error::InvalidArgument(format!(
                "filtration index {l} outside 0..={}",
                self.top_index()
            )));
        }
        if l < self.p {
            self.cotangent.sym_power_rank2(l)
        } else {
            let sym = self.cotangent.sym_power_rank2(self.top_index() - l)?;
            Ok(sym.tensor(&self.canonical_power(l - (self.p - 1))))
        }
    }

    /// `V_l / V_{l+1} = W ⊗ T^l(Ω)`.
    pub fn graded_piece(&self, w: &FormalSheaf, l: u32) -> Result<FormalSheaf> {
        self.surface.check_class(w.c1())?;
        Ok(w.tensor(&self.twist_sheaf(l)?))
    }

    pub fn filtration_profile(&self, w: &FormalSheaf) -> Result<FiltrationProfile> {
        let pieces = (0..=self.top_index())
            .map(|l| {
                let piece = self.graded_piece(w, l)?;
                Ok(PieceInvariants {
                    l,
                    rank: piece.rank(),
                    degree: piece.degree(&self.surface)?,
                    slope: piece.slope(&self.surface)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let expected = u64::from(self.p).pow(2) * u64::from(w.rank());
        let found: u64 = pieces.iter().map(|piece| u64::from(piece.rank)).sum();
        if found != expected {
            return Err(Error::RankConservation { expected, found });
        }
        Ok(FiltrationProfile { p: self.p, pieces })
    }

    /// Rank, degree and slope of `F_*W`.
    pub fn pushforward_invariants(&self, w: &FormalSheaf) -> Result<FrobeniusPushforward> {
        let profile = self.filtration_profile(w)?;
        let rank = u64::from(self.p).pow(2) * u64::from(w.rank());
        let degree = profile.total_degree() / q(self.p.into());
        let slope = &degree / q(rank as i64);
        Ok(FrobeniusPushforward {
            rank,
            degree,
            slope,
        })
    }

    /// `I(W, X)` from per-index instabilities of `W ⊗ T^l(Ω)`.
    pub fn instability_budget(&self, w: &FormalSheaf, assumed: &[Q]) -> Result<Q> {
        self.surface.check_class(w.c1())?;
        let expected = self.top_index() as usize + 1;
        if assumed.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "expected {expected} instabilities (one per l in 0..={}), got {}",
                self.top_index(),
                assumed.len()
            )));
        }
        if let Some(bad) = assumed.iter().find(|v| v.is_negative()) {
            return Err(Error::InvalidArgument(format!(
                "instability must be nonnegative, got {}",
                format_rational(bad)
            )));
        }
        Ok(assumed.iter().max().cloned().unwrap_or_else(Q::zero))
    }

    /// The budget when it follows without input: a rank-one `W` with stable
    /// cotangent bundle has every `W ⊗ T^l(Ω)` semistable, so `I(W, X) = 0`.
    pub fn discharged_budget(&self, w: &FormalSheaf, cotangent: StabilityLevel) -> Option<Q> {
        (w.rank() == 1 && cotangent == StabilityLevel::Stable).then(Q::zero)
    }

    /// Slope-drop bound `−I(W, X)/p` for subsheaves of `F_*W`.
    pub fn slope_drop_bound(&self, budget: &Q) -> Q {
        -budget / q(self.p.into())
    }

    #[allow(clippy::too_many_arguments)]
    fn certificate_builder(
        &self,
        theorem: TheoremId,
        subject: String,
        w: &FormalSheaf,
        budget: Option<&Q>,
        budget_source: Option<&str>,
        twists_stable: bool,
        twists_source: Option<&str>,
    ) -> Result<CertificateBuilder> {
        let kxh = self.canonical_degree.clone();
        let push = self.pushforward_invariants(w)?;
        let budget_zero = budget.is_some_and(Zero::is_zero);
        let mut builder = CertificateBuilder::new(theorem, subject, StabilityLevel::Stable)
            .computed(
                "K_X.H >= 0",
                Some(kxh.clone()),
                !kxh.is_negative(),
                StabilityLevel::Semistable,
            );
        builder = match budget_source {
            Some(by) => builder.discharged(
                "I(W,X) = 0 (all W (x) T^l(Omega_X) semistable)",
                by,
                budget_zero,
                StabilityLevel::Semistable,
            ),
            None => builder.computed(
                "I(W,X) = 0 (all W (x) T^l(Omega_X) semistable)",
                budget.cloned(),
                budget_zero,
                StabilityLevel::Semistable,
            ),
        };
        builder = builder.computed(
            "K_X.H > 0",
            Some(kxh.clone()),
            kxh.is_positive(),
            StabilityLevel::Stable,
        );
        builder = match twists_source {
            Some(by) => builder.discharged(
                "all W (x) T^l(Omega_X) stable",
                by,
                twists_stable,
                StabilityLevel::Stable,
            ),
            None if twists_stable => {
                builder.asserted("all W (x) T^l(Omega_X) stable", StabilityLevel::Stable)
            }
            None => builder.computed(
                "all W (x) T^l(Omega_X) stable",
                None,
                false,
                StabilityLevel::Stable,
            ),
        };
        builder = builder
            .value("p", q(self.p.into()))
            .value("k_x_h", kxh)
            .value("rank_pushforward", q(push.rank as i64))
            .value("deg_pushforward", push.degree)
            .value("mu_pushforward", push.slope);
        if let Some(b) = budget {
            builder = builder
                .value("budget", b.clone())
                .value("slope_drop_bound", self.slope_drop_bound(b));
        }
        Ok(builder)
    }

    /// Semistable when `K_X·H ≥ 0` and `budget = 0`; stable when moreover
    /// `K_X·H > 0` and every twist is stable.
    pub fn frobenius_certificate(
        &self,
        w: &FormalSheaf,
        budget: &Q,
        twists_stable: bool,
    ) -> Result<Certificate> {
        if budget.is_negative() {
            return Err(Error::InvalidArgument(
                "instability budget must be nonnegative".into(),
            ));
        }
        let subject = format!(
            "Frobenius pushforward of rank {} sheaf on {} (p = {})",
            w.rank(),
            self.surface.name(),
            self.p
        );
        Ok(self
            .certificate_builder(
                TheoremId::FrobeniusPushforward,
                subject,
                w,
                Some(budget),
                None,
                twists_stable,
                None,
            )?
            .finish())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceInvariants {
    pub l: u32,
    pub rank: u32,
    #[serde(with = "crate::rational::serde_q")]
    pub degree: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub slope: Q,
}

/// Invariants of `V_l/V_{l+1}` for `l = 0 … 2(p−1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationProfile {
    pub p: u32,
    pub pieces: Vec<PieceInvariants>,
}

impl FiltrationProfile {
    pub fn total_rank(&self) -> u64 {
        self.pieces.iter().map(|p| u64::from(p.rank)).sum()
    }

    pub fn total_degree(&self) -> Q {
        self.pieces.iter().map(|p| &p.degree).sum()
    }
}

impl fmt::Display for FiltrationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "  {:>3}  {:>5}  {:>10}  {:>10}",
            "l", "rank", "degree", "slope"
        )?;
        for piece in &self.pieces {
            writeln!(
                f,
                "  {:>3}  {:>5}  {:>10}  {:>10}",
                piece.l,
                piece.rank,
                format_rational(&piece.degree),
                format_rational(&piece.slope)
            )?;
        }
        write!(
            f,
            "  total rank {}  total degree {}",
            self.total_rank(),
            format_rational(&self.total_degree())
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusPushforward {
    pub rank: u64,
    #[serde(with = "crate::rational::serde_q")]
    pub degree: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub slope: Q,
}

/// `K_X·H = −3n + (n−1)d` for the plane cover.
pub fn plane_cover_canonical_degree(n: u32, d: u32) -> Q {
    q(-3 * i64::from(n) + (i64::from(n) - 1) * i64::from(d))
}

/// Region claimed for plane covers: semistable when `d ≥ 5` or
/// `n = 4, d ≥ 4`; stable when `n = 2, d ≥ 6` or `n ≥ 3, d ≥ 5`.
pub fn claimed_frobenius_region(n: u32, d: u32) -> (bool, bool) {
    let semistable = d >= 5 || (n == 4 && d >= 4);
    let stable = (n == 2 && d >= 6) || (n >= 3 && d >= 5);
    (semistable, stable)
}

/// Frobenius pushforward of a rank-one sheaf on the `n`-cyclic plane cover
/// branched in degree `d`, in characteristic `p`.
pub fn cor45(n: u32, d: u32, p: u32) -> Result<Certificate> {
    if !is_prime(p.into()) {
        return Err(Error::InvalidArgument(format!(
            "characteristic must be prime, got {p}"
        )));
    }
    let cover = plane_cover(n, d, p.into())?;
    let ctx = FrobeniusContext::from_cover(&cover, p)?;
    let w = FormalSheaf::trivial(1, cover.surface().rank())?;

    let omega = p2_cover(n, d)?;
    let omega_level = if omega.conclusion.is_stable() {
        StabilityLevel::Stable
    } else {
        StabilityLevel::Semistable
    };
    let budget = ctx.discharged_budget(&w, omega_level);
    let cor38 = TheoremId::PlaneCover.as_str();

    let closed = plane_cover_canonical_degree(n, d);
    let kxh = ctx.canonical_degree().clone();
    let (claimed_semi, claimed_stable) = claimed_frobenius_region(n, d);
    let indicator = |b: bool| if b { Q::one() } else { Q::zero() };

    let subject = format!(
        "Frobenius pushforward of a rank-one sheaf on the {n}-cyclic plane cover branched in degree {d} (p = {p})"
    );
    let mut builder = ctx
        .certificate_builder(
            TheoremId::FrobeniusPlaneCover,
            subject,
            &w,
            budget.as_ref(),
            Some(cor38),
            omega_level == StabilityLevel::Stable,
            Some(cor38),
        )?
        .computed(
            "K_X.H = -3n + (n-1)d",
            Some(closed.clone()),
            closed == kxh,
            StabilityLevel::Semistable,
        )
        .value("n", q(n.into()))
        .value("d", q(d.into()))
        .value("claimed_semistable", indicator(claimed_semi))
        .value("claimed_stable", indicator(claimed_stable));

    let computed_semi = !kxh.is_negative() && budget.is_some();
    let computed_stable =
        computed_semi && kxh.is_positive() && omega_level == StabilityLevel::Stable;
    if claimed_stable && !computed_stable {
        builder = builder.note(format!(
            "erratum: the claimed region lists (n={n}, d={d}) as stable, but K_X.H = {} is not \
             positive, so the strict hypothesis fails; only semistability is licensed",
            format_rational(&kxh)
        ));
    }
    if claimed_semi != computed_semi {
        builder = builder.note(format!(
            "erratum: claimed semistability region disagrees with K_X.H = {} at (n={n}, d={d})",
            format_rational(&kxh)
        ));
    }
    Ok(builder.finish())
}
