//! Divisor classes and the intersection pairing on a Néron–Severi lattice.
//!
//! A surface is presented by an ordered list of generator classes and their
//! integer intersection matrix. Two classes are numerically equivalent
//! exactly when their coefficient vectors agree, so every comparison in
//! this module is coefficient-wise.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, q, Q};

/// A divisor class as exact rational coordinates over a surface's generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivisorClass(#[serde(with = "crate::rational::serde_q_vec")] Vec<Q>);

impl DivisorClass {
    pub fn new(coefficients: Vec<Q>) -> Self {
        DivisorClass(coefficients)
    }

    pub fn from_integers(coefficients: &[i64]) -> Self {
        DivisorClass(coefficients.iter().map(|&c| q(c)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        DivisorClass(vec![Q::zero(); rank])
    }

    pub fn coefficients(&self) -> &[Q] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, factor: &Q) -> Self {
        DivisorClass(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn scale_int(&self, factor: i64) -> Self {
        self.scale(&q(factor))
    }

    fn check_same_len(&self, other: &Self) {
        assert_eq!(
            self.len(),
            other.len(),
            "divisor classes from lattices of different rank"
        );
    }

    /// Renders the class as a combination of the given generator labels.
    pub fn display_with<'a>(&'a self, labels: &'a [String]) -> impl fmt::Display + 'a {
        LabelledClass {
            class: self,
            labels,
        }
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;

    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        self.check_same_len(rhs);
        DivisorClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Add for DivisorClass {
    type Output = DivisorClass;

    fn add(self, rhs: DivisorClass) -> DivisorClass {
        &self + &rhs
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;

    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self.check_same_len(rhs);
        DivisorClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;

    fn sub(self, rhs: DivisorClass) -> DivisorClass {
        &self - &rhs
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;

    fn neg(self) -> DivisorClass {
        DivisorClass(self.0.iter().map(|c| -c).collect())
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;

    fn neg(self) -> DivisorClass {
        -&self
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(c))?;
        }
        write!(f, ")")
    }
}

struct LabelledClass<'a> {
    class: &'a DivisorClass,
    labels: &'a [String],
}

impl fmt::Display for LabelledClass<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (c, label) in self.class.0.iter().zip(self.labels) {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            match (wrote, c.is_negative()) {
                (false, false) => {}
                (false, true) => write!(f, "-")?,
                (true, _) => write!(f, " {sign} ")?,
            }
            if magnitude == q(1) {
                write!(f, "{label}")?;
            } else {
                write!(f, "{}{label}", format_rational(&magnitude))?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// The built-in lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// The projective plane: `h² = 1`, `K = -3h`, `H = h`.
    ProjectivePlane,
    /// Hyperbolic plane `a² = b² = 0`, `a·b = 1`, `H = a + b`.
    ProductOfCurves,
}

impl Preset {
    pub fn from_name(name: &str) -> Option<Preset> {
        match name.to_ascii_lowercase().as_str() {
            "p2" | "projective_plane" | "projective-plane" => Some(Preset::ProjectivePlane),
            "product" | "p1xp1" | "product_of_curves" | "product-of-curves" => {
                Some(Preset::ProductOfCurves)
            }
            _ => None,
        }
    }
}

/// A smooth projective surface at the level of its numerical lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    name: String,
    generators: Vec<String>,
    intersection: Vec<Vec<i64>>,
    canonical: DivisorClass,
    polarization: DivisorClass,
    preset: Option<Preset>,
}

impl SurfaceModel {
    /// Builds a surface from lattice data.
    ///
    /// Checks symmetry of the pairing, vector lengths and `H·H > 0`.
    /// Ampleness of `H` beyond positivity of its square is taken on trust.
    pub fn new(
        name: impl Into<String>,
        generators: Vec<String>,
        intersection: Vec<Vec<i64>>,
        canonical: DivisorClass,
        polarization: DivisorClass,
    ) -> Result<Self> {
        let rank = generators.len();
        if rank == 0 {
            return Err(Error::InvalidSurface("no generators".into()));
        }
        if intersection.len() != rank || intersection.iter().any(|row| row.len() != rank) {
            return Err(Error::InvalidSurface(format!(
                "intersection matrix must be {rank}x{rank}"
            )));
        }
        if let Some((i, j)) = (0..rank)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .find(|&(i, j)| intersection[i][j] != intersection[j][i])
        {
            return Err(Error::InvalidSurface(format!(
                "intersection matrix is not symmetric at ({i}, {j})"
            )));
        }
        for class in [&canonical, &polarization] {
            if class.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: class.len(),
                });
            }
        }
        let surface = SurfaceModel {
            name: name.into(),
            generators,
            intersection,
            canonical,
            polarization,
            preset: None,
        };
        let h2 = surface.intersect(&surface.polarization, &surface.polarization)?;
        if !h2.is_positive() {
            return Err(Error::InvalidSurface(format!(
                "polarization must have positive self-intersection, got {}",
                format_rational(&h2)
            )));
        }
        Ok(surface)
    }

    pub fn projective_plane() -> Self {
        SurfaceModel {
            name: "P2".into(),
            generators: vec!["h".into()],
            intersection: vec![vec![1]],
            canonical: DivisorClass::from_integers(&[-3]),
            polarization: DivisorClass::from_integers(&[1]),
            preset: Some(Preset::ProjectivePlane),
        }
    }

    /// Rank-two hyperbolic lattice with polarization `a + b`.
    ///
    /// `canonical` defaults to `-2a - 2b` (the quadric surface).
    pub fn product_of_curves(canonical: Option<DivisorClass>) -> Result<Self> {
        let canonical = canonical.unwrap_or_else(|| DivisorClass::from_integers(&[-2, -2]));
        let mut surface = SurfaceModel::new(
            "product",
            vec!["a".into(), "b".into()],
            vec![vec![0, 1], vec![1, 0]],
            canonical,
            DivisorClass::from_integers(&[1, 1]),
        )?;
        surface.preset = Some(Preset::ProductOfCurves);
        Ok(surface)
    }

    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::ProjectivePlane => Self::projective_plane(),
            Preset::ProductOfCurves => {
                Self::product_of_curves(None).expect("built-in product lattice is valid")
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn intersection_matrix(&self) -> &[Vec<i64>] {
        &self.intersection
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    pub fn polarization(&self) -> &DivisorClass {
        &self.polarization
    }

    pub fn preset_kind(&self) -> Option<Preset> {
        self.preset
    }

    pub fn is_projective_plane(&self) -> bool {
        self.preset == Some(Preset::ProjectivePlane)
    }

    pub fn zero_class(&self) -> DivisorClass {
        DivisorClass::zero(self.rank())
    }

    pub fn check_class(&self, class: &DivisorClass) -> Result<()> {
        if class.len() == self.rank() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: class.len(),
            })
        }
    }

    /// `Dᵀ M E`.
    pub fn intersect(&self, d: &DivisorClass, e: &DivisorClass) -> Result<Q> {
        self.check_class(d)?;
        self.check_class(e)?;
        let mut total = Q::zero();
        for (i, di) in d.coefficients().iter().enumerate() {
            if di.is_zero() {
                continue;
            }
            for (j, ej) in e.coefficients().iter().enumerate() {
                let m = self.intersection[i][j];
                if m != 0 {
                    total += di * ej * q(m);
                }
            }
        }
        Ok(total)
    }

    /// Degree against the polarization, `D·H`.
    pub fn degree(&self, d: &DivisorClass) -> Result<Q> {
        self.intersect(d, &self.polarization)
    }

    /// Degree of the cotangent bundle, `K·H`.
    pub fn cotangent_degree(&self) -> Q {
        self.degree(&self.canonical)
            .expect("canonical class has the lattice rank")
    }

    /// Degree of the conormal class of a smooth curve in class `b`: `-B·B`.
    pub fn conormal_degree(&self, b: &DivisorClass) -> Result<Q> {
        Ok(-self.intersect(b, b)?)
    }

    /// Same generators and polarization with the pairing scaled by `factor`
    /// and a new canonical class.
    pub(crate) fn scaled(&self, name: String, factor: i64, canonical: DivisorClass) -> Self {
        SurfaceModel {
            name,
            generators: self.generators.clone(),
            intersection: self
                .intersection
                .iter()
                .map(|row| row.iter().map(|m| m * factor).collect())
                .collect(),
            canonical,
            polarization: self.polarization.clone(),
            preset: None,
        }
    }
}

/// Returns `l` with `d = l·e` coefficient-wise, if one exists.
pub fn proportional_to(d: &DivisorClass, e: &DivisorClass) -> Result<Option<Q>> {
    if e.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: e.len(),
            found: d.len(),
        });
    }
    let pivot = e
        .coefficients()
        .iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| Error::InvalidArgument("proportionality against the zero class".into()))?;
    let ratio = &d.coefficients()[pivot] / &e.coefficients()[pivot];
    let matches = d
        .coefficients()
        .iter()
        .zip(e.coefficients())
        .all(|(dc, ec)| *dc == &ratio * ec);
    Ok(matches.then_some(ratio))
}
