//! Sheaves at the level of `(rank, c1)` and split bundles.
//!
//! A split bundle `O(D_1) ⊕ … ⊕ O(D_r)` has a Harder–Narasimhan filtration
//! read off from its summand degrees: line bundles are stable and a sum of
//! line bundles of one slope is semistable, so grouping by degree and
//! ordering the groups decreasingly gives the graded pieces.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::rational::{format_rational, q, Q};

/// A locally free sheaf remembered only by rank and first Chern class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalSheaf {
    rank: u32,
    c1: DivisorClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl FormalSheaf {
    pub fn new(rank: u32, c1: DivisorClass) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidArgument(
                "sheaf rank must be at least 1".into(),
            ));
        }
        Ok(FormalSheaf {
            rank,
            c1,
            label: None,
        })
    }

    pub fn line(class: DivisorClass) -> Self {
        FormalSheaf {
            rank: 1,
            c1: class,
            label: None,
        }
    }

    pub fn trivial(rank: u32, lattice_rank: usize) -> Result<Self> {
        Self::new(rank, DivisorClass::zero(lattice_rank))
    }

    /// Rank-two sheaf with `c1 = K` (the cotangent bundle of the surface).
    pub fn cotangent(surface: &SurfaceModel) -> Self {
        FormalSheaf {
            rank: 2,
            c1: surface.canonical().clone(),
            label: Some("cotangent".into()),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn c1(&self) -> &DivisorClass {
        &self.c1
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn degree(&self, surface: &SurfaceModel) -> Result<Q> {
        surface.degree(&self.c1)
    }

    /// `deg / rank`.
    pub fn slope(&self, surface: &SurfaceModel) -> Result<Q> {
        Ok(self.degree(surface)? / q(self.rank.into()))
    }

    /// `F ⊗ O(D)`: `c1 += rank·D`.
    pub fn twist(&self, d: &DivisorClass) -> FormalSheaf {
        FormalSheaf {
            rank: self.rank,
            c1: &self.c1 + &d.scale_int(self.rank.into()),
            label: None,
        }
    }

    pub fn direct_sum<'a>(parts: impl IntoIterator<Item = &'a FormalSheaf>) -> Result<FormalSheaf> {
        let mut parts = parts.into_iter();
        let first = parts
            .next()
            .ok_or_else(|| Error::InvalidArgument("direct sum of no sheaves".into()))?;
        let mut sum = FormalSheaf {
            rank: first.rank,
            c1: first.c1.clone(),
            label: None,
        };
        for part in parts {
            if part.c1.len() != sum.c1.len() {
                return Err(Error::DimensionMismatch {
                    expected: sum.c1.len(),
                    found: part.c1.len(),
                });
            }
            sum.rank += part.rank;
            sum.c1 = &sum.c1 + &part.c1;
        }
        Ok(sum)
    }

    /// `rank = r·s`, `c1 = s·c1(F) + r·c1(G)`.
    pub fn tensor(&self, other: &FormalSheaf) -> FormalSheaf {
        FormalSheaf {
            rank: self.rank * other.rank,
            c1: &self.c1.scale_int(other.rank.into()) + &other.c1.scale_int(self.rank.into()),
            label: None,
        }
    }

    /// `Sym^l` of a rank-two sheaf: rank `l + 1`, `c1 = l(l+1)/2 · c1(F)`.
    pub fn sym_power_rank2(&self, l: u32) -> Result<FormalSheaf> {
        if self.rank != 2 {
            return Err(Error::InvalidArgument(format!(
                "symmetric power formula needs rank 2, got rank {}",
                self.rank
            )));
        }
        let weight = i64::from(l) * (i64::from(l) + 1) / 2;
        Ok(FormalSheaf {
            rank: l + 1,
            c1: self.c1.scale_int(weight),
            label: None,
        })
    }
}

impl fmt::Display for FormalSheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(label) = &self.label {
            write!(f, "{label}: ")?;
        }
        write!(f, "rank {} c1 {}", self.rank, self.c1)
    }
}

/// `O(D_1) ⊕ … ⊕ O(D_r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitBundle {
    summands: Vec<DivisorClass>,
}

impl SplitBundle {
    pub fn new(summands: Vec<DivisorClass>) -> Result<Self> {
        let first = summands
            .first()
            .ok_or_else(|| Error::InvalidArgument("split bundle needs a summand".into()))?;
        if let Some(bad) = summands.iter().find(|s| s.len() != first.len()) {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                found: bad.len(),
            });
        }
        Ok(SplitBundle { summands })
    }

    pub fn summands(&self) -> &[DivisorClass] {
        &self.summands
    }

    pub fn rank(&self) -> u32 {
        self.summands.len() as u32
    }

    pub fn c1(&self) -> DivisorClass {
        self.summands
            .iter()
            .skip(1)
            .fold(self.summands[0].clone(), |acc, d| &acc + d)
    }

    pub fn as_sheaf(&self) -> FormalSheaf {
        FormalSheaf {
            rank: self.rank(),
            c1: self.c1(),
            label: None,
        }
    }

    pub fn twist(&self, d: &DivisorClass) -> SplitBundle {
        SplitBundle {
            summands: self.summands.iter().map(|s| s + d).collect(),
        }
    }

    pub fn summand_degrees(&self, surface: &SurfaceModel) -> Result<Vec<Q>> {
        self.summands.iter().map(|s| surface.degree(s)).collect()
    }

    pub fn slope(&self, surface: &SurfaceModel) -> Result<Q> {
        self.as_sheaf().slope(surface)
    }

    pub fn hn(&self, surface: &SurfaceModel) -> Result<HnFiltration> {
        let degrees = self.summand_degrees(surface)?;
        let mut groups: BTreeMap<Q, Vec<usize>> = BTreeMap::new();
        for (i, d) in degrees.into_iter().enumerate() {
            groups.entry(d).or_default().push(i);
        }
        let levels: Vec<HnLevel> = groups
            .into_iter()
            .rev()
            .map(|(slope, summands)| HnLevel { slope, summands })
            .collect();
        let mu_max = levels[0].slope.clone();
        let mu_min = levels[levels.len() - 1].slope.clone();
        Ok(HnFiltration {
            instability: &mu_max - &mu_min,
            levels,
            mu_max,
            mu_min,
        })
    }

    pub fn instability(&self, surface: &SurfaceModel) -> Result<Q> {
        Ok(self.hn(surface)?.instability)
    }

    pub fn is_semistable(&self, surface: &SurfaceModel) -> Result<bool> {
        Ok(self.instability(surface)?.is_zero())
    }

    /// Jordan–Hölder factors of a semistable split bundle: its summands.
    pub fn jh_factors(&self, surface: &SurfaceModel) -> Result<Vec<DivisorClass>> {
        let hn = self.hn(surface)?;
        if hn.instability.is_positive() {
            return Err(Error::NotSemistable {
                mu_max: Box::new(hn.mu_max),
                mu_min: Box::new(hn.mu_min),
            });
        }
        let mut factors = self.summands.clone();
        factors.sort_by(|a, b| a.coefficients().cmp(b.coefficients()));
        Ok(factors)
    }
}

/// One graded piece of a split bundle's HN filtration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnLevel {
    #[serde(with = "crate::rational::serde_q")]
    pub slope: Q,
    /// Indices into the bundle's summand list, ascending.
    pub summands: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HnFiltration {
    /// Strictly decreasing slopes.
    pub levels: Vec<HnLevel>,
    #[serde(with = "crate::rational::serde_q")]
    pub mu_max: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub mu_min: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub instability: Q,
}

impl HnFiltration {
    pub fn is_semistable(&self) -> bool {
        self.levels.len() == 1
    }

    /// Summand indices of the `level`-th subsheaf: every summand of slope at
    /// least that level's.
    pub fn subsheaf(&self, level: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.levels[..=level]
            .iter()
            .flat_map(|l| l.summands.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Display for HnFiltration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, level) in self.levels.iter().enumerate() {
            let idx: Vec<String> = level.summands.iter().map(|s| s.to_string()).collect();
            writeln!(
                f,
                "  level {i}: slope {} summands {{{}}}",
                format_rational(&level.slope),
                idx.join(", ")
            )?;
        }
        write!(
            f,
            "  mu_max {}  mu_min {}  instability {}",
            format_rational(&self.mu_max),
            format_rational(&self.mu_min),
            format_rational(&self.instability)
        )
    }
}
