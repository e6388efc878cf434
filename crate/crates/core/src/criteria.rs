//! Stability criteria as hypothesis-checked certificates.
//!
//! Every criterion here is a sufficient condition. A certificate lists each
//! hypothesis with how it was established (computed exactly, asserted as a
//! modelling input, or discharged by another result) and licenses at most
//! the conclusion the satisfied hypotheses allow. There is no "unstable"
//! verdict: a failed hypothesis yields [`Conclusion::Inconclusive`].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cover::{plane_cover, CyclicCover, SLOPE_CONSTANT_NOTE};
use crate::error::Result;
use crate::lattice::proportional_to;
use crate::rational::{format_rational, q, Q};
use crate::sheaf::FormalSheaf;

/// Identifies the criterion a certificate evaluates. The serialized names
/// are the identifiers accepted by the `certify` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// Stability of `π*F` from stability of `F`.
    #[serde(rename = "thm3.2")]
    PullbackStability,
    /// Semistability of `Ω_X` from the non-strict branch inequality.
    #[serde(rename = "thm3.5")]
    CotangentSemistability,
    /// Stability of `Ω_X` from the strict branch inequality.
    #[serde(rename = "thm3.6")]
    CotangentStability,
    /// Cyclic covers of the plane.
    #[serde(rename = "cor3.8")]
    PlaneCover,
    /// The two K3 covers of the plane.
    #[serde(rename = "remark3.9")]
    K3Cover,
    /// (Semi)stability of a Frobenius pushforward from its filtration.
    #[serde(rename = "thm4.3")]
    FrobeniusPushforward,
    /// Frobenius pushforwards of rank-one sheaves on plane covers.
    #[serde(rename = "cor4.5")]
    FrobeniusPlaneCover,
}

impl TheoremId {
    pub const ALL: [TheoremId; 7] = [
        TheoremId::PullbackStability,
        TheoremId::CotangentSemistability,
        TheoremId::CotangentStability,
        TheoremId::PlaneCover,
        TheoremId::K3Cover,
        TheoremId::FrobeniusPushforward,
        TheoremId::FrobeniusPlaneCover,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::PullbackStability => "thm3.2",
            TheoremId::CotangentSemistability => "thm3.5",
            TheoremId::CotangentStability => "thm3.6",
            TheoremId::PlaneCover => "cor3.8",
            TheoremId::K3Cover => "remark3.9",
            TheoremId::FrobeniusPushforward => "thm4.3",
            TheoremId::FrobeniusPlaneCover => "cor4.5",
        }
    }

    pub fn parse(name: &str) -> Option<TheoremId> {
        let lower = name.to_ascii_lowercase();
        TheoremId::ALL.into_iter().find(|t| t.as_str() == lower)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conclusion {
    Inconclusive,
    Semistable,
    Stable,
}

impl Conclusion {
    pub fn is_semistable(self) -> bool {
        self >= Conclusion::Semistable
    }

    pub fn is_stable(self) -> bool {
        self == Conclusion::Stable
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::Inconclusive => "inconclusive",
            Conclusion::Semistable => "semistable",
            Conclusion::Stable => "stable",
        })
    }
}

/// The two stability levels a hypothesis or assumption can speak to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityLevel {
    Semistable,
    Stable,
}

impl StabilityLevel {
    pub fn parse(name: &str) -> Option<StabilityLevel> {
        match name.to_ascii_lowercase().as_str() {
            "stable" => Some(StabilityLevel::Stable),
            "semistable" | "semi-stable" => Some(StabilityLevel::Semistable),
            _ => None,
        }
    }

    fn conclusion(self) -> Conclusion {
        match self {
            StabilityLevel::Semistable => Conclusion::Semistable,
            StabilityLevel::Stable => Conclusion::Stable,
        }
    }
}

impl fmt::Display for StabilityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.conclusion().fmt(f)
    }
}

/// How a hypothesis was established.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "status", content = "by")]
pub enum Evidence {
    /// Evaluated exactly by this crate.
    Computed,
    /// A modelling input taken on trust.
    Asserted,
    /// Follows from another criterion, named here.
    Discharged(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    #[serde(flatten)]
    pub evidence: Evidence,
    #[serde(
        default,
        with = "crate::rational::serde_opt_q",
        skip_serializing_if = "Option::is_none"
    )]
    pub value: Option<Q>,
    pub satisfied: bool,
    /// Weakest conclusion that needs this hypothesis.
    pub required_for: StabilityLevel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub theorem: TheoremId,
    pub subject: String,
    pub hypotheses: Vec<Hypothesis>,
    pub conclusion: Conclusion,
    #[serde(with = "crate::rational::serde_q_map")]
    pub values: BTreeMap<String, Q>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn value(&self, key: &str) -> Option<&Q> {
        self.values.get(key)
    }

    pub fn hypothesis(&self, name: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.name == name)
    }

    pub fn failed_hypotheses(&self) -> impl Iterator<Item = &Hypothesis> {
        self.hypotheses.iter().filter(|h| !h.satisfied)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "certificate {} for {}", self.theorem, self.subject)?;
        for h in &self.hypotheses {
            let how = match &h.evidence {
                Evidence::Computed => "computed".to_string(),
                Evidence::Asserted => "asserted".to_string(),
                Evidence::Discharged(by) => format!("discharged by {by}"),
            };
            let mark = if h.satisfied { "ok  " } else { "FAIL" };
            write!(f, "  [{mark}] {} ({how}, for {})", h.name, h.required_for)?;
            if let Some(v) = &h.value {
                write!(f, " = {}", format_rational(v))?;
            }
            writeln!(f)?;
        }
        for (k, v) in &self.values {
            writeln!(f, "  {k} = {}", format_rational(v))?;
        }
        for note in &self.notes {
            writeln!(f, "  note: {note}")?;
        }
        write!(f, "  conclusion: {}", self.conclusion)
    }
}

/// Collects hypotheses and derives the licensed conclusion.
#[derive(Debug, Clone)]
pub struct CertificateBuilder {
    theorem: TheoremId,
    subject: String,
    ceiling: StabilityLevel,
    hypotheses: Vec<Hypothesis>,
    values: BTreeMap<String, Q>,
    notes: Vec<String>,
}

impl CertificateBuilder {
    /// `ceiling` is the strongest conclusion the criterion can ever license.
    pub fn new(theorem: TheoremId, subject: impl Into<String>, ceiling: StabilityLevel) -> Self {
        CertificateBuilder {
            theorem,
            subject: subject.into(),
            ceiling,
            hypotheses: Vec::new(),
            values: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn computed(
        mut self,
        name: &str,
        value: Option<Q>,
        satisfied: bool,
        required_for: StabilityLevel,
    ) -> Self {
        self.hypotheses.push(Hypothesis {
            name: name.into(),
            evidence: Evidence::Computed,
            value,
            satisfied,
            required_for,
        });
        self
    }

    pub fn asserted(mut self, name: &str, required_for: StabilityLevel) -> Self {
        self.hypotheses.push(Hypothesis {
            name: name.into(),
            evidence: Evidence::Asserted,
            value: None,
            satisfied: true,
            required_for,
        });
        self
    }

    pub fn discharged(
        mut self,
        name: &str,
        by: &str,
        satisfied: bool,
        required_for: StabilityLevel,
    ) -> Self {
        self.hypotheses.push(Hypothesis {
            name: name.into(),
            evidence: Evidence::Discharged(by.into()),
            value: None,
            satisfied,
            required_for,
        });
        self
    }

    pub fn value(mut self, key: &str, value: Q) -> Self {
        self.values.insert(key.into(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn finish(self) -> Certificate {
        let holds = |level: StabilityLevel| {
            self.hypotheses
                .iter()
                .filter(|h| h.required_for <= level)
                .all(|h| h.satisfied)
        };
        let conclusion = if !holds(StabilityLevel::Semistable) {
            Conclusion::Inconclusive
        } else if self.ceiling == StabilityLevel::Stable && holds(StabilityLevel::Stable) {
            Conclusion::Stable
        } else {
            Conclusion::Semistable
        };
        Certificate {
            theorem: self.theorem,
            subject: self.subject,
            hypotheses: self.hypotheses,
            conclusion,
            values: self.values,
            notes: self.notes,
        }
    }
}

const DESCENT_NOTE: &str = "a destabilizing subsheaf of the pullback is assumed to descend along \
the Galois action (descent is an assumption here, never executed)";

const TORSION_NOTE: &str = "strict slope drops coming from torsion quotients are recorded as \
annotations, not computed on sheaf data";

const DEGENERATE_BRANCH_NOTE: &str = "branch class is numerically trivial: no l > 0 with H = l*B \
exists, so the criterion does not apply";

fn char_hypothesis(cover: &CyclicCover) -> (bool, Option<Q>) {
    let p = cover.char_p();
    let ok = p == 0 || u64::from(cover.degree()) % p != 0;
    (ok, Some(q(p as i64)))
}

/// Stability of `π*F` with respect to `π*H`, given that of `F`.
pub fn pullback_stability(
    cover: &CyclicCover,
    f: &FormalSheaf,
    assumed: StabilityLevel,
) -> Result<Certificate> {
    let pulled = cover.pullback_sheaf(f)?;
    let mu = f.slope(cover.base())?;
    let mu_pulled = pulled.slope(cover.surface())?;
    let (char_ok, p) = char_hypothesis(cover);
    let subject = match f.label() {
        Some(label) => format!("pullback of {label} to {cover}"),
        None => format!("pullback of rank {} sheaf to {cover}", f.rank()),
    };
    Ok(
        CertificateBuilder::new(TheoremId::PullbackStability, subject, assumed)
            .computed(
                "char p does not divide n",
                p,
                char_ok,
                StabilityLevel::Semistable,
            )
            .asserted("branch curve smooth", StabilityLevel::Semistable)
            .asserted("F locally free", StabilityLevel::Semistable)
            .asserted(&format!("F {assumed} w.r.t. H"), StabilityLevel::Semistable)
            .value("n", q(cover.degree().into()))
            .value("mu_F", mu)
            .value("mu_pullback", mu_pulled)
            .note(DESCENT_NOTE)
            .finish(),
    )
}

/// `n·deg Ω_Y + (n+1)·deg B`.
pub fn branch_criterion_value(cover: &CyclicCover) -> Q {
    let n = q(cover.degree().into());
    &n * cover.base().cotangent_degree() + (&n + Q::one()) * cover.branch_degrees().on_base
}

fn cotangent_certificate(cover: &CyclicCover, strict: bool) -> Certificate {
    let (theorem, ceiling, inequality) = if strict {
        (
            TheoremId::CotangentStability,
            StabilityLevel::Stable,
            "n*deg Omega_Y + (n+1)*deg B > 0",
        )
    } else {
        (
            TheoremId::CotangentSemistability,
            StabilityLevel::Semistable,
            "n*deg Omega_Y + (n+1)*deg B >= 0",
        )
    };
    let base = cover.base();
    let value = branch_criterion_value(cover);
    let inequality_holds = if strict {
        value.is_positive()
    } else {
        !value.is_negative()
    };
    let branch = cover.branch_class();
    let proportionality = proportional_to(base.polarization(), &branch).ok().flatten();
    let proportional_ok = proportionality.as_ref().is_some_and(Signed::is_positive);
    let (char_ok, p) = char_hypothesis(cover);

    let mut builder =
        CertificateBuilder::new(theorem, format!("cotangent bundle of {cover}"), ceiling)
            .computed(
                "char p does not divide n",
                p,
                char_ok,
                StabilityLevel::Semistable,
            )
            .asserted("H ample", StabilityLevel::Semistable)
            .asserted("branch curve smooth", StabilityLevel::Semistable)
            .computed(
                "H = l*B for some rational l > 0",
                proportionality.clone(),
                proportional_ok,
                StabilityLevel::Semistable,
            );
    builder = if base.is_projective_plane() {
        builder.discharged(
            "Omega_Y semistable w.r.t. H",
            "stability of the plane's cotangent bundle",
            true,
            StabilityLevel::Semistable,
        )
    } else {
        builder.asserted("Omega_Y semistable w.r.t. H", StabilityLevel::Semistable)
    };
    builder = builder
        .computed(
            inequality,
            Some(value.clone()),
            inequality_holds,
            StabilityLevel::Semistable,
        )
        .value("criterion_value", value)
        .value("n", q(cover.degree().into()))
        .value("deg_omega_y", base.cotangent_degree())
        .value("deg_b", cover.branch_degrees().on_base)
        .value("mu_omega_x", cover.cotangent_x_slope());
    if let Some(l) = proportionality {
        builder = builder.value("l", l);
    }
    if branch.is_zero() {
        builder = builder.note(DEGENERATE_BRANCH_NOTE);
    }
    if strict {
        builder = builder.note(SLOPE_CONSTANT_NOTE).note(TORSION_NOTE);
    }
    builder.finish()
}

/// Semistability of `Ω_X` with respect to `π*H`.
pub fn cotangent_semistability(cover: &CyclicCover) -> Certificate {
    cotangent_certificate(cover, false)
}

/// Stability of `Ω_X` with respect to `π*H`.
pub fn cotangent_stability(cover: &CyclicCover) -> Certificate {
    cotangent_certificate(cover, true)
}

/// The plane-cover region in closed form: always semistable; stable when
/// `n = 2, d ≥ 4` or `n > 2`.
pub fn plane_cover_region(n: u32, d: u32) -> Conclusion {
    if (n == 2 && d >= 4) || n > 2 {
        Conclusion::Stable
    } else {
        Conclusion::Semistable
    }
}

/// Plane cover of degree `n` branched along a curve of degree `d`, decided
/// by delegating to the two cotangent criteria and checked against the
/// closed-form region.
pub fn p2_cover(n: u32, d: u32) -> Result<Certificate> {
    let cover = plane_cover(n, d, 0)?;
    let semi = cotangent_semistability(&cover);
    let stable = cotangent_stability(&cover);
    let delegated = if stable.conclusion.is_stable() {
        Conclusion::Stable
    } else if semi.conclusion.is_semistable() {
        Conclusion::Semistable
    } else {
        Conclusion::Inconclusive
    };
    let closed = plane_cover_region(n, d);
    let indicator = |b: bool| if b { Q::one() } else { Q::zero() };
    Ok(CertificateBuilder::new(
        TheoremId::PlaneCover,
        format!("cotangent bundle of the {n}-cyclic plane cover branched in degree {d}"),
        StabilityLevel::Stable,
    )
    .discharged(
        "Omega_X semistable",
        TheoremId::CotangentSemistability.as_str(),
        semi.conclusion.is_semistable(),
        StabilityLevel::Semistable,
    )
    .discharged(
        "Omega_X stable",
        TheoremId::CotangentStability.as_str(),
        stable.conclusion.is_stable(),
        StabilityLevel::Stable,
    )
    .computed(
        "delegated verdict matches closed-form region",
        None,
        delegated == closed,
        StabilityLevel::Semistable,
    )
    .value("n", q(n.into()))
    .value("d", q(d.into()))
    .value("criterion_value", branch_criterion_value(&cover))
    .value("closed_form_stable", indicator(closed.is_stable()))
    .finish())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K3Report {
    pub is_k3: bool,
    #[serde(with = "crate::rational::serde_q")]
    pub canonical_degree: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub cotangent_slope: Q,
    /// Set for the two plane covers known to be K3 surfaces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_instance: Option<String>,
}

impl fmt::Display for K3Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K_X trivial: {}  deg K_X = {}  mu(Omega_X) = {}",
            self.is_k3,
            format_rational(&self.canonical_degree),
            format_rational(&self.cotangent_slope)
        )?;
        if let Some(known) = &self.known_instance {
            write!(f, "\n  {known}")?;
        }
        Ok(())
    }
}

/// `K_X ≡ 0`, with the two plane K3 covers called out.
pub fn k3_check(cover: &CyclicCover) -> K3Report {
    let is_k3 = cover.is_canonically_trivial();
    let known_instance = if cover.base().is_projective_plane() {
        let d = cover.branch_degrees().on_base;
        match (cover.degree(), d) {
            (2, d) if d == q(6) => {
                Some("double plane branched along a sextic: K3 of degree 2".into())
            }
            (4, d) if d == q(4) => {
                Some("4-cyclic plane cover branched along a quartic: K3 of degree 4".into())
            }
            _ => None,
        }
    } else {
        None
    };
    K3Report {
        is_k3,
        canonical_degree: cover.surface().cotangent_degree(),
        cotangent_slope: cover.cotangent_x().slope(cover.surface()).expect("rank 2"),
        known_instance,
    }
}

/// K3 identification combined with the strict cotangent criterion.
pub fn k3_certificate(cover: &CyclicCover) -> Certificate {
    let report = k3_check(cover);
    let stable = cotangent_stability(cover);
    let mut builder = CertificateBuilder::new(
        TheoremId::K3Cover,
        format!("cotangent bundle of {cover}"),
        StabilityLevel::Stable,
    )
    .computed(
        "K_X numerically trivial",
        None,
        report.is_k3,
        StabilityLevel::Semistable,
    )
    .discharged(
        "Omega_X stable",
        TheoremId::CotangentStability.as_str(),
        stable.conclusion.is_stable(),
        StabilityLevel::Stable,
    )
    .value("deg_k_x", report.canonical_degree.clone())
    .value("mu_omega_x", report.cotangent_slope.clone())
    .value("criterion_value", branch_criterion_value(cover));
    if let Some(known) = report.known_instance {
        builder = builder.note(known);
    }
    builder.finish()
}
