//! Query results, rendered as text or as deterministic JSON.

use std::fmt;

use serde::{Deserialize, Serialize};
use slopecert_core::criteria::{Certificate, Conclusion, K3Report};
use slopecert_core::frobenius::FiltrationProfile;
use slopecert_core::oracle::SelftestReport;
use slopecert_core::rational::{format_rational, serde_opt_q, serde_q, serde_q_vec, Q};
use slopecert_core::sheaf::HnFiltration;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub results: Vec<QueryResult>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryResult {
    pub query: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Certificate {
        certificate: Certificate,
    },
    Invariants(InvariantTable),
    K3 {
        report: K3Report,
    },
    Hn {
        bundle: String,
        #[serde(with = "serde_q_vec")]
        summand_degrees: Vec<Q>,
        filtration: HnFiltration,
        /// Graded pieces of a Jordan-Hölder filtration, by degree; only for
        /// semistable bundles.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        jh_degrees: Option<Vec<String>>,
    },
    Pushforward(PushforwardTable),
    Frobenius {
        bundle: String,
        profile: FiltrationProfile,
        rank: u64,
        #[serde(with = "serde_q")]
        degree: Q,
        #[serde(with = "serde_q")]
        slope: Q,
    },
    Region {
        table: String,
        rows: Vec<RegionRow>,
    },
    Selftest {
        report: SelftestReport,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantTable {
    pub cover: String,
    pub n: u32,
    pub char_p: u64,
    #[serde(with = "serde_q")]
    pub deg_k_x: Q,
    #[serde(with = "serde_q")]
    pub deg_k_x_formula: Q,
    #[serde(with = "serde_q")]
    pub mu_omega_x: Q,
    #[serde(with = "serde_q")]
    pub deg_b: Q,
    #[serde(with = "serde_q")]
    pub deg_b_on_cover: Q,
    #[serde(with = "serde_q_vec")]
    pub pushforward_o_degrees: Vec<Q>,
    #[serde(with = "serde_q")]
    pub mu_pushforward_o: Q,
    #[serde(with = "serde_q")]
    pub criterion_value: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushforwardTable {
    pub bundle: String,
    /// `true` when the bundle lives on the cover and is pushed down;
    /// otherwise it is pulled back first.
    pub from_cover: bool,
    pub rank: u32,
    #[serde(with = "serde_q")]
    pub degree: Q,
    #[serde(with = "serde_q")]
    pub slope: Q,
    #[serde(with = "serde_q")]
    pub slope_simplified: Q,
    #[serde(with = "serde_q")]
    pub slope_via_cotangents: Q,
    /// Degrees of the pieces `F(-iL)` of `pi_* pi^* F`.
    #[serde(default, with = "serde_q_vec", skip_serializing_if = "Vec::is_empty")]
    pub piece_degrees: Vec<Q>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionRow {
    pub n: u32,
    pub d: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    pub conclusion: Conclusion,
    /// The closed-form or claimed verdict this row is checked against.
    pub expected: Conclusion,
    pub agrees: bool,
    #[serde(default, with = "serde_opt_q", skip_serializing_if = "Option::is_none")]
    pub k_x_h: Option<Q>,
    pub certificate: Certificate,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<Report> {
        serde_json::from_str(text)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.results.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "> {}", r.query)?;
            write!(f, "{}", r.outcome)?;
        }
        Ok(())
    }
}

fn join(values: &[Q]) -> String {
    values
        .iter()
        .map(format_rational)
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Certificate { certificate } => writeln!(f, "{certificate}"),
            Outcome::Invariants(t) => {
                writeln!(f, "{}", t.cover)?;
                writeln!(f, "  deg K_X           {}", format_rational(&t.deg_k_x))?;
                writeln!(
                    f,
                    "  deg K_X (formula) {}",
                    format_rational(&t.deg_k_x_formula)
                )?;
                writeln!(f, "  mu(Omega_X)       {}", format_rational(&t.mu_omega_x))?;
                writeln!(f, "  deg B on Y        {}", format_rational(&t.deg_b))?;
                writeln!(
                    f,
                    "  deg B on X        {}",
                    format_rational(&t.deg_b_on_cover)
                )?;
                writeln!(
                    f,
                    "  pi_*O_X degrees   [{}]",
                    join(&t.pushforward_o_degrees)
                )?;
                writeln!(
                    f,
                    "  mu(pi_*O_X)       {}",
                    format_rational(&t.mu_pushforward_o)
                )?;
                writeln!(
                    f,
                    "  criterion value   {}",
                    format_rational(&t.criterion_value)
                )
            }
            Outcome::K3 { report } => writeln!(f, "{report}"),
            Outcome::Hn {
                bundle,
                summand_degrees,
                filtration,
                jh_degrees,
            } => {
                let state = if filtration.is_semistable() {
                    "semistable"
                } else {
                    "unstable"
                };
                writeln!(
                    f,
                    "HN filtration of {bundle} [{}]: {state}",
                    join(summand_degrees)
                )?;
                writeln!(f, "{filtration}")?;
                if let Some(jh) = jh_degrees {
                    writeln!(f, "  JH factors: {}", jh.join(", "))?;
                }
                Ok(())
            }
            Outcome::Pushforward(t) => {
                let how = if t.from_cover { "pi_*" } else { "pi_* pi^*" };
                writeln!(
                    f,
                    "{how}{}: rank {}  degree {}  slope {}",
                    t.bundle,
                    t.rank,
                    format_rational(&t.degree),
                    format_rational(&t.slope)
                )?;
                writeln!(
                    f,
                    "  simplified slope      {}",
                    format_rational(&t.slope_simplified)
                )?;
                writeln!(
                    f,
                    "  via cotangent slopes  {}",
                    format_rational(&t.slope_via_cotangents)
                )?;
                if !t.piece_degrees.is_empty() {
                    writeln!(f, "  piece degrees         [{}]", join(&t.piece_degrees))?;
                }
                for note in &t.notes {
                    writeln!(f, "  note: {note}")?;
                }
                Ok(())
            }
            Outcome::Frobenius {
                bundle,
                profile,
                rank,
                degree,
                slope,
            } => {
                writeln!(f, "F_*{bundle} (p = {})", profile.p)?;
                writeln!(f, "{profile}")?;
                writeln!(
                    f,
                    "  F_*W: rank {rank}  degree {}  slope {}",
                    format_rational(degree),
                    format_rational(slope)
                )
            }
            Outcome::Region { table, rows } => {
                writeln!(f, "region {table}")?;
                for row in rows {
                    let p = row.p.map(|p| format!(" p={p}")).unwrap_or_default();
                    let mark = if row.agrees { "" } else { "  MISMATCH" };
                    let notes = if row
                        .certificate
                        .notes
                        .iter()
                        .any(|n| n.starts_with("erratum"))
                    {
                        "  (erratum)"
                    } else {
                        ""
                    };
                    writeln!(
                        f,
                        "  n={} d={}{p}: {} (expected {}){mark}{notes}",
                        row.n, row.d, row.conclusion, row.expected
                    )?;
                }
                Ok(())
            }
            Outcome::Selftest { report } => write!(f, "{report}"),
        }
    }
}
