//! Commands, shared by the command line and scenario `[queries]` lines.

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Stable,
    Semistable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionTable {
    /// Cotangent stability of plane covers over n, d = n*k.
    #[value(name = "cor3.8")]
    PlaneCover,
    /// Frobenius pushforwards on plane covers over n, d, p.
    #[value(name = "cor4.5")]
    FrobeniusPlaneCover,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Certify {
    /// Stability of the pullback of a declared sheaf.
    #[command(name = "thm3.2")]
    PullbackStability {
        bundle: String,
        /// Stability level assumed for the sheaf on the base.
        #[arg(long, value_enum, default_value = "stable")]
        assume: LevelArg,
    },
    /// Semistability of the cover's cotangent bundle.
    #[command(name = "thm3.5")]
    CotangentSemistability,
    /// Stability of the cover's cotangent bundle.
    #[command(name = "thm3.6")]
    CotangentStability,
    /// Plane cover region; n and d default to the scenario cover.
    #[command(name = "cor3.8")]
    PlaneCover {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        d: Option<u32>,
    },
    /// K3 identification together with cotangent stability.
    #[command(name = "remark3.9")]
    K3Cover,
    /// Frobenius pushforward of a declared sheaf (default: trivial line bundle).
    #[command(name = "thm4.3")]
    FrobeniusPushforward {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        bundle: Option<String>,
        /// Instability budget I(W,X) as `p/q`.
        #[arg(long, conflicts_with = "instabilities")]
        budget: Option<String>,
        /// Comma-separated instabilities of W (x) T^l, l = 0..2(p-1).
        #[arg(long)]
        instabilities: Option<String>,
        /// Assert that every W (x) T^l is stable.
        #[arg(long)]
        twists_stable: bool,
    },
    /// Frobenius pushforward on a plane cover; n and d default to the scenario cover.
    #[command(name = "cor4.5")]
    FrobeniusPlaneCover {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        d: Option<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Query {
    /// Cover invariant table: deg K_X, mu(Omega_X), branch degrees, pi_*O_X.
    Invariants,
    /// Evaluate a stability criterion as a certificate.
    Certify {
        #[command(subcommand)]
        which: Certify,
    },
    /// Is the cover's canonical class numerically trivial?
    K3,
    /// Harder-Narasimhan filtration of a declared split bundle.
    Hn { bundle: String },
    /// Pushforward invariants: pi_*O_X, or pi_*pi^*F for a declared F.
    Pushforward {
        bundle: Option<String>,
        /// Read the bundle as a sheaf on the cover and push it down.
        #[arg(long)]
        on_cover: bool,
    },
    /// Graded pieces of the Frobenius pushforward filtration.
    Frobenius { p: u32, bundle: Option<String> },
    /// Grid tables of certificates.
    Region {
        #[arg(value_enum)]
        table: RegionTable,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        /// cor3.8: d = n*k for k up to this bound.
        #[arg(long, default_value_t = 5)]
        k_max: u32,
        /// cor4.5: d = n*k up to this bound.
        #[arg(long, default_value_t = 30)]
        d_max: u32,
        /// cor4.5: comma-separated characteristics.
        #[arg(long, default_value = "3,5,7", value_delimiter = ',')]
        primes: Vec<u32>,
    },
    /// Re-run the brute-force oracles.
    Selftest,
}

impl Query {
    /// Bundle names the query refers to.
    pub fn bundle_refs(&self) -> Vec<&str> {
        match self {
            Query::Hn { bundle } => vec![bundle],
            Query::Pushforward {
                bundle: Some(b), ..
            }
            | Query::Frobenius {
                bundle: Some(b), ..
            } => vec![b],
            Query::Certify {
                which: Certify::PullbackStability { bundle, .. },
            } => vec![bundle],
            Query::Certify {
                which:
                    Certify::FrobeniusPushforward {
                        bundle: Some(b), ..
                    },
            } => vec![b],
            _ => vec![],
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "query", no_binary_name = true, disable_help_subcommand = true)]
struct QueryLine {
    #[command(subcommand)]
    query: Query,
}

/// Parses one `[queries]` line.
pub fn parse_query_line(line: &str) -> Result<Query, String> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    QueryLine::try_parse_from(tokens)
        .map(|q| q.query)
        .map_err(|e| {
            let rendered = e.render().to_string();
            rendered
                .lines()
                .next()
                .unwrap_or("invalid query")
                .trim_start_matches("error: ")
                .to_string()
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_certify_lines() {
        assert_eq!(
            parse_query_line("certify thm3.6").unwrap(),
            Query::Certify {
                which: Certify::CotangentStability
            }
        );
        assert_eq!(
            parse_query_line("certify thm3.2 omega --assume semistable").unwrap(),
            Query::Certify {
                which: Certify::PullbackStability {
                    bundle: "omega".into(),
                    assume: LevelArg::Semistable
                }
            }
        );
        assert!(matches!(
            parse_query_line("certify cor4.5 --p 5 --n 3 --d 6").unwrap(),
            Query::Certify {
                which: Certify::FrobeniusPlaneCover {
                    p: 5,
                    n: Some(3),
                    d: Some(6)
                }
            }
        ));
    }

    #[test]
    fn parses_region_defaults() {
        match parse_query_line("region cor3.8").unwrap() {
            Query::Region {
                table,
                n_max,
                k_max,
                primes,
                ..
            } => {
                assert_eq!(table, RegionTable::PlaneCover);
                assert_eq!((n_max, k_max), (6, 5));
                assert_eq!(primes, vec![3, 5, 7]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_commands() {
        assert!(parse_query_line("frobnicate").is_err());
        assert!(parse_query_line("certify thm9.9").is_err());
        assert!(parse_query_line("hn").is_err());
    }

    #[test]
    fn bundle_references() {
        let q = parse_query_line("pushforward E --on-cover").unwrap();
        assert_eq!(q.bundle_refs(), vec!["E"]);
        assert!(parse_query_line("invariants")
            .unwrap()
            .bundle_refs()
            .is_empty());
    }
}
