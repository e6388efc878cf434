//! Runs queries against a parsed scenario.

use num_traits::ToPrimitive;
use slopecert_core::cover::{SlopeConstant, SLOPE_CONSTANT_NOTE};
use slopecert_core::criteria::{self, Conclusion, StabilityLevel};
use slopecert_core::frobenius::{self, FrobeniusContext};
use slopecert_core::oracle;
use slopecert_core::rational::{parse_rational, Q};
use slopecert_core::sheaf::FormalSheaf;
use slopecert_core::{CyclicCover, SurfaceModel};

use crate::error::{CliError, Result};
use crate::query::{Certify, LevelArg, Query, RegionTable};
use crate::report::{InvariantTable, Outcome, PushforwardTable, RegionRow};
use crate::scenario::{Bundle, Scenario};

impl From<LevelArg> for StabilityLevel {
    fn from(level: LevelArg) -> Self {
        match level {
            LevelArg::Stable => StabilityLevel::Stable,
            LevelArg::Semistable => StabilityLevel::Semistable,
        }
    }
}

struct Runner<'a> {
    scenario: &'a Scenario,
    context: String,
}

/// Evaluates one query. `context` names it in error messages.
pub fn run(scenario: &Scenario, query: &Query, context: &str) -> Result<Outcome> {
    Runner {
        scenario,
        context: context.to_string(),
    }
    .run(query)
}

impl Runner<'_> {
    fn cover(&self) -> Result<&CyclicCover> {
        self.scenario.cover.as_ref().ok_or_else(|| {
            CliError::Usage(format!(
                "{}: this query needs a [cover] section",
                self.context
            ))
        })
    }

    fn surface(&self) -> Result<&SurfaceModel> {
        self.scenario.surface.as_ref().ok_or_else(|| {
            CliError::Usage(format!(
                "{}: this query needs a [surface] section",
                self.context
            ))
        })
    }

    fn bundle(&self, name: &str) -> Result<&Bundle> {
        self.scenario
            .bundles
            .get(name)
            .ok_or_else(|| CliError::Unresolved {
                name: name.to_string(),
                line: None,
            })
    }

    fn invariant<T>(&self, r: slopecert_core::Result<T>) -> Result<T> {
        r.map_err(CliError::invariant(self.context.clone()))
    }

    /// `(n, d)` from explicit flags, falling back to the scenario's plane cover.
    fn plane_nd(&self, n: Option<u32>, d: Option<u32>) -> Result<(u32, u32)> {
        if let (Some(n), Some(d)) = (n, d) {
            return Ok((n, d));
        }
        let cover = self
            .scenario
            .cover
            .as_ref()
            .filter(|c| c.base().is_projective_plane());
        let cover = cover.ok_or_else(|| {
            CliError::Usage(format!(
                "{}: give --n and --d, or declare a cover of the p2 preset",
                self.context
            ))
        })?;
        let d_cover = cover
            .branch_degrees()
            .on_base
            .to_integer()
            .to_u32()
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "{}: branch degree is not a positive integer",
                    self.context
                ))
            })?;
        Ok((n.unwrap_or(cover.degree()), d.unwrap_or(d_cover)))
    }

    fn frobenius_context(&self, p: u32) -> Result<FrobeniusContext> {
        let ctx = match &self.scenario.cover {
            Some(cover) => FrobeniusContext::from_cover(cover, p),
            None => FrobeniusContext::new(p, self.surface()?.clone()),
        };
        self.invariant(ctx)
    }

    /// `W`, defaulting to the trivial line bundle on the Frobenius surface.
    fn frobenius_sheaf(
        &self,
        ctx: &FrobeniusContext,
        bundle: Option<&str>,
    ) -> Result<(String, FormalSheaf)> {
        match bundle {
            Some(name) => Ok((name.to_string(), self.bundle(name)?.as_sheaf())),
            None => Ok((
                "O".to_string(),
                self.invariant(FormalSheaf::trivial(1, ctx.surface().rank()))?,
            )),
        }
    }

    fn run(&self, query: &Query) -> Result<Outcome> {
        match query {
            Query::Invariants => self.invariants(),
            Query::Certify { which } => Ok(Outcome::Certificate {
                certificate: self.certify(which)?,
            }),
            Query::K3 => Ok(Outcome::K3 {
                report: criteria::k3_check(self.cover()?),
            }),
            Query::Hn { bundle } => self.hn(bundle),
            Query::Pushforward { bundle, on_cover } => {
                self.pushforward(bundle.as_deref(), *on_cover)
            }
            Query::Frobenius { p, bundle } => {
                let ctx = self.frobenius_context(*p)?;
                let (name, w) = self.frobenius_sheaf(&ctx, bundle.as_deref())?;
                let profile = self.invariant(ctx.filtration_profile(&w))?;
                let push = self.invariant(ctx.pushforward_invariants(&w))?;
                Ok(Outcome::Frobenius {
                    bundle: name,
                    profile,
                    rank: push.rank,
                    degree: push.degree,
                    slope: push.slope,
                })
            }
            Query::Region {
                table,
                n_max,
                k_max,
                d_max,
                primes,
            } => self.region(*table, *n_max, *k_max, *d_max, primes),
            Query::Selftest => Ok(Outcome::Selftest {
                report: self.invariant(oracle::selftest())?,
            }),
        }
    }

    fn invariants(&self) -> Result<Outcome> {
        let cover = self.cover()?;
        let x = cover.surface();
        let push_o = cover.pushforward_o();
        let branch = cover.branch_degrees();
        Ok(Outcome::Invariants(InvariantTable {
            cover: cover.to_string(),
            n: cover.degree(),
            char_p: cover.char_p(),
            deg_k_x: x.cotangent_degree(),
            deg_k_x_formula: cover.canonical_degree_formula(),
            mu_omega_x: cover.cotangent_x_slope(),
            deg_b: branch.on_base,
            deg_b_on_cover: branch.on_cover,
            pushforward_o_degrees: self.invariant(push_o.summand_degrees(cover.base()))?,
            mu_pushforward_o: self.invariant(push_o.slope(cover.base()))?,
            criterion_value: criteria::branch_criterion_value(cover),
        }))
    }

    fn certify(&self, which: &Certify) -> Result<criteria::Certificate> {
        match which {
            Certify::PullbackStability { bundle, assume } => {
                let f = self.bundle(bundle)?.as_sheaf();
                self.invariant(criteria::pullback_stability(
                    self.cover()?,
                    &f,
                    (*assume).into(),
                ))
            }
            Certify::CotangentSemistability => Ok(criteria::cotangent_semistability(self.cover()?)),
            Certify::CotangentStability => Ok(criteria::cotangent_stability(self.cover()?)),
            Certify::PlaneCover { n, d } => {
                let (n, d) = self.plane_nd(*n, *d)?;
                self.invariant(criteria::p2_cover(n, d))
            }
            Certify::K3Cover => Ok(criteria::k3_certificate(self.cover()?)),
            Certify::FrobeniusPushforward {
                p,
                bundle,
                budget,
                instabilities,
                twists_stable,
            } => self.frobenius_certificate(
                *p,
                bundle.as_deref(),
                budget.as_deref(),
                instabilities.as_deref(),
                *twists_stable,
            ),
            Certify::FrobeniusPlaneCover { p, n, d } => {
                let (n, d) = self.plane_nd(*n, *d)?;
                self.invariant(frobenius::cor45(n, d, *p))
            }
        }
    }

    fn frobenius_certificate(
        &self,
        p: u32,
        bundle: Option<&str>,
        budget: Option<&str>,
        instabilities: Option<&str>,
        twists_stable: bool,
    ) -> Result<criteria::Certificate> {
        let ctx = self.frobenius_context(p)?;
        let (_, w) = self.frobenius_sheaf(&ctx, bundle)?;
        let rational = |s: &str| {
            parse_rational(s.trim()).map_err(|e| CliError::Usage(format!("{}: {e}", self.context)))
        };
        let (budget, twists_stable) = match (budget, instabilities) {
            (Some(b), _) => (rational(b)?, twists_stable),
            (None, Some(list)) => {
                let values = list.split(',').map(rational).collect::<Result<Vec<Q>>>()?;
                (
                    self.invariant(ctx.instability_budget(&w, &values))?,
                    twists_stable,
                )
            }
            (None, None) => {
                // Only a cover with stable cotangent bundle discharges the budget.
                let stable = self
                    .scenario
                    .cover
                    .as_ref()
                    .is_some_and(|c| criteria::cotangent_stability(c).conclusion.is_stable());
                let level = if stable {
                    StabilityLevel::Stable
                } else {
                    StabilityLevel::Semistable
                };
                let discharged = ctx.discharged_budget(&w, level).ok_or_else(|| {
                    CliError::Usage(format!(
                        "{}: cannot discharge the instability budget; pass --budget or --instabilities",
                        self.context
                    ))
                })?;
                (discharged, true)
            }
        };
        self.invariant(ctx.frobenius_certificate(&w, &budget, twists_stable))
    }

    fn hn(&self, name: &str) -> Result<Outcome> {
        let surface = self.surface()?;
        let split = match self.bundle(name)? {
            Bundle::Split(b) => b,
            Bundle::Sheaf(_) => {
                return Err(CliError::Usage(format!(
                    "{}: `{name}` is not a split bundle; declare it with `line` or `split`",
                    self.context
                )))
            }
        };
        let filtration = self.invariant(split.hn(surface))?;
        let jh_degrees = if filtration.is_semistable() {
            let factors = self.invariant(split.jh_factors(surface))?;
            Some(
                factors
                    .iter()
                    .map(|c| c.display_with(surface.generators()).to_string())
                    .collect(),
            )
        } else {
            None
        };
        Ok(Outcome::Hn {
            bundle: name.to_string(),
            summand_degrees: self.invariant(split.summand_degrees(surface))?,
            filtration,
            jh_degrees,
        })
    }

    fn pushforward(&self, bundle: Option<&str>, on_cover: bool) -> Result<Outcome> {
        let cover = self.cover()?;
        let (name, e, piece_degrees) = match (bundle, on_cover) {
            (None, _) => {
                let o = self.invariant(FormalSheaf::trivial(1, cover.surface().rank()))?;
                let pieces = self.invariant(cover.pushforward_o().summand_degrees(cover.base()))?;
                ("O_X".to_string(), o, pieces)
            }
            (Some(name), true) => (name.to_string(), self.bundle(name)?.as_sheaf(), Vec::new()),
            (Some(name), false) => {
                let f = self.bundle(name)?.as_sheaf();
                let decomposition = self.invariant(cover.pushforward_pullback(&f))?;
                let pieces = decomposition
                    .pieces
                    .iter()
                    .map(|piece| piece.degree(cover.base()))
                    .collect::<slopecert_core::Result<Vec<Q>>>();
                let pulled = self.invariant(cover.pullback_sheaf(&f))?;
                (name.to_string(), pulled, self.invariant(pieces)?)
            }
        };
        Ok(Outcome::Pushforward(PushforwardTable {
            bundle: name,
            from_cover: on_cover || bundle.is_none(),
            rank: cover.pushforward_rank(&e),
            degree: self.invariant(cover.pushforward_degree(&e))?,
            slope: self.invariant(cover.pushforward_slope(&e))?,
            slope_simplified: self
                .invariant(cover.pushforward_slope_simplified(&e, SlopeConstant::Derived))?,
            slope_via_cotangents: self.invariant(cover.pushforward_slope_via_cotangents(&e))?,
            piece_degrees,
            notes: vec![SLOPE_CONSTANT_NOTE.to_string()],
        }))
    }

    fn region(
        &self,
        table: RegionTable,
        n_max: u32,
        k_max: u32,
        d_max: u32,
        primes: &[u32],
    ) -> Result<Outcome> {
        let mut rows = Vec::new();
        match table {
            RegionTable::PlaneCover => {
                for n in 2..=n_max {
                    for k in 1..=k_max {
                        let d = n * k;
                        let certificate = self.invariant(criteria::p2_cover(n, d))?;
                        let expected = criteria::plane_cover_region(n, d);
                        rows.push(RegionRow {
                            n,
                            d,
                            p: None,
                            conclusion: certificate.conclusion,
                            expected,
                            agrees: certificate.conclusion == expected,
                            k_x_h: None,
                            certificate,
                        });
                    }
                }
            }
            RegionTable::FrobeniusPlaneCover => {
                for n in 2..=n_max {
                    for d in (n..=d_max).step_by(n as usize) {
                        for &p in primes.iter().filter(|&&p| n % p != 0) {
                            let certificate = self.invariant(frobenius::cor45(n, d, p))?;
                            let (semi, stable) = frobenius::claimed_frobenius_region(n, d);
                            let expected = if stable {
                                Conclusion::Stable
                            } else if semi {
                                Conclusion::Semistable
                            } else {
                                Conclusion::Inconclusive
                            };
                            rows.push(RegionRow {
                                n,
                                d,
                                p: Some(p),
                                conclusion: certificate.conclusion,
                                expected,
                                agrees: certificate.conclusion == expected,
                                k_x_h: Some(frobenius::plane_cover_canonical_degree(n, d)),
                                certificate,
                            });
                        }
                    }
                }
            }
        }
        let table = match table {
            RegionTable::PlaneCover => "cor3.8",
            RegionTable::FrobeniusPlaneCover => "cor4.5",
        };
        Ok(Outcome::Region {
            table: table.to_string(),
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query_line;
    use slopecert_core::rational::q;

    fn scenario(text: &str) -> Scenario {
        Scenario::parse(text, "test").unwrap()
    }

    fn exec(s: &Scenario, line: &str) -> Result<Outcome> {
        run(s, &parse_query_line(line).unwrap(), line)
    }

    const SEXTIC: &str = "[surface]\npreset = p2\n[cover]\nline = 3h\nn = 2\n[bundles]\nE = split 1; 1; -2\nF = sheaf 2 -3h\n";

    #[test]
    fn invariants_of_the_double_sextic() {
        let s = scenario(SEXTIC);
        match exec(&s, "invariants").unwrap() {
            Outcome::Invariants(t) => {
                assert_eq!(t.deg_k_x, q(0));
                assert_eq!(t.deg_k_x_formula, q(0));
                assert_eq!(t.deg_b, q(6));
                assert_eq!(t.pushforward_o_degrees, vec![q(0), q(-3)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn certificates_run() {
        let s = scenario(SEXTIC);
        for line in [
            "certify thm3.5",
            "certify thm3.6",
            "certify cor3.8",
            "certify remark3.9",
            "certify thm3.2 F",
            "certify cor4.5 --p 5",
            "certify thm4.3 --p 5",
        ] {
            assert!(
                matches!(exec(&s, line).unwrap(), Outcome::Certificate { .. }),
                "{line}"
            );
        }
    }

    #[test]
    fn frobenius_budget_from_instabilities() {
        let s = scenario("[surface]\npreset = p2\n[bundles]\nW = trivial 2\n");
        let out = exec(
            &s,
            "certify thm4.3 --p 3 --bundle W --instabilities 0,0,0,0,0",
        )
        .unwrap();
        match out {
            // K_P2.H < 0, so nothing is licensed.
            Outcome::Certificate { certificate } => {
                assert_eq!(certificate.conclusion, Conclusion::Inconclusive)
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            exec(&s, "certify thm4.3 --p 3 --bundle W"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            exec(&s, "certify thm4.3 --p 3 --bundle W --instabilities 0,0"),
            Err(CliError::Invariant { .. })
        ));
    }

    #[test]
    fn hn_needs_split_bundle() {
        let s = scenario(SEXTIC);
        assert!(matches!(exec(&s, "hn E").unwrap(), Outcome::Hn { .. }));
        assert!(matches!(exec(&s, "hn F"), Err(CliError::Usage(_))));
    }

    #[test]
    fn pushforward_routes_agree() {
        let s = scenario(SEXTIC);
        for line in ["pushforward", "pushforward F", "pushforward F --on-cover"] {
            match exec(&s, line).unwrap() {
                Outcome::Pushforward(t) => {
                    assert_eq!(t.slope, t.slope_simplified, "{line}");
                    assert_eq!(t.slope, t.slope_via_cotangents, "{line}");
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn regions_have_expected_sizes() {
        let s = Scenario::default();
        match exec(&s, "region cor3.8").unwrap() {
            Outcome::Region { rows, .. } => {
                assert_eq!(rows.len(), 25);
                assert!(rows.iter().all(|r| r.agrees));
            }
            other => panic!("unexpected {other:?}"),
        }
        match exec(&s, "region cor4.5").unwrap() {
            Outcome::Region { rows, .. } => {
                let disagreements: Vec<_> = rows.iter().filter(|r| !r.agrees).collect();
                assert!(!disagreements.is_empty());
                assert!(disagreements.iter().all(|r| (r.n, r.d) == (2, 6)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_sections_are_usage_errors() {
        let s = Scenario::default();
        assert!(matches!(exec(&s, "invariants"), Err(CliError::Usage(_))));
        assert!(matches!(
            exec(&s, "certify cor3.8"),
            Err(CliError::Usage(_))
        ));
    }
}
