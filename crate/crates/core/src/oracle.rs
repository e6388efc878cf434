//! Brute-force verifiers that share no code path with the algorithms they
//! check, plus the bundled self-test.
//!
//! - `brute_force_mu_max` enumerates every nonempty set of summands instead
//!   of sorting degrees.
//! - `grr_consistency` compares the closed degree formula for a pushforward
//!   with the degree of the explicit decomposition `⊕ F(−iL)`.
//! - `sym_split_expand` expands a symmetric power of a split rank-two bundle
//!   summand by summand.

use std::fmt;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{plane_cover, CyclicCover};
use crate::criteria::{p2_cover, plane_cover_region};
use crate::error::{Error, Result};
use crate::frobenius::{cor45, plane_cover_canonical_degree, FrobeniusContext};
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::rational::{q, Q};
use crate::sheaf::{FormalSheaf, SplitBundle};

/// Maximum over all nonempty summand subsets of the mean summand degree.
pub fn brute_force_mu_max(bundle: &SplitBundle, surface: &SurfaceModel) -> Result<Q> {
    let degrees: Vec<Q> = bundle
        .summands()
        .iter()
        .map(|s| surface.degree(s))
        .collect::<Result<_>>()?;
    let r = degrees.len();
    if r > 20 {
        return Err(Error::InvalidArgument(format!(
            "subset enumeration over {r} summands is not supported"
        )));
    }
    let mut best: Option<Q> = None;
    for mask in 1u32..(1u32 << r) {
        let mut sum = Q::zero();
        let mut count = 0i64;
        for (i, d) in degrees.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum += d;
                count += 1;
            }
        }
        let mean = sum / q(count);
        if best.as_ref().is_none_or(|b| mean > *b) {
            best = Some(mean);
        }
    }
    Ok(best.expect("split bundles have a summand"))
}

/// Both sides of the pushforward degree identity for `π*F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrrSides {
    pub formula: Q,
    pub decomposition: Q,
}

pub fn grr_sides(cover: &CyclicCover, f: &FormalSheaf) -> Result<GrrSides> {
    let formula = cover.pushforward_degree(&cover.pullback_sheaf(f)?)?;
    let base = cover.base();
    let mut decomposition = Q::zero();
    for i in 0..i64::from(cover.degree()) {
        let twisted_c1 = f.c1() - &cover.line_class().scale_int(i * i64::from(f.rank()));
        decomposition += base.degree(&twisted_c1)?;
    }
    Ok(GrrSides {
        formula,
        decomposition,
    })
}

/// `deg π_*(π*F)` by formula equals the degree of `⊕_{i<n} F(−iL)`.
pub fn grr_consistency(cover: &CyclicCover, f: &FormalSheaf) -> Result<bool> {
    let sides = grr_sides(cover, f)?;
    Ok(sides.formula == sides.decomposition)
}

/// `Sym^l(O(D) ⊕ O(E)) = ⊕_{i=0}^{l} O(iD + (l−i)E)`.
pub fn sym_split_expand(d: &DivisorClass, e: &DivisorClass, l: u32) -> Result<SplitBundle> {
    SplitBundle::new(
        (0..=l)
            .map(|i| &d.scale_int(i.into()) + &e.scale_int((l - i).into()))
            .collect(),
    )
}

/// Every nondecreasing degree sequence (a split bundle on the plane up to
/// isomorphism) with `1..=max_len` summands in `lo..=hi`.
pub fn degree_multisets(max_len: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    fn extend(prefix: &mut Vec<i64>, from: i64, hi: i64, max_len: usize, out: &mut Vec<Vec<i64>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        if prefix.len() == max_len {
            return;
        }
        for d in from..=hi {
            prefix.push(d);
            extend(prefix, d, hi, max_len, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), lo, hi, max_len, &mut out);
    out
}

pub fn plane_split_bundle(degrees: &[i64]) -> SplitBundle {
    SplitBundle::new(
        degrees
            .iter()
            .map(|&d| DivisorClass::from_integers(&[d]))
            .collect(),
    )
    .expect("nonempty")
}

/// Seeded random `(cover, F)` pairs over both presets, `n ≤ 6`.
pub fn random_cover_cases(seed: u64, count: usize) -> Vec<(CyclicCover, FormalSheaf)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let base = if rng.random_bool(0.5) {
                SurfaceModel::projective_plane()
            } else {
                SurfaceModel::product_of_curves(None).expect("preset")
            };
            let rank = base.rank();
            let n = rng.random_range(2..=6u32);
            let line = DivisorClass::from_integers(
                &(0..rank)
                    .map(|_| rng.random_range(-4..=4))
                    .collect::<Vec<_>>(),
            );
            let c1 = DivisorClass::new(
                (0..rank)
                    .map(|_| {
                        Q::new(
                            rng.random_range(-12..=12).into(),
                            rng.random_range(1..=3).into(),
                        )
                    })
                    .collect(),
            );
            let f = FormalSheaf::new(rng.random_range(1..=4), c1).expect("rank >= 1");
            let cover = CyclicCover::new(base, line, n, 0).expect("valid cover");
            (cover, f)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// First few failing cases, for diagnostics.
    pub examples: Vec<String>,
}

impl OracleCheck {
    fn new(name: &str) -> Self {
        OracleCheck {
            name: name.into(),
            cases: 0,
            failures: 0,
            examples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < 5 {
                self.examples.push(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub checks: Vec<OracleCheck>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(OracleCheck::passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            let mark = if check.passed() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "  [{mark}] {:<32} {:>6} cases {:>4} failures",
                check.name, check.cases, check.failures
            )?;
            for example in &check.examples {
                writeln!(f, "         {example}")?;
            }
        }
        write!(
            f,
            "  overall: {}",
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

fn hn_check() -> Result<OracleCheck> {
    let surface = SurfaceModel::projective_plane();
    let mut check = OracleCheck::new("hn mu_max vs subset enumeration");
    for degrees in degree_multisets(6, -4, 4) {
        let bundle = plane_split_bundle(&degrees);
        let hn = bundle.hn(&surface)?;
        let brute = brute_force_mu_max(&bundle, &surface)?;
        let all_equal = degrees.iter().all(|d| *d == degrees[0]);
        let ok = hn.mu_max == brute && (hn.instability.is_zero() == all_equal);
        check.record(ok, || format!("degrees {degrees:?}"));
    }
    Ok(check)
}

fn grr_check() -> Result<OracleCheck> {
    let mut check = OracleCheck::new("pushforward degree vs decomposition");
    for (cover, f) in random_cover_cases(0x5eed_0001, 1000) {
        let sides = grr_sides(&cover, &f)?;
        check.record(sides.formula == sides.decomposition, || {
            format!("{cover}, F = {f}: {:?}", sides)
        });
    }
    Ok(check)
}

fn pushforward_o_check() -> Result<OracleCheck> {
    let mut check = OracleCheck::new("mu(pi_*O_X) vs summand mean");
    let bases = [
        SurfaceModel::projective_plane(),
        SurfaceModel::product_of_curves(None)?,
    ];
    for base in bases {
        for n in 2..=6u32 {
            for a in -3..=3i64 {
                for b in -3..=3i64 {
                    let coeffs = [a, b];
                    if base.rank() == 1 && b != 0 {
                        continue;
                    }
                    let line = DivisorClass::from_integers(&coeffs[..base.rank()]);
                    let cover = CyclicCover::new(base.clone(), line, n, 0)?;
                    let ox = FormalSheaf::trivial(1, base.rank())?;
                    let degrees = cover.pushforward_o().summand_degrees(&base)?;
                    let mean: Q = degrees.iter().sum::<Q>() / q(degrees.len() as i64);
                    let formula = cover.pushforward_slope(&ox)?;
                    check.record(formula == mean, || format!("{cover}"));
                }
            }
        }
    }
    Ok(check)
}

fn sym_check() -> Result<OracleCheck> {
    let mut check = OracleCheck::new("sym power vs split expansion");
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for _ in 0..200 {
        let d = DivisorClass::from_integers(&[rng.random_range(-5..=5), rng.random_range(-5..=5)]);
        let e = DivisorClass::from_integers(&[rng.random_range(-5..=5), rng.random_range(-5..=5)]);
        let rank_two = SplitBundle::new(vec![d.clone(), e.clone()])?.as_sheaf();
        for l in 0..=6u32 {
            let expanded = sym_split_expand(&d, &e, l)?.as_sheaf();
            let sym = rank_two.sym_power_rank2(l)?;
            check.record(
                sym.rank() == expanded.rank() && sym.c1() == expanded.c1(),
                || format!("D = {d}, E = {e}, l = {l}"),
            );
        }
    }
    Ok(check)
}

fn plane_region_check() -> Result<OracleCheck> {
    let mut check = OracleCheck::new("plane cover region");
    for n in 2..=6u32 {
        for k in 1..=5u32 {
            let d = n * k;
            let cert = p2_cover(n, d)?;
            check.record(cert.conclusion == plane_cover_region(n, d), || {
                format!("n = {n}, d = {d}: {}", cert.conclusion)
            });
        }
    }
    Ok(check)
}

fn frobenius_rank_check() -> Result<OracleCheck> {
    let mut check = OracleCheck::new("frobenius rank conservation");
    let cover = plane_cover(3, 6, 0)?;
    for p in [2u32, 5, 7] {
        let ctx = FrobeniusContext::from_cover(&cover, p)?;
        for rank in 1..=3u32 {
            let w = FormalSheaf::new(rank, DivisorClass::from_integers(&[1]))?;
            let profile = ctx.filtration_profile(&w);
            let total: u64 = (0..=ctx.top_index())
                .map(|l| ctx.graded_piece(&w, l).map(|s| u64::from(s.rank())))
                .sum::<Result<u64>>()?;
            check.record(profile.is_ok() && total == u64::from(p * p * rank), || {
                format!("p = {p}, rank W = {rank}: total {total}")
            });
        }
    }
    // p = 3 needs a cover whose degree it does not divide.
    let ctx = FrobeniusContext::from_cover(&plane_cover(2, 6, 0)?, 3)?;
    for rank in 1..=3u32 {
        let w = FormalSheaf::trivial(rank, 1)?;
        let total = ctx.filtration_profile(&w)?.total_rank();
        check.record(total == u64::from(9 * rank), || {
            format!("p = 3, rank W = {rank}: total {total}")
        });
    }
    Ok(check)
}

fn frobenius_region_check() -> Result<OracleCheck> {
    let mut check = OracleCheck::new("frobenius plane region");
    for n in 2..=6u32 {
        for p in [3u32, 5, 7] {
            if n % p == 0 {
                continue;
            }
            let mut d = n;
            while d <= 30 {
                let cert = cor45(n, d, p)?;
                let kxh = plane_cover_canonical_degree(n, d);
                let semi = !kxh.is_negative();
                let ok = cert.value("k_x_h") == Some(&kxh)
                    && cert.conclusion.is_semistable() == semi
                    && cert.conclusion.is_stable() == kxh.is_positive();
                check.record(ok, || {
                    format!("n = {n}, d = {d}, p = {p}: {}", cert.conclusion)
                });
                d += n;
            }
        }
    }
    Ok(check)
}

/// Runs every oracle. Each check is independent and pure.
pub fn selftest() -> Result<SelftestReport> {
    Ok(SelftestReport {
        checks: vec![
            hn_check()?,
            grr_check()?,
            pushforward_o_check()?,
            sym_check()?,
            plane_region_check()?,
            frobenius_rank_check()?,
            frobenius_region_check()?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_examples() {
        let p2 = SurfaceModel::projective_plane();
        assert_eq!(
            brute_force_mu_max(&plane_split_bundle(&[2, 2, 0, -1]), &p2).unwrap(),
            q(2)
        );
        assert_eq!(
            brute_force_mu_max(&plane_split_bundle(&[-7]), &p2).unwrap(),
            q(-7)
        );
        assert_eq!(
            brute_force_mu_max(&plane_split_bundle(&[3, 3, 3]), &p2).unwrap(),
            q(3)
        );
    }

    #[test]
    fn grr_examples() {
        for (n, l) in [(2u32, 3i64), (3, 1), (5, 2)] {
            let cover = plane_cover(n, n * l as u32, 0).unwrap();
            let o = FormalSheaf::trivial(1, 1).unwrap();
            let sides = grr_sides(&cover, &o).unwrap();
            let expected = -q(i64::from(n) * (i64::from(n) - 1) / 2 * l);
            assert_eq!(sides.formula, expected);
            assert_eq!(sides.decomposition, expected);
        }
        let flat = CyclicCover::new(
            SurfaceModel::projective_plane(),
            DivisorClass::from_integers(&[0]),
            4,
            0,
        )
        .unwrap();
        let f = FormalSheaf::new(2, DivisorClass::from_integers(&[5])).unwrap();
        let sides = grr_sides(&flat, &f).unwrap();
        assert_eq!(sides.formula, q(20));
        assert!(grr_consistency(&flat, &f).unwrap());
    }

    #[test]
    fn sym_expansion_examples() {
        let d = DivisorClass::from_integers(&[1, 0]);
        let e = DivisorClass::from_integers(&[0, 1]);
        assert_eq!(
            sym_split_expand(&d, &e, 0).unwrap().summands(),
            &[DivisorClass::zero(2)]
        );
        assert_eq!(
            sym_split_expand(&d, &e, 1).unwrap().summands(),
            &[e.clone(), d.clone()]
        );
        let three = sym_split_expand(&d, &e, 3).unwrap();
        assert_eq!(three.rank(), 4);
        assert_eq!(three.c1(), (&d + &e).scale_int(6));
    }

    #[test]
    fn multiset_counts() {
        // C(9 + k - 1, k) multisets of size k over 9 degrees.
        let all = degree_multisets(6, -4, 4);
        let by_len = |k| all.iter().filter(|m| m.len() == k).count();
        assert_eq!(by_len(1), 9);
        assert_eq!(by_len(2), 45);
        assert_eq!(by_len(6), 3003);
        assert_eq!(all.len(), 9 + 45 + 165 + 495 + 1287 + 3003);
    }

    #[test]
    fn random_cases_are_deterministic() {
        let a = random_cover_cases(7, 20);
        let b = random_cover_cases(7, 20);
        assert_eq!(a, b);
        assert!(a.iter().all(|(c, _)| (2..=6).contains(&c.degree())));
    }

    #[test]
    fn selftest_passes() {
        let report = selftest().unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.checks.iter().all(|c| c.cases > 0));
    }
}
