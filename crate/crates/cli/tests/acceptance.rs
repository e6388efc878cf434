//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs under `cargo test` with the default harness turned off.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_traits::{Signed, Zero};
use slopecert_cli::{Outcome, Report};
use slopecert_core::cover::{plane_cover, SlopeConstant};
use slopecert_core::criteria::{
    branch_criterion_value, cotangent_semistability, cotangent_stability, k3_check, p2_cover,
    plane_cover_region, pullback_stability, Conclusion, StabilityLevel,
};
use slopecert_core::frobenius::{cor45, plane_cover_canonical_degree, FrobeniusContext};
use slopecert_core::oracle::{
    brute_force_mu_max, degree_multisets, grr_sides, plane_split_bundle, random_cover_cases,
};
use slopecert_core::rational::{q, Q};
use slopecert_core::{CyclicCover, DivisorClass, FormalSheaf, SurfaceModel};

fn k3_identification() {
    for (n, d) in [(2, 6), (4, 4)] {
        let cover = plane_cover(n, d, 0).unwrap();
        let report = k3_check(&cover);
        assert!(report.is_k3, "n={n} d={d}");
        assert!(cover.canonical_x().is_zero());
        assert_eq!(report.canonical_degree, q(0));
        assert_eq!(report.cotangent_slope, q(0));
        assert!(report.known_instance.is_some());
    }
}

fn plane_region_table() {
    let mut cases = 0;
    for n in 2..=6u32 {
        for k in 1..=5u32 {
            let d = n * k;
            let cert = p2_cover(n, d).unwrap();
            let closed = plane_cover_region(n, d);
            assert_eq!(cert.conclusion, closed, "n={n} d={d}");
            let expected = if (n == 2 && d >= 4) || n > 2 {
                Conclusion::Stable
            } else {
                Conclusion::Semistable
            };
            assert_eq!(closed, expected);
            cases += 1;
        }
    }
    assert_eq!(cases, 25);
}

fn bases() -> [SurfaceModel; 2] {
    [
        SurfaceModel::projective_plane(),
        SurfaceModel::product_of_curves(None).unwrap(),
    ]
}

fn grr_oracle() {
    let cases = random_cover_cases(0xacce_0003, 1000);
    assert_eq!(cases.len(), 1000);
    for (cover, f) in &cases {
        assert!(cover.degree() <= 6);
        let sides = grr_sides(cover, f).unwrap();
        assert_eq!(sides.formula, sides.decomposition, "{cover}, F = {f}");
        let pulled = cover.pullback_sheaf(f).unwrap();
        let decomposition = cover.pushforward_pullback(f).unwrap().total;
        assert_eq!(
            cover.pushforward_degree(&pulled).unwrap(),
            decomposition.degree(cover.base()).unwrap()
        );
    }
    for base in bases() {
        for n in 2..=6u32 {
            for a in -3..=3i64 {
                let coeffs = vec![a; base.rank()];
                let cover =
                    CyclicCover::new(base.clone(), DivisorClass::from_integers(&coeffs), n, 0)
                        .unwrap();
                let ox = FormalSheaf::trivial(1, base.rank()).unwrap();
                let degrees = cover.pushforward_o().summand_degrees(&base).unwrap();
                let mean = degrees.iter().sum::<Q>() / q(i64::from(n));
                assert_eq!(cover.pushforward_slope(&ox).unwrap(), mean, "{cover}");
                // The mean of deg L^{-i} over 0 <= i < n.
                assert_eq!(mean, -frac_half(n - 1) * cover.line_degree());
            }
        }
    }
}

fn frac_half(k: u32) -> Q {
    Q::new(i64::from(k).into(), 2.into())
}

fn erratum_detection() {
    let mut nonzero_line = 0;
    for (cover, f) in random_cover_cases(0xacce_0004, 1000) {
        let pulled = cover.pullback_sheaf(&f).unwrap();
        let exact = cover.pushforward_slope(&pulled).unwrap();
        let derived = cover
            .pushforward_slope_simplified(&pulled, SlopeConstant::Derived)
            .unwrap();
        let printed = cover
            .pushforward_slope_simplified(&pulled, SlopeConstant::Uncorrected)
            .unwrap();
        assert_eq!(derived, exact, "{cover}");
        if cover.line_degree().is_zero() {
            assert_eq!(printed, exact, "{cover}");
        } else {
            nonzero_line += 1;
            assert_ne!(printed, exact, "{cover}");
        }
    }
    assert!(
        nonzero_line > 500,
        "only {nonzero_line} cases with deg L != 0"
    );
}

fn hn_oracle() {
    let surface = SurfaceModel::projective_plane();
    let grid = degree_multisets(6, -4, 4);
    assert_eq!(grid.len(), 5004);
    for degrees in grid {
        let bundle = plane_split_bundle(&degrees);
        let hn = bundle.hn(&surface).unwrap();
        assert_eq!(
            hn.mu_max,
            brute_force_mu_max(&bundle, &surface).unwrap(),
            "{degrees:?}"
        );
        let all_equal = degrees.iter().all(|d| *d == degrees[0]);
        assert_eq!(hn.instability.is_zero(), all_equal, "{degrees:?}");
    }
}

fn frobenius_rank_conservation() {
    // p must not divide the cover degree.
    let double = plane_cover(2, 6, 0).unwrap();
    let triple = plane_cover(3, 6, 0).unwrap();
    for p in [2u32, 3, 5, 7] {
        let cover = if p == 2 { &triple } else { &double };
        let ctx = FrobeniusContext::from_cover(cover, p).unwrap();
        for rank in 1..=3u32 {
            let w = FormalSheaf::new(rank, DivisorClass::from_integers(&[1])).unwrap();
            let total: u64 = (0..=ctx.top_index())
                .map(|l| u64::from(ctx.graded_piece(&w, l).unwrap().rank()))
                .sum();
            assert_eq!(total, u64::from(p * p * rank), "p={p} rank={rank}");
            let piece0 = ctx.graded_piece(&w, 0).unwrap();
            assert_eq!((piece0.rank(), piece0.c1()), (w.rank(), w.c1()));
        }
    }
}

fn frobenius_plane_region() {
    let mut boundary_seen = 0;
    for n in 2..=6u32 {
        for d in (n..=30).step_by(n as usize) {
            for p in [3u32, 5, 7].into_iter().filter(|p| n % p != 0) {
                let cert = cor45(n, d, p).unwrap();
                let kxh = plane_cover_canonical_degree(n, d);
                assert_eq!(
                    kxh,
                    q(-3 * i64::from(n) + (i64::from(n) - 1) * i64::from(d))
                );
                assert_eq!(cert.value("k_x_h"), Some(&kxh), "n={n} d={d} p={p}");
                let budget_zero = cert.value("budget").is_some_and(Zero::is_zero);
                assert_eq!(
                    cert.conclusion.is_semistable(),
                    !kxh.is_negative() && budget_zero,
                    "n={n} d={d} p={p}"
                );
                let erratum = cert.notes.iter().any(|note| note.starts_with("erratum"));
                if (n, d) == (2, 6) {
                    boundary_seen += 1;
                    assert_eq!(cert.conclusion, Conclusion::Semistable);
                    assert_eq!(cert.value("claimed_stable"), Some(&q(1)));
                    assert!(erratum, "boundary point lacks its erratum note");
                } else {
                    assert!(!erratum, "unexpected erratum at n={n} d={d} p={p}");
                }
            }
        }
    }
    assert_eq!(boundary_seen, 3);
}

fn pullback_scaling() {
    let cases = random_cover_cases(0xacce_0008, 500);
    let mut presets = [0usize; 2];
    for (cover, f) in &cases {
        presets[usize::from(!cover.base().is_projective_plane())] += 1;
        let pulled = cover.pullback_sheaf(f).unwrap();
        let n = q(cover.degree().into());
        assert_eq!(
            pulled.slope(cover.surface()).unwrap(),
            n * f.slope(cover.base()).unwrap(),
            "{cover}"
        );
        for (level, expected) in [
            (StabilityLevel::Stable, Conclusion::Stable),
            (StabilityLevel::Semistable, Conclusion::Semistable),
        ] {
            assert_eq!(
                pullback_stability(cover, f, level).unwrap().conclusion,
                expected
            );
        }
    }
    assert!(
        presets.iter().all(|&c| c > 0),
        "both presets sampled: {presets:?}"
    );
}

fn cotangent_boundary() {
    let cover = plane_cover(2, 2, 0).unwrap();
    assert_eq!(branch_criterion_value(&cover), q(0));
    assert_eq!(
        cotangent_semistability(&cover).conclusion,
        Conclusion::Semistable
    );
    assert_eq!(
        cotangent_stability(&cover).conclusion,
        Conclusion::Inconclusive
    );
    for n in 2..=6u32 {
        for k in 1..=5u32 {
            let d = n * k;
            let cover = plane_cover(n, d, 0).unwrap();
            let base = cover.base();
            let evaluated = q(n.into()) * base.cotangent_degree()
                + q(i64::from(n) + 1) * base.degree(&cover.branch_class()).unwrap();
            let closed = q(-3 * i64::from(n) + (i64::from(n) + 1) * i64::from(d));
            assert_eq!(branch_criterion_value(&cover), evaluated);
            assert_eq!(evaluated, closed, "n={n} d={d}");
            let cert = cotangent_stability(&cover);
            assert_eq!(cert.value("criterion_value"), Some(&closed));
            assert!(closed.is_positive() || cert.conclusion != Conclusion::Stable);
        }
    }
}

fn cli_round_trip() {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_slopecert"))
            .args(["region", "cor3.8", "--json"])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };
    let first = run();
    assert_eq!(first, run(), "two runs differ");
    let report = Report::from_json(std::str::from_utf8(&first).unwrap()).unwrap();
    let rows = match &report.results[..] {
        [only] => match &only.outcome {
            Outcome::Region { rows, .. } => rows,
            other => panic!("unexpected outcome {other:?}"),
        },
        other => panic!("expected one result, got {}", other.len()),
    };
    assert_eq!(rows.len(), 25);
    for row in rows {
        let fresh = p2_cover(row.n, row.d).unwrap();
        assert_eq!(row.certificate, fresh, "n={} d={}", row.n, row.d);
        assert_eq!(row.certificate.values, fresh.values);
    }
    assert_eq!(Report::from_json(&report.to_json()).unwrap(), report);
}

fn main() -> ExitCode {
    let criteria: [(&str, fn()); 10] = [
        ("K3 identification", k3_identification),
        ("plane cover region table (25 cases)", plane_region_table),
        (
            "pushforward degree vs decomposition (1000 cases) and mu(pi_*O_X)",
            grr_oracle,
        ),
        ("slope constant erratum, both directions", erratum_detection),
        ("HN vs brute force (5004 split bundles)", hn_oracle),
        ("Frobenius rank conservation", frobenius_rank_conservation),
        (
            "Frobenius plane cover region with boundary erratum",
            frobenius_plane_region,
        ),
        (
            "pullback slope scaling (500 cases) and passthrough",
            pullback_scaling,
        ),
        (
            "cotangent criteria boundary and value formula",
            cotangent_boundary,
        ),
        ("CLI determinism and JSON round-trip", cli_round_trip),
    ];
    panic::set_hook(Box::new(|info| eprintln!("    {info}")));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let ok = panic::catch_unwind(AssertUnwindSafe(check)).is_ok();
        let mark = if ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2}: {mark}  {name} ({:.2?})",
            i + 1,
            start.elapsed()
        );
        failed += usize::from(!ok);
    }
    if failed == 0 {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria FAIL", criteria.len());
        ExitCode::FAILURE
    }
}
