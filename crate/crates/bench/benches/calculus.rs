use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use slopecert_bench::{double_sextic, plane_sheaf, split_bundles};
use slopecert_core::criteria::p2_cover;
use slopecert_core::frobenius::cor45;
use slopecert_core::oracle::{brute_force_mu_max, grr_sides, random_cover_cases};
use slopecert_core::{FrobeniusContext, SurfaceModel};

fn hn(c: &mut Criterion) {
    let surface = SurfaceModel::projective_plane();
    let mut group = c.benchmark_group("hn");
    for len in [2usize, 6, 12] {
        let bundles = split_bundles(len, 64);
        group.bench_with_input(BenchmarkId::new("sorted", len), &bundles, |b, bundles| {
            b.iter(|| {
                for bundle in bundles {
                    black_box(bundle.hn(&surface).unwrap());
                }
            })
        });
    }
    // The subset oracle is exponential; keep it small.
    let bundles = split_bundles(6, 64);
    group.bench_function("brute_force/6", |b| {
        b.iter(|| {
            for bundle in &bundles {
                black_box(brute_force_mu_max(bundle, &surface).unwrap());
            }
        })
    });
    group.finish();
}

fn regions(c: &mut Criterion) {
    c.bench_function("region/plane_cover_25", |b| {
        b.iter(|| {
            for n in 2..=6u32 {
                for k in 1..=5u32 {
                    black_box(p2_cover(n, n * k).unwrap());
                }
            }
        })
    });
    c.bench_function("region/frobenius_plane_cover", |b| {
        b.iter(|| {
            for n in 2..=6u32 {
                for d in (n..=30).step_by(n as usize) {
                    for p in [3u32, 5, 7].into_iter().filter(|p| n % p != 0) {
                        black_box(cor45(n, d, p).unwrap());
                    }
                }
            }
        })
    });
}

fn frobenius(c: &mut Criterion) {
    let cover = double_sextic();
    let mut group = c.benchmark_group("frobenius_profile");
    for p in [3u32, 7, 31] {
        let ctx = FrobeniusContext::from_cover(&cover, p).unwrap();
        let w = plane_sheaf(3, 2);
        group.bench_with_input(BenchmarkId::from_parameter(p), &ctx, |b, ctx| {
            b.iter(|| black_box(ctx.filtration_profile(&w).unwrap()))
        });
    }
    group.finish();
}

fn grr(c: &mut Criterion) {
    let cases = random_cover_cases(7, 256);
    c.bench_function("grr_sides/256", |b| {
        b.iter(|| {
            for (cover, f) in &cases {
                black_box(grr_sides(cover, f).unwrap());
            }
        })
    });
}

criterion_group!(benches, hn, regions, frobenius, grr);
criterion_main!(benches);
