//! Shared inputs for the benchmarks.

use slopecert_core::oracle::plane_split_bundle;
use slopecert_core::{plane_cover, CyclicCover, FormalSheaf, SplitBundle};

/// Split bundles on the plane with `len` summands of spread-out degrees.
pub fn split_bundles(len: usize, count: usize) -> Vec<SplitBundle> {
    (0..count)
        .map(|seed| {
            let degrees: Vec<i64> = (0..len)
                .map(|i| ((seed * 7 + i * 13) % 17) as i64 - 8)
                .collect();
            plane_split_bundle(&degrees)
        })
        .collect()
}

pub fn double_sextic() -> CyclicCover {
    plane_cover(2, 6, 0).expect("valid cover")
}

/// A rank-`rank` sheaf on the plane of degree `degree`.
pub fn plane_sheaf(rank: u32, degree: i64) -> FormalSheaf {
    FormalSheaf::new(rank, slopecert_core::DivisorClass::from_integers(&[degree]))
        .expect("rank >= 1")
}
