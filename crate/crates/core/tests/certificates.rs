use proptest::prelude::*;
use slopecert_core::criteria::{
    cotangent_semistability, cotangent_stability, k3_certificate, p2_cover, Certificate, Evidence,
};
use slopecert_core::frobenius::cor45;
use slopecert_core::rational::{frac, q};
use slopecert_core::{
    plane_cover, Conclusion, CyclicCover, DivisorClass, FormalSheaf, SurfaceModel,
};

fn round_trip(cert: &Certificate) -> Certificate {
    serde_json::from_str(&serde_json::to_string(cert).unwrap()).unwrap()
}

#[test]
fn double_sextic_end_to_end() {
    let cover = plane_cover(2, 6, 0).unwrap();
    let semi = cotangent_semistability(&cover);
    let stable = cotangent_stability(&cover);
    assert_eq!(semi.conclusion, Conclusion::Semistable);
    assert_eq!(stable.conclusion, Conclusion::Stable);
    assert_eq!(stable.value("criterion_value"), Some(&q(12)));
    let k3 = k3_certificate(&cover);
    assert_eq!(k3.conclusion, Conclusion::Stable);
    assert!(k3.notes.iter().any(|n| n.contains("K3")));
}

#[test]
fn plane_hypothesis_is_discharged_elsewhere_asserted() {
    let plane = cotangent_stability(&plane_cover(3, 6, 0).unwrap());
    let h = plane
        .hypotheses
        .iter()
        .find(|h| h.name.starts_with("Omega_Y"))
        .unwrap();
    assert!(matches!(h.evidence, Evidence::Discharged(_)));

    let quadric = SurfaceModel::product_of_curves(None).unwrap();
    let cover = CyclicCover::new(quadric, DivisorClass::from_integers(&[2, 2]), 2, 0).unwrap();
    let cert = cotangent_stability(&cover);
    let h = cert
        .hypotheses
        .iter()
        .find(|h| h.name.starts_with("Omega_Y"))
        .unwrap();
    assert_eq!(h.evidence, Evidence::Asserted);
    assert_eq!(cert.value("l"), Some(&frac(1, 4)));
}

#[test]
fn zero_branch_is_inconclusive() {
    // L = 0 gives B = 0, which cannot be proportional to H.
    let quadric = SurfaceModel::product_of_curves(None).unwrap();
    let cover = CyclicCover::new(quadric, DivisorClass::from_integers(&[0, 0]), 3, 0).unwrap();
    assert_eq!(
        cotangent_semistability(&cover).conclusion,
        Conclusion::Inconclusive
    );
    assert!(!cotangent_semistability(&cover).notes.is_empty());
}

#[test]
fn certificates_survive_json() {
    for (n, d) in [(2, 2), (2, 6), (3, 9), (5, 25)] {
        let cert = p2_cover(n, d).unwrap();
        assert_eq!(round_trip(&cert), cert);
    }
    let cert = cor45(2, 6, 7).unwrap();
    assert_eq!(round_trip(&cert), cert);
}

#[test]
fn pushforward_of_cotangent_pullback() {
    let cover = plane_cover(3, 6, 0).unwrap();
    let omega = FormalSheaf::cotangent(cover.base());
    let decomposition = cover.pushforward_pullback(&omega).unwrap();
    assert_eq!(decomposition.pieces.len(), 3);
    let pulled = cover.pullback_sheaf(&omega).unwrap();
    assert_eq!(
        cover.pushforward_degree(&pulled).unwrap(),
        decomposition.total.degree(cover.base()).unwrap()
    );
}

proptest! {
    #[test]
    fn plane_certificates_never_exceed_closed_form(n in 2u32..8, k in 1u32..8) {
        let cert = p2_cover(n, n * k).unwrap();
        prop_assert!(cert.conclusion.is_semistable());
        prop_assert_eq!(round_trip(&cert), cert);
    }

    #[test]
    fn stable_implies_semistable(n in 2u32..7, a in -4i64..5, b in -4i64..5) {
        let quadric = SurfaceModel::product_of_curves(None).unwrap();
        let cover = CyclicCover::new(quadric, DivisorClass::from_integers(&[a, b]), n, 0).unwrap();
        let semi = cotangent_semistability(&cover).conclusion;
        let stable = cotangent_stability(&cover).conclusion;
        if stable.is_stable() {
            prop_assert!(semi.is_semistable());
        }
    }
}
