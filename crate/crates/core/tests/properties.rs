//! Randomized structural invariants.

use amo_core::arithmetic::Frequency;
use amo_core::cocycle::{cayley_sum, AmoParams, Mat2, ScaledProduct};
use amo_core::localization::EigenpairReport;
use amo_core::spectrum::BandSet;
use num_bigint::BigUint;
use proptest::prelude::*;

fn small_freq() -> impl Strategy<Value = Frequency> {
    prop::collection::vec(1u64..=30, 3..12)
        .prop_map(|aq| Frequency::from_quotients(aq.into_iter().map(BigUint::from).collect(), 256))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // A_{n+m}(theta) = A_n(theta + m alpha) A_m(theta)
    #[test]
    fn cocycle_composition(
        lambda in 0.3f64..4.0,
        energy in -4.0f64..4.0,
        theta in 0.0f64..1.0,
        n in 1i64..40,
        m in 1i64..40,
    ) {
        let freq = Frequency::golden(30);
        let alpha = freq.value_f64();
        let params = AmoParams::new(lambda, energy, freq, theta);
        let whole: ScaledProduct<f64> = params.product(n + m, None).unwrap();
        let right: ScaledProduct<f64> = params.product(m, None).unwrap();
        let left: ScaledProduct<f64> = params
            .product_from((theta + m as f64 * alpha).rem_euclid(1.0), n, None)
            .unwrap();
        let composed = left.compose(&right);
        // relative difference of the represented matrices
        prop_assert!(composed.log_norm_diff(&whole) < whole.log_norm() - 20.0);
    }

    #[test]
    fn cocycle_products_stay_unimodular(
        lambda in 0.3f64..4.0,
        energy in -4.0f64..4.0,
        theta in 0.0f64..1.0,
        n in 1i64..60,
    ) {
        let params = AmoParams::new(lambda, energy, Frequency::golden(30), theta);
        let fwd: ScaledProduct<f64> = params.product(n, None).unwrap();
        let bwd: ScaledProduct<f64> = params.product(-n, None).unwrap();
        // rounding in det(unit) is amplified by e^{2 log_scale}
        let tol = |p: &ScaledProduct<f64>| {
            n as f64 * 1e-13 * (2.0 * p.log_scale).exp().max(1.0)
        };
        prop_assert!(fwd.unimodular_defect() < tol(&fwd));
        prop_assert!(bwd.unimodular_defect() < tol(&bwd));
    }

    #[test]
    fn cayley_on_random_unimodular(
        a in 0.2f64..3.0,
        b in -3.0f64..3.0,
        c in -3.0f64..3.0,
        flip in any::<bool>(),
    ) {
        let a = if flip { -a } else { a };
        let m = Mat2::new(a, b, c, (1.0 + b * c) / a);
        let s = cayley_sum(&m).unwrap();
        let tr = m.trace();
        let defect = s.sub(&Mat2::new(tr, 0.0, 0.0, tr)).norm();
        prop_assert!(defect <= 1e-10 * (1.0 + m.norm()));
    }

    // the good predicate ignores orientation and gets harder as the rate grows
    #[test]
    fn good_predicate_invariances(
        u in prop::collection::vec(-1.0f64..1.0, 41),
        c1 in 0.1f64..1.0,
        dc in 0.0f64..1.0,
        eps in 0.05f64..0.5,
    ) {
        let h = 20usize;
        let r = EigenpairReport::from_vector(0.0, u.clone(), h);
        let mirrored = EigenpairReport::from_vector(0.0, u.iter().rev().copied().collect(), h);
        prop_assert_eq!(r.good(h, c1, eps), mirrored.good(h, c1, eps));
        if r.good(h, c1 + dc, eps) {
            prop_assert!(r.good(h, c1, eps));
        }
    }

    #[test]
    fn band_measure_and_scaling(
        raw in prop::collection::vec((-5.0f64..5.0, 0.0f64..2.0), 1..8),
        s in 0.1f64..4.0,
    ) {
        let bands = BandSet::new(raw.iter().map(|&(lo, w)| (lo, lo + w)).collect());
        prop_assert!(bands.measure() >= 0.0);
        let scaled = bands.scale(s);
        prop_assert!((scaled.measure() - s * bands.measure()).abs() < 1e-9);
        prop_assert!((bands.hausdorff(&bands)).abs() < 1e-12);
        prop_assert!((bands.hausdorff(&scaled) - scaled.hausdorff(&bands)).abs() < 1e-12);
    }

    // determinant identity and one-sided approximation of the convergents
    #[test]
    fn convergents_are_best_rationals(freq in small_freq()) {
        for k in 1..freq.depth() {
            let det = freq.p(k) * freq.q(k + 1) - freq.p(k + 1) * freq.q(k);
            prop_assert!(*det.magnitude() == BigUint::from(1u32));
            let q_next: f64 = freq.q(k + 1).to_string().parse().unwrap();
            if q_next < 1e15 {
                prop_assert!(freq.torus_norm(freq.q(k)).unwrap() <= 1.0 / q_next + 1e-12);
            }
        }
    }
}
