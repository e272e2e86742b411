use std::f64::consts::{FRAC_PI_8, PI, SQRT_2};

use coarse_bell::bell::{abs_bell_derivative_dw, with_delta_w, BREAKDOWN_TOL};
use coarse_bell::quadrature::{mc_summary, with_rule, ProductDistribution};
use coarse_bell::{
    bell_derivative_dw, bell_value, bell_value_per_term, coarsened_correlation, BellConfig, BellVariant, Error,
    FuzzinessModel,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_config(rng: &mut ChaCha8Rng, model: FuzzinessModel) -> BellConfig {
    random_config_w0(rng, model, 0.2)
}

fn random_config_w0(rng: &mut ChaCha8Rng, model: FuzzinessModel, w0_min: f64) -> BellConfig {
    let mut angle = || rng.random_range(-PI..PI);
    let angles = [angle(), angle(), angle(), angle()];
    let mut c = BellConfig::symmetric(angles, model, 1.0);
    c.w0_a = rng.random_range(w0_min..3.0);
    c.w0_b = rng.random_range(w0_min..3.0);
    c
}

/// Correlation by nested Gauss–Hermite over both realized angles.
fn nested_gh_correlation(ta: f64, tb: f64, sa: f64, sb: f64) -> f64 {
    with_rule(64, |rule| {
        let mut acc = 0.0;
        for (pa, wa) in rule.points(ta, sa) {
            for (pb, wb) in rule.points(tb, sb) {
                acc += wa * wb * -(2.0 * (pa + pb)).cos();
            }
        }
        acc
    })
    .unwrap()
}

#[test]
fn closed_form_matches_nested_quadrature() {
    // Angle spreads stay below ~2 so a 64-node rule resolves cos 2φ.
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..50 {
        let model = if i % 2 == 0 {
            FuzzinessModel::frequency(rng.random_range(0.0..0.6))
        } else {
            FuzzinessModel::timing(rng.random_range(0.0..0.6))
        };
        let c = random_config_w0(&mut rng, model, 1.0);
        let closed = bell_value(&c).unwrap();
        let sigmas = c.term_sigmas().unwrap();
        for (k, ((ta, tb), (sa, sb))) in c.term_angles().into_iter().zip(sigmas).enumerate() {
            let gh = nested_gh_correlation(ta, tb, sa, sb);
            assert!((gh - closed.terms()[k]).abs() < 1e-9, "config {i} term {k}");
        }
    }
}

#[test]
fn closed_form_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for i in 0..20 {
        let dw = rng.random_range(0.0..1.0);
        let c = random_config(&mut rng, FuzzinessModel::frequency(dw));
        let b = bell_value(&c).unwrap().b;
        let sig = c.term_sigmas().unwrap();
        let angles = c.term_angles();
        let signs = [1.0, 1.0, 1.0, -1.0];
        let mc = mc_summary(
            |z| {
                (0..4)
                    .map(|k| {
                        let pa = angles[k].0 + sig[k].0 * z[2 * k];
                        let pb = angles[k].1 + sig[k].1 * z[2 * k + 1];
                        -signs[k] * (2.0 * (pa + pb)).cos()
                    })
                    .sum()
            },
            &ProductDistribution::standard_normals(8),
            200_000,
            i,
        )
        .unwrap();
        let tol = 4.0 * mc.standard_error() + 1e-12;
        assert!((mc.mean - b).abs() < tol, "config {i}: {} vs {b}", mc.mean);
    }
}

#[test]
fn fig1_closed_form() {
    let base = BellConfig::symmetric([0.0, FRAC_PI_8, 0.0, -FRAC_PI_8], FuzzinessModel::frequency(0.0), SQRT_2 * PI / 8.0);
    for dw in [0.0, 0.2, 0.5886, 1.0, 2.0] {
        let b = bell_value(&with_delta_w(&base, dw)).unwrap().b;
        let x = (-dw * dw).exp();
        let expected = -1.0 - SQRT_2 * x + x * x;
        assert!((b - expected).abs() < 1e-13, "dw={dw}: {b} vs {expected}");
    }
}

#[test]
fn derivative_matches_central_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let h = 1e-6;
    for _ in 0..200 {
        let dw = rng.random_range(0.05..2.0);
        let c = random_config(&mut rng, FuzzinessModel::frequency(dw));
        let analytic = bell_derivative_dw(&c).unwrap();
        let fd = (bell_value(&with_delta_w(&c, dw + h)).unwrap().b - bell_value(&with_delta_w(&c, dw - h)).unwrap().b)
            / (2.0 * h);
        assert!((analytic - fd).abs() <= 1e-6 * analytic.abs().max(1e-3), "{analytic} vs {fd}");
    }
}

#[test]
fn derivative_needs_frequency_model() {
    let c = BellConfig::symmetric([0.0, 0.3, 0.1, 0.2], FuzzinessModel::timing(0.3), 1.0);
    assert!(matches!(bell_derivative_dw(&c), Err(Error::UnsupportedModel(_))));
}

#[test]
fn joint_model_rejected() {
    let c = BellConfig::symmetric([0.0, 0.3, 0.1, 0.2], FuzzinessModel::Joint { delta_w: 0.2, delta_t: 0.2 }, 1.0);
    assert!(matches!(bell_value(&c), Err(Error::UnsupportedModel(_))));
}

#[test]
fn small_angle_expansion_coefficients() {
    // |B| = 2 + 4λ² - (k² + 12k + 28/3) λ⁴ + O(λ⁶), k = 2Δw²/w0².
    for (dw, w0) in [(0.0, 1.0), (0.5, 1.0), (1.0, 1.0), (2.0, 1.0), (1.0, 2.0)] {
        let k: f64 = 2.0 * dw * dw / (w0 * w0);
        let c4 = k * k + 12.0 * k + 28.0 / 3.0;
        let lam: f64 = 1e-2;
        let c = BellConfig::symmetric([0.0, lam, 0.0, lam], FuzzinessModel::frequency(dw), w0);
        let abs_b = bell_value(&c).unwrap().abs_b;
        let remainder = (abs_b - 2.0 - 4.0 * lam * lam) / lam.powi(4);
        assert!((remainder + c4).abs() < 0.02 * c4.max(1.0), "dw={dw} w0={w0}: {remainder} vs {}", -c4);
        assert!(abs_b > 2.0);
    }
}

#[test]
fn per_term_pathology_reaches_three() {
    let mut c = BellConfig::symmetric([0.0, 2.0 * PI, 0.0, 2.0 * PI], FuzzinessModel::frequency(0.0), 1.0);
    c.variant = BellVariant::PerTerm;
    c.per_term_overrides = Some([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 4.0, 4.0]);
    let b = bell_value_per_term(&c).unwrap();
    assert!((b.abs_b - 3.0).abs() < 1e-9);
    assert!(bell_value(&c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn breakdown_is_consistent(ta in -4.0f64..4.0, tb in -4.0f64..4.0, tap in -4.0f64..4.0, tbp in -4.0f64..4.0, dw in 0.0f64..2.0, w0 in 0.2f64..3.0) {
        let c = BellConfig::symmetric([ta, tap, tb, tbp], FuzzinessModel::frequency(dw), w0);
        let r = bell_value(&c).unwrap();
        prop_assert!((r.b - (r.e1 + r.e2 + r.e3 - r.e4)).abs() <= BREAKDOWN_TOL);
        prop_assert_eq!(r.abs_b, r.b.abs());
        prop_assert!(r.abs_b <= 2.0 * SQRT_2 + 1e-12);
    }

    #[test]
    fn abs_bell_non_increasing_above_classical_bound(ta in -PI..PI, tb in -PI..PI, tap in -PI..PI, tbp in -PI..PI, dw in 0.0f64..2.0, w0 in 0.1f64..3.0) {
        let c = BellConfig::symmetric([ta, tap, tb, tbp], FuzzinessModel::frequency(dw), w0);
        if bell_value(&c).unwrap().abs_b >= 2.0 {
            prop_assert!(abs_bell_derivative_dw(&c).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn timing_rescaling_invariance(ta in -PI..PI, tb in -PI..PI, tap in -PI..PI, tbp in -PI..PI, dt in 0.0f64..1.0, w0 in 0.2f64..3.0, s in 0.2f64..5.0) {
        // Only Δt·|w0| enters the timing model.
        let a = BellConfig::symmetric([ta, tap, tb, tbp], FuzzinessModel::timing(dt), w0);
        let b = BellConfig::symmetric([ta, tap, tb, tbp], FuzzinessModel::timing(dt / s), w0 * s);
        prop_assert!((bell_value(&a).unwrap().b - bell_value(&b).unwrap().b).abs() < 1e-12);
    }

    #[test]
    fn correlation_damping_is_bounded(ta in -PI..PI, tb in -PI..PI, sa in 0.0f64..3.0, sb in 0.0f64..3.0) {
        let e = coarsened_correlation(ta, tb, sa, sb);
        prop_assert!(e.abs() <= (-2.0 * (sa * sa + sb * sb)).exp() + 1e-15);
    }
}
