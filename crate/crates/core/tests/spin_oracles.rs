use coarse_bell::spin::x_frame;
use coarse_bell::{
    evolve_observable, pair_expectation, pauli, rotated_observable, rotation_unitary, Error, PauliAxis,
    SquareComplexMatrix, TwoQubitState,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// exp(M) by scaling and squaring of a truncated Taylor series.
fn expm(m: &SquareComplexMatrix) -> SquareComplexMatrix {
    let norm: f64 = m.entries().iter().map(|z| z.norm()).sum();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m.scale_real(scale);
    let mut term = SquareComplexMatrix::identity(m.dim());
    let mut sum = term.clone();
    for k in 1..30 {
        term = (&term * &a).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn heisenberg_by_expm(w: f64, beta: f64, t: f64) -> SquareComplexMatrix {
    let h = &pauli(PauliAxis::X).scale_real(w) + &pauli(PauliAxis::Z).scale_real(beta);
    let fwd = expm(&h.scale(Complex64::new(0.0, t)));
    let back = expm(&h.scale(Complex64::new(0.0, -t)));
    &(&fwd * &pauli(PauliAxis::Z)) * &back
}

#[test]
fn evolution_matches_series_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let w = rng.random_range(-3.0..3.0);
        let beta = rng.random_range(-3.0..3.0);
        let t = rng.random_range(-2.0..4.0);
        let closed = evolve_observable(w, beta, t);
        let series = heisenberg_by_expm(w, beta, t);
        assert!(closed.approx_eq(&series, 1e-10), "w={w} beta={beta} t={t}");
    }
}

#[test]
fn sharp_correlation_is_minus_cos() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let psi = TwoQubitState::entangled();
    for _ in 0..100 {
        let a = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let b = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let e = pair_expectation(&psi, &rotated_observable(a), &rotated_observable(b)).unwrap();
        assert!((e + (2.0 * (a + b)).cos()).abs() < 1e-12, "a={a} b={b}");
    }
}

#[test]
fn evolution_frame_maps_onto_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let psi = TwoQubitState::entangled();
    for _ in 0..100 {
        let w: f64 = rng.random_range(0.1..3.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let theta = rng.random_range(0.0..2.0) * w.signum();
        let evolved = evolve_observable(w, 0.0, theta / w);
        assert!(x_frame(&evolved).approx_eq(&rotated_observable(theta), 1e-12));
        // Correlations are frame independent.
        let other = evolve_observable(1.3, 0.0, 0.4);
        let raw = pair_expectation(&psi, &evolved, &other).unwrap();
        let mapped = pair_expectation(&psi, &x_frame(&evolved), &x_frame(&other)).unwrap();
        assert!((raw - mapped).abs() < 1e-12);
    }
}

#[test]
fn non_hermitian_operand_is_contract_violation() {
    let m = SquareComplexMatrix::from_real2([[0.0, 1.0], [0.0, 0.0]]);
    let r = pair_expectation(&TwoQubitState::entangled(), &m, &pauli(PauliAxis::Z));
    assert!(matches!(r, Err(Error::Contract(_))));
}

#[test]
fn unnormalized_state_rejected() {
    let one = Complex64::new(1.0, 0.0);
    assert!(TwoQubitState::new([one, one, Complex64::default(), Complex64::default()]).is_err());
}

proptest! {
    #[test]
    fn rotation_is_unitary_involution(theta in -10.0f64..10.0) {
        let u = rotation_unitary(theta);
        prop_assert!(u.is_unitary(1e-12));
        prop_assert!((&u * &u).approx_eq(&SquareComplexMatrix::identity(2), 1e-12));
    }

    #[test]
    fn rotated_observable_is_dichotomic(theta in -10.0f64..10.0) {
        let m = rotated_observable(theta);
        prop_assert!(m.is_hermitian(1e-14));
        prop_assert!((&m * &m).approx_eq(&SquareComplexMatrix::identity(2), 1e-12));
        prop_assert!(m.trace().norm() < 1e-14);
    }

    #[test]
    fn evolved_observable_is_dichotomic(w in -5.0f64..5.0, beta in -5.0f64..5.0, t in -3.0f64..3.0) {
        let m = evolve_observable(w, beta, t);
        prop_assert!(m.is_hermitian(1e-12));
        prop_assert!((&m * &m).approx_eq(&SquareComplexMatrix::identity(2), 1e-11));
    }

    #[test]
    fn correlations_are_bounded(a in -7.0f64..7.0, b in -7.0f64..7.0, w in -3.0f64..3.0, g in 0.0f64..3.0) {
        let psi = TwoQubitState::entangled();
        let e = pair_expectation(&psi, &rotated_observable(a), &evolve_observable(w, g, b)).unwrap();
        prop_assert!(e.abs() <= 1.0);
    }

    #[test]
    fn correlation_depends_on_angle_sum_only(a in -3.0f64..3.0, b in -3.0f64..3.0, d in -1.0f64..1.0) {
        let psi = TwoQubitState::entangled();
        let e1 = pair_expectation(&psi, &rotated_observable(a), &rotated_observable(b)).unwrap();
        let e2 = pair_expectation(&psi, &rotated_observable(a + d), &rotated_observable(b - d)).unwrap();
        prop_assert!((e1 - e2).abs() < 1e-12);
    }
}
