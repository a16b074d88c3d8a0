use ndarray::Array2;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

use postsel::fock::{
    displaced_fock_overlaps, displacement_closed_form, displacement_recurrence, displacement_series, Ladder,
};
use postsel::grid::coordinate_wavefunction;
use postsel::{DisplaceMethod, GridSpec, TwoModeState};

/// Normalized random state supported on `n < support`.
fn random_state(seed: u64, na: usize, support: usize) -> TwoModeState {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut c = Array2::<C64>::zeros((na, 2));
    for n in 0..support {
        for m in 0..2 {
            c[(n, m)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    TwoModeState::from_coeffs(c, 1.0).unwrap().normalize().unwrap()
}

fn complex(max: f64) -> impl Strategy<Value = C64> {
    (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn displacement_is_unitary(seed in any::<u64>(), alpha in complex(2.0)) {
        let psi = random_state(seed, 40, 8);
        let out = psi.displace_a(alpha, DisplaceMethod::ClosedForm);
        prop_assert!((out.state.norm() - 1.0).abs() < 1e-8);
        prop_assert!(out.is_clean());
    }

    #[test]
    fn displacement_composes_to_identity(seed in any::<u64>(), alpha in complex(2.0)) {
        let psi = random_state(seed, 48, 8);
        let there = psi.displace_a(alpha, DisplaceMethod::ClosedForm).state;
        let back = there.displace_a(-alpha, DisplaceMethod::ClosedForm).state;
        prop_assert!(back.max_abs_diff(&psi).unwrap() < 1e-9);
    }

    #[test]
    fn displacement_methods_agree(seed in any::<u64>(), alpha in complex(1.0)) {
        let psi = random_state(seed, 40, 13);
        let a = psi.displace_a(alpha, DisplaceMethod::ClosedForm).state;
        let b = psi.displace_a(alpha, DisplaceMethod::Series).state;
        prop_assert!(a.max_abs_diff(&b).unwrap() < 1e-10);
    }

    #[test]
    fn canonical_commutator(seed in any::<u64>()) {
        let psi = random_state(seed, 20, 12);
        prop_assert!(psi.coeffs().row(19).iter().all(|c| c.norm() < 1e-8));
        let aad = psi.expect(&[Ladder::A, Ladder::ADag]);
        let ada = psi.expect(&[Ladder::ADag, Ladder::A]);
        prop_assert!((aad - ada - 1.0).norm() < 1e-10);
        let bbd = psi.expect(&[Ladder::B, Ladder::BDag]);
        prop_assert!(bbd.re >= -1e-15);
    }

    #[test]
    fn inner_is_conjugate_symmetric(s1 in any::<u64>(), s2 in any::<u64>()) {
        let u = random_state(s1, 10, 10);
        let v = random_state(s2, 10, 10);
        let uv = u.inner(&v).unwrap();
        let vu = v.inner(&u).unwrap();
        prop_assert!((uv - vu.conj()).norm() < 1e-15);
        prop_assert!((u.inner(&u).unwrap() - 1.0).norm() < 1e-14);
    }
}

#[test]
fn overlap_column_matches_series_exponential() {
    let alpha = C64::new(0.5, 0.0);
    let column = displaced_fock_overlaps(alpha, 1, 16).unwrap();
    let series = displacement_series(alpha, 60);
    for (k, v) in column.iter().enumerate() {
        assert!((v - series[(k, 1)]).norm() < 1e-13, "k = {k}");
    }
    assert!(displaced_fock_overlaps(alpha, 3, 3).is_err());
}

#[test]
fn coherent_amplitudes() {
    let column = displaced_fock_overlaps(C64::new(0.5, 0.0), 0, 8).unwrap();
    let mut factorial = 1.0;
    for (k, v) in column.iter().enumerate() {
        if k > 0 {
            factorial *= k as f64;
        }
        let expected = (-0.125f64).exp() * 0.5f64.powi(k as i32) / factorial.sqrt();
        assert!((v.re - expected).abs() < 1e-16 && v.im == 0.0);
    }
}

#[test]
fn displacement_builders_agree() {
    let alpha = C64::new(0.7, -0.4);
    let closed = displacement_closed_form(alpha, 30);
    let recurrence = displacement_recurrence(alpha, 30);
    let diff = (&closed - &recurrence).iter().map(|c| c.norm()).fold(0.0, f64::max);
    assert!(diff < 1e-12, "{diff:e}");
}

#[test]
fn displaced_vacuum_is_coherent() {
    let vac = TwoModeState::vacuum(40, 2, 1.0).unwrap();
    let coh = vac.displace_a(C64::new(1.0, 0.0), DisplaceMethod::ClosedForm).state;
    let n = coh.expect(&[Ladder::ADag, Ladder::A]);
    assert!((n - 1.0).norm() < 1e-12);
    assert!(coh.coeffs().column(1).iter().all(|c| c.norm() == 0.0));
}

#[test]
fn coordinate_parseval() {
    let grid = GridSpec::square(8.0, 321).unwrap();
    for seed in 0..3 {
        let psi = random_state(seed, 12, 12);
        let field = coordinate_wavefunction(&psi, &grid).unwrap().intensity();
        assert!((field.integral() - 1.0).abs() < 1e-6, "seed {seed}: {}", field.integral());
    }
}
