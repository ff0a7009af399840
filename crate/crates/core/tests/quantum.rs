use num_complex::Complex64;
use proptest::prelude::*;
use sckerr::grid::{Axis, GridSpec};
use sckerr::quantum::*;
use sckerr::system::SystemId;
use sckerr::{Error, PhasePoint};
use std::f64::consts::PI;

fn axis() -> Axis {
    Axis::symmetric(3.0 * PI, 401).unwrap()
}

#[test]
fn hermite_functions_are_orthonormal() {
    let ax = Axis::symmetric(12.0, 1601).unwrap();
    let xs = ax.points();
    let w = ax.weights();
    let table: Vec<Vec<f64>> = xs.iter().map(|&x| hermite_functions(30, x)).collect();
    for m in 0..=30 {
        for n in 0..=30 {
            let s: f64 = (0..xs.len()).map(|i| w[i] * table[i][m] * table[i][n]).sum();
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((s - want).abs() < 1e-10, "<{m}|{n}> = {s}");
        }
    }
}

#[test]
fn hermite_table_matches_single_evaluation() {
    for &x in &[-3.0, -0.4, 0.0, 1.7, 5.2] {
        let t = hermite_functions(40, x);
        for (n, v) in t.iter().enumerate() {
            assert!((v - hermite_function(n, x)).abs() < 1e-13);
        }
    }
}

#[test]
fn coherent_state_fock_matches_position_form() {
    let c = PhasePoint::new(1.5, -0.8);
    let fock = coherent_state_fock(c, default_n_max(c)).unwrap();
    assert!((fock.norm_sqr() - 1.0).abs() < 1e-12);
    assert!((fock.mean_number() - 0.5 * c.r2()).abs() < 1e-10);
    let a = wavefunction_from_fock(&fock, axis());
    let b = coherent_state_position(c, axis());
    let err = a.values.iter().zip(&b.values).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    assert!(err < 1e-10, "max deviation {err}");
}

#[test]
fn truncation_guard() {
    assert!(matches!(
        coherent_state_fock(PhasePoint::new(5.0, 0.0), 10),
        Err(Error::TruncationTooSmall { .. })
    ));
}

#[test]
fn revival_returns_the_state_up_to_phase() {
    let c = PhasePoint::new(5.0, 0.0);
    let psi0 = coherent_state_fock(c, default_n_max(c)).unwrap();
    let psi = kerr_evolve(&psi0, PI / 4.0);
    let ov = psi0.inner(&psi);
    assert!((ov - Complex64::from_polar(1.0, -PI / 4.0)).norm() < 1e-10);
}

#[test]
fn half_revival_is_a_cat_state() {
    // At T_rev/2 the Fock phases are e^{−iπ/8}(−1)^{n(n+1)/2}, a period-4
    // pattern that splits |α⟩ into |iα⟩ and |−iα⟩ with weights (1 ± i)/2.
    let c = PhasePoint::new(5.0, 0.0);
    let n = default_n_max(c);
    let psi = kerr_evolve(&coherent_state_fock(c, n).unwrap(), PI / 8.0);
    let plus = coherent_state_fock(PhasePoint::new(0.0, 5.0), n).unwrap();
    let minus = coherent_state_fock(PhasePoint::new(0.0, -5.0), n).unwrap();
    let g = Complex64::from_polar(1.0, -PI / 8.0);
    let a = 0.5 * Complex64::new(1.0, 1.0) * g;
    let b = 0.5 * Complex64::new(1.0, -1.0) * g;
    for k in 0..=n {
        let want = a * plus.coeffs[k] + b * minus.coeffs[k];
        assert!((psi.coeffs[k] - want).norm() < 1e-12, "n = {k}");
    }
}

#[test]
fn autocorrelation_series_starts_at_one() {
    let ts = [0.0, 0.01, 0.02];
    let s = autocorrelation_quantum_series(PhasePoint::new(5.0, 0.0), &ts).unwrap();
    assert!((s.values[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    assert!(autocorrelation_quantum_series(PhasePoint::new(5.0, 0.0), &[0.1, 0.0]).is_err());
}

#[test]
fn exact_propagator_reproduces_fock_evolution() {
    let c = PhasePoint::new(2.0, 1.0);
    let ax = axis();
    let t = 0.07;
    let k = exact_propagator(ax, ax, t, 80);
    let psi0 = coherent_state_position(c, ax);
    let psi = sckerr::semiclassical::propagate_wavefunction(&k, &psi0).unwrap();
    let want = wavefunction_from_fock(&kerr_evolve(&coherent_state_fock(c, 80).unwrap(), t), ax);
    let err = psi.values.iter().zip(&want.values).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    assert!(err < 1e-8, "max deviation {err}");
}

#[test]
fn wigner_of_coherent_state() {
    let c = PhasePoint::new(1.0, 0.5);
    let psi = coherent_state_position(c, Axis::symmetric(8.0, 801).unwrap());
    // Wigner nodes sit on ψ nodes, so q ± q̃ needs no interpolation.
    let g = Axis::symmetric(6.0, 121).unwrap();
    let w = wigner_transform(&psi, g, g);
    let mut max_dev = 0.0f64;
    for i in 0..g.len() {
        for j in 0..g.len() {
            let (q, p) = (g.value(i), g.value(j));
            let want = (-(q - c.q).powi(2) - (p - c.p).powi(2)).exp() / PI;
            max_dev = max_dev.max((w.values[[i, j]] - want).norm());
        }
    }
    assert!(max_dev < 1e-6, "max deviation {max_dev}");
    assert!((w.integrate().re - 1.0).abs() < 1e-6, "mass {}", w.integrate().re);
    assert!(w.values.iter().all(|v| v.im.abs() < IM_TOL));
}

#[test]
fn wigner_of_cat_state_has_negative_fringes() {
    let c = PhasePoint::new(3.0, 0.0);
    let ax = Axis::symmetric(9.0, 361).unwrap();
    let psi = wavefunction_from_fock(&kerr_evolve(&coherent_state_fock(c, 60).unwrap(), PI / 8.0), ax);
    let g = Axis::symmetric(6.0, 121).unwrap();
    let w = wigner_transform(&psi, g, g);
    let min = w.values.iter().fold(f64::INFINITY, |m, v| m.min(v.re));
    assert!(min < -0.1, "minimum {min}");
    assert!((w.integrate().re - 1.0).abs() < 1e-4, "mass {}", w.integrate().re);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kerr_evolution_is_unitary(q in -4.0f64..4.0, p in -4.0f64..4.0, t in 0.0f64..1.0) {
        let c = PhasePoint::new(q, p);
        let s = kerr_evolve(&coherent_state_fock(c, default_n_max(c)).unwrap(), t);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn twa_transport_preserves_mass(t in 0.0f64..0.2) {
        let g = GridSpec::new(241, 241, (-8.0, 8.0)).unwrap();
        let (gq, gp) = (g.q_axis().unwrap(), g.p_axis().unwrap());
        let w = twa(SystemId::Kerr, PhasePoint::new(2.0, 0.0), t, gq, gp);
        prop_assert!((w.integrate().re - 1.0).abs() < 1e-3);
    }
}
