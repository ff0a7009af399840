use num_complex::Complex64;
use sckerr::grid::{Axis, GridSpec, WaveFunction};
use sckerr::linear_metaplectic::mehler_kernel;
use sckerr::quantum::{autocorrelation_quantum, coherent_state_position};
use sckerr::root_search::{Counting, RootSearchParams};
use sckerr::semiclassical::*;
use sckerr::system::SystemId;
use sckerr::{Error, PhasePoint};
use std::f64::consts::PI;

fn small_axis() -> Axis {
    Axis::symmetric(6.0, 121).unwrap()
}

fn test_gaussian(ax: Axis) -> WaveFunction {
    coherent_state_position(PhasePoint::new(0.7, -0.4), ax)
}

#[test]
fn hk_at_time_zero_is_the_identity_in_weak_form() {
    let ax = small_axis();
    let k = hk_propagator(SystemId::Kerr, ax, ax, 0.0, &GridSpec::new(121, 121, (-8.0, 8.0)).unwrap(), Counting::ClosedForm)
        .unwrap();
    let psi0 = test_gaussian(ax);
    let psi = propagate_wavefunction(&k, &psi0).unwrap();
    let err = psi.values.iter().zip(&psi0.values).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    assert!(err < 1e-6, "max deviation {err}");
}

#[test]
fn sho_vvg_is_mehler_away_from_caustics() {
    let ax = small_axis();
    let t = 1.0;
    let params = RootSearchParams::for_grid(ax.spacing(), (-12.0, 12.0), 241).unwrap();
    let r = vvg_propagator_report(SystemId::Sho, ax, ax, t, &params).unwrap();
    assert_eq!(r.report.caustic_excluded, 0);
    assert_eq!(r.report.roots, ax.len() * ax.len());
    for i in (0..ax.len()).step_by(7) {
        for j in (0..ax.len()).step_by(5) {
            let want = mehler_kernel(t, ax.value(i), ax.value(j)).unwrap();
            assert!((r.field.values[[i, j]] - want).norm() < 1e-8);
        }
    }
}

#[test]
fn sho_hk_matches_mehler_in_weak_form_past_the_caustic() {
    let ax = Axis::symmetric(8.0, 161).unwrap();
    let pg = GridSpec::new(161, 161, (-10.0, 10.0)).unwrap();
    let psi0 = test_gaussian(ax);
    for &t in &[0.5, PI, 4.0] {
        let k = hk_propagator(SystemId::Sho, ax, ax, t, &pg, Counting::ClosedForm).unwrap();
        let psi = propagate_wavefunction(&k, &psi0).unwrap();
        // Exact: the coherent state rotates rigidly and picks up e^{−it/2}.
        let c = SystemId::Sho.flow_point(PhasePoint::new(0.7, -0.4), t);
        let want = coherent_state_position(c, ax);
        let g = Complex64::from_polar(1.0, -0.5 * t);
        let err = psi.values.iter().zip(&want.values).fold(0.0f64, |m, (a, b)| m.max((a - g * b).norm()));
        assert!(err < 1e-4, "t={t} max deviation {err}");
    }
}

#[test]
fn grid_mismatch_is_reported() {
    let ax = small_axis();
    let k = hk_propagator(SystemId::Sho, ax, ax, 0.3, &GridSpec::new(41, 41, (-6.0, 6.0)).unwrap(), Counting::ClosedForm)
        .unwrap();
    let other = test_gaussian(Axis::symmetric(6.0, 101).unwrap());
    assert!(matches!(propagate_wavefunction(&k, &other), Err(Error::GridMismatch(_))));
}

#[test]
fn delta_composition_for_kerr() {
    let params = RootSearchParams::new(1e-9, 1e-5, (-4.0, 4.0), 8001).unwrap();
    for &(q, xp, t) in &[(0.5, 0.2, 0.1), (-1.0, 0.7, 0.2), (0.0, 0.0, PI / 4.0)] {
        let (lhs, rhs) = verify_delta_composition(SystemId::Kerr, q, xp, t, &params, 1e-3).unwrap();
        assert!((lhs - rhs).abs() <= 0.02 * rhs.abs(), "({q},{xp},{t}): {lhs} vs {rhs}");
    }
}

#[test]
fn ivr_tracks_quantum_at_short_time() {
    let c = PhasePoint::new(5.0, 0.0);
    let ax = Axis::symmetric(3.0 * PI, 201).unwrap();
    let psi = coherent_state_position(c, ax);
    let t = 0.004;
    let v = ivr_matrix_element(SystemId::Kerr, &psi, &psi, t, &GridSpec::square(301).unwrap(), Counting::ClosedForm).unwrap();
    let q = autocorrelation_quantum(c, t);
    assert!((v.norm() - q.norm()).abs() < 0.05 * q.norm(), "ivr {v} quantum {q}");
}

#[test]
fn autocorrelation_rejects_bad_times() {
    let cfg = AutocorrConfig::desk(201).unwrap();
    let c = PhasePoint::new(5.0, 0.0);
    assert!(autocorrelation(Method::Hk, SystemId::Kerr, c, &[0.1, 0.05], &cfg).is_err());
    assert!(autocorrelation(Method::Quantum, SystemId::Sho, c, &[0.0], &cfg).is_err());
}

#[test]
fn hk_autocorrelation_short_time_matches_quantum() {
    let cfg = AutocorrConfig::desk(201).unwrap();
    let c = PhasePoint::new(5.0, 0.0);
    let ts = [0.0, 0.002, 0.005];
    let hk = autocorrelation(Method::Hk, SystemId::Kerr, c, &ts, &cfg).unwrap();
    for (k, &t) in ts.iter().enumerate() {
        let q = autocorrelation_quantum(c, t);
        assert!((hk.values[k] - q).norm() < 0.02, "t={t}: {} vs {q}", hk.values[k]);
    }
}
