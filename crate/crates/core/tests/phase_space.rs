use num_complex::Complex64;
use proptest::prelude::*;
use sckerr::phase_complex::*;
use sckerr::system::{characteristic_times, SystemId};
use sckerr::Error;
use std::f64::consts::PI;

const W: f64 = 3.0 * PI;

fn random_symplectic() -> impl Strategy<Value = Monodromy2> {
    // Rotation × squeeze × shear covers SL(2, R) up to bounded norm.
    (0.0..2.0 * PI, -2.0f64..2.0, -3.0f64..3.0).prop_map(|(th, s, k)| {
        let sq = Monodromy2::new(s.exp(), 0.0, 0.0, (-s).exp());
        let sh = Monodromy2::new(1.0, k, 0.0, 1.0);
        Monodromy2::rotation(th).compose(&sq).compose(&sh)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn complexify_round_trip(q in -W..W, p in -W..W) {
        let back = decomplexify(complexify(PhasePoint::new(q, p))).unwrap();
        prop_assert!((back.q - q).abs() < 1e-12 && (back.p - p).abs() < 1e-12);
    }

    #[test]
    fn complexified_monodromy_invariant(m in random_symplectic()) {
        let cm = complexify_monodromy(m);
        prop_assert!((cm.invariant() - 1.0).abs() < 1e-9 * cm.lambda.norm_sqr().max(1.0));
        prop_assert!(cm.lambda.norm() >= 1.0 - 1e-12);
    }

    #[test]
    fn complexification_is_a_homomorphism(m1 in random_symplectic(), m2 in random_symplectic()) {
        let lhs = complexify_monodromy(m2.compose(&m1));
        let rhs = complexify_monodromy(m2).compose(&complexify_monodromy(m1));
        let scale = lhs.lambda.norm().max(1.0);
        prop_assert!((lhs.lambda - rhs.lambda).norm() < 1e-10 * scale);
        prop_assert!((lhs.gamma - rhs.gamma).norm() < 1e-10 * scale);
    }

    #[test]
    fn kerr_flow_conserves_energy(q in -W..W, p in -W..W, t in 0.0f64..1.0) {
        let pt = PhasePoint::new(q, p);
        let h0 = SystemId::Kerr.hamiltonian(pt);
        let h1 = SystemId::Kerr.hamiltonian(SystemId::Kerr.flow_point(pt, t));
        prop_assert!((h1 - h0).abs() <= 1e-10 * h0.max(1.0));
    }

    #[test]
    fn kerr_monodromy_symplectic(q in -W..W, p in -W..W, t in 0.0f64..1.0) {
        let m = SystemId::Kerr.monodromy(PhasePoint::new(q, p), t);
        prop_assert!((m.det() - 1.0).abs() < 1e-9 * (m.a.abs() + m.b.abs() + m.c.abs() + m.d.abs()).powi(2));
    }

    #[test]
    fn kerr_flow_is_additive(q in -3.0f64..3.0, p in -3.0f64..3.0, t1 in 0.0f64..0.5, t2 in 0.0f64..0.5) {
        let pt = PhasePoint::new(q, p);
        let s = SystemId::Kerr;
        let two = s.flow_point(s.flow_point(pt, t1), t2);
        let one = s.flow_point(pt, t1 + t2);
        prop_assert!((two.q - one.q).abs() < 1e-10 && (two.p - one.p).abs() < 1e-10);
        let chain = s.monodromy(s.flow_point(pt, t1), t2).compose(&s.monodromy(pt, t1));
        let direct = s.monodromy(pt, t1 + t2);
        let scale = 1.0 + direct.a.abs() + direct.b.abs();
        prop_assert!((chain.a - direct.a).abs() < 1e-9 * scale);
        prop_assert!((chain.b - direct.b).abs() < 1e-9 * scale);
        prop_assert!((chain.c - direct.c).abs() < 1e-9 * scale);
        prop_assert!((chain.d - direct.d).abs() < 1e-9 * scale);
    }

    #[test]
    fn kerr_monodromy_matches_finite_differences(q in -2.0f64..2.0, p in -2.0f64..2.0, t in 0.01f64..0.3) {
        let s = SystemId::Kerr;
        let h = 1e-6;
        let pt = PhasePoint::new(q, p);
        let dq_p = s.flow_point(PhasePoint::new(q + h, p), t);
        let dq_m = s.flow_point(PhasePoint::new(q - h, p), t);
        let dp_p = s.flow_point(PhasePoint::new(q, p + h), t);
        let dp_m = s.flow_point(PhasePoint::new(q, p - h), t);
        let m = s.monodromy(pt, t);
        let scale = 1.0 + m.a.abs() + m.b.abs() + m.c.abs() + m.d.abs();
        prop_assert!(((dq_p.q - dq_m.q) / (2.0 * h) - m.a).abs() < 1e-5 * scale);
        prop_assert!(((dp_p.q - dp_m.q) / (2.0 * h) - m.b).abs() < 1e-5 * scale);
        prop_assert!(((dq_p.p - dq_m.p) / (2.0 * h) - m.c).abs() < 1e-5 * scale);
        prop_assert!(((dp_p.p - dp_m.p) / (2.0 * h) - m.d).abs() < 1e-5 * scale);
    }

    #[test]
    fn weyl_action_is_energy_times_time(q in -W..W, p in -W..W, t in 0.0f64..1.0) {
        let fr = SystemId::Kerr.flow(PhasePoint::new(q, p), t);
        let r2: f64 = q * q + p * p;
        prop_assert!((fr.action_weyl - r2 * r2 * t).abs() < 1e-9 * (1.0 + r2 * r2 * t));
    }

    #[test]
    fn lambda_closed_form(q in -W..W, p in -W..W, t in 0.0f64..1.0) {
        let pt = PhasePoint::new(q, p);
        let lam = complexify_monodromy(SystemId::Kerr.monodromy(pt, t)).lambda;
        let th = 4.0 * pt.r2() * t;
        let closed = Complex64::from_polar(1.0, -th) * Complex64::new(1.0, -th);
        prop_assert!((lam - closed).norm() < 1e-9 * closed.norm());
    }
}

/// Trapezoid quadrature of `∫ (p dq/dτ − H) dτ` along the numerically sampled flow.
fn lagrangian_action(pt: PhasePoint, t: f64) -> f64 {
    let n = 20_000;
    let dt = t / n as f64;
    let sys = SystemId::Kerr;
    let h = sys.hamiltonian(pt);
    let lag = |tau: f64| {
        let x = sys.flow_point(pt, tau);
        // q̇ = ∂H/∂p = 4r²p.
        x.p * 4.0 * (x.q * x.q + x.p * x.p) * x.p - h
    };
    let mut s = 0.5 * (lag(0.0) + lag(t));
    for k in 1..n {
        s += lag(k as f64 * dt);
    }
    s * dt
}

#[test]
fn position_action_matches_lagrangian_quadrature() {
    for &(q, p, t) in &[(1.0, 0.5, 0.2), (-0.7, 1.3, 0.15), (2.0, -1.0, 0.05), (0.3, 0.2, 0.9)] {
        let pt = PhasePoint::new(q, p);
        let s = SystemId::Kerr.flow(pt, t).action_pos;
        let oracle = lagrangian_action(pt, t);
        assert!((s - oracle).abs() < 1e-6, "S({q},{p},{t}) = {s}, quadrature {oracle}");
    }
}

#[test]
fn position_action_generates_the_flow() {
    // ∂S/∂q′ = p′ at fixed q, varying q′ through p.
    let sys = SystemId::Kerr;
    let (q, p, t, h) = (0.8, 0.6, 0.1, 1e-6);
    let fr = sys.flow(PhasePoint::new(q, p), t);
    let fp = sys.flow(PhasePoint::new(q, p + h), t);
    let fm = sys.flow(PhasePoint::new(q, p - h), t);
    let ds = (fp.action_pos - fm.action_pos) / (fp.point.q - fm.point.q);
    assert!((ds - fr.point.p).abs() < 1e-6);
}

#[test]
fn sho_action_and_monodromy() {
    let fr = SystemId::Sho.flow(PhasePoint::new(1.0, 0.0), PI / 2.0);
    assert!(fr.point.q.abs() < 1e-12 && (fr.point.p + 1.0).abs() < 1e-12);
    assert!(fr.action_weyl.abs() < 1e-12);
    let m = Monodromy2::rotation(PI / 2.0);
    assert!((fr.monodromy.b - m.b).abs() < 1e-12);
}

#[test]
fn characteristic_times_of_the_reference_packet() {
    let k = characteristic_times(PhasePoint::new(5.0, 0.0)).unwrap();
    assert!((k.t_rev - PI / 4.0).abs() < 1e-15);
    assert!((k.t_ehr - PI / 50.0).abs() < 1e-15);
    assert!(matches!(characteristic_times(PhasePoint::ORIGIN), Err(Error::DegenerateOrbit)));
}

#[test]
fn decomplexify_rejects_independent_coordinates() {
    let bad = ComplexPhasePoint { zeta: Complex64::new(1.0, 0.0), zeta_star: Complex64::new(0.0, 1.0) };
    assert!(matches!(decomplexify(bad), Err(Error::ConjugacyViolation { .. })));
}
