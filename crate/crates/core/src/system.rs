//! Closed-form classical dynamics of the Kerr system `H = (q² + p²)²` and the
//! harmonic oscillator `H = (q² + p²)/2`.
//!
//! Both flows are rotations in phase space; for Kerr the angular frequency
//! `ω = 4(q² + p²)` depends on the orbit, which is what produces caustics.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::phase_complex::{Monodromy2, PhasePoint};

/// Relative tolerance for energy conservation along the flow.
pub const TOL_ENERGY: f64 = 1e-10;

/// The revival time of the quantum Kerr system, `π/4`.
pub const T_REV: f64 = PI / 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SystemId {
    #[default]
    Kerr,
    Sho,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowResult {
    pub point: PhasePoint,
    pub monodromy: Monodromy2,
    /// Position generating function `S(q′, q; t)` along the orbit.
    pub action_pos: f64,
    /// Weyl-symmetric action `S − ½(p′q′ − pq)`.
    pub action_weyl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrTimes {
    pub t_rev: f64,
    pub t_ehr: f64,
}

impl SystemId {
    pub fn hamiltonian(self, pt: PhasePoint) -> f64 {
        match self {
            SystemId::Kerr => pt.r2() * pt.r2(),
            SystemId::Sho => 0.5 * pt.r2(),
        }
    }

    /// Angular frequency of the orbit through `pt`.
    pub fn omega(self, pt: PhasePoint) -> f64 {
        match self {
            SystemId::Kerr => angular_frequency(pt),
            SystemId::Sho => 1.0,
        }
    }

    pub fn flow(self, pt: PhasePoint, t: f64) -> FlowResult {
        let (s, c) = (self.omega(pt) * t).sin_cos();
        self.flow_with_phase(pt, t, c, s)
    }

    /// Flow with `cos ωt` and `sin ωt` supplied by the caller.
    pub(crate) fn flow_with_phase(self, pt: PhasePoint, t: f64, c: f64, s: f64) -> FlowResult {
        let PhasePoint { q, p } = pt;
        let qp = q * c + p * s;
        let pp = p * c - q * s;
        let monodromy = self.monodromy_with_phase(pt, t, c, s);
        // Cross terms shared by both systems: ½(p′q′ − pq).
        let s2 = 2.0 * s * c;
        let c2 = c * c - s * s;
        let half_cross = 0.25 * (p * p - q * q) * s2 + 0.5 * p * q * (c2 - 1.0);
        let action_weyl = match self {
            SystemId::Kerr => pt.r2() * pt.r2() * t,
            SystemId::Sho => 0.0,
        };
        FlowResult {
            point: PhasePoint::new(qp, pp),
            monodromy,
            action_pos: action_weyl + half_cross,
            action_weyl,
        }
    }

    pub fn flow_point(self, pt: PhasePoint, t: f64) -> PhasePoint {
        let (s, c) = (self.omega(pt) * t).sin_cos();
        PhasePoint::new(pt.q * c + pt.p * s, pt.p * c - pt.q * s)
    }

    pub fn monodromy(self, pt: PhasePoint, t: f64) -> Monodromy2 {
        let (s, c) = (self.omega(pt) * t).sin_cos();
        self.monodromy_with_phase(pt, t, c, s)
    }

    pub(crate) fn monodromy_with_phase(self, pt: PhasePoint, t: f64, c: f64, s: f64) -> Monodromy2 {
        match self {
            SystemId::Sho => Monodromy2::new(c, s, -s, c),
            SystemId::Kerr => {
                let PhasePoint { q, p } = pt;
                let qp = q * c + p * s;
                let pp = p * c - q * s;
                // ∂ω/∂q = 8q, ∂ω/∂p = 8p.
                Monodromy2::new(
                    c + 8.0 * q * t * pp,
                    s + 8.0 * p * t * pp,
                    -s - 8.0 * q * t * qp,
                    c - 8.0 * p * t * qp,
                )
            }
        }
    }

    /// `b = ∂q′/∂p` at time `t`.
    pub fn b_entry(self, pt: PhasePoint, t: f64) -> f64 {
        let (s, c) = (self.omega(pt) * t).sin_cos();
        match self {
            SystemId::Sho => s,
            SystemId::Kerr => s + 8.0 * pt.p * t * (pt.p * c - pt.q * s),
        }
    }

    /// Continuous phase `Φ(t)` with `b(t) = |·| sin Φ(t)`, `Φ(0) = 0`.
    ///
    /// For Kerr, `b = Im[e^{iωt}(1 − 8pqt + 8ip²t)]`; the second factor moves
    /// along a straight line through 1 with nonnegative imaginary part, so
    /// its argument lies in `[0, π)` and increases monotonically. Hence `Φ`
    /// is strictly increasing and the zeros of `b` on `(0, t]` are exactly
    /// the crossings of `Φ` through positive multiples of `π`.
    pub fn caustic_phase(self, pt: PhasePoint, t: f64) -> f64 {
        match self {
            SystemId::Sho => t,
            SystemId::Kerr => {
                let g_re = 1.0 - 8.0 * pt.p * pt.q * t;
                let g_im = 8.0 * pt.p * pt.p * t;
                self.omega(pt) * t + g_im.atan2(g_re)
            }
        }
    }

    /// Continuous argument of `Λ(t)`, starting from zero.
    ///
    /// Kerr: `Λ = e^{−iθ}(1 − iθ)` with `θ = ωt`; SHO: `Λ = e^{−it}`.
    pub fn lambda_phase(self, pt: PhasePoint, t: f64) -> f64 {
        match self {
            SystemId::Sho => -t,
            SystemId::Kerr => {
                let theta = self.omega(pt) * t;
                -(theta + theta.atan())
            }
        }
    }

    /// Complexified block `Λ(t)` in closed form.
    pub fn lambda(self, pt: PhasePoint, t: f64) -> Complex64 {
        match self {
            SystemId::Sho => Complex64::from_polar(1.0, -t),
            SystemId::Kerr => {
                let theta = self.omega(pt) * t;
                Complex64::from_polar(1.0, -theta) * Complex64::new(1.0, -theta)
            }
        }
    }
}

pub fn hamiltonian(sys: SystemId, pt: PhasePoint) -> f64 {
    sys.hamiltonian(pt)
}

pub fn flow(sys: SystemId, pt: PhasePoint, t: f64) -> FlowResult {
    sys.flow(pt, t)
}

/// Kerr angular frequency `4(q² + p²)`.
pub fn angular_frequency(pt: PhasePoint) -> f64 {
    4.0 * pt.r2()
}

/// Revival time and the Ehrenfest time `π/(2(q² + p²))` of a packet centered at `pt`.
pub fn characteristic_times(pt: PhasePoint) -> Result<KerrTimes> {
    let r2 = pt.r2();
    if r2 == 0.0 {
        return Err(Error::DegenerateOrbit);
    }
    Ok(KerrTimes { t_rev: T_REV, t_ehr: PI / (2.0 * r2) })
}

/// Generates `(cos ωτ_k, sin ωτ_k)` for `τ_k = k·dt` by complex rotation,
/// resynchronising with `sin_cos` periodically to bound round-off drift.
#[derive(Debug, Clone)]
pub(crate) struct PhaseStepper {
    omega_dt: f64,
    step: Complex64,
    current: Complex64,
    k: usize,
}

impl PhaseStepper {
    const RESYNC: usize = 64;

    pub fn new(omega: f64, dt: f64) -> Self {
        let omega_dt = omega * dt;
        Self {
            omega_dt,
            step: Complex64::from_polar(1.0, omega_dt),
            current: Complex64::new(1.0, 0.0),
            k: 0,
        }
    }

    /// Advance to the next sample and return `(cos, sin)` there.
    pub fn advance(&mut self) -> (f64, f64) {
        self.k += 1;
        if self.k % Self::RESYNC == 0 {
            let (s, c) = (self.omega_dt * self.k as f64).sin_cos();
            self.current = Complex64::new(c, s);
        } else {
            self.current *= self.step;
        }
        (self.current.re, self.current.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_complex::check_symplectic;

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(hamiltonian(SystemId::Kerr, PhasePoint::new(1.0, 0.0)), 1.0);
        assert_eq!(hamiltonian(SystemId::Kerr, PhasePoint::new(5.0, 0.0)), 625.0);
        assert_eq!(hamiltonian(SystemId::Sho, PhasePoint::new(0.0, 2.0)), 2.0);
    }

    #[test]
    fn frequency_examples() {
        assert_eq!(angular_frequency(PhasePoint::new(1.0, 0.0)), 4.0);
        assert_eq!(angular_frequency(PhasePoint::new(5.0, 0.0)), 100.0);
        assert_eq!(angular_frequency(PhasePoint::ORIGIN), 0.0);
    }

    #[test]
    fn flow_at_zero_time_is_identity() {
        let pt = PhasePoint::new(1.3, -0.4);
        let f = flow(SystemId::Kerr, pt, 0.0);
        assert_eq!(f.point, pt);
        assert_eq!(f.monodromy, Monodromy2::IDENTITY);
        assert_eq!(f.action_pos, 0.0);
        assert_eq!(f.action_weyl, 0.0);
    }

    #[test]
    fn full_revolution_at_ehrenfest_time() {
        let f = flow(SystemId::Kerr, PhasePoint::new(5.0, 0.0), PI / 50.0);
        assert!((f.point.q - 5.0).abs() < 1e-12 && f.point.p.abs() < 1e-12);
    }

    #[test]
    fn b_entry_on_the_q_axis() {
        let f = flow(SystemId::Kerr, PhasePoint::new(1.0, 0.0), PI / 8.0);
        assert!((f.monodromy.b - 1.0).abs() < 1e-15);
        assert!(check_symplectic(f.monodromy, 1e-12));
    }

    #[test]
    fn times() {
        let kt = characteristic_times(PhasePoint::new(5.0, 0.0)).unwrap();
        assert!((kt.t_ehr - PI / 50.0).abs() < 1e-15);
        assert_eq!(kt.t_rev, PI / 4.0);
        assert_eq!(characteristic_times(PhasePoint::ORIGIN), Err(Error::DegenerateOrbit));
    }

    #[test]
    fn stepper_tracks_sin_cos() {
        let mut st = PhaseStepper::new(713.0, 1e-3);
        for k in 1..=5000 {
            let (c, s) = st.advance();
            let (se, ce) = (713.0 * 1e-3 * k as f64).sin_cos();
            assert!((c - ce).abs() < 1e-12 && (s - se).abs() < 1e-12);
        }
    }
}
