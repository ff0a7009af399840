//! Exact quantum Kerr dynamics in the Fock (Hermite) basis, Wigner functions
//! and the truncated Wigner approximation.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Axis, ComplexField2D, TimeSeries, WaveFunction};
use crate::phase_complex::PhasePoint;
use crate::system::SystemId;

/// Tail weight allowed beyond the Fock truncation.
pub const TAIL_TOL: f64 = 1e-12;
/// Relative size of `Im W` tolerated by the Wigner transform.
pub const IM_TOL: f64 = 1e-8;

const PI_M14: f64 = 0.751_125_544_464_942_5; // π^{−1/4}

#[derive(Debug, Clone, PartialEq)]
pub struct FockExpansion {
    pub coeffs: Vec<Complex64>,
}

impl FockExpansion {
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &FockExpansion) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn mean_number(&self) -> f64 {
        self.coeffs.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
    }
}

/// Orthonormal Hermite function `ψ_n(x)`.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI_M14 * (-0.5 * x * x).exp();
    for k in 0..n {
        let next = (2.0 / (k + 1) as f64).sqrt() * x * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ψ_0(x), …, ψ_{n_max}(x)` by the same recurrence.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = 0.0;
    let mut cur = PI_M14 * (-0.5 * x * x).exp();
    out.push(cur);
    for k in 0..n_max {
        let next = (2.0 / (k + 1) as f64).sqrt() * x * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// `ψ_n(x_i)` as an `(n_x, n_max+1)` matrix.
fn hermite_matrix(xs: &[f64], n_max: usize) -> Array2<Complex64> {
    let rows: Vec<Vec<f64>> = xs.par_iter().map(|&x| hermite_functions(n_max, x)).collect();
    Array2::from_shape_fn((xs.len(), n_max + 1), |(i, n)| Complex64::new(rows[i][n], 0.0))
}

/// Default truncation `ceil(m + 10√m) + 20` for mean photon number `m`.
pub fn default_n_max(center: PhasePoint) -> usize {
    let m = 0.5 * center.r2();
    (m + 10.0 * m.sqrt()).ceil() as usize + 20
}

fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n_max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Poisson weights `e^{−m} mⁿ/n!` for `n = 0..=n_max`.
pub fn poisson_weights(m: f64, n_max: usize) -> Vec<f64> {
    if m == 0.0 {
        let mut w = vec![0.0; n_max + 1];
        w[0] = 1.0;
        return w;
    }
    let lnf = ln_factorials(n_max);
    let lm = m.ln();
    (0..=n_max).map(|n| (-m + n as f64 * lm - lnf[n]).exp()).collect()
}

fn poisson_tail(m: f64, n_max: usize) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    // Sum the tail directly; the terms decay geometrically once n > m.
    let lm = m.ln();
    let mut ln_term = -m + (n_max + 1) as f64 * lm - ln_factorials(n_max + 1)[n_max + 1];
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        let term = ln_term.exp();
        tail += term;
        if (n as f64) > m && term < 1e-18 * tail.max(1e-300) || n > n_max + 100_000 {
            break;
        }
        n += 1;
        ln_term += lm - (n as f64).ln();
    }
    tail
}

/// Coherent state centered at `(q, p)`: `c_n = e^{−|α|²/2} αⁿ/√n!`, `α = (q + ip)/√2`.
pub fn coherent_state_fock(center: PhasePoint, n_max: usize) -> Result<FockExpansion> {
    let m = 0.5 * center.r2();
    let tail = poisson_tail(m, n_max);
    if tail > TAIL_TOL {
        return Err(Error::TruncationTooSmall { n_max, tail });
    }
    let arg = center.p.atan2(center.q);
    let weights = poisson_weights(m, n_max);
    let coeffs = weights
        .iter()
        .enumerate()
        .map(|(n, w)| Complex64::from_polar(w.sqrt(), n as f64 * arg))
        .collect();
    Ok(FockExpansion { coeffs })
}

/// Kerr eigenphase `t(2n+1)²` of level `n`.
fn kerr_phase(n: usize, t: f64) -> f64 {
    let k = (2 * n + 1) as f64;
    t * (k * k)
}

/// `c_n ↦ e^{−it(2n+1)²} c_n`.
pub fn kerr_evolve(state: &FockExpansion, t: f64) -> FockExpansion {
    let coeffs = state
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| c * Complex64::from_polar(1.0, -kerr_phase(n, t)))
        .collect();
    FockExpansion { coeffs }
}

pub fn wavefunction_from_fock(state: &FockExpansion, grid: Axis) -> WaveFunction {
    let n_max = state.n_max();
    let values = grid
        .points()
        .par_iter()
        .map(|&x| {
            hermite_functions(n_max, x)
                .iter()
                .zip(&state.coeffs)
                .map(|(h, c)| c * *h)
                .sum()
        })
        .collect();
    WaveFunction { grid, values }
}

/// Position-space coherent state `π^{−1/4} exp[−(x−q)²/2 + ip(x − q/2)]`.
pub fn coherent_state_position(center: PhasePoint, grid: Axis) -> WaveFunction {
    WaveFunction::from_fn(grid, |x| coherent_ket(center, x))
}

#[inline]
pub(crate) fn coherent_ket(center: PhasePoint, x: f64) -> Complex64 {
    let dx = x - center.q;
    Complex64::from_polar(PI_M14 * (-0.5 * dx * dx).exp(), center.p * (x - 0.5 * center.q))
}

/// Spectral Kerr propagator `Σ_{n≤n_max} ψ_n(x′) e^{−it(2n+1)²} ψ_n(x)` with rows along `x′`.
pub fn exact_propagator(grid_xp: Axis, grid_x: Axis, t: f64, n_max: usize) -> ComplexField2D {
    let hp = hermite_matrix(&grid_xp.points(), n_max);
    let hx = hermite_matrix(&grid_x.points(), n_max);
    let mut scaled = hp;
    for (n, mut col) in scaled.columns_mut().into_iter().enumerate() {
        let ph = Complex64::from_polar(1.0, -kerr_phase(n, t));
        col.mapv_inplace(|v| v * ph);
    }
    let values = scaled.dot(&hx.t());
    ComplexField2D { x_axis: grid_xp, y_axis: grid_x, values }
}

/// Quantum autocorrelation of a coherent state from the Fock sum.
pub fn autocorrelation_quantum(center: PhasePoint, t: f64) -> Complex64 {
    let n_max = default_n_max(center);
    let weights = poisson_weights(0.5 * center.r2(), n_max);
    weights
        .iter()
        .enumerate()
        .rev()
        .map(|(n, w)| Complex64::from_polar(*w, -kerr_phase(n, t)))
        .sum()
}

pub fn autocorrelation_quantum_series(center: PhasePoint, t_samples: &[f64]) -> Result<TimeSeries> {
    let values = t_samples.iter().map(|&t| autocorrelation_quantum(center, t)).collect();
    TimeSeries::new(t_samples.to_vec(), values)
}

/// `W(q,p) = π^{−1} ∫ dq̃ ψ(q+q̃) ψ*(q−q̃) e^{−2iq̃p}` by the trapezoid rule over
/// `q̃` on the spacing of the ψ grid, with ψ linearly interpolated and zero
/// outside its grid.
pub fn wigner_transform(psi: &WaveFunction, grid_q: Axis, grid_p: Axis) -> ComplexField2D {
    let h = psi.grid.spacing();
    let span = psi.grid.max() - psi.grid.min();
    let k_max = (span / h).ceil() as i64;
    let ps = grid_p.points();
    let rows: Vec<Vec<Complex64>> = grid_q
        .points()
        .par_iter()
        .map(|&q| {
            let f: Vec<(f64, Complex64)> = (-k_max..=k_max)
                .filter_map(|k| {
                    let s = k as f64 * h;
                    let v = psi.interpolate(q + s) * psi.interpolate(q - s).conj();
                    (v != Complex64::new(0.0, 0.0)).then_some((s, v))
                })
                .collect();
            ps.iter()
                .map(|&p| {
                    let sum: Complex64 = f.iter().map(|(s, v)| v * Complex64::from_polar(1.0, -2.0 * s * p)).sum();
                    sum * h / PI
                })
                .collect()
        })
        .collect();
    let values = Array2::from_shape_fn((grid_q.len(), grid_p.len()), |(i, j)| rows[i][j]);
    ComplexField2D { x_axis: grid_q, y_axis: grid_p, values }
}

/// Truncated Wigner approximation: the initial coherent-state Wigner function
/// transported along the classical flow, `W₀(φ_{−t}(q, p))`.
pub fn twa(sys: SystemId, center: PhasePoint, t: f64, grid_q: Axis, grid_p: Axis) -> ComplexField2D {
    ComplexField2D::from_fn(grid_q, grid_p, |q, p| {
        let back = sys.flow_point(PhasePoint::new(q, p), -t);
        let d2 = (back.q - center.q).powi(2) + (back.p - center.p).powi(2);
        Complex64::new((-d2).exp() / PI, 0.0)
    })
}

/// Phase-space overlap `2π ∬ W_TWA(t) · W(0)`; for pure states the exact
/// counterpart is `|⟨ψ₀|ψ(t)⟩|²`.
pub fn twa_overlap(sys: SystemId, center: PhasePoint, t: f64, grid_q: Axis, grid_p: Axis) -> f64 {
    let w_t = twa(sys, center, t, grid_q, grid_p);
    let w_0 = twa(sys, center, 0.0, grid_q, grid_p);
    let mut prod = w_t.clone();
    prod.values.zip_mut_with(&w_0.values, |a, b| *a *= b);
    2.0 * PI * prod.integrate().re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_examples() {
        assert!((hermite_function(0, 0.0) - PI.powf(-0.25)).abs() < 1e-15);
        assert!(hermite_function(1, 0.0).abs() < 1e-15);
        let v = hermite_functions(5, 0.7);
        for (n, x) in v.iter().enumerate() {
            assert!((x - hermite_function(n, 0.7)).abs() < 1e-15);
        }
    }

    #[test]
    fn coherent_examples() {
        let vac = coherent_state_fock(PhasePoint::ORIGIN, 10).unwrap();
        assert_eq!(vac.coeffs[0], Complex64::new(1.0, 0.0));
        assert!(vac.coeffs[1..].iter().all(|c| c.norm() == 0.0));
        let c = PhasePoint::new(5.0, 0.0);
        let st = coherent_state_fock(c, default_n_max(c)).unwrap();
        assert!((st.mean_number() - 12.5).abs() < 1e-10);
        assert!(matches!(coherent_state_fock(c, 20), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn revival_phase() {
        let c = PhasePoint::new(5.0, 0.0);
        let z = autocorrelation_quantum(c, PI / 4.0);
        assert!((z - Complex64::from_polar(1.0, -PI / 4.0)).norm() < 1e-10);
        assert_eq!(autocorrelation_quantum(c, 0.0).re, autocorrelation_quantum(c, 0.0).re);
    }

    #[test]
    fn twa_starts_at_coherent_gaussian() {
        let ax = Axis::symmetric(8.0, 41).unwrap();
        let c = PhasePoint::new(1.0, -0.5);
        let w = twa(SystemId::Kerr, c, 0.0, ax, ax);
        let q = ax.value(25);
        let p = ax.value(17);
        let expect = (-(q - c.q).powi(2) - (p - c.p).powi(2)).exp() / PI;
        assert!((w.values[[25, 17]].re - expect).abs() < 1e-15);
    }
}
