//! Caustic sets of the Kerr flow and the angular fraction of an orbit lying
//! near them ("stickiness").

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, GridSpec};
use crate::phase_complex::PhasePoint;
use crate::system::SystemId;

/// Default caustic neighbourhood in units of `b`.
pub const DEFAULT_EPS_C: f64 = 0.05;

/// Samples of `b(q, p; t)` (stored as the real part) over a phase grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CausticMap {
    pub field: ComplexField2D,
    pub t: f64,
    pub level_eps: f64,
}

impl CausticMap {
    pub fn is_caustic(&self, i: usize, j: usize) -> bool {
        self.field.values[[i, j]].re.abs() < self.level_eps
    }

    /// Number of grid points inside the caustic neighbourhood.
    pub fn caustic_count(&self) -> usize {
        self.field.values.iter().filter(|v| v.re.abs() < self.level_eps).count()
    }

    /// Number of grid cells whose corners change the sign of `b`.
    pub fn zero_crossings(&self) -> usize {
        let v = &self.field.values;
        let (nx, ny) = v.dim();
        let mut n = 0;
        for i in 0..nx {
            for j in 0..ny {
                if i + 1 < nx && (v[[i, j]].re > 0.0) != (v[[i + 1, j]].re > 0.0) {
                    n += 1;
                }
                if j + 1 < ny && (v[[i, j]].re > 0.0) != (v[[i, j + 1]].re > 0.0) {
                    n += 1;
                }
            }
        }
        n
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StickinessReport {
    pub radius: f64,
    pub t: f64,
    pub eps_c: f64,
    pub fraction: f64,
}

/// `b(r, φ; t) = sin(ωt) + 8r²t·sin φ·sin(φ − ωt)` with `ω = 4r²`.
pub fn b_polar(radius: f64, phi: f64, t: f64) -> f64 {
    let r2 = radius * radius;
    let wt = 4.0 * r2 * t;
    wt.sin() + 8.0 * r2 * t * phi.sin() * (phi - wt).sin()
}

pub fn caustic_map(t: f64, grid: &GridSpec, level_eps: f64) -> Result<CausticMap> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("caustic map needs t > 0, got {t}")));
    }
    let field = ComplexField2D::from_fn(grid.q_axis()?, grid.p_axis()?, |q, p| {
        Complex64::new(SystemId::Kerr.b_entry(PhasePoint::new(q, p), t), 0.0)
    });
    Ok(CausticMap { field, t, level_eps })
}

/// Fraction of orbit angle `φ ∈ [0, 2π)` with `|b| < eps_c`, on `n_phi` midpoints.
pub fn orbit_caustic_fraction(radius: f64, t: f64, eps_c: f64, n_phi: usize) -> Result<StickinessReport> {
    if !(radius > 0.0) || n_phi < 360 {
        return Err(Error::InvalidInput(format!(
            "need radius > 0 and n_phi ≥ 360, got {radius} and {n_phi}"
        )));
    }
    let hits = (0..n_phi)
        .filter(|&k| {
            let phi = 2.0 * PI * (k as f64 + 0.5) / n_phi as f64;
            b_polar(radius, phi, t).abs() < eps_c
        })
        .count();
    Ok(StickinessReport { radius, t, eps_c, fraction: hits as f64 / n_phi as f64 })
}

/// Stickiness for every `(t, radius)` pair, ordered by time then radius.
pub fn stickiness_scan(radii: &[f64], t_samples: &[f64], eps_c: f64, n_phi: usize) -> Result<Vec<StickinessReport>> {
    if radii.is_empty() || t_samples.is_empty() {
        return Err(Error::InvalidInput("stickiness scan needs radii and times".into()));
    }
    let pairs: Vec<(f64, f64)> = t_samples.iter().flat_map(|&t| radii.iter().map(move |&r| (t, r))).collect();
    pairs
        .par_iter()
        .map(|&(t, r)| orbit_caustic_fraction(r, t, eps_c, n_phi))
        .collect()
}

/// Largest stickiness fraction over `radii` at time `t`.
pub fn max_fraction(radii: &[f64], t: f64, eps_c: f64, n_phi: usize) -> Result<f64> {
    Ok(stickiness_scan(radii, &[t], eps_c, n_phi)?
        .iter()
        .fold(0.0, |m, r| m.max(r.fraction)))
}
