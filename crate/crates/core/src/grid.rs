//! Uniform axes, phase-space grids and the sampled containers shared by all modules.

use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Half-width of the default phase-space window, `3π`.
pub const DEFAULT_HALF_WIDTH: f64 = 3.0 * PI;

/// Uniform grid of `n ≥ 2` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    min: f64,
    max: f64,
    n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("axis needs at least 2 points, got {n}")));
        }
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::InvalidInput(format!("axis bounds [{min}, {max}] are not increasing")));
        }
        Ok(Self { min, max, n })
    }

    /// Symmetric axis `[−half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.value(i)).collect()
    }

    /// Trapezoid weight of sample `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if i == 0 || i + 1 == self.n {
            0.5 * h
        } else {
            h
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.weight(i)).collect()
    }

    /// Linear interpolation of `values` sampled on this axis, zero outside.
    pub fn interpolate(&self, values: &[Complex64], x: f64) -> Complex64 {
        if !(x >= self.min && x <= self.max) {
            return Complex64::new(0.0, 0.0);
        }
        let s = (x - self.min) / self.spacing();
        let i = (s.floor() as usize).min(self.n - 2);
        let f = s - i as f64;
        values[i] * (1.0 - f) + values[i + 1] * f
    }
}

/// Square phase-space quadrature grid over `window × window`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_q: usize,
    pub n_p: usize,
    pub window: (f64, f64),
}

impl GridSpec {
    pub fn new(n_q: usize, n_p: usize, window: (f64, f64)) -> Result<Self> {
        let spec = Self { n_q, n_p, window };
        spec.q_axis()?;
        spec.p_axis()?;
        Ok(spec)
    }

    /// `n × n` points over `[−3π, 3π]²`.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n, (-DEFAULT_HALF_WIDTH, DEFAULT_HALF_WIDTH))
    }

    pub fn q_axis(&self) -> Result<Axis> {
        Axis::new(self.window.0, self.window.1, self.n_q)
    }

    pub fn p_axis(&self) -> Result<Axis> {
        Axis::new(self.window.0, self.window.1, self.n_p)
    }
}

/// Complex samples over a rectangular grid, `values[[i, j]]` at `(x_axis[i], y_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub values: Array2<Complex64>,
}

impl ComplexField2D {
    pub fn zeros(x_axis: Axis, y_axis: Axis) -> Self {
        Self {
            values: Array2::zeros((x_axis.len(), y_axis.len())),
            x_axis,
            y_axis,
        }
    }

    pub fn from_fn(x_axis: Axis, y_axis: Axis, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let xs = x_axis.points();
        let ys = y_axis.points();
        let values = Array2::from_shape_fn((xs.len(), ys.len()), |(i, j)| f(xs[i], ys[j]));
        Self { x_axis, y_axis, values }
    }

    /// Trapezoid integral over both axes.
    pub fn integrate(&self) -> Complex64 {
        let wx = self.x_axis.weights();
        let wy = self.y_axis.weights();
        let mut total = Complex64::new(0.0, 0.0);
        for (i, row) in self.values.outer_iter().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for (j, v) in row.iter().enumerate() {
                s += v * wy[j];
            }
            total += s * wx[i];
        }
        total
    }

    /// Relative L2 distance `‖self − other‖ / ‖other‖` over the samples.
    pub fn relative_l2(&self, other: &ComplexField2D) -> Result<f64> {
        if self.values.dim() != other.values.dim() {
            return Err(Error::GridMismatch("fields differ in shape".into()));
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, b) in self.values.iter().zip(other.values.iter()) {
            num += (a - b).norm_sqr();
            den += b.norm_sqr();
        }
        Ok((num / den).sqrt())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// Complex wave function sampled on a uniform axis.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub grid: Axis,
    pub values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn new(grid: Axis, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples on a {}-point axis",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Axis, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self { grid, values }
    }

    /// Trapezoid norm `(∫|ψ|²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v.norm_sqr() * self.grid.weight(i))
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self|other⟩` by the trapezoid rule.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("wave functions live on different axes".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| a.conj() * b * self.grid.weight(i))
            .sum())
    }

    pub fn interpolate(&self, x: f64) -> Complex64 {
        self.grid.interpolate(&self.values, x)
    }
}

/// Complex series over increasing sample times.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl TimeSeries {
    pub fn new(t: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if t.len() != values.len() {
            return Err(Error::InvalidInput("time and value arrays differ in length".into()));
        }
        check_increasing(&t)?;
        Ok(Self { t, values })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

pub(crate) fn check_increasing(t: &[f64]) -> Result<()> {
    if t.iter().any(|v| !v.is_finite()) || t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("time samples must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// `n` evenly spaced samples from `a` to `b` inclusive (`n ≥ 2`), or `[a]` for `n = 1`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}
