//! Semiclassical propagators: van Vleck–Gutzwiller (vV-G) with root search,
//! the position initial value representation (IVR) and Herman–Kluk (H-K).

use ndarray::{Array2, Axis as NdAxis};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{check_increasing, Axis, ComplexField2D, GridSpec, TimeSeries, WaveFunction};
use crate::phase_complex::PhasePoint;
use crate::quantum::{autocorrelation_quantum, coherent_ket, coherent_state_position};
use crate::root_search::{
    maslov_closed_form, maslov_index, default_n_steps, record_for, roots_from_scan, sqrt_lambda, Counting,
    RootSearchParams,
};
use crate::system::SystemId;

const PI_M14: f64 = 0.751_125_544_464_942_5;

/// Samples with `|ψ|` below this fraction of the maximum are skipped in overlaps.
const SUPPORT_CUTOFF: f64 = 1e-15;

/// Phase points per gemm block in the H-K quadrature.
const HK_CHUNK: usize = 4096;

/// Global vV-G prefactor `(2πi)^{−1/2} = e^{−iπ/4}(2π)^{−1/2}`.
fn vvg_prefactor() -> Complex64 {
    Complex64::from_polar((2.0 * PI).powf(-0.5), -0.25 * PI)
}

/// A coherent-state label together with its image under the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentKernelPair {
    pub center: PhasePoint,
    pub evolved: PhasePoint,
    pub t: f64,
}

impl CoherentKernelPair {
    pub fn new(sys: SystemId, center: PhasePoint, t: f64) -> Self {
        Self { center, evolved: sys.flow_point(center, t), t }
    }

    /// `⟨ζ*(q,p)|x⟩ = π^{−1/4} exp[−(x−q)²/2 − ip(x − q/2)]`.
    pub fn bra(&self, x: f64) -> Complex64 {
        coherent_ket(self.center, x).conj()
    }

    /// `⟨x′|ζ′(q,p;t)⟩ = π^{−1/4} exp[−(x′−q′)²/2 + ip′(x′ − q′/2)]`.
    pub fn ket(&self, xprime: f64) -> Complex64 {
        coherent_ket(self.evolved, xprime)
    }
}

/// Diagnostics of a vV-G evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VvgReport {
    pub roots: usize,
    /// Root trajectories ending on a caustic, left out of the sum.
    pub caustic_excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VvgResult {
    pub field: ComplexField2D,
    pub report: VvgReport,
}

/// Contribution of all roots connecting `x` to each `x′` in `xps`.
fn vvg_column(
    sys: SystemId,
    x: f64,
    xps: &[f64],
    t: f64,
    params: &RootSearchParams,
    ps: &[f64],
) -> Result<(Vec<Complex64>, VvgReport)> {
    let qf: Vec<f64> = ps.iter().map(|&p| sys.flow_point(PhasePoint::new(x, p), t).q).collect();
    let pref = vvg_prefactor();
    let mut report = VvgReport::default();
    let mut col = Vec::with_capacity(xps.len());
    for &xp in xps {
        let roots = match roots_from_scan(sys, x, xp, t, ps, &qf, params) {
            Ok(r) => r,
            Err(Error::EmptyWindow) => Vec::new(),
            Err(e) => return Err(e),
        };
        let mut sum = Complex64::new(0.0, 0.0);
        for p in roots {
            let rec = record_for(sys, x, p, t, params.counting)?;
            report.roots += 1;
            if rec.on_caustic() {
                report.caustic_excluded += 1;
                continue;
            }
            let phase = rec.action_pos - 0.5 * PI * f64::from(rec.maslov);
            sum += Complex64::from_polar(rec.b_entry.abs().powf(-0.5), phase);
        }
        col.push(pref * sum);
    }
    Ok((col, report))
}

/// vV-G propagator with its root/caustic counters; rows along `x′`.
pub fn vvg_propagator_report(
    sys: SystemId,
    grid_xp: Axis,
    grid_x: Axis,
    t: f64,
    params: &RootSearchParams,
) -> Result<VvgResult> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("vV-G needs t > 0, got {t}")));
    }
    let ps = params.scan_momenta();
    let xps = grid_xp.points();
    let cols: Vec<(Vec<Complex64>, VvgReport)> = grid_x
        .points()
        .par_iter()
        .map(|&x| vvg_column(sys, x, &xps, t, params, &ps))
        .collect::<Result<_>>()?;
    let mut field = ComplexField2D::zeros(grid_xp, grid_x);
    let mut report = VvgReport::default();
    for (j, (col, r)) in cols.into_iter().enumerate() {
        report.roots += r.roots;
        report.caustic_excluded += r.caustic_excluded;
        for (i, v) in col.into_iter().enumerate() {
            field.values[[i, j]] = v;
        }
    }
    Ok(VvgResult { field, report })
}

/// `K(x′,x;t) = Σ_roots (2πi)^{−1/2} |b|^{−1/2} exp{i[S(x′,x;t) − πμ/2]}`.
pub fn vvg_propagator(sys: SystemId, grid_xp: Axis, grid_x: Axis, t: f64, params: &RootSearchParams) -> Result<ComplexField2D> {
    vvg_propagator_report(sys, grid_xp, grid_x, t, params).map(|r| r.field)
}

/// Per-phase-point H-K data: initial and final labels and `√Λ e^{iS_W}`.
struct HkTable {
    initial: Vec<PhasePoint>,
    evolved: Vec<PhasePoint>,
    weight: Vec<Complex64>,
}

fn hk_table(sys: SystemId, t: f64, phase_grid: &GridSpec, counting: Counting) -> Result<HkTable> {
    let q_axis = phase_grid.q_axis()?;
    let p_axis = phase_grid.p_axis()?;
    let n = q_axis.len() * p_axis.len();
    let rows: Vec<(PhasePoint, PhasePoint, Complex64)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let (iq, ip) = (j / p_axis.len(), j % p_axis.len());
            let pt = PhasePoint::new(q_axis.value(iq), p_axis.value(ip));
            let fr = sys.flow(pt, t);
            let sq = sqrt_lambda(sys, pt, t, counting)?;
            let w = q_axis.weight(iq) * p_axis.weight(ip) / (2.0 * PI);
            Ok((pt, fr.point, sq * Complex64::from_polar(w, fr.action_weyl)))
        })
        .collect::<Result<_>>()?;
    let mut table = HkTable {
        initial: Vec::with_capacity(n),
        evolved: Vec::with_capacity(n),
        weight: Vec::with_capacity(n),
    };
    for (a, b, w) in rows {
        table.initial.push(a);
        table.evolved.push(b);
        table.weight.push(w);
    }
    Ok(table)
}

/// Largest `|√Λ|` over the phase grid at time `t`.
pub fn hk_max_sqrt_lambda(sys: SystemId, t: f64, phase_grid: &GridSpec) -> Result<f64> {
    let q_axis = phase_grid.q_axis()?;
    let p_axis = phase_grid.p_axis()?;
    let mut m: f64 = 0.0;
    for q in q_axis.points() {
        for p in p_axis.points() {
            m = m.max(sys.lambda(PhasePoint::new(q, p), t).norm().sqrt());
        }
    }
    Ok(m)
}

/// H-K propagator `(2π)^{−1} ∬ √Λ e^{iS_W} ⟨x′|ζ′⟩⟨ζ*|x⟩ dq dp` by the trapezoid
/// rule over `phase_grid`; rows along `x′`.
pub fn hk_propagator(
    sys: SystemId,
    grid_xp: Axis,
    grid_x: Axis,
    t: f64,
    phase_grid: &GridSpec,
    counting: Counting,
) -> Result<ComplexField2D> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("H-K needs t ≥ 0, got {t}")));
    }
    let table = hk_table(sys, t, phase_grid, counting)?;
    let xps = grid_xp.points();
    let xs = grid_x.points();
    let n = table.initial.len();
    let starts: Vec<usize> = (0..n).step_by(HK_CHUNK).collect();
    let partials: Vec<Array2<Complex64>> = starts
        .par_iter()
        .map(|&s| {
            let e = (s + HK_CHUNK).min(n);
            let kets = Array2::from_shape_fn((xps.len(), e - s), |(i, jj)| coherent_ket(table.evolved[s + jj], xps[i]));
            let bras = Array2::from_shape_fn((e - s, xs.len()), |(jj, k)| {
                table.weight[s + jj] * coherent_ket(table.initial[s + jj], xs[k]).conj()
            });
            kets.dot(&bras)
        })
        .collect();
    let mut values = Array2::<Complex64>::zeros((xps.len(), xs.len()));
    for part in partials {
        values += &part;
    }
    Ok(ComplexField2D { x_axis: grid_xp, y_axis: grid_x, values })
}

/// `ψ(x′) = ∫ K(x′,x) ψ₀(x) dx` by the trapezoid rule.
pub fn propagate_wavefunction(k: &ComplexField2D, psi0: &WaveFunction) -> Result<WaveFunction> {
    if k.y_axis != psi0.grid {
        return Err(Error::GridMismatch("kernel x-axis differs from the wave-function grid".into()));
    }
    let weighted: Vec<Complex64> = psi0.values.iter().enumerate().map(|(i, v)| v * psi0.grid.weight(i)).collect();
    let values = k
        .values
        .axis_iter(NdAxis(0))
        .map(|row| row.iter().zip(&weighted).map(|(a, b)| a * b).sum())
        .collect();
    WaveFunction::new(k.x_axis, values)
}

/// Position IVR `(2πi)^{−1/2} ∬ |b|^{1/2} e^{i[S − πμ/2]} bra*(q′) ket(q) dq dp`,
/// with `bra` linearly interpolated at the flowed position `q′(q, p)`.
pub fn ivr_matrix_element(
    sys: SystemId,
    bra: &WaveFunction,
    ket: &WaveFunction,
    t: f64,
    phase_grid: &GridSpec,
    counting: Counting,
) -> Result<Complex64> {
    let q_axis = phase_grid.q_axis()?;
    let p_axis = phase_grid.p_axis()?;
    // The integrand is ⟨bra|q′(q,p)⟩ · ket(q): the ket at the initial point,
    // the bra at the final one.
    let ket_q: Vec<Complex64> = q_axis.points().iter().map(|&q| ket.interpolate(q)).collect();
    let cut = SUPPORT_CUTOFF * ket_q.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let ps = p_axis.points();
    let rows: Vec<Complex64> = (0..q_axis.len())
        .into_par_iter()
        .map(|iq| {
            if ket_q[iq].norm() <= cut {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let q = q_axis.value(iq);
            let mut acc = Complex64::new(0.0, 0.0);
            for (ip, &p) in ps.iter().enumerate() {
                let pt = PhasePoint::new(q, p);
                let fr = sys.flow(pt, t);
                let b = bra.interpolate(fr.point.q).conj();
                if b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mu = match counting {
                    Counting::ClosedForm => maslov_closed_form(sys, pt, t),
                    Counting::Sampled => maslov_index(sys, pt, t, default_n_steps(sys, pt, t))?,
                };
                let phase = fr.action_pos - 0.5 * PI * f64::from(mu);
                acc += Complex64::from_polar(fr.monodromy.b.abs().sqrt() * p_axis.weight(ip), phase) * b;
            }
            Ok(acc * ket_q[iq] * q_axis.weight(iq))
        })
        .collect::<Result<_>>()?;
    Ok(vvg_prefactor() * rows.into_iter().sum::<Complex64>())
}

/// Gaussian-mollified integral form of the root sum at `(q, x′, t)`:
/// returns `(∫dp g_σ(q′ − x′)|∂q′/∂p|^{1/2}, Σ_roots |∂q′/∂p|^{−1/2})`.
pub fn verify_delta_composition(
    sys: SystemId,
    q: f64,
    xprime: f64,
    t: f64,
    params: &RootSearchParams,
    mollifier_width: f64,
) -> Result<(f64, f64)> {
    let rhs = match crate::root_search::find_roots(sys, q, xprime, t, params) {
        Ok(roots) => roots.iter().map(|r| r.b_entry.abs().powf(-0.5)).sum(),
        Err(Error::EmptyWindow) => 0.0,
        Err(e) => return Err(e),
    };
    // Resolve the mollifier in p: spacing well below σ/max|b| over the window.
    let (a, b) = params.p_window;
    let coarse = crate::grid::linspace(a, b, 4001);
    let b_max = coarse
        .iter()
        .map(|&p| sys.b_entry(PhasePoint::new(q, p), t).abs())
        .fold(1.0f64, f64::max);
    let h_target = mollifier_width / (8.0 * 1.5 * b_max);
    let n = (((b - a) / h_target).ceil() as usize + 1).max(4001);
    let axis = Axis::new(a, b, n)?;
    let norm = 1.0 / ((2.0 * PI).sqrt() * mollifier_width);
    let lhs = (0..n)
        .map(|i| {
            let p = axis.value(i);
            let pt = PhasePoint::new(q, p);
            let u = (sys.flow_point(pt, t).q - xprime) / mollifier_width;
            if u.abs() > 40.0 {
                return 0.0;
            }
            axis.weight(i) * norm * (-0.5 * u * u).exp() * sys.b_entry(pt, t).abs().sqrt()
        })
        .sum();
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Vvg,
    Ivr,
    Hk,
    Quantum,
}

/// Grids shared by the autocorrelation methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutocorrConfig {
    /// Position axis for wave functions and propagator pixels.
    pub x_axis: Axis,
    /// Phase grid for H-K.
    pub hk_grid: GridSpec,
    /// Phase grid for the IVR.
    pub ivr_grid: GridSpec,
    /// Momentum window for the vV-G root scan.
    pub p_window: (f64, f64),
    /// Momentum samples of the vV-G root scan.
    pub p_samples: usize,
    pub counting: Counting,
}

impl AutocorrConfig {
    /// 201-point axis and 201² phase grid for vV-G/H-K, `n_ivr²` for the IVR,
    /// all over `[−3π, 3π]`.
    pub fn desk(n_ivr: usize) -> Result<Self> {
        let hw = crate::grid::DEFAULT_HALF_WIDTH;
        Ok(Self {
            x_axis: Axis::symmetric(hw, 201)?,
            hk_grid: GridSpec::square(201)?,
            ivr_grid: GridSpec::square(n_ivr)?,
            p_window: (-hw, hw),
            p_samples: 201,
            counting: Counting::ClosedForm,
        })
    }
}

fn support(psi: &WaveFunction) -> Vec<usize> {
    let cut = SUPPORT_CUTOFF * psi.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    (0..psi.values.len()).filter(|&i| psi.values[i].norm() > cut).collect()
}

/// `⟨ψ|K|ψ⟩` with the vV-G kernel, summing only pixels where `ψ` is non-negligible.
fn vvg_autocorrelation_at(sys: SystemId, psi: &WaveFunction, t: f64, cfg: &AutocorrConfig) -> Result<Complex64> {
    let idx = support(psi);
    let ax = psi.grid;
    let xs: Vec<f64> = idx.iter().map(|&i| ax.value(i)).collect();
    let params = RootSearchParams {
        counting: cfg.counting,
        ..RootSearchParams::for_grid(ax.spacing(), cfg.p_window, cfg.p_samples)?
    };
    let ps = params.scan_momenta();
    let cols: Vec<Complex64> = idx
        .par_iter()
        .map(|&j| {
            let (col, _) = vvg_column(sys, ax.value(j), &xs, t, &params, &ps)?;
            let inner: Complex64 = col
                .iter()
                .zip(&idx)
                .map(|(k, &i)| psi.values[i].conj() * k * ax.weight(i))
                .sum();
            Ok(inner * psi.values[j] * ax.weight(j))
        })
        .collect::<Result<_>>()?;
    Ok(cols.into_iter().sum())
}

/// Coherent-state overlaps `⟨ζ*_j|ψ⟩` for every phase-grid point.
fn bra_overlaps(psi: &WaveFunction, initial: &[PhasePoint]) -> Vec<Complex64> {
    let idx = support(psi);
    let ax = psi.grid;
    initial
        .par_iter()
        .map(|&c| {
            idx.iter()
                .map(|&i| coherent_ket(c, ax.value(i)).conj() * psi.values[i] * ax.weight(i))
                .sum()
        })
        .collect()
}

fn hk_autocorrelation_series(sys: SystemId, psi: &WaveFunction, ts: &[f64], cfg: &AutocorrConfig) -> Result<Vec<Complex64>> {
    let q_axis = cfg.hk_grid.q_axis()?;
    let p_axis = cfg.hk_grid.p_axis()?;
    let mut initial = Vec::new();
    let mut weight = Vec::new();
    for iq in 0..q_axis.len() {
        for ip in 0..p_axis.len() {
            initial.push(PhasePoint::new(q_axis.value(iq), p_axis.value(ip)));
            weight.push(q_axis.weight(iq) * p_axis.weight(ip) / (2.0 * PI));
        }
    }
    let ov = bra_overlaps(psi, &initial);
    let cut = SUPPORT_CUTOFF * ov.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let active: Vec<usize> = (0..initial.len()).filter(|&j| ov[j].norm() > cut).collect();
    let idx = support(psi);
    let ax = psi.grid;
    ts.iter()
        .map(|&t| {
            let terms: Vec<Complex64> = active
                .par_iter()
                .map(|&j| {
                    let pt = initial[j];
                    let fr = sys.flow(pt, t);
                    let ket_ov: Complex64 = idx
                        .iter()
                        .map(|&i| psi.values[i].conj() * coherent_ket(fr.point, ax.value(i)) * ax.weight(i))
                        .sum();
                    let sq = sqrt_lambda(sys, pt, t, cfg.counting)?;
                    Ok(sq * Complex64::from_polar(weight[j], fr.action_weyl) * ket_ov * ov[j])
                })
                .collect::<Result<_>>()?;
            Ok(terms.into_iter().sum())
        })
        .collect()
}

/// Autocorrelation `C(t) = ⟨ψ|U(t)|ψ⟩` of the coherent state at `center`.
///
/// vV-G and the IVR are singular at `t = 0` (the propagator is a δ); there
/// the series holds the quadrature norm `⟨ψ|ψ⟩` instead.
pub fn autocorrelation(
    method: Method,
    sys: SystemId,
    center: PhasePoint,
    t_samples: &[f64],
    cfg: &AutocorrConfig,
) -> Result<TimeSeries> {
    check_increasing(t_samples)?;
    if t_samples.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidInput("time samples must be nonnegative".into()));
    }
    if method == Method::Quantum && sys == SystemId::Kerr {
        let values = t_samples.iter().map(|&t| autocorrelation_quantum(center, t)).collect();
        return TimeSeries::new(t_samples.to_vec(), values);
    }
    let psi = coherent_state_position(center, cfg.x_axis);
    let norm2 = Complex64::new(psi.norm().powi(2), 0.0);
    let values = match method {
        Method::Quantum => {
            return Err(Error::InvalidInput("the quantum oracle is implemented for the Kerr system only".into()))
        }
        Method::Hk => hk_autocorrelation_series(sys, &psi, t_samples, cfg)?,
        Method::Vvg => t_samples
            .iter()
            .map(|&t| if t == 0.0 { Ok(norm2) } else { vvg_autocorrelation_at(sys, &psi, t, cfg) })
            .collect::<Result<_>>()?,
        Method::Ivr => t_samples
            .iter()
            .map(|&t| {
                if t == 0.0 {
                    Ok(norm2)
                } else {
                    ivr_matrix_element(sys, &psi, &psi, t, &cfg.ivr_grid, cfg.counting)
                }
            })
            .collect::<Result<_>>()?,
    };
    TimeSeries::new(t_samples.to_vec(), values)
}

/// Coherent ket `π^{−1/4}` normalisation constant, exposed for tests.
pub const COHERENT_NORM: f64 = PI_M14;
