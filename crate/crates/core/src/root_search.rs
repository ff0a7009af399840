//! Trajectories with fixed endpoints, caustic counting along trajectories and
//! continuous tracking of the `√Λ` branch.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linear_metaplectic::EPS_CAUSTIC;
use crate::phase_complex::{complexify_monodromy, PhasePoint};
use crate::system::{PhaseStepper, SystemId};

/// Bisection tolerance on the initial momentum of a root.
pub const ROOT_TOL: f64 = 1e-12;

/// Largest raw step in `arg Λ` accepted by [`track_branch`].
pub const MAX_PHASE_STEP: f64 = 0.5 * PI;

/// Substeps used to confirm that a sign change of `b` hides a single zero.
const REFINE_SUBSTEPS: usize = 8;

/// How caustic counts and branch phases are obtained inside propagators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Counting {
    /// Time sampling with sign-change detection and refinement guards.
    Sampled,
    /// Closed-form phases of `b` and `Λ` (exact for both built-in systems).
    #[default]
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSearchParams {
    pub eps: f64,
    pub delta: f64,
    pub p_window: (f64, f64),
    pub p_samples: usize,
    pub counting: Counting,
}

impl RootSearchParams {
    pub fn new(eps: f64, delta: f64, p_window: (f64, f64), p_samples: usize) -> Result<Self> {
        let params = Self { eps, delta, p_window, p_samples, counting: Counting::default() };
        params.validate()?;
        Ok(params)
    }

    /// Defaults for a propagator grid: `eps` is the position spacing, the
    /// momentum scan is the momentum axis of the phase grid and `delta` is
    /// twice its spacing.
    pub fn for_grid(x_spacing: f64, p_window: (f64, f64), p_samples: usize) -> Result<Self> {
        let spacing = (p_window.1 - p_window.0) / (p_samples.max(2) - 1) as f64;
        Self::new(x_spacing, 2.0 * spacing, p_window, p_samples)
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.delta > 0.0 && self.p_samples >= 2 && self.p_window.1 > self.p_window.0) {
            return Err(Error::InvalidInput(format!("invalid root-search parameters {self:?}")));
        }
        Ok(())
    }

    pub fn scan_momenta(&self) -> Vec<f64> {
        crate::grid::linspace(self.p_window.0, self.p_window.1, self.p_samples)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub initial: PhasePoint,
    pub t: f64,
    pub final_point: PhasePoint,
    pub action_pos: f64,
    pub maslov: u32,
    pub b_entry: f64,
}

impl TrajectoryRecord {
    /// Whether the trajectory ends on a caustic and must be left out of vV-G sums.
    pub fn on_caustic(&self) -> bool {
        self.b_entry.abs() < EPS_CAUSTIC
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchTrack {
    pub t_samples: Vec<f64>,
    /// Unwrapped `arg Λ(τ)`, starting at zero.
    pub lambda_args: Vec<f64>,
    pub lambda_abs: Vec<f64>,
}

impl BranchTrack {
    /// Continuous `√Λ` at the last sample.
    pub fn sqrt_lambda(&self) -> Complex64 {
        let n = self.t_samples.len() - 1;
        Complex64::from_polar(self.lambda_abs[n].sqrt(), 0.5 * self.lambda_args[n])
    }

    /// Times where `Re √Λ` changes sign, i.e. the unwrapped phase crosses an odd multiple of `π`.
    pub fn branch_changes(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 1..self.t_samples.len() {
            let (a0, a1) = (self.lambda_args[k - 1], self.lambda_args[k]);
            let (lo, hi) = if a0 < a1 { (a0, a1) } else { (a1, a0) };
            let mut m = ((lo - PI) / (2.0 * PI)).ceil();
            while PI + 2.0 * PI * m <= hi {
                let level = PI + 2.0 * PI * m;
                if level > lo {
                    let f = (level - a0) / (a1 - a0);
                    out.push(self.t_samples[k - 1] + f * (self.t_samples[k] - self.t_samples[k - 1]));
                }
                m += 1.0;
            }
        }
        out
    }
}

/// Default time sampling: `ceil(40·ω·t/2π) + 16`.
pub fn default_n_steps(sys: SystemId, pt: PhasePoint, t: f64) -> usize {
    (40.0 * sys.omega(pt) * t.abs() / (2.0 * PI)).ceil() as usize + 16
}

fn q_final(sys: SystemId, q: f64, p: f64, t: f64) -> f64 {
    sys.flow_point(PhasePoint::new(q, p), t).q
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Merge runs of momenta whose consecutive gaps are below `delta` (single
/// linkage), keeping the member with the smallest residual. Survivors are at
/// least `delta` apart, so clustering twice changes nothing.
pub fn cluster_roots(mut candidates: Vec<(f64, f64)>, delta: f64) -> Vec<(f64, f64)> {
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(candidates.len());
    let mut prev = f64::NEG_INFINITY;
    for (p, r) in candidates {
        match out.last_mut() {
            Some(last) if p - prev < delta => {
                if r.abs() < last.1.abs() {
                    *last = (p, r);
                }
            }
            _ => out.push((p, r)),
        }
        prev = p;
    }
    out
}

/// Candidate momenta from a precomputed scan `qf[k] = q′(q, p_k, t)`.
pub(crate) fn roots_from_scan(
    sys: SystemId,
    q: f64,
    xprime: f64,
    t: f64,
    ps: &[f64],
    qf: &[f64],
    params: &RootSearchParams,
) -> Result<Vec<f64>> {
    let f = |p: f64| q_final(sys, q, p, t) - xprime;
    let mut candidates = Vec::new();
    let mut any_sign_change = false;
    for k in 0..ps.len() {
        let fk = qf[k] - xprime;
        if fk == 0.0 {
            candidates.push((ps[k], 0.0));
            continue;
        }
        if k + 1 < ps.len() {
            let fk1 = qf[k + 1] - xprime;
            if fk1 != 0.0 && (fk > 0.0) != (fk1 > 0.0) {
                any_sign_change = true;
                let p = bisect(f, ps[k], ps[k + 1], fk);
                candidates.push((p, f(p)));
                continue;
            }
        }
        // Hits without a bracketing sign change: local minima of |f| below eps.
        if fk.abs() < params.eps {
            let left = if k > 0 { (qf[k - 1] - xprime).abs() } else { f64::INFINITY };
            let right = if k + 1 < ps.len() { (qf[k + 1] - xprime).abs() } else { f64::INFINITY };
            let no_change_left = k == 0 || (qf[k - 1] - xprime > 0.0) == (fk > 0.0);
            let no_change_right = k + 1 == ps.len() || (qf[k + 1] - xprime > 0.0) == (fk > 0.0);
            if fk.abs() <= left && fk.abs() <= right && no_change_left && no_change_right {
                candidates.push((ps[k], fk));
            }
        }
    }
    if candidates.is_empty() && !any_sign_change {
        return Err(Error::EmptyWindow);
    }
    Ok(cluster_roots(candidates, params.delta)
        .into_iter()
        .filter(|(_, r)| r.abs() < params.eps)
        .map(|(p, _)| p)
        .collect())
}

pub(crate) fn record_for(sys: SystemId, q: f64, p: f64, t: f64, counting: Counting) -> Result<TrajectoryRecord> {
    let initial = PhasePoint::new(q, p);
    let fr = sys.flow(initial, t);
    let maslov = match counting {
        Counting::ClosedForm => maslov_closed_form(sys, initial, t),
        Counting::Sampled => maslov_index(sys, initial, t, default_n_steps(sys, initial, t))?,
    };
    Ok(TrajectoryRecord {
        initial,
        t,
        final_point: fr.point,
        action_pos: fr.action_pos,
        maslov,
        b_entry: fr.monodromy.b,
    })
}

/// All initial momenta `p` in the window with `q′(q, p, t) = x′`.
pub fn find_roots(sys: SystemId, q: f64, xprime: f64, t: f64, params: &RootSearchParams) -> Result<Vec<TrajectoryRecord>> {
    params.validate()?;
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("root search needs t > 0, got {t}")));
    }
    let ps = params.scan_momenta();
    let qf: Vec<f64> = ps.iter().map(|&p| q_final(sys, q, p, t)).collect();
    roots_from_scan(sys, q, xprime, t, &ps, &qf, params)?
        .into_iter()
        .map(|p| record_for(sys, q, p, t, params.counting))
        .collect()
}

/// Evaluates `b(τ_k)` for `τ_k = k·t/n`, `k = 0..=n`.
fn b_samples(sys: SystemId, pt: PhasePoint, t: f64, n: usize) -> Vec<f64> {
    let dt = t / n as f64;
    let mut stepper = PhaseStepper::new(sys.omega(pt), dt);
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for k in 1..=n {
        let (c, s) = stepper.advance();
        out.push(sys.monodromy_with_phase(pt, k as f64 * dt, c, s).b);
    }
    out
}

/// Times of the zeros of `b(τ)` on `(0, t]`.
///
/// Each of the `n_steps` steps is checked at `REFINE_SUBSTEPS` interior
/// points; a step holding more than one sign change is rejected, otherwise
/// the zero is refined by bisection. A zero landing on `t` itself counts.
pub fn caustic_times(sys: SystemId, pt: PhasePoint, t: f64, n_steps: usize) -> Result<Vec<f64>> {
    let n = n_steps.max(1);
    let b = b_samples(sys, pt, t, n);
    let floor = 1e-13 * (1.0 + 8.0 * pt.r2() * t.abs());
    if b.iter().all(|v| v.abs() <= floor) {
        // The fixed point: b vanishes identically and there is nothing to count.
        return Ok(Vec::new());
    }
    let dt = t / n as f64;
    let bf = |tau: f64| sys.b_entry(pt, tau);
    let mut zeros = Vec::new();
    // b(τ) > 0 just after τ = 0 for every orbit but the fixed point.
    let mut positive = true;
    for k in 1..=n {
        let lo = (k - 1) as f64 * dt;
        let sub = dt / REFINE_SUBSTEPS as f64;
        let mut changes = 0;
        let mut prev_tau = lo;
        for j in 1..=REFINE_SUBSTEPS {
            let (tau, v) = if j == REFINE_SUBSTEPS { (k as f64 * dt, b[k]) } else { (lo + j as f64 * sub, bf(lo + j as f64 * sub)) };
            if v.abs() <= floor {
                if k == n && j == REFINE_SUBSTEPS {
                    changes += 1;
                    zeros.push(t);
                }
                continue;
            }
            if (v > 0.0) != positive {
                changes += 1;
                let f_lo = if positive { 1.0 } else { -1.0 };
                zeros.push(bisect(bf, prev_tau, tau, f_lo));
                positive = v > 0.0;
            }
            prev_tau = tau;
        }
        if changes > 1 {
            return Err(Error::SamplingTooCoarse { tau: lo, zeros: changes });
        }
    }
    Ok(zeros)
}

/// Number of zeros of `b(τ) = ∂q′/∂p` on `(0, t]`, the zero at `τ = 0` excluded.
pub fn maslov_index(sys: SystemId, pt: PhasePoint, t: f64, n_steps: usize) -> Result<u32> {
    caustic_times(sys, pt, t, n_steps).map(|z| z.len() as u32)
}

/// Maslov count from the monotone caustic phase `Φ`: `⌊Φ(t)/π⌋`.
pub fn maslov_closed_form(sys: SystemId, pt: PhasePoint, t: f64) -> u32 {
    let phi = sys.caustic_phase(pt, t);
    (phi / PI + 1e-12).floor().max(0.0) as u32
}

/// Unwrapped `arg Λ(τ)` on `n_steps + 1` samples of `[0, t]`.
pub fn track_branch(sys: SystemId, pt: PhasePoint, t: f64, n_steps: usize) -> Result<BranchTrack> {
    let n = n_steps.max(1);
    let dt = t / n as f64;
    let mut stepper = PhaseStepper::new(sys.omega(pt), dt);
    let mut t_samples = Vec::with_capacity(n + 1);
    let mut lambda_args = Vec::with_capacity(n + 1);
    let mut lambda_abs = Vec::with_capacity(n + 1);
    t_samples.push(0.0);
    lambda_args.push(0.0);
    lambda_abs.push(1.0);
    let mut prev = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        let tau = if k == n { t } else { k as f64 * dt };
        let (c, s) = stepper.advance();
        let lam = complexify_monodromy(sys.monodromy_with_phase(pt, tau, c, s)).lambda;
        let step = (lam / prev).arg();
        if step.abs() > MAX_PHASE_STEP {
            return Err(Error::PhaseJumpTooLarge { tau, jump: step });
        }
        t_samples.push(tau);
        lambda_args.push(lambda_args[k - 1] + step);
        lambda_abs.push(lam.norm());
        prev = lam;
    }
    Ok(BranchTrack { t_samples, lambda_args, lambda_abs })
}

/// Continuous `√Λ(t)` of the trajectory through `pt`.
pub fn sqrt_lambda(sys: SystemId, pt: PhasePoint, t: f64, counting: Counting) -> Result<Complex64> {
    match counting {
        Counting::ClosedForm => Ok(Complex64::from_polar(
            sys.lambda(pt, t).norm().sqrt(),
            0.5 * sys.lambda_phase(pt, t),
        )),
        Counting::Sampled => Ok(track_branch(sys, pt, t, default_n_steps(sys, pt, t))?.sqrt_lambda()),
    }
}

/// Zeros of `b` in each interval between consecutive branch changes of `√Λ`
/// along the trajectory through `pt` up to time `t`.
pub fn kay_counts(sys: SystemId, pt: PhasePoint, t: f64, n_steps: usize) -> Result<Vec<usize>> {
    let changes = track_branch(sys, pt, t, n_steps)?.branch_changes();
    let zeros = caustic_times(sys, pt, t, n_steps)?;
    Ok(changes
        .windows(2)
        .map(|w| zeros.iter().filter(|&&z| z > w[0] && z <= w[1]).count())
        .collect())
}
