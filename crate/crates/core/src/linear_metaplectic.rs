//! Metaplectic kernels of linear symplectic maps in the position and
//! Segal–Bargmann representations.

use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::grid::{linspace, GridSpec};
use crate::phase_complex::{check_symplectic, complexify_monodromy, ComplexMonodromy, Monodromy2, TOL_SYMP};

/// Below this `|b|` the position representation is not evaluated.
pub const EPS_CAUSTIC: f64 = 1e-8;

const PI_M14: f64 = 0.751_125_544_464_942_5;

/// A time-parametrised family of symplectic matrices.
pub struct SymplecticPath {
    sampler: Box<dyn Fn(f64) -> Monodromy2 + Send + Sync>,
}

impl SymplecticPath {
    pub fn new(sampler: impl Fn(f64) -> Monodromy2 + Send + Sync + 'static) -> Self {
        Self { sampler: Box::new(sampler) }
    }

    /// Harmonic-oscillator path: rotation by angle `t`.
    pub fn sho() -> Self {
        Self::new(Monodromy2::rotation)
    }

    pub fn sample(&self, t: f64) -> Result<Monodromy2> {
        let m = (self.sampler)(t);
        if !check_symplectic(m, TOL_SYMP) {
            return Err(Error::InvalidInput(format!("path is not symplectic at t = {t}: det = {}", m.det())));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaplecticKernelSample {
    pub xprime: f64,
    pub x: f64,
    pub t: f64,
    pub value: Complex64,
}

fn guard_caustic(b: f64) -> Result<()> {
    if !(b.abs() > EPS_CAUSTIC) {
        return Err(Error::CausticSingular { b });
    }
    Ok(())
}

/// Generating function `S(q′, q)` of a free linear map, normalised so that
/// `∂S/∂q = −p` and `∂S/∂q′ = p′`.
pub fn position_generating_function(m: Monodromy2, qprime: f64, q: f64) -> Result<f64> {
    guard_caustic(m.b)?;
    Ok(0.5 * (qprime * qprime * m.d + q * q * m.a - 2.0 * qprime * q) / m.b)
}

/// Complex generating function `S_{W,ℂ}(ζ*, ζ′)`; `e^{iS}` is the exponential part of the S-B kernel.
pub fn complex_generating_function(cm: ComplexMonodromy, zeta_star: Complex64, zeta_prime: Complex64) -> Complex64 {
    let inv = 1.0 / cm.lambda;
    let quad = zeta_prime * zeta_prime * cm.gamma.conj() * inv - zeta_star * zeta_star * inv * cm.gamma
        + 2.0 * zeta_star * inv * zeta_prime;
    let i = Complex64::i();
    0.5 * i * (zeta_star.norm_sqr() + zeta_prime.norm_sqr()) - 0.5 * i * quad
}

/// `σ (2π)^{−1/2} |b|^{−1/2} exp{i S(x′, x) − iπμ/2}`.
pub fn metaplectic_kernel_position(m: Monodromy2, mu: i64, sigma: i8, xprime: f64, x: f64) -> Result<Complex64> {
    let s = position_generating_function(m, xprime, x)?;
    let amp = f64::from(sigma.signum()) / (2.0 * PI * m.b.abs()).sqrt();
    Ok(Complex64::from_polar(amp, s - 0.5 * PI * mu as f64))
}

/// S-B kernel `⟨ζ′|M̂|ζ*⟩` with `(det Λ)^{−1/2} = |Λ|^{−1/2} e^{−i·branch_phase/2}`.
pub fn metaplectic_kernel_sb(cm: ComplexMonodromy, branch_phase: f64, zeta_prime: Complex64, zeta_star: Complex64) -> Complex64 {
    let pref = Complex64::from_polar(cm.lambda.norm().powf(-0.5), -0.5 * branch_phase);
    pref * (Complex64::i() * complex_generating_function(cm, zeta_star, zeta_prime)).exp()
}

/// Exact harmonic-oscillator propagator (Mehler kernel) for `t > 0`, with the
/// phase continued through the caustics at `t = kπ`.
pub fn mehler_kernel(t: f64, xprime: f64, x: f64) -> Result<Complex64> {
    let (s, c) = t.sin_cos();
    guard_caustic(s)?;
    let mu = (t / PI).floor();
    let phase = ((xprime * xprime + x * x) * c - 2.0 * xprime * x) / (2.0 * s) - 0.25 * PI - 0.5 * PI * mu;
    Ok(Complex64::from_polar((2.0 * PI * s.abs()).powf(-0.5), phase))
}

/// Maximum deviation between the position kernel of `m` and the double
/// phase-space quadrature of two inverse S-B transforms of its S-B kernel.
///
/// Both labels `z` (ket) and `w` (bra) range over `grid`, read as `(q, p)`
/// with `z = (iq + p)/√2` and Lebesgue measure `d²z = dq dp / 2`; the
/// composition carries `π^{−2}`. The S-B kernel is evaluated at the conjugated
/// labels, with the principal square root of `Λ`. The quadrature then equals
/// `e^{−iπ/4}` times the position kernel, up to the leaf sign, which is fixed
/// by agreement at the origin. The deviation is taken over a 9×9 sample of
/// `(x′, x) ∈ [−½, ½]²`. Truncating the window costs accuracy first at large
/// `|x′ − x|`, so `grid` must extend well past the sampled square.
pub fn verify_sb_composition(m: Monodromy2, grid: GridSpec) -> Result<f64> {
    guard_caustic(m.b)?;
    let samples = linspace(-0.5, 0.5, 9);
    let k_sb = sb_composition(m, grid, &samples, &samples)?;
    let mu = if m.b > 0.0 { 0 } else { 1 };
    let global = Complex64::from_polar(1.0, -0.25 * PI);
    let mut target = Array2::<Complex64>::zeros((samples.len(), samples.len()));
    for (i, &xp) in samples.iter().enumerate() {
        for (j, &x) in samples.iter().enumerate() {
            target[[i, j]] = global * metaplectic_kernel_position(m, mu, 1, xp, x)?;
        }
    }
    let c = samples.len() / 2;
    let sigma = if (k_sb[[c, c]] - target[[c, c]]).norm() <= (k_sb[[c, c]] + target[[c, c]]).norm() {
        1.0
    } else {
        -1.0
    };
    Ok(k_sb
        .iter()
        .zip(target.iter())
        .fold(0.0, |acc, (a, b)| acc.max((a - sigma * b).norm())))
}

/// Quadrature of the S-B composition at `x′ ∈ xps`, `x ∈ xs` (rows along `x′`).
pub fn sb_composition(m: Monodromy2, grid: GridSpec, xps: &[f64], xs: &[f64]) -> Result<Array2<Complex64>> {
    let q_axis = grid.q_axis()?;
    let p_axis = grid.p_axis()?;
    let (nq, np) = (q_axis.len(), p_axis.len());
    let qs = q_axis.points();
    let ps = p_axis.points();
    // Reading the labels conjugated reflects q, so the kernel is that of R·M·R with R = diag(1, −1).
    let cm = complexify_monodromy(Monodromy2::new(m.a, -m.b, -m.c, m.d));
    let inv = 1.0 / cm.lambda;
    let alpha = cm.gamma.conj() * inv;
    let beta = inv * cm.gamma;
    let pref = 1.0 / cm.lambda.sqrt() / (PI * PI);

    // Label z = (iq + p)/√2; the kernel is evaluated at conj(z), conj(w).
    let label = |iq: usize, ip: usize| Complex64::new(ps[ip], qs[iq]) * FRAC_1_SQRT_2;
    let weight = |iq: usize, ip: usize| 0.5 * q_axis.weight(iq) * p_axis.weight(ip);
    let nz = nq * np;
    let zbar: Vec<Complex64> = (0..nz).map(|j| label(j / np, j % np).conj()).collect();

    // exp(λ w̄ z̄) = exp(λ p_w z̄/√2) · exp(−iλ q_w z̄/√2): contract q_w by gemm, p_w by a dot.
    // bra rows, stacked over x: B[(x, p_w), q_w].
    let mut bra = Array2::<Complex64>::zeros((xs.len() * np, nq));
    for (ix, &x) in xs.iter().enumerate() {
        for ip in 0..np {
            for iq in 0..nq {
                let w = label(iq, ip);
                let wb = w.conj();
                let bra_val = PI_M14
                    * (0.5 * (-x * x - Complex64::new(0.0, 2.0 * SQRT_2) * w * x + w * w - w.norm_sqr())).exp();
                let extra = (-0.5 * w.norm_sqr() - 0.5 * beta * wb * wb).exp();
                bra[[ix * np + ip, iq]] = bra_val * extra * weight(iq, ip);
            }
        }
    }
    let mut out = Array2::<Complex64>::zeros((xps.len(), xs.len()));
    let chunk = 2048;
    let mut start = 0;
    while start < nz {
        let end = (start + chunk).min(nz);
        let e_q = Array2::from_shape_fn((nq, end - start), |(iq, jj)| {
            (Complex64::new(0.0, -1.0) * inv * qs[iq] * FRAC_1_SQRT_2 * zbar[start + jj]).exp()
        });
        let t = bra.dot(&e_q);
        for jj in 0..end - start {
            let j = start + jj;
            let zb = zbar[j];
            let z = zb.conj();
            let wz = weight(j / np, j % np);
            let ket_extra = (-0.5 * z.norm_sqr() + 0.5 * alpha * zb * zb).exp() * wz;
            let kets: Vec<Complex64> = xps
                .iter()
                .map(|&xp| {
                    PI_M14 * (0.5 * (-xp * xp + Complex64::new(0.0, 2.0 * SQRT_2) * z * xp + z * z - z.norm_sqr())).exp()
                })
                .collect();
            let step = (inv * zb * FRAC_1_SQRT_2 * p_axis.spacing()).exp();
            let first = (inv * zb * FRAC_1_SQRT_2 * ps[0]).exp();
            for ix in 0..xs.len() {
                // Σ_p exp(λ p z̄/√2) T[(x, p), j], with the exponential built by recurrence.
                let mut f = first;
                let mut v = Complex64::new(0.0, 0.0);
                for ip in 0..np {
                    v += f * t[[ix * np + ip, jj]];
                    f *= step;
                }
                let v = v * ket_extra;
                for (ixp, ket) in kets.iter().enumerate() {
                    out[[ixp, ix]] += ket * v;
                }
            }
        }
        start = end;
    }
    out.mapv_inplace(|v| v * pref);
    Ok(out)
}
