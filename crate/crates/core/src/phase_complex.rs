//! Complexified phase-space coordinates and monodromy blocks.
//!
//! The complexification is ζ = (iq + p)/√2, ζ* = (−iq + p)/√2. With this
//! convention the position operator reads q = i(ζ* − ζ)/√2.

use num_complex::Complex64;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};

/// Absolute tolerance for `ζ* = conj(ζ)`.
pub const TOL_CONJ: f64 = 1e-9;
/// Absolute tolerance on `ad − bc = 1`.
pub const TOL_SYMP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }

    pub const ORIGIN: PhasePoint = PhasePoint { q: 0.0, p: 0.0 };

    /// Squared radius `q² + p²`.
    pub fn r2(&self) -> f64 {
        self.q * self.q + self.p * self.p
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPhasePoint {
    pub zeta: Complex64,
    pub zeta_star: Complex64,
}

/// Real 2×2 tangent map: `a = ∂q′/∂q`, `b = ∂q′/∂p`, `c = ∂p′/∂q`, `d = ∂p′/∂p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Monodromy2 {
    pub const IDENTITY: Monodromy2 = Monodromy2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Clockwise phase-space rotation generated by `(q² + p²)/2` over time `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { a: c, b: s, c: -s, d: c }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Monodromy2) -> Monodromy2 {
        Monodromy2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Inverse of a symplectic matrix (uses `det = 1`).
    pub fn symplectic_inverse(&self) -> Monodromy2 {
        Monodromy2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn apply(&self, pt: PhasePoint) -> PhasePoint {
        PhasePoint {
            q: self.a * pt.q + self.b * pt.p,
            p: self.c * pt.q + self.d * pt.p,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }
}

/// Complexified blocks `(Λ, Γ)` of a real symplectic map.
///
/// The full complex matrix acting on `(ζ, ζ*)` is `[[Λ, Γ], [Γ*, Λ*]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMonodromy {
    pub lambda: Complex64,
    pub gamma: Complex64,
}

impl ComplexMonodromy {
    pub const IDENTITY: ComplexMonodromy = ComplexMonodromy {
        lambda: Complex64::new(1.0, 0.0),
        gamma: Complex64::new(0.0, 0.0),
    };

    /// Product `self · rhs` of the full complex matrices.
    pub fn compose(&self, rhs: &ComplexMonodromy) -> ComplexMonodromy {
        ComplexMonodromy {
            lambda: self.lambda * rhs.lambda + self.gamma * rhs.gamma.conj(),
            gamma: self.lambda * rhs.gamma + self.gamma * rhs.lambda.conj(),
        }
    }

    /// `|Λ|² − |Γ|²`, equal to one for symplectic input.
    pub fn invariant(&self) -> f64 {
        self.lambda.norm_sqr() - self.gamma.norm_sqr()
    }
}

pub fn complexify(pt: PhasePoint) -> ComplexPhasePoint {
    ComplexPhasePoint {
        zeta: Complex64::new(pt.p, pt.q) / SQRT_2,
        zeta_star: Complex64::new(pt.p, -pt.q) / SQRT_2,
    }
}

pub fn decomplexify(cpt: ComplexPhasePoint) -> Result<PhasePoint> {
    let deviation = (cpt.zeta_star - cpt.zeta.conj()).norm();
    if !(deviation <= TOL_CONJ) {
        return Err(Error::ConjugacyViolation { deviation, tol: TOL_CONJ });
    }
    // q = i(ζ* − ζ)/√2, p = (ζ* + ζ)/√2; take the real parts.
    let q = ((cpt.zeta_star - cpt.zeta) * Complex64::i()).re / SQRT_2;
    let p = (cpt.zeta_star + cpt.zeta).re / SQRT_2;
    Ok(PhasePoint { q, p })
}

/// `Λ = ½[(d+a) + i(c−b)]`, `Γ = ½[(d−a) − i(c+b)]`.
pub fn complexify_monodromy(m: Monodromy2) -> ComplexMonodromy {
    ComplexMonodromy {
        lambda: Complex64::new(0.5 * (m.d + m.a), 0.5 * (m.c - m.b)),
        gamma: Complex64::new(0.5 * (m.d - m.a), -0.5 * (m.c + m.b)),
    }
}

pub fn check_symplectic(m: Monodromy2, tol: f64) -> bool {
    (m.det() - 1.0).abs() <= tol
}
