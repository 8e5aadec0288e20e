//! Single-photon temporal amplitude families (exponentially decaying,
//! exponentially rising, Gaussian), their pairwise overlap integrals in
//! closed form, and the Gram matrix those overlaps assemble into.
//!
//! All times are in units of 1/Γ₀ and frequencies in units of Γ₀; every
//! shape is L2-normalized, ∫|f(τ)|² dτ = 1.

use crate::faddeeva::wofz;
use crate::quadrature;
use crate::{C64, Error};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    ExpDecay,
    ExpRise,
    Gaussian,
}

/// A normalized complex temporal amplitude f(τ).
///
/// `center` is the peak position for `Gaussian`, the cutoff for `ExpRise`
/// and the onset for `ExpDecay`; `detuning` is the carrier offset ω − ω₀.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WavepacketShape {
    pub kind: ShapeKind,
    pub gamma: f64,
    pub center: f64,
    pub detuning: f64,
}

impl WavepacketShape {
    pub fn new(kind: ShapeKind, gamma: f64, center: f64, detuning: f64) -> Result<Self, Error> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Domain("gamma must be positive and finite"));
        }
        if !center.is_finite() || !detuning.is_finite() {
            return Err(Error::Domain("center/detuning must be finite"));
        }
        Ok(Self { kind, gamma, center, detuning })
    }

    /// Exponentially decaying shape with the given onset. Panics on invalid gamma.
    pub fn exp_decay(gamma: f64, onset: f64, detuning: f64) -> Self {
        Self::new(ShapeKind::ExpDecay, gamma, onset, detuning).unwrap()
    }

    /// Exponentially rising shape cut off at `cutoff`. Panics on invalid gamma.
    pub fn exp_rise(gamma: f64, cutoff: f64, detuning: f64) -> Self {
        Self::new(ShapeKind::ExpRise, gamma, cutoff, detuning).unwrap()
    }

    /// Gaussian shape peaked at `center`. Panics on invalid gamma.
    pub fn gaussian(gamma: f64, center: f64, detuning: f64) -> Self {
        Self::new(ShapeKind::Gaussian, gamma, center, detuning).unwrap()
    }

    /// Amplitude f(τ).
    pub fn eval(&self, tau: f64) -> C64 {
        let g = self.gamma;
        let w = self.detuning;
        match self.kind {
            ShapeKind::ExpDecay => {
                let dt = tau - self.center;
                if dt < 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    g.sqrt() * C64::new(-0.5 * g * dt, -w * dt).exp()
                }
            }
            ShapeKind::ExpRise => {
                let dt = tau - self.center;
                if dt > 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    g.sqrt() * C64::new(0.5 * g * dt, -w * tau).exp()
                }
            }
            ShapeKind::Gaussian => {
                let dt = tau - self.center;
                (g / PI.sqrt()).sqrt() * C64::new(-0.5 * g * g * dt * dt, -w * tau).exp()
            }
        }
    }

    /// The same shape translated by `delta` in time (carrier phase origin moves with it
    /// for `ExpDecay`, whose phase is referenced to the onset).
    pub fn shifted(&self, delta: f64) -> Self {
        Self { center: self.center + delta, ..*self }
    }

    /// Interval outside which |f| is negligible (< ~1e-13 of peak).
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            ShapeKind::ExpDecay => (self.center, self.center + 64.0 / self.gamma),
            ShapeKind::ExpRise => (self.center - 64.0 / self.gamma, self.center),
            ShapeKind::Gaussian => (self.center - 8.5 / self.gamma, self.center + 8.5 / self.gamma),
        }
    }

    /// Points where the amplitude is non-smooth (step edges).
    fn breakpoints(&self) -> Option<f64> {
        match self.kind {
            ShapeKind::ExpDecay | ShapeKind::ExpRise => Some(self.center),
            ShapeKind::Gaussian => None,
        }
    }
}

/// (e^x - 1) / x with a series fallback near zero.
fn expm1_over(x: C64) -> C64 {
    if x.norm() < 1e-6 {
        1.0 + x * 0.5 + x * x * (1.0 / 6.0)
    } else {
        (x.exp() - 1.0) / x
    }
}

/// ∫_{x0}^{∞} e^{-a t² + b t + c0} dt for real a > 0 and complex b, c0,
/// in an overflow-safe form built on the Faddeeva function.
fn half_gauss_int_upper(a: f64, b: C64, c0: C64, x0: f64) -> C64 {
    let sa = a.sqrt();
    let q = sa * x0 - b / (2.0 * sa);
    let big = b * b / (4.0 * a) + c0;
    let scale = (PI / a).sqrt();
    if q.re >= 0.0 {
        0.5 * scale * (big - q * q).exp() * wofz(C64::new(-q.im, q.re))
    } else {
        scale * big.exp() - 0.5 * scale * (big - q * q).exp() * wofz(C64::new(q.im, -q.re))
    }
}

/// Closed-form overlap ⟨f|g⟩ = ∫ f*(τ) g(τ) dτ.
pub fn overlap(f: &WavepacketShape, g: &WavepacketShape) -> C64 {
    use ShapeKind::*;
    let (g1, c1, w1) = (f.gamma, f.center, f.detuning);
    let (g2, c2, w2) = (g.gamma, g.center, g.detuning);
    match (f.kind, g.kind) {
        (ExpDecay, ExpDecay) => {
            // support [max(c1,c2), ∞)
            let a = c1.max(c2);
            let s = C64::new(0.5 * (g1 + g2), w2 - w1);
            let pre = (g1 * g2).sqrt()
                * C64::new(-0.5 * g1 * (a - c1), w1 * (a - c1)).exp()
                * C64::new(-0.5 * g2 * (a - c2), -w2 * (a - c2)).exp();
            pre / s
        }
        (ExpRise, ExpRise) => {
            // support (-∞, min(c1,c2)]
            let a = c1.min(c2);
            let s = C64::new(0.5 * (g1 + g2), w1 - w2);
            (g1 * g2).sqrt() / s
                * C64::new(0.5 * g1 * (a - c1) + 0.5 * g2 * (a - c2), (w1 - w2) * a).exp()
        }
        (ExpDecay, ExpRise) => {
            // support [c1, c2]
            if c1 >= c2 {
                return C64::new(0.0, 0.0);
            }
            let alpha = C64::new(0.5 * (g2 - g1), w1 - w2);
            // conj(f)·g at t = c1: e^{Γ2(c1-c2)/2} e^{-i w2 c1}
            let head = C64::new(0.5 * g2 * (c1 - c2), -w2 * c1).exp();
            (g1 * g2).sqrt() * head * (c2 - c1) * expm1_over(alpha * (c2 - c1))
        }
        (ExpRise, ExpDecay) => overlap(g, f).conj(),
        (Gaussian, Gaussian) => {
            let a = 0.5 * (g1 * g1 + g2 * g2);
            let b = C64::new(g1 * g1 * c1 + g2 * g2 * c2, w1 - w2);
            let c0 = -0.5 * (g1 * g1 * c1 * c1 + g2 * g2 * c2 * c2);
            (g1 * g2 / PI).sqrt() * (PI / a).sqrt() * (b * b / (4.0 * a) + c0).exp()
        }
        (Gaussian, ExpDecay) => {
            let a = 0.5 * g1 * g1;
            let b = C64::new(g1 * g1 * c1 - 0.5 * g2, w1 - w2);
            let c0 = C64::new(-0.5 * g1 * g1 * c1 * c1 + 0.5 * g2 * c2, w2 * c2);
            (g1 / PI.sqrt()).sqrt() * g2.sqrt() * half_gauss_int_upper(a, b, c0, c2)
        }
        (ExpDecay, Gaussian) => overlap(g, f).conj(),
        (Gaussian, ExpRise) => {
            // integrate over (-∞, c2] by reflecting t -> -t
            let a = 0.5 * g1 * g1;
            let b = C64::new(g1 * g1 * c1 + 0.5 * g2, w1 - w2);
            let c0 = C64::new(-0.5 * g1 * g1 * c1 * c1 - 0.5 * g2 * c2, 0.0);
            (g1 / PI.sqrt()).sqrt() * g2.sqrt() * half_gauss_int_upper(a, -b, c0, -c2)
        }
        (ExpRise, Gaussian) => overlap(g, f).conj(),
    }
}

/// Overlap by adaptive quadrature; the independent cross-check for the
/// closed forms above.
pub fn overlap_quadrature(
    f: &WavepacketShape,
    g: &WavepacketShape,
    rel_tol: f64,
) -> Result<C64, Error> {
    let (lf, hf) = f.support();
    let (lg, hg) = g.support();
    let lo = lf.max(lg);
    let hi = hf.min(hg);
    if lo >= hi {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut breaks = Vec::new();
    if let Some(b) = f.breakpoints() {
        breaks.push(b);
    }
    if let Some(b) = g.breakpoints() {
        breaks.push(b);
    }
    quadrature::integrate_with_breaks(
        |t| f.eval(t).conj() * g.eval(t),
        lo,
        hi,
        &breaks,
        rel_tol,
        4096,
    )
}

/// Hermitian matrix of pairwise overlaps G[m][n] = ⟨f_m|f_n⟩.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GramMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.data[m * self.dim + n]
    }

    /// ξ†Gξ (real part; the imaginary part vanishes for Hermitian G).
    pub fn quadratic_form(&self, xi: &[C64]) -> f64 {
        assert_eq!(xi.len(), self.dim);
        let mut s = C64::new(0.0, 0.0);
        for m in 0..self.dim {
            for n in 0..self.dim {
                s += xi[m].conj() * self.get(m, n) * xi[n];
            }
        }
        s.re
    }

    /// Largest deviation of the diagonal from 1.
    pub fn diagonal_error(&self) -> f64 {
        (0..self.dim)
            .map(|m| (self.get(m, m) - 1.0).norm())
            .fold(0.0, f64::max)
    }

    /// All principal minors nonnegative (within `tol`) — positive
    /// semidefiniteness for the small matrices used here.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.dim;
        for mask in 1u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            if self.minor(&idx).re < -tol {
                return false;
            }
        }
        true
    }

    fn minor(&self, idx: &[usize]) -> C64 {
        // Laplace expansion; idx.len() <= 4 in practice.
        match idx.len() {
            0 => C64::new(1.0, 0.0),
            1 => self.get(idx[0], idx[0]),
            _ => {
                let mut det = C64::new(0.0, 0.0);
                for (k, &col) in idx.iter().enumerate() {
                    let mut rest: Vec<usize> = idx.to_vec();
                    rest.remove(k);
                    let sub = self.minor_rect(&idx[1..], &rest);
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    det += sign * self.get(idx[0], col) * sub;
                }
                det
            }
        }
    }

    fn minor_rect(&self, rows: &[usize], cols: &[usize]) -> C64 {
        match rows.len() {
            0 => C64::new(1.0, 0.0),
            1 => self.get(rows[0], cols[0]),
            _ => {
                let mut det = C64::new(0.0, 0.0);
                for (k, &col) in cols.iter().enumerate() {
                    let mut rest: Vec<usize> = cols.to_vec();
                    rest.remove(k);
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    det += sign * self.get(rows[0], col) * self.minor_rect(&rows[1..], &rest);
                }
                det
            }
        }
    }
}

/// Gram matrix of a shape list, from the closed-form overlaps. Hermiticity
/// is enforced by construction (upper triangle computed, mirrored).
pub fn gram(shapes: &[WavepacketShape]) -> GramMatrix {
    let n = shapes.len();
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for m in 0..n {
        for k in m..n {
            let v = overlap(&shapes[m], &shapes[k]);
            data[m * n + k] = v;
            data[k * n + m] = v.conj();
        }
    }
    GramMatrix { dim: n, data }
}

/// A coherent superposition Σₙ ξₙ fₙ(τ) over a shape basis.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ShapeSuperposition {
    pub basis: Vec<WavepacketShape>,
    pub coeffs: Vec<C64>,
}

impl ShapeSuperposition {
    pub fn new(basis: Vec<WavepacketShape>, coeffs: Vec<C64>) -> Result<Self, Error> {
        if basis.len() != coeffs.len() {
            return Err(Error::DimMismatch);
        }
        Ok(Self { basis, coeffs })
    }

    pub fn eval(&self, tau: f64) -> C64 {
        self.basis
            .iter()
            .zip(&self.coeffs)
            .map(|(f, &c)| c * f.eval(tau))
            .sum()
    }

    pub fn norm_sq(&self, g: &GramMatrix) -> f64 {
        g.quadratic_form(&self.coeffs)
    }
}

/// Rescale a superposition to ξ†Gξ = 1, preserving direction.
pub fn normalize_superposition(
    s: &ShapeSuperposition,
    g: &GramMatrix,
) -> Result<ShapeSuperposition, Error> {
    let n2 = s.norm_sq(g);
    if n2 <= 1e-14 {
        return Err(Error::ZeroNorm);
    }
    let inv = 1.0 / n2.sqrt();
    Ok(ShapeSuperposition {
        basis: s.basis.clone(),
        coeffs: s.coeffs.iter().map(|&c| c * inv).collect(),
    })
}
