//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands, plus
//! Gauss–Legendre node generation for tensor-product window integrals.

use crate::{C64, Error};
use alloc::vec;
use alloc::vec::Vec;

// 15-point Kronrod abscissae (positive half) and weights; odd indices are
// the embedded 7-point Gauss nodes.
const XGK: [f64; 7] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One G7/K15 panel: returns (kronrod estimate, error estimate).
fn qk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK.iter().enumerate() {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        kron += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Adaptive integral of `f` over [a, b] to relative tolerance `rel_tol`
/// (with a 1e-14 absolute floor), splitting the worst panel first.
pub fn integrate<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<C64, Error> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration bounds must be finite"));
    }
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let (v, e) = qk15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let mut total = C64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            total += p.2;
            err += p.3;
            if p.3 > panels[worst].3 {
                worst = i;
            }
        }
        if err <= rel_tol * total.norm() + 1e-14 {
            return Ok(total);
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureNotConverged);
        }
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let m = 0.5 * (pa + pb);
        let (v1, e1) = qk15(&f, pa, m);
        let (v2, e2) = qk15(&f, m, pb);
        panels.push((pa, m, v1, e1));
        panels.push((m, pb, v2, e2));
    }
}

/// Adaptive integral over [a, b] with interior breakpoints (integrand kinks
/// or discontinuities); breakpoints outside (a, b) are ignored.
pub fn integrate_with_breaks<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel_tol: f64,
    max_panels: usize,
) -> Result<C64, Error> {
    let mut pts = vec![a];
    let mut interior: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    interior.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.extend(interior);
    pts.push(b);
    let mut total = C64::new(0.0, 0.0);
    for w in pts.windows(2) {
        total += integrate(&f, w[0], w[1], rel_tol, max_panels)?;
    }
    Ok(total)
}

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(z) and derivative via three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = z;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Float;

    #[test]
    fn polynomial_exact() {
        // K15 is exact for degree <= 22; x^6 over [0, 2].
        let v = integrate(|t| C64::new(t.powi(6), 0.0), 0.0, 2.0, 1e-12, 100).unwrap();
        assert!((v.re - 128.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex() {
        // ∫_0^1 e^{i 40 t} dt = (e^{i40} - 1) / (i 40)
        let v = integrate(|t| C64::new(0.0, 40.0 * t).exp(), 0.0, 1.0, 1e-11, 2000).unwrap();
        let exact = (C64::new(0.0, 40.0).exp() - 1.0) / C64::new(0.0, 40.0);
        assert!((v - exact).norm() < 1e-10);
    }

    #[test]
    fn breakpoint_handles_kink() {
        // |t| over [-1, 1] = 1, integrated exactly once the kink is a panel edge.
        let v = integrate_with_breaks(|t| C64::new(t.abs(), 0.0), -1.0, 1.0, &[0.0], 1e-12, 100)
            .unwrap();
        assert!((v.re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = integrate(|t| C64::new((1e6 * t).sin(), 0.0), 0.0, 1.0, 1e-12, 4);
        assert_eq!(r, Err(Error::QuadratureNotConverged));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        // degree-9 exactness: ∫_{-1}^{1} t^8 dt = 2/9
        let s: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_32_gaussian() {
        let (x, w) = gauss_legendre(32);
        // ∫_{-1}^{1} e^{-t^2} dt = sqrt(pi) erf(1)
        let s: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * (-xi * xi).exp()).sum();
        assert!((s - 1.493648265624854).abs() < 1e-13);
    }
}
