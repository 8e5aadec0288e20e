//! Linear-optical mode unitaries: the four-mode metasurface beam splitter,
//! the auxiliary 50/50 splitter, and embedding/composition plumbing.

use crate::{C64, Error};
use alloc::vec;
use alloc::vec::Vec;

/// An M×M complex unitary acting on optical modes, row-major:
/// `b_m = Σ_n S[m][n] a_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    dim: usize,
    data: Vec<C64>,
}

impl ModeUnitary {
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self, Error> {
        let dim = rows.len();
        if !(2..=8).contains(&dim) || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimMismatch);
        }
        Ok(Self { dim, data: rows.into_iter().flatten().collect() })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.data[m * self.dim + n]
    }

    pub fn adjoint(&self) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); self.dim * self.dim];
        for m in 0..self.dim {
            for n in 0..self.dim {
                data[n * self.dim + m] = self.get(m, n).conj();
            }
        }
        Self { dim: self.dim, data }
    }

    /// Largest entrywise deviation of S·S† from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for m in 0..self.dim {
            for n in 0..self.dim {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..self.dim {
                    s += self.get(m, k) * self.get(n, k).conj();
                }
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

/// The four-mode metasurface matrix parameterized by the co-polarization
/// conversion coefficient s_t, with s_r = √(1 − s_t²).
pub fn metasurface_unitary(s_t: f64) -> Result<ModeUnitary, Error> {
    if !(0.0..=1.0).contains(&s_t) || !s_t.is_finite() {
        return Err(Error::Domain("s_t must lie in [0, 1]"));
    }
    let s_r = (1.0 - s_t * s_t).sqrt();
    let r2 = core::f64::consts::FRAC_1_SQRT_2;
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let z = C64::new(0.0, 0.0);
    ModeUnitary::from_rows(vec![
        vec![re(s_t), im(s_r * r2), re(-s_r * r2), z],
        vec![im(s_r), re(s_t * r2), im(s_t * r2), z],
        vec![z, re(s_t * r2), im(-s_t * r2), im(s_r)],
        vec![z, im(s_r * r2), re(s_r * r2), re(s_t)],
    ])
}

/// Symmetric 50/50 beam splitter, (1/√2)·[[1, i], [i, 1]].
pub fn balanced_splitter() -> ModeUnitary {
    let r2 = core::f64::consts::FRAC_1_SQRT_2;
    ModeUnitary::from_rows(vec![
        vec![C64::new(r2, 0.0), C64::new(0.0, r2)],
        vec![C64::new(0.0, r2), C64::new(r2, 0.0)],
    ])
    .unwrap()
}

/// Embed `u` into a `total_dim`-mode identity, acting on `target_modes`.
pub fn embed(u: &ModeUnitary, target_modes: &[usize], total_dim: usize) -> Result<ModeUnitary, Error> {
    if target_modes.len() != u.dim() || total_dim > 8 {
        return Err(Error::DimMismatch);
    }
    for (i, &m) in target_modes.iter().enumerate() {
        if m >= total_dim || target_modes[..i].contains(&m) {
            return Err(Error::IndexError);
        }
    }
    let mut out = ModeUnitary::identity(total_dim);
    for (i, &mi) in target_modes.iter().enumerate() {
        for (j, &mj) in target_modes.iter().enumerate() {
            out.data[mi * total_dim + mj] = u.get(i, j);
        }
    }
    Ok(out)
}

/// Matrix product `second · first` (apply `first`, then `second`).
pub fn compose(second: &ModeUnitary, first: &ModeUnitary) -> Result<ModeUnitary, Error> {
    if second.dim != first.dim {
        return Err(Error::DimMismatch);
    }
    let d = second.dim;
    let mut data = vec![C64::new(0.0, 0.0); d * d];
    for m in 0..d {
        for n in 0..d {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..d {
                s += second.get(m, k) * first.get(k, n);
            }
            data[m * d + n] = s;
        }
    }
    Ok(ModeUnitary { dim: d, data })
}
