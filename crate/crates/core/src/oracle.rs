//! Brute-force validator: discretize time into bins, carry each photon's
//! (mode, bin) amplitude vector through the unitary directly, and obtain
//! component probabilities and conditioned shapes by explicit symmetrized
//! summation over unordered basis configurations.
//!
//! Shares no term algebra, Gram matrix, or permanent combinatorics with the
//! analytic engine; midpoint-rule discretization gives predictable
//! convergence for the cross-check.

use crate::interference::PhotonInput;
use crate::network::ModeUnitary;
use crate::{C64, Error};
use alloc::vec;
use alloc::vec::Vec;

/// Uniform time grid; amplitudes are sampled at bin centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub bins: usize,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, bins: usize) -> Result<Self, Error> {
        if !(t_min < t_max) || bins < 8 {
            return Err(Error::Domain("grid needs t_min < t_max and >= 8 bins"));
        }
        Ok(Self { t_min, t_max, bins })
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / self.bins as f64
    }

    pub fn center(&self, bin: usize) -> f64 {
        self.t_min + (bin as f64 + 0.5) * self.dt()
    }

    pub fn nearest_bin(&self, t: f64) -> usize {
        let raw = ((t - self.t_min) / self.dt() - 0.5).round();
        (raw.max(0.0) as usize).min(self.bins - 1)
    }

    /// True when the grid spans at least 8 decay lengths of the shape on
    /// each side where the shape has support.
    pub fn covers(&self, shape: &crate::shapes::WavepacketShape) -> bool {
        use crate::shapes::ShapeKind::*;
        let reach = 8.0 / shape.gamma;
        match shape.kind {
            ExpDecay => self.t_min <= shape.center && self.t_max >= shape.center + reach,
            ExpRise => self.t_max >= shape.center && self.t_min <= shape.center - reach,
            Gaussian => {
                self.t_min <= shape.center - reach && self.t_max >= shape.center + reach
            }
        }
    }
}

/// The discretized 3-photon output state, stored in factorized form: one
/// (mode × bin) amplitude vector per photon. The symmetrized tensor is never
/// materialized; exchange symmetry is built into the summation.
#[derive(Debug, Clone)]
pub struct AmplitudeTensor {
    modes: usize,
    grid: TimeGrid,
    /// photon_amps[p][m * bins + b] = S[m][mode_p] · f_p(t_b) · √Δt
    photon_amps: Vec<Vec<C64>>,
}

/// Discretize the inputs and push each photon through the unitary.
pub fn oracle_expand(
    inputs: &[PhotonInput],
    u: &ModeUnitary,
    grid: TimeGrid,
) -> Result<AmplitudeTensor, Error> {
    if inputs.len() != 3 {
        return Err(Error::SizeLimit);
    }
    let m = u.dim();
    if m * grid.bins > 1024 {
        return Err(Error::SizeLimit);
    }
    let sdt = grid.dt().sqrt();
    let mut photon_amps = Vec::with_capacity(inputs.len());
    for p in inputs {
        if p.mode >= m {
            return Err(Error::DimMismatch);
        }
        let mut v = vec![C64::new(0.0, 0.0); m * grid.bins];
        for mode in 0..m {
            let s = u.get(mode, p.mode);
            if s.norm_sqr() == 0.0 {
                continue;
            }
            for b in 0..grid.bins {
                v[mode * grid.bins + b] = s * p.shape.eval(grid.center(b)) * sdt;
            }
        }
        photon_amps.push(v);
    }
    Ok(AmplitudeTensor { modes: m, grid, photon_amps })
}

impl AmplitudeTensor {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// Symmetrized amplitude over the unordered configuration (x1, x2, x3):
    /// the permanent of the 3×3 photon-vs-position matrix.
    fn sym_amp(&self, x1: usize, x2: usize, x3: usize) -> C64 {
        let (u, v, w) = (&self.photon_amps[0], &self.photon_amps[1], &self.photon_amps[2]);
        u[x1] * (v[x2] * w[x3] + w[x2] * v[x3])
            + v[x1] * (u[x2] * w[x3] + w[x2] * u[x3])
            + w[x1] * (u[x2] * v[x3] + v[x2] * u[x3])
    }

    /// Probability of every photon-number occupation pattern, by direct
    /// summation over unordered (x1 ≤ x2 ≤ x3) basis configurations.
    pub fn component_probabilities(&self) -> Vec<(Vec<usize>, f64)> {
        let m = self.modes;
        let bins = self.grid.bins;
        let x_dim = m * bins;
        // occupation index table over ordered mode triples m1 <= m2 <= m3
        let mut patterns: Vec<Vec<usize>> = Vec::new();
        let mut index = vec![0usize; m * m * m];
        for m1 in 0..m {
            for m2 in m1..m {
                for m3 in m2..m {
                    let mut occ = vec![0usize; m];
                    occ[m1] += 1;
                    occ[m2] += 1;
                    occ[m3] += 1;
                    index[(m1 * m + m2) * m + m3] = patterns.len();
                    patterns.push(occ);
                }
            }
        }
        let mut probs = vec![0.0f64; patterns.len()];
        let (u, v, w) = (&self.photon_amps[0], &self.photon_amps[1], &self.photon_amps[2]);
        for x1 in 0..x_dim {
            if u[x1].norm_sqr() + v[x1].norm_sqr() + w[x1].norm_sqr() == 0.0 {
                continue;
            }
            let m1 = x1 / bins;
            for x2 in x1..x_dim {
                let a = u[x1] * v[x2] + v[x1] * u[x2];
                let b = u[x1] * w[x2] + w[x1] * u[x2];
                let c = v[x1] * w[x2] + w[x1] * v[x2];
                if a.norm_sqr() + b.norm_sqr() + c.norm_sqr() == 0.0 {
                    continue;
                }
                let m2 = x2 / bins;
                for x3 in x2..x_dim {
                    let s = a * w[x3] + b * v[x3] + c * u[x3];
                    if s.norm_sqr() == 0.0 {
                        continue;
                    }
                    let rep = if x1 == x3 {
                        6.0
                    } else if x1 == x2 || x2 == x3 {
                        2.0
                    } else {
                        1.0
                    };
                    let m3 = x3 / bins;
                    probs[index[(m1 * m + m2) * m + m3]] += s.norm_sqr() / rep;
                }
            }
        }
        patterns.into_iter().zip(probs).collect()
    }

    pub fn probability_of(&self, occupation: &[usize]) -> f64 {
        self.component_probabilities()
            .into_iter()
            .find(|(occ, _)| occ == occupation)
            .map(|(_, p)| p)
            .unwrap_or(0.0)
    }

    pub fn total_probability(&self) -> f64 {
        self.component_probabilities().iter().map(|(_, p)| p).sum()
    }

    /// Condition on two detections at (mode, nearest-bin time) and return the
    /// remaining photon's grid-normalized amplitude over all bins of
    /// `remaining_mode`.
    pub fn condition(
        &self,
        detections: &[(usize, f64)],
        remaining_mode: usize,
        ) -> Result<Vec<C64>, Error> {
        if detections.len() != 2 {
            return Err(Error::PatternMismatch("oracle conditions on exactly 2 detections"));
        }
        let bins = self.grid.bins;
        if remaining_mode >= self.modes || detections.iter().any(|&(m, _)| m >= self.modes) {
            return Err(Error::IndexError);
        }
        let xd1 = detections[0].0 * bins + self.grid.nearest_bin(detections[0].1);
        let xd2 = detections[1].0 * bins + self.grid.nearest_bin(detections[1].1);
        let mut psi = Vec::with_capacity(bins);
        let mut norm = 0.0;
        for b in 0..bins {
            let amp = self.sym_amp(xd1, xd2, remaining_mode * bins + b);
            norm += amp.norm_sqr();
            psi.push(amp);
        }
        if norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / norm.sqrt();
        for a in psi.iter_mut() {
            *a *= inv;
        }
        Ok(psi)
    }
}
