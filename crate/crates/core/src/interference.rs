//! Bosonic expansion of an N-photon product input through a mode unitary
//! into photon-number output components, each carrying a symbolic term list
//! (coefficient × assignment of input photons to output slots).
//!
//! Every output probability and conditioned shape downstream reduces to
//! bilinear sums over these terms against the input Gram matrix.

use crate::network::ModeUnitary;
use crate::shapes::{GramMatrix, WavepacketShape};
use crate::{C64, Error};
use alloc::vec::Vec;

/// One photon entering the network: which input mode, and its shape.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhotonInput {
    pub mode: usize,
    pub shape: WavepacketShape,
}

/// One summand of a component wavefunction: `coeff · ∏_s f_{slot_shapes[s]}`,
/// where slot s is the s-th output photon slot (slots ordered by mode, then
/// within-mode index) and `slot_shapes[s]` indexes the input photon list.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub slot_shapes: Vec<usize>,
}

/// One photon-number pattern |m₁,…,m_M⟩ of the output state.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputComponent {
    /// Photon count per output mode; sums to N.
    pub occupation: Vec<usize>,
    /// Mode index of each slot (occupation expanded, ascending).
    pub slot_modes: Vec<usize>,
    pub terms: Vec<Term>,
    /// Filled by [`fill_probabilities`]; NaN until then.
    pub probability: f64,
}

/// All occupation vectors over `modes` modes summing to `n`, in
/// lexicographic order.
fn occupations(modes: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(modes: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if modes == 1 {
            let mut v = prefix.clone();
            v.push(left);
            out.push(v);
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(modes - 1, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(modes, n, &mut Vec::new(), &mut out);
    out
}

/// All permutations of 0..n (n ≤ 4), deterministic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(avail: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if avail.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..avail.len() {
            let x = avail.remove(i);
            prefix.push(x);
            rec(avail, prefix, out);
            prefix.pop();
            avail.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

const FACTORIALS: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];

/// Expand the product input state through `u` into all C(N+M−1, N) output
/// components. Terms with exactly zero coefficient are dropped.
pub fn expand_output(
    inputs: &[PhotonInput],
    u: &ModeUnitary,
) -> Result<Vec<OutputComponent>, Error> {
    let n = inputs.len();
    if !(1..=4).contains(&n) {
        return Err(Error::Domain("photon count must be 1..=4"));
    }
    let m = u.dim();
    for (i, p) in inputs.iter().enumerate() {
        if p.mode >= m {
            return Err(Error::DimMismatch);
        }
        if inputs[..i].iter().any(|q| q.mode == p.mode) {
            return Err(Error::DuplicateInputMode);
        }
    }
    let perms = permutations(n);
    let mut comps = Vec::new();
    for occ in occupations(m, n) {
        let slot_modes: Vec<usize> = occ
            .iter()
            .enumerate()
            .flat_map(|(k, &cnt)| core::iter::repeat_n(k, cnt))
            .collect();
        let w = 1.0 / occ.iter().map(|&c| FACTORIALS[c]).product::<f64>().sqrt();
        let mut terms = Vec::new();
        for perm in &perms {
            let mut coeff = C64::new(w, 0.0);
            for (s, &p) in perm.iter().enumerate() {
                coeff *= u.get(slot_modes[s], inputs[p].mode);
            }
            if coeff.norm_sqr() > 0.0 {
                terms.push(Term { coeff, slot_shapes: perm.clone() });
            }
        }
        comps.push(OutputComponent {
            occupation: occ,
            slot_modes,
            terms,
            probability: f64::NAN,
        });
    }
    Ok(comps)
}

/// P_j = Σ_{a,b} coeff_a* coeff_b ∏_s G[a_s][b_s].
pub fn component_probability(c: &OutputComponent, g: &GramMatrix) -> Result<f64, Error> {
    let nslots = c.slot_modes.len();
    let mut p = C64::new(0.0, 0.0);
    for a in &c.terms {
        if a.slot_shapes.iter().any(|&i| i >= g.dim()) {
            return Err(Error::InconsistentInputs);
        }
        for b in &c.terms {
            let mut v = a.coeff.conj() * b.coeff;
            for s in 0..nslots {
                v *= g.get(a.slot_shapes[s], b.slot_shapes[s]);
            }
            p += v;
        }
    }
    Ok(p.re)
}

/// Fill every component's `probability` field.
pub fn fill_probabilities(comps: &mut [OutputComponent], g: &GramMatrix) -> Result<(), Error> {
    for c in comps.iter_mut() {
        c.probability = component_probability(c, g)?;
    }
    Ok(())
}

/// Sum of filled component probabilities (should be 1 by unitarity).
pub fn total_probability(comps: &[OutputComponent]) -> f64 {
    comps.iter().map(|c| c.probability).sum()
}

/// Locate the component with the given occupation pattern.
pub fn find_component<'a>(
    comps: &'a [OutputComponent],
    occupation: &[usize],
) -> Option<&'a OutputComponent> {
    comps.iter().find(|c| c.occupation == occupation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{balanced_splitter, metasurface_unitary, ModeUnitary};
    use crate::shapes::{gram, WavepacketShape};
    use approx::assert_abs_diff_eq;

    fn fig2_inputs() -> Vec<PhotonInput> {
        vec![
            PhotonInput { mode: 0, shape: WavepacketShape::exp_decay(1.42, 0.0, 0.0) },
            PhotonInput { mode: 1, shape: WavepacketShape::exp_decay(1.27, 0.0, -1.19) },
            PhotonInput { mode: 2, shape: WavepacketShape::exp_decay(1.27, 0.0, 1.19) },
        ]
    }

    #[test]
    fn three_photons_four_modes_gives_20_components() {
        let u = metasurface_unitary(0.801).unwrap();
        let comps = expand_output(&fig2_inputs(), &u).unwrap();
        assert_eq!(comps.len(), 20);
    }

    #[test]
    fn identity_network_is_transparent() {
        let inputs = fig2_inputs();
        let comps = expand_output(&inputs, &ModeUnitary::identity(4)).unwrap();
        for c in &comps {
            if c.occupation == [1, 1, 1, 0] {
                assert_eq!(c.terms.len(), 1);
                assert_abs_diff_eq!(c.terms[0].coeff.re, 1.0, epsilon = 1e-15);
            } else {
                assert!(c.terms.is_empty());
            }
        }
    }

    #[test]
    fn hong_ou_mandel_cancellation() {
        let shape = WavepacketShape::gaussian(1.0, 0.0, 0.0);
        let inputs = vec![
            PhotonInput { mode: 0, shape },
            PhotonInput { mode: 1, shape },
        ];
        let comps = expand_output(&inputs, &balanced_splitter()).unwrap();
        let g = gram(&[shape, shape]);
        let c11 = find_component(&comps, &[1, 1]).unwrap();
        assert!(component_probability(c11, &g).unwrap().abs() < 1e-15);
    }

    #[test]
    fn fig2_selected_probability_and_total() {
        let inputs = fig2_inputs();
        let shapes: Vec<_> = inputs.iter().map(|p| p.shape).collect();
        let g = gram(&shapes);
        let u = metasurface_unitary(0.801).unwrap();
        let mut comps = expand_output(&inputs, &u).unwrap();
        fill_probabilities(&mut comps, &g).unwrap();
        let p = find_component(&comps, &[1, 1, 1, 0]).unwrap().probability;
        assert_abs_diff_eq!(p, 0.0886, epsilon = 2e-3);
        assert_abs_diff_eq!(total_probability(&comps), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn duplicate_input_mode_rejected() {
        let shape = WavepacketShape::gaussian(1.0, 0.0, 0.0);
        let inputs = vec![
            PhotonInput { mode: 1, shape },
            PhotonInput { mode: 1, shape },
        ];
        assert_eq!(
            expand_output(&inputs, &metasurface_unitary(0.5).unwrap()),
            Err(Error::DuplicateInputMode)
        );
    }
}
