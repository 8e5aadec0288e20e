//! Conditioning a selected output component on time-resolved detection
//! events: the remaining photon's shape, joint detection densities, the
//! auxiliary-splitter variant, and finite-detector-resolution smearing.

use crate::interference::{component_probability, OutputComponent, PhotonInput, Term};
use crate::network::balanced_splitter;
use crate::quadrature::gauss_legendre;
use crate::shapes::{normalize_superposition, overlap, GramMatrix, ShapeSuperposition, WavepacketShape};
use crate::{C64, Error};
use alloc::vec;
use alloc::vec::Vec;

/// A detection at output mode `mode` at time `time` (units 1/Γ₀).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DetectionEvent {
    pub mode: usize,
    pub time: f64,
}

/// N−1 detections plus the undetected photon's mode. `vacuum_modes` lists
/// modes required to hold zero photons (a consistency check only: component
/// selection already enforces it).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DetectionPattern {
    pub events: Vec<DetectionEvent>,
    pub remaining_mode: usize,
    #[serde(default)]
    pub vacuum_modes: Vec<usize>,
}

/// The conditioned outcome: coefficients ξₙ of the remaining photon over the
/// input-shape basis (normalized), the joint detection density at the given
/// times, and the selection probability of the component.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ShapingResult {
    pub xi: Vec<C64>,
    pub output_shape: ShapeSuperposition,
    pub joint_density: f64,
    pub selection_probability: f64,
}

/// Match detection events to slots and find the remaining slot.
/// Events within a multiply-occupied mode are assigned in listed order to
/// that mode's slots; terms already sum over photon permutations, so the
/// assignment order is immaterial.
fn assign_slots(
    c: &OutputComponent,
    pattern: &DetectionPattern,
) -> Result<(Vec<(usize, f64)>, usize), Error> {
    let m = c.occupation.len();
    if pattern.remaining_mode >= m || pattern.events.iter().any(|e| e.mode >= m) {
        return Err(Error::IndexError);
    }
    for &v in &pattern.vacuum_modes {
        if v >= m || c.occupation[v] != 0 {
            return Err(Error::PatternMismatch("vacuum mode is occupied"));
        }
    }
    if c.occupation[pattern.remaining_mode] == 0 {
        return Err(Error::PatternMismatch("remaining mode is unoccupied"));
    }
    if pattern.events.len() + 1 != c.slot_modes.len() {
        return Err(Error::PatternMismatch("event count must be N-1"));
    }
    let mut unmatched: Vec<&DetectionEvent> = pattern.events.iter().collect();
    let mut detected = Vec::with_capacity(unmatched.len());
    let mut rem_slot = None;
    for (si, &mode) in c.slot_modes.iter().enumerate() {
        if mode == pattern.remaining_mode && rem_slot.is_none() {
            rem_slot = Some(si);
            continue;
        }
        match unmatched.iter().position(|e| e.mode == mode) {
            Some(k) => {
                detected.push((si, unmatched.remove(k).time));
            }
            None => return Err(Error::PatternMismatch("no event for an occupied slot")),
        }
    }
    if !unmatched.is_empty() {
        return Err(Error::PatternMismatch("event in an unoccupied mode"));
    }
    Ok((detected, rem_slot.unwrap()))
}

/// Unnormalized conditioning: ξ̃ₙ and the joint density ξ̃†Gξ̃ at the
/// pattern's detection times.
fn condition_raw(
    c: &OutputComponent,
    detected: &[(usize, f64)],
    rem_slot: usize,
    inputs: &[PhotonInput],
    g: &GramMatrix,
) -> (Vec<C64>, f64) {
    let mut xi = vec![C64::new(0.0, 0.0); inputs.len()];
    for t in &c.terms {
        let mut v = t.coeff;
        for &(si, time) in detected {
            v *= inputs[t.slot_shapes[si]].shape.eval(time);
        }
        xi[t.slot_shapes[rem_slot]] += v;
    }
    let dens = g.quadratic_form(&xi);
    (xi, dens)
}

/// Condition `c` on the pattern's detection events (Eq.-(6)-style): the
/// remaining photon is a coherent superposition of the input shapes.
///
/// The remaining mode must hold exactly one photon; doubly occupied modes go
/// through [`split_and_condition`].
pub fn condition(
    c: &OutputComponent,
    pattern: &DetectionPattern,
    inputs: &[PhotonInput],
    g: &GramMatrix,
) -> Result<ShapingResult, Error> {
    if c.occupation[pattern.remaining_mode] > 1 {
        return Err(Error::PatternMismatch(
            "remaining mode multiply occupied; split it first",
        ));
    }
    let (detected, rem_slot) = assign_slots(c, pattern)?;
    let (xi, dens) = condition_raw(c, &detected, rem_slot, inputs, g);
    if dens <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let shapes: Vec<WavepacketShape> = inputs.iter().map(|p| p.shape).collect();
    // dens = ξ̃†Gξ̃, so dividing by √dens is exactly the Gram normalization
    let output_shape = normalize_superposition(&ShapeSuperposition::new(shapes, xi)?, g)?;
    let p_sel = component_probability(c, g)?;
    Ok(ShapingResult {
        xi: output_shape.coeffs.clone(),
        output_shape,
        joint_density: dens,
        selection_probability: p_sel,
    })
}

/// Rewrite a component with a doubly occupied `splitter_mode` through a
/// balanced splitter: the two photons are routed to the original mode
/// (ê₁) and a new mode appended at index M (ê₂), one photon each.
///
/// Each original term splits into the two photon-to-output orderings.
pub fn split_component(c: &OutputComponent, splitter_mode: usize) -> Result<OutputComponent, Error> {
    let m = c.occupation.len();
    if splitter_mode >= m {
        return Err(Error::IndexError);
    }
    if c.occupation[splitter_mode] != 2 {
        return Err(Error::PatternMismatch("splitter mode must hold exactly 2 photons"));
    }
    let bs = balanced_splitter();
    let straight = bs.get(0, 0); // 1/√2
    let cross = bs.get(1, 0); // i/√2
    // Each physical routing carries amplitude √2!·straight·cross relative to
    // the raw product of network entries, but the parent term list already
    // enumerates both s1↔s2 slot permutations, so every routing is generated
    // twice; halving the factor keeps the summed amplitude correct.
    let factor = C64::new(2.0f64.sqrt() / 2.0, 0.0) * straight * cross;

    let u_slots: Vec<usize> = c
        .slot_modes
        .iter()
        .enumerate()
        .filter(|&(_, &mode)| mode == splitter_mode)
        .map(|(si, _)| si)
        .collect();
    let (s1, s2) = (u_slots[0], u_slots[1]);

    let mut occupation = c.occupation.clone();
    occupation[splitter_mode] = 1;
    occupation.push(1);
    let mut slot_modes: Vec<usize> = c.slot_modes.clone();
    slot_modes.remove(s2);
    slot_modes.push(m);

    let mut terms = Vec::with_capacity(c.terms.len() * 2);
    for t in &c.terms {
        for &(keep, moved) in &[(s1, s2), (s2, s1)] {
            let mut slots: Vec<usize> = Vec::with_capacity(t.slot_shapes.len());
            for (si, &ph) in t.slot_shapes.iter().enumerate() {
                if si == s1 {
                    slots.push(t.slot_shapes[keep]);
                } else if si != s2 {
                    slots.push(ph);
                }
            }
            slots.push(t.slot_shapes[moved]);
            terms.push(Term { coeff: t.coeff * factor, slot_shapes: slots });
        }
    }
    Ok(OutputComponent { occupation, slot_modes, terms, probability: f64::NAN })
}

/// Split the doubly occupied mode with a balanced splitter, then condition.
/// Pattern modes use the extended numbering: the new splitter output ê₂ is
/// mode M (= original mode count), ê₁ keeps the original index.
pub fn split_and_condition(
    c: &OutputComponent,
    splitter_mode: usize,
    pattern: &DetectionPattern,
    inputs: &[PhotonInput],
    g: &GramMatrix,
) -> Result<ShapingResult, Error> {
    let split = split_component(c, splitter_mode)?;
    // selection probability of the split component equals P_component / 2
    condition(&split, pattern, inputs, g)
}

/// Joint detection density over a (t₁, t₂) grid; each value is the
/// conditioning norm² whose integral over all times recovers the component
/// probability. Points where the amplitude vanishes yield 0.
pub fn joint_density_map(
    c: &OutputComponent,
    pattern_template: &DetectionPattern,
    inputs: &[PhotonInput],
    g: &GramMatrix,
    time_grid: &[(f64, f64)],
) -> Result<Vec<f64>, Error> {
    if pattern_template.events.len() != 2 {
        return Err(Error::PatternMismatch("density map needs exactly 2 detectors"));
    }
    let (detected, rem_slot) = assign_slots(c, pattern_template)?;
    let mut out = Vec::with_capacity(time_grid.len());
    for &(t1, t2) in time_grid {
        let mut det = detected.clone();
        det[0].1 = t1;
        det[1].1 = t2;
        let (_, dens) = condition_raw(c, &det, rem_slot, inputs, g);
        out.push(dens.max(0.0));
    }
    Ok(out)
}

/// How a finite-resolution fidelity is reduced from the windowed ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmearDefinition {
    /// √(⟨target|ρ|target⟩) of the windowed mixed state (default).
    MixedState,
    /// Density-weighted average of the pure-state fidelities.
    AveragedPure,
}

/// Fidelity versus `target` when each detector reports only a rectangular
/// window of width `t_r` centered on its nominal time. Tensor-product
/// Gauss–Legendre integration, refined until the result moves < 1e−6.
pub fn smear_resolution(
    c: &OutputComponent,
    pattern: &DetectionPattern,
    inputs: &[PhotonInput],
    g: &GramMatrix,
    target: &WavepacketShape,
    t_r: f64,
    def: SmearDefinition,
) -> Result<f64, Error> {
    if t_r < 0.0 {
        return Err(Error::Domain("resolution window must be nonnegative"));
    }
    if pattern.events.len() != 2 {
        return Err(Error::PatternMismatch("smearing needs exactly 2 detectors"));
    }
    let (detected, rem_slot) = assign_slots(c, pattern)?;
    let h: Vec<C64> = inputs.iter().map(|p| overlap(&p.shape, target)).collect();
    if t_r == 0.0 {
        let (xi, dens) = condition_raw(c, &detected, rem_slot, inputs, g);
        if dens <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let ov: C64 = xi.iter().zip(&h).map(|(&x, &hh)| x.conj() * hh).sum();
        return Ok(ov.norm() / dens.sqrt());
    }
    let (t10, t20) = (detected[0].1, detected[1].1);
    let mut prev: Option<f64> = None;
    for n in [32usize, 48, 64, 96] {
        let (x, w) = gauss_legendre(n);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut det = detected.clone();
                det[0].1 = t10 + 0.5 * t_r * x[i];
                det[1].1 = t20 + 0.5 * t_r * x[j];
                let (xi, dens) = condition_raw(c, &det, rem_slot, inputs, g);
                let ww = w[i] * w[j];
                let ov: C64 = xi.iter().zip(&h).map(|(&z, &hh)| z.conj() * hh).sum();
                match def {
                    SmearDefinition::MixedState => {
                        num += ww * ov.norm_sqr();
                        den += ww * dens;
                    }
                    SmearDefinition::AveragedPure => {
                        if dens > 0.0 {
                            num += ww * dens.sqrt() * ov.norm();
                            den += ww * dens;
                        }
                    }
                }
            }
        }
        if den <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let f = match def {
            SmearDefinition::MixedState => (num / den).sqrt(),
            SmearDefinition::AveragedPure => num / den,
        };
        if let Some(p) = prev {
            if (f - p).abs() < 1e-6 {
                return Ok(f);
            }
        }
        prev = Some(f);
    }
    Err(Error::QuadratureNotConverged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interference::{expand_output, find_component};
    use crate::network::{compose, embed, metasurface_unitary, ModeUnitary};
    use crate::shapes::gram;
    use approx::assert_abs_diff_eq;

    fn fig2() -> (Vec<PhotonInput>, GramMatrix, Vec<OutputComponent>) {
        let inputs = vec![
            PhotonInput { mode: 0, shape: WavepacketShape::exp_decay(1.42, 0.0, 0.0) },
            PhotonInput { mode: 1, shape: WavepacketShape::exp_decay(1.27, 0.0, -1.19) },
            PhotonInput { mode: 2, shape: WavepacketShape::exp_decay(1.27, 0.0, 1.19) },
        ];
        let shapes: Vec<_> = inputs.iter().map(|p| p.shape).collect();
        let g = gram(&shapes);
        let comps = expand_output(&inputs, &metasurface_unitary(0.801).unwrap()).unwrap();
        (inputs, g, comps)
    }

    fn fig2_pattern() -> DetectionPattern {
        DetectionPattern {
            events: vec![
                DetectionEvent { mode: 1, time: 0.906 },
                DetectionEvent { mode: 2, time: 1.42 },
            ],
            remaining_mode: 0,
            vacuum_modes: vec![3],
        }
    }

    #[test]
    fn fig2_conditioning_matches_paper_fidelity() {
        let (inputs, g, comps) = fig2();
        let c = find_component(&comps, &[1, 1, 1, 0]).unwrap();
        let r = condition(c, &fig2_pattern(), &inputs, &g).unwrap();
        let target = WavepacketShape::gaussian(1.0, 2.0, 0.0);
        let f: C64 = r
            .xi
            .iter()
            .zip(inputs.iter())
            .map(|(&x, p)| x.conj() * overlap(&p.shape, &target))
            .sum();
        assert_abs_diff_eq!(f.norm(), 0.997, epsilon = 3e-3);
        assert_abs_diff_eq!(r.selection_probability, 0.0886, epsilon = 2e-3);
        assert_abs_diff_eq!(g.quadratic_form(&r.xi), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn identity_network_returns_remaining_input() {
        let (inputs, g, _) = fig2();
        let comps = expand_output(&inputs, &ModeUnitary::identity(4)).unwrap();
        let c = find_component(&comps, &[1, 1, 1, 0]).unwrap();
        let r = condition(c, &fig2_pattern(), &inputs, &g).unwrap();
        assert_abs_diff_eq!(r.xi[0].norm(), 1.0, epsilon = 1e-12);
        assert!(r.xi[1].norm() < 1e-14 && r.xi[2].norm() < 1e-14);
    }

    #[test]
    fn detection_before_onset_is_zero_norm() {
        let (inputs, g, comps) = fig2();
        let c = find_component(&comps, &[1, 1, 1, 0]).unwrap();
        let pattern = DetectionPattern {
            events: vec![
                DetectionEvent { mode: 1, time: -0.5 },
                DetectionEvent { mode: 2, time: -1.0 },
            ],
            remaining_mode: 0,
            vacuum_modes: vec![],
        };
        assert_eq!(condition(c, &pattern, &inputs, &g), Err(Error::ZeroNorm));
    }

    #[test]
    fn detector_swap_is_invariant() {
        let (inputs, g, comps) = fig2();
        let c = find_component(&comps, &[1, 1, 1, 0]).unwrap();
        let a = condition(c, &fig2_pattern(), &inputs, &g).unwrap();
        let swapped = DetectionPattern {
            events: vec![
                DetectionEvent { mode: 2, time: 1.42 },
                DetectionEvent { mode: 1, time: 0.906 },
            ],
            remaining_mode: 0,
            vacuum_modes: vec![],
        };
        let b = condition(c, &swapped, &inputs, &g).unwrap();
        assert_abs_diff_eq!(a.joint_density, b.joint_density, epsilon = 1e-12);
        for (x, y) in a.xi.iter().zip(&b.xi) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn split_path_matches_composed_network() {
        // Gaussian triple on the Fig. 3 geometry: condition |2,1,0,0⟩ via the
        // splitter rewrite and via the explicit 5-mode composed network.
        let inputs = vec![
            PhotonInput { mode: 0, shape: WavepacketShape::gaussian(6.73, 9.80, 0.0) },
            PhotonInput { mode: 1, shape: WavepacketShape::gaussian(0.771, 7.71, 0.0) },
            PhotonInput { mode: 2, shape: WavepacketShape::gaussian(2.18, 9.21, 0.0) },
        ];
        let shapes: Vec<_> = inputs.iter().map(|p| p.shape).collect();
        let g = gram(&shapes);
        let s4 = metasurface_unitary(0.782).unwrap();
        let comps4 = expand_output(&inputs, &s4).unwrap();
        let c2100 = find_component(&comps4, &[2, 1, 0, 0]).unwrap();
        let pattern = DetectionPattern {
            events: vec![
                DetectionEvent { mode: 4, time: 9.68 },
                DetectionEvent { mode: 1, time: 10.2 },
            ],
            remaining_mode: 0,
            vacuum_modes: vec![2, 3],
        };
        let via_split = split_and_condition(c2100, 0, &pattern, &inputs, &g).unwrap();

        let s5 = embed(&s4, &[0, 1, 2, 3], 5).unwrap();
        let u = compose(&embed(&balanced_splitter(), &[0, 4], 5).unwrap(), &s5).unwrap();
        let comps5 = expand_output(&inputs, &u).unwrap();
        let c5 = find_component(&comps5, &[1, 1, 0, 0, 1]).unwrap();
        let direct = condition(c5, &pattern, &inputs, &g).unwrap();

        assert_abs_diff_eq!(via_split.joint_density, direct.joint_density, epsilon = 1e-9);
        assert_abs_diff_eq!(
            via_split.selection_probability,
            direct.selection_probability,
            epsilon = 1e-9
        );
        for (x, y) in via_split.xi.iter().zip(&direct.xi) {
            assert!((x - y).norm() < 1e-9);
        }
        // P_sel is half the unsplit component probability
        let p2100 = component_probability(c2100, &g).unwrap();
        assert_abs_diff_eq!(via_split.selection_probability, p2100 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn density_map_factorizes_on_identity_network() {
        let (inputs, g, _) = fig2();
        let comps = expand_output(&inputs, &ModeUnitary::identity(4)).unwrap();
        let c = find_component(&comps, &[1, 1, 1, 0]).unwrap();
        let grid = [(0.3, 0.7), (1.1, 0.2), (2.0, 2.5)];
        let d = joint_density_map(c, &fig2_pattern(), &inputs, &g, &grid).unwrap();
        for (&(t1, t2), &v) in grid.iter().zip(&d) {
            let expect = inputs[1].shape.eval(t1).norm_sqr() * inputs[2].shape.eval(t2).norm_sqr();
            assert_abs_diff_eq!(v, expect, epsilon = 1e-12);
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn smear_zero_width_equals_pure_fidelity() {
        let (inputs, g, comps) = fig2();
        let c = find_component(&comps, &[1, 1, 1, 0]).unwrap();
        let target = WavepacketShape::gaussian(1.0, 2.0, 0.0);
        let f0 = smear_resolution(c, &fig2_pattern(), &inputs, &g, &target, 0.0, SmearDefinition::MixedState)
            .unwrap();
        assert_abs_diff_eq!(f0, 0.997, epsilon = 3e-3);
        let f_small = smear_resolution(
            c,
            &fig2_pattern(),
            &inputs,
            &g,
            &target,
            1e-6,
            SmearDefinition::MixedState,
        )
        .unwrap();
        assert_abs_diff_eq!(f0, f_small, epsilon = 1e-6);
    }
}
