use super::model::{HmmModel, StateKind, Supervision};
use super::HmmError;
use crate::corpus::Frame;

/// Expected sufficient statistics accumulated over one or more utterances.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedCounts {
    pub initial: Vec<f64>,
    pub transitions: Vec<Vec<f64>>,
    pub emissions: Vec<Vec<f64>>,
}

impl ExpectedCounts {
    pub fn zeros(model: &HmmModel) -> Self {
        let n = model.n_states();
        ExpectedCounts {
            initial: vec![0.0; n],
            transitions: vec![vec![0.0; n]; n],
            emissions: vec![vec![0.0; model.vocabulary.len()]; n],
        }
    }

    pub fn add(&mut self, other: &ExpectedCounts) {
        for (a, b) in self.initial.iter_mut().zip(&other.initial) {
            *a += b;
        }
        for (ra, rb) in self.transitions.iter_mut().zip(&other.transitions) {
            for (a, b) in ra.iter_mut().zip(rb) {
                *a += b;
            }
        }
        for (ra, rb) in self.emissions.iter_mut().zip(&other.emissions) {
            for (a, b) in ra.iter_mut().zip(rb) {
                *a += b;
            }
        }
    }
}

/// Scaled forward-backward quantities of one observation sequence.
pub struct Lattice {
    /// Normalized forward variables, `T × S`.
    pub alpha: Vec<Vec<f64>>,
    /// Backward variables scaled by the same constants, `T × S`.
    pub beta: Vec<Vec<f64>>,
    /// Per-step scaling constants.
    pub scale: Vec<f64>,
    /// Share of the final forward mass in states that may end a path.
    pub end_mass: f64,
}

impl Lattice {
    pub fn log_likelihood(&self) -> f64 {
        self.scale.iter().map(|c| c.ln()).sum::<f64>() + self.end_mass.ln()
    }

    /// State posteriors `P(q_t = i | O)`.
    pub fn gamma(&self) -> Vec<Vec<f64>> {
        self.alpha
            .iter()
            .zip(&self.beta)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).collect())
            .collect()
    }
}

/// Forward pass restricted to states with `mask[i]`; `None` allows all states.
/// Returns `None` when the sequence has zero probability.
pub fn forward(model: &HmmModel, obs: &[usize], mask: Option<&[bool]>) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
    let n = model.n_states();
    let on = |i: usize| mask.is_none_or(|m| m[i]);
    let mut alpha = Vec::with_capacity(obs.len());
    let mut scale = Vec::with_capacity(obs.len());
    for (t, &o) in obs.iter().enumerate() {
        let mut a = vec![0.0; n];
        if t == 0 {
            for i in 0..n {
                if on(i) {
                    a[i] = model.initial[i] * model.emissions[i][o];
                }
            }
        } else {
            let prev: &Vec<f64> = &alpha[t - 1];
            for i in 0..n {
                if prev[i] == 0.0 {
                    continue;
                }
                for &j in &model.successors[i] {
                    if on(j) {
                        a[j] += prev[i] * model.transitions[i][j];
                    }
                }
            }
            for j in 0..n {
                a[j] *= model.emissions[j][o];
            }
        }
        let c: f64 = a.iter().sum();
        if !(c > 0.0) {
            return None;
        }
        for x in a.iter_mut() {
            *x /= c;
        }
        alpha.push(a);
        scale.push(c);
    }
    Some((alpha, scale))
}

/// Mass of the last normalized forward vector in states that may end a path.
fn end_mass(model: &HmmModel, last: &[f64]) -> f64 {
    last.iter().enumerate().filter(|(i, _)| model.can_end(*i)).map(|(_, a)| a).sum()
}

/// `log P(O)` over the paths inside `mask`, `None` if no such path exists.
pub fn sequence_log_likelihood(model: &HmmModel, obs: &[usize], mask: Option<&[bool]>) -> Option<f64> {
    let (alpha, scale) = forward(model, obs, mask)?;
    let z = end_mass(model, alpha.last()?);
    (z > 0.0).then(|| scale.iter().map(|c| c.ln()).sum::<f64>() + z.ln())
}

pub fn forward_backward(model: &HmmModel, obs: &[usize]) -> Result<Lattice, HmmError> {
    forward_backward_masked(model, obs, None)
}

/// Forward-backward over the paths that stay inside `mask`.
pub fn forward_backward_masked(model: &HmmModel, obs: &[usize], mask: Option<&[bool]>) -> Result<Lattice, HmmError> {
    if obs.is_empty() {
        return Err(HmmError::EmptyCommand);
    }
    let n = model.n_states();
    let on = |i: usize| mask.is_none_or(|m| m[i]);
    let (alpha, scale) = forward(model, obs, mask).ok_or(HmmError::ZeroProbability)?;
    let z = end_mass(model, alpha.last().expect("non-empty"));
    if !(z > 0.0) {
        return Err(HmmError::ZeroProbability);
    }
    let len = obs.len();
    let mut beta = vec![vec![0.0; n]; len];
    beta[len - 1] = (0..n).map(|i| if on(i) && model.can_end(i) { 1.0 / z } else { 0.0 }).collect();
    for t in (0..len - 1).rev() {
        let o = obs[t + 1];
        let c = scale[t + 1];
        for i in 0..n {
            if !on(i) {
                continue;
            }
            let mut acc = 0.0;
            for &j in &model.successors[i] {
                acc += model.transitions[i][j] * model.emissions[j][o] * beta[t + 1][j];
            }
            beta[t][i] = acc / c;
        }
    }
    Ok(Lattice { alpha, beta, scale, end_mass: z })
}

/// States that survive supervision by `frame`: its slot values, its frame-type
/// state and every filler of its frame type.
pub fn supervision_mask(model: &HmmModel, frame: &Frame) -> Vec<bool> {
    model
        .states
        .iter()
        .map(|s| {
            if s.frame_type != frame.frame_type {
                return false;
            }
            match &s.kind {
                StateKind::Value(sv) => frame.contains(&sv.slot, &sv.value),
                StateKind::FrameType(_) | StateKind::Filler { .. } => true,
            }
        })
        .collect()
}

/// Result of the E-step on one utterance.
pub struct UtteranceCounts {
    pub counts: ExpectedCounts,
    /// `log P(O, all states supervised)`, the supervised log-likelihood.
    pub supervised_log_likelihood: f64,
}

/// Forward-backward followed by supervision: occupancies and transition
/// expectations of states outside the mask are zeroed, then each time step is
/// renormalized.
pub fn e_step(model: &HmmModel, obs: &[usize], frame: &Frame) -> Result<UtteranceCounts, HmmError> {
    let mask = supervision_mask(model, frame);
    let lattice = match model.options.supervision {
        Supervision::PosteriorZeroing => forward_backward(model, obs)?,
        Supervision::ConstrainedPaths => {
            forward_backward_masked(model, obs, Some(&mask)).map_err(|_| HmmError::Unexplainable)?
        }
    };
    let n = model.n_states();
    let mut counts = ExpectedCounts::zeros(model);

    let gamma = lattice.gamma();
    for (t, g) in gamma.iter().enumerate() {
        let z: f64 = (0..n).filter(|&i| mask[i]).map(|i| g[i]).sum();
        if !(z > 0.0) {
            return Err(HmmError::Unexplainable);
        }
        for i in (0..n).filter(|&i| mask[i]) {
            let p = g[i] / z;
            if t == 0 {
                counts.initial[i] += p;
            }
            counts.emissions[i][obs[t]] += p;
        }
    }

    let mut xi = vec![Vec::new(); n];
    for t in 0..obs.len().saturating_sub(1) {
        let o = obs[t + 1];
        let c = lattice.scale[t + 1];
        let mut z = 0.0;
        for i in 0..n {
            xi[i].clear();
            if !mask[i] {
                continue;
            }
            let a = lattice.alpha[t][i];
            for &j in &model.successors[i] {
                if mask[j] {
                    let v = a * model.transitions[i][j] * model.emissions[j][o] * lattice.beta[t + 1][j] / c;
                    xi[i].push((j, v));
                    z += v;
                }
            }
        }
        if !(z > 0.0) {
            return Err(HmmError::Unexplainable);
        }
        for i in 0..n {
            for &(j, v) in &xi[i] {
                counts.transitions[i][j] += v / z;
            }
        }
    }

    let supervised_log_likelihood =
        sequence_log_likelihood(model, obs, Some(&mask)).ok_or(HmmError::Unexplainable)?;
    Ok(UtteranceCounts {
        counts,
        supervised_log_likelihood,
    })
}
