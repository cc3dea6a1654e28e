use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Frame, FrameSchema};
use crate::hmm::{forward_backward, HmmError, HmmModel, StateKind};

/// How per-position slot-value posteriors are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PosteriorMode {
    /// `p(state | unit)` from the emission model with a uniform state prior.
    #[default]
    Emission,
    /// Lattice posteriors from forward-backward.
    ForwardBackward,
}

/// Positions that contribute to a slot's totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Accumulation {
    AllPositions,
    /// Only positions whose Viterbi state belongs to the slot.
    #[default]
    PathRestricted,
}

/// Per-position posteriors over the states of `frame_type`, zero elsewhere.
pub fn position_posteriors(
    model: &HmmModel,
    obs: &[usize],
    frame_type: &str,
    mode: PosteriorMode,
) -> Result<Vec<Vec<f64>>, HmmError> {
    let inside: Vec<bool> = model.states.iter().map(|s| s.frame_type == frame_type).collect();
    let raw: Vec<Vec<f64>> = match mode {
        PosteriorMode::Emission => obs
            .iter()
            .map(|&o| model.emissions.iter().map(|row| row[o]).collect())
            .collect(),
        PosteriorMode::ForwardBackward => forward_backward(model, obs)?.gamma(),
    };
    Ok(raw
        .into_iter()
        .map(|mut p| {
            for (x, &keep) in p.iter_mut().zip(&inside) {
                if !keep {
                    *x = 0.0;
                }
            }
            let z: f64 = p.iter().sum();
            if z > 0.0 {
                for x in p.iter_mut() {
                    *x /= z;
                }
            }
            p
        })
        .collect())
}

/// Builds the induced frame from a Viterbi path.
///
/// The frame type is the one of the path's states. Candidate slots are the
/// slots visited by the path; each takes the value with the highest
/// accumulated posterior and is kept iff that total reaches `threshold`.
/// Returns the frame and the per-value totals.
pub fn fill_frame(
    model: &HmmModel,
    schema: &FrameSchema,
    path: &[usize],
    posteriors: &[Vec<f64>],
    threshold: f64,
    accumulation: Accumulation,
) -> (Frame, BTreeMap<String, f64>) {
    let frame_type = model.states[path[0]].frame_type.clone();
    let mut frame = Frame::new(&frame_type);
    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    let Some(def) = schema.frame_type(&frame_type) else {
        return (frame, totals);
    };
    for slot in &def.slots {
        let visited = path.iter().any(|&s| {
            let st = &model.states[s];
            !st.is_filler() && st.slot.as_deref() == Some(slot.name.as_str())
        });
        if !visited {
            continue;
        }
        let mut best: Option<(&str, f64)> = None;
        for (i, state) in model.states.iter().enumerate() {
            let StateKind::Value(sv) = &state.kind else { continue };
            if sv.frame_type != frame_type || sv.slot != slot.name {
                continue;
            }
            let total: f64 = posteriors
                .iter()
                .zip(path)
                .filter(|(_, &q)| match accumulation {
                    Accumulation::AllPositions => true,
                    Accumulation::PathRestricted => {
                        let st = &model.states[q];
                        !st.is_filler() && st.slot.as_deref() == Some(slot.name.as_str())
                    }
                })
                .map(|(p, _)| p[i])
                .sum();
            totals.insert(state.label.clone(), total);
            if best.is_none_or(|(_, b)| total > b) {
                best = Some((sv.value.as_str(), total));
            }
        }
        if let Some((value, total)) = best {
            if total >= threshold {
                frame.insert(&slot.name, value);
            }
        }
    }
    (frame, totals)
}
