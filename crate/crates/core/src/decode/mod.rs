//! Decoding commands into frames with a trained slot-value HMM.

mod distance;
mod fill;
mod viterbi;

pub use distance::{
    feature_edit_distance, feature_substitution_cost, map_unknown_units, nearest_unit,
    symbol_edit_distance, weighted_edit_distance, UnknownUnitPolicy,
};
pub use fill::{fill_frame, position_posteriors, Accumulation, PosteriorMode};
pub use viterbi::{path_log_probability, viterbi, ViterbiPath};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Frame, FrameSchema, SegmentedCommand};
use crate::hmm::{HmmError, HmmModel};

pub const DEFAULT_HMM_THRESHOLD: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecodeOptions {
    pub threshold: f64,
    pub unknown_units: UnknownUnitPolicy,
    pub posteriors: PosteriorMode,
    pub accumulation: Accumulation,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        DecodeOptions {
            threshold: DEFAULT_HMM_THRESHOLD,
            unknown_units: UnknownUnitPolicy::default(),
            posteriors: PosteriorMode::default(),
            accumulation: Accumulation::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    /// State label per (mapped) unit.
    pub path: Vec<String>,
    /// Accumulated posterior per candidate slot-value state.
    pub totals: BTreeMap<String, f64>,
    pub frame: Frame,
    pub frame_type: String,
}

pub fn decode(
    model: &HmmModel,
    schema: &FrameSchema,
    command: &SegmentedCommand,
    options: &DecodeOptions,
) -> Result<DecodeResult, HmmError> {
    if model.vocabulary.is_empty() {
        return Err(HmmError::EmptyVocabulary);
    }
    let units = map_unknown_units(&command.units, &model.vocabulary, options.unknown_units);
    let obs = model.encode(&units)?;
    let best = viterbi(model, &obs)?;
    let frame_type = model.states[best.states[0]].frame_type.clone();
    let posteriors = position_posteriors(model, &obs, &frame_type, options.posteriors)?;
    let (frame, totals) = fill_frame(model, schema, &best.states, &posteriors, options.threshold, options.accumulation);
    Ok(DecodeResult {
        path: best.states.iter().map(|&s| model.states[s].label.clone()).collect(),
        totals,
        frame,
        frame_type,
    })
}
