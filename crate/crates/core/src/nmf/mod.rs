//! Frame/command activation matrices, KL-divergence NMF and the
//! unit-to-slot-value association map that seeds the HMM emissions.

mod association;
mod decode;
mod factorize;
mod matrices;

pub use association::{association_matrix, AssociationMap};
pub use decode::{accumulate_activations, nmf_decode, DEFAULT_NMF_THRESHOLD};
pub use factorize::{factorize, kl_divergence, FactorizationResult, NmfConfig, FACTOR_FLOOR};
pub use matrices::{
    activated_values, build_command_matrix, build_frame_matrix, ActivationMatrices, CommandMatrix,
    FrameMatrix, FrameRow,
};

use thiserror::Error;

use crate::corpus::{Frame, FrameSchema, SegmentedCommand};

#[derive(Debug, Error)]
pub enum NmfError {
    #[error("rank {rank} exceeds the smaller dimension of a {rows}x{cols} matrix")]
    RankTooLarge { rank: usize, rows: usize, cols: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("unit {0} is not in the association map")]
    UnknownUnit(String),
    #[error("association map has no frame-type columns")]
    NoFrameTypes,
    #[error("empty training slice")]
    EmptyTraining,
}

/// Options of the association-map induction step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InductionOptions {
    pub e_sharing: bool,
    pub filler_column: bool,
}

/// Builds both activation matrices, factorizes them and returns the association map.
pub fn induce_association_map(
    frames: &[&Frame],
    commands: &[&SegmentedCommand],
    schema: &FrameSchema,
    options: InductionOptions,
    config: &NmfConfig,
    seed: u64,
) -> Result<(AssociationMap, FactorizationResult), NmfError> {
    if frames.is_empty() {
        return Err(NmfError::EmptyTraining);
    }
    if frames.len() != commands.len() {
        return Err(NmfError::InvalidArgument(format!(
            "{} frames for {} commands",
            frames.len(),
            commands.len()
        )));
    }
    let fm = build_frame_matrix(frames, schema, options.e_sharing, options.filler_column);
    let cm = build_command_matrix(commands);
    let matrices = ActivationMatrices::new(fm, cm);
    let v = matrices.stacked();
    let rank = match config.rank {
        Some(r) => r,
        None => matrices.frames.rows.len().min(v.nrows()).min(v.ncols()).max(1),
    };
    let result = factorize(
        &v,
        matrices.frames.rows.len(),
        rank,
        config.iterations,
        config.tolerance,
        seed,
    )?;
    let ActivationMatrices { frames, commands } = matrices;
    let map = AssociationMap::from_factorization(&result, commands.vocabulary, frames.rows);
    Ok((map, result))
}
