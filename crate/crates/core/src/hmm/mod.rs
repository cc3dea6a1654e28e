//! Slot-value HMMs and frame-supervised Baum-Welch training with transition,
//! expression and filler sharing.

mod estep;
mod model;
mod mstep;
mod train;

pub use estep::{
    e_step, forward, forward_backward, forward_backward_masked, sequence_log_likelihood, supervision_mask, ExpectedCounts, Lattice, UtteranceCounts,
};
pub use model::{
    build_model, training_slot_values, FillerMode, HmmModel, HmmOptions, SharingConfig, State, Supervision,
    StateKind, PROB_FLOOR,
};
pub use mstep::{
    apply_expression_sharing, apply_transition_sharing, filler_groups, m_step, shared_value_groups,
    transition_group,
};
pub use train::{accumulate, train, TrainingTrace, DEFAULT_ITERATIONS};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HmmError {
    #[error("empty vocabulary")]
    EmptyVocabulary,
    #[error("empty training slice")]
    EmptyTraining,
    #[error("no association for training slot value {0}")]
    MissingAssociation(String),
    #[error("unit {0} is not in the model vocabulary")]
    UnknownUnit(String),
    #[error("empty command")]
    EmptyCommand,
    #[error("command has zero probability under the model")]
    ZeroProbability,
    #[error("utterance cannot be explained by the states its frame allows")]
    Unexplainable,
    #[error("{0}")]
    InvalidArgument(String),
}
