//! Weakly supervised semantic frame induction.
//!
//! Commands paired with over-specified action frames train a hidden Markov
//! model whose hidden states are slot values. A non-negative matrix
//! factorization of the stacked frame/command activation matrices provides
//! the initial unit-to-slot-value associations; frame-supervised Baum-Welch
//! then refines them, optionally tying transitions slot-wise, sharing
//! emissions across shared expression sets and adding filler states.
//! Decoding runs Viterbi and fills each visited slot with its value of
//! highest accumulated posterior.

pub mod corpus;
pub mod decode;
pub mod eval;
pub mod hmm;
pub mod nmf;
pub mod seeds;
pub mod system;
#[cfg(test)]
mod testutil;
pub mod vocab;

pub use vocab::Vocabulary;
pub use corpus::{
    CorpusError, Corpus, CorpusEntry, Frame, FrameSchema, Granularity, SegmentedCommand, SlotValue,
};
