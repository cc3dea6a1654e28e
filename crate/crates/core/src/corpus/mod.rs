//! Frame schemas, corpus ingestion, segmentation and experiment splits.

mod data;
mod frame;
mod schema;
mod segment;
mod split;
pub mod synth;

pub use data::{load_corpus, parse_corpus, parse_record, Corpus, CorpusEntry, CorpusRecord, Utterance};
pub use frame::Frame;
pub use schema::{FrameSchema, FrameTypeDef, SharedSet, SlotDef, SlotValue};
pub use segment::{
    segment, segment_words, Granularity, PhonemeInventory, SegmentedCommand, BOUNDARY,
};
pub use split::{split_entries, split_experiment, ExperimentSplit, SplitConfig};
pub use synth::{generate_synthetic, TemplateGrammar};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<CorpusError>,
    },
    #[error("schema violation in slot {slot}{}: {reason}", value.as_ref().map(|v| format!(" (value {v})")).unwrap_or_default())]
    SchemaViolation {
        slot: String,
        value: Option<String>,
        reason: String,
    },
    #[error("unknown frame type {0}")]
    UnknownFrameType(String),
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("entry {id}: {reason}")]
    Invalid { id: String, reason: String },
    #[error("duplicate utterance id {0}")]
    DuplicateId(String),
    #[error("unknown speaker {0}")]
    UnknownSpeaker(String),
    #[error("empty transcription{}", if .0.is_empty() { String::new() } else { format!(" for {}", .0) })]
    EmptyTranscription(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid template grammar: {0}")]
    InvalidGrammar(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CorpusError {
    pub(crate) fn at_line(self, line: usize) -> CorpusError {
        CorpusError::AtLine {
            line,
            source: Box::new(self),
        }
    }
}
