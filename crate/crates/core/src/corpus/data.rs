use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::frame::Frame;
use super::schema::FrameSchema;
use super::CorpusError;

/// One transcribed command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub speaker: String,
    /// Recording order within the speaker's session.
    pub ordinal: u64,
    pub orthographic: Vec<String>,
    /// One phoneme string per word.
    pub phonemic: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub utterance: Utterance,
    pub automatic_frame: Frame,
    pub oracle_frame: Frame,
}

/// One line of a corpus JSONL file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRecord {
    pub id: String,
    pub speaker: String,
    pub ordinal: u64,
    pub ortho: String,
    pub phon: Vec<String>,
    pub auto_frame: Frame,
    pub oracle_frame: Frame,
}

impl From<&CorpusEntry> for CorpusRecord {
    fn from(e: &CorpusEntry) -> Self {
        CorpusRecord {
            id: e.utterance.id.clone(),
            speaker: e.utterance.speaker.clone(),
            ordinal: e.utterance.ordinal,
            ortho: e.utterance.orthographic.join(" "),
            phon: e.utterance.phonemic.clone(),
            auto_frame: e.automatic_frame.clone(),
            oracle_frame: e.oracle_frame.clone(),
        }
    }
}

impl CorpusRecord {
    fn into_entry(self, schema: &FrameSchema) -> Result<CorpusEntry, CorpusError> {
        let orthographic: Vec<String> = self.ortho.split_whitespace().map(str::to_string).collect();
        if orthographic.len() != self.phon.len() {
            return Err(CorpusError::Invalid {
                id: self.id,
                reason: format!(
                    "{} orthographic words but {} phonemic words",
                    orthographic.len(),
                    self.phon.len()
                ),
            });
        }
        if self.auto_frame.frame_type != self.oracle_frame.frame_type {
            return Err(CorpusError::Invalid {
                id: self.id,
                reason: format!(
                    "automatic frame type {} differs from oracle frame type {}",
                    self.auto_frame.frame_type, self.oracle_frame.frame_type
                ),
            });
        }
        self.auto_frame.validate(schema)?;
        self.oracle_frame.validate(schema)?;
        if !self.auto_frame.is_single_valued() {
            return Err(CorpusError::Invalid {
                id: self.id,
                reason: "automatic frame fills a slot with several values".to_string(),
            });
        }
        Ok(CorpusEntry {
            utterance: Utterance {
                id: self.id,
                speaker: self.speaker,
                ordinal: self.ordinal,
                orthographic,
                phonemic: self.phon,
            },
            automatic_frame: self.auto_frame,
            oracle_frame: self.oracle_frame,
        })
    }
}

/// Per-speaker entry lists in recording order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    speakers: BTreeMap<String, Vec<CorpusEntry>>,
}

impl Corpus {
    /// Builds a corpus, sorting each speaker's entries by ordinal.
    pub fn from_entries(entries: Vec<CorpusEntry>) -> Result<Self, CorpusError> {
        let mut ids = HashSet::new();
        let mut speakers: BTreeMap<String, Vec<CorpusEntry>> = BTreeMap::new();
        for e in entries {
            if !ids.insert(e.utterance.id.clone()) {
                return Err(CorpusError::DuplicateId(e.utterance.id));
            }
            speakers.entry(e.utterance.speaker.clone()).or_default().push(e);
        }
        for list in speakers.values_mut() {
            list.sort_by_key(|e| e.utterance.ordinal);
            for pair in list.windows(2) {
                if pair[0].utterance.ordinal == pair[1].utterance.ordinal {
                    return Err(CorpusError::Invalid {
                        id: pair[1].utterance.id.clone(),
                        reason: format!(
                            "ordinal {} repeated for speaker {}",
                            pair[1].utterance.ordinal, pair[1].utterance.speaker
                        ),
                    });
                }
            }
        }
        Ok(Corpus { speakers })
    }

    pub fn speakers(&self) -> impl Iterator<Item = &str> {
        self.speakers.keys().map(String::as_str)
    }

    pub fn entries(&self, speaker: &str) -> Result<&[CorpusEntry], CorpusError> {
        self.speakers
            .get(speaker)
            .map(Vec::as_slice)
            .ok_or_else(|| CorpusError::UnknownSpeaker(speaker.to_string()))
    }

    /// All entries, speaker by speaker.
    pub fn iter(&self) -> impl Iterator<Item = &CorpusEntry> {
        self.speakers.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.speakers.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), CorpusError> {
        for e in self.iter() {
            let line = serde_json::to_string(&CorpusRecord::from(e)).expect("record serializes");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Parses and validates one JSONL line; `line_number` is used in errors.
pub fn parse_record(line: &str, line_number: usize, schema: &FrameSchema) -> Result<CorpusEntry, CorpusError> {
    let record: CorpusRecord = serde_json::from_str(line).map_err(|e| CorpusError::Parse {
        line: line_number,
        message: e.to_string(),
    })?;
    record.into_entry(schema).map_err(|e| e.at_line(line_number))
}

/// Parses corpus JSONL from a reader, validating every entry against `schema`.
pub fn parse_corpus<R: Read>(reader: R, schema: &FrameSchema) -> Result<Corpus, CorpusError> {
    let mut entries = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        entries.push(parse_record(&line, i + 1, schema)?);
    }
    Corpus::from_entries(entries)
}

pub fn load_corpus(path: &Path, schema: &FrameSchema) -> Result<Corpus, CorpusError> {
    let file = std::fs::File::open(path)?;
    parse_corpus(file, schema)
}
