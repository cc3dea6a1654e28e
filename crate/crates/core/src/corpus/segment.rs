use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::data::Utterance;
use super::CorpusError;

/// Boundary symbol used at both ends of bigram sequences.
pub const BOUNDARY: &str = "+";

/// Observation unit granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Granularity {
    WordUnigram,
    WordBigram,
    PhonemeUnigram,
    PhonemeBigram,
}

impl Granularity {
    pub const ALL: [Granularity; 4] = [
        Granularity::WordUnigram,
        Granularity::WordBigram,
        Granularity::PhonemeUnigram,
        Granularity::PhonemeBigram,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::WordUnigram => "word-unigram",
            Granularity::WordBigram => "word-bigram",
            Granularity::PhonemeUnigram => "phoneme-unigram",
            Granularity::PhonemeBigram => "phoneme-bigram",
        }
    }

    pub fn is_bigram(self) -> bool {
        matches!(self, Granularity::WordBigram | Granularity::PhonemeBigram)
    }

    pub fn is_phoneme(self) -> bool {
        matches!(self, Granularity::PhonemeUnigram | Granularity::PhonemeBigram)
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Granularity::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| format!("unknown granularity `{s}`"))
    }
}

/// Phoneme symbol table. Symbols are single characters unless the table
/// lists longer ones, which are matched greedily (longest first).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhonemeInventory {
    multi_char: Vec<String>,
}

impl PhonemeInventory {
    pub fn with_symbols<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut multi_char: Vec<String> = symbols
            .into_iter()
            .map(Into::into)
            .filter(|s: &String| s.chars().count() > 1)
            .collect();
        multi_char.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
        multi_char.dedup();
        PhonemeInventory { multi_char }
    }

    pub fn tokenize<'a>(&self, word: &'a str) -> Vec<&'a str> {
        let mut out = Vec::new();
        let mut rest = word;
        'outer: while let Some(c) = rest.chars().next() {
            for sym in &self.multi_char {
                if rest.starts_with(sym.as_str()) {
                    out.push(&rest[..sym.len()]);
                    rest = &rest[sym.len()..];
                    continue 'outer;
                }
            }
            out.push(&rest[..c.len_utf8()]);
            rest = &rest[c.len_utf8()..];
        }
        out
    }
}

/// The observation units of one command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentedCommand {
    pub granularity: Granularity,
    pub units: Vec<String>,
}

impl SegmentedCommand {
    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }
}

pub fn segment(
    utterance: &Utterance,
    granularity: Granularity,
) -> Result<SegmentedCommand, CorpusError> {
    segment_words(&utterance.phonemic, granularity, &PhonemeInventory::default())
        .map_err(|_| CorpusError::EmptyTranscription(utterance.id.clone()))
}

/// Segments a phonemic word sequence.
pub fn segment_words<S: AsRef<str>>(
    words: &[S],
    granularity: Granularity,
    inventory: &PhonemeInventory,
) -> Result<SegmentedCommand, CorpusError> {
    let words: Vec<&str> = words
        .iter()
        .map(AsRef::as_ref)
        .filter(|w| !w.is_empty())
        .collect();
    if words.is_empty() {
        return Err(CorpusError::EmptyTranscription(String::new()));
    }
    let units = match granularity {
        Granularity::WordUnigram => words.iter().map(|w| w.to_string()).collect(),
        Granularity::WordBigram => bigrams(&words, "_"),
        Granularity::PhonemeUnigram => phonemes(&words, inventory)
            .into_iter()
            .map(str::to_string)
            .collect(),
        Granularity::PhonemeBigram => bigrams(&phonemes(&words, inventory), ""),
    };
    Ok(SegmentedCommand { granularity, units })
}

fn phonemes<'a>(words: &[&'a str], inventory: &PhonemeInventory) -> Vec<&'a str> {
    words.iter().flat_map(|w| inventory.tokenize(w)).collect()
}

fn bigrams(tokens: &[&str], joiner: &str) -> Vec<String> {
    let padded: Vec<&str> = std::iter::once(BOUNDARY)
        .chain(tokens.iter().copied())
        .chain(std::iter::once(BOUNDARY))
        .collect();
    padded
        .windows(2)
        .map(|w| format!("{}{joiner}{}", w[0], w[1]))
        .collect()
}
