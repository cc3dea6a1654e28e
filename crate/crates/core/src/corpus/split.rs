use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::data::{Corpus, CorpusEntry};
use super::CorpusError;

/// How a speaker's recording sequence is cut into training partitions and a test set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub partition_size: usize,
    /// Number of trailing anchor-type utterances in the test set.
    pub test_anchor_count: usize,
    pub anchor_frame_type: String,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            partition_size: 25,
            test_anchor_count: 20,
            anchor_frame_type: "movecard".to_string(),
        }
    }
}

/// Index ranges into one speaker's ordered entry list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentSplit {
    pub partitions: Vec<Range<usize>>,
    /// Ragged tail of the training region that fills no whole partition.
    pub dropped: Range<usize>,
    pub test: Range<usize>,
}

impl ExperimentSplit {
    pub fn max_partitions(&self) -> usize {
        self.partitions.len()
    }

    /// Training set made of the first `k` partitions.
    pub fn training<'a>(&self, entries: &'a [CorpusEntry], k: usize) -> &'a [CorpusEntry] {
        let end = if k == 0 {
            0
        } else {
            self.partitions[k.min(self.partitions.len()) - 1].end
        };
        &entries[..end]
    }

    pub fn test_set<'a>(&self, entries: &'a [CorpusEntry]) -> &'a [CorpusEntry] {
        &entries[self.test.clone()]
    }
}

/// Splits one speaker's entries.
///
/// The test set starts at the `test_anchor_count`-th anchor utterance from
/// the end and runs to the end of the recording, so it holds the last anchor
/// utterances plus every other utterance recorded among or after them.
pub fn split_entries(
    entries: &[CorpusEntry],
    config: &SplitConfig,
) -> Result<ExperimentSplit, CorpusError> {
    if config.partition_size == 0 {
        return Err(CorpusError::InsufficientData(
            "partition size must be positive".to_string(),
        ));
    }
    let anchors: Vec<usize> = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.automatic_frame.frame_type == config.anchor_frame_type)
        .map(|(i, _)| i)
        .collect();
    if config.test_anchor_count == 0 || anchors.len() < config.test_anchor_count {
        return Err(CorpusError::InsufficientData(format!(
            "need {} {} utterances for the test set, found {}",
            config.test_anchor_count,
            config.anchor_frame_type,
            anchors.len()
        )));
    }
    let boundary = anchors[anchors.len() - config.test_anchor_count];
    let n_partitions = boundary / config.partition_size;
    let partitions = (0..n_partitions)
        .map(|k| k * config.partition_size..(k + 1) * config.partition_size)
        .collect();
    Ok(ExperimentSplit {
        partitions,
        dropped: n_partitions * config.partition_size..boundary,
        test: boundary..entries.len(),
    })
}

pub fn split_experiment(
    corpus: &Corpus,
    speaker: &str,
    config: &SplitConfig,
) -> Result<ExperimentSplit, CorpusError> {
    split_entries(corpus.entries(speaker)?, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Frame, Utterance};
    use proptest::prelude::*;

    fn entries(types: &[&str]) -> Vec<CorpusEntry> {
        types
            .iter()
            .enumerate()
            .map(|(i, t)| CorpusEntry {
                utterance: Utterance {
                    id: format!("u{i}"),
                    speaker: "s".into(),
                    ordinal: i as u64,
                    orthographic: vec!["x".into()],
                    phonemic: vec!["x".into()],
                },
                automatic_frame: Frame::new(t),
                oracle_frame: Frame::new(t),
            })
            .collect()
    }

    #[test]
    fn exactly_the_test_set() {
        let e = entries(&["movecard"; 20]);
        let split = split_entries(&e, &SplitConfig::default()).unwrap();
        assert!(split.partitions.is_empty());
        assert_eq!(split.test, 0..20);
        assert!(split.training(&e, 0).is_empty());
    }

    #[test]
    fn ragged_partition_dropped() {
        let mut types = vec!["movecard"; 70];
        types.extend(["movecard"; 20]);
        let e = entries(&types);
        let split = split_entries(&e, &SplitConfig::default()).unwrap();
        // 70 / 25 = 2 whole partitions, 70 - 50 = 20 dropped
        assert_eq!(split.partitions, vec![0..25, 25..50]);
        assert_eq!(split.dropped, 50..70);
        assert_eq!(split.test, 70..90);
    }

    #[test]
    fn interleaved_dealcards_join_the_test_set() {
        let mut types = vec!["movecard", "dealcard", "movecard"];
        for _ in 0..3 {
            types.extend(["movecard", "dealcard"]);
        }
        types.push("dealcard");
        let e = entries(&types);
        let config = SplitConfig {
            partition_size: 1,
            test_anchor_count: 2,
            ..SplitConfig::default()
        };
        let split = split_entries(&e, &config).unwrap();
        // anchors at 0,2,3,5,7; the 2nd from last is index 5
        assert_eq!(split.test, 5..10);
        assert_eq!(split.partitions.len(), 5);
    }

    #[test]
    fn too_few_anchors() {
        let e = entries(&["movecard"; 19]);
        assert!(matches!(
            split_entries(&e, &SplitConfig::default()),
            Err(CorpusError::InsufficientData(_))
        ));
    }

    proptest! {
        #[test]
        fn split_covers_sequence(
            types in proptest::collection::vec(prop::bool::weighted(0.7), 20..200),
            size in 1usize..40,
            anchors in 1usize..20,
        ) {
            let names: Vec<&str> = types.iter().map(|m| if *m { "movecard" } else { "dealcard" }).collect();
            let e = entries(&names);
            let config = SplitConfig { partition_size: size, test_anchor_count: anchors, ..SplitConfig::default() };
            match split_entries(&e, &config) {
                Ok(split) => {
                    let mut covered = Vec::new();
                    for p in &split.partitions {
                        prop_assert_eq!(p.len(), size);
                        covered.extend(p.clone());
                    }
                    covered.extend(split.dropped.clone());
                    covered.extend(split.test.clone());
                    prop_assert_eq!(covered, (0..e.len()).collect::<Vec<_>>());
                    prop_assert!(split.dropped.len() < size);
                    let test_anchors = split.test_set(&e).iter()
                        .filter(|x| x.automatic_frame.frame_type == "movecard").count();
                    prop_assert_eq!(test_anchors, anchors);
                    prop_assert_eq!(split.test_set(&e)[0].automatic_frame.frame_type.as_str(), "movecard");
                }
                Err(_) => prop_assert!(names.iter().filter(|n| **n == "movecard").count() < anchors),
            }
        }
    }
}
