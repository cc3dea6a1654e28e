use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::score::{frame_type_counts, micro_average, score_missing, score_pair, Prf, SlotCounts};
use crate::corpus::{split_entries, Corpus, CorpusEntry, FrameSchema, SplitConfig};
use crate::seeds::{derive_seed, hex_digest};
use crate::system::{train_system, SystemConfig, SystemError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    /// Runs per training size, each with its own derived seed.
    pub runs: usize,
    pub seed: u64,
    pub split: SplitConfig,
    /// Upper bound on the number of training partitions.
    pub max_partitions: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            system: SystemConfig::default(),
            runs: 10,
            seed: 0,
            split: SplitConfig::default(),
            max_partitions: None,
        }
    }
}

impl ExperimentConfig {
    /// Short digest identifying the system configuration.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(&self.system).expect("config serializes");
        hex_digest(json.as_bytes())[..12].to_string()
    }
}

/// Outcome of one (training size, run) job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub training_size: usize,
    pub run: usize,
    pub counts: SlotCounts,
    /// Counts per test instance, in test-set order.
    pub instances: Vec<SlotCounts>,
    /// Slot counts grouped by the oracle frame type.
    pub by_frame_type: BTreeMap<String, SlotCounts>,
    /// Frame-type identification counts per frame type.
    pub frame_type_identification: BTreeMap<String, SlotCounts>,
    /// Test utterances the system could not decode.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub training_size: usize,
    pub prf: Prf,
    pub counts: SlotCounts,
    pub runs: Vec<RunResult>,
}

impl CurvePoint {
    pub fn frame_type_prf(&self, frame_type: &str) -> Prf {
        let c: Vec<SlotCounts> = self.runs.iter().filter_map(|r| r.by_frame_type.get(frame_type).copied()).collect();
        micro_average(&c)
    }

    pub fn identification_prf(&self, frame_type: &str) -> Prf {
        let c: Vec<SlotCounts> = self
            .runs
            .iter()
            .filter_map(|r| r.frame_type_identification.get(frame_type).copied())
            .collect();
        micro_average(&c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub speaker: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub test_size: usize,
    pub points: Vec<CurvePoint>,
}

impl LearningCurve {
    pub fn point(&self, training_size: usize) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.training_size == training_size)
    }
}

/// Trains on `train` and scores every test entry.
pub fn evaluate(
    train: &[CorpusEntry],
    test: &[CorpusEntry],
    schema: &FrameSchema,
    config: &SystemConfig,
    seed: u64,
) -> Result<RunResult, SystemError> {
    let system = train_system(train, schema, config, seed)?;
    let mut result = RunResult {
        training_size: train.len(),
        run: 0,
        counts: SlotCounts::default(),
        instances: Vec::with_capacity(test.len()),
        by_frame_type: BTreeMap::new(),
        frame_type_identification: BTreeMap::new(),
        failures: 0,
    };
    let types: Vec<&str> = schema.frame_types.iter().map(|t| t.name.as_str()).collect();
    for entry in test {
        let oracle = &entry.oracle_frame;
        let induced = match system.decode_utterance(&entry.utterance) {
            Ok(f) => Some(f),
            Err(e) => {
                log::debug!("{}: {e}", entry.utterance.id);
                result.failures += 1;
                None
            }
        };
        let counts = match &induced {
            Some(f) => score_pair(f, oracle),
            None => score_missing(oracle),
        };
        result.counts += counts;
        result.instances.push(counts);
        *result.by_frame_type.entry(oracle.frame_type.clone()).or_default() += counts;
        for t in &types {
            *result.frame_type_identification.entry(t.to_string()).or_default() +=
                frame_type_counts(induced.as_ref(), oracle, t);
        }
    }
    Ok(result)
}

/// Learning curve of one speaker: for each training size, `runs` independently
/// seeded systems are trained and scored on the fixed test set. Jobs run in
/// parallel; results do not depend on scheduling.
pub fn run_learning_curve(
    corpus: &Corpus,
    speaker: &str,
    schema: &FrameSchema,
    config: &ExperimentConfig,
) -> Result<LearningCurve, SystemError> {
    let entries = corpus.entries(speaker)?;
    let split = split_entries(entries, &config.split)?;
    let max_k = config.max_partitions.map_or(split.max_partitions(), |m| m.min(split.max_partitions()));
    let test = split.test_set(entries);
    let jobs: Vec<(usize, usize)> = (1..=max_k).flat_map(|k| (0..config.runs).map(move |r| (k, r))).collect();
    let results: Vec<Result<RunResult, SystemError>> = jobs
        .par_iter()
        .map(|&(k, run)| {
            let seed = derive_seed(config.seed, "system", speaker, k, run);
            let mut r = evaluate(split.training(entries, k), test, schema, &config.system, seed)?;
            r.run = run;
            Ok(r)
        })
        .collect();
    let mut points: Vec<CurvePoint> = Vec::new();
    for ((k, _), r) in jobs.iter().zip(results) {
        let r = r?;
        if points.last().is_none_or(|p| p.training_size != r.training_size) {
            points.push(CurvePoint {
                training_size: k * config.split.partition_size,
                prf: Prf::default(),
                counts: SlotCounts::default(),
                runs: Vec::new(),
            });
        }
        points.last_mut().expect("pushed").runs.push(r);
    }
    for p in &mut points {
        let counts: Vec<SlotCounts> = p.runs.iter().map(|r| r.counts).collect();
        p.counts = counts.iter().sum();
        p.prf = micro_average(&counts);
    }
    Ok(LearningCurve {
        speaker: speaker.to_string(),
        config_hash: config.config_hash(),
        config: config.clone(),
        test_size: test.len(),
        points,
    })
}
