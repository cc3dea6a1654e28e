use std::path::Path;

use anyhow::{bail, Context, Result};
use frameforge::corpus::{Granularity, SplitConfig};
use frameforge::eval::ExperimentConfig;
use frameforge::hmm::{FillerMode, SharingConfig};
use frameforge::system::{DecoderKind, SystemConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Reads a JSON config file, rejecting unknown keys.
pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
}

/// Experiment grid: the cross product of the listed values.
///
/// ```json
/// {
///   "granularities": ["word-unigram"],
///   "decoders": ["hmm", "nmf-baseline"],
///   "fillers": ["none", "non-shared", "all-shared", "slot-shared"],
///   "t_sharing": [false, true],
///   "e_sharing_nmf": [false, true],
///   "e_sharing_hmm": [false, true],
///   "speakers": null,
///   "runs": 10,
///   "seed": 0,
///   "split": {"partition_size": 25, "test_anchor_count": 20, "anchor_frame_type": "movecard"},
///   "max_partitions": null,
///   "system": {}
/// }
/// ```
///
/// `system` holds every other [`SystemConfig`] field; its granularity,
/// decoder and sharing are overridden per cell. Cells of the NMF baseline do
/// not depend on fillers, T-sharing or HMM E-sharing and are generated once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub granularities: Vec<Granularity>,
    pub decoders: Vec<DecoderKind>,
    pub fillers: Vec<FillerMode>,
    pub t_sharing: Vec<bool>,
    pub e_sharing_nmf: Vec<bool>,
    pub e_sharing_hmm: Vec<bool>,
    /// Speakers to run; all speakers of the corpus when absent.
    pub speakers: Option<Vec<String>>,
    pub runs: usize,
    pub seed: u64,
    pub split: SplitConfig,
    pub max_partitions: Option<usize>,
    pub system: SystemConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            granularities: vec![Granularity::WordUnigram],
            decoders: vec![DecoderKind::Hmm],
            fillers: FillerMode::ALL.to_vec(),
            t_sharing: vec![false, true],
            e_sharing_nmf: vec![false, true],
            e_sharing_hmm: vec![false, true],
            speakers: None,
            runs: 10,
            seed: 0,
            split: SplitConfig::default(),
            max_partitions: None,
            system: SystemConfig::default(),
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, empty) in [
            ("granularities", self.granularities.is_empty()),
            ("decoders", self.decoders.is_empty()),
            ("fillers", self.fillers.is_empty()),
            ("t_sharing", self.t_sharing.is_empty()),
            ("e_sharing_nmf", self.e_sharing_nmf.is_empty()),
            ("e_sharing_hmm", self.e_sharing_hmm.is_empty()),
        ] {
            if empty {
                bail!("grid field `{name}` is empty");
            }
        }
        if self.runs == 0 {
            bail!("runs must be positive");
        }
        Ok(())
    }

    /// Expands the grid into experiment cells, in a fixed order without duplicates.
    pub fn cells(&self) -> Vec<ExperimentConfig> {
        let mut out: Vec<ExperimentConfig> = Vec::new();
        for &granularity in &self.granularities {
            for &decoder in &self.decoders {
                for &fillers in &self.fillers {
                    for &t_sharing in &self.t_sharing {
                        for &e_sharing_nmf in &self.e_sharing_nmf {
                            for &e_sharing_hmm in &self.e_sharing_hmm {
                                let mut sharing = SharingConfig { fillers, t_sharing, e_sharing_nmf, e_sharing_hmm };
                                if decoder == DecoderKind::NmfBaseline {
                                    let fillers = if fillers.enabled() { FillerMode::NonShared } else { FillerMode::None };
                                    sharing = SharingConfig { fillers, e_sharing_nmf, ..SharingConfig::none() };
                                }
                                let cell = ExperimentConfig {
                                    system: SystemConfig { granularity, decoder, sharing, ..self.system.clone() },
                                    runs: self.runs,
                                    seed: self.seed,
                                    split: self.split.clone(),
                                    max_partitions: self.max_partitions,
                                };
                                if !out.contains(&cell) {
                                    out.push(cell);
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_32_hmm_cells() {
        let g = GridConfig::default();
        assert_eq!(g.cells().len(), 32);
        let both = GridConfig { decoders: vec![DecoderKind::Hmm, DecoderKind::NmfBaseline], ..GridConfig::default() };
        assert_eq!(both.cells().len(), 36);
        let hashes: std::collections::BTreeSet<String> = both.cells().iter().map(|c| c.config_hash()).collect();
        assert_eq!(hashes.len(), 36);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<GridConfig>(r#"{"runs": 2, "typo": 1}"#).is_err());
        assert!(serde_json::from_str::<GridConfig>(r#"{"system": {"hmm_iters": 3}}"#).is_err());
        let g: GridConfig = serde_json::from_str(r#"{"runs": 2, "fillers": ["slot-shared"]}"#).unwrap();
        assert_eq!(g.cells().len(), 8);
    }
}
