//! End-to-end training and decoding of one configuration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{segment, CorpusEntry, CorpusError, Frame, FrameSchema, Granularity, SegmentedCommand, Utterance};
use crate::decode::{decode, map_unknown_units, DecodeOptions, DecodeResult, UnknownUnitPolicy};
use crate::hmm::{build_model, train, HmmError, HmmModel, HmmOptions, SharingConfig, TrainingTrace};
use crate::nmf::{induce_association_map, nmf_decode, AssociationMap, InductionOptions, NmfConfig, NmfError};
use crate::seeds::derive_seed;

#[derive(Debug, Error)]
pub enum SystemError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Nmf(#[from] NmfError),
    #[error(transparent)]
    Hmm(#[from] HmmError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    #[default]
    Hmm,
    NmfBaseline,
}

impl DecoderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecoderKind::Hmm => "hmm",
            DecoderKind::NmfBaseline => "nmf-baseline",
        }
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hmm" => Ok(DecoderKind::Hmm),
            "nmf" | "nmf-baseline" => Ok(DecoderKind::NmfBaseline),
            other => Err(format!("unknown decoder {other:?}")),
        }
    }
}

/// Everything that determines a trained system besides data and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub granularity: Granularity,
    pub sharing: SharingConfig,
    pub decoder: DecoderKind,
    /// NMF rank; defaults to the number of frame rows.
    pub nmf_rank: Option<usize>,
    pub nmf_iterations: usize,
    pub nmf_tolerance: f64,
    pub hmm_iterations: usize,
    pub hmm: HmmOptions,
    pub decode: DecodeOptions,
    pub nmf_threshold: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let nmf = NmfConfig::default();
        SystemConfig {
            granularity: Granularity::WordUnigram,
            sharing: SharingConfig::full(),
            decoder: DecoderKind::Hmm,
            nmf_rank: nmf.rank,
            nmf_iterations: nmf.iterations,
            nmf_tolerance: nmf.tolerance,
            hmm_iterations: crate::hmm::DEFAULT_ITERATIONS,
            hmm: HmmOptions::default(),
            decode: DecodeOptions::default(),
            nmf_threshold: crate::nmf::DEFAULT_NMF_THRESHOLD,
        }
    }
}

impl SystemConfig {
    pub fn nmf_config(&self) -> NmfConfig {
        NmfConfig { rank: self.nmf_rank, iterations: self.nmf_iterations, tolerance: self.nmf_tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedSystem {
    pub config: SystemConfig,
    pub schema: FrameSchema,
    pub association: AssociationMap,
    pub nmf_objective: Vec<f64>,
    pub hmm: Option<HmmModel>,
    pub trace: Option<TrainingTrace>,
}

pub fn segment_entries(entries: &[CorpusEntry], granularity: Granularity) -> Result<Vec<SegmentedCommand>, CorpusError> {
    entries.iter().map(|e| segment(&e.utterance, granularity)).collect()
}

/// Trains the association map and, for the HMM decoder, the slot-value HMM.
pub fn train_system(
    entries: &[CorpusEntry],
    schema: &FrameSchema,
    config: &SystemConfig,
    seed: u64,
) -> Result<TrainedSystem, SystemError> {
    let commands = segment_entries(entries, config.granularity)?;
    let command_refs: Vec<&SegmentedCommand> = commands.iter().collect();
    let frames: Vec<&Frame> = entries.iter().map(|e| &e.automatic_frame).collect();
    let hmm_decoder = config.decoder == DecoderKind::Hmm;
    let options = InductionOptions {
        e_sharing: config.sharing.e_sharing_nmf,
        filler_column: config.sharing.fillers.enabled(),
    };
    let nmf_seed = derive_seed(seed, "nmf", "", 0, 0);
    let (association, factorization) =
        induce_association_map(&frames, &command_refs, schema, options, &config.nmf_config(), nmf_seed)?;
    let (hmm, trace) = if hmm_decoder {
        let initial = build_model(schema, &association, config.sharing, config.hmm, &frames)?;
        let (model, trace) = train(initial, &command_refs, &frames, config.hmm_iterations)?;
        (Some(model), Some(trace))
    } else {
        (None, None)
    };
    Ok(TrainedSystem {
        config: config.clone(),
        schema: schema.clone(),
        association,
        nmf_objective: factorization.objective,
        hmm,
        trace,
    })
}

impl TrainedSystem {
    pub fn decode_command(&self, command: &SegmentedCommand) -> Result<Frame, SystemError> {
        match &self.hmm {
            Some(model) => Ok(decode(model, &self.schema, command, &self.config.decode)?.frame),
            None => {
                let mut mapped = command.clone();
                mapped.units = map_unknown_units(&command.units, &self.association.vocabulary, self.config.decode.unknown_units);
                if mapped.units.is_empty() && self.config.decode.unknown_units == UnknownUnitPolicy::Ignore {
                    return Err(HmmError::EmptyCommand.into());
                }
                Ok(nmf_decode(&mapped, &self.association, &self.schema, self.config.nmf_threshold)?)
            }
        }
    }

    /// Decodes with the HMM and reports the path and totals.
    pub fn explain_command(&self, command: &SegmentedCommand) -> Result<Option<DecodeResult>, SystemError> {
        match &self.hmm {
            Some(model) => Ok(Some(decode(model, &self.schema, command, &self.config.decode)?)),
            None => Ok(None),
        }
    }

    pub fn decode_utterance(&self, utterance: &Utterance) -> Result<Frame, SystemError> {
        self.decode_command(&segment(utterance, self.config.granularity)?)
    }
}
