//! The `frameforge` command-line tool: corpus segmentation, training,
//! decoding, scoring, experiment grids and synthetic corpus generation.

pub mod config;
pub mod manifest;

mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use frameforge::corpus::Granularity;
use frameforge::system::DecoderKind;

pub use commands::run;

#[derive(Debug, Parser)]
#[command(name = "frameforge", version, about = "Weakly supervised semantic frame induction")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed for every stochastic component.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file or directory; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "FRAMEFORGE_JOBS")]
    pub jobs: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Frame schema JSON; the Patience schema when omitted.
    #[arg(long, global = true)]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the units of every corpus command, one command per line.
    Segment {
        input: PathBuf,
        #[arg(long, default_value = "word-unigram")]
        granularity: Granularity,
    },
    /// Train a system on one speaker's data and write it as JSON.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        speaker: String,
        #[arg(long)]
        granularity: Option<Granularity>,
        #[arg(long)]
        decoder: Option<DecoderKind>,
        /// Train on the first k partitions of the experiment split instead of all utterances.
        #[arg(long)]
        partitions: Option<usize>,
    },
    /// Decode commands with a trained system, one JSON frame per input line.
    ///
    /// Input lines are either corpus records or whitespace-separated phonemic words.
    Decode {
        #[arg(long)]
        model: PathBuf,
        input: PathBuf,
        /// Add the state path and per-slot totals.
        #[arg(long)]
        explain: bool,
    },
    /// Score induced frames against oracle frames, line by line.
    Score {
        induced: PathBuf,
        /// Frames or corpus records (their oracle frames are used).
        oracle: PathBuf,
    },
    /// Run learning curves for every cell of an experiment grid.
    Experiment {
        #[arg(long)]
        corpus: PathBuf,
        /// Recompute cells even when a matching manifest exists.
        #[arg(long)]
        force: bool,
    },
    /// Generate a synthetic Patience corpus.
    Generate {
        #[arg(long, default_value_t = 175)]
        n: usize,
        #[arg(long, default_value = "synthetic")]
        speaker: String,
        /// From this utterance on, the king is called by a synonym.
        #[arg(long)]
        king_shift: Option<usize>,
    },
}
