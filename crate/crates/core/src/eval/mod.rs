//! Slot-level scoring, learning curves and significance testing.

mod experiment;
mod randomization;
mod report;
mod score;

pub use experiment::{evaluate, run_learning_curve, CurvePoint, ExperimentConfig, LearningCurve, RunResult};
pub use randomization::{approx_randomization_test, exhaustive_randomization_test, SignificanceError};
pub use report::{write_frame_type_csv, write_runs_csv, write_summary_csv, RUN_COLUMNS, SUMMARY_COLUMNS};
pub use score::{frame_type_counts, micro_average, score_missing, score_pair, Prf, SlotCounts};
