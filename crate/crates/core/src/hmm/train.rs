use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estep::{e_step, ExpectedCounts};
use super::model::HmmModel;
use super::mstep::m_step;
use super::HmmError;
use crate::corpus::{Frame, SegmentedCommand};

/// Default number of Baum-Welch iterations.
pub const DEFAULT_ITERATIONS: usize = 20;

/// Utterances per E-step work chunk. Counts are summed within a chunk and
/// then across chunks in order, so results do not depend on thread count.
const CHUNK: usize = 8;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    /// Supervised log-likelihood of the training slice under the parameters
    /// entering each iteration.
    pub log_likelihood: Vec<f64>,
    /// Utterances skipped as unexplainable in each iteration.
    pub skipped: Vec<usize>,
}

impl TrainingTrace {
    pub fn iterations(&self) -> usize {
        self.log_likelihood.len()
    }
}

/// One E-step over the whole slice: summed counts, supervised log-likelihood
/// and number of skipped utterances.
pub fn accumulate(
    model: &HmmModel,
    observations: &[Vec<usize>],
    frames: &[&Frame],
) -> (ExpectedCounts, f64, usize) {
    let chunks: Vec<(ExpectedCounts, f64, usize)> = observations
        .par_chunks(CHUNK)
        .zip(frames.par_chunks(CHUNK))
        .map(|(obs, frs)| {
            let mut counts = ExpectedCounts::zeros(model);
            let mut ll = 0.0;
            let mut skipped = 0;
            for (o, f) in obs.iter().zip(frs) {
                match e_step(model, o, f) {
                    Ok(u) => {
                        counts.add(&u.counts);
                        ll += u.supervised_log_likelihood;
                    }
                    Err(_) => skipped += 1,
                }
            }
            (counts, ll, skipped)
        })
        .collect();
    let mut total = ExpectedCounts::zeros(model);
    let mut ll = 0.0;
    let mut skipped = 0;
    for (c, l, s) in &chunks {
        total.add(c);
        ll += l;
        skipped += s;
    }
    (total, ll, skipped)
}

/// Frame-supervised Baum-Welch.
pub fn train(
    model: HmmModel,
    commands: &[&SegmentedCommand],
    frames: &[&Frame],
    iterations: usize,
) -> Result<(HmmModel, TrainingTrace), HmmError> {
    if commands.is_empty() {
        return Err(HmmError::EmptyTraining);
    }
    if commands.len() != frames.len() {
        return Err(HmmError::InvalidArgument(format!(
            "{} commands for {} frames",
            commands.len(),
            frames.len()
        )));
    }
    let observations: Vec<Vec<usize>> = commands
        .iter()
        .map(|c| model.encode(&c.units))
        .collect::<Result<_, _>>()?;
    let mut model = model;
    let mut trace = TrainingTrace::default();
    for _ in 0..iterations {
        let (counts, ll, skipped) = accumulate(&model, &observations, frames);
        if skipped == observations.len() {
            return Err(HmmError::Unexplainable);
        }
        if skipped > 0 {
            log::warn!("{skipped} unexplainable utterances skipped in E-step");
        }
        trace.log_likelihood.push(ll);
        trace.skipped.push(skipped);
        model = m_step(&model, &counts);
    }
    Ok((model, trace))
}
