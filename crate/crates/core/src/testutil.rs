//! Shared fixtures for unit tests.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Frame, FrameSchema};
use crate::hmm::{build_model, training_slot_values, HmmModel, HmmOptions, SharingConfig};
use crate::nmf::{AssociationMap, FrameRow};

pub fn map_for(frames: &[&Frame], units: &[&str], filler: bool) -> AssociationMap {
    let mut cols: Vec<FrameRow> = training_slot_values(frames).into_iter().map(FrameRow::Value).collect();
    if frames.iter().any(|f| f.frame_type == "dealcard") {
        cols.push(FrameRow::FrameType("dealcard".into()));
    }
    if filler {
        cols.push(FrameRow::Filler);
    }
    AssociationMap {
        vocabulary: units.iter().copied().collect(),
        matrix: Array2::from_shape_fn((units.len(), cols.len()), |(i, j)| 1.0 + ((3 * i + j) % 4) as f64),
        columns: cols,
    }
}

/// Replaces every allowed parameter by a random positive value, keeping the structure.
pub fn randomize(model: &mut HmmModel, rng: &mut ChaCha8Rng) {
    let n = model.n_states();
    let mut norm = |row: &mut Vec<f64>, support: &[usize]| {
        for &j in support {
            row[j] = rng.random_range(0.05..1.0);
        }
        let z: f64 = support.iter().map(|&j| row[j]).sum();
        for &j in support {
            row[j] /= z;
        }
    };
    let all: Vec<usize> = (0..n).collect();
    norm(&mut model.initial, &all);
    for i in 0..n {
        let support = model.successors[i].clone();
        norm(&mut model.transitions[i], &support);
    }
    let units: Vec<usize> = (0..model.vocabulary.len()).collect();
    for i in 0..n {
        norm(&mut model.emissions[i], &units);
    }
}

pub fn toy_model(frames: &[&Frame], units: &[&str], config: SharingConfig, seed: u64) -> HmmModel {
    let map = map_for(frames, units, config.fillers.enabled());
    let mut m = build_model(&FrameSchema::patience(), &map, config, HmmOptions::default(), frames).unwrap();
    randomize(&mut m, &mut ChaCha8Rng::seed_from_u64(seed));
    m
}

