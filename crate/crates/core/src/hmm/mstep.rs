use std::collections::BTreeMap;

use super::estep::ExpectedCounts;
use super::model::{FillerMode, HmmModel, StateKind, PROB_FLOOR};

/// Re-estimates `current` from `counts`, floored at [`PROB_FLOOR`]. Entries
/// outside `support` stay exactly zero; a row without counts is kept as is.
fn reestimate_row(current: &mut [f64], counts: &[f64], support: &[usize]) {
    let total: f64 = support.iter().map(|&j| counts[j]).sum();
    if !(total > 0.0) {
        return;
    }
    for &j in support {
        current[j] = (counts[j] / total).max(PROB_FLOOR);
    }
    let z: f64 = support.iter().map(|&j| current[j]).sum();
    for &j in support {
        current[j] /= z;
    }
}

/// Maximum-likelihood update followed by the configured sharing passes.
pub fn m_step(model: &HmmModel, counts: &ExpectedCounts) -> HmmModel {
    let mut next = model.clone();
    let n = model.n_states();
    let all: Vec<usize> = (0..n).collect();
    reestimate_row(&mut next.initial, &counts.initial, &all);
    for i in 0..n {
        reestimate_row(&mut next.transitions[i], &counts.transitions[i], &model.successors[i]);
    }
    let units: Vec<usize> = (0..model.vocabulary.len()).collect();
    for i in 0..n {
        reestimate_row(&mut next.emissions[i], &counts.emissions[i], &units);
    }

    if next.config.t_sharing {
        apply_transition_sharing(&mut next);
    }
    if next.config.e_sharing_hmm {
        let groups = shared_value_groups(&next);
        apply_expression_sharing(&mut next, &groups);
    }
    match next.config.fillers {
        FillerMode::AllShared => {
            let groups = filler_groups(&next, false);
            apply_expression_sharing(&mut next, &groups);
        }
        FillerMode::SlotShared => {
            let groups = filler_groups(&next, true);
            apply_expression_sharing(&mut next, &groups);
        }
        FillerMode::None | FillerMode::NonShared => {}
    }
    next
}

/// Sharing class of a state: its frame type, kind and slot, but not its value.
fn class_of(model: &HmmModel, i: usize) -> String {
    let s = &model.states[i];
    match &s.kind {
        StateKind::Value(sv) => format!("{}/value:{}", sv.frame_type, sv.slot),
        StateKind::FrameType(ft) => format!("{ft}/type"),
        StateKind::Filler { .. } => format!(
            "{}/filler:{}",
            s.frame_type,
            s.slot.as_deref().unwrap_or_default()
        ),
    }
}

/// Group key of the transition `i → j`: the classes of both ends.
pub fn transition_group(model: &HmmModel, i: usize, j: usize) -> (String, String) {
    (class_of(model, i), class_of(model, j))
}

/// Averages the group entries of `probs` and renormalizes each row. Entries
/// of one group end up bit-identical across rows of the same class.
fn share_rows(rows: &mut [&mut Vec<f64>], supports: &[Vec<usize>], keys: &[Vec<usize>], n_groups: usize) {
    let mut sum = vec![0.0; n_groups];
    let mut count = vec![0usize; n_groups];
    for (r, row) in rows.iter().enumerate() {
        for (k, &j) in supports[r].iter().enumerate() {
            sum[keys[r][k]] += row[j];
            count[keys[r][k]] += 1;
        }
    }
    let mean: Vec<f64> = sum
        .iter()
        .zip(&count)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    for (r, row) in rows.iter_mut().enumerate() {
        let mut multiplicity: BTreeMap<usize, usize> = BTreeMap::new();
        for &g in &keys[r] {
            *multiplicity.entry(g).or_default() += 1;
        }
        let z: f64 = multiplicity.iter().map(|(&g, &m)| mean[g] * m as f64).sum();
        for (k, &j) in supports[r].iter().enumerate() {
            row[j] = mean[keys[r][k]] / z;
        }
    }
}

/// Ties transitions (and initial probabilities) slot-wise: every transition
/// between the same pair of slot classes takes the group's mean, then rows
/// are renormalized.
pub fn apply_transition_sharing(model: &mut HmmModel) {
    let n = model.n_states();
    let mut ids: BTreeMap<(String, String), usize> = BTreeMap::new();
    for i in 0..n {
        for &j in &model.successors[i] {
            ids.entry(transition_group(model, i, j)).or_insert(0);
        }
    }
    for (k, v) in ids.values_mut().enumerate() {
        *v = k;
    }
    let keys: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            model.successors[i]
                .iter()
                .map(|&j| ids[&transition_group(model, i, j)])
                .collect()
        })
        .collect();
    let supports = model.successors.clone();
    let mut rows: Vec<&mut Vec<f64>> = model.transitions.iter_mut().collect();
    share_rows(&mut rows, &supports, &keys, ids.len());

    let mut init_ids: BTreeMap<String, usize> = BTreeMap::new();
    for j in 0..n {
        init_ids.entry(class_of(model, j)).or_insert(0);
    }
    for (k, v) in init_ids.values_mut().enumerate() {
        *v = k;
    }
    let init_keys = vec![(0..n).map(|j| init_ids[&class_of(model, j)]).collect::<Vec<_>>()];
    let init_support = vec![(0..n).collect::<Vec<_>>()];
    let mut initial = std::mem::take(&mut model.initial);
    share_rows(&mut [&mut initial], &init_support, &init_keys, init_ids.len());
    model.initial = initial;
}

/// Groups of corresponding slot-value states across each shared expression set.
pub fn shared_value_groups(model: &HmmModel) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<(String, usize, String), Vec<usize>> = BTreeMap::new();
    for (i, s) in model.states.iter().enumerate() {
        if let StateKind::Value(sv) = &s.kind {
            if let Some(set) = shared_set_index(model, &sv.frame_type, &sv.slot) {
                groups
                    .entry((sv.frame_type.clone(), set, sv.value.clone()))
                    .or_default()
                    .push(i);
            }
        }
    }
    groups.into_values().filter(|g| g.len() > 1).collect()
}

fn shared_set_index(model: &HmmModel, frame_type: &str, slot: &str) -> Option<usize> {
    model
        .shared_sets
        .iter()
        .position(|s| s.frame_type == frame_type && s.slots.iter().any(|x| x == slot))
}

/// Filler states grouped all together, or per owning slot.
pub fn filler_groups(model: &HmmModel, per_slot: bool) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, s) in model.states.iter().enumerate() {
        if s.is_filler() {
            let key = if per_slot {
                format!("{}/{}", s.frame_type, s.slot.as_deref().unwrap_or_default())
            } else {
                String::new()
            };
            groups.entry(key).or_default().push(i);
        }
    }
    groups.into_values().filter(|g| g.len() > 1).collect()
}

/// Replaces the emission distribution of every state in each group by the
/// group's normalized mean.
pub fn apply_expression_sharing(model: &mut HmmModel, groups: &[Vec<usize>]) {
    let v = model.vocabulary.len();
    for group in groups {
        let mut mean = vec![0.0; v];
        for &i in group {
            for (m, e) in mean.iter_mut().zip(&model.emissions[i]) {
                *m += e;
            }
        }
        let z: f64 = mean.iter().sum();
        for m in mean.iter_mut() {
            *m /= z;
        }
        for &i in group {
            model.emissions[i].clone_from(&mean);
        }
    }
}
