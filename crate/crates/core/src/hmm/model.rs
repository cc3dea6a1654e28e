use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::HmmError;
use crate::corpus::{Frame, FrameSchema, SharedSet, SlotValue};
use crate::nmf::{AssociationMap, FrameRow};
use crate::vocab::Vocabulary;

/// Floor applied to every re-estimated probability before normalization.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FillerMode {
    #[default]
    None,
    NonShared,
    AllShared,
    SlotShared,
}

impl FillerMode {
    pub const ALL: [FillerMode; 4] = [
        FillerMode::None,
        FillerMode::NonShared,
        FillerMode::AllShared,
        FillerMode::SlotShared,
    ];

    pub fn enabled(self) -> bool {
        self != FillerMode::None
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FillerMode::None => "none",
            FillerMode::NonShared => "non-shared",
            FillerMode::AllShared => "all-shared",
            FillerMode::SlotShared => "slot-shared",
        }
    }
}

impl fmt::Display for FillerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FillerMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "slot" => Ok(FillerMode::SlotShared),
            "all" => Ok(FillerMode::AllShared),
            "non" => Ok(FillerMode::NonShared),
            _ => FillerMode::ALL
                .into_iter()
                .find(|m| m.as_str() == s)
                .ok_or_else(|| format!("unknown filler mode `{s}`")),
        }
    }
}

/// The four system variables: filler states, T-sharing and E-sharing in NMF/HMM.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharingConfig {
    pub fillers: FillerMode,
    pub t_sharing: bool,
    pub e_sharing_nmf: bool,
    pub e_sharing_hmm: bool,
}

impl SharingConfig {
    pub fn none() -> Self {
        Self::default()
    }

    /// Slot-shared fillers with every form of sharing on.
    pub fn full() -> Self {
        SharingConfig {
            fillers: FillerMode::SlotShared,
            t_sharing: true,
            e_sharing_nmf: true,
            e_sharing_hmm: true,
        }
    }

    /// Every combination of the four variables (32 cells).
    pub fn grid() -> Vec<SharingConfig> {
        let mut out = Vec::new();
        for fillers in FillerMode::ALL {
            for t_sharing in [false, true] {
                for e_sharing_nmf in [false, true] {
                    for e_sharing_hmm in [false, true] {
                        out.push(SharingConfig {
                            fillers,
                            t_sharing,
                            e_sharing_nmf,
                            e_sharing_hmm,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Structural options not covered by the sharing grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HmmOptions {
    /// Filler states may emit several units in a row.
    pub filler_self_loop: bool,
    /// Share of each incoming transition routed through the target's filler.
    pub filler_entry_prob: f64,
    pub supervision: Supervision,
}

/// How the automatic frame restricts the E-step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Supervision {
    /// Unrestricted forward-backward; posteriors of excluded states are then
    /// zeroed and each time step renormalized.
    #[default]
    PosteriorZeroing,
    /// Forward-backward over the paths that only visit permitted states.
    ConstrainedPaths,
}

impl Default for HmmOptions {
    fn default() -> Self {
        HmmOptions {
            filler_self_loop: true,
            filler_entry_prob: 0.5,
            supervision: Supervision::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Value(SlotValue),
    /// Single state of a frame type without slots.
    FrameType(String),
    /// Filler preceding the slot-value state at index `owner`.
    Filler { owner: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct State {
    pub kind: StateKind,
    pub frame_type: String,
    /// Slot of the state (or of the filler's owner).
    pub slot: Option<String>,
    pub label: String,
}

impl State {
    pub fn is_filler(&self) -> bool {
        matches!(self.kind, StateKind::Filler { .. })
    }

    pub fn slot_value(&self) -> Option<&SlotValue> {
        match &self.kind {
            StateKind::Value(sv) => Some(sv),
            _ => None,
        }
    }
}

/// Parallel per-frame-type sub-models over slot-value, frame-type and filler states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmmModel {
    pub config: SharingConfig,
    pub options: HmmOptions,
    pub vocabulary: Vocabulary,
    pub shared_sets: Vec<SharedSet>,
    pub states: Vec<State>,
    pub initial: Vec<f64>,
    pub transitions: Vec<Vec<f64>>,
    pub emissions: Vec<Vec<f64>>,
    /// Index of each slot-value state's filler, if fillers are enabled.
    pub filler_of: Vec<Option<usize>>,
    /// Structurally allowed successors of every state, ascending.
    pub successors: Vec<Vec<usize>>,
}

fn normalize_floored(values: &mut [f64]) {
    for v in values.iter_mut() {
        *v = v.max(PROB_FLOOR);
    }
    let total: f64 = values.iter().sum();
    for v in values.iter_mut() {
        *v /= total;
    }
}

impl HmmModel {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s.label == label)
    }

    /// Whether a path may end in state `i`. A filler always precedes its owner.
    pub fn can_end(&self, i: usize) -> bool {
        !self.states[i].is_filler()
    }

    /// Whether `from → to` is structurally allowed.
    pub fn allowed(&self, from: usize, to: usize) -> bool {
        self.successors[from].binary_search(&to).is_ok()
    }

    /// Vocabulary indices of a unit sequence.
    pub fn encode(&self, units: &[String]) -> Result<Vec<usize>, HmmError> {
        units
            .iter()
            .map(|u| {
                self.vocabulary
                    .get(u)
                    .ok_or_else(|| HmmError::UnknownUnit(u.clone()))
            })
            .collect()
    }

    pub fn frame_types(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for s in &self.states {
            if !seen.contains(&s.frame_type.as_str()) {
                seen.push(s.frame_type.as_str());
            }
        }
        seen
    }

    /// Checks stochasticity and the structural zeros.
    pub fn check_invariants(&self, tolerance: f64) -> Result<(), String> {
        let n = self.n_states();
        let sum = |v: &[f64]| v.iter().sum::<f64>();
        if (sum(&self.initial) - 1.0).abs() > tolerance {
            return Err(format!("initial distribution sums to {}", sum(&self.initial)));
        }
        for i in 0..n {
            let row = &self.transitions[i];
            if (sum(row) - 1.0).abs() > tolerance {
                return Err(format!("transition row {} sums to {}", self.states[i].label, sum(row)));
            }
            if (sum(&self.emissions[i]) - 1.0).abs() > tolerance {
                return Err(format!("emission row {} does not sum to 1", self.states[i].label));
            }
            for (j, p) in row.iter().enumerate() {
                if !self.allowed(i, j) && *p != 0.0 {
                    return Err(format!(
                        "prohibited transition {} -> {} has probability {p}",
                        self.states[i].label, self.states[j].label
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Slot values activated by the automatic frames of a training slice.
pub fn training_slot_values(frames: &[&Frame]) -> BTreeSet<SlotValue> {
    frames.iter().flat_map(|f| f.slot_values()).collect()
}

/// Builds the initial model from the association map.
///
/// One state per slot value seen in `train_frames`, one state per slotless
/// frame type seen, and a filler per slot-value state when fillers are
/// enabled. Emissions come from the map columns; allowed transitions start
/// uniform.
pub fn build_model(
    schema: &FrameSchema,
    map: &AssociationMap,
    config: SharingConfig,
    options: HmmOptions,
    train_frames: &[&Frame],
) -> Result<HmmModel, HmmError> {
    if map.vocabulary.is_empty() {
        return Err(HmmError::EmptyVocabulary);
    }
    let seen = training_slot_values(train_frames);
    let seen_types: BTreeSet<&str> = train_frames.iter().map(|f| f.frame_type.as_str()).collect();

    let mut states: Vec<State> = Vec::new();
    let mut columns: Vec<Option<usize>> = Vec::new();
    for sv in schema.all_slot_values() {
        if !seen.contains(&sv) {
            continue;
        }
        let col = map
            .column_index(&FrameRow::Value(sv.clone()))
            .ok_or_else(|| HmmError::MissingAssociation(sv.to_string()))?;
        columns.push(Some(col));
        states.push(State {
            label: sv.to_string(),
            frame_type: sv.frame_type.clone(),
            slot: Some(sv.slot.clone()),
            kind: StateKind::Value(sv),
        });
    }
    for ft in schema.frame_types.iter().filter(|ft| ft.is_slotless()) {
        if !seen_types.contains(ft.name.as_str()) {
            continue;
        }
        let row = FrameRow::FrameType(ft.name.clone());
        let col = map
            .column_index(&row)
            .ok_or_else(|| HmmError::MissingAssociation(row.to_string()))?;
        columns.push(Some(col));
        states.push(State {
            label: ft.name.clone(),
            frame_type: ft.name.clone(),
            slot: None,
            kind: StateKind::FrameType(ft.name.clone()),
        });
    }
    if states.is_empty() {
        return Err(HmmError::EmptyTraining);
    }

    let n_core = states.len();
    let mut filler_of = vec![None; n_core];
    if config.fillers.enabled() {
        for owner in 0..n_core {
            if let StateKind::Value(sv) = &states[owner].kind {
                let s = State {
                    label: format!("filler_{sv}"),
                    frame_type: sv.frame_type.clone(),
                    slot: Some(sv.slot.clone()),
                    kind: StateKind::Filler { owner },
                };
                filler_of[owner] = Some(states.len());
                states.push(s);
                columns.push(map.column_index(&FrameRow::Filler));
            }
        }
    }
    let n = states.len();
    filler_of.resize(n, None);

    let n_units = map.vocabulary.len();
    let emissions: Vec<Vec<f64>> = columns
        .iter()
        .map(|col| {
            let mut e: Vec<f64> = match col {
                Some(c) => map.matrix.column(*c).to_vec(),
                None => vec![1.0; n_units],
            };
            normalize_floored(&mut e);
            e
        })
        .collect();

    // Structure.
    let core_successors = |i: usize| -> Vec<usize> {
        (0..n_core)
            .filter(|&j| {
                states[i].frame_type == states[j].frame_type
                    && !(i != j
                        && states[i].slot.is_some()
                        && states[i].slot == states[j].slot)
            })
            .collect()
    };
    let p_fill = if config.fillers.enabled() {
        options.filler_entry_prob
    } else {
        0.0
    };
    let mut transitions = vec![vec![0.0; n]; n];
    let mut successors = vec![Vec::new(); n];
    for i in 0..n {
        match states[i].kind {
            StateKind::Filler { owner } => {
                if options.filler_self_loop {
                    transitions[i][i] = 0.5;
                    transitions[i][owner] = 0.5;
                    successors[i] = vec![owner, i];
                } else {
                    transitions[i][owner] = 1.0;
                    successors[i] = vec![owner];
                }
            }
            _ => {
                let targets = core_successors(i);
                let w = 1.0 / targets.len() as f64;
                for &j in &targets {
                    match filler_of[j] {
                        Some(f) => {
                            transitions[i][j] = w * (1.0 - p_fill);
                            transitions[i][f] = w * p_fill;
                            successors[i].push(j);
                            successors[i].push(f);
                        }
                        None => {
                            transitions[i][j] = w;
                            successors[i].push(j);
                        }
                    }
                }
            }
        }
        successors[i].sort_unstable();
    }

    let mut initial = vec![0.0; n];
    let w = 1.0 / n_core as f64;
    for j in 0..n_core {
        match filler_of[j] {
            Some(f) => {
                initial[j] = w * (1.0 - p_fill);
                initial[f] = w * p_fill;
            }
            None => initial[j] = w,
        }
    }

    Ok(HmmModel {
        config,
        options,
        vocabulary: map.vocabulary.clone(),
        shared_sets: schema.shared_sets.clone(),
        states,
        initial,
        transitions,
        emissions,
        filler_of,
        successors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    pub(crate) fn toy_map(columns: Vec<FrameRow>, units: &[&str]) -> AssociationMap {
        let n = units.len();
        let m = columns.len();
        AssociationMap {
            vocabulary: units.iter().copied().collect(),
            matrix: Array2::from_shape_fn((n, m), |(i, j)| 1.0 + ((i + 2 * j) % 3) as f64),
            columns,
        }
    }

    fn patience_model(fillers: FillerMode, options: HmmOptions) -> HmmModel {
        let schema = FrameSchema::patience();
        let frames = [
            Frame::new("movecard").with("FS", "h").with("FV", "2").with("TS", "s").with("TV", "3"),
            Frame::new("movecard").with("FS", "s").with("FV", "3").with("TS", "h"),
            Frame::new("dealcard"),
        ];
        let refs: Vec<&Frame> = frames.iter().collect();
        let mut cols: Vec<FrameRow> = training_slot_values(&refs).into_iter().map(FrameRow::Value).collect();
        cols.push(FrameRow::FrameType("dealcard".into()));
        cols.push(FrameRow::Filler);
        let map = toy_map(cols, &["a", "b", "c"]);
        let config = SharingConfig { fillers, ..SharingConfig::none() };
        build_model(&schema, &map, config, options, &refs).unwrap()
    }

    #[test]
    fn within_slot_prohibited() {
        let m = patience_model(FillerMode::None, HmmOptions::default());
        let h = m.state_index("FS=h").unwrap();
        let s = m.state_index("FS=s").unwrap();
        assert_eq!(m.transitions[h][s], 0.0);
        assert!(m.transitions[h][h] > 0.0);
        let deal = m.state_index("dealcard").unwrap();
        assert_eq!(m.transitions[h][deal], 0.0);
        assert_eq!(m.transitions[deal][deal], 1.0);
        m.check_invariants(1e-12).unwrap();
        // FS=h can reach FS=h, FV=2, FV=3, TS=h, TS=s, TV=3
        assert!((m.transitions[h][m.state_index("TV=3").unwrap()] - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn filler_wiring() {
        let m = patience_model(
            FillerMode::NonShared,
            HmmOptions { filler_self_loop: false, ..HmmOptions::default() },
        );
        let fv2 = m.state_index("FV=2").unwrap();
        let f = m.state_index("filler_FV=2").unwrap();
        assert_eq!(m.transitions[f][fv2], 1.0);
        assert_eq!(m.transitions[f].iter().sum::<f64>(), 1.0);
        let h = m.state_index("FS=h").unwrap();
        assert_eq!(m.transitions[h][fv2], m.transitions[h][f]);
        assert!(m.state_index("filler_dealcard").is_none());
        m.check_invariants(1e-12).unwrap();

        let looped = patience_model(FillerMode::NonShared, HmmOptions::default());
        let f = looped.state_index("filler_FV=2").unwrap();
        assert_eq!(looped.successors[f], vec![fv2, f]);
        looped.check_invariants(1e-12).unwrap();
    }

    #[test]
    fn uniform_over_three_successors() {
        // slot A has one value, slot B two: a1 -> {a1, b1, b2}
        let schema = FrameSchema::patience();
        let frames = [
            Frame::new("movecard").with("FS", "h").with("FV", "2"),
            Frame::new("movecard").with("FS", "h").with("FV", "3"),
        ];
        let refs: Vec<&Frame> = frames.iter().collect();
        let cols = training_slot_values(&refs).into_iter().map(FrameRow::Value).collect();
        let map = toy_map(cols, &["a"]);
        let m = build_model(&schema, &map, SharingConfig::none(), HmmOptions::default(), &refs).unwrap();
        let a1 = m.state_index("FS=h").unwrap();
        for j in 0..3 {
            assert!((m.transitions[a1][j] - 1.0 / 3.0).abs() < 1e-15);
        }
        let b1 = m.state_index("FV=2").unwrap();
        assert_eq!(m.transitions[b1][m.state_index("FV=3").unwrap()], 0.0);
        assert!((m.transitions[b1][b1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unseen_values_have_no_state() {
        let m = patience_model(FillerMode::None, HmmOptions::default());
        assert!(m.state_index("FS=c").is_none());
        assert_eq!(m.n_states(), 8);
    }

    #[test]
    fn missing_association_is_an_error() {
        let schema = FrameSchema::patience();
        let frame = Frame::new("movecard").with("FS", "h");
        let map = toy_map(vec![FrameRow::Filler], &["a"]);
        assert!(matches!(
            build_model(&schema, &map, SharingConfig::none(), HmmOptions::default(), &[&frame]),
            Err(HmmError::MissingAssociation(_))
        ));
        let empty = toy_map(vec![FrameRow::Value(SlotValue::new("movecard", "FS", "h"))], &[]);
        assert!(matches!(
            build_model(&schema, &empty, SharingConfig::none(), HmmOptions::default(), &[&frame]),
            Err(HmmError::EmptyVocabulary)
        ));
    }

    #[test]
    fn grid_has_32_cells() {
        let grid = SharingConfig::grid();
        assert_eq!(grid.len(), 32);
        assert_eq!(grid.iter().collect::<BTreeSet<_>>().len(), 32);
    }
}
