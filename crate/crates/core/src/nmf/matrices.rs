use std::collections::BTreeSet;
use std::fmt;

use ndarray::{concatenate, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::corpus::{Frame, FrameSchema, SegmentedCommand, SlotValue};
use crate::vocab::Vocabulary;

/// A row of the frame supervision matrix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameRow {
    Value(SlotValue),
    /// Indicator for a frame type without slots.
    FrameType(String),
    /// Active for every command.
    Filler,
}

impl FrameRow {
    /// Frame type the row belongs to; `None` for the filler row.
    pub fn frame_type(&self) -> Option<&str> {
        match self {
            FrameRow::Value(sv) => Some(&sv.frame_type),
            FrameRow::FrameType(ft) => Some(ft),
            FrameRow::Filler => None,
        }
    }
}

impl fmt::Display for FrameRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameRow::Value(sv) => write!(f, "{sv}"),
            FrameRow::FrameType(ft) => write!(f, "type:{ft}"),
            FrameRow::Filler => f.write_str("<filler>"),
        }
    }
}

/// Binary slot-value activations, one column per training command.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    pub rows: Vec<FrameRow>,
    pub matrix: Array2<f64>,
}

/// Unit occurrence counts, one column per training command.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandMatrix {
    pub vocabulary: Vocabulary,
    pub matrix: Array2<f64>,
}

/// The two supervision matrices of one training slice.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationMatrices {
    pub frames: FrameMatrix,
    pub commands: CommandMatrix,
}

impl ActivationMatrices {
    pub fn new(frames: FrameMatrix, commands: CommandMatrix) -> Self {
        assert_eq!(
            frames.matrix.ncols(),
            commands.matrix.ncols(),
            "frame and command matrices must have one column per command"
        );
        ActivationMatrices { frames, commands }
    }

    /// `[V_frames; V_commands]`.
    pub fn stacked(&self) -> Array2<f64> {
        concatenate(Axis(0), &[self.frames.matrix.view(), self.commands.matrix.view()])
            .expect("equal column counts")
    }
}

/// Slot values a frame activates, extended across shared expression sets if asked.
pub fn activated_values(frame: &Frame, schema: &FrameSchema, e_sharing: bool) -> BTreeSet<SlotValue> {
    let mut out: BTreeSet<SlotValue> = frame.slot_values().collect();
    if e_sharing {
        let direct: Vec<SlotValue> = out.iter().cloned().collect();
        for sv in direct {
            if let Some(set) = schema.shared_set_of(&sv.frame_type, &sv.slot) {
                for other in &set.slots {
                    out.insert(SlotValue::new(&sv.frame_type, other, &sv.value));
                }
            }
        }
    }
    out
}

/// Builds `V_frames` from the automatic frames of a training slice.
///
/// Rows are the slot values that occur (directly, or through expression
/// sharing when `e_sharing` is set) in schema order, then one indicator row
/// per slotless frame type that occurs, then the filler row if requested.
pub fn build_frame_matrix(
    frames: &[&Frame],
    schema: &FrameSchema,
    e_sharing: bool,
    filler_column: bool,
) -> FrameMatrix {
    let activations: Vec<BTreeSet<SlotValue>> = frames
        .iter()
        .map(|f| activated_values(f, schema, e_sharing))
        .collect();
    let seen: BTreeSet<&SlotValue> = activations.iter().flatten().collect();
    let seen_types: BTreeSet<&str> = frames.iter().map(|f| f.frame_type.as_str()).collect();

    let mut rows: Vec<FrameRow> = schema
        .all_slot_values()
        .into_iter()
        .filter(|sv| seen.contains(sv))
        .map(FrameRow::Value)
        .collect();
    rows.extend(
        schema
            .frame_types
            .iter()
            .filter(|ft| ft.is_slotless() && seen_types.contains(ft.name.as_str()))
            .map(|ft| FrameRow::FrameType(ft.name.clone())),
    );
    if filler_column {
        rows.push(FrameRow::Filler);
    }

    let mut matrix = Array2::zeros((rows.len(), frames.len()));
    for (j, (frame, active)) in frames.iter().zip(&activations).enumerate() {
        for (i, row) in rows.iter().enumerate() {
            let on = match row {
                FrameRow::Value(sv) => active.contains(sv),
                FrameRow::FrameType(ft) => frame.frame_type == *ft,
                FrameRow::Filler => true,
            };
            if on {
                matrix[[i, j]] = 1.0;
            }
        }
    }
    FrameMatrix { rows, matrix }
}

/// Builds `V_commands`: rows are the training vocabulary in first-seen order.
pub fn build_command_matrix(commands: &[&SegmentedCommand]) -> CommandMatrix {
    let mut vocabulary = Vocabulary::new();
    for c in commands {
        for u in &c.units {
            vocabulary.intern(u);
        }
    }
    let mut matrix = Array2::zeros((vocabulary.len(), commands.len()));
    for (j, c) in commands.iter().enumerate() {
        for u in &c.units {
            let i = vocabulary.get(u).expect("interned above");
            matrix[[i, j]] += 1.0;
        }
    }
    CommandMatrix { vocabulary, matrix }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Granularity;

    fn shared_set_frame() -> Frame {
        Frame::new("movecard")
            .with("FS", "h")
            .with("FV", "8")
            .with("FC", "2")
            .with("TS", "s")
            .with("TV", "9")
            .with("TC", "4")
    }

    fn active_labels(m: &FrameMatrix, col: usize) -> BTreeSet<String> {
        m.rows
            .iter()
            .enumerate()
            .filter(|(i, _)| m.matrix[[*i, col]] == 1.0)
            .map(|(_, r)| r.to_string())
            .collect()
    }

    #[test]
    fn expression_sharing_adds_corresponding_values() {
        let schema = FrameSchema::patience();
        let frame = shared_set_frame();
        let m = build_frame_matrix(&[&frame], &schema, true, false);
        let got = active_labels(&m, 0);
        let original = ["FS=h", "FV=8", "FC=2", "TS=s", "TV=9", "TC=4"];
        let added = ["TS=h", "TV=8", "TC=2", "FS=s", "FV=9", "FC=4"];
        let expected: BTreeSet<String> =
            original.iter().chain(&added).map(|s| s.to_string()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn without_sharing_column_is_the_frame() {
        let schema = FrameSchema::patience();
        let frame = shared_set_frame();
        let m = build_frame_matrix(&[&frame], &schema, false, false);
        let expected: BTreeSet<String> = ["FS=h", "FV=8", "FC=2", "TS=s", "TV=9", "TC=4"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(active_labels(&m, 0), expected);
        assert_eq!(m.rows.len(), 6);
    }

    #[test]
    fn filler_row_all_ones() {
        let schema = FrameSchema::patience();
        let frames: Vec<Frame> = (0..10)
            .map(|i| {
                if i % 3 == 0 {
                    Frame::new("dealcard")
                } else {
                    Frame::new("movecard").with("FS", "h")
                }
            })
            .collect();
        let refs: Vec<&Frame> = frames.iter().collect();
        let m = build_frame_matrix(&refs, &schema, false, true);
        assert_eq!(m.rows.last(), Some(&FrameRow::Filler));
        let filler = m.matrix.row(m.rows.len() - 1);
        assert_eq!(filler.to_vec(), vec![1.0; 10]);
        let deal = m.rows.iter().position(|r| *r == FrameRow::FrameType("dealcard".into())).unwrap();
        assert_eq!(m.matrix[[deal, 0]], 1.0);
        assert_eq!(m.matrix[[deal, 1]], 0.0);
    }

    #[test]
    fn sharing_is_idempotent() {
        let schema = FrameSchema::patience();
        let once = activated_values(&shared_set_frame(), &schema, true);
        let mut shared = Frame::new("movecard");
        for sv in &once {
            shared.insert(&sv.slot, &sv.value);
        }
        assert_eq!(activated_values(&shared, &schema, true), once);
    }

    fn cmd(units: &[&str]) -> SegmentedCommand {
        SegmentedCommand {
            granularity: Granularity::WordUnigram,
            units: units.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn unit_counts() {
        let c = cmd(&["dri", "Op", "dri"]);
        let m = build_command_matrix(&[&c]);
        assert_eq!(m.matrix[[m.vocabulary.get("dri").unwrap(), 0]], 2.0);
        assert_eq!(m.matrix[[m.vocabulary.get("Op").unwrap(), 0]], 1.0);
    }

    #[test]
    fn disjoint_vocabularies_have_disjoint_supports() {
        let a = cmd(&["a", "b"]);
        let b = cmd(&["c", "d", "c"]);
        let m = build_command_matrix(&[&a, &b]);
        for i in 0..m.vocabulary.len() {
            assert!(m.matrix[[i, 0]] == 0.0 || m.matrix[[i, 1]] == 0.0);
        }
    }
}
