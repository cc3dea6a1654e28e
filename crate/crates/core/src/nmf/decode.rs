use super::association::AssociationMap;
use super::matrices::FrameRow;
use super::NmfError;
use crate::corpus::{Frame, FrameSchema, SegmentedCommand};

/// Default accumulated-activation threshold for NMF decoding.
pub const DEFAULT_NMF_THRESHOLD: f64 = 0.5;

/// Accumulated, row-normalized activations of every map column over a command.
pub fn accumulate_activations(
    command: &SegmentedCommand,
    map: &AssociationMap,
) -> Result<Vec<f64>, NmfError> {
    let mut acc = vec![0.0; map.columns.len()];
    for unit in &command.units {
        let i = map
            .vocabulary
            .get(unit)
            .ok_or_else(|| NmfError::UnknownUnit(unit.clone()))?;
        let row = map.matrix.row(i);
        let total: f64 = row.sum();
        if total > 0.0 {
            for (a, x) in acc.iter_mut().zip(row.iter()) {
                *a += x / total;
            }
        }
    }
    Ok(acc)
}

/// Decodes a command with the association map alone, ignoring unit order.
///
/// The frame type with the largest accumulated mass wins; within it each
/// slot takes its highest-scoring value when that score exceeds `threshold`.
/// Ties go to the lowest column index.
pub fn nmf_decode(
    command: &SegmentedCommand,
    map: &AssociationMap,
    schema: &FrameSchema,
    threshold: f64,
) -> Result<Frame, NmfError> {
    let acc = accumulate_activations(command, map)?;

    let mut best: Option<(usize, f64)> = None;
    for (fi, ft) in schema.frame_types.iter().enumerate() {
        let mass: f64 = map
            .columns
            .iter()
            .zip(&acc)
            .filter(|(c, _)| c.frame_type() == Some(ft.name.as_str()))
            .map(|(_, a)| a)
            .sum();
        let present = map
            .columns
            .iter()
            .any(|c| c.frame_type() == Some(ft.name.as_str()));
        if present && best.is_none_or(|(_, m)| mass > m) {
            best = Some((fi, mass));
        }
    }
    let (fi, _) = best.ok_or(NmfError::NoFrameTypes)?;
    let ft = &schema.frame_types[fi];

    let mut frame = Frame::new(&ft.name);
    for slot in &ft.slots {
        let mut winner: Option<(usize, f64)> = None;
        for (ci, col) in map.columns.iter().enumerate() {
            if let FrameRow::Value(sv) = col {
                if sv.frame_type == ft.name
                    && sv.slot == slot.name
                    && winner.is_none_or(|(_, a)| acc[ci] > a)
                {
                    winner = Some((ci, acc[ci]));
                }
            }
        }
        if let Some((ci, a)) = winner {
            if a > threshold {
                if let FrameRow::Value(sv) = &map.columns[ci] {
                    frame.insert(&sv.slot, &sv.value);
                }
            }
        }
    }
    Ok(frame)
}
