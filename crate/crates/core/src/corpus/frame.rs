use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::schema::{FrameSchema, SlotValue};
use super::CorpusError;

/// A semantic frame: a frame type plus slot fills.
///
/// Automatic and induced frames carry one value per filled slot. Oracle
/// frames may carry several, meaning the command is ambiguous between them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Frame {
    #[serde(rename = "type")]
    pub frame_type: String,
    #[serde(default)]
    pub fills: BTreeMap<String, BTreeSet<String>>,
}

impl Frame {
    pub fn new(frame_type: &str) -> Self {
        Frame {
            frame_type: frame_type.to_string(),
            fills: BTreeMap::new(),
        }
    }

    pub fn with(mut self, slot: &str, value: &str) -> Self {
        self.insert(slot, value);
        self
    }

    pub fn with_set(mut self, slot: &str, values: &[&str]) -> Self {
        for v in values {
            self.insert(slot, v);
        }
        self
    }

    pub fn insert(&mut self, slot: &str, value: &str) {
        self.fills
            .entry(slot.to_string())
            .or_default()
            .insert(value.to_string());
    }

    pub fn filled_slots(&self) -> usize {
        self.fills.values().filter(|v| !v.is_empty()).count()
    }

    pub fn get(&self, slot: &str) -> Option<&BTreeSet<String>> {
        self.fills.get(slot)
    }

    pub fn contains(&self, slot: &str, value: &str) -> bool {
        self.fills.get(slot).is_some_and(|vs| vs.contains(value))
    }

    pub fn is_single_valued(&self) -> bool {
        self.fills.values().all(|vs| vs.len() == 1)
    }

    /// All (slot, value) activations of this frame as qualified slot values.
    pub fn slot_values(&self) -> impl Iterator<Item = SlotValue> + '_ {
        self.fills.iter().flat_map(move |(slot, values)| {
            values
                .iter()
                .map(move |v| SlotValue::new(&self.frame_type, slot, v))
        })
    }

    pub fn validate(&self, schema: &FrameSchema) -> Result<(), CorpusError> {
        let ft = schema
            .frame_type(&self.frame_type)
            .ok_or_else(|| CorpusError::UnknownFrameType(self.frame_type.clone()))?;
        for (slot, values) in &self.fills {
            let def = ft.slot(slot).ok_or_else(|| CorpusError::SchemaViolation {
                slot: slot.clone(),
                value: None,
                reason: format!("not a slot of frame type {}", ft.name),
            })?;
            if values.is_empty() {
                return Err(CorpusError::SchemaViolation {
                    slot: slot.clone(),
                    value: None,
                    reason: "filled slot has an empty value set".to_string(),
                });
            }
            for v in values {
                if !def.values.contains(v) {
                    return Err(CorpusError::SchemaViolation {
                        slot: slot.clone(),
                        value: Some(v.clone()),
                        reason: "illegal value".to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn illegal_value_names_the_slot() {
        let schema = FrameSchema::patience();
        let frame = Frame::new("movecard").with("FS", "x");
        match frame.validate(&schema) {
            Err(CorpusError::SchemaViolation { slot, value, .. }) => {
                assert_eq!(slot, "FS");
                assert_eq!(value.as_deref(), Some("x"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn oracle_ambiguity_set_is_legal() {
        let schema = FrameSchema::patience();
        let frame = Frame::new("movecard")
            .with("FS", "c")
            .with("FV", "11")
            .with_set("TS", &["h", "d"])
            .with("TV", "12");
        frame.validate(&schema).unwrap();
        assert!(!frame.is_single_valued());
        assert_eq!(frame.filled_slots(), 4);
        assert_eq!(frame.slot_values().count(), 5);
    }

    #[test]
    fn json_shape() {
        let frame = Frame::new("movecard").with("FS", "h");
        let text = serde_json::to_string(&frame).unwrap();
        assert_eq!(text, r#"{"type":"movecard","fills":{"FS":["h"]}}"#);
        let dealcard: Frame = serde_json::from_str(r#"{"type":"dealcard"}"#).unwrap();
        assert_eq!(dealcard.filled_slots(), 0);
    }
}
