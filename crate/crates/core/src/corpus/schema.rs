use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CorpusError;

/// A slot of a frame type together with its legal values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotDef {
    /// Short slot name, e.g. `FS`.
    pub name: String,
    /// Long name, e.g. `from_suit`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameTypeDef {
    pub name: String,
    #[serde(default)]
    pub slots: Vec<SlotDef>,
}

impl FrameTypeDef {
    pub fn slot(&self, name: &str) -> Option<&SlotDef> {
        self.slots.iter().find(|s| s.name == name)
    }

    pub fn slot_index(&self, name: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.name == name)
    }

    pub fn is_slotless(&self) -> bool {
        self.slots.is_empty()
    }
}

/// Slots of one frame type whose values are expressed by the same words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedSet {
    pub frame_type: String,
    pub slots: Vec<String>,
}

/// A fully qualified slot value, e.g. `movecard/FS=h`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SlotValue {
    pub frame_type: String,
    pub slot: String,
    pub value: String,
}

impl SlotValue {
    pub fn new(frame_type: &str, slot: &str, value: &str) -> Self {
        SlotValue {
            frame_type: frame_type.to_string(),
            slot: slot.to_string(),
            value: value.to_string(),
        }
    }
}

impl fmt::Display for SlotValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.slot, self.value)
    }
}

/// Frame types, slots, legal values and shared expression sets of an application.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSchema {
    pub frame_types: Vec<FrameTypeDef>,
    #[serde(default)]
    pub shared_sets: Vec<SharedSet>,
}

fn range_values(lo: u32, hi: u32) -> Vec<String> {
    (lo..=hi).map(|v| v.to_string()).collect()
}

impl FrameSchema {
    /// The two frame types of the vocally guided Patience game.
    pub fn patience() -> Self {
        let suits: Vec<String> = ["h", "d", "s", "c"].iter().map(|s| s.to_string()).collect();
        let slot = |name: &str, label: &str, values: Vec<String>| SlotDef {
            name: name.to_string(),
            label: Some(label.to_string()),
            values,
        };
        let movecard = FrameTypeDef {
            name: "movecard".to_string(),
            slots: vec![
                slot("FS", "from_suit", suits.clone()),
                slot("FV", "from_value", range_values(1, 13)),
                slot("FF", "from_foundation", range_values(1, 4)),
                slot("FC", "from_column", range_values(1, 7)),
                slot("FH", "from_hand", range_values(1, 1)),
                slot("TS", "target_suit", suits),
                slot("TV", "target_value", range_values(1, 13)),
                slot("TF", "target_foundation", range_values(1, 4)),
                slot("TC", "target_column", range_values(1, 7)),
            ],
        };
        let dealcard = FrameTypeDef {
            name: "dealcard".to_string(),
            slots: Vec::new(),
        };
        let shared = |a: &str, b: &str| SharedSet {
            frame_type: "movecard".to_string(),
            slots: vec![a.to_string(), b.to_string()],
        };
        FrameSchema {
            frame_types: vec![movecard, dealcard],
            shared_sets: vec![
                shared("FS", "TS"),
                shared("FV", "TV"),
                shared("FF", "TF"),
                shared("FC", "TC"),
            ],
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path)?;
        let schema: FrameSchema =
            serde_json::from_str(&text).map_err(|e| CorpusError::Parse {
                line: e.line(),
                message: e.to_string(),
            })?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let mut names = BTreeSet::new();
        for ft in &self.frame_types {
            if !names.insert(ft.name.as_str()) {
                return Err(CorpusError::InvalidSchema(format!(
                    "duplicate frame type {}",
                    ft.name
                )));
            }
            let mut slots = BTreeSet::new();
            for slot in &ft.slots {
                if !slots.insert(slot.name.as_str()) {
                    return Err(CorpusError::InvalidSchema(format!(
                        "duplicate slot {} in frame type {}",
                        slot.name, ft.name
                    )));
                }
                if slot.values.is_empty() {
                    return Err(CorpusError::InvalidSchema(format!(
                        "slot {} of {} has no legal values",
                        slot.name, ft.name
                    )));
                }
                let distinct: BTreeSet<_> = slot.values.iter().collect();
                if distinct.len() != slot.values.len() {
                    return Err(CorpusError::InvalidSchema(format!(
                        "slot {} of {} lists a value twice",
                        slot.name, ft.name
                    )));
                }
            }
        }
        for set in &self.shared_sets {
            let ft = self.frame_type(&set.frame_type).ok_or_else(|| {
                CorpusError::InvalidSchema(format!(
                    "shared set refers to unknown frame type {}",
                    set.frame_type
                ))
            })?;
            let mut reference: Option<BTreeSet<&String>> = None;
            for name in &set.slots {
                let slot = ft.slot(name).ok_or_else(|| {
                    CorpusError::InvalidSchema(format!(
                        "shared set slot {} is not a slot of {}",
                        name, ft.name
                    ))
                })?;
                let values: BTreeSet<&String> = slot.values.iter().collect();
                match &reference {
                    None => reference = Some(values),
                    Some(r) if *r != values => {
                        return Err(CorpusError::InvalidSchema(format!(
                            "shared set slots {:?} have different value sets",
                            set.slots
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    pub fn frame_type(&self, name: &str) -> Option<&FrameTypeDef> {
        self.frame_types.iter().find(|ft| ft.name == name)
    }

    pub fn frame_type_index(&self, name: &str) -> Option<usize> {
        self.frame_types.iter().position(|ft| ft.name == name)
    }

    pub fn slot(&self, frame_type: &str, slot: &str) -> Option<&SlotDef> {
        self.frame_type(frame_type).and_then(|ft| ft.slot(slot))
    }

    pub fn is_legal(&self, sv: &SlotValue) -> bool {
        self.slot(&sv.frame_type, &sv.slot)
            .is_some_and(|s| s.values.contains(&sv.value))
    }

    /// The shared expression set a slot belongs to, if any.
    pub fn shared_set_of(&self, frame_type: &str, slot: &str) -> Option<&SharedSet> {
        self.shared_sets
            .iter()
            .find(|s| s.frame_type == frame_type && s.slots.iter().any(|n| n == slot))
    }

    /// Every slot value in the schema, in schema order.
    pub fn all_slot_values(&self) -> Vec<SlotValue> {
        let mut out = Vec::new();
        for ft in &self.frame_types {
            for slot in &ft.slots {
                for v in &slot.values {
                    out.push(SlotValue::new(&ft.name, &slot.name, v));
                }
            }
        }
        out
    }

    /// Position of a slot value in schema order, used for deterministic orderings.
    pub fn slot_value_rank(&self, sv: &SlotValue) -> Option<(usize, usize, usize)> {
        let fi = self.frame_type_index(&sv.frame_type)?;
        let ft = &self.frame_types[fi];
        let si = ft.slot_index(&sv.slot)?;
        let vi = ft.slots[si].values.iter().position(|v| *v == sv.value)?;
        Some((fi, si, vi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patience_schema_layout() {
        let schema = FrameSchema::patience();
        schema.validate().unwrap();
        let mc = schema.frame_type("movecard").unwrap();
        let names: Vec<&str> = mc.slots.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["FS", "FV", "FF", "FC", "FH", "TS", "TV", "TF", "TC"]);
        let counts: Vec<usize> = mc.slots.iter().map(|s| s.values.len()).collect();
        assert_eq!(counts, [4, 13, 4, 7, 1, 4, 13, 4, 7]);
        assert!(schema.frame_type("dealcard").unwrap().is_slotless());
        assert_eq!(schema.shared_sets.len(), 4);
        assert_eq!(schema.shared_set_of("movecard", "TV").unwrap().slots, ["FV", "TV"]);
        assert!(schema.shared_set_of("movecard", "FH").is_none());
    }

    #[test]
    fn rejects_mismatched_shared_set() {
        let mut schema = FrameSchema::patience();
        schema.shared_sets.push(SharedSet {
            frame_type: "movecard".into(),
            slots: vec!["FS".into(), "FV".into()],
        });
        assert!(matches!(schema.validate(), Err(CorpusError::InvalidSchema(_))));
    }

    #[test]
    fn rejects_empty_value_set() {
        let mut schema = FrameSchema::patience();
        schema.frame_types[0].slots[4].values.clear();
        assert!(schema.validate().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let schema = FrameSchema::patience();
        let text = serde_json::to_string(&schema).unwrap();
        let back: FrameSchema = serde_json::from_str(&text).unwrap();
        assert_eq!(schema, back);
    }
}
