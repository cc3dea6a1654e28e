use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Observation units in first-seen order with an index lookup.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    units: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `unit` if absent and returns its index.
    pub fn intern(&mut self, unit: &str) -> usize {
        if let Some(&i) = self.index.get(unit) {
            return i;
        }
        let i = self.units.len();
        self.units.push(unit.to_string());
        self.index.insert(unit.to_string(), i);
        i
    }

    pub fn get(&self, unit: &str) -> Option<usize> {
        self.index.get(unit).copied()
    }

    pub fn contains(&self, unit: &str) -> bool {
        self.index.contains_key(unit)
    }

    pub fn unit(&self, i: usize) -> &str {
        &self.units[i]
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }
}

impl From<Vec<String>> for Vocabulary {
    fn from(units: Vec<String>) -> Self {
        let mut v = Vocabulary::new();
        for u in &units {
            v.intern(u);
        }
        v
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.units
    }
}

impl<S: AsRef<str>> FromIterator<S> for Vocabulary {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut v = Vocabulary::new();
        for u in iter {
            v.intern(u.as_ref());
        }
        v
    }
}
