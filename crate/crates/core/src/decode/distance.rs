use serde::{Deserialize, Serialize};

use crate::vocab::Vocabulary;

/// Treatment of units that never occurred in training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnknownUnitPolicy {
    /// Nearest known unit under plain symbol edit distance.
    #[default]
    SymbolEdit,
    /// Nearest known unit under edit distance with articulatory substitution costs.
    FeatureEdit,
    /// Drop unknown units.
    Ignore,
}

impl std::str::FromStr for UnknownUnitPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symbol-edit" | "symbol" => Ok(Self::SymbolEdit),
            "feature-edit" | "feature" => Ok(Self::FeatureEdit),
            "ignore" => Ok(Self::Ignore),
            other => Err(format!("unknown unit policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Segment {
    /// place, manner, voiced
    Consonant(u8, u8, bool),
    /// height, backness, rounded, long
    Vowel(u8, u8, bool, bool),
}

/// Articulatory features of the single-character YAPA symbols used for Dutch.
fn features(symbol: char) -> Option<Segment> {
    use Segment::*;
    // places: 0 bilabial, 1 labiodental, 2 alveolar, 3 postalveolar, 4 palatal, 5 velar, 6 uvular, 7 glottal
    // manners: 0 plosive, 1 fricative, 2 nasal, 3 lateral, 4 trill, 5 approximant
    let seg = match symbol {
        'p' => Consonant(0, 0, false),
        'b' => Consonant(0, 0, true),
        't' => Consonant(2, 0, false),
        'd' => Consonant(2, 0, true),
        'k' => Consonant(5, 0, false),
        'g' => Consonant(5, 0, true),
        'f' => Consonant(1, 1, false),
        'v' => Consonant(1, 1, true),
        's' => Consonant(2, 1, false),
        'z' => Consonant(2, 1, true),
        'S' => Consonant(3, 1, false),
        'Z' => Consonant(3, 1, true),
        'x' => Consonant(5, 1, false),
        'G' => Consonant(5, 1, true),
        'h' => Consonant(7, 1, true),
        'm' => Consonant(0, 2, true),
        'n' => Consonant(2, 2, true),
        'J' => Consonant(4, 2, true),
        'N' => Consonant(5, 2, true),
        'l' => Consonant(2, 3, true),
        'r' => Consonant(2, 4, true),
        'R' => Consonant(6, 4, true),
        'w' => Consonant(1, 5, true),
        'j' => Consonant(4, 5, true),
        // heights: 0 close, 1 close-mid, 2 mid, 3 open-mid, 4 open; backness: 0 front, 1 central, 2 back
        'i' => Vowel(0, 0, false, true),
        'y' => Vowel(0, 0, true, true),
        'u' => Vowel(0, 2, true, true),
        'I' => Vowel(1, 0, false, false),
        'e' => Vowel(1, 0, false, true),
        '2' => Vowel(1, 0, true, true),
        'o' => Vowel(1, 2, true, true),
        '@' => Vowel(2, 1, false, false),
        'E' => Vowel(3, 0, false, false),
        'Y' => Vowel(3, 1, true, false),
        'O' => Vowel(3, 2, true, false),
        'a' => Vowel(4, 1, false, true),
        'A' => Vowel(4, 2, false, false),
        'K' => Vowel(3, 0, false, true),
        'L' => Vowel(3, 1, true, true),
        'M' => Vowel(3, 2, true, true),
        'Q' => Vowel(3, 2, true, true),
        _ => return None,
    };
    Some(seg)
}

/// Substitution cost in `[0, 1]`: the share of differing articulatory features.
pub fn feature_substitution_cost(a: char, b: char) -> f64 {
    if a == b {
        return 0.0;
    }
    match (features(a), features(b)) {
        (Some(Segment::Consonant(pa, ma, va)), Some(Segment::Consonant(pb, mb, vb))) => {
            let place = (pa as f64 - pb as f64).abs().min(3.0) / 3.0;
            let manner = if ma == mb { 0.0 } else { 1.0 };
            let voice = if va == vb { 0.0 } else { 1.0 };
            (place + manner + voice) / 3.0
        }
        (Some(Segment::Vowel(ha, ba, ra, la)), Some(Segment::Vowel(hb, bb, rb, lb))) => {
            let height = (ha as f64 - hb as f64).abs() / 4.0;
            let back = (ba as f64 - bb as f64).abs() / 2.0;
            let round = if ra == rb { 0.0 } else { 1.0 };
            let long = if la == lb { 0.0 } else { 1.0 };
            (height + back + round + long) / 4.0
        }
        _ => 1.0,
    }
}

/// Weighted Levenshtein distance with unit insertion and deletion cost.
pub fn weighted_edit_distance(a: &str, b: &str, substitution: impl Fn(char, char) -> f64) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<f64> = (0..=b.len()).map(|j| j as f64).collect();
    let mut cur = vec![0.0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i as f64;
        for j in 1..=b.len() {
            cur[j] = (prev[j] + 1.0)
                .min(cur[j - 1] + 1.0)
                .min(prev[j - 1] + substitution(a[i - 1], b[j - 1]));
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn symbol_edit_distance(a: &str, b: &str) -> f64 {
    weighted_edit_distance(a, b, |x, y| if x == y { 0.0 } else { 1.0 })
}

pub fn feature_edit_distance(a: &str, b: &str) -> f64 {
    weighted_edit_distance(a, b, feature_substitution_cost)
}

/// Index of the known unit nearest to `unit`; ties go to the lowest index.
pub fn nearest_unit(unit: &str, vocabulary: &Vocabulary, distance: impl Fn(&str, &str) -> f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, known) in vocabulary.units().iter().enumerate() {
        let d = distance(unit, known);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Replaces out-of-vocabulary units by their nearest known unit, or drops them
/// under [`UnknownUnitPolicy::Ignore`].
pub fn map_unknown_units(units: &[String], vocabulary: &Vocabulary, policy: UnknownUnitPolicy) -> Vec<String> {
    units
        .iter()
        .filter_map(|u| {
            if vocabulary.contains(u) {
                return Some(u.clone());
            }
            let nearest = match policy {
                UnknownUnitPolicy::Ignore => return None,
                UnknownUnitPolicy::SymbolEdit => nearest_unit(u, vocabulary, symbol_edit_distance),
                UnknownUnitPolicy::FeatureEdit => nearest_unit(u, vocabulary, feature_edit_distance),
            };
            nearest.map(|i| vocabulary.unit(i).to_string())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vocab(units: &[&str]) -> Vocabulary {
        units.iter().copied().collect()
    }

    fn strings(units: &[&str]) -> Vec<String> {
        units.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn known_units_are_untouched() {
        let v = vocab(&["roj@", "vir"]);
        let cmd = strings(&["vir", "roj@"]);
        for p in [UnknownUnitPolicy::SymbolEdit, UnknownUnitPolicy::FeatureEdit, UnknownUnitPolicy::Ignore] {
            assert_eq!(map_unknown_units(&cmd, &v, p), cmd);
        }
    }

    #[test]
    fn nearest_by_exhaustive_distance() {
        let v = vocab(&["roj@", "vir"]);
        let dists: Vec<f64> = v.units().iter().map(|u| symbol_edit_distance("rojes", u)).collect();
        assert_eq!(dists, vec![2.0, 5.0]);
        assert_eq!(map_unknown_units(&strings(&["rojes"]), &v, UnknownUnitPolicy::SymbolEdit), strings(&["roj@"]));
        assert_eq!(map_unknown_units(&strings(&["rojes"]), &v, UnknownUnitPolicy::FeatureEdit), strings(&["roj@"]));
        assert!(map_unknown_units(&strings(&["rojes"]), &v, UnknownUnitPolicy::Ignore).is_empty());
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let v = vocab(&["bx", "ax"]);
        assert_eq!(map_unknown_units(&strings(&["cx"]), &v, UnknownUnitPolicy::SymbolEdit), strings(&["bx"]));
    }

    #[test]
    fn feature_costs() {
        assert_eq!(feature_substitution_cost('p', 'p'), 0.0);
        assert!((feature_substitution_cost('p', 'b') - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(feature_substitution_cost('p', 'a'), 1.0);
        assert_eq!(feature_substitution_cost('+', 'a'), 1.0);
        // voicing differs less than manner and place together
        assert!(feature_substitution_cost('t', 'd') < feature_substitution_cost('t', 'm'));
        // the feature distance prefers the articulatorily closer word
        let v = vocab(&["tin", "kin"]);
        assert_eq!(map_unknown_units(&strings(&["din"]), &v, UnknownUnitPolicy::FeatureEdit), strings(&["tin"]));
    }

    proptest! {
        #[test]
        fn mapping_is_idempotent(
            known in proptest::collection::vec("[a-e@]{1,4}", 1..6),
            cmd in proptest::collection::vec("[a-f@+]{1,5}", 0..6),
            policy in 0usize..3,
        ) {
            let v: Vocabulary = known.iter().cloned().collect();
            let policy = [UnknownUnitPolicy::SymbolEdit, UnknownUnitPolicy::FeatureEdit, UnknownUnitPolicy::Ignore][policy];
            let once = map_unknown_units(&cmd, &v, policy);
            prop_assert!(once.iter().all(|u| v.contains(u)));
            prop_assert_eq!(map_unknown_units(&once, &v, policy), once);
        }

        #[test]
        fn edit_distance_is_a_metric_on_small_strings(a in "[a-c]{0,4}", b in "[a-c]{0,4}", c in "[a-c]{0,4}") {
            let d = symbol_edit_distance;
            prop_assert_eq!(d(&a, &b), d(&b, &a));
            prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
            prop_assert_eq!(d(&a, &a), 0.0);
            prop_assert!(feature_edit_distance(&a, &b) <= d(&a, &b));
        }
    }
}
