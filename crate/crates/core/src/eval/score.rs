use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::corpus::Frame;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotCounts {
    pub correct: u64,
    pub induced_filled: u64,
    pub oracle_filled: u64,
}

impl SlotCounts {
    pub fn new(correct: u64, induced_filled: u64, oracle_filled: u64) -> Self {
        SlotCounts { correct, induced_filled, oracle_filled }
    }

    pub fn prf(&self) -> Prf {
        micro_average(std::slice::from_ref(self))
    }
}

impl Add for SlotCounts {
    type Output = SlotCounts;

    fn add(self, o: SlotCounts) -> SlotCounts {
        SlotCounts {
            correct: self.correct + o.correct,
            induced_filled: self.induced_filled + o.induced_filled,
            oracle_filled: self.oracle_filled + o.oracle_filled,
        }
    }
}

impl AddAssign for SlotCounts {
    fn add_assign(&mut self, o: SlotCounts) {
        *self = *self + o;
    }
}

impl Sum for SlotCounts {
    fn sum<I: Iterator<Item = SlotCounts>>(iter: I) -> Self {
        iter.fold(SlotCounts::default(), Add::add)
    }
}

impl<'a> Sum<&'a SlotCounts> for SlotCounts {
    fn sum<I: Iterator<Item = &'a SlotCounts>>(iter: I) -> Self {
        iter.copied().sum()
    }
}

/// Precision, recall and F-score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

/// Slot counts of one induced frame against its oracle frame.
///
/// An induced slot is correct when the oracle frame has the same type and its
/// value set for that slot holds every induced value.
pub fn score_pair(induced: &Frame, oracle: &Frame) -> SlotCounts {
    let correct = if induced.frame_type == oracle.frame_type {
        induced
            .fills
            .iter()
            .filter(|(slot, values)| {
                !values.is_empty() && oracle.get(slot).is_some_and(|o| values.iter().all(|v| o.contains(v)))
            })
            .count() as u64
    } else {
        0
    };
    SlotCounts::new(correct, induced.filled_slots() as u64, oracle.filled_slots() as u64)
}

/// Counts for a missing induced frame (decoding failed).
pub fn score_missing(oracle: &Frame) -> SlotCounts {
    SlotCounts::new(0, 0, oracle.filled_slots() as u64)
}

/// Sums the counts and applies the precision, recall and F formulas once.
pub fn micro_average(counts: &[SlotCounts]) -> Prf {
    let total: SlotCounts = counts.iter().sum();
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(total.correct, total.induced_filled);
    let recall = ratio(total.correct, total.oracle_filled);
    // Harmonic mean of P and R, in count form.
    let f = if precision + recall == 0.0 {
        0.0
    } else {
        ratio(2 * total.correct, total.induced_filled + total.oracle_filled)
    };
    Prf { precision, recall, f }
}

/// Frame-type identification counts for `frame_type`, in the same shape as slot counts.
pub fn frame_type_counts(induced: Option<&Frame>, oracle: &Frame, frame_type: &str) -> SlotCounts {
    let ind = induced.is_some_and(|f| f.frame_type == frame_type);
    let ora = oracle.frame_type == frame_type;
    SlotCounts::new((ind && ora) as u64, ind as u64, ora as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ambiguity_sets_use_membership() {
        let induced = Frame::new("movecard").with("FS", "c").with("FV", "11").with("TS", "h").with("TV", "12");
        let oracle = Frame::new("movecard").with("FS", "c").with("FV", "11").with_set("TS", &["h", "d"]).with("TV", "12");
        let c = score_pair(&induced, &oracle);
        assert_eq!(c, SlotCounts::new(4, 4, 4));
        assert_eq!(c.prf(), Prf { precision: 1.0, recall: 1.0, f: 1.0 });
    }

    #[test]
    fn extra_slot_lowers_precision() {
        let induced = Frame::new("movecard").with("FS", "c").with("FV", "11").with("FC", "3");
        let oracle = Frame::new("movecard").with("FS", "c").with("FV", "11");
        let c = score_pair(&induced, &oracle);
        assert_eq!(c, SlotCounts::new(2, 3, 2));
        let p = c.prf();
        assert_eq!(p.precision, 2.0 / 3.0);
        assert_eq!(p.recall, 1.0);
        assert!((p.f - 0.8).abs() < 1e-15);
    }

    #[test]
    fn type_mismatch_scores_nothing_correct() {
        let induced = Frame::new("movecard").with("FS", "c");
        let c = score_pair(&induced, &Frame::new("dealcard"));
        assert_eq!(c, SlotCounts::new(0, 1, 0));
        assert_eq!(score_pair(&Frame::new("dealcard"), &Frame::new("dealcard")), SlotCounts::default());
    }

    #[test]
    fn micro_average_examples() {
        let p = micro_average(&[SlotCounts::new(2, 3, 2), SlotCounts::new(3, 3, 4)]);
        assert_eq!(p.precision, 5.0 / 6.0);
        assert_eq!(p.recall, 5.0 / 6.0);
        assert!((p.f - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(micro_average(&[SlotCounts::default()]), Prf::default());
        assert_eq!(micro_average(&[]), Prf::default());
    }

    fn arb_counts() -> impl Strategy<Value = SlotCounts> {
        (0u64..20, 0u64..20, 0u64..20).prop_map(|(c, a, b)| SlotCounts::new(c.min(a).min(b), a, b))
    }

    fn arb_frame(single: bool) -> impl Strategy<Value = Frame> {
        let slots = ["FS", "FV", "TS", "TV"];
        proptest::collection::vec((0usize..4, 0usize..3, 0usize..3), 0..5).prop_map(move |fills| {
            let mut f = Frame::new("movecard");
            for (s, v, w) in fills {
                if single && f.get(slots[s]).is_some() {
                    continue;
                }
                f.insert(slots[s], &v.to_string());
                if !single {
                    f.insert(slots[s], &w.to_string());
                }
            }
            f
        })
    }

    proptest! {
        #[test]
        fn duplication_is_neutral(counts in proptest::collection::vec(arb_counts(), 0..8)) {
            let doubled: Vec<SlotCounts> = counts.iter().chain(counts.iter()).copied().collect();
            prop_assert_eq!(micro_average(&counts), micro_average(&doubled));
        }

        #[test]
        fn f_lies_between_p_and_r(counts in proptest::collection::vec(arb_counts(), 0..8)) {
            let p = micro_average(&counts);
            if p.f > 0.0 {
                prop_assert!(p.f <= p.precision.max(p.recall) + 1e-12);
                prop_assert!(p.f >= p.precision.min(p.recall) - 1e-12);
            }
        }

        #[test]
        fn swapping_singleton_frames_swaps_p_and_r(a in arb_frame(true), b in arb_frame(true)) {
            let ab = score_pair(&a, &b);
            let ba = score_pair(&b, &a);
            prop_assert_eq!(ab.correct, ba.correct);
            prop_assert!(ab.correct <= ab.induced_filled.min(ab.oracle_filled));
            prop_assert_eq!(ab.prf().precision, ba.prf().recall);
            prop_assert_eq!(ab.prf().recall, ba.prf().precision);
        }

        #[test]
        fn correct_never_exceeds_fills(a in arb_frame(true), b in arb_frame(false)) {
            let c = score_pair(&a, &b);
            prop_assert!(c.correct <= c.induced_filled.min(c.oracle_filled));
        }
    }
}
