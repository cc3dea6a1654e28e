use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::score::{micro_average, SlotCounts};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignificanceError {
    #[error("systems scored {0} and {1} instances")]
    LengthMismatch(usize, usize),
    #[error("exhaustive enumeration supports at most 24 instances, got {0}")]
    TooManyInstances(usize),
}

/// Tolerance when comparing a shuffled statistic with the observed one.
const STAT_EPSILON: f64 = 1e-12;

fn statistic(a: &[SlotCounts], b: &[SlotCounts]) -> f64 {
    (micro_average(a).f - micro_average(b).f).abs()
}

fn check(a: &[SlotCounts], b: &[SlotCounts]) -> Result<(), SignificanceError> {
    if a.len() != b.len() {
        return Err(SignificanceError::LengthMismatch(a.len(), b.len()));
    }
    Ok(())
}

/// Approximate randomization test on the absolute micro-F difference.
///
/// Each shuffle swaps every aligned pair of instance counts with probability
/// one half. Returns `(count + 1) / (shuffles + 1)`.
pub fn approx_randomization_test(
    a: &[SlotCounts],
    b: &[SlotCounts],
    shuffles: usize,
    seed: u64,
) -> Result<f64, SignificanceError> {
    check(a, b)?;
    let observed = statistic(a, b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    let mut count = 0usize;
    for _ in 0..shuffles {
        for i in 0..a.len() {
            if rng.random_bool(0.5) {
                x[i] = b[i];
                y[i] = a[i];
            } else {
                x[i] = a[i];
                y[i] = b[i];
            }
        }
        if statistic(&x, &y) >= observed - STAT_EPSILON {
            count += 1;
        }
    }
    Ok((count + 1) as f64 / (shuffles + 1) as f64)
}

/// Exact permutation p-value: the share of all `2^n` swap patterns whose
/// statistic reaches the observed one.
pub fn exhaustive_randomization_test(a: &[SlotCounts], b: &[SlotCounts]) -> Result<f64, SignificanceError> {
    check(a, b)?;
    if a.len() > 24 {
        return Err(SignificanceError::TooManyInstances(a.len()));
    }
    let observed = statistic(a, b);
    let patterns = 1u64 << a.len();
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    let mut count = 0u64;
    for mask in 0..patterns {
        for i in 0..a.len() {
            if mask >> i & 1 == 1 {
                x[i] = b[i];
                y[i] = a[i];
            } else {
                x[i] = a[i];
                y[i] = b[i];
            }
        }
        if statistic(&x, &y) >= observed - STAT_EPSILON {
            count += 1;
        }
    }
    Ok(count as f64 / patterns as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: u64, y: u64, z: u64) -> SlotCounts {
        SlotCounts::new(x, y, z)
    }

    #[test]
    fn identical_systems() {
        let a = vec![c(2, 3, 4), c(1, 1, 1), c(0, 2, 2)];
        assert!(approx_randomization_test(&a, &a, 1000, 1).unwrap() >= 0.9);
        assert_eq!(exhaustive_randomization_test(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn three_instances_by_hand() {
        // a: F over (3,3,3)=1; b: (0,3,3) F=0. Swapping any subset gives
        // |F(x)-F(y)| = |k - (3-k)|/3 for k swapped instances; the observed 1
        // is reached only by swapping none or all: p = 2/8.
        let a = vec![c(1, 1, 1); 3];
        let b = vec![c(0, 1, 1); 3];
        assert_eq!(exhaustive_randomization_test(&a, &b).unwrap(), 0.25);
        let p = approx_randomization_test(&a, &b, 20_000, 3).unwrap();
        assert!((p - 0.25).abs() < 0.02, "{p}");
    }

    #[test]
    fn separated_systems_are_significant() {
        let a = vec![c(3, 3, 3); 20];
        let b = vec![c(0, 3, 3); 20];
        assert!(approx_randomization_test(&a, &b, 10_000, 5).unwrap() < 0.05);
    }

    #[test]
    fn misaligned_lists() {
        assert_eq!(
            approx_randomization_test(&[c(1, 1, 1)], &[], 10, 0),
            Err(SignificanceError::LengthMismatch(1, 0))
        );
    }
}
