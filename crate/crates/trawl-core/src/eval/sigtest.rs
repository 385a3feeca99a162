//! Fisher's two-sided paired randomization test.
//!
//! The statistic is the absolute mean of the paired per-topic differences.
//! Under the null, each difference's sign is exchangeable, so the p-value is
//! the fraction of sign assignments whose statistic is at least the observed
//! one. Up to 20 pairs all `2^n` assignments are enumerated (the identity
//! assignment included, so `p` is never 0); beyond that a seeded Monte Carlo
//! estimate with the `(count + 1) / (iterations + 1)` correction takes over.
//!
//! Both paths are chunked with per-chunk state, so the parallel and
//! sequential lanes count exactly the same assignments.

use crate::error::{Error, Result};
use crate::par;
use crate::rng::SplitMix64;

/// Largest n enumerated exhaustively; 2^20 assignments is the knee beyond
/// which Monte Carlo wins.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Comparison slack for `|permuted mean| >= |observed mean|`: permuted sums
/// re-add the same magnitudes in a different order, so equality may be off
/// by an ulp.
const TIE_EPS: f64 = 1e-12;

/// Two-sided paired randomization p-value for per-topic scores `a` vs `b`.
/// Exhaustive for `n <= EXHAUSTIVE_LIMIT`, Monte Carlo otherwise.
pub fn paired_randomization_test(a: &[f64], b: &[f64], iterations: u64, seed: u64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::PairedLengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptySample);
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if diffs.len() <= EXHAUSTIVE_LIMIT {
        exhaustive_p(&diffs)
    } else {
        monte_carlo_p(&diffs, iterations, seed)
    }
}

/// Exact p-value by enumerating all `2^n` sign assignments.
///
/// The enumeration walks masks in Gray-code order so each step updates the
/// running sum with a single flip; chunks recompute their starting sum
/// directly, which lets the scan parallelize without changing the count.
pub fn exhaustive_p(diffs: &[f64]) -> Result<f64> {
    let n = diffs.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if n > 63 {
        return Err(Error::InvalidConfig(format!(
            "exhaustive enumeration limited to 63 pairs, got {n}"
        )));
    }
    let observed = diffs.iter().sum::<f64>().abs();
    let total: u64 = 1u64 << n;

    let count = par::sum_over_chunks(total, 1 << 16, |start, end| {
        let mut mask = start ^ (start >> 1); // Gray code of start
        let mut sum: f64 = (0..n)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    -diffs[i]
                } else {
                    diffs[i]
                }
            })
            .sum();
        let mut count = 0u64;
        for j in start..end {
            if sum.abs() >= observed - TIE_EPS {
                count += 1;
            }
            let next = j + 1;
            if next == end {
                break;
            }
            let bit = next.trailing_zeros() as usize;
            mask ^= 1 << bit;
            if mask >> bit & 1 == 1 {
                sum -= 2.0 * diffs[bit];
            } else {
                sum += 2.0 * diffs[bit];
            }
        }
        count
    });

    Ok(count as f64 / total as f64)
}

/// Monte Carlo p-value over `iterations` random sign assignments, with the
/// add-one correction so `p > 0`. Each trial derives its own generator from
/// `(seed, trial index)`, making the estimate independent of thread count.
pub fn monte_carlo_p(diffs: &[f64], iterations: u64, seed: u64) -> Result<f64> {
    let n = diffs.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if iterations == 0 {
        return Err(Error::InvalidConfig("iterations must be >= 1".into()));
    }
    let observed = diffs.iter().sum::<f64>().abs();

    let count = par::sum_over_chunks(iterations, 1 << 12, |start, end| {
        let mut count = 0u64;
        for trial in start..end {
            let mut rng = SplitMix64::substream(seed, trial);
            let mut sum = 0.0;
            let mut bits = rng.next_u64();
            for (i, &d) in diffs.iter().enumerate() {
                if i > 0 && i % 64 == 0 {
                    bits = rng.next_u64();
                }
                sum += if bits >> (i % 64) & 1 == 1 { -d } else { d };
            }
            if sum.abs() >= observed - TIE_EPS {
                count += 1;
            }
        }
        count
    });

    Ok((count + 1) as f64 / (iterations + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples_give_p_one() {
        let a = [0.4, 0.5, 0.6, 0.7];
        let p = paired_randomization_test(&a, &a, 1000, 1).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn single_pair_gives_p_one() {
        // Both sign assignments reach |d|, so p = 1 whatever d is.
        let p = paired_randomization_test(&[0.9], &[0.1], 1000, 1).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(matches!(
            paired_randomization_test(&[1.0], &[1.0, 2.0], 10, 0),
            Err(Error::PairedLengthMismatch { .. })
        ));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(
            paired_randomization_test(&[], &[], 10, 0),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn exhaustive_two_pairs_hand_check() {
        // diffs = [1, 1]: sums over sign assignments = {2, 0, 0, -2};
        // |sum| >= 2 for 2 of 4 -> p = 0.5.
        let p = exhaustive_p(&[1.0, 1.0]).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn symmetric_in_argument_order() {
        let a = [0.9, 0.3, 0.4, 0.8, 0.2, 0.6];
        let b = [0.5, 0.4, 0.1, 0.6, 0.3, 0.2];
        let p_ab = paired_randomization_test(&a, &b, 10_000, 7).unwrap();
        let p_ba = paired_randomization_test(&b, &a, 10_000, 7).unwrap();
        assert_eq!(p_ab, p_ba);
    }

    #[test]
    fn exhaustive_matches_naive_enumeration_across_chunks() {
        // n = 18 spans several 2^16 chunks, so the chunk-start sums and the
        // gray-code stepping both get exercised against a direct mask loop.
        let mut rng = SplitMix64::new(0x6EA);
        let diffs: Vec<f64> = (0..18).map(|_| rng.next_f64() - 0.5).collect();
        let observed = diffs.iter().sum::<f64>().abs();
        let total = 1u64 << 18;
        let mut count = 0u64;
        for mask in 0..total {
            let sum: f64 = diffs
                .iter()
                .enumerate()
                .map(|(i, &d)| if mask >> i & 1 == 1 { -d } else { d })
                .sum();
            if sum.abs() >= observed - 1e-12 {
                count += 1;
            }
        }
        let naive = count as f64 / total as f64;
        let fast = exhaustive_p(&diffs).unwrap();
        assert!((fast - naive).abs() < 1e-12, "fast {fast} vs naive {naive}");
    }

    #[test]
    fn monte_carlo_close_to_exhaustive_n10() {
        let mut rng = SplitMix64::new(2024);
        let diffs: Vec<f64> = (0..10).map(|_| rng.next_f64() - 0.4).collect();
        let exact = exhaustive_p(&diffs).unwrap();
        let estimate = monte_carlo_p(&diffs, 100_000, 99).unwrap();
        assert!(
            (exact - estimate).abs() < 0.01,
            "exact {exact} vs estimate {estimate}"
        );
    }

    #[test]
    fn p_value_in_unit_interval() {
        let mut rng = SplitMix64::new(5);
        for trial in 0..20 {
            let n = 2 + (trial % 12);
            let a: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let p = paired_randomization_test(&a, &b, 2000, trial as u64).unwrap();
            assert!(p > 0.0 && p <= 1.0, "p = {p}");
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a: Vec<f64> = (0..30).map(|i| (i as f64 * 0.7).sin().abs()).collect();
        let b: Vec<f64> = (0..30).map(|i| (i as f64 * 0.3).cos().abs()).collect();
        let p1 = paired_randomization_test(&a, &b, 50_000, 13).unwrap();
        let p2 = paired_randomization_test(&a, &b, 50_000, 13).unwrap();
        assert_eq!(p1, p2);
    }
}
