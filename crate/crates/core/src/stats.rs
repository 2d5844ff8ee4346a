//! Order statistics shared by the calibration and simulation code.
//!
//! Percentiles use linear interpolation between closest ranks with the
//! inclusive convention: for `n` sorted samples `x[0..n]` the level `p`
//! sits at fractional position `h = (n - 1)·p`, and the result is
//! `x[⌊h⌋] + (h - ⌊h⌋)·(x[⌊h⌋+1] - x[⌊h⌋])`. Levels 0 and 1 map to the
//! sample minimum and maximum.

use crate::error::{Error, Result};

/// Percentile of an unsorted sample at level `p` in (0, 1).
pub fn percentile(samples: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("percentile level {p} outside (0, 1)")));
    }
    let sorted = sorted_finite(samples)?;
    Ok(quantile_sorted(&sorted, p))
}

/// Copies, validates and sorts a sample.
pub fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("sample value {bad}")));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

/// Interpolated quantile of an already sorted, non-empty sample; `p` is
/// clamped to [0, 1].
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    if frac == 0.0 {
        return sorted[lo];
    }
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Hand interpolation used as the oracle: position (n-1)p on the sorted data.
    fn by_hand(sorted: &[f64], p: f64) -> f64 {
        let pos = (sorted.len() - 1) as f64 * p;
        let k = pos as usize;
        if k + 1 == sorted.len() {
            return sorted[k];
        }
        sorted[k] * (1.0 - (pos - k as f64)) + sorted[k + 1] * (pos - k as f64)
    }

    #[test]
    fn median_of_odd_set() {
        assert_eq!(percentile(&[5.0, 1.0, 3.0, 2.0, 4.0], 0.5).unwrap(), 3.0);
    }

    #[test]
    fn disaster_damage_upper_tail() {
        let damage = [11.69, 10.70, 0.29, 1.08, 0.14, 0.00, 0.00, 0.94, 0.06];
        let v = percentile(&damage, 0.95).unwrap();
        // sorted position 7.6: 10.70 + 0.6·0.99
        assert!((v - 11.294).abs() < 1e-12, "{v}");
        assert!(v > 10.70 && v < 11.69);
    }

    #[test]
    fn constant_sample() {
        for p in [0.01, 0.05, 0.5, 0.95, 0.99] {
            assert_eq!(percentile(&[2.5; 7], p).unwrap(), 2.5);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(percentile(&[], 0.5), Err(Error::EmptySamples)));
        assert!(percentile(&[1.0], 0.0).is_err());
        assert!(percentile(&[1.0], 1.0).is_err());
        assert!(percentile(&[1.0, f64::NAN], 0.5).is_err());
    }

    #[test]
    fn exact_rank_returns_sample() {
        // 21 samples: level 0.05 lands exactly on the second smallest
        let xs: Vec<f64> = (0..21).map(|k| k as f64 * 0.37 - 3.0).collect();
        assert_eq!(percentile(&xs, 0.05).unwrap(), xs[1]);
    }

    proptest! {
        #[test]
        fn monotone_in_level(xs in prop::collection::vec(-100.0f64..100.0, 1..40),
                             p1 in 0.001f64..0.999, p2 in 0.001f64..0.999) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            prop_assert!(percentile(&xs, lo).unwrap() <= percentile(&xs, hi).unwrap());
        }

        #[test]
        fn agrees_with_hand_interpolation(xs in prop::collection::vec(-100.0f64..100.0, 1..40),
                                          p in 0.001f64..0.999) {
            let mut s = xs.clone();
            s.sort_by(f64::total_cmp);
            let v = percentile(&xs, p).unwrap();
            prop_assert!((v - by_hand(&s, p)).abs() <= 1e-9 * (1.0 + v.abs()));
            prop_assert!(v >= s[0] && v <= s[s.len() - 1]);
        }
    }
}
