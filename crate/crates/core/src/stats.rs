//! Small sample-statistics helpers for replica averages.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::math;

/// A Monte Carlo estimate: sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

impl Estimate {
    /// Mean and stderr of a sample; stderr is 0 for a single sample.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n > 0, "empty sample");
        let mut sum = math::CompensatedSum::new();
        for &x in samples {
            sum.add(x);
        }
        let mean = sum.value() / n as f64;
        let stderr = if n < 2 {
            0.0
        } else {
            let mut ss = math::CompensatedSum::new();
            for &x in samples {
                let d = x - mean;
                ss.add(d * d);
            }
            math::sqrt(ss.value() / ((n - 1) as f64 * n as f64))
        };
        Self {
            mean,
            stderr,
            n_samples: n,
        }
    }

    /// |mean| ≤ k·stderr, with exact zero allowed when stderr is zero.
    pub fn consistent_with_zero(&self, k: f64) -> bool {
        math::abs(self.mean) <= k * self.stderr || self.mean == 0.0
    }
}

/// Per-replica paired samples of a Monte Carlo estimator and its closed-form
/// prediction computed along the same paths, plus their difference.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairedEstimate {
    pub mc: Estimate,
    pub prediction: Estimate,
    /// Estimate of `mc − prediction`; its expectation is zero when the
    /// pairing is exact.
    pub diff: Estimate,
}

impl PairedEstimate {
    pub fn from_pairs(mc: &[f64], pred: &[f64]) -> Self {
        assert_eq!(mc.len(), pred.len());
        let diffs: Vec<f64> = mc.iter().zip(pred).map(|(a, b)| a - b).collect();
        Self {
            mc: Estimate::from_samples(mc),
            prediction: Estimate::from_samples(pred),
            diff: Estimate::from_samples(&diffs),
        }
    }

    /// The paired consistency check: the MC estimate is within `k` standard
    /// errors of its prediction, computed on the difference samples.
    pub fn agrees(&self, k: f64) -> bool {
        self.diff.consistent_with_zero(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn estimate_basics() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert!((e.mean - 2.5).abs() < 1e-15);
        // sample sd = sqrt(5/3), stderr = sd/2
        assert!((e.stderr - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        let single = Estimate::from_samples(&[7.0]);
        assert_eq!(single.stderr, 0.0);
    }

    #[test]
    fn paired_diff_zero_for_identical() {
        let xs = vec![0.1, 0.4, -0.2];
        let p = PairedEstimate::from_pairs(&xs, &xs);
        assert_eq!(p.diff.mean, 0.0);
        assert!(p.agrees(3.0));
    }
}
