//! First-return law of the simple symmetric random walk and the sign-averaged
//! excursion weights built from it.
//!
//! The walk returns to the origin for the first time at time 2n with
//! probability `p(2n) = C(2n, n) / ((2n − 1) 4^n)`; the generating function of
//! the law is `Σ p(2n) z^{2n} = 1 − √(1 − z²)`. An excursion of length 2l
//! costs `e^{−4hl}` when it runs below the interface and 1 above, each sign
//! being equally likely, which gives the weight
//! `V_{h,l} = p(2l) (e^{−4hl} + 1) / 2`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// P(first return at time 2n), computed through log-gamma so it stays finite
/// far beyond the factorial overflow point.
pub fn return_prob(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain(String::from(
            "first-return time is supported on n ≥ 1",
        )));
    }
    let nf = n as f64;
    let log_p = math::ln_gamma(2.0 * nf + 1.0)
        - 2.0 * math::ln_gamma(nf + 1.0)
        - math::ln(2.0 * nf - 1.0)
        - 2.0 * nf * core::f64::consts::LN_2;
    Ok(math::exp(log_p))
}

/// P(no return within 2n steps) = 1 − Σ_{k ≤ n} p(2k), summed backward
/// (smallest terms first) with compensation.
pub fn return_tail(n: usize) -> f64 {
    let mut sum = math::CompensatedSum::new();
    for k in (1..=n).rev() {
        sum.add(return_prob(k).expect("k ≥ 1"));
    }
    1.0 - sum.value()
}

/// Sign-averaged excursion weight `V_{h,l} = p(2l) (e^{−4hl} + 1) / 2`.
/// Equals `p(2l)` at h = 0 and decreases toward `p(2l) / 2` as h grows.
pub fn excursion_weight(h: f64, l: usize) -> Result<f64> {
    let p = return_prob(l)?;
    Ok(p * 0.5 * (1.0 + math::exp(-4.0 * h * l as f64)))
}

/// Tabulated first-return law up to an even truncation horizon.
#[derive(Debug, Clone)]
pub struct WalkKernel {
    max_len: usize,
    /// probs[n − 1] = P(τ = 2n), n = 1..T/2.
    probs: Vec<f64>,
    /// tails[n] = P(τ > 2n), n = 0..T/2.
    tails: Vec<f64>,
}

impl WalkKernel {
    /// Build the tables for excursion lengths up to `max_len` (even ≥ 2).
    pub fn new(max_len: usize) -> Result<Self> {
        if max_len < 2 || !max_len.is_multiple_of(2) {
            return Err(Error::Domain(String::from(
                "truncation horizon must be an even integer ≥ 2",
            )));
        }
        let half = max_len / 2;
        let mut probs = Vec::with_capacity(half);
        for n in 1..=half {
            probs.push(return_prob(n)?);
        }
        // tails by backward partial sums: tail(n) = 1 - Σ_{k≤n} p(k), with the
        // partial sums accumulated from the small terms up.
        let mut tails = alloc::vec![0.0; half + 1];
        tails[0] = 1.0;
        let mut suffix = alloc::vec![0.0f64; half + 1];
        let mut acc = math::CompensatedSum::new();
        for n in (1..=half).rev() {
            acc.add(probs[n - 1]);
            suffix[n] = acc.value();
        }
        let total = suffix[1];
        for n in 1..=half {
            let head = if n < half { suffix[n + 1] } else { 0.0 };
            tails[n] = 1.0 - (total - head);
        }
        Ok(Self {
            max_len,
            probs,
            tails,
        })
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// P(τ = 2n) for 1 ≤ n ≤ T/2.
    #[inline]
    pub fn prob(&self, n: usize) -> f64 {
        self.probs[n - 1]
    }

    /// P(τ > 2n) for 0 ≤ n ≤ T/2.
    #[inline]
    pub fn tail(&self, n: usize) -> f64 {
        self.tails[n]
    }

    /// P(τ > m) for arbitrary step counts m ≤ T: for odd m this equals
    /// P(τ > m − 1) because return times are even.
    #[inline]
    pub fn tail_steps(&self, m: usize) -> f64 {
        self.tails[m / 2]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Sign-averaged weights V_{h,l} for l = 1..T/2 as a dense table.
    pub fn weights(&self, h: f64) -> Vec<f64> {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| p * 0.5 * (1.0 + math::exp(-4.0 * h * (i + 1) as f64)))
            .collect()
    }

    /// Truncated generating function Σ_{n ≤ T/2} p(2n) z^{2n}.
    pub fn generating_fn(&self, z: f64) -> f64 {
        let z2 = z * z;
        let mut term = 1.0;
        let mut sum = math::CompensatedSum::new();
        for p in &self.probs {
            term *= z2;
            sum.add(p * term);
        }
        sum.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact first-return probability for small n from a u128 binomial.
    fn return_prob_exact(n: usize) -> f64 {
        assert!(n <= 15);
        let binom = |n: u128, k: u128| -> u128 {
            let mut r: u128 = 1;
            for i in 0..k {
                r = r * (n - i) / (i + 1);
            }
            r
        };
        binom(2 * n as u128, n as u128) as f64 / ((2.0 * n as f64 - 1.0) * 4f64.powi(n as i32))
    }

    #[test]
    fn small_values_exact() {
        assert!((return_prob(1).unwrap() - 0.5).abs() < 1e-16);
        assert!((return_prob(2).unwrap() - 0.125).abs() < 1e-16);
        assert!((return_prob(3).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        for n in 1..=15 {
            let rel = (return_prob(n).unwrap() - return_prob_exact(n)) / return_prob_exact(n);
            assert!(rel.abs() < 1e-13, "n={n}: rel={rel:e}");
        }
    }

    #[test]
    fn rejects_zero() {
        assert!(return_prob(0).is_err());
    }

    #[test]
    fn probs_strictly_decreasing() {
        let k = WalkKernel::new(4096).unwrap();
        for n in 1..k.probs.len() {
            assert!(k.probs[n] < k.probs[n - 1], "not decreasing at n={n}");
        }
    }

    #[test]
    fn tails_basic() {
        assert_eq!(return_tail(0), 1.0);
        assert!((return_tail(1) - 0.5).abs() < 1e-16);
        let k = WalkKernel::new(64).unwrap();
        assert_eq!(k.tail(0), 1.0);
        assert!((k.tail(1) - 0.5).abs() < 1e-16);
        assert_eq!(k.tail_steps(5), k.tail(2));
        for n in 1..=32 {
            assert!((k.tail(n) - return_tail(n)).abs() < 1e-15);
        }
    }

    #[test]
    fn normalization_to_1e14() {
        for t in [64usize, 1000, 20_000] {
            let k = WalkKernel::new(t).unwrap();
            let mut sum = math::CompensatedSum::new();
            for p in &k.probs {
                sum.add(*p);
            }
            let total = sum.value() + k.tail(t / 2);
            assert!((total - 1.0).abs() < 1e-14, "T={t}: {:e}", total - 1.0);
        }
    }

    #[test]
    fn generating_fn_matches_closed_form() {
        let k = WalkKernel::new(200_000).unwrap();
        for i in 1..=9 {
            let z = 0.1 * i as f64;
            let exact = 1.0 - (1.0 - z * z).sqrt();
            assert!((k.generating_fn(z) - exact).abs() < 1e-10, "z={z}");
        }
        // at a small horizon the truncation remainder bound must cover the gap
        let short = WalkKernel::new(40).unwrap();
        for i in 1..=9 {
            let z: f64 = 0.1 * i as f64;
            let exact = 1.0 - (1.0 - z * z).sqrt();
            let bound = z.powi(42) / (1.0 - z * z).sqrt();
            assert!(
                (short.generating_fn(z) - exact).abs() <= 1e-10 + bound,
                "z={z}"
            );
        }
    }

    #[test]
    fn excursion_weight_limits() {
        assert!((excursion_weight(0.0, 1).unwrap() - 0.5).abs() < 1e-16);
        // sign-averaging halves the weight as h → ∞
        assert!((excursion_weight(f64::INFINITY, 1).unwrap() - 0.25).abs() < 1e-16);
        assert_eq!(excursion_weight(0.0, 3).unwrap(), return_prob(3).unwrap());
        let v = excursion_weight(0.25, 3).unwrap();
        let expect = (1.0 / 16.0) * 0.5 * (1.0 + (-3.0f64).exp());
        assert!((v - expect).abs() < 1e-16);
    }

    #[test]
    fn excursion_weight_monotone_in_h() {
        for l in [1usize, 2, 7, 40] {
            let mut prev = excursion_weight(0.0, l).unwrap();
            for i in 1..=10 {
                let h = 0.3 * i as f64;
                let v = excursion_weight(h, l).unwrap();
                assert!(v <= prev, "l={l}, h={h}");
                // strict decrease while e^{−4hl} is resolvable in f64
                if (-4.0 * h * l as f64).exp() > 1e-14 {
                    assert!(v < prev, "l={l}, h={h}");
                }
                prev = v;
            }
        }
    }

    #[test]
    fn tail_decays_like_inverse_square_root() {
        // P(τ > 2n) = C(2n,n) 4^{−n} → 1/√(πn); partial sums approach 1
        // with exactly that defect
        let k = WalkKernel::new(200_000).unwrap();
        for n in [1_000usize, 10_000, 100_000] {
            let asym = 1.0 / (core::f64::consts::PI * n as f64).sqrt();
            let ratio = k.tail(n) / asym;
            assert!(
                (ratio - 1.0).abs() < 1e-3,
                "n={n}: tail {} vs asymptote {asym}",
                k.tail(n)
            );
        }
    }

    #[test]
    fn tail_matches_zero_avoiding_path_count() {
        // exact DP over walk paths that never hit 0 again within 2n steps
        let bridge_tail = |steps: usize| -> f64 {
            // heights offset by `steps`; start after the forced first step
            let mut probs = alloc::vec![0.0f64; 2 * steps + 1];
            probs[steps + 1] = 1.0; // by symmetry, condition on first step up
            for _ in 1..steps {
                let mut next = alloc::vec![0.0f64; 2 * steps + 1];
                for (i, &w) in probs.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    // forbid the origin strictly before the horizon
                    if i + 1 != steps {
                        next[i + 1] += 0.5 * w;
                    }
                    if i >= 1 && i - 1 != steps {
                        next[i - 1] += 0.5 * w;
                    }
                }
                probs = next;
            }
            probs.iter().sum()
        };
        for n in [3usize, 10, 50] {
            let exact = bridge_tail(2 * n);
            assert!(
                (return_tail(n) - exact).abs() < 1e-13,
                "n={n}: {} vs {exact}",
                return_tail(n)
            );
        }
    }
}
