//! Disorder specifications and seeded field generation.
//!
//! A disorder spec is a centered law with all exponential moments; the
//! built-in default is the scaled Rademacher law ζ = ±2 equiprobable, the
//! unique two-point centered law with `P(ζ > 0) = 1/2` and
//! `E[ζ 1{ζ > 0}] = 1`, which is exactly the normalization under which the
//! quantitative lower-bound constants are stated. Fields regenerate
//! bit-identically from `(spec, n, seed, replica)`; replicas use independent
//! ChaCha streams so they can be produced in parallel in any order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::math;
use crate::{Error, Result};

/// Mean tolerance for user-supplied finite-support laws.
pub const TABLE_MEAN_TOL: f64 = 1e-12;

/// A finite-support centered law. Probabilities are normalized at
/// construction and the mean must vanish to within [`TABLE_MEAN_TOL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct TableSpec {
    support: Vec<f64>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawTable {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl From<TableSpec> for RawTable {
    fn from(t: TableSpec) -> Self {
        RawTable {
            support: t.support,
            probs: t.probs,
        }
    }
}

impl TryFrom<RawTable> for TableSpec {
    type Error = Error;
    fn try_from(raw: RawTable) -> Result<Self> {
        TableSpec::new(raw.support, raw.probs)
    }
}

impl TableSpec {
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::InvalidSpec(String::from(
                "support and probs must be non-empty and of equal length",
            )));
        }
        if support.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpec(String::from("non-finite support value")));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidSpec(String::from(
                "negative or non-finite probability",
            )));
        }
        let total: f64 = probs.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidSpec(String::from(
                "probabilities sum to zero",
            )));
        }
        let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
        let mut mean = math::CompensatedSum::new();
        let mut second = 0.0;
        for (x, p) in support.iter().zip(&probs) {
            mean.add(x * p);
            second += x * x * p;
        }
        if math::abs(mean.value()) >= TABLE_MEAN_TOL {
            return Err(Error::InvalidSpec(format!(
                "mean {:e} nonzero after normalization",
                mean.value()
            )));
        }
        if second == 0.0 {
            return Err(Error::InvalidSpec(String::from(
                "degenerate law concentrated at zero",
            )));
        }
        let mut cdf = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        Ok(Self {
            support,
            probs,
            cdf,
        })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// The centered disorder laws the lab understands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DisorderSpec {
    /// ζ = ±2 with probability 1/2 each.
    ScaledRademacher,
    /// Standard normal.
    GaussianUnit,
    /// Arbitrary centered finite-support law.
    Table(TableSpec),
}

impl DisorderSpec {
    /// The mean of ζ, zero by construction for every kind.
    pub fn mean(&self) -> f64 {
        0.0
    }

    pub fn variance(&self) -> f64 {
        match self {
            DisorderSpec::ScaledRademacher => 4.0,
            DisorderSpec::GaussianUnit => 1.0,
            DisorderSpec::Table(t) => t.support.iter().zip(&t.probs).map(|(x, p)| x * x * p).sum(),
        }
    }

    /// Cumulant generating function log E[e^{λζ}], finite for all λ.
    pub fn cumulant(&self, lambda: f64) -> f64 {
        match self {
            DisorderSpec::ScaledRademacher => math::ln_cosh(2.0 * lambda),
            DisorderSpec::GaussianUnit => 0.5 * lambda * lambda,
            DisorderSpec::Table(t) => {
                let mut lse = math::StreamingLse::new();
                for (x, p) in t.support.iter().zip(&t.probs) {
                    if *p > 0.0 {
                        lse.add_log(math::ln(*p) + lambda * x);
                    }
                }
                lse.value()
            }
        }
    }

    /// P(ζ > 0).
    pub fn prob_positive(&self) -> f64 {
        match self {
            DisorderSpec::ScaledRademacher => 0.5,
            DisorderSpec::GaussianUnit => 0.5,
            DisorderSpec::Table(t) => t
                .support
                .iter()
                .zip(&t.probs)
                .filter(|(x, _)| **x > 0.0)
                .map(|(_, p)| p)
                .sum(),
        }
    }

    /// E[ζ 1{ζ > 0}].
    pub fn mean_positive_part(&self) -> f64 {
        match self {
            DisorderSpec::ScaledRademacher => 1.0,
            DisorderSpec::GaussianUnit => 1.0 / math::sqrt(2.0 * core::f64::consts::PI),
            DisorderSpec::Table(t) => t
                .support
                .iter()
                .zip(&t.probs)
                .filter(|(x, _)| **x > 0.0)
                .map(|(x, p)| x * p)
                .sum(),
        }
    }

    /// Whether the quantitative lower-bound constants apply verbatim:
    /// `P(ζ > 0) = 1/2` and `E[ζ 1{ζ > 0}] = 1`.
    pub fn satisfies_bound_normalization(&self) -> bool {
        math::abs(self.prob_positive() - 0.5) < 1e-12
            && math::abs(self.mean_positive_part() - 1.0) < 1e-12
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            DisorderSpec::ScaledRademacher => {
                if rng.random::<bool>() {
                    2.0
                } else {
                    -2.0
                }
            }
            DisorderSpec::GaussianUnit => rng.sample(StandardNormal),
            DisorderSpec::Table(t) => {
                let u: f64 = rng.random();
                let idx = t.cdf.partition_point(|&c| c <= u);
                t.support[idx.min(t.support.len() - 1)]
            }
        }
    }
}

/// A realized disorder sequence ζ_1..ζ_n together with its generator state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderField {
    values: Vec<f64>,
    spec: DisorderSpec,
    seed: u64,
    replica: u64,
}

impl DisorderField {
    /// ζ_i for 1-based site i.
    #[inline]
    pub fn site(&self, i: usize) -> f64 {
        debug_assert!(i >= 1);
        self.values[i - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spec(&self) -> &DisorderSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replica(&self) -> u64 {
        self.replica
    }

    /// An s = 0 stand-in: an all-zero field for computations that ignore the
    /// disorder.
    pub fn zeros(n: usize) -> Self {
        Self {
            values: alloc::vec![0.0; n],
            spec: DisorderSpec::ScaledRademacher,
            seed: 0,
            replica: 0,
        }
    }
}

/// Draw an i.i.d. field of length `n`. Deterministic in `(spec, n, seed)`;
/// the first `k` values agree for any two lengths ≥ k.
pub fn make_disorder(spec: &DisorderSpec, n: usize, seed: u64) -> Result<DisorderField> {
    make_disorder_replica(spec, n, seed, 0)
}

/// Replica `r` of the field: same seed, independent ChaCha stream. Replicas
/// can be generated in any order or in parallel with identical results.
pub fn make_disorder_replica(
    spec: &DisorderSpec,
    n: usize,
    seed: u64,
    replica: u64,
) -> Result<DisorderField> {
    if n == 0 {
        return Err(Error::Domain(String::from("field length must be ≥ 1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    let values = (0..n).map(|_| spec.draw(&mut rng)).collect();
    Ok(DisorderField {
        values,
        spec: spec.clone(),
        seed,
        replica,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rademacher_field_is_deterministic_and_supported() {
        let spec = DisorderSpec::ScaledRademacher;
        let a = make_disorder(&spec, 4, 7).unwrap();
        let b = make_disorder(&spec, 4, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.values().iter().all(|&v| v == 2.0 || v == -2.0));
        let longer = make_disorder(&spec, 9, 7).unwrap();
        assert_eq!(&longer.values()[..4], a.values());
        let other_seed = make_disorder(&spec, 4, 8).unwrap();
        assert_ne!(other_seed.values(), a.values());
    }

    #[test]
    fn replicas_differ_but_are_reproducible() {
        let spec = DisorderSpec::GaussianUnit;
        let r0 = make_disorder_replica(&spec, 16, 3, 0).unwrap();
        let r1 = make_disorder_replica(&spec, 16, 3, 1).unwrap();
        assert_ne!(r0.values(), r1.values());
        assert_eq!(r1, make_disorder_replica(&spec, 16, 3, 1).unwrap());
    }

    #[test]
    fn gaussian_mean_within_clt_band() {
        let n = 100_000;
        let f = make_disorder(&DisorderSpec::GaussianUnit, n, 1).unwrap();
        let mean: f64 = f.values().iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
    }

    #[test]
    fn table_matches_rademacher_law() {
        let t = DisorderSpec::Table(TableSpec::new(vec![2.0, -2.0], vec![0.5, 0.5]).unwrap());
        let r = DisorderSpec::ScaledRademacher;
        assert_eq!(t.variance(), r.variance());
        assert_eq!(t.prob_positive(), r.prob_positive());
        assert_eq!(t.mean_positive_part(), r.mean_positive_part());
        for lam in [-1.0, -0.3, 0.0, 0.2, 1.7] {
            assert!((t.cumulant(lam) - r.cumulant(lam)).abs() < 1e-12);
        }
        let f = make_disorder(&t, 64, 5).unwrap();
        assert!(f.values().iter().all(|&v| v == 2.0 || v == -2.0));
    }

    #[test]
    fn table_rejects_nonzero_mean_and_degenerate() {
        assert!(TableSpec::new(vec![1.0, -2.0], vec![0.5, 0.5]).is_err());
        assert!(TableSpec::new(vec![0.0], vec![1.0]).is_err());
        // normalization happens before the mean check
        assert!(TableSpec::new(vec![1.0, -1.0], vec![3.0, 3.0]).is_ok());
    }

    #[test]
    fn cumulant_values() {
        let r = DisorderSpec::ScaledRademacher;
        assert_eq!(r.cumulant(0.0), 0.0);
        assert!((r.cumulant(0.2) - (0.4f64.cosh()).ln()).abs() < 1e-15);
        let g = DisorderSpec::GaussianUnit;
        assert!((g.cumulant(0.2) - 0.02).abs() < 1e-16);
        // cumulants are nonnegative for centered laws
        for lam in [-2.0, -0.5, 0.3, 1.0] {
            assert!(r.cumulant(lam) >= 0.0);
            assert!(g.cumulant(lam) >= 0.0);
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = DisorderSpec::ScaledRademacher;
        let js = serde_json::to_string(&spec).unwrap();
        assert_eq!(js, r#"{"kind":"scaled_rademacher"}"#);
        assert_eq!(serde_json::from_str::<DisorderSpec>(&js).unwrap(), spec);

        let t = DisorderSpec::Table(TableSpec::new(vec![1.0, -1.0], vec![0.5, 0.5]).unwrap());
        let js = serde_json::to_string(&t).unwrap();
        let back: DisorderSpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, t);

        // deserialization enforces the centered-mean invariant
        let bad = r#"{"kind":"table","params":{"support":[1.0,2.0],"probs":[0.5,0.5]}}"#;
        assert!(serde_json::from_str::<DisorderSpec>(bad).is_err());
    }
}
