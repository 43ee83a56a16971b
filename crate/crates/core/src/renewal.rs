//! Exact finite-size quenched and annealed partition functions by renewal
//! dynamic programming, free-energy and contact-fraction estimators, the
//! brute-force path enumeration oracle, and the numerical bracketing of the
//! disordered transition.
//!
//! The constrained partition function obeys
//!
//! ```text
//! Z^c(2m) = Σ_{l=1}^{m} Z^c(2m − 2l) · V_{h,l} · e^{β (1 + s ζ_{2m})},
//! ```
//!
//! with `V_{h,l}` the sign-averaged excursion weight, and the free chain adds
//! a final unfinished stretch `(1 + e^{−2h(N−j)})/2 · P(τ > N − j)` over the
//! last contact j. The convolution runs in linear space with a running
//! rescale: all scaled entries share one common scale, each true log-value is
//! recorded when its entry is produced, and entries that later underflow the
//! shared scale contribute nothing, which is also true of their exact
//! counterparts at that point, far below the accumulation's 1e-10 target.
//! The sum order inside the convolution is fixed, so results are identical
//! across runs and thread counts.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::disorder::{make_disorder_replica, DisorderField, DisorderSpec};
use crate::homogeneous::{annealed_critical_h, annealed_exponent, beta_ann, critical_h_hom};
use crate::math;
use crate::params::ModelParams;
use crate::stats::Estimate;
use crate::walk::WalkKernel;
use crate::{Error, Result};

/// Which partition function a free-energy estimate is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMode {
    /// Endpoint pinned at the interface.
    Constrained,
    /// Free endpoint.
    Free,
}

/// Log-space record of one exact DP run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionTrace {
    pub n: usize,
    /// `log_zc[k] = log Z^c(2k)` for k = 0..n/2; `log_zc[0] = 0`.
    pub log_zc: Vec<f64>,
    /// Free-endpoint log partition value at n.
    pub log_zf: f64,
    /// Expected number of returns under the constrained polymer measure.
    pub contact_expectation: f64,
    pub params: ModelParams,
    pub disorder_seed: u64,
    pub disorder_replica: u64,
}

/// Replica mean and standard error of `(1/n) log Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub replicas: usize,
    pub mode: PartitionMode,
}

const RESCALE_HI: f64 = 1e140;
const RESCALE_LO: f64 = 1e-140;

/// Cost cap on the O(n²) convolution: one realization at the cap runs a few
/// seconds on one core.
pub const RENEWAL_CAP: usize = 200_000;

fn check_even(n: usize) -> Result<()> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    if n > RENEWAL_CAP {
        return Err(Error::TooLarge {
            cap: RENEWAL_CAP,
            got: n,
        });
    }
    Ok(())
}

fn check_even_len(n: usize, disorder: &DisorderField) -> Result<()> {
    check_even(n)?;
    if disorder.len() < n {
        return Err(Error::SizeMismatch {
            needed: n,
            got: disorder.len(),
        });
    }
    Ok(())
}

/// Per-contact reward factors `e^{β(1 + s ζ_{2m})}` for m = 1..n/2.
fn contact_rewards(params: &ModelParams, disorder: &DisorderField, n: usize) -> Vec<f64> {
    (1..=n / 2)
        .map(|m| math::exp(params.beta * (1.0 + params.s * disorder.site(2 * m))))
        .collect()
}

/// Forward scaled convolution; returns `log Z^c(2k)` for k = 0..=half.
fn forward_log_zc(weights: &[f64], rewards: &[f64]) -> Vec<f64> {
    let half = weights.len();
    debug_assert_eq!(rewards.len(), half);
    let wrev: Vec<f64> = weights.iter().rev().copied().collect();
    let mut u = vec![0.0f64; half + 1];
    let mut logz = vec![0.0f64; half + 1];
    u[0] = 1.0;
    let mut scale = 0.0f64;
    for m in 1..=half {
        let conv = math::dot(&u[..m], &wrev[half - m..]);
        let raw = conv * rewards[m - 1];
        logz[m] = math::ln(raw) + scale;
        if !(RESCALE_LO..=RESCALE_HI).contains(&raw) {
            let inv = 1.0 / raw;
            for x in u[..m].iter_mut() {
                *x *= inv;
            }
            scale += math::ln(raw);
            u[m] = 1.0;
        } else {
            u[m] = raw;
        }
    }
    logz
}

/// Backward scaled convolution: `log G(2k)`, the partition value of the
/// pinned segment (2k, n] given a contact at 2k. `G(n) = 1`, and
/// `G(0) = Z^c(n)` up to summation order.
fn backward_log_g(weights: &[f64], rewards: &[f64]) -> Vec<f64> {
    let half = weights.len();
    let mut gr = vec![0.0f64; half + 1];
    let mut logg = vec![0.0f64; half + 1];
    let mut scale = 0.0f64;
    logg[half] = 0.0;
    gr[half] = rewards[half - 1];
    for k in (0..half).rev() {
        let conv = math::dot(&weights[..half - k], &gr[k + 1..]);
        logg[k] = math::ln(conv) + scale;
        if !(RESCALE_LO..=RESCALE_HI).contains(&conv) {
            let inv = 1.0 / conv;
            for x in gr[k + 1..].iter_mut() {
                *x *= inv;
            }
            scale += math::ln(conv);
            if k >= 1 {
                gr[k] = rewards[k - 1];
            }
        } else if k >= 1 {
            gr[k] = conv * rewards[k - 1];
        }
    }
    logg
}

/// Free-endpoint log partition from the constrained values: log-sum over the
/// last contact of `Z^c(j) · (1 + e^{−2h(n−j)})/2 · P(τ > n − j)`.
fn free_from_zc(kernel: &WalkKernel, h: f64, log_zc: &[f64], n: usize) -> f64 {
    let half = n / 2;
    let mut lse = math::StreamingLse::new();
    for (k, &lz) in log_zc.iter().enumerate().take(half + 1) {
        let m = (n - 2 * k) as f64;
        let sign_avg = math::ln_1p(math::exp(-2.0 * h * m)) - core::f64::consts::LN_2;
        let tail = kernel.tail(half - k);
        lse.add_log(lz + sign_avg + math::ln(tail));
    }
    lse.value()
}

fn contact_profile(log_zc: &[f64], log_g: &[f64]) -> Vec<f64> {
    let half = log_zc.len() - 1;
    let log_total = log_zc[half];
    (1..=half)
        .map(|k| math::exp(log_zc[k] + log_g[k] - log_total))
        .collect()
}

/// Exact constrained-chain DP: log-partition values, the free-endpoint value
/// and the expected contact count, all from one pass over the disorder.
pub fn partition_constrained(
    params: &ModelParams,
    disorder: &DisorderField,
    n: usize,
) -> Result<PartitionTrace> {
    check_even_len(n, disorder)?;
    let kernel = WalkKernel::new(n)?;
    partition_constrained_with(&kernel, params, disorder, n)
}

/// Same as [`partition_constrained`] with a caller-provided kernel
/// (`kernel.max_len() ≥ n`), for sweeps that reuse the tables.
pub fn partition_constrained_with(
    kernel: &WalkKernel,
    params: &ModelParams,
    disorder: &DisorderField,
    n: usize,
) -> Result<PartitionTrace> {
    check_even_len(n, disorder)?;
    if kernel.max_len() < n {
        return Err(Error::SizeMismatch {
            needed: n,
            got: kernel.max_len(),
        });
    }
    let weights = &kernel.weights(params.h)[..n / 2];
    let rewards = contact_rewards(params, disorder, n);
    let log_zc = forward_log_zc(weights, &rewards);
    let log_g = backward_log_g(weights, &rewards);
    let profile = contact_profile(&log_zc, &log_g);
    let mut expect = math::CompensatedSum::new();
    for p in &profile {
        expect.add(*p);
    }
    let log_zf = free_from_zc(kernel, params.h, &log_zc, n);
    Ok(PartitionTrace {
        n,
        log_zc,
        log_zf,
        contact_expectation: expect.value(),
        params: *params,
        disorder_seed: disorder.seed(),
        disorder_replica: disorder.replica(),
    })
}

/// Free-endpoint log partition value `log Z_n`.
pub fn partition_free(params: &ModelParams, disorder: &DisorderField, n: usize) -> Result<f64> {
    check_even_len(n, disorder)?;
    let kernel = WalkKernel::new(n)?;
    partition_free_with(&kernel, params, disorder, n)
}

/// [`partition_free`] with a shared kernel.
pub fn partition_free_with(
    kernel: &WalkKernel,
    params: &ModelParams,
    disorder: &DisorderField,
    n: usize,
) -> Result<f64> {
    check_even_len(n, disorder)?;
    if kernel.max_len() < n {
        return Err(Error::SizeMismatch {
            needed: n,
            got: kernel.max_len(),
        });
    }
    let weights = &kernel.weights(params.h)[..n / 2];
    let rewards = contact_rewards(params, disorder, n);
    let log_zc = forward_log_zc(weights, &rewards);
    Ok(free_from_zc(kernel, params.h, &log_zc, n))
}

/// Cost cap for the exact path enumeration.
pub const BRUTE_FORCE_CAP: usize = 20;

/// Exact `log Z_n` by enumerating all 2^n walk paths and averaging the
/// Boltzmann weight of `β Σ (1 + s ζ_i) 1{S_i = 0} − 2h Σ Δ_i`, where `Δ_i`
/// marks sites whose carried sign is negative (the sign carries through
/// contacts; before the first step it is +1, which no ±1 walk from the origin
/// ever reads back).
pub fn brute_force_partition(
    params: &ModelParams,
    disorder: &DisorderField,
    n: usize,
) -> Result<f64> {
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge {
            cap: BRUTE_FORCE_CAP,
            got: n,
        });
    }
    if n == 0 {
        return Err(Error::Domain(String::from("n must be ≥ 1")));
    }
    if disorder.len() < n {
        return Err(Error::SizeMismatch {
            needed: n,
            got: disorder.len(),
        });
    }

    struct Walker<'a> {
        beta: f64,
        s: f64,
        h: f64,
        zeta: &'a [f64],
        n: usize,
        lse: math::StreamingLse,
    }
    impl Walker<'_> {
        fn descend(&mut self, i: usize, height: i32, carried: i8, energy: f64) {
            if i == self.n {
                self.lse.add_log(energy);
                return;
            }
            for step in [1i32, -1] {
                let nh = height + step;
                let sign = if nh > 0 {
                    1
                } else if nh < 0 {
                    -1
                } else {
                    carried
                };
                let mut e = energy;
                if nh == 0 {
                    e += self.beta * (1.0 + self.s * self.zeta[i]);
                }
                if sign < 0 {
                    e -= 2.0 * self.h;
                }
                self.descend(i + 1, nh, sign, e);
            }
        }
    }

    let mut w = Walker {
        beta: params.beta,
        s: params.s,
        h: params.h,
        zeta: &disorder.values()[..n],
        n,
        lse: math::StreamingLse::new(),
    };
    w.descend(0, 0, 1, 0.0);
    Ok(w.lse.value() - n as f64 * core::f64::consts::LN_2)
}

/// Replica mean and stderr of `(1/n) log Z` over i.i.d. disorder fields.
/// Replica r draws its field from `(seed, r)`, so the sweep is reproducible
/// and order-independent.
pub fn free_energy_quenched(
    params: &ModelParams,
    spec: &DisorderSpec,
    n: usize,
    replicas: usize,
    seed: u64,
    mode: PartitionMode,
) -> Result<FreeEnergyEstimate> {
    if replicas == 0 {
        return Err(Error::Domain(String::from("replicas must be ≥ 1")));
    }
    check_even(n)?;
    let kernel = WalkKernel::new(n)?;
    let weights = &kernel.weights(params.h)[..n / 2];
    let mut samples = Vec::with_capacity(replicas);
    for r in 0..replicas {
        let field = make_disorder_replica(spec, n, seed, r as u64)?;
        let rewards = contact_rewards(params, &field, n);
        let log_zc = forward_log_zc(weights, &rewards);
        let v = match mode {
            PartitionMode::Free => free_from_zc(&kernel, params.h, &log_zc, n),
            PartitionMode::Constrained => log_zc[n / 2],
        };
        samples.push(v / n as f64);
    }
    let est = Estimate::from_samples(&samples);
    Ok(FreeEnergyEstimate {
        mean: est.mean,
        stderr: est.stderr,
        n,
        replicas,
        mode,
    })
}

/// Exact annealed finite-n free energy: the disorder average collapses into
/// the per-contact exponent `β + log E[e^{βsζ}]`, so this is the homogeneous
/// recursion at that exponent; no sampling.
pub fn free_energy_annealed(
    params: &ModelParams,
    spec: &DisorderSpec,
    n: usize,
    mode: PartitionMode,
) -> Result<f64> {
    check_even(n)?;
    let kernel = WalkKernel::new(n)?;
    let weights = &kernel.weights(params.h)[..n / 2];
    let reward = math::exp(annealed_exponent(params.beta, params.s, spec));
    let rewards = vec![reward; n / 2];
    let log_zc = forward_log_zc(weights, &rewards);
    let v = match mode {
        PartitionMode::Free => free_from_zc(&kernel, params.h, &log_zc, n),
        PartitionMode::Constrained => log_zc[n / 2],
    };
    Ok(v / n as f64)
}

/// Exact `E[l_n / n]` under the constrained polymer measure, by the
/// forward–backward renewal decomposition.
pub fn contact_fraction(params: &ModelParams, disorder: &DisorderField, n: usize) -> Result<f64> {
    check_even_len(n, disorder)?;
    let kernel = WalkKernel::new(n)?;
    contact_fraction_with(&kernel, params, disorder, n)
}

/// [`contact_fraction`] with a shared kernel.
pub fn contact_fraction_with(
    kernel: &WalkKernel,
    params: &ModelParams,
    disorder: &DisorderField,
    n: usize,
) -> Result<f64> {
    check_even_len(n, disorder)?;
    let weights = &kernel.weights(params.h)[..n / 2];
    let rewards = contact_rewards(params, disorder, n);
    let log_zc = forward_log_zc(weights, &rewards);
    let log_g = backward_log_g(weights, &rewards);
    let mut expect = math::CompensatedSum::new();
    for p in contact_profile(&log_zc, &log_g) {
        expect.add(p);
    }
    Ok(expect.value() / n as f64)
}

/// Numerical bracket of the localization transition in h at fixed (β, s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub h_lo: f64,
    pub h_hi: f64,
    /// Set when the detector was not monotone across the evaluations; the
    /// bracket is then the conservative hull.
    pub low_confidence: bool,
    /// Set when the bracket had to be pulled back into the analytic sanity
    /// window `[h_c⁰ − ε, h_ann + ε]`.
    pub clamped: bool,
    /// Every detector evaluation `(h, mean contact fraction)`, sorted by h.
    pub evaluations: Vec<(f64, f64)>,
}

/// Outcome of [`bracket_critical_h`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PhaseBracket {
    Bracketed(BracketReport),
    /// β at or beyond the annealed endpoint: the annealed curve is infinite,
    /// there is no finite search window, and for β ≥ log 2 the chain is
    /// localized at every h.
    AnnealedDivergent {
        beta_ann: f64,
    },
}

/// Bisect the indicator `detector(h) ≥ thr` at the threshold and at
/// `THRESHOLD_SPREAD × threshold`, then take the conservative hull: the last
/// h below which the detector stays in the localized band and the first h
/// beyond which it stays under the threshold. A detector that fails to be
/// monotone across the evaluations widens to the hull automatically and is
/// flagged low-confidence.
type TransitionHull = (f64, f64, bool, Vec<(f64, f64)>);

fn locate_transition<F: FnMut(f64) -> Result<f64>>(
    cap: f64,
    threshold: f64,
    mut detector: F,
) -> Result<TransitionHull> {
    let mut evals: Vec<(f64, f64)> = Vec::new();
    let mut eval = |h: f64, evals: &mut Vec<(f64, f64)>| -> Result<f64> {
        if let Some(&(_, d)) = evals.iter().find(|(hh, _)| *hh == h) {
            return Ok(d);
        }
        let d = detector(h)?;
        evals.push((h, d));
        Ok(d)
    };

    let width_tol = (cap / 512.0).max(1e-4);
    for thr in [THRESHOLD_SPREAD * threshold, threshold] {
        let d0 = eval(0.0, &mut evals)?;
        let dcap = eval(cap, &mut evals)?;
        if d0 < thr || dcap >= thr {
            continue; // flip outside [0, cap]; the hull rule handles it
        }
        let (mut lo, mut hi) = (0.0, cap);
        while hi - lo > width_tol {
            let mid = 0.5 * (lo + hi);
            if eval(mid, &mut evals)? >= thr {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }

    evals.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite h"));
    let monotone = evals.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);

    let thr_hi = THRESHOLD_SPREAD * threshold;
    let mut h_lo = 0.0;
    for &(h, d) in &evals {
        if d >= thr_hi {
            h_lo = h;
        } else {
            break;
        }
    }
    let mut h_hi = cap;
    for &(h, d) in evals.iter().rev() {
        if d < threshold {
            h_hi = h;
        } else {
            break;
        }
    }
    Ok((h_lo, h_hi, !monotone, evals))
}

/// Slack of the analytic sanity window, scaled by the curve height.
const PHASE_CLAMP_EPS: f64 = 0.05;

/// Ratio between the two detector thresholds. The lower one (`threshold`)
/// flips strictly on the delocalized side of the transition at finite n, the
/// upper one strictly on the localized side (the critical contact fraction
/// scales like n^{−1/2} and sits between them for the supported n), so the
/// reported interval brackets the finite-size transition zone.
const THRESHOLD_SPREAD: f64 = 20.0;

/// Locate the transition by bisecting the contact-fraction detector at
/// `threshold` and at `10·threshold`, averaging over `replicas` disorder
/// fields held fixed across h. Returns the outer hull of the two flips.
pub fn bracket_critical_h(
    beta: f64,
    s: f64,
    spec: &DisorderSpec,
    n: usize,
    replicas: usize,
    seed: u64,
    threshold: f64,
) -> Result<PhaseBracket> {
    if !threshold.is_finite() || threshold <= 0.0 {
        return Err(Error::Domain(String::from(
            "detector threshold must be strictly positive",
        )));
    }
    if replicas == 0 {
        return Err(Error::Domain(String::from("replicas must be ≥ 1")));
    }
    let ba = beta_ann(s, spec)?;
    if beta >= ba {
        return Ok(PhaseBracket::AnnealedDivergent { beta_ann: ba });
    }
    let hc0 = critical_h_hom(beta);
    let h_ann = annealed_critical_h(beta, s, spec);
    let cap = h_ann + 1.0;

    let kernel = WalkKernel::new(n)?;
    let fields: Vec<DisorderField> = if s == 0.0 {
        vec![DisorderField::zeros(n)]
    } else {
        (0..replicas)
            .map(|r| make_disorder_replica(spec, n, seed, r as u64))
            .collect::<Result<_>>()?
    };

    let detector = |h: f64| -> Result<f64> {
        let params = ModelParams::new(beta, h, s)?;
        let mut acc = math::CompensatedSum::new();
        for f in &fields {
            acc.add(contact_fraction_with(&kernel, &params, f, n)?);
        }
        Ok(acc.value() / fields.len() as f64)
    };
    let (h_lo, h_hi, low_confidence, evals) = locate_transition(cap, threshold, detector)?;
    let mut report = BracketReport {
        h_lo,
        h_hi,
        low_confidence,
        clamped: false,
        evaluations: evals,
    };

    let eps = PHASE_CLAMP_EPS * (1.0 + hc0.min(10.0));
    if report.h_lo < hc0 - eps {
        report.h_lo = (hc0 - eps).max(0.0);
        report.clamped = true;
    }
    if report.h_hi > h_ann + eps {
        report.h_hi = h_ann + eps;
        report.clamped = true;
    }
    Ok(PhaseBracket::Bracketed(report))
}
