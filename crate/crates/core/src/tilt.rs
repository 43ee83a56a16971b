//! Tilted excursion measures and the constructive lower-bound machinery: the
//! homogeneous law `P_{α,h}^β`, its environment-dependent one-step-lookahead
//! modification, the tilt constants, paired Monte Carlo / closed-form
//! estimators for the energy and entropy contributions, the assembled sign
//! bracket of the bound, and the stochastic-dominance coupling that orders
//! contact counts pathwise.
//!
//! The homogeneous tilted law weights the first-return law by `α^{2n}` and
//! the sign-averaged factor `(1 + e^{−4hn})/2`, normalized by
//!
//! ```text
//! H_{α,h}^β = e^β (1 − (√(1−α²) + √(1−e^{−4h}α²)) / 2).
//! ```
//!
//! The environment-dependent step boosts the immediate return by `(1+α₁)`
//! when the reward two steps ahead is positive and rescales the longer
//! lengths by `μ₁ = 1 − α₁ P(2)/(1−P(2))`, which renormalizes exactly.
//!
//! Estimators pair every Monte Carlo sum with its conditional expectation
//! accumulated along the same renewal points, so the difference is a mean-zero
//! martingale and "within 3 standard errors" is a sharp check.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::disorder::{make_disorder_replica, DisorderField, DisorderSpec};
use crate::homogeneous::q_term;
use crate::math;
use crate::params::ModelParams;
use crate::stats::{Estimate, PairedEstimate};
use crate::walk::WalkKernel;
use crate::{Error, Result};

/// Interface repulsion parameter of a tilted law; infinity substitutes
/// `e^{−4h} = 0` analytically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HParam {
    Finite(f64),
    Infinite,
}

impl HParam {
    pub fn exp_neg4h(&self) -> f64 {
        match self {
            HParam::Finite(h) => math::exp(-4.0 * h),
            HParam::Infinite => 0.0,
        }
    }

    fn exp_neg4hn(&self, n: usize) -> f64 {
        match self {
            HParam::Finite(h) => math::exp(-4.0 * h * n as f64),
            HParam::Infinite => 0.0,
        }
    }
}

/// Truncated homogeneous tilted excursion law.
#[derive(Debug, Clone)]
pub struct TiltedLaw {
    pub alpha: f64,
    pub h: HParam,
    pub beta: f64,
    /// Closed-form normalizer H_{α,h}^β.
    pub normalizer: f64,
    /// probs[n−1] = P(τ = 2n) for n = 1..trunc/2.
    probs: Vec<f64>,
    cdf: Vec<f64>,
    trunc: usize,
    trunc_mass: f64,
}

impl TiltedLaw {
    pub fn prob(&self, len: usize) -> f64 {
        debug_assert!(len >= 2 && len.is_multiple_of(2));
        self.probs[len / 2 - 1]
    }

    /// P(τ = 2).
    pub fn p2(&self) -> f64 {
        self.probs[0]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// P(τ ≤ 2k) over the truncated support.
    pub fn cdf_at(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.cdf[k.min(self.cdf.len()) - 1]
        }
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Residual mass beyond the truncation horizon.
    pub fn trunc_mass(&self) -> f64 {
        self.trunc_mass
    }

    /// Mean excursion length of the law conditioned on τ ≤ trunc.
    pub fn mean_truncated(&self) -> f64 {
        let mut num = math::CompensatedSum::new();
        let mut den = math::CompensatedSum::new();
        for (i, p) in self.probs.iter().enumerate() {
            num.add(2.0 * (i + 1) as f64 * p);
            den.add(*p);
        }
        num.value() / den.value()
    }

    /// Inverse-CDF draw: `Some(length)` or `None` for the residual atom
    /// beyond the horizon.
    fn draw(&self, u: f64) -> Option<usize> {
        let idx = self.cdf.partition_point(|&c| c <= u);
        if idx < self.cdf.len() {
            Some(2 * (idx + 1))
        } else {
            None
        }
    }
}

/// Build the truncated law `P_{α,h}^β` with its closed-form normalizer.
pub fn hom_tilted_law(alpha: f64, h: HParam, beta: f64, trunc: usize) -> Result<TiltedLaw> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
        return Err(Error::Domain(format!("alpha = {alpha} outside (0, 1]")));
    }
    if trunc < 2 || !trunc.is_multiple_of(2) {
        return Err(Error::Domain(String::from(
            "truncation horizon must be an even integer ≥ 2",
        )));
    }
    let a2 = alpha * alpha;
    let e4 = h.exp_neg4h();
    let normalizer =
        math::exp(beta) * (1.0 - 0.5 * (math::sqrt(1.0 - a2) + math::sqrt(1.0 - e4 * a2)));
    if normalizer.is_nan() || normalizer <= 0.0 {
        return Err(Error::NonPositiveNormalizer);
    }
    let half = trunc / 2;
    let kernel = WalkKernel::new(trunc)?;
    let log_alpha2 = 2.0 * math::ln(alpha);
    let scale = math::exp(beta) / normalizer;
    let mut probs = Vec::with_capacity(half);
    for n in 1..=half {
        let geom = math::exp(log_alpha2 * n as f64);
        let sign_avg = 0.5 * (1.0 + h.exp_neg4hn(n));
        probs.push(sign_avg * geom * kernel.prob(n) * scale);
    }
    let mut cdf = Vec::with_capacity(half);
    let mut acc = 0.0f64;
    for p in &probs {
        acc += p;
        cdf.push(acc);
    }
    let mut mass = math::CompensatedSum::new();
    for p in &probs {
        mass.add(*p);
    }
    let trunc_mass = 1.0 - mass.value();
    Ok(TiltedLaw {
        alpha,
        h,
        beta,
        normalizer,
        probs,
        cdf,
        trunc,
        trunc_mass,
    })
}

/// The constants of the environment-dependent tilt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltConstants {
    /// Immediate-return boost `α₁ = βs / (5·2⁸)`.
    pub alpha1: f64,
    /// `√c = βs / (3·2⁴ (1 + 1/(2√(1−e^{−4h}))))`, squared.
    pub c: f64,
    /// `α² = 1 − c α₁²`.
    pub alpha_sq: f64,
    /// Long-length rescale `μ₁ = 1 − α₁ P(2)/(1−P(2))`.
    pub mu1: f64,
}

impl TiltConstants {
    /// The product √c·α₁, computed without the 1−α² cancellation.
    pub fn sqrt_c_alpha1(&self) -> f64 {
        math::sqrt(self.c) * self.alpha1
    }

    pub fn alpha(&self) -> f64 {
        math::sqrt(self.alpha_sq)
    }

    /// Untilted degenerate constants (s = 0): identity modification.
    pub fn untilted() -> Self {
        Self {
            alpha1: 0.0,
            c: 0.0,
            alpha_sq: 1.0,
            mu1: 1.0,
        }
    }
}

/// The `(α₁, c, α²)` triple determined by (β, s, h) alone; the law built at
/// this α is the one the bound machinery runs on.
pub fn tilt_alpha(beta: f64, s: f64, h: f64) -> Result<(f64, f64, f64)> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::Domain(String::from(
            "the tilt constants require finite h > 0",
        )));
    }
    if s == 0.0 {
        return Ok((0.0, 0.0, 1.0));
    }
    let bs = beta * s;
    let alpha1 = bs / (5.0 * 256.0);
    let root = math::sqrt(-math::exp_m1(-4.0 * h)); // √(1 − e^{−4h})
    let sqrt_c = bs / (3.0 * 16.0 * (1.0 + 1.0 / (2.0 * root)));
    let c = sqrt_c * sqrt_c;
    let alpha_sq = 1.0 - c * alpha1 * alpha1;
    Ok((alpha1, c, alpha_sq))
}

fn require(check: &'static str, ok: bool, value: f64, bound: f64) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::TiltInvariant {
            check,
            value,
            bound,
        })
    }
}

/// Compute and validate the tilt constants at (β, s, h) against the law's
/// immediate-return mass. Fails with the name of the violated inequality.
pub fn tilt_constants(beta: f64, s: f64, h: f64, law: &TiltedLaw) -> Result<TiltConstants> {
    if s > 1.0 {
        return Err(Error::Domain(format!("s = {s} above 1")));
    }
    if beta * s > core::f64::consts::LN_2 {
        return Err(Error::Domain(format!(
            "βs = {} above log 2, outside the tilt's standing range",
            beta * s
        )));
    }
    if s == 0.0 {
        return Ok(TiltConstants::untilted());
    }
    let (alpha1, c, alpha_sq) = tilt_alpha(beta, s, h)?;
    let p2 = law.p2();
    let odds = p2 / (1.0 - p2);
    let mu1 = 1.0 - alpha1 * odds;
    let k = TiltConstants {
        alpha1,
        c,
        alpha_sq,
        mu1,
    };

    require(
        "sqrt_c_alpha1",
        k.sqrt_c_alpha1() <= 0.25,
        k.sqrt_c_alpha1(),
        0.25,
    )?;
    require("alpha_sq", alpha_sq >= 0.75, alpha_sq, 0.75)?;
    require("p2_lower", p2 >= 0.125, p2, 0.125)?;
    require("p2_upper", p2 <= 0.875, p2, 0.875)?;
    require("p2_complement", 1.0 - p2 >= 0.125, 1.0 - p2, 0.125)?;
    require("odds_lower", odds >= 1.0 / 7.0, odds, 1.0 / 7.0)?;
    require("odds_upper", odds <= 7.0, odds, 7.0)?;
    require("alpha1_vs_odds", alpha1 < 1.0 / odds, alpha1, 1.0 / odds)?;
    require("mu1", mu1 > 0.0 && mu1 < 1.0, mu1, 0.0)?;
    let renorm = p2 * (1.0 + alpha1) + mu1 * (1.0 - p2);
    require(
        "renormalization",
        math::abs(renorm - 1.0) <= 1e-14,
        renorm,
        1.0,
    )?;
    Ok(k)
}

/// Slack of every inequality the constants must satisfy on the valid range;
/// all entries are nonnegative when the parameters are admissible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepFiveMargins {
    pub p2_above_eighth: f64,
    pub p2_below_seven_eighths: f64,
    pub complement_above_eighth: f64,
    pub odds_above_one_seventh: f64,
    pub odds_below_seven: f64,
    pub alpha_sq_above_three_quarters: f64,
    pub quarter_above_sqrt_c_alpha1: f64,
    pub mu1_positive: f64,
    pub mu1_below_one: f64,
    pub normalizer_below_exp_beta: f64,
    pub normalizer_above_three_eighths_exp_beta: f64,
    pub boost_cost_above_minus_five_alpha1_sq: f64,
    pub third_above_alpha1_odds: f64,
}

impl StepFiveMargins {
    pub fn all_nonnegative(&self) -> bool {
        self.as_array().iter().all(|&m| m >= 0.0)
    }

    pub fn as_array(&self) -> [f64; 13] {
        [
            self.p2_above_eighth,
            self.p2_below_seven_eighths,
            self.complement_above_eighth,
            self.odds_above_one_seventh,
            self.odds_below_seven,
            self.alpha_sq_above_three_quarters,
            self.quarter_above_sqrt_c_alpha1,
            self.mu1_positive,
            self.mu1_below_one,
            self.normalizer_below_exp_beta,
            self.normalizer_above_three_eighths_exp_beta,
            self.boost_cost_above_minus_five_alpha1_sq,
            self.third_above_alpha1_odds,
        ]
    }
}

/// Evaluate the inequality slacks at one parameter point.
pub fn step_five_margins(law: &TiltedLaw, k: &TiltConstants) -> StepFiveMargins {
    let p2 = law.p2();
    let odds = p2 / (1.0 - p2);
    let a1 = k.alpha1;
    let eb = math::exp(law.beta);
    // −(1/2) P(2)(1+α₁)α₁ + α₁P(2)/2 − 4α₁² against −5α₁²
    let boost_cost = -0.5 * p2 * (1.0 + a1) * a1 + 0.5 * a1 * p2 - 4.0 * a1 * a1;
    StepFiveMargins {
        p2_above_eighth: p2 - 0.125,
        p2_below_seven_eighths: 0.875 - p2,
        complement_above_eighth: (1.0 - p2) - 0.125,
        odds_above_one_seventh: odds - 1.0 / 7.0,
        odds_below_seven: 7.0 - odds,
        alpha_sq_above_three_quarters: k.alpha_sq - 0.75,
        quarter_above_sqrt_c_alpha1: 0.25 - k.sqrt_c_alpha1(),
        mu1_positive: k.mu1,
        mu1_below_one: 1.0 - k.mu1,
        normalizer_below_exp_beta: eb - law.normalizer,
        normalizer_above_three_eighths_exp_beta: law.normalizer - 0.375 * eb,
        boost_cost_above_minus_five_alpha1_sq: boost_cost + 5.0 * a1 * a1,
        third_above_alpha1_odds: 1.0 / 3.0 - a1 * odds,
    }
}

/// A materialized one-step excursion distribution (base or boosted).
#[derive(Debug, Clone)]
pub struct ExcursionDistribution {
    /// probs[n−1] = P(τ = 2n) over the truncated support.
    pub probs: Vec<f64>,
    pub trunc_mass: f64,
}

impl ExcursionDistribution {
    pub fn total_mass(&self) -> f64 {
        let mut s = math::CompensatedSum::new();
        for p in &self.probs {
            s.add(*p);
        }
        s.value() + self.trunc_mass
    }
}

/// The law of the next excursion given the reward two steps ahead: boost the
/// immediate return by (1+α₁) and rescale everything longer by μ₁ when
/// ζ > 0, otherwise leave the law unchanged.
pub fn env_tilted_step(
    law: &TiltedLaw,
    k: &TiltConstants,
    zeta_next: f64,
) -> ExcursionDistribution {
    let mut probs = law.probs.clone();
    let mut trunc_mass = law.trunc_mass;
    if zeta_next > 0.0 && k.alpha1 > 0.0 {
        probs[0] *= 1.0 + k.alpha1;
        for p in probs[1..].iter_mut() {
            *p *= k.mu1;
        }
        trunc_mass *= k.mu1;
    }
    ExcursionDistribution { probs, trunc_mass }
}

/// Inverse-CDF sampler over the base law and its boosted variant; the two
/// CDF tables are ordered pointwise, so coupled draws from a shared uniform
/// are ordered pathwise.
pub struct EnvSampler<'a> {
    law: &'a TiltedLaw,
    k: TiltConstants,
    boosted_cdf: Vec<f64>,
}

impl<'a> EnvSampler<'a> {
    pub fn new(law: &'a TiltedLaw, k: &TiltConstants) -> Self {
        let p2 = law.p2();
        let mut boosted_cdf = Vec::with_capacity(law.cdf.len());
        for (i, &c) in law.cdf.iter().enumerate() {
            let b = if i == 0 {
                p2 * (1.0 + k.alpha1)
            } else {
                p2 * (1.0 + k.alpha1) + k.mu1 * (c - p2)
            };
            // the boosted CDF dominates the base CDF exactly; the max guards
            // the far-tail entries where the FP gap shrinks below rounding
            boosted_cdf.push(b.max(c));
        }
        Self {
            law,
            k: *k,
            boosted_cdf,
        }
    }

    /// Draw an excursion length; `boosted` selects the ζ > 0 branch.
    pub fn draw(&self, boosted: bool, u: f64) -> Option<usize> {
        if boosted && self.k.alpha1 > 0.0 {
            let idx = self.boosted_cdf.partition_point(|&c| c <= u);
            if idx < self.boosted_cdf.len() {
                Some(2 * (idx + 1))
            } else {
                None
            }
        } else {
            self.law.draw(u)
        }
    }
}

/// Everything one simulated chain contributes to the paired estimators.
#[derive(Debug, Clone, Default)]
struct ChainStats {
    /// Σ ζ at the realized contacts.
    realized_reward: f64,
    /// Realized tilt-cost Σ log(P/P^env) over completed excursions.
    realized_entropy: f64,
    /// Conditional expectation of the reward sum along the same renewals.
    predicted_reward: f64,
    /// Conditional expectation of the tilt cost along the same renewals.
    predicted_entropy: f64,
    contacts: Vec<usize>,
}

/// Walk one environment-tilted chain to horizon n, accumulating the realized
/// sums and their per-renewal conditional expectations.
fn walk_chain(
    sampler: &EnvSampler,
    spec: &DisorderSpec,
    field: &DisorderField,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> ChainStats {
    let law = sampler.law;
    let k = &sampler.k;
    let p2 = law.p2();
    let m_plus = spec.mean_positive_part();
    let p_plus = spec.prob_positive();
    let ln_boost = math::ln_1p(k.alpha1);
    let ln_mu1 = if k.mu1 > 0.0 { math::ln(k.mu1) } else { 0.0 };
    let reward_pred_per_renewal = k.alpha1 * p2 * m_plus;

    let mut stats = ChainStats::default();
    let mut pos = 0usize;
    while pos + 2 <= n {
        let zeta_next = field.site(pos + 2);
        let boosted = k.alpha1 > 0.0 && zeta_next > 0.0;
        // conditional expectations given a renewal at `pos`
        stats.predicted_reward += reward_pred_per_renewal;
        let m = n - pos;
        let mass_long = if m >= 4 { law.cdf_at(m / 2) - p2 } else { 0.0 };
        stats.predicted_entropy -=
            p_plus * ((1.0 + k.alpha1) * p2 * ln_boost + k.mu1 * ln_mu1 * mass_long);

        let u: f64 = rng.random();
        let Some(tau) = sampler.draw(boosted, u) else {
            break; // residual atom: the excursion overshoots any horizon ≤ trunc
        };
        if pos + tau > n {
            break;
        }
        pos += tau;
        stats.contacts.push(pos);
        stats.realized_reward += field.site(pos);
        if boosted {
            stats.realized_entropy -= if tau == 2 { ln_boost } else { ln_mu1 };
        }
    }
    stats
}

/// Contact times of one environment-tilted chain, deterministic in the seed.
/// The disorder stream and the draw stream are independent ChaCha streams of
/// the same seed. Requires `law.trunc() ≥ n` so a residual-atom draw always
/// means the excursion overshoots the horizon.
pub fn sample_contacts(
    law: &TiltedLaw,
    k: &TiltConstants,
    disorder: &DisorderField,
    n: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    if law.trunc() < n {
        return Err(Error::Truncation { required: n as u64 });
    }
    if disorder.len() < n {
        return Err(Error::SizeMismatch {
            needed: n,
            got: disorder.len(),
        });
    }
    let sampler = EnvSampler::new(law, k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX); // draw stream, disjoint from replica field streams
    let stats = walk_chain(&sampler, disorder.spec(), disorder, n, &mut rng);
    Ok(stats.contacts)
}

/// One replica sweep of the environment-tilted chain: paired energy and
/// entropy estimators plus the contact density, all from the same paths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainSweep {
    /// Paired estimate of the energy term E₁(N) = (βs/N) E[Σ ζ at contacts].
    pub energy: PairedEstimate,
    /// Paired estimate of the tilt-cost part S_N/N of the entropy term.
    pub entropy: PairedEstimate,
    /// E[l_N / N] under the tilted chain.
    pub contacts_per_step: Estimate,
    pub n: usize,
    pub replicas: usize,
}

/// Run `replicas` tilted chains; replica r draws its disorder from stream 2r
/// and its excursions from stream 2r+1 of the same seed.
pub fn chain_sweep(
    params: &ModelParams,
    spec: &DisorderSpec,
    law: &TiltedLaw,
    k: &TiltConstants,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<ChainSweep> {
    if replicas == 0 {
        return Err(Error::Domain(String::from("replicas must be ≥ 1")));
    }
    if law.trunc() < n {
        return Err(Error::Truncation { required: n as u64 });
    }
    let sampler = EnvSampler::new(law, k);
    let scale = params.beta * params.s / n as f64;
    let mut e1_mc = Vec::with_capacity(replicas);
    let mut e1_pred = Vec::with_capacity(replicas);
    let mut e2_mc = Vec::with_capacity(replicas);
    let mut e2_pred = Vec::with_capacity(replicas);
    let mut density = Vec::with_capacity(replicas);
    for r in 0..replicas {
        let field = make_disorder_replica(spec, n, seed, 2 * r as u64)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(2 * r as u64 + 1);
        let stats = walk_chain(&sampler, spec, &field, n, &mut rng);
        e1_mc.push(scale * stats.realized_reward);
        e1_pred.push(scale * stats.predicted_reward);
        e2_mc.push(stats.realized_entropy / n as f64);
        e2_pred.push(stats.predicted_entropy / n as f64);
        density.push(stats.contacts.len() as f64 / n as f64);
    }
    Ok(ChainSweep {
        energy: PairedEstimate::from_pairs(&e1_mc, &e1_pred),
        entropy: PairedEstimate::from_pairs(&e2_mc, &e2_pred),
        contacts_per_step: Estimate::from_samples(&density),
        n,
        replicas,
    })
}

/// Monte Carlo estimate of the energy term E₁(N) with its paired closed-form
/// prediction `βs α₁ P(2) E[ζ 1{ζ>0}] · (renewal count)/N` from the same runs.
pub fn energy_term(
    params: &ModelParams,
    spec: &DisorderSpec,
    law: &TiltedLaw,
    k: &TiltConstants,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<PairedEstimate> {
    Ok(chain_sweep(params, spec, law, k, n, replicas, seed)?.energy)
}

/// Monte Carlo estimate of the tilt-cost part S_N/N of the entropy term,
/// with the paired closed form built from `(1+α₁)P(2)log(1+α₁)` and
/// `μ₁ log μ₁` against the same runs.
pub fn entropy_term(
    params: &ModelParams,
    spec: &DisorderSpec,
    law: &TiltedLaw,
    k: &TiltConstants,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<PairedEstimate> {
    Ok(chain_sweep(params, spec, law, k, n, replicas, seed)?.entropy)
}

/// The assembled sign bracket of the localization bound at one (β, s, h).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundLedger {
    /// `q(s) + log(e^β (1 − √(1 − e^{−4h})/2))`; positive exactly below h₀(β).
    pub bracket: f64,
    /// Bracket sign: localized verdict of the bound.
    pub localized: bool,
    /// Smallest even rank N₀ whose h-uniform dominating tail is below the
    /// target; `None` when the target is zero (untilted case).
    pub n0: Option<u64>,
    /// The dominating-tail bound achieved at N₀.
    pub tail_at_n0: f64,
    /// Boundary diagnostic (log P(τ > N₀) + log ½)/N₀, an o(1) term.
    pub r_at_n0: Option<f64>,
}

/// log P(τ > 2k) = log C(2k, k) − 2k log 2. Uses log-gamma up to 10⁶ and the
/// Stirling expansion `−½log(πk) + log(1 − 1/(8k) + 1/(128k²))` beyond it,
/// where differences of huge log-gamma values would lose the answer to
/// rounding.
fn log_tail_closed(k: u64) -> f64 {
    let kf = k as f64;
    if k <= 1_000_000 {
        math::ln_gamma(2.0 * kf + 1.0)
            - 2.0 * math::ln_gamma(kf + 1.0)
            - 2.0 * kf * core::f64::consts::LN_2
    } else {
        -0.5 * math::ln(core::f64::consts::PI * kf)
            + math::ln_1p(-1.0 / (8.0 * kf) + 1.0 / (128.0 * kf * kf))
    }
}

const N0_SEARCH_CAP: u64 = 1 << 60;

/// Assemble the bound bracket and locate the rank N₀ from which the
/// dominating tail `α^{2n} P(τ=2n) / Σ_j ½ α^{2j} P(τ=2j)` (bounded above by
/// `α^{2(k+1)} P(τ > 2k)` over the normalizer) drops below
/// `n0_target_tail`. The bound is uniform in h by construction.
pub fn assemble_min8(
    beta: f64,
    s: f64,
    h: f64,
    k: &TiltConstants,
    n0_target_tail: f64,
) -> Result<BoundLedger> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::Domain(String::from(
            "the bracket requires finite h > 0",
        )));
    }
    let q = q_term(beta, s);
    let root = math::sqrt(-math::exp_m1(-4.0 * h));
    let bracket = q + beta + math::ln(1.0 - 0.5 * root);

    if n0_target_tail <= 0.0 || k.alpha1 == 0.0 {
        return Ok(BoundLedger {
            bracket,
            localized: bracket > 0.0,
            n0: None,
            tail_at_n0: 0.0,
            r_at_n0: None,
        });
    }

    // log α = ½ log(1 − c α₁²), computed without the 1 − α² cancellation
    let sqrt_1m_a2 = k.sqrt_c_alpha1();
    let log_alpha = 0.5 * math::ln_1p(-(sqrt_1m_a2 * sqrt_1m_a2));
    let log_denom = math::ln(0.5 * (1.0 - sqrt_1m_a2));
    let log_bound =
        |kk: u64| -> f64 { 2.0 * (kk + 1) as f64 * log_alpha + log_tail_closed(kk) - log_denom };
    let log_target = math::ln(n0_target_tail);

    if log_bound(N0_SEARCH_CAP) > log_target {
        return Err(Error::Truncation {
            required: N0_SEARCH_CAP,
        });
    }
    let (mut lo, mut hi) = (0u64, N0_SEARCH_CAP); // bound(lo) > target ≥ bound(hi)
    if log_bound(1) <= log_target {
        hi = 1;
    } else {
        lo = 1;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if log_bound(mid) <= log_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let n0 = 2 * hi;
    let tail_at_n0 = math::exp(log_bound(hi));
    let r_at_n0 = (log_tail_closed(hi) - core::f64::consts::LN_2) / n0 as f64;
    Ok(BoundLedger {
        bracket,
        localized: bracket > 0.0,
        n0: Some(n0),
        tail_at_n0,
        r_at_n0: Some(r_at_n0),
    })
}

/// Result of a stochastic-dominance comparison between two excursion laws on
/// the same truncated support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    /// True when `a` has a single mass crossing over `b` and its CDF
    /// dominates pointwise (so `a` couples below `b`).
    pub dominates: bool,
    /// 1-based support index i₀ with a ≥ b on lengths 2..2i₀ and a ≤ b after.
    pub crossing_index: Option<usize>,
    /// Minimum of CDF_a − CDF_b over the support (diagnostic).
    pub cdf_min_gap: f64,
}

/// FP slack for the cumulative comparisons; the exact statement is ≥ 0 and
/// the partial sums carry O(T·ε) rounding.
const CDF_SLACK: f64 = 1e-12;

/// Check the single-crossing criterion and the pointwise CDF ordering
/// between two laws given as (probs, trunc_mass) pairs.
pub fn dominance_check_dists(
    a_probs: &[f64],
    a_trunc: f64,
    b_probs: &[f64],
    b_trunc: f64,
) -> Result<DominanceReport> {
    if a_probs.len() != b_probs.len() {
        return Err(Error::SizeMismatch {
            needed: a_probs.len(),
            got: b_probs.len(),
        });
    }
    let len = a_probs.len();
    let mut first_neg: Option<usize> = None;
    let mut single_crossing = true;
    let mut any_diff = false;
    for i in 0..len {
        let d = a_probs[i] - b_probs[i];
        if d != 0.0 {
            any_diff = true;
        }
        match first_neg {
            None => {
                if d < 0.0 {
                    first_neg = Some(i);
                }
            }
            Some(_) => {
                if d > 0.0 {
                    single_crossing = false;
                    break;
                }
            }
        }
    }
    let crossing_index = if !single_crossing {
        None
    } else {
        match first_neg {
            Some(0) => None, // mass strictly below from the start: b dominates a, if anything
            Some(i) => Some(i),
            None => {
                if any_diff {
                    Some(len)
                } else {
                    Some(1)
                }
            }
        }
    };
    if crossing_index.is_none() && first_neg == Some(0) {
        single_crossing = false;
    }

    let mut cum = math::CompensatedSum::new();
    let mut min_gap = f64::INFINITY;
    for i in 0..len {
        cum.add(a_probs[i] - b_probs[i]);
        let g = cum.value();
        if g < min_gap {
            min_gap = g;
        }
    }
    let tail_ok = a_trunc <= b_trunc + CDF_SLACK;
    let cdf_ok = min_gap >= -CDF_SLACK && tail_ok;
    Ok(DominanceReport {
        dominates: single_crossing && cdf_ok,
        crossing_index,
        cdf_min_gap: min_gap,
    })
}

/// [`dominance_check_dists`] for two tilted laws.
pub fn dominance_check(a: &TiltedLaw, b: &TiltedLaw) -> Result<DominanceReport> {
    dominance_check_dists(&a.probs, a.trunc_mass, &b.probs, b.trunc_mass)
}

/// Coupled contact-count estimates under the three measures of the bound:
/// the environment-tilted chain, the homogeneous tilted chain, and the
/// untilted wetting floor `P_{α,∞}^0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContactsOrdering {
    pub tilted: Estimate,
    pub homogeneous: Estimate,
    pub floor: Estimate,
    /// Fraction of coupled draws with l(tilted) ≥ l(hom) ≥ l(floor); the
    /// coupling realizes the ordering pathwise, so this must be 1.
    pub ordered_fraction: f64,
    pub draws: usize,
}

/// Run coupled chains from shared uniforms (inverse-CDF coupling). Each
/// replica uses one disorder field and one uniform stream; the k-th draw of
/// every chain consumes the k-th uniform, and the pointwise-ordered CDF
/// tables force the excursion lengths, and hence the contact counts, to be
/// ordered on every single draw.
pub fn expected_contacts_ordering(
    law: &TiltedLaw,
    k: &TiltConstants,
    floor: &TiltedLaw,
    spec: &DisorderSpec,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<ContactsOrdering> {
    if law.trunc() < n || floor.trunc() < n {
        return Err(Error::Truncation { required: n as u64 });
    }
    let boosted = env_tilted_step(law, k, 1.0);
    let dom_env = dominance_check_dists(
        &boosted.probs,
        boosted.trunc_mass,
        &law.probs,
        law.trunc_mass,
    )?;
    if !dom_env.dominates {
        return Err(Error::Domain(String::from(
            "environment-tilted law does not dominate the homogeneous law",
        )));
    }
    let dom_floor = dominance_check(law, floor)?;
    if !dom_floor.dominates {
        return Err(Error::Domain(String::from(
            "homogeneous law does not dominate the h = ∞, β = 0 floor law",
        )));
    }

    let sampler = EnvSampler::new(law, k);
    // base CDF dominates the floor CDF exactly; clamp the O(ε) rounding so
    // the coupled inverses can never cross
    let floor_cdf: Vec<f64> = floor
        .cdf
        .iter()
        .zip(&law.cdf)
        .map(|(&f, &b)| f.min(b))
        .collect();

    let mut l_tilted = Vec::with_capacity(replicas);
    let mut l_hom = Vec::with_capacity(replicas);
    let mut l_floor = Vec::with_capacity(replicas);
    let mut ordered = 0usize;
    for r in 0..replicas {
        let field = make_disorder_replica(spec, n, seed, 2 * r as u64)?;
        let mut draws: Vec<f64> = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(2 * r as u64 + 1);
        let uniform = |i: usize, draws: &mut Vec<f64>, rng: &mut ChaCha8Rng| -> f64 {
            while draws.len() <= i {
                draws.push(rng.random());
            }
            draws[i]
        };

        // chain A: environment-tilted
        let (mut pos, mut la, mut ka) = (0usize, 0usize, 0usize);
        while pos + 2 <= n {
            let u = uniform(ka, &mut draws, &mut rng);
            ka += 1;
            let b = k.alpha1 > 0.0 && field.site(pos + 2) > 0.0;
            let Some(tau) = sampler.draw(b, u) else { break };
            if pos + tau > n {
                break;
            }
            pos += tau;
            la += 1;
        }
        // chain B: homogeneous
        let (mut pos, mut lb, mut kb) = (0usize, 0usize, 0usize);
        while pos + 2 <= n {
            let u = uniform(kb, &mut draws, &mut rng);
            kb += 1;
            let Some(tau) = law.draw(u) else { break };
            if pos + tau > n {
                break;
            }
            pos += tau;
            lb += 1;
        }
        // chain C: floor (h = ∞, β = 0)
        let (mut pos, mut lc, mut kc) = (0usize, 0usize, 0usize);
        while pos + 2 <= n {
            let u = uniform(kc, &mut draws, &mut rng);
            kc += 1;
            let idx = floor_cdf.partition_point(|&c| c <= u);
            if idx >= floor_cdf.len() {
                break;
            }
            let tau = 2 * (idx + 1);
            if pos + tau > n {
                break;
            }
            pos += tau;
            lc += 1;
        }

        if la >= lb && lb >= lc {
            ordered += 1;
        }
        l_tilted.push(la as f64 / n as f64);
        l_hom.push(lb as f64 / n as f64);
        l_floor.push(lc as f64 / n as f64);
    }
    Ok(ContactsOrdering {
        tilted: Estimate::from_samples(&l_tilted),
        homogeneous: Estimate::from_samples(&l_hom),
        floor: Estimate::from_samples(&l_floor),
        ordered_fraction: ordered as f64 / replicas as f64,
        draws: replicas,
    })
}

/// Full audit of the bound machinery at one (β, s, h) point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TiltAudit {
    pub beta: f64,
    pub s: f64,
    pub h: f64,
    pub alpha: f64,
    pub constants: TiltConstants,
    pub margins: StepFiveMargins,
    pub sweep: ChainSweep,
    pub ledger: BoundLedger,
}

/// Build the law at the prescribed α, validate the constants, run the paired
/// estimators, and assemble the bracket; one call per grid point.
#[allow(clippy::too_many_arguments)]
pub fn audit_point(
    beta: f64,
    s: f64,
    h: f64,
    spec: &DisorderSpec,
    trunc: usize,
    n: usize,
    replicas: usize,
    seed: u64,
) -> Result<TiltAudit> {
    if trunc < n {
        return Err(Error::Truncation { required: n as u64 });
    }
    let params = ModelParams::new(beta, h, s)?;
    let (_, _, alpha_sq) = tilt_alpha(beta, s, h)?;
    let alpha = math::sqrt(alpha_sq);
    let law = hom_tilted_law(alpha, HParam::Finite(h), beta, trunc)?;
    let k = tilt_constants(beta, s, h, &law)?;
    let margins = step_five_margins(&law, &k);
    let sweep = chain_sweep(&params, spec, &law, &k, n, replicas, seed)?;
    let ledger = assemble_min8(beta, s, h, &k, q_term(beta, s))?;
    Ok(TiltAudit {
        beta,
        s,
        h,
        alpha,
        constants: k,
        margins,
        sweep,
        ledger,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homogeneous::{critical_h_hom, h0_of_beta};

    const SPEC: DisorderSpec = DisorderSpec::ScaledRademacher;

    fn bound_law(beta: f64, s: f64, h: f64, trunc: usize) -> (TiltedLaw, TiltConstants) {
        let (_, _, a2) = tilt_alpha(beta, s, h).unwrap();
        let law = hom_tilted_law(math::sqrt(a2), HParam::Finite(h), beta, trunc).unwrap();
        let k = tilt_constants(beta, s, h, &law).unwrap();
        (law, k)
    }

    #[test]
    fn normalizer_limits() {
        let law = hom_tilted_law(1.0, HParam::Infinite, 0.4, 64).unwrap();
        assert!((law.normalizer - 0.4f64.exp() / 2.0).abs() < 1e-15);
        for alpha in [0.3, 0.8, 0.99] {
            let law = hom_tilted_law(alpha, HParam::Finite(0.0), 0.7, 64).unwrap();
            let expect = 0.7f64.exp() * (1.0 - (1.0 - alpha * alpha).sqrt());
            assert!((law.normalizer - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn law_is_normalized_and_matches_series() {
        for (alpha, h, beta, trunc) in [
            (0.9, HParam::Finite(0.2), 0.5, 2000),
            (0.999, HParam::Finite(0.05), 0.3, 20_000),
            (0.5, HParam::Infinite, 0.0, 500),
            (1.0, HParam::Finite(0.4), 0.69, 20_000),
        ] {
            let law = hom_tilted_law(alpha, h, beta, trunc).unwrap();
            let mut sum = math::CompensatedSum::new();
            for p in law.probs() {
                sum.add(*p);
            }
            assert!(
                (sum.value() + law.trunc_mass() - 1.0).abs() < 1e-14,
                "α={alpha}"
            );
            // truncated series against the closed-form normalizer
            let kernel = WalkKernel::new(trunc).unwrap();
            let mut series = math::CompensatedSum::new();
            for n in 1..=trunc / 2 {
                let a2n = math::exp(2.0 * (n as f64) * math::ln(alpha));
                series.add(0.5 * (1.0 + h.exp_neg4hn(n)) * a2n * kernel.prob(n) * beta.exp());
            }
            let remainder = beta.exp()
                * math::exp(((trunc + 2) as f64) * math::ln(alpha))
                * kernel.tail(trunc / 2);
            assert!(
                (law.normalizer - series.value()).abs() <= 1e-12 + remainder,
                "α={alpha}: {} vs {}",
                law.normalizer,
                series.value()
            );
        }
    }

    #[test]
    fn p2_closed_form_case() {
        // α² = 3/4, h = 0: P(2) = (3/8) e^β / (e^β/2) = 3/4
        let law = hom_tilted_law((0.75f64).sqrt(), HParam::Finite(0.0), 0.3, 256).unwrap();
        assert!((law.p2() - 0.75).abs() < 1e-13);
        assert!(law.p2() >= 0.125 && law.p2() <= 0.875);
    }

    #[test]
    fn constants_plug_in_and_degenerate() {
        let (law, k) = bound_law(0.3, 1.0, 0.1, 4096);
        assert_eq!(k.alpha1, 0.3 / 1280.0);
        assert!(k.mu1 > 0.0 && k.mu1 < 1.0);
        let renorm = law.p2() * (1.0 + k.alpha1) + k.mu1 * (1.0 - law.p2());
        assert!((renorm - 1.0).abs() <= 1e-15);

        let k0 = tilt_constants(0.3, 0.0, 0.1, &law).unwrap();
        assert_eq!(k0, TiltConstants::untilted());
        assert!(tilt_constants(0.3, 1.2, 0.1, &law).is_err());
        assert!(tilt_alpha(0.3, 1.0, 0.0).is_err());
    }

    #[test]
    fn margins_nonnegative_on_bound_validity_grid() {
        for beta in [0.05, 0.2, 0.4, 0.6] {
            for s in [0.1, 0.5, 1.0] {
                for h in [0.01, 0.1, 1.0, 10.0] {
                    let (law, k) = bound_law(beta, s, h, 4096);
                    let m = step_five_margins(&law, &k);
                    assert!(m.all_nonnegative(), "margins at ({beta},{s},{h}): {m:?}");
                }
            }
        }
    }

    #[test]
    fn env_step_identity_and_boost() {
        let (law, k) = bound_law(0.3, 1.0, 0.1, 1024);
        let same = env_tilted_step(&law, &k, -1.5);
        assert_eq!(same.probs, law.probs());
        let boosted = env_tilted_step(&law, &k, 2.0);
        assert!(boosted.probs[0] > law.p2());
        assert!((boosted.total_mass() - 1.0).abs() < 1e-14);
        // boosted law piles mass on the immediate return: single crossing at 1
        let rep = dominance_check_dists(
            &boosted.probs,
            boosted.trunc_mass,
            law.probs(),
            law.trunc_mass(),
        )
        .unwrap();
        assert!(rep.dominates);
        assert_eq!(rep.crossing_index, Some(1));
    }

    #[test]
    fn dominance_reflexive_and_likelihood_ratio_pair() {
        let (law, _) = bound_law(0.3, 0.5, 0.2, 2048);
        let rep = dominance_check(&law, &law).unwrap();
        assert!(rep.dominates);
        assert_eq!(rep.crossing_index, Some(1));

        // the wetting floor has the decreasing likelihood ratio
        let floor = hom_tilted_law(law.alpha, HParam::Infinite, 0.0, 2048).unwrap();
        let rep = dominance_check(&law, &floor).unwrap();
        assert!(rep.dominates, "gap {}", rep.cdf_min_gap);
        let i0 = rep.crossing_index.unwrap();
        assert!(i0 >= 1);
        // likelihood ratio decreases in n
        let mut prev = f64::INFINITY;
        for n in 1..=20 {
            let ratio = law.prob(2 * n) / floor.prob(2 * n);
            assert!(ratio < prev);
            prev = ratio;
        }
    }

    #[test]
    fn sampler_matches_truncated_mean() {
        // iid draws through the sampler against the analytic truncated mean
        let law = hom_tilted_law(1.0, HParam::Infinite, 0.0, 10_000).unwrap();
        assert!(
            (law.prob(2) - 0.5).abs() < 1e-14,
            "this law is the bare first-return law"
        );
        let k = TiltConstants::untilted();
        let sampler = EnvSampler::new(&law, &k);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut kept = Vec::new();
        while kept.len() < 40_000 {
            if let Some(tau) = sampler.draw(false, rng.random()) {
                kept.push(tau as f64);
            }
        }
        let est = Estimate::from_samples(&kept);
        let mean = law.mean_truncated();
        assert!(
            (est.mean - mean).abs() <= 3.0 * est.stderr,
            "{} vs {mean} (3σ = {})",
            est.mean,
            3.0 * est.stderr
        );
    }

    #[test]
    fn sample_contacts_deterministic_and_consistent() {
        let (law, k) = bound_law(0.3, 1.0, 0.1, 4096);
        let field = make_disorder_replica(&SPEC, 4096, 9, 0).unwrap();
        let a = sample_contacts(&law, &k, &field, 4096, 77).unwrap();
        let b = sample_contacts(&law, &k, &field, 4096, 77).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
        assert!(a.windows(2).all(|w| w[1] > w[0]));
        assert!(*a.last().unwrap() <= 4096);
        // two seeds agree on the density within combined 3σ
        let s1 = chain_sweep(
            &ModelParams::new(0.3, 0.1, 1.0).unwrap(),
            &SPEC,
            &law,
            &k,
            4096,
            40,
            1,
        )
        .unwrap();
        let s2 = chain_sweep(
            &ModelParams::new(0.3, 0.1, 1.0).unwrap(),
            &SPEC,
            &law,
            &k,
            4096,
            40,
            2,
        )
        .unwrap();
        let gap = (s1.contacts_per_step.mean - s2.contacts_per_step.mean).abs();
        let sigma =
            (s1.contacts_per_step.stderr.powi(2) + s2.contacts_per_step.stderr.powi(2)).sqrt();
        assert!(gap <= 3.0 * sigma, "gap {gap}, σ {sigma}");
    }

    #[test]
    fn untilted_energy_and_entropy_vanish() {
        let (law, _) = bound_law(0.3, 1.0, 0.1, 2048);
        let k = TiltConstants::untilted();
        let p = ModelParams::new(0.3, 0.1, 1.0).unwrap();
        let sweep = chain_sweep(&p, &SPEC, &law, &k, 2048, 30, 5).unwrap();
        // α₁ = 0: the entropy cost is identically zero and the energy term
        // is centered (the long-excursion rewards have mean zero)
        assert_eq!(sweep.entropy.mc.mean, 0.0);
        assert_eq!(sweep.entropy.prediction.mean, 0.0);
        assert_eq!(sweep.energy.prediction.mean, 0.0);
        assert!(sweep.energy.mc.consistent_with_zero(3.0));
    }

    #[test]
    fn paired_estimators_agree_at_a_bound_point() {
        let (law, k) = bound_law(0.3, 1.0, 0.1, 20_000);
        let p = ModelParams::new(0.3, 0.1, 1.0).unwrap();
        let sweep = chain_sweep(&p, &SPEC, &law, &k, 20_000, 60, 11).unwrap();
        assert!(
            sweep.energy.agrees(3.0),
            "energy diff {:?} vs 3σ {:?}",
            sweep.energy.diff.mean,
            3.0 * sweep.energy.diff.stderr
        );
        assert!(
            sweep.entropy.agrees(3.0),
            "entropy diff {:?} vs 3σ {:?}",
            sweep.entropy.diff.mean,
            3.0 * sweep.entropy.diff.stderr
        );
        // the tilt cost is a relative-entropy price: nonpositive in the mean
        assert!(sweep.entropy.mc.mean <= 3.0 * sweep.entropy.mc.stderr);
        assert!(sweep.contacts_per_step.mean > 0.0);
        assert!(sweep.contacts_per_step.mean <= 0.5);
    }

    #[test]
    fn bracket_sign_flips_at_h0() {
        for (beta, s) in [(0.3, 1.0), (0.2, 0.5), (0.5, 0.25)] {
            let h0 = h0_of_beta(beta, s).unwrap();
            let (_, k) = bound_law(beta, s, h0, 256);
            let below = assemble_min8(beta, s, h0 * (1.0 - 1e-6), &k, 0.0).unwrap();
            let above = assemble_min8(beta, s, h0 * (1.0 + 1e-6), &k, 0.0).unwrap();
            assert!(below.localized && below.bracket > 0.0);
            assert!(!above.localized && above.bracket < 0.0);
        }
    }

    #[test]
    fn bracket_reduces_to_homogeneous_at_s0() {
        let k = TiltConstants::untilted();
        for beta in [0.2, 0.4, 0.6] {
            let hc = critical_h_hom(beta);
            let at = assemble_min8(beta, 0.0, hc, &k, 0.0).unwrap();
            assert!(at.bracket.abs() < 1e-12, "beta={beta}: {}", at.bracket);
            assert!(at.n0.is_none());
        }
    }

    #[test]
    fn n0_search_meets_target_uniformly_in_h() {
        let (_, k) = bound_law(0.3, 1.0, 0.1, 256);
        let q = q_term(0.3, 1.0);
        let ledger = assemble_min8(0.3, 1.0, 0.1, &k, q).unwrap();
        let n0 = ledger.n0.unwrap();
        assert!(ledger.tail_at_n0 <= q);
        assert!(n0 >= 2);
        // a tighter target forces a larger rank
        let tighter = assemble_min8(0.3, 1.0, 0.1, &k, q / 100.0).unwrap();
        assert!(tighter.n0.unwrap() > n0);
        // the dominating tail is h-free: same N₀ at a very different h
        let (_, k2) = bound_law(0.3, 1.0, 5.0, 256);
        let other_h = assemble_min8(0.3, 1.0, 5.0, &k2, q).unwrap();
        let ratio = other_h.n0.unwrap() as f64 / n0 as f64;
        assert!(
            ratio > 0.5 && ratio < 2.0,
            "ranks {} vs {n0}",
            other_h.n0.unwrap()
        );
    }

    #[test]
    fn closed_form_tail_consistent_across_stirling_crossover() {
        // against the tabulated backward-summation tails
        for k in [10u64, 500, 5000] {
            let direct = crate::walk::return_tail(k as usize);
            let closed = math::exp(log_tail_closed(k));
            assert!(
                ((closed - direct) / direct).abs() < 1e-9,
                "k={k}: {closed} vs {direct}"
            );
        }
        // the two branches agree where they hand over
        let lgamma_route = |k: u64| {
            let kf = k as f64;
            math::ln_gamma(2.0 * kf + 1.0)
                - 2.0 * math::ln_gamma(kf + 1.0)
                - 2.0 * kf * core::f64::consts::LN_2
        };
        for k in [999_999u64, 1_000_000, 1_000_001, 1_200_000] {
            let gap = math::abs(log_tail_closed(k) - lgamma_route(k));
            assert!(gap < 1e-7, "k={k}: branch gap {gap:e}");
        }
    }

    #[test]
    fn coupled_ordering_holds_on_every_draw() {
        let (law, k) = bound_law(0.3, 1.0, 0.1, 2048);
        let floor = hom_tilted_law(law.alpha, HParam::Infinite, 0.0, 2048).unwrap();
        let out = expected_contacts_ordering(&law, &k, &floor, &SPEC, 2000, 300, 3).unwrap();
        assert_eq!(out.ordered_fraction, 1.0);
        assert!(out.tilted.mean >= out.homogeneous.mean);
        assert!(out.homogeneous.mean >= out.floor.mean);
        assert!(out.floor.mean > 0.0);
    }

    #[test]
    fn coupling_collapses_without_tilt() {
        // α₁ = 0: the environment-tilted chain and the homogeneous chain
        // draw identically, so the first inequality is an equality
        let law = hom_tilted_law(0.9, HParam::Finite(0.2), 0.3, 1024).unwrap();
        let floor = hom_tilted_law(0.9, HParam::Infinite, 0.0, 1024).unwrap();
        let out = expected_contacts_ordering(
            &law,
            &TiltConstants::untilted(),
            &floor,
            &SPEC,
            1000,
            50,
            4,
        )
        .unwrap();
        assert_eq!(out.ordered_fraction, 1.0);
        assert_eq!(out.tilted.mean, out.homogeneous.mean);
        assert!(out.homogeneous.mean >= out.floor.mean);
    }

    #[test]
    fn audit_point_assembles() {
        let audit = audit_point(0.3, 1.0, 0.1, &SPEC, 4096, 4096, 20, 7).unwrap();
        assert!(audit.margins.all_nonnegative());
        assert!(audit.constants.alpha1 > 0.0);
        assert!(audit.ledger.n0.is_some());
        assert!(audit.sweep.contacts_per_step.mean > 0.0);
    }
}
