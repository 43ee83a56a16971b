//! Closed forms and root finders for the non-disordered model: the excursion
//! generating function, the homogeneous free energy, the annealed curve, and
//! the quantitative lower bound on the disordered critical curve.
//!
//! The free energy of the homogeneous chain is `−log z*`, where `z*` is the
//! root in (0, 1] of
//!
//! ```text
//! x(z) = (e^β / 2) (2 − √(1 − z²) − √(1 − z² e^{−4h})) = 1,
//! ```
//!
//! and the critical curve solves `√(1 − e^{−4h}) = 2 (1 − e^{−β})`, i.e.
//! `h_c⁰(β) = −(1/4) log(1 − 4 (1 − e^{−β})²)` for β < log 2 and +∞ beyond.
//! Note the sign: the bracketed quantity is < 1, so the −(1/4) log form is
//! the positive branch consistent with the generating-function derivation.
//!
//! Everything here is a pure function; sweeps parallelize freely.

use alloc::format;
use alloc::string::String;
use core::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::bisect;
use crate::disorder::DisorderSpec;
use crate::math;
use crate::{Error, Result};

/// Geometric-series argument `x(z)` of the excursion generating function.
/// Strictly increasing in z on [0, 1], with x(0) = 0. `h = +∞` is admitted
/// and substitutes `e^{−4h} = 0` exactly.
pub fn theta_term(beta: f64, h: f64, z: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&z));
    let z2 = z * z;
    0.5 * math::exp(beta)
        * (2.0 - math::sqrt(1.0 - z2) - math::sqrt(1.0 - z2 * math::exp(-4.0 * h)))
}

/// Homogeneous free energy Φ⁰(β, h): zero when x(1) ≤ 1, otherwise −log z*
/// with x(z*) = 1 found by bisection to |x − 1| ≤ 1e-12.
pub fn free_energy_hom(beta: f64, h: f64) -> f64 {
    if theta_term(beta, h, 1.0) <= 1.0 {
        return 0.0;
    }
    let z_star = bisect::bisect_value(
        0.0,
        1.0,
        |z| theta_term(beta, h, z) - 1.0,
        bisect::VALUE_TOL,
    )
    .expect("sign change is guaranteed by the x(1) > 1 branch");
    -math::ln(z_star)
}

/// Critical interface repulsion of the non-disordered chain;
/// +∞ for β ≥ log 2 (the chain localizes at every h there).
pub fn critical_h_hom(beta: f64) -> f64 {
    debug_assert!(beta >= 0.0);
    if beta >= LN_2 {
        return f64::INFINITY;
    }
    let t = -math::exp_m1(-beta); // 1 − e^{−β}
    -0.25 * math::ln_1p(-4.0 * t * t)
}

/// Exponent of the annealed chain: β + log E[e^{βsζ}].
pub fn annealed_exponent(beta: f64, s: f64, spec: &DisorderSpec) -> f64 {
    beta + spec.cumulant(beta * s)
}

/// Annealed critical curve: the homogeneous curve evaluated at the annealed
/// exponent; +∞ once the exponent reaches log 2.
pub fn annealed_critical_h(beta: f64, s: f64, spec: &DisorderSpec) -> f64 {
    critical_h_hom(annealed_exponent(beta, s, spec))
}

/// The β at which the annealed exponent hits log 2: the endpoint of the
/// annealed critical curve. Equals log 2 at s = 0 and is strictly smaller
/// for s > 0.
pub fn beta_ann(s: f64, spec: &DisorderSpec) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::Domain(String::from("s must be nonnegative")));
    }
    bisect::bisect_value(
        0.0,
        LN_2,
        |b| b + spec.cumulant(b * s) - LN_2,
        bisect::VALUE_TOL,
    )
}

/// The quadratic improvement term `q = β²s² / (5·2¹⁴)` entering the
/// disordered lower bound.
pub fn q_term(beta: f64, s: f64) -> f64 {
    let bs = beta * s;
    bs * bs / (5.0 * 16384.0)
}

/// Quantitative lower bound `m^s(β) = −(1/4) log(1 − 4 (1 − e^{−β−q})²)` on
/// the disordered critical curve, valid for disorder normalized as in
/// [`DisorderSpec::satisfies_bound_normalization`] with s ≤ 1 and
/// β + q < log 2. Returns `Ok(None)` outside the validity window in β and an
/// error for s > 1.
pub fn disordered_lower_bound(beta: f64, s: f64) -> Result<Option<f64>> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!(
            "s = {s} outside [0, 1], the range of the bound's constants"
        )));
    }
    if beta < 0.0 {
        return Err(Error::Domain(String::from("beta must be nonnegative")));
    }
    let q = q_term(beta, s);
    if beta + q >= LN_2 {
        return Ok(None);
    }
    let t = -math::exp_m1(-(beta + q));
    Ok(Some(-0.25 * math::ln_1p(-4.0 * t * t)))
}

/// Solves `log(e^β (1 − √(1 − e^{−4h₀}) / 2)) = −q` for h₀ by bisection and
/// checks the result against the closed form [`disordered_lower_bound`], to
/// which it is identical by algebra. The agreement is asserted to 1e-12.
pub fn h0_of_beta(beta: f64, s: f64) -> Result<f64> {
    let q = q_term(beta, s);
    let closed = disordered_lower_bound(beta, s)?.ok_or_else(|| {
        Error::Domain(format!(
            "beta + q = {} ≥ log 2: the defining equation has no root",
            beta + q
        ))
    })?;
    let g = |h: f64| beta + math::ln(1.0 - 0.5 * math::sqrt(-math::exp_m1(-4.0 * h))) + q;
    let mut hi = 1.0;
    while g(hi) > 0.0 && hi < 1e6 {
        hi *= 2.0;
    }
    let h0 = bisect::bisect_width(0.0, hi, g, 1e-13)?;
    if math::abs(h0 - closed) > 1e-12 {
        return Err(Error::Bisection(format!(
            "h0 self-check failed: bisection {h0} vs closed form {closed}"
        )));
    }
    Ok(h0)
}

/// Lower and annealed-upper bounds for the pure pinning critical mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinningBounds {
    pub s: f64,
    /// `s² / (5·2¹⁶)`.
    pub lower: f64,
    /// Annealed critical value log E[e^{sζ}].
    pub upper_annealed: f64,
}

/// Pure-pinning bounds: `u_c(s) ≥ s²/(5·2¹⁶)` for s ≤ log 2, and
/// `u_c(s) ≤ log E[e^{sζ}]` for every s.
pub fn pinning_bounds(s: f64, spec: &DisorderSpec) -> Result<PinningBounds> {
    if !(0.0..=LN_2).contains(&s) {
        return Err(Error::Domain(format!(
            "s = {s} outside [0, log 2], the range of the pure-pinning lower bound"
        )));
    }
    Ok(PinningBounds {
        s,
        lower: s * s / (5.0 * 65536.0),
        upper_annealed: spec.cumulant(s),
    })
}

/// All analytic curves evaluated at one (β, s): the homogeneous and annealed
/// critical curves, the disordered lower bound with its q term, the annealed
/// endpoint β_ann, and the bisection solution h₀ (equal to m_s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub beta: f64,
    pub s: f64,
    /// h_c⁰(β); +∞ for β ≥ log 2.
    pub hc0: f64,
    /// Annealed curve; +∞ for β ≥ β_ann.
    pub h_ann: f64,
    /// Lower bound m^s(β); `None` outside its validity window.
    pub m_s: Option<f64>,
    pub q_s: f64,
    pub beta_ann: f64,
    /// Root of the defining equation of the bound; equals `m_s` to 1e-12.
    pub h0: Option<f64>,
}

/// Evaluate every curve at one grid point. `s > 1` leaves the bound columns
/// empty instead of erroring, so sweeps can cross the validity edge.
pub fn curve_point(beta: f64, s: f64, spec: &DisorderSpec) -> Result<CurvePoint> {
    if beta < 0.0 || s < 0.0 {
        return Err(Error::Domain(String::from(
            "beta and s must be nonnegative",
        )));
    }
    let (m_s, h0) = if s <= 1.0 {
        let m = disordered_lower_bound(beta, s)?;
        let h0 = match m {
            Some(_) => Some(h0_of_beta(beta, s)?),
            None => None,
        };
        (m, h0)
    } else {
        (None, None)
    };
    Ok(CurvePoint {
        beta,
        s,
        hc0: critical_h_hom(beta),
        h_ann: annealed_critical_h(beta, s, spec),
        m_s,
        q_s: q_term(beta, s),
        beta_ann: beta_ann(s, spec)?,
        h0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const RADEMACHER: DisorderSpec = DisorderSpec::ScaledRademacher;

    #[test]
    fn theta_term_anchors() {
        assert_eq!(theta_term(0.7, 0.3, 0.0), 0.0);
        // wetting endpoint: x(1) = e^β/2 at h = ∞ equals 1 at β = log 2
        assert!((theta_term(LN_2, f64::INFINITY, 1.0) - 1.0).abs() < 1e-15);
        assert!((theta_term(0.5, 0.0, 1.0) - 0.5f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn theta_term_increasing_in_z() {
        let mut prev = -1.0;
        for i in 0..=100 {
            let z = i as f64 / 100.0;
            let x = theta_term(0.4, 0.2, z);
            assert!(x > prev);
            prev = x;
        }
    }

    #[test]
    fn free_energy_zero_at_zero_beta() {
        for h in [0.0, 0.1, 2.0] {
            assert_eq!(free_energy_hom(0.0, h), 0.0);
        }
    }

    #[test]
    fn free_energy_h0_closed_form() {
        // at h = 0 the root solves e^β (1 − √(1 − z²)) = 1 in closed form
        for beta in [0.2f64, 0.5, 0.8, 1.5] {
            let t = 1.0 - (-beta).exp();
            let closed = -0.5 * (1.0 - t * t).ln();
            let fe = free_energy_hom(beta, 0.0);
            assert!((fe - closed).abs() < 1e-11, "beta={beta}: {fe} vs {closed}");
        }
    }

    #[test]
    fn free_energy_vanishes_past_critical_curve() {
        for beta in [0.2, 0.35, 0.5, 0.65] {
            let hc = critical_h_hom(beta);
            assert_eq!(free_energy_hom(beta, hc + 1e-4), 0.0);
            assert!(free_energy_hom(beta, (hc - 1e-4).max(0.0)) > 0.0);
        }
    }

    #[test]
    fn free_energy_monotone_on_grid() {
        // nonincreasing in h, nondecreasing in β
        let betas = [0.1, 0.3, 0.5, 0.7, 0.9];
        let hs = [0.0, 0.05, 0.15, 0.4, 1.0];
        for (bi, &b) in betas.iter().enumerate() {
            for (hi, &h) in hs.iter().enumerate() {
                let f = free_energy_hom(b, h);
                if hi > 0 {
                    assert!(f <= free_energy_hom(b, hs[hi - 1]) + 1e-12);
                }
                if bi > 0 {
                    assert!(f + 1e-12 >= free_energy_hom(betas[bi - 1], h));
                }
            }
        }
    }

    #[test]
    fn critical_h_anchors() {
        assert_eq!(critical_h_hom(0.0), 0.0);
        assert_eq!(critical_h_hom(LN_2), f64::INFINITY);
        assert_eq!(critical_h_hom(0.9), f64::INFINITY);
        // diverges as β ↑ log 2
        assert!(critical_h_hom(LN_2 - 1e-9) > 4.0);
    }

    #[test]
    fn critical_h_against_bisection_oracle() {
        // independent route: solve √(1 − e^{−4h}) = 2(1 − e^{−β}) for h
        for beta in [0.05f64, 0.3, 0.5, 0.68] {
            let rhs = 2.0 * (1.0 - (-beta).exp());
            let oracle =
                bisect::bisect_width(0.0, 60.0, |h| (1.0 - (-4.0 * h).exp()).sqrt() - rhs, 1e-13)
                    .unwrap();
            let closed = critical_h_hom(beta);
            assert!(
                (closed - oracle).abs() < 1e-12,
                "beta={beta}: {closed} vs {oracle}"
            );
        }
    }

    #[test]
    fn annealed_exponent_examples() {
        assert_eq!(annealed_exponent(0.7, 0.0, &RADEMACHER), 0.7);
        let e = annealed_exponent(0.4, 0.5, &RADEMACHER);
        assert!((e - (0.4 + 0.4f64.cosh().ln())).abs() < 1e-15);
        let g = annealed_exponent(0.4, 0.5, &DisorderSpec::GaussianUnit);
        assert!((g - 0.42).abs() < 1e-15);
    }

    #[test]
    fn annealed_curve_reduces_and_diverges() {
        for beta in [0.1, 0.4, 0.6] {
            assert_eq!(
                annealed_critical_h(beta, 0.0, &RADEMACHER),
                critical_h_hom(beta)
            );
        }
        let ba = beta_ann(0.5, &RADEMACHER).unwrap();
        assert_eq!(annealed_critical_h(ba, 0.5, &RADEMACHER), f64::INFINITY);
        let composed = annealed_critical_h(0.3, 0.5, &RADEMACHER);
        let direct = critical_h_hom(0.3 + 0.3f64.cosh().ln());
        assert!((composed - direct).abs() < 1e-14);
    }

    #[test]
    fn beta_ann_properties() {
        assert_eq!(beta_ann(0.0, &RADEMACHER).unwrap(), LN_2);
        let b1 = beta_ann(1.0, &RADEMACHER).unwrap();
        assert!(b1 < LN_2);
        // residual of the defining equation at the returned root
        let resid = b1 + RADEMACHER.cumulant(b1) - LN_2;
        assert!(resid.abs() <= 1e-12);
        // monotone in s
        assert!(beta_ann(0.5, &RADEMACHER).unwrap() > b1);
    }

    #[test]
    fn lower_bound_reduces_and_improves() {
        for beta in [0.1, 0.3, 0.6] {
            let m0 = disordered_lower_bound(beta, 0.0).unwrap().unwrap();
            assert_eq!(m0, critical_h_hom(beta));
        }
        let m = disordered_lower_bound(0.3, 1.0).unwrap().unwrap();
        let q = q_term(0.3, 1.0);
        let t = 1.0 - (-(0.3 + q)).exp();
        let plug = -0.25 * (1.0 - 4.0 * t * t).ln();
        assert!((m - plug).abs() < 1e-14);
        assert!(m > critical_h_hom(0.3), "bound must improve strictly");
    }

    #[test]
    fn lower_bound_domain_edges() {
        assert!(disordered_lower_bound(0.3, 1.2).is_err());
        // β + q ≥ log 2 → outside the validity window
        let beta = LN_2 - 1e-7;
        assert_eq!(disordered_lower_bound(beta, 1.0).unwrap(), None);
        assert!(disordered_lower_bound(beta, 0.0).unwrap().is_some());
    }

    #[test]
    fn h0_matches_bound_everywhere_defined() {
        for beta in [0.05, 0.2, 0.3, 0.5, 0.65] {
            for s in [0.0, 0.3, 1.0] {
                let m = disordered_lower_bound(beta, s).unwrap().unwrap();
                let h0 = h0_of_beta(beta, s).unwrap();
                assert!((h0 - m).abs() <= 1e-12, "({beta},{s}): {h0} vs {m}");
            }
        }
        assert!((h0_of_beta(0.1, 0.0).unwrap() - critical_h_hom(0.1)).abs() <= 1e-12);
        assert!(h0_of_beta(LN_2 - 1e-7, 1.0).is_err());
    }

    #[test]
    fn pinning_bounds_values() {
        let z = pinning_bounds(0.0, &RADEMACHER).unwrap();
        assert_eq!((z.lower, z.upper_annealed), (0.0, 0.0));
        let b = pinning_bounds(0.5, &RADEMACHER).unwrap();
        assert_eq!(b.lower, 0.25 / 327_680.0);
        let g = pinning_bounds(0.1, &DisorderSpec::GaussianUnit).unwrap();
        assert!((g.upper_annealed - 0.005).abs() < 1e-15);
        assert!(pinning_bounds(0.8, &RADEMACHER).is_err());
    }

    #[test]
    fn pinning_ordering_over_range() {
        for i in 1..=50 {
            let s = LN_2 * i as f64 / 50.0;
            for spec in [&RADEMACHER, &DisorderSpec::GaussianUnit] {
                let b = pinning_bounds(s, spec).unwrap();
                assert!(b.lower <= b.upper_annealed, "s={s}");
            }
        }
    }

    #[test]
    fn curve_ordering_strict_on_validity_domain() {
        for beta in [0.1, 0.25, 0.4, 0.55] {
            for s in [0.25, 0.5, 1.0] {
                let cp = curve_point(beta, s, &RADEMACHER).unwrap();
                let m = cp.m_s.unwrap();
                assert!(cp.hc0 < m, "hc0 < m_s at ({beta},{s})");
                assert!(m < cp.h_ann, "m_s < h_ann at ({beta},{s})");
                assert!((cp.h0.unwrap() - m).abs() <= 1e-12);
            }
            let cp0 = curve_point(beta, 0.0, &RADEMACHER).unwrap();
            assert_eq!(cp0.m_s.unwrap(), cp0.hc0);
            assert_eq!(cp0.h_ann, cp0.hc0);
        }
    }
}
