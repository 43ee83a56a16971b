//! `pinlab dominance`: stochastic-dominance reports for the excursion-law
//! pairs used by the coupling argument.

use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use pinlab_core::math;
use pinlab_core::tilt::{
    dominance_check, dominance_check_dists, env_tilted_step, hom_tilted_law, tilt_alpha,
    tilt_constants, DominanceReport, HParam,
};

use crate::commands::shared::{grid3, Emitter};
use crate::config::{pick, ConfigMap};
use crate::CommonArgs;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub h: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Serialize)]
struct PointReport {
    beta: f64,
    s: f64,
    h: f64,
    alpha: f64,
    /// Environment-boosted law against the homogeneous tilted law.
    env_over_base: DominanceReport,
    /// Homogeneous tilted law against the h = ∞, β = 0 floor.
    base_over_floor: DominanceReport,
    /// Reflexive sanity: every law dominates itself.
    reflexive: DominanceReport,
}

#[derive(Debug, Serialize)]
struct DominanceFile {
    trunc: usize,
    points: Vec<PointReport>,
    all_dominate: bool,
}

pub fn run(args: Args) -> Result<()> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let beta = pick(args.beta, cfg.get_f64_list("beta")?, None, "beta")?;
    let s = pick(args.s, cfg.get_f64_list("s")?, None, "s")?;
    let h = pick(args.h, cfg.get_f64_list("h")?, None, "h")?;
    let trunc = pick(
        args.common.trunc,
        cfg.get_usize("trunc")?,
        Some(20_000),
        "trunc",
    )?;
    let out = pick(
        args.common.out,
        cfg.get_string("out")?.map(std::path::PathBuf::from),
        Some("dominance.json".into()),
        "out",
    )?;

    let mut emitter = Emitter::new(
        "dominance",
        json!({ "beta": beta, "s": s, "h": h, "trunc": trunc, "out": out }),
        args.common.manifest,
    );

    let points = grid3(&beta, &s, &h);
    let reports = points
        .par_iter()
        .map(|&(b, sv, hv)| {
            let (_, _, alpha_sq) = tilt_alpha(b, sv, hv)?;
            let alpha = math::sqrt(alpha_sq);
            let law = hom_tilted_law(alpha, HParam::Finite(hv), b, trunc)?;
            let k = tilt_constants(b, sv, hv, &law)?;
            let boosted = env_tilted_step(&law, &k, 1.0);
            let env_over_base = dominance_check_dists(
                &boosted.probs,
                boosted.trunc_mass,
                law.probs(),
                law.trunc_mass(),
            )?;
            let floor = hom_tilted_law(alpha, HParam::Infinite, 0.0, trunc)?;
            let base_over_floor = dominance_check(&law, &floor)?;
            let reflexive = dominance_check(&law, &law)?;
            Ok(PointReport {
                beta: b,
                s: sv,
                h: hv,
                alpha,
                env_over_base,
                base_over_floor,
                reflexive,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let all_dominate = reports
        .iter()
        .all(|r| r.env_over_base.dominates && r.base_over_floor.dominates && r.reflexive.dominates);
    let file = DominanceFile {
        trunc,
        points: reports,
        all_dominate,
    };
    let mut body = serde_json::to_string_pretty(&file)?;
    body.push('\n');
    emitter.write(&out, &body)?;
    emitter.finish()
}
