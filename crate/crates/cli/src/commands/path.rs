//! `pinlab path`: exact path observables from the height-resolved transfer
//! recursion: endpoint law, tail profile, time above a level.

use std::path::PathBuf;

use anyhow::Result;
use serde_json::json;

use pinlab_core::disorder::{make_disorder, DisorderField};
use pinlab_core::path_dp::{above_level_fraction, endpoint_distribution, tail_decay_profile};
use pinlab_core::ModelParams;

use crate::commands::shared::Emitter;
use crate::config::{parse_spec, pick, ConfigMap};
use crate::fmt::{g17, Csv};
use crate::CommonArgs;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Levels L for the tail profile P(|S_n| > L), comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<i64>>,
    /// Also compute the expected fraction of time above this level.
    #[arg(long)]
    pub above_level: Option<i64>,
    /// Output file for the tail profile (level,tail,log_tail).
    #[arg(long)]
    pub tails_out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub const ENDPOINT_HEADER: &str = "height,prob";
pub const TAILS_HEADER: &str = "level,tail,log_tail";

pub fn run(args: Args) -> Result<()> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let beta = pick(args.beta, cfg.get_f64("beta")?, None, "beta")?;
    let h = pick(args.h, cfg.get_f64("h")?, Some(0.0), "h")?;
    let s = pick(args.s, cfg.get_f64("s")?, Some(0.0), "s")?;
    let n = pick(args.common.n, cfg.get_usize("n")?, Some(2000), "n")?;
    let seed = pick(args.common.seed, cfg.get_u64("seed")?, Some(1), "seed")?;
    let levels = args.levels.or(cfg.get_i64_list("levels")?);
    let above_level = args.above_level.or(cfg.get_i64("above-level")?);
    let spec_text = pick(
        args.common.spec,
        cfg.get_string("spec")?,
        Some("scaled_rademacher".to_string()),
        "spec",
    )?;
    let spec = parse_spec(&spec_text)?;
    let out = pick(
        args.common.out,
        cfg.get_string("out")?.map(std::path::PathBuf::from),
        Some("endpoint.csv".into()),
        "out",
    )?;
    let tails_out = args
        .tails_out
        .or(cfg.get_string("tails-out")?.map(PathBuf::from))
        .or_else(|| levels.is_some().then(|| PathBuf::from("tails.csv")));

    let mut emitter = Emitter::new(
        "path",
        json!({
            "beta": beta, "h": h, "s": s, "n": n, "seed": seed,
            "levels": levels, "above-level": above_level,
            "spec": spec_text, "out": out, "tails-out": tails_out,
        }),
        args.common.manifest,
    );

    let params = ModelParams::new(beta, h, s)?;
    let field = if s == 0.0 {
        DisorderField::zeros(n)
    } else {
        make_disorder(&spec, n, seed)?
    };

    let endpoint = endpoint_distribution(&params, &field, n)?;
    let mut csv = Csv::new(ENDPOINT_HEADER);
    for (height, prob) in &endpoint {
        csv.row(&[height.to_string(), g17(*prob)]);
    }
    emitter.write(&out, &csv.finish())?;

    let mut results = serde_json::Map::new();
    if let (Some(levels), Some(tails_path)) = (&levels, &tails_out) {
        let (tails, slope) = tail_decay_profile(&params, &field, n, levels)?;
        let mut csv = Csv::new(TAILS_HEADER);
        for (level, tail) in &tails {
            let log_tail = if *tail > 0.0 {
                g17(tail.ln())
            } else {
                "-inf".to_string()
            };
            csv.row(&[level.to_string(), g17(*tail), log_tail]);
        }
        emitter.write(tails_path, &csv.finish())?;
        results.insert("tail_fit_slope_qualitative".into(), json!(slope));
    }
    if let Some(k) = above_level {
        let frac = above_level_fraction(&params, &field, n, k)?;
        results.insert("above_level_fraction".into(), json!(frac));
        println!("above_level_fraction(K={k}) = {}", g17(frac));
    }
    if !results.is_empty() {
        emitter.set_results(serde_json::Value::Object(results));
    }
    emitter.finish()
}
