//! `pinlab phase-bracket`: numerical localization of the transition in h.

use anyhow::Result;
use rayon::prelude::*;
use serde_json::json;

use pinlab_core::homogeneous::{annealed_critical_h, critical_h_hom};
use pinlab_core::renewal::{bracket_critical_h, PhaseBracket};

use crate::commands::shared::Emitter;
use crate::config::{parse_spec, pick, ConfigMap};
use crate::fmt::{g17, Csv};
use crate::CommonArgs;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Contact-fraction detector threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub const HEADER: &str = "beta,s,n,replicas,threshold,h_lo,h_hi,hc0,h_ann,flag";

pub fn run(args: Args) -> Result<()> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let beta = pick(args.beta, cfg.get_f64_list("beta")?, None, "beta")?;
    let s = pick(args.s, cfg.get_f64("s")?, Some(0.0), "s")?;
    let threshold = pick(
        args.threshold,
        cfg.get_f64("threshold")?,
        Some(1e-3),
        "threshold",
    )?;
    let n = pick(args.common.n, cfg.get_usize("n")?, Some(100_000), "n")?;
    let replicas = pick(
        args.common.replicas,
        cfg.get_usize("replicas")?,
        Some(4),
        "replicas",
    )?;
    let seed = pick(args.common.seed, cfg.get_u64("seed")?, Some(1), "seed")?;
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
        Some("phase_bracket.csv".into()),
        "out",
    )?;

    let mut emitter = Emitter::new(
        "phase-bracket",
        json!({
            "beta": beta, "s": s, "threshold": threshold, "n": n,
            "replicas": replicas, "seed": seed, "spec": spec_text, "out": out,
        }),
        args.common.manifest,
    );

    let rows = beta
        .par_iter()
        .map(|&b| {
            let outcome = bracket_critical_h(b, s, &spec, n, replicas, seed, threshold)?;
            let hc0 = critical_h_hom(b);
            let h_ann = annealed_critical_h(b, s, &spec);
            let (h_lo, h_hi, flag) = match outcome {
                PhaseBracket::Bracketed(rep) => {
                    let flag = match (rep.low_confidence, rep.clamped) {
                        (false, false) => "ok",
                        (true, false) => "low_confidence",
                        (false, true) => "clamped",
                        (true, true) => "low_confidence+clamped",
                    };
                    (g17(rep.h_lo), g17(rep.h_hi), flag)
                }
                PhaseBracket::AnnealedDivergent { .. } => {
                    ("nan".to_string(), "nan".to_string(), "annealed_divergent")
                }
            };
            Ok(vec![
                g17(b),
                g17(s),
                n.to_string(),
                replicas.to_string(),
                g17(threshold),
                h_lo,
                h_hi,
                g17(hc0),
                g17(h_ann),
                flag.to_string(),
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut csv = Csv::new(HEADER);
    for row in rows {
        csv.row(&row);
    }
    emitter.write(&out, &csv.finish())?;
    emitter.finish()
}
