//! `pinlab tilt-audit`: the full lower-bound machinery per (β, s, h) point:
//! constants, inequality margins, paired estimator agreement, bound bracket.

use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use pinlab_core::tilt::{audit_point, TiltAudit};

use crate::commands::shared::{grid3, Emitter};
use crate::config::{parse_spec, pick, ConfigMap};
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
#[serde(tag = "status", rename_all = "snake_case")]
enum PointReport {
    Ok(Box<TiltAudit>),
    Invalid {
        beta: f64,
        s: f64,
        h: f64,
        reason: String,
    },
}

#[derive(Debug, Serialize)]
struct AuditFile {
    trunc: usize,
    n: usize,
    replicas: usize,
    seed: u64,
    points: Vec<PointReport>,
}

pub fn run(args: Args) -> Result<()> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let beta = pick(args.beta, cfg.get_f64_list("beta")?, None, "beta")?;
    let s = pick(args.s, cfg.get_f64_list("s")?, None, "s")?;
    let h = pick(args.h, cfg.get_f64_list("h")?, None, "h")?;
    let n = pick(args.common.n, cfg.get_usize("n")?, Some(100_000), "n")?;
    let replicas = pick(
        args.common.replicas,
        cfg.get_usize("replicas")?,
        Some(200),
        "replicas",
    )?;
    let trunc = pick(
        args.common.trunc,
        cfg.get_usize("trunc")?,
        Some(200_000),
        "trunc",
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
        Some("tilt_audit.json".into()),
        "out",
    )?;

    let mut emitter = Emitter::new(
        "tilt-audit",
        json!({
            "beta": beta, "s": s, "h": h, "n": n, "replicas": replicas,
            "trunc": trunc, "seed": seed, "spec": spec_text, "out": out,
        }),
        args.common.manifest,
    );

    let points = grid3(&beta, &s, &h);
    let reports: Vec<PointReport> = points
        .par_iter()
        .map(|&(b, sv, hv)| {
            match audit_point(b, sv, hv, &spec, trunc, n, replicas, seed) {
                Ok(audit) => Ok(PointReport::Ok(Box::new(audit))),
                // an insufficient horizon invalidates the whole run
                Err(e @ pinlab_core::Error::Truncation { .. }) => Err(e),
                // out-of-range points are reported, not fatal: sweeps may
                // deliberately cross the validity edge
                Err(e) => Ok(PointReport::Invalid {
                    beta: b,
                    s: sv,
                    h: hv,
                    reason: e.to_string(),
                }),
            }
        })
        .collect::<Result<Vec<_>, pinlab_core::Error>>()?;

    let file = AuditFile {
        trunc,
        n,
        replicas,
        seed,
        points: reports,
    };
    let mut body = serde_json::to_string_pretty(&file)?;
    body.push('\n');
    emitter.write(&out, &body)?;
    emitter.finish()
}
