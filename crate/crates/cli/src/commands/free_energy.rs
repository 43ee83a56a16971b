//! `pinlab free-energy`: finite-n quenched and annealed free energies with
//! contact fractions over a (beta, h, s) grid.

use anyhow::Result;
use rayon::prelude::*;
use serde_json::json;

use pinlab_core::disorder::{make_disorder_replica, DisorderField};
use pinlab_core::renewal::{
    contact_fraction_with, free_energy_annealed, free_energy_quenched, PartitionMode,
};
use pinlab_core::{ModelParams, WalkKernel};

use crate::commands::shared::{grid3, Emitter};
use crate::config::{parse_spec, pick, ConfigMap};
use crate::fmt::{g17, Csv};
use crate::CommonArgs;

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub h: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    /// Which partition function: `free` or `constrained`.
    #[arg(long)]
    pub mode: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub const HEADER: &str = "beta,h,s,n,replicas,phi_mean,phi_stderr,annealed,contact_fraction";

pub fn run(args: Args) -> Result<()> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let beta = pick(args.beta, cfg.get_f64_list("beta")?, None, "beta")?;
    let h = pick(args.h, cfg.get_f64_list("h")?, Some(vec![0.0]), "h")?;
    let s = pick(args.s, cfg.get_f64_list("s")?, Some(vec![0.0]), "s")?;
    let n = pick(args.common.n, cfg.get_usize("n")?, Some(10_000), "n")?;
    let replicas = pick(
        args.common.replicas,
        cfg.get_usize("replicas")?,
        Some(20),
        "replicas",
    )?;
    let seed = pick(args.common.seed, cfg.get_u64("seed")?, Some(1), "seed")?;
    let mode_text = pick(
        args.mode,
        cfg.get_string("mode")?,
        Some("free".to_string()),
        "mode",
    )?;
    let mode = match mode_text.as_str() {
        "free" => PartitionMode::Free,
        "constrained" => PartitionMode::Constrained,
        other => {
            return Err(crate::config::UsageError(format!(
                "mode must be `free` or `constrained`, got `{other}`"
            ))
            .into())
        }
    };
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
        Some("free_energy.csv".into()),
        "out",
    )?;

    let mut emitter = Emitter::new(
        "free-energy",
        json!({
            "beta": beta, "h": h, "s": s, "n": n, "replicas": replicas,
            "seed": seed, "mode": mode_text, "spec": spec_text, "out": out,
        }),
        args.common.manifest,
    );

    let kernel = WalkKernel::new(n)?;
    let points = grid3(&beta, &h, &s);
    let rows = points
        .par_iter()
        .map(|&(b, hv, sv)| {
            let params = ModelParams::new(b, hv, sv)?;
            let est = free_energy_quenched(&params, &spec, n, replicas, seed, mode)?;
            let annealed = free_energy_annealed(&params, &spec, n, mode)?;
            // contact fraction averaged over the same replica fields
            let mut cf_sum = 0.0;
            let fields = if sv == 0.0 { 1 } else { replicas };
            for r in 0..fields {
                let field = if sv == 0.0 {
                    DisorderField::zeros(n)
                } else {
                    make_disorder_replica(&spec, n, seed, r as u64)?
                };
                cf_sum += contact_fraction_with(&kernel, &params, &field, n)?;
            }
            let cf = cf_sum / fields as f64;
            Ok(vec![
                g17(b),
                g17(hv),
                g17(sv),
                n.to_string(),
                replicas.to_string(),
                g17(est.mean),
                g17(est.stderr),
                g17(annealed),
                g17(cf),
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
