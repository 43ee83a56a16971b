//! `pinlab curves`: the analytic curves over a (beta, s) grid.

use anyhow::Result;
use rayon::prelude::*;
use serde_json::json;

use pinlab_core::homogeneous::curve_point;

use crate::commands::shared::{grid2, Emitter};
use crate::config::{parse_spec, pick, ConfigMap};
use crate::fmt::{g17, g17_opt, Csv};
use crate::CommonArgs;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Pinning strengths, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    /// Disorder amplitudes, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    /// Also write a JSON mirror of the rows here.
    #[arg(long)]
    pub json_out: Option<std::path::PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub const HEADER: &str = "beta,s,hc0,h_ann,m_s,q_s,beta_ann";

pub fn run(args: Args) -> Result<()> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let beta = pick(args.beta, cfg.get_f64_list("beta")?, None, "beta")?;
    let s = pick(args.s, cfg.get_f64_list("s")?, Some(vec![0.0]), "s")?;
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
        Some("curves.csv".into()),
        "out",
    )?;

    let json_out = args.json_out.or_else(|| {
        cfg.get_string("json-out")
            .ok()
            .flatten()
            .map(std::path::PathBuf::from)
    });
    let mut emitter = Emitter::new(
        "curves",
        json!({ "beta": beta, "s": s, "spec": spec_text, "out": out, "json-out": json_out }),
        args.common.manifest,
    );

    let points = grid2(&beta, &s);
    let computed = points
        .par_iter()
        .map(|&(b, sv)| curve_point(b, sv, &spec))
        .collect::<Result<Vec<_>, _>>()?;

    let mut csv = Csv::new(HEADER);
    for cp in &computed {
        csv.row(&[
            g17(cp.beta),
            g17(cp.s),
            g17(cp.hc0),
            g17(cp.h_ann),
            g17_opt(cp.m_s),
            g17(cp.q_s),
            g17(cp.beta_ann),
        ]);
    }
    emitter.write(&out, &csv.finish())?;

    if let Some(json_path) = json_out {
        let rows: Vec<_> = computed
            .iter()
            .map(|cp| {
                json!({
                    "beta": crate::fmt::json_number(cp.beta),
                    "s": crate::fmt::json_number(cp.s),
                    "hc0": crate::fmt::json_number(cp.hc0),
                    "h_ann": crate::fmt::json_number(cp.h_ann),
                    "m_s": crate::fmt::json_number_opt(cp.m_s),
                    "q_s": crate::fmt::json_number(cp.q_s),
                    "beta_ann": crate::fmt::json_number(cp.beta_ann),
                    "h0": crate::fmt::json_number_opt(cp.h0),
                })
            })
            .collect();
        let mut body = serde_json::to_string_pretty(&rows)?;
        body.push('\n');
        emitter.write(&json_path, &body)?;
    }
    emitter.finish()
}
