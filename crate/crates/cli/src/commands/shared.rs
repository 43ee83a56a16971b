//! Output plumbing shared by the subcommands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde_json::Value;

use crate::manifest::RunManifest;

/// Writes output files, accumulating digests into the run manifest.
pub struct Emitter {
    manifest: RunManifest,
    manifest_path: Option<PathBuf>,
    started: Instant,
}

impl Emitter {
    pub fn new(command: &str, params: Value, manifest_path: Option<PathBuf>) -> Self {
        Self {
            manifest: RunManifest::new(command, params),
            manifest_path,
            started: Instant::now(),
        }
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.record_output(path, contents.as_bytes());
        Ok(())
    }

    /// Attach derived scalars (fit slopes, fractions) to the manifest.
    pub fn set_results(&mut self, results: Value) {
        self.manifest.results = results;
    }

    pub fn finish(mut self) -> Result<()> {
        if let Some(path) = self.manifest_path.take() {
            let body = self.manifest.finalize(self.started);
            std::fs::write(&path, body)
                .with_context(|| format!("writing manifest {}", path.display()))?;
        }
        Ok(())
    }
}

/// Cartesian product in row-major order (first axis slowest).
pub fn grid2(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push((x, y));
        }
    }
    out
}

pub fn grid3(a: &[f64], b: &[f64], c: &[f64]) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::with_capacity(a.len() * b.len() * c.len());
    for &x in a {
        for &y in b {
            for &z in c {
                out.push((x, y, z));
            }
        }
    }
    out
}
