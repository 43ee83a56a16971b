//! Run manifests: the full parameter set, seeds, horizons and tolerances of
//! a run plus digests of what it wrote. Re-running a manifest (by passing it
//! back as `--config`) reproduces the output files byte for byte.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    /// Flag-name → value map; feeding the manifest to `--config` replays it.
    pub params: Value,
    pub tolerances: Value,
    /// Derived scalars a command wants on record (fit slopes, fractions).
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub results: Value,
    pub wall_clock_ms: u128,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, params: Value) -> Self {
        Self {
            command: command.to_string(),
            tool_version: format!("pinlab {}", env!("CARGO_PKG_VERSION")),
            params,
            tolerances: json!({
                "bisection_value_tol": pinlab_core::bisect::VALUE_TOL,
                "bisection_max_iter": pinlab_core::bisect::MAX_ITER,
            }),
            results: Value::Null,
            wall_clock_ms: 0,
            outputs: Vec::new(),
        }
    }

    pub fn record_output(&mut self, path: &Path, contents: &[u8]) {
        let mut hasher = Sha256::new();
        hasher.update(contents);
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for b in digest {
            hex.push_str(&format!("{b:02x}"));
        }
        self.outputs.push(OutputDigest {
            path: path.display().to_string(),
            sha256: hex,
            bytes: contents.len(),
        });
    }

    pub fn finalize(&mut self, started: Instant) -> String {
        self.wall_clock_ms = started.elapsed().as_millis();
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}
