//! Model parameter triples.

use alloc::format;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The interaction parameters `(β, h, s)`: pinning strength, interface
/// repulsion, disorder amplitude. All three are nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: f64,
    pub h: f64,
    pub s: f64,
}

impl ModelParams {
    pub fn new(beta: f64, h: f64, s: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("h", h), ("s", s)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "{name} must be a finite nonnegative real, got {v}"
                )));
            }
        }
        Ok(Self { beta, h, s })
    }

    /// Enforces the standing assumptions under which the disordered
    /// lower-bound constants are stated: `s ≤ 1` and `β ≤ log 2`.
    pub fn require_bound_range(&self) -> Result<()> {
        if self.s > 1.0 {
            return Err(Error::Domain(format!(
                "s = {} above 1, outside the range of the lower-bound constants",
                self.s
            )));
        }
        if self.beta > core::f64::consts::LN_2 {
            return Err(Error::Domain(format!(
                "beta = {} above log 2, outside the lower-bound range",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Pure pinning variant: rewards `−u + s ζ_i` at the interface, no `h` term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurePinningParams {
    pub u: f64,
    pub s: f64,
}
