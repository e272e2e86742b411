//! Numerical integration: Gauss–Hermite for Gaussian averages, adaptive
//! Simpson for the one-dimensional non-Gaussian integrals, and a seeded Monte
//! Carlo sampler that serves as an independent oracle.

mod gauss_hermite;
mod monte_carlo;
mod simpson;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gauss_hermite::{gauss_hermite_expectation, with_rule, GaussHermiteRule};
pub use monte_carlo::{derive_seed, mc_expectation, mc_sample_map, mc_summary, Marginal, McSummary, ProductDistribution, MC_CHUNK};
pub use simpson::adaptive_simpson;

pub const DEFAULT_GH_NODES: usize = 64;
pub const DEFAULT_SIMPSON_REL_TOL: f64 = 1e-9;
pub const DEFAULT_SIMPSON_MAX_DEPTH: u32 = 40;
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
}

/// Which integrator to use, with its controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuadratureSpec {
    GaussHermite { nodes: usize },
    AdaptiveSimpson { rel_tol: f64, max_depth: u32 },
    MonteCarlo { samples: u64, seed: u64 },
}

impl QuadratureSpec {
    pub fn gauss_hermite() -> Self {
        QuadratureSpec::GaussHermite { nodes: DEFAULT_GH_NODES }
    }

    pub fn adaptive_simpson() -> Self {
        QuadratureSpec::AdaptiveSimpson {
            rel_tol: DEFAULT_SIMPSON_REL_TOL,
            max_depth: DEFAULT_SIMPSON_MAX_DEPTH,
        }
    }

    pub fn monte_carlo(seed: u64) -> Self {
        QuadratureSpec::MonteCarlo {
            samples: DEFAULT_MC_SAMPLES,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            QuadratureSpec::GaussHermite { nodes } if !(2..=200).contains(&nodes) => {
                Err(Error::Usage(format!("Gauss-Hermite nodes must lie in [2, 200], got {nodes}")))
            }
            QuadratureSpec::AdaptiveSimpson { rel_tol, .. } if !(rel_tol >= 1e-13 && rel_tol.is_finite()) => {
                Err(Error::Usage(format!("adaptive Simpson rel_tol must be >= 1e-13, got {rel_tol}")))
            }
            QuadratureSpec::MonteCarlo { samples, .. } if samples < 100 => {
                Err(Error::Usage(format!("Monte Carlo needs at least 100 samples, got {samples}")))
            }
            _ => Ok(()),
        }
    }

    pub fn method_name(&self) -> &'static str {
        match self {
            QuadratureSpec::GaussHermite { .. } => "gauss_hermite",
            QuadratureSpec::AdaptiveSimpson { .. } => "adaptive_simpson",
            QuadratureSpec::MonteCarlo { .. } => "monte_carlo",
        }
    }
}
