//! Scenario runner: named presets, parameter sweeps, Monte Carlo oracle checks
//! and CSV/JSON output.

mod config;
mod oracle;
mod output;
mod presets;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{bell_value, bell_value_per_term, with_delta_t, with_delta_w, BellBreakdown, BellConfig};
use crate::coarsening::JointDensity;
use crate::decoherence::{decohered_bell, NoiseSpec};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;

pub use config::{apply_override, load_spec, parse_spec, spec_to_toml};
pub use oracle::{run_oracle_check, realized_angle_spread, OracleCheck, OraclePoint, OracleReport, DENSITY_WINDOW};
pub use output::{csv_body, sidecar_path, write_outputs};
pub use presets::{list_scenarios, preset, ScenarioInfo};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a scan evaluates at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Closed-form per-setting Bell value.
    Bell,
    /// Closed-form Bell value with eight explicit sigmas.
    PerTerm,
    /// Bell value with telegraph-noise dephasing, by quadrature.
    Decohered,
    /// Joint frequency/timing angle density.
    Density,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    DeltaW,
    DeltaT,
    Gamma,
    Theta,
    Lambda,
    Steps,
}

impl SweepVariable {
    pub fn column_name(&self) -> &'static str {
        match self {
            SweepVariable::DeltaW => "delta_w",
            SweepVariable::DeltaT => "delta_t",
            SweepVariable::Gamma => "gamma",
            SweepVariable::Theta => "theta",
            SweepVariable::Lambda => "lambda",
            SweepVariable::Steps => "steps",
        }
    }
}

/// Evenly spaced `min..=max` with `points` entries, or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Grid {
    pub fn range(min: f64, max: f64, points: usize) -> Self {
        Self {
            min: Some(min),
            max: Some(max),
            points: Some(points),
            values: None,
        }
    }

    pub fn list(values: Vec<f64>) -> Self {
        Self {
            min: None,
            max: None,
            points: None,
            values: Some(values),
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match (self.min, self.max, self.points, &self.values) {
            (Some(min), Some(max), Some(points), None) => {
                if !(min < max) || !min.is_finite() || !max.is_finite() {
                    return Err(Error::Usage(format!("grid needs finite min < max, got [{min}, {max}]")));
                }
                if points < 2 {
                    return Err(Error::Usage(format!("grid needs at least 2 points, got {points}")));
                }
                let step = (max - min) / (points - 1) as f64;
                Ok((0..points)
                    .map(|i| if i + 1 == points { max } else { min + i as f64 * step })
                    .collect())
            }
            (None, None, None, Some(values)) => {
                if values.is_empty() {
                    return Err(Error::Usage("grid value list is empty".into()));
                }
                if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|p| !(p[0] < p[1])) {
                    return Err(Error::Usage("grid values must be finite and strictly increasing".into()));
                }
                Ok(values.clone())
            }
            _ => Err(Error::Usage("grid takes either min/max/points or values".into())),
        }
    }
}

/// Parameters of the joint frequency/timing angle density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionParams {
    pub w0: f64,
    pub t0: f64,
    pub delta_w: f64,
    pub delta_t: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_epsilon() -> f64 {
    crate::coarsening::DEFAULT_POLE_EXCLUSION
}

impl DistributionParams {
    pub fn evaluator(&self) -> Result<JointDensity> {
        JointDensity::new(self.w0, self.t0, self.delta_w, self.delta_t)?.with_epsilon(self.epsilon)
    }
}

/// A complete, resolved scan description. This is also the config file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub scenario: String,
    pub kind: ScenarioKind,
    pub sweep_variable: SweepVariable,
    pub grid: Grid,
    #[serde(default)]
    pub seed: u64,
    pub quadrature: QuadratureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bell: Option<BellConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionParams>,
    /// Choices made when turning figure captions into parameters.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SweepSpec {
    pub fn bell_config(&self) -> Result<&BellConfig> {
        self.bell
            .as_ref()
            .ok_or_else(|| Error::Usage(format!("scenario kind {:?} needs a [bell] section", self.kind)))
    }

    fn distribution_params(&self) -> Result<&DistributionParams> {
        self.distribution
            .as_ref()
            .ok_or_else(|| Error::Usage("density scans need a [distribution] section".into()))
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        let xs = self.grid.values()?;
        use ScenarioKind as K;
        use SweepVariable as V;
        let meaningful = matches!(
            (self.kind, self.sweep_variable),
            (K::Bell, V::DeltaW | V::DeltaT | V::Lambda | V::Steps)
                | (K::PerTerm, V::DeltaW | V::Lambda)
                | (K::Decohered, V::DeltaW | V::DeltaT | V::Gamma | V::Lambda | V::Steps)
                | (K::Density, V::Theta)
        );
        if !meaningful {
            return Err(Error::Usage(format!(
                "sweep variable {} is not meaningful for a {:?} scenario",
                self.sweep_variable.column_name(),
                self.kind
            )));
        }
        match self.kind {
            K::Density => {
                if !matches!(self.quadrature, QuadratureSpec::AdaptiveSimpson { .. }) {
                    return Err(Error::Usage("density scans need an adaptive_simpson quadrature spec".into()));
                }
                self.distribution_params()?;
            }
            _ => {
                if !matches!(self.quadrature, QuadratureSpec::GaussHermite { .. }) {
                    return Err(Error::Usage("Bell scans need a gauss_hermite quadrature spec".into()));
                }
                self.bell_config()?.validate()?;
            }
        }
        if self.kind == K::Decohered {
            self.noise
                .as_ref()
                .ok_or_else(|| Error::Usage("decohered scans need a [noise] section".into()))?
                .validate()?;
        }
        if self.sweep_variable == V::Steps && xs.iter().any(|x| x.fract() != 0.0 || *x < 1.0) {
            return Err(Error::Usage("steps grid values must be positive integers".into()));
        }
        if self.sweep_variable == V::Gamma && xs.iter().any(|x| *x < 0.0) {
            return Err(Error::Usage("gamma grid values must be >= 0".into()));
        }
        // Catch inapplicable variables (e.g. delta_t on a frequency-only config) early.
        self.at(xs[0]).map(|_| ())
    }

    /// The spec with the sweep variable set to `x`.
    pub fn at(&self, x: f64) -> Result<SweepSpec> {
        use SweepVariable as V;
        let mut s = self.clone();
        match (self.kind, self.sweep_variable) {
            (ScenarioKind::Density, _) | (_, V::Theta) => {}
            (ScenarioKind::PerTerm, V::DeltaW) => {
                let b = s.bell.as_mut().ok_or_else(|| Error::Usage("missing [bell]".into()))?;
                let o = b
                    .per_term_overrides
                    .as_mut()
                    .ok_or_else(|| Error::Usage("per-term scans need per_term_overrides".into()))?;
                o[6] = x;
                o[7] = x;
            }
            (_, V::DeltaW) => {
                let b = self.bell_config()?;
                if b.model_a.delta_w().is_none() && b.model_b.delta_w().is_none() {
                    return Err(Error::Usage("delta_w sweep needs a frequency fuzziness model".into()));
                }
                s.bell = Some(with_delta_w(b, x));
            }
            (_, V::DeltaT) => {
                let b = self.bell_config()?;
                if b.model_a.delta_t().is_none() && b.model_b.delta_t().is_none() {
                    return Err(Error::Usage("delta_t sweep needs a timing fuzziness model".into()));
                }
                s.bell = Some(with_delta_t(b, x));
            }
            (_, V::Gamma) => {
                s.noise.as_mut().ok_or_else(|| Error::Usage("missing [noise]".into()))?.gamma = x;
            }
            (_, V::Lambda) => {
                let b = s.bell.as_mut().ok_or_else(|| Error::Usage("missing [bell]".into()))?;
                b.theta_a_prime = x;
                b.theta_b_prime = x;
            }
            (_, V::Steps) => {
                let b = s.bell.as_mut().ok_or_else(|| Error::Usage("missing [bell]".into()))?;
                b.steps_a = x as u32;
                b.steps_b = x as u32;
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellRow {
    pub x: f64,
    #[serde(flatten)]
    pub bell: BellBreakdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub theta: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rows", rename_all = "snake_case")]
pub enum ScanRows {
    Bell(Vec<BellRow>),
    Density(Vec<DensityRow>),
}

impl ScanRows {
    pub fn len(&self) -> usize {
        match self {
            ScanRows::Bell(r) => r.len(),
            ScanRows::Density(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bell(&self) -> Option<&[BellRow]> {
        match self {
            ScanRows::Bell(r) => Some(r),
            ScanRows::Density(_) => None,
        }
    }

    pub fn density(&self) -> Option<&[DensityRow]> {
        match self {
            ScanRows::Density(r) => Some(r),
            ScanRows::Bell(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub scenario: String,
    pub tool_version: String,
    pub timestamp: String,
    pub seed: u64,
    pub quadrature: QuadratureSpec,
    pub spec: SweepSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub rows: ScanRows,
    pub metadata: ScanMetadata,
}

/// Value of one grid point.
pub fn evaluate_bell_point(spec: &SweepSpec, x: f64) -> Result<BellBreakdown> {
    let s = spec.at(x)?;
    let config = s.bell_config()?;
    match s.kind {
        ScenarioKind::Bell => bell_value(config),
        ScenarioKind::PerTerm => bell_value_per_term(config),
        ScenarioKind::Decohered => {
            let noise = s.noise.as_ref().ok_or_else(|| Error::Usage("missing [noise]".into()))?;
            decohered_bell(config, noise, &s.quadrature)
        }
        ScenarioKind::Density => Err(Error::Usage("density scans have no Bell value".into())),
    }
}

fn at_point<T>(x: f64, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Numeric { message, value, error_estimate } => Error::Numeric {
            message: format!("at grid point x = {x}: {message}"),
            value,
            error_estimate,
        },
        other => other,
    })
}

/// Evaluates the scan. Grid points run on the current rayon pool and are
/// gathered by index, so the output does not depend on the pool size.
pub fn run_scenario(spec: &SweepSpec) -> Result<ScanResult> {
    spec.validate()?;
    let xs = spec.grid.values()?;
    let rows = match spec.kind {
        ScenarioKind::Density => {
            let density = spec.distribution_params()?.evaluator()?;
            let rows: Result<Vec<DensityRow>> = xs
                .par_iter()
                .map(|&x| {
                    let r = at_point(x, density.density(x, &spec.quadrature))?;
                    Ok(DensityRow { theta: x, density: r.value })
                })
                .collect();
            ScanRows::Density(rows?)
        }
        _ => {
            let rows: Result<Vec<BellRow>> = xs
                .par_iter()
                .map(|&x| Ok(BellRow { x, bell: at_point(x, evaluate_bell_point(spec, x))? }))
                .collect();
            ScanRows::Bell(rows?)
        }
    };
    Ok(ScanResult {
        rows,
        metadata: ScanMetadata {
            scenario: spec.scenario.clone(),
            tool_version: TOOL_VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            seed: spec.seed,
            quadrature: spec.quadrature,
            spec: spec.clone(),
        },
    })
}

/// Runs the scan on a dedicated pool of `threads` workers.
pub fn run_scenario_with_threads(spec: &SweepSpec, threads: usize) -> Result<ScanResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_scenario(spec))
}

/// Runs the scan and writes `<out>` (CSV) plus `<out>.json`.
pub fn run_scenario_to(spec: &SweepSpec, out: &Path) -> Result<ScanResult> {
    let result = run_scenario(spec)?;
    write_outputs(&result, out)?;
    Ok(result)
}
