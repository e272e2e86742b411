//! Monte Carlo cross-checks of scan results.
//!
//! Every check samples the underlying physical process directly (per-step
//! frequencies or durations, telegraph signs, `(w, t)` pairs) instead of the
//! closed forms, so it exercises an independent code path.

use serde::Serialize;

use super::{evaluate_bell_point, ScenarioKind, SweepSpec, SweepVariable};
use crate::bell::BellConfig;
use crate::coarsening::{effective_sigma, FuzzinessModel, MeasurementSetting};
use crate::decoherence::Side;
use crate::error::{Error, Result};
use crate::quadrature::{
    adaptive_simpson, derive_seed, mc_sample_map, mc_summary, Marginal, McSummary, ProductDistribution,
};

/// Half-width of the `θ` window used to turn density samples into a density.
pub const DENSITY_WINDOW: f64 = 0.01;

const MIN_SAMPLES: u64 = 10_000;
const SIGNS: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OraclePoint {
    pub x: f64,
    pub reference: f64,
    pub mc: f64,
    pub se: f64,
    pub z: f64,
}

/// A named scalar comparison outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub name: String,
    pub reference: f64,
    pub mc: f64,
    pub se: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub scenario: String,
    pub samples: u64,
    pub seed: u64,
    pub points: Vec<OraclePoint>,
    pub checks: Vec<OracleCheck>,
    pub max_z: f64,
    pub frac_within_3: f64,
    pub pass: bool,
}

fn z_score(reference: f64, mc: f64, se: f64) -> f64 {
    let d = (mc - reference).abs();
    if se > 0.0 {
        d / se
    } else if d <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn point(x: f64, reference: f64, mc: f64, se: f64) -> OraclePoint {
    OraclePoint {
        x,
        reference,
        mc,
        se,
        z: z_score(reference, mc, se),
    }
}

/// Rotation angle actually realized by one `N`-step run, from `N` standard
/// normal draws.
fn realized_angle(setting: &MeasurementSetting, z: &[f64]) -> Result<f64> {
    let n = f64::from(setting.steps());
    let (w0, dt) = (setting.w0(), setting.duration() / n);
    match setting.model() {
        FuzzinessModel::FrequencyOnly { delta_w } => Ok(z.iter().map(|zj| (w0 + delta_w * zj) * dt).sum()),
        FuzzinessModel::TimingOnly { delta_t } => Ok(z.iter().map(|zj| w0 * (dt + delta_t * zj)).sum()),
        FuzzinessModel::Joint { .. } => Err(Error::UnsupportedModel(
            "oracle checks of Bell values need a frequency-only or timing-only model".into(),
        )),
    }
}

/// Sample mean and spread of the realized angle of `setting`.
pub fn realized_angle_spread(setting: &MeasurementSetting, samples: u64, seed: u64) -> Result<McSummary> {
    realized_angle(setting, &vec![0.0; setting.steps() as usize])?;
    let dist = ProductDistribution::standard_normals(setting.steps() as usize);
    mc_summary(|z| realized_angle(setting, z).unwrap_or(f64::NAN), &dist, samples, seed)
}

/// The 8 settings in term order `[a1, b1, a2', b2, a3, b3', a4', b4']`.
fn term_settings(config: &BellConfig) -> Result<Vec<MeasurementSetting>> {
    let mut out = Vec::with_capacity(8);
    for (ta, tb) in config.term_angles() {
        out.push(config.setting_a(ta)?);
        out.push(config.setting_b(tb)?);
    }
    Ok(out)
}

fn bell_sample(e: impl Iterator<Item = f64>) -> f64 {
    e.zip(SIGNS).map(|(e, s)| s * e).sum()
}

fn mc_bell_per_setting(config: &BellConfig, samples: u64, seed: u64) -> Result<McSummary> {
    let settings = term_settings(config)?;
    let mut offsets = Vec::with_capacity(9);
    offsets.push(0usize);
    for s in &settings {
        realized_angle(s, &[])?;
        offsets.push(offsets.last().unwrap() + s.steps() as usize);
    }
    let dist = ProductDistribution::standard_normals(offsets[8]);
    let f = |z: &[f64]| {
        let phi: Vec<f64> = (0..8)
            .map(|k| realized_angle(&settings[k], &z[offsets[k]..offsets[k + 1]]).unwrap_or(f64::NAN))
            .collect();
        bell_sample((0..4).map(|k| -(2.0 * (phi[2 * k] + phi[2 * k + 1])).cos()))
    };
    mc_summary(f, &dist, samples, seed)
}

fn mc_bell_per_term(config: &BellConfig, samples: u64, seed: u64) -> Result<McSummary> {
    let sigmas = config
        .per_term_overrides
        .ok_or_else(|| Error::Usage("per-term scans need per_term_overrides".into()))?;
    let angles = config.term_angles();
    let dist = ProductDistribution::standard_normals(8);
    let f = |z: &[f64]| {
        bell_sample((0..4).map(|k| {
            let (ta, tb) = angles[k];
            let pa = ta + sigmas[2 * k] * z[2 * k];
            let pb = tb + sigmas[2 * k + 1] * z[2 * k + 1];
            -(2.0 * (pa + pb)).cos()
        }))
    };
    mc_summary(f, &dist, samples, seed)
}

/// Bloch vector of `U† σz U` with `U = exp(-i(w σx + β σz) t)`.
fn evolved_bloch(w: f64, beta: f64, t: f64) -> [f64; 3] {
    let omega = w.hypot(beta);
    if omega == 0.0 {
        return [0.0, 0.0, 1.0];
    }
    let (nx, nz) = (w / omega, beta / omega);
    // Rodrigues rotation of ẑ about n = (nx, 0, nz) by -2Ωt.
    let (s, c) = (-2.0 * omega * t).sin_cos();
    [nx * nz * (1.0 - c), -nx * s, c + nz * nz * (1.0 - c)]
}

fn mc_bell_decohered(spec: &SweepSpec, config: &BellConfig, samples: u64, seed: u64) -> Result<McSummary> {
    let noise = spec
        .noise
        .as_ref()
        .ok_or_else(|| Error::Usage("decohered scans need a [noise] section".into()))?;
    let settings = term_settings(config)?;
    let gammas = [noise.gamma_for(Side::A), noise.gamma_for(Side::B)];
    let mut dist = ProductDistribution::default();
    for _ in 0..8 {
        dist.push(Marginal::standard_normal());
        dist.push(Marginal::Sign);
    }
    for s in &settings {
        realized_angle(s, &[])?;
    }
    let f = |d: &[f64]| {
        let v: Vec<[f64; 3]> = (0..8)
            .map(|k| {
                let s = &settings[k];
                let n = f64::from(s.steps());
                let (mut w, mut t) = (s.w0(), s.duration());
                match s.model() {
                    FuzzinessModel::FrequencyOnly { delta_w } => w += delta_w / n.sqrt() * d[2 * k],
                    FuzzinessModel::TimingOnly { delta_t } => t += delta_t * n.sqrt() * d[2 * k],
                    FuzzinessModel::Joint { .. } => {}
                }
                evolved_bloch(w, d[2 * k + 1] * gammas[k % 2], t)
            })
            .collect();
        bell_sample((0..4).map(|k| {
            let (a, b) = (v[2 * k], v[2 * k + 1]);
            a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
        }))
    };
    mc_summary(f, &dist, samples, seed)
}

fn bell_points(spec: &SweepSpec, samples: u64, seed: u64) -> Result<Vec<OraclePoint>> {
    let xs = spec.grid.values()?;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let reference = evaluate_bell_point(spec, x)?.b;
            let s = spec.at(x)?;
            let config = s.bell_config()?;
            let pseed = derive_seed(seed, i as u64);
            let m = match s.kind {
                ScenarioKind::Bell => mc_bell_per_setting(config, samples, pseed)?,
                ScenarioKind::PerTerm => mc_bell_per_term(config, samples, pseed)?,
                ScenarioKind::Decohered => mc_bell_decohered(&s, config, samples, pseed)?,
                ScenarioKind::Density => unreachable!(),
            };
            Ok(point(x, reference, m.mean, m.standard_error()))
        })
        .collect()
}

fn density_points(spec: &SweepSpec, samples: u64, seed: u64) -> Result<Vec<OraclePoint>> {
    let p = spec
        .distribution
        .ok_or_else(|| Error::Usage("density scans need a [distribution] section".into()))?;
    let eval = p.evaluator()?;
    let crate::quadrature::QuadratureSpec::AdaptiveSimpson { rel_tol, max_depth } = spec.quadrature else {
        return Err(Error::Usage("density scans need an adaptive_simpson quadrature spec".into()));
    };
    let dist = ProductDistribution::new(vec![
        Marginal::Normal {
            mean: p.w0,
            sigma: p.delta_w,
        },
        Marginal::Normal {
            mean: p.t0,
            sigma: p.delta_t,
        },
    ]);
    let mut draws: Vec<(f64, f64)> = mc_sample_map(|d| (d[0] * d[1], d[0].signum()), &dist, samples, seed);
    draws.sort_by(|a, b| a.0.total_cmp(&b.0));
    let thetas: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let mut prefix = Vec::with_capacity(draws.len() + 1);
    prefix.push(0.0);
    for d in &draws {
        prefix.push(prefix.last().unwrap() + d.1);
    }
    let n = samples as f64;
    let h = DENSITY_WINDOW;
    let signed = |theta: f64| eval.signed(theta, rel_tol, max_depth).map(|r| r.value);

    spec.grid
        .values()?
        .into_iter()
        .map(|x| {
            let (lo, hi) = (x - h, x + h);
            let i = thetas.partition_point(|t| *t < lo);
            let j = thetas.partition_point(|t| *t <= hi);
            let hits = (j - i) as f64;
            let mass = prefix[j] - prefix[i];
            let mc = mass / (n * 2.0 * h);
            // Y = sign(w)·1{window}/(2h); at least one pseudo-hit keeps the
            // error finite where the window caught nothing.
            let second = hits.max(1.0) / (n * 4.0 * h * h);
            let se = ((second - mc * mc).max(0.0) / n).sqrt();

            let mut pieces = vec![(lo, hi)];
            if lo < 0.0 && hi > 0.0 {
                pieces = vec![(lo, 0.0), (0.0, hi)];
            }
            let mut total = 0.0;
            for (a, b) in pieces {
                let inner = |t: f64| signed(t).unwrap_or(f64::NAN);
                total += adaptive_simpson(inner, a, b, 1e-7, 30)?.value;
            }
            Ok(point(x, total / (2.0 * h), mc, se))
        })
        .collect()
}

fn step_scaling_checks(spec: &SweepSpec, samples: u64, seed: u64) -> Result<Vec<OracleCheck>> {
    let config = spec.bell_config()?;
    let theta = config.theta_a_prime;
    let w0 = config.w0_a;
    let delta = config
        .model_a
        .delta_w()
        .or(config.model_a.delta_t())
        .unwrap_or(0.0)
        .max(0.1);
    let mut checks = Vec::new();
    let mut k = 0u64;
    for model in [FuzzinessModel::frequency(delta), FuzzinessModel::timing(delta)] {
        for steps in [1u32, 2, 5, 10] {
            let setting = MeasurementSetting::forward(theta, w0, steps, model)?;
            let expected = effective_sigma(&setting)?;
            let m = realized_angle_spread(&setting, samples, derive_seed(seed ^ 0x5EED, k))?;
            k += 1;
            let se = m.std_dev_standard_error();
            let z = z_score(expected, m.std_dev, se);
            checks.push(OracleCheck {
                name: format!("{} spread, N = {steps}", model.name()),
                reference: expected,
                mc: m.std_dev,
                se,
                z,
                pass: z <= 3.0,
            });
        }
    }
    Ok(checks)
}

/// Compares every grid point of `spec` with a Monte Carlo estimate.
///
/// Passes when at least 99% of points are within 3 standard errors, none is
/// beyond 5, and every extra check is within 3.
pub fn run_oracle_check(spec: &SweepSpec, samples: u64, seed: u64) -> Result<OracleReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::Usage(format!("oracle checks need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    spec.validate()?;
    let points = match spec.kind {
        ScenarioKind::Density => density_points(spec, samples, seed)?,
        _ => bell_points(spec, samples, seed)?,
    };
    let checks = if spec.kind == ScenarioKind::Bell && spec.sweep_variable == SweepVariable::Steps {
        step_scaling_checks(spec, samples, seed)?
    } else {
        Vec::new()
    };
    let max_z = points.iter().map(|p| p.z).fold(0.0, f64::max);
    let within = points.iter().filter(|p| p.z <= 3.0).count();
    let frac_within_3 = within as f64 / points.len() as f64;
    let pass = frac_within_3 >= 0.99 && max_z <= 5.0 && checks.iter().all(|c| c.pass);
    Ok(OracleReport {
        scenario: spec.scenario.clone(),
        samples,
        seed,
        points,
        checks,
        max_z,
        frac_within_3,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{preset, Grid};
    use crate::spin::evolve_observable;

    #[test]
    fn bloch_vector_matches_matrix_evolution() {
        for &(w, b, t) in &[(1.0, 0.0, 0.3), (0.7, 0.4, 1.1), (-1.3, -2.0, 0.8), (0.0, 1.0, 2.0)] {
            let c = evolve_observable(w, b, t).pauli_components().unwrap().map(|z| z.re);
            let v = evolved_bloch(w, b, t);
            for k in 0..3 {
                assert!((c[k + 1] - v[k]).abs() < 1e-12, "{w} {b} {t}: {c:?} vs {v:?}");
            }
        }
    }

    #[test]
    fn too_few_samples_rejected() {
        let spec = preset("fig1").unwrap();
        assert!(matches!(run_oracle_check(&spec, 500, 1), Err(Error::Usage(_))));
    }

    #[test]
    fn fig1_subgrid_passes() {
        let mut spec = preset("fig1").unwrap();
        spec.grid = Grid::list(vec![0.0, 0.3, 0.6, 1.2]);
        let r = run_oracle_check(&spec, 20_000, 4).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn sharp_point_has_zero_error() {
        let mut spec = preset("fig1").unwrap();
        spec.grid = Grid::list(vec![0.0]);
        let r = run_oracle_check(&spec, 10_000, 4).unwrap();
        assert_eq!(r.points[0].se, 0.0);
        assert_eq!(r.points[0].z, 0.0);
    }
}
