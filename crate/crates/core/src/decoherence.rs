//! Random-telegraph-noise dephasing during the rotation.
//!
//! The coupling `β σz` takes the value `+γ` or `-γ` with equal probability and
//! stays fixed for a whole run, so the noisy observable is the equal mixture
//! of the two conjugations by `exp(-i(w σx ± γ σz) t)`.

use serde::{Deserialize, Serialize};

use crate::bell::{BellBreakdown, BellConfig};
use crate::coarsening::{FuzzinessModel, MeasurementSetting};
use crate::error::{Error, Result};
use crate::quadrature::{with_rule, QuadratureSpec};
use crate::spin::{evolve_observable, pair_expectation, SquareComplexMatrix, TwoQubitState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub gamma: f64,
    pub noisy_sides: Vec<Side>,
}

impl NoiseSpec {
    pub fn new(gamma: f64, noisy_sides: Vec<Side>) -> Result<Self> {
        let spec = Self { gamma, noisy_sides };
        spec.validate()?;
        Ok(spec)
    }

    pub fn none() -> Self {
        Self {
            gamma: 0.0,
            noisy_sides: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::Usage(format!("gamma must be finite and >= 0, got {}", self.gamma)));
        }
        if self.gamma > 0.0 && self.noisy_sides.is_empty() {
            return Err(Error::Usage("gamma > 0 needs at least one noisy side".into()));
        }
        Ok(())
    }

    pub fn affects(&self, side: Side) -> bool {
        self.noisy_sides.contains(&side)
    }

    /// Coupling seen by `side`, zero if that side is quiet.
    pub fn gamma_for(&self, side: Side) -> f64 {
        if self.affects(side) {
            self.gamma
        } else {
            0.0
        }
    }
}

/// `½[U₊† σz U₊ + U₋† σz U₋]` with `U± = exp(-i(w σx ± γ σz) t)`.
pub fn rtn_averaged_observable(w: f64, t: f64, gamma: f64) -> SquareComplexMatrix {
    if gamma == 0.0 {
        return evolve_observable(w, 0.0, t);
    }
    (&evolve_observable(w, gamma, t) + &evolve_observable(w, -gamma, t)).scale_real(0.5)
}

/// Coarsened, noise-averaged observable of one measurement setting.
///
/// Frequency fuzziness averages over `w ~ Normal(w0, Δw/√N)` at the nominal
/// duration; timing fuzziness averages over `t ~ Normal(θ/w0, √N·Δt)` at `w0`.
pub fn coarsened_observable(setting: &MeasurementSetting, gamma: f64, nodes: usize) -> Result<SquareComplexMatrix> {
    let n = f64::from(setting.steps());
    let (w0, t0) = (setting.w0(), setting.duration());
    let (over_w, sigma) = match setting.model() {
        FuzzinessModel::FrequencyOnly { delta_w } => (true, delta_w / n.sqrt()),
        FuzzinessModel::TimingOnly { delta_t } => (false, delta_t * n.sqrt()),
        FuzzinessModel::Joint { .. } => {
            return Err(Error::UnsupportedModel(
                "decohered correlations need a frequency-only or timing-only model".into(),
            ))
        }
    };
    if sigma == 0.0 {
        return Ok(rtn_averaged_observable(w0, t0, gamma));
    }
    let center = if over_w { w0 } else { t0 };
    with_rule(nodes, |rule| {
        let mut acc = SquareComplexMatrix::zeros(2);
        for (x, weight) in rule.points(center, sigma) {
            let m = if over_w {
                rtn_averaged_observable(x, t0, gamma)
            } else {
                rtn_averaged_observable(w0, x, gamma)
            };
            acc = &acc + &m.scale_real(weight);
        }
        acc
    })
}

fn gh_nodes(quad: &QuadratureSpec) -> Result<usize> {
    quad.validate()?;
    match *quad {
        QuadratureSpec::GaussHermite { nodes } => Ok(nodes),
        _ => Err(Error::Usage(format!(
            "decohered correlations need a gauss_hermite quadrature spec, got {}",
            quad.method_name()
        ))),
    }
}

/// Correlation of two coarsened settings with side `a` / `b` noise from `noise`.
pub fn decohered_coarsened_correlation(
    setting_a: &MeasurementSetting,
    setting_b: &MeasurementSetting,
    noise: &NoiseSpec,
    quad: &QuadratureSpec,
) -> Result<f64> {
    noise.validate()?;
    let nodes = gh_nodes(quad)?;
    let a = coarsened_observable(setting_a, noise.gamma_for(Side::A), nodes)?;
    let b = coarsened_observable(setting_b, noise.gamma_for(Side::B), nodes)?;
    pair_expectation(&TwoQubitState::entangled(), &a, &b)
}

/// Bell combination of four decohered correlations.
pub fn decohered_bell(config: &BellConfig, noise: &NoiseSpec, quad: &QuadratureSpec) -> Result<BellBreakdown> {
    config.validate()?;
    noise.validate()?;
    let nodes = gh_nodes(quad)?;
    let (ga, gb) = (noise.gamma_for(Side::A), noise.gamma_for(Side::B));
    let a = coarsened_observable(&config.setting_a(config.theta_a)?, ga, nodes)?;
    let a_prime = coarsened_observable(&config.setting_a(config.theta_a_prime)?, ga, nodes)?;
    let b = coarsened_observable(&config.setting_b(config.theta_b)?, gb, nodes)?;
    let b_prime = coarsened_observable(&config.setting_b(config.theta_b_prime)?, gb, nodes)?;
    let psi = TwoQubitState::entangled();
    Ok(BellBreakdown::from_terms([
        pair_expectation(&psi, &a, &b)?,
        pair_expectation(&psi, &a_prime, &b)?,
        pair_expectation(&psi, &a, &b_prime)?,
        pair_expectation(&psi, &a_prime, &b_prime)?,
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::bell_value;
    use crate::spin::{pauli, x_frame, PauliAxis, rotated_observable};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn noiseless_limit_is_plain_rotation() {
        let m = rtn_averaged_observable(1.3, 0.4, 0.0);
        assert!(x_frame(&m).approx_eq(&rotated_observable(1.3 * 0.4), 1e-14));
    }

    #[test]
    fn no_rotation_leaves_sigma_z() {
        let z = pauli(PauliAxis::Z);
        for g in [0.0, 0.5, 3.0] {
            assert!(rtn_averaged_observable(0.0, 1.7, g).approx_eq(&z, 1e-14));
        }
    }

    #[test]
    fn averaged_observable_is_hermitian_contraction() {
        let m = rtn_averaged_observable(0.8, 1.1, 0.9);
        assert!(m.is_hermitian(1e-14));
        assert!(m.operator_norm().unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn noise_spec_validation() {
        assert!(NoiseSpec::new(-1.0, vec![Side::A]).is_err());
        assert!(NoiseSpec::new(1.0, vec![]).is_err());
        assert!(NoiseSpec::new(0.0, vec![]).is_ok());
    }

    #[test]
    fn gamma_zero_matches_closed_form() {
        let config = BellConfig::symmetric(
            [-FRAC_PI_8, FRAC_PI_8, 0.0, FRAC_PI_2],
            FuzzinessModel::frequency(1.0),
            1.0,
        );
        let q = QuadratureSpec::gauss_hermite();
        let noisy = decohered_bell(&config, &NoiseSpec::none(), &q).unwrap();
        let closed = bell_value(&config).unwrap();
        assert!((noisy.b - closed.b).abs() < 1e-9, "{} vs {}", noisy.b, closed.b);
    }

    #[test]
    fn all_zero_angles_give_minus_two() {
        let config = BellConfig::symmetric([0.0; 4], FuzzinessModel::frequency(0.0), 1.0);
        let b = decohered_bell(&config, &NoiseSpec::none(), &QuadratureSpec::gauss_hermite()).unwrap();
        assert!((b.b + 2.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_spec_is_rejected() {
        let config = BellConfig::symmetric([0.0, FRAC_PI_4, 0.0, 0.1], FuzzinessModel::frequency(0.2), 1.0);
        let r = decohered_bell(&config, &NoiseSpec::none(), &QuadratureSpec::adaptive_simpson());
        assert!(matches!(r, Err(Error::Usage(_))));
    }
}
