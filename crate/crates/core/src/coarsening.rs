//! Fuzziness models for the measurement reference.
//!
//! The rotation angle is `θ = w·t`. Gaussian uncertainty in the frequency `w`
//! produces an angle spread proportional to `|θ|`; uncertainty in the timing
//! `t` produces a spread that does not depend on `θ`. Splitting the rotation
//! into `N` steps shrinks the first by `√N` and grows the second by `√N`.
//! When both sources are present the induced angle distribution is no longer
//! Gaussian; [`joint_angle_density`] evaluates it numerically.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, IntegralResult, QuadratureSpec};

/// Width of the excluded window `|w| < ε` around the `1/w` pole.
pub const DEFAULT_POLE_EXCLUSION: f64 = 1e-8;
/// Gaussian integrals are truncated at this many standard deviations.
pub const GAUSSIAN_TRUNCATION: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FuzzinessModel {
    FrequencyOnly { delta_w: f64 },
    TimingOnly { delta_t: f64 },
    Joint { delta_w: f64, delta_t: f64 },
}

impl FuzzinessModel {
    pub fn frequency(delta_w: f64) -> Self {
        FuzzinessModel::FrequencyOnly { delta_w }
    }

    pub fn timing(delta_t: f64) -> Self {
        FuzzinessModel::TimingOnly { delta_t }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |d: f64| d >= 0.0 && d.is_finite();
        let valid = match *self {
            FuzzinessModel::FrequencyOnly { delta_w } => ok(delta_w),
            FuzzinessModel::TimingOnly { delta_t } => ok(delta_t),
            FuzzinessModel::Joint { delta_w, delta_t } => ok(delta_w) && ok(delta_t),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::Usage(format!("fuzziness deltas must be finite and >= 0: {self:?}")))
        }
    }

    pub fn delta_w(&self) -> Option<f64> {
        match *self {
            FuzzinessModel::FrequencyOnly { delta_w } | FuzzinessModel::Joint { delta_w, .. } => Some(delta_w),
            FuzzinessModel::TimingOnly { .. } => None,
        }
    }

    pub fn delta_t(&self) -> Option<f64> {
        match *self {
            FuzzinessModel::TimingOnly { delta_t } | FuzzinessModel::Joint { delta_t, .. } => Some(delta_t),
            FuzzinessModel::FrequencyOnly { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FuzzinessModel::FrequencyOnly { .. } => "frequency_only",
            FuzzinessModel::TimingOnly { .. } => "timing_only",
            FuzzinessModel::Joint { .. } => "joint",
        }
    }
}

/// One measurement arm: target angle, nominal frequency, step count, model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    theta: f64,
    w0: f64,
    steps: u32,
    model: FuzzinessModel,
}

impl MeasurementSetting {
    pub fn new(theta: f64, w0: f64, steps: u32, model: FuzzinessModel) -> Result<Self> {
        if !theta.is_finite() || !w0.is_finite() {
            return Err(Error::Usage(format!("theta and w0 must be finite (theta={theta}, w0={w0})")));
        }
        if w0 == 0.0 {
            return Err(Error::Usage("nominal frequency w0 must be non-zero".into()));
        }
        if steps == 0 {
            return Err(Error::Usage("step count must be >= 1".into()));
        }
        if theta / w0 < 0.0 {
            return Err(Error::Usage(format!(
                "rotation duration theta/w0 must be >= 0 (theta={theta}, w0={w0})"
            )));
        }
        model.validate()?;
        Ok(Self { theta, w0, steps, model })
    }

    /// Takes the frequency magnitude and gives `w0` the sign of `theta`, so
    /// the rotation always runs forward in time.
    pub fn forward(theta: f64, w0_magnitude: f64, steps: u32, model: FuzzinessModel) -> Result<Self> {
        let w0 = if theta < 0.0 { -w0_magnitude.abs() } else { w0_magnitude.abs() };
        Self::new(theta, w0, steps, model)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn model(&self) -> FuzzinessModel {
        self.model
    }

    /// Nominal rotation time `θ/w0` (never negative).
    pub fn duration(&self) -> f64 {
        self.theta / self.w0
    }
}

/// Distribution of the realized rotation angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngleDistribution {
    Gaussian { mean: f64, sigma: f64 },
    JointNumeric { w0: f64, t0: f64, delta_w: f64, delta_t: f64 },
}

impl AngleDistribution {
    pub fn gaussian(mean: f64, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) || !mean.is_finite() {
            return Err(Error::Domain(format!("Gaussian needs finite mean and sigma >= 0, got ({mean}, {sigma})")));
        }
        Ok(AngleDistribution::Gaussian { mean, sigma })
    }

    /// Joint frequency/timing distribution; both deltas must be positive,
    /// otherwise the distribution is Gaussian and must be built as such.
    pub fn joint(w0: f64, t0: f64, delta_w: f64, delta_t: f64) -> Result<Self> {
        if !(delta_w > 0.0 && delta_t > 0.0) {
            return Err(Error::Domain(format!(
                "joint distribution needs delta_w > 0 and delta_t > 0, got ({delta_w}, {delta_t})"
            )));
        }
        if !(w0.is_finite() && t0.is_finite() && delta_w.is_finite() && delta_t.is_finite()) {
            return Err(Error::Domain("joint distribution parameters must be finite".into()));
        }
        Ok(AngleDistribution::JointNumeric { w0, t0, delta_w, delta_t })
    }

    /// Density at `theta`. The joint kind uses the default Simpson spec.
    pub fn density(&self, theta: f64) -> Result<f64> {
        match *self {
            AngleDistribution::Gaussian { mean, sigma } => gaussian_kernel(theta, mean, sigma),
            AngleDistribution::JointNumeric { w0, t0, delta_w, delta_t } => {
                joint_angle_density(theta, w0, t0, delta_w, delta_t, &QuadratureSpec::adaptive_simpson())
                    .map(|r| r.value)
            }
        }
    }
}

/// Standard deviation of the realized angle for single-source models.
///
/// Frequency: `Δw·|θ| / (|w0|·√N)`. Timing: `Δt·|w0|·√N`.
pub fn effective_sigma(setting: &MeasurementSetting) -> Result<f64> {
    let n = f64::from(setting.steps);
    match setting.model {
        FuzzinessModel::FrequencyOnly { delta_w } => Ok(delta_w * setting.theta.abs() / (setting.w0.abs() * n.sqrt())),
        FuzzinessModel::TimingOnly { delta_t } => Ok(delta_t * setting.w0.abs() * n.sqrt()),
        FuzzinessModel::Joint { .. } => Err(Error::UnsupportedModel(
            "the joint model has no single angle sigma; use joint_angle_density".into(),
        )),
    }
}

/// Normalized Gaussian density with standard deviation `sigma > 0`.
pub fn gaussian_kernel(theta: f64, theta0: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("kernel sigma must be positive and finite, got {sigma}")));
    }
    let u = (theta - theta0) / sigma;
    Ok((-0.5 * u * u).exp() / ((2.0 * PI).sqrt() * sigma))
}

/// Gaussian angle distribution of an N-step single-source rotation.
pub fn compose_steps(setting: &MeasurementSetting) -> Result<AngleDistribution> {
    AngleDistribution::gaussian(setting.theta, effective_sigma(setting)?)
}

/// Evaluator for the joint frequency/timing angle distribution
/// `P(θ) = |∫ dw exp(-(w-w0)²/2Δw² - (θ/w - t0)²/2Δt²) / (2π Δt Δw w)|`.
///
/// The `1/w` pole is handled by dropping the symmetric window `|w| < ε` and
/// splitting each side into decade panels that shrink towards the pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDensity {
    pub w0: f64,
    pub t0: f64,
    pub delta_w: f64,
    pub delta_t: f64,
    pub epsilon: f64,
}

impl JointDensity {
    pub fn new(w0: f64, t0: f64, delta_w: f64, delta_t: f64) -> Result<Self> {
        AngleDistribution::joint(w0, t0, delta_w, delta_t)?;
        Ok(Self {
            w0,
            t0,
            delta_w,
            delta_t,
            epsilon: DEFAULT_POLE_EXCLUSION,
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Usage(format!("pole exclusion must be positive, got {epsilon}")));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    fn integrand(&self, theta: f64, w: f64) -> f64 {
        let a = (w - self.w0) / self.delta_w;
        let b = (theta / w - self.t0) / self.delta_t;
        (-0.5 * (a * a + b * b)).exp() / (2.0 * PI * self.delta_t * self.delta_w * w)
    }

    /// Integration panels over the truncated `w` range with the pole removed.
    fn panels(&self, theta: f64) -> Vec<(f64, f64)> {
        let lo = self.w0 - GAUSSIAN_TRUNCATION * self.delta_w;
        let hi = self.w0 + GAUSSIAN_TRUNCATION * self.delta_w;
        let eps = self.epsilon;
        let mut cuts: Vec<f64> = vec![lo, hi, self.w0];
        if lo < eps && hi > -eps {
            cuts.extend([-eps, eps]);
            let mut d = eps;
            while d * 10.0 < lo.abs().max(hi.abs()) {
                d *= 10.0;
                cuts.extend([-d, d]);
            }
            if theta != 0.0 {
                cuts.extend([-theta.abs(), theta.abs()]);
            }
        }
        cuts.retain(|c| *c >= lo && *c <= hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .map(|p| (p[0], p[1]))
            .filter(|(a, b)| b > a && !(*a >= -eps && *b <= eps))
            .collect()
    }

    /// The w-integral before the outer absolute value.
    pub fn signed(&self, theta: f64, rel_tol: f64, max_depth: u32) -> Result<IntegralResult> {
        let mut total = IntegralResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        };
        for (a, b) in self.panels(theta) {
            let r = adaptive_simpson(|w| self.integrand(theta, w), a, b, rel_tol, max_depth).map_err(|e| match e {
                Error::Numeric { value, error_estimate, .. } => Error::numeric(
                    format!("joint angle density did not converge at theta={theta} on w in [{a}, {b}]"),
                    value,
                    error_estimate,
                ),
                other => other,
            })?;
            total.value += r.value;
            total.error_estimate += r.error_estimate;
            total.evaluations += r.evaluations;
        }
        Ok(total)
    }

    pub fn density(&self, theta: f64, quad: &QuadratureSpec) -> Result<IntegralResult> {
        let QuadratureSpec::AdaptiveSimpson { rel_tol, max_depth } = *quad else {
            return Err(Error::Usage(format!(
                "joint angle density needs an adaptive_simpson quadrature spec, got {}",
                quad.method_name()
            )));
        };
        quad.validate()?;
        let mut r = self.signed(theta, rel_tol, max_depth)?;
        r.value = r.value.abs();
        Ok(r)
    }
}

/// Joint-coarsening angle density at `theta` (see [`JointDensity`]).
pub fn joint_angle_density(
    theta: f64,
    w0: f64,
    t0: f64,
    dw: f64,
    dt: f64,
    quad: &QuadratureSpec,
) -> Result<IntegralResult> {
    JointDensity::new(w0, t0, dw, dt)?.density(theta, quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

    fn freq(theta: f64, w0: f64, dw: f64, n: u32) -> MeasurementSetting {
        MeasurementSetting::new(theta, w0, n, FuzzinessModel::frequency(dw)).unwrap()
    }

    #[test]
    fn effective_sigma_examples() {
        assert!((effective_sigma(&freq(PI, 1.0, 0.5, 1)).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((effective_sigma(&freq(PI, 1.0, 0.5, 2)).unwrap() - PI / (2.0 * SQRT_2)).abs() < 1e-15);
        let timing = MeasurementSetting::new(0.7, 2.0, 4, FuzzinessModel::timing(0.3)).unwrap();
        assert!((effective_sigma(&timing).unwrap() - 1.2).abs() < 1e-15);
        assert_eq!(effective_sigma(&freq(0.0, 1.0, 5.0, 1)).unwrap(), 0.0);
    }

    #[test]
    fn joint_model_has_no_sigma() {
        let s = MeasurementSetting::new(1.0, 1.0, 1, FuzzinessModel::Joint { delta_w: 0.1, delta_t: 0.1 }).unwrap();
        assert!(matches!(effective_sigma(&s), Err(Error::UnsupportedModel(_))));
        assert!(compose_steps(&s).is_err());
    }

    #[test]
    fn setting_validation() {
        assert!(MeasurementSetting::new(1.0, 0.0, 1, FuzzinessModel::frequency(0.1)).is_err());
        assert!(MeasurementSetting::new(1.0, 1.0, 0, FuzzinessModel::frequency(0.1)).is_err());
        assert!(MeasurementSetting::new(-1.0, 1.0, 1, FuzzinessModel::frequency(0.1)).is_err());
        assert!(MeasurementSetting::new(1.0, 1.0, 1, FuzzinessModel::frequency(-0.1)).is_err());
        let s = MeasurementSetting::forward(-1.0, 2.0, 1, FuzzinessModel::frequency(0.1)).unwrap();
        assert_eq!(s.w0(), -2.0);
        assert_eq!(s.duration(), 0.5);
    }

    #[test]
    fn compose_steps_scaling() {
        let one = compose_steps(&freq(1.2, 0.8, 0.4, 1)).unwrap();
        let four = compose_steps(&freq(1.2, 0.8, 0.4, 4)).unwrap();
        let (AngleDistribution::Gaussian { sigma: s1, mean }, AngleDistribution::Gaussian { sigma: s4, .. }) =
            (one, four)
        else {
            panic!("expected Gaussian");
        };
        assert_eq!(mean, 1.2);
        assert!((s1 - 0.4 * 1.2 / 0.8).abs() < 1e-15);
        assert!((s4 - s1 / 2.0).abs() < 1e-15);

        let t = |n| {
            let s = MeasurementSetting::new(1.2, 0.8, n, FuzzinessModel::timing(0.4)).unwrap();
            effective_sigma(&s).unwrap()
        };
        assert!((t(4) - 2.0 * t(1)).abs() < 1e-15);
    }

    #[test]
    fn kernel_values() {
        let s = 0.3;
        let peak = 1.0 / ((2.0 * PI).sqrt() * s);
        assert!((gaussian_kernel(1.0, 1.0, s).unwrap() - peak).abs() < 1e-15);
        assert!((gaussian_kernel(1.0 + s, 1.0, s).unwrap() - peak * (-0.5_f64).exp()).abs() < 1e-15);
        assert!(matches!(gaussian_kernel(0.0, 0.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn kernel_normalization() {
        let (t0, s) = (0.4, 0.25);
        let r = adaptive_simpson(|t| gaussian_kernel(t, t0, s).unwrap(), t0 - 8.0 * s, t0 + 8.0 * s, 1e-12, 40)
            .unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn joint_requires_positive_deltas() {
        assert!(AngleDistribution::joint(1.0, 1.0, 0.0, 0.5).is_err());
        assert!(JointDensity::new(1.0, 1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn joint_density_rejects_gauss_hermite_spec() {
        let r = joint_angle_density(0.5, 1.0, FRAC_PI_4, 0.6, 0.6, &QuadratureSpec::gauss_hermite());
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn joint_density_jump_and_continuity() {
        let q = QuadratureSpec::adaptive_simpson();
        let left = joint_angle_density(-1e-4, 1.0, FRAC_PI_4, 0.6, 0.6, &q).unwrap();
        let right = joint_angle_density(1e-4, 1.0, FRAC_PI_4, 0.6, 0.6, &q).unwrap();
        assert!((right.value - left.value).abs() > 0.1);

        let left = joint_angle_density(-1e-4, 1.0, 0.0, 1.0, 1.0, &q).unwrap();
        let right = joint_angle_density(1e-4, 1.0, 0.0, 1.0, 1.0, &q).unwrap();
        assert!((right.value - left.value).abs() <= left.error_estimate + right.error_estimate + 1e-12);
    }

    #[test]
    fn panels_skip_the_pole_window() {
        let d = JointDensity::new(1.0, 0.5, 0.6, 0.6).unwrap();
        for (a, b) in d.panels(0.3) {
            assert!(a < b);
            assert!(b <= -d.epsilon || a >= d.epsilon, "panel [{a}, {b}] crosses the pole");
        }
    }
}
