//! Coarsened correlation functions and the CHSH Bell combination.
//!
//! For the entangled pair state and sharp angles the correlation is
//! `-cos(2(θa + θb))`. Independent Gaussian smearing of each angle damps it by
//! `exp(-2(σa² + σb²))`, which gives every quantity here in closed form.

use serde::{Deserialize, Serialize};

use crate::coarsening::{effective_sigma, FuzzinessModel, MeasurementSetting};
use crate::error::{Error, Result};

/// Tolerance on `b = e1 + e2 + e3 - e4`.
pub const BREAKDOWN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellVariant {
    /// One fuzziness per measurement setting, shared by every term using it.
    PerSetting,
    /// Independent fuzziness for each side of each of the four terms.
    PerTerm,
}

/// Four-setting CHSH configuration.
///
/// `w0_a`, `w0_b` are frequency magnitudes; each angle is rotated with the
/// sign of `w0` matching its own sign so its duration is non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellConfig {
    pub theta_a: f64,
    pub theta_a_prime: f64,
    pub theta_b: f64,
    pub theta_b_prime: f64,
    pub model_a: FuzzinessModel,
    pub model_b: FuzzinessModel,
    pub w0_a: f64,
    pub w0_b: f64,
    #[serde(default = "one")]
    pub steps_a: u32,
    #[serde(default = "one")]
    pub steps_b: u32,
    #[serde(default = "per_setting")]
    pub variant: BellVariant,
    /// Term-ordered `[σa1, σb1, σa2', σb2, σa3, σb3', σa4', σb4']`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_term_overrides: Option<[f64; 8]>,
}

fn one() -> u32 {
    1
}

fn per_setting() -> BellVariant {
    BellVariant::PerSetting
}

impl BellConfig {
    /// Per-setting configuration with the same model, frequency and step
    /// count on both sides.
    pub fn symmetric(angles: [f64; 4], model: FuzzinessModel, w0: f64) -> Self {
        let [theta_a, theta_a_prime, theta_b, theta_b_prime] = angles;
        Self {
            theta_a,
            theta_a_prime,
            theta_b,
            theta_b_prime,
            model_a: model,
            model_b: model,
            w0_a: w0,
            w0_b: w0,
            steps_a: 1,
            steps_b: 1,
            variant: BellVariant::PerSetting,
            per_term_overrides: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let angles = [self.theta_a, self.theta_a_prime, self.theta_b, self.theta_b_prime];
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Usage("Bell angles must be finite".into()));
        }
        for (side, w0) in [("a", self.w0_a), ("b", self.w0_b)] {
            if w0 == 0.0 || !w0.is_finite() {
                return Err(Error::Usage(format!("w0_{side} must be finite and non-zero")));
            }
        }
        if self.steps_a == 0 || self.steps_b == 0 {
            return Err(Error::Usage("step counts must be >= 1".into()));
        }
        self.model_a.validate()?;
        self.model_b.validate()?;
        match (self.variant, &self.per_term_overrides) {
            (BellVariant::PerTerm, None) => Err(Error::Usage(
                "per-term Bell variant needs per_term_overrides (8 sigmas)".into(),
            )),
            (BellVariant::PerSetting, Some(_)) => Err(Error::Usage(
                "per_term_overrides are only allowed with the per-term variant".into(),
            )),
            (BellVariant::PerTerm, Some(s)) if s.iter().any(|v| !(*v >= 0.0) || v.is_nan()) => {
                Err(Error::Usage("per-term sigmas must be >= 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// The four `(θa, θb)` pairs in term order.
    pub fn term_angles(&self) -> [(f64, f64); 4] {
        [
            (self.theta_a, self.theta_b),
            (self.theta_a_prime, self.theta_b),
            (self.theta_a, self.theta_b_prime),
            (self.theta_a_prime, self.theta_b_prime),
        ]
    }

    pub fn setting_a(&self, theta: f64) -> Result<MeasurementSetting> {
        MeasurementSetting::forward(theta, self.w0_a, self.steps_a, self.model_a)
    }

    pub fn setting_b(&self, theta: f64) -> Result<MeasurementSetting> {
        MeasurementSetting::forward(theta, self.w0_b, self.steps_b, self.model_b)
    }

    /// `(σa, σb)` of each term under the per-setting variant.
    pub fn term_sigmas(&self) -> Result<[(f64, f64); 4]> {
        let mut out = [(0.0, 0.0); 4];
        for (slot, (ta, tb)) in out.iter_mut().zip(self.term_angles()) {
            *slot = (effective_sigma(&self.setting_a(ta)?)?, effective_sigma(&self.setting_b(tb)?)?);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellBreakdown {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub b: f64,
    pub abs_b: f64,
}

impl BellBreakdown {
    pub fn from_terms(e: [f64; 4]) -> Self {
        let b = e[0] + e[1] + e[2] - e[3];
        Self {
            e1: e[0],
            e2: e[1],
            e3: e[2],
            e4: e[3],
            b,
            abs_b: b.abs(),
        }
    }

    pub fn terms(&self) -> [f64; 4] {
        [self.e1, self.e2, self.e3, self.e4]
    }
}

/// `-exp(-2(σa² + σb²))·cos(2(θa + θb))`.
pub fn coarsened_correlation(theta_a: f64, theta_b: f64, sigma_a: f64, sigma_b: f64) -> f64 {
    let damping = (-2.0 * (sigma_a * sigma_a + sigma_b * sigma_b)).exp();
    -damping * (2.0 * (theta_a + theta_b)).cos()
}

fn reject_joint(config: &BellConfig) -> Result<()> {
    for m in [config.model_a, config.model_b] {
        if let FuzzinessModel::Joint { .. } = m {
            return Err(Error::UnsupportedModel(
                "Bell values are not defined for the joint frequency/timing model".into(),
            ));
        }
    }
    Ok(())
}

/// Bell value with one fuzziness per setting, each derived from its side's
/// model at the term's own angle.
pub fn bell_value(config: &BellConfig) -> Result<BellBreakdown> {
    config.validate()?;
    if config.variant != BellVariant::PerSetting {
        return Err(Error::Usage("bell_value needs the per-setting variant; use bell_value_per_term".into()));
    }
    reject_joint(config)?;
    let sigmas = config.term_sigmas()?;
    let mut e = [0.0; 4];
    for ((slot, (ta, tb)), (sa, sb)) in e.iter_mut().zip(config.term_angles()).zip(sigmas) {
        *slot = coarsened_correlation(ta, tb, sa, sb);
    }
    Ok(BellBreakdown::from_terms(e))
}

/// Bell value with eight independently chosen sigmas.
pub fn bell_value_per_term(config: &BellConfig) -> Result<BellBreakdown> {
    config.validate()?;
    let Some(s) = config.per_term_overrides else {
        return Err(Error::Usage("bell_value_per_term needs per_term_overrides".into()));
    };
    let mut e = [0.0; 4];
    for (k, (slot, (ta, tb))) in e.iter_mut().zip(config.term_angles()).enumerate() {
        *slot = coarsened_correlation(ta, tb, s[2 * k], s[2 * k + 1]);
    }
    Ok(BellBreakdown::from_terms(e))
}

/// Common `Δw` of a config whose sides are both frequency-only.
pub fn shared_delta_w(config: &BellConfig) -> Result<f64> {
    match (config.model_a, config.model_b) {
        (FuzzinessModel::FrequencyOnly { delta_w: a }, FuzzinessModel::FrequencyOnly { delta_w: b }) if a == b => Ok(a),
        (FuzzinessModel::FrequencyOnly { .. }, FuzzinessModel::FrequencyOnly { .. }) => Err(Error::Usage(
            "derivative in delta_w needs the same delta_w on both sides".into(),
        )),
        _ => Err(Error::UnsupportedModel("derivative in delta_w needs FrequencyOnly on both sides".into())),
    }
}

/// `dB/dΔw` of the closed form, with `Δw` shared by both sides.
///
/// Each term contributes `-4Δw·E·(θa²/(w0a² Na) + θb²/(w0b² Nb))`; with equal
/// frequencies and single steps this is `-(4Δw/w0²)·E·(θa² + θb²)`.
pub fn bell_derivative_dw(config: &BellConfig) -> Result<f64> {
    let delta_w = shared_delta_w(config)?;
    let bell = bell_value(config)?;
    let wa = config.w0_a * config.w0_a * f64::from(config.steps_a);
    let wb = config.w0_b * config.w0_b * f64::from(config.steps_b);
    let signs = [1.0, 1.0, 1.0, -1.0];
    let d = config
        .term_angles()
        .iter()
        .zip(bell.terms())
        .zip(signs)
        .map(|((&(ta, tb), e), s)| s * e * (ta * ta / wa + tb * tb / wb))
        .sum::<f64>();
    Ok(-4.0 * delta_w * d)
}

/// `d|B|/dΔw`.
pub fn abs_bell_derivative_dw(config: &BellConfig) -> Result<f64> {
    let b = bell_value(config)?.b;
    Ok(b.signum() * bell_derivative_dw(config)?)
}

/// Replaces `Δw` on both sides of a frequency-only config.
pub fn with_delta_w(config: &BellConfig, delta_w: f64) -> BellConfig {
    let mut c = config.clone();
    for m in [&mut c.model_a, &mut c.model_b] {
        match m {
            FuzzinessModel::FrequencyOnly { delta_w: d } | FuzzinessModel::Joint { delta_w: d, .. } => *d = delta_w,
            FuzzinessModel::TimingOnly { .. } => {}
        }
    }
    c
}

/// Replaces `Δt` on both sides of a timing config.
pub fn with_delta_t(config: &BellConfig, delta_t: f64) -> BellConfig {
    let mut c = config.clone();
    for m in [&mut c.model_a, &mut c.model_b] {
        match m {
            FuzzinessModel::TimingOnly { delta_t: d } | FuzzinessModel::Joint { delta_t: d, .. } => *d = delta_t,
            FuzzinessModel::FrequencyOnly { .. } => {}
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_8, PI, SQRT_2};

    fn fig1(delta_w: f64) -> BellConfig {
        BellConfig::symmetric(
            [0.0, FRAC_PI_8, 0.0, -FRAC_PI_8],
            FuzzinessModel::frequency(delta_w),
            SQRT_2 * PI / 8.0,
        )
    }

    fn fig1_closed_form(dw: f64) -> f64 {
        let x = (-dw * dw).exp();
        -1.0 - SQRT_2 * x + x * x
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(coarsened_correlation(0.0, 0.0, 0.0, 0.0), -1.0);
        assert!((coarsened_correlation(0.0, 0.0, 1.0, 1.0) + (-4.0_f64).exp()).abs() < 1e-15);
        assert!((coarsened_correlation(0.0, 0.0, 1.0, 1.0) + 0.018316).abs() < 1e-6);
    }

    #[test]
    fn fig1_endpoints() {
        let b0 = bell_value(&fig1(0.0)).unwrap();
        assert!((b0.b + SQRT_2).abs() < 1e-12);
        let b = bell_value(&fig1(0.4)).unwrap();
        assert!((b.b - fig1_closed_form(0.4)).abs() < 1e-12);
        assert!((b.abs_b - 1.4790).abs() < 1e-4);
        assert!(b.abs_b > SQRT_2);
    }

    #[test]
    fn breakdown_sum() {
        let b = bell_value(&fig1(0.7)).unwrap();
        assert!((b.b - (b.e1 + b.e2 + b.e3 - b.e4)).abs() <= BREAKDOWN_TOL);
        assert_eq!(b.abs_b, b.b.abs());
    }

    #[test]
    fn per_term_pathology() {
        let mut c = BellConfig::symmetric([0.0, 2.0 * PI, 0.0, 2.0 * PI], FuzzinessModel::frequency(0.0), 1.0);
        c.variant = BellVariant::PerTerm;
        c.per_term_overrides = Some([0.0; 8]);
        let b = bell_value_per_term(&c).unwrap();
        assert!((b.b + 2.0).abs() < 1e-12);
        c.per_term_overrides = Some([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 4.0, 4.0]);
        let b = bell_value_per_term(&c).unwrap();
        assert!((b.abs_b - 3.0).abs() < 1e-9);
    }

    #[test]
    fn per_term_equal_sigmas_match_per_setting() {
        let c = fig1(0.5);
        let s = c.term_sigmas().unwrap();
        let mut p = c.clone();
        p.variant = BellVariant::PerTerm;
        p.per_term_overrides = Some([s[0].0, s[0].1, s[1].0, s[1].1, s[2].0, s[2].1, s[3].0, s[3].1]);
        assert_eq!(bell_value(&c).unwrap(), bell_value_per_term(&p).unwrap());
    }

    #[test]
    fn variant_mismatch_is_usage_error() {
        let mut c = fig1(0.1);
        c.variant = BellVariant::PerTerm;
        assert!(matches!(bell_value_per_term(&c), Err(Error::Usage(_))));
        let mut c = fig1(0.1);
        c.per_term_overrides = Some([0.0; 8]);
        assert!(matches!(bell_value(&c), Err(Error::Usage(_))));
    }

    #[test]
    fn joint_model_is_unsupported() {
        let c = BellConfig::symmetric([0.0, 0.1, 0.0, 0.2], FuzzinessModel::Joint { delta_w: 0.1, delta_t: 0.1 }, 1.0);
        assert!(matches!(bell_value(&c), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn derivative_vanishes_at_zero_fuzziness() {
        assert_eq!(bell_derivative_dw(&fig1(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn fig1_derivative_closed_form() {
        let dw: f64 = 0.3;
        let x = (-dw * dw).exp();
        let expect = 2.0 * dw * x * (2.0 * x - SQRT_2);
        let got = abs_bell_derivative_dw(&fig1(dw)).unwrap();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
        assert!(got > 0.0);
    }

    #[test]
    fn derivative_needs_frequency_model() {
        let c = BellConfig::symmetric([0.0, 0.1, 0.0, 0.2], FuzzinessModel::timing(0.3), 1.0);
        assert!(matches!(bell_derivative_dw(&c), Err(Error::UnsupportedModel(_))));
    }
}
