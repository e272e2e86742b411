use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, SQRT_2};

use serde::Serialize;

use super::{DistributionParams, Grid, ScenarioKind, SweepSpec, SweepVariable};
use crate::bell::{BellConfig, BellVariant};
use crate::coarsening::{FuzzinessModel, DEFAULT_POLE_EXCLUSION};
use crate::decoherence::{NoiseSpec, Side};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioInfo {
    pub id: &'static str,
    pub description: &'static str,
    pub parameters: &'static str,
}

const SCENARIOS: &[ScenarioInfo] = &[
    ScenarioInfo {
        id: "fig1",
        description: "|B| rising with frequency fuzziness below the classical bound",
        parameters: "theta_a=theta_b=0, theta_a'=pi/8, theta_b'=-pi/8, |w0|=sqrt(2)*pi/8; delta_w in [0, 2]",
    },
    ScenarioInfo {
        id: "fig2",
        description: "joint frequency/timing angle density, jump at theta=0",
        parameters: "w0=1, t0=pi/4, delta_w=0.6, delta_t=0.6; theta in [-5, 5]",
    },
    ScenarioInfo {
        id: "fig3",
        description: "joint angle density with larger fuzziness, peak pulled towards 0",
        parameters: "w0=1, t0=pi/4, delta_w=1, delta_t=1; theta in [-5, 5]",
    },
    ScenarioInfo {
        id: "fig4",
        description: "joint angle density at t0=0, continuous at theta=0",
        parameters: "w0=1, t0=0, delta_w=1, delta_t=1; theta in [-5, 5]",
    },
    ScenarioInfo {
        id: "fig5",
        description: "Bell value against telegraph-noise coupling on side a",
        parameters: "theta_a=-pi/8, theta_b=0, theta_a'=pi/8, theta_b'=pi/2, delta_w=1, |w0|=1; gamma in [0, 3]",
    },
    ScenarioInfo {
        id: "fig6",
        description: "as fig5 with smaller fuzziness and frequency",
        parameters: "theta_a=-pi/8, theta_b=0, theta_a'=pi/8, theta_b'=pi/2, delta_w=0.5, |w0|=0.5; gamma in [0, 3]",
    },
    ScenarioInfo {
        id: "fig7",
        description: "Bell value against timing fuzziness with telegraph noise",
        parameters: "theta_a=0, theta_b=7pi/8, theta_a'=pi/4, theta_b'=pi/8, gamma=1, |w0|=1; delta_t in [0, 2]",
    },
    ScenarioInfo {
        id: "smallangle",
        description: "|B| = 2 + 4 lambda^2 for small primed angles, any delta_w",
        parameters: "theta_a=theta_b=0, theta_a'=theta_b'=lambda, |w0|=1, delta_w=1; lambda in {0.01, 0.02, 0.05, 0.1}",
    },
    ScenarioInfo {
        id: "eq9-pathology",
        description: "per-term fuzziness reaching |B| = 3",
        parameters: "theta_a=theta_b=0, theta_a'=theta_b'=2pi, terms 1-3 sharp; fourth-term sigma in [0, 4]",
    },
    ScenarioInfo {
        id: "stepscaling",
        description: "Bell value against the number of rotation steps (frequency fuzziness)",
        parameters: "fig1 angles, |w0|=sqrt(2)*pi/8, delta_w=0.5; steps in {1, 2, 5, 10}",
    },
];

pub fn list_scenarios() -> &'static [ScenarioInfo] {
    SCENARIOS
}

const FORWARD_NOTE: &str =
    "captions give |w0|; each angle is rotated with w0 of its own sign so the rotation time is non-negative";

fn bell_spec(id: &str, kind: ScenarioKind, var: SweepVariable, grid: Grid, bell: BellConfig) -> SweepSpec {
    SweepSpec {
        scenario: id.to_string(),
        kind,
        sweep_variable: var,
        grid,
        seed: 0,
        quadrature: QuadratureSpec::gauss_hermite(),
        bell: Some(bell),
        noise: None,
        distribution: None,
        notes: vec![FORWARD_NOTE.to_string()],
    }
}

fn density_spec(id: &str, t0: f64, delta: f64) -> SweepSpec {
    SweepSpec {
        scenario: id.to_string(),
        kind: ScenarioKind::Density,
        sweep_variable: SweepVariable::Theta,
        grid: Grid::range(-5.0, 5.0, 1001),
        seed: 0,
        quadrature: QuadratureSpec::adaptive_simpson(),
        bell: None,
        noise: None,
        distribution: Some(DistributionParams {
            w0: 1.0,
            t0,
            delta_w: delta,
            delta_t: delta,
            epsilon: DEFAULT_POLE_EXCLUSION,
        }),
        notes: vec![
            "the w-integral drops |w| < epsilon and takes the absolute value of the signed total".to_string(),
        ],
    }
}

fn rtn_spec(id: &str, delta_w: f64, w0: f64) -> SweepSpec {
    let mut s = bell_spec(
        id,
        ScenarioKind::Decohered,
        SweepVariable::Gamma,
        Grid::range(0.0, 3.0, 61),
        BellConfig::symmetric([-FRAC_PI_8, FRAC_PI_8, 0.0, FRAC_PI_2], FuzzinessModel::frequency(delta_w), w0),
    );
    s.noise = Some(NoiseSpec {
        gamma: 0.0,
        noisy_sides: vec![Side::A],
    });
    s
}

/// Fully resolved spec of a named preset.
pub fn preset(id: &str) -> Result<SweepSpec> {
    let fig1_angles = [0.0, FRAC_PI_8, 0.0, -FRAC_PI_8];
    let fig1_w0 = SQRT_2 * PI / 8.0;
    let spec = match id {
        "fig1" => {
            let mut s = bell_spec(
                id,
                ScenarioKind::Bell,
                SweepVariable::DeltaW,
                Grid::range(0.0, 2.0, 201),
                BellConfig::symmetric(fig1_angles, FuzzinessModel::frequency(0.0), fig1_w0),
            );
            s.notes.push("delta_w range [0, 2] chosen to bracket the maximum of |B| near 0.589".into());
            s
        }
        "fig2" => density_spec(id, FRAC_PI_4, 0.6),
        "fig3" => density_spec(id, FRAC_PI_4, 1.0),
        "fig4" => density_spec(id, 0.0, 1.0),
        "fig5" => rtn_spec(id, 1.0, 1.0),
        "fig6" => rtn_spec(id, 0.5, 0.5),
        "fig7" => {
            let mut s = bell_spec(
                id,
                ScenarioKind::Decohered,
                SweepVariable::DeltaT,
                Grid::range(0.0, 2.0, 101),
                BellConfig::symmetric(
                    [0.0, FRAC_PI_4, 7.0 * FRAC_PI_8, FRAC_PI_8],
                    FuzzinessModel::timing(0.0),
                    1.0,
                ),
            );
            s.noise = Some(NoiseSpec {
                gamma: 1.0,
                noisy_sides: vec![Side::A],
            });
            s.notes
                .push("timing fuzziness on both sides, telegraph noise on side a only (same setup as fig5/fig6)".into());
            s
        }
        "smallangle" => bell_spec(
            id,
            ScenarioKind::Bell,
            SweepVariable::Lambda,
            Grid::list(vec![0.01, 0.02, 0.05, 0.1]),
            BellConfig::symmetric([0.0, 0.01, 0.0, 0.01], FuzzinessModel::frequency(1.0), 1.0),
        ),
        "eq9-pathology" => {
            let mut bell = BellConfig::symmetric([0.0, 2.0 * PI, 0.0, 2.0 * PI], FuzzinessModel::frequency(0.0), 1.0);
            bell.variant = BellVariant::PerTerm;
            bell.per_term_overrides = Some([0.0; 8]);
            let mut s = bell_spec(id, ScenarioKind::PerTerm, SweepVariable::DeltaW, Grid::range(0.0, 4.0, 41), bell);
            s.notes = vec![
                "the swept delta_w is the sigma of both sides of the fourth term; terms 1-3 stay sharp".into(),
                "a vanishing fourth-term frequency is represented by a sigma large enough to damp it below 1e-12".into(),
            ];
            s
        }
        "stepscaling" => {
            let mut bell = BellConfig::symmetric(fig1_angles, FuzzinessModel::frequency(0.5), fig1_w0);
            bell.steps_a = 1;
            bell.steps_b = 1;
            bell_spec(id, ScenarioKind::Bell, SweepVariable::Steps, Grid::list(vec![1.0, 2.0, 5.0, 10.0]), bell)
        }
        other => {
            let known: Vec<&str> = SCENARIOS.iter().map(|s| s.id).collect();
            return Err(Error::Usage(format!(
                "unknown scenario '{other}' (known: {})",
                known.join(", ")
            )));
        }
    };
    Ok(spec)
}
