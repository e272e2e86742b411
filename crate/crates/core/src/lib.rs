//! Bell correlations measured with coarsened (fuzzy) measurement references.
//!
//! A measurement reference is set by rotating the measured observable through
//! an angle `θ = w·t`. When the rotation frequency `w` or the timing `t` is
//! only known up to a Gaussian spread, the reference is smeared and the CHSH
//! correlations are damped. This crate computes those correlations exactly
//! where a closed form exists and by quadrature elsewhere, including
//! random-telegraph-noise dephasing during the rotation, and provides a
//! scenario runner that writes scan data to CSV.
//!
//! Module map:
//! - [`spin`]: 2×2 / 4×4 complex algebra, Pauli operators, the entangled state.
//! - [`coarsening`]: fuzziness models and the angle distributions they induce.
//! - [`quadrature`]: Gauss–Hermite, adaptive Simpson and Monte Carlo.
//! - [`bell`]: coarsened correlations and Bell values in closed form.
//! - [`decoherence`]: telegraph-noise averaged observables and Bell values.
//! - [`scenario`]: presets, sweeps, oracle checks and output files.

pub mod bell;
pub mod coarsening;
pub mod decoherence;
pub mod error;
pub mod quadrature;
pub mod scenario;
pub mod spin;

pub use bell::{bell_derivative_dw, bell_value, bell_value_per_term, coarsened_correlation, BellBreakdown, BellConfig, BellVariant};
pub use coarsening::{
    compose_steps, effective_sigma, gaussian_kernel, joint_angle_density, AngleDistribution, FuzzinessModel,
    JointDensity, MeasurementSetting,
};
pub use decoherence::{decohered_bell, decohered_coarsened_correlation, rtn_averaged_observable, NoiseSpec, Side};
pub use error::{Error, Result};
pub use quadrature::{IntegralResult, QuadratureSpec};
pub use spin::{
    evolve_observable, pair_expectation, pauli, rotated_observable, rotation_unitary, BlochAxis, PauliAxis,
    SquareComplexMatrix, TwoQubitState,
};
