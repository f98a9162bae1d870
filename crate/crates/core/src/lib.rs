//! Wideband distributed beamforming from satellite swarms.
//!
//! The crate models `N` satellites at random 3-D positions that transmit a
//! precompensated square-root raised-cosine pulse toward a ground user. Off the
//! intended direction each node's pulse arrives with a residual delay and a
//! carrier-phase rotation; the combined pulse is evaluated with three
//! estimators:
//!
//! * the gain of the phase-free (real-valued) pulse sum,
//! * the raw power `P_rr`, the per-row energy of the circulant channel matrix,
//! * the matched similarity `P_vr`, the zero-lag correlation with the ideal pulse.
//!
//! [`experiment::run_sweep`] aggregates them over independent swarm
//! realizations on a pointing-angle grid.
//!
//! Modules are layered bottom-up: [`geometry`] → [`pulse`] → [`combiner`] →
//! [`experiment`].

pub mod combiner;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod pulse;
mod rng;

pub use rng::sub_seed;

pub use combiner::{CombinedPulse, Combiner, GainSample};
pub use error::{Error, Result};
pub use experiment::{
    default_theta_grid, half_power_width, run_sweep, run_sweep_with_workers, variance_check,
    AngleStats, Estimator, ExperimentConfig, Stats, SweepResult, VarianceReport,
};
pub use geometry::{
    analytic_delay_std, delay_profile, plane_distance, pointing_vector, rotation_matrix,
    sample_positions, DelayProfile, NodePositions, PointingAngle, PositionDistribution,
    SwarmConfig, SPEED_OF_LIGHT,
};
pub use pulse::{apply_phase, fractional_delay, srrc_taps, PulseSpec, SampledPulse};
