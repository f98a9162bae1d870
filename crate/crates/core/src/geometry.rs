//! Swarm geometry: random node positions, pointing rotations and the per-node
//! residual delays they induce.
//!
//! Conventions:
//!
//! * The reference pointing direction is `u_y = (0, 1, 0)`, toward the Earth's center.
//! * `position_stddev` is the standard deviation of **each Cartesian component**
//!   of a node position, not of its radius.
//! * A node at `p` aimed at `steer` and observed from `observe` is received with
//!   residual delay `δ = ⟨p, u_observe − u_steer⟩ / c` and carrier phase
//!   `ψ = 2π f δ`. This is the negative of the range difference `Δ/c` measured
//!   from the tilted plane; positions are zero-mean and symmetric so every
//!   statistic is unchanged.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::rng::rng_from_seed;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PositionDistribution {
    /// Unbounded iid zero-mean Gaussian components.
    Gaussian,
    /// Gaussian components, rejection-resampled until `‖p‖ ≤ bound_radius` (meters).
    TruncatedGaussian { bound_radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    pub node_count: usize,
    /// Per-component standard deviation of node positions, meters.
    pub position_stddev: f64,
    pub distribution: PositionDistribution,
    pub seed: u64,
}

impl SwarmConfig {
    pub fn gaussian(node_count: usize, position_stddev: f64, seed: u64) -> Self {
        Self {
            node_count,
            position_stddev,
            distribution: PositionDistribution::Gaussian,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count == 0 {
            return Err(invalid("node_count", "must be at least 1"));
        }
        if !(self.position_stddev.is_finite() && self.position_stddev > 0.0) {
            return Err(invalid(
                "position_stddev",
                format!("must be finite and > 0 (got {})", self.position_stddev),
            ));
        }
        if let PositionDistribution::TruncatedGaussian { bound_radius } = self.distribution {
            if !(bound_radius.is_finite() && bound_radius > 0.0) {
                return Err(invalid(
                    "bound_radius",
                    format!("must be finite and > 0 (got {bound_radius})"),
                ));
            }
        }
        Ok(())
    }
}

/// One sampled realization of the swarm, positions in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePositions {
    pub positions: Vec<Vector3<f64>>,
}

impl NodePositions {
    pub fn new(positions: Vec<Vector3<f64>>) -> Self {
        Self { positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Rotation angles of the pointing direction, radians.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PointingAngle {
    pub theta: f64,
    pub phi: f64,
}

impl PointingAngle {
    pub const BORESIGHT: PointingAngle = PointingAngle { theta: 0.0, phi: 0.0 };

    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn from_degrees(theta_deg: f64, phi_deg: f64) -> Self {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite() && self.phi.is_finite()
    }

    /// Same direction with both angles wrapped into `[-π, π]`.
    pub fn canonical(&self) -> Self {
        fn wrap(a: f64) -> f64 {
            if (-PI..=PI).contains(&a) {
                a
            } else {
                let w = (a + PI).rem_euclid(2.0 * PI) - PI;
                if w == -PI && a > 0.0 {
                    PI
                } else {
                    w
                }
            }
        }
        Self::new(wrap(self.theta), wrap(self.phi))
    }
}

/// Draws the node positions of one realization. Pure function of `config`.
pub fn sample_positions(config: &SwarmConfig) -> Result<NodePositions> {
    config.validate()?;
    let mut rng = rng_from_seed(config.seed);
    let sigma = config.position_stddev;
    let mut draw = || {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        Vector3::new(x, y, z) * sigma
    };
    let positions = match config.distribution {
        PositionDistribution::Gaussian => (0..config.node_count).map(|_| draw()).collect(),
        PositionDistribution::TruncatedGaussian { bound_radius } => (0..config.node_count)
            .map(|_| loop {
                let p = draw();
                if p.norm() <= bound_radius {
                    break p;
                }
            })
            .collect(),
    };
    Ok(NodePositions { positions })
}

/// The rotation `Υ(θ, φ)` taking the reference direction `u_y` to the pointing direction.
#[rustfmt::skip]
pub fn rotation_matrix(angle: PointingAngle) -> Matrix3<f64> {
    let (st, ct) = angle.theta.sin_cos();
    let (sp, cp) = angle.phi.sin_cos();
    Matrix3::new(
        ct,  -cp * st,  sp * st,
        st,   cp * ct, -ct * sp,
        0.0,  sp,       cp,
    )
}

/// `Υ u_y = (−cos φ sin θ, cos φ cos θ, sin φ)`.
pub fn pointing_vector(angle: PointingAngle) -> Vector3<f64> {
    let (st, ct) = angle.theta.sin_cos();
    let (sp, cp) = angle.phi.sin_cos();
    Vector3::new(-cp * st, cp * ct, sp)
}

/// Distance from `position` to the plane at distance `d` from the origin whose
/// normal is the pointing direction.
pub fn plane_distance(position: &Vector3<f64>, d: f64, angle: PointingAngle) -> f64 {
    d - position.dot(&pointing_vector(angle))
}

/// Residual delays and carrier phases of the swarm aimed at `steer` as seen from `observe`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayProfile {
    delays: Vec<f64>,
    phases: Vec<f64>,
    carrier_frequency: f64,
}

impl DelayProfile {
    /// Builds a profile from residual delays in seconds; phases are derived as `2π f δ`.
    pub fn from_delays(delays: Vec<f64>, carrier_frequency: f64) -> Self {
        let phases = delays
            .iter()
            .map(|&d| 2.0 * PI * carrier_frequency * d)
            .collect();
        Self {
            delays,
            phases,
            carrier_frequency,
        }
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.carrier_frequency
    }

    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }

    /// Largest `|δ_n|`, seconds. NaN if any delay is NaN.
    pub fn max_abs_delay(&self) -> f64 {
        self.delays.iter().fold(0.0, |m: f64, d| {
            if d.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.max(d.abs())
            }
        })
    }
}

pub fn delay_profile(
    positions: &NodePositions,
    steer: PointingAngle,
    observe: PointingAngle,
    carrier: f64,
) -> DelayProfile {
    let diff = pointing_vector(observe) - pointing_vector(steer);
    let delays = positions
        .positions
        .iter()
        .map(|p| p.dot(&diff) / SPEED_OF_LIGHT)
        .collect();
    DelayProfile::from_delays(delays, carrier)
}

/// Standard deviation of the path-length difference between boresight and
/// `angle`, meters: `σ_p · sqrt(2 (1 − cos φ cos θ))`.
pub fn analytic_delay_std(angle: PointingAngle, position_stddev: f64) -> f64 {
    // 1 − cos φ cos θ = 2 sin²(φ/2) + 2 cos φ sin²(θ/2), without the cancellation near boresight.
    let half_t = (0.5 * angle.theta).sin();
    let half_p = (0.5 * angle.phi).sin();
    let one_minus = 2.0 * half_p * half_p + 2.0 * angle.phi.cos() * half_t * half_t;
    position_stddev * (2.0 * one_minus).sqrt()
}
