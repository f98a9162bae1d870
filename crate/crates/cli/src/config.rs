//! Experiment config files.
//!
//! A config is a TOML document with three tables; every key is optional and
//! defaults to the 500 MHz / 8 node / 500 m setup:
//!
//! ```toml
//! name = "fig3"                    # output file stem
//!
//! [swarm]
//! node_count = 8
//! position_stddev_m = 500.0        # per Cartesian component
//! distribution = "gaussian"        # or "truncated_gaussian"
//! # bound_radius_m = 1000.0        # required for truncated_gaussian
//!
//! [pulse]
//! baud_rate_hz = 500e6
//! rolloff = 0.2
//! oversampling = 4
//! tap_count = 41
//! carrier_frequency_hz = 20e9
//!
//! [sweep]
//! realizations = 200
//! master_seed = 1
//! phi_deg = 0.0
//! theta_min_deg = 1e-5             # smallest nonzero angle of the log grid
//! theta_max_deg = 2.0
//! theta_points = 201               # including θ = 0
//! # theta_deg = [0.0, 0.5, 1.0]    # explicit grid, overrides the three keys above
//! ```

use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use swarmbeam_core::experiment::log_theta_grid;
use swarmbeam_core::{Error, ExperimentConfig, PositionDistribution, PulseSpec, SwarmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Gaussian,
    TruncatedGaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwarmSection {
    pub node_count: i64,
    pub position_stddev_m: f64,
    pub distribution: DistributionKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_radius_m: Option<f64>,
}

impl Default for SwarmSection {
    fn default() -> Self {
        Self {
            node_count: 8,
            position_stddev_m: 500.0,
            distribution: DistributionKind::Gaussian,
            bound_radius_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseSection {
    pub baud_rate_hz: f64,
    pub rolloff: f64,
    pub oversampling: i64,
    pub tap_count: i64,
    pub carrier_frequency_hz: f64,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            baud_rate_hz: 500e6,
            rolloff: 0.2,
            oversampling: 4,
            tap_count: 41,
            carrier_frequency_hz: 20e9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub realizations: i64,
    pub master_seed: u64,
    pub phi_deg: f64,
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub theta_points: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_deg: Option<Vec<f64>>,
}

impl Default for SweepSection {
    fn default() -> Self {
        use swarmbeam_core::experiment::{
            DEFAULT_THETA_MAX_DEG, DEFAULT_THETA_MIN_DEG, DEFAULT_THETA_POINTS,
        };
        Self {
            realizations: 200,
            master_seed: 1,
            phi_deg: 0.0,
            theta_min_deg: DEFAULT_THETA_MIN_DEG,
            theta_max_deg: DEFAULT_THETA_MAX_DEG,
            theta_points: DEFAULT_THETA_POINTS as i64,
            theta_deg: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub swarm: SwarmSection,
    pub pulse: PulseSection,
    pub sweep: SweepSection,
}

/// Config key for a core validation field.
fn key_for(field: &str) -> &'static str {
    match field {
        "node_count" => "swarm.node_count",
        "position_stddev" => "swarm.position_stddev_m",
        "bound_radius" => "swarm.bound_radius_m",
        "baud_rate" => "pulse.baud_rate_hz",
        "rolloff" => "pulse.rolloff",
        "oversampling" => "pulse.oversampling",
        "tap_count" => "pulse.tap_count",
        "carrier_frequency" => "pulse.carrier_frequency_hz",
        "theta_grid" => "sweep.theta_deg",
        "phi" => "sweep.phi_deg",
        "realizations" => "sweep.realizations",
        _ => "config",
    }
}

fn positive_count(key: &str, v: i64) -> anyhow::Result<usize> {
    if v < 1 {
        bail!("invalid config field `{key}`: must be at least 1 (got {v})");
    }
    Ok(v as usize)
}

impl FileConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::from_toml(&text)
            .with_context(|| format!("malformed config file {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    fn theta_grid(&self) -> anyhow::Result<Vec<f64>> {
        let s = &self.sweep;
        if let Some(list) = &s.theta_deg {
            return Ok(list.iter().map(|d| d.to_radians()).collect());
        }
        let points = positive_count("sweep.theta_points", s.theta_points)?;
        if !(s.theta_min_deg.is_finite() && s.theta_min_deg > 0.0) {
            bail!(
                "invalid config field `sweep.theta_min_deg`: must be finite and > 0 (got {})",
                s.theta_min_deg
            );
        }
        if !(s.theta_max_deg.is_finite() && s.theta_max_deg > s.theta_min_deg) {
            bail!(
                "invalid config field `sweep.theta_max_deg`: must be finite and > theta_min_deg (got {})",
                s.theta_max_deg
            );
        }
        Ok(log_theta_grid(s.theta_min_deg, s.theta_max_deg, points))
    }

    /// Validates every field and builds the experiment. Errors name the offending key.
    pub fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let sw = &self.swarm;
        let distribution = match (sw.distribution, sw.bound_radius_m) {
            (DistributionKind::Gaussian, _) => PositionDistribution::Gaussian,
            (DistributionKind::TruncatedGaussian, Some(bound_radius)) => {
                PositionDistribution::TruncatedGaussian { bound_radius }
            }
            (DistributionKind::TruncatedGaussian, None) => bail!(
                "invalid config field `swarm.bound_radius_m`: required when distribution = \"truncated_gaussian\""
            ),
        };
        let p = &self.pulse;
        let config = ExperimentConfig {
            swarm: SwarmConfig {
                node_count: positive_count("swarm.node_count", sw.node_count)?,
                position_stddev: sw.position_stddev_m,
                distribution,
                seed: self.sweep.master_seed,
            },
            pulse: PulseSpec {
                baud_rate: p.baud_rate_hz,
                rolloff: p.rolloff,
                oversampling: positive_count("pulse.oversampling", p.oversampling)?,
                tap_count: positive_count("pulse.tap_count", p.tap_count)?,
                carrier_frequency: p.carrier_frequency_hz,
            },
            theta_grid: self.theta_grid()?,
            phi: self.sweep.phi_deg.to_radians(),
            realizations: positive_count("sweep.realizations", self.sweep.realizations)?,
            master_seed: self.sweep.master_seed,
        };
        match config.validate() {
            Ok(()) => Ok(config),
            Err(Error::InvalidConfig { field, reason }) => {
                bail!("invalid config field `{}`: {reason}", key_for(field))
            }
            Err(e) => Err(e.into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_table_defaults() {
        let cfg = FileConfig::from_toml("").unwrap();
        let exp = cfg.resolve().unwrap();
        assert_eq!(exp.swarm.node_count, 8);
        assert_eq!(exp.swarm.position_stddev, 500.0);
        assert_eq!(exp.pulse.tap_count, 41);
        assert_eq!(exp.theta_grid, swarmbeam_core::default_theta_grid());
        assert_eq!(exp.realizations, 200);
    }

    #[test]
    fn integers_are_accepted_for_floats() {
        let cfg = FileConfig::from_toml("[swarm]\nposition_stddev_m = 1000\n").unwrap();
        assert_eq!(cfg.swarm.position_stddev_m, 1000.0);
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = FileConfig {
            name: Some("x".into()),
            ..FileConfig::default()
        };
        cfg.sweep.theta_deg = Some(vec![0.0, 0.25, 1.0]);
        cfg.swarm.distribution = DistributionKind::TruncatedGaussian;
        cfg.swarm.bound_radius_m = Some(1000.0);
        assert_eq!(FileConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            ("[swarm]\nposition_stddev_m = -500.0\n", "swarm.position_stddev_m"),
            ("[swarm]\nnode_count = 0\n", "swarm.node_count"),
            ("[swarm]\ndistribution = \"truncated_gaussian\"\n", "swarm.bound_radius_m"),
            ("[pulse]\ntap_count = 40\n", "pulse.tap_count"),
            ("[pulse]\nrolloff = 1.5\n", "pulse.rolloff"),
            ("[sweep]\nrealizations = -3\n", "sweep.realizations"),
            ("[sweep]\ntheta_deg = [0.0, 1.0, 0.5]\n", "sweep.theta_deg"),
            ("[sweep]\ntheta_min_deg = 0.0\n", "sweep.theta_min_deg"),
        ];
        for (text, key) in cases {
            let err = FileConfig::from_toml(text).unwrap().resolve().unwrap_err();
            assert!(err.to_string().contains(key), "{text}: {err}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(FileConfig::from_toml("[swarm]\nnode_cuont = 3\n").is_err());
    }
}
