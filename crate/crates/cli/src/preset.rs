//! The six built-in gain-curve setups.

use std::fmt;
use std::str::FromStr;

use swarmbeam_core::ExperimentConfig;

use crate::config::FileConfig;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PresetId {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

/// Parameters that differ between presets. Roll-off 0.2, oversampling 4,
/// 41 taps, 20 GHz carrier and 200 realizations are shared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetParams {
    pub baud_rate_hz: f64,
    pub node_count: usize,
    pub position_stddev_m: f64,
}

impl PresetId {
    pub const ALL: [PresetId; 6] = [
        PresetId::Fig3,
        PresetId::Fig4,
        PresetId::Fig5,
        PresetId::Fig6,
        PresetId::Fig7,
        PresetId::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetId::Fig3 => "fig3",
            PresetId::Fig4 => "fig4",
            PresetId::Fig5 => "fig5",
            PresetId::Fig6 => "fig6",
            PresetId::Fig7 => "fig7",
            PresetId::Fig8 => "fig8",
        }
    }

    pub fn params(self) -> PresetParams {
        let (baud_rate_hz, node_count, position_stddev_m) = match self {
            PresetId::Fig3 => (500e6, 8, 500.0),
            PresetId::Fig4 => (500e6, 16, 500.0),
            PresetId::Fig5 => (500e6, 8, 1000.0),
            PresetId::Fig6 => (500e6, 16, 1000.0),
            PresetId::Fig7 => (50e6, 16, 500.0),
            PresetId::Fig8 => (500e6, 256, 500.0),
        };
        PresetParams {
            baud_rate_hz,
            node_count,
            position_stddev_m,
        }
    }

    pub fn file_config(self, seed: u64) -> FileConfig {
        let p = self.params();
        let mut cfg = FileConfig {
            name: Some(self.name().to_string()),
            ..FileConfig::default()
        };
        cfg.swarm.node_count = p.node_count as i64;
        cfg.swarm.position_stddev_m = p.position_stddev_m;
        cfg.pulse.baud_rate_hz = p.baud_rate_hz;
        cfg.sweep.master_seed = seed;
        cfg
    }

    pub fn experiment(self, seed: u64) -> ExperimentConfig {
        self.file_config(seed)
            .resolve()
            .expect("preset parameters are valid")
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PresetId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset `{s}` (expected one of fig3..fig8)"))
    }
}
