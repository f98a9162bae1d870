//! Monte-Carlo sweeps over the pointing angle.
//!
//! Realization `r` draws its swarm with seed [`sub_seed`]`(master_seed, r)` and
//! is evaluated independently of every other realization. Statistics are
//! reduced afterwards in realization order, so a sweep is bit-identical for any
//! number of worker threads.

use std::fmt::Write as _;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::combiner::{Combiner, GainSample};
use crate::error::{invalid, Error, Result};
use crate::geometry::{
    analytic_delay_std, delay_profile, sample_positions, PointingAngle, SwarmConfig,
    SPEED_OF_LIGHT,
};
use crate::pulse::PulseSpec;
use crate::rng::sub_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Swarm description. Its `seed` is ignored by sweeps; each realization
    /// uses a sub-seed of `master_seed`.
    pub swarm: SwarmConfig,
    pub pulse: PulseSpec,
    /// Observation angles θ, radians, strictly increasing.
    pub theta_grid: Vec<f64>,
    pub phi: f64,
    pub realizations: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.swarm.validate()?;
        self.pulse.validate()?;
        if self.theta_grid.is_empty() {
            return Err(invalid("theta_grid", "must not be empty"));
        }
        if self.theta_grid.iter().any(|t| !t.is_finite()) {
            return Err(invalid("theta_grid", "angles must be finite"));
        }
        if self.theta_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("theta_grid", "must be strictly increasing"));
        }
        if !self.phi.is_finite() {
            return Err(invalid("phi", "must be finite"));
        }
        if self.realizations == 0 {
            return Err(invalid("realizations", "must be at least 1"));
        }
        Ok(())
    }

    /// Canonical text of every parameter that affects the result.
    pub fn canonical_text(&self) -> String {
        let mut s = String::new();
        let sw = &self.swarm;
        let _ = writeln!(s, "node_count={}", sw.node_count);
        let _ = writeln!(s, "position_stddev={:e}", sw.position_stddev);
        let _ = writeln!(s, "distribution={:?}", sw.distribution);
        let p = &self.pulse;
        let _ = writeln!(s, "baud_rate={:e}", p.baud_rate);
        let _ = writeln!(s, "rolloff={:e}", p.rolloff);
        let _ = writeln!(s, "oversampling={}", p.oversampling);
        let _ = writeln!(s, "tap_count={}", p.tap_count);
        let _ = writeln!(s, "carrier_frequency={:e}", p.carrier_frequency);
        let _ = writeln!(s, "phi={:e}", self.phi);
        let _ = writeln!(s, "realizations={}", self.realizations);
        let _ = writeln!(s, "master_seed={}", self.master_seed);
        let grid: Vec<String> = self.theta_grid.iter().map(|t| format!("{t:e}")).collect();
        let _ = writeln!(s, "theta_grid={}", grid.join(","));
        s
    }
}

/// Smallest nonzero angle of [`default_theta_grid`], degrees.
pub const DEFAULT_THETA_MIN_DEG: f64 = 1e-5;
pub const DEFAULT_THETA_MAX_DEG: f64 = 2.0;
pub const DEFAULT_THETA_POINTS: usize = 201;

/// `0` followed by `points − 1` log-spaced angles from `min_deg` to `max_deg`, in radians.
pub fn log_theta_grid(min_deg: f64, max_deg: f64, points: usize) -> Vec<f64> {
    let mut grid = vec![0.0];
    let n = points.saturating_sub(1);
    if n == 1 {
        grid.push(max_deg.to_radians());
    } else if n > 1 {
        let (lo, hi) = (min_deg.ln(), max_deg.ln());
        grid.extend((0..n).map(|i| {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            x.exp().to_radians()
        }));
    }
    grid
}

/// 201 points: zero plus 200 log-spaced angles over `[1e-5°, 2°]`.
pub fn default_theta_grid() -> Vec<f64> {
    log_theta_grid(DEFAULT_THETA_MIN_DEG, DEFAULT_THETA_MAX_DEG, DEFAULT_THETA_POINTS)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Stats {
    pub mean: f64,
    /// Sample standard deviation (`R − 1` denominator); zero when `R = 1`.
    pub std: f64,
}

impl Stats {
    fn from_values(values: impl Iterator<Item = f64> + Clone) -> Self {
        let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
        let mean = sum / n as f64;
        let std = if n > 1 {
            let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stats { mean, std }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleStats {
    /// radians
    pub theta: f64,
    pub real_pulse_gain: Stats,
    pub prr: Stats,
    pub pvr_abs_sq: Stats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    RealPulseGain,
    RawPower,
    MatchedSimilarity,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::RealPulseGain => "real-valued pulse gain",
            Estimator::RawPower => "P_rr",
            Estimator::MatchedSimilarity => "|P_vr|^2",
        }
    }

    pub fn select(self, a: &AngleStats) -> &Stats {
        match self {
            Estimator::RealPulseGain => &a.real_pulse_gain,
            Estimator::RawPower => &a.prr,
            Estimator::MatchedSimilarity => &a.pvr_abs_sq,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub points: Vec<AngleStats>,
    /// SHA-256 over the canonical config text and the bit patterns of every statistic.
    pub content_hash: String,
}

impl SweepResult {
    pub fn new(config: ExperimentConfig, points: Vec<AngleStats>) -> Self {
        let mut hasher = Sha256::new();
        let text = config.canonical_text();
        hasher.update(format!("sweep {}\0", text.len()).as_bytes());
        hasher.update(text.as_bytes());
        for p in &points {
            for v in [
                p.theta,
                p.real_pulse_gain.mean,
                p.real_pulse_gain.std,
                p.prr.mean,
                p.prr.std,
                p.pvr_abs_sq.mean,
                p.pvr_abs_sq.std,
            ] {
                hasher.update(v.to_bits().to_le_bytes());
            }
        }
        let content_hash = hasher
            .finalize()
            .iter()
            .fold(String::with_capacity(64), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            });
        Self {
            config,
            points,
            content_hash,
        }
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.theta)
    }

    pub fn means(&self, estimator: Estimator) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(move |p| estimator.select(p).mean)
    }
}

fn run_realization(
    config: &ExperimentConfig,
    combiner: &Combiner,
    index: usize,
) -> Result<Vec<GainSample>> {
    let swarm = SwarmConfig {
        seed: sub_seed(config.master_seed, index as u64),
        ..config.swarm.clone()
    };
    let positions = sample_positions(&swarm)?;
    let steer = PointingAngle::new(0.0, config.phi);
    config
        .theta_grid
        .iter()
        .map(|&theta| {
            let observe = PointingAngle::new(theta, config.phi);
            let profile =
                delay_profile(&positions, steer, observe, config.pulse.carrier_frequency);
            combiner.evaluate(&profile)
        })
        .collect()
}

fn aggregate(config: ExperimentConfig, runs: Vec<Vec<GainSample>>) -> SweepResult {
    let points = config
        .theta_grid
        .iter()
        .enumerate()
        .map(|(i, &theta)| {
            let col = runs.iter().map(move |r| r[i]);
            AngleStats {
                theta,
                real_pulse_gain: Stats::from_values(col.clone().map(|s| s.real_pulse_gain)),
                prr: Stats::from_values(col.clone().map(|s| s.prr)),
                pvr_abs_sq: Stats::from_values(col.map(|s| s.pvr_abs_sq)),
            }
        })
        .collect();
    SweepResult::new(config, points)
}

/// Runs the sweep on the current rayon pool.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let combiner = Combiner::new(&config.pulse)?;
    let runs = (0..config.realizations)
        .into_par_iter()
        .map(|r| run_realization(config, &combiner, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(config.clone(), runs))
}

/// Runs the sweep on a dedicated pool of `workers` threads. The result does not
/// depend on `workers`.
pub fn run_sweep_with_workers(config: &ExperimentConfig, workers: usize) -> Result<SweepResult> {
    if workers == 0 {
        return Err(invalid("workers", "must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid("workers", e.to_string()))?;
    pool.install(|| run_sweep(config))
}

/// First angle (linearly interpolated) at which the mean of `estimator` falls
/// below half its value at the first grid point, which must be θ = 0.
pub fn half_power_width(result: &SweepResult, estimator: Estimator) -> Result<f64> {
    let first = result
        .points
        .first()
        .ok_or_else(|| invalid("theta_grid", "must not be empty"))?;
    if first.theta != 0.0 {
        return Err(invalid("theta_grid", "must start at 0"));
    }
    let half = 0.5 * estimator.select(first).mean;
    for w in result.points.windows(2) {
        let (m0, m1) = (estimator.select(&w[0]).mean, estimator.select(&w[1]).mean);
        if m1 < half {
            let frac = (m0 - half) / (m0 - m1);
            return Ok(w[0].theta + frac * (w[1].theta - w[0].theta));
        }
    }
    Err(Error::NoHalfPowerCrossing(estimator.name()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceReport {
    /// meters
    pub empirical_std: f64,
    /// meters
    pub analytic_std: f64,
    /// `|empirical − analytic| / analytic`, defined as 0 when both are 0.
    pub relative_error: f64,
}

/// Samples `samples` nodes from `swarm` (its own seed and spread) and compares
/// the spread of their path-length differences toward `angle`, relative to
/// boresight, with [`analytic_delay_std`].
pub fn variance_check(swarm: &SwarmConfig, angle: PointingAngle, samples: usize) -> Result<VarianceReport> {
    if samples < 10_000 {
        return Err(invalid("samples", format!("must be at least 10000 (got {samples})")));
    }
    let cfg = SwarmConfig {
        node_count: samples,
        ..swarm.clone()
    };
    let positions = sample_positions(&cfg)?;
    let profile = delay_profile(&positions, PointingAngle::BORESIGHT, angle, 1.0);
    let paths = profile.delays().iter().map(|d| d * SPEED_OF_LIGHT);
    let empirical_std = Stats::from_values(paths).std;
    let analytic_std = analytic_delay_std(angle, swarm.position_stddev);
    let relative_error = if analytic_std == 0.0 {
        if empirical_std == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (empirical_std - analytic_std).abs() / analytic_std
    };
    Ok(VarianceReport {
        empirical_std,
        analytic_std,
        relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small_config(n: usize, sigma: f64, grid: Vec<f64>, r: usize) -> ExperimentConfig {
        ExperimentConfig {
            swarm: SwarmConfig::gaussian(n, sigma, 0),
            pulse: PulseSpec {
                baud_rate: 500e6,
                rolloff: 0.2,
                oversampling: 4,
                tap_count: 41,
                carrier_frequency: 20e9,
            },
            theta_grid: grid,
            phi: 0.0,
            realizations: r,
            master_seed: 7,
        }
    }

    #[test]
    fn default_grid_shape() {
        let g = default_theta_grid();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert_abs_diff_eq!(g[1], 1e-5f64.to_radians(), epsilon = 1e-18);
        assert_abs_diff_eq!(g[200], 2f64.to_radians(), epsilon = 1e-15);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn validation_names_fields() {
        let mut cfg = small_config(8, 500.0, vec![0.0, 0.1], 2);
        cfg.theta_grid = vec![0.0, 0.0];
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig { field: "theta_grid", .. })));
        cfg.theta_grid = vec![];
        assert!(cfg.validate().is_err());
        cfg.theta_grid = vec![0.0];
        cfg.realizations = 0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig { field: "realizations", .. })));
    }

    #[test]
    fn boresight_statistics() {
        let cfg = small_config(8, 500.0, vec![0.0], 200);
        let res = run_sweep(&cfg).unwrap();
        let p = &res.points[0];
        for s in [p.real_pulse_gain, p.prr, p.pvr_abs_sq] {
            assert_abs_diff_eq!(s.mean, 64.0, epsilon = 1e-9);
            assert_abs_diff_eq!(s.std, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn off_axis_power_falls_to_node_count() {
        let cfg = small_config(16, 500.0, vec![0.0, 2f64.to_radians()], 200);
        let res = run_sweep(&cfg).unwrap();
        let m = res.points[1].prr.mean;
        assert!((12.0..=20.0).contains(&m), "mean P_rr at 2°: {m}");
    }

    #[test]
    fn single_realization_repeats() {
        let cfg = small_config(8, 500.0, vec![0.0, 1e-3, 1e-2], 1);
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.points.iter().all(|p| p.prr.std == 0.0));
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let cfg = small_config(8, 500.0, log_theta_grid(1e-4, 2.0, 15), 24);
        let one = run_sweep_with_workers(&cfg, 1).unwrap();
        let many = run_sweep_with_workers(&cfg, 5).unwrap();
        assert_eq!(one, many);
        assert_eq!(one.content_hash, many.content_hash);
        let other = run_sweep_with_workers(&ExperimentConfig { master_seed: 8, ..cfg }, 2).unwrap();
        assert_ne!(one.content_hash, other.content_hash);
    }

    fn synthetic(grid: &[f64], value: impl Fn(f64) -> f64) -> SweepResult {
        let points = grid
            .iter()
            .map(|&theta| {
                let s = Stats { mean: value(theta), std: 0.0 };
                AngleStats { theta, real_pulse_gain: s, prr: s, pvr_abs_sq: s }
            })
            .collect();
        SweepResult::new(small_config(8, 500.0, grid.to_vec(), 1), points)
    }

    #[test]
    fn half_power_of_step() {
        let grid: Vec<f64> = (0..101).map(|i| i as f64 * 0.01).collect();
        let theta0 = 0.437;
        let res = synthetic(&grid, |t| if t < theta0 { 64.0 } else { 0.0 });
        let w = half_power_width(&res, Estimator::RawPower).unwrap();
        assert!((w - theta0).abs() <= 0.01, "{w}");
    }

    #[test]
    fn half_power_interpolates_linearly() {
        let grid = vec![0.0, 1.0, 2.0, 3.0];
        let res = synthetic(&grid, |t| 100.0 - 30.0 * t);
        // 100 − 30 θ = 50 at θ = 5/3
        let w = half_power_width(&res, Estimator::MatchedSimilarity).unwrap();
        assert_abs_diff_eq!(w, 5.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn half_power_errors() {
        let res = synthetic(&[0.0, 1.0, 2.0], |_| 10.0);
        assert!(matches!(
            half_power_width(&res, Estimator::RealPulseGain),
            Err(Error::NoHalfPowerCrossing(_))
        ));
        let res = synthetic(&[0.5, 1.0], |_| 10.0);
        assert!(half_power_width(&res, Estimator::RawPower).is_err());
    }

    #[test]
    fn variance_check_examples() {
        let swarm = SwarmConfig::gaussian(1, 500.0, 21);
        let r = variance_check(&swarm, PointingAngle::BORESIGHT, 10_000).unwrap();
        assert_eq!((r.empirical_std, r.analytic_std, r.relative_error), (0.0, 0.0, 0.0));
        let r = variance_check(&swarm, PointingAngle::from_degrees(1.0, 0.0), 1_000_000).unwrap();
        assert_abs_diff_eq!(r.analytic_std, 8.7266, epsilon = 1e-3);
        assert!(r.relative_error < 0.01, "{r:?}");
        let r = variance_check(&swarm, PointingAngle::from_degrees(60.0, 0.0), 1_000_000).unwrap();
        assert_abs_diff_eq!(r.analytic_std, 500.0, epsilon = 1e-9);
        assert!(r.relative_error < 0.01, "{r:?}");
        assert!(variance_check(&swarm, PointingAngle::BORESIGHT, 9_999).is_err());
    }
}
