//! Self-checks behind `swarmbeam verify`.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use swarmbeam_core::combiner::{matched_similarity, oracle, raw_power};
use swarmbeam_core::{
    half_power_width, run_sweep, srrc_taps, variance_check, CombinedPulse, Estimator,
    ExperimentConfig, PointingAngle, SampledPulse, SwarmConfig, SweepResult,
};

use crate::preset::{PresetId, DEFAULT_SEED};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }

    fn from_result(name: impl Into<String>, r: anyhow::Result<(bool, String)>) -> Self {
        match r {
            Ok((pass, detail)) => Self::new(name, pass, detail),
            Err(e) => Self::new(name, false, format!("error: {e:#}")),
        }
    }
}

/// Sizes used by one verification pass.
#[derive(Debug, Clone, Copy)]
struct Budget {
    oracle_pulses: usize,
    variance_samples: usize,
    realizations: usize,
}

const QUICK: Budget = Budget {
    oracle_pulses: 20,
    variance_samples: 100_000,
    realizations: 40,
};

const FULL: Budget = Budget {
    oracle_pulses: 100,
    variance_samples: 1_000_000,
    realizations: 200,
};

fn random_pulse(rng: &mut ChaCha20Rng, len: usize) -> (CombinedPulse, SampledPulse) {
    let draw = |rng: &mut ChaCha20Rng| -> Vec<Complex64> {
        (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    };
    let center_index = len / 2;
    let g = CombinedPulse {
        samples: draw(rng),
        sample_rate: 1.0,
        center_index,
    };
    let ideal = SampledPulse {
        samples: draw(rng),
        sample_rate: 1.0,
        center_index,
    };
    (g, ideal)
}

/// Largest relative gap between the fast estimators and the dense oracle.
pub fn oracle_max_relative_error(pulses: usize, seed: u64) -> anyhow::Result<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..pulses {
        let len = [32, 64, 128][i % 3];
        let (g, ideal) = random_pulse(&mut rng, len);
        let prr = raw_power(&g);
        let prr_ref = oracle::dense_oracle_prr(&g)?;
        worst = worst.max((prr - prr_ref).abs() / prr_ref.abs());
        let pvr = matched_similarity(&g, &ideal)?;
        let pvr_ref = oracle::dense_oracle_pvr(&g, &ideal)?.conj();
        worst = worst.max((pvr - pvr_ref).norm() / pvr_ref.norm());
    }
    Ok(worst)
}

/// Experiment for `preset` with a reduced realization count.
fn scaled(preset: PresetId, realizations: usize) -> ExperimentConfig {
    ExperimentConfig {
        realizations,
        ..preset.experiment(DEFAULT_SEED)
    }
}

fn mean_over(result: &SweepResult, lo_deg: f64, hi_deg: f64) -> Vec<f64> {
    result
        .points
        .iter()
        .filter(|p| (lo_deg..=hi_deg).contains(&p.theta.to_degrees()))
        .map(|p| p.prr.mean)
        .collect()
}

fn boresight(preset: PresetId, realizations: usize) -> anyhow::Result<(bool, String)> {
    let cfg = ExperimentConfig {
        theta_grid: vec![0.0],
        ..scaled(preset, realizations)
    };
    let n2 = (cfg.swarm.node_count * cfg.swarm.node_count) as f64;
    let res = run_sweep(&cfg)?;
    let p = &res.points[0];
    let worst_rel = [p.real_pulse_gain.mean, p.prr.mean, p.pvr_abs_sq.mean]
        .iter()
        .map(|m| (m - n2).abs() / n2)
        .fold(0.0, f64::max);
    let worst_std = [p.real_pulse_gain.std, p.prr.std, p.pvr_abs_sq.std]
        .iter()
        .fold(0.0f64, |a, s| a.max(s.abs()));
    Ok((
        worst_rel <= 1e-6 && worst_std <= 1e-9,
        format!("N²={n2}, max rel err {worst_rel:.1e}, max std {worst_std:.1e}"),
    ))
}

fn srrc_shape() -> anyhow::Result<(bool, String)> {
    let taps = srrc_taps(&PresetId::Fig3.experiment(DEFAULT_SEED).pulse)?;
    let n = taps.len();
    let asym = (0..n)
        .map(|i| (taps.samples[i] - taps.samples[n - 1 - i]).norm())
        .fold(0.0, f64::max);
    let energy = taps.energy();
    Ok((
        (energy - 1.0).abs() < 1e-12 && asym < 1e-15,
        format!("energy {energy:.15}, asymmetry {asym:.1e}"),
    ))
}

fn floor(presets: &[(PresetId, &SweepResult)]) -> anyhow::Result<(bool, String)> {
    let mut pass = true;
    let mut detail = String::new();
    for (id, res) in presets {
        let n = res.config.swarm.node_count as f64;
        let v = mean_over(res, 1.5, 2.0);
        let m = v.iter().sum::<f64>() / v.len() as f64;
        pass &= !v.is_empty() && (0.75 * n..=1.25 * n).contains(&m);
        let _ = write!(detail, "{id} {m:.2} (N={n}) ");
    }
    Ok((pass, detail.trim_end().to_string()))
}

fn width_ratio(narrow: &SweepResult, wide: &SweepResult) -> anyhow::Result<(bool, String)> {
    let a = half_power_width(narrow, Estimator::RawPower)?;
    let b = half_power_width(wide, Estimator::RawPower)?;
    let r = a / b;
    Ok((
        a < b && (0.35..=0.7).contains(&r),
        format!("{:.4e}° / {:.4e}° = {r:.3}", a.to_degrees(), b.to_degrees()),
    ))
}

fn saturation(res: &SweepResult) -> anyhow::Result<(bool, String)> {
    let n = res.config.swarm.node_count as f64;
    let at_half = res
        .points
        .iter()
        .find(|p| p.theta.to_degrees() >= 0.5)
        .map(|p| p.prr.mean)
        .ok_or_else(|| anyhow::anyhow!("grid does not reach 0.5°"))?;
    let band = mean_over(res, 1.0, 2.0);
    let hi = band.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = band.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((
        at_half < 0.25 * n * n && hi < 2.0 * lo,
        format!("P_rr(0.5°) {at_half:.2}, max/min over [1°, 2°] {:.3}", hi / lo),
    ))
}

/// Runs every check. `quick` trims sample counts and skips the width checks,
/// which need full preset sweeps.
pub fn run_checks(quick: bool) -> Vec<Check> {
    let budget = if quick { QUICK } else { FULL };
    let mut checks = Vec::new();

    checks.push(Check::from_result(
        "oracle equivalence",
        oracle_max_relative_error(budget.oracle_pulses, 0x5eed).map(|e| {
            (
                e <= 1e-10,
                format!("{} pulses, max rel err {e:.1e}", budget.oracle_pulses),
            )
        }),
    ));

    for (theta, phi) in [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (60.0, 0.0), (1.0, 30.0)] {
        let swarm = SwarmConfig::gaussian(1, 500.0, DEFAULT_SEED);
        let r = variance_check(
            &swarm,
            PointingAngle::from_degrees(theta, phi),
            budget.variance_samples,
        )
        .map(|v| {
            (
                v.relative_error <= 0.01,
                format!(
                    "empirical {:.4} m, analytic {:.4} m, rel err {:.2e}",
                    v.empirical_std, v.analytic_std, v.relative_error
                ),
            )
        })
        .map_err(Into::into);
        checks.push(Check::from_result(
            format!("variance θ={theta}° φ={phi}°"),
            r,
        ));
    }

    checks.push(Check::from_result("SRRC unit energy, symmetry", srrc_shape()));

    for id in [PresetId::Fig3, PresetId::Fig4] {
        checks.push(Check::from_result(
            format!("boresight N² ({id})"),
            boresight(id, budget.realizations),
        ));
    }

    let ids: &[PresetId] = if quick {
        &[PresetId::Fig3, PresetId::Fig4]
    } else {
        &[PresetId::Fig3, PresetId::Fig4, PresetId::Fig5, PresetId::Fig6, PresetId::Fig7]
    };
    let sweeps: anyhow::Result<Vec<(PresetId, SweepResult)>> = ids
        .iter()
        .map(|&id| Ok((id, run_sweep(&scaled(id, budget.realizations))?)))
        .collect();
    let sweeps = match sweeps {
        Ok(s) => s,
        Err(e) => {
            checks.push(Check::new("preset sweeps", false, format!("error: {e:#}")));
            return checks;
        }
    };
    let get = |id: PresetId| &sweeps.iter().find(|(p, _)| *p == id).expect("swept").1;

    checks.push(Check::from_result(
        "out-of-beam floor ≈ N",
        floor(&[(PresetId::Fig3, get(PresetId::Fig3)), (PresetId::Fig4, get(PresetId::Fig4))]),
    ));
    checks.push(Check::from_result("saturation (fig3)", saturation(get(PresetId::Fig3))));

    if !quick {
        checks.push(Check::from_result(
            "beamwidth vs spread, N=8",
            width_ratio(get(PresetId::Fig5), get(PresetId::Fig3)),
        ));
        checks.push(Check::from_result(
            "beamwidth vs spread, N=16",
            width_ratio(get(PresetId::Fig6), get(PresetId::Fig4)),
        ));
        let r = (|| -> anyhow::Result<(bool, String)> {
            let narrow = half_power_width(get(PresetId::Fig4), Estimator::MatchedSimilarity)?;
            let wide = half_power_width(get(PresetId::Fig7), Estimator::MatchedSimilarity)?;
            Ok((
                wide > narrow,
                format!(
                    "50 MHz {:.6e}° vs 500 MHz {:.6e}°",
                    wide.to_degrees(),
                    narrow.to_degrees()
                ),
            ))
        })();
        checks.push(Check::from_result("bandwidth selectivity", r));
    }
    checks
}

pub fn render_table(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        let pad = width - c.name.chars().count();
        let _ = writeln!(
            out,
            "{}  {}{}  {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            " ".repeat(pad),
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(out, "{} checks, {failed} failed", checks.len());
    out
}
