//! Combined swarm pulse and the three gain estimators.
//!
//! The received block is `r = Q v` with `Q` circulant; its first row is the
//! combined pulse `g`. Every row of a circulant matrix carries the same energy,
//! so `(1/L)·trace(Q Qᴴ) = Σ|g_k|²`, and with `Q_i` the circulant matched filter
//! of the ideal pulse `q`, `(1/L)·trace(Q_i Q) = Σ g_k·conj(q_k)`. Both are
//! evaluated from the first row in `O(L)`; [`oracle`] materializes the matrices
//! to check the identities.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::DelayProfile;
use crate::pulse::{accumulate_delayed, srrc_taps, PulseSpec, SampledPulse};

/// Default bound on `max |δ_n|` in samples before a profile is rejected.
pub const DEFAULT_DELAY_CAP_SAMPLES: f64 = 1e4;

/// Zero samples kept on both sides of the delayed support, so nothing wraps
/// around the circulant block.
const GUARD_SAMPLES: usize = 4;

/// First row of the circulant channel matrix. `center_index` marks `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedPulse {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
    pub center_index: usize,
}

impl CombinedPulse {
    pub fn block_len(&self) -> usize {
        self.samples.len()
    }
}

/// The three estimators at one angle for one realization.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GainSample {
    pub real_pulse_gain: f64,
    pub prr: f64,
    pub pvr_abs_sq: f64,
}

/// Builds combined pulses for one pulse spec. Holds the SRRC taps so repeated
/// evaluations do not regenerate them.
#[derive(Debug, Clone)]
pub struct Combiner {
    spec: PulseSpec,
    taps: SampledPulse,
    delay_cap: f64,
}

struct Layout {
    len: usize,
    center: usize,
}

impl Combiner {
    pub fn new(spec: &PulseSpec) -> Result<Self> {
        Ok(Self {
            spec: *spec,
            taps: srrc_taps(spec)?,
            delay_cap: DEFAULT_DELAY_CAP_SAMPLES,
        })
    }

    /// Overrides the delay cap (samples).
    pub fn with_delay_cap(mut self, cap: f64) -> Self {
        self.delay_cap = cap;
        self
    }

    pub fn spec(&self) -> &PulseSpec {
        &self.spec
    }

    pub fn taps(&self) -> &SampledPulse {
        &self.taps
    }

    fn layout(&self, profile: &DelayProfile) -> Result<Layout> {
        let max_delay = profile.max_abs_delay() * self.spec.sample_rate();
        if !max_delay.is_finite() || max_delay > self.delay_cap {
            return Err(Error::DelaySpanExceeded {
                extent: max_delay,
                cap: self.delay_cap,
            });
        }
        // interpolation reaches one sample beyond ⌈δ⌉
        let reach = max_delay.ceil() as usize + 1 + GUARD_SAMPLES;
        let lead = self.taps.center_index + reach;
        let tail = self.taps.len() - 1 - self.taps.center_index + reach;
        let needed = lead + tail + 1;
        let len = needed.next_power_of_two();
        Ok(Layout {
            len,
            center: lead + (len - needed) / 2,
        })
    }

    fn accumulate(&self, profile: &DelayProfile, with_phase: bool, layout: &Layout) -> Vec<Complex64> {
        let fs = self.spec.sample_rate();
        let mut buf = vec![Complex64::new(0.0, 0.0); layout.len];
        for (&delay, &phase) in profile.delays().iter().zip(profile.phases()) {
            let weight = if with_phase {
                Complex64::from_polar(1.0, -phase)
            } else {
                Complex64::new(1.0, 0.0)
            };
            accumulate_delayed(
                &self.taps.samples,
                self.taps.center_index,
                delay * fs,
                weight,
                &mut buf,
                layout.center,
            );
        }
        buf
    }

    /// `g = Σ_n e^{−jψ_n}·s(t − δ_n)` in a power-of-two block.
    pub fn combined_pulse(&self, profile: &DelayProfile) -> Result<CombinedPulse> {
        let layout = self.layout(profile)?;
        Ok(CombinedPulse {
            samples: self.accumulate(profile, true, &layout),
            sample_rate: self.spec.sample_rate(),
            center_index: layout.center,
        })
    }

    /// Energy of the phase-free sum `Σ_n s(t − δ_n)`.
    pub fn real_pulse_gain(&self, profile: &DelayProfile) -> Result<f64> {
        let layout = self.layout(profile)?;
        Ok(energy(&self.accumulate(profile, false, &layout)))
    }

    /// The unit-energy ideal pulse embedded in the block of `g`.
    pub fn ideal_pulse(&self, g: &CombinedPulse) -> SampledPulse {
        self.taps.embed(g.block_len(), g.center_index)
    }

    /// All three estimators for one profile.
    pub fn evaluate(&self, profile: &DelayProfile) -> Result<GainSample> {
        let layout = self.layout(profile)?;
        let g = CombinedPulse {
            samples: self.accumulate(profile, true, &layout),
            sample_rate: self.spec.sample_rate(),
            center_index: layout.center,
        };
        let real = energy(&self.accumulate(profile, false, &layout));
        let pvr = matched_similarity(&g, &self.ideal_pulse(&g))?;
        Ok(GainSample {
            real_pulse_gain: real,
            prr: raw_power(&g),
            pvr_abs_sq: pvr.norm_sqr(),
        })
    }
}

fn energy(samples: &[Complex64]) -> f64 {
    samples.iter().map(|s| s.norm_sqr()).sum()
}

pub fn combined_pulse(profile: &DelayProfile, spec: &PulseSpec) -> Result<CombinedPulse> {
    Combiner::new(spec)?.combined_pulse(profile)
}

pub fn real_pulse_gain(profile: &DelayProfile, spec: &PulseSpec) -> Result<f64> {
    Combiner::new(spec)?.real_pulse_gain(profile)
}

/// `P_rr = (1/L)·trace(Q Qᴴ) = Σ|g_k|²`.
pub fn raw_power(g: &CombinedPulse) -> f64 {
    energy(&g.samples)
}

/// Zero-lag matched-filter output `Σ g_k·conj(q_k)`, the conjugate of
/// `(1/L)·trace((Q_i Q)ᴴ)`. Only its squared magnitude is reported as a gain.
pub fn matched_similarity(g: &CombinedPulse, ideal: &SampledPulse) -> Result<Complex64> {
    if g.block_len() != ideal.len() {
        return Err(Error::LengthMismatch {
            combined: g.block_len(),
            ideal: ideal.len(),
        });
    }
    if g.center_index != ideal.center_index {
        return Err(Error::CenterMismatch {
            combined: g.center_index,
            ideal: ideal.center_index,
        });
    }
    Ok(g
        .samples
        .iter()
        .zip(&ideal.samples)
        .map(|(a, b)| a * b.conj())
        .sum())
}

/// Dense reference for the circulant trace identities.
pub mod oracle {
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    use super::CombinedPulse;
    use crate::error::{Error, Result};
    use crate::pulse::SampledPulse;

    pub const MAX_ORACLE_LEN: usize = 256;

    fn check(len: usize) -> Result<()> {
        if len > MAX_ORACLE_LEN {
            return Err(Error::OracleTooLarge {
                len,
                limit: MAX_ORACLE_LEN,
            });
        }
        Ok(())
    }

    /// Circulant matrix with the given first row: `Q[i][j] = row[(j − i) mod L]`.
    pub fn circulant(row: &[Complex64]) -> DMatrix<Complex64> {
        let l = row.len();
        DMatrix::from_fn(l, l, |i, j| row[(j + l - i) % l])
    }

    /// Circulant matched filter of `ideal`: first row is its conjugated time reversal.
    pub fn matched_filter(ideal: &[Complex64]) -> DMatrix<Complex64> {
        let l = ideal.len();
        let row: Vec<Complex64> = (0..l).map(|k| ideal[(l - k) % l].conj()).collect();
        circulant(&row)
    }

    /// `(1/L)·trace(Q Qᴴ)`.
    pub fn dense_oracle_prr(g: &CombinedPulse) -> Result<f64> {
        check(g.block_len())?;
        let q = circulant(&g.samples);
        let t = (&q * q.adjoint()).trace();
        Ok(t.re / g.block_len() as f64)
    }

    /// `(1/L)·trace((Q_i Q)ᴴ)`.
    pub fn dense_oracle_pvr(g: &CombinedPulse, ideal: &SampledPulse) -> Result<Complex64> {
        check(g.block_len())?;
        if ideal.len() != g.block_len() {
            return Err(Error::LengthMismatch {
                combined: g.block_len(),
                ideal: ideal.len(),
            });
        }
        let q = circulant(&g.samples);
        let qi = matched_filter(&ideal.samples);
        Ok((&qi * &q).adjoint().trace() / g.block_len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::*;
    use super::*;
    use crate::geometry::{delay_profile, sample_positions, PointingAngle, SwarmConfig};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec() -> PulseSpec {
        PulseSpec {
            baud_rate: 500e6,
            rolloff: 0.2,
            oversampling: 4,
            tap_count: 41,
            carrier_frequency: 20e9,
        }
    }

    fn zeros(n: usize) -> DelayProfile {
        DelayProfile::from_delays(vec![0.0; n], 20e9)
    }

    #[test]
    fn single_node_is_embedded_srrc() {
        let c = Combiner::new(&spec()).unwrap();
        let g = c.combined_pulse(&zeros(1)).unwrap();
        assert!(g.block_len().is_power_of_two());
        let ideal = c.ideal_pulse(&g);
        assert_eq!(g.samples, ideal.samples);
        assert_abs_diff_eq!(raw_power(&g), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_boresight() {
        let c = Combiner::new(&spec()).unwrap();
        for n in [8usize, 16] {
            let prof = zeros(n);
            let g = c.combined_pulse(&prof).unwrap();
            let n2 = (n * n) as f64;
            assert_abs_diff_eq!(raw_power(&g), n2, epsilon = 1e-9);
            let pvr = matched_similarity(&g, &c.ideal_pulse(&g)).unwrap();
            assert_abs_diff_eq!(pvr.re, n as f64, epsilon = 1e-9);
            assert_abs_diff_eq!(pvr.im, 0.0, epsilon = 1e-9);
            assert_abs_diff_eq!(c.real_pulse_gain(&prof).unwrap(), n2, epsilon = 1e-9);
        }
    }

    #[test]
    fn disjoint_pulses_add_in_power() {
        let c = Combiner::new(&spec()).unwrap();
        // 60 samples apart, longer than the 41-tap pulse plus interpolation reach
        let prof = DelayProfile::from_delays(vec![0.0, 60.3 / 2e9], 20e9);
        let g = c.combined_pulse(&prof).unwrap();
        let single = fractional_energy(60.3);
        assert_abs_diff_eq!(raw_power(&g), 1.0 + single, epsilon = 1e-9);
        assert_abs_diff_eq!(c.real_pulse_gain(&prof).unwrap(), 1.0 + single, epsilon = 1e-9);
        // with an integer separation there is no interpolation loss at all
        let prof = DelayProfile::from_delays(vec![0.0, 60.0 / 2e9], 20e9);
        let g = c.combined_pulse(&prof).unwrap();
        assert_abs_diff_eq!(raw_power(&g), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(c.real_pulse_gain(&prof).unwrap(), 2.0, epsilon = 1e-9);
    }

    fn fractional_energy(delay: f64) -> f64 {
        crate::pulse::fractional_delay(&srrc_taps(&spec()).unwrap(), delay).energy()
    }

    #[test]
    fn single_node_phase_rotation() {
        let c = Combiner::new(&spec()).unwrap();
        let phi0: f64 = 1.234;
        let g = c.combined_pulse(&zeros(1)).unwrap();
        let rotated = CombinedPulse {
            samples: g.samples.iter().map(|s| s * Complex64::from_polar(1.0, -phi0)).collect(),
            ..g.clone()
        };
        let v = matched_similarity(&rotated, &c.ideal_pulse(&g)).unwrap();
        assert_abs_diff_eq!(v.re, phi0.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, -phi0.sin(), epsilon = 1e-12);
    }

    #[test]
    fn zero_phase_profiles_agree_with_real_gain() {
        let c = Combiner::new(&spec()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // carrier chosen so that every ψ_n is a multiple of 2π: δ in whole carrier periods
        let f = 1e9;
        let delays: Vec<f64> = (0..12).map(|_| rng.random_range(-40i32..40) as f64 / f).collect();
        let prof = DelayProfile::from_delays(delays, f);
        let g = c.combined_pulse(&prof).unwrap();
        let real = c.real_pulse_gain(&prof).unwrap();
        assert!((raw_power(&g) - real).abs() <= 1e-9 * real);
    }

    #[test]
    fn delay_cap_is_enforced() {
        let c = Combiner::new(&spec()).unwrap().with_delay_cap(100.0);
        let prof = DelayProfile::from_delays(vec![0.0, 101.0 / 2e9], 20e9);
        assert!(matches!(c.combined_pulse(&prof), Err(Error::DelaySpanExceeded { .. })));
        assert!(c.evaluate(&prof).is_err());
        let prof = DelayProfile::from_delays(vec![f64::NAN], 20e9);
        assert!(Combiner::new(&spec()).unwrap().combined_pulse(&prof).is_err());
    }

    #[test]
    fn block_has_no_wrap() {
        let c = Combiner::new(&spec()).unwrap();
        let prof = DelayProfile::from_delays(vec![-37.6 / 2e9, 0.0, 52.2 / 2e9], 20e9);
        let g = c.combined_pulse(&prof).unwrap();
        let first_nz = g.samples.iter().position(|s| s.norm() > 0.0).unwrap();
        let last_nz = g.samples.iter().rposition(|s| s.norm() > 0.0).unwrap();
        assert!(first_nz >= GUARD_SAMPLES && last_nz < g.block_len() - GUARD_SAMPLES);
        assert!(g.block_len() >= 41 + 2 * 53 + 8);
    }

    #[test]
    fn matched_similarity_checks_shapes() {
        let c = Combiner::new(&spec()).unwrap();
        let g = c.combined_pulse(&zeros(2)).unwrap();
        let short = c.taps().embed(g.block_len() - 1, g.center_index);
        assert!(matches!(matched_similarity(&g, &short), Err(Error::LengthMismatch { .. })));
        let shifted = c.taps().embed(g.block_len(), g.center_index + 1);
        assert!(matches!(matched_similarity(&g, &shifted), Err(Error::CenterMismatch { .. })));
    }

    #[test]
    fn oracle_examples() {
        let mut row = vec![Complex64::new(0.0, 0.0); 16];
        row[3] = Complex64::new(1.0, 0.0);
        let impulse = CombinedPulse {
            samples: row,
            sample_rate: 1.0,
            center_index: 3,
        };
        assert_abs_diff_eq!(dense_oracle_prr(&impulse).unwrap(), 1.0, epsilon = 1e-15);

        let c = Combiner::new(&spec()).unwrap();
        let g = c.combined_pulse(&zeros(1)).unwrap();
        let pvr = dense_oracle_pvr(&g, &c.ideal_pulse(&g)).unwrap();
        assert_abs_diff_eq!(pvr.norm_sqr(), 1.0, epsilon = 1e-10);

        let big = CombinedPulse {
            samples: vec![Complex64::new(1.0, 0.0); 512],
            sample_rate: 1.0,
            center_index: 0,
        };
        assert!(matches!(dense_oracle_prr(&big), Err(Error::OracleTooLarge { .. })));
    }

    #[test]
    fn swarm_profile_matches_oracle() {
        // small geometry so the block stays within the oracle limit
        let pos = sample_positions(&SwarmConfig::gaussian(6, 0.5, 77)).unwrap();
        let prof = delay_profile(&pos, PointingAngle::BORESIGHT, PointingAngle::from_degrees(30.0, 0.0), 20e9);
        let c = Combiner::new(&spec()).unwrap();
        let g = c.combined_pulse(&prof).unwrap();
        assert!(g.block_len() <= MAX_ORACLE_LEN);
        let ideal = c.ideal_pulse(&g);
        let prr = raw_power(&g);
        assert!((prr - dense_oracle_prr(&g).unwrap()).abs() <= 1e-10 * prr);
        let fast = matched_similarity(&g, &ideal).unwrap();
        let slow = dense_oracle_pvr(&g, &ideal).unwrap().conj();
        assert!((fast - slow).norm() <= 1e-10 * fast.norm());
    }

    fn random_pulse(rng: &mut ChaCha8Rng, len: usize) -> (CombinedPulse, SampledPulse) {
        let center = rng.random_range(0..len);
        let samples = (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let ideal = srrc_taps(&spec()).unwrap().embed(len, center);
        (
            CombinedPulse {
                samples,
                sample_rate: 2e9,
                center_index: center,
            },
            ideal,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn fast_traces_match_dense_oracle(seed in any::<u64>(), len in prop::sample::select(vec![32usize, 64, 128])) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (g, ideal) = random_pulse(&mut rng, len);
            let prr = raw_power(&g);
            prop_assert!((prr - dense_oracle_prr(&g).unwrap()).abs() <= 1e-10 * prr);
            let fast = matched_similarity(&g, &ideal).unwrap();
            let slow = dense_oracle_pvr(&g, &ideal).unwrap().conj();
            prop_assert!((fast - slow).norm() <= 1e-10 * fast.norm().max(1e-300));
        }

        #[test]
        fn cauchy_schwarz_bound(seed in any::<u64>(), deg in 0.0..3.0f64, n in 1usize..24) {
            let pos = sample_positions(&SwarmConfig::gaussian(n, 500.0, seed)).unwrap();
            let prof = delay_profile(&pos, PointingAngle::BORESIGHT, PointingAngle::from_degrees(deg, 0.0), 20e9);
            let s = Combiner::new(&spec()).unwrap().evaluate(&prof).unwrap();
            prop_assert!(s.prr.is_finite() && s.prr >= 0.0);
            prop_assert!(s.real_pulse_gain >= 0.0);
            prop_assert!(s.pvr_abs_sq >= 0.0 && s.pvr_abs_sq <= s.prr * (1.0 + 1e-12));
        }
    }
}
