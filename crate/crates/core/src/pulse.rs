//! Square-root raised-cosine pulses and time-domain fractional delays.
//!
//! A delay is always applied to the baseband pulse itself (integer part as an
//! index shift, fractional part by 4-point Catmull-Rom interpolation) and,
//! separately, as a carrier-phase rotation with [`apply_phase`]. Phase-only
//! delays are never used.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    /// Symbol rate, Hz.
    pub baud_rate: f64,
    pub rolloff: f64,
    /// Samples per symbol.
    pub oversampling: usize,
    /// Pulse length in samples at the oversampled rate. Must be odd.
    pub tap_count: usize,
    pub carrier_frequency: f64,
}

impl PulseSpec {
    pub fn sample_rate(&self) -> f64 {
        self.baud_rate * self.oversampling as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.baud_rate.is_finite() && self.baud_rate > 0.0) {
            return Err(invalid(
                "baud_rate",
                format!("must be finite and > 0 (got {})", self.baud_rate),
            ));
        }
        if !(self.rolloff > 0.0 && self.rolloff <= 1.0) {
            return Err(invalid(
                "rolloff",
                format!("must lie in (0, 1] (got {})", self.rolloff),
            ));
        }
        if self.oversampling < 2 {
            return Err(invalid(
                "oversampling",
                format!("must be at least 2 (got {})", self.oversampling),
            ));
        }
        if self.tap_count.is_multiple_of(2) {
            return Err(invalid(
                "tap_count",
                format!("must be odd (got {})", self.tap_count),
            ));
        }
        if !(self.carrier_frequency.is_finite() && self.carrier_frequency > 0.0) {
            return Err(invalid(
                "carrier_frequency",
                format!("must be finite and > 0 (got {})", self.carrier_frequency),
            ));
        }
        Ok(())
    }
}

/// A discretized pulse. `center_index` is the sample at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPulse {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
    pub center_index: usize,
}

impl SampledPulse {
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample at `offset` samples from `t = 0`, zero outside the buffer.
    pub fn at(&self, offset: isize) -> Complex64 {
        let idx = self.center_index as isize + offset;
        if idx < 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.samples
            .get(idx as usize)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Offsets (relative to `t = 0`) of the first and last stored samples.
    pub fn extent(&self) -> (isize, isize) {
        let lo = -(self.center_index as isize);
        (lo, lo + self.samples.len() as isize - 1)
    }

    /// Copies the pulse into a zero buffer of `len` samples with `t = 0` at `center_index`.
    /// Samples falling outside the new buffer are dropped.
    pub fn embed(&self, len: usize, center_index: usize) -> SampledPulse {
        let mut samples = vec![Complex64::new(0.0, 0.0); len];
        for (j, s) in samples.iter_mut().enumerate() {
            *s = self.at(j as isize - center_index as isize);
        }
        SampledPulse {
            samples,
            sample_rate: self.sample_rate,
            center_index,
        }
    }
}

/// SRRC impulse response at `t` symbol periods, unnormalized.
fn srrc_value(t: f64, beta: f64) -> f64 {
    let t = t.abs();
    let quarter = 1.0 / (4.0 * beta);
    if t < 1e-12 {
        1.0 - beta + 4.0 * beta / PI
    } else if (t - quarter).abs() < 1e-9 * quarter.max(1.0) {
        let arg = PI / (4.0 * beta);
        beta * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * arg.sin() + (1.0 - 2.0 / PI) * arg.cos())
    } else {
        let num = (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
        let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
        num / den
    }
}

/// Unit-energy SRRC pulse, `tap_count` samples centered on the peak.
pub fn srrc_taps(spec: &PulseSpec) -> Result<SampledPulse> {
    spec.validate()?;
    let center = spec.tap_count / 2;
    let os = spec.oversampling as f64;
    let raw: Vec<f64> = (0..spec.tap_count)
        .map(|k| {
            let offset = (k as isize - center as isize).unsigned_abs();
            srrc_value(offset as f64 / os, spec.rolloff)
        })
        .collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(SampledPulse {
        samples: raw
            .into_iter()
            .map(|v| Complex64::new(v / norm, 0.0))
            .collect(),
        sample_rate: spec.sample_rate(),
        center_index: center,
    })
}

/// Catmull-Rom weights for the samples at `i-1, i, i+1, i+2` when
/// interpolating at `i + u`, `u ∈ [0, 1)`.
pub(crate) fn catmull_rom_weights(u: f64) -> [f64; 4] {
    let u2 = u * u;
    let u3 = u2 * u;
    [
        0.5 * (-u + 2.0 * u2 - u3),
        0.5 * (2.0 - 5.0 * u2 + 3.0 * u3),
        0.5 * (u + 4.0 * u2 - 3.0 * u3),
        0.5 * (u3 - u2),
    ]
}

/// Adds `weight · x(k − delay)` into `dst`, where `x` is `src` and both buffers
/// are aligned on their `t = 0` sample. `dst` must cover the delayed support,
/// `[lo + ⌊delay⌋ − 1, hi + ⌈delay⌉ + 1]` relative to `t = 0`.
pub(crate) fn accumulate_delayed(
    src: &[Complex64],
    src_center: usize,
    delay: f64,
    weight: Complex64,
    dst: &mut [Complex64],
    dst_center: usize,
) {
    let shift = delay.floor();
    let frac = delay - shift;
    let shift = shift as isize;
    // output index j (in dst) ↔ source position (j - dst_center - delay) + src_center
    let base = src_center as isize - dst_center as isize - shift;
    if frac == 0.0 {
        for (i, &s) in src.iter().enumerate() {
            let j = i as isize - base;
            dst[j as usize] += weight * s;
        }
        return;
    }
    // source position j + base - frac = (j + base - 1) + (1 - frac)
    let w = catmull_rom_weights(1.0 - frac);
    let n = src.len() as isize;
    let j_lo = (0 - base - 1).max(0);
    let j_hi = (n - 1 - base + 2).min(dst.len() as isize - 1);
    for j in j_lo..=j_hi {
        let i0 = j + base - 1;
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, wt) in w.iter().enumerate() {
            let i = i0 - 1 + t as isize;
            if (0..n).contains(&i) {
                acc += src[i as usize] * *wt;
            }
        }
        dst[j as usize] += weight * acc;
    }
}

/// Delays `pulse` by `delay_samples` (may be negative or fractional).
///
/// The output carries `⌈|delay|⌉ + 2` extra samples so the whole interpolated
/// support fits, and its `center_index` still marks `t = 0`. A zero delay
/// returns the input unchanged.
pub fn fractional_delay(pulse: &SampledPulse, delay_samples: f64) -> SampledPulse {
    if delay_samples == 0.0 {
        return pulse.clone();
    }
    let extra = delay_samples.abs().ceil() as usize;
    let (before, after) = if delay_samples < 0.0 {
        (extra + 1, 1)
    } else {
        (1, extra + 1)
    };
    let len = pulse.len() + before + after;
    let center_index = pulse.center_index + before;
    let mut samples = vec![Complex64::new(0.0, 0.0); len];
    accumulate_delayed(
        &pulse.samples,
        pulse.center_index,
        delay_samples,
        Complex64::new(1.0, 0.0),
        &mut samples,
        center_index,
    );
    SampledPulse {
        samples,
        sample_rate: pulse.sample_rate,
        center_index,
    }
}

/// Multiplies every sample by `e^{−j·phase}`.
pub fn apply_phase(pulse: &SampledPulse, phase: f64) -> SampledPulse {
    let rot = Complex64::from_polar(1.0, -phase);
    SampledPulse {
        samples: pulse.samples.iter().map(|s| s * rot).collect(),
        sample_rate: pulse.sample_rate,
        center_index: pulse.center_index,
    }
}
