use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

use super::{PathComponent, Pulse, SimError};
use crate::cir_processing::SampledWaveform;

/// Half-width, in samples, of the windowed-sinc kernel used to realize
/// sub-sample path delays.
pub const INTERP_HALF_WIDTH: usize = 24;

/// Blackman-windowed sinc. Exactly 1 at x = 0 and exactly 0 at other
/// integers, so integer-sample delays reproduce the pulse bit-for-bit.
fn windowed_sinc(x: f64) -> f64 {
    let k = INTERP_HALF_WIDTH as f64;
    if x.abs() >= k {
        return 0.0;
    }
    if x == x.round() {
        return if x == 0.0 { 1.0 } else { 0.0 };
    }
    let sinc = (PI * x).sin() / (PI * x);
    let u = PI * x / k;
    let window = 0.42 + 0.5 * u.cos() + 0.08 * (2.0 * u).cos();
    sinc * window
}

/// Superimpose delayed, scaled copies of `pulse` per Eq.-style CIR synthesis
/// h[k] = sum_j alpha_j s(k T_s - tau_j) + w[k], with white Gaussian noise of
/// standard deviation `noise_std`. Sub-sample delays are realized by
/// band-limited interpolation. Deterministic for a given seed.
pub fn synthesize_cir(
    paths: &[PathComponent],
    pulse: &Pulse,
    duration_s: f64,
    noise_std: f64,
    seed: u64,
) -> Result<SampledWaveform, SimError> {
    if noise_std < 0.0 {
        return Err(SimError::InvalidParameter("noise_std must be >= 0".into()));
    }
    let ts = pulse.sample_period;
    let margin = INTERP_HALF_WIDTH as f64 * ts;
    let required = paths
        .iter()
        .map(|p| p.delay_s + pulse.duration() + margin)
        .fold(pulse.duration() + margin, f64::max);
    if duration_s < required {
        return Err(SimError::DurationTooShort {
            required_s: required,
            given_s: duration_s,
        });
    }

    let n = (duration_s / ts).round() as usize;
    let mut samples = vec![0.0_f64; n];
    let m = pulse.len() as i64;
    let k = INTERP_HALF_WIDTH as i64;

    for path in paths {
        let base_f = path.delay_s / ts;
        let base = base_f.floor() as i64;
        let frac = base_f - base_f.floor();
        // The resampled pulse is the convolution of the pulse with a fixed
        // fractional-shift kernel; the kernel depends only on frac.
        let kernel: Vec<f64> = (-k..=k).map(|d| windowed_sinc(d as f64 - frac)).collect();
        for i in -k..m + k {
            let mut acc = 0.0;
            for (di, w) in kernel.iter().enumerate() {
                let j = i - (di as i64 - k);
                if (0..m).contains(&j) {
                    acc += w * pulse.samples[j as usize];
                }
            }
            let out = base + i;
            if (0..n as i64).contains(&out) {
                samples[out as usize] += path.amplitude * acc;
            }
        }
    }

    if noise_std > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_std)
            .map_err(|e| SimError::InvalidParameter(format!("noise_std: {e}")))?;
        for s in &mut samples {
            *s += normal.sample(&mut rng);
        }
    }

    Ok(SampledWaveform::new(samples, ts))
}
