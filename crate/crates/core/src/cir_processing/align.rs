use super::{CirError, SampledWaveform};
use crate::channel_sim::Pulse;

/// A waveform re-based so sample 0 is the detected first-arriving path.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedWaveform {
    pub samples: Vec<f64>,
    pub sample_period: f64,
    /// Offset, in samples, of the detected first path in the raw capture.
    pub alignment_lag: usize,
    /// Normalized correlation coefficient at the alignment lag.
    pub peak_correlation: f64,
}

/// Slide the probe pulse over the capture and cut at the earliest lag whose
/// normalized correlation coefficient exceeds `rho`. The coefficient uses
/// per-lag window normalization, so it is invariant to path amplitude.
pub fn time_align(
    h: &SampledWaveform,
    template: &Pulse,
    rho: f64,
) -> Result<AlignedWaveform, CirError> {
    if !(0.0 < rho && rho < 1.0) {
        return Err(CirError::InvalidParameter("rho must be in (0, 1)".into()));
    }
    if template.len() >= h.len() {
        return Err(CirError::InvalidParameter(
            "template must be shorter than the capture".into(),
        ));
    }
    if (template.sample_period - h.sample_period).abs() > 1e-18 {
        return Err(CirError::InvalidParameter(
            "template and capture sampling periods differ".into(),
        ));
    }

    let m = template.len();
    let t_norm = template.energy().sqrt();
    if t_norm == 0.0 {
        return Err(CirError::InvalidParameter("all-zero template".into()));
    }

    // Prefix sums of h^2 give each window's norm in O(1).
    let mut prefix = Vec::with_capacity(h.len() + 1);
    prefix.push(0.0_f64);
    for s in &h.samples {
        prefix.push(prefix.last().unwrap() + s * s);
    }

    for lag in 0..=h.len() - m {
        let win_energy = prefix[lag + m] - prefix[lag];
        if win_energy <= 0.0 {
            continue;
        }
        let mut dot = 0.0;
        for (j, t) in template.samples.iter().enumerate() {
            dot += h.samples[lag + j] * t;
        }
        let coeff = dot / (win_energy.sqrt() * t_norm);
        if coeff > rho {
            return Ok(AlignedWaveform {
                samples: h.samples[lag..].to_vec(),
                sample_period: h.sample_period,
                alignment_lag: lag,
                peak_correlation: coeff,
            });
        }
    }
    Err(CirError::NoAlignment { rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_sim::{gaussian_monocycle, synthesize_cir, PathComponent};
    use crate::geometry::Point2;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const TS: f64 = 15.89e-12;

    fn pulse() -> Pulse {
        gaussian_monocycle(4.5e9, 3.0e9, TS).unwrap()
    }

    fn path(amplitude: f64, delay_s: f64) -> PathComponent {
        PathComponent {
            amplitude,
            delay_s,
            order: 0,
            polyline: vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)],
        }
    }

    /// Exhaustive-scan oracle: recompute the normalized coefficient at every
    /// lag with independent (non-prefix-sum) arithmetic and return the first
    /// crossing.
    fn oracle_first_crossing(h: &SampledWaveform, template: &Pulse, rho: f64) -> Option<usize> {
        let m = template.len();
        let t_norm = template.samples.iter().map(|s| s * s).sum::<f64>().sqrt();
        for lag in 0..=h.len().checked_sub(m)? {
            let win = &h.samples[lag..lag + m];
            let w_norm = win.iter().map(|s| s * s).sum::<f64>().sqrt();
            if w_norm == 0.0 {
                continue;
            }
            let dot: f64 = win
                .iter()
                .zip(template.samples.iter())
                .map(|(a, b)| a * b)
                .sum();
            if dot / (w_norm * t_norm) > rho {
                return Some(lag);
            }
        }
        None
    }

    #[test]
    fn exact_template_aligns_at_zero_with_unit_correlation() {
        let p = pulse();
        let mut samples = p.samples.clone();
        samples.extend(std::iter::repeat_n(0.0, 64));
        let h = SampledWaveform::new(samples, TS);
        let a = time_align(&h, &p, 0.75).unwrap();
        assert_eq!(a.alignment_lag, 0);
        assert_relative_eq!(a.peak_correlation, 1.0, max_relative = 1e-9);
        assert!(a.peak_correlation >= 0.75);
    }

    #[test]
    fn delayed_template_with_weak_echo_matches_oracle() {
        let p = pulse();
        // First path exactly 500 samples in, plus a weak echo 2 ns later.
        let h = synthesize_cir(
            &[path(1.0, 500.0 * TS), path(0.3, 500.0 * TS + 2.0e-9)],
            &p,
            20.0e-9,
            0.0,
            0,
        )
        .unwrap();
        let a = time_align(&h, &p, 0.75).unwrap();
        let oracle = oracle_first_crossing(&h, &p, 0.75).unwrap();
        assert_eq!(a.alignment_lag, oracle);
        // The first threshold crossing sits just inside the main lobe.
        assert!(
            (a.alignment_lag as i64 - 500).abs() <= 3,
            "lag {} vs true 500",
            a.alignment_lag
        );
    }

    #[test]
    fn pure_noise_fails_alignment_over_seeded_draws() {
        let p = pulse();
        for seed in 0..100 {
            let h = synthesize_cir(&[], &p, 10.0e-9, 0.05, seed).unwrap();
            let oracle = oracle_first_crossing(&h, &p, 0.75);
            assert_eq!(oracle, None, "oracle found a crossing at seed {seed}");
            assert!(
                matches!(time_align(&h, &p, 0.75), Err(CirError::NoAlignment { .. })),
                "implementation aligned on noise at seed {seed}"
            );
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = pulse();
        let h = SampledWaveform::new(vec![0.0; p.len() + 10], TS);
        assert!(matches!(
            time_align(&h, &p, 1.5),
            Err(CirError::InvalidParameter(_))
        ));
        let short = SampledWaveform::new(vec![0.0; 4], TS);
        assert!(matches!(
            time_align(&short, &p, 0.75),
            Err(CirError::InvalidParameter(_))
        ));
    }

    proptest! {
        /// Prepending k zero samples increases the alignment lag by exactly k.
        #[test]
        fn shift_equivariance(k in 1usize..400) {
            let p = pulse();
            let h = synthesize_cir(&[path(0.8, 300.0 * TS)], &p, 15.0e-9, 0.0, 0).unwrap();
            let base = time_align(&h, &p, 0.75).unwrap();
            let mut shifted = vec![0.0; k];
            shifted.extend_from_slice(&h.samples);
            let hs = SampledWaveform::new(shifted, TS);
            let a = time_align(&hs, &p, 0.75).unwrap();
            prop_assert_eq!(a.alignment_lag, base.alignment_lag + k);
            prop_assert_eq!(a.peak_correlation, base.peak_correlation);
        }
    }
}
