use super::AlignedWaveform;

/// Power-delay profile: rectangle-rule energy per fixed-width delay bin.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    /// Bin width T_w in seconds.
    pub bin_width: f64,
    /// Energy per bin, all >= 0; the trailing partial bin is included.
    pub bins: Vec<f64>,
}

impl PowerDelayProfile {
    pub fn total_energy(&self) -> f64 {
        self.bins.iter().sum()
    }

    /// Sum of the bins whose start time falls in [t_lo, t_hi).
    pub fn energy_in_range(&self, t_lo: f64, t_hi: f64) -> f64 {
        self.bins
            .iter()
            .enumerate()
            .filter(|(m, _)| {
                let t = *m as f64 * self.bin_width;
                t >= t_lo && t < t_hi
            })
            .map(|(_, e)| e)
            .sum()
    }
}

/// Integrate the aligned waveform's power into `bin_width`-wide delay bins:
/// e_m = sum over samples in bin m of h[k]^2 * T_s.
pub fn compute_pdp(a: &AlignedWaveform, bin_width: f64) -> PowerDelayProfile {
    assert!(
        bin_width >= a.sample_period,
        "bin width must be at least one sampling period"
    );
    let ts = a.sample_period;
    let mut bins = Vec::new();
    for (k, s) in a.samples.iter().enumerate() {
        let m = (k as f64 * ts / bin_width).floor() as usize;
        if m >= bins.len() {
            bins.resize(m + 1, 0.0);
        }
        bins[m] += s * s * ts;
    }
    PowerDelayProfile { bin_width, bins }
}
