use super::{compute_pdp, AlignedWaveform};

/// Default early-energy integration window: the first 3 ns after the
/// detected first path.
pub const DEFAULT_EARLY_WINDOW_S: f64 = 3.0e-9;

/// The scalar presence feature: 10*log10 of the energy in the first
/// `window`-wide delay bin of the aligned waveform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyEnergy {
    /// E in dB. `-inf` when the first window is all zero; callers must treat
    /// such captures as discarded.
    pub value_db: f64,
    /// Window width used, in seconds.
    pub window_s: f64,
}

impl EarlyEnergy {
    pub fn is_usable(&self) -> bool {
        self.value_db.is_finite()
    }
}

/// E = 10*log10(e_0) with e_0 the first `window`-wide PDP bin.
pub fn early_energy(a: &AlignedWaveform, window: f64) -> EarlyEnergy {
    assert!(window > 0.0, "window must be > 0");
    let pdp = compute_pdp(a, window);
    let e0 = pdp.bins.first().copied().unwrap_or(0.0);
    EarlyEnergy {
        value_db: 10.0 * e0.log10(),
        window_s: window,
    }
}
