//! Waveform conditioning: time alignment against the probe pulse, power-delay
//! profiles, the scalar early-energy feature, and capture quality gating.

mod align;
mod energy;
mod gate;
mod pdp;
mod waveform;

pub use align::{time_align, AlignedWaveform};
pub use energy::{early_energy, EarlyEnergy, DEFAULT_EARLY_WINDOW_S};
pub use gate::{quality_gate, GateDecision, GateState};
pub use pdp::{compute_pdp, PowerDelayProfile};
pub use waveform::SampledWaveform;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CirError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no lag reached the correlation threshold {rho}")]
    NoAlignment { rho: f64 },
}
