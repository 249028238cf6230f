//! Device-free through-wall person localization with mobile ultra-wideband
//! transceivers, end to end on synthetic channel data.
//!
//! The crate simulates UWB channel impulse responses for 2-D scenes with a
//! deterministic image-method multipath model, extracts the early-delay
//! energy feature that survives small-scale fading while transceivers move,
//! detects link-line presence with a moving-average change detector, and
//! reconstructs a person's position by radio tomographic imaging over
//! virtual reference receivers.

// Validation sites use `!(x > 0.0)` on purpose: the negation also rejects
// NaN, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel_sim;
pub mod cir_processing;
pub mod config;
pub mod geometry;
pub mod io;
pub mod mobile_assoc;
pub mod pipeline;
pub mod presence_detector;
pub mod rti;
pub mod seed;
