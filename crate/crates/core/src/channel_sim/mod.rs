//! Deterministic geometric multipath simulator.
//!
//! Generates ground-truth channel impulse responses for a 2-D scene of lossy
//! walls, a band-limited probe pulse, and transceivers that may be in motion.
//! Propagation uses the image (mirror-source) method up to a configurable
//! reflection order, with free-space 1/d amplitude decay, per-traversal wall
//! transmission loss, and per-bounce reflection coefficients. A person is
//! modelled as a disc that attenuates every path passing through it.

mod cir;
mod paths;
mod pulse;
mod scene;
mod trajectory;

pub use cir::{synthesize_cir, INTERP_HALF_WIDTH};
pub use paths::{apply_person_shadowing, enumerate_paths, PathComponent};
pub use pulse::{gaussian_monocycle, Pulse};
pub use scene::{PersonState, SceneLayout, Wall};
pub use trajectory::{sample_trajectory, NodeTrajectory};

use thiserror::Error;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("duration too short: need at least {required_s} s, got {given_s} s")]
    DurationTooShort { required_s: f64, given_s: f64 },
    #[error("time {t} s outside trajectory span [{start}, {end}] s")]
    TimeOutOfRange { t: f64, start: f64, end: f64 },
}
