use serde::{Deserialize, Serialize};

use crate::geometry::Point2;

/// A raw sampled channel impulse response with capture metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledWaveform {
    pub samples: Vec<f64>,
    /// Sampling period in seconds.
    pub sample_period: f64,
    /// Capture timestamp in seconds.
    pub capture_time: f64,
    pub tx_coord: Point2,
    pub rx_coord: Point2,
}

impl SampledWaveform {
    pub fn new(samples: Vec<f64>, sample_period: f64) -> Self {
        Self {
            samples,
            sample_period,
            capture_time: 0.0,
            tx_coord: Point2::new(0.0, 0.0),
            rx_coord: Point2::new(0.0, 0.0),
        }
    }

    pub fn with_meta(mut self, capture_time: f64, tx: Point2, rx: Point2) -> Self {
        self.capture_time = capture_time;
        self.tx_coord = tx;
        self.rx_coord = rx;
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Rectangle-rule signal energy: sum of h[k]^2 * T_s.
    pub fn total_energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum::<f64>() * self.sample_period
    }

    pub fn is_valid(&self) -> bool {
        self.sample_period > 0.0 && self.samples.iter().all(|s| s.is_finite())
    }
}
