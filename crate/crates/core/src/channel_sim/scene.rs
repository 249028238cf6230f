use serde::{Deserialize, Serialize};

use super::SimError;
use crate::geometry::{Point2, Rect, Segment};

/// A wall segment with its RF interaction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wall {
    pub segment: Segment,
    /// Attenuation applied to a path each time it crosses the wall, in dB.
    pub transmission_loss_db: f64,
    /// Amplitude multiplier applied at a specular bounce, in [0, 1].
    pub reflection_coeff: f64,
}

impl Wall {
    pub fn new(a: Point2, b: Point2, transmission_loss_db: f64, reflection_coeff: f64) -> Self {
        Self {
            segment: Segment::new(a, b),
            transmission_loss_db,
            reflection_coeff,
        }
    }
}

/// Static scene: walls plus the overall bounding rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneLayout {
    pub walls: Vec<Wall>,
    pub bounds: Rect,
}

impl SceneLayout {
    pub fn empty(bounds: Rect) -> Self {
        Self {
            walls: Vec::new(),
            bounds,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.bounds.is_degenerate() {
            return Err(SimError::InvalidScene(
                "bounds must have positive width and height".into(),
            ));
        }
        for (i, w) in self.walls.iter().enumerate() {
            if w.transmission_loss_db < 0.0 {
                return Err(SimError::InvalidScene(format!(
                    "wall {i}: transmission loss must be >= 0 dB"
                )));
            }
            if !(0.0..=1.0).contains(&w.reflection_coeff) {
                return Err(SimError::InvalidScene(format!(
                    "wall {i}: reflection coefficient must be in [0, 1]"
                )));
            }
            if w.segment.length() == 0.0 {
                return Err(SimError::InvalidScene(format!("wall {i}: zero length")));
            }
        }
        Ok(())
    }
}

/// The shadowing agent: a disc that attenuates every path it intersects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersonState {
    pub position: Point2,
    /// Disc radius in metres.
    pub radius: f64,
    /// Attenuation applied once per intersected path, in dB.
    pub shadow_loss_db: f64,
    pub present: bool,
}

impl PersonState {
    pub fn absent() -> Self {
        Self {
            position: Point2::new(0.0, 0.0),
            radius: 0.15,
            shadow_loss_db: 10.0,
            present: false,
        }
    }

    pub fn standing(position: Point2, radius: f64, shadow_loss_db: f64) -> Self {
        Self {
            position,
            radius,
            shadow_loss_db,
            present: true,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.radius > 0.0) {
            return Err(SimError::InvalidParameter(
                "person radius must be > 0".into(),
            ));
        }
        if self.shadow_loss_db < 0.0 {
            return Err(SimError::InvalidParameter(
                "shadow loss must be >= 0 dB".into(),
            ));
        }
        Ok(())
    }
}
