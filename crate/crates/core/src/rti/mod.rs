//! Radio tomographic imaging: elliptical link weights, the regularized
//! least-squares image solve, and peak-intensity localization.

mod grid;
mod prior;
mod solve;
mod weights;

pub use grid::VoxelGrid;
pub use prior::build_prior_covariance;
pub use solve::{localization_error, localize, solve_image, ImageVector};
pub use weights::{build_weights, ellipse_area, LinkGeometry, WeightMatrix, WeightRow};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RtiError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("measurement vector length {got} does not match link count {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("normal equations are singular with regularization disabled")]
    SingularSystem,
}

/// Tuning parameters of the imaging stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtiParams {
    /// Ellipse excess path length lambda, metres.
    pub excess_path_len_m: f64,
    /// Regularization weight sigma^2_M.
    pub reg_weight: f64,
    /// Prior voxel variance sigma^2_x.
    pub prior_variance: f64,
    /// Prior correlation distance delta_c, metres.
    pub corr_distance_m: f64,
}

impl Default for RtiParams {
    fn default() -> Self {
        Self {
            excess_path_len_m: 0.05,
            reg_weight: 100.0,
            prior_variance: 1.0,
            corr_distance_m: 0.5,
        }
    }
}

impl RtiParams {
    pub fn validate(&self) -> Result<(), RtiError> {
        if !(self.excess_path_len_m > 0.0) {
            return Err(RtiError::InvalidParameter(
                "excess path length must be > 0".into(),
            ));
        }
        if !(self.reg_weight >= 0.0) {
            return Err(RtiError::InvalidParameter(
                "regularization weight must be >= 0".into(),
            ));
        }
        if !(self.prior_variance > 0.0) {
            return Err(RtiError::InvalidParameter(
                "prior variance must be > 0".into(),
            ));
        }
        if !(self.corr_distance_m > 0.0) {
            return Err(RtiError::InvalidParameter(
                "correlation distance must be > 0".into(),
            ));
        }
        Ok(())
    }
}
