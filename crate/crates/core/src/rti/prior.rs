use nalgebra::DMatrix;

use super::VoxelGrid;

/// Exponentially decaying spatial prior covariance:
/// C_x[j,k] = sigma2_x * exp(-d_jk / delta_c) over voxel centroid distances.
/// Symmetric positive definite for any strictly positive parameters.
pub fn build_prior_covariance(grid: &VoxelGrid, sigma2_x: f64, delta_c: f64) -> DMatrix<f64> {
    assert!(
        sigma2_x > 0.0 && delta_c > 0.0,
        "prior parameters must be > 0"
    );
    let m = grid.num_voxels();
    let centroids: Vec<_> = (0..m).map(|i| grid.centroid(i)).collect();
    DMatrix::from_fn(m, m, |j, k| {
        sigma2_x * (-centroids[j].distance(centroids[k]) / delta_c).exp()
    })
}
