use nalgebra::{Cholesky, DMatrix, DVector};

use super::{build_prior_covariance, RtiError, RtiParams, VoxelGrid, WeightMatrix};
use crate::geometry::Point2;

/// Reconstructed voxel attenuation image.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageVector {
    pub values: Vec<f64>,
    pub grid: VoxelGrid,
}

/// Regularized least-squares image estimate
/// x = (W^T W + sigma2_M * C_x^-1)^-1 W^T y.
///
/// The prior inverse is never formed: with C_x = L L^T the substitution
/// x = L z turns the normal equations into (B^T B + sigma2_M I) z = B^T y
/// with B = W L, which is solved by a Cholesky factorization.
pub fn solve_image(
    w: &WeightMatrix,
    grid: &VoxelGrid,
    y: &[f64],
    params: &RtiParams,
) -> Result<ImageVector, RtiError> {
    params.validate()?;
    if y.len() != w.num_links() {
        return Err(RtiError::DimensionMismatch {
            got: y.len(),
            expected: w.num_links(),
        });
    }
    if w.num_voxels != grid.num_voxels() {
        return Err(RtiError::InvalidParameter(
            "weight matrix voxel count does not match grid".into(),
        ));
    }
    let m = grid.num_voxels();
    let l_links = w.num_links();

    let c_x = build_prior_covariance(grid, params.prior_variance, params.corr_distance_m);
    let chol_cx = Cholesky::new(c_x).ok_or_else(|| {
        RtiError::InvalidParameter("prior covariance not positive definite".into())
    })?;
    let l_factor = chol_cx.l();

    // B = W * L, accumulated row by row through the sparse weight rows.
    let mut b = DMatrix::<f64>::zeros(l_links, m);
    for (row_idx, row) in w.rows.iter().enumerate() {
        for &voxel in &row.voxels {
            // L is lower triangular: columns 0..=voxel carry its row.
            for k in 0..=voxel {
                b[(row_idx, k)] += row.value * l_factor[(voxel, k)];
            }
        }
    }

    let mut normal = b.tr_mul(&b);
    for d in 0..m {
        normal[(d, d)] += params.reg_weight;
    }
    let rhs = b.tr_mul(&DVector::from_column_slice(y));

    let chol_normal = Cholesky::new(normal).ok_or(RtiError::SingularSystem)?;
    if params.reg_weight == 0.0 {
        // With regularization disabled the factorization can slip through on
        // a numerically singular system; reject via the factor diagonal.
        let factor = chol_normal.l_dirty();
        let (mut min_d, mut max_d) = (f64::INFINITY, 0.0_f64);
        for d in 0..m {
            min_d = min_d.min(factor[(d, d)]);
            max_d = max_d.max(factor[(d, d)]);
        }
        if !(min_d > 1e-8 * max_d) {
            return Err(RtiError::SingularSystem);
        }
    }
    let z = chol_normal.solve(&rhs);
    let x = &l_factor * z;

    Ok(ImageVector {
        values: x.iter().copied().collect(),
        grid: *grid,
    })
}

/// Centroid and value of the highest-intensity voxel; ties break toward the
/// lowest index.
pub fn localize(image: &ImageVector) -> (Point2, f64) {
    assert!(
        !image.values.is_empty(),
        "image must have at least one voxel"
    );
    let mut best = 0usize;
    for (i, v) in image.values.iter().enumerate() {
        if *v > image.values[best] {
            best = i;
        }
    }
    (image.grid.centroid(best), image.values[best])
}

/// Euclidean distance between estimated and actual positions, metres.
pub fn localization_error(estimate: Point2, truth: Point2) -> f64 {
    estimate.distance(truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rti::weights::WeightRow;
    use crate::rti::{build_weights, LinkGeometry};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Test-only dense solver: Gaussian elimination with partial pivoting.
    /// Returns `None` when a pivot collapses (ill-conditioned draw).
    fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = b.len();
        let scale = a
            .iter()
            .flat_map(|row| row.iter().map(|v| v.abs()))
            .fold(0.0_f64, f64::max);
        for p in 0..n {
            let pivot = (p..n)
                .max_by(|i, j| a[*i][p].abs().partial_cmp(&a[*j][p].abs()).unwrap())
                .unwrap();
            a.swap(p, pivot);
            b.swap(p, pivot);
            if a[p][p].abs() < 1e-6 * scale {
                return None;
            }
            for r in p + 1..n {
                let f = a[r][p] / a[p][p];
                for c in p..n {
                    a[r][c] -= f * a[p][c];
                }
                b[r] -= f * b[p];
            }
        }
        let mut x = vec![0.0; n];
        for p in (0..n).rev() {
            let mut s = b[p];
            for c in p + 1..n {
                s -= a[p][c] * x[c];
            }
            x[p] = s / a[p][p];
        }
        Some(x)
    }

    /// Dense unregularized least squares via normal equations (oracle).
    fn least_squares_oracle(w_dense: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
        let l = w_dense.len();
        let m = w_dense[0].len();
        let mut ata = vec![vec![0.0; m]; m];
        let mut atb = vec![0.0; m];
        for j in 0..m {
            for k in 0..m {
                ata[j][k] = (0..l).map(|r| w_dense[r][j] * w_dense[r][k]).sum();
            }
            atb[j] = (0..l).map(|r| w_dense[r][j] * y[r]).sum();
        }
        gauss_solve(ata, atb)
    }

    fn single_voxel_grid() -> VoxelGrid {
        VoxelGrid::new(Point2::new(0.0, 0.0), 1.0, 1, 1)
    }

    fn manual_weights(rows: Vec<WeightRow>, m: usize) -> WeightMatrix {
        WeightMatrix {
            num_voxels: m,
            rows,
        }
    }

    #[test]
    fn zero_measurements_give_exact_zero_image() {
        let grid = VoxelGrid::new(Point2::new(0.0, 0.0), 0.3, 5, 4);
        let links = vec![
            LinkGeometry::new(Point2::new(-0.5, 0.2), Point2::new(2.0, 0.9)),
            LinkGeometry::new(Point2::new(0.3, -0.5), Point2::new(0.8, 1.6)),
        ];
        let w = build_weights(&links, &grid, 0.1);
        let y = vec![0.0; w.num_links()];
        let img = solve_image(&w, &grid, &y, &RtiParams::default()).unwrap();
        assert!(img.values.iter().all(|v| *v == 0.0));
    }

    /// Scalar closed form: w = 2, C_x = 1, sigma2_M = 0.5, y = 3
    /// => x = 2*3 / (4 + 0.5) = 1.333...
    #[test]
    fn scalar_closed_form() {
        let grid = single_voxel_grid();
        let w = manual_weights(
            vec![WeightRow {
                value: 2.0,
                voxels: vec![0],
            }],
            1,
        );
        let params = RtiParams {
            excess_path_len_m: 0.05,
            reg_weight: 0.5,
            prior_variance: 1.0,
            corr_distance_m: 1.0,
        };
        let img = solve_image(&w, &grid, &[3.0], &params).unwrap();
        assert_relative_eq!(img.values[0], 6.0 / 4.5, max_relative = 1e-12);
    }

    #[test]
    fn vanishing_regularization_matches_least_squares_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut done = 0;
        let mut attempts = 0;
        while done < 20 {
            attempts += 1;
            assert!(
                attempts < 400,
                "could not draw enough well-conditioned systems"
            );
            let m = rng.random_range(2..=25);
            let l = rng.random_range(m..=25);
            let grid = VoxelGrid::new(Point2::new(0.0, 0.0), 0.5, m, 1);
            let rows: Vec<WeightRow> = (0..l)
                .map(|r| {
                    let mut voxels: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.5)).collect();
                    if r < m && !voxels.contains(&r) {
                        // Help every voxel appear somewhere.
                        voxels.push(r);
                        voxels.sort_unstable();
                    }
                    if voxels.is_empty() {
                        voxels.push(rng.random_range(0..m));
                    }
                    WeightRow {
                        value: rng.random_range(0.5..3.0),
                        voxels,
                    }
                })
                .collect();
            let w = manual_weights(rows, m);
            let y: Vec<f64> = (0..l).map(|_| rng.random_range(-2.0..4.0)).collect();

            let dense: Vec<Vec<f64>> = (0..l)
                .map(|r| (0..m).map(|i| w.entry(r, i)).collect())
                .collect();
            // Redraw when the sampled system is ill-conditioned; the
            // comparison only makes sense on well-conditioned instances.
            let Some(oracle) = least_squares_oracle(&dense, &y) else {
                continue;
            };
            let params = RtiParams {
                excess_path_len_m: 0.05,
                reg_weight: 1e-12,
                prior_variance: 1.0,
                corr_distance_m: 0.5,
            };
            let img = solve_image(&w, &grid, &y, &params).unwrap();
            let num: f64 = img
                .values
                .iter()
                .zip(oracle.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let den: f64 = oracle.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-30);
            assert!(num / den < 1e-6, "relative error {}", num / den);
            done += 1;
        }
    }

    #[test]
    fn disabled_regularization_on_rank_deficient_system_errors() {
        let grid = VoxelGrid::new(Point2::new(0.0, 0.0), 0.5, 2, 1);
        // One link covering both voxels: rank 1 < M = 2.
        let w = manual_weights(
            vec![WeightRow {
                value: 1.0,
                voxels: vec![0, 1],
            }],
            2,
        );
        let params = RtiParams {
            reg_weight: 0.0,
            ..RtiParams::default()
        };
        assert!(matches!(
            solve_image(&w, &grid, &[1.0], &params),
            Err(RtiError::SingularSystem)
        ));
    }

    /// For y = W x_true with full-column-rank W and vanishing regularization,
    /// the estimate recovers x_true.
    #[test]
    fn solver_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let m = 12;
        let l = 30;
        let grid = VoxelGrid::new(Point2::new(0.0, 0.0), 0.4, 4, 3);
        let rows: Vec<WeightRow> = (0..l)
            .map(|r| {
                let mut voxels: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.4)).collect();
                if !voxels.contains(&(r % m)) {
                    voxels.push(r % m);
                    voxels.sort_unstable();
                }
                WeightRow {
                    value: rng.random_range(0.5..2.0),
                    voxels,
                }
            })
            .collect();
        let w = manual_weights(rows, m);
        let x_true: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..3.0)).collect();
        let y: Vec<f64> = (0..l)
            .map(|r| (0..m).map(|i| w.entry(r, i) * x_true[i]).sum())
            .collect();
        let params = RtiParams {
            reg_weight: 1e-10,
            ..RtiParams::default()
        };
        let img = solve_image(&w, &grid, &y, &params).unwrap();
        for (got, want) in img.values.iter().zip(x_true.iter()) {
            assert_relative_eq!(got, want, max_relative = 1e-5, epsilon = 1e-7);
        }
    }

    /// The image norm shrinks monotonically as regularization grows.
    #[test]
    fn regularization_damps_the_image() {
        let grid = VoxelGrid::new(Point2::new(0.0, 0.0), 0.3, 6, 5);
        let links: Vec<LinkGeometry> = (0..8)
            .map(|k| {
                LinkGeometry::new(
                    Point2::new(-0.2, 0.1 + 0.2 * k as f64),
                    Point2::new(2.0, 1.6 - 0.2 * k as f64),
                )
            })
            .collect();
        let w = build_weights(&links, &grid, 0.2);
        let y: Vec<f64> = (0..w.num_links())
            .map(|k| (k as f64 * 0.7).sin().abs() * 5.0)
            .collect();
        let mut prev_norm = f64::INFINITY;
        for reg in [1e-3, 1e-2, 1e-1, 1.0, 10.0] {
            let params = RtiParams {
                reg_weight: reg,
                ..RtiParams::default()
            };
            let img = solve_image(&w, &grid, &y, &params).unwrap();
            let norm: f64 = img.values.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm <= prev_norm + 1e-12, "norm {norm} grew at reg {reg}");
            prev_norm = norm;
        }
    }

    /// Scaling y by c > 0 scales the image by c and leaves the argmax voxel
    /// unchanged.
    #[test]
    fn argmax_invariant_under_measurement_scaling() {
        let grid = VoxelGrid::new(Point2::new(0.0, 0.0), 0.3, 6, 6);
        let links: Vec<LinkGeometry> = (0..10)
            .map(|k| {
                LinkGeometry::new(
                    Point2::new(-0.3, 0.15 * k as f64),
                    Point2::new(2.1, 1.8 - 0.15 * k as f64),
                )
            })
            .collect();
        let w = build_weights(&links, &grid, 0.3);
        let y: Vec<f64> = (0..w.num_links())
            .map(|k| if k % 3 == 0 { 8.0 } else { 0.5 })
            .collect();
        let base = solve_image(&w, &grid, &y, &RtiParams::default()).unwrap();
        let (base_peak, _) = localize(&base);
        for c in [2.0, 3.7, 0.25] {
            let scaled_y: Vec<f64> = y.iter().map(|v| c * v).collect();
            let scaled = solve_image(&w, &grid, &scaled_y, &RtiParams::default()).unwrap();
            let (peak, _) = localize(&scaled);
            assert_eq!(peak, base_peak, "argmax moved at c = {c}");
            for (s, b) in scaled.values.iter().zip(base.values.iter()) {
                assert_relative_eq!(*s, c * b, max_relative = 1e-9, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn localize_single_voxel_and_explicit_argmax() {
        let grid = single_voxel_grid();
        let img = ImageVector {
            values: vec![0.7],
            grid,
        };
        let (p, v) = localize(&img);
        assert_eq!(p, grid.centroid(0));
        assert_eq!(v, 0.7);

        let grid = VoxelGrid::new(Point2::new(0.0, 0.0), 0.5, 8, 10);
        let mut values = vec![0.1; grid.num_voxels()];
        let target = grid.index(3, 7);
        values[target] = 9.0;
        let img = ImageVector { values, grid };
        let (p, v) = localize(&img);
        assert_eq!(p, grid.centroid(target));
        assert_eq!(v, 9.0);
    }

    #[test]
    fn localize_tie_breaks_to_lowest_index() {
        let grid = VoxelGrid::new(Point2::new(0.0, 0.0), 0.5, 3, 3);
        let mut values = vec![0.0; 9];
        values[2] = 5.0;
        values[7] = 5.0;
        let img = ImageVector { values, grid };
        let (p, _) = localize(&img);
        assert_eq!(p, grid.centroid(2));
    }

    #[test]
    fn localization_error_examples() {
        assert_eq!(
            localization_error(Point2::new(1.0, 1.0), Point2::new(1.0, 1.0)),
            0.0
        );
        assert_relative_eq!(
            localization_error(Point2::new(0.0, 0.0), Point2::new(0.3, 0.4)),
            0.5
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let grid = single_voxel_grid();
        let w = manual_weights(
            vec![WeightRow {
                value: 1.0,
                voxels: vec![0],
            }],
            1,
        );
        assert!(matches!(
            solve_image(&w, &grid, &[1.0, 2.0], &RtiParams::default()),
            Err(RtiError::DimensionMismatch { .. })
        ));
    }
}
