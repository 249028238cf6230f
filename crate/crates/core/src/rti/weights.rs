use serde::{Deserialize, Serialize};

use super::VoxelGrid;
use crate::geometry::Point2;

/// Geometry of one static link (transmitter and reference receiver).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub tx: Point2,
    pub rx: Point2,
}

impl LinkGeometry {
    pub fn new(tx: Point2, rx: Point2) -> Self {
        debug_assert!(tx != rx, "link endpoints must differ");
        Self { tx, rx }
    }

    pub fn length(&self) -> f64 {
        self.tx.distance(self.rx)
    }
}

/// Area of the weighting ellipse with foci at the link endpoints and excess
/// path length `lambda`: semi-axes a = (d + lambda) / 2 and
/// b = sqrt((d + lambda)^2 - d^2) / 2.
pub fn ellipse_area(link_len: f64, lambda: f64) -> f64 {
    let a = (link_len + lambda) / 2.0;
    let b = ((link_len + lambda).powi(2) - link_len.powi(2)).sqrt() / 2.0;
    std::f64::consts::PI * a * b
}

/// Sparse L x M link-voxel weights. Every nonzero in row l equals
/// 1 / A_l; the nonzero pattern is exactly the set of in-ellipse voxels.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    pub num_voxels: usize,
    pub rows: Vec<WeightRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightRow {
    /// The common nonzero value 1 / A_l for this link.
    pub value: f64,
    /// Indices of in-ellipse voxels, ascending.
    pub voxels: Vec<usize>,
}

impl WeightMatrix {
    pub fn num_links(&self) -> usize {
        self.rows.len()
    }

    /// Dense entry accessor, mainly for tests and small systems.
    pub fn entry(&self, l: usize, i: usize) -> f64 {
        let row = &self.rows[l];
        if row.voxels.binary_search(&i).is_ok() {
            row.value
        } else {
            0.0
        }
    }
}

/// A voxel centroid belongs to link l when its distances to the endpoints
/// satisfy d_tx + d_rx < d_l + lambda; its weight is then 1 / A_l.
/// Rows may be empty when a link's ellipse misses the grid.
pub fn build_weights(links: &[LinkGeometry], grid: &VoxelGrid, lambda: f64) -> WeightMatrix {
    assert!(lambda > 0.0, "lambda must be > 0");
    let m = grid.num_voxels();
    let centroids: Vec<Point2> = (0..m).map(|i| grid.centroid(i)).collect();
    let rows = links
        .iter()
        .map(|link| {
            let d = link.length();
            let value = 1.0 / ellipse_area(d, lambda);
            let voxels = centroids
                .iter()
                .enumerate()
                .filter(|(_, c)| c.distance(link.tx) + c.distance(link.rx) < d + lambda)
                .map(|(i, _)| i)
                .collect();
            WeightRow { value, voxels }
        })
        .collect();
    WeightMatrix {
        num_voxels: m,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn link_midpoint_voxel_gets_inverse_area_weight() {
        // Single-voxel grid centred on the midpoint of a 4 m link.
        let grid = VoxelGrid::new(Point2::new(1.925, -0.075), 0.15, 1, 1);
        let link = LinkGeometry::new(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0));
        let w = build_weights(&[link], &grid, 0.05);
        assert_eq!(w.rows[0].voxels, vec![0]);
        assert_relative_eq!(
            w.rows[0].value,
            1.0 / ellipse_area(4.0, 0.05),
            max_relative = 1e-12
        );
    }

    #[test]
    fn far_voxel_gets_zero() {
        let grid = VoxelGrid::new(Point2::new(9.9, 9.9), 0.2, 1, 1);
        let link = LinkGeometry::new(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0));
        let w = build_weights(&[link], &grid, 0.05);
        assert!(w.rows[0].voxels.is_empty());
        assert_eq!(w.entry(0, 0), 0.0);
    }

    /// Oracle: evaluate the ellipse inequality directly for every (l, i).
    #[test]
    fn random_links_match_bruteforce_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let grid = VoxelGrid::new(
                Point2::new(rng.random_range(-2.0..0.0), rng.random_range(-2.0..0.0)),
                rng.random_range(0.1..0.4),
                rng.random_range(3..20),
                rng.random_range(3..20),
            );
            let links: Vec<LinkGeometry> = (0..8)
                .map(|_| {
                    LinkGeometry::new(
                        Point2::new(rng.random_range(-3.0..6.0), rng.random_range(-3.0..6.0)),
                        Point2::new(rng.random_range(-3.0..6.0), rng.random_range(6.1..9.0)),
                    )
                })
                .collect();
            let lambda = rng.random_range(0.02..0.5);
            let w = build_weights(&links, &grid, lambda);

            for (l, link) in links.iter().enumerate() {
                let d = link.tx.distance(link.rx);
                let a_l = ellipse_area(d, lambda);
                for i in 0..grid.num_voxels() {
                    let c = grid.centroid(i);
                    let inside = c.distance(link.tx) + c.distance(link.rx) < d + lambda;
                    let expected = if inside { 1.0 / a_l } else { 0.0 };
                    assert_eq!(w.entry(l, i), expected, "link {l} voxel {i}");
                }
            }
        }
    }

    proptest! {
        /// Swapping tx and rx leaves the weight row unchanged.
        #[test]
        fn weight_symmetry(
            txx in -3.0..3.0f64, txy in -3.0..3.0f64,
            rxx in 4.0..8.0f64, rxy in -3.0..3.0f64,
            lambda in 0.02..0.6f64,
        ) {
            let grid = VoxelGrid::new(Point2::new(-1.0, -1.0), 0.3, 12, 12);
            let fwd = build_weights(&[LinkGeometry::new(Point2::new(txx, txy), Point2::new(rxx, rxy))], &grid, lambda);
            let rev = build_weights(&[LinkGeometry::new(Point2::new(rxx, rxy), Point2::new(txx, txy))], &grid, lambda);
            prop_assert_eq!(&fwd.rows[0].voxels, &rev.rows[0].voxels);
            prop_assert_eq!(fwd.rows[0].value, rev.rows[0].value);
        }

        /// Growing lambda never removes an in-ellipse voxel.
        #[test]
        fn ellipse_monotone_in_lambda(l1 in 0.02..0.3f64, grow in 0.01..0.5f64) {
            let grid = VoxelGrid::new(Point2::new(-1.0, -1.0), 0.25, 14, 14);
            let link = LinkGeometry::new(Point2::new(0.0, 0.0), Point2::new(2.5, 0.4));
            let narrow = build_weights(&[link], &grid, l1);
            let wide = build_weights(&[link], &grid, l1 + grow);
            for v in &narrow.rows[0].voxels {
                prop_assert!(wide.rows[0].voxels.contains(v));
            }
        }
    }
}
