use serde::{Deserialize, Serialize};

use crate::geometry::{Point2, Rect};

/// Row-major voxel grid over the monitored area. Voxel i maps to
/// (ix, iy) = (i % nx, i / nx) with centroid origin + (ix + 0.5, iy + 0.5) * voxel_size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoxelGrid {
    pub origin: Point2,
    pub voxel_size: f64,
    pub nx: usize,
    pub ny: usize,
}

impl VoxelGrid {
    pub fn new(origin: Point2, voxel_size: f64, nx: usize, ny: usize) -> Self {
        assert!(voxel_size > 0.0, "voxel_size must be > 0");
        assert!(nx > 0 && ny > 0, "grid must have at least one voxel");
        Self {
            origin,
            voxel_size,
            nx,
            ny,
        }
    }

    /// Cover `area` plus `margin_voxels` voxels on every side.
    pub fn covering(area: Rect, voxel_size: f64, margin_voxels: usize) -> Self {
        let m = margin_voxels as f64 * voxel_size;
        let origin = Point2::new(area.min.x - m, area.min.y - m);
        let nx = ((area.width() + 2.0 * m) / voxel_size).ceil() as usize;
        let ny = ((area.height() + 2.0 * m) / voxel_size).ceil() as usize;
        Self::new(origin, voxel_size, nx.max(1), ny.max(1))
    }

    pub fn num_voxels(&self) -> usize {
        self.nx * self.ny
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.nx && iy < self.ny);
        iy * self.nx + ix
    }

    pub fn coords_of(&self, i: usize) -> (usize, usize) {
        (i % self.nx, i / self.nx)
    }

    pub fn centroid(&self, i: usize) -> Point2 {
        let (ix, iy) = self.coords_of(i);
        Point2::new(
            self.origin.x + (ix as f64 + 0.5) * self.voxel_size,
            self.origin.y + (iy as f64 + 0.5) * self.voxel_size,
        )
    }
}
