use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::IoError;
use crate::rti::ImageVector;

/// Write the image as an 8-bit binary PGM (P5) with min-max normalization.
/// Rows run top-down from the largest y, so images render with north up.
pub fn write_pgm(path: &Path, image: &ImageVector) -> Result<(), IoError> {
    let io = |e| IoError::io(path, e);
    let grid = &image.grid;
    let (min, max) = image
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
    let span = max - min;

    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    write!(w, "P5\n{} {}\n255\n", grid.nx, grid.ny).map_err(io)?;
    let mut row = Vec::with_capacity(grid.nx);
    for iy in (0..grid.ny).rev() {
        row.clear();
        for ix in 0..grid.nx {
            let v = image.values[grid.index(ix, iy)];
            let byte = if span > 0.0 {
                ((v - min) / span * 255.0).round() as u8
            } else {
                0
            };
            row.push(byte);
        }
        w.write_all(&row).map_err(io)?;
    }
    w.flush().map_err(io)
}
