//! Uniform sampling lattices and real-valued fields on them.

use rayon::prelude::*;

use crate::error::{BrtError, Result};
use crate::geometry::Vec2;

/// Uniform rectangular lattice. Sample (row n, column m) sits at
/// `(t0 + m*dt, y0 + n*dy)`: `t` increases with the column index and `y`
/// with the row index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub t0: f64,
    pub y0: f64,
    pub dt: f64,
    pub dy: f64,
    pub nt: usize,
    pub ny: usize,
}

impl Grid2D {
    pub fn new(t0: f64, y0: f64, dt: f64, dy: f64, nt: usize, ny: usize) -> Result<Grid2D> {
        if !(dt > 0.0 && dy > 0.0) {
            return Err(BrtError::InvalidArgument(format!(
                "sample spacing must be positive, got dt={dt}, dy={dy}"
            )));
        }
        if nt == 0 || ny == 0 {
            return Err(BrtError::InvalidArgument(format!(
                "grid must have at least one sample per axis, got nt={nt}, ny={ny}"
            )));
        }
        Ok(Grid2D { t0, y0, dt, dy, nt, ny })
    }

    /// Pixel-center lattice covering `[tmin, tmax] x [ymin, ymax]` with
    /// `nt x ny` cells, sample points at the cell centers.
    pub fn from_extents(
        tmin: f64,
        tmax: f64,
        nt: usize,
        ymin: f64,
        ymax: f64,
        ny: usize,
    ) -> Result<Grid2D> {
        let dt = (tmax - tmin) / nt as f64;
        let dy = (ymax - ymin) / ny as f64;
        Grid2D::new(tmin + dt / 2.0, ymin + dy / 2.0, dt, dy, nt, ny)
    }

    pub fn point(&self, n: usize, m: usize) -> Vec2 {
        Vec2::new(self.t0 + m as f64 * self.dt, self.y0 + n as f64 * self.dy)
    }

    pub fn t(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt
    }

    pub fn y(&self, n: usize) -> f64 {
        self.y0 + n as f64 * self.dy
    }

    pub fn len(&self) -> usize {
        self.nt * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Real-valued samples on a [`Grid2D`], stored row-major (ny rows, nt cols).
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub grid: Grid2D,
    values: Vec<f64>,
}

impl Field2D {
    pub fn zeros(grid: Grid2D) -> Field2D {
        Field2D { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Field2D> {
        if values.len() != grid.len() {
            return Err(BrtError::GridMismatch(format!(
                "expected {} values for {}x{} grid, got {}",
                grid.len(),
                grid.ny,
                grid.nt,
                values.len()
            )));
        }
        Ok(Field2D { grid, values })
    }

    /// Pointwise evaluation of `f` at every lattice point, parallelized over
    /// rows. Each sample is computed independently, so the result is
    /// identical to sequential evaluation.
    pub fn sample<F>(grid: Grid2D, f: F) -> Field2D
    where
        F: Fn(Vec2) -> f64 + Sync,
    {
        let mut values = vec![0.0; grid.len()];
        values
            .par_chunks_mut(grid.nt)
            .enumerate()
            .for_each(|(n, row)| {
                let y = grid.y(n);
                for (m, v) in row.iter_mut().enumerate() {
                    *v = f(Vec2::new(grid.t(m), y));
                }
            });
        Field2D { grid, values }
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.values[n * self.grid.nt + m]
    }

    pub fn set(&mut self, n: usize, m: usize, v: f64) {
        self.values[n * self.grid.nt + m] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.values[n * self.grid.nt..(n + 1) * self.grid.nt]
    }

    pub fn column(&self, m: usize) -> Vec<f64> {
        (0..self.grid.ny).map(|n| self.get(n, m)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Extracts the sub-field with rows `[n0, n0+ny)` and columns
    /// `[m0, m0+nt)`, keeping physical coordinates.
    pub fn crop(&self, n0: usize, m0: usize, ny: usize, nt: usize) -> Result<Field2D> {
        if n0 + ny > self.grid.ny || m0 + nt > self.grid.nt {
            return Err(BrtError::GridMismatch(format!(
                "crop ({n0}+{ny}, {m0}+{nt}) exceeds {}x{}",
                self.grid.ny, self.grid.nt
            )));
        }
        let grid = Grid2D::new(
            self.grid.t(m0),
            self.grid.y(n0),
            self.grid.dt,
            self.grid.dy,
            nt,
            ny,
        )?;
        let mut values = Vec::with_capacity(nt * ny);
        for n in n0..n0 + ny {
            values.extend_from_slice(&self.values[n * self.grid.nt + m0..n * self.grid.nt + m0 + nt]);
        }
        Ok(Field2D { grid, values })
    }

    /// Flips the row order, negating the y axis layout. The grid origin is
    /// updated so every sample keeps its physical coordinate.
    pub fn flip_rows(&self) -> Field2D {
        let g = self.grid;
        let mut values = Vec::with_capacity(g.len());
        for n in (0..g.ny).rev() {
            values.extend_from_slice(self.row(n));
        }
        // Row 0 of the flipped field holds the old top row; to keep "y grows
        // with row index" the coordinates are mirrored about the old center.
        let grid = Grid2D {
            y0: -(g.y0 + (g.ny - 1) as f64 * g.dy),
            ..g
        };
        Field2D { grid, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_center_layout() {
        // Sampling convention of the reference experiments: 400 cells over
        // [-0.75, 0.75] gives dt = 0.00375 with the first center half a cell in.
        let g = Grid2D::from_extents(-0.75, 0.75, 400, -1.0, 1.0, 600).unwrap();
        assert!((g.dt - 0.00375).abs() < 1e-15);
        assert!((g.t0 - (-0.75 + 0.001875)).abs() < 1e-15);
        assert!((g.dy - 1.0 / 300.0).abs() < 1e-15);
    }

    #[test]
    fn sample_matches_sequential() {
        let g = Grid2D::new(0.0, 0.0, 0.5, 0.25, 7, 5).unwrap();
        let f = |p: Vec2| 3.0 * p.t - p.y * p.y;
        let field = Field2D::sample(g, f);
        for n in 0..g.ny {
            for m in 0..g.nt {
                assert_eq!(field.get(n, m), f(g.point(n, m)));
            }
        }
    }

    #[test]
    fn crop_keeps_coordinates() {
        let g = Grid2D::new(-1.0, 2.0, 0.1, 0.2, 10, 8).unwrap();
        let f = Field2D::sample(g, |p| p.t + 10.0 * p.y);
        let c = f.crop(2, 3, 4, 5).unwrap();
        for n in 0..4 {
            for m in 0..5 {
                assert_eq!(c.get(n, m), f.get(n + 2, m + 3));
                let (a, b) = (c.grid.point(n, m), g.point(n + 2, m + 3));
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn flip_rows_mirrors_y() {
        let g = Grid2D::new(0.0, -0.4, 0.1, 0.2, 3, 4).unwrap();
        let f = Field2D::sample(g, |p| p.y + 0.01 * p.t);
        let flipped = f.flip_rows();
        for n in 0..g.ny {
            for m in 0..g.nt {
                assert_eq!(flipped.get(n, m), f.get(g.ny - 1 - n, m));
                // physical y of flipped sample = -(physical y of source)
                assert!((flipped.grid.y(n) + f.grid.y(g.ny - 1 - n)).abs() < 1e-14);
            }
        }
    }
}
