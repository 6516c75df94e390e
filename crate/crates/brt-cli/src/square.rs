//! Closed-form data for a centered square phantom, the reference object of
//! the limited-data reconstruction experiment. Squares are not expressible
//! as ellipse phantoms, so their transforms are evaluated directly.

use brt_core::geometry::Vec2;
use brt_core::grid::{Field2D, Grid2D};
use brt_core::Direction;

/// Axis-aligned square `[-h, h]^2` with unit density.
#[derive(Debug, Clone, Copy)]
pub struct Square {
    pub half_width: f64,
}

impl Square {
    pub fn new(half_width: f64) -> Square {
        Square { half_width }
    }

    pub fn contains(&self, x: Vec2) -> bool {
        x.t.abs() <= self.half_width && x.y.abs() <= self.half_width
    }

    /// Half-line integral from `x` along `d` (unit vector).
    pub fn cbt(&self, x: Vec2, d: Vec2) -> f64 {
        let h = self.half_width;
        let mut lo = 0.0f64;
        let mut hi = f64::INFINITY;
        for (p, q) in [(x.t, d.t), (x.y, d.y)] {
            if q.abs() < 1e-300 {
                if p.abs() > h {
                    return 0.0;
                }
            } else {
                let (a, b) = ((-h - p) / q, (h - p) / q);
                lo = lo.max(a.min(b));
                hi = hi.min(a.max(b));
            }
        }
        (hi - lo).max(0.0)
    }

    pub fn brt(&self, x: Vec2, theta_i: &Direction, theta_j: &Direction) -> f64 {
        self.cbt(x, theta_i.vec()) + self.cbt(x, theta_j.vec())
    }

    pub fn sample_brt(&self, grid: Grid2D, theta_i: &Direction, theta_j: &Direction) -> Field2D {
        let (ti, tj) = (theta_i.vec(), theta_j.vec());
        Field2D::sample(grid, |x| self.cbt(x, ti) + self.cbt(x, tj))
    }

    pub fn rasterize(&self, grid: Grid2D) -> Field2D {
        Field2D::sample(grid, |x| if self.contains(x) { 1.0 } else { 0.0 })
    }

    /// Support extent along a unit vector (for the circumscribed
    /// parallelogram).
    pub fn extent_along(&self, u: Vec2) -> f64 {
        2.0 * self.half_width * (u.t.abs() + u.y.abs())
    }
}
