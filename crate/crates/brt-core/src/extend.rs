//! Extension of truncated CBT/BRT data to larger support.
//!
//! Data behind the support are constant along the integration direction and
//! equal Radon values, so new samples are synthesized by fractionally
//! shifting the boundary row and column of the measured rectangle.

use crate::error::{BrtError, Result};
use crate::grid::{Field2D, Grid2D};
use crate::spectral::{non_int_shift, Mat};

/// Inputs for the quadrant extension: the shear `lambda = (dt/dy) tan(xi)`,
/// the requested sample counts in `-t` and `-y`, and the interpolation pad.
#[derive(Debug, Clone, Copy)]
pub struct ExtensionPlan {
    pub lambda: f64,
    pub m_t: usize,
    pub m_y: usize,
    pub pad: usize,
    /// Relative tolerance of the truncation (corner) check. Analytic data
    /// are exactly zero there; noisy pipelines widen this to their noise
    /// floor.
    pub corner_tol: f64,
}

impl ExtensionPlan {
    pub fn new(lambda: f64, m_t: usize, m_y: usize, pad: usize) -> Result<ExtensionPlan> {
        if !lambda.is_finite() {
            return Err(BrtError::InvalidArgument(format!(
                "lambda must be finite, got {lambda}"
            )));
        }
        Ok(ExtensionPlan { lambda, m_t, m_y, pad, corner_tol: 1e-9 })
    }

    pub fn with_corner_tol(mut self, corner_tol: f64) -> ExtensionPlan {
        self.corner_tol = corner_tol;
        self
    }

    /// Plan for a grid and scatter angle, with `m_y` sized so the first
    /// shift pass stays clear of circular wraparound
    /// (`m_y >= ceil(lambda m_t)`).
    pub fn for_grid(grid: &Grid2D, xi: f64, m_t: usize, pad: usize) -> Result<ExtensionPlan> {
        let lambda = grid.dt / grid.dy * xi.abs().tan();
        let m_y = (lambda * m_t as f64).ceil() as usize + pad;
        ExtensionPlan::new(lambda, m_t, m_y, pad)
    }
}

/// Extends CBT data sampled over a rectangle into the three quadrants
/// `-t` (Q2), `-t,-y` (Q3), and `-y` (Q4), given the first column `b_y` and
/// first row `b_t` of the data matrix. Requires `lambda > 0`; callers flip
/// their data first for other orientations. The first row and column must
/// hold no samples interior to the support.
///
/// Returns `(q2, q3, q4)` with shapes `ny x m_t`, `m_y x m_t`, `m_y x nt`.
pub fn cbt_extend(b_y: &[f64], b_t: &[f64], plan: &ExtensionPlan) -> Result<(Mat, Mat, Mat)> {
    let (ny, nt) = (b_y.len(), b_t.len());
    let (m_t, m_y, p) = (plan.m_t, plan.m_y, plan.pad);
    let lambda = plan.lambda;
    if !(lambda > 0.0) {
        return Err(BrtError::NonPositiveLambda(lambda));
    }
    if nt <= p || ny <= p {
        return Err(BrtError::InvalidArgument(format!(
            "pad {p} needs at least pad+1 samples per axis (got {ny} x {nt})"
        )));
    }

    // Pass 1: expand in -t by shifting the first column. The fill samples
    // come from the first row, reversed, as the approximate continuation of
    // the column signal below its start.
    let q2 = if m_t == 0 {
        Mat::zeros(ny, 0)
    } else {
        let fill: Vec<f64> = b_t[1..=p].iter().rev().copied().collect();
        let shifts: Vec<f64> = (0..m_t)
            .map(|k| lambda * (k as f64 - m_t as f64))
            .collect();
        let w = non_int_shift(b_y, &shifts, p + m_y, &fill);
        let mut q2 = Mat::zeros(ny, m_t);
        for r in 0..ny {
            for c in 0..m_t {
                q2.set(r, c, w.get(r, c));
            }
        }
        q2
    };

    // Pass 2: expand the combined bottom row [Q2 B] in -y.
    let (q3, q4) = if m_y == 0 {
        (Mat::zeros(0, m_t), Mat::zeros(0, nt))
    } else {
        let mut row: Vec<f64> = Vec::with_capacity(m_t + nt);
        if m_t > 0 {
            row.extend_from_slice(q2.row(0));
        }
        row.extend_from_slice(b_t);
        let fill: Vec<f64> = if m_t > 0 {
            (1..=p.min(ny - 1)).rev().map(|r| q2.get(r, 0)).collect()
        } else {
            Vec::new()
        };
        let shifts: Vec<f64> = (0..m_y)
            .map(|k| (k as f64 - m_y as f64) / lambda)
            .collect();
        let pad2 = p + (m_y as f64 / lambda).ceil() as usize;
        let w = non_int_shift(&row, &shifts, pad2, &fill);
        let mut q3 = Mat::zeros(m_y, m_t);
        let mut q4 = Mat::zeros(m_y, nt);
        for r in 0..m_y {
            for c in 0..m_t {
                q3.set(r, c, w.get(c, r));
            }
            for c in 0..nt {
                q4.set(r, c, w.get(m_t + c, r));
            }
        }
        (q3, q4)
    };

    Ok((q2, q3, q4))
}

/// Extends truncated BRT data sampled with `theta_i = (-1, 0)` and
/// `theta_j = (cos xi_j, sin xi_j)`, `0 < |xi_j| < pi/2`.
///
/// The last column holds Radon values of `theta_i` and is repeated `m_t`
/// times to the right; the first column and the boundary row facing the
/// `theta_j` shadow feed the quadrant extension. For `xi_j < 0` the data are
/// flipped vertically, extended, and flipped back, so the new rows land on
/// the far side.
pub fn brt_extend(g: &Field2D, xi_j: f64, plan: &ExtensionPlan) -> Result<Field2D> {
    if xi_j == 0.0 {
        return Err(BrtError::DegenerateScatterAngle);
    }
    if xi_j.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(BrtError::InvalidArgument(format!(
            "|xi_j| must be below pi/2, got {xi_j}"
        )));
    }
    let (ny, nt) = (g.grid.ny, g.grid.nt);
    let tol = plan.corner_tol * g.max_abs();
    for corner in [g.get(0, nt - 1), g.get(ny - 1, nt - 1)] {
        if corner.abs() > tol {
            return Err(BrtError::DataNotTruncated { value: corner, tol });
        }
    }

    if xi_j < 0.0 {
        let flipped = g.flip_rows();
        let extended = brt_extend_positive(&flipped, -xi_j, plan)?;
        let back = extended.flip_rows();
        // flip_rows mirrors coordinates; restore the physical origin of the
        // unflipped layout (new rows sit above the original top row).
        let grid = Grid2D { y0: g.grid.y0, ..back.grid };
        return Field2D::from_values(grid, back.values().to_vec());
    }
    brt_extend_positive(g, xi_j, plan)
}

fn brt_extend_positive(g: &Field2D, xi_j: f64, plan: &ExtensionPlan) -> Result<Field2D> {
    let grid = g.grid;
    let (ny, nt) = (grid.ny, grid.nt);
    let lambda = grid.dt / grid.dy * xi_j.tan();
    let plan = ExtensionPlan { lambda, ..*plan };
    let (m_t, m_y) = (plan.m_t, plan.m_y);

    let b_y = g.column(0);
    let b_t = g.row(0).to_vec();
    let (q2, q3, q4) = cbt_extend(&b_y, &b_t, &plan)?;

    let nt_out = m_t + nt + m_t; // left extension, data, right repetition
    let ny_out = m_y + ny;
    let out_grid = Grid2D::new(
        grid.t0 - m_t as f64 * grid.dt,
        grid.y0 - m_y as f64 * grid.dy,
        grid.dt,
        grid.dy,
        nt_out,
        ny_out,
    )?;
    let mut out = Field2D::zeros(out_grid);

    for r in 0..m_y {
        for c in 0..m_t {
            out.set(r, c, q3.get(r, c));
        }
        for c in 0..nt {
            out.set(r, m_t + c, q4.get(r, c));
        }
        // below the right repetition both transforms vanish; leave zeros
    }
    for n in 0..ny {
        for c in 0..m_t {
            out.set(m_y + n, c, q2.get(n, c));
        }
        for c in 0..nt {
            out.set(m_y + n, m_t + c, g.get(n, c));
        }
        let last = g.get(n, nt - 1);
        for c in 0..m_t {
            out.set(m_y + n, m_t + nt + c, last);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_inputs_give_zero_quadrants() {
        let plan = ExtensionPlan::new(0.4, 12, 10, 4).unwrap();
        let (q2, q3, q4) = cbt_extend(&[0.0; 32], &[0.0; 24], &plan).unwrap();
        assert!(q2.data().iter().all(|&v| v.abs() < 1e-13));
        assert!(q3.data().iter().all(|&v| v.abs() < 1e-13));
        assert!(q4.data().iter().all(|&v| v.abs() < 1e-13));
        assert_eq!((q2.rows, q2.cols), (32, 12));
        assert_eq!((q3.rows, q3.cols), (10, 12));
        assert_eq!((q4.rows, q4.cols), (10, 24));
    }

    #[test]
    fn degenerate_request_gives_empty_quadrants() {
        let plan = ExtensionPlan::new(0.7, 0, 0, 2).unwrap();
        let (q2, q3, q4) = cbt_extend(&[1.0; 8], &[1.0; 8], &plan).unwrap();
        assert_eq!((q2.rows, q2.cols), (8, 0));
        assert_eq!((q3.rows, q3.cols), (0, 0));
        assert_eq!((q4.rows, q4.cols), (0, 8));
    }

    #[test]
    fn negative_lambda_rejected() {
        let plan = ExtensionPlan::new(-0.3, 4, 4, 2).unwrap();
        assert!(matches!(
            cbt_extend(&[0.0; 8], &[0.0; 8], &plan),
            Err(BrtError::NonPositiveLambda(_))
        ));
    }
}
