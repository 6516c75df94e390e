//! End-to-end chains: extend truncated data, filter to bounded support,
//! mask the support region, and invert.

use crate::error::{BrtError, Result};
use crate::extend::{brt_extend, ExtensionPlan};
use crate::filter::{
    apply_psf, zero_boundary_frame, zero_outside_support, BoundedSupportRegion, FilterSpec,
};
use crate::geometry::Parallelogram;
use crate::grid::{Field2D, Grid2D};
use crate::invert::brt_invert_filtered;

/// Shift reach of the PSF along each axis, in physical units.
fn psf_reach(spec: &FilterSpec) -> (f64, f64) {
    let ti = spec.theta_i.vec();
    let tj = spec.theta_j.vec();
    (
        spec.a_i / 2.0 * ti.t.abs() + spec.a_j / 2.0 * tj.t.abs(),
        spec.a_i / 2.0 * ti.y.abs() + spec.a_j / 2.0 * tj.y.abs(),
    )
}

/// Sizes an extension so the enlarged lattice covers the bounded support of
/// the filtered data plus the filter reach, with `pad` interpolation
/// samples. The `-y` request also absorbs the shear of the first shift pass.
pub fn plan_extension_for_region(
    grid: &Grid2D,
    region: &BoundedSupportRegion,
    spec: &FilterSpec,
    xi_j: f64,
    pad: usize,
    max_m_t: usize,
) -> Result<ExtensionPlan> {
    let (reach_t, reach_y) = psf_reach(spec);
    let ymax = region.half_extent_along_i() + reach_y;
    let t_need = region.t_reach(ymax) + 2.0 * reach_t + 8.0 * grid.dt;
    let t_lo = grid.t0 - grid.dt / 2.0;
    let t_hi = grid.t(grid.nt - 1) + grid.dt / 2.0;
    let short_lo = (t_need - (-t_lo)).max(0.0);
    let short_hi = (t_need - t_hi).max(0.0);
    let m_t = ((short_lo.max(short_hi) / grid.dt).ceil() as usize + pad).min(max_m_t);
    let lambda = grid.dt / grid.dy * xi_j.abs().tan();
    let shear_rows = (lambda * m_t as f64).ceil() as usize;
    let y_lo = grid.y0 - grid.dy / 2.0;
    let y_hi = grid.y(grid.ny - 1) + grid.dy / 2.0;
    let y_short = (ymax - (-y_lo)).max(ymax - y_hi).max(0.0);
    let m_y = shear_rows + (y_short / grid.dy).ceil() as usize + pad;
    ExtensionPlan::new(lambda, m_t, m_y, pad)
}

/// Knobs of the extend-filter chains.
#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    /// Interpolation pad of the extension shifts.
    pub pad: usize,
    /// Cap on the auto-sized `-t` extension.
    pub max_m_t: usize,
    /// Relative corner tolerance of the truncation check.
    pub corner_tol: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { pad: 16, max_m_t: 4096, corner_tol: 1e-9 }
    }
}

/// Result of the extend-filter-invert chain.
pub struct InversionOutput {
    /// Extended, PSF-filtered data with the support mask applied.
    pub filtered: Field2D,
    /// Filtered-image estimate on the extended lattice.
    pub psi: Field2D,
}

/// Extends truncated BRT data, filters with the PSF, zeroes everything
/// outside the predicted bounded-support region, and inverts with Tikhonov
/// smoothing `epsilon`.
///
/// `spec.theta_i` must be `(-1, 0)` (the extension procedure fixes the
/// incident direction); `parallelogram` is the circumscribed parallelogram
/// of the centered support for the two scatter directions.
pub fn extend_filter_invert(
    g: &Field2D,
    spec: &FilterSpec,
    parallelogram: &Parallelogram,
    epsilon: f64,
    options: &PipelineOptions,
) -> Result<InversionOutput> {
    let ti = spec.theta_i.vec();
    if (ti.t + 1.0).abs() > 1e-12 || ti.y.abs() > 1e-12 {
        return Err(BrtError::InvalidArgument(
            "extension requires theta_i = (-1, 0)".into(),
        ));
    }
    let filtered = extend_and_filter(g, spec, parallelogram, options)?;
    let psi = brt_invert_filtered(&filtered, spec.theta_i.xi(), spec.theta_j.xi(), epsilon)?;
    Ok(InversionOutput { filtered, psi })
}

/// The extension-filter-mask front half of the chain.
pub fn extend_and_filter(
    g: &Field2D,
    spec: &FilterSpec,
    parallelogram: &Parallelogram,
    options: &PipelineOptions,
) -> Result<Field2D> {
    let xi_j = spec.theta_j.xi();
    let region = BoundedSupportRegion::new(parallelogram, spec);
    let plan = plan_extension_for_region(
        &g.grid,
        &region,
        spec,
        xi_j,
        options.pad,
        options.max_m_t,
    )?
    .with_corner_tol(options.corner_tol);
    let capped = plan.m_t == options.max_m_t;
    let extended = brt_extend(g, xi_j, &plan)?;
    let (reach_t, reach_y) = psf_reach(spec);
    let shift_pad = ((reach_t / g.grid.dt).max(reach_y / g.grid.dy)).ceil() as usize + 24;
    let filtered = apply_psf(&extended, spec, shift_pad)?;
    // When the cap clipped the extension, the support region runs past the
    // lattice and the side columns hold incomplete cancellations.
    let filtered = if capped {
        let frame_cols = (reach_t / g.grid.dt).ceil() as usize + 8;
        zero_boundary_frame(&filtered, 0, frame_cols)
    } else {
        filtered
    };
    let margin = 3.0 * g.grid.dt.max(g.grid.dy);
    Ok(zero_outside_support(&filtered, &region, margin))
}

/// Difference `a - b` of two fields on the union of their lattices, filling
/// zeros where one field has no samples. Both must share spacings and sit on
/// the same lattice.
pub fn difference_on_union(a: &Field2D, b: &Field2D) -> Result<Field2D> {
    let (ga, gb) = (a.grid, b.grid);
    if (ga.dt - gb.dt).abs() > 1e-12 || (ga.dy - gb.dy).abs() > 1e-12 {
        return Err(BrtError::GridMismatch("sample spacings differ".into()));
    }
    let align_t = (gb.t0 - ga.t0) / ga.dt;
    let align_y = (gb.y0 - ga.y0) / ga.dy;
    if (align_t - align_t.round()).abs() > 1e-6 || (align_y - align_y.round()).abs() > 1e-6 {
        return Err(BrtError::GridMismatch("lattices are not aligned".into()));
    }
    let t0 = ga.t0.min(gb.t0);
    let y0 = ga.y0.min(gb.y0);
    let t_end = ga.t(ga.nt - 1).max(gb.t(gb.nt - 1));
    let y_end = ga.y(ga.ny - 1).max(gb.y(gb.ny - 1));
    let nt = ((t_end - t0) / ga.dt).round() as usize + 1;
    let ny = ((y_end - y0) / ga.dy).round() as usize + 1;
    let grid = Grid2D::new(t0, y0, ga.dt, ga.dy, nt, ny)?;
    let mut out = Field2D::zeros(grid);
    let mut add = |f: &Field2D, sign: f64| {
        let dn = ((f.grid.y0 - y0) / ga.dy).round() as usize;
        let dm = ((f.grid.t0 - t0) / ga.dt).round() as usize;
        for n in 0..f.grid.ny {
            for m in 0..f.grid.nt {
                let v = out.get(n + dn, m + dm) + sign * f.get(n, m);
                out.set(n + dn, m + dm, v);
            }
        }
    };
    add(a, 1.0);
    add(b, -1.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_difference_fills_and_aligns() {
        let ga = Grid2D::new(0.0, 0.0, 0.5, 0.5, 4, 3).unwrap();
        let gb = Grid2D::new(1.0, -1.0, 0.5, 0.5, 4, 3).unwrap();
        let a = Field2D::from_values(ga, vec![1.0; 12]).unwrap();
        let b = Field2D::from_values(gb, vec![2.0; 12]).unwrap();
        let d = difference_on_union(&a, &b).unwrap();
        assert_eq!(d.grid.t0, 0.0);
        assert_eq!(d.grid.y0, -1.0);
        assert_eq!((d.grid.nt, d.grid.ny), (6, 5));
        // overlap region: 1 - 2; a-only: 1; b-only: -2; neither: 0
        let val = |t: f64, y: f64| {
            let m = ((t - d.grid.t0) / 0.5).round() as usize;
            let n = ((y - d.grid.y0) / 0.5).round() as usize;
            d.get(n, m)
        };
        assert_eq!(val(1.5, 0.0), -1.0);
        assert_eq!(val(0.0, 0.0), 1.0);
        assert_eq!(val(2.5, -1.0), -2.0);
        assert_eq!(val(0.0, -1.0), 0.0);
        // misaligned lattices rejected
        let gc = Grid2D::new(0.25, 0.0, 0.5, 0.5, 4, 3).unwrap();
        let c = Field2D::zeros(gc);
        assert!(matches!(
            difference_on_union(&a, &c),
            Err(BrtError::GridMismatch(_))
        ));
    }
}
