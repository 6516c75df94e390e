//! Named end-to-end pipelines reproducing the reference experiments:
//! filtered images and data (fig4), filtering-error maps for sampled data
//! (fig5), limited-data square reconstruction (fig6), the regularized
//! inverse-spectrum panels (fig7), and the noisy reconstruction sweep
//! (fig8).

use std::f64::consts::PI;
use std::path::Path;

use brt_core::extend::{brt_extend, ExtensionPlan};
use brt_core::filter::{apply_psf, filter_image_analytic, filtered_brt_analytic, FilterSpec};
use brt_core::geometry::Parallelogram;
use brt_core::grid::{Field2D, Grid2D};
use brt_core::invert::{brt_invert_filtered, compute_k, recover_unfiltered, tikhonov_residual};
use brt_core::pipeline::{
    difference_on_union, extend_and_filter, extend_filter_invert, PipelineOptions,
};
use brt_core::spectral::signed_freq;
use brt_core::transforms::{cbt, rasterize, sample_brt};
use brt_core::{circumscribed_parallelogram, Direction};

use crate::config::RunConfig;
use crate::error::Result;
use crate::metrics::metrics;
use crate::noise::add_noise;
use crate::pgm::export_pgm;
use crate::square::Square;

fn dir(xi: f64) -> Result<Direction> {
    Ok(Direction::from_angle(xi)?)
}

/// Crops an enlarged field back to the window of `target` (which must be a
/// sub-lattice).
fn crop_to(field: &Field2D, target: &Grid2D) -> Result<Field2D> {
    let n0 = ((target.y0 - field.grid.y0) / field.grid.dy).round() as usize;
    let m0 = ((target.t0 - field.grid.t0) / field.grid.dt).round() as usize;
    Ok(field.crop(n0, m0, target.ny, target.nt)?)
}

#[derive(Debug, Clone, Copy)]
pub struct FilterErrorReport {
    /// Peak absolute deviation from the analytic filtered data over the
    /// original window.
    pub peak_abs_err: f64,
    /// Peak magnitude of the rasterized filtered image.
    pub peak_filtered_image: f64,
}

impl FilterErrorReport {
    pub fn ratio(&self) -> f64 {
        self.peak_abs_err / self.peak_filtered_image
    }
}

/// Extend-and-filter the sampled BRT, compare against the analytic filtered
/// data on the original window.
pub fn brt_filter_error(cfg: &RunConfig, outdir: Option<&Path>) -> Result<FilterErrorReport> {
    let phantom = cfg.load_phantom()?;
    let grid = cfg.grid()?;
    let (ti, tj) = (dir(cfg.xi_i)?, dir(cfg.xi_j)?);
    let (a_i, a_j) = cfg.shifts();
    let spec = FilterSpec::new(ti, tj, a_i, a_j)?;

    let g = sample_brt(&phantom, grid, &ti, &tj)?;
    let plan = extension_plan(cfg, &grid, cfg.xi_j)?;
    let extended = brt_extend(&g, cfg.xi_j, &plan)?;
    let filtered = apply_psf(&extended, &spec, filter_pad(&spec, &grid))?;
    let estimate = crop_to(&filtered, &grid)?;

    let reference = filtered_brt_analytic(&phantom, &spec, grid);
    let image = rasterize(&filter_image_analytic(&phantom, &spec), grid);
    let m = metrics(&estimate, &reference)?;
    if let Some(dirp) = outdir {
        let mut err = estimate.clone();
        for (e, r) in err.values_mut().iter_mut().zip(reference.values()) {
            *e = (*e - r).abs();
        }
        export_pgm(&reference, &dirp.join("fig5_brt_reference.pgm"), None)?;
        export_pgm(&estimate, &dirp.join("fig5_brt_filtered.pgm"), None)?;
        export_pgm(&err, &dirp.join("fig5_brt_error.pgm"), None)?;
    }
    Ok(FilterErrorReport {
        peak_abs_err: m.peak_abs_err,
        peak_filtered_image: image.max_abs(),
    })
}

/// The SBRT variant: both component BRT data sets are extended, differenced
/// on the union lattice, and filtered with the PSF built from the two unique
/// scatter directions.
pub fn sbrt_filter_error(cfg: &RunConfig, outdir: Option<&Path>) -> Result<FilterErrorReport> {
    let phantom = cfg.load_phantom()?;
    let grid = cfg.grid()?;
    let ti = dir(cfg.xi_i)?;
    let (tj1, tj2) = (dir(cfg.xi_j)?, dir(cfg.xi_j2)?);
    let (a_i, a_j) = cfg.shifts();
    let spec = FilterSpec::new(tj1, tj2, a_i, a_j)?;

    let g1 = sample_brt(&phantom, grid, &ti, &tj1)?;
    let g2 = sample_brt(&phantom, grid, &ti, &tj2)?;
    let e1 = brt_extend(&g1, cfg.xi_j, &extension_plan(cfg, &grid, cfg.xi_j)?)?;
    let e2 = brt_extend(&g2, cfg.xi_j2, &extension_plan(cfg, &grid, cfg.xi_j2)?)?;
    let s = difference_on_union(&e1, &e2)?;
    let filtered = apply_psf(&s, &spec, filter_pad(&spec, &grid))?;
    let estimate = crop_to(&filtered, &grid)?;

    let filtered_phantom = filter_image_analytic(&phantom, &spec);
    let reference = Field2D::sample(grid, |x| {
        cbt(&filtered_phantom, x, &tj1) - cbt(&filtered_phantom, x, &tj2)
    });
    let image = rasterize(&filtered_phantom, grid);
    let m = metrics(&estimate, &reference)?;
    if let Some(dirp) = outdir {
        let mut err = estimate.clone();
        for (e, r) in err.values_mut().iter_mut().zip(reference.values()) {
            *e = (*e - r).abs();
        }
        export_pgm(&reference, &dirp.join("fig5_sbrt_reference.pgm"), None)?;
        export_pgm(&estimate, &dirp.join("fig5_sbrt_filtered.pgm"), None)?;
        export_pgm(&err, &dirp.join("fig5_sbrt_error.pgm"), None)?;
    }
    Ok(FilterErrorReport {
        peak_abs_err: m.peak_abs_err,
        peak_filtered_image: image.max_abs(),
    })
}

fn extension_plan(cfg: &RunConfig, grid: &Grid2D, xi: f64) -> Result<ExtensionPlan> {
    let mut plan = ExtensionPlan::for_grid(grid, xi, cfg.m_t, cfg.pad)?;
    if cfg.m_y > 0 {
        plan.m_y = cfg.m_y;
    }
    Ok(plan)
}

fn filter_pad(spec: &FilterSpec, grid: &Grid2D) -> usize {
    let ti = spec.theta_i.vec();
    let tj = spec.theta_j.vec();
    let reach_t = spec.a_i / 2.0 * ti.t.abs() + spec.a_j / 2.0 * tj.t.abs();
    let reach_y = spec.a_i / 2.0 * ti.y.abs() + spec.a_j / 2.0 * tj.y.abs();
    ((reach_t / grid.dt).max(reach_y / grid.dy)).ceil() as usize + 24
}

/// Analytically filtered images and their bounded-support data.
pub fn fig4(cfg: &RunConfig, outdir: &Path) -> Result<()> {
    let phantom = cfg.load_phantom()?;
    let grid = cfg.grid()?;
    let (ti, tj1, tj2) = (dir(cfg.xi_i)?, dir(cfg.xi_j)?, dir(cfg.xi_j2)?);
    let (a_i, a_j) = cfg.shifts();

    let spec_brt = FilterSpec::new(ti, tj1, a_i, a_j)?;
    let image1 = rasterize(&filter_image_analytic(&phantom, &spec_brt), grid);
    let data1 = filtered_brt_analytic(&phantom, &spec_brt, grid);

    let spec_sbrt = FilterSpec::new(tj1, tj2, a_i, a_j)?;
    let fp = filter_image_analytic(&phantom, &spec_sbrt);
    let image2 = rasterize(&fp, grid);
    let data2 = Field2D::sample(grid, |x| cbt(&fp, x, &tj1) - cbt(&fp, x, &tj2));

    let lo = [&image1, &data1, &image2, &data2]
        .iter()
        .flat_map(|f| f.values().iter())
        .fold(f64::INFINITY, |a, &v| a.min(v));
    let hi = [&image1, &data1, &image2, &data2]
        .iter()
        .flat_map(|f| f.values().iter())
        .fold(f64::NEG_INFINITY, |a, &v| a.max(v));
    export_pgm(&image1, &outdir.join("fig4_image1.pgm"), Some((lo, hi)))?;
    export_pgm(&data1, &outdir.join("fig4_brt_data.pgm"), Some((lo, hi)))?;
    export_pgm(&image2, &outdir.join("fig4_image2.pgm"), Some((lo, hi)))?;
    export_pgm(&data2, &outdir.join("fig4_sbrt_data.pgm"), Some((lo, hi)))?;
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct Fig5Report {
    pub brt: FilterErrorReport,
    pub sbrt: FilterErrorReport,
}

/// Filtering-error maps for sampled, truncated data; the peak error stays
/// below 5% of the peak filtered-image value.
pub fn fig5(cfg: &RunConfig, outdir: Option<&Path>) -> Result<Fig5Report> {
    Ok(Fig5Report {
        brt: brt_filter_error(cfg, outdir)?,
        sbrt: sbrt_filter_error(cfg, outdir)?,
    })
}

/// Default configuration of the square-phantom reconstruction.
pub fn fig6_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.tmin = -0.5;
    cfg.tmax = 0.5;
    cfg.ymin = -0.5;
    cfg.ymax = 0.5;
    cfg.nt = 512;
    cfg.ny = 512;
    cfg.xi_j = -PI / 4.0;
    cfg.a_i = 0.7;
    cfg.a_j = 0.55;
    cfg.epsilon = 1e-6;
    cfg
}

#[derive(Debug, Clone)]
pub struct Fig6Report {
    /// Relative L2 error of the recovered image against the rasterized
    /// square, over the original window.
    pub rel_l2: f64,
    pub recovered: Field2D,
    pub reference: Field2D,
}

/// Square-phantom pipeline: truncated data, extension, PSF filtering,
/// regularized inversion, and unfolding of the four signed copies.
pub fn fig6(cfg: &RunConfig, outdir: Option<&Path>) -> Result<Fig6Report> {
    let square = Square::new(0.25);
    let grid = cfg.grid()?;
    let (ti, tj) = (dir(cfg.xi_i)?, dir(cfg.xi_j)?);
    let (a_i, a_j) = cfg.shifts();
    let spec = FilterSpec::new(ti, tj, a_i, a_j)?;
    let par = Parallelogram::from_extents(
        ti,
        tj,
        square.extent_along(ti.perp()),
        square.extent_along(tj.perp()),
    )?;

    let g = square.sample_brt(grid, &ti, &tj);
    let options = PipelineOptions { pad: cfg.pad, max_m_t: cfg.max_m_t, ..Default::default() };
    let out = extend_filter_invert(&g, &spec, &par, cfg.epsilon, &options)?;
    let recovered_full = recover_unfiltered(&out.psi, &spec, &par, filter_pad(&spec, &grid))?;
    let recovered = crop_to(&recovered_full, &grid)?;
    let reference = square.rasterize(grid);
    let m = metrics(&recovered, &reference)?;

    if let Some(dirp) = outdir {
        export_pgm(&g, &dirp.join("fig6_truncated_data.pgm"), None)?;
        export_pgm(&out.filtered, &dirp.join("fig6_filtered_extended.pgm"), None)?;
        export_pgm(&crop_to(&out.psi, &grid)?, &dirp.join("fig6_psi.pgm"), None)?;
        let range = Some((-0.2, 1.2));
        export_pgm(&recovered, &dirp.join("fig6_recovered.pgm"), range)?;
        export_pgm(&reference, &dirp.join("fig6_reference.pgm"), range)?;
    }
    Ok(Fig6Report { rel_l2: m.rel_l2, recovered, reference })
}

/// Structural measures of one `|K|` panel.
#[derive(Debug, Clone, Copy)]
pub struct KPanel {
    pub xi_j: f64,
    pub epsilon: f64,
    /// Global maximum of |K| over the sampling band.
    pub gmax: f64,
    /// Theoretical cap `1/(2 sqrt(eps))` of the stabilized reciprocal.
    pub cap: f64,
    /// Peak |K| on the two singular lines (attenuation troughs).
    pub trough_i: f64,
    pub trough_j: f64,
    /// Peak |K| in a narrow wedge around the `xi_j/2` ray (the ridge).
    pub ridge: f64,
}

/// Evaluates |K| on the lattice and extracts the trough/ridge measures used
/// by the spectrum-structure checks.
pub fn k_panel_measures(grid: &Grid2D, xi_i: f64, xi_j: f64, epsilon: f64) -> Result<KPanel> {
    let k = compute_k(&grid, xi_i, xi_j, epsilon)?;
    let nyq = (1.0 / (2.0 * grid.dt)).min(1.0 / (2.0 * grid.dy));
    let (band_lo, band_hi) = (0.1 * nyq, 0.85 * nyq);
    let (ci, si) = (xi_i.cos(), xi_i.sin());
    let (cj, sj) = (xi_j.cos(), xi_j.sin());
    let ridge_angle = xi_j / 2.0;
    let wedge = 2.0f64.to_radians();

    let mut gmax = 0.0f64;
    let mut trough_i = 0.0f64;
    let mut trough_j = 0.0f64;
    let mut ridge = 0.0f64;
    for n in 0..grid.ny {
        let wy = signed_freq(n, grid.ny, grid.dy);
        for m in 0..grid.nt {
            let wt = signed_freq(m, grid.nt, grid.dt);
            let rho = (wt * wt + wy * wy).sqrt();
            if rho < band_lo || rho > band_hi {
                continue;
            }
            let a = k[n * grid.nt + m].norm();
            gmax = gmax.max(a);
            // angular distance to the singular lines w.theta = 0
            if (wt * ci + wy * si).abs() / rho <= 0.005 {
                trough_i = trough_i.max(a);
            }
            if (wt * cj + wy * sj).abs() / rho <= 0.005 {
                trough_j = trough_j.max(a);
            }
            let phi = wy.atan2(wt);
            let mut d = (phi - ridge_angle).rem_euclid(PI);
            if d > PI / 2.0 {
                d = PI - d;
            }
            if d <= wedge {
                ridge = ridge.max(a);
            }
        }
    }
    Ok(KPanel {
        xi_j,
        epsilon,
        gmax,
        cap: 1.0 / (2.0 * epsilon.sqrt()),
        trough_i,
        trough_j,
        ridge,
    })
}

pub const FIG7_ANGLES: [f64; 3] = [PI / 20.0, PI / 7.0, PI / 4.0];
pub const FIG7_EPSILONS: [f64; 3] = [1e-6, 1e-5, 1e-4];

/// The |K| sweep over scatter angle and smoothing parameter. Panels share
/// one display scale and have the zero frequency centered.
pub fn fig7(cfg: &RunConfig, outdir: Option<&Path>) -> Result<Vec<KPanel>> {
    let grid = cfg.grid()?;
    let mut panels = Vec::new();
    let mut magnitudes = Vec::new();
    for &xi_j in &FIG7_ANGLES {
        for &eps in &FIG7_EPSILONS {
            panels.push(k_panel_measures(&grid, cfg.xi_i, xi_j, eps)?);
            if outdir.is_some() {
                let k = compute_k(&grid, cfg.xi_i, xi_j, eps)?;
                let mut mag = Field2D::zeros(grid);
                for n in 0..grid.ny {
                    for m in 0..grid.nt {
                        // display layout: zero frequency centered on both axes
                        let ns = (n + grid.ny / 2) % grid.ny;
                        let ms = (m + grid.nt / 2) % grid.nt;
                        mag.set(ns, ms, k[n * grid.nt + m].norm());
                    }
                }
                magnitudes.push((xi_j, eps, mag));
            }
        }
    }
    if let Some(dirp) = outdir {
        let hi = magnitudes
            .iter()
            .map(|(_, _, f)| f.max_abs())
            .fold(0.0f64, f64::max);
        for (idx, (_, _, mag)) in magnitudes.iter().enumerate() {
            let (col, row) = (idx / 3, idx % 3);
            export_pgm(
                mag,
                &dirp.join(format!("fig7_K_{}_{}.pgm", row + 1, col + 1)),
                Some((0.0, hi)),
            )?;
        }
    }
    Ok(panels)
}

#[derive(Debug, Clone, Copy)]
pub struct Fig8Run {
    pub xi_j: f64,
    pub epsilon: f64,
    /// Data-space Tikhonov residual of the reconstruction.
    pub residual: f64,
}

/// Noisy reconstruction sweep: the same Gaussian realization corrupts each
/// data set; every (angle, smoothing) pair is extended, filtered, and
/// inverted, and its filtered-image estimate is written as a panel.
pub fn fig8(cfg: &RunConfig, outdir: Option<&Path>) -> Result<Vec<Fig8Run>> {
    let phantom = cfg.load_phantom()?;
    let grid = cfg.grid()?;
    let ti = dir(cfg.xi_i)?;
    let image_peak = rasterize(&phantom, grid).max_abs();
    let sigma = cfg.noise_std_factor * image_peak;
    let noise = add_noise(&Field2D::zeros(grid), sigma, cfg.seed);

    let mut runs = Vec::new();
    let mut panels: Vec<(usize, usize, Field2D)> = Vec::new();
    for (col, &xi_j) in FIG7_ANGLES.iter().enumerate() {
        let tj = dir(xi_j)?;
        let (a_i, a_j) = cfg.shifts();
        let spec = FilterSpec::new(ti, tj, a_i, a_j)?;
        let par = circumscribed_parallelogram(&phantom, &ti, &tj)?;
        let mut g = sample_brt(&phantom, grid, &ti, &tj)?;
        for (v, n) in g.values_mut().iter_mut().zip(noise.values()) {
            *v += n;
        }
        // noise leaves the corners at the noise floor, not at zero
        let corner_tol = if sigma > 0.0 {
            (20.0 * sigma / g.max_abs()).max(1e-9)
        } else {
            1e-9
        };
        let options = PipelineOptions { pad: cfg.pad, max_m_t: cfg.max_m_t, corner_tol };
        let filtered = extend_and_filter(&g, &spec, &par, &options)?;
        for (row, &eps) in FIG7_EPSILONS.iter().enumerate() {
            let psi = brt_invert_filtered(&filtered, cfg.xi_i, xi_j, eps)?;
            let residual = tikhonov_residual(&filtered, cfg.xi_i, xi_j, eps)?;
            runs.push(Fig8Run { xi_j, epsilon: eps, residual });
            if outdir.is_some() {
                panels.push((row, col, crop_to(&psi, &grid)?));
            }
        }
    }
    if let Some(dirp) = outdir {
        let hi = panels
            .iter()
            .map(|(_, _, f)| f.max_abs())
            .fold(0.0f64, f64::max);
        for (row, col, psi) in &panels {
            export_pgm(
                psi,
                &dirp.join(format!("fig8_psi_{}_{}.pgm", row + 1, col + 1)),
                Some((-hi, hi)),
            )?;
        }
    }
    Ok(runs)
}

/// Reference image and raw-data panels.
pub fn fig3(cfg: &RunConfig, outdir: &Path) -> Result<()> {
    let phantom = cfg.load_phantom()?;
    let grid = cfg.grid()?;
    let (ti, tj1, tj2) = (dir(cfg.xi_i)?, dir(cfg.xi_j)?, dir(cfg.xi_j2)?);
    let image = rasterize(&phantom, grid);
    let b1 = sample_brt(&phantom, grid, &ti, &tj1)?;
    let b2 = sample_brt(&phantom, grid, &ti, &tj2)?;
    export_pgm(&image, &outdir.join("fig3_reference.pgm"), None)?;
    let hi = b1.max_abs().max(b2.max_abs());
    export_pgm(&b1, &outdir.join("fig3_brt_data1.pgm"), Some((0.0, hi)))?;
    export_pgm(&b2, &outdir.join("fig3_brt_data2.pgm"), Some((0.0, hi)))?;
    Ok(())
}

/// Phantom of a given name or path, rasterized. Exposed for the CLI.
pub fn rasterize_named(cfg: &RunConfig) -> Result<Field2D> {
    Ok(rasterize(&cfg.load_phantom()?, cfg.grid()?))
}

/// Analytic forward data for the CLI `forward` subcommand.
pub fn forward_named(cfg: &RunConfig, mode: &str) -> Result<Field2D> {
    let phantom = cfg.load_phantom()?;
    let grid = cfg.grid()?;
    let (ti, tj) = (dir(cfg.xi_i)?, dir(cfg.xi_j)?);
    match mode {
        "cbt" => Ok(brt_core::transforms::sample_cbt(&phantom, grid, &tj)),
        "brt" => Ok(sample_brt(&phantom, grid, &ti, &tj)?),
        "sbrt" => Ok(brt_core::transforms::sample_sbrt(&phantom, grid, &ti, &tj)?),
        other => Err(crate::error::CliError::Parse(format!(
            "unknown forward mode {other:?} (expected cbt|brt|sbrt)"
        ))),
    }
}

/// |K| or |H| magnitude on the configured lattice, zero frequency centered,
/// for the spectrum subcommand.
pub fn spectrum_panel(cfg: &RunConfig, kind: &str) -> Result<Field2D> {
    let grid = cfg.grid()?;
    let mut mag = Field2D::zeros(grid);
    match kind {
        "k" => {
            let k = compute_k(&grid, cfg.xi_i, cfg.xi_j, cfg.epsilon)?;
            for n in 0..grid.ny {
                for m in 0..grid.nt {
                    let ns = (n + grid.ny / 2) % grid.ny;
                    let ms = (m + grid.nt / 2) % grid.nt;
                    mag.set(ns, ms, k[n * grid.nt + m].norm());
                }
            }
        }
        "h" => {
            let sys = brt_core::invert::system_spectrum(&grid, cfg.xi_i, cfg.xi_j);
            for n in 0..grid.ny {
                for m in 0..grid.nt {
                    let ns = (n + grid.ny / 2) % grid.ny;
                    let ms = (m + grid.nt / 2) % grid.nt;
                    mag.set(ns, ms, sys.h[n * grid.nt + m].norm());
                }
            }
        }
        other => {
            return Err(crate::error::CliError::Parse(format!(
                "unknown spectrum kind {other:?} (expected k|h)"
            )))
        }
    }
    Ok(mag)
}
