//! PSF filtering that bounds the support of BRT data, plus the analytic
//! filtered references used to validate the sampled pipeline.

use crate::error::{BrtError, Result};
use crate::geometry::{det2, require_distinct, Direction, Parallelogram, Vec2};
use crate::grid::{Field2D, Grid2D};
use crate::phantom::{Ellipse, Phantom};
use crate::spectral::shift2d;
use crate::transforms::cbt;

/// The four-impulse PSF: shift lengths `a_i`, `a_j` along the two scatter
/// directions.
#[derive(Debug, Clone, Copy)]
pub struct FilterSpec {
    pub theta_i: Direction,
    pub theta_j: Direction,
    pub a_i: f64,
    pub a_j: f64,
}

impl FilterSpec {
    pub fn new(theta_i: Direction, theta_j: Direction, a_i: f64, a_j: f64) -> Result<FilterSpec> {
        require_distinct(&theta_i, &theta_j)?;
        if !(a_i > 0.0 && a_j > 0.0) {
            return Err(BrtError::InvalidArgument(format!(
                "shift lengths must be positive, got ({a_i}, {a_j})"
            )));
        }
        Ok(FilterSpec { theta_i, theta_j, a_i, a_j })
    }

    /// The four signed impulse offsets, in the fixed sign order
    /// `(+,+) -> +`, `(-,+) -> -`, `(+,-) -> -`, `(-,-) -> +`.
    pub fn taps(&self) -> [(Vec2, f64); 4] {
        let ci = self.theta_i.vec().scale(self.a_i / 2.0);
        let cj = self.theta_j.vec().scale(self.a_j / 2.0);
        [
            (ci + cj, 1.0),
            (-ci + cj, -1.0),
            (ci - cj, -1.0),
            (-ci - cj, 1.0),
        ]
    }

    pub fn det_abs(&self) -> f64 {
        det2(self.theta_i.vec(), self.theta_j.vec()).abs()
    }
}

/// Convolves sampled data with the four-impulse PSF via subsample Fourier
/// shifts: the sum of four signed copies displaced by
/// `(+-a_i/2) theta_i + (+-a_j/2) theta_j`.
///
/// The summation order is fixed for bit-reproducibility.
pub fn apply_psf(field: &Field2D, spec: &FilterSpec, pad: usize) -> Result<Field2D> {
    let mut out = Field2D::zeros(field.grid);
    for (offset, sign) in spec.taps() {
        // Datum at x picks up g(x + offset), i.e. the field translated by
        // -offset.
        let copy = shift2d(field, -offset, pad)?;
        for (o, c) in out.values_mut().iter_mut().zip(copy.values()) {
            *o += sign * c;
        }
    }
    Ok(out)
}

/// Analytically filtered phantom: the four signed shifted copies of the
/// image as a new phantom (each ellipse appears four times with displaced
/// centers and signed amplitudes). Evaluating it gives the filtered image
/// exactly.
pub fn filter_image_analytic(phantom: &Phantom, spec: &FilterSpec) -> Phantom {
    let mut ellipses = Vec::with_capacity(4 * phantom.ellipses.len());
    for (offset, sign) in spec.taps() {
        for e in &phantom.ellipses {
            ellipses.push(Ellipse {
                // mu^m(x) includes mu(x + offset): a copy translated by -offset
                center: e.center - offset,
                amplitude: sign * e.amplitude,
                ..*e
            });
        }
    }
    Phantom::new(ellipses)
}

/// Samples the BRT of the analytically filtered phantom: the exact filtered
/// data, free of interpolation.
pub fn filtered_brt_analytic(phantom: &Phantom, spec: &FilterSpec, grid: Grid2D) -> Field2D {
    let filtered = filter_image_analytic(phantom, spec);
    Field2D::sample(grid, |x| {
        cbt(&filtered, x, &spec.theta_i) + cbt(&filtered, x, &spec.theta_j)
    })
}

/// Region that bounds the support of PSF-filtered BRT data: the
/// circumscribed parallelogram grown by the PSF heights `b_i = a_j |det|`
/// and `b_j = a_i |det|`.
#[derive(Debug, Clone, Copy)]
pub struct BoundedSupportRegion {
    theta_i_perp: Vec2,
    theta_j_perp: Vec2,
    half_extent_i: f64,
    half_extent_j: f64,
}

impl BoundedSupportRegion {
    pub fn new(parallelogram: &Parallelogram, spec: &FilterSpec) -> BoundedSupportRegion {
        let det = spec.det_abs();
        BoundedSupportRegion {
            theta_i_perp: parallelogram.theta_i.perp(),
            theta_j_perp: parallelogram.theta_j.perp(),
            half_extent_i: (parallelogram.b_i + spec.a_j * det) / 2.0,
            half_extent_j: (parallelogram.b_j + spec.a_i * det) / 2.0,
        }
    }

    pub fn contains(&self, x: Vec2) -> bool {
        x.dot(self.theta_i_perp).abs() <= self.half_extent_i
            && x.dot(self.theta_j_perp).abs() <= self.half_extent_j
    }

    /// Half extent of the region along `theta_i.perp()`.
    pub fn half_extent_along_i(&self) -> f64 {
        self.half_extent_i
    }

    /// Half extent of the region along `theta_j.perp()`.
    pub fn half_extent_along_j(&self) -> f64 {
        self.half_extent_j
    }

    /// Largest |t| reached by the region over the y-range `[-ymax, ymax]`,
    /// used to size data extensions.
    pub fn t_reach(&self, ymax: f64) -> f64 {
        // |x . perp_j| <= half_extent_j with perp_j = (-sin xi_j, cos xi_j)
        let p = self.theta_j_perp;
        if p.t.abs() < 1e-12 {
            return f64::INFINITY;
        }
        (self.half_extent_j + ymax * p.y.abs()) / p.t.abs()
    }
}

/// Zeroes every sample outside the bounded-support region expanded by
/// `margin` physical units. Filtered data vanish there, so this removes the
/// wraparound and truncation debris the shift-based filter leaves near the
/// domain boundary.
pub fn zero_outside_support(
    field: &Field2D,
    region: &BoundedSupportRegion,
    margin: f64,
) -> Field2D {
    let widened = BoundedSupportRegion {
        half_extent_i: region.half_extent_i + margin,
        half_extent_j: region.half_extent_j + margin,
        ..*region
    };
    let g = field.grid;
    let mut out = field.clone();
    for n in 0..g.ny {
        for m in 0..g.nt {
            if !widened.contains(g.point(n, m)) {
                out.set(n, m, 0.0);
            }
        }
    }
    out
}

/// Zeroes `frame_rows` rows at the top/bottom and `frame_cols` columns at
/// the left/right of the field. Used when the lattice truncates a shadow
/// band: shift-based filtering reads past such an edge, so the adjacent
/// samples are not trustworthy.
pub fn zero_boundary_frame(field: &Field2D, frame_rows: usize, frame_cols: usize) -> Field2D {
    let g = field.grid;
    let mut out = field.clone();
    for n in 0..g.ny {
        for m in 0..g.nt {
            if n < frame_rows
                || n >= g.ny.saturating_sub(frame_rows)
                || m < frame_cols
                || m >= g.nt.saturating_sub(frame_cols)
            {
                out.set(n, m, 0.0);
            }
        }
    }
    out
}

/// Evaluator for the parallelogram-blurred image
/// `mu^p = (mu * p_{i,j}) / (a_i a_j |det|)`: the average of the phantom
/// over the window parallelogram centered at the evaluation point.
pub struct BlurredImage<'a> {
    phantom: &'a Phantom,
    spec: FilterSpec,
    tol: f64,
}

impl<'a> BlurredImage<'a> {
    pub fn new(phantom: &'a Phantom, spec: FilterSpec) -> BlurredImage<'a> {
        BlurredImage { phantom, spec, tol: 1e-10 }
    }

    /// Average of the phantom over `{x + u theta_i + v theta_j}`,
    /// `|u| <= a_i/2`, `|v| <= a_j/2`. The inner integral over `v` is the
    /// exact clamped chord per ellipse; the outer integral over `u` uses
    /// adaptive Simpson.
    pub fn value(&self, x: Vec2) -> f64 {
        let s = &self.spec;
        let inner = |u: f64| -> f64 {
            let base = x + s.theta_i.vec().scale(u);
            let mut total = 0.0;
            for e in &self.phantom.ellipses {
                if let Some((v1, v2)) = e.ray_interval(base, s.theta_j.vec()) {
                    let lo = v1.max(-s.a_j / 2.0);
                    let hi = v2.min(s.a_j / 2.0);
                    if hi > lo {
                        total += e.amplitude * (hi - lo);
                    }
                }
            }
            total
        };
        let integral = adaptive_simpson(&inner, -s.a_i / 2.0, s.a_i / 2.0, self.tol);
        integral / (s.a_i * s.a_j)
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson_rec(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40)
}
