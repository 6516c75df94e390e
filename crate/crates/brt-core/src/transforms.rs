//! Exact evaluation of the cone-beam, broken-ray, signed broken-ray, and
//! Radon transforms on ellipse phantoms, together with the coherent-scatter
//! measurement model and the support-geometry classifiers.

use crate::error::{BrtError, Result};
use crate::geometry::{require_distinct, Direction, Vec2};
use crate::grid::{Field2D, Grid2D};
use crate::phantom::{Ellipse, Phantom};

/// Planck constant times the speed of light, in keV * Angstrom.
pub const HC_KEV_ANGSTROM: f64 = 12.398419;

/// Beam configuration of the measurement model.
#[derive(Debug, Clone, Copy)]
pub struct ScatterConfig {
    /// Beam energy in keV.
    pub energy: f64,
}

impl ScatterConfig {
    pub fn new(energy: f64) -> Result<ScatterConfig> {
        if !(energy > 0.0) {
            return Err(BrtError::NonPositiveEnergy(energy));
        }
        Ok(ScatterConfig { energy })
    }
}

/// Momentum transfer `q = 2 (E/hc) sqrt((1-s)/2)` as a function of the
/// cosine `s` of the scatter angle.
pub fn momentum_transfer(s: f64, cfg: &ScatterConfig) -> Result<f64> {
    if !(-1.0..=1.0).contains(&s) {
        return Err(BrtError::CosineOutOfRange(s));
    }
    Ok(2.0 * (cfg.energy / HC_KEV_ANGSTROM) * ((1.0 - s) / 2.0).sqrt())
}

/// Amplitude-weighted length of `{x + t theta : t >= 0}` inside one ellipse.
pub fn ellipse_halfline_integral(e: &Ellipse, x: Vec2, theta: &Direction) -> f64 {
    match e.ray_interval(x, theta.vec()) {
        Some((t1, t2)) => e.amplitude * (t2.max(0.0) - t1.max(0.0)).max(0.0),
        None => 0.0,
    }
}

/// Cone beam transform: half-line integral of the phantom from `x` along
/// `theta`.
pub fn cbt(phantom: &Phantom, x: Vec2, theta: &Direction) -> f64 {
    phantom
        .ellipses
        .iter()
        .map(|e| ellipse_halfline_integral(e, x, theta))
        .sum()
}

/// Broken ray transform: sum of the two cone beam transforms sharing the
/// vertex `x`.
pub fn brt(phantom: &Phantom, x: Vec2, theta_i: &Direction, theta_j: &Direction) -> Result<f64> {
    require_distinct(theta_i, theta_j)?;
    Ok(cbt(phantom, x, theta_i) + cbt(phantom, x, theta_j))
}

/// Signed broken ray transform: `-cbt(x, theta_i) + cbt(x, theta_j)`.
pub fn sbrt(phantom: &Phantom, x: Vec2, theta_i: &Direction, theta_j: &Direction) -> Result<f64> {
    require_distinct(theta_i, theta_j)?;
    Ok(-cbt(phantom, x, theta_i) + cbt(phantom, x, theta_j))
}

/// Full-line Radon transform at signed offset `v` along `theta.perp()`.
///
/// Evaluated as the CBT started from a point behind the support on the same
/// line, which is exact for any start point outside the support.
pub fn radon(phantom: &Phantom, v: f64, theta: &Direction) -> f64 {
    if phantom.is_empty() {
        return 0.0;
    }
    let (lo, _) = phantom
        .extent_along(theta.vec())
        .expect("non-empty phantom");
    let start = theta.perp().scale(v) + theta.vec().scale(lo - 1.0);
    cbt(phantom, start, theta)
}

/// Log of the measurement model: `ln f(x, q(-theta_i.theta_j, E)) - brt(...)`.
///
/// The cosine handed to the momentum transfer is the negative of
/// `theta_i.theta_j`; with both directions pointing away from the vertex the
/// physical scatter angle is the angle between `-theta_i` and `theta_j`.
pub fn log_measurement<F>(
    f: &F,
    mu: &Phantom,
    x: Vec2,
    theta_i: &Direction,
    theta_j: &Direction,
    cfg: &ScatterConfig,
) -> Result<f64>
where
    F: Fn(Vec2, f64) -> f64,
{
    let q = momentum_transfer(-theta_i.dot(theta_j), cfg)?;
    let density = f(x, q);
    if !(density > 0.0) {
        return Err(BrtError::NonPositiveDensity(density));
    }
    Ok(density.ln() - brt(mu, x, theta_i, theta_j)?)
}

/// Recovers the SBRT from two differential log measurements sharing the
/// detector direction `theta_k`. The scatter density cancels exactly when
/// `theta_i.theta_k = theta_j.theta_k`.
pub fn sbrt_from_measurements<F>(
    f: &F,
    mu: &Phantom,
    x: Vec2,
    theta_i: &Direction,
    theta_j: &Direction,
    theta_k: &Direction,
    cfg: &ScatterConfig,
) -> Result<f64>
where
    F: Fn(Vec2, f64) -> f64,
{
    let (lhs, rhs) = (theta_i.dot(theta_k), theta_j.dot(theta_k));
    if (lhs - rhs).abs() > 1e-12 {
        return Err(BrtError::AngleCondition { lhs, rhs });
    }
    Ok(log_measurement(f, mu, x, theta_i, theta_k, cfg)?
        - log_measurement(f, mu, x, theta_j, theta_k, cfg)?)
}

/// Support bounds of a phantom for one direction: the offsets `v-`, `v+`
/// along `theta.perp()` and the chord parameter functions `u-`, `u+`.
#[derive(Debug, Clone)]
pub struct SupportGeometry {
    pub direction: Direction,
    pub v_minus: f64,
    pub v_plus: f64,
    phantom: Phantom,
}

impl SupportGeometry {
    /// Total width `v = v+ - v-` of the support along `theta.perp()`.
    pub fn v_width(&self) -> f64 {
        self.v_plus - self.v_minus
    }

    fn chord(&self, v: f64) -> Option<(f64, f64)> {
        let base = self.direction.perp().scale(v);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for e in &self.phantom.ellipses {
            if let Some((t1, t2)) = e.ray_interval(base, self.direction.vec()) {
                lo = lo.min(t1);
                hi = hi.max(t2);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Smallest `t` with `t theta + v theta_perp` in the support. Offsets in
    /// a gap between disjoint components fall back to 0; any point on such a
    /// line is outside the support, so downstream identities are unaffected.
    pub fn u_minus(&self, v: f64) -> f64 {
        self.chord(v).map(|(lo, _)| lo).unwrap_or(0.0)
    }

    pub fn u_plus(&self, v: f64) -> f64 {
        self.chord(v).map(|(_, hi)| hi).unwrap_or(0.0)
    }

    /// Entry point of the boundary segment `f-(v)`.
    pub fn f_minus(&self, v: f64) -> Vec2 {
        self.direction.vec().scale(self.u_minus(v)) + self.direction.perp().scale(v)
    }

    pub fn f_plus(&self, v: f64) -> Vec2 {
        self.direction.vec().scale(self.u_plus(v)) + self.direction.perp().scale(v)
    }
}

/// Builds the support geometry of a non-empty phantom for one direction.
/// `v-`/`v+` come from the closed-form ellipse support functions.
pub fn support_geometry(phantom: &Phantom, theta: &Direction) -> Result<SupportGeometry> {
    let (v_minus, v_plus) = phantom.extent_along(theta.perp())?;
    Ok(SupportGeometry {
        direction: *theta,
        v_minus,
        v_plus,
        phantom: phantom.clone(),
    })
}

/// Partition of the data plane for a pair of scatter directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Inside the support: both half-line integrals see the interior.
    Support,
    /// In both shadows: the datum is the sum of two Radon values.
    ShadowBoth,
    /// Only the `theta_i` half-line crosses the support.
    ShadowIOnly,
    /// Only the `theta_j` half-line crosses the support.
    ShadowJOnly,
    /// Neither ray crosses the support: the datum is zero.
    Zero,
}

/// Classifies a point against the five-region partition of the BRT data.
/// Both geometries must come from the same phantom.
pub fn classify_region(x: Vec2, geom_i: &SupportGeometry, geom_j: &SupportGeometry) -> Region {
    let phantom = &geom_i.phantom;
    if phantom.value(x) != 0.0 || phantom.ellipses.iter().any(|e| e.contains(x)) {
        return Region::Support;
    }
    let hit_i = phantom.ray_hits(x, &geom_i.direction);
    let hit_j = phantom.ray_hits(x, &geom_j.direction);
    match (hit_i, hit_j) {
        (true, true) => Region::ShadowBoth,
        (true, false) => Region::ShadowIOnly,
        (false, true) => Region::ShadowJOnly,
        (false, false) => Region::Zero,
    }
}

/// Pointwise rasterization of the phantom density on a grid.
pub fn rasterize(phantom: &Phantom, grid: Grid2D) -> Field2D {
    Field2D::sample(grid, |x| phantom.value(x))
}

/// Samples the analytic CBT at every lattice point.
pub fn sample_cbt(phantom: &Phantom, grid: Grid2D, theta: &Direction) -> Field2D {
    Field2D::sample(grid, |x| cbt(phantom, x, theta))
}

/// Samples the analytic BRT at every lattice point.
pub fn sample_brt(
    phantom: &Phantom,
    grid: Grid2D,
    theta_i: &Direction,
    theta_j: &Direction,
) -> Result<Field2D> {
    require_distinct(theta_i, theta_j)?;
    Ok(Field2D::sample(grid, |x| {
        cbt(phantom, x, theta_i) + cbt(phantom, x, theta_j)
    }))
}

/// Samples the analytic SBRT at every lattice point.
pub fn sample_sbrt(
    phantom: &Phantom,
    grid: Grid2D,
    theta_i: &Direction,
    theta_j: &Direction,
) -> Result<Field2D> {
    require_distinct(theta_i, theta_j)?;
    Ok(Field2D::sample(grid, |x| {
        -cbt(phantom, x, theta_i) + cbt(phantom, x, theta_j)
    }))
}
