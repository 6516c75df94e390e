//! Plane vectors, propagation directions, and the circumscribed
//! parallelogram of a bounded support.

use crate::error::{BrtError, Result};

/// Vector in the data plane. Following the sampling convention, the first
/// component is the `t` axis (increases with column index) and the second is
/// the `y` axis (increases with row index).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub t: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(t: f64, y: f64) -> Self {
        Vec2 { t, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.t * other.t + self.y * other.y
    }

    /// Rotation by +pi/2 (counter-clockwise).
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.t)
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, k: f64) -> Vec2 {
        Vec2::new(k * self.t, k * self.y)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.t + o.t, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.t - o.t, self.y - o.y)
    }
}

impl std::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.t, -self.y)
    }
}

/// 2x2 determinant of two column vectors.
pub fn det2(a: Vec2, b: Vec2) -> f64 {
    a.t * b.y - a.y * b.t
}

/// Unit propagation direction with its angle and cached perpendicular.
///
/// The perpendicular is the direction rotated counter-clockwise by pi/2,
/// so `perp(perp(theta)) = -theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    xi: f64,
    vec: Vec2,
    perp: Vec2,
}

impl Direction {
    pub fn from_angle(xi: f64) -> Result<Direction> {
        if !xi.is_finite() {
            return Err(BrtError::NonFiniteAngle(xi));
        }
        let vec = Vec2::new(xi.cos(), xi.sin());
        Ok(Direction { xi, vec, perp: vec.perp() })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn vec(&self) -> Vec2 {
        self.vec
    }

    pub fn perp(&self) -> Vec2 {
        self.perp
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.vec.dot(other.vec)
    }
}

/// Checks the transform precondition |theta_i . theta_j| < 1.
pub fn require_distinct(theta_i: &Direction, theta_j: &Direction) -> Result<()> {
    let d = theta_i.dot(theta_j);
    if d.abs() >= 1.0 {
        return Err(BrtError::ParallelDirections(d));
    }
    Ok(())
}

/// Circumscribed parallelogram of a centered support, with edges parallel to
/// the two scatter directions.
///
/// `alpha_i`, `alpha_j` are the edge lengths along `theta_i`, `theta_j`;
/// `b_i`, `b_j` are the orthogonal heights (the extents along the
/// perpendiculars), related by `b_i = alpha_j |det|` and `b_j = alpha_i |det|`.
#[derive(Debug, Clone, Copy)]
pub struct Parallelogram {
    pub theta_i: Direction,
    pub theta_j: Direction,
    pub alpha_i: f64,
    pub alpha_j: f64,
    pub b_i: f64,
    pub b_j: f64,
}

impl Parallelogram {
    /// Builds the parallelogram from the perpendicular extents `v_i`, `v_j`
    /// of the support along `theta_i.perp()` and `theta_j.perp()`.
    pub fn from_extents(
        theta_i: Direction,
        theta_j: Direction,
        v_i: f64,
        v_j: f64,
    ) -> Result<Parallelogram> {
        require_distinct(&theta_i, &theta_j)?;
        let det = det2(theta_i.vec(), theta_j.vec()).abs();
        Ok(Parallelogram {
            theta_i,
            theta_j,
            alpha_i: v_j / det,
            alpha_j: v_i / det,
            b_i: v_i,
            b_j: v_j,
        })
    }

    pub fn det_abs(&self) -> f64 {
        det2(self.theta_i.vec(), self.theta_j.vec()).abs()
    }

    pub fn area(&self) -> f64 {
        self.alpha_i * self.alpha_j * self.det_abs()
    }

    /// Membership test for the centered parallelogram.
    pub fn contains(&self, x: Vec2) -> bool {
        x.dot(self.theta_i.perp()).abs() <= self.b_i / 2.0
            && x.dot(self.theta_j.perp()).abs() <= self.b_j / 2.0
    }

    /// Oblique coordinates (s_i, s_j) with x = s_i theta_i + s_j theta_j.
    pub fn oblique(&self, x: Vec2) -> (f64, f64) {
        let det = det2(self.theta_i.vec(), self.theta_j.vec());
        let s_i = det2(x, self.theta_j.vec()) / det;
        let s_j = det2(self.theta_i.vec(), x) / det;
        (s_i, s_j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_axis_cases() {
        let d = Direction::from_angle(0.0).unwrap();
        assert_eq!(d.vec(), Vec2::new(1.0, 0.0));
        let d = Direction::from_angle(std::f64::consts::PI).unwrap();
        assert!((d.vec().t + 1.0).abs() < 1e-15 && d.vec().y.abs() < 1e-15);
        let d = Direction::from_angle(std::f64::consts::FRAC_PI_4).unwrap();
        let r = 0.5f64.sqrt();
        assert!((d.vec().t - r).abs() < 1e-15 && (d.vec().y - r).abs() < 1e-15);
    }

    #[test]
    fn direction_rejects_non_finite() {
        assert!(Direction::from_angle(f64::NAN).is_err());
        assert!(Direction::from_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn perp_is_ccw_quarter_turn() {
        for xi in [0.0, 0.3, 2.0, -1.2] {
            let d = Direction::from_angle(xi).unwrap();
            assert!((d.vec().norm() - 1.0).abs() < 1e-12);
            // perp(perp(theta)) = -theta
            let pp = d.perp().perp();
            assert!((pp + d.vec()).norm() < 1e-15);
            // perp(theta) = theta rotated by +pi/2
            let rot = Direction::from_angle(xi + std::f64::consts::FRAC_PI_2).unwrap();
            assert!((d.perp() - rot.vec()).norm() < 1e-12);
        }
    }

    #[test]
    fn parallelogram_height_edge_relation() {
        let ti = Direction::from_angle(std::f64::consts::PI).unwrap();
        let tj = Direction::from_angle(0.3).unwrap();
        let p = Parallelogram::from_extents(ti, tj, 1.4, 2.2).unwrap();
        let det = p.det_abs();
        assert!((p.b_i - p.alpha_j * det).abs() < 1e-12);
        assert!((p.b_j - p.alpha_i * det).abs() < 1e-12);
        // Area is consistent through both parameterizations.
        assert!((p.area() - p.b_i * p.b_j / det).abs() < 1e-12);
    }

    #[test]
    fn oblique_roundtrip() {
        let ti = Direction::from_angle(2.9).unwrap();
        let tj = Direction::from_angle(-0.4).unwrap();
        let p = Parallelogram::from_extents(ti, tj, 1.0, 1.0).unwrap();
        let x = Vec2::new(0.37, -0.81);
        let (si, sj) = p.oblique(x);
        let back = ti.vec().scale(si) + tj.vec().scale(sj);
        assert!((back - x).norm() < 1e-12);
    }
}
