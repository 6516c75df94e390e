//! Transform invariants: shift invariance, linearity, support theorems on
//! randomized phantoms, and scatter-density cancellation.

use std::f64::consts::PI;

use proptest::prelude::*;

use brt_core::geometry::Vec2;
use brt_core::phantom::{Ellipse, Phantom};
use brt_core::transforms::{
    brt, cbt, classify_region, radon, sbrt, sbrt_from_measurements, support_geometry, Region,
    ScatterConfig,
};
use brt_core::Direction;

fn dir(xi: f64) -> Direction {
    Direction::from_angle(xi).unwrap()
}

#[test]
fn translating_the_phantom_translates_the_data() {
    let p = brt_core::shepp_logan();
    let delta = Vec2::new(0.31, -0.17);
    let q = p.translate(delta);
    let (ti, tj) = (dir(PI), dir(PI / 11.0));
    for &(t, y) in &[(0.0, 0.0), (0.3, -0.4), (-0.6, 0.2), (1.4, 0.9)] {
        let x = Vec2::new(t, y);
        let a = brt(&p, x, &ti, &tj).unwrap();
        let b = brt(&q, x + delta, &ti, &tj).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn brt_is_additive_over_phantom_union() {
    let a = Phantom::new(vec![
        Ellipse::new(Vec2::new(0.1, 0.0), 0.4, 0.2, 0.4, 1.5).unwrap(),
    ]);
    let b = Phantom::new(vec![
        Ellipse::new(Vec2::new(-0.2, 0.3), 0.3, 0.3, 0.0, -0.7).unwrap(),
        Ellipse::new(Vec2::new(0.0, -0.4), 0.2, 0.1, 1.0, 0.3).unwrap(),
    ]);
    let u = a.union(&b);
    let (ti, tj) = (dir(2.3), dir(-0.4));
    for &(t, y) in &[(0.0, 0.0), (0.5, 0.1), (-0.8, -0.8), (0.05, 0.35)] {
        let x = Vec2::new(t, y);
        let lhs = brt(&u, x, &ti, &tj).unwrap();
        let rhs = brt(&a, x, &ti, &tj).unwrap() + brt(&b, x, &ti, &tj).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}

fn arb_ellipse() -> impl Strategy<Value = Ellipse> {
    (
        -0.4f64..0.4,
        -0.4f64..0.4,
        0.05f64..0.5,
        0.05f64..0.5,
        0.0f64..PI,
        0.2f64..2.0,
    )
        .prop_map(|(xc, yc, a, b, tilt, amp)| {
            Ellipse::new(Vec2::new(xc, yc), a, b, tilt, amp).unwrap()
        })
}

fn arb_phantom() -> impl Strategy<Value = Phantom> {
    prop::collection::vec(arb_ellipse(), 1..4).prop_map(Phantom::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Outside the support and both shadows the datum vanishes identically.
    #[test]
    fn zero_region_data_vanish(
        phantom in arb_phantom(),
        xi_i in 0.0f64..(2.0 * PI),
        dxi in 0.3f64..2.8,
        t in -3.0f64..3.0,
        y in -3.0f64..3.0,
    ) {
        let (ti, tj) = (dir(xi_i), dir(xi_i + dxi));
        let gi = support_geometry(&phantom, &ti).unwrap();
        let gj = support_geometry(&phantom, &tj).unwrap();
        let x = Vec2::new(t, y);
        if classify_region(x, &gi, &gj) == Region::Zero {
            let v = brt(&phantom, x, &ti, &tj).unwrap();
            prop_assert!(v.abs() <= 1e-12);
        }
    }

    // Behind the support the CBT equals the Radon transform of the same line.
    #[test]
    fn shadow_data_equal_radon(
        phantom in arb_phantom(),
        xi in 0.0f64..(2.0 * PI),
        v_frac in -1.2f64..1.2,
        back in 0.1f64..4.0,
    ) {
        let theta = dir(xi);
        let geom = support_geometry(&phantom, &theta).unwrap();
        let v = 0.5 * (geom.v_minus + geom.v_plus)
            + 0.5 * v_frac * (geom.v_plus - geom.v_minus);
        // a point surely behind the support on this line
        let u_back = geom.u_minus(v) - back;
        let x = theta.vec().scale(u_back) + theta.perp().scale(v);
        let lhs = cbt(&phantom, x, &theta);
        let rhs = radon(&phantom, v, &theta);
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    // The Radon transform is the CBT started on the boundary segment, and
    // vanishes outside the support band.
    #[test]
    fn radon_equals_cbt_on_boundary(
        phantom in arb_phantom(),
        xi in 0.0f64..(2.0 * PI),
        v_frac in 0.02f64..0.98,
    ) {
        let theta = dir(xi);
        let geom = support_geometry(&phantom, &theta).unwrap();
        let v = geom.v_minus + v_frac * (geom.v_plus - geom.v_minus);
        let lhs = radon(&phantom, v, &theta);
        let rhs = cbt(&phantom, geom.f_minus(v), &theta);
        prop_assert!((lhs - rhs).abs() <= 1e-12);
        let outside_lo = radon(&phantom, geom.v_minus - 0.01, &theta);
        let outside_hi = radon(&phantom, geom.v_plus + 0.01, &theta);
        prop_assert!(outside_lo.abs() <= 1e-12 && outside_hi.abs() <= 1e-12);
    }

    // Differential measurements cancel any positive scatter density.
    #[test]
    fn measurement_differences_recover_sbrt(
        phantom in arb_phantom(),
        xi_k in 0.0f64..(2.0 * PI),
        half in 0.2f64..1.3,
        t in -1.5f64..1.5,
        y in -1.5f64..1.5,
        scale in 0.1f64..5.0,
    ) {
        let cfg = ScatterConfig::new(59.5).unwrap();
        let tk = dir(xi_k);
        let (ti, tj) = (dir(xi_k + half), dir(xi_k - half));
        let f = move |x: Vec2, q: f64| scale * (1.0 + x.t * x.t + 0.3 * (q + x.y).cos().abs());
        let x = Vec2::new(t, y);
        let got = sbrt_from_measurements(&f, &phantom, x, &ti, &tj, &tk, &cfg).unwrap();
        let want = sbrt(&phantom, x, &ti, &tj).unwrap();
        prop_assert!((got - want).abs() <= 1e-12);
    }
}
