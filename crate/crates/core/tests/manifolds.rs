use num_complex::Complex64 as C;
use proptest::prelude::*;
use siegel_renorm::manifolds::{find_saddle, Curve, manifolds_report, saddle_multipliers, StableManifold, UnstableManifold};
use siegel_renorm::renorm1d::canonical;
use siegel_renorm::renorm2d::Tower;

fn tower(a: f64, depth: usize) -> Tower<C> {
    Tower::golden(C::new(a, 0.0), depth).unwrap()
}

#[test]
fn saddle_is_a_fixed_point_with_split_multipliers() {
    let t = tower(0.1, 3);
    for n in 1..=2 {
        let s = find_saddle(&t, n, 0).unwrap();
        assert!(s.residual < 1e-12);
        assert!(s.mu.norm() > 1.5 && s.nu.norm() < 1e-2, "{} {}", s.mu, s.nu);
        let lv = t.level(n);
        let b = lv.big_b(&(s.deep_x, s.deep_x)).unwrap();
        assert!((b.0 - s.deep_x).norm() < 1e-12 && b.1 == s.deep_x);
    }
}

#[test]
fn saddle_near_universal_repelling_point() {
    let x_star = canonical().universal.x_star;
    let t = tower(0.1, 3);
    let d: Vec<f64> = (1..=3).map(|n| (find_saddle(&t, n, 0).unwrap().deep_x - x_star).norm()).collect();
    assert!(d[2] < d[1] && d[1] < d[0], "{d:?}");
}

#[test]
fn report_bands_at_level_one() {
    let ud = &canonical().universal;
    for a in [0.1, 0.2] {
        let t = tower(a, 3);
        let (r, chi, psi) = manifolds_report(&t, 1, 1, ud).unwrap();
        assert!(r.saddle_residual < 1e-12);
        assert!((0.1..=1.0).contains(&r.nu_over_aq), "{}", r.nu_over_aq);
        assert!((0.1..=2.0).contains(&r.stable_slope_over_aq), "{}", r.stable_slope_over_aq);
        assert!(r.unstable_invariance < 1e-10);
        assert!(r.unstable_angle_to_eigenvector < 1e-10);
        assert!(r.unstable_angle_to_model < 0.05);
        assert!(r.stable_contraction < 1e-3);
        assert!(r.stable_fiber_residual < 1e-10);
        assert!(chi.series.tail_bound.is_finite() && psi.series.tail_bound.is_finite());
        assert_eq!(chi.samples(16, 0.9).len(), 16);
    }
}

#[test]
fn unstable_manifold_is_invariant_at_level_two() {
    let t = tower(0.1, 3);
    let um = UnstableManifold::compute(&t, find_saddle(&t, 2, 0).unwrap()).unwrap();
    assert!(um.invariance_residual().unwrap() < 1e-10);
    assert!(um.local_distances.windows(2).all(|w| w[1] <= w[0].max(1e-14)), "{:?}", um.local_distances);
}

#[test]
fn stable_manifold_of_deeper_saddle() {
    let t = tower(0.1, 3);
    for (n, k) in [(1, 1), (1, 2), (2, 1)] {
        let sm = StableManifold::compute(&t, find_saddle(&t, n, k).unwrap()).unwrap();
        assert!(sm.contraction < 1e-2, "({n},{k}) {}", sm.contraction);
        assert!(sm.fiber_residual().unwrap() < 1e-10);
        // The graph passes through the saddle.
        let loc = sm.saddle.location;
        assert!((sm.at(&loc.1).unwrap() - loc.0).norm() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multipliers_have_trace_and_determinant(bxr in -3.0f64..3.0, bxi in -3.0f64..3.0, byr in -0.1f64..0.1, byi in -0.1f64..0.1) {
        let (bx, by) = (C::new(bxr, bxi), C::new(byr, byi));
        let (mu, nu) = saddle_multipliers(&bx, &by);
        prop_assert!(mu.norm() >= nu.norm());
        prop_assert!((mu + nu - bx).norm() < 1e-10 * (1.0 + bx.norm()));
        prop_assert!((mu * nu + by).norm() < 1e-12);
    }
}
