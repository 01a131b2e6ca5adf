use num_complex::Complex64 as C;
use proptest::prelude::*;
use siegel_renorm::renorm1d::canonical;
use siegel_renorm::renorm2d::checks::{conjugacy_gap, det_identity_error, det_test_points, sup_dy_b};
use siegel_renorm::renorm2d::{cap_derivative, eval_pair, Folds, Tower, TowerSummary, UniversalFunctions, Which};
use siegel_renorm::{CMp, PrecisionScope, Scalar};

fn tower(a: f64, depth: usize) -> Tower<C> {
    Tower::golden(C::new(a, 0.0), depth).unwrap()
}

fn origin() -> (C, C) {
    (C::new(0.0, 0.0), C::new(0.0, 0.0))
}

#[test]
fn level_zero_sends_origin_to_critical_value() {
    let t = tower(0.2, 2);
    let p = eval_pair(&t, 0, Which::A, &origin()).unwrap();
    assert!((p.0 - 1.0).norm() < 1e-12 && p.1.norm() < 1e-12, "{p:?}");
    assert!(eval_pair(&t, 5, Which::A, &origin()).is_err());
}

#[test]
fn normalization_holds_at_every_level() {
    let t = tower(0.2, 3);
    assert_eq!(t.depth(), 3);
    for n in 1..=3 {
        let lv = t.level(n);
        let z = C::new(0.0, 0.0);
        assert!((lv.xi(&z).unwrap() - 1.0).norm() < 1e-10);
        let h = 1e-5;
        let d = (lv.xi(&C::new(h, 0.0)).unwrap() - lv.xi(&C::new(-h, 0.0)).unwrap()) / (2.0 * h);
        assert!(d.norm() < 1e-8, "level {n}: {d}");
        assert!(t.diag[n - 1].accepted);
    }
}

#[test]
fn determinant_law_of_return_maps() {
    let t = tower(0.2, 3);
    for n in 1..=3 {
        for z in det_test_points(&t, n).unwrap() {
            assert!(det_identity_error(&t, n, &z).unwrap() < 1e-6);
        }
    }
}

#[test]
fn lambda_sequence_approaches_lambda_star() {
    let l = canonical().universal.lambda_star;
    let t = tower(0.1, 3);
    let d: Vec<f64> = (1..=3).map(|n| (t.lam[n] - l).norm()).collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
}

#[test]
fn return_map_shifts_coordinates() {
    let t = tower(0.2, 2);
    for n in 0..=2 {
        let p = (C::new(0.13, -0.05), C::new(0.02, 0.01));
        let b = eval_pair(&t, n, Which::B, &p).unwrap();
        assert_eq!(b.1, p.0);
    }
}

#[test]
fn vertical_derivative_flattens_super_exponentially() {
    let t = tower(0.2, 3);
    let s: Vec<f64> = (1..=3).map(|n| sup_dy_b(&t, n, 0.3).unwrap()).collect();
    for n in 0..2 {
        assert!(s[n + 1].ln() / s[n].ln() > 1.5, "{s:?}");
    }
}

#[test]
fn deeper_return_map_is_conjugate_to_shallower() {
    let t = tower(0.2, 3);
    let p = (C::new(0.1, 0.05), C::new(0.01, -0.02));
    assert!(conjugacy_gap(&t, 1, 1, &p).unwrap() < 1e-8);
}

#[test]
fn cap_derivative_factorization() {
    let t = tower(0.1, 3);
    let folds = Folds::compute(&t).unwrap();
    let l2 = canonical().universal.lambda_star.powi(2);
    let mut dev = Vec::new();
    for n in 1..=3 {
        let cap = cap_derivative(&t, &folds, n, 1).unwrap();
        assert!(cap.reassembly < 1e-8);
        assert!((cap.lambda - t.lam[n]).norm() < 1e-8);
        assert!(cap.matrix[1][0].norm() < 1e-6);
        dev.push((cap.u / l2 - 1.0).norm());
    }
    // u_n / lambda*^2 moves towards 1 with depth.
    assert!(dev[2] < dev[1] && dev[1] < dev[0], "{dev:?}");
}

#[test]
fn cap_shear_matches_alpha() {
    let fp = canonical();
    let t = tower(0.2, 3);
    let folds = Folds::compute(&t).unwrap();
    let uf = UniversalFunctions::extract(&t, t.resolvable_depth(), &fp.pair).unwrap();
    let target = fp.universal.lambda_star * uf.alpha_at_1;
    for n in 2..=3 {
        let cap = cap_derivative(&t, &folds, n, 1).unwrap();
        let r = (cap.t / target).norm();
        assert!((0.5..=2.0).contains(&r), "level {n}: {r}");
    }
}

#[test]
fn beta_is_universal_across_parameters() {
    let fp = canonical();
    let b: Vec<C> = [0.1, 0.2]
        .iter()
        .map(|&a| {
            let t = tower(a, 3);
            let uf = UniversalFunctions::extract(&t, t.resolvable_depth(), &fp.pair).unwrap();
            assert!(uf.beta_min_abs > 0.1);
            uf.beta_at_0
        })
        .collect();
    assert!(b[0].norm() > 0.1);
    assert!((b[0] - b[1]).norm() / b[1].norm() < 0.15, "{b:?}");
}

#[test]
fn alpha_formula_at_depth() {
    let fp = canonical();
    let _scope = PrecisionScope::new(256);
    let t = Tower::golden(CMp::c(0.2, 0.0), 5).unwrap();
    assert_eq!(t.depth(), 5);
    assert_eq!(t.resolvable_depth(), 4);
    let gaps: Vec<f64> = (2..=4)
        .map(|n| UniversalFunctions::extract(&t, n, &fp.pair).unwrap().alpha_formula_gap)
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    assert!(gaps[2] < 0.1, "{gaps:?}");
    // -b_y(0, 0)/a^{q_{2n}} settles down with depth.
    let b: Vec<C> = (2..=4)
        .map(|n| t.level(n).beta(&(CMp::c(0.0, 0.0), CMp::c(0.0, 0.0))).unwrap().to_c64())
        .collect();
    assert!((b[2] - b[1]).norm() < (b[1] - b[0]).norm(), "{b:?}");
}

#[test]
fn precision_exhaustion_truncates() {
    let t = tower(0.2, 6);
    assert!(t.depth() < 6);
    assert!(t.resolvable_depth() <= t.depth());
    let s = TowerSummary::of(&t).unwrap();
    assert_eq!(s.accepted_levels, t.depth());
    assert_eq!(s.levels.len(), t.depth() + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn determinant_law_over_parameters(ar in 0.05f64..0.25, ai in -0.1f64..0.1) {
        let t = Tower::golden(C::new(ar, ai), 2).unwrap();
        prop_assume!(t.depth() == 2);
        for z in det_test_points(&t, 2).unwrap() {
            prop_assert!(det_identity_error(&t, 2, &z).unwrap() < 1e-6);
        }
    }

    #[test]
    fn folds_approach_critical_value(ar in 0.05f64..0.25, ai in -0.1f64..0.1) {
        let t = Tower::golden(C::new(ar, ai), 3).unwrap();
        prop_assume!(t.depth() == 3);
        let f = Folds::compute(&t).unwrap();
        let d = f.distances_to_one();
        prop_assert!(d[3] < 1e-12);
        prop_assert!(d[2] < d[1]);
    }
}
