use num_complex::Complex64 as C;
use siegel_renorm::manifolds::{find_saddle, UnstableManifold};
use siegel_renorm::renorm1d::canonical;
use siegel_renorm::renorm2d::{Folds, Tower, UniversalFunctions};
use siegel_renorm::tangency::{
    delta_constants, heteroclinic_solve, universal_seed, unstable_tangency, DeltaConstants, HeteroclinicOptions,
};

/// Frozen from the 200-bit solve of the (2, 1) tangency.
const A_2_1: C = C::new(-0.019_845_11, 0.179_086_74);

fn tower(a: f64, depth: usize) -> Tower<C> {
    Tower::golden(C::new(a, 0.0), depth).unwrap()
}

fn formula_constants() -> DeltaConstants {
    let fp = canonical();
    let t = tower(0.2, 3);
    let uf = UniversalFunctions::extract(&t, t.resolvable_depth(), &fp.pair).unwrap();
    delta_constants(&t, t.depth(), &fp.universal, &uf).unwrap()
}

fn no_split() -> HeteroclinicOptions {
    HeteroclinicOptions {
        splitting_delta: None,
        ..Default::default()
    }
}

#[test]
fn unstable_image_has_quadratic_vertical_tangency() {
    let ud = &canonical().universal;
    let t = tower(0.1, 3);
    let folds = Folds::compute(&t).unwrap();
    for n in 1..=2 {
        let um = UnstableManifold::compute(&t, find_saddle(&t, n, 0).unwrap()).unwrap();
        let vt = unstable_tangency(&um, folds.iota[n]).unwrap();
        assert!(vt.deriv_residual < 1e-7, "{}", vt.deriv_residual);
        let r = (vt.curvature / (ud.xi_star_dd0 / 2.0)).norm();
        assert!((0.5..=1.5).contains(&r), "level {n}: {r}");
    }
}

#[test]
fn bar_constants_are_rescaled() {
    let dc = formula_constants();
    let l = canonical().universal.lambda_star;
    assert!((dc.delta_bar_v.formula - dc.delta_v.formula / (l * l)).norm() < 1e-12);
    assert!(dc.delta_v.measured.is_none());
    assert!(dc.delta_tilde_w != dc.delta_tilde_w_literal);
}

#[test]
fn universal_seed_solves_its_equation() {
    let ud = &canonical().universal;
    let dbv = formula_constants().delta_bar_v.formula;
    for (n, k) in [(1, 1), (2, 1), (2, 3), (3, 2)] {
        let q = siegel_renorm::henon::fib(2 * (n - 1)) as i32;
        let s = universal_seed(n, k, ud, dbv, None);
        let want = ud.lambda_star.powu(2 * k as u32) * ud.u_star_at_xstar_minus_1 / dbv;
        assert!((s.powi(q) - want).norm() < 1e-12 * want.norm());
        let near = universal_seed(n, k, ud, dbv, Some(s));
        assert!((near - s).norm() < 1e-15);
    }
}

#[test]
fn level_one_tangencies_scale_with_lambda_squared() {
    let ud = &canonical().universal;
    let dbv = formula_constants().delta_bar_v.formula;
    let mut a = Vec::new();
    for k in [1, 2] {
        let s = universal_seed(1, k, ud, dbv, Some(C::new(0.2, 0.0)));
        let r = heteroclinic_solve(1, k, s, s, &no_split()).unwrap();
        assert!(r.residuals[0] < 1e-9 && r.residuals[1] < 1e-9, "{:?}", r.residuals);
        assert_eq!(r.multiplicity, 2);
        a.push(r.a.get::<C>().unwrap());
    }
    let ratio = (a[1] / a[0]).norm();
    let l2 = ud.lambda_star.norm_sqr();
    assert!((ratio / l2 - 1.0).abs() < 0.3, "{ratio} vs {l2}");
}

#[test]
fn double_precision_matches_frozen_root() {
    let ud = &canonical().universal;
    let dbv = formula_constants().delta_bar_v.formula;
    let s = universal_seed(2, 1, ud, dbv, Some(C::new(0.2, 0.0)));
    let r = heteroclinic_solve(2, 1, s, s, &no_split()).unwrap();
    let a = r.a.get::<C>().unwrap();
    assert!((a - A_2_1).norm() < 1e-7, "{a}");
    assert_eq!(r.multiplicity, 2);
    assert!(r.tower_diag.iter().all(|d| d.accepted));
}
