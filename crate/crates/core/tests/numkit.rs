use num_complex::Complex64 as C;
use proptest::prelude::*;
use siegel_renorm::numkit::roots::{invert_branch, newton_root, zero_count};
use siegel_renorm::{mp_precision, CMp, DiskDomain, LabError, PrecisionScope, Scalar, Series1D};

fn unit_disk() -> DiskDomain<C> {
    DiskDomain::new(C::new(0.0, 0.0), 1.0).unwrap()
}

fn grid(dom: &DiskDomain<C>) -> Vec<C> {
    dom.radial_grid(6, 24)
}

#[test]
fn fit_reproduces_square() {
    let dom = unit_disk();
    let pts = grid(&dom);
    let vals: Vec<C> = pts.iter().map(|z| z * z).collect();
    let s = Series1D::fit(&pts, &vals, dom, 4).unwrap();
    let want = [0.0, 0.0, 1.0, 0.0, 0.0];
    for (c, w) in s.coeffs.iter().zip(want) {
        assert!((c - w).norm() < 1e-12, "{c}");
    }
    assert!(s.tail_bound < 1e-12);
}

#[test]
fn fit_constant_degree_zero() {
    let dom = unit_disk();
    let pts = grid(&dom);
    let vals = vec![C::new(1.0, 0.0); pts.len()];
    let s = Series1D::fit(&pts, &vals, dom, 0).unwrap();
    assert_eq!(s.coeffs.len(), 1);
    assert!((s.coeffs[0] - 1.0).norm() < 1e-14);
}

/// Power series of `exp` summed until the terms drop below `1e-18`.
fn exp_oracle(z: C) -> C {
    let mut term = C::new(1.0, 0.0);
    let mut sum = term;
    let mut k = 1.0;
    while term.norm() > 1e-18 {
        term *= z / k;
        sum += term;
        k += 1.0;
    }
    sum
}

#[test]
fn fit_exponential_against_power_series() {
    let dom = DiskDomain::new(C::new(0.0, 0.0), 0.5).unwrap();
    let pts = grid(&dom);
    let vals: Vec<C> = pts.iter().map(|z| exp_oracle(*z)).collect();
    let s = Series1D::fit(&pts, &vals, dom.clone(), 12).unwrap();
    assert!(s.tail_bound < 1e-10, "{}", s.tail_bound);
    for z in dom.circle(17, 0.8) {
        assert!((s.at(&z) - exp_oracle(z)).norm() < 1e-10);
    }
}

#[test]
fn fit_rejects_bad_input() {
    let dom = unit_disk();
    let pts = vec![C::new(0.1, 0.0), C::new(2.0, 0.0), C::new(0.2, 0.0), C::new(0.3, 0.0)];
    let vals = vec![C::new(1.0, 0.0); 4];
    assert!(matches!(Series1D::fit(&pts, &vals, dom.clone(), 1), Err(LabError::OutsideDomain(_))));
    assert!(Series1D::fit(&pts[..2], &vals[..2], dom, 1).is_err());
}

#[test]
fn evaluate_square_derivatives() {
    let dom = DiskDomain::new(C::new(0.0, 0.0), 4.0).unwrap();
    let sq = Series1D::from_coeffs(dom, vec![C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)]);
    assert!((sq.eval(&C::new(3.0, 0.0), 1).unwrap() - 6.0).norm() < 1e-14);
    assert!((sq.eval(&C::new(0.0, 0.0), 2).unwrap() - 2.0).norm() < 1e-14);
    assert!(sq.eval(&C::new(5.0, 0.0), 0).is_err());
}

#[test]
fn invert_square_on_both_branches() {
    let f = |z: &C| Ok(z * z);
    let four = C::new(4.0, 0.0);
    let w = invert_branch(f, &four, C::new(1.0, 0.0), 1e-12).unwrap();
    assert!((w - 2.0).norm() < 1e-12);
    let w = invert_branch(f, &four, C::new(-1.0, 0.0), 1e-12).unwrap();
    assert!((w + 2.0).norm() < 1e-12);
    assert!(matches!(
        invert_branch(f, &four, C::new(0.0, 0.0), 1e-12),
        Err(LabError::CriticalPoint)
    ));
}

#[test]
fn newton_root_examples() {
    let r = newton_root(|v: &[C]| Ok(vec![v[0] * v[0] - 1.0]), vec![C::new(0.9, 0.0)], 1e-13).unwrap();
    assert!((r[0] - 1.0).norm() < 1e-13);
    let r = newton_root(
        |v: &[C]| Ok(vec![v[0] - v[1], v[0] + v[1] - 2.0]),
        vec![C::new(0.0, 0.0), C::new(0.0, 0.0)],
        1e-13,
    )
    .unwrap();
    assert!((r[0] - 1.0).norm() < 1e-13 && (r[1] - 1.0).norm() < 1e-13);
}

#[test]
fn newton_root_matches_quadratic_formula() {
    // Fixed point of x -> c x^2 + 1 with multiplier mu*.
    let mu = C::golden_mu();
    let c = mu / 2.0 - mu * mu / 4.0;
    let oracle = (1.0 - (1.0 - 4.0 * c).sqrt()) / (2.0 * c);
    assert!((2.0 * c * oracle - mu).norm() < 1e-12);
    let r = newton_root(|v: &[C]| Ok(vec![c * v[0] * v[0] + 1.0 - v[0]]), vec![oracle * 1.05], 1e-13).unwrap();
    assert!((r[0] - oracle).norm() < 1e-12);
}

#[test]
fn precision_scope_restores() {
    let before = mp_precision();
    {
        let _s = PrecisionScope::new(300);
        assert_eq!(CMp::bits(), 300);
        {
            let _t = PrecisionScope::new(120);
            assert_eq!(CMp::bits(), 120);
        }
        assert_eq!(CMp::bits(), 300);
    }
    assert_eq!(mp_precision(), before);
}

#[test]
fn multiprecision_golden_multiplier() {
    let _s = PrecisionScope::new(256);
    let mu = CMp::golden_mu();
    assert!((mu.abs() - 1.0).abs() < 1e-70);
    let d = (mu.to_c64() - C::golden_mu()).norm();
    assert!(d < 1e-15);
    let (re, im) = mu.to_dec();
    let back = CMp::from_dec(&re, &im).unwrap();
    assert!((back - mu).abs() < 1e-70);
}

fn cplx() -> impl Strategy<Value = C> {
    (-0.6f64..0.6, -0.6f64..0.6).prop_map(|(a, b)| C::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derivative_matches_central_difference(coeffs in prop::collection::vec(cplx(), 7), z in cplx()) {
        let s = Series1D::from_coeffs(unit_disk(), coeffs);
        let h = 1e-6;
        let fd = (s.at(&(z + h)) - s.at(&(z - h))) / (2.0 * h);
        let d = s.eval(&z, 1).unwrap();
        prop_assert!((d - fd).norm() <= 1e-6 * d.norm().max(1.0));
    }

    #[test]
    fn fit_is_exact_on_polynomials(coeffs in prop::collection::vec(cplx(), 6)) {
        let dom = unit_disk();
        let pts = grid(&dom);
        let p = Series1D::from_coeffs(dom.clone(), coeffs.clone());
        let vals: Vec<C> = pts.iter().map(|z| p.at(z)).collect();
        let s = Series1D::fit(&pts, &vals, dom, 5).unwrap();
        for (a, b) in s.coeffs.iter().zip(&coeffs) {
            prop_assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn argument_principle_counts_enclosed_roots(roots in prop::collection::vec(cplx(), 1..5), r in 0.2f64..0.9) {
        let center = C::new(0.0, 0.0);
        let min_gap = roots.iter().map(|z| (z.norm() - r).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(min_gap > 1e-3);
        let want = roots.iter().filter(|z| z.norm() < r).count() as i64;
        let (n, _) = zero_count(|z: &C| Ok(roots.iter().map(|w| z - w).product()), &center, r, 1e-300).unwrap();
        prop_assert_eq!(n, want);
    }
}
