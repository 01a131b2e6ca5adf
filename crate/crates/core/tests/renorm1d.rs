use num_complex::Complex64 as C;
use siegel_renorm::renorm1d::artifact::ZetaArtifact;
use siegel_renorm::renorm1d::oracle::{aitken, critical_orbit_scaling};
use siegel_renorm::renorm1d::universal::koenigs_extend;
use siegel_renorm::renorm1d::{canonical, direct_pair, initial_pair, quadratic_c, renorm_step, FixedPoint};
use siegel_renorm::Scalar;

/// Frozen from the fixed-point solver at tolerance 1e-12.
const LAMBDA_STAR: f64 = 0.550_463_436_4;
const X_STAR: C = C::new(0.561_751_155_5, -0.648_983_810_8);
const U_STAR_AT_XSTAR_MINUS_1: C = C::new(-0.277_393_151_7, -0.453_165_861_7);

fn zero() -> C {
    C::new(0.0, 0.0)
}

#[test]
fn initial_pair_is_normalized_quadratic() {
    let p = initial_pair();
    assert!((p.xi(&zero()) - 1.0).norm() < 1e-15);
    assert!(p.xi.d1(&zero()).norm() < 1e-15);
    let c = quadratic_c();
    let x = C::new(0.2, 0.1);
    assert!((p.eta(&x) - (c * x * x + 1.0)).norm() < 1e-13);
    // The fixed point of x^2 + c has multiplier mu*.
    let fixed = (1.0 - (1.0 - 4.0 * c).sqrt()) / 2.0;
    assert!((fixed * fixed + c - fixed).norm() < 1e-14);
    assert!((2.0 * fixed - C::golden_mu()).norm() < 1e-12);
}

#[test]
fn fixed_point_is_fixed_by_renormalization() {
    let fp = canonical();
    let next = renorm_step(&fp.pair).unwrap();
    assert!(next.distance(&fp.pair) < 1e-8, "{}", next.distance(&fp.pair));
    assert!((next.xi(&zero()) - 1.0).norm() < 1e-12);
    assert!(next.xi.d1(&zero()).norm() < 1e-12);
    assert!(fp.pair.fixed_point_residual() < 1e-10);
}

#[test]
fn frozen_universal_values() {
    let u = &canonical().universal;
    assert!((u.lambda_star - LAMBDA_STAR).norm() < 1e-9, "{}", u.lambda_star);
    assert!((u.x_star - X_STAR).norm() < 1e-9);
    assert!((u.u_star_at_xstar_minus_1 - U_STAR_AT_XSTAR_MINUS_1).norm() < 1e-8);
}

#[test]
fn repelling_fixed_point_and_branches() {
    let fp = canonical();
    let u = &fp.universal;
    assert!((fp.pair.xi(&u.x_star) - u.x_star).norm() < 1e-10);
    assert!(u.xi_prime_x_star.norm() > 1.0);
    // Two distinct preimages of 0, each mapped to 0.
    assert!((u.exp_branch_at_0 - u.rot_branch_at_0).norm() > 0.1);
    assert!(fp.pair.xi(&u.exp_branch_at_0).norm() < 1e-12);
    assert!(fp.pair.xi(&u.rot_branch_at_0).norm() < 1e-12);
}

#[test]
fn lambda_by_two_routes() {
    let fp = canonical();
    let l = fp.universal.lambda_star;
    let phi = fp.universal.phi_prime_1;
    assert!((phi.sqrt() - l).norm() / l.norm() < 1e-6);
    let fd = fp.universal.phi_derivative_check(&fp.pair).unwrap();
    assert!((fd - phi).norm() / phi.norm() < 1e-6);
}

#[test]
fn renormalized_quadratic_approaches_lambda_star() {
    let l = canonical().universal.lambda_star;
    let mut p = direct_pair(2, 128);
    let mut dists = Vec::new();
    for _ in 0..5 {
        p = renorm_step(&p).unwrap();
        dists.push((p.lambda() - l).norm());
    }
    // Geometric contraction at a rate near 1/3.
    for w in dists.windows(2) {
        assert!(w[1] < 0.4 * w[0], "{dists:?}");
    }
    assert!(dists[4] < 1e-3, "{dists:?}");
}

#[test]
fn critical_orbit_oracle_agrees() {
    let l = canonical().universal.lambda_star;
    let s = critical_orbit_scaling(20, 200);
    assert!((s.aitken - l).norm() / l.norm() < 1e-3, "{}", s.aitken);
}

#[test]
fn aitken_is_exact_on_geometric_sequences() {
    let lim = C::new(0.3, -0.2);
    let r = C::new(0.5, 0.1);
    let x = |k: i32| lim + r.powi(k);
    assert!((aitken(x(3), x(4), x(5)) - lim).norm() < 1e-14);
}

#[test]
fn koenigs_linearizer() {
    let u = &canonical().universal;
    let s = u.phi_prime_1;
    assert!(u.u_star.coeffs[0].norm() < 1e-14);
    assert!((u.u_star.coeffs[1] - 1.0).norm() < 1e-14);
    for z in u.u_star.domain.circle(24, 0.8) {
        let lhs = u.u_star.at(&u.phi_check.at(&z));
        assert!((lhs - s * u.u_star.at(&z)).norm() < 1e-8);
    }
    // The extension does not depend on how many pullbacks it uses.
    for z in [C::new(0.3, 0.1), C::new(-0.25, 0.2), C::new(0.1, -0.35)] {
        let (_, gap) = koenigs_extend(&u.u_star, &u.phi_check, s, z).unwrap();
        assert!(gap < 1e-8, "{gap}");
    }
    assert!(u.koenigs_m_gap < 1e-8);
}

#[test]
fn expansion_domain_is_admissible() {
    let u = &canonical().universal;
    assert!(u.expansion_check.ok(), "{:?}", u.expansion_check);
    assert!(u.expansion_domain.contains(&u.x_star));
    assert!(u.expansion_domain.contains(&zero()));
    assert!(!u.expansion_domain.contains(&C::new(1.0, 0.0)));
}

#[test]
fn artifact_round_trip() {
    let fp = canonical();
    let json = fp.artifact().to_json().unwrap();
    let back = FixedPoint::from_artifact(&ZetaArtifact::from_json(&json).unwrap()).unwrap();
    assert!(back.pair.distance(&fp.pair) < 1e-14);
    assert!((back.universal.lambda_star - fp.universal.lambda_star).norm() < 1e-14);
    assert!(ZetaArtifact::from_json("{\"format\": 1}").is_err());
}
