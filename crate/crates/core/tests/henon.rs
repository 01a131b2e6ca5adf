use num_complex::Complex64 as C;
use proptest::prelude::*;
use siegel_renorm::henon::{eigenvalues2, fib, fibonacci, Config, HenonMap};
use siegel_renorm::numkit::roots::newton_root;
use siegel_renorm::{LabError, Scalar};

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[test]
fn multipliers_to_coefficients() {
    let f = HenonMap::from_multipliers(c(0.5, 0.0), c(0.0, 0.0));
    assert!(f.a.norm() < 1e-16);
    assert!((f.c - 0.1875).norm() < 1e-15);
    let f = HenonMap::from_multipliers(c(1.0, 0.0), c(1.0, 0.0));
    assert!((f.a - 1.0).norm() < 1e-15);
    assert!((f.c - 1.0).norm() < 1e-15);
}

#[test]
fn golden_fixed_point_has_requested_multipliers() {
    let mu = C::golden_mu();
    let nu = 0.1 / mu;
    let f = HenonMap::from_multipliers(mu, nu);
    // Locate the fixed point afresh from a perturbed seed.
    let seed = vec![f.fixed.0 + 0.01, f.fixed.1 - 0.01];
    let p = newton_root(
        |v: &[C]| {
            let q = f.forward(&(v[0], v[1]));
            Ok(vec![q.0 - v[0], q.1 - v[1]])
        },
        seed,
        1e-14,
    )
    .unwrap();
    let (l1, l2) = eigenvalues2(&f.jacobian(&(p[0], p[1])));
    assert!((l1 - mu).norm() < 1e-12, "{l1}");
    assert!((l2 - nu).norm() < 1e-12, "{l2}");
}

#[test]
fn one_step_of_degenerate_map() {
    let f = HenonMap {
        c: c(0.0, 0.0),
        a: c(1.0, 0.0),
        mu: c(1.0, 0.0),
        nu: c(1.0, 0.0),
        fixed: (c(0.0, 0.0), c(0.0, 0.0)),
    };
    let q = f.apply(&(c(1.0, 0.0), c(1.0, 0.0)), 1).unwrap();
    assert!((q.0 - 0.0).norm() < 1e-15 && (q.1 - 1.0).norm() < 1e-15);
}

#[test]
fn escape_and_degenerate_inverse_are_errors() {
    let f = HenonMap::golden(c(0.2, 0.0));
    assert!(matches!(f.apply(&(c(50.0, 0.0), c(0.0, 0.0)), 10), Err(LabError::Escape)));
    let g = HenonMap::from_multipliers(c(0.5, 0.0), c(0.0, 0.0));
    assert!(g.apply(&(c(0.1, 0.0), c(0.1, 0.0)), -1).is_err());
}

#[test]
fn fibonacci_schedule() {
    assert_eq!(fibonacci(6), vec![1, 1, 2, 3, 5, 8, 13]);
    assert_eq!(fibonacci(1), vec![1, 1]);
    let q = fibonacci(20);
    for k in 2..=20 {
        assert_eq!(q[k], q[k - 1] + q[k - 2]);
    }
    assert_eq!(fib(10), 89);
}

#[test]
fn config_level_cap_follows_precision() {
    assert_eq!(Config::default().level_cap(), 3);
    assert_eq!(Config::parse("precision_bits = 256").unwrap().level_cap(), 5);
    assert_eq!(Config::parse("max_level = 4").unwrap().level_cap(), 4);
    assert!(Config::parse("precision_bits = 20").is_err());
    assert!(Config::parse("tol_newton = -1.0").is_err());
}

fn pt() -> impl Strategy<Value = (C, C)> {
    (-0.8f64..0.8, -0.8f64..0.8, -0.8f64..0.8, -0.8f64..0.8).prop_map(|(a, b, x, y)| (c(a, b), c(x, y)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forward_then_backward_is_identity(p in pt(), ar in 0.05f64..0.3, ai in -0.2f64..0.2) {
        let f = HenonMap::golden(c(ar, ai));
        let q = f.apply(&f.apply(&p, 1).unwrap(), -1).unwrap();
        prop_assert!((q.0 - p.0).norm() < 1e-12 && (q.1 - p.1).norm() < 1e-12);
    }

    #[test]
    fn jacobian_determinant_is_a(p in pt(), ar in 0.05f64..0.3, ai in -0.2f64..0.2) {
        let f = HenonMap::golden(c(ar, ai));
        let h = 1e-6;
        let dx = {
            let (p1, m1) = (f.forward(&(p.0 + h, p.1)), f.forward(&(p.0 - h, p.1)));
            ((p1.0 - m1.0) / (2.0 * h), (p1.1 - m1.1) / (2.0 * h))
        };
        let dy = {
            let (p1, m1) = (f.forward(&(p.0, p.1 + h)), f.forward(&(p.0, p.1 - h)));
            ((p1.0 - m1.0) / (2.0 * h), (p1.1 - m1.1) / (2.0 * h))
        };
        let det = dx.0 * dy.1 - dy.0 * dx.1;
        prop_assert!((det - f.a).norm() < 1e-8);
    }

    #[test]
    fn from_multipliers_fixes_its_point(mr in 0.3f64..2.0, mt in 0.0f64..6.28, nr in 0.01f64..0.5, nt in 0.0f64..6.28) {
        let f = HenonMap::from_multipliers(C::from_polar(mr, mt), C::from_polar(nr, nt));
        let q = f.forward(&f.fixed);
        prop_assert!((q.0 - f.fixed.0).norm() < 1e-12 && (q.1 - f.fixed.1).norm() < 1e-12);
        let (l1, l2) = f.multipliers_at(&f.fixed.0);
        prop_assert!((l1 * l2 - f.a).norm() < 1e-12);
    }
}
