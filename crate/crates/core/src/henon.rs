use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numkit::Scalar;

pub const ESCAPE_BOUND: f64 = 1e8;

pub type Point<T> = (T, T);

/// `F(x, y) = (x^2 + c - a y, x)` together with its fixed point and multipliers.
#[derive(Clone, Debug)]
pub struct HenonMap<T> {
    pub c: T,
    pub a: T,
    pub mu: T,
    pub nu: T,
    pub fixed: Point<T>,
}

impl<T: Scalar> HenonMap<T> {
    pub fn from_multipliers(mu: T, nu: T) -> Self {
        let s = (mu.clone() + nu.clone()).scale(0.5);
        let a = mu.clone() * nu.clone();
        let c = (T::one() + a.clone()) * s.clone() - s.sq();
        HenonMap {
            c,
            a,
            mu,
            nu,
            fixed: (s.clone(), s),
        }
    }

    /// Golden-mean family member with Jacobian `a`: `mu` is the Siegel multiplier.
    pub fn golden(a: T) -> Self {
        let mu = T::golden_mu();
        let nu = a / mu.clone();
        Self::from_multipliers(mu, nu)
    }

    pub fn forward(&self, p: &Point<T>) -> Point<T> {
        let (x, y) = p;
        (x.sq() + self.c.clone() - self.a.clone() * y.clone(), x.clone())
    }

    pub fn backward(&self, p: &Point<T>) -> Point<T> {
        let (x, y) = p;
        (y.clone(), (y.sq() + self.c.clone() - x.clone()) / self.a.clone())
    }

    pub fn apply(&self, p: &Point<T>, count: i64) -> Result<Point<T>> {
        if count < 0 && self.a.abs() == 0.0 {
            return Err(LabError::Invalid("inverse of a degenerate map".into()));
        }
        let mut q = p.clone();
        for _ in 0..count.unsigned_abs() {
            q = if count > 0 {
                self.forward(&q)
            } else {
                self.backward(&q)
            };
            if !(q.0.abs() < ESCAPE_BOUND && q.1.abs() < ESCAPE_BOUND) {
                return Err(LabError::Escape);
            }
        }
        Ok(q)
    }

    pub fn jacobian(&self, p: &Point<T>) -> [[T; 2]; 2] {
        [
            [p.0.scale(2.0), -self.a.clone()],
            [T::one(), T::zero()],
        ]
    }

    /// Multipliers at a point of the form `(x, x)`: roots of `L^2 - 2x L + a`.
    pub fn multipliers_at(&self, x: &T) -> (T, T) {
        let disc = (x.sq() - self.a.clone()).sqrt();
        let l1 = x.clone() + disc.clone();
        let l2 = x.clone() - disc;
        if l1.abs() >= l2.abs() {
            (l1, l2)
        } else {
            (l2, l1)
        }
    }
}

/// Eigenvalues of a 2x2 matrix, larger modulus first.
pub fn eigenvalues2<T: Scalar>(m: &[[T; 2]; 2]) -> (T, T) {
    let tr = m[0][0].clone() + m[1][1].clone();
    let det = m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
    let half = tr.scale(0.5);
    let disc = (half.sq() - det).sqrt();
    let l1 = half.clone() + disc.clone();
    let l2 = half - disc;
    if l1.abs() >= l2.abs() {
        (l1, l2)
    } else {
        (l2, l1)
    }
}

/// `q_0 = q_1 = 1`, `q_{k+1} = q_k + q_{k-1}`, returned up to index `n`.
pub fn fibonacci(n: usize) -> Vec<u64> {
    let mut q = vec![1u64, 1];
    while q.len() < n + 1 {
        let k = q.len();
        q.push(q[k - 1] + q[k - 2]);
    }
    q.truncate(n.max(1) + 1);
    q
}

pub fn fib(k: usize) -> u64 {
    fibonacci(k.max(1))[k]
}

fn default_precision() -> u32 {
    53
}
fn default_eps_bar() -> f64 {
    0.35
}
fn default_tol_newton() -> f64 {
    1e-12
}
fn default_tol_fit() -> f64 {
    1e-10
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default = "default_eps_bar")]
    pub eps_bar: f64,
    #[serde(default)]
    pub max_level: Option<usize>,
    #[serde(default = "default_tol_newton")]
    pub tol_newton: f64,
    #[serde(default = "default_tol_fit")]
    pub tol_fit: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            precision_bits: default_precision(),
            eps_bar: default_eps_bar(),
            max_level: None,
            tol_newton: default_tol_newton(),
            tol_fit: default_tol_fit(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let c: Config = toml::from_str(text).map_err(|e| LabError::Invalid(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Config> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_bar > 0.0 && self.eps_bar < 1.0) {
            return Err(LabError::Invalid(format!("eps_bar {}", self.eps_bar)));
        }
        if self.precision_bits < 53 {
            return Err(LabError::Invalid("precision_bits below 53".into()));
        }
        if !(self.tol_newton > 0.0 && self.tol_fit > 0.0) {
            return Err(LabError::Invalid("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Deepest tower level allowed at the configured precision.
    pub fn level_cap(&self) -> usize {
        self.max_level
            .unwrap_or(if self.precision_bits >= 200 { 5 } else { 3 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn fibonacci_prefix() {
        assert_eq!(fibonacci(6), vec![1, 1, 2, 3, 5, 8, 13]);
        assert_eq!(fibonacci(1), vec![1, 1]);
        assert_eq!(fib(10), 89);
    }

    #[test]
    fn config_defaults_and_keys() {
        let c = Config::parse("precision_bits = 200\neps_bar = 0.3\n").unwrap();
        assert_eq!(c.level_cap(), 5);
        assert_eq!(Config::default().level_cap(), 3);
        assert!(Config::parse("eps_bar = 1.5").is_err());
        assert!(Config::parse("bogus = 1").is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let f = HenonMap::golden(C::new(0.2, 0.0));
        let p = (C::new(0.3, -0.1), C::new(0.2, 0.4));
        let q = f.apply(&f.apply(&p, 1).unwrap(), -1).unwrap();
        assert!((q.0 - p.0).norm() < 1e-12 && (q.1 - p.1).norm() < 1e-12);
    }
}
