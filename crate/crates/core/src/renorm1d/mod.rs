//! One-dimensional golden-mean pair renormalization.
//!
//! Both maps of a pair are even, so they are stored as series in `u = x^2`:
//! `eta(x) = E(x^2)` and `xi(x) = X(x^2)`. The normalization `xi'(0) = 0`
//! then holds identically.

pub mod artifact;
pub mod oracle;
pub mod universal;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::henon::fib;
use crate::numkit::linalg::{inner, lstsq, orthonormalize};
use crate::numkit::{PrecisionScope, CMp, DiskDomain, EvenMap, Scalar, Series1D};

pub use universal::UniversalData1D;

pub const DEGREE: usize = 110;

/// Disk in `u` carrying `E`.
pub fn z_domain() -> DiskDomain<C64> {
    DiskDomain::new(C64::new(0.6, 0.2), 0.85).unwrap()
}

/// Disk in `u` carrying `X`.
pub fn w_domain() -> DiskDomain<C64> {
    DiskDomain::new(C64::new(-0.3, -0.2), 0.85).unwrap()
}

#[derive(Clone, Debug)]
pub struct RenormPair1D {
    pub eta: EvenMap<C64>,
    pub xi: EvenMap<C64>,
    pub lambda_step: C64,
    pub level: usize,
}

/// `c = mu/2 - mu^2/4` for the golden Siegel multiplier.
pub fn quadratic_c() -> C64 {
    let mu = C64::golden_mu();
    mu / 2.0 - mu * mu / 4.0
}

impl RenormPair1D {
    pub fn eta(&self, x: &C64) -> C64 {
        self.eta.at(x)
    }

    pub fn xi(&self, x: &C64) -> C64 {
        self.xi.at(x)
    }

    pub fn lambda(&self) -> C64 {
        self.eta.at(&C64::new(1.0, 0.0))
    }

    pub fn normalization_defect(&self) -> f64 {
        let z = C64::new(0.0, 0.0);
        (self.xi(&z) - 1.0).norm().max(self.xi.d1(&z).norm())
    }

    /// Coefficients in the basis scaled to the unit disk.
    fn to_vec(&self) -> Vec<C64> {
        let mut v = rescale(&self.eta.u.coeffs, z_domain().radius);
        v.extend(rescale(&self.xi.u.coeffs, w_domain().radius));
        v
    }

    fn from_vec(v: &[C64], level: usize) -> Self {
        let n = v.len() / 2;
        let eta = EvenMap {
            u: Series1D::from_coeffs(z_domain(), rescale(&v[..n], 1.0 / z_domain().radius)),
        };
        let xi = EvenMap {
            u: Series1D::from_coeffs(w_domain(), rescale(&v[n..], 1.0 / w_domain().radius)),
        };
        let mut p = RenormPair1D {
            eta,
            xi,
            lambda_step: C64::new(0.0, 0.0),
            level,
        };
        p.lambda_step = p.lambda();
        p
    }

    /// Largest difference of the two pairs on circles at 0.9 of each radius.
    pub fn distance(&self, other: &RenormPair1D) -> f64 {
        self.eta
            .u
            .sup_diff(&other.eta.u, 64, 0.9)
            .max(self.xi.u.sup_diff(&other.xi.u, 64, 0.9))
    }

    /// Commuting defect `eta(xi(x)) - xi(eta(x))` at `x = 0.3`.
    pub fn commutator(&self) -> C64 {
        let x = C64::new(0.3, 0.0);
        self.eta(&self.xi(&x)) - self.xi(&self.eta(&x))
    }

    /// Sup over 64 points of both fixed-point equations
    /// `eta(xi(eta(l x)))/l = eta(x)` and `eta(xi(l x))/l = xi(x)`.
    pub fn fixed_point_residual(&self) -> f64 {
        let l = self.lambda();
        let mut worst: f64 = 0.0;
        for (dom, first) in [(z_domain(), true), (w_domain(), false)] {
            for u in dom.circle(64, 0.9) {
                let x = u.sqrt();
                let inner = if first {
                    self.eta(&self.xi(&self.eta(&(l * x))))
                } else {
                    self.eta(&self.xi(&(l * x)))
                };
                let lhs = inner / l;
                let rhs = if first { self.eta(&x) } else { self.xi(&x) };
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }
}

fn rescale(c: &[C64], r: f64) -> Vec<C64> {
    let mut rk = 1.0;
    c.iter()
        .map(|x| {
            let y = x * rk;
            rk *= r;
            y
        })
        .collect()
}

fn linear_map(dom: DiskDomain<C64>, c: C64) -> EvenMap<C64> {
    let mut co = vec![C64::new(0.0, 0.0); DEGREE + 1];
    co[0] = c * dom.center + 1.0;
    co[1] = c;
    EvenMap {
        u: Series1D::from_coeffs(dom, co),
    }
}

/// `eta_0 = xi_0 = c x^2 + 1`.
pub fn initial_pair() -> RenormPair1D {
    let c = quadratic_c();
    let eta = linear_map(z_domain(), c);
    let xi = linear_map(w_domain(), c);
    let mut p = RenormPair1D {
        eta,
        xi,
        lambda_step: C64::new(1.0, 0.0),
        level: 0,
    };
    p.lambda_step = p.lambda();
    p
}

/// Level-`n` pair of the quadratic family built directly from critical-orbit
/// iterates `P^{q}(S sqrt(u))/S`, with `S = P^{q_{2n}}(0)`, at `bits` precision.
pub fn direct_pair(n: usize, bits: u32) -> RenormPair1D {
    let _scope = PrecisionScope::new(bits);
    let mu = CMp::golden_mu();
    let two = CMp::c(2.0, 0.0);
    let four = CMp::c(4.0, 0.0);
    let c = mu.clone() / two - mu.sq() / four;
    let one = <CMp as Scalar>::one();
    let iterate = |mut x: CMp, k: u64| {
        for _ in 0..k {
            x = c.clone() * x.sq() + one.clone();
        }
        x
    };
    let s = iterate(<CMp as Scalar>::zero(), fib(2 * n));
    let sample = |dom: DiskDomain<C64>, k: u64| {
        let m = 2 * (DEGREE + 1);
        let vals: Vec<C64> = dom
            .circle(m, 1.0)
            .iter()
            .map(|u| {
                let x = s.clone() * CMp::from_c64(*u).sqrt();
                (iterate(x, k) / s.clone()).to_c64()
            })
            .collect();
        Series1D::from_circle_values(dom, DEGREE, &vals)
    };
    let eta = EvenMap {
        u: sample(z_domain(), fib(2 * n + 1)),
    };
    let xi = EvenMap {
        u: sample(w_domain(), fib(2 * n)),
    };
    let mut p = RenormPair1D {
        eta,
        xi,
        lambda_step: C64::new(0.0, 0.0),
        level: n,
    };
    p.lambda_step = p.lambda();
    p
}

/// One renormalization step `xi' = eta o xi (l x)/l`, `eta' = eta o xi o eta (l x)/l`
/// with `l = eta(1)`.
pub fn renorm_step(p: &RenormPair1D) -> Result<RenormPair1D> {
    let l = p.lambda();
    let l2 = l * l;
    let zd = z_domain();
    let wd = w_domain();
    let check = |dom: &DiskDomain<C64>, u: C64, what: &str| -> Result<()> {
        if dom.contains(&u) {
            Ok(())
        } else {
            Err(LabError::DomainViolation(format!("{what} at {u}")))
        }
    };
    let m = 2 * (DEGREE + 1);
    let mut xv = Vec::with_capacity(m);
    for u in wd.circle(m, 1.0) {
        let a = l2 * u;
        check(&wd, a, "xi argument")?;
        let b = p.xi.u.at(&a);
        check(&zd, b * b, "eta argument")?;
        xv.push(p.eta.u.at(&(b * b)) / l);
    }
    let mut ev = Vec::with_capacity(m);
    for u in zd.circle(m, 1.0) {
        let a = l2 * u;
        check(&zd, a, "eta argument")?;
        let b = p.eta.u.at(&a);
        check(&wd, b * b, "xi argument")?;
        let c = p.xi.u.at(&(b * b));
        check(&zd, c * c, "eta argument")?;
        ev.push(p.eta.u.at(&(c * c)) / l);
    }
    let mut out = RenormPair1D {
        eta: EvenMap {
            u: Series1D::from_circle_values(zd, DEGREE, &ev),
        },
        xi: EvenMap {
            u: Series1D::from_circle_values(wd, DEGREE, &xv),
        },
        lambda_step: l,
        level: p.level + 1,
    };
    out.lambda_step = l;
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub distances: Vec<f64>,
    pub rate: f64,
    pub final_residual: f64,
    pub commutator: f64,
}

/// Least-squares slope of `log d_k` over the second half of the record.
pub fn geometric_rate(d: &[f64]) -> f64 {
    let tail: Vec<(f64, f64)> = d
        .iter()
        .enumerate()
        .skip(d.len() / 2)
        .filter(|(_, v)| **v > 0.0)
        .map(|(k, v)| (k as f64, v.ln()))
        .collect();
    if tail.len() < 2 {
        return f64::NAN;
    }
    let n = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx).exp()
}

const SUBSPACE: usize = 4;
const FD: f64 = 1e-7;

fn basis_seed(n: usize) -> Vec<Vec<C64>> {
    let g = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut z: Vec<Vec<C64>> = (0..SUBSPACE)
        .map(|k| {
            (0..n)
                .map(|j| C64::from_polar(1.0, g * ((j + 1) * (k + 2)) as f64 + (j * j) as f64 * 0.1))
                .collect()
        })
        .collect();
    orthonormalize(&mut z);
    z
}

fn axpy(v: &[C64], h: f64, w: &[C64]) -> Vec<C64> {
    v.iter().zip(w).map(|(a, b)| a + b * h).collect()
}

/// Fixed point of [`renorm_step`] by a recursive projection iteration: plain
/// iteration on the contracting part and Newton on a 4-dimensional dominant
/// subspace, closed by the commuting condition.
pub fn solve_fixed_point(seed: &RenormPair1D, tol: f64, max_steps: usize) -> Result<(RenormPair1D, ConvergenceReport)> {
    let g_of = |v: &[C64]| -> Result<Vec<C64>> {
        Ok(renorm_step(&RenormPair1D::from_vec(v, 0))?.to_vec())
    };
    let comm = |v: &[C64]| RenormPair1D::from_vec(v, 0).commutator();
    let mut v = seed.to_vec();
    let n = v.len();
    let mut z = basis_seed(n);
    let mut dists = Vec::new();
    for k in 0..max_steps {
        let g = g_of(&v)?;
        let r: Vec<C64> = g.iter().zip(&v).map(|(a, b)| a - b).collect();
        let pair = RenormPair1D::from_vec(&v, 0);
        let next = RenormPair1D::from_vec(&g, 0);
        let res = pair.distance(&next);
        dists.push(res);
        if res < tol {
            let rep = ConvergenceReport {
                rate: geometric_rate(&dists),
                final_residual: res,
                commutator: pair.commutator().norm(),
                distances: dists,
            };
            return Ok((RenormPair1D { level: seed.level + k, ..pair }, rep));
        }
        let jmul = |w: &[C64]| -> Result<Vec<C64>> {
            let gp = g_of(&axpy(&v, FD, w))?;
            Ok(gp.iter().zip(&g).map(|(a, b)| (a - b) / FD).collect())
        };
        if k % 3 == 0 {
            for _ in 0..2 {
                let mut w = z.iter().map(|c| jmul(c)).collect::<Result<Vec<_>>>()?;
                orthonormalize(&mut w);
                z = w;
            }
        }
        let jz = z.iter().map(|c| jmul(c)).collect::<Result<Vec<_>>>()?;
        let c0 = comm(&v);
        let mut cols = vec![vec![C64::new(0.0, 0.0); SUBSPACE + 1]; SUBSPACE];
        for j in 0..SUBSPACE {
            for i in 0..SUBSPACE {
                cols[j][i] = inner(&z[i], &jz[j]) - if i == j { 1.0 } else { 0.0 };
            }
            cols[j][SUBSPACE] = (comm(&axpy(&v, FD, &z[j])) - c0) / FD;
        }
        let zr: Vec<C64> = z.iter().map(|c| inner(c, &r)).collect();
        let mut rhs: Vec<C64> = zr.iter().map(|x| -x).collect();
        rhs.push(-c0);
        let du = lstsq(&cols, &rhs, 1e14)?;
        let mut nv: Vec<C64> = v.iter().zip(&r).map(|(a, b)| a + b).collect();
        for j in 0..SUBSPACE {
            let coef = du[j] - zr[j];
            for (x, zz) in nv.iter_mut().zip(&z[j]) {
                *x += zz * coef;
            }
        }
        v = nv;
    }
    Err(LabError::NoConvergence(format!(
        "fixed point stalled at {:.2e}",
        dists.last().cloned().unwrap_or(f64::NAN)
    )))
}

/// Solved fixed pair with its universal data.
#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub pair: RenormPair1D,
    pub universal: UniversalData1D,
    pub report: ConvergenceReport,
}

pub const SEED_LEVEL: usize = 6;

impl FixedPoint {
    pub fn solve(tol: f64, max_steps: usize) -> Result<FixedPoint> {
        let seed = direct_pair(SEED_LEVEL, 128);
        let (pair, report) = solve_fixed_point(&seed, tol, max_steps)?;
        let universal = UniversalData1D::compute(&pair)?;
        Ok(FixedPoint {
            pair,
            universal,
            report,
        })
    }

    pub fn from_artifact(a: &artifact::ZetaArtifact) -> Result<FixedPoint> {
        let pair = a.pair()?;
        let universal = UniversalData1D::compute(&pair)?;
        Ok(FixedPoint {
            pair,
            universal,
            report: a.report.clone(),
        })
    }

    pub fn artifact(&self) -> artifact::ZetaArtifact {
        artifact::ZetaArtifact::new(&self.pair, &self.universal, &self.report)
    }
}

/// Process-wide fixed point solved once at tolerance `1e-12`.
pub fn canonical() -> &'static FixedPoint {
    static CELL: std::sync::OnceLock<FixedPoint> = std::sync::OnceLock::new();
    CELL.get_or_init(|| FixedPoint::solve(1e-12, 60).expect("fixed point solve"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_pair_normalized() {
        let p = initial_pair();
        let z = C64::new(0.0, 0.0);
        assert!((p.xi(&z) - 1.0).norm() < 1e-15);
        assert!(p.xi.d1(&z).norm() < 1e-15);
        let x = C64::new(0.3, -0.7);
        let c = quadratic_c();
        assert!((p.eta(&x) - (c * x * x + 1.0)).norm() < 1e-14);
    }

    #[test]
    fn direct_pair_is_renormalized_initial_pair() {
        let p0 = direct_pair(0, 128);
        let q = initial_pair();
        let x = C64::new(0.2, 0.1);
        assert!((p0.eta(&x) - q.eta(&x)).norm() < 1e-13);
    }
}
