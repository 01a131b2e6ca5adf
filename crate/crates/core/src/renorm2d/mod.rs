//! Two-dimensional renormalization tower, folds, cap derivatives and the
//! universal functions `beta`, `alpha`.

pub mod checks;
pub mod tower;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::artifact::CJson;
use crate::error::{LabError, Result};
use crate::henon::Point;
use crate::numkit::{DiskDomain, Scalar, Series1D};
use crate::renorm1d::universal::UniversalData1D;
use crate::renorm1d::RenormPair1D;

pub use tower::{Level, LevelDiag, Tower};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    A,
    B,
}

pub fn eval_pair<T: Scalar>(tower: &Tower<T>, n: usize, which: Which, p: &Point<T>) -> Result<Point<T>> {
    if n > tower.depth() {
        return Err(LabError::Invalid(format!("level {} above tower depth {}", n, tower.depth())));
    }
    let lv = tower.level(n);
    match which {
        Which::A => lv.big_a(p),
        Which::B => lv.big_b(p),
    }
}

/// Fold points `(kappa_n, iota_n)` for `n = 0..=N`, obtained by pushing
/// `(1, 0)` at the deepest level `N` down the microscope chain.
#[derive(Clone, Debug)]
pub struct Folds<T> {
    pub kappa: Vec<T>,
    pub iota: Vec<T>,
    /// `|Phi_{n+1}(kappa_{n+1}, 0) - (kappa_n, 0)|` for `n < N`.
    pub coherence: Vec<f64>,
}

impl<T: Scalar> Folds<T> {
    pub fn compute(tower: &Tower<T>) -> Result<Folds<T>> {
        let nn = tower.depth();
        let top = (T::one(), T::zero());
        let z = tower.level(nn).psi(&top)?;
        let mut kappa = Vec::with_capacity(nn + 1);
        let mut iota = Vec::with_capacity(nn + 1);
        for n in 0..=nn {
            let (k, i) = tower.level(n).psi_inv(&z)?;
            kappa.push(k);
            iota.push(i);
        }
        let mut coherence = Vec::with_capacity(nn);
        for n in 0..nn {
            let (x, y) = tower.micro(n, 1, &(kappa[n + 1].clone(), T::zero()))?;
            coherence.push((x - kappa[n].clone()).abs().max(y.abs()));
        }
        Ok(Folds { kappa, iota, coherence })
    }

    /// Distances `|kappa_n - 1|`.
    pub fn distances_to_one(&self) -> Vec<f64> {
        self.kappa.iter().map(|k| (k.clone() - T::one()).abs()).collect()
    }
}

/// `D = [[u, s lam], [0, lam]] = [[1, s], [0, 1]] diag(u, lam)`, the differential
/// of a microscope map at a fold.
#[derive(Clone, Debug)]
pub struct CapDerivative<T> {
    pub level: usize,
    pub span: usize,
    pub u: T,
    pub lambda: T,
    /// Shear coefficient `s`.
    pub shear: T,
    /// `s / a^{q_{2(n-1)}}`.
    pub t: T,
    pub matrix: [[T; 2]; 2],
    /// Relative reassembly error of the factored form against `matrix`.
    pub reassembly: f64,
}

/// Differential of `Phi_{n-1}^{n-1+k}` at the level-`(n-1+k)` fold, factored.
pub fn cap_derivative<T: Scalar>(tower: &Tower<T>, folds: &Folds<T>, n: usize, k: usize) -> Result<CapDerivative<T>> {
    if n == 0 || k == 0 || n - 1 + k > tower.depth() {
        return Err(LabError::Invalid(format!("cap derivative at n={} k={} unavailable", n, k)));
    }
    let base = n - 1;
    let top = base + k;
    let p = (folds.kappa[top].clone(), folds.iota[top].clone());
    let h = T::from_f64(T::fd_step());
    let f = |q: &Point<T>| tower.micro(base, k, q);
    let xp = f(&(p.0.clone() + h.clone(), p.1.clone()))?;
    let xm = f(&(p.0.clone() - h.clone(), p.1.clone()))?;
    let yp = f(&(p.0.clone(), p.1.clone() + h.clone()))?;
    let ym = f(&(p.0.clone(), p.1.clone() - h.clone()))?;
    let two_h = h.scale(2.0);
    let m = [
        [(xp.0 - xm.0) / two_h.clone(), (yp.0 - ym.0) / two_h.clone()],
        [(xp.1 - xm.1) / two_h.clone(), (yp.1 - ym.1) / two_h.clone()],
    ];
    let u = m[0][0].clone();
    let lambda = (base + 1..=top).fold(T::one(), |acc, j| acc * tower.lam[j].clone());
    let shear = m[0][1].clone() / lambda.clone();
    let t = shear.clone() / tower.a_pow(2 * base);
    let re = [
        [u.clone(), shear.clone() * lambda.clone()],
        [T::zero(), lambda.clone()],
    ];
    let mut err: f64 = 0.0;
    let mut norm: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            err = err.max((re[i][j].clone() - m[i][j].clone()).abs());
            norm = norm.max(m[i][j].abs());
        }
    }
    Ok(CapDerivative {
        level: n,
        span: k,
        u,
        lambda,
        shear,
        t,
        matrix: m,
        reassembly: err / norm,
    })
}

/// `beta` near 0 and `alpha` near 1, measured at one level of a tower.
#[derive(Clone, Debug)]
pub struct UniversalFunctions {
    pub level: usize,
    pub beta: Series1D<C64>,
    pub alpha: Series1D<C64>,
    pub beta_at_0: C64,
    pub beta_prime_at_0: C64,
    pub alpha_at_1: C64,
    /// Relative sup gap between measured `alpha` and `eta*'/xi*' beta` over
    /// the alpha-circle nodes where the continued `xi*` is defined.
    pub alpha_formula_gap: f64,
    pub alpha_formula_nodes: usize,
    /// `min |beta|` on the beta circle.
    pub beta_min_abs: f64,
}

pub const BETA_RADIUS: f64 = 0.3;
pub const ALPHA_RADIUS: f64 = 0.2;
pub const UNIVERSAL_DEGREE: usize = 12;

impl UniversalFunctions {
    pub fn extract<T: Scalar>(tower: &Tower<T>, n: usize, zeta: &RenormPair1D) -> Result<UniversalFunctions> {
        if n == 0 || n > tower.depth() {
            return Err(LabError::Invalid(format!("no level {} for universal functions", n)));
        }
        let lv = tower.level(n);
        let bdom = DiskDomain::new(C64::new(0.0, 0.0), BETA_RADIUS)?;
        let adom = DiskDomain::new(C64::new(1.0, 0.0), ALPHA_RADIUS)?;
        let beta = Series1D::fit_circle(bdom.clone(), UNIVERSAL_DEGREE, |x| {
            Ok(lv.beta(&(T::from_c64(*x), T::zero()))?.to_c64())
        })?;
        let nodes = adom.circle(2 * (UNIVERSAL_DEGREE + 1), 1.0);
        let mut avals = Vec::with_capacity(nodes.len());
        let mut gap: f64 = 0.0;
        let mut used = 0;
        for x in &nodes {
            let xt = T::from_c64(*x);
            let am = lv.alpha(&xt)?.to_c64();
            let bm = lv.beta(&(xt, T::zero()))?.to_c64();
            if let Some(r) = UniversalData1D::alpha_over_beta(zeta, *x) {
                gap = gap.max((am - r * bm).norm() / am.norm());
                used += 1;
            }
            avals.push(am);
        }
        if used == 0 {
            gap = f64::INFINITY;
        }
        let alpha = Series1D::from_circle_values(adom, UNIVERSAL_DEGREE, &avals);
        let beta_min_abs = bdom
            .circle(64, 1.0)
            .iter()
            .map(|x| beta.at(x).norm())
            .fold(f64::INFINITY, f64::min);
        Ok(UniversalFunctions {
            level: n,
            beta_at_0: beta.coeffs[0],
            beta_prime_at_0: beta.coeffs[1],
            alpha_at_1: alpha.coeffs[0],
            beta,
            alpha,
            alpha_formula_gap: gap,
            alpha_formula_nodes: used,
            beta_min_abs,
        })
    }
}

/// Per-level summary emitted as `tower_summary.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub q: u64,
    pub lambda: CJson,
    pub c: CJson,
    pub kappa: CJson,
    pub iota: CJson,
    pub fold_coherence: Option<f64>,
    pub u: Option<CJson>,
    pub t: Option<CJson>,
    pub beta_0: Option<CJson>,
    pub diag: Option<LevelDiag>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerSummary {
    pub a: CJson,
    pub c: CJson,
    pub precision_bits: u32,
    pub accepted_levels: usize,
    pub resolvable_levels: usize,
    pub levels: Vec<LevelSummary>,
}

impl TowerSummary {
    pub fn of<T: Scalar>(tower: &Tower<T>) -> Result<TowerSummary> {
        let folds = Folds::compute(tower)?;
        let mut levels = Vec::new();
        for n in 0..=tower.depth() {
            let cap = if n >= 1 { cap_derivative(tower, &folds, n, 1).ok() } else { None };
            let beta = if n >= 1 {
                tower.level(n).beta(&(T::zero(), T::zero())).ok().map(|b| CJson::of(&b))
            } else {
                None
            };
            levels.push(LevelSummary {
                level: n,
                q: tower.q[2 * n],
                lambda: CJson::of(&tower.lam[n]),
                c: CJson::of(&tower.cs[n]),
                kappa: CJson::of(&folds.kappa[n]),
                iota: CJson::of(&folds.iota[n]),
                fold_coherence: folds.coherence.get(n).copied(),
                u: cap.as_ref().map(|c| CJson::of(&c.u)),
                t: cap.as_ref().map(|c| CJson::of(&c.t)),
                beta_0: beta,
                diag: if n >= 1 { tower.diag.get(n - 1).cloned() } else { None },
            });
        }
        Ok(TowerSummary {
            a: CJson::of(&tower.a),
            c: CJson::of(&tower.c0),
            precision_bits: T::bits(),
            accepted_levels: tower.depth(),
            resolvable_levels: tower.resolvable_depth(),
            levels,
        })
    }
}
