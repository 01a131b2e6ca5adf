//! Structural invariants of the tower, measured pointwise.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::henon::{HenonMap, Point};
use crate::numkit::{mp_precision, CMp, PrecisionScope, Scalar};

use super::tower::tangent_jacobian;
use super::{Folds, Tower};

const DET_BITS: u32 = 256;

fn to_mp<T: Scalar>(z: &T) -> CMp {
    let (re, im) = z.to_dec();
    CMp::from_dec(&re, &im).expect("decimal round trip")
}

/// Relative error of `det D(F0^{q_{2n}})(z) = a^{q_{2n}}`, with the tangent map
/// propagated at 256 bits so the comparison is not swamped by cancellation.
pub fn det_identity_error<T: Scalar>(tower: &Tower<T>, n: usize, z: &Point<T>) -> Result<f64> {
    let _scope = PrecisionScope::new(mp_precision().max(DET_BITS));
    let res = (|| {
        let a = to_mp(&tower.a);
        let zz = (to_mp(&z.0), to_mp(&z.1));
        let q = tower.q[2 * n];
        let m = tangent_jacobian(&to_mp(&tower.c0), &a, &zz, q)?;
        let det = m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone();
        let expect = Scalar::powu(&a, q);
        Ok(((det - expect.clone()) / expect).abs())
    })();
    res
}

/// Level-0 points `Psi_n(p)` for a fixed spread of level-`n` test points.
pub fn det_test_points<T: Scalar>(tower: &Tower<T>, n: usize) -> Result<Vec<Point<T>>> {
    let pts = [
        (0.13, -0.07, 0.05, 0.02),
        (-0.21, 0.16, -0.04, 0.06),
        (0.34, 0.22, 0.02, -0.03),
        (0.05, -0.29, -0.06, -0.01),
        (-0.11, -0.18, 0.03, 0.07),
    ];
    let lv = tower.level(n);
    pts.iter()
        .map(|&(xr, xi, yr, yi)| lv.psi(&(T::c(xr, xi), T::c(yr, yi))))
        .collect()
}

/// `max |b_y(x, 0)|` over a circle of radius `r` about 0 at level `n`.
pub fn sup_dy_b<T: Scalar>(tower: &Tower<T>, n: usize, r: f64) -> Result<f64> {
    let lv = tower.level(n);
    let mut s: f64 = 0.0;
    for j in 0..16 {
        let x = T::cis(j, 16).scale(r);
        let (_, _, by) = lv.db(&(x, T::zero()))?;
        s = s.max(by.abs());
    }
    Ok(s)
}

/// Gap between `B_{n+k}(p)` evaluated directly and through
/// `Phi^{-1} o B_n^{(q_{2(n+k)})} o Phi`, which runs separate microscope solves.
pub fn conjugacy_gap<T: Scalar>(tower: &Tower<T>, n: usize, k: usize, p: &Point<T>) -> Result<f64> {
    let deep = tower.level(n + k);
    let direct = deep.big_b(p)?;
    let shallow = tower.level(n);
    let pn = tower.micro(n, k, p)?;
    let z = shallow.psi(&pn)?;
    let w = tower.iterate(&z, tower.q[2 * (n + k)])?;
    let wn = shallow.psi_inv(&w)?;
    let back = shallow.psi(&wn)?;
    let out = deep.psi_inv(&back)?;
    Ok((out.0 - direct.0).abs().max((out.1 - direct.1).abs()))
}

/// Operator norm of `D Phi_n^{n+k}` at the level-`(n+k)` fold.
pub fn microscope_norm<T: Scalar>(tower: &Tower<T>, folds: &Folds<T>, n: usize, k: usize) -> Result<f64> {
    let p = (folds.kappa[n + k].clone(), folds.iota[n + k].clone());
    let h = T::from_f64(T::fd_step());
    let f = |q: &Point<T>| tower.micro(n, k, q);
    let xp = f(&(p.0.clone() + h.clone(), p.1.clone()))?;
    let xm = f(&(p.0.clone() - h.clone(), p.1.clone()))?;
    let yp = f(&(p.0.clone(), p.1.clone() + h.clone()))?;
    let ym = f(&(p.0.clone(), p.1.clone() - h.clone()))?;
    let two_h = h.scale(2.0);
    let m = [
        [((xp.0 - xm.0) / two_h.clone()).to_c64(), ((yp.0 - ym.0) / two_h.clone()).to_c64()],
        [((xp.1 - xm.1) / two_h.clone()).to_c64(), ((yp.1 - ym.1) / two_h).to_c64()],
    ];
    Ok(spectral_norm(&m))
}

pub fn spectral_norm(m: &[[C64; 2]; 2]) -> f64 {
    let fro = m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    let disc = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
    ((fro + disc) / 2.0).sqrt()
}

/// Cauchy-Riemann residual of `a -> kappa_n(a)` at `a0`, from towers rebuilt at
/// `a0 +- h` and `a0 +- i h`.
pub fn fold_cr_residual(a0: C64, depth: usize, n: usize, h: f64) -> Result<(C64, f64)> {
    let kap = |a: C64| -> Result<C64> {
        let t = Tower::build(HenonMap::golden(a), depth)?;
        Ok(Folds::compute(&t)?.kappa[n])
    };
    let dre = (kap(a0 + h)? - kap(a0 - h)?) / (2.0 * h);
    let dim = (kap(a0 + C64::i() * h)? - kap(a0 - C64::i() * h)?) / (C64::i() * 2.0 * h);
    Ok((dre, (dre - dim).norm() / dre.norm().max(1e-300)))
}
