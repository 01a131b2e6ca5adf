use std::cell::RefCell;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::henon::{fibonacci, HenonMap, Point};
use crate::numkit::linalg::lu_solve;
use crate::numkit::{newton1_d, Scalar};

use super::checks::det_identity_error;

/// Renormalization tower of `F0(x, y) = (c x^2 + 1 - a y, x)`, the Henon map in
/// level-0 coordinates, with affine rescalings `L_n`.
///
/// The level-`n` microscope `Psi_n` sends level-`n` coordinates to level 0:
/// its second coordinate is `L_n(y)` and its first solves
/// `[F0^{q_{2n}-1}(Z1, L_n(y))]_1 = L_n(x)`.
#[derive(Clone, Debug)]
pub struct Tower<T> {
    pub map: HenonMap<T>,
    pub a: T,
    /// `c` of the Henon map, also the level-0 rescaling.
    pub c0: T,
    /// `lam[n]`, `cs[n]`, `roots[n]` for `n >= 1`; index 0 holds `1`, `0`, `0`.
    pub lam: Vec<T>,
    pub cs: Vec<T>,
    pub roots: Vec<T>,
    pub q: Vec<u64>,
    pub diag: Vec<LevelDiag>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelDiag {
    pub level: usize,
    pub newton_iters: usize,
    pub normalization_residual: f64,
    pub det_rel_err: f64,
    /// `|a|^{q_{2n}}` above the square root of the working epsilon, so that
    /// finite differences of size `a^{q_{2n}}` keep a few digits.
    pub resolvable: bool,
    pub accepted: bool,
}

const DET_TOL: f64 = 1e-5;
const CONT_STEP: f64 = 0.05;

impl<T: Scalar> Tower<T> {
    fn empty(map: HenonMap<T>, depth: usize) -> Self {
        let a = map.a.clone();
        let c0 = map.c.clone();
        Tower {
            map,
            a,
            c0,
            lam: vec![T::one()],
            cs: vec![T::zero()],
            roots: vec![T::zero()],
            q: fibonacci(2 * depth + 6),
            diag: Vec::new(),
        }
    }

    /// Builds levels `1..=depth`, stopping at the first level that fails the
    /// trust checks.
    pub fn build(map: HenonMap<T>, depth: usize) -> Result<Tower<T>> {
        let mut t = Tower::empty(map, depth);
        for n in 1..=depth {
            match t.normalize(n) {
                Ok(d) => {
                    let ok = d.accepted;
                    t.diag.push(d);
                    if !ok {
                        t.truncate(n - 1);
                        break;
                    }
                }
                Err(e) => {
                    if n == 1 {
                        return Err(e);
                    }
                    break;
                }
            }
        }
        Ok(t)
    }

    pub fn golden(a: T, depth: usize) -> Result<Tower<T>> {
        Tower::build(HenonMap::golden(a), depth)
    }

    fn truncate(&mut self, n: usize) {
        self.lam.truncate(n + 1);
        self.cs.truncate(n + 1);
        self.roots.truncate(n + 1);
    }

    pub fn depth(&self) -> usize {
        self.lam.len() - 1
    }

    pub fn qn(&self, k: usize) -> u64 {
        self.q[k]
    }

    /// `a^{q_k}`.
    pub fn a_pow(&self, k: usize) -> T {
        self.a.powu(self.q[k])
    }

    pub fn step(&self, p: &Point<T>) -> Point<T> {
        let (x, y) = p;
        (
            self.c0.clone() * x.sq() + T::one() - self.a.clone() * y.clone(),
            x.clone(),
        )
    }

    pub fn iterate(&self, p: &Point<T>, k: u64) -> Result<Point<T>> {
        let mut z = p.clone();
        for _ in 0..k {
            z = self.step(&z);
        }
        if z.0.is_finite() && z.0.abs() < 1e8 && z.1.abs() < 1e8 {
            Ok(z)
        } else {
            Err(LabError::Escape)
        }
    }

    /// Iterate with the first row of the tangent map: `(x_k, y_k, dx_k/dz1, dx_k/dz2)`.
    pub fn iterate_d(&self, p: &Point<T>, k: u64) -> Result<(T, T, T, T)> {
        let (mut x, mut y) = p.clone();
        let (mut dxx, mut dxy, mut dyx, mut dyy) = (T::one(), T::zero(), T::zero(), T::one());
        let two_c = self.c0.scale(2.0);
        for _ in 0..k {
            let t = two_c.clone() * x.clone();
            let nxx = t.clone() * dxx.clone() - self.a.clone() * dyx;
            let nxy = t * dxy.clone() - self.a.clone() * dyy;
            dyx = dxx;
            dyy = dxy;
            dxx = nxx;
            dxy = nxy;
            let nx = self.c0.clone() * x.sq() + T::one() - self.a.clone() * y;
            y = x;
            x = nx;
        }
        if x.is_finite() && x.abs() < 1e8 {
            Ok((x, y, dxx, dxy))
        } else {
            Err(LabError::Escape)
        }
    }

    /// `[F0^k z]_1` and its derivative along `dz`.
    pub fn first_d(&self, z: &Point<T>, dz: &Point<T>, k: u64) -> Result<(T, T)> {
        let (x, _, d1, d2) = self.iterate_d(z, k)?;
        Ok((x, d1 * dz.0.clone() + d2 * dz.1.clone()))
    }

    /// Full tangent matrix of `F0^k`.
    pub fn jacobian(&self, p: &Point<T>, k: u64) -> Result<[[T; 2]; 2]> {
        tangent_jacobian(&self.c0, &self.a, p, k)
    }

    /// `L_n(t)`: apply `t -> lam_j t + c_j` for `j = n, ..., 1`.
    pub fn big_l(&self, n: usize, t: &T) -> T {
        let mut t = t.clone();
        for j in (1..=n).rev() {
            t = self.lam[j].clone() * t + self.cs[j].clone();
        }
        t
    }

    /// Inverse of [`Tower::big_l`].
    pub fn ell(&self, n: usize, t: &T) -> T {
        let mut t = t.clone();
        for j in 1..=n {
            t = (t - self.cs[j].clone()) / self.lam[j].clone();
        }
        t
    }

    /// Product `lam_1 ... lam_n`.
    pub fn scale_factor(&self, n: usize) -> T {
        (1..=n).fold(T::one(), |acc, j| acc * self.lam[j].clone())
    }

    fn newton_tol() -> f64 {
        T::eps() * 64.0
    }

    /// `Z1` with `[F0^m(Z1, z2)]_1 = target`, by Newton from `seed`.
    pub fn solve_z(&self, m: u64, z2: &T, target: &T, seed: T) -> Result<T> {
        newton1_d(
            |z| {
                let (x, _, d, _) = self.iterate_d(&(z.clone(), z2.clone()), m)?;
                Ok((x - target.clone(), d))
            },
            seed,
            Self::newton_tol(),
        )
    }

    fn normalize(&mut self, n: usize) -> Result<LevelDiag> {
        let qn = self.q[2 * n];
        let m = qn - 1;
        let mut z = if n == 1 {
            T::one()
        } else {
            Level::new(self, n - 1).psi(&(T::one(), T::zero()))?.0
        };
        let z2 = self.big_l(n - 1, &T::zero());
        let lt = self.ell(n - 1, &self.iterate(&(z.clone(), z2.clone()), m)?.0);
        for i in (0..16).rev() {
            let t = lt.scale(i as f64 / 16.0);
            z = self.solve_z(m, &z2, &self.big_l(n - 1, &t), z)?;
        }
        let g = |z: &T, c: &T| -> Result<[T; 2]> {
            let zz2 = self.big_l(n - 1, c);
            let (_, _, d1, _) = self.iterate_d(&(z.clone(), zz2.clone()), 2 * qn - 1)?;
            let (x2, _) = self.iterate(&(z.clone(), zz2.clone()), m)?;
            Ok([d1, x2 - zz2])
        };
        let mut c = T::zero();
        let mut iters = 0;
        let mut converged = false;
        let h = T::fd_step();
        for it in 0..60 {
            iters = it + 1;
            let g0 = g(&z, &c)?;
            let hz = T::from_f64(h * z.abs().max(1.0));
            let hc = T::from_f64(h);
            let gzp = g(&(z.clone() + hz.clone()), &c)?;
            let gzm = g(&(z.clone() - hz.clone()), &c)?;
            let gcp = g(&z, &(c.clone() + hc.clone()))?;
            let gcm = g(&z, &(c.clone() - hc.clone()))?;
            let jac: Vec<Vec<T>> = (0..2)
                .map(|i| {
                    vec![
                        (gzp[i].clone() - gzm[i].clone()) / hz.scale(2.0),
                        (gcp[i].clone() - gcm[i].clone()) / hc.scale(2.0),
                    ]
                })
                .collect();
            let d = lu_solve(jac, vec![-g0[0].clone(), -g0[1].clone()])?;
            z = z + d[0].clone();
            c = c + d[1].clone();
            if d[0].abs() + d[1].abs() < T::eps() * 1e3 * (1.0 + z.abs()) {
                converged = true;
                break;
            }
        }
        let zz2 = self.big_l(n - 1, &c);
        let (x, _) = self.iterate(&(z.clone(), zz2.clone()), 2 * qn - 1)?;
        let lam = self.ell(n - 1, &x) - c.clone();
        let g_end = g(&z, &c)?;
        let d0 = self.iterate_d(&(z.clone(), zz2.clone()), m)?.2;
        let residual = (g_end[0].clone() / d0).abs().max(g_end[1].abs());
        self.lam.push(lam);
        self.cs.push(c);
        self.roots.push(z.clone());
        let expect = self.a_pow(2 * n);
        let det_rel_err = if expect.abs() == 0.0 {
            0.0
        } else {
            det_identity_error(self, n, &(z, zz2))?
        };
        let resolvable = expect.abs() > T::eps().sqrt();
        let det_ok = det_rel_err < DET_TOL || self.a.abs() == 0.0;
        Ok(LevelDiag {
            level: n,
            newton_iters: iters,
            normalization_residual: residual,
            det_rel_err,
            resolvable,
            accepted: converged && det_ok,
        })
    }

    /// Deepest level whose `a^{q_{2n}}` effects are resolvable at this precision.
    pub fn resolvable_depth(&self) -> usize {
        self.diag
            .iter()
            .take(self.depth())
            .take_while(|d| d.resolvable)
            .count()
    }

    pub fn level(&self, n: usize) -> Level<'_, T> {
        Level::new(self, n)
    }

    /// `Phi_n^{n+k}`: level `n + k` coordinates into level `n`.
    pub fn micro(&self, n: usize, k: usize, p: &Point<T>) -> Result<Point<T>> {
        let z = self.level(n + k).psi(p)?;
        Ok(self.level(n).psi_inv(&z)?)
    }
}

/// Pointwise evaluator of the level-`n` pair with a cache of Newton seeds.
pub struct Level<'a, T> {
    pub tower: &'a Tower<T>,
    pub n: usize,
    cache: RefCell<Vec<(C64, C64, T)>>,
}

impl<'a, T: Scalar> Level<'a, T> {
    pub fn new(tower: &'a Tower<T>, n: usize) -> Self {
        let cache = vec![(C64::new(0.0, 0.0), C64::new(0.0, 0.0), tower.roots[n].clone())];
        Level {
            tower,
            n,
            cache: RefCell::new(cache),
        }
    }

    fn q(&self) -> u64 {
        self.tower.q[2 * self.n]
    }

    /// `Psi_n(x, y)` in level-0 coordinates.
    pub fn psi(&self, p: &Point<T>) -> Result<Point<T>> {
        let t = self.tower;
        let n = self.n;
        if n == 0 {
            return Ok(p.clone());
        }
        let (x, y) = p;
        let xc = x.to_c64();
        let yc = y.to_c64();
        let (bx, by, mut z) = {
            let c = self.cache.borrow();
            let best = c
                .iter()
                .min_by(|a, b| {
                    let da = (a.0 - xc).norm() + (a.1 - yc).norm();
                    let db = (b.0 - xc).norm() + (b.1 - yc).norm();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            best.clone()
        };
        let dist = (bx - xc).norm() + (by - yc).norm();
        let steps = (dist / CONT_STEP) as usize + 1;
        let m = self.q() - 1;
        let bxt = T::from_c64(bx);
        let byt = T::from_c64(by);
        for i in 1..=steps {
            let s = i as f64 / steps as f64;
            let xx = bxt.clone() + (x.clone() - bxt.clone()).scale(s);
            let yy = byt.clone() + (y.clone() - byt.clone()).scale(s);
            z = t.solve_z(m, &t.big_l(n, &yy), &t.big_l(n, &xx), z)?;
        }
        if dist > 0.02 {
            self.cache.borrow_mut().push((xc, yc, z.clone()));
        }
        Ok((z, t.big_l(n, y)))
    }

    /// `Psi_n(p)` together with its derivative along the direction `dp`.
    pub fn psi_d(&self, p: &Point<T>, dp: &Point<T>) -> Result<(Point<T>, Point<T>)> {
        let t = self.tower;
        let z = self.psi(p)?;
        if self.n == 0 {
            return Ok((z, dp.clone()));
        }
        let s = t.scale_factor(self.n);
        let dz2 = s.clone() * dp.1.clone();
        let (_, _, g1, g2) = t.iterate_d(&z, self.q() - 1)?;
        let dz1 = (s * dp.0.clone() - g2 * dz2.clone()) / g1;
        Ok((z, (dz1, dz2)))
    }

    pub fn psi_inv(&self, z: &Point<T>) -> Result<Point<T>> {
        let t = self.tower;
        if self.n == 0 {
            return Ok(z.clone());
        }
        let (x, _) = t.iterate(z, self.q() - 1)?;
        Ok((t.ell(self.n, &x), t.ell(self.n, &z.1)))
    }

    /// First coordinate of `B_n`.
    pub fn b(&self, p: &Point<T>) -> Result<T> {
        let t = self.tower;
        let z = self.psi(p)?;
        let (x, _) = t.iterate(&z, 2 * self.q() - 1)?;
        Ok(t.ell(self.n, &x))
    }

    pub fn big_b(&self, p: &Point<T>) -> Result<Point<T>> {
        Ok((self.b(p)?, p.0.clone()))
    }

    /// `A_n = (a_n, h_n)`.
    pub fn big_a(&self, p: &Point<T>) -> Result<Point<T>> {
        let t = self.tower;
        let n = self.n;
        let z = self.psi(p)?;
        let (x, _) = t.iterate(&z, t.q[2 * n + 2] - 1)?;
        let (y, _) = t.iterate(&z, t.q[2 * n + 1] - 1)?;
        let h = t.ell(n, &y);
        Ok((t.ell(n, &x), h))
    }

    /// `(b, b_x, b_y)`; `b_y` from the Jacobian identity
    /// `b_y = -a^{q_{2n}} d(F^{q_{2n}} Z)/d(Z)` with `d(Z) = d[F^{q_{2n}-1} Z]_1/dZ1`.
    pub fn db(&self, p: &Point<T>) -> Result<(T, T, T)> {
        let t = self.tower;
        let q = self.q();
        let z = self.psi(p)?;
        let (x, _, dx1, _) = t.iterate_d(&z, 2 * q - 1)?;
        let d0 = t.iterate_d(&z, q - 1)?.2;
        let w = t.iterate(&z, q)?;
        let d1 = t.iterate_d(&w, q - 1)?.2;
        let bx = dx1 / d0.clone();
        let by = -(t.a.powu(q) * d1 / d0);
        Ok((t.ell(self.n, &x), bx, by))
    }

    /// `beta(x) = -b_y(x, y)/a^{q_{2n}}`, computed without cancellation.
    pub fn beta(&self, p: &Point<T>) -> Result<T> {
        let t = self.tower;
        let q = self.q();
        let z = self.psi(p)?;
        let d0 = t.iterate_d(&z, q - 1)?.2;
        let w = t.iterate(&z, q)?;
        let d1 = t.iterate_d(&w, q - 1)?.2;
        Ok(d1 / d0)
    }

    /// `alpha(x) = -d a_n(x, 0)/dy / a^{q_{2n}}` by a central difference in `y`.
    pub fn alpha(&self, x: &T) -> Result<T> {
        let h = T::from_f64(T::fd_step());
        let up = self.big_a(&(x.clone(), h.clone()))?.0;
        let dn = self.big_a(&(x.clone(), -h.clone()))?.0;
        let dy = (up - dn) / h.scale(2.0);
        Ok(-(dy / self.tower.a_pow(2 * self.n)))
    }

    /// `xi_n(x) = b_n(x, 0)`.
    pub fn xi(&self, x: &T) -> Result<T> {
        self.b(&(x.clone(), T::zero()))
    }

    pub fn eta(&self, x: &T) -> Result<T> {
        Ok(self.big_a(&(x.clone(), T::zero()))?.0)
    }
}

/// Tangent matrix of `F0^k` for `F0(x, y) = (c x^2 + 1 - a y, x)`.
pub fn tangent_jacobian<T: Scalar>(c: &T, a: &T, p: &Point<T>, k: u64) -> Result<[[T; 2]; 2]> {
    let (mut x, mut y) = p.clone();
    let mut m = [[T::one(), T::zero()], [T::zero(), T::one()]];
    let two_c = c.scale(2.0);
    for _ in 0..k {
        let t = two_c.clone() * x.clone();
        let r0 = [
            t.clone() * m[0][0].clone() - a.clone() * m[1][0].clone(),
            t * m[0][1].clone() - a.clone() * m[1][1].clone(),
        ];
        m = [r0, m[0].clone()];
        let nx = c.clone() * x.sq() + T::one() - a.clone() * y;
        y = x;
        x = nx;
    }
    if x.is_finite() {
        Ok(m)
    } else {
        Err(LabError::Escape)
    }
}
