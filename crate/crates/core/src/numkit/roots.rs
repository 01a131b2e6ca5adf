use super::linalg::lu_solve;
use super::scalar::Scalar;
use crate::error::{LabError, Result};

pub const NEWTON_CAP: usize = 100;

fn fd_h<T: Scalar>(z: &T) -> T {
    T::from_f64(T::fd_step() * z.abs().max(1.0))
}

/// Central difference of a scalar function.
pub fn central_diff<T: Scalar, F>(f: &mut F, z: &T) -> Result<T>
where
    F: FnMut(&T) -> Result<T>,
{
    let h = fd_h(z);
    let fp = f(&(z.clone() + h.clone()))?;
    let fm = f(&(z.clone() - h.clone()))?;
    Ok((fp - fm) / (h.scale(2.0)))
}

/// Damped Newton for one unknown, with a finite-difference derivative.
///
/// Stops when the step falls below `tol * (1 + |z|)`.
pub fn newton1<T: Scalar, F>(mut f: F, seed: T, tol: f64) -> Result<T>
where
    F: FnMut(&T) -> Result<T>,
{
    newton1_d(
        |z| {
            let v = f(z)?;
            let d = central_diff(&mut f, z)?;
            Ok((v, d))
        },
        seed,
        tol,
    )
}

/// Damped Newton where `fd` returns value and derivative together.
pub fn newton1_d<T: Scalar, F>(mut fd: F, seed: T, tol: f64) -> Result<T>
where
    F: FnMut(&T) -> Result<(T, T)>,
{
    let mut z = seed;
    let (mut v, mut d) = fd(&z)?;
    for _ in 0..NEWTON_CAP {
        if d.abs() == 0.0 {
            return Err(LabError::Singular);
        }
        let dz = v.clone() / d.clone();
        let small = dz.abs() <= tol * (1.0 + z.abs());
        let mut step = dz;
        let mut accepted = None;
        for _ in 0..30 {
            let cand = z.clone() - step.clone();
            match fd(&cand) {
                Ok((nv, nd)) if small || nv.abs() <= v.abs() || !v.abs().is_finite() => {
                    accepted = Some((cand, nv, nd));
                    break;
                }
                _ => step = step.scale(0.5),
            }
        }
        let Some((nz, nv, nd)) = accepted else {
            return Err(LabError::NoConvergence("damping exhausted".into()));
        };
        z = nz;
        v = nv;
        d = nd;
        if small {
            return if z.is_finite() {
                Ok(z)
            } else {
                Err(LabError::NoConvergence("non-finite iterate".into()))
            };
        }
    }
    Err(LabError::NoConvergence(format!(
        "iteration cap, residual {:.2e}",
        v.abs()
    )))
}

fn max_abs<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Finite-difference Jacobian, column `j` is `dg/dx_j`.
pub fn fd_jacobian<T: Scalar, G>(g: &mut G, x: &[T]) -> Result<Vec<Vec<T>>>
where
    G: FnMut(&[T]) -> Result<Vec<T>>,
{
    let n = x.len();
    let mut jac: Vec<Vec<T>> = Vec::new();
    for j in 0..n {
        let h = fd_h(&x[j]);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] = xp[j].clone() + h.clone();
        xm[j] = xm[j].clone() - h.clone();
        let gp = g(&xp)?;
        let gm = g(&xm)?;
        if jac.is_empty() {
            jac = vec![vec![T::zero(); n]; gp.len()];
        }
        let inv = T::one() / h.scale(2.0);
        for i in 0..gp.len() {
            jac[i][j] = (gp[i].clone() - gm[i].clone()) * inv.clone();
        }
    }
    Ok(jac)
}

/// Multivariate damped Newton with a finite-difference Jacobian.
///
/// Returns once every residual component is below `tol`.
pub fn newton_root<T: Scalar, G>(mut g: G, seed: Vec<T>, tol: f64) -> Result<Vec<T>>
where
    G: FnMut(&[T]) -> Result<Vec<T>>,
{
    newton_root_trace(&mut g, seed, tol, |_, _| {})
}

/// As [`newton_root`], reporting `(iteration, residual)` after each evaluation.
pub fn newton_root_trace<T: Scalar, G, O>(g: &mut G, seed: Vec<T>, tol: f64, mut obs: O) -> Result<Vec<T>>
where
    G: FnMut(&[T]) -> Result<Vec<T>>,
    O: FnMut(usize, f64),
{
    let mut x = seed;
    let mut r = g(&x)?;
    let mut res = max_abs(&r);
    for it in 0..NEWTON_CAP {
        obs(it, res);
        if res < tol {
            return Ok(x);
        }
        let jac = fd_jacobian(g, &x)?;
        let neg: Vec<T> = r.iter().map(|v| -v.clone()).collect();
        let dx = lu_solve(jac, neg)?;
        let mut lam = 1.0;
        let mut done = false;
        for _ in 0..30 {
            let cand: Vec<T> = x
                .iter()
                .zip(&dx)
                .map(|(a, b)| a.clone() + b.scale(lam))
                .collect();
            if let Ok(rc) = g(&cand) {
                let rn = max_abs(&rc);
                if rn.is_finite() && rn < res {
                    x = cand;
                    r = rc;
                    res = rn;
                    done = true;
                    break;
                }
            }
            lam *= 0.5;
        }
        if !done {
            return Err(LabError::NoConvergence(format!(
                "stalled at residual {res:.2e}"
            )));
        }
    }
    Err(LabError::NoConvergence(format!(
        "iteration cap, residual {res:.2e}"
    )))
}

/// Preimage of `target` on the branch selected by Newton from `seed`.
pub fn invert_branch<T: Scalar, F>(mut f: F, target: &T, seed: T, tol: f64) -> Result<T>
where
    F: FnMut(&T) -> Result<T>,
{
    let d = central_diff(&mut f, &seed)?;
    if d.abs() < 1e-8 {
        return Err(LabError::CriticalPoint);
    }
    let w = newton1(|z| Ok(f(z)? - target.clone()), seed, T::eps().sqrt().min(tol))?;
    let r = (f(&w)? - target.clone()).abs();
    if r < tol {
        Ok(w)
    } else {
        Err(LabError::NoConvergence(format!(
            "branch residual {r:.2e}"
        )))
    }
}

/// Winding number of `f` around the circle `|z - center| = radius`.
///
/// Nodes double until every argument increment is below one radian.
/// Values of modulus below `floor` signal a zero on the contour.
pub fn winding_number<T: Scalar, F>(mut f: F, center: &T, radius: f64, floor: f64) -> Result<i64>
where
    F: FnMut(&T) -> Result<T>,
{
    let mut m = 64usize;
    loop {
        let pts: Vec<T> = (0..m)
            .map(|j| center.clone() + T::cis(j as i64, m as i64).scale(radius))
            .collect();
        let vals = pts.iter().map(&mut f).collect::<Result<Vec<T>>>()?;
        if vals.iter().any(|v| v.abs() <= floor) {
            return Err(LabError::ZeroOnContour);
        }
        let mut total = 0.0;
        let mut worst: f64 = 0.0;
        for j in 0..m {
            let q = (vals[(j + 1) % m].clone() / vals[j].clone()).to_c64();
            let da = q.arg();
            worst = worst.max(da.abs());
            total += da;
        }
        if worst < 1.0 {
            return Ok((total / (2.0 * std::f64::consts::PI)).round() as i64);
        }
        if m >= 1 << 14 {
            return Err(LabError::NoConvergence("winding refinement cap".into()));
        }
        m *= 2;
    }
}

/// Zero count by the argument principle, retrying jittered radii when a
/// zero sits on the contour.
pub fn zero_count<T: Scalar, F>(mut f: F, center: &T, radius: f64, floor: f64) -> Result<(i64, f64)>
where
    F: FnMut(&T) -> Result<T>,
{
    for jit in [1.0, 1.037, 0.963, 1.071, 0.929] {
        match winding_number(&mut f, center, radius * jit, floor) {
            Err(LabError::ZeroOnContour) => continue,
            other => return other.map(|n| (n, radius * jit)),
        }
    }
    Err(LabError::ZeroOnContour)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn newton1_square_root() {
        let z = newton1(|z: &C| Ok(z * z - 1.0), C::new(0.9, 0.0), 1e-14).unwrap();
        assert!((z - 1.0).norm() < 1e-14);
    }

    #[test]
    fn winding_counts_double_root() {
        let c = C::new(0.1, 0.0);
        let (n, _) = zero_count(|z: &C| Ok((z - c) * (z - c)), &c, 0.01, 1e-300).unwrap();
        assert_eq!(n, 2);
    }
}
