use super::scalar::Scalar;
use crate::error::{LabError, Result};

/// Solves `a x = b` by LU with partial pivoting. `a` is row-major.
pub fn lu_solve<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(LabError::Singular);
    }
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, a[i][k].abs()))
            .fold((k, -1.0), |m, x| if x.1 > m.1 { x } else { m });
        if pv <= scale * T::eps() * 16.0 {
            return Err(LabError::Singular);
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k].clone() / a[k][k].clone();
            for j in k..n {
                let t = f.clone() * a[k][j].clone();
                a[i][j] = a[i][j].clone() - t;
            }
            let t = f * b[k].clone();
            b[i] = b[i].clone() - t;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for j in i + 1..n {
            s = s - a[i][j].clone() * x[j].clone();
        }
        x[i] = s / a[i][i].clone();
    }
    Ok(x)
}

fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter()
        .zip(v)
        .fold(T::zero(), |acc, (a, b)| acc + a.conj() * b.clone())
}

/// Least squares `min |a x - b|` by modified Gram-Schmidt on the columns.
///
/// `cols[j]` is the j-th column. Fails when the triangular factor loses rank
/// relative to `cond_max`.
pub fn lstsq<T: Scalar>(cols: &[Vec<T>], b: &[T], cond_max: f64) -> Result<Vec<T>> {
    let n = cols.len();
    let mut q: Vec<Vec<T>> = cols.to_vec();
    let mut r = vec![vec![T::zero(); n]; n];
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let h = dot(&q[i], &q[j]);
                r[i][j] = r[i][j].clone() + h.clone();
                let qi = q[i].clone();
                for (x, y) in q[j].iter_mut().zip(qi) {
                    *x = x.clone() - h.clone() * y;
                }
            }
        }
        let nrm = dot(&q[j], &q[j]).re().sqrt();
        r[j][j] = T::from_f64(nrm);
        if nrm == 0.0 {
            return Err(LabError::IllConditioned("rank deficient design".into()));
        }
        let inv = T::from_f64(1.0 / nrm);
        for x in q[j].iter_mut() {
            *x = x.clone() * inv.clone();
        }
    }
    let d: Vec<f64> = (0..n).map(|j| r[j][j].abs()).collect();
    let dmax = d.iter().cloned().fold(0.0, f64::max);
    let dmin = d.iter().cloned().fold(f64::INFINITY, f64::min);
    if dmax / dmin > cond_max {
        return Err(LabError::IllConditioned(format!(
            "diagonal ratio {:.1e}",
            dmax / dmin
        )));
    }
    let qb: Vec<T> = q.iter().map(|c| dot(c, b)).collect();
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = qb[i].clone();
        for j in i + 1..n {
            s = s - r[i][j].clone() * x[j].clone();
        }
        x[i] = s / r[i][i].clone();
    }
    Ok(x)
}

/// Orthonormalizes columns in place (two passes of modified Gram-Schmidt).
pub fn orthonormalize<T: Scalar>(cols: &mut [Vec<T>]) {
    for j in 0..cols.len() {
        for _ in 0..2 {
            for i in 0..j {
                let h = dot(&cols[i], &cols[j]);
                let (head, tail) = cols.split_at_mut(j);
                for (x, y) in tail[0].iter_mut().zip(&head[i]) {
                    *x = x.clone() - h.clone() * y.clone();
                }
            }
        }
        let nrm = dot(&cols[j], &cols[j]).re().sqrt();
        let inv = T::from_f64(1.0 / nrm);
        for x in cols[j].iter_mut() {
            *x = x.clone() * inv.clone();
        }
    }
}

/// Hermitian inner product, conjugating the first argument.
pub fn inner<T: Scalar>(u: &[T], v: &[T]) -> T {
    dot(u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn lu_small() {
        let a = vec![vec![C::new(1.0, 0.0), C::new(-1.0, 0.0)], vec![C::new(1.0, 0.0), C::new(1.0, 0.0)]];
        let x = lu_solve(a, vec![C::new(0.0, 0.0), C::new(2.0, 0.0)]).unwrap();
        assert!((x[0] - C::new(1.0, 0.0)).norm() < 1e-15);
        assert!((x[1] - C::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lstsq_line() {
        let ts: Vec<C> = (0..6).map(|k| C::new(k as f64, 0.0)).collect();
        let ones = vec![C::new(1.0, 0.0); 6];
        let b: Vec<C> = ts.iter().map(|t| t * 2.0 + 1.0).collect();
        let x = lstsq(&[ones, ts], &b, 1e12).unwrap();
        assert!((x[0] - 1.0).norm() < 1e-13 && (x[1] - 2.0).norm() < 1e-13);
    }
}
