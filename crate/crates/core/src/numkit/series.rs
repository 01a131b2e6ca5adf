use super::linalg::lstsq;
use super::scalar::Scalar;
use crate::error::{LabError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct DiskDomain<T> {
    pub center: T,
    pub radius: f64,
}

impl<T: Scalar> DiskDomain<T> {
    pub fn new(center: T, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(LabError::Invalid(format!("disk radius {radius}")));
        }
        Ok(DiskDomain { center, radius })
    }

    pub fn contains(&self, z: &T) -> bool {
        (z.clone() - self.center.clone()).abs() <= self.radius * (1.0 + 1e-12)
    }

    /// `m` equispaced points on the circle of radius `frac * radius`.
    pub fn circle(&self, m: usize, frac: f64) -> Vec<T> {
        let r = T::from_f64(self.radius * frac);
        (0..m)
            .map(|j| self.center.clone() + r.clone() * T::cis(j as i64, m as i64))
            .collect()
    }

    /// Concentric rings with a small angular offset per ring.
    pub fn radial_grid(&self, rings: usize, per_ring: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(rings * per_ring + 1);
        out.push(self.center.clone());
        for i in 0..rings {
            let rho = self.radius * (rings - i) as f64 / rings as f64;
            let rot = T::cis(i as i64, (per_ring * rings) as i64);
            for j in 0..per_ring {
                let w = T::cis(j as i64, per_ring as i64) * rot.clone();
                out.push(self.center.clone() + w.scale(rho));
            }
        }
        out
    }
}

/// Truncated Taylor series about the domain center.
#[derive(Clone, Debug)]
pub struct Series1D<T> {
    pub domain: DiskDomain<T>,
    pub coeffs: Vec<T>,
    pub tail_bound: f64,
}

impl<T: Scalar> Series1D<T> {
    pub fn from_coeffs(domain: DiskDomain<T>, coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty());
        Series1D {
            domain,
            coeffs,
            tail_bound: 0.0,
        }
    }

    pub fn constant(domain: DiskDomain<T>, v: T) -> Self {
        Self::from_coeffs(domain, vec![v])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Value of the `order`-th derivative, without the domain check.
    pub fn deriv_at(&self, z: &T, order: usize) -> T {
        let n = self.coeffs.len();
        if order >= n {
            return T::zero();
        }
        let t = z.clone() - self.domain.center.clone();
        let mut acc = T::zero();
        for k in (order..n).rev() {
            let mut f = 1.0;
            for j in 0..order {
                f *= (k - j) as f64;
            }
            acc = acc * t.clone() + self.coeffs[k].scale(f);
        }
        acc
    }

    pub fn at(&self, z: &T) -> T {
        self.deriv_at(z, 0)
    }

    pub fn eval(&self, z: &T, order: usize) -> Result<T> {
        if !self.domain.contains(z) {
            return Err(LabError::OutsideDomain(format!(
                "{:?} not in disk({:?}, {})",
                z.to_c64(),
                self.domain.center.to_c64(),
                self.domain.radius
            )));
        }
        Ok(self.deriv_at(z, order))
    }

    pub fn derivative(&self) -> Series1D<T> {
        let c: Vec<T> = if self.coeffs.len() == 1 {
            vec![T::zero()]
        } else {
            (1..self.coeffs.len())
                .map(|k| self.coeffs[k].scale(k as f64))
                .collect()
        };
        Series1D {
            domain: self.domain.clone(),
            coeffs: c,
            tail_bound: self.tail_bound,
        }
    }

    /// Least-squares fit on the even-indexed samples; `tail_bound` is the
    /// maximum residual on the odd-indexed half.
    pub fn fit(points: &[T], values: &[T], domain: DiskDomain<T>, degree: usize) -> Result<Self> {
        if points.len() != values.len() {
            return Err(LabError::Invalid("points and values differ in length".into()));
        }
        if points.len() < 2 * (degree + 1) {
            return Err(LabError::Invalid(format!(
                "{} samples for degree {degree}",
                points.len()
            )));
        }
        if let Some(z) = points.iter().find(|z| !domain.contains(z)) {
            return Err(LabError::OutsideDomain(format!("{:?}", z.to_c64())));
        }
        let inv_r = T::from_f64(1.0 / domain.radius);
        let ts: Vec<T> = points
            .iter()
            .map(|z| (z.clone() - domain.center.clone()) * inv_r.clone())
            .collect();
        let train: Vec<usize> = (0..ts.len()).step_by(2).collect();
        let mut cols = Vec::with_capacity(degree + 1);
        let mut col: Vec<T> = train.iter().map(|_| T::one()).collect();
        for _ in 0..=degree {
            cols.push(col.clone());
            col = col
                .iter()
                .zip(&train)
                .map(|(c, &i)| c.clone() * ts[i].clone())
                .collect();
        }
        let rhs: Vec<T> = train.iter().map(|&i| values[i].clone()).collect();
        let cond_max = T::eps().powf(-0.7);
        let beta = lstsq(&cols, &rhs, cond_max)?;
        let mut rk = T::one();
        let coeffs: Vec<T> = beta
            .into_iter()
            .map(|b| {
                let c = b * rk.clone();
                rk = rk.clone() * inv_r.clone();
                c
            })
            .collect();
        let mut s = Series1D::from_coeffs(domain, coeffs);
        s.tail_bound = (1..points.len())
            .step_by(2)
            .map(|i| (s.at(&points[i]) - values[i].clone()).abs())
            .fold(0.0, f64::max);
        Ok(s)
    }

    /// Fit from `2(degree+1)` samples on the boundary circle by discrete Fourier
    /// transform; `tail_bound` sums the aliased modes above `degree`.
    pub fn fit_circle<F>(domain: DiskDomain<T>, degree: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&T) -> Result<T>,
    {
        let m = 2 * (degree + 1);
        let nodes = domain.circle(m, 1.0);
        let vals = nodes.iter().map(&mut f).collect::<Result<Vec<T>>>()?;
        Ok(Self::from_circle_values(domain, degree, &vals))
    }

    pub fn from_circle_values(domain: DiskDomain<T>, degree: usize, vals: &[T]) -> Self {
        let m = vals.len();
        let roots: Vec<T> = (0..m).map(|j| T::cis(-(j as i64), m as i64)).collect();
        let inv_m = T::from_f64(1.0 / m as f64);
        let inv_r = T::from_f64(1.0 / domain.radius);
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut tail = 0.0;
        let mut rk = T::one();
        for k in 0..m {
            let mut acc = T::zero();
            for (j, v) in vals.iter().enumerate() {
                acc = acc + v.clone() * roots[(j * k) % m].clone();
            }
            let ck = acc * inv_m.clone();
            if k <= degree {
                coeffs.push(ck * rk.clone());
                rk = rk * inv_r.clone();
            } else {
                tail += ck.abs();
            }
        }
        let mut s = Series1D::from_coeffs(domain, coeffs);
        s.tail_bound = tail;
        s
    }

    /// Maximum of `|self - other|` on a circle of `frac` times the radius.
    pub fn sup_diff(&self, other: &Series1D<T>, m: usize, frac: f64) -> f64 {
        self.domain
            .circle(m, frac)
            .iter()
            .map(|z| (self.at(z) - other.at(z)).abs())
            .fold(0.0, f64::max)
    }

    /// Coefficientwise distance in the scaled basis.
    pub fn scaled_distance(&self, other: &Series1D<T>) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut rk = 1.0;
        let mut d = 0.0;
        for k in 0..n {
            let a = self.coeffs.get(k).cloned().unwrap_or_else(T::zero);
            let b = other.coeffs.get(k).cloned().unwrap_or_else(T::zero);
            d += (a - b).abs() * rk;
            rk *= self.domain.radius;
        }
        d
    }
}

/// Even map `x -> s(x^2)` for a series `s` in `u = x^2`.
#[derive(Clone, Debug)]
pub struct EvenMap<T> {
    pub u: Series1D<T>,
}

impl<T: Scalar> EvenMap<T> {
    pub fn at(&self, x: &T) -> T {
        self.u.at(&x.sq())
    }

    pub fn d1(&self, x: &T) -> T {
        self.u.deriv_at(&x.sq(), 1) * x.scale(2.0)
    }

    pub fn d2(&self, x: &T) -> T {
        let u = x.sq();
        self.u.deriv_at(&u, 1).scale(2.0) + self.u.deriv_at(&u, 2) * u.scale(4.0)
    }

    pub fn in_domain(&self, x: &T) -> bool {
        self.u.domain.contains(&x.sq())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn unit() -> DiskDomain<C> {
        DiskDomain::new(C::new(0.0, 0.0), 1.0).unwrap()
    }

    #[test]
    fn circle_fit_recovers_polynomial() {
        let s = Series1D::fit_circle(unit(), 6, |z| Ok(z * z * z - 2.0)).unwrap();
        assert!((s.coeffs[3] - 1.0).norm() < 1e-14);
        assert!((s.coeffs[0] + 2.0).norm() < 1e-14);
        assert!(s.tail_bound < 1e-13);
    }

    #[test]
    fn derivative_series_matches_pointwise() {
        let d = DiskDomain::new(C::new(0.2, 0.1), 0.5).unwrap();
        let s = Series1D::fit_circle(d, 20, |z| Ok(z.exp())).unwrap();
        let z = C::new(0.3, 0.2);
        assert!((s.derivative().at(&z) - s.deriv_at(&z, 1)).norm() < 1e-14);
        assert!((s.deriv_at(&z, 2) - z.exp()).norm() < 1e-11);
    }

    #[test]
    fn out_of_domain_rejected() {
        let s = Series1D::constant(unit(), C::new(1.0, 0.0));
        assert!(s.eval(&C::new(2.0, 0.0), 0).is_err());
    }
}
