use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::RenormPair1D;
use crate::error::{LabError, Result};
use crate::numkit::roots::{central_diff, newton1};
use crate::numkit::{DiskDomain, Series1D};

const NEWTON_TOL: f64 = 1e-15;
pub const X_STAR_SEED: C64 = C64::new(0.56, -0.65);
pub const EXP_SEED: C64 = C64::new(0.4, -0.94);
const PHI_RADIUS: f64 = 0.4;
const PHI_DEGREE: usize = 40;
const KOENIGS_RADIUS: f64 = 0.2;
const KOENIGS_DEGREE: usize = 40;

/// `(xi, xi')` continued past its disk through `xi(x) = eta(xi(l x))/l`;
/// `None` when an intermediate value leaves the disk of `eta`.
pub fn xi_ext_d(p: &RenormPair1D, x: C64) -> Option<(C64, C64)> {
    if p.xi.in_domain(&x) {
        return Some((p.xi(&x), p.xi.d1(&x)));
    }
    if x.norm() < 1e-12 {
        return None;
    }
    let l = p.lambda();
    let (v, d) = xi_ext_d(p, l * x)?;
    if !p.eta.in_domain(&v) {
        return None;
    }
    Some((p.eta(&v) / l, p.eta.d1(&v) * d))
}

pub fn xi_ext(p: &RenormPair1D, x: C64) -> Option<C64> {
    xi_ext_d(p, x).map(|v| v.0)
}

pub fn xi_ext_d1(p: &RenormPair1D, x: C64) -> Option<C64> {
    xi_ext_d(p, x).map(|v| v.1)
}

/// Newton continuation of `f(w) = target` along the segment from `from` to `to`.
pub fn continue_preimage<F>(mut f: F, w0: C64, from: C64, to: C64, steps: usize) -> Result<C64>
where
    F: FnMut(&C64) -> C64,
{
    let mut w = w0;
    for i in 1..=steps {
        let t = from + (to - from) * (i as f64 / steps as f64);
        w = newton1(|z| Ok(f(z) - t), w, NEWTON_TOL)?;
    }
    Ok(w)
}

/// Inverse branch of `xi` through the base pair `(w0, xi(w0))`.
pub fn xi_branch(p: &RenormPair1D, base: C64, x: C64) -> Result<C64> {
    let from = p.xi(&base);
    let steps = 4 + ((x - from).norm() / 0.05) as usize;
    continue_preimage(|w| p.xi(w), base, from, x, steps)
}

/// `phi(x) = eta^{-1}(l x)` on the branch fixing 1.
pub fn phi_point(p: &RenormPair1D, x: C64) -> Result<C64> {
    let l = p.lambda();
    let one = C64::new(1.0, 0.0);
    let steps = 4 + ((x - one).norm() / 0.05) as usize;
    continue_preimage(|w| p.eta(w) / l, one, one, x, steps)
}

/// Koenigs coefficients of `u` with `u(f(z)) = f'(0) u(z)`, `u'(0) = 1`,
/// from the Taylor coefficients of `f` about its fixed point 0.
pub fn koenigs_coefficients(f: &[C64], degree: usize) -> Vec<C64> {
    let s = f[1];
    let trunc = |a: &[C64], b: &[C64]| {
        let mut c = vec![C64::new(0.0, 0.0); degree + 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j <= degree {
                    c[i + j] += x * y;
                }
            }
        }
        c
    };
    let mut fk = vec![C64::new(0.0, 0.0); degree + 1];
    for (k, v) in f.iter().enumerate().take(degree + 1).skip(1) {
        fk[k] = *v;
    }
    let mut powers = vec![fk.clone()];
    for _ in 1..degree {
        let next = trunc(powers.last().unwrap(), &fk);
        powers.push(next);
    }
    let mut u = vec![C64::new(0.0, 0.0); degree + 1];
    u[1] = C64::new(1.0, 0.0);
    for k in 2..=degree {
        let mut acc = C64::new(0.0, 0.0);
        for j in 1..k {
            acc += u[j] * powers[j - 1][k];
        }
        u[k] = acc / (s - s.powu(k as u32));
    }
    u
}

/// Extended linearizer `u(z) = s^{-m} u(f^m(z))` and the gap between the
/// values for `m` and `m + 1`.
pub fn koenigs_extend(u: &Series1D<C64>, phi_check: &Series1D<C64>, multiplier: C64, z: C64) -> Result<(C64, f64)> {
    let mut w = z;
    let mut m = 0i32;
    while w.norm() > u.domain.radius * 0.5 {
        if !phi_check.domain.contains(&w) || m > 200 {
            return Err(LabError::NoConvergence("point not attracted to 0".into()));
        }
        w = phi_check.at(&w);
        m += 1;
    }
    let v0 = u.at(&w) / multiplier.powi(m);
    let v1 = u.at(&phi_check.at(&w)) / multiplier.powi(m + 1);
    Ok((v0, (v0 - v1).norm()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionDomainCheck {
    /// Largest `|pre - center|/radius` over preimages of the boundary.
    pub inner_ratio: f64,
    /// Winding of the preimage of the boundary around 0 (should be 0).
    pub winding_about_zero: i64,
    pub min_expansion: f64,
    pub rot_branch_outside: bool,
    pub delta: f64,
}

impl ExpansionDomainCheck {
    pub fn ok(&self) -> bool {
        self.inner_ratio < 1.0 && self.winding_about_zero == 0 && self.min_expansion > 1.0 && self.rot_branch_outside && self.delta > 0.0
    }
}

#[derive(Clone, Debug)]
pub struct UniversalData1D {
    pub lambda_star: C64,
    pub x_star: C64,
    pub xi_prime_x_star: C64,
    pub xi_star_dd0: C64,
    pub eta_star_0: C64,
    pub exp_branch_at_0: C64,
    pub rot_branch_at_0: C64,
    pub exp_branch_d0: C64,
    pub rot_branch_d0: C64,
    pub phi_star: Series1D<C64>,
    pub phi_check: Series1D<C64>,
    pub phi_prime_1: C64,
    pub u_star: Series1D<C64>,
    pub u_star_at_xstar_minus_1: C64,
    pub koenigs_m_gap: f64,
    pub expansion_domain: DiskDomain<C64>,
    pub expansion_check: ExpansionDomainCheck,
}

/// Expansion domain: a disk holding `x_star`, 0 and the expanding preimage of 0,
/// and avoiding the critical value 1.
pub fn expansion_domain() -> DiskDomain<C64> {
    DiskDomain::new(C64::new(0.2, -0.6), 0.7).unwrap()
}

pub fn check_expansion_domain(p: &RenormPair1D, dom: &DiskDomain<C64>, x_star: C64, exp0: C64) -> Result<ExpansionDomainCheck> {
    let m = 64;
    let mut pre = Vec::with_capacity(m);
    let mut w = x_star;
    let mut from = x_star;
    for b in dom.circle(m, 1.0) {
        let steps = 4 + ((b - from).norm() / 0.05) as usize;
        w = continue_preimage(|z| p.xi(z), w, from, b, steps)?;
        from = b;
        pre.push(w);
    }
    let inner_ratio = pre
        .iter()
        .map(|z| (z - dom.center).norm() / dom.radius)
        .fold(0.0, f64::max);
    let turn: f64 = (0..m).map(|j| (pre[(j + 1) % m] / pre[j]).arg()).sum();
    let min_expansion = pre.iter().map(|z| p.xi.d1(z).norm()).fold(f64::INFINITY, f64::min);
    let rot0 = -exp0;
    let mut delta = 0.0;
    let mut rot_outside = true;
    for k in 1..20 {
        let r = 0.05 * k as f64;
        let disk = DiskDomain::new(C64::new(0.0, 0.0), r)?;
        let mut good = true;
        let mut wr = rot0;
        let mut from = C64::new(0.0, 0.0);
        for b in disk.circle(32, 1.0) {
            match continue_preimage(|z| p.xi(z), wr, from, b, 8) {
                Ok(z) if p.xi.d1(&z).norm() > 0.05 && !dom.contains(&z) => {
                    wr = z;
                    from = b;
                }
                _ => {
                    good = false;
                    break;
                }
            }
        }
        if !good {
            break;
        }
        delta = r;
    }
    if delta == 0.0 {
        rot_outside = false;
    }
    Ok(ExpansionDomainCheck {
        inner_ratio,
        winding_about_zero: (turn / (2.0 * std::f64::consts::PI)).round() as i64,
        min_expansion,
        rot_branch_outside: rot_outside,
        delta,
    })
}

impl UniversalData1D {
    pub fn compute(p: &RenormPair1D) -> Result<UniversalData1D> {
        let lambda_star = p.lambda();
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let x_star = newton1(|x| Ok(p.xi(x) - x), X_STAR_SEED, NEWTON_TOL)?;
        let exp0 = newton1(|x| Ok(p.xi(x)), EXP_SEED, NEWTON_TOL)?;
        let rot0 = newton1(|x| Ok(p.xi(x)), -EXP_SEED, NEWTON_TOL)?;
        if (exp0 - rot0).norm() < 1e-6 {
            return Err(LabError::NoConvergence("inverse branches coincide".into()));
        }
        let phi_dom = DiskDomain::new(one, PHI_RADIUS)?;
        let mut seed = phi_point(p, one + PHI_RADIUS)?;
        let l = lambda_star;
        let phi_star = Series1D::fit_circle(phi_dom, PHI_DEGREE, |x| {
            seed = newton1(|w| Ok(p.eta(w) - l * x), seed, NEWTON_TOL)?;
            Ok(seed)
        })?;
        let mut fc = phi_star.coeffs.clone();
        fc[0] = zero;
        let phi_check = Series1D {
            domain: DiskDomain::new(zero, PHI_RADIUS)?,
            coeffs: fc.clone(),
            tail_bound: phi_star.tail_bound,
        };
        let s = fc[1];
        let mut u = Series1D::from_coeffs(
            DiskDomain::new(zero, KOENIGS_RADIUS)?,
            koenigs_coefficients(&fc, KOENIGS_DEGREE),
        );
        u.tail_bound = u
            .domain
            .circle(64, 1.0)
            .iter()
            .map(|z| (u.at(&phi_check.at(z)) - u.at(z) * s).norm())
            .fold(0.0, f64::max);
        let first = phi_point(p, x_star)? - one;
        let (v, gap) = koenigs_extend(&u, &phi_check, s, first)?;
        let u_star_at_xstar_minus_1 = v / s;
        let dom = expansion_domain();
        let expansion_check = check_expansion_domain(p, &dom, x_star, exp0)?;
        let xi_dd0 = p.xi.d2(&zero);
        Ok(UniversalData1D {
            lambda_star,
            x_star,
            xi_prime_x_star: p.xi.d1(&x_star),
            xi_star_dd0: xi_dd0,
            eta_star_0: p.eta(&zero),
            exp_branch_at_0: exp0,
            rot_branch_at_0: rot0,
            exp_branch_d0: one / p.xi.d1(&exp0),
            rot_branch_d0: one / p.xi.d1(&rot0),
            phi_prime_1: s,
            phi_star,
            phi_check,
            u_star: u,
            u_star_at_xstar_minus_1,
            koenigs_m_gap: gap / s.norm(),
            expansion_domain: dom,
            expansion_check,
        })
    }

    /// `alpha(x)/beta(x) = eta'(x)/xi'(x)` from the fixed pair.
    pub fn alpha_over_beta(p: &RenormPair1D, x: C64) -> Option<C64> {
        if !p.eta.in_domain(&x) {
            return None;
        }
        Some(p.eta.d1(&x) / xi_ext_d1(p, x)?)
    }

    pub fn phi_derivative_check(&self, p: &RenormPair1D) -> Result<C64> {
        let mut f = |x: &C64| phi_point(p, *x);
        central_diff(&mut f, &C64::new(1.0, 0.0))
    }
}
