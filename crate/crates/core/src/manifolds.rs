//! Saddles of `B_n` and of the higher-period return maps, their local stable and
//! unstable manifolds as graphs.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::artifact::CJson;
use crate::error::{LabError, Result};
use crate::henon::Point;
use crate::numkit::{newton1_d, DiskDomain, Scalar, Series1D};
use crate::renorm1d::universal::{UniversalData1D, X_STAR_SEED};
use crate::renorm2d::{Folds, Level, Tower};

pub const GRAPH_DEGREE: usize = 16;
pub const GRAPH_MAX_ITERS: usize = 60;
pub const STABLE_RADIUS: f64 = 0.6;
pub const LOCAL_RADIUS: f64 = 0.3;
pub const PUSHES: u64 = 3;
const MIN_EXPANSION: f64 = 1.05;

fn tol<T: Scalar>() -> f64 {
    T::eps().sqrt()
}

/// Graph-transform stopping distance: `1e-10` at 53 bits, scaled with precision.
fn graph_floor<T: Scalar>() -> f64 {
    T::eps().powf(0.625)
}

/// A curve given pointwise with its derivative.
pub trait Curve<T> {
    fn eval_d(&self, s: &T) -> Result<(T, T)>;

    fn at(&self, s: &T) -> Result<T> {
        Ok(self.eval_d(s)?.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// `x = f(y)`.
    Vertical,
    /// `y = f(x)`.
    Horizontal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Stable,
    Unstable,
    Deeper,
    Image,
    Pullback,
}

/// A fitted graph; `slope_sup` is `max |f'|` on the fit circle.
#[derive(Clone, Debug)]
pub struct GraphCurve<T> {
    pub orientation: Orientation,
    pub provenance: Provenance,
    pub level: usize,
    pub span: usize,
    pub series: Series1D<T>,
    pub slope_sup: f64,
}

impl<T: Scalar> GraphCurve<T> {
    pub fn fit<C: Curve<T>>(
        c: &C,
        domain: DiskDomain<T>,
        degree: usize,
        orientation: Orientation,
        provenance: Provenance,
        level: usize,
        span: usize,
    ) -> Result<GraphCurve<T>> {
        let m = 2 * (degree + 1);
        let nodes = domain.circle(m, 1.0);
        let mut vals = Vec::with_capacity(m);
        let mut slope: f64 = 0.0;
        for z in &nodes {
            let (v, d) = c.eval_d(z)?;
            slope = slope.max(d.abs());
            vals.push(v);
        }
        Ok(GraphCurve {
            orientation,
            provenance,
            level,
            span,
            series: Series1D::from_circle_values(domain, degree, &vals),
            slope_sup: slope,
        })
    }

    /// Rows `(re s, im s, re f, im f, re f', im f')` on `m` circle points.
    pub fn samples(&self, m: usize, frac: f64) -> Vec<[f64; 6]> {
        self.series
            .domain
            .circle(m, frac)
            .iter()
            .map(|s| {
                let v = self.series.at(s).to_c64();
                let d = self.series.deriv_at(s, 1).to_c64();
                let s = s.to_c64();
                [s.re, s.im, v.re, v.im, d.re, d.im]
            })
            .collect()
    }
}

/// Saddle of `B_{n+k}` seen in level-`n` coordinates.
#[derive(Clone, Debug)]
pub struct Saddle<T> {
    pub n: usize,
    pub k: usize,
    /// Fixed point `(x, x)` of `B_{n+k}` in its own coordinates.
    pub deep_x: T,
    pub location: Point<T>,
    pub mu: T,
    pub nu: T,
    pub unstable_dir: Point<T>,
    pub stable_dir: Point<T>,
    pub residual: f64,
}

/// Roots of `L^2 - b_x L - b_y`, larger modulus first.
pub fn saddle_multipliers<T: Scalar>(bx: &T, by: &T) -> (T, T) {
    let disc = (bx.sq() + by.scale(4.0)).sqrt();
    let l1 = (bx.clone() + disc.clone()).scale(0.5);
    let l2 = (bx.clone() - disc).scale(0.5);
    let (mu, _) = if l1.abs() >= l2.abs() { (l1, l2) } else { (l2, l1) };
    // the small root from the product avoids cancellation
    let nu = -(by.clone() / mu.clone());
    (mu, nu)
}

fn solve_fixed<T: Scalar>(lv: &Level<'_, T>, seed: T) -> Result<T> {
    newton1_d(
        |x| {
            let (b, bx, by) = lv.db(&(x.clone(), x.clone()))?;
            Ok((b - x.clone(), bx + by - T::one()))
        },
        seed,
        tol::<T>(),
    )
}

fn saddle_from<T: Scalar>(tower: &Tower<T>, n: usize, k: usize, x: T) -> Result<Saddle<T>> {
    let lv = tower.level(n + k);
    let (b, bx, by) = lv.db(&(x.clone(), x.clone()))?;
    let residual = (b - x.clone()).abs();
    let (mu, nu) = saddle_multipliers(&bx, &by);
    if !(mu.abs() > 1.0 && nu.abs() < 1.0) {
        return Err(LabError::Invalid(format!(
            "multipliers {:?}, {:?} do not form a saddle",
            mu.to_c64(),
            nu.to_c64()
        )));
    }
    let location = if k == 0 {
        (x.clone(), x.clone())
    } else {
        tower.micro(n, k, &(x.clone(), x.clone()))?
    };
    Ok(Saddle {
        n,
        k,
        unstable_dir: (mu.clone(), T::one()),
        stable_dir: (nu.clone(), T::one()),
        deep_x: x,
        location,
        mu,
        nu,
        residual,
    })
}

/// Multi-start search for the saddle of `B_{n+k}` on a 7x7 grid in
/// `[-1.2, 1.2]^2`, keeping strongly expanding candidates and choosing the one
/// nearest the repelling fixed point of the universal `xi`.
pub fn find_saddle<T: Scalar>(tower: &Tower<T>, n: usize, k: usize) -> Result<Saddle<T>> {
    let lv = tower.level(n + k);
    let target = X_STAR_SEED;
    let mut best: Option<T> = None;
    for i in 0..7 {
        for j in 0..7 {
            let s = T::c(-1.2 + 0.4 * i as f64, -1.2 + 0.4 * j as f64);
            let Ok(x) = solve_fixed(&lv, s) else { continue };
            let Ok((_, bx, _)) = lv.db(&(x.clone(), x.clone())) else { continue };
            if bx.abs() <= 1.5 {
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => (x.to_c64() - target).norm() < (b.to_c64() - target).norm(),
            };
            if better {
                best = Some(x);
            }
        }
    }
    let x = best.ok_or_else(|| LabError::NoConvergence(format!("no saddle found at level {}", n + k)))?;
    saddle_from(tower, n, k, x)
}

/// Saddle by Newton from a known nearby position (level `n + k` coordinates).
pub fn refine_saddle<T: Scalar>(tower: &Tower<T>, n: usize, k: usize, seed: T) -> Result<Saddle<T>> {
    let lv = tower.level(n + k);
    let x = solve_fixed(&lv, seed)?;
    saddle_from(tower, n, k, x)
}

/// Repelling fixed point of `xi_n` and `xi_n'` there.
pub fn repelling_fixed_point<T: Scalar>(lv: &Level<'_, T>, seed: T) -> Result<(T, T)> {
    let x = newton1_d(
        |x| {
            let (b, bx, _) = lv.db(&(x.clone(), T::zero()))?;
            Ok((b - x.clone(), bx - T::one()))
        },
        seed,
        tol::<T>(),
    )?;
    let (_, bx, _) = lv.db(&(x.clone(), T::zero()))?;
    Ok((x, bx))
}

/// Inverse branch of `xi_n` through `(base, xi_n(base))`, continued to `x`.
pub fn xi_branch<T: Scalar>(lv: &Level<'_, T>, base: T, x: &T) -> Result<T> {
    let from = lv.xi(&base)?;
    let steps = 2 + ((x.clone() - from.clone()).abs() / 0.05) as usize;
    let mut w = base;
    for i in 1..=steps {
        let t = from.clone() + (x.clone() - from.clone()).scale(i as f64 / steps as f64);
        w = newton1_d(
            |z| {
                let (b, bx, _) = lv.db(&(z.clone(), T::zero()))?;
                Ok((b - t.clone(), bx))
            },
            w,
            tol::<T>(),
        )?;
    }
    Ok(w)
}

/// Local stable manifold `x = psi_{n+k}(t)` at level `n + k`, seen at level `n`
/// as `psi_n^{n+k}(y) = [Phi_n^{n+k}(psi_{n+k}(t), t)]_1` with `t` the
/// level-`(n+k)` height of `y`.
pub struct StableManifold<'a, T> {
    pub tower: &'a Tower<T>,
    pub saddle: Saddle<T>,
    pub series: Series1D<T>,
    /// C0 distances between successive graph-transform iterates.
    pub distances: Vec<f64>,
    /// Largest ratio of successive distances, starting from distances above
    /// the stopping floor.
    pub contraction: f64,
    /// Radius of the disk about the saddle where `|b_x| > 1.05`.
    pub strip_radius: f64,
    deep: Level<'a, T>,
}

impl<'a, T: Scalar> StableManifold<'a, T> {
    pub fn compute(tower: &'a Tower<T>, saddle: Saddle<T>) -> Result<StableManifold<'a, T>> {
        let deep = tower.level(saddle.n + saddle.k);
        let xs = saddle.deep_x.clone();
        let mut strip_radius = 0.0;
        for r in [0.4, 0.3, 0.2, 0.1, 0.05] {
            let mut ok = true;
            for j in 0..16 {
                let x = xs.clone() + T::cis(j, 16).scale(r);
                let (_, bx, _) = deep.db(&(x, T::zero()))?;
                if bx.abs() <= MIN_EXPANSION {
                    ok = false;
                    break;
                }
            }
            if ok {
                strip_radius = r;
                break;
            }
        }
        if strip_radius == 0.0 {
            return Err(LabError::DomainViolation("no expanding strip about the saddle".into()));
        }
        let dom = DiskDomain::new(T::zero(), STABLE_RADIUS)?;
        let mut psi = Series1D::constant(dom.clone(), xs.clone());
        let mut distances = Vec::new();
        let floor = graph_floor::<T>();
        for _ in 0..GRAPH_MAX_ITERS {
            let prev = psi.clone();
            let next = Series1D::fit_circle(dom.clone(), GRAPH_DEGREE, |y| {
                fiber_solve(&deep, &prev, y, xs.clone()).map(|v| v.0)
            })?;
            let d = next.sup_diff(&prev, 32, 1.0);
            let stalled = distances.last().is_some_and(|&p: &f64| d >= p);
            distances.push(d);
            psi = next;
            if d < floor || stalled {
                break;
            }
        }
        let mut contraction: f64 = 0.0;
        for w in distances.windows(2) {
            if w[0] > floor {
                contraction = contraction.max(w[1] / w[0]);
            }
        }
        Ok(StableManifold {
            tower,
            saddle,
            series: psi,
            distances,
            contraction,
            strip_radius,
            deep,
        })
    }

    /// `psi_{n+k}(t)` and its derivative: one exact graph-transform step on
    /// top of the fitted graph.
    pub fn deep_eval(&self, t: &T) -> Result<(T, T)> {
        fiber_solve(&self.deep, &self.series, t, self.series.at(t))
    }

    fn height_scale(&self) -> T {
        let s = &self.saddle;
        (s.n + 1..=s.n + s.k).fold(T::one(), |acc, j| acc * self.tower.lam[j].clone())
    }

    fn deep_height(&self, y: &T) -> T {
        let s = &self.saddle;
        let mut t = y.clone();
        for j in s.n + 1..=s.n + s.k {
            t = (t - self.tower.cs[j].clone()) / self.tower.lam[j].clone();
        }
        t
    }

    /// Residual of the fiber equation `b(psi(y), y) = psi(psi(y))` on a y-grid.
    pub fn fiber_residual(&self) -> Result<f64> {
        let mut r: f64 = 0.0;
        for y in self.series.domain.circle(12, 0.8) {
            let (x, _) = self.deep_eval(&y)?;
            let b = self.deep.b(&(x.clone(), y))?;
            r = r.max((b - self.deep_eval(&x)?.0).abs());
        }
        Ok(r)
    }
}

/// Solves `b(x, y) = psi(x)` for `x` and returns `(x, dx/dy)`.
fn fiber_solve<T: Scalar>(lv: &Level<'_, T>, psi: &Series1D<T>, y: &T, seed: T) -> Result<(T, T)> {
    let x = newton1_d(
        |x| {
            let (b, bx, _) = lv.db(&(x.clone(), y.clone()))?;
            Ok((b - psi.at(x), bx - psi.deriv_at(x, 1)))
        },
        seed,
        tol::<T>(),
    )?;
    let (_, bx, by) = lv.db(&(x.clone(), y.clone()))?;
    let d = -(by / (bx - psi.deriv_at(&x, 1)));
    Ok((x, d))
}

impl<'a, T: Scalar> Curve<T> for StableManifold<'a, T> {
    /// `psi_n^{n+k}(y)` and its derivative.
    fn eval_d(&self, y: &T) -> Result<(T, T)> {
        if self.saddle.k == 0 {
            return self.deep_eval(y);
        }
        let t = self.deep_height(y);
        let (x, dx) = self.deep_eval(&t)?;
        let (z, dz) = self.deep.psi_d(&(x, t), &(dx, T::one()))?;
        let q = self.tower.q[2 * self.saddle.n];
        let (w, dw) = self.tower.first_d(&z, &dz, q - 1)?;
        let n = self.saddle.n;
        let s = self.tower.scale_factor(n);
        Ok((self.tower.ell(n, &w), dw / (s * self.height_scale())))
    }
}

/// `psi_n^{n+k}(0)` against `kappa_n + lambda*^{2k} u*(x* - 1)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StablePosition {
    pub n: usize,
    pub k: usize,
    pub value: C64,
    pub kappa: C64,
    pub model: C64,
    pub ratio: C64,
}

pub fn stable_position<T: Scalar>(
    sm: &StableManifold<'_, T>,
    folds: &Folds<T>,
    ud: &UniversalData1D,
) -> Result<StablePosition> {
    let n = sm.saddle.n;
    let k = sm.saddle.k;
    let value = sm.at(&folds.iota[n])?.to_c64();
    let kappa = folds.kappa[n].to_c64();
    let model = ud.lambda_star.powu(2 * k as u32) * ud.u_star_at_xstar_minus_1;
    Ok(StablePosition {
        n,
        k,
        value,
        kappa,
        model,
        ratio: (value - kappa) / model,
    })
}

/// Unstable manifold `y = chi_n(x)`: a local graph-transform series about the
/// saddle, extended by pushing forward `PUSHES` times under `B_n`.
pub struct UnstableManifold<'a, T> {
    pub tower: &'a Tower<T>,
    pub saddle: Saddle<T>,
    pub local: Series1D<T>,
    pub local_distances: Vec<f64>,
    lv: Level<'a, T>,
}

impl<'a, T: Scalar> UnstableManifold<'a, T> {
    pub fn compute(tower: &'a Tower<T>, saddle: Saddle<T>) -> Result<UnstableManifold<'a, T>> {
        if saddle.k != 0 {
            return Err(LabError::Invalid("unstable manifold is built at the saddle's own level".into()));
        }
        let lv = tower.level(saddle.n);
        let xs = saddle.deep_x.clone();
        let dom = DiskDomain::new(xs.clone(), LOCAL_RADIUS)?;
        let mut chi = Series1D::constant(dom.clone(), xs.clone());
        let mut distances = Vec::new();
        let floor = graph_floor::<T>();
        let back = T::one() / saddle.mu.clone();
        for _ in 0..GRAPH_MAX_ITERS {
            let prev = chi.clone();
            let next = Series1D::fit_circle(dom.clone(), GRAPH_DEGREE, |big_x| {
                newton1_d(
                    |w| {
                        let c = prev.at(w);
                        let dc = prev.deriv_at(w, 1);
                        let (b, bx, by) = lv.db(&(w.clone(), c))?;
                        Ok((b - big_x.clone(), bx + by * dc))
                    },
                    xs.clone() + (big_x.clone() - xs.clone()) * back.clone(),
                    tol::<T>(),
                )
            })?;
            let d = next.sup_diff(&prev, 32, 1.0);
            distances.push(d);
            chi = next;
            if d < floor {
                break;
            }
        }
        Ok(UnstableManifold {
            tower,
            saddle,
            local: chi,
            local_distances: distances,
            lv,
        })
    }

    pub fn level(&self) -> &Level<'a, T> {
        &self.lv
    }

    /// `B^m(p, chi_loc(p))` and its derivative in `p`.
    fn push_d(&self, p: &T) -> Result<(Point<T>, Point<T>)> {
        let t = self.tower;
        let n = self.saddle.n;
        let q = t.q[2 * n];
        let c = self.local.at(p);
        let dc = self.local.deriv_at(p, 1);
        let (z, dz) = self.lv.psi_d(&(p.clone(), c), &(T::one(), dc))?;
        let (x, dx) = t.first_d(&z, &dz, (PUSHES + 1) * q - 1)?;
        let (y, dy) = t.first_d(&z, &dz, PUSHES * q - 1)?;
        let s = t.scale_factor(n);
        Ok(((t.ell(n, &x), t.ell(n, &y)), (dx / s.clone(), dy / s)))
    }

    /// Sup of `|chi_n - (xi_n^exp)^{-1}|` over samples of `dom`.
    pub fn exp_branch_gap(&self, dom: &DiskDomain<C64>) -> Result<f64> {
        let (xc, _) = repelling_fixed_point(&self.lv, self.saddle.deep_x.clone())?;
        let mut pts: Vec<C64> = dom.circle(16, 0.9);
        pts.push(dom.center);
        let mut g: f64 = 0.0;
        for x in pts {
            let xt = T::from_c64(x);
            let e = xi_branch(&self.lv, xc.clone(), &xt)?;
            g = g.max((self.at(&xt)? - e).abs());
        }
        Ok(g)
    }

    /// Sine of the angle between the tangent at the saddle and
    /// `(1, 1/xi_n'(x_n))`, and between the tangent and the unstable eigenvector.
    pub fn tangent_angles(&self) -> Result<(f64, f64)> {
        let xs = &self.saddle.deep_x;
        let (_, d) = self.eval_d(xs)?;
        let (_, dxi) = repelling_fixed_point(&self.lv, xs.clone())?;
        let sin = |a: &Point<T>, b: &Point<T>| {
            let cross = (a.0.clone() * b.1.clone() - a.1.clone() * b.0.clone()).abs();
            let na = (a.0.abs().powi(2) + a.1.abs().powi(2)).sqrt();
            let nb = (b.0.abs().powi(2) + b.1.abs().powi(2)).sqrt();
            cross / (na * nb)
        };
        let tan = (T::one(), d);
        let model = (T::one(), T::one() / dxi);
        Ok((sin(&tan, &model), sin(&tan, &self.saddle.unstable_dir)))
    }

    /// `max |chi(b(x, chi(x))) - x|` for `x` near the saddle.
    pub fn invariance_residual(&self) -> Result<f64> {
        let xs = self.saddle.deep_x.clone();
        let r = LOCAL_RADIUS / self.saddle.mu.abs();
        let mut g: f64 = 0.0;
        for j in 0..12 {
            let x = xs.clone() + T::cis(j, 12).scale(r);
            let y = self.at(&x)?;
            let bx = self.lv.b(&(x.clone(), y))?;
            g = g.max((self.at(&bx)? - x).abs());
        }
        Ok(g)
    }
}

impl<'a, T: Scalar> Curve<T> for UnstableManifold<'a, T> {
    fn eval_d(&self, x: &T) -> Result<(T, T)> {
        let xs = self.saddle.deep_x.clone();
        let seed = xs.clone() + (x.clone() - xs) / self.saddle.mu.powu(PUSHES);
        let p = newton1_d(
            |p| {
                let ((px, _), (dx, _)) = self.push_d(p)?;
                Ok((px - x.clone(), dx))
            },
            seed,
            tol::<T>(),
        )?;
        let ((_, y), (dx, dy)) = self.push_d(&p)?;
        Ok((y, dy / dx))
    }
}

/// `sigma_n(X) = [A_n-image of the level-(n+1) unstable manifold]`, as the
/// horizontal graph `X -> l_n([F^{q_{2n+1}-1} Psi_{n+1}(x, chi_{n+1}(x))]_1)`
/// with `x = (X - c_{n+1})/lambda_{n+1}`.
pub struct DeeperUnstable<'u, 'a, T> {
    pub n: usize,
    pub upper: &'u UnstableManifold<'a, T>,
}

impl<'u, 'a, T: Scalar> DeeperUnstable<'u, 'a, T> {
    pub fn new(upper: &'u UnstableManifold<'a, T>) -> Result<Self> {
        if upper.saddle.n == 0 {
            return Err(LabError::Invalid("deeper curve needs a level >= 1 manifold".into()));
        }
        Ok(DeeperUnstable {
            n: upper.saddle.n - 1,
            upper,
        })
    }

    /// Sup of `|sigma_n - (xi_n^rot)^{-1}|` over samples of `dom`; `rot0` seeds
    /// the rotation preimage of 0.
    pub fn rot_branch_gap(&self, dom: &DiskDomain<C64>, rot0: C64) -> Result<f64> {
        let t = self.upper.tower;
        let lv = t.level(self.n);
        let w0 = newton1_d(
            |z| {
                let (b, bx, _) = lv.db(&(z.clone(), T::zero()))?;
                Ok((b, bx))
            },
            T::from_c64(rot0),
            tol::<T>(),
        )?;
        let mut pts: Vec<C64> = dom.circle(16, 0.9);
        pts.push(dom.center);
        let mut g: f64 = 0.0;
        for x in pts {
            let xt = T::from_c64(x);
            let e = xi_branch(&lv, w0.clone(), &xt)?;
            g = g.max((self.at(&xt)? - e).abs());
        }
        Ok(g)
    }
}

impl<'u, 'a, T: Scalar> Curve<T> for DeeperUnstable<'u, 'a, T> {
    fn eval_d(&self, big_x: &T) -> Result<(T, T)> {
        let t = self.upper.tower;
        let n = self.n;
        let lam = t.lam[n + 1].clone();
        let x = (big_x.clone() - t.cs[n + 1].clone()) / lam.clone();
        let (c, dc) = self.upper.eval_d(&x)?;
        let (z, dz) = self.upper.level().psi_d(&(x, c), &(T::one(), dc))?;
        let (w, dw) = t.first_d(&z, &dz, t.q[2 * n + 1] - 1)?;
        let s = t.scale_factor(n);
        Ok((t.ell(n, &w), dw / (s * lam)))
    }
}

/// Summary of the manifolds at one level, emitted by the `manifolds` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifoldsReport {
    pub n: usize,
    pub k: usize,
    pub saddle: CJson,
    pub mu: CJson,
    pub nu: CJson,
    pub saddle_residual: f64,
    pub nu_over_aq: f64,
    pub unstable_exp_gap_over_aq: f64,
    pub unstable_angle_to_model: f64,
    pub unstable_angle_to_eigenvector: f64,
    pub unstable_invariance: f64,
    pub deep_saddle: CJson,
    pub stable_contraction: f64,
    pub stable_strip_radius: f64,
    pub stable_fiber_residual: f64,
    pub stable_slope_over_aq: f64,
    pub stable_position: StablePosition,
}

/// Report plus the unstable graph `chi_n` on the expansion domain and the
/// stable graph `psi_n^{n+k}` on the disk of radius `LOCAL_RADIUS` about 0.
pub fn manifolds_report<T: Scalar>(
    tower: &Tower<T>,
    n: usize,
    k: usize,
    ud: &UniversalData1D,
) -> Result<(ManifoldsReport, GraphCurve<T>, GraphCurve<T>)> {
    let folds = Folds::compute(tower)?;
    let aq = tower.a_pow(2 * n).abs();
    let s = find_saddle(tower, n, 0)?;
    let um = UnstableManifold::compute(tower, s.clone())?;
    let (angle_model, angle_eigen) = um.tangent_angles()?;
    let udom = ud.expansion_domain.clone();
    let exp_gap = um.exp_branch_gap(&udom)?;
    let chi = GraphCurve::fit(
        &um,
        DiskDomain::new(T::from_c64(udom.center), udom.radius)?,
        GRAPH_DEGREE,
        Orientation::Horizontal,
        Provenance::Unstable,
        n,
        0,
    )?;
    let sm = StableManifold::compute(tower, find_saddle(tower, n, k)?)?;
    let psi = GraphCurve::fit(
        &sm,
        DiskDomain::new(T::zero(), LOCAL_RADIUS)?,
        GRAPH_DEGREE,
        Orientation::Vertical,
        Provenance::Stable,
        n,
        k,
    )?;
    let report = ManifoldsReport {
        n,
        k,
        saddle: CJson::of(&s.deep_x),
        mu: CJson::of(&s.mu),
        nu: CJson::of(&s.nu),
        saddle_residual: s.residual,
        nu_over_aq: s.nu.abs() / aq,
        unstable_exp_gap_over_aq: exp_gap / aq,
        unstable_angle_to_model: angle_model,
        unstable_angle_to_eigenvector: angle_eigen,
        unstable_invariance: um.invariance_residual()?,
        deep_saddle: CJson::of(&sm.saddle.deep_x),
        stable_contraction: sm.contraction,
        stable_strip_radius: sm.strip_radius,
        stable_fiber_residual: sm.fiber_residual()?,
        stable_slope_over_aq: psi.slope_sup / aq,
        stable_position: stable_position(&sm, &folds, ud)?,
    };
    Ok((report, chi, psi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multipliers_solve_characteristic_polynomial() {
        let bx = C64::new(0.4, -2.7);
        let by = C64::new(1e-3, 2e-4);
        let (mu, nu) = saddle_multipliers(&bx, &by);
        for l in [mu, nu] {
            assert!((l * l - bx * l - by).norm() < 1e-14);
        }
        assert!(mu.norm() > nu.norm());
    }
}
