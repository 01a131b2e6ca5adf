//! Vertical tangencies of unstable images, the Delta constants and the
//! heteroclinic tangency solver.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::artifact::CJson;
use crate::error::{LabError, Result};
use crate::henon::HenonMap;
use crate::manifolds::{find_saddle, refine_saddle, Curve, StableManifold, UnstableManifold};
use crate::numkit::linalg::lu_solve;
use crate::numkit::{newton1, newton1_d, zero_count, Scalar};
use crate::renorm1d::universal::UniversalData1D;
use crate::renorm2d::{Folds, Level, LevelDiag, Tower, UniversalFunctions};

/// `y -> b_n(y, chi(y))`: the image under `B_n` of a horizontal graph, read as
/// a vertical graph.
pub struct ImageCurve<'c, 'l, 'a, T, C> {
    pub lv: &'l Level<'a, T>,
    pub chi: &'c C,
}

impl<'c, 'l, 'a, T: Scalar, C: Curve<T>> Curve<T> for ImageCurve<'c, 'l, 'a, T, C> {
    fn eval_d(&self, y: &T) -> Result<(T, T)> {
        let (c, dc) = self.chi.eval_d(y)?;
        let (b, bx, by) = self.lv.db(&(y.clone(), c))?;
        Ok((b, bx + by * dc))
    }
}

/// `tau_n`: the image `B_{n-1}(M^u(s_{n-1}))` pulled back to level `n`,
/// `y -> l_n([F^{q_{2n}-1+q_{2n-2}} Psi_{n-1}(y0, chi_{n-1}(y0))]_1)` with
/// `y0 = lambda_n y + c_n`.
pub struct Pullback<'u, 'a, T> {
    pub n: usize,
    pub lower: &'u UnstableManifold<'a, T>,
}

impl<'u, 'a, T: Scalar> Pullback<'u, 'a, T> {
    pub fn new(lower: &'u UnstableManifold<'a, T>) -> Self {
        Pullback {
            n: lower.saddle.n + 1,
            lower,
        }
    }
}

impl<'u, 'a, T: Scalar> Curve<T> for Pullback<'u, 'a, T> {
    fn eval_d(&self, y: &T) -> Result<(T, T)> {
        let t = self.lower.tower;
        let n = self.n;
        let lam = t.lam[n].clone();
        let y0 = lam.clone() * y.clone() + t.cs[n].clone();
        let (c, dc) = self.lower.eval_d(&y0)?;
        let (z, dz) = self.lower.level().psi_d(&(y0, c), &(T::one(), dc))?;
        let (w, dw) = t.first_d(&z, &dz, t.q[2 * n] - 1 + t.q[2 * n - 2])?;
        Ok((t.ell(n, &w), dw * lam / t.scale_factor(n)))
    }
}

#[derive(Clone, Debug)]
pub struct VerticalTangency<T> {
    pub v: T,
    pub w: T,
    /// Half the second derivative of the vertical graph at `w`.
    pub curvature: T,
    pub deriv_residual: f64,
}

/// Critical point of a vertical graph `x = g(y)` by Newton on `g'`.
pub fn vertical_tangency<T: Scalar, G: Curve<T>>(g: &G, seed: T) -> Result<VerticalTangency<T>> {
    let w = newton1(|y| Ok(g.eval_d(y)?.1), seed, T::eps().sqrt())?;
    let (v, d) = g.eval_d(&w)?;
    let h = T::from_f64(T::fd_step());
    let dp = g.eval_d(&(w.clone() + h.clone()))?.1;
    let dm = g.eval_d(&(w.clone() - h.clone()))?.1;
    let curvature = (dp - dm) / h.scale(4.0);
    Ok(VerticalTangency {
        v,
        w,
        curvature,
        deriv_residual: d.abs(),
    })
}

/// Measured value next to its formula value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaValue {
    pub measured: Option<C64>,
    pub formula: C64,
    pub rel_diff: Option<f64>,
}

impl DeltaValue {
    fn new(measured: Option<C64>, formula: C64) -> Self {
        let rel_diff = measured.map(|m| (m - formula).norm() / formula.norm());
        DeltaValue {
            measured,
            formula,
            rel_diff,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaConstants {
    pub level: usize,
    pub delta_w: DeltaValue,
    pub delta_v: DeltaValue,
    /// Derivative of the graph-distance law at 0 by the product rule.
    pub delta_tilde_w: C64,
    /// The same combination with the `beta`, `beta'` factors exchanged.
    pub delta_tilde_w_literal: C64,
    pub delta_bar_w: DeltaValue,
    pub delta_bar_v: DeltaValue,
    pub beta_0: C64,
    pub beta_prime_0: C64,
    pub alpha_1: C64,
}

/// Vertical tangency of `B_n(M^u(s_n))` at level `n`.
pub fn unstable_tangency<T: Scalar>(um: &UnstableManifold<'_, T>, seed: T) -> Result<VerticalTangency<T>> {
    let img = ImageCurve {
        lv: um.level(),
        chi: um,
    };
    vertical_tangency(&img, seed)
}

/// Formula constants from the fixed point and the universal functions;
/// measured ones from tangencies at levels `n`, `n + 1` and the pullback at `n`.
pub fn delta_constants<T: Scalar>(
    tower: &Tower<T>,
    n: usize,
    ud: &UniversalData1D,
    uf: &UniversalFunctions,
) -> Result<DeltaConstants> {
    let l = ud.lambda_star;
    let b0 = uf.beta_at_0;
    let b1 = uf.beta_prime_at_0;
    let gap0 = ud.exp_branch_at_0 - ud.rot_branch_at_0;
    let gap1 = ud.exp_branch_d0 - ud.rot_branch_d0;
    let tilde = b1 * gap0 + b0 * gap1;
    let literal = b0 * gap0 + b1 * gap1;
    let dw_f = (tilde - l * uf.alpha_at_1) / ud.xi_star_dd0;
    let dv_f = -b0 * gap0;
    let dbw_f = tilde / (l * ud.xi_star_dd0);
    let dbv_f = dv_f / (l * l);

    let mut dw_m = None;
    let mut dv_m = None;
    let mut dbw_m = None;
    let mut dbv_m = None;
    if n + 1 <= tower.depth() && n >= 1 {
        let folds = Folds::compute(tower)?;
        let aq = tower.a_pow(2 * n).to_c64();
        let s_n = find_saddle(tower, n, 0)?;
        let s_m = find_saddle(tower, n + 1, 0)?;
        let u_n = UnstableManifold::compute(tower, s_n)?;
        let u_m = UnstableManifold::compute(tower, s_m)?;
        let vt_n = unstable_tangency(&u_n, folds.iota[n].clone())?;
        let vt_m = unstable_tangency(&u_m, folds.iota[n + 1].clone())?;
        let pushed = tower.micro(n, 1, &(vt_m.v.clone(), vt_m.w.clone()))?;
        dw_m = Some((vt_n.w.clone() - pushed.1).to_c64() / aq);
        dv_m = Some((vt_n.v.clone() - pushed.0).to_c64() / aq);
        let tau = Pullback::new(&u_n);
        let vb = vertical_tangency(&tau, folds.iota[n + 1].clone())?;
        dbw_m = Some((vb.w - folds.iota[n + 1].clone()).to_c64() / aq);
        dbv_m = Some((vb.v - folds.kappa[n + 1].clone()).to_c64() / aq);
    }
    Ok(DeltaConstants {
        level: n,
        delta_w: DeltaValue::new(dw_m, dw_f),
        delta_v: DeltaValue::new(dv_m, dv_f),
        delta_tilde_w: tilde,
        delta_tilde_w_literal: literal,
        delta_bar_w: DeltaValue::new(dbw_m, dbw_f),
        delta_bar_v: DeltaValue::new(dbv_m, dbv_f),
        beta_0: b0,
        beta_prime_0: b1,
        alpha_1: uf.alpha_at_1,
    })
}

/// The matching problem `tau_n(r) = psi_n^{n+k}(r)`, `tau_n'(r) = (psi_n^{n+k})'(r)`
/// at one value of `a`.
pub struct TangencySystem<'a, T> {
    pub tower: &'a Tower<T>,
    pub lower: UnstableManifold<'a, T>,
    pub stable: StableManifold<'a, T>,
}

/// Saddle positions carried between rebuilds.
#[derive(Clone, Debug)]
pub struct SaddleSeeds<T> {
    pub lower: Option<T>,
    pub upper: Option<T>,
}

impl<'a, T: Scalar> TangencySystem<'a, T> {
    pub fn new(tower: &'a Tower<T>, n: usize, k: usize, seeds: &SaddleSeeds<T>) -> Result<Self> {
        if n == 0 || k == 0 || tower.depth() < n + k {
            return Err(LabError::Invalid(format!(
                "tangency ({n},{k}) needs tower depth {} (have {})",
                n + k,
                tower.depth()
            )));
        }
        let lo = match &seeds.lower {
            Some(x) => refine_saddle(tower, n - 1, 0, x.clone())?,
            None => find_saddle(tower, n - 1, 0)?,
        };
        let hi = match &seeds.upper {
            Some(x) => refine_saddle(tower, n, k, x.clone())?,
            None => find_saddle(tower, n, k)?,
        };
        Ok(TangencySystem {
            tower,
            lower: UnstableManifold::compute(tower, lo)?,
            stable: StableManifold::compute(tower, hi)?,
        })
    }

    pub fn seeds(&self) -> SaddleSeeds<T> {
        SaddleSeeds {
            lower: Some(self.lower.saddle.deep_x.clone()),
            upper: Some(self.stable.saddle.deep_x.clone()),
        }
    }

    pub fn tau(&self) -> Pullback<'_, 'a, T> {
        Pullback::new(&self.lower)
    }

    /// `(tau - psi)(r)` and its derivative.
    pub fn gap(&self, r: &T) -> Result<(T, T)> {
        let (t, dt) = self.tau().eval_d(r)?;
        let (p, dp) = self.stable.eval_d(r)?;
        Ok((t - p, dt - dp))
    }

    pub fn gap_dd(&self, r: &T) -> Result<T> {
        let h = T::from_f64(T::fd_step());
        let p = self.gap(&(r.clone() + h.clone()))?.1;
        let m = self.gap(&(r.clone() - h.clone()))?.1;
        Ok((p - m) / h.scale(2.0))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitCount {
    pub rel_delta: f64,
    pub a: CJson,
    pub count: i64,
    pub radius: f64,
    /// The two zeros nearest `r` from the local quadratic model, when found.
    pub zeros: Vec<CJson>,
    pub zero_separation: Option<f64>,
    /// `min |g'|` at those zeros (non-zero means simple).
    pub min_slope: Option<f64>,
    /// Zero count on a disk about `r` of twice the distance to the farther
    /// split zero.
    pub enclosing_count: Option<i64>,
    pub enclosing_radius: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Splitting {
    pub rel_delta: f64,
    pub counts: Vec<SplitCount>,
    /// Counts at `a (1 + delta)` and `a (1 - delta)` form `{0, 2}`.
    pub non_persistent: bool,
    /// On both sides the double zero has split into two distinct simple zeros,
    /// the only zeros in the enclosing disk.
    pub double_root_split: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NewtonStep {
    pub a: CJson,
    pub r: CJson,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TangencyReport {
    pub n: usize,
    pub k: usize,
    pub precision_bits: u32,
    pub a: CJson,
    pub a_abs: f64,
    pub a_arg: f64,
    pub seed_a: CJson,
    /// `|a_seed - a| / |a|`.
    pub seed_quality: f64,
    pub start_a: CJson,
    pub point: TangencyPoint,
    pub residuals: [f64; 2],
    pub multiplicity: i64,
    pub multiplicity_radius: f64,
    pub w_bar: CJson,
    pub r_minus_w_bar_over_aq: f64,
    pub iterations: Vec<NewtonStep>,
    pub splitting: Option<Splitting>,
    pub tower_diag: Vec<LevelDiag>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TangencyPoint {
    pub q: CJson,
    pub r: CJson,
}

/// Asymptotic parameter `a` with
/// `a^{q_{2(n-1)}} = lambda*^{2k} u*(x* - 1) / Delta_bar_v`; of the
/// `q_{2(n-1)}`-th roots the one nearest `near` (or with largest real part).
pub fn universal_seed(n: usize, k: usize, ud: &UniversalData1D, delta_bar_v: C64, near: Option<C64>) -> C64 {
    let q = crate::henon::fib(2 * (n - 1));
    let rhs = ud.lambda_star.powu(2 * k as u32) * ud.u_star_at_xstar_minus_1 / delta_bar_v;
    let base = rhs.powf(1.0 / q as f64);
    let roots = (0..q).map(|j| base * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / q as f64));
    match near {
        Some(z) => roots
            .min_by(|x, y| (x - z).norm().partial_cmp(&(y - z).norm()).unwrap())
            .unwrap(),
        None => roots.max_by(|x, y| x.re.partial_cmp(&y.re).unwrap()).unwrap(),
    }
}

pub struct HeteroclinicOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub splitting_delta: Option<f64>,
}

impl Default for HeteroclinicOptions {
    fn default() -> Self {
        HeteroclinicOptions {
            tol: 1e-9,
            max_iters: 12,
            splitting_delta: Some(1e-2),
        }
    }
}

fn build<T: Scalar>(a: &T, depth: usize) -> Result<Tower<T>> {
    let t = Tower::build(HenonMap::golden(a.clone()), depth)?;
    if t.depth() < depth {
        return Err(LabError::PrecisionExhausted(t.depth()));
    }
    Ok(t)
}

/// Residual `(g(r), g'(r))` at `a`, with `g = tau_n - psi_n^{n+k}`.
fn residual<T: Scalar>(a: &T, r: &T, n: usize, k: usize, seeds: &mut SaddleSeeds<T>) -> Result<[T; 2]> {
    let t = build(a, n + k)?;
    let sys = TangencySystem::new(&t, n, k, seeds)?;
    *seeds = sys.seeds();
    let (g, dg) = sys.gap(r)?;
    Ok([g, dg])
}

/// Newton on `(a, r)` with the tower rebuilt at every evaluation, started
/// from `start_a` and the pullback tangency height there.
pub fn heteroclinic_solve<T: Scalar>(
    n: usize,
    k: usize,
    start_a: T,
    seed_a: C64,
    opts: &HeteroclinicOptions,
) -> Result<TangencyReport> {
    let mut seeds = SaddleSeeds { lower: None, upper: None };
    let mut a = start_a.clone();
    let mut r = {
        let t = build(&a, n + k)?;
        let folds = Folds::compute(&t)?;
        let sys = TangencySystem::new(&t, n, k, &seeds)?;
        seeds = sys.seeds();
        vertical_tangency(&sys.tau(), folds.iota[n].clone())?.w
    };
    let mut steps = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_iters {
        let g = residual(&a, &r, n, k, &mut seeds)?;
        let res = g[0].abs().max(g[1].abs());
        steps.push(NewtonStep {
            a: CJson::of(&a),
            r: CJson::of(&r),
            residual: res,
        });
        if res < opts.tol * 1e-3 {
            converged = true;
            break;
        }
        let ha = T::from_f64(T::fd_step() * a.abs());
        let gp = residual(&(a.clone() + ha.clone()), &r, n, k, &mut seeds)?;
        let gm = residual(&(a.clone() - ha.clone()), &r, n, k, &mut seeds)?;
        let t = build(&a, n + k)?;
        let sys = TangencySystem::new(&t, n, k, &seeds)?;
        let gdd = sys.gap_dd(&r)?;
        let jac = vec![
            vec![(gp[0].clone() - gm[0].clone()) / ha.scale(2.0), g[1].clone()],
            vec![(gp[1].clone() - gm[1].clone()) / ha.scale(2.0), gdd],
        ];
        let d = lu_solve(jac, vec![-g[0].clone(), -g[1].clone()])?;
        a = a + d[0].clone();
        r = r + d[1].clone();
    }
    if !converged {
        let last = steps.last().map(|s| s.residual).unwrap_or(f64::INFINITY);
        if last >= opts.tol {
            return Err(LabError::NoConvergence(format!("tangency residual {last:.2e}")));
        }
    }
    let t = build(&a, n + k)?;
    let folds = Folds::compute(&t)?;
    let sys = TangencySystem::new(&t, n, k, &seeds)?;
    let (g, dg) = sys.gap(&r)?;
    let q_pt = sys.tau().at(&r)?;
    let aq_n = t.a_pow(2 * n).abs();
    let radius = 5.0 * aq_n;
    let floor = T::eps().sqrt();
    let (mult, mrad) = zero_count(|z| Ok(sys.gap(z)?.0), &r, radius, floor)?;
    let wb = vertical_tangency(&sys.tau(), folds.iota[n].clone())?.w;
    let a64 = a.to_c64();
    let splitting = match opts.splitting_delta {
        Some(d) => Some(splitting_check(&a, &r, n, k, d, &seeds)?),
        None => None,
    };
    Ok(TangencyReport {
        n,
        k,
        precision_bits: T::bits(),
        a: CJson::of(&a),
        a_abs: a64.norm(),
        a_arg: a64.arg(),
        seed_a: CJson::of(&seed_a),
        seed_quality: (seed_a - a64).norm() / a64.norm(),
        start_a: CJson::of(&start_a),
        point: TangencyPoint {
            q: CJson::of(&q_pt),
            r: CJson::of(&r),
        },
        residuals: [g.abs(), dg.abs()],
        multiplicity: mult,
        multiplicity_radius: mrad,
        w_bar: CJson::of(&wb),
        r_minus_w_bar_over_aq: (r.clone() - wb).abs() / aq_n,
        iterations: steps,
        splitting,
        tower_diag: t.diag.clone(),
    })
}

/// Zero counts of `tau_n - psi_n^{n+k}` in the disk of radius `5 |a|^{q_{2n}}`
/// about `r` at `a (1 + delta)` and `a (1 - delta)`; also locates the two
/// split zeros from the local quadratic model.
pub fn splitting_check<T: Scalar>(
    a: &T,
    r: &T,
    n: usize,
    k: usize,
    rel_delta: f64,
    seeds: &SaddleSeeds<T>,
) -> Result<Splitting> {
    let mut counts = Vec::new();
    for sign in [1.0, -1.0] {
        let ap = a.clone() * T::from_f64(1.0 + sign * rel_delta);
        let t = build(&ap, n + k)?;
        let sys = TangencySystem::new(&t, n, k, seeds)?;
        let radius = 5.0 * t.a_pow(2 * n).abs();
        let (count, used) = zero_count(|z| Ok(sys.gap(z)?.0), r, radius, T::eps().sqrt())?;
        let (g0, g1) = sys.gap(r)?;
        let g2 = sys.gap_dd(r)?;
        // local model g0 + g1 s + g2 s^2 / 2
        let disc = (g1.sq() - g0.clone() * g2.scale(2.0)).sqrt();
        let mut zeros = Vec::new();
        let mut slopes = Vec::new();
        for sgn in [1.0, -1.0] {
            let s = (-g1.clone() + disc.scale(sgn)) / g2.clone();
            if let Ok(z) = newton1_d(|z| sys.gap(z), r.clone() + s, T::eps().sqrt()) {
                slopes.push(sys.gap(&z)?.1.abs());
                zeros.push(z);
            }
        }
        let sep = if zeros.len() == 2 {
            Some((zeros[0].clone() - zeros[1].clone()).abs())
        } else {
            None
        };
        let far = zeros.iter().map(|z| (z.clone() - r.clone()).abs()).fold(0.0, f64::max);
        let (enclosing_count, enclosing_radius) = if far > 0.0 {
            match zero_count(|z| Ok(sys.gap(z)?.0), r, 2.0 * far, T::eps().sqrt()) {
                Ok((c, rad)) => (Some(c), Some(rad)),
                Err(_) => (None, None),
            }
        } else {
            (None, None)
        };
        counts.push(SplitCount {
            rel_delta: sign * rel_delta,
            a: CJson::of(&ap),
            count,
            radius: used,
            zeros: zeros.iter().map(CJson::of).collect(),
            zero_separation: sep,
            min_slope: slopes.iter().cloned().reduce(f64::min),
            enclosing_count,
            enclosing_radius,
        });
    }
    let mut c: Vec<i64> = counts.iter().map(|c| c.count).collect();
    c.sort();
    let double_root_split = counts.iter().all(|s| {
        s.enclosing_count == Some(2)
            && s.zero_separation.is_some_and(|d| d > s.radius)
            && s.min_slope.is_some_and(|m| m > T::eps().sqrt())
    });
    Ok(Splitting {
        rel_delta,
        non_persistent: c == vec![0, 2],
        double_root_split,
        counts,
    })
}
