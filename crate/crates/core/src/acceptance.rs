//! End-to-end acceptance suite: one pass/fail outcome per criterion with
//! pinned tolerances.

use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numkit::{CMp, PrecisionScope, Scalar};
use crate::renorm1d::oracle::{aitken, critical_orbit_scaling};
use crate::renorm1d::{direct_pair, renorm_step, FixedPoint};
use crate::renorm2d::checks::{det_identity_error, det_test_points, sup_dy_b};
use crate::renorm2d::{cap_derivative, Folds, Tower, UniversalFunctions};
use crate::scaling::{scaling_table, Quantity, ScalingPlan, ScalingTable};
use crate::tangency::{delta_constants, heteroclinic_solve, universal_seed, DeltaConstants, HeteroclinicOptions, TangencyReport};

pub const FIXED_POINT_RESIDUAL: f64 = 1e-7;
pub const FIXED_POINT_SECONDS: f64 = 60.0;
pub const TRIANGLE_REL: f64 = 1e-3;
/// 1D tower used for the limit of `lambda_n`: `renorm_step` iterated from the
/// level-2 critical-orbit pair.
pub const TRIANGLE_TOWER_START: usize = 2;
pub const TRIANGLE_TOWER_STEPS: usize = 7;
pub const ORBIT_KMAX: usize = 24;
pub const DET_REL: f64 = 1e-6;
pub const DET_LEVELS: usize = 3;
pub const FLATTENING_LOG_RATIO: f64 = 1.5;
pub const FLATTENING_RADIUS: f64 = 0.3;
pub const COHERENCE: f64 = 1e-8;
pub const SCALING_STABILITY: f64 = 0.3;
pub const MULTIPLIER_BAND: (f64, f64) = (0.1, 10.0);
pub const SLOPE_BAND: (f64, f64) = (0.05, 20.0);
pub const CAP_U_REL: f64 = 0.1;
pub const CAP_U_A: f64 = 0.1;
pub const POSITION_REL: f64 = 0.3;
pub const DELTA_REL: f64 = 0.3;
pub const TANGENCY_RESIDUAL: f64 = 1e-9;
pub const TANGENCY_SECONDS: f64 = 1800.0;
pub const SPLIT_DELTA: f64 = 1e-2;
pub const PARAMETER_SCALING_REL: f64 = 0.3;

/// Criteria documented to fail; see the README.
pub const EXPECTED_FAILURES: [u8; 3] = [5, 6, 8];

#[derive(Clone, Debug)]
pub struct AcceptanceOptions {
    pub a: f64,
    pub precision_bits: u32,
    /// Run the tangency criteria 8 and 9.
    pub tangency: bool,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        AcceptanceOptions {
            a: 0.2,
            precision_bits: 200,
            tangency: true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub pass: bool,
    pub expected_failure: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let tag = match (self.pass, self.expected_failure) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => "FAIL",
        };
        format!("criterion {} [{}] {}: {}", self.id, tag, self.title, self.detail)
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct AcceptanceRun {
    pub results: Vec<CriterionResult>,
    pub scaling: Option<ScalingTable>,
    pub deltas: Option<DeltaConstants>,
    pub tangencies: Vec<TangencyReport>,
}

impl AcceptanceRun {
    pub fn failures(&self) -> Vec<u8> {
        self.results.iter().filter(|r| !r.pass).map(|r| r.id).collect()
    }

    /// Failures are exactly the documented ones among the criteria that ran.
    pub fn matches_expected(&self) -> bool {
        let ran: Vec<u8> = self.results.iter().map(|r| r.id).collect();
        let expected: Vec<u8> = EXPECTED_FAILURES.iter().copied().filter(|i| ran.contains(i)).collect();
        self.failures() == expected
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn within(x: f64, band: (f64, f64)) -> bool {
    x >= band.0 && x <= band.1
}

/// Largest relative change between consecutive values.
fn spread(v: &[C64]) -> f64 {
    v.windows(2).map(|w| rel(w[0], w[1])).fold(0.0, f64::max)
}

fn yes(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "out"
    }
}

type Outcome = (bool, String);

pub fn criterion_fixed_point() -> Result<(Outcome, FixedPoint)> {
    let t0 = Instant::now();
    let fp = FixedPoint::solve(1e-12, 60)?;
    let secs = t0.elapsed().as_secs_f64();
    let res = fp.pair.fixed_point_residual();
    let pass = res < FIXED_POINT_RESIDUAL && secs < FIXED_POINT_SECONDS;
    Ok((
        (pass, format!("residual {res:.2e} (< {FIXED_POINT_RESIDUAL:.0e}), solve {secs:.1}s (< {FIXED_POINT_SECONDS}s)")),
        fp,
    ))
}

/// Limit of `lambda_n` along the 1D renormalization tower by Aitken
/// extrapolation of its last three terms.
pub fn tower_lambda_limit() -> Result<C64> {
    let mut p = direct_pair(TRIANGLE_TOWER_START, 128);
    let mut l = Vec::new();
    for _ in 0..TRIANGLE_TOWER_STEPS {
        p = renorm_step(&p)?;
        l.push(p.lambda());
    }
    let m = l.len();
    Ok(aitken(l[m - 3], l[m - 2], l[m - 1]))
}

pub fn criterion_triangle(fp: &FixedPoint) -> Result<Outcome> {
    let tower = tower_lambda_limit()?;
    let phi = {
        let s = fp.universal.phi_prime_1.sqrt();
        if s.re < 0.0 {
            -s
        } else {
            s
        }
    };
    let orbit = critical_orbit_scaling(ORBIT_KMAX, 200).aitken;
    let d = [rel(tower, phi), rel(tower, orbit), rel(phi, orbit)];
    let worst = d.iter().cloned().fold(0.0, f64::max);
    Ok((
        worst <= TRIANGLE_REL,
        format!(
            "tower {:.10} / sqrt phi'(1) {:.10} / orbit {:.10}; pairwise rel {:.1e} {:.1e} {:.1e} (<= {TRIANGLE_REL:.0e})",
            tower.re, phi.re, orbit.re, d[0], d[1], d[2]
        ),
    ))
}

pub fn criterion_determinant(a: f64) -> Result<Outcome> {
    let t = Tower::golden(C64::new(a, 0.0), DET_LEVELS)?;
    if t.depth() < DET_LEVELS {
        return Err(LabError::PrecisionExhausted(t.depth()));
    }
    let mut worst: f64 = 0.0;
    for n in 1..=DET_LEVELS {
        for z in det_test_points(&t, n)? {
            worst = worst.max(det_identity_error(&t, n, &z)?);
        }
    }
    Ok((worst < DET_REL, format!("max rel err {worst:.2e} over 5 points, n = 1..{DET_LEVELS} (< {DET_REL:.0e})")))
}

pub fn criterion_flattening(a: f64) -> Result<Outcome> {
    let t = Tower::golden(C64::new(a, 0.0), 3)?;
    let s: Vec<f64> = (1..=t.depth()).map(|n| sup_dy_b(&t, n, FLATTENING_RADIUS)).collect::<Result<_>>()?;
    let decreasing = s.windows(2).all(|w| w[1] < w[0]);
    let ratio = s[1].ln() / s[0].ln();
    Ok((
        decreasing && ratio > FLATTENING_LOG_RATIO,
        format!(
            "sup|d_y b_n| = {}; log ratio 1->2 {ratio:.2} (> {FLATTENING_LOG_RATIO})",
            s.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
        ),
    ))
}

pub fn criterion_fold(tower: &Tower<CMp>) -> Result<Outcome> {
    let f = Folds::compute(tower)?;
    let worst = f.coherence.iter().cloned().fold(0.0, f64::max);
    let d = f.distances_to_one();
    let monotone = d.windows(2).all(|w| w[1] < w[0]);
    Ok((
        worst < COHERENCE && monotone,
        format!(
            "coherence {} (< {COHERENCE:.0e}); |kappa_n - 1| monotone: {monotone}",
            f.coherence.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>().join(", ")
        ),
    ))
}

pub fn criterion_scaling(tower: &Tower<CMp>, fp: &FixedPoint, bits: u32) -> Result<(Outcome, ScalingTable)> {
    let plan = ScalingPlan {
        levels: (1..=3).collect(),
        stable: vec![(1, 1), (1, 2), (2, 1), (2, 2), (2, 3)],
    };
    let ud = &fp.universal;
    let tab = scaling_table(tower, ud, &plan)?;
    let col = |q: Quantity| -> Vec<C64> { (1..=3).filter_map(|n| tab.get(q, n, 0)).collect() };
    let w = spread(&col(Quantity::TangencyW));
    let v = spread(&col(Quantity::TangencyV));
    let nu: Vec<f64> = col(Quantity::StableMultiplier).iter().map(|z| z.re).collect();
    let nu_ok = nu.len() == 3 && nu.iter().all(|x| within(*x, MULTIPLIER_BAND));
    let slopes: Vec<f64> = [1, 2]
        .iter()
        .filter_map(|&k| tab.get(Quantity::StableSlope, 1, k))
        .map(|z| z.re)
        .collect();
    let slope_ok = slopes.len() == 2 && slopes.iter().all(|x| within(*x, SLOPE_BAND));
    let pos: Vec<f64> = [1, 2, 3]
        .iter()
        .filter_map(|&k| tab.get(Quantity::StablePosition, 2, k))
        .map(|z| (z - 1.0).norm())
        .collect();
    let pos_ok = pos.len() == 3 && pos.iter().all(|x| *x <= POSITION_REL);
    let u = {
        let _scope = PrecisionScope::new(bits);
        let t = Tower::golden(CMp::c(CAP_U_A, 0.0), 3)?;
        let f = Folds::compute(&t)?;
        let l2 = ud.lambda_star * ud.lambda_star;
        [2, 3]
            .iter()
            .map(|&n| Ok((cap_derivative(&t, &f, n, 1)?.u.to_c64() / l2 - 1.0).norm()))
            .collect::<Result<Vec<f64>>>()?
    };
    let u_ok = u.iter().all(|x| *x <= CAP_U_REL);
    let pass = w <= SCALING_STABILITY && v <= SCALING_STABILITY && nu_ok && slope_ok && pos_ok && u_ok;
    let detail = format!(
        "w spread {w:.2} [{}], v spread {v:.2} [{}], |nu|/|a|^q {} [{}], slope {} [{}], |u/l*^2 - 1| at |a|={CAP_U_A} {} [{}], |position - 1| {} [{}]",
        yes(w <= SCALING_STABILITY),
        yes(v <= SCALING_STABILITY),
        nu.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join("/"),
        yes(nu_ok),
        slopes.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join("/"),
        yes(slope_ok),
        u.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join("/"),
        yes(u_ok),
        pos.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join("/"),
        yes(pos_ok),
    );
    Ok(((pass, detail), tab))
}

/// Level used for the Delta comparison: the deepest `n` with `n + 1`
/// resolvable.
pub fn delta_level<T: Scalar>(tower: &Tower<T>) -> usize {
    tower.resolvable_depth().saturating_sub(1).max(1)
}

pub fn criterion_deltas(tower: &Tower<CMp>, fp: &FixedPoint) -> Result<(Outcome, DeltaConstants)> {
    let uf = UniversalFunctions::extract(tower, tower.resolvable_depth(), &fp.pair)?;
    let n = delta_level(tower);
    let d = delta_constants(tower, n, &fp.universal, &uf)?;
    let rv = d.delta_v.rel_diff.unwrap_or(f64::INFINITY);
    let rw = d.delta_w.rel_diff.unwrap_or(f64::INFINITY);
    Ok((
        (
            rv < DELTA_REL && rw < DELTA_REL,
            format!("n = {n}: Delta_v rel diff {rv:.3}, Delta_w rel diff {rw:.3} (< {DELTA_REL})"),
        ),
        d,
    ))
}

pub fn criterion_tangency(fp: &FixedPoint, deltas: &DeltaConstants, bits: u32) -> Result<(Outcome, TangencyReport)> {
    let _scope = PrecisionScope::new(bits);
    let seed = universal_seed(2, 2, &fp.universal, deltas.delta_bar_v.formula, None);
    let opts = HeteroclinicOptions {
        tol: TANGENCY_RESIDUAL,
        splitting_delta: Some(SPLIT_DELTA),
        ..Default::default()
    };
    let clock = Instant::now();
    let rep = heteroclinic_solve(2, 2, CMp::from_c64(seed), seed, &opts)?;
    let seconds = clock.elapsed().as_secs_f64();
    let res_ok = rep.residuals.iter().all(|r| *r < TANGENCY_RESIDUAL);
    let sp = rep.splitting.as_ref().ok_or_else(|| LabError::Invalid("no splitting".into()))?;
    let counts: Vec<i64> = sp.counts.iter().map(|c| c.count).collect();
    let enclosing: Vec<String> = sp
        .counts
        .iter()
        .map(|c| c.enclosing_count.map_or("-".into(), |x| x.to_string()))
        .collect();
    let time_ok = seconds < TANGENCY_SECONDS;
    let pass = res_ok && sp.non_persistent && time_ok;
    let a = rep.a.get::<C64>()?;
    let detail = format!(
        "a = {:.8}{:+.8}i, residuals {:.1e}/{:.1e} (< {TANGENCY_RESIDUAL:.0e}), multiplicity {}, counts at +-{SPLIT_DELTA} {:?} (want {{0, 2}}), enclosing counts {}, double zero split {}, {:.0}s (< {TANGENCY_SECONDS}s)",
        a.re,
        a.im,
        rep.residuals[0],
        rep.residuals[1],
        rep.multiplicity,
        counts,
        enclosing.join("/"),
        sp.double_root_split,
        seconds
    );
    Ok(((pass, detail), rep))
}

/// Solves `(2, 1)` from `a(2, 2) / lambda*` and compares
/// `|a(2, 2) / a(2, 1)|^{q_2}` with `|lambda*|^2`.
pub fn criterion_parameter_scaling(fp: &FixedPoint, k2: &TangencyReport, bits: u32) -> Result<(Outcome, TangencyReport)> {
    let _scope = PrecisionScope::new(bits);
    let a2 = k2.a.get::<C64>()?;
    let l = fp.universal.lambda_star;
    let start = a2 / l;
    let opts = HeteroclinicOptions {
        tol: TANGENCY_RESIDUAL,
        splitting_delta: None,
        ..Default::default()
    };
    let rep = heteroclinic_solve(2, 1, CMp::from_c64(start), start, &opts)?;
    let a1 = rep.a.get::<C64>()?;
    let q = crate::henon::fib(2) as i32;
    let ratio = (a2 / a1).norm().powi(q);
    let target = l.norm_sqr();
    let r = (ratio - target).abs() / target;
    Ok((
        (
            r <= PARAMETER_SCALING_REL && rel(a2, a1) > 1e-6,
            format!(
                "a(2,1) = {:.8}{:+.8}i, |a(2,2)/a(2,1)|^{q} = {ratio:.5} vs |lambda*|^2 = {target:.5}, rel {r:.3} (<= {PARAMETER_SCALING_REL})",
                a1.re, a1.im
            ),
        ),
        rep,
    ))
}

const TITLES: [&str; 9] = [
    "1D fixed point",
    "lambda* consistency triangle",
    "determinant law",
    "flattening of d_y B_n",
    "fold coherence",
    "scaling-law table",
    "Delta constants",
    "tangency existence and splitting",
    "tangency-parameter scaling",
];

/// Runs the suite, reporting each outcome to `sink` as soon as it is known.
pub fn run_acceptance<F: FnMut(&CriterionResult)>(opts: &AcceptanceOptions, mut sink: F) -> AcceptanceRun {
    let mut run = AcceptanceRun::default();
    let mut record = |run: &mut AcceptanceRun, id: u8, t0: Instant, out: Result<Outcome>| {
        let (pass, detail) = out.unwrap_or_else(|e| (false, format!("error: {e}")));
        let r = CriterionResult {
            id,
            title: TITLES[id as usize - 1].into(),
            pass,
            expected_failure: EXPECTED_FAILURES.contains(&id),
            detail,
            seconds: t0.elapsed().as_secs_f64(),
        };
        sink(&r);
        run.results.push(r);
    };

    let t0 = Instant::now();
    let fp = match criterion_fixed_point() {
        Ok((o, fp)) => {
            record(&mut run, 1, t0, Ok(o));
            fp
        }
        Err(e) => {
            record(&mut run, 1, t0, Err(e));
            return run;
        }
    };
    let t0 = Instant::now();
    record(&mut run, 2, t0, criterion_triangle(&fp));
    let t0 = Instant::now();
    record(&mut run, 3, t0, criterion_determinant(opts.a));
    let t0 = Instant::now();
    record(&mut run, 4, t0, criterion_flattening(opts.a));

    let _scope = PrecisionScope::new(opts.precision_bits);
    let t0 = Instant::now();
    let tower = Tower::golden(CMp::c(opts.a, 0.0), if opts.precision_bits >= 200 { 5 } else { 3 });
    let tower = match tower {
        Ok(t) => t,
        Err(e) => {
            for id in 5..=9 {
                record(&mut run, id, t0, Err(e.clone()));
            }
            return run;
        }
    };
    record(&mut run, 5, t0, criterion_fold(&tower));
    let t0 = Instant::now();
    let out = criterion_scaling(&tower, &fp, opts.precision_bits).map(|(o, tab)| {
        run.scaling = Some(tab);
        o
    });
    record(&mut run, 6, t0, out);
    let t0 = Instant::now();
    let out = criterion_deltas(&tower, &fp).map(|(o, d)| {
        run.deltas = Some(d);
        o
    });
    record(&mut run, 7, t0, out);
    if !opts.tangency {
        return run;
    }
    let t0 = Instant::now();
    let deltas = match run.deltas.clone() {
        Some(d) => d,
        None => {
            for id in 8..=9 {
                record(&mut run, id, t0, Err(LabError::Invalid("Delta constants unavailable".into())));
            }
            return run;
        }
    };
    let k2 = match criterion_tangency(&fp, &deltas, opts.precision_bits) {
        Ok((o, rep)) => {
            record(&mut run, 8, t0, Ok(o));
            rep
        }
        Err(e) => {
            record(&mut run, 8, t0, Err(e.clone()));
            record(&mut run, 9, t0, Err(e));
            return run;
        }
    };
    let t0 = Instant::now();
    let out = criterion_parameter_scaling(&fp, &k2, opts.precision_bits).map(|(o, rep)| {
        run.tangencies.push(rep);
        o
    });
    run.tangencies.insert(0, k2);
    record(&mut run, 9, t0, out);
    run
}
