use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use siegel_renorm::acceptance::{run_acceptance, AcceptanceOptions};
use siegel_renorm::henon::Config;
use siegel_renorm::manifolds::{manifolds_report, GraphCurve};
use siegel_renorm::renorm1d::artifact::{UniversalSummary, ZetaArtifact};
use siegel_renorm::renorm1d::FixedPoint;
use siegel_renorm::renorm2d::{Tower, TowerSummary, UniversalFunctions};
use siegel_renorm::scaling::{scaling_table, ScalingPlan};
use siegel_renorm::tangency::{delta_constants, heteroclinic_solve, universal_seed, DeltaConstants, HeteroclinicOptions};
use siegel_renorm::{CMp, Complex64 as C64, LabError, PrecisionScope, Scalar};

use crate::manifest::{FileRecord, Outputs, RunManifest};
use crate::{fail, Category, Cli, Command};

pub const ZETA_FILE: &str = "zeta_star.json";
/// Parameter of the tower that supplies `beta`, `alpha` for the tangency seed.
pub const SEED_TOWER_A: f64 = 0.2;
const FIXED_POINT_STEPS: usize = 60;

struct Ctx {
    config: Config,
    out: Outputs,
    inputs: Vec<FileRecord>,
    zeta_sha: Option<String>,
}

impl Ctx {
    fn bits(&self) -> u32 {
        self.config.precision_bits
    }

    fn zeta_path(&self) -> PathBuf {
        self.out.dir.join(ZETA_FILE)
    }

    /// Cached fixed point from the output directory; solved afresh when absent
    /// unless `required`.
    fn fixed_point(&mut self, required: bool) -> Result<FixedPoint> {
        let path = self.zeta_path();
        if path.exists() {
            let rec = FileRecord::of(&path)?;
            let text = std::fs::read_to_string(&path)?;
            let art = ZetaArtifact::from_json(&text).map_err(|e| fail(Category::InvalidInput, format!("{}: {e}", path.display())))?;
            let fp = FixedPoint::from_artifact(&art)?;
            self.zeta_sha = Some(rec.sha256.clone());
            self.inputs.push(rec);
            return Ok(fp);
        }
        if required {
            return Err(fail(
                Category::MissingCache,
                format!("{} not found; run `siegel fixed-point` first", path.display()),
            ));
        }
        Ok(FixedPoint::solve(self.config.tol_newton, FIXED_POINT_STEPS)?)
    }
}

/// Parses `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let bad = || fail(Category::InvalidInput, format!("cannot parse complex number {s:?}"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let z = match parts.as_slice() {
        [re] => C64::new(num(re)?, 0.0),
        [re, im] => C64::new(num(re)?, num(im)?),
        _ => return Err(bad()),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(bad());
    }
    Ok(z)
}

fn check_a(a: C64, eps_bar: f64) -> Result<()> {
    if a.norm() == 0.0 || a.norm() >= eps_bar {
        return Err(fail(Category::InvalidInput, format!("need 0 < |a| < {eps_bar}, got {a}")));
    }
    Ok(())
}

/// Runs `$body` with `$t` bound to hardware doubles at 53 bits and to the
/// multiprecision scalar otherwise.
macro_rules! with_scalar {
    ($bits:expr, $t:ident => $body:expr) => {{
        if $bits <= 53 {
            type $t = C64;
            $body
        } else {
            let _scope = PrecisionScope::new($bits);
            type $t = CMp;
            $body
        }
    }};
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut config = match &cli.common.config {
        Some(p) => Config::load(p).with_context(|| format!("config {}", p.display()))?,
        None => Config::default(),
    };
    if let Some(b) = cli.common.precision {
        config.precision_bits = b;
    }
    config.validate()?;
    Ok(config)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::FixedPoint { .. } => "fixed-point",
        Command::Constants { .. } => "constants",
        Command::Tower { .. } => "tower",
        Command::Manifolds { .. } => "manifolds",
        Command::Tangency { .. } => "tangency",
        Command::ScalingTable { .. } => "scaling-table",
        Command::Accept { .. } => "accept",
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let clock = Instant::now();
    let config = load_config(cli)?;
    let mut ctx = Ctx {
        config,
        out: Outputs::new(&cli.common.out_dir)?,
        inputs: Vec::new(),
        zeta_sha: None,
    };
    if let Some(p) = &cli.common.config {
        ctx.inputs.push(FileRecord::of(p)?);
    }
    let result = match &cli.command {
        Command::FixedPoint { tol } => fixed_point(&mut ctx, *tol),
        Command::Constants { a } => constants(&mut ctx, parse_complex(a)?),
        Command::Tower { a, levels } => tower(&mut ctx, parse_complex(a)?, *levels),
        Command::Manifolds { a, n, k } => manifolds(&mut ctx, parse_complex(a)?, *n, *k),
        Command::Tangency {
            n,
            k,
            a,
            tol,
            split_delta,
        } => {
            let start = a.as_deref().map(parse_complex).transpose()?;
            tangency(&mut ctx, *n, *k, start, *tol, *split_delta)
        }
        Command::ScalingTable { a } => scaling(&mut ctx, parse_complex(a)?),
        Command::Accept { a, quick } => accept(&mut ctx, parse_complex(a)?, *quick, cli.common.precision),
    };
    // The manifest is written even when the command fails after producing output.
    let name = command_name(&cli.command);
    let manifest = RunManifest {
        command: name.into(),
        argv: std::env::args().collect(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: ctx.config.clone(),
        precision_bits: ctx.bits(),
        inputs: ctx.inputs.clone(),
        outputs: ctx.out.files.clone(),
        zeta_star_sha256: ctx.zeta_sha.clone(),
        wall_seconds: clock.elapsed().as_secs_f64(),
    };
    let path = ctx.out.dir.join(format!("manifest_{}.json", name.replace('-', "_")));
    let mut s = serde_json::to_string_pretty(&manifest)?;
    s.push('\n');
    std::fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
    result
}

fn fixed_point(ctx: &mut Ctx, tol: Option<f64>) -> Result<()> {
    let tol = tol.unwrap_or(ctx.config.tol_newton);
    if !(tol > 0.0) {
        return Err(fail(Category::InvalidInput, "tol must be positive"));
    }
    let fp = FixedPoint::solve(tol, FIXED_POINT_STEPS)?;
    let art = fp.artifact();
    let path = ctx.out.write(ZETA_FILE, art.to_json()?.as_bytes())?;
    ctx.zeta_sha = ctx.out.files.last().map(|f| f.sha256.clone());
    let l = fp.universal.lambda_star;
    println!(
        "lambda* = {:.12}{:+.12}i, residual {:.2e}, {} steps -> {}",
        l.re,
        l.im,
        fp.pair.fixed_point_residual(),
        fp.report.distances.len(),
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct ConstantsOut {
    a: C64,
    precision_bits: u32,
    universal: UniversalSummary,
    beta_level: usize,
    beta_min_abs: f64,
    alpha_formula_gap: f64,
    deltas: DeltaConstants,
}

fn constants(ctx: &mut Ctx, a: C64) -> Result<()> {
    check_a(a, ctx.config.eps_bar)?;
    let fp = ctx.fixed_point(false)?;
    let cap = ctx.config.level_cap();
    let out = with_scalar!(ctx.bits(), T => {
        let t = Tower::golden(T::from_c64(a), cap)?;
        let uf = UniversalFunctions::extract(&t, t.resolvable_depth().max(1), &fp.pair)?;
        let n = t.resolvable_depth().saturating_sub(1).max(1);
        let deltas = delta_constants(&t, n, &fp.universal, &uf)?;
        ConstantsOut {
            a,
            precision_bits: T::bits(),
            universal: UniversalSummary::of(&fp.universal),
            beta_level: uf.level,
            beta_min_abs: uf.beta_min_abs,
            alpha_formula_gap: uf.alpha_formula_gap,
            deltas,
        }
    });
    ctx.out.write_json("constants.json", &out)?;
    let d = &out.deltas;
    println!(
        "Delta_v = {:.6}{:+.6}i, Delta_w = {:.6}{:+.6}i, Delta_bar_v = {:.6}{:+.6}i (beta from level {})",
        d.delta_v.formula.re,
        d.delta_v.formula.im,
        d.delta_w.formula.re,
        d.delta_w.formula.im,
        d.delta_bar_v.formula.re,
        d.delta_bar_v.formula.im,
        out.beta_level
    );
    Ok(())
}

fn tower(ctx: &mut Ctx, a: C64, levels: Option<usize>) -> Result<()> {
    check_a(a, ctx.config.eps_bar)?;
    let cap = ctx.config.level_cap();
    let want = levels.unwrap_or(cap);
    if want == 0 {
        return Err(fail(Category::InvalidInput, "levels must be at least 1"));
    }
    let summary = with_scalar!(ctx.bits(), T => {
        let t = Tower::golden(T::from_c64(a), want.min(cap))?;
        TowerSummary::of(&t)?
    });
    ctx.out.write_json("tower_summary.json", &summary)?;
    println!(
        "a = {a}: {} accepted levels, {} resolvable at {} bits",
        summary.accepted_levels,
        summary.resolvable_levels,
        summary.precision_bits
    );
    if summary.accepted_levels < want {
        return Err(LabError::PrecisionExhausted(summary.accepted_levels).into());
    }
    Ok(())
}

fn curve_csv<T: Scalar>(g: &GraphCurve<T>) -> String {
    let mut s = String::from("re_s,im_s,re_f,im_f,re_df,im_df\n");
    for r in g.samples(64, 0.9) {
        s.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            r[0], r[1], r[2], r[3], r[4], r[5]
        ));
    }
    s
}

fn manifolds(ctx: &mut Ctx, a: C64, n: usize, k: usize) -> Result<()> {
    check_a(a, ctx.config.eps_bar)?;
    if n == 0 || k == 0 {
        return Err(fail(Category::InvalidInput, "n and k must be at least 1"));
    }
    if n + k > ctx.config.level_cap() {
        return Err(LabError::PrecisionExhausted(ctx.config.level_cap()).into());
    }
    let fp = ctx.fixed_point(false)?;
    let (report, chi, psi) = with_scalar!(ctx.bits(), T => {
        let t = Tower::golden(T::from_c64(a), n + k)?;
        if t.depth() < n + k {
            return Err(LabError::PrecisionExhausted(t.depth()).into());
        }
        let (r, chi, psi) = manifolds_report(&t, n, k, &fp.universal)?;
        (r, curve_csv(&chi), curve_csv(&psi))
    });
    ctx.out.write_json("manifolds.json", &report)?;
    ctx.out.write(&format!("unstable_{n}.csv"), chi.as_bytes())?;
    ctx.out.write(&format!("stable_{n}_{k}.csv"), psi.as_bytes())?;
    println!(
        "level {n}: |nu|/|a|^q = {:.4}, stable slope/|a|^q = {:.4}, invariance {:.1e}",
        report.nu_over_aq, report.stable_slope_over_aq, report.unstable_invariance
    );
    Ok(())
}

fn tangency(ctx: &mut Ctx, n: usize, k: usize, start: Option<C64>, tol: f64, split: f64) -> Result<()> {
    if n < 2 || k == 0 {
        return Err(fail(Category::InvalidInput, "tangency needs n >= 2 and k >= 1"));
    }
    if !(tol > 0.0) || split < 0.0 {
        return Err(fail(Category::InvalidInput, "tol must be positive and split-delta non-negative"));
    }
    let fp = ctx.fixed_point(true)?;
    let seed_tower = Tower::golden(C64::new(SEED_TOWER_A, 0.0), 3)?;
    let uf = UniversalFunctions::extract(&seed_tower, seed_tower.depth(), &fp.pair)?;
    let deltas = delta_constants(&seed_tower, seed_tower.depth(), &fp.universal, &uf)?;
    let seed = universal_seed(n, k, &fp.universal, deltas.delta_bar_v.formula, start);
    let start = start.unwrap_or(seed);
    check_a(start, ctx.config.eps_bar)?;
    let opts = HeteroclinicOptions {
        tol,
        splitting_delta: (split > 0.0).then_some(split),
        ..Default::default()
    };
    let report = with_scalar!(ctx.bits(), T => heteroclinic_solve(n, k, T::from_c64(start), seed, &opts)?);
    ctx.out.write_json(&format!("tangency_{n}_{k}.json"), &report)?;
    let a = report.a.get::<C64>()?;
    println!(
        "a = {:.10}{:+.10}i, residuals {:.1e}/{:.1e}, multiplicity {}, {} Newton steps",
        a.re,
        a.im,
        report.residuals[0],
        report.residuals[1],
        report.multiplicity,
        report.iterations.len()
    );
    if report.residuals.iter().any(|r| *r >= tol) {
        return Err(fail(Category::Numerical, format!("residuals {:?} above {tol:e}", report.residuals)));
    }
    Ok(())
}

fn scaling(ctx: &mut Ctx, a: C64) -> Result<()> {
    check_a(a, ctx.config.eps_bar)?;
    let fp = ctx.fixed_point(false)?;
    let cap = ctx.config.level_cap();
    let table = with_scalar!(ctx.bits(), T => {
        let t = Tower::golden(T::from_c64(a), cap)?;
        scaling_table(&t, &fp.universal, &ScalingPlan::full(&t))?
    });
    ctx.out.write("scaling_table.csv", table.to_csv().as_bytes())?;
    ctx.out.write_json("scaling_table.json", &table)?;
    println!("{} rows at a = {a}", table.entries.len());
    Ok(())
}

fn accept(ctx: &mut Ctx, a: C64, quick: bool, precision: Option<u32>) -> Result<()> {
    if a.im != 0.0 {
        return Err(fail(Category::InvalidInput, "acceptance runs at real a"));
    }
    check_a(a, ctx.config.eps_bar)?;
    let mut opts = AcceptanceOptions {
        a: a.re,
        tangency: !quick,
        ..Default::default()
    };
    if let Some(b) = precision {
        opts.precision_bits = b;
    }
    ctx.config.precision_bits = opts.precision_bits;
    let run = run_acceptance(&opts, |r| println!("{}", r.line()));
    ctx.out.write_json("acceptance.json", &run)?;
    println!("failures: {:?}", run.failures());
    if !run.matches_expected() {
        return Err(fail(
            Category::AcceptanceMismatch,
            format!("failure set {:?} differs from the expected one", run.failures()),
        ));
    }
    Ok(())
}
