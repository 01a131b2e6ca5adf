//! Table of normalized scaling ratios across the levels of one tower.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::manifolds::{find_saddle, stable_position, Curve, StableManifold, UnstableManifold};
use crate::renorm1d::universal::UniversalData1D;
use crate::renorm2d::{cap_derivative, Folds, Tower};
use crate::tangency::unstable_tangency;
use crate::numkit::Scalar;

/// Radius of the circle about 0 on which stable slopes are sampled.
pub const SLOPE_RADIUS: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `(w_n - iota_n) / a^{q_{2n}}`
    TangencyW,
    /// `(v_n - kappa_n) / a^{q_{2n}}`
    TangencyV,
    /// `|nu_n| / |a|^{q_{2n}}`
    StableMultiplier,
    /// `sup |(psi_n^{n+k})'| / |a|^{q_{2n}}`
    StableSlope,
    /// `u_n / lambda*^2`
    CapU,
    /// `(psi_n^{n+k}(iota_n) - kappa_n) / (lambda*^{2k} u*(x* - 1))`
    StablePosition,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::TangencyW => "tangency_w",
            Quantity::TangencyV => "tangency_v",
            Quantity::StableMultiplier => "stable_multiplier",
            Quantity::StableSlope => "stable_slope",
            Quantity::CapU => "cap_u",
            Quantity::StablePosition => "stable_position",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingEntry {
    pub quantity: Quantity,
    pub n: usize,
    pub k: usize,
    pub value: C64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ScalingTable {
    pub a: C64,
    pub precision_bits: u32,
    pub entries: Vec<ScalingEntry>,
}

impl ScalingTable {
    pub fn select(&self, q: Quantity) -> Vec<&ScalingEntry> {
        self.entries.iter().filter(|e| e.quantity == q).collect()
    }

    pub fn get(&self, q: Quantity, n: usize, k: usize) -> Option<C64> {
        self.entries
            .iter()
            .find(|e| e.quantity == q && e.n == n && e.k == k)
            .map(|e| e.value)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("quantity,n,k,re,im,abs\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{},{},{},{:.12e},{:.12e},{:.12e}\n",
                e.quantity.name(),
                e.n,
                e.k,
                e.value.re,
                e.value.im,
                e.value.norm()
            ));
        }
        s
    }
}

/// Which parts of the table to fill.
#[derive(Clone, Debug)]
pub struct ScalingPlan {
    /// Levels for the tangency, multiplier and cap rows.
    pub levels: Vec<usize>,
    /// `(n, k)` pairs for the stable rows.
    pub stable: Vec<(usize, usize)>,
}

impl ScalingPlan {
    /// Every row the tower can support: tangency rows on resolvable levels,
    /// stable rows with `n + k` up to the accepted depth and `k <= 3`.
    pub fn full<T: Scalar>(tower: &Tower<T>) -> ScalingPlan {
        let levels = (1..=tower.resolvable_depth()).collect();
        let mut stable = Vec::new();
        for n in 1..=tower.resolvable_depth() {
            for k in 1..=3 {
                if n + k <= tower.depth() {
                    stable.push((n, k));
                }
            }
        }
        ScalingPlan { levels, stable }
    }
}

pub fn scaling_table<T: Scalar>(tower: &Tower<T>, ud: &UniversalData1D, plan: &ScalingPlan) -> Result<ScalingTable> {
    let folds = Folds::compute(tower)?;
    let mut entries = Vec::new();
    let mut push = |quantity, n, k, value| entries.push(ScalingEntry { quantity, n, k, value });
    let l2 = ud.lambda_star * ud.lambda_star;
    for &n in &plan.levels {
        let aq = tower.a_pow(2 * n).to_c64();
        let s = find_saddle(tower, n, 0)?;
        push(Quantity::StableMultiplier, n, 0, C64::new(s.nu.abs() / aq.norm(), 0.0));
        let um = UnstableManifold::compute(tower, s)?;
        let vt = unstable_tangency(&um, folds.iota[n].clone())?;
        push(Quantity::TangencyW, n, 0, (vt.w - folds.iota[n].clone()).to_c64() / aq);
        push(Quantity::TangencyV, n, 0, (vt.v - folds.kappa[n].clone()).to_c64() / aq);
        let cap = cap_derivative(tower, &folds, n, 1)?;
        push(Quantity::CapU, n, 1, cap.u.to_c64() / l2);
    }
    for &(n, k) in &plan.stable {
        let aq = tower.a_pow(2 * n).abs();
        let sm = StableManifold::compute(tower, find_saddle(tower, n, k)?)?;
        let mut slope: f64 = 0.0;
        for j in 0..16 {
            let y = T::cis(j, 16).scale(SLOPE_RADIUS);
            slope = slope.max(sm.eval_d(&y)?.1.abs());
        }
        push(Quantity::StableSlope, n, k, C64::new(slope / aq, 0.0));
        let pos = stable_position(&sm, &folds, ud)?;
        push(Quantity::StablePosition, n, k, pos.ratio);
    }
    Ok(ScalingTable {
        a: tower.a.to_c64(),
        precision_bits: T::bits(),
        entries,
    })
}
