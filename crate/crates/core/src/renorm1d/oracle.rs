use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::henon::fibonacci;
use crate::numkit::{PrecisionScope, CMp, Scalar};

/// Scaling of the closest returns of the critical orbit of `z -> mu z + z^2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalOrbitScaling {
    /// `d_{2j}/d_{2j-2}` with `d_k = P^{q_k}(cp) - cp`.
    pub ratios: Vec<C64>,
    pub aitken: C64,
    pub iterates: u64,
}

pub fn aitken(x0: C64, x1: C64, x2: C64) -> C64 {
    let d2 = x2 - x1 * 2.0 + x0;
    if d2.norm() == 0.0 {
        return x2;
    }
    x2 - (x2 - x1) * (x2 - x1) / d2
}

/// Direct iteration up to `q_{kmax}` steps at `bits` precision.
pub fn critical_orbit_scaling(kmax: usize, bits: u32) -> CriticalOrbitScaling {
    let _scope = PrecisionScope::new(bits);
    let q = fibonacci(kmax);
    let mu = CMp::golden_mu();
    let cp = -Scalar::scale(&mu, 0.5);
    let mut z = cp.clone();
    let mut d = Vec::new();
    let mut k = 2;
    for it in 1..=q[kmax] {
        z = (mu.clone() + z.clone()) * z;
        if k <= kmax && it == q[k] {
            d.push(z.clone() - cp.clone());
            k += 2;
        }
    }
    let ratios: Vec<C64> = d
        .windows(2)
        .map(|w| (w[1].clone() / w[0].clone()).to_c64())
        .collect();
    let n = ratios.len();
    let acc = if n >= 3 {
        aitken(ratios[n - 3], ratios[n - 2], ratios[n - 1])
    } else {
        ratios[n - 1]
    };
    CriticalOrbitScaling {
        ratios,
        aitken: acc,
        iterates: q[kmax],
    }
}
