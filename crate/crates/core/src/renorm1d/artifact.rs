use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::universal::ExpansionDomainCheck;
use super::{w_domain, z_domain, ConvergenceReport, RenormPair1D, UniversalData1D, DEGREE};
use crate::artifact::{CJson, SeriesJson};
use crate::error::{LabError, Result};
use crate::numkit::EvenMap;

pub const FORMAT: &str = "zeta-star/1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniversalSummary {
    pub lambda_star: CJson,
    pub x_star: CJson,
    pub xi_prime_x_star: CJson,
    pub xi_star_dd0: CJson,
    pub eta_star_0: CJson,
    pub exp_branch_at_0: CJson,
    pub rot_branch_at_0: CJson,
    pub exp_branch_d0: CJson,
    pub rot_branch_d0: CJson,
    pub phi_prime_1: CJson,
    pub u_star_at_xstar_minus_1: CJson,
    pub koenigs_m_gap: f64,
    pub expansion_check: ExpansionDomainCheck,
}

impl UniversalSummary {
    pub fn of(u: &UniversalData1D) -> Self {
        UniversalSummary {
            lambda_star: CJson::of(&u.lambda_star),
            x_star: CJson::of(&u.x_star),
            xi_prime_x_star: CJson::of(&u.xi_prime_x_star),
            xi_star_dd0: CJson::of(&u.xi_star_dd0),
            eta_star_0: CJson::of(&u.eta_star_0),
            exp_branch_at_0: CJson::of(&u.exp_branch_at_0),
            rot_branch_at_0: CJson::of(&u.rot_branch_at_0),
            exp_branch_d0: CJson::of(&u.exp_branch_d0),
            rot_branch_d0: CJson::of(&u.rot_branch_d0),
            phi_prime_1: CJson::of(&u.phi_prime_1),
            u_star_at_xstar_minus_1: CJson::of(&u.u_star_at_xstar_minus_1),
            koenigs_m_gap: u.koenigs_m_gap,
            expansion_check: u.expansion_check.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZetaArtifact {
    pub format: String,
    pub precision_bits: u32,
    pub degree: usize,
    pub eta_u: SeriesJson,
    pub xi_u: SeriesJson,
    pub fixed_point_residual: f64,
    pub report: ConvergenceReport,
    pub universal: UniversalSummary,
}

impl ZetaArtifact {
    pub fn new(p: &RenormPair1D, u: &UniversalData1D, rep: &ConvergenceReport) -> Self {
        ZetaArtifact {
            format: FORMAT.into(),
            precision_bits: 53,
            degree: DEGREE,
            eta_u: SeriesJson::of(&p.eta.u),
            xi_u: SeriesJson::of(&p.xi.u),
            fixed_point_residual: p.fixed_point_residual(),
            report: rep.clone(),
            universal: UniversalSummary::of(u),
        }
    }

    pub fn pair(&self) -> Result<RenormPair1D> {
        if self.format != FORMAT {
            return Err(LabError::Invalid(format!("artifact format {}", self.format)));
        }
        let eta = self.eta_u.to_series::<C64>()?;
        let xi = self.xi_u.to_series::<C64>()?;
        if eta.domain != z_domain() || xi.domain != w_domain() {
            return Err(LabError::Invalid("artifact domains differ from the built-in ones".into()));
        }
        let mut p = RenormPair1D {
            eta: EvenMap { u: eta },
            xi: EvenMap { u: xi },
            lambda_step: C64::new(0.0, 0.0),
            level: 0,
        };
        p.lambda_step = p.lambda();
        Ok(p)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
