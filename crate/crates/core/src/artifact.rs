use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numkit::{DiskDomain, Scalar, Series1D};

/// Complex number as decimal strings carrying the working precision.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CJson {
    pub re: String,
    pub im: String,
}

impl CJson {
    pub fn of<T: Scalar>(z: &T) -> Self {
        let (re, im) = z.to_dec();
        CJson { re, im }
    }

    pub fn get<T: Scalar>(&self) -> Result<T> {
        T::from_dec(&self.re, &self.im)
            .ok_or_else(|| LabError::Invalid(format!("bad decimal pair {} {}", self.re, self.im)))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesJson {
    pub center: CJson,
    pub radius: f64,
    pub coeffs: Vec<CJson>,
    pub tail_bound: f64,
}

impl SeriesJson {
    pub fn of<T: Scalar>(s: &Series1D<T>) -> Self {
        SeriesJson {
            center: CJson::of(&s.domain.center),
            radius: s.domain.radius,
            coeffs: s.coeffs.iter().map(CJson::of).collect(),
            tail_bound: s.tail_bound,
        }
    }

    pub fn to_series<T: Scalar>(&self) -> Result<Series1D<T>> {
        if self.coeffs.is_empty() {
            return Err(LabError::Invalid("empty coefficient list".into()));
        }
        let domain = DiskDomain::new(self.center.get()?, self.radius)?;
        let coeffs = self.coeffs.iter().map(|c| c.get()).collect::<Result<Vec<T>>>()?;
        Ok(Series1D {
            domain,
            coeffs,
            tail_bound: self.tail_bound,
        })
    }
}
