pub mod acceptance;
pub mod artifact;
pub mod error;
pub mod henon;
pub mod manifolds;
pub mod renorm1d;
pub mod renorm2d;
pub mod scaling;
pub mod tangency;
pub mod numkit;

pub use error::{LabError, Result};
pub use num_complex::Complex64;
pub use numkit::{mp_precision, set_mp_precision, PrecisionScope, CMp, DiskDomain, Mp, Scalar, Series1D};
