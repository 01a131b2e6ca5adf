pub mod linalg;
pub mod roots;
pub mod scalar;
pub mod series;

pub use roots::{invert_branch, newton1, newton1_d, newton_root, winding_number, zero_count};
pub use scalar::{mp_precision, set_mp_precision, PrecisionScope, CMp, Mp, Scalar};
pub use series::{DiskDomain, EvenMap, Series1D};
