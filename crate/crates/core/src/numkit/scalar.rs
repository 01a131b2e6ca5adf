use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::cell::Cell;

use num_complex::{Complex, Complex64};
use num_traits::{Num, One, Zero};
use rug::float::Constant;
use rug::Float;

thread_local! {
    static MP_BITS: Cell<u32> = const { Cell::new(200) };
}

/// Sets the working precision (per thread) used for every newly created [`Mp`] value.
pub fn set_mp_precision(bits: u32) {
    MP_BITS.with(|b| b.set(bits.max(54)));
}

pub fn mp_precision() -> u32 {
    MP_BITS.with(|b| b.get())
}

/// Sets the working precision until dropped, then restores the previous one.
pub struct PrecisionScope(u32);

impl PrecisionScope {
    pub fn new(bits: u32) -> Self {
        let old = mp_precision();
        set_mp_precision(bits);
        PrecisionScope(old)
    }
}

impl Drop for PrecisionScope {
    fn drop(&mut self) {
        set_mp_precision(self.0);
    }
}

/// MPFR float at the thread working precision.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Mp(pub Float);

impl Mp {
    pub fn from_f64(x: f64) -> Mp {
        Mp(Float::with_val(mp_precision(), x))
    }
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    pub fn sqrt(&self) -> Mp {
        Mp(self.0.clone().sqrt())
    }
}

macro_rules! mp_binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr for Mp {
            type Output = Mp;
            fn $f(self, rhs: Mp) -> Mp {
                Mp(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a Mp> for Mp {
            type Output = Mp;
            fn $f(self, rhs: &'a Mp) -> Mp {
                Mp(self.0 $op &rhs.0)
            }
        }
    };
}
mp_binop!(Add, add, +);
mp_binop!(Sub, sub, -);
mp_binop!(Mul, mul, *);
mp_binop!(Div, div, /);
mp_binop!(Rem, rem, %);

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Zero for Mp {
    fn zero() -> Mp {
        Mp(Float::new(mp_precision()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Mp {
    fn one() -> Mp {
        Mp(Float::with_val(mp_precision(), 1))
    }
}

impl Num for Mp {
    type FromStrRadixErr = rug::float::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Mp, Self::FromStrRadixErr> {
        let p = Float::parse_radix(s, radix as i32)?;
        Ok(Mp(Float::with_val(mp_precision(), p)))
    }
}

pub type CMp = Complex<Mp>;

/// Complex scalar used throughout the laboratory.
///
/// Implemented for `Complex64` (53-bit) and `Complex<Mp>` (global MPFR precision).
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn bits() -> u32;
    fn from_c64(z: Complex64) -> Self;
    fn to_c64(&self) -> Complex64;
    fn abs(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn conj(&self) -> Self;
    fn scale(&self, s: f64) -> Self;
    /// `exp(2 pi i t)` for the golden rotation number at working precision.
    fn golden_mu() -> Self;
    /// `exp(2 pi i j / m)` at working precision.
    fn cis(j: i64, m: i64) -> Self;
    fn to_dec(&self) -> (String, String);
    fn from_dec(re: &str, im: &str) -> Option<Self>;

    fn from_f64(x: f64) -> Self {
        Self::from_c64(Complex64::new(x, 0.0))
    }
    fn c(re: f64, im: f64) -> Self {
        Self::from_c64(Complex64::new(re, im))
    }
    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
    fn eps() -> f64 {
        (2.0f64).powi(-(Self::bits() as i32))
    }
    /// Step for central differences, balanced against rounding at this precision.
    fn fd_step() -> f64 {
        Self::eps().powf(1.0 / 3.0)
    }
    fn is_finite(&self) -> bool {
        let z = self.to_c64();
        z.re.is_finite() && z.im.is_finite()
    }
    fn sq(&self) -> Self {
        self.clone() * self.clone()
    }
    fn powu(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.sq();
            n >>= 1;
        }
        acc
    }
    fn re(&self) -> f64 {
        self.to_c64().re
    }
    fn im(&self) -> f64 {
        self.to_c64().im
    }
}

fn c64_dec(x: f64) -> String {
    format!("{:.17e}", x)
}

impl Scalar for Complex64 {
    fn bits() -> u32 {
        53
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn abs(&self) -> f64 {
        self.norm()
    }
    fn sqrt(&self) -> Self {
        Complex64::sqrt(*self)
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn golden_mu() -> Self {
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * theta)
    }
    fn cis(j: i64, m: i64) -> Self {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j as f64) / (m as f64))
    }
    fn to_dec(&self) -> (String, String) {
        (c64_dec(self.re), c64_dec(self.im))
    }
    fn from_dec(re: &str, im: &str) -> Option<Self> {
        Some(Complex64::new(re.parse().ok()?, im.parse().ok()?))
    }
}

fn mp_dec(x: &Mp) -> String {
    let digits = (mp_precision() as f64 / 3.32).ceil() as usize + 2;
    x.0.to_string_radix(10, Some(digits))
}

impl Scalar for CMp {
    fn bits() -> u32 {
        mp_precision()
    }
    fn from_c64(z: Complex64) -> Self {
        Complex::new(Mp::from_f64(z.re), Mp::from_f64(z.im))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    fn abs(&self) -> f64 {
        let h = Float::with_val(mp_precision(), self.re.0.hypot_ref(&self.im.0));
        h.to_f64()
    }
    fn sqrt(&self) -> Self {
        let p = mp_precision();
        let r = Float::with_val(p, self.re.0.hypot_ref(&self.im.0));
        if r.is_zero() {
            return <Self as Scalar>::zero();
        }
        let x = &self.re.0;
        let u = (Float::with_val(p, &r + x) / 2u32).sqrt();
        let v = (Float::with_val(p, &r - x) / 2u32).sqrt();
        if self.im.0.is_sign_negative() {
            Complex::new(Mp(u), Mp(-v))
        } else {
            Complex::new(Mp(u), Mp(v))
        }
    }
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn scale(&self, s: f64) -> Self {
        let f = Mp::from_f64(s);
        Complex::new(self.re.clone() * &f, self.im.clone() * &f)
    }
    fn golden_mu() -> Self {
        let p = mp_precision();
        let five = Float::with_val(p, 5);
        let theta = (five.sqrt() - 1u32) / 2u32;
        let pi = Float::with_val(p, Constant::Pi);
        let ang = theta * pi * 2u32;
        let (s, c) = ang.sin_cos(Float::new(p));
        Complex::new(Mp(c), Mp(s))
    }
    fn cis(j: i64, m: i64) -> Self {
        let p = mp_precision();
        let pi = Float::with_val(p, Constant::Pi);
        let ang = pi * 2u32 * Float::with_val(p, j) / Float::with_val(p, m);
        let (s, c) = ang.sin_cos(Float::new(p));
        Complex::new(Mp(c), Mp(s))
    }
    fn to_dec(&self) -> (String, String) {
        (mp_dec(&self.re), mp_dec(&self.im))
    }
    fn from_dec(re: &str, im: &str) -> Option<Self> {
        let p = mp_precision();
        let r = Float::parse(re).ok()?;
        let i = Float::parse(im).ok()?;
        Some(Complex::new(Mp(Float::with_val(p, r)), Mp(Float::with_val(p, i))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_sqrt_branch() {
        set_mp_precision(128);
        let z = CMp::c(-3.0, -4.0);
        let s = Scalar::sqrt(&z);
        assert!((s.to_c64() - Complex64::new(1.0, -2.0)).norm() < 1e-15);
        let back = s.clone() * s;
        assert!((back - z).abs() < 1e-35);
    }

    #[test]
    fn golden_mu_is_unimodular() {
        set_mp_precision(200);
        let m = CMp::golden_mu();
        let one = m.clone() * Scalar::conj(&m);
        assert!((one - <CMp as Scalar>::one()).abs() < 1e-55);
        assert!((m.to_c64() - Complex64::golden_mu()).norm() < 1e-15);
    }

    #[test]
    fn decimal_round_trip() {
        set_mp_precision(200);
        let z = CMp::golden_mu();
        let (a, b) = z.to_dec();
        let w = CMp::from_dec(&a, &b).unwrap();
        assert!((w - z).abs() < 1e-58);
    }
}
