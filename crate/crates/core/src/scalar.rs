//! Scalar types the coefficient table can be built in.
//!
//! Everything numerical downstream of the table runs in `Complex64`. The
//! diagonal-to-table reconstruction is badly conditioned for the smallest
//! entries, so the table routines are generic and can also run in a wide
//! binary float when entrywise agreement matters.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use num_complex::Complex64;

pub trait TableScalar:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_c64(z: Complex64) -> Self;
    fn from_int(k: i64) -> Self;
    fn to_c64(&self) -> Complex64;
    fn is_zero(&self) -> bool;
    /// `|self - reference| / |reference|`, or `|self|` when the reference is zero.
    fn relative_gap(&self, reference: &Self) -> f64;
}

impl TableScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn from_c64(z: Complex64) -> Self {
        z
    }

    fn from_int(k: i64) -> Self {
        Complex64::new(k as f64, 0.0)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn relative_gap(&self, reference: &Self) -> f64 {
        let diff = (self - reference).norm();
        let scale = reference.norm();
        if scale == 0.0 {
            self.norm()
        } else {
            diff / scale
        }
    }
}

type Big = FBig<HalfEven, 2>;

/// Complex number with `BITS` bits of binary mantissa in each component.
#[derive(Clone, Debug)]
pub struct WideComplex<const BITS: usize> {
    re: Big,
    im: Big,
}

/// 512-bit mantissas (about 154 decimal digits).
pub type Wide512 = WideComplex<512>;

impl<const BITS: usize> WideComplex<BITS> {
    fn real(x: f64) -> Big {
        Big::try_from(x)
            .expect("finite f64")
            .with_precision(BITS)
            .value()
    }

    fn norm_sqr(&self) -> Big {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl<const BITS: usize> Add for WideComplex<BITS> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        WideComplex {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<const BITS: usize> Sub for WideComplex<BITS> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        WideComplex {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl<const BITS: usize> Mul for WideComplex<BITS> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        WideComplex {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl<const BITS: usize> Div for WideComplex<BITS> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let denom = rhs.norm_sqr();
        WideComplex {
            re: (&self.re * &rhs.re + &self.im * &rhs.im) / &denom,
            im: (&self.im * &rhs.re - &self.re * &rhs.im) / &denom,
        }
    }
}

impl<const BITS: usize> Neg for WideComplex<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        WideComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl<const BITS: usize> TableScalar for WideComplex<BITS> {
    fn zero() -> Self {
        Self::from_c64(Complex64::new(0.0, 0.0))
    }

    fn from_c64(z: Complex64) -> Self {
        WideComplex {
            re: Self::real(z.re),
            im: Self::real(z.im),
        }
    }

    fn from_int(k: i64) -> Self {
        WideComplex {
            re: Big::from(k).with_precision(BITS).value(),
            im: Self::real(0.0),
        }
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().value(), self.im.to_f64().value())
    }

    fn is_zero(&self) -> bool {
        self.re == Big::ZERO && self.im == Big::ZERO
    }

    fn relative_gap(&self, reference: &Self) -> f64 {
        let diff = self.clone() - reference.clone();
        if reference.is_zero() {
            return diff.norm_sqr().to_f64().value().sqrt();
        }
        let ratio = diff.norm_sqr() / reference.norm_sqr();
        ratio.to_f64().value().sqrt()
    }
}
