//! Scalar backends shared by every numerical module.
//!
//! Two families of scalars are supported behind one trait:
//!
//! * floating point (`f64`, `Complex64`) for asymptotic experiments, and
//! * exact rationals (`BigRational`) for identity and invertibility checks
//!   on matrices whose entries span factorial scales, where a small float
//!   determinant proves nothing.
//!
//! All series and power computations in this crate build terms
//! incrementally (`term *= z / k`) so no factorial is ever materialized
//! as a scalar.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field scalar used by the dense/sparse linear algebra in this crate.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + 'static
{
    /// Embeds a small integer into the field.
    fn from_int(v: i64) -> Self;

    /// Complex conjugate; identity on real fields.
    fn conj(&self) -> Self;

    /// `|x|` as an `f64` estimate. Exact for floats, approximate for
    /// rationals (only used for pivoting heuristics and reporting).
    fn magnitude(&self) -> f64;

    /// Absolute value inside the field. For complex scalars this is the
    /// modulus re-embedded as a real element.
    fn abs(&self) -> Self;

    /// Compares `|self|` with `|other|`. Exact for rationals, which is what
    /// makes exact-mode pivoting and minima trustworthy.
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.magnitude()
            .partial_cmp(&other.magnitude())
            .unwrap_or(Ordering::Equal)
    }

    /// True when the backend carries out arithmetic exactly.
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }
    fn conj(&self) -> Self {
        *self
    }
    fn magnitude(&self) -> f64 {
        f64::abs(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for Complex64 {
    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn abs(&self) -> Self {
        Complex64::new(self.norm(), 0.0)
    }
}

impl Scalar for BigRational {
    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().unwrap_or_else(|| {
            // Fallback for ratios whose parts overflow f64 individually.
            let digits =
                self.numer().to_string().len() as f64 - self.denom().to_string().len() as f64;
            10f64.powf(digits)
        })
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn abs_cmp(&self, other: &Self) -> Ordering {
        Signed::abs(self).cmp(&Signed::abs(other))
    }
    fn is_exact() -> bool {
        true
    }
}

/// Convenience constructor for exact rationals.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// `max_j |v_j|` — the norm used on coefficient vectors throughout.
pub fn norm_inf<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(Scalar::magnitude).fold(0.0, f64::max)
}

/// `sum_j |v_j|`.
pub fn norm_l1<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(Scalar::magnitude).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_abs_cmp_is_exact() {
        let a = ratio(1, 3);
        let b = ratio(-2, 6);
        assert_eq!(a.abs_cmp(&b), Ordering::Equal);
        assert_eq!(ratio(-5, 7).abs_cmp(&ratio(2, 3)), Ordering::Greater);
    }

    #[test]
    fn complex_abs_is_modulus() {
        let z = Complex64::new(3.0, 4.0);
        assert_eq!(Scalar::abs(&z), Complex64::new(5.0, 0.0));
        assert_eq!(z.magnitude(), 5.0);
    }

    #[test]
    fn norms() {
        let v = vec![1.0f64, -3.5, 2.0];
        assert_eq!(norm_inf(&v), 3.5);
        assert_eq!(norm_l1(&v), 6.5);
    }
}
