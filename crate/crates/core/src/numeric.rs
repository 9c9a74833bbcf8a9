//! Small numeric helpers shared by every module.
//!
//! All floating-point constants live here. `EULER_GAMMA` and `PI` carry
//! 20 significant digits in source and round to the nearest `f64`
//! (≈ 16 significant digits), which is the precision every main term
//! in [`crate::error_terms`] is computed at.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::FromPrimitive;

use crate::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

pub const PI: f64 = core::f64::consts::PI;

pub const TAU: f64 = core::f64::consts::TAU;

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(t: f64) -> f64 {
    let f = t - libm::floor(t);
    // t = -1e-20 gives 1.0 after rounding
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `‖t‖`, the distance from `t` to the nearest integer.
#[inline]
pub fn dist_to_int(t: f64) -> f64 {
    let f = frac(t);
    f.min(1.0 - f)
}

/// `e(t) = exp(2πit)`, with the argument reduced modulo 1 first.
#[inline]
pub fn e(t: f64) -> Complex64 {
    let (s, c) = libm::sincos(TAU * frac(t));
    Complex64::new(c, s)
}

/// Nearest integer, ties to even.
#[inline]
pub fn round_half_even(x: f64) -> f64 {
    libm::rint(x)
}

/// `gcd` on unsigned magnitudes; `gcd(0, 0) = 0`.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Result of a bisection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub root: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: u32,
}

/// Plain bisection for a sign change of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol` or after `max_iter` halvings.
pub fn bisect<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: u32,
) -> Result<Bisection> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(Bisection { root: lo, lo, hi: lo, iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Bisection { root: hi, lo: hi, hi, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Bracket { lo, hi });
    }
    let mut iterations = 0;
    while iterations < max_iter && (hi - lo) > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        iterations += 1;
        if f_mid == 0.0 {
            return Ok(Bisection { root: mid, lo: mid, hi: mid, iterations });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Bisection { root: 0.5 * (lo + hi), lo, hi, iterations })
}

/// The exact rational value of a finite `f64`.
pub fn exact_rational(x: f64) -> Result<BigRational> {
    BigRational::from_f64(x).ok_or_else(|| Error::domain("exact_rational", "non-finite value"))
}

/// Small-integer rational constant.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn frac_and_distance() {
        assert_eq!(frac(1.75), 0.75);
        assert_eq!(frac(-0.25), 0.75);
        assert_eq!(frac(-1e-20), 0.0);
        assert_eq!(dist_to_int(0.5), 0.5);
        assert_eq!(dist_to_int(2.9), 1.0 - frac(2.9));
    }

    #[test]
    fn e_is_periodic() {
        let a = e(0.25);
        assert!((a.re).abs() < 1e-15 && (a.im - 1.0).abs() < 1e-15);
        let b = e(1e6 + 0.25);
        assert!((b - a).norm() < 1e-9);
    }

    #[test]
    fn ties_go_to_even() {
        assert_eq!(round_half_even(14.5), 14.0);
        assert_eq!(round_half_even(15.5), 16.0);
        assert_eq!(round_half_even(14.49), 14.0);
    }

    #[test]
    fn bisection_needs_sign_change() {
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100), Err(Error::Bracket { .. })));
        let b = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((b.root - core::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn exact_rational_is_exact() {
        let r = exact_rational(0.375).unwrap();
        assert_eq!(r, rat(3, 8));
        let third = exact_rational(1.0 / 3.0).unwrap();
        assert!(!(third.clone() - rat(1, 3)).is_zero());
        assert!(exact_rational(f64::NAN).is_err());
    }
}
