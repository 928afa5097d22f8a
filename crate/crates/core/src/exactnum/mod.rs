//! Coefficient arithmetic and the univariate polynomial / rational-function
//! engine.
//!
//! All coefficients are arbitrary-precision binary floating complex numbers
//! (`rug::Complex`). Every value carries its own precision; binary operations
//! between polynomials check that both operands share it. Comparisons against
//! zero always take an explicit tolerance.

mod laurent;
mod poly;
mod rational;
mod roots;

pub use laurent::{laurent_expand, laurent_expand_tol, LaurentSeries};
pub use poly::{poly_arith, poly_derivative, Poly, PolyOp};
pub use rational::{rational_distance, rational_reduce, RationalFn};
pub use roots::{poly_roots, poly_roots_with, Root, RootOptions};

use rug::ops::Pow;
use rug::{Complex, Float};

/// Arbitrary-precision complex scalar.
pub type BigComplex = Complex;
/// Arbitrary-precision real scalar.
pub type BigFloat = Float;

pub const DEFAULT_PRECISION: u32 = 256;

/// Default zero tolerance `2^(-precision_bits/2)`.
pub fn default_tol(prec: u32) -> f64 {
    2f64.powi(-((prec / 2) as i32))
}

pub fn cplx(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

pub fn czero(prec: u32) -> Complex {
    Complex::new(prec)
}

pub fn cone(prec: u32) -> Complex {
    Complex::with_val(prec, 1)
}

pub fn cint(prec: u32, n: i64) -> Complex {
    Complex::with_val(prec, n)
}

pub fn real(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

/// Promote a real to a complex with the real's precision.
pub fn to_complex(x: &Float) -> Complex {
    Complex::with_val(x.prec(), x)
}

/// Modulus as an `f64` (underflows to 0 for magnitudes below ~1e-308).
pub fn abs_f64(z: &Complex) -> f64 {
    let a = Float::with_val(z.prec().0, z.abs_ref());
    a.to_f64()
}

pub fn is_zero_tol(z: &Complex, tol: f64) -> bool {
    abs_f64(z) <= tol
}

/// `a - b` as a fresh value at the precision of `a`.
pub fn sub(a: &Complex, b: &Complex) -> Complex {
    Complex::with_val(a.prec().0, a - b)
}

pub fn add(a: &Complex, b: &Complex) -> Complex {
    Complex::with_val(a.prec().0, a + b)
}

pub fn mul(a: &Complex, b: &Complex) -> Complex {
    Complex::with_val(a.prec().0, a * b)
}

pub fn div(a: &Complex, b: &Complex) -> Complex {
    Complex::with_val(a.prec().0, a / b)
}

pub fn recip(a: &Complex) -> Complex {
    Complex::with_val(a.prec().0, a.recip_ref())
}

pub fn powi(a: &Complex, n: i32) -> Complex {
    Complex::with_val(a.prec().0, a.pow(n))
}

/// Real number nearest to `x` if it lies within `tol` of an integer.
pub fn as_integer(x: &Float, tol: f64) -> Option<i64> {
    let r = Float::with_val(x.prec(), x.round_ref());
    let d = Float::with_val(x.prec(), x - &r).abs().to_f64();
    if d <= tol {
        r.to_integer().and_then(|i| i.to_i64())
    } else {
        None
    }
}

/// Total order used for eigenvalue and root listings: ascending real part,
/// ties by ascending imaginary part.
pub fn cmp_complex(a: &Complex, b: &Complex) -> std::cmp::Ordering {
    cmp_complex_tol(a, b, 0.0)
}

/// As [`cmp_complex`], but real parts within `tol * max(1, |a|, |b|)` count
/// as tied.
pub fn cmp_complex_tol(a: &Complex, b: &Complex, tol: f64) -> std::cmp::Ordering {
    let scale = abs_f64(a).max(abs_f64(b)).max(1.0);
    let dre = Float::with_val(a.prec().0, a.real() - b.real()).to_f64();
    let real_order = if dre.abs() <= tol * scale {
        std::cmp::Ordering::Equal
    } else {
        a.real()
            .partial_cmp(b.real())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    real_order.then_with(|| {
            a.imag()
                .partial_cmp(b.imag())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
}

/// Decimal digits needed so that printing and re-parsing a value at
/// `prec` bits is lossless.
pub fn decimal_digits(prec: u32) -> usize {
    let spec = (prec as f64 * 0.302).ceil() as usize;
    let exact = (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
    spec.max(exact)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tol_is_half_precision() {
        assert_eq!(default_tol(256), 2f64.powi(-128));
        assert_eq!(default_tol(64), 2f64.powi(-32));
    }

    #[test]
    fn integer_detection_uses_explicit_tol() {
        let p = 256;
        assert_eq!(as_integer(&real(p, 2.0), 1e-30), Some(2));
        assert_eq!(as_integer(&real(p, 2.5), 1e-30), None);
        let near = Float::with_val(p, 3) + Float::with_val(p, 1e-40);
        assert_eq!(as_integer(&near, 1e-30), Some(3));
        assert_eq!(as_integer(&near, 1e-50), None);
    }

    #[test]
    fn integer_ring_ops_are_exact() {
        let p = 256;
        let a = cint(p, 123_456_789);
        let b = cint(p, -987_654_321);
        let prod = mul(&a, &b);
        assert_eq!(*prod.real(), -121_932_631_112_635_269i64);
        assert!(prod.imag().is_zero());
    }
}
