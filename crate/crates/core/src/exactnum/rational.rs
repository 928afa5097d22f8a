use rug::Complex;

use super::poly::Poly;
use super::roots::poly_roots;
use super::{abs_f64, recip, sub};
use crate::error::{Error, Result};

/// Quotient of two polynomials. The denominator is kept monic.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFn {
    pub numerator: Poly,
    pub denominator: Poly,
}

impl RationalFn {
    pub fn new(numerator: Poly, denominator: Poly) -> Result<Self> {
        if numerator.prec() != denominator.prec() {
            return Err(Error::PrecisionMismatch(numerator.prec(), denominator.prec()));
        }
        let lead = denominator
            .lead()
            .ok_or_else(|| Error::MalformedRational("zero denominator".into()))?;
        let inv = recip(lead);
        Ok(RationalFn {
            numerator: numerator.scale(&inv),
            denominator: denominator.scale(&inv),
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        let prec = p.prec();
        RationalFn {
            numerator: p,
            denominator: Poly::one(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.numerator.prec()
    }

    pub fn eval(&self, x: &Complex) -> Complex {
        let n = self.numerator.eval(x);
        let d = self.denominator.eval(x);
        Complex::with_val(self.prec(), n / d)
    }

    pub fn add(&self, other: &RationalFn) -> Result<RationalFn> {
        let n = &(&self.numerator * &other.denominator) + &(&other.numerator * &self.denominator);
        RationalFn::new(n, &self.denominator * &other.denominator)
    }

    pub fn mul(&self, other: &RationalFn) -> Result<RationalFn> {
        RationalFn::new(
            &self.numerator * &other.numerator,
            &self.denominator * &other.denominator,
        )
    }

    pub fn derivative(&self) -> Result<RationalFn> {
        let n = &(&self.numerator.derivative() * &self.denominator)
            - &(&self.numerator * &self.denominator.derivative());
        RationalFn::new(n, &self.denominator * &self.denominator)
    }
}

/// Cancel common roots of numerator and denominator (within `tol`) and make
/// the denominator monic.
pub fn rational_reduce(f: &RationalFn, tol: f64) -> Result<RationalFn> {
    let prec = f.prec();
    let mut num = f.numerator.clone();
    let mut den = f.denominator.clone();
    if num.is_zero() {
        return RationalFn::new(num, Poly::one(prec));
    }
    if den.degree().unwrap_or(0) == 0 {
        return RationalFn::new(num, den);
    }
    let roots = poly_roots(&den, tol)?;
    for r in roots {
        for _ in 0..r.multiplicity {
            if num.degree().unwrap_or(0) == 0 {
                break;
            }
            let v = num.eval(&r.value);
            let scale = num.eval_abs_scale(&r.value).max(f64::MIN_POSITIVE);
            if abs_f64(&v) > tol * scale {
                break;
            }
            num = num.deflate(&r.value);
            den = den.deflate(&r.value);
        }
    }
    RationalFn::new(num, den)
}

/// Residual `|f(x) - g(x)|` at a sample point, used by tests that compare
/// two rational representations.
pub fn rational_distance(f: &RationalFn, g: &RationalFn, x: &Complex) -> f64 {
    abs_f64(&sub(&f.eval(x), &g.eval(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{cint, cplx, czero};

    const P: u32 = 256;

    #[test]
    fn cancels_linear_factor() {
        let f = RationalFn::new(Poly::from_i64(P, &[-1, 0, 1]), Poly::from_i64(P, &[-1, 1])).unwrap();
        let g = rational_reduce(&f, 1e-30).unwrap();
        assert!(g.denominator.sub_poly(&Poly::one(P)).max_abs() < 1e-60);
        assert!(g.numerator.sub_poly(&Poly::from_i64(P, &[1, 1])).max_abs() < 1e-60);
    }

    #[test]
    fn polynomial_is_fixed() {
        let p = Poly::from_i64(P, &[3, 0, -2, 5]);
        let g = rational_reduce(&RationalFn::from_poly(p.clone()), 1e-30).unwrap();
        assert_eq!(g.numerator, p);
        assert_eq!(g.denominator, Poly::one(P));
    }

    #[test]
    fn sqrt2_quotient_matches_division_oracle() {
        let s = Complex::with_val(P, 2).sqrt();
        let num = Poly::from_i64(P, &[-1, 0, 0, 0, 2]);
        let den = Poly::from_coeffs(P, vec![cint(P, 1), czero(P), s.clone()]);
        let (q, r) = num.div_rem(&den).unwrap();
        assert!(r.max_abs() < 1e-60);
        let f = RationalFn::new(num, den).unwrap();
        let g = rational_reduce(&f, 1e-30).unwrap();
        assert_eq!(g.denominator.degree(), Some(0));
        assert!(g.numerator.sub_poly(&q).max_abs() < 1e-50);
        let expected = Poly::from_coeffs(P, vec![cint(P, -1), czero(P), s]);
        assert!(g.numerator.sub_poly(&expected).max_abs() < 1e-50);
    }

    #[test]
    fn keeps_genuine_poles() {
        let f = RationalFn::new(Poly::from_i64(P, &[1, 0, 1]), Poly::from_i64(P, &[0, 0, 1])).unwrap();
        let g = rational_reduce(&f, 1e-30).unwrap();
        assert_eq!(g.denominator.degree(), Some(2));
        let x = cplx(P, 0.4, 0.9);
        assert!(rational_distance(&f, &g, &x) < 1e-60);
    }

    #[test]
    fn zero_denominator_is_malformed() {
        assert!(matches!(
            RationalFn::new(Poly::one(P), Poly::zero(P)),
            Err(Error::MalformedRational(_))
        ));
    }
}
