use rug::Complex;

use super::rational::RationalFn;
use super::{czero, default_tol};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct LaurentSeries {
    /// Order of the pole at the centre (negative for a zero, 0 at a regular
    /// non-vanishing point).
    pub pole_order: i64,
    /// Order of the first entry of `coeffs`.
    pub lowest_order: i64,
    pub coeffs: Vec<Complex>,
}

impl LaurentSeries {
    /// Coefficient of `(x - centre)^k`; zero outside the computed window.
    pub fn coeff(&self, k: i64) -> Complex {
        let prec = self.coeffs.first().map(|c| c.prec().0).unwrap_or(53);
        let idx = k - self.lowest_order;
        if idx < 0 {
            return czero(prec);
        }
        self.coeffs
            .get(idx as usize)
            .cloned()
            .unwrap_or_else(|| czero(prec))
    }
}

/// Coefficients `c_lo .. c_(lo + n_terms - 1)` of the Laurent series of `f`
/// about `center`, with the default relative tolerance for order detection.
pub fn laurent_expand(
    f: &RationalFn,
    center: &Complex,
    lowest_order: i64,
    n_terms: usize,
) -> Result<LaurentSeries> {
    laurent_expand_tol(f, center, lowest_order, n_terms, default_tol(f.prec()))
}

/// As [`laurent_expand`]; vanishing orders of the shifted numerator and
/// denominator are the counts of leading coefficients below `rel_tol` times
/// their largest coefficient.
pub fn laurent_expand_tol(
    f: &RationalFn,
    center: &Complex,
    lowest_order: i64,
    n_terms: usize,
    rel_tol: f64,
) -> Result<LaurentSeries> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument("n_terms must be >= 1".into()));
    }
    let prec = f.prec();
    let c = Complex::with_val(prec, center);
    let num = f.numerator.taylor_shift(&c);
    let den = f.denominator.taylor_shift(&c);
    if den.is_zero() || den.low_order_zeros(rel_tol) >= den.coeffs().len() {
        return Err(Error::MalformedRational("denominator vanishes identically".into()));
    }
    let ord_d = den.low_order_zeros(rel_tol);
    let num_zero = num.is_zero() || num.low_order_zeros(rel_tol) >= num.coeffs().len();
    if num_zero {
        return Ok(LaurentSeries {
            pole_order: i64::MIN,
            lowest_order,
            coeffs: vec![czero(prec); n_terms],
        });
    }
    let ord_n = num.low_order_zeros(rel_tol);
    let lead_order = ord_n as i64 - ord_d as i64;
    let n = num.shift_down(ord_n);
    let d = den.shift_down(ord_d);

    let highest = lowest_order + n_terms as i64 - 1;
    let needed = if highest >= lead_order {
        (highest - lead_order + 1) as usize
    } else {
        0
    };
    let d0 = d.coeff(0);
    let mut b: Vec<Complex> = Vec::with_capacity(needed);
    for k in 0..needed {
        let mut acc = n.coeff(k);
        for j in 1..=k.min(d.coeffs().len().saturating_sub(1)) {
            let t = Complex::with_val(prec, &d.coeffs()[j] * &b[k - j]);
            acc -= t;
        }
        b.push(Complex::with_val(prec, acc / &d0));
    }
    let coeffs = (0..n_terms)
        .map(|i| {
            let k = lowest_order + i as i64 - lead_order;
            if k < 0 {
                czero(prec)
            } else {
                b[k as usize].clone()
            }
        })
        .collect();
    Ok(LaurentSeries {
        pole_order: -lead_order,
        lowest_order,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{abs_f64, cint, sub, Poly};

    const P: u32 = 256;

    #[test]
    fn double_pole_plus_quadratic() {
        // 2/(x-1)^2 + x^2 = (x^4 - 2x^3 + x^2 + 2)/(x-1)^2
        let f = RationalFn::new(
            Poly::from_i64(P, &[2, 0, 1, -2, 1]),
            Poly::from_i64(P, &[1, -2, 1]),
        )
        .unwrap();
        let s = laurent_expand(&f, &cint(P, 1), -2, 5).unwrap();
        assert_eq!(s.pole_order, 2);
        let expected = [2, 0, 1, 2, 1];
        for (c, e) in s.coeffs.iter().zip(expected) {
            assert!(abs_f64(&sub(c, &cint(P, e))) < 1e-70);
        }
    }

    #[test]
    fn simple_pole_at_origin() {
        let f = RationalFn::new(Poly::one(P), Poly::from_i64(P, &[0, 1])).unwrap();
        let s = laurent_expand(&f, &cint(P, 0), -1, 4).unwrap();
        assert_eq!(s.pole_order, 1);
        assert_eq!(s.coeffs[0], 1);
        assert!(s.coeffs[1..].iter().all(|c| c.is_zero()));
    }

    #[test]
    fn value_at_regular_point() {
        let s2 = Complex::with_val(P, 2).sqrt();
        let num = Poly::from_coeffs(
            P,
            vec![Complex::with_val(P, -4 * s2.clone()), czero(P), cint(P, 8)],
        );
        let base = Poly::from_coeffs(P, vec![cint(P, 1), czero(P), s2.clone()]);
        let f = RationalFn::new(num.clone(), &base * &base).unwrap();
        let s = laurent_expand(&f, &cint(P, 0), 0, 1).unwrap();
        assert_eq!(s.pole_order, 0);
        // oracle: numerator(0) / denominator(0)
        let oracle = Complex::with_val(P, num.eval(&czero(P)) / (&base * &base).eval(&czero(P)));
        assert!(abs_f64(&sub(&s.coeffs[0], &oracle)) < 1e-70);
        assert!(abs_f64(&sub(&s.coeffs[0], &Complex::with_val(P, -4 * s2))) < 1e-70);
    }

    #[test]
    fn common_factor_is_reducible() {
        // x(x+1)/(x^2) = (x+1)/x
        let f = RationalFn::new(Poly::from_i64(P, &[0, 1, 1]), Poly::from_i64(P, &[0, 0, 1])).unwrap();
        let s = laurent_expand(&f, &cint(P, 0), -1, 3).unwrap();
        assert_eq!(s.pole_order, 1);
        assert_eq!(s.coeffs[0], 1);
        assert_eq!(s.coeffs[1], 1);
        assert!(s.coeffs[2].is_zero());
    }
}
