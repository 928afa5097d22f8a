use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::exactnum::{abs_f64, cint, czero, sub, Poly, RationalFn};

/// Sign of the exponent in `exp(eps * x^4 / 4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExpSign {
    Minus,
    Plus,
}

impl ExpSign {
    pub fn value(self) -> i64 {
        match self {
            ExpSign::Minus => -1,
            ExpSign::Plus => 1,
        }
    }

    pub fn from_i64(e: i64) -> Option<Self> {
        match e {
            -1 => Some(ExpSign::Minus),
            1 => Some(ExpSign::Plus),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            ExpSign::Minus => ExpSign::Plus,
            ExpSign::Plus => ExpSign::Minus,
        }
    }
}

/// `psi = x^mu * poly_factor * prod(x - y_j) / prod(x - x_i) * exp(eps x^4/4)`.
///
/// Zeros and poles are simple; repeated entries are rejected by
/// [`QuasiRationalFunction::validate`].
#[derive(Clone, Debug)]
pub struct QuasiRationalFunction {
    pub mu: Float,
    pub eps: ExpSign,
    pub zeros: Vec<Complex>,
    pub poles: Vec<Complex>,
    pub poly_factor: Option<Poly>,
    pub time_phase: Option<Complex>,
}

impl QuasiRationalFunction {
    pub fn new(mu: Float, eps: ExpSign, zeros: Vec<Complex>, poles: Vec<Complex>) -> Self {
        QuasiRationalFunction {
            mu,
            eps,
            zeros,
            poles,
            poly_factor: None,
            time_phase: None,
        }
    }

    pub fn from_poly(mu: Float, eps: ExpSign, p: Poly) -> Self {
        QuasiRationalFunction {
            mu,
            eps,
            zeros: Vec::new(),
            poles: Vec::new(),
            poly_factor: Some(p),
            time_phase: None,
        }
    }

    pub fn prec(&self) -> u32 {
        self.mu.prec()
    }

    /// Polynomial numerator `poly_factor * prod(x - y_j)`.
    pub fn numerator(&self) -> Poly {
        let prec = self.prec();
        let base = self.poly_factor.clone().unwrap_or_else(|| Poly::one(prec));
        &base * &Poly::from_roots(prec, &self.zeros)
    }

    pub fn denominator(&self) -> Poly {
        Poly::from_roots(self.prec(), &self.poles)
    }

    /// The rational factor `R` of `psi = x^mu R exp(eps x^4/4)`.
    pub fn rational_part(&self) -> Result<RationalFn> {
        RationalFn::new(self.numerator(), self.denominator())
    }

    /// `Q'(x) = eps x^3 + mu/x` as a rational function.
    pub fn exponent_derivative(&self) -> RationalFn {
        let prec = self.prec();
        let num = Poly::from_coeffs(
            prec,
            vec![
                Complex::with_val(prec, &self.mu),
                czero(prec),
                czero(prec),
                czero(prec),
                cint(prec, self.eps.value()),
            ],
        );
        RationalFn::new(num, Poly::x(prec)).expect("x is a valid denominator")
    }

    /// Logarithmic derivative `psi'/psi`.
    pub fn log_derivative(&self) -> Result<RationalFn> {
        let r = self.rational_part()?;
        let rp = r.derivative()?;
        let ratio = RationalFn::new(
            &rp.numerator * &r.denominator,
            &rp.denominator * &r.numerator,
        )?;
        ratio.add(&self.exponent_derivative())
    }

    /// Reject repeated zeros or poles and coincident zero/pole pairs.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for (i, a) in self.poles.iter().enumerate() {
            for b in &self.poles[i + 1..] {
                if abs_f64(&sub(a, b)) <= tol {
                    return Err(Error::InvalidArgument(format!("repeated pole near {a}")));
                }
            }
            for y in &self.zeros {
                if abs_f64(&sub(a, y)) <= tol {
                    return Err(Error::CoincidentZeroPole(format!("{a}")));
                }
            }
        }
        for (i, a) in self.zeros.iter().enumerate() {
            for b in &self.zeros[i + 1..] {
                if abs_f64(&sub(a, b)) <= tol {
                    return Err(Error::InvalidArgument(format!("repeated zero near {a}")));
                }
            }
        }
        Ok(())
    }

    /// Value at `x` ignoring the time phase; `x^mu` uses the principal branch.
    pub fn eval(&self, x: &Complex) -> Result<Complex> {
        let prec = self.prec();
        let r = self.rational_part()?.eval(x);
        let xmu = Complex::with_val(prec, x.clone().pow(&self.mu));
        let x4 = Complex::with_val(prec, x.clone().pow(4u32)) * Float::with_val(prec, self.eps.value());
        let e = Complex::with_val(prec, x4 / 4u32).exp();
        Ok(Complex::with_val(prec, r * xmu * e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::cplx;

    const P: u32 = 256;

    #[test]
    fn log_derivative_of_gaussian_quartic() {
        let psi = QuasiRationalFunction::new(Float::with_val(P, 0), ExpSign::Minus, vec![], vec![]);
        let f = psi.log_derivative().unwrap();
        let x = cplx(P, 0.3, 0.2);
        let expected = Complex::with_val(P, -x.clone().square() * &x);
        assert!(abs_f64(&sub(&f.eval(&x), &expected)) < 1e-60);
    }

    #[test]
    fn log_derivative_matches_finite_difference() {
        let psi = QuasiRationalFunction::new(
            Float::with_val(P, 1),
            ExpSign::Plus,
            vec![cplx(P, 0.5, 0.1)],
            vec![cplx(P, -0.3, 0.7)],
        );
        let x = cplx(P, 0.8, -0.4);
        let h = cplx(P, 1e-20, 0.0);
        let xp = Complex::with_val(P, &x + &h);
        let xm = Complex::with_val(P, &x - &h);
        let fd = Complex::with_val(P, psi.eval(&xp).unwrap() - psi.eval(&xm).unwrap()) / cplx(P, 2e-20, 0.0);
        let val = psi.eval(&x).unwrap();
        let ld = Complex::with_val(P, fd / val);
        let f = psi.log_derivative().unwrap().eval(&x);
        assert!(abs_f64(&sub(&ld, &f)) < 1e-30);
    }

    #[test]
    fn coincident_zero_and_pole_rejected() {
        let a = cplx(P, 1.0, 0.0);
        let psi = QuasiRationalFunction::new(Float::with_val(P, 0), ExpSign::Minus, vec![a.clone()], vec![a]);
        assert!(matches!(psi.validate(1e-30), Err(Error::CoincidentZeroPole(_))));
    }
}
