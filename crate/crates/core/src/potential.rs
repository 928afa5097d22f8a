use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::exactnum::{abs_f64, cint, czero, sub, Poly, RationalFn};

#[derive(Clone, Debug, PartialEq)]
pub struct Pole {
    pub location: Complex,
    /// `k` in the strength `k(k+1)/(x - location)^2`.
    pub mult: u32,
}

impl Pole {
    pub fn strength(&self) -> u64 {
        let k = self.mult as u64;
        k * (k + 1)
    }
}

/// `V(x) = poly_part(x) + l(l+1)/x^2 + sum k_i(k_i+1)/(x - x_i)^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalPotential {
    pub poly_part: Poly,
    pub ell: Float,
    pub poles: Vec<Pole>,
    pub symmetric: bool,
}

impl RationalPotential {
    /// `x^6 - nu x^2 + l(l+1)/x^2`.
    pub fn canonical(nu: &Float, ell: &Float) -> Self {
        let prec = nu.prec();
        let mut c = vec![czero(prec); 7];
        c[2] = Complex::with_val(prec, -nu);
        c[6] = cint(prec, 1);
        RationalPotential {
            poly_part: Poly::from_coeffs(prec, c),
            ell: Float::with_val(prec, ell),
            poles: Vec::new(),
            symmetric: true,
        }
    }

    pub fn prec(&self) -> u32 {
        self.poly_part.prec()
    }

    /// `nu` read off as minus the `x^2` coefficient.
    pub fn nu(&self) -> Complex {
        Complex::with_val(self.prec(), -self.poly_part.coeff(2))
    }

    pub fn origin_strength(&self) -> Float {
        let l1 = Float::with_val(self.prec(), &self.ell + 1u32);
        Float::with_val(self.prec(), &self.ell * l1)
    }

    pub fn n_poles(&self) -> usize {
        self.poles.iter().map(|p| p.mult as usize).sum()
    }

    /// Check structural invariants: distinct nonzero poles and, when flagged
    /// symmetric, an even polynomial part with poles closed under negation.
    pub fn validate(&self, tol: f64) -> Result<()> {
        for (i, p) in self.poles.iter().enumerate() {
            if abs_f64(&p.location) <= tol {
                return Err(Error::InvalidArgument("pole at the origin must be carried by ell".into()));
            }
            if p.mult == 0 {
                return Err(Error::InvalidArgument("pole multiplicity must be positive".into()));
            }
            for q in &self.poles[i + 1..] {
                if abs_f64(&sub(&p.location, &q.location)) <= tol {
                    return Err(Error::InvalidArgument("repeated pole location".into()));
                }
            }
        }
        if self.symmetric {
            if !self.poly_part.is_even(tol) {
                return Err(Error::InvalidArgument("symmetric potential with odd polynomial terms".into()));
            }
            for p in &self.poles {
                let neg = Complex::with_val(self.prec(), -&p.location);
                let ok = self
                    .poles
                    .iter()
                    .any(|q| q.mult == p.mult && abs_f64(&sub(&q.location, &neg)) <= tol.sqrt());
                if !ok {
                    return Err(Error::InvalidArgument("poles not closed under x -> -x".into()));
                }
            }
        }
        Ok(())
    }

    pub fn to_rational(&self) -> Result<RationalFn> {
        let prec = self.prec();
        let mut v = RationalFn::from_poly(self.poly_part.clone());
        let s = self.origin_strength();
        if !s.is_zero() {
            let term = RationalFn::new(
                Poly::constant(Complex::with_val(prec, &s)),
                Poly::monomial(cint(prec, 1), 2),
            )?;
            v = v.add(&term)?;
        }
        for p in &self.poles {
            let lin = Poly::from_roots(prec, std::slice::from_ref(&p.location));
            let term = RationalFn::new(
                Poly::constant(cint(prec, p.strength() as i64)),
                &lin * &lin,
            )?;
            v = v.add(&term)?;
        }
        Ok(v)
    }

    pub fn eval(&self, x: &Complex) -> Complex {
        let prec = self.prec();
        let mut acc = self.poly_part.eval(x);
        let s = self.origin_strength();
        if !s.is_zero() {
            acc += Complex::with_val(prec, Complex::with_val(prec, x.square_ref()).recip() * &s);
        }
        for p in &self.poles {
            let d = sub(x, &p.location);
            acc += Complex::with_val(prec, d.square().recip() * p.strength());
        }
        acc
    }

    /// n-th derivative of the regular background `poly_part + l(l+1)/x^2`.
    pub fn background_derivative(&self, n: usize, x: &Complex) -> Complex {
        let prec = self.prec();
        let mut v = self.poly_part.nth_derivative(n).eval(x);
        let s = self.origin_strength();
        if !s.is_zero() {
            // d^n/dx^n x^{-2} = (-1)^n (n+1)! x^{-(n+2)}
            let mut fact = Float::with_val(prec, 1);
            for k in 2..=(n as u32 + 1) {
                fact *= k;
            }
            if n % 2 == 1 {
                fact = -fact;
            }
            let xp = Complex::with_val(prec, x.clone().pow(n as i32 + 2)).recip();
            v += Complex::with_val(prec, xp * fact * &s);
        }
        v
    }
}
