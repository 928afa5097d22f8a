use std::fmt;

use rug::Complex;

use super::{abs_f64, cint, czero};
use crate::error::{Error, Result};

/// Univariate polynomial with complex coefficients in ascending powers.
///
/// Exact zeros at the top are always trimmed; tolerance-based trimming is
/// explicit through [`Poly::normalize`].
#[derive(Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex>,
    prec: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

impl Poly {
    pub fn zero(prec: u32) -> Self {
        Poly {
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::constant(cint(prec, 1))
    }

    pub fn constant(c: Complex) -> Self {
        let prec = c.prec().0;
        Self::from_coeffs(prec, vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: Complex, k: usize) -> Self {
        let prec = c.prec().0;
        let mut coeffs = vec![czero(prec); k];
        coeffs.push(c);
        Self::from_coeffs(prec, coeffs)
    }

    pub fn x(prec: u32) -> Self {
        Self::monomial(cint(prec, 1), 1)
    }

    /// Coefficients are rounded to `prec` if they carry another precision.
    pub fn from_coeffs(prec: u32, coeffs: Vec<Complex>) -> Self {
        let coeffs = coeffs
            .into_iter()
            .map(|c| {
                if c.prec().0 == prec {
                    c
                } else {
                    Complex::with_val(prec, c)
                }
            })
            .collect();
        let mut p = Poly { coeffs, prec };
        p.trim_exact();
        p
    }

    pub fn from_f64(prec: u32, coeffs: &[f64]) -> Self {
        Self::from_coeffs(
            prec,
            coeffs.iter().map(|&c| Complex::with_val(prec, c)).collect(),
        )
    }

    pub fn from_i64(prec: u32, coeffs: &[i64]) -> Self {
        Self::from_coeffs(prec, coeffs.iter().map(|&c| cint(prec, c)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(prec: u32, roots: &[Complex]) -> Self {
        let mut p = Poly::one(prec);
        for r in roots {
            let lin = Poly::from_coeffs(prec, vec![Complex::with_val(prec, -r), cint(prec, 1)]);
            p = &p * &lin;
        }
        p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex> {
        self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the stored range).
    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| czero(self.prec))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree ignoring exact zeros; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Index of the last coefficient whose modulus exceeds `tol`.
    pub fn degree_tol(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| abs_f64(c) > tol)
    }

    pub fn lead(&self) -> Option<&Complex> {
        self.coeffs.last()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(abs_f64).fold(0.0, f64::max)
    }

    fn trim_exact(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Drop trailing coefficients of modulus at most `tol`.
    pub fn normalize(mut self, tol: f64) -> Self {
        while self.coeffs.last().is_some_and(|c| abs_f64(c) <= tol) {
            self.coeffs.pop();
        }
        self
    }

    /// Zero every coefficient of modulus at most `tol`.
    pub fn chop(mut self, tol: f64) -> Self {
        for c in self.coeffs.iter_mut() {
            if abs_f64(c) <= tol {
                *c = czero(self.prec);
            }
        }
        self.trim_exact();
        self
    }

    pub fn is_even(&self, tol: f64) -> bool {
        self.coeffs
            .iter()
            .skip(1)
            .step_by(2)
            .all(|c| abs_f64(c) <= tol)
    }

    /// Set all odd coefficients to exactly zero.
    pub fn symmetrize_even(mut self) -> Self {
        for c in self.coeffs.iter_mut().skip(1).step_by(2) {
            *c = czero(self.prec);
        }
        self.trim_exact();
        self
    }

    pub fn scale(&self, s: &Complex) -> Self {
        Poly::from_coeffs(
            self.prec,
            self.coeffs
                .iter()
                .map(|c| Complex::with_val(self.prec, c * s))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Poly::from_coeffs(
            self.prec,
            self.coeffs
                .iter()
                .map(|c| Complex::with_val(self.prec, -c))
                .collect(),
        )
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.lead() {
            None => self.clone(),
            Some(l) => {
                let inv = Complex::with_val(self.prec, l.recip_ref());
                self.scale(&inv)
            }
        }
    }

    pub fn eval(&self, x: &Complex) -> Complex {
        let mut acc = czero(self.prec);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// `sum |c_k| |x|^k`, the natural scale for judging `|p(x)|`.
    pub fn eval_abs_scale(&self, x: &Complex) -> f64 {
        let r = abs_f64(x);
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * r + abs_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.prec);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Complex::with_val(self.prec, c * k as u32))
            .collect();
        Poly::from_coeffs(self.prec, coeffs)
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    /// Coefficients of `p(center + t)` as a polynomial in `t`.
    pub fn taylor_shift(&self, center: &Complex) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = Complex::with_val(self.prec, &c[j + 1] * center);
                c[j] += t;
            }
        }
        Poly::from_coeffs(self.prec, c)
    }

    /// Polynomial long division, `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        check_prec(self, d)?;
        let dl = d
            .lead()
            .ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(self.prec), self.clone()));
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![czero(self.prec); r.len() - dd];
        for k in (0..q.len()).rev() {
            let f = Complex::with_val(self.prec, &r[k + dd] / dl);
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = Complex::with_val(self.prec, &f * dc);
                r[k + j] -= t;
            }
            q[k] = f;
        }
        r.truncate(dd);
        Ok((Poly::from_coeffs(self.prec, q), Poly::from_coeffs(self.prec, r)))
    }

    /// Divide out `(x - root)` by synthetic division, discarding the remainder.
    pub fn deflate(&self, root: &Complex) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Poly::zero(self.prec);
        }
        let mut q = vec![czero(self.prec); n - 1];
        let mut acc = czero(self.prec);
        for k in (1..n).rev() {
            acc *= root;
            acc += &self.coeffs[k];
            q[k - 1] = acc.clone();
        }
        Poly::from_coeffs(self.prec, q)
    }

    /// Divide by `x^k`, dropping the `k` lowest coefficients.
    pub fn shift_down(&self, k: usize) -> Self {
        Poly::from_coeffs(self.prec, self.coeffs.iter().skip(k).cloned().collect())
    }

    /// Number of leading (lowest-order) coefficients of modulus at most
    /// `tol * max_abs`.
    pub fn low_order_zeros(&self, rel_tol: f64) -> usize {
        let scale = self.max_abs();
        self.coeffs
            .iter()
            .take_while(|c| abs_f64(c) <= rel_tol * scale)
            .count()
    }

    pub fn add_poly(&self, other: &Poly) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| match (self.coeffs.get(k), other.coeffs.get(k)) {
                (Some(a), Some(b)) => Complex::with_val(self.prec, a + b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => Complex::with_val(self.prec, b),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::from_coeffs(self.prec, coeffs)
    }

    pub fn sub_poly(&self, other: &Poly) -> Self {
        self.add_poly(&other.neg())
    }

    pub fn mul_poly(&self, other: &Poly) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.prec);
        }
        let mut coeffs = vec![czero(self.prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = Complex::with_val(self.prec, a * b);
                coeffs[i + j] += t;
            }
        }
        Poly::from_coeffs(self.prec, coeffs)
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Poly::one(self.prec), |acc, _| acc.mul_poly(self))
    }
}

fn check_prec(a: &Poly, b: &Poly) -> Result<()> {
    if a.prec != b.prec {
        Err(Error::PrecisionMismatch(a.prec, b.prec))
    } else {
        Ok(())
    }
}

/// Ring arithmetic with a precision-context check.
pub fn poly_arith(a: &Poly, b: &Poly, op: PolyOp) -> Result<Poly> {
    check_prec(a, b)?;
    Ok(match op {
        PolyOp::Add => a.add_poly(b),
        PolyOp::Sub => a.sub_poly(b),
        PolyOp::Mul => a.mul_poly(b),
    })
}

pub fn poly_derivative(p: &Poly, order: usize) -> Result<Poly> {
    if order == 0 {
        return Err(Error::InvalidArgument("derivative order must be >= 1".into()));
    }
    Ok(p.nth_derivative(order))
}

impl<'a> std::ops::Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        debug_assert_eq!(self.prec, rhs.prec);
        self.add_poly(rhs)
    }
}

impl<'a> std::ops::Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        debug_assert_eq!(self.prec, rhs.prec);
        self.sub_poly(rhs)
    }
}

impl<'a> std::ops::Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        debug_assert_eq!(self.prec, rhs.prec);
        self.mul_poly(rhs)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let (re, im) = (c.real().to_f64(), c.imag().to_f64());
                if im == 0.0 {
                    format!("{re}*x^{k}")
                } else {
                    format!("({re}{im:+}i)*x^{k}")
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}
