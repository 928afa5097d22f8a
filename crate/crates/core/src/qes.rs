//! Quasi-polynomial solutions of `(-D^2 + x^6 - nu x^2 + l(l+1)/x^2) psi = lambda psi`.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::exactnum::{
    abs_f64, as_integer, cint, cmp_complex_tol, czero, poly_roots, rational_reduce, Poly,
    RationalFn,
};
use crate::linalg::{null_vector, zeros};
use crate::potential::RationalPotential;
use crate::quasi::{ExpSign, QuasiRationalFunction};

/// Origin behaviour `x^mu` of the quasi-polynomial solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `mu = -l`
    MinusL,
    /// `mu = l + 1`
    LPlusOne,
}

impl Branch {
    pub fn sigma(self) -> i64 {
        match self {
            Branch::MinusL => 1,
            Branch::LPlusOne => -1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct QesProblem {
    pub nu: Float,
    pub ell: Float,
    pub eps: ExpSign,
    pub branch: Branch,
}

impl QesProblem {
    pub fn new(nu: Float, ell: Float, eps: ExpSign, branch: Branch) -> Self {
        QesProblem {
            nu,
            ell,
            eps,
            branch,
        }
    }

    pub fn from_f64(prec: u32, nu: f64, ell: f64, eps: ExpSign, branch: Branch) -> Self {
        Self::new(Float::with_val(prec, nu), Float::with_val(prec, ell), eps, branch)
    }

    pub fn prec(&self) -> u32 {
        self.nu.prec()
    }

    pub fn mu(&self) -> Float {
        let p = self.prec();
        match self.branch {
            Branch::MinusL => Float::with_val(p, -&self.ell),
            Branch::LPlusOne => Float::with_val(p, &self.ell + 1u32),
        }
    }

    /// `(-eps nu + sigma (2l+1)) / 4`, not necessarily an integer.
    pub fn m_value(&self) -> Float {
        let p = self.prec();
        let two_l1 = Float::with_val(p, &self.ell * 2u32) + 1u32;
        let a = Float::with_val(p, &self.nu * (-self.eps.value()));
        let b = two_l1 * self.branch.sigma();
        Float::with_val(p, a + b) / 4u32
    }

    pub fn potential(&self) -> RationalPotential {
        RationalPotential::canonical(&self.nu, &self.ell)
    }
}

/// `M` when it is a positive integer within `tol`, otherwise `None`.
pub fn count_solutions(problem: &QesProblem, tol: f64) -> Option<u32> {
    match as_integer(&problem.m_value(), tol) {
        Some(m) if m >= 1 => u32::try_from(m).ok(),
        _ => None,
    }
}

/// Coefficients of one recurrence row
/// `c_up a_{n+2} + lambda a_n + c_down a_{n-2} = 0`.
#[derive(Clone, Debug)]
pub struct RecurrenceRow {
    pub c_up: Complex,
    /// Absent for `n = 0`.
    pub c_down: Option<Complex>,
}

pub fn recurrence_row(n: usize, problem: &QesProblem) -> Result<RecurrenceRow> {
    if n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("recurrence index {n} must be even")));
    }
    Ok(RecurrenceRow {
        c_up: c_up(n, problem),
        c_down: if n == 0 { None } else { Some(c_down(n, problem)) },
    })
}

fn c_up(n: usize, pr: &QesProblem) -> Complex {
    let p = pr.prec();
    let mu = pr.mu();
    let a = Float::with_val(p, &mu + (n as u32 + 2));
    let b = Float::with_val(p, &mu + (n as u32 + 1));
    let l1 = Float::with_val(p, &pr.ell + 1u32);
    let ll = Float::with_val(p, &pr.ell * &l1);
    Complex::with_val(p, a * b - ll)
}

fn c_down(n: usize, pr: &QesProblem) -> Complex {
    let p = pr.prec();
    let mu = pr.mu();
    let lin = Float::with_val(p, &mu * 2u32) + (2 * n as i64 - 1);
    let t = lin * pr.eps.value();
    Complex::with_val(p, &pr.nu + t)
}

#[derive(Clone, Debug)]
pub struct QesSpectrum {
    pub problem: QesProblem,
    pub m: u32,
    pub char_poly: Poly,
    pub eigenvalues: Vec<Complex>,
    /// `(a_0, a_2, ..., a_{2M-2})` for each eigenvalue.
    pub eigenvectors: Vec<Vec<Complex>>,
    /// Set when `a_0 = 1` was impossible and the lowest nonvanishing
    /// coefficient was normalised instead.
    pub renormalized: Vec<bool>,
}

impl QesSpectrum {
    /// Even polynomial `P(x) = sum a_{2k} x^{2k}` for eigenvector `index`.
    pub fn polynomial(&self, index: usize) -> Poly {
        let p = self.problem.prec();
        let mut c = vec![czero(p); 2 * self.m as usize - 1];
        for (k, a) in self.eigenvectors[index].iter().enumerate() {
            c[2 * k] = a.clone();
        }
        Poly::from_coeffs(p, c)
    }
}

/// Characteristic polynomial `det(lambda I + T)` of the truncated recurrence.
pub fn char_poly(problem: &QesProblem, m: u32) -> Poly {
    let p = problem.prec();
    let lam = Poly::x(p);
    let mut prev = Poly::one(p);
    let mut cur = lam.clone();
    for k in 1..m as usize {
        let coupling = Complex::with_val(p, c_up(2 * k - 2, problem) * c_down(2 * k, problem));
        let next = &(&lam * &cur) - &prev.scale(&coupling);
        prev = cur;
        cur = next;
    }
    cur
}

pub fn qes_spectrum(problem: &QesProblem, tol: f64) -> Result<QesSpectrum> {
    let m = count_solutions(problem, tol).ok_or_else(|| {
        Error::NoQuasiPolynomialSolutions(format!(
            "M = {} for nu = {}, l = {}",
            problem.m_value().to_f64(),
            problem.nu.to_f64(),
            problem.ell.to_f64()
        ))
    })?;
    let cp = char_poly(problem, m);
    let roots = poly_roots(&cp, tol)?;
    let mut eigenvalues = Vec::with_capacity(m as usize);
    for r in &roots {
        for _ in 0..r.multiplicity {
            eigenvalues.push(r.value.clone());
        }
    }
    eigenvalues.sort_by(|a, b| cmp_complex_tol(a, b, tol));
    for i in 0..eigenvalues.len() {
        for j in i + 1..eigenvalues.len() {
            let d = abs_f64(&Complex::with_val(problem.prec(), &eigenvalues[i] - &eigenvalues[j]));
            if d <= tol * abs_f64(&eigenvalues[i]).max(1.0) {
                return Err(Error::RepeatedEigenvalue(i, j));
            }
        }
    }
    let mut eigenvectors = Vec::with_capacity(m as usize);
    let mut renormalized = Vec::with_capacity(m as usize);
    for lam in &eigenvalues {
        let (v, flag) = eigenvector(problem, m, lam, tol)?;
        eigenvectors.push(v);
        renormalized.push(flag);
    }
    Ok(QesSpectrum {
        problem: problem.clone(),
        m,
        char_poly: cp,
        eigenvalues,
        eigenvectors,
        renormalized,
    })
}

fn eigenvector(pr: &QesProblem, m: u32, lam: &Complex, tol: f64) -> Result<(Vec<Complex>, bool)> {
    let p = pr.prec();
    let m = m as usize;
    let ups: Vec<Complex> = (0..m).map(|k| c_up(2 * k, pr)).collect();
    let scale = ups.iter().map(abs_f64).fold(1.0, f64::max);
    if ups[..m - 1].iter().all(|u| abs_f64(u) > tol * scale) {
        let mut a = vec![cint(p, 1)];
        for k in 0..m - 1 {
            let mut rhs = -Complex::with_val(p, lam * &a[k]);
            if k >= 1 {
                rhs -= Complex::with_val(p, c_down(2 * k, pr) * &a[k - 1]);
            }
            a.push(Complex::with_val(p, rhs / &ups[k]));
        }
        return Ok((a, false));
    }
    let mut mat = zeros(p, m, m);
    for k in 0..m {
        mat[k][k] = lam.clone();
        if k + 1 < m {
            mat[k][k + 1] = ups[k].clone();
        }
        if k >= 1 {
            mat[k][k - 1] = c_down(2 * k, pr);
        }
    }
    let v = null_vector(&mat, tol.sqrt()).ok_or(Error::DegenerateWronskian)?;
    let flag = abs_f64(&v[0]) <= tol || abs_f64(&Complex::with_val(p, &v[0] - 1)) > tol;
    Ok((v, flag))
}

/// Continue the recurrence from eigenvector `index` past truncation and
/// return `a_{2M}, a_{2M+2}, ...` (`extra` values), solving each row for its
/// highest coefficient.
pub fn extend_recurrence(spec: &QesSpectrum, index: usize, extra: usize) -> Vec<Complex> {
    let pr = &spec.problem;
    let p = pr.prec();
    let m = spec.m as usize;
    let lam = &spec.eigenvalues[index];
    let mut a = spec.eigenvectors[index].clone();
    let mut out = Vec::with_capacity(extra);
    for k in m - 1..m - 1 + extra {
        let ak = a.get(k).cloned().unwrap_or_else(|| czero(p));
        let akm = if k >= 1 { a[k - 1].clone() } else { czero(p) };
        let mut rhs = -Complex::with_val(p, lam * &ak);
        if k >= 1 {
            rhs -= Complex::with_val(p, c_down(2 * k, pr) * &akm);
        }
        let up = c_up(2 * k, pr);
        let next = if up.is_zero() {
            rhs
        } else {
            Complex::with_val(p, rhs / up)
        };
        a.push(next.clone());
        out.push(next);
    }
    out
}

/// `psi = x^mu P(x) exp(eps x^4/4)` for eigenvalue `index`.
pub fn eigenfunction(spec: &QesSpectrum, index: usize) -> Result<QuasiRationalFunction> {
    if index >= spec.m as usize {
        return Err(Error::InvalidArgument(format!(
            "eigenfunction index {index} out of range 0..{}",
            spec.m
        )));
    }
    Ok(QuasiRationalFunction::from_poly(
        spec.problem.mu(),
        spec.problem.eps,
        spec.polynomial(index),
    ))
}

/// Writing `psi = x^mu R(x) exp(eps x^4/4)`, the quantity
/// `(-psi'' + V psi - lambda psi) / (x^mu exp(eps x^4/4))` as a rational function.
pub fn schrodinger_defect(
    v: &RationalPotential,
    psi: &QuasiRationalFunction,
    lambda: &Complex,
) -> Result<RationalFn> {
    let prec = psi.prec();
    let r = psi.rational_part()?;
    let r1 = r.derivative()?;
    let r2 = r1.derivative()?;
    let h = psi.exponent_derivative();
    // h' + h^2 = mu(mu-1)/x^2 + eps(3 + 2mu) x^2 + x^6
    let mu = Complex::with_val(prec, &psi.mu);
    let eps = psi.eps.value();
    let mut hh = vec![czero(prec); 9];
    hh[0] = Complex::with_val(prec, &mu * Complex::with_val(prec, &mu - 1));
    hh[4] = Complex::with_val(prec, Complex::with_val(prec, &mu * 2u32) + 3u32) * eps;
    hh[8] = cint(prec, 1);
    let hh = RationalFn::new(Poly::from_coeffs(prec, hh), Poly::monomial(cint(prec, 1), 2))?;
    let vrat = v.to_rational()?;
    let shift = RationalFn::from_poly(Poly::constant(Complex::with_val(prec, lambda)));
    let minus_one = RationalFn::from_poly(Poly::constant(cint(prec, -1)));

    let two_h = h.mul(&RationalFn::from_poly(Poly::constant(cint(prec, 2))))?;
    let term1 = r2.mul(&minus_one)?;
    let term2 = two_h.mul(&r1)?.mul(&minus_one)?;
    let coeff = vrat.add(&hh.mul(&minus_one)?)?.add(&shift.mul(&minus_one)?)?;
    let term3 = coeff.mul(&r)?;
    term1.add(&term2)?.add(&term3)
}

/// Max numerator coefficient of the reduced [`schrodinger_defect`]; zero
/// (below tolerance) certifies an exact eigenfunction.
pub fn schrodinger_residual(
    v: &RationalPotential,
    psi: &QuasiRationalFunction,
    lambda: &Complex,
    tol: f64,
) -> Result<f64> {
    let e = schrodinger_defect(v, psi, lambda)?;
    let scale = e.numerator.max_abs();
    if scale <= tol {
        return Ok(scale);
    }
    Ok(match rational_reduce(&e, tol) {
        Ok(red) => red.numerator.max_abs(),
        Err(_) => scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{cplx, sub};

    const P: u32 = 256;

    fn prob(nu: f64, ell: f64, eps: ExpSign, branch: Branch) -> QesProblem {
        QesProblem::from_f64(P, nu, ell, eps, branch)
    }

    #[test]
    fn counts() {
        let tol = 1e-30;
        assert_eq!(count_solutions(&prob(7.0, 0.0, ExpSign::Minus, Branch::MinusL), tol), Some(2));
        assert_eq!(count_solutions(&prob(7.0, 0.0, ExpSign::Plus, Branch::LPlusOne), tol), None);
        assert_eq!(count_solutions(&prob(11.0, 0.0, ExpSign::Minus, Branch::MinusL), tol), Some(3));
        assert_eq!(count_solutions(&prob(2.0, 0.0, ExpSign::Minus, Branch::MinusL), tol), None);
    }

    #[test]
    fn recurrence_rows_for_nu7() {
        let pr = prob(7.0, 0.0, ExpSign::Minus, Branch::MinusL);
        let r0 = recurrence_row(0, &pr).unwrap();
        assert_eq!(r0.c_up, 2);
        assert!(r0.c_down.is_none());
        let r2 = recurrence_row(2, &pr).unwrap();
        assert_eq!(r2.c_up, 12);
        assert_eq!(r2.c_down.unwrap(), 4);
        // truncation: the a_{2M-2} coefficient of row 2M vanishes
        assert!(recurrence_row(4, &pr).unwrap().c_down.unwrap().is_zero());
        assert!(recurrence_row(3, &pr).is_err());
    }

    #[test]
    fn truncation_on_the_plus_branch() {
        // eps = +1, mu = l+1: M = (-nu - 2l - 1)/4; nu = -11, l = 1 gives M = 2
        let pr = prob(-11.0, 1.0, ExpSign::Plus, Branch::LPlusOne);
        assert_eq!(count_solutions(&pr, 1e-30), Some(2));
        assert!(recurrence_row(4, &pr).unwrap().c_down.unwrap().is_zero());
    }

    #[test]
    fn nu7_spectrum() {
        let pr = prob(7.0, 0.0, ExpSign::Minus, Branch::MinusL);
        let s = qes_spectrum(&pr, 1e-38).unwrap();
        assert_eq!(s.char_poly, Poly::from_i64(P, &[-8, 0, 1]));
        let r8 = Complex::with_val(P, 8).sqrt();
        assert!(abs_f64(&Complex::with_val(P, &s.eigenvalues[0] + &r8)) < 1e-70);
        assert!(abs_f64(&Complex::with_val(P, &s.eigenvalues[1] - &r8)) < 1e-70);
        let s2 = Complex::with_val(P, 2).sqrt();
        assert!(abs_f64(&sub(&s.eigenvectors[0][1], &s2)) < 1e-70);
        assert!(abs_f64(&Complex::with_val(P, &s.eigenvectors[1][1] + &s2)) < 1e-70);
        let v = pr.potential();
        for i in 0..2 {
            let psi = eigenfunction(&s, i).unwrap();
            let res = schrodinger_residual(&v, &psi, &s.eigenvalues[i], 1e-38).unwrap();
            assert!(res < 1e-60, "{res:e}");
        }
        let psi = eigenfunction(&s, 0).unwrap();
        let wrong = schrodinger_residual(&v, &psi, &czero(P), 1e-38).unwrap();
        assert!(wrong > 1.0);
    }

    #[test]
    fn nu11_spectrum_by_determinant_oracle() {
        let pr = prob(11.0, 0.0, ExpSign::Minus, Branch::MinusL);
        let s = qes_spectrum(&pr, 1e-38).unwrap();
        // det [[l,2,0],[8,l,12],[0,4,l]] = l^3 - 64 l
        assert_eq!(s.char_poly, Poly::from_i64(P, &[0, -64, 0, 1]));
        let expect = [-8.0, 0.0, 8.0];
        for (e, x) in s.eigenvalues.iter().zip(expect) {
            assert!(abs_f64(&sub(e, &cplx(P, x, 0.0))) < 1e-60);
        }
        let v = pr.potential();
        for i in 0..3 {
            let psi = eigenfunction(&s, i).unwrap();
            assert!(schrodinger_residual(&v, &psi, &s.eigenvalues[i], 1e-38).unwrap() < 1e-60);
        }
    }

    #[test]
    fn single_state() {
        // M = (nu + 1)/4 = 1 at nu = 3: psi = exp(-x^4/4), lambda = 0
        let pr = prob(3.0, 0.0, ExpSign::Minus, Branch::MinusL);
        let s = qes_spectrum(&pr, 1e-38).unwrap();
        assert_eq!(s.m, 1);
        assert_eq!(s.char_poly, Poly::from_i64(P, &[0, 1]));
        assert!(s.eigenvalues[0].is_zero() || abs_f64(&s.eigenvalues[0]) < 1e-70);
        let psi = eigenfunction(&s, 0).unwrap();
        assert_eq!(psi.numerator(), Poly::one(P));
        assert!(schrodinger_residual(&pr.potential(), &psi, &s.eigenvalues[0], 1e-38).unwrap() < 1e-60);
    }

    #[test]
    fn truncation_persists() {
        let pr = prob(13.0, 1.0, ExpSign::Minus, Branch::MinusL);
        let s = qes_spectrum(&pr, 1e-38).unwrap();
        for i in 0..s.m as usize {
            for a in extend_recurrence(&s, i, 3) {
                assert!(abs_f64(&a) < 1e-50);
            }
        }
    }

    #[test]
    fn no_solutions_error() {
        let pr = prob(2.0, 0.0, ExpSign::Minus, Branch::MinusL);
        assert!(matches!(
            qes_spectrum(&pr, 1e-38),
            Err(Error::NoQuasiPolynomialSolutions(_))
        ));
    }

    #[test]
    fn l_reflection_gives_same_spectrum() {
        let a = qes_spectrum(&prob(11.0, 1.0, ExpSign::Minus, Branch::LPlusOne), 1e-38).unwrap();
        let b = qes_spectrum(&prob(11.0, -2.0, ExpSign::Minus, Branch::MinusL), 1e-38).unwrap();
        assert_eq!(a.m, b.m);
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!(abs_f64(&sub(x, y)) < 1e-60);
        }
    }

    #[test]
    fn degenerate_spectrum_is_reported() {
        // mu = -l with l = 1, nu = 9: couplings -16 and +16 cancel, char_poly = lambda^3
        let pr = prob(9.0, 1.0, ExpSign::Minus, Branch::MinusL);
        assert_eq!(char_poly(&pr, 3), Poly::from_i64(P, &[0, 0, 0, 1]));
        assert!(matches!(qes_spectrum(&pr, 1e-38), Err(Error::RepeatedEigenvalue(0, 1))));
    }

    #[test]
    fn eigenfunction_index_out_of_range() {
        let s = qes_spectrum(&prob(7.0, 0.0, ExpSign::Minus, Branch::MinusL), 1e-38).unwrap();
        assert!(eigenfunction(&s, 2).is_err());
    }
}
