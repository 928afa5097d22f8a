//! Wronskians of quasi-polynomial eigenfunctions and their Crum descendants.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::exactnum::{abs_f64, as_integer, cint, czero, poly_roots, sub, Poly, RationalFn};
use crate::potential::{Pole, RationalPotential};
use crate::qes::{qes_spectrum, Branch, QesProblem, QesSpectrum};
use crate::quasi::{ExpSign, QuasiRationalFunction};

/// The four Darboux families. The first sign is `-eps` (so `+` means
/// `exp(-x^4/4)`), the second is `+` for `mu = -l` and `-` for `mu = l+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    PlusMinus,
    PlusPlus,
    MinusPlus,
    MinusMinus,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::PlusMinus,
        Family::PlusPlus,
        Family::MinusPlus,
        Family::MinusMinus,
    ];

    pub fn eps(self) -> ExpSign {
        match self {
            Family::PlusMinus | Family::PlusPlus => ExpSign::Minus,
            Family::MinusPlus | Family::MinusMinus => ExpSign::Plus,
        }
    }

    pub fn branch(self) -> Branch {
        match self {
            Family::PlusPlus | Family::MinusPlus => Branch::MinusL,
            Family::PlusMinus | Family::MinusMinus => Branch::LPlusOne,
        }
    }

    pub fn from_parts(eps: ExpSign, branch: Branch) -> Self {
        match (eps, branch) {
            (ExpSign::Minus, Branch::LPlusOne) => Family::PlusMinus,
            (ExpSign::Minus, Branch::MinusL) => Family::PlusPlus,
            (ExpSign::Plus, Branch::MinusL) => Family::MinusPlus,
            (ExpSign::Plus, Branch::LPlusOne) => Family::MinusMinus,
        }
    }

    pub fn problem(self, nu: &Float, ell: &Float) -> QesProblem {
        QesProblem::new(nu.clone(), ell.clone(), self.eps(), self.branch())
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::PlusMinus => "D+-",
            Family::PlusPlus => "D++",
            Family::MinusPlus => "D-+",
            Family::MinusMinus => "D--",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Family::ALL.into_iter().find(|f| f.label() == s || f.label()[1..] == *s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `(nu', l', M)` after removing `m` states of `family`, with `M` the
/// family's count `(-eps nu + sigma(2l+1))/4` at the original parameters.
pub fn family_parameter_law(family: Family, nu: &Float, ell: &Float, m: u32) -> (Float, Float, Float) {
    let prec = nu.prec();
    let eps = family.eps().value();
    let new_nu = Float::with_val(prec, nu + 6 * eps * m as i64);
    let new_ell = match family.branch() {
        Branch::MinusL => Float::with_val(prec, ell - m),
        Branch::LPlusOne => Float::with_val(prec, ell + m),
    };
    (new_nu, new_ell, family.problem(nu, ell).m_value())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualMode {
    /// `(nu, l, M) -> (nu - 6M, l + M, -M)`
    Shift,
    /// `(nu, l, M) -> (nu, -1 - l, M)`
    Reflect,
}

pub fn dual_parameters(nu: &Float, ell: &Float, m: &Float, mode: DualMode) -> (Float, Float, Float) {
    let prec = nu.prec();
    match mode {
        DualMode::Shift => (
            Float::with_val(prec, nu - Float::with_val(prec, m * 6u32)),
            Float::with_val(prec, ell + m),
            Float::with_val(prec, -m),
        ),
        DualMode::Reflect => (
            nu.clone(),
            Float::with_val(prec, -1 - Float::with_val(prec, ell)),
            m.clone(),
        ),
    }
}

#[derive(Clone, Debug)]
pub struct WronskianResult {
    /// `m mu + m(m-1)/2`.
    pub origin_exponent: Float,
    pub p_i: Poly,
    /// `m`; the Wronskian carries `exp(eps m x^4/4)`.
    pub exp_multiplier: u32,
    pub eps: ExpSign,
    pub subset: Vec<usize>,
    pub power_stripped: usize,
    pub expected_power: usize,
    pub even: bool,
    pub nonzero_at_origin: bool,
    pub expected_degree: Option<usize>,
}

impl WronskianResult {
    pub fn degree(&self) -> usize {
        self.p_i.degree().unwrap_or(0)
    }

    pub fn structure_ok(&self) -> bool {
        self.power_stripped == self.expected_power
            && self.even
            && self.nonzero_at_origin
            && self.expected_degree.is_none_or(|d| d == self.degree())
    }
}

/// Determinant of `[P_j^{(i)}]` by expansion over column subsets.
fn poly_wronskian(polys: &[Poly], prec: u32) -> Poly {
    let m = polys.len();
    if m == 0 {
        return Poly::one(prec);
    }
    let derivs: Vec<Vec<Poly>> = polys
        .iter()
        .map(|p| {
            let mut v = Vec::with_capacity(m);
            let mut cur = p.clone();
            for _ in 0..m {
                let next = cur.derivative();
                v.push(cur);
                cur = next;
            }
            v
        })
        .collect();
    let mut dp: Vec<Option<Poly>> = vec![None; 1 << m];
    dp[0] = Some(Poly::one(prec));
    for mask in 0usize..(1 << m) {
        let Some(cur) = dp[mask].clone() else { continue };
        let row = mask.count_ones() as usize;
        if row == m {
            continue;
        }
        for col in 0..m {
            if mask & (1 << col) != 0 {
                continue;
            }
            // sign from the number of already-used columns to the right of `col`
            let inversions = (mask >> (col + 1)).count_ones();
            let mut term = &cur * &derivs[col][row];
            if inversions % 2 == 1 {
                term = term.neg();
            }
            let next = mask | (1 << col);
            dp[next] = Some(match dp[next].take() {
                Some(acc) => &acc + &term,
                None => term,
            });
        }
    }
    dp[(1 << m) - 1].take().unwrap_or_else(|| Poly::zero(prec))
}

/// Wronskian of quasi-polynomial functions `x^mu P_i exp(eps x^4/4)` sharing
/// `mu` and `eps`: `W = x^(m mu) exp(eps m x^4/4) W(P_1, ..., P_m)`.
///
/// `W(P)` is divided by the largest power of `x` it carries; the remaining
/// factor is returned as `p_i`.
pub fn wronskian(functions: &[QuasiRationalFunction], tol: f64) -> Result<WronskianResult> {
    let Some(first) = functions.first() else {
        return Err(Error::InvalidArgument("wronskian of an empty family".into()));
    };
    let prec = first.prec();
    for f in functions {
        if f.eps != first.eps || f.mu != first.mu {
            return Err(Error::InvalidArgument("wronskian inputs must share mu and eps".into()));
        }
        if !f.poles.is_empty() {
            return Err(Error::Unsupported("wronskian of functions with poles".into()));
        }
    }
    let m = functions.len();
    let polys: Vec<Poly> = functions.iter().map(|f| f.numerator()).collect();
    let w = poly_wronskian(&polys, prec);
    let scale = polys.iter().map(|p| p.max_abs()).fold(1.0, f64::max).powi(m as i32);
    if w.max_abs() <= tol * scale {
        return Err(Error::DegenerateWronskian);
    }
    let rel = tol * scale / w.max_abs().max(f64::MIN_POSITIVE);
    let w = w.chop(tol * scale);
    let power = w.low_order_zeros(rel.min(tol));
    let mut p_i = w.shift_down(power);
    let wmax = p_i.max_abs();
    p_i = p_i.normalize(tol * wmax);
    let even = p_i.is_even(tol.sqrt() * wmax);
    if even {
        p_i = p_i.symmetrize_even();
    }
    let nonzero_at_origin = abs_f64(&p_i.coeff(0)) > tol * wmax;
    let expected_power = m * (m - 1) / 2;
    let mu_m = Float::with_val(prec, &first.mu * m as u32);
    Ok(WronskianResult {
        origin_exponent: mu_m + expected_power as u32,
        p_i,
        exp_multiplier: m as u32,
        eps: first.eps,
        subset: Vec::new(),
        power_stripped: power,
        expected_power,
        even,
        nonzero_at_origin,
        expected_degree: None,
    })
}

/// Wronskian of the eigenfunctions labelled by `subset` (1-based, in the
/// spectrum's eigenvalue order), with the degree expectation `2m(M-m)`.
pub fn wronskian_of_subset(spec: &QesSpectrum, subset: &[usize], tol: f64) -> Result<WronskianResult> {
    let subset = normalize_subset(subset, spec.m as usize)?;
    let fns: Vec<QuasiRationalFunction> = subset
        .iter()
        .map(|&i| {
            QuasiRationalFunction::from_poly(spec.problem.mu(), spec.problem.eps, spec.polynomial(i - 1))
        })
        .collect();
    let mut w = if fns.is_empty() {
        let prec = spec.problem.prec();
        WronskianResult {
            origin_exponent: Float::with_val(prec, 0),
            p_i: Poly::one(prec),
            exp_multiplier: 0,
            eps: spec.problem.eps,
            subset: Vec::new(),
            power_stripped: 0,
            expected_power: 0,
            even: true,
            nonzero_at_origin: true,
            expected_degree: None,
        }
    } else {
        wronskian(&fns, tol)?
    };
    let m = subset.len();
    w.expected_degree = Some(2 * m * (spec.m as usize - m));
    w.subset = subset;
    Ok(w)
}

fn normalize_subset(subset: &[usize], m: usize) -> Result<Vec<usize>> {
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != subset.len() {
        return Err(Error::InvalidArgument("subset has repeated indices".into()));
    }
    if let Some(&bad) = s.iter().find(|&&i| i == 0 || i > m) {
        return Err(Error::InvalidArgument(format!("subset index {bad} outside 1..={m}")));
    }
    Ok(s)
}

#[derive(Clone, Debug)]
pub struct DarbouxDescendant {
    pub potential: RationalPotential,
    pub parent: QesProblem,
    pub subset: Vec<usize>,
    pub new_nu: Float,
    pub new_ell: Float,
    pub family: Family,
    pub wronskian: WronskianResult,
    /// Largest coefficient of the numerator of (family-law potential minus
    /// `base - 2 (ln W)''`), relative to the operands.
    pub representation_defect: f64,
}

/// `-2 (ln W)''` for `W = x^e exp(eps m x^4/4) P(x)`:
/// `2e/x^2 - 6 eps m x^2 - 2 (P'' P - P'^2)/P^2`.
pub fn crum_correction(w: &WronskianResult) -> Result<RationalFn> {
    let prec = w.p_i.prec();
    let p = &w.p_i;
    let p1 = p.derivative();
    let p2 = p1.derivative();
    let log_term = RationalFn::new((&(&p2 * p) - &(&p1 * &p1)).scale(&cint(prec, -2)), p * p)?;
    let e2 = Complex::with_val(prec, &w.origin_exponent * 2u32);
    let origin = RationalFn::new(Poly::constant(e2), Poly::monomial(cint(prec, 1), 2))?;
    let quad = RationalFn::from_poly(Poly::monomial(
        cint(prec, -6 * w.eps.value() * w.exp_multiplier as i64),
        2,
    ));
    log_term.add(&origin)?.add(&quad)
}

/// Relative size of the numerator of `f - g`.
pub fn rational_difference(f: &RationalFn, g: &RationalFn) -> f64 {
    let a = &f.numerator * &g.denominator;
    let b = &g.numerator * &f.denominator;
    let scale = a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE);
    (&a - &b).max_abs() / scale
}

/// Crum descendant of `base` (the canonical potential of `spec.problem`)
/// obtained from the eigenfunctions labelled by `subset`.
pub fn crum_potential(
    base: &RationalPotential,
    subset: &[usize],
    spec: &QesSpectrum,
    tol: f64,
) -> Result<DarbouxDescendant> {
    let pr = &spec.problem;
    let canonical = pr.potential();
    if !base.poles.is_empty()
        || rational_difference(&base.to_rational()?, &canonical.to_rational()?) > tol
    {
        return Err(Error::InvalidArgument(
            "base potential must be the canonical sextic of the spectrum".into(),
        ));
    }
    let family = Family::from_parts(pr.eps, pr.branch);
    let w = wronskian_of_subset(spec, subset, tol)?;
    let m = w.subset.len() as u32;
    let (new_nu, new_ell, _) = family_parameter_law(family, &pr.nu, &pr.ell, m);
    if m == 0 {
        return Ok(DarbouxDescendant {
            potential: base.clone(),
            parent: pr.clone(),
            subset: Vec::new(),
            new_nu,
            new_ell,
            family,
            wronskian: w,
            representation_defect: 0.0,
        });
    }
    let prec = pr.prec();
    let mut poles = Vec::new();
    if w.p_i.degree().unwrap_or(0) > 0 {
        for r in poly_roots(&w.p_i, tol)? {
            if r.multiplicity > 1 {
                let k = r.multiplicity as u64;
                return Err(Error::InconsistentMultiplicity {
                    location: format!("{}", r.value),
                    mult: r.multiplicity,
                    strength: format!("{}", 2 * k),
                });
            }
            poles.push(Pole {
                location: r.value,
                mult: 1,
            });
        }
    }
    let mut coeffs: Vec<Complex> = base.poly_part.coeffs().to_vec();
    coeffs.resize(7, czero(prec));
    coeffs[2] = Complex::with_val(prec, -&new_nu);
    let potential = RationalPotential {
        poly_part: Poly::from_coeffs(prec, coeffs),
        ell: new_ell.clone(),
        poles,
        symmetric: w.even,
    };
    let direct = base.to_rational()?.add(&crum_correction(&w)?)?;
    let representation_defect = rational_difference(&potential.to_rational()?, &direct);
    Ok(DarbouxDescendant {
        potential,
        parent: pr.clone(),
        subset: w.subset.clone(),
        new_nu,
        new_ell,
        family,
        wronskian: w,
        representation_defect,
    })
}

/// All subsets of `{1..M}`, ordered by size and then lexicographically.
pub fn ordered_subsets(m: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u64..(1u64 << m))
        .map(|mask| (1..=m).filter(|i| mask & (1 << (i - 1)) != 0).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

/// The `2^M` descendants of the canonical potential at `(nu0, l0)` in `family`.
pub fn enumerate_darboux_set(
    nu0: &Float,
    ell0: &Float,
    family: Family,
    tol: f64,
) -> Result<Vec<DarbouxDescendant>> {
    let pr = family.problem(nu0, ell0);
    let spec = qes_spectrum(&pr, tol)?;
    let base = pr.potential();
    ordered_subsets(spec.m as usize)
        .into_par_iter()
        .map(|s| crum_potential(&base, &s, &spec, tol))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CertifiedNonmember,
    CandidateMember,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipCandidate {
    pub m: u64,
    pub m0: i64,
    pub family: Family,
}

#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub n: u64,
    /// Families whose count `(+-nu +- (2l+1))/4` is an integer, with that value.
    pub grid: Vec<(Family, i64)>,
    /// All `(m, k)` with `m k = N/2`.
    pub factorizations: Vec<(u64, u64)>,
    pub candidates: Vec<MembershipCandidate>,
    pub verdict: Verdict,
}

impl MembershipReport {
    pub fn on_grid(&self) -> bool {
        !self.grid.is_empty()
    }
}

/// Arithmetic test for membership of `x^6 - nu x^2 + l(l+1)/x^2 + (N poles)`
/// in a Darboux set: a descendant of `|M0|` states with `m` removed has
/// `N = 2m(M0 - m)` poles and family count `M0 - 2m`.
pub fn classify_membership(n: u64, nu: &Float, ell: &Float, tol: f64) -> Result<MembershipReport> {
    if n % 2 == 1 {
        return Err(Error::InvalidArgument(format!("pole count {n} must be even")));
    }
    let grid: Vec<(Family, i64)> = Family::ALL
        .iter()
        .filter_map(|&f| as_integer(&f.problem(nu, ell).m_value(), tol).map(|m| (f, m)))
        .collect();
    let half = n / 2;
    let mut factorizations = Vec::new();
    let mut candidates = Vec::new();
    if n == 0 {
        for &(f, mf) in &grid {
            candidates.push(MembershipCandidate {
                m: 0,
                m0: mf,
                family: f,
            });
        }
    } else {
        for m in 1..=half {
            if !half.is_multiple_of(m) {
                continue;
            }
            let k = half / m;
            factorizations.push((m, k));
            let m0 = (m + k) as i64;
            for &(f, mf) in &grid {
                if mf == m0 - 2 * m as i64 {
                    candidates.push(MembershipCandidate { m, m0, family: f });
                }
            }
        }
    }
    let verdict = if candidates.is_empty() {
        Verdict::CertifiedNonmember
    } else {
        Verdict::CandidateMember
    };
    Ok(MembershipReport {
        n,
        grid,
        factorizations,
        candidates,
        verdict,
    })
}

#[derive(Clone, Debug)]
pub struct SimpleZeroAudit {
    pub degree: usize,
    /// multiplicity -> number of distinct roots with it
    pub histogram: BTreeMap<u32, usize>,
    pub min_distance: Option<f64>,
    pub all_simple: bool,
}

/// Root multiplicities of `P_I`; evidence only, nothing is asserted.
pub fn simple_zero_audit(w: &WronskianResult, tol: f64) -> Result<SimpleZeroAudit> {
    let degree = w.p_i.degree().unwrap_or(0);
    let mut histogram = BTreeMap::new();
    let mut min_distance: Option<f64> = None;
    if degree > 0 {
        let roots = poly_roots(&w.p_i, tol)?;
        for r in &roots {
            *histogram.entry(r.multiplicity).or_insert(0) += 1;
        }
        for (i, a) in roots.iter().enumerate() {
            for b in &roots[i + 1..] {
                let d = abs_f64(&sub(&a.value, &b.value));
                min_distance = Some(min_distance.map_or(d, |x| x.min(d)));
            }
        }
    }
    let all_simple = histogram.keys().all(|&k| k == 1);
    Ok(SimpleZeroAudit {
        degree,
        histogram,
        min_distance,
        all_simple,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::cplx;

    const P: u32 = 256;
    const TOL: f64 = 1e-38;

    fn f(x: f64) -> Float {
        Float::with_val(P, x)
    }

    fn nu7() -> QesSpectrum {
        qes_spectrum(&Family::PlusPlus.problem(&f(7.0), &f(0.0)), TOL).unwrap()
    }

    #[test]
    fn wronskian_of_nu7_pair() {
        let s2 = Complex::with_val(P, 2).sqrt();
        let a = Poly::from_coeffs(P, vec![cint(P, 1), czero(P), s2.clone()]);
        let b = Poly::from_coeffs(P, vec![cint(P, -1), czero(P), s2.clone()]);
        let fa = QuasiRationalFunction::from_poly(f(0.0), ExpSign::Minus, a);
        let fb = QuasiRationalFunction::from_poly(f(0.0), ExpSign::Minus, b);
        let w = wronskian(&[fa, fb], TOL).unwrap();
        assert_eq!(w.power_stripped, 1);
        assert_eq!(w.origin_exponent, 1);
        assert_eq!(w.degree(), 0);
        // W = (a b' - a' b) = 4 sqrt2 x
        let expect = Complex::with_val(P, &s2 * 4u32);
        assert!(abs_f64(&sub(&w.p_i.coeff(0), &expect)) < 1e-60);
    }

    #[test]
    fn single_function_wronskian_is_itself() {
        let s = nu7();
        let w = wronskian_of_subset(&s, &[1], TOL).unwrap();
        assert_eq!(w.p_i, s.polynomial(0));
        assert_eq!(w.degree(), 2);
        assert!(w.structure_ok());
    }

    #[test]
    fn dependent_inputs_are_degenerate() {
        let p = Poly::from_i64(P, &[1, 0, 3]);
        let a = QuasiRationalFunction::from_poly(f(0.0), ExpSign::Minus, p.clone());
        let b = QuasiRationalFunction::from_poly(f(0.0), ExpSign::Minus, p.scale(&cint(P, 2)));
        assert!(matches!(wronskian(&[a, b], TOL), Err(Error::DegenerateWronskian)));
    }

    #[test]
    fn nu7_descendants() {
        let s = nu7();
        let base = s.problem.potential();
        let v1 = crum_potential(&base, &[1], &s, TOL).unwrap();
        assert!(v1.representation_defect < 1e-60);
        assert_eq!(v1.new_nu, 1);
        assert_eq!(v1.potential.poly_part, Poly::from_i64(P, &[0, 0, -1, 0, 0, 0, 1]));
        // (8x^2 - 4 sqrt2)/(sqrt2 x^2 + 1)^2 written over the monic (x^2 + 1/sqrt2)^2
        let s2 = Complex::with_val(P, 2).sqrt();
        let target_num = Poly::from_coeffs(P, vec![Complex::with_val(P, &s2 * -4i32), czero(P), cint(P, 8)]);
        let den = Poly::from_coeffs(P, vec![cint(P, 1), czero(P), s2.clone()]);
        let target = RationalFn::from_poly(v1.potential.poly_part.clone())
            .add(&RationalFn::new(target_num, &den * &den).unwrap())
            .unwrap();
        assert!(rational_difference(&v1.potential.to_rational().unwrap(), &target) < 1e-60);

        let v12 = crum_potential(&base, &[1, 2], &s, TOL).unwrap();
        assert!(v12.potential.poles.is_empty());
        assert_eq!(v12.potential.poly_part, Poly::from_i64(P, &[0, 0, 5, 0, 0, 0, 1]));
        assert_eq!(v12.potential.origin_strength(), 2);
        assert!(v12.representation_defect < 1e-60);

        let v0 = crum_potential(&base, &[], &s, TOL).unwrap();
        assert_eq!(v0.potential, base);
    }

    #[test]
    fn parameter_laws() {
        let (nu, l, _) = family_parameter_law(Family::PlusMinus, &f(7.0), &f(0.0), 2);
        assert_eq!((nu.to_f64(), l.to_f64()), (-5.0, 2.0));
        for fam in Family::ALL {
            let (nu, l, _) = family_parameter_law(fam, &f(3.5), &f(0.25), 0);
            assert_eq!((nu.to_f64(), l.to_f64()), (3.5, 0.25));
        }
        let (nu, l, _) = family_parameter_law(Family::MinusMinus, &f(-7.0), &f(0.0), 1);
        assert_eq!((nu.to_f64(), l.to_f64()), (-1.0, 1.0));
    }

    #[test]
    fn duals() {
        let (a, b, c) = dual_parameters(&f(7.0), &f(0.0), &f(2.0), DualMode::Shift);
        assert_eq!((a.to_f64(), b.to_f64(), c.to_f64()), (-5.0, 2.0, -2.0));
        let (a2, b2, c2) = dual_parameters(&a, &b, &c, DualMode::Shift);
        assert_eq!((a2.to_f64(), b2.to_f64(), c2.to_f64()), (7.0, 0.0, 2.0));
        let (_, lr, _) = dual_parameters(&f(7.0), &f(0.3), &f(2.0), DualMode::Reflect);
        let q0 = 0.3 * 1.3;
        let q1 = lr.to_f64() * (lr.to_f64() + 1.0);
        assert!((q0 - q1).abs() < 1e-15);
    }

    #[test]
    fn subset_ordering() {
        let s = ordered_subsets(2);
        assert_eq!(s, vec![vec![], vec![1], vec![2], vec![1, 2]]);
        assert_eq!(ordered_subsets(3).len(), 8);
    }

    #[test]
    fn enumeration_counts() {
        let d = enumerate_darboux_set(&f(7.0), &f(0.0), Family::PlusPlus, TOL).unwrap();
        assert_eq!(d.len(), 4);
        let d = enumerate_darboux_set(&f(3.0), &f(0.0), Family::PlusPlus, TOL).unwrap();
        assert_eq!(d.len(), 2);
        let d = enumerate_darboux_set(&f(11.0), &f(0.0), Family::PlusPlus, TOL).unwrap();
        assert_eq!(d.len(), 8);
        assert!(d.iter().all(|x| x.representation_defect < 1e-50 && x.wronskian.structure_ok()));
    }

    #[test]
    fn membership() {
        let r = classify_membership(2, &f(3.0), &f(0.0), TOL).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedNonmember);
        assert_eq!(r.factorizations, vec![(1, 1)]);
        let r = classify_membership(0, &f(7.0), &f(0.0), TOL).unwrap();
        assert_eq!(r.verdict, Verdict::CandidateMember);
        assert!(r.candidates.iter().all(|c| c.m == 0));
        let r = classify_membership(0, &f(2.0), &f(0.0), TOL).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedNonmember);
        let r = classify_membership(2, &f(1.0), &f(0.0), TOL).unwrap();
        assert_eq!(r.verdict, Verdict::CandidateMember);
        assert!(r
            .candidates
            .contains(&MembershipCandidate { m: 1, m0: 2, family: Family::PlusMinus }));
        assert!(classify_membership(3, &f(1.0), &f(0.0), TOL).is_err());
    }

    #[test]
    fn audit() {
        let s = nu7();
        let w = wronskian_of_subset(&s, &[1, 2], TOL).unwrap();
        let a = simple_zero_audit(&w, TOL).unwrap();
        assert_eq!(a.degree, 0);
        assert!(a.all_simple);
        let w = wronskian_of_subset(&s, &[1], TOL).unwrap();
        let a = simple_zero_audit(&w, TOL).unwrap();
        assert_eq!(a.histogram.get(&1), Some(&2));
        // roots of sqrt2 x^2 + 1 are +-i 2^(-1/4)
        let r = 2f64.powf(-0.25);
        assert!((a.min_distance.unwrap() - 2.0 * r).abs() < 1e-12);
        let roots = poly_roots(&w.p_i, TOL).unwrap();
        assert!(abs_f64(&sub(&roots[0].value, &cplx(P, 0.0, -r))) < 1e-15);
    }
}
