//! Reproduction suite: the worked examples and the randomized property
//! checks, each reported as one pass/fail line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Complex, Float};

use crate::darboux::{
    classify_membership, crum_potential, ordered_subsets, rational_difference, simple_zero_audit,
    wronskian_of_subset, Family, Verdict,
};
use crate::dynamics::{
    closed_form_nu7, closed_form_nu7_square, generating_function_check, integrate, DynamicsState,
    IntegrateOptions,
};
use crate::error::Result;
use crate::exactnum::{abs_f64, as_integer, cint, cplx, czero, poly_roots, sub, Poly, RationalFn};
use crate::linalg::max_abs;
use crate::locus::{higher_locus_residual, locus_residual, solve_locus_newton, trivial_monodromy_check, PoleConfiguration};
use crate::qes::{char_poly, eigenfunction, qes_spectrum, schrodinger_residual, Branch, QesProblem};
use crate::quasi::{ExpSign, QuasiRationalFunction};
use crate::stieltjes::{shape_sweep, solve_stieltjes, stieltjes_implies_locus};

/// Tolerances the criteria are judged against.
pub const DIGITS_30: f64 = 1e-30;
pub const DIGITS_20: f64 = 1e-20;
pub const SWEEP_FLOOR: f64 = 1e-2;
pub const DYNAMICS_TOL: f64 = 1e-8;
pub const PROPERTY_INSTANCES: usize = 100;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail
        )
    }
}

fn fl(prec: u32, x: f64) -> Float {
    Float::with_val(prec, x)
}

fn outcome(id: u8, title: &'static str, r: Result<(bool, String)>) -> CriterionResult {
    match r {
        Ok((passed, detail)) => CriterionResult {
            id,
            title,
            passed,
            detail,
        },
        Err(e) => CriterionResult {
            id,
            title,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// `nu = 7, l = 0`: eigenvalues `+-2 sqrt2`, eigenfunctions
/// `(1 -+ sqrt2 x^2) exp(-x^4/4)`.
pub fn criterion_1(prec: u32) -> CriterionResult {
    outcome(1, "QES spectrum at nu = 7, l = 0", (|| {
        let pr = QesProblem::from_f64(prec, 7.0, 0.0, ExpSign::Minus, Branch::MinusL);
        let spec = qes_spectrum(&pr, DIGITS_30)?;
        let s2 = Complex::with_val(prec, 2).sqrt();
        let two_s2 = Complex::with_val(prec, &s2 * 2u32);
        let expected = [Complex::with_val(prec, -&two_s2), two_s2];
        let mut worst_eig = 0.0f64;
        let mut worst_shape = 0.0f64;
        let mut worst_res = 0.0f64;
        for (j, e) in expected.iter().enumerate() {
            worst_eig = worst_eig.max(abs_f64(&sub(&spec.eigenvalues[j], e)) / abs_f64(e));
            let p = spec.polynomial(j);
            // lambda = -2 sqrt2 pairs with 1 + sqrt2 x^2
            let ratio = Complex::with_val(prec, p.coeff(2) / p.coeff(0));
            let want = if j == 0 { s2.clone() } else { Complex::with_val(prec, -&s2) };
            worst_shape = worst_shape.max(abs_f64(&sub(&ratio, &want)));
            let psi = eigenfunction(&spec, j)?;
            worst_res = worst_res.max(schrodinger_residual(&pr.potential(), &psi, &spec.eigenvalues[j], DIGITS_30)?);
        }
        let passed = spec.m == 2 && worst_eig < DIGITS_30 && worst_shape < DIGITS_30 && worst_res < DIGITS_30;
        Ok((
            passed,
            format!(
                "M = {}, eigenvalue rel err {worst_eig:.1e}, shape err {worst_shape:.1e}, residual {worst_res:.1e} (tol {DIGITS_30:e})",
                spec.m
            ),
        ))
    })())
}

/// Crum descendants `{1}` and `{1,2}` of `nu = 7, l = 0`.
pub fn criterion_2(prec: u32) -> CriterionResult {
    outcome(2, "Crum descendants of nu = 7, l = 0", (|| {
        let pr = QesProblem::from_f64(prec, 7.0, 0.0, ExpSign::Minus, Branch::MinusL);
        let spec = qes_spectrum(&pr, DIGITS_30)?;
        let base = pr.potential();
        let s2 = Complex::with_val(prec, 2).sqrt();

        let v1 = crum_potential(&base, &[1], &spec, DIGITS_30)?;
        let num = Poly::from_coeffs(prec, vec![Complex::with_val(prec, &s2 * -4i32), czero(prec), cint(prec, 8)]);
        let den = Poly::from_coeffs(prec, vec![cint(prec, 1), czero(prec), s2.clone()]);
        let target1 = RationalFn::from_poly(Poly::from_i64(prec, &[0, 0, -1, 0, 0, 0, 1]))
            .add(&RationalFn::new(num, &den * &den)?)?;
        let d1 = rational_difference(&v1.potential.to_rational()?, &target1);

        let v12 = crum_potential(&base, &[1, 2], &spec, DIGITS_30)?;
        let target12 = RationalFn::new(Poly::from_i64(prec, &[2, 0, 0, 0, 5, 0, 0, 0, 1]), Poly::from_i64(prec, &[0, 0, 1]))?;
        let d12 = rational_difference(&v12.potential.to_rational()?, &target12);

        let m1 = trivial_monodromy_check(&v1.potential, DIGITS_30)?;
        let m12 = trivial_monodromy_check(&v12.potential, DIGITS_30)?;
        let passed = d1 < DIGITS_30 && d12 < DIGITS_30 && m1.satisfied && m12.satisfied;
        Ok((
            passed,
            format!(
                "{{1}} diff {d1:.1e}, {{1,2}} diff {d12:.1e}, monodromy {:.1e} / {:.1e}",
                m1.max_abs, m12.max_abs
            ),
        ))
    })())
}

/// Parameters with `M` solutions in `family` at `l`: the `l + 1` branch
/// has `nu = 4M + 2l + 1`, the `-l` branch `nu = 4M - 2l - 1`.
pub fn grid_nu(family: Family, m: u32, l: u32) -> f64 {
    match family.branch() {
        Branch::LPlusOne => (4 * m + 2 * l + 1) as f64,
        Branch::MinusL => 4.0 * m as f64 - 2.0 * l as f64 - 1.0,
    }
}

/// Wronskian structure for every subset, `l` in `{0,1,2}`, `M` in `2..=5`.
pub fn criterion_3(prec: u32) -> CriterionResult {
    outcome(3, "Wronskian structure sweep", (|| {
        let mut cases = Vec::new();
        for l in 0..=2u32 {
            for m in 2..=5u32 {
                cases.push((Family::PlusMinus, l, m));
                if l == 0 {
                    cases.push((Family::PlusPlus, l, m));
                }
            }
        }
        let results: Vec<Result<(usize, usize, usize)>> = cases
            .par_iter()
            .map(|&(fam, l, m)| {
                let pr = fam.problem(&fl(prec, grid_nu(fam, m, l)), &fl(prec, l as f64));
                let spec = qes_spectrum(&pr, DIGITS_30)?;
                let (mut ok, mut total, mut multiple) = (0, 0, 0);
                for s in ordered_subsets(m as usize) {
                    if s.is_empty() {
                        continue;
                    }
                    let w = wronskian_of_subset(&spec, &s, DIGITS_30)?;
                    let k = s.len();
                    let exp_ok = w.origin_exponent == (k as f64) * pr.mu().to_f64() + (k * (k - 1) / 2) as f64;
                    let deg_ok = w.degree() == 2 * k * (m as usize - k);
                    total += 1;
                    if exp_ok && deg_ok && w.structure_ok() {
                        ok += 1;
                    }
                    if w.degree() > 0 && !simple_zero_audit(&w, 1e-20)?.all_simple {
                        multiple += 1;
                    }
                }
                Ok((ok, total, multiple))
            })
            .collect();
        let (mut ok, mut total, mut multiple) = (0, 0, 0);
        for r in results {
            let (a, b, c) = r?;
            ok += a;
            total += b;
            multiple += c;
        }
        Ok((
            ok == total,
            format!(
                "{ok}/{total} subsets with exact exponent, degree and P_I(0) != 0; audit: {multiple} with a repeated zero"
            ),
        ))
    })())
}

/// Locus examples at `nu = 1` and the multiplicity-two certificate.
pub fn criterion_4(prec: u32) -> CriterionResult {
    outcome(4, "Locus examples", (|| {
        let target = 2f64.powf(-0.25);
        let mut worst_iter = 0;
        let mut worst_err = 0.0f64;
        for k in -4..=4 {
            let a0 = 0.84 + 0.01 * k as f64;
            let c = PoleConfiguration::symmetric_simple(&[cplx(prec, a0, 0.0)], fl(prec, 1.0), fl(prec, 0.0));
            let sol = solve_locus_newton(&c, 1e-60, 15)?;
            worst_iter = worst_iter.max(sol.iterations);
            worst_err = worst_err.max((sol.config.points[0].0.real().to_f64() - target).abs());
        }
        let part_a = worst_iter <= 15 && worst_err < 1e-15;

        let m6 = Complex::with_val(prec, Complex::with_val(prec, -1) / 6u32);
        let a = Complex::with_val(prec, m6.sqrt()).sqrt();
        let cfg = PoleConfiguration::symmetric_simple(std::slice::from_ref(&a), fl(prec, 1.0), fl(prec, 0.0));
        let locus_b = max_abs(&locus_residual(&cfg)?);
        let sweep = shape_sweep(&cfg.locations(), &fl(prec, 1.0), &fl(prec, 0.0), 24, 0x5eed, DIGITS_30);
        let part_b = locus_b < DIGITS_30 && sweep.min_over_shapes > SWEEP_FLOOR;

        let r = Complex::with_val(prec, Complex::with_val(prec, 3) / 80u32);
        let a4 = Complex::with_val(prec, -r.sqrt());
        let a = Complex::with_val(prec, a4.sqrt()).sqrt();
        let nu = Float::with_val(prec, 51) / (Float::with_val(prec, 15).sqrt() * 4u32);
        let c = PoleConfiguration::new(vec![(a.clone(), 2), (Complex::with_val(prec, -&a), 2)], nu, fl(prec, 0.0), true);
        let higher = higher_locus_residual(&c).iter().flatten().map(abs_f64).fold(0.0, f64::max);
        let part_c = higher < DIGITS_30;
        Ok((
            part_a && part_b && part_c,
            format!(
                "(a) <= {worst_iter} iterations, err {worst_err:.1e}; (b) locus {locus_b:.1e}, min over {} shapes {:.3}; (c) higher residual {higher:.1e}",
                sweep.shapes.len(),
                sweep.min_over_shapes
            ),
        ))
    })())
}

/// Non-Darboux Stieltjes solutions and the membership verdict at `nu = 3`.
pub fn criterion_5(prec: u32) -> CriterionResult {
    outcome(5, "Non-Darboux Stieltjes solutions", (|| {
        let s3 = Float::with_val(prec, 3).sqrt();
        let branches = [Float::with_val(prec, -2 + s3.clone()), Float::with_val(prec, -2 - s3)];
        let mut found = [false, false];
        let mut worst = 0.0f64;
        for init_b in [cplx(prec, 0.0, 0.5), cplx(prec, 0.0, 1.5), cplx(prec, 0.3, 0.4)] {
            let init = QuasiRationalFunction::new(
                fl(prec, 0.0),
                ExpSign::Minus,
                vec![init_b.clone(), Complex::with_val(prec, -&init_b)],
                vec![cint(prec, 1), cint(prec, -1)],
            );
            let Ok(s) = solve_stieltjes(2, 2, &fl(prec, 0.0), ExpSign::Minus, &init, true, 1e-60) else {
                continue;
            };
            let a2 = Complex::with_val(prec, s.poles[0].square_ref());
            let b2 = Complex::with_val(prec, s.zeros[0].square_ref());
            let ratio = Complex::with_val(prec, &b2 / &a2);
            for (i, e) in branches.iter().enumerate() {
                if abs_f64(&sub(&ratio, &Complex::with_val(prec, e))) < DIGITS_20 {
                    let a4 = Complex::with_val(prec, a2.square_ref());
                    let want = Float::with_val(prec, 1 - Float::with_val(prec, e.square_ref())).recip();
                    let err = abs_f64(&sub(&a4, &Complex::with_val(prec, &want))) / want.to_f64().abs();
                    worst = worst.max(err);
                    found[i] |= err < DIGITS_20;
                }
            }
        }
        let report = classify_membership(2, &fl(prec, 3.0), &fl(prec, 0.0), 1e-30)?;
        let nonmember = report.verdict == Verdict::CertifiedNonmember;
        Ok((
            found.iter().any(|f| *f) && nonmember,
            format!(
                "branches recovered (-2+sqrt3, -2-sqrt3) = {found:?}, a^4 rel err {worst:.1e}; verdict {:?}",
                report.verdict
            ),
        ))
    })())
}

/// Integrated `nu = 7` trajectory against `X^2 = -i tan(sqrt2 t)/sqrt2`.
/// `t = 0` itself is a collision of `X` with `-X`, so the run starts just after it.
pub const DYNAMICS_T0: f64 = 1e-4;

pub fn criterion_6(prec: u32) -> CriterionResult {
    outcome(6, "Dynamics at nu = 7", (|| {
        let c = cint(prec, 1);
        let s0 = closed_form_nu7(DYNAMICS_T0, &c, &c)?;
        let tr = integrate(&s0, 0.5, &IntegrateOptions::default())?;
        let mut traj_err = 0.0f64;
        for s in &tr.states {
            let z2 = Complex::with_val(prec, s.points[0].0.square_ref());
            traj_err = traj_err.max(abs_f64(&sub(&z2, &closed_form_nu7_square(s.t, &c, &c))));
        }
        let mut cm = 0.0f64;
        let mut h = 0.0f64;
        for d in &tr.diagnostics {
            cm = cm.max(d.cm_zero.unwrap_or(f64::INFINITY)).max(d.cm_pole.unwrap_or(f64::INFINITY));
            h = h.max(abs_f64(&d.h)).max(abs_f64(&d.h_tilde)).max(abs_f64(&sub(&d.h, &d.h_tilde)));
        }
        let passed = traj_err < DYNAMICS_TOL && cm < DYNAMICS_TOL && h < DYNAMICS_TOL;
        Ok((
            passed,
            format!(
                "{} samples on [{DYNAMICS_T0:e}, 0.5]: max |X^2 - closed form| {traj_err:.1e}, CM {cm:.1e}, energies {h:.1e}",
                tr.states.len()
            ),
        ))
    })())
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    pub note: String,
}

/// A Darboux-chain eigenfunction `W(S + {j}) / W(S)` of the descendant
/// labelled by `S`, in zero/pole form, with its family parameters.
pub fn chain_eigenfunction(prec: u32, fam: Family, m: u32, l: u32, subset: &[usize], extra: usize) -> Result<QuasiRationalFunction> {
    let pr = fam.problem(&fl(prec, grid_nu(fam, m, l)), &fl(prec, l as f64));
    let spec = qes_spectrum(&pr, DIGITS_30)?;
    let mut bigger = subset.to_vec();
    bigger.push(extra);
    bigger.sort();
    let w0 = wronskian_of_subset(&spec, subset, DIGITS_30)?;
    let w1 = wronskian_of_subset(&spec, &bigger, DIGITS_30)?;
    let roots = |p: &Poly| -> Result<Vec<Complex>> {
        if p.degree().unwrap_or(0) == 0 {
            return Ok(Vec::new());
        }
        Ok(poly_roots(p, 1e-40)?.into_iter().flat_map(|r| std::iter::repeat_n(r.value, r.multiplicity as usize)).collect())
    };
    let mu = Float::with_val(prec, &w1.origin_exponent - &w0.origin_exponent);
    Ok(QuasiRationalFunction::new(mu, fam.eps(), roots(&w1.p_i)?, roots(&w0.p_i)?))
}

fn random_chain(rng: &mut ChaCha8Rng) -> (Family, u32, u32, Vec<usize>, usize) {
    let fam = if rng.gen_bool(0.5) { Family::PlusMinus } else { Family::PlusPlus };
    let l = if fam == Family::PlusPlus { 0 } else { rng.gen_range(0..=2) };
    let m = rng.gen_range(2..=4);
    let mut idx: Vec<usize> = (1..=m as usize).collect();
    for i in (1..idx.len()).rev() {
        idx.swap(i, rng.gen_range(0..=i));
    }
    let k = rng.gen_range(0..m as usize);
    let mut subset = idx[..k].to_vec();
    subset.sort();
    (fam, m, l, subset, idx[k])
}

/// The five randomized suites, `instances` draws each from `seed`.
pub fn property_suites(prec: u32, seed: u64, instances: usize) -> Vec<SuiteOutcome> {
    let mut out = Vec::new();

    // Stieltjes => locus, and Riccati certification of solver output.
    let draws: Vec<_> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..instances).map(|_| (random_chain(&mut rng), rng.gen::<u64>())).collect()
    };
    let implication: Vec<(bool, bool)> = draws
        .par_iter()
        .map(|((fam, m, l, subset, extra), s)| {
            let run = || -> Result<(bool, bool)> {
                let psi = chain_eigenfunction(prec, *fam, *m, *l, subset, *extra)?;
                let imp = stieltjes_implies_locus(&psi, 1e-40)?;
                // perturb and re-solve from scratch, then certify the result
                let mut rng = ChaCha8Rng::seed_from_u64(*s);
                let mut init = psi.clone();
                for z in init.zeros.iter_mut().chain(init.poles.iter_mut()) {
                    let d = cplx(prec, rng.gen_range(-1e-3..1e-3), rng.gen_range(-1e-3..1e-3));
                    *z += d;
                }
                let solved = solve_stieltjes(psi.zeros.len(), psi.poles.len(), &psi.mu, psi.eps, &init, false, 1e-50)?;
                let cert = stieltjes_implies_locus(&solved, 1e-45)?;
                Ok((imp.passed, cert.passed && cert.riccati_residual < 1e-30))
            };
            run().unwrap_or((false, false))
        })
        .collect();
    let pass_imp = implication.iter().filter(|r| r.0).count();
    let pass_ric = implication.iter().filter(|r| r.1).count();
    out.push(SuiteOutcome {
        name: "Stieltjes implies locus",
        passed: pass_imp,
        total: instances,
        note: "Darboux-chain eigenfunctions W(S+j)/W(S)".into(),
    });
    out.push(SuiteOutcome {
        name: "Riccati certification of solver output",
        passed: pass_ric,
        total: instances,
        note: "perturbed by 1e-3 and re-solved".into(),
    });

    // generating function gradients: analytic vs central differences
    let gf: Vec<bool> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0xa5a5 + i as u64));
            let nz = rng.gen_range(1..=3);
            let np = rng.gen_range(1..=3);
            let mut pts: Vec<(Complex, i32)> = Vec::new();
            while pts.len() < nz + np {
                let z = cplx(prec, rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2));
                if pts.iter().all(|(w, _)| abs_f64(&sub(&z, w)) > 0.3) {
                    let g = if pts.len() < nz { 1 } else { -1 };
                    pts.push((z, g));
                }
            }
            let Ok(state) = DynamicsState::new(pts, 0.0, prec) else {
                return false;
            };
            let (Ok(a), Ok(b)) = (generating_function_check(&state, 1e-6), generating_function_check(&state, 2e-6)) else {
                return false;
            };
            let ratio = b.fd_residual / a.fd_residual;
            a.momentum_residual < 1e-60 && a.fd_residual < 1e4 * 1e-12 && (3.0..5.0).contains(&ratio)
        })
        .collect();
    out.push(SuiteOutcome {
        name: "generating-function gradients",
        passed: gf.iter().filter(|b| **b).count(),
        total: instances,
        note: "fd step 1e-6; error ratio at 2e-6 in [3, 5]".into(),
    });

    // Darboux descendants are monodromy-free
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(17));
    let draws: Vec<_> = (0..instances).map(|_| random_chain(&mut rng)).collect();
    let mf: Vec<bool> = draws
        .par_iter()
        .map(|(fam, m, l, subset, _)| {
            let run = || -> Result<bool> {
                let pr = fam.problem(&fl(prec, grid_nu(*fam, *m, *l)), &fl(prec, *l as f64));
                let spec = qes_spectrum(&pr, DIGITS_30)?;
                let d = crum_potential(&pr.potential(), subset, &spec, DIGITS_30)?;
                Ok(trivial_monodromy_check(&d.potential, 1e-30)?.satisfied)
            };
            run().unwrap_or(false)
        })
        .collect();
    out.push(SuiteOutcome {
        name: "Darboux descendants monodromy-free",
        passed: mf.iter().filter(|b| **b).count(),
        total: instances,
        note: "random family, M in 2..=4, l in 0..=2, subset".into(),
    });

    // char_poly has integer coefficients on the grid
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(29));
    let mut ints = 0;
    for _ in 0..instances {
        let fam = Family::ALL[rng.gen_range(0..4)];
        let l = rng.gen_range(0..=4u32);
        let m = rng.gen_range(1..=8u32);
        let nu = grid_nu(fam, m, l) * -fam.eps().value() as f64;
        let pr = fam.problem(&fl(prec, nu), &fl(prec, l as f64));
        let ok = match as_integer(&pr.m_value(), 1e-40) {
            Some(mm) if mm == m as i64 => char_poly(&pr, m)
                .coeffs()
                .iter()
                .all(|c| c.imag().is_zero() && as_integer(c.real(), 0.0).is_some()),
            _ => false,
        };
        ints += ok as usize;
    }
    out.push(SuiteOutcome {
        name: "char_poly integer coefficients",
        passed: ints,
        total: instances,
        note: "random family, l in 0..=4, M in 1..=8".into(),
    });
    out
}

pub fn criterion_7(prec: u32, seed: u64) -> CriterionResult {
    let suites = property_suites(prec, seed, PROPERTY_INSTANCES);
    let passed = suites.iter().all(|s| s.passed == s.total);
    let detail = suites
        .iter()
        .map(|s| format!("{} {}/{}", s.name, s.passed, s.total))
        .collect::<Vec<_>>()
        .join("; ");
    CriterionResult {
        id: 7,
        title: "Property suites",
        passed,
        detail: format!("seed {seed}: {detail}"),
    }
}

pub fn run_criterion(id: u8, prec: u32, seed: u64) -> Option<CriterionResult> {
    Some(match id {
        1 => criterion_1(prec),
        2 => criterion_2(prec),
        3 => criterion_3(prec),
        4 => criterion_4(prec),
        5 => criterion_5(prec),
        6 => criterion_6(prec),
        7 => criterion_7(prec, seed),
        _ => return None,
    })
}

pub fn run_all(prec: u32, seed: u64) -> Vec<CriterionResult> {
    (1..=7).filter_map(|id| run_criterion(id, prec, seed)).collect()
}
