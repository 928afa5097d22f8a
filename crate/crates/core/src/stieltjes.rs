//! Stieltjes relations for quasi-rational eigenfunctions
//! `psi = x^mu prod(x - y_j) / prod(x - x_i) exp(eps x^4/4)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::exactnum::{abs_f64, as_integer, cint, cplx, czero, sub, Poly};
use crate::linalg::{lm_step, max_abs, zeros, Matrix};
use crate::locus::{locus_residual, LOCUS_COLLISION_FACTOR, trivial_monodromy_check, LocusReport, PoleConfiguration};
use crate::newton::{damped_newton, NewtonOptions};
use crate::potential::{Pole, RationalPotential};
use crate::quasi::{ExpSign, QuasiRationalFunction};

#[derive(Clone, Debug)]
pub struct StieltjesReport {
    pub pole_residuals: Vec<Complex>,
    pub zero_residuals: Vec<Complex>,
    pub max_abs: f64,
}

/// Points of `psi` with their charges (`+1` zeros, then `-1` poles), with
/// entries exactly at the origin removed and folded into the exponent.
struct Charged {
    points: Vec<Complex>,
    charges: Vec<i32>,
    mu: Complex,
    /// Index into `points` for each input zero then each input pole; `None`
    /// for folded origin entries.
    index: Vec<Option<usize>>,
}

fn charged(psi: &QuasiRationalFunction) -> Charged {
    let prec = psi.prec();
    let mut mu = Complex::with_val(prec, &psi.mu);
    let mut points = Vec::new();
    let mut charges = Vec::new();
    let mut index = Vec::new();
    for (list, q) in [(&psi.zeros, 1), (&psi.poles, -1)] {
        for z in list.iter() {
            if z.is_zero() {
                mu += q;
                index.push(None);
            } else {
                index.push(Some(points.len()));
                points.push(z.clone());
                charges.push(q);
            }
        }
    }
    Charged {
        points,
        charges,
        mu,
        index,
    }
}

fn residuals(points: &[Complex], charges: &[i32], mu: &Complex, eps: i64) -> Vec<Complex> {
    let prec = mu.prec().0;
    (0..points.len())
        .map(|p| {
            let z = &points[p];
            let mut acc = czero(prec);
            for (r, w) in points.iter().enumerate() {
                if r != p {
                    acc += Complex::with_val(prec, sub(z, w).recip() * charges[r]);
                }
            }
            let z3 = Complex::with_val(prec, Complex::with_val(prec, z.square_ref()) * z);
            acc += Complex::with_val(prec, z3 * eps);
            if !mu.is_zero() {
                acc += Complex::with_val(prec, mu / z);
            }
            acc
        })
        .collect()
}

fn jacobian(points: &[Complex], charges: &[i32], mu: &Complex, eps: i64) -> Matrix {
    let prec = mu.prec().0;
    let n = points.len();
    let mut j = zeros(prec, n, n);
    for p in 0..n {
        let z = &points[p];
        let z2 = Complex::with_val(prec, z.square_ref());
        let mut diag = Complex::with_val(prec, &z2 * (3 * eps));
        if !mu.is_zero() {
            diag -= Complex::with_val(prec, mu / &z2);
        }
        for r in 0..n {
            if r != p {
                let t = Complex::with_val(prec, sub(z, &points[r]).square().recip() * charges[r]);
                diag -= &t;
                j[p][r] = t;
            }
        }
        j[p][p] = diag;
    }
    j
}

fn check_disjoint(points: &[Complex]) -> Result<()> {
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if sub(a, b).is_zero() {
                return Err(Error::CoincidentZeroPole(format!("{a}")));
            }
        }
    }
    Ok(())
}

/// Residuals of the Stieltjes relations at every zero and pole. A zero or
/// pole exactly at the origin is absorbed into `mu` and reports 0.
pub fn stieltjes_residual(psi: &QuasiRationalFunction) -> Result<StieltjesReport> {
    let prec = psi.prec();
    let c = charged(psi);
    check_disjoint(&c.points)?;
    let r = residuals(&c.points, &c.charges, &c.mu, psi.eps.value());
    let pick = |i: Option<usize>| i.map(|k| r[k].clone()).unwrap_or_else(|| czero(prec));
    let k = psi.zeros.len();
    let zero_residuals: Vec<Complex> = c.index[..k].iter().map(|&i| pick(i)).collect();
    let pole_residuals: Vec<Complex> = c.index[k..].iter().map(|&i| pick(i)).collect();
    Ok(StieltjesReport {
        max_abs: max_abs(&r),
        pole_residuals,
        zero_residuals,
    })
}

fn negate(z: &Complex) -> Complex {
    Complex::with_val(z.prec().0, -z)
}

/// Representatives of `(a, -a)` pairs listed consecutively, plus whether an
/// entry at the origin closes the list.
fn pair_reps(list: &[Complex], tol: f64) -> Result<(Vec<Complex>, bool)> {
    let origin = list.len() % 2 == 1;
    let body = if origin {
        if !list[list.len() - 1].is_zero() {
            return Err(Error::InvalidArgument(
                "odd symmetric list must end with the origin".into(),
            ));
        }
        &list[..list.len() - 1]
    } else {
        list
    };
    let mut reps = Vec::new();
    for pair in body.chunks(2) {
        let s = Complex::with_val(pair[0].prec().0, &pair[0] + &pair[1]);
        if abs_f64(&s) > tol.max(1e-12) * abs_f64(&pair[0]).max(1.0) {
            return Err(Error::InvalidArgument("symmetric list must hold (a, -a) pairs".into()));
        }
        reps.push(pair[0].clone());
    }
    Ok((reps, origin))
}

/// Damped Newton on the Stieltjes relations for `K` zeros and `N` poles.
///
/// In symmetric mode `init` lists zeros and poles as consecutive `(a, -a)`
/// pairs; an odd count ends with an entry at the origin, which stays fixed
/// and is carried by the exponent.
pub fn solve_stieltjes(
    k: usize,
    n: usize,
    mu: &Float,
    eps: ExpSign,
    init: &QuasiRationalFunction,
    symmetric: bool,
    tol: f64,
) -> Result<QuasiRationalFunction> {
    if init.zeros.len() != k || init.poles.len() != n {
        return Err(Error::InvalidArgument(format!(
            "initial guess has shape ({}, {}), expected ({k}, {n})",
            init.zeros.len(),
            init.poles.len()
        )));
    }
    let prec = mu.prec();
    let mut start = init.clone();
    start.mu = mu.clone();
    start.eps = eps;
    if k + n == 0 {
        return Ok(start);
    }
    let e = eps.value();
    let opts = NewtonOptions::new(tol, 100);
    if !symmetric {
        let c = charged(&start);
        check_disjoint(&c.points)?;
        let charges = c.charges.clone();
        let m = c.mu.clone();
        let out = damped_newton(
            c.points.clone(),
            |x| residuals(x, &charges, &m, e),
            |x| jacobian(x, &charges, &m, e),
            collision_guard,
            &opts,
        )?;
        let mut result = start.clone();
        let nz = charges.iter().filter(|&&q| q == 1).count();
        let mut zi = out.x[..nz].iter();
        let mut pi = out.x[nz..].iter();
        for z in result.zeros.iter_mut().filter(|z| !z.is_zero()) {
            *z = zi.next().unwrap().clone();
        }
        for p in result.poles.iter_mut().filter(|p| !p.is_zero()) {
            *p = pi.next().unwrap().clone();
        }
        return Ok(result);
    }
    let (zr, z0) = pair_reps(&start.zeros, tol)?;
    let (pr, p0) = pair_reps(&start.poles, tol)?;
    let mut mu_eff = Complex::with_val(prec, mu);
    if z0 {
        mu_eff += 1;
    }
    if p0 {
        mu_eff -= 1;
    }
    let nzr = zr.len();
    let mut charges = Vec::new();
    for _ in 0..nzr {
        charges.extend([1, 1]);
    }
    for _ in 0..pr.len() {
        charges.extend([-1, -1]);
    }
    let expand = |reps: &[Complex]| -> Vec<Complex> {
        reps.iter().flat_map(|a| [a.clone(), negate(a)]).collect()
    };
    let reps: Vec<Complex> = zr.iter().chain(pr.iter()).cloned().collect();
    let result_reps = if reps.is_empty() {
        reps
    } else {
        damped_newton(
            reps,
            |r| {
                residuals(&expand(r), &charges, &mu_eff, e)
                    .into_iter()
                    .step_by(2)
                    .collect()
            },
            |r| {
                let full = jacobian(&expand(r), &charges, &mu_eff, e);
                let m = r.len();
                let mut j = zeros(prec, m, m);
                for a in 0..m {
                    for b in 0..m {
                        j[a][b] = sub(&full[2 * a][2 * b], &full[2 * a][2 * b + 1]);
                    }
                }
                j
            },
            |r| {
                let mut pts = expand(r);
                if z0 || p0 {
                    pts.push(czero(prec));
                }
                collision_guard(&pts)
            },
            &opts,
        )?
        .x
    };
    let mut result = start;
    result.zeros = expand(&result_reps[..nzr]);
    if z0 {
        result.zeros.push(czero(prec));
    }
    result.poles = expand(&result_reps[nzr..]);
    if p0 {
        result.poles.push(czero(prec));
    }
    Ok(result)
}

fn collision_guard(points: &[Complex]) -> Result<()> {
    let scale = points.iter().map(abs_f64).fold(1.0, f64::max);
    let threshold = LOCUS_COLLISION_FACTOR * scale;
    let mut distance = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            distance = distance.min(abs_f64(&sub(a, b)));
        }
    }
    if distance < threshold {
        Err(Error::Collision { distance, threshold })
    } else {
        Ok(())
    }
}

/// `x^6 - nu x^2 + 2 eps (sum y - sum x) x` with
/// `nu = eps (2N - 2K - 2mu - 3)`; the constant term is left to the eigenvalue.
pub fn infer_polynomial_part(psi: &QuasiRationalFunction) -> Poly {
    let prec = psi.prec();
    let e = psi.eps.value();
    let kk = psi.zeros.len() as i64;
    let nn = psi.poles.len() as i64;
    let mu2 = Float::with_val(prec, &psi.mu * 2u32);
    let nu = Float::with_val(prec, Float::with_val(prec, (2 * nn - 2 * kk - 3) - mu2) * e);
    let mut lin = czero(prec);
    for y in &psi.zeros {
        lin += y;
    }
    for x in &psi.poles {
        lin -= x;
    }
    let mut c = vec![czero(prec); 7];
    c[1] = Complex::with_val(prec, lin * (2 * e));
    c[2] = Complex::with_val(prec, -nu);
    c[6] = cint(prec, 1);
    Poly::from_coeffs(prec, c)
}

/// `V = P + mu(mu-1)/x^2 + sum 2/(x - x_i)^2` for `psi`, with `P` from
/// [`infer_polynomial_part`] and an origin pole folded into `mu`.
pub fn implied_potential(psi: &QuasiRationalFunction) -> RationalPotential {
    let prec = psi.prec();
    let c = charged(psi);
    // l(l+1) = mu(mu-1) with l = mu - 1
    let ell = Float::with_val(prec, c.mu.real() - 1u32);
    RationalPotential {
        poly_part: infer_polynomial_part(psi),
        ell,
        poles: psi
            .poles
            .iter()
            .filter(|p| !p.is_zero())
            .map(|p| Pole {
                location: p.clone(),
                mult: 1,
            })
            .collect(),
        symmetric: false,
    }
}

#[derive(Clone, Debug)]
pub struct ImplicationReport {
    pub stieltjes_max: f64,
    pub monodromy: LocusReport,
    /// `max |locus_residual|` when the implied potential is even; `None`
    /// otherwise.
    pub locus_max: Option<f64>,
    /// Relative size of the non-constant part of `f' + f^2 - V`.
    pub riccati_residual: f64,
    pub lambda: Complex,
    pub nu: Complex,
    pub passed: bool,
}

/// Riccati identity `f' + f^2 = V - lambda` for `f = psi'/psi`; returns the
/// residual and `lambda`.
pub fn riccati_check(psi: &QuasiRationalFunction, v: &RationalPotential) -> Result<(f64, Complex)> {
    let prec = psi.prec();
    let f = psi.log_derivative()?;
    let ff = f.mul(&f)?;
    let lhs = f.derivative()?.add(&ff)?;
    let vr = v.to_rational()?;
    // f' + f^2 - V over a common denominator, scaled by its two operands
    let a = &lhs.numerator * &vr.denominator;
    let b = &vr.numerator * &lhs.denominator;
    let den = &lhs.denominator * &vr.denominator;
    let scale = a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE);
    let (q, r) = (&a - &b).div_rem(&den)?;
    let mut res = r.max_abs();
    for k in 1..=q.degree().unwrap_or(0) {
        res = res.max(abs_f64(&q.coeff(k)) * den.max_abs());
    }
    let res = res / scale;
    let lambda = Complex::with_val(prec, -q.coeff(0));
    Ok((res, lambda))
}

/// Assemble the implied potential and run the monodromy, locus and
/// Riccati checks on it.
pub fn stieltjes_implies_locus(psi: &QuasiRationalFunction, tol: f64) -> Result<ImplicationReport> {
    let prec = psi.prec();
    let st = stieltjes_residual(psi)?;
    let v = implied_potential(psi);
    let monodromy = trivial_monodromy_check(&v, tol.sqrt().max(tol * 1e6))?;
    let lin = abs_f64(&v.poly_part.coeff(1));
    let locus_max = if lin <= tol && !v.poles.is_empty() {
        let nu = Float::with_val(prec, v.nu().real());
        let cfg = PoleConfiguration::new(
            v.poles.iter().map(|p| (p.location.clone(), 1)).collect(),
            nu,
            v.ell.clone(),
            false,
        );
        Some(max_abs(&locus_residual(&cfg)?))
    } else if v.poles.is_empty() {
        Some(0.0)
    } else {
        None
    };
    let (riccati_residual, lambda) = riccati_check(psi, &v)?;
    let passed = st.max_abs <= tol
        && monodromy.max_abs <= 10.0 * tol.sqrt().max(tol * 1e6)
        && locus_max.is_none_or(|m| m <= 10.0 * tol.max(st.max_abs))
        && riccati_residual <= tol.sqrt().max(tol * 1e6);
    Ok(ImplicationReport {
        stieltjes_max: st.max_abs,
        monodromy,
        locus_max,
        riccati_residual,
        lambda,
        nu: v.nu(),
        passed,
    })
}

#[derive(Clone, Debug)]
pub struct ShapeResult {
    pub eps: ExpSign,
    pub mu: Float,
    pub k: usize,
    /// Smallest max-residual found over the free zeros.
    pub best_residual: f64,
    pub best_zeros: Vec<Complex>,
}

#[derive(Clone, Debug)]
pub struct ShapeSweep {
    pub shapes: Vec<ShapeResult>,
    pub min_over_shapes: f64,
}

/// Admissible `(eps, mu, K)` for fixed poles at `(nu, l)`: `mu` in
/// `{-l, l+1}` and `K = (2N - 2mu - 3 - eps nu)/2` a non-negative integer.
pub fn admissible_shapes(nu: &Float, ell: &Float, n: usize, tol: f64) -> Vec<(ExpSign, Float, usize)> {
    let prec = nu.prec();
    let mut out = Vec::new();
    for eps in [ExpSign::Minus, ExpSign::Plus] {
        for mu in [Float::with_val(prec, -ell), Float::with_val(prec, ell + 1u32)] {
            let twice_k = Float::with_val(
                prec,
                Float::with_val(prec, (2 * n as i64 - 3) - Float::with_val(prec, &mu * 2u32))
                    - Float::with_val(prec, nu * eps.value()),
            );
            if let Some(t) = as_integer(&twice_k, tol) {
                if t >= 0 && t % 2 == 0 {
                    let k = (t / 2) as usize;
                    if !out.iter().any(|(e, m, kk): &(ExpSign, Float, usize)| *e == eps && *kk == k && *m == mu) {
                        out.push((eps, mu, k));
                    }
                }
            }
        }
    }
    out
}

fn least_squares_zeros(
    poles: &[Complex],
    mu: &Complex,
    eps: i64,
    y0: Vec<Complex>,
    iters: usize,
) -> (f64, Vec<Complex>) {
    let k = y0.len();
    let build = |y: &[Complex]| -> (Vec<Complex>, Vec<i32>) {
        let pts: Vec<Complex> = y.iter().chain(poles).cloned().collect();
        let q: Vec<i32> = (0..k).map(|_| 1).chain(poles.iter().map(|_| -1)).collect();
        (pts, q)
    };
    let eval = |y: &[Complex]| -> Vec<Complex> {
        let (pts, q) = build(y);
        residuals(&pts, &q, mu, eps)
    };
    let mut y = y0;
    let mut r = eval(&y);
    let norm2 = |v: &[Complex]| v.iter().map(|c| abs_f64(c).powi(2)).sum::<f64>();
    let mut cost = norm2(&r);
    let mut damping = 1e-3;
    for _ in 0..iters {
        if !cost.is_finite() || k == 0 {
            break;
        }
        let (pts, q) = build(&y);
        let full = jacobian(&pts, &q, mu, eps);
        let j: Matrix = full.iter().map(|row| row[..k].to_vec()).collect();
        let Ok(dx) = lm_step(&j, &r, damping, 1e-300) else {
            damping *= 10.0;
            continue;
        };
        let trial: Vec<Complex> = y.iter().zip(&dx).map(|(a, d)| sub(a, d)).collect();
        let rt = eval(&trial);
        let ct = norm2(&rt);
        if ct.is_finite() && ct < cost {
            y = trial;
            r = rt;
            cost = ct;
            damping = (damping * 0.3).max(1e-15);
        } else {
            damping *= 10.0;
            if damping > 1e12 {
                break;
            }
        }
    }
    let m = max_abs(&r);
    (if m.is_finite() { m } else { f64::INFINITY }, y)
}

/// For poles fixed at `poles`, the best Stieltjes residual reachable over
/// the zeros of every admissible shape. Zeros are fitted by multi-start
/// Levenberg-Marquardt from `starts` seeded points.
pub fn shape_sweep(poles: &[Complex], nu: &Float, ell: &Float, starts: usize, seed: u64, tol: f64) -> ShapeSweep {
    let prec = nu.prec();
    let shapes = admissible_shapes(nu, ell, poles.len(), tol);
    let scale = poles.iter().map(abs_f64).fold(1.0, f64::max);
    let results: Vec<ShapeResult> = shapes
        .into_par_iter()
        .enumerate()
        .map(|(si, (eps, mu, k))| {
            let muc = Complex::with_val(prec, &mu);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (si as u64).wrapping_mul(0x9e37_79b9));
            let runs = if k == 0 { 1 } else { starts.max(1) };
            let mut best = (f64::INFINITY, Vec::new());
            for _ in 0..runs {
                let y0: Vec<Complex> = (0..k)
                    .map(|_| {
                        let r = scale * rng.gen_range(0.05..2.0);
                        let t = rng.gen_range(0.0..std::f64::consts::TAU);
                        cplx(prec, r * t.cos(), r * t.sin())
                    })
                    .collect();
                let cand = least_squares_zeros(poles, &muc, eps.value(), y0, 200);
                if cand.0 < best.0 {
                    best = cand;
                }
            }
            ShapeResult {
                eps,
                mu,
                k,
                best_residual: best.0,
                best_zeros: best.1,
            }
        })
        .collect();
    let min_over_shapes = results.iter().map(|s| s.best_residual).fold(f64::INFINITY, f64::min);
    ShapeSweep {
        shapes: results,
        min_over_shapes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;
    const TOL: f64 = 1e-40;

    fn fl(x: f64) -> Float {
        Float::with_val(P, x)
    }

    fn omega() -> Complex {
        let s3 = Float::with_val(P, 3).sqrt();
        Complex::with_val(P, (-0.5, Float::with_val(P, s3 / 2u32)))
    }

    fn fourth_root(z: &Complex) -> Complex {
        Complex::with_val(P, z.sqrt_ref()).sqrt()
    }

    fn k1_n1() -> QuasiRationalFunction {
        let w = omega();
        let x4 = Complex::with_val(P, Complex::with_val(P, 1 - &w).recip());
        let x1 = fourth_root(&x4);
        let y1 = Complex::with_val(P, &w * &x1);
        QuasiRationalFunction::new(fl(0.0), ExpSign::Minus, vec![y1], vec![x1])
    }

    fn half_pair() -> QuasiRationalFunction {
        let a = fourth_root(&Complex::with_val(P, 0.5));
        QuasiRationalFunction::new(fl(0.0), ExpSign::Plus, vec![], vec![a.clone(), negate(&a)])
    }

    #[test]
    fn cube_root_example_is_exact() {
        let r = stieltjes_residual(&k1_n1()).unwrap();
        assert!(r.max_abs < 1e-60);
        assert_eq!((r.zero_residuals.len(), r.pole_residuals.len()), (1, 1));
    }

    #[test]
    fn empty_function_is_vacuous() {
        let psi = QuasiRationalFunction::new(fl(0.0), ExpSign::Minus, vec![], vec![]);
        let r = stieltjes_residual(&psi).unwrap();
        assert_eq!(r.max_abs, 0.0);
        let s = solve_stieltjes(0, 0, &fl(0.0), ExpSign::Minus, &psi, true, TOL).unwrap();
        assert!(s.zeros.is_empty() && s.poles.is_empty());
        let imp = stieltjes_implies_locus(&psi, TOL).unwrap();
        assert!(imp.passed);
    }

    #[test]
    fn symmetric_pole_pair() {
        let r = stieltjes_residual(&half_pair()).unwrap();
        assert!(r.max_abs < 1e-60);
    }

    #[test]
    fn coincident_zero_and_pole() {
        let psi = QuasiRationalFunction::new(fl(0.0), ExpSign::Minus, vec![cint(P, 1)], vec![cint(P, 1)]);
        assert!(matches!(stieltjes_residual(&psi), Err(Error::CoincidentZeroPole(_))));
    }

    #[test]
    fn polynomial_part_examples() {
        let psi = k1_n1();
        let p = infer_polynomial_part(&psi);
        let w = omega();
        let expect = Complex::with_val(P, Complex::with_val(P, &w - 1) * &psi.poles[0] * -2i32);
        assert!(abs_f64(&sub(&p.coeff(1), &expect)) < 1e-60);
        assert!(abs_f64(&sub(&p.coeff(2), &cint(P, -3))) < 1e-70);
        let q = infer_polynomial_part(&half_pair());
        assert!(q.coeff(1).is_zero());
        assert!(abs_f64(&sub(&q.coeff(2), &cint(P, -1))) < 1e-70);
    }

    #[test]
    fn non_darboux_solution() {
        let init = QuasiRationalFunction::new(
            fl(0.0),
            ExpSign::Minus,
            vec![cplx(P, 0.0, 0.5), cplx(P, 0.0, -0.5)],
            vec![cplx(P, 1.0, 0.0), cplx(P, -1.0, 0.0)],
        );
        let s = solve_stieltjes(2, 2, &fl(0.0), ExpSign::Minus, &init, true, TOL).unwrap();
        let a2 = Complex::with_val(P, s.poles[0].square_ref());
        let b2 = Complex::with_val(P, s.zeros[0].square_ref());
        let ratio = Complex::with_val(P, &b2 / &a2);
        let s3 = Float::with_val(P, 3).sqrt();
        let branches = [Float::with_val(P, -2 + s3.clone()), Float::with_val(P, -2 - s3)];
        let e = branches
            .iter()
            .find(|e| abs_f64(&sub(&ratio, &Complex::with_val(P, *e))) < 1e-30)
            .expect("ratio on a branch");
        let a4 = Complex::with_val(P, a2.square_ref());
        let target = Float::with_val(P, 1 - Float::with_val(P, e.square_ref())).recip();
        assert!(abs_f64(&sub(&a4, &Complex::with_val(P, target))) < 1e-30);
        let imp = stieltjes_implies_locus(&s, TOL).unwrap();
        assert!(imp.passed, "{imp:?}");
    }

    #[test]
    fn origin_zero_is_folded() {
        let init = QuasiRationalFunction::new(
            fl(0.0),
            ExpSign::Minus,
            vec![czero(P)],
            vec![cplx(P, 0.8, 0.0), cplx(P, -0.8, 0.0)],
        );
        let s = solve_stieltjes(1, 2, &fl(0.0), ExpSign::Minus, &init, true, TOL).unwrap();
        assert!(s.zeros[0].is_zero());
        let a4 = Complex::with_val(P, Complex::with_val(P, s.poles[0].square_ref()).square_ref());
        assert!(abs_f64(&sub(&a4, &Complex::with_val(P, 0.5))) < 1e-40);
        assert!(stieltjes_implies_locus(&s, TOL).unwrap().passed);
    }

    #[test]
    fn general_mode_recovers_cube_root_example() {
        let exact = k1_n1();
        let mut init = exact.clone();
        init.zeros[0] = Complex::with_val(P, &init.zeros[0] + cplx(P, 0.01, -0.02));
        init.poles[0] = Complex::with_val(P, &init.poles[0] + cplx(P, -0.01, 0.01));
        let s = solve_stieltjes(1, 1, &fl(0.0), ExpSign::Minus, &init, false, TOL).unwrap();
        assert!(abs_f64(&sub(&s.poles[0], &exact.poles[0])) < 1e-40);
        let imp = stieltjes_implies_locus(&s, TOL).unwrap();
        assert!(imp.passed, "{imp:?}");
        assert!(imp.locus_max.is_none());
    }

    #[test]
    fn riccati_reads_off_lambda() {
        // psi = exp(-x^4/4) for x^6 - 3x^2: lambda = 0
        let psi = QuasiRationalFunction::new(fl(0.0), ExpSign::Minus, vec![], vec![]);
        let v = implied_potential(&psi);
        let (r, l) = riccati_check(&psi, &v).unwrap();
        assert!(r < 1e-60 && abs_f64(&l) < 1e-60);
    }

    #[test]
    fn minus_one_sixth_branch_has_no_eigenfunction() {
        let a = fourth_root(&Complex::with_val(P, Complex::with_val(P, -1) / 6u32));
        let poles = vec![a.clone(), negate(&a)];
        let cfg = PoleConfiguration::symmetric_simple(&[a], fl(1.0), fl(0.0));
        assert!(max_abs(&locus_residual(&cfg).unwrap()) < 1e-60);
        let sweep = shape_sweep(&poles, &fl(1.0), &fl(0.0), 16, 7, 1e-30);
        assert_eq!(sweep.shapes.len(), 3);
        assert!(sweep.min_over_shapes > 1e-2, "{}", sweep.min_over_shapes);
    }

    #[test]
    fn half_branch_is_reached_by_sweep() {
        let a = fourth_root(&Complex::with_val(P, 0.5));
        let sweep = shape_sweep(&[a.clone(), negate(&a)], &fl(1.0), &fl(0.0), 4, 1, 1e-30);
        assert!(sweep.min_over_shapes < 1e-60);
    }
}
