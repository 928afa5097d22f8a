//! Trivial-monodromy conditions on the poles of `x^6 - nu x^2 + l(l+1)/x^2 + sum k(k+1)/(x - x_i)^2`.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::exactnum::{
    abs_f64, as_integer, cint, czero, laurent_expand, poly_roots, sub, RationalFn,
};
use crate::linalg::{zeros, Matrix};
use crate::newton::{damped_newton, NewtonOptions, NewtonOutcome};
use crate::potential::{Pole, RationalPotential};

pub const LOCUS_COLLISION_FACTOR: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct PoleConfiguration {
    /// `(x_i, k_i)`
    pub points: Vec<(Complex, u32)>,
    pub nu: Float,
    pub ell: Float,
    /// Points listed as consecutive pairs `(a, -a)` when set.
    pub symmetric: bool,
}

impl PoleConfiguration {
    pub fn new(points: Vec<(Complex, u32)>, nu: Float, ell: Float, symmetric: bool) -> Self {
        PoleConfiguration {
            points,
            nu,
            ell,
            symmetric,
        }
    }

    /// Symmetric configuration `{a_1, -a_1, a_2, -a_2, ...}` of simple poles.
    pub fn symmetric_simple(reps: &[Complex], nu: Float, ell: Float) -> Self {
        let mut points = Vec::with_capacity(2 * reps.len());
        for a in reps {
            points.push((a.clone(), 1));
            points.push((Complex::with_val(a.prec().0, -a), 1));
        }
        PoleConfiguration::new(points, nu, ell, true)
    }

    pub fn prec(&self) -> u32 {
        self.nu.prec()
    }

    pub fn locations(&self) -> Vec<Complex> {
        self.points.iter().map(|(x, _)| x.clone()).collect()
    }

    fn with_locations(&self, xs: &[Complex]) -> Self {
        let mut c = self.clone();
        for (p, x) in c.points.iter_mut().zip(xs) {
            p.0 = x.clone();
        }
        c
    }

    fn origin_strength(&self) -> Complex {
        let p = self.prec();
        let l1 = Float::with_val(p, &self.ell + 1u32);
        Complex::with_val(p, Float::with_val(p, &self.ell * l1))
    }

    pub fn to_potential(&self) -> RationalPotential {
        let mut v = RationalPotential::canonical(&self.nu, &self.ell);
        v.symmetric = self.symmetric;
        v.poles = self
            .points
            .iter()
            .map(|(x, k)| Pole {
                location: x.clone(),
                mult: *k,
            })
            .collect();
        v
    }

    /// Smallest distance between two points or between a point and the
    /// origin, and the collision threshold `1e-6 * max(max |x_i|, 1)`.
    pub fn separation(&self) -> (f64, f64) {
        separation(&self.locations(), LOCUS_COLLISION_FACTOR)
    }

    pub fn check_collision(&self) -> Result<()> {
        let (d, thr) = self.separation();
        if d < thr {
            Err(Error::Collision {
                distance: d,
                threshold: thr,
            })
        } else {
            Ok(())
        }
    }
}

pub(crate) fn separation(xs: &[Complex], factor: f64) -> (f64, f64) {
    let scale = xs.iter().map(abs_f64).fold(1.0, f64::max);
    let mut d = f64::INFINITY;
    for (i, a) in xs.iter().enumerate() {
        d = d.min(abs_f64(a));
        for b in &xs[i + 1..] {
            d = d.min(abs_f64(&sub(a, b)));
        }
    }
    (d, factor * scale)
}

#[derive(Clone, Debug)]
pub struct PoleEntry {
    pub location: Complex,
    /// `k` with `c_{-2} = k(k+1)`; `None` when `c_{-2}` is not of that form.
    pub mult: Option<u32>,
    pub leading: Complex,
    pub leading_ok: bool,
    /// `(order, coefficient)` for orders `-1, 1, 3, ..., 2k-1`.
    pub residuals: Vec<(i64, Complex)>,
}

#[derive(Clone, Debug)]
pub struct LocusReport {
    pub entries: Vec<PoleEntry>,
    pub max_abs: f64,
    pub satisfied: bool,
}

/// `k >= 0` with `k(k+1) = c` within `tol`.
fn strength_to_k(c: &Complex, tol: f64) -> Option<u32> {
    if abs_f64(&Complex::with_val(c.prec().0, c.imag())) > tol {
        return None;
    }
    let cf = c.real().to_f64();
    let k = ((-1.0 + (1.0 + 4.0 * cf).max(0.0).sqrt()) / 2.0).round();
    if k < 0.0 {
        return None;
    }
    let target = Complex::with_val(c.prec().0, (k * (k + 1.0)) as i64);
    if abs_f64(&sub(c, &target)) <= tol {
        Some(k as u32)
    } else {
        None
    }
}

fn pole_entry(f: &RationalFn, center: &Complex, known_k: Option<u32>, tol: f64) -> Result<PoleEntry> {
    let prec = f.prec();
    let probe = laurent_expand(f, center, -2, 1)?;
    if probe.pole_order > 2 {
        return Err(Error::PoleOrderTooHigh {
            order: probe.pole_order,
            location: format!("{center}"),
        });
    }
    let leading = probe.coeffs[0].clone();
    let k = known_k.or_else(|| strength_to_k(&leading, tol));
    let leading_ok = match k {
        Some(k) => abs_f64(&sub(&leading, &cint(prec, (k * (k + 1)) as i64))) <= tol,
        None => false,
    };
    let kk = k.unwrap_or(1) as i64;
    let series = laurent_expand(f, center, -1, (2 * kk + 1) as usize)?;
    let residuals = (-1..=2 * kk - 1)
        .step_by(2)
        .map(|o| (o, series.coeff(o)))
        .collect();
    Ok(PoleEntry {
        location: center.clone(),
        mult: k,
        leading,
        leading_ok,
        residuals,
    })
}

fn finish(entries: Vec<PoleEntry>, tol: f64) -> LocusReport {
    let max_abs = entries
        .iter()
        .flat_map(|e| e.residuals.iter().map(|(_, c)| abs_f64(c)))
        .fold(0.0, f64::max);
    let satisfied = max_abs <= tol && entries.iter().all(|e| e.leading_ok);
    LocusReport {
        entries,
        max_abs,
        satisfied,
    }
}

/// Odd Laurent coefficients of `V` at each listed pole, and at the origin
/// when `l` is an integer with `l(l+1) != 0`.
pub fn trivial_monodromy_check(v: &RationalPotential, tol: f64) -> Result<LocusReport> {
    let f = v.to_rational()?;
    let prec = v.prec();
    let mut entries = Vec::new();
    if let Some(l) = as_integer(&v.ell, tol) {
        if l != 0 && l != -1 {
            let k = if l > 0 { l } else { -1 - l } as u32;
            entries.push(pole_entry(&f, &czero(prec), Some(k), tol)?);
        }
    }
    for p in &v.poles {
        let mut e = pole_entry(&f, &p.location, None, tol)?;
        e.leading_ok &= e.mult == Some(p.mult);
        entries.push(e);
    }
    Ok(finish(entries, tol))
}

/// As [`trivial_monodromy_check`], for a potential given only as a rational
/// function; poles are located as roots of the denominator.
pub fn trivial_monodromy_check_rational(f: &RationalFn, tol: f64) -> Result<LocusReport> {
    let mut entries = Vec::new();
    if f.denominator.degree().unwrap_or(0) > 0 {
        for r in poly_roots(&f.denominator, tol)? {
            entries.push(pole_entry(f, &r.value, None, tol)?);
        }
    }
    Ok(finish(entries, tol))
}

/// `sum_{j != i} 2/(x_i - x_j)^3 + l(l+1)/x_i^3 + nu x_i - 3 x_i^5` for
/// configurations of simple poles (minus half the first odd Laurent
/// coefficient).
pub fn locus_residual(config: &PoleConfiguration) -> Result<Vec<Complex>> {
    if config.points.iter().any(|(_, k)| *k != 1) {
        return Err(Error::InvalidArgument(
            "locus_residual needs simple poles; use higher_locus_residual".into(),
        ));
    }
    Ok(locus_residual_at(config, &config.locations()))
}

fn locus_residual_at(config: &PoleConfiguration, xs: &[Complex]) -> Vec<Complex> {
    let p = config.prec();
    let ll = config.origin_strength();
    (0..xs.len())
        .map(|i| {
            let x = &xs[i];
            let mut acc = czero(p);
            for (j, y) in xs.iter().enumerate() {
                if j != i {
                    let d = sub(x, y);
                    let d3 = Complex::with_val(p, Complex::with_val(p, d.square_ref()) * &d);
                    acc += Complex::with_val(p, d3.recip() * 2u32);
                }
            }
            let x2 = Complex::with_val(p, x.square_ref());
            let x3 = Complex::with_val(p, &x2 * x);
            let x5 = Complex::with_val(p, &x3 * &x2);
            if !ll.is_zero() {
                acc += Complex::with_val(p, &ll / &x3);
            }
            acc += Complex::with_val(p, x * &config.nu);
            acc -= Complex::with_val(p, x5 * 3u32);
            acc
        })
        .collect()
}

fn locus_jacobian(config: &PoleConfiguration, xs: &[Complex]) -> Matrix {
    let p = config.prec();
    let n = xs.len();
    let ll = config.origin_strength();
    let mut j = zeros(p, n, n);
    for i in 0..n {
        let x = &xs[i];
        let x4 = Complex::with_val(p, Complex::with_val(p, x.square_ref()).square_ref());
        let mut diag = Complex::with_val(p, &config.nu);
        diag -= Complex::with_val(p, &x4 * 15u32);
        if !ll.is_zero() {
            diag -= Complex::with_val(p, Complex::with_val(p, &ll * 3u32) / &x4);
        }
        for k in 0..n {
            if k != i {
                let d = sub(x, &xs[k]);
                let d4 = Complex::with_val(p, Complex::with_val(p, d.square_ref()).square_ref());
                let t = Complex::with_val(p, d4.recip() * 6u32);
                diag -= &t;
                j[i][k] = t;
            }
        }
        j[i][i] = diag;
    }
    j
}

/// Each point `x_i` and `s = 1..k_i`:
/// `P^{(2s-1)}(x_i) - (2s)! sum_{j != i} k_j(k_j+1)/(x_i - x_j)^{2s+1}`,
/// with `P = x^6 - nu x^2 + l(l+1)/x^2`. This is `(2s-1)!` times the
/// Laurent coefficient of order `2s-1`.
pub fn higher_locus_residual(config: &PoleConfiguration) -> Vec<Vec<Complex>> {
    let p = config.prec();
    let v = RationalPotential::canonical(&config.nu, &config.ell);
    config
        .points
        .iter()
        .enumerate()
        .map(|(i, (x, k))| {
            (1..=*k as i32)
                .map(|s| {
                    let mut acc = v.background_derivative((2 * s - 1) as usize, x);
                    let mut fact = Float::with_val(p, 1);
                    for q in 2..=(2 * s as u32) {
                        fact *= q;
                    }
                    for (j, (y, kj)) in config.points.iter().enumerate() {
                        if j != i {
                            let d = sub(x, y);
                            let dp = Complex::with_val(p, rug::ops::Pow::pow(d, 2 * s + 1)).recip();
                            let w = (*kj as u64) * (*kj as u64 + 1);
                            acc -= Complex::with_val(p, dp * &fact) * w;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct LocusSolution {
    pub config: PoleConfiguration,
    pub iterations: usize,
    pub residual: f64,
    pub history: Vec<f64>,
    /// Iterates of the unknowns (representatives in symmetric mode).
    pub iterates: Vec<Vec<Complex>>,
}

/// Damped Newton on [`locus_residual`]. In symmetric mode the unknowns are
/// the representatives `a_r` of the pairs `(a_r, -a_r)`.
pub fn solve_locus_newton(init: &PoleConfiguration, tol: f64, max_iter: usize) -> Result<LocusSolution> {
    if init.points.iter().any(|(_, k)| *k != 1) {
        return Err(Error::Unsupported(
            "Newton solve of configurations with multiple poles".into(),
        ));
    }
    let opts = NewtonOptions::new(tol, max_iter);
    let n = init.points.len();
    let out: NewtonOutcome = if init.symmetric {
        if n % 2 == 1 {
            return Err(Error::InvalidArgument("symmetric configuration needs pairs".into()));
        }
        let expand = |reps: &[Complex]| -> Vec<Complex> {
            reps.iter()
                .flat_map(|a| [a.clone(), Complex::with_val(a.prec().0, -a)])
                .collect()
        };
        let reps: Vec<Complex> = init.points.iter().step_by(2).map(|(x, _)| x.clone()).collect();
        damped_newton(
            reps,
            |r| {
                let xs = expand(r);
                locus_residual_at(init, &xs).into_iter().step_by(2).collect()
            },
            |r| {
                let xs = expand(r);
                let full = locus_jacobian(init, &xs);
                let m = r.len();
                let mut j = zeros(init.prec(), m, m);
                for a in 0..m {
                    for b in 0..m {
                        j[a][b] = sub(&full[2 * a][2 * b], &full[2 * a][2 * b + 1]);
                    }
                }
                j
            },
            |r| init.with_locations(&expand(r)).check_collision(),
            &opts,
        )
        .map_err(|e| match e {
            Error::IterationCap { max_iter, residual, last } => Error::IterationCap {
                max_iter,
                residual,
                last: expand(&last),
            },
            e => e,
        })?
    } else {
        damped_newton(
            init.locations(),
            |xs| locus_residual_at(init, xs),
            |xs| locus_jacobian(init, xs),
            |xs| init.with_locations(xs).check_collision(),
            &opts,
        )?
    };
    let xs = if init.symmetric {
        out.x
            .iter()
            .flat_map(|a| [a.clone(), Complex::with_val(a.prec().0, -a)])
            .collect::<Vec<_>>()
    } else {
        out.x.clone()
    };
    Ok(LocusSolution {
        config: init.with_locations(&xs),
        iterations: out.iterations,
        residual: out.residual,
        history: out.history,
        iterates: out.iterates,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    Completed,
    Collision { nu: f64, distance: f64, threshold: f64 },
    StepUnderflow { nu: f64 },
}

#[derive(Clone, Debug)]
pub struct ContinuationBranch {
    /// Converged configuration at each path node reached.
    pub samples: Vec<PoleConfiguration>,
    pub termination: Termination,
    /// Last configuration that satisfied the locus to `tol`.
    pub last_good: PoleConfiguration,
}

/// Predictor-corrector continuation of a locus solution along `nu_path`.
pub fn homotopy_continue(start: &PoleConfiguration, nu_path: &[f64], tol: f64) -> Result<ContinuationBranch> {
    let prec = start.prec();
    let Some(&nu0) = nu_path.first() else {
        return Err(Error::InvalidArgument("empty nu path".into()));
    };
    let mut cur = start.clone();
    cur.nu = Float::with_val(prec, nu0);
    let first = solve_locus_newton(&cur, tol, 8).map_err(|_| {
        Error::InvalidArgument("start does not satisfy the locus at the first path value".into())
    })?;
    cur = first.config;
    let mut samples = vec![cur.clone()];
    let mut prev: Option<(f64, Vec<Complex>)> = None;
    let mut nu_cur = nu0;
    for &target in &nu_path[1..] {
        let span = target - nu_cur;
        if span == 0.0 {
            samples.push(cur.clone());
            continue;
        }
        let h_min = 1e-12 * span.abs().max(1e-300);
        let mut h = span;
        while nu_cur != target {
            if (target - nu_cur).abs() < h.abs() {
                h = target - nu_cur;
            }
            let nu_next = if (target - (nu_cur + h)).abs() <= 1e-15 * target.abs().max(1.0) {
                target
            } else {
                nu_cur + h
            };
            let xs = cur.locations();
            let guess: Vec<Complex> = match &prev {
                Some((nu_p, xp)) if *nu_p != nu_cur => {
                    let s = (nu_next - nu_cur) / (nu_cur - nu_p);
                    xs.iter()
                        .zip(xp)
                        .map(|(a, b)| {
                            let d = Complex::with_val(prec, sub(a, b) * s);
                            Complex::with_val(prec, a + d)
                        })
                        .collect()
                }
                _ => xs.clone(),
            };
            let mut trial = cur.with_locations(&guess);
            trial.nu = Float::with_val(prec, nu_next);
            match solve_locus_newton(&trial, tol, 12) {
                Ok(sol) => {
                    prev = Some((nu_cur, xs));
                    nu_cur = nu_next;
                    let fast = sol.iterations <= 4;
                    cur = sol.config;
                    if let Err(Error::Collision { distance, threshold }) = cur.check_collision() {
                        return Ok(ContinuationBranch {
                            samples,
                            termination: Termination::Collision {
                                nu: nu_cur,
                                distance,
                                threshold,
                            },
                            last_good: cur,
                        });
                    }
                    if fast {
                        h *= 2.0;
                    }
                }
                Err(Error::Collision { distance, threshold }) if h.abs() <= 4.0 * h_min => {
                    return Ok(ContinuationBranch {
                        samples,
                        termination: Termination::Collision {
                            nu: nu_cur,
                            distance,
                            threshold,
                        },
                        last_good: cur,
                    });
                }
                Err(_) => {
                    h *= 0.5;
                    if h.abs() < h_min {
                        let (distance, threshold) = cur.separation();
                        let termination = if distance < 10.0 * threshold {
                            Termination::Collision {
                                nu: nu_cur,
                                distance,
                                threshold,
                            }
                        } else {
                            Termination::StepUnderflow { nu: nu_cur }
                        };
                        return Ok(ContinuationBranch {
                            samples,
                            termination,
                            last_good: cur,
                        });
                    }
                }
            }
        }
        samples.push(cur.clone());
    }
    Ok(ContinuationBranch {
        samples,
        termination: Termination::Completed,
        last_good: cur,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{cplx, Poly};

    const P: u32 = 256;
    const TOL: f64 = 1e-38;

    fn f(x: f64) -> Float {
        Float::with_val(P, x)
    }

    #[test]
    fn pure_polynomial_is_vacuous() {
        let v = RationalPotential::canonical(&f(7.0), &f(0.0));
        let r = trivial_monodromy_check(&v, TOL).unwrap();
        assert!(r.satisfied && r.entries.is_empty());
    }

    #[test]
    fn non_locus_pair_fails_with_expected_coefficient() {
        let mut v = RationalPotential::canonical(&f(1.0), &f(0.0));
        v.poles = vec![
            Pole { location: cint(P, 1), mult: 1 },
            Pole { location: cint(P, -1), mult: 1 },
        ];
        let r = trivial_monodromy_check(&v, TOL).unwrap();
        assert!(!r.satisfied);
        let e = r.entries.iter().find(|e| e.location == 1).unwrap();
        let c1 = &e.residuals.iter().find(|(o, _)| *o == 1).unwrap().1;
        // P'(1) - 4/(1 - (-1))^3 with P = x^6 - x^2
        assert!(abs_f64(&sub(c1, &cplx(P, 3.5, 0.0))) < 1e-50);
    }

    #[test]
    fn pair_on_the_locus() {
        for a4 in [0.5f64, -1.0 / 6.0] {
            let a4c = if a4 > 0.0 {
                Complex::with_val(P, 1) / Complex::with_val(P, 2)
            } else {
                Complex::with_val(P, -1) / Complex::with_val(P, 6)
            };
            let a = Complex::with_val(P, a4c.sqrt()).sqrt();
            let c = PoleConfiguration::symmetric_simple(&[a], f(1.0), f(0.0));
            let r = locus_residual(&c).unwrap();
            assert!(r.iter().all(|x| abs_f64(x) < 1e-60), "a^4 = {a4}");
            let m = trivial_monodromy_check(&c.to_potential(), 1e-30).unwrap();
            assert!(m.satisfied);
        }
    }

    #[test]
    fn single_point_residual() {
        let a = cplx(P, 0.9, 0.2);
        let c = PoleConfiguration::new(vec![(a.clone(), 1)], f(2.0), f(0.0), false);
        let r = locus_residual(&c).unwrap();
        let x5 = Complex::with_val(P, rug::ops::Pow::pow(a.clone(), 5));
        let expected = Complex::with_val(P, Complex::with_val(P, &a * 2u32) - x5 * 3u32);
        assert!(abs_f64(&sub(&r[0], &expected)) < 1e-60);
    }

    #[test]
    fn higher_residuals_at_multiplicity_two() {
        // a^4 = -sqrt(3/80) pairs with nu = 51/(4 sqrt 15)
        let s = Complex::with_val(P, 3) / Complex::with_val(P, 80);
        let a4 = Complex::with_val(P, -s.sqrt());
        let a = Complex::with_val(P, a4.sqrt()).sqrt();
        let nu = Float::with_val(P, 51) / (Float::with_val(P, 15).sqrt() * 4u32);
        let c = PoleConfiguration::new(
            vec![(a.clone(), 2), (Complex::with_val(P, -&a), 2)],
            nu,
            f(0.0),
            true,
        );
        let h = higher_locus_residual(&c);
        assert!(h.iter().flatten().all(|x| abs_f64(x) < 1e-60));
        let m = trivial_monodromy_check(&c.to_potential(), 1e-30).unwrap();
        assert!(m.satisfied, "{:e}", m.max_abs);

        // generic a: s = 2 residual is 12 (10 a^3 - 3/(8 a^5))
        let a = cplx(P, 0.7, 0.1);
        let c = PoleConfiguration::new(vec![(a.clone(), 2), (Complex::with_val(P, -&a), 2)], f(1.3), f(0.0), true);
        let h = higher_locus_residual(&c);
        let a3 = Complex::with_val(P, rug::ops::Pow::pow(a.clone(), 3));
        let a5 = Complex::with_val(P, rug::ops::Pow::pow(a.clone(), 5));
        let expected = Complex::with_val(
            P,
            (Complex::with_val(P, a3 * 10u32) - Complex::with_val(P, a5 * 8u32).recip() * 3u32) * 12u32,
        );
        assert!(abs_f64(&sub(&h[0][1], &expected)) < 1e-50);
    }

    #[test]
    fn higher_residual_reduces_to_locus_for_simple_poles() {
        let c = PoleConfiguration::new(
            vec![(cplx(P, 0.8, 0.1), 1), (cplx(P, -0.4, 0.6), 1), (cplx(P, 0.2, -0.9), 1)],
            f(3.0),
            f(1.0),
            false,
        );
        let l = locus_residual(&c).unwrap();
        let h = higher_locus_residual(&c);
        for (a, b) in l.iter().zip(&h) {
            let m2 = Complex::with_val(P, a * -2i32);
            assert!(abs_f64(&sub(&b[0], &m2)) < 1e-60);
        }
    }

    #[test]
    fn newton_finds_real_branch() {
        let c = PoleConfiguration::symmetric_simple(&[cplx(P, 0.85, 0.0)], f(1.0), f(0.0));
        let sol = solve_locus_newton(&c, 1e-60, 30).unwrap();
        let a = sol.config.points[0].0.real().to_f64();
        assert!((a - 2f64.powf(-0.25)).abs() < 1e-15);
        assert!(sol.iterations <= 15);
        // exact start returns at once
        let again = solve_locus_newton(&sol.config, 1e-50, 30).unwrap();
        assert_eq!(again.iterations, 0);
    }

    #[test]
    fn symmetric_and_full_modes_agree() {
        let c = PoleConfiguration::symmetric_simple(&[cplx(P, 0.83, 0.02)], f(1.0), f(0.0));
        let a = solve_locus_newton(&c, 1e-60, 40).unwrap();
        let mut full = c.clone();
        full.symmetric = false;
        let b = solve_locus_newton(&full, 1e-60, 40).unwrap();
        for (x, y) in a.config.locations().iter().zip(b.config.locations()) {
            assert!(abs_f64(&sub(x, &y)) < 1e-50);
        }
    }

    #[test]
    fn rational_input_check() {
        // x^6 - x^2 + (8x^2 - 4 sqrt2)/(sqrt2 x^2 + 1)^2
        let s2 = Complex::with_val(P, 2).sqrt();
        let num = Poly::from_coeffs(P, vec![Complex::with_val(P, &s2 * -4i32), czero(P), cint(P, 8)]);
        let den = Poly::from_coeffs(P, vec![cint(P, 1), czero(P), s2]);
        let f = RationalFn::from_poly(Poly::from_i64(P, &[0, 0, -1, 0, 0, 0, 1]))
            .add(&RationalFn::new(num, &den * &den).unwrap())
            .unwrap();
        let r = trivial_monodromy_check_rational(&f, 1e-30).unwrap();
        assert_eq!(r.entries.len(), 2);
        assert!(r.satisfied, "{:e}", r.max_abs);
    }

    #[test]
    fn cubic_pole_is_rejected() {
        let f = RationalFn::new(Poly::one(P), Poly::from_i64(P, &[-1, 3, -3, 1])).unwrap();
        assert!(matches!(
            trivial_monodromy_check_rational(&f, 1e-30),
            Err(Error::PoleOrderTooHigh { order: 3, .. })
        ));
    }

    #[test]
    fn constant_path_is_identity() {
        let c = PoleConfiguration::symmetric_simple(&[cplx(P, 0.84, 0.0)], f(1.0), f(0.0));
        let sol = solve_locus_newton(&c, 1e-60, 30).unwrap().config;
        let b = homotopy_continue(&sol, &[1.0, 1.0, 1.0], 1e-50).unwrap();
        assert_eq!(b.termination, Termination::Completed);
        for s in &b.samples {
            assert!(abs_f64(&sub(&s.points[0].0, &sol.points[0].0)) < 1e-50);
        }
    }

    #[test]
    fn homotopy_runs_into_collision() {
        // symmetric quartet {+-a, +-b}; a - b shrinks like (16 nu)^(-1/4)
        let c = PoleConfiguration::symmetric_simple(
            &[cplx(P, 1.5612, 0.0), cplx(P, 0.9612, 0.0)],
            f(11.7714),
            f(0.0),
        );
        let sol = solve_locus_newton(&c, 1e-50, 40).unwrap().config;
        let nu0 = sol.nu.to_f64();
        let path: Vec<f64> = (0..=40).map(|k| nu0 * 10f64.powf(k as f64 * 12.0 / 40.0)).collect();
        let b = homotopy_continue(&sol, &path, 1e-40).unwrap();
        match b.termination {
            Termination::Collision { distance, threshold, .. } => assert!(distance < 10.0 * threshold),
            t => panic!("unexpected {t:?}"),
        }
        assert!(b.samples.len() > 5 && b.samples.len() < path.len());
    }
}
