//! Damped Newton iteration for square complex systems.

use rug::Complex;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, solve, Matrix};

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Backtracking halvings per step.
    pub max_halvings: u32,
    /// Relative pivot threshold for the linear solve.
    pub pivot_tol: f64,
}

impl NewtonOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        NewtonOptions {
            tol,
            max_iter,
            max_halvings: 30,
            pivot_tol: 1e-60,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub x: Vec<Complex>,
    pub iterations: usize,
    pub residual: f64,
    /// Residual max-norm before each step and after the last.
    pub history: Vec<f64>,
    /// Iterates, starting with the initial guess.
    pub iterates: Vec<Vec<Complex>>,
}

/// Newton with backtracking on the max-norm of the residual.
///
/// `guard` is called on every accepted iterate and may abort the run (used
/// for collision detection). Trial points whose residual is not finite are
/// treated as failed steps.
pub fn damped_newton<F, J, G>(
    x0: Vec<Complex>,
    residual: F,
    jacobian: J,
    guard: G,
    opts: &NewtonOptions,
) -> Result<NewtonOutcome>
where
    F: Fn(&[Complex]) -> Vec<Complex>,
    J: Fn(&[Complex]) -> Matrix,
    G: Fn(&[Complex]) -> Result<()>,
{
    guard(&x0)?;
    let mut x = x0;
    let mut r = residual(&x);
    let mut norm = max_abs(&r);
    let mut history = vec![norm];
    let mut iterates = vec![x.clone()];
    if !norm.is_finite() {
        return Err(Error::IterationCap {
            max_iter: 0,
            residual: norm,
            last: x,
        });
    }
    for it in 0..opts.max_iter {
        if norm < opts.tol {
            return Ok(NewtonOutcome {
                x,
                iterations: it,
                residual: norm,
                history,
                iterates,
            });
        }
        let jac = jacobian(&x);
        let neg: Vec<Complex> = r.iter().map(|v| Complex::with_val(v.prec().0, -v)).collect();
        let dx = solve(&jac, &neg, opts.pivot_tol)?;
        let mut t = 1.0f64;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<Complex> = x
                .iter()
                .zip(&dx)
                .map(|(xi, di)| Complex::with_val(xi.prec().0, xi + Complex::with_val(xi.prec().0, di * t)))
                .collect();
            let rt = residual(&trial);
            let nt = max_abs(&rt);
            if nt.is_finite() && nt < norm {
                accepted = Some((trial, rt, nt));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, rn, nn)) = accepted else {
            return Err(Error::IterationCap {
                max_iter: it + 1,
                residual: norm,
                last: x,
            });
        };
        guard(&xn)?;
        x = xn;
        r = rn;
        norm = nn;
        history.push(norm);
        iterates.push(x.clone());
    }
    if norm < opts.tol {
        return Ok(NewtonOutcome {
            x,
            iterations: opts.max_iter,
            residual: norm,
            history,
            iterates,
        });
    }
    Err(Error::IterationCap {
        max_iter: opts.max_iter,
        residual: norm,
        last: x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{abs_f64, cint, cplx, sub};

    const P: u32 = 256;

    #[test]
    fn square_root_of_two() {
        let f = |x: &[Complex]| vec![Complex::with_val(P, x[0].clone().square() - 2)];
        let j = |x: &[Complex]| vec![vec![Complex::with_val(P, &x[0] * 2u32)]];
        let out = damped_newton(vec![cint(P, 1)], f, j, |_| Ok(()), &NewtonOptions::new(1e-70, 30)).unwrap();
        let s2 = Complex::with_val(P, 2).sqrt();
        assert!(abs_f64(&sub(&out.x[0], &s2)) < 1e-70);
        assert!(out.iterations <= 8);
    }

    #[test]
    fn exact_start_takes_no_steps() {
        let f = |x: &[Complex]| vec![Complex::with_val(P, &x[0] - 3)];
        let j = |_: &[Complex]| vec![vec![cint(P, 1)]];
        let out = damped_newton(vec![cint(P, 3)], f, j, |_| Ok(()), &NewtonOptions::new(1e-40, 10)).unwrap();
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn guard_aborts() {
        let f = |x: &[Complex]| vec![Complex::with_val(P, &x[0] - 3)];
        let j = |_: &[Complex]| vec![vec![cint(P, 1)]];
        let guard = |x: &[Complex]| {
            if abs_f64(&x[0]) > 2.0 {
                Err(Error::Collision {
                    distance: 0.0,
                    threshold: 1.0,
                })
            } else {
                Ok(())
            }
        };
        let r = damped_newton(vec![cplx(P, 0.5, 0.0)], f, j, guard, &NewtonOptions::new(1e-40, 10));
        assert!(matches!(r, Err(Error::Collision { .. })));
    }

    #[test]
    fn singular_jacobian_is_reported() {
        let f = |x: &[Complex]| vec![Complex::with_val(P, x[0].clone().square() + 1)];
        let j = |x: &[Complex]| vec![vec![Complex::with_val(P, &x[0] * 2u32)]];
        let r = damped_newton(vec![cint(P, 0)], f, j, |_| Ok(()), &NewtonOptions::new(1e-40, 10));
        assert!(matches!(r, Err(Error::SingularJacobian)));
    }
}
