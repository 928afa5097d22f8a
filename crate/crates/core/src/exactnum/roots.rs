use rug::{Complex, Float};

use super::poly::Poly;
use super::{abs_f64, cmp_complex_tol, czero};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Root {
    pub value: Complex,
    pub multiplicity: u32,
}

#[derive(Clone, Debug)]
pub struct RootOptions {
    /// Cluster tolerance. A group of `k` approximations is merged when every
    /// member lies within `tol^(1/k) * max(1, |centre|)` of the group mean.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra bits carried during the iteration.
    pub guard_bits: u32,
}

impl RootOptions {
    pub fn new(tol: f64) -> Self {
        RootOptions {
            tol,
            max_iter: 200,
            guard_bits: 32,
        }
    }
}

pub fn poly_roots(p: &Poly, tol: f64) -> Result<Vec<Root>> {
    poly_roots_with(p, &RootOptions::new(tol))
}

/// All roots of `p` by Aberth-Ehrlich simultaneous iteration, clustered and
/// sorted by real part then imaginary part.
pub fn poly_roots_with(p: &Poly, opts: &RootOptions) -> Result<Vec<Root>> {
    let prec = p.prec();
    let deg = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => {
            return Err(Error::InvalidArgument(
                "poly_roots needs a polynomial of degree >= 1".into(),
            ))
        }
    };
    let zeros_at_origin = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let work_prec = prec + opts.guard_bits;
    let reduced = Poly::from_coeffs(work_prec, p.shift_down(zeros_at_origin).into_coeffs());

    let mut approx: Vec<Complex> = Vec::with_capacity(deg);
    if reduced.degree().unwrap_or(0) >= 1 {
        approx = aberth(&reduced, opts.max_iter, opts.tol)?;
    }
    let mut roots = cluster(&reduced, approx, opts.tol, prec);
    if zeros_at_origin > 0 {
        roots.push(Root {
            value: czero(prec),
            multiplicity: zeros_at_origin as u32,
        });
    }
    roots.sort_by(|a, b| cmp_complex_tol(&a.value, &b.value, opts.tol));
    debug_assert_eq!(
        roots.iter().map(|r| r.multiplicity as usize).sum::<usize>(),
        deg
    );
    Ok(roots)
}

fn fujiwara_bound(p: &Poly) -> f64 {
    let c = p.coeffs();
    let n = c.len() - 1;
    let lead = abs_f64(&c[n]);
    let mut b: f64 = 0.0;
    for k in 1..=n {
        let mut r = abs_f64(&c[n - k]) / lead;
        if k == n {
            r /= 2.0;
        }
        b = b.max(r.powf(1.0 / k as f64));
    }
    (2.0 * b).max(f64::MIN_POSITIVE.sqrt())
}

fn aberth(p: &Poly, max_iter: usize, tol: f64) -> Result<Vec<Complex>> {
    let prec = p.prec();
    let n = p.degree().unwrap();
    let dp = p.derivative();
    let eps = 2f64.powi(-(prec as i32 - 8)).max(f64::MIN_POSITIVE);
    let radius = fujiwara_bound(p);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.7;
            Complex::with_val(prec, (radius * theta.cos(), radius * theta.sin()))
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let pv = p.eval(&z[i]);
            let scale = p.eval_abs_scale(&z[i]);
            if abs_f64(&pv) <= eps * (n as f64 + 1.0) * scale {
                done[i] = true;
                continue;
            }
            let dv = dp.eval(&z[i]);
            if dv.is_zero() {
                let nudge = Complex::with_val(prec, (1e-3 * radius.max(1e-10), 1e-3 * radius.max(1e-10)));
                z[i] += nudge;
                continue;
            }
            let w = Complex::with_val(prec, &pv / &dv);
            let mut s = czero(prec);
            for j in 0..n {
                if j != i {
                    let d = Complex::with_val(prec, &z[i] - &z[j]);
                    if !d.is_zero() {
                        s += d.recip();
                    }
                }
            }
            let denom = Complex::with_val(prec, 1 - Complex::with_val(prec, &w * &s));
            let corr = if denom.is_zero() {
                w
            } else {
                Complex::with_val(prec, &w / &denom)
            };
            let corr_abs = abs_f64(&corr);
            z[i] -= &corr;
            if corr_abs <= eps * abs_f64(&z[i]) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    let worst = z
        .iter()
        .map(|zi| abs_f64(&p.eval(zi)) / p.eval_abs_scale(zi).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if worst <= tol {
        Ok(z)
    } else {
        Err(Error::NoConvergence(max_iter))
    }
}

fn cluster(p: &Poly, points: Vec<Complex>, tol: f64, prec: u32) -> Vec<Root> {
    let n = points.len();
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![i];
        loop {
            let centre = mean(&points, &members);
            let scale = abs_f64(&centre).max(1.0);
            let radius = tol.powf(1.0 / (members.len() + 1) as f64) * scale;
            let mut added = false;
            for j in 0..n {
                if !used[j] {
                    let d = abs_f64(&Complex::with_val(centre.prec(), &points[j] - &centre));
                    if d <= radius {
                        used[j] = true;
                        members.push(j);
                        added = true;
                        break;
                    }
                }
            }
            if !added {
                break;
            }
        }
        let mut centre = mean(&points, &members);
        if members.len() > 1 {
            centre = polish_multiple(p, centre, members.len());
        }
        out.push(Root {
            value: Complex::with_val(prec, centre),
            multiplicity: members.len() as u32,
        });
    }
    out
}

/// A root of multiplicity `m` is a simple root of the `(m-1)`-th derivative;
/// Newton on that derivative recovers full precision from the cluster mean.
fn polish_multiple(p: &Poly, start: Complex, m: usize) -> Complex {
    let q = p.nth_derivative(m - 1);
    let dq = q.derivative();
    let prec = p.prec();
    let mut z = start.clone();
    for _ in 0..60 {
        let dv = dq.eval(&z);
        if dv.is_zero() {
            break;
        }
        let step = Complex::with_val(prec, q.eval(&z) / dv);
        let small = abs_f64(&step) <= 2f64.powi(-(prec as i32 - 4)) * abs_f64(&z).max(1.0);
        z -= step;
        if small {
            break;
        }
    }
    let drift = abs_f64(&Complex::with_val(prec, &z - &start));
    if drift.is_finite() && drift <= 1e-6 * abs_f64(&start).max(1.0) {
        z
    } else {
        start
    }
}

fn mean(points: &[Complex], idx: &[usize]) -> Complex {
    let prec = points[idx[0]].prec().0;
    let mut s = czero(prec);
    for &i in idx {
        s += &points[i];
    }
    s / Float::with_val(prec, idx.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{cint, cplx};

    const P: u32 = 256;

    #[test]
    fn eigenvalue_quadratic() {
        let roots = poly_roots(&Poly::from_i64(P, &[-8, 0, 1]), 1e-30).unwrap();
        assert_eq!(roots.len(), 2);
        let r8 = Complex::with_val(P, 8).sqrt();
        assert!(abs_f64(&Complex::with_val(P, &roots[0].value + &r8)) < 1e-70);
        assert!(abs_f64(&Complex::with_val(P, &roots[1].value - &r8)) < 1e-70);
        assert!((roots[1].value.real().to_f64() - 2.8284271247).abs() < 1e-10);
    }

    #[test]
    fn triple_root_at_origin() {
        let roots = poly_roots(&Poly::from_i64(P, &[0, 0, 0, 1]), 1e-30).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 3);
        assert!(roots[0].value.is_zero());
    }

    #[test]
    fn triple_root_off_origin() {
        // (x - 1)^3 (x + 2)
        let p = Poly::from_roots(P, &[cint(P, 1), cint(P, 1), cint(P, 1), cint(P, -2)]);
        let roots = poly_roots(&p, 1e-30).unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[1].multiplicity, 3);
        let err = abs_f64(&Complex::with_val(P, &roots[1].value - 1));
        assert!(err < 1e-40, "{err:e}");
    }

    #[test]
    fn octic_with_quartic_classes() {
        // 12 a^8 - 4 a^4 - 1 = (2 a^4 - 1)(6 a^4 + 1)
        let p = Poly::from_i64(P, &[-1, 0, 0, 0, -4, 0, 0, 0, 12]);
        let roots = poly_roots(&p, 1e-30).unwrap();
        assert_eq!(roots.len(), 8);
        let half = cplx(P, 0.5, 0.0);
        let sixth = Complex::with_val(P, -1) / Complex::with_val(P, 6);
        let (mut n_half, mut n_sixth) = (0, 0);
        for r in &roots {
            assert_eq!(r.multiplicity, 1);
            let a4 = Complex::with_val(P, r.value.clone().square().square());
            if abs_f64(&Complex::with_val(P, &a4 - &half)) < 1e-60 {
                n_half += 1;
            }
            if abs_f64(&Complex::with_val(P, &a4 - &sixth)) < 1e-60 {
                n_sixth += 1;
            }
        }
        assert_eq!((n_half, n_sixth), (4, 4));
    }

    #[test]
    fn sorted_by_real_then_imag() {
        let p = Poly::from_i64(P, &[1, 0, 1]);
        let roots = poly_roots(&p, 1e-30).unwrap();
        assert!(roots[0].value.imag().to_f64() < roots[1].value.imag().to_f64());
    }

    #[test]
    fn constant_is_rejected() {
        assert!(poly_roots(&Poly::from_i64(P, &[4]), 1e-30).is_err());
    }
}
