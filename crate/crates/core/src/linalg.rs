//! Dense complex linear algebra at arbitrary precision.

use rug::Complex;

use crate::error::{Error, Result};
use crate::exactnum::{abs_f64, czero};

pub type Matrix = Vec<Vec<Complex>>;

pub fn zeros(prec: u32, rows: usize, cols: usize) -> Matrix {
    vec![vec![czero(prec); cols]; rows]
}

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
///
/// A pivot below `tol` times the largest entry of `a` is reported as
/// [`Error::SingularJacobian`].
pub fn solve(a: &Matrix, b: &[Complex], tol: f64) -> Result<Vec<Complex>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("solve: shape mismatch".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = b[0].prec().0;
    let scale = a
        .iter()
        .flat_map(|r| r.iter().map(abs_f64))
        .fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::SingularJacobian);
    }
    let mut m: Vec<Vec<Complex>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, abs_f64(&m[r][col])))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if piv_abs <= tol * scale {
            return Err(Error::SingularJacobian);
        }
        m.swap(col, piv);
        let inv = Complex::with_val(prec, m[col][col].recip_ref());
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = Complex::with_val(prec, &m[r][col] * &inv);
            for c in col..=n {
                let t = Complex::with_val(prec, &f * &m[col][c]);
                m[r][c] -= t;
            }
        }
    }
    let mut x = vec![czero(prec); n];
    for r in (0..n).rev() {
        let mut acc = m[r][n].clone();
        for c in r + 1..n {
            acc -= Complex::with_val(prec, &m[r][c] * &x[c]);
        }
        x[r] = Complex::with_val(prec, acc / &m[r][r]);
    }
    Ok(x)
}

/// A nonzero vector `v` with `a v ~ 0`, normalised so that its first entry
/// of modulus above `tol` equals one. Returns `None` when `a` has full rank.
pub fn null_vector(a: &Matrix, tol: f64) -> Option<Vec<Complex>> {
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    if cols == 0 {
        return None;
    }
    let prec = a[0][0].prec().0;
    let scale = a
        .iter()
        .flat_map(|r| r.iter().map(abs_f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut m = a.clone();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let (piv, piv_abs) = (row..rows)
            .map(|r| (r, abs_f64(&m[r][col])))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if piv_abs <= tol * scale {
            continue;
        }
        m.swap(row, piv);
        let inv = Complex::with_val(prec, m[row][col].recip_ref());
        for c in col..cols {
            m[row][c] *= &inv;
        }
        for r in 0..rows {
            if r == row || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..cols {
                let t = Complex::with_val(prec, &f * &m[row][c]);
                m[r][c] -= t;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free = (0..cols).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![czero(prec); cols];
    v[free] = Complex::with_val(prec, 1);
    for (r, &pc) in pivot_cols.iter().enumerate() {
        v[pc] = Complex::with_val(prec, -&m[r][free]);
    }
    let lead = v.iter().find(|c| abs_f64(c) > tol)?.clone();
    let inv = Complex::with_val(prec, lead.recip_ref());
    for c in v.iter_mut() {
        *c *= &inv;
    }
    Some(v)
}

pub fn mat_vec(a: &Matrix, x: &[Complex]) -> Vec<Complex> {
    a.iter()
        .map(|row| {
            let prec = x.first().map(|c| c.prec().0).unwrap_or(53);
            let mut acc = czero(prec);
            for (aij, xj) in row.iter().zip(x) {
                acc += Complex::with_val(prec, aij * xj);
            }
            acc
        })
        .collect()
}

pub fn max_abs(v: &[Complex]) -> f64 {
    v.iter().map(abs_f64).fold(0.0, f64::max)
}

/// Levenberg-Marquardt step for an overdetermined or square system:
/// solves `(J^H J + damping I) dx = J^H r`.
pub fn lm_step(j: &Matrix, r: &[Complex], damping: f64, tol: f64) -> Result<Vec<Complex>> {
    let n = j.first().map(|row| row.len()).unwrap_or(0);
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = r[0].prec().0;
    let mut a = zeros(prec, n, n);
    let mut b = vec![czero(prec); n];
    for (row, ri) in j.iter().zip(r) {
        for p in 0..n {
            let cp = Complex::with_val(prec, row[p].conj_ref());
            b[p] += Complex::with_val(prec, &cp * ri);
            for q in 0..n {
                a[p][q] += Complex::with_val(prec, &cp * &row[q]);
            }
        }
    }
    for (p, row) in a.iter_mut().enumerate() {
        row[p] += damping;
    }
    solve(&a, &b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{cint, cplx, sub};

    const P: u32 = 256;

    #[test]
    fn solves_small_system() {
        let a = vec![
            vec![cint(P, 2), cint(P, 1)],
            vec![cint(P, 1), cint(P, 3)],
        ];
        let b = vec![cint(P, 3), cint(P, 5)];
        let x = solve(&a, &b, 1e-60).unwrap();
        assert!(abs_f64(&sub(&x[0], &(Complex::with_val(P, 4) / 5u32))) < 1e-70);
        assert!(abs_f64(&sub(&x[1], &(Complex::with_val(P, 7) / 5u32))) < 1e-70);
    }

    #[test]
    fn singular_system_is_reported() {
        let a = vec![
            vec![cint(P, 1), cint(P, 2)],
            vec![cint(P, 2), cint(P, 4)],
        ];
        assert!(matches!(
            solve(&a, &[cint(P, 1), cint(P, 1)], 1e-60),
            Err(Error::SingularJacobian)
        ));
        let v = null_vector(&a, 1e-60).unwrap();
        assert!(max_abs(&mat_vec(&a, &v)) < 1e-70);
    }

    #[test]
    fn full_rank_has_no_null_vector() {
        let a = vec![
            vec![cplx(P, 1.0, 1.0), cint(P, 0)],
            vec![cint(P, 0), cint(P, 1)],
        ];
        assert!(null_vector(&a, 1e-60).is_none());
    }
}
