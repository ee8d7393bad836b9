//! Small dense solvers: exact Gaussian elimination over F_q, and partial
//! pivoting over the complex and real numbers.

use num_complex::Complex64;

use crate::field::{Fe, PrimeField};

/// Solves `a·x = b` over F_q. Returns `None` when `a` is singular.
pub fn solve_field(field: &PrimeField, mut a: Vec<Vec<Fe>>, mut b: Vec<Fe>) -> Option<Vec<Fe>> {
    let n = a.len();
    debug_assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = field.inv(a[col][col]).ok()?;
        for v in &mut a[col][col..] {
            *v = field.mul(*v, inv);
        }
        b[col] = field.mul(b[col], inv);
        let (pivot_rows, rest) = a.split_at_mut(col + 1);
        let prow = &pivot_rows[col];
        for (off, row) in rest.iter_mut().enumerate() {
            let factor = row[col];
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                row[k] = field.sub(row[k], field.mul(factor, prow[k]));
            }
            let r = col + 1 + off;
            b[r] = field.sub(b[r], field.mul(factor, b[col]));
        }
    }
    for col in (0..n).rev() {
        for r in 0..col {
            let factor = a[r][col];
            if !factor.is_zero() {
                b[r] = field.sub(b[r], field.mul(factor, b[col]));
            }
        }
    }
    Some(b)
}

/// Rank test by elimination; `a` is consumed.
pub fn is_invertible_field(field: &PrimeField, mut a: Vec<Vec<Fe>>) -> bool {
    let n = a.len();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return false;
        };
        a.swap(col, piv);
        let inv = match field.inv(a[col][col]) {
            Ok(v) => v,
            Err(_) => return false,
        };
        let (pivot_rows, rest) = a.split_at_mut(col + 1);
        let prow = &pivot_rows[col];
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = field.mul(row[col], inv);
            for k in col..n {
                row[k] = field.sub(row[k], field.mul(factor, prow[k]));
            }
        }
    }
    true
}

/// Gaussian elimination with partial pivoting. `None` if a pivot falls below
/// `rel_tol` times the largest entry of the input.
pub fn solve_complex(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>, rel_tol: f64) -> Option<Vec<Complex64>> {
    let n = a.len();
    let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return if n == 0 { Some(b) } else { None };
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() <= rel_tol * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let (pivot_rows, rest) = a.split_at_mut(col + 1);
        let prow = &pivot_rows[col];
        for (off, row) in rest.iter_mut().enumerate() {
            let factor = row[col] / prow[col];
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (x, &v) in row[col..].iter_mut().zip(&prow[col..]) {
                *x -= factor * v;
            }
            let v = b[col];
            b[col + 1 + off] -= factor * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: Complex64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

pub fn solve_real(a: Vec<Vec<f64>>, b: Vec<f64>, rel_tol: f64) -> Option<Vec<f64>> {
    let a = a.into_iter().map(|r| r.into_iter().map(|v| Complex64::new(v, 0.0)).collect()).collect();
    let b = b.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    solve_complex(a, b, rel_tol).map(|x| x.into_iter().map(|z| z.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_solve_small_system() {
        let f = PrimeField::new(7).unwrap();
        let e = |v| f.elem(v);
        // [1 1; 1 2] x = [3, 5]  ->  x = [1, 2]
        let x = solve_field(&f, vec![vec![e(1), e(1)], vec![e(1), e(2)]], vec![e(3), e(5)]).unwrap();
        assert_eq!(x, vec![e(1), e(2)]);
        assert!(solve_field(&f, vec![vec![e(1), e(2)], vec![e(2), e(4)]], vec![e(0), e(0)]).is_none());
        assert!(!is_invertible_field(&f, vec![vec![e(3), e(6)], vec![e(1), e(2)]]));
        assert!(is_invertible_field(&f, vec![vec![e(0), e(1)], vec![e(1), e(0)]]));
    }

    #[test]
    fn real_solve_and_singularity() {
        let x = solve_real(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
        assert!(solve_real(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0], 1e-12).is_none());
    }
}
