//! Small dense linear algebra over extended-precision scalars.
//!
//! The solvers here serve the moment systems of the continuation builder and
//! the damped least-squares steps of the orbit optimizer. Systems are tiny
//! (tens of unknowns), so plain LU with partial pivoting is all that is
//! needed.

use crate::real::{Ctx, Real};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision (pivot {pivot} at column {col})")]
    Singular { col: usize, pivot: String },
    #[error("non-finite value encountered during factorization")]
    NonFinite,
}

/// Row-major dense matrix of `Real`s.
#[derive(Debug, Clone)]
pub struct Mat {
    nrows: usize,
    ncols: usize,
    data: Vec<Real>,
}

impl Mat {
    pub fn zeros(nrows: usize, ncols: usize, ctx: &Ctx) -> Self {
        Mat {
            nrows,
            ncols,
            data: vec![ctx.zero(); nrows * ncols],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn at(&self, r: usize, c: usize) -> &Real {
        &self.data[r * self.ncols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Real {
        &mut self.data[r * self.ncols + c]
    }

    /// A^T A for a tall residual Jacobian.
    pub fn gram(&self, ctx: &Ctx) -> Mat {
        let n = self.ncols;
        let mut g = Mat::zeros(n, n, ctx);
        for i in 0..n {
            for j in i..n {
                let mut acc = ctx.zero();
                for r in 0..self.nrows {
                    acc += self.at(r, i).clone() * self.at(r, j);
                }
                *g.at_mut(j, i) = acc.clone();
                *g.at_mut(i, j) = acc;
            }
        }
        g
    }

    /// A^T v.
    pub fn transpose_mul_vec(&self, v: &[Real], ctx: &Ctx) -> Vec<Real> {
        assert_eq!(v.len(), self.nrows);
        let mut out = vec![ctx.zero(); self.ncols];
        for (r, vr) in v.iter().enumerate() {
            for c in 0..self.ncols {
                out[c] += self.at(r, c).clone() * vr;
            }
        }
        out
    }
}

/// Solve A x = b in place by LU with partial pivoting.
pub fn lu_solve(mut a: Mat, mut b: Vec<Real>, ctx: &Ctx) -> Result<Vec<Real>, LinalgError> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "lu_solve needs a square system");
    assert_eq!(n, b.len());
    for col in 0..n {
        let mut pivot_row = col;
        for r in col + 1..n {
            if a.at(r, col).clone().abs() > a.at(pivot_row, col).clone().abs() {
                pivot_row = r;
            }
        }
        if pivot_row != col {
            for c in 0..n {
                let tmp = a.at(col, c).clone();
                *a.at_mut(col, c) = a.at(pivot_row, c).clone();
                *a.at_mut(pivot_row, c) = tmp;
            }
            b.swap(col, pivot_row);
        }
        let pivot = a.at(col, col).clone();
        if !pivot.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        if pivot.is_zero() {
            return Err(LinalgError::Singular {
                col,
                pivot: pivot.to_string(),
            });
        }
        for r in col + 1..n {
            let factor = a.at(r, col).clone() / &pivot;
            if factor.is_zero() {
                continue;
            }
            for c in col + 1..n {
                let delta = factor.clone() * a.at(col, c);
                *a.at_mut(r, c) -= delta;
            }
            let delta = factor * &b[col];
            b[r] -= delta;
            *a.at_mut(r, col) = ctx.zero();
        }
    }
    let mut x = vec![ctx.zero(); n];
    for col in (0..n).rev() {
        let mut acc = b[col].clone();
        for c in col + 1..n {
            acc -= a.at(col, c).clone() * &x[c];
        }
        x[col] = acc / a.at(col, col);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_known_system() {
        let ctx = Ctx::from_digits(50);
        let mut a = Mat::zeros(3, 3, &ctx);
        let rows = [[2i64, 1, -1], [-3, -1, 2], [-2, 1, 2]];
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                *a.at_mut(r, c) = ctx.real(*v);
            }
        }
        let b = vec![ctx.real(8), ctx.real(-11), ctx.real(-3)];
        let x = lu_solve(a, b, &ctx).unwrap();
        let tol = ctx.pow10(-45);
        assert!((x[0].clone() - ctx.real(2)).abs() < tol);
        assert!((x[1].clone() - ctx.real(3)).abs() < tol);
        assert!((x[2].clone() + ctx.real(1)).abs() < tol);
    }

    #[test]
    fn rejects_singular_matrix() {
        let ctx = Ctx::from_digits(30);
        let mut a = Mat::zeros(2, 2, &ctx);
        *a.at_mut(0, 0) = ctx.real(1);
        *a.at_mut(0, 1) = ctx.real(2);
        *a.at_mut(1, 0) = ctx.real(2);
        *a.at_mut(1, 1) = ctx.real(4);
        let b = vec![ctx.real(1), ctx.real(2)];
        assert!(matches!(
            lu_solve(a, b, &ctx),
            Err(LinalgError::Singular { .. })
        ));
    }

    #[test]
    fn gram_and_transpose_mul() {
        let ctx = Ctx::from_digits(30);
        let mut j = Mat::zeros(3, 2, &ctx);
        let rows = [[1i64, 0], [1, 1], [1, 2]];
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                *j.at_mut(r, c) = ctx.real(*v);
            }
        }
        let g = j.gram(&ctx);
        assert_eq!(g.at(0, 0).to_f64(), 3.0);
        assert_eq!(g.at(0, 1).to_f64(), 3.0);
        assert_eq!(g.at(1, 1).to_f64(), 5.0);
        let v = vec![ctx.real(1), ctx.real(1), ctx.real(1)];
        let jt_v = j.transpose_mul_vec(&v, &ctx);
        assert_eq!(jt_v[0].to_f64(), 3.0);
        assert_eq!(jt_v[1].to_f64(), 3.0);
    }
}
