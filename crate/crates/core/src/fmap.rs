//! The quadratic map `F : R^N → R^d`, `d = (N−1)(N+2)/2`, and the matrix `F(Φ)`.
//!
//! A frame is scalable exactly when `F(Φ)` has a nonzero nonnegative kernel vector.
//!
//! Row layout (0-based; vector components `x_0 … x_{N−1}`):
//!
//! * rows `0 … N−2`: `x_0² − x_j²` for `j = 1 … N−1`;
//! * then, for `k = 0 … N−2` in order, the products `x_k · x_j` for `j = k+1 … N−1`.
//!
//! This ordering is part of the on-disk contract of anything that stores `F(Φ)`.

use num_traits::Num;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

/// Number of components of `F`, `(n−1)(n+2)/2`.
pub fn f_dim(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    Ok((n - 1) * (n + 2) / 2)
}

/// Evaluates `F(x)` over any commutative ring, so exact (rational) inputs stay exact.
pub fn f_of_vector<T: Num + Clone>(x: &[T]) -> Result<Vec<T>> {
    let n = x.len();
    let mut out = Vec::with_capacity(f_dim(n)?);
    let lead = x[0].clone() * x[0].clone();
    out.extend(x[1..].iter().map(|xj| lead.clone() - xj.clone() * xj.clone()));
    for k in 0..n - 1 {
        out.extend(x[k + 1..].iter().map(|xj| x[k].clone() * xj.clone()));
    }
    Ok(out)
}

/// The `d × M` matrix `F(Φ)` together with the source dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FMatrix<T> {
    n: usize,
    matrix: Matrix<T>,
}

impl<T: Scalar> FMatrix<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.matrix.rows()
    }

    pub fn m(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn column(&self, k: usize) -> Vec<T> {
        self.matrix.column(k)
    }

    /// `‖F(φ_k)‖₂` for every column.
    pub fn column_norms(&self) -> Vec<T> {
        (0..self.m()).map(|k| linalg::norm2(&self.column(k))).collect()
    }

    /// `‖F(Φ) u‖∞`.
    pub fn residual(&self, u: &[T]) -> Result<T> {
        Ok(linalg::norm_inf(&self.matrix.matvec(u)?))
    }
}

/// Builds `F(Φ)` column by column.
pub fn f_of_frame<T: Scalar>(frame: &Frame<T>) -> Result<FMatrix<T>> {
    let n = frame.n();
    let d = f_dim(n)?;
    let columns = (0..frame.m())
        .map(|k| f_of_vector(&frame.vector(k)))
        .collect::<Result<Vec<_>>>()?;
    let matrix = Matrix::from_columns(&columns)?;
    debug_assert_eq!(matrix.rows(), d);
    Ok(FMatrix { n, matrix })
}
