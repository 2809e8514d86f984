//! Finite frames, their frame operators, and scaling weights.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::seed::mix_seed;

/// A finite family of `m` vectors in `R^n`, stored as the `n × m` synthesis
/// matrix whose `k`-th column is the `k`-th vector.
///
/// Construction only checks shape and finiteness. Spanning is checked where it
/// matters ([`Frame::frame_bounds`], [`Frame::ensure_spanning`]) so that rescaled
/// families with dropped (zero) columns remain representable.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T> {
    synthesis: Matrix<T>,
}

impl<T: Scalar> Frame<T> {
    pub fn from_matrix(synthesis: Matrix<T>) -> Self {
        Self { synthesis }
    }

    /// Builds a frame from its vectors; every vector must have the same length.
    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidShape("a frame needs at least one vector".into()));
        }
        Ok(Self { synthesis: Matrix::from_columns(columns)? })
    }

    /// Ambient dimension `N`.
    #[inline]
    pub fn n(&self) -> usize {
        self.synthesis.rows()
    }

    /// Number of vectors `M`.
    #[inline]
    pub fn m(&self) -> usize {
        self.synthesis.cols()
    }

    pub fn synthesis(&self) -> &Matrix<T> {
        &self.synthesis
    }

    pub fn vector(&self, k: usize) -> Vec<T> {
        self.synthesis.column(k)
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.m()).map(|k| self.vector(k)).collect()
    }

    pub fn column_norms(&self) -> Vec<T> {
        (0..self.m()).map(|k| linalg::norm2(&self.vector(k))).collect()
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select(&self, cols: &[usize]) -> Self {
        Self { synthesis: self.synthesis.select_columns(cols) }
    }

    /// Checks `m ≥ n`, nonzero columns and `rank = n`.
    pub fn ensure_spanning(&self) -> Result<()> {
        if self.m() < self.n() {
            return Err(Error::InvalidShape(format!("m = {} < n = {}", self.m(), self.n())));
        }
        if let Some(k) = self.column_norms().iter().position(|&c| c == T::zero()) {
            return Err(Error::ZeroColumn(k));
        }
        if linalg::rank(&self.synthesis, T::lit(1e3 * T::PIVOT_TOL)) < self.n() {
            return Err(Error::NotAFrame(0.0));
        }
        Ok(())
    }

    /// Rescales every column to unit Euclidean norm.
    pub fn normalize_columns(&self) -> Result<Self> {
        let norms = self.column_norms();
        if let Some(k) = norms.iter().position(|&c| c == T::zero()) {
            return Err(Error::ZeroColumn(k));
        }
        let s = &self.synthesis;
        Ok(Self { synthesis: Matrix::from_fn(s.rows(), s.cols(), |i, j| s.entry(i, j) / norms[j]) })
    }

    /// `S = Φ Φᵀ`.
    pub fn frame_operator(&self) -> Matrix<T> {
        self.synthesis.transpose().gram()
    }

    /// `Φ diag(u) Φᵀ`, the frame operator after scaling by `√u`.
    pub fn weighted_operator(&self, u: &[T]) -> Result<Matrix<T>> {
        if u.len() != self.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), found: u.len() });
        }
        let n = self.n();
        let mut s = Matrix::zeros(n, n);
        for (k, &uk) in u.iter().enumerate() {
            if uk == T::zero() {
                continue;
            }
            for i in 0..n {
                let a = self.synthesis.entry(i, k) * uk;
                for j in 0..n {
                    s[(i, j)] += a * self.synthesis.entry(j, k);
                }
            }
        }
        Ok(s)
    }

    /// Optimal frame bounds `(A, B)`: the extreme eigenvalues of the frame operator.
    pub fn frame_bounds(&self) -> Result<(T, T)> {
        bounds_of_operator(&self.frame_operator())
    }

    /// `B / A`; equals one exactly for tight frames.
    pub fn condition_number(&self) -> Result<T> {
        let (a, b) = self.frame_bounds()?;
        Ok(b / a)
    }

    /// Multiplies column `k` by `√u_k`. Columns with `u_k ≤ zero_tol` become zero
    /// columns and are kept in place.
    pub fn apply_scaling(&self, w: &ScalingWeights<T>) -> Result<Self> {
        if w.m() != self.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), found: w.m() });
        }
        let x = w.scaling_diagonal();
        let s = &self.synthesis;
        Ok(Self { synthesis: Matrix::from_fn(s.rows(), s.cols(), |i, j| s.entry(i, j) * x[j]) })
    }

    /// Whether `‖S − (tr S / N) I‖_F ≤ tol · max(1, tr S / N)`.
    pub fn is_tight(&self, tol: T) -> bool {
        tightness_defect(&self.frame_operator()) <= tol
    }
}

/// Relative distance of a symmetric operator from the nearest multiple of the identity.
pub fn tightness_defect<T: Scalar>(s: &Matrix<T>) -> T {
    let n = s.rows();
    let level = s.trace() / T::from_usize(n).unwrap();
    let target = Matrix::identity(n).scale(level);
    let dev = s.sub(&target).map(|d| d.frobenius_norm()).unwrap_or(T::infinity());
    dev / level.max(T::one())
}

/// Extreme eigenvalues of a frame operator, failing when the lower bound vanishes.
pub fn bounds_of_operator<T: Scalar>(s: &Matrix<T>) -> Result<(T, T)> {
    let eig = linalg::sym_eigen(s)?;
    let a = eig.values[0];
    let b = *eig.values.last().expect("nonempty spectrum");
    let tol = T::lit(1e3 * T::PIVOT_TOL) * b.abs().max(T::one());
    if a <= tol {
        return Err(Error::NotAFrame(a.as_f64()));
    }
    Ok((a, b))
}

/// Draws an `n × m` frame with i.i.d. standard normal entries.
///
/// Entries come from ChaCha8 seeded with `seed` and the ziggurat normal
/// sampler of `rand_distr`, drawn column by column. A rank-deficient draw is
/// discarded and redrawn from `mix_seed(seed, attempt, 0, 0)`.
pub fn gaussian_frame<T: Scalar>(n: usize, m: usize, seed: u64, unit_norm: bool) -> Result<Frame<T>> {
    if n == 0 || m < n {
        return Err(Error::InvalidShape(format!("m must be >= n (n = {n}, m = {m})")));
    }
    for attempt in 0u64.. {
        let s = if attempt == 0 { seed } else { mix_seed(seed, attempt, 0, 0) };
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let columns: Vec<Vec<T>> = (0..m)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        T::lit(z)
                    })
                    .collect()
            })
            .collect();
        let frame = Frame::from_columns(&columns)?;
        if frame.ensure_spanning().is_ok() {
            return if unit_norm { frame.normalize_columns() } else { Ok(frame) };
        }
    }
    unreachable!("unbounded retry loop")
}

/// The three unit vectors at mutual angles of 120° in `R²`.
pub fn mercedes_benz<T: Scalar>() -> Frame<T> {
    let h = T::lit(3.0).sqrt() / T::lit(2.0);
    let half = T::lit(0.5);
    Frame::from_columns(&[vec![T::zero(), T::one()], vec![-h, -half], vec![h, -half]])
        .expect("static frame")
}

/// Nonnegative weight vector `u` with `‖u‖₁ = 1`; `√u_k` scales vector `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingWeights<T> {
    u: Vec<T>,
    zero_tol: T,
}

impl<T: Scalar> ScalingWeights<T> {
    /// Normalizes `raw` to unit ℓ¹ norm. Entries in `[-1e-12·max, 0)` are
    /// treated as round-off and clamped to zero; anything more negative is rejected.
    /// The support threshold defaults to `ZERO_TOL · max(u)`.
    pub fn from_raw(raw: &[T]) -> Result<Self> {
        Self::with_relative_zero_tol(raw, T::lit(T::ZERO_TOL))
    }

    pub fn with_relative_zero_tol(raw: &[T], rel_zero_tol: T) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidShape("empty weight vector".into()));
        }
        let max = raw.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
        let slack = T::lit(T::PIVOT_TOL) * max.max(T::one());
        for (index, &v) in raw.iter().enumerate() {
            if !v.is_finite() || v < -slack {
                return Err(Error::NegativeWeight { index, value: v.as_f64() });
            }
        }
        let clamped: Vec<T> = raw.iter().map(|&v| v.max(T::zero())).collect();
        let total: T = clamped.iter().copied().sum();
        if total <= T::zero() {
            return Err(Error::InvalidShape("weight vector is identically zero".into()));
        }
        let u: Vec<T> = clamped.iter().map(|&v| v / total).collect();
        let umax = u.iter().fold(T::zero(), |m, &v| m.max(v));
        Ok(Self { u, zero_tol: rel_zero_tol * umax })
    }

    /// Uniform weights `1/M`.
    pub fn uniform(m: usize) -> Self {
        let v = T::one() / T::from_usize(m).unwrap();
        Self { u: vec![v; m], zero_tol: T::lit(T::ZERO_TOL) * v }
    }

    pub fn m(&self) -> usize {
        self.u.len()
    }

    pub fn values(&self) -> &[T] {
        &self.u
    }

    pub fn zero_tol(&self) -> T {
        self.zero_tol
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.u.len()).filter(|&i| self.u[i] > self.zero_tol).collect()
    }

    pub fn support_size(&self) -> usize {
        self.u.iter().filter(|&&v| v > self.zero_tol).count()
    }

    pub fn min_weight(&self) -> T {
        self.u.iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    /// Diagonal of the scaling matrix `X`: `√u_k` on the support, zero elsewhere.
    pub fn scaling_diagonal(&self) -> Vec<T> {
        self.u.iter().map(|&v| if v > self.zero_tol { v.sqrt() } else { T::zero() }).collect()
    }
}
