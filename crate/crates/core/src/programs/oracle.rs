//! Brute-force vertex enumeration, independent of the simplex code path.
//!
//! Vertices of `{F(Φ)u = 0, 𝟙ᵀu = 1, u ⪰ 0}` are found by solving every square
//! `r × r` subsystem, where `r` is the rank of `[F(Φ); 𝟙ᵀ]`. The maximin value
//! `max min_i u_i` is concave rather than linear in `u`, so it is taken over the
//! vertices of the lifted polytope `{(u, t) : F(Φ)u = 0, 𝟙ᵀu = 1, u_i ≥ t, t ≥ 0}`
//! instead, where the objective `t` is linear.

use itertools::Itertools;

use super::stacked_constraints;
use crate::error::{Error, Result};
use crate::fmap::FMatrix;
use crate::frame::ScalingWeights;
use crate::linalg::{self, LuFactorization, Matrix};
use crate::scalar::Scalar;

const MAX_COLUMNS: usize = 25;
const MAX_ROWS: usize = 25;
const MAX_LIFTED_SUBSETS: u128 = 2_000_000;

#[derive(Debug, Clone)]
pub struct OracleResult<T> {
    pub scalable: bool,
    /// The first vertex found, normalized.
    pub witness: Option<ScalingWeights<T>>,
    /// All distinct vertices of the feasible polytope.
    pub vertices: Vec<Vec<T>>,
    /// `max min_i u_i` over the polytope. Absent when infeasible, or when the
    /// lifted enumeration would exceed its subset budget.
    pub optimal_maximin: Option<T>,
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Greedy selection of linearly independent rows (modified Gram–Schmidt).
fn independent_rows<T: Scalar>(a: &Matrix<T>, tol: T) -> Vec<usize> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut keep = Vec::new();
    for i in 0..a.rows() {
        let mut r = a.row(i).to_vec();
        let norm0 = linalg::norm2(&r);
        if norm0 == T::zero() {
            continue;
        }
        for q in &basis {
            let p = linalg::dot(&r, q);
            for (x, &qv) in r.iter_mut().zip(q) {
                *x -= p * qv;
            }
        }
        let norm = linalg::norm2(&r);
        if norm > tol * norm0 {
            basis.push(r.into_iter().map(|x| x / norm).collect());
            keep.push(i);
        }
    }
    keep
}

fn push_unique<T: Scalar>(set: &mut Vec<Vec<T>>, v: Vec<T>, tol: T) {
    if !set.iter().any(|w| w.iter().zip(&v).all(|(&a, &b)| (a - b).abs() <= tol)) {
        set.push(v);
    }
}

/// Enumerates the feasible vertices; `tol` bounds both the equality residual
/// and the allowed negativity of a candidate vertex.
pub fn oracle_vertex_enumeration<T: Scalar>(fm: &FMatrix<T>, tol: T) -> Result<OracleResult<T>> {
    let m = fm.m();
    if m > MAX_COLUMNS || fm.d() + 1 > MAX_ROWS {
        return Err(Error::TooLarge(format!("M = {m}, d + 1 = {} (limit {MAX_COLUMNS} each)", fm.d() + 1)));
    }
    let (l, b) = stacked_constraints(fm);
    let rows = independent_rows(&l, T::lit(1e-9_f64.max(T::PIVOT_TOL * 1e3)));
    let r = rows.len();
    let l_sel = l.select_rows(&rows);
    let b_sel: Vec<T> = rows.iter().map(|&i| b[i]).collect();
    let piv = T::lit(T::PIVOT_TOL);

    let feasible = |u: &[T]| -> bool {
        u.iter().all(|&x| x >= -tol)
            && l.matvec(u).map(|lu| lu.iter().zip(&b).all(|(&p, &q)| (p - q).abs() <= tol)).unwrap_or(false)
    };

    let mut vertices = Vec::new();
    if r <= m {
        for support in (0..m).combinations(r) {
            let sub = l_sel.select_columns(&support);
            let Ok(lu) = LuFactorization::new(&sub, piv) else { continue };
            let Ok(us) = lu.solve(&b_sel) else { continue };
            let mut u = vec![T::zero(); m];
            for (&j, v) in support.iter().zip(us) {
                u[j] = v;
            }
            if feasible(&u) {
                let clean: Vec<T> = u.iter().map(|&x| x.max(T::zero())).collect();
                push_unique(&mut vertices, clean, tol.max(T::lit(1e-12)));
            }
        }
    }

    let witness = match vertices.first() {
        Some(v) => Some(ScalingWeights::from_raw(v)?),
        None => None,
    };
    let optimal_maximin = if vertices.is_empty() || binomial(m + 1, r) > MAX_LIFTED_SUBSETS {
        None
    } else {
        lifted_maximin(&l_sel, &b_sel, m, &feasible, tol)
    };
    Ok(OracleResult { scalable: !vertices.is_empty(), witness, vertices, optimal_maximin })
}

/// Maximum of `t` over the vertices of the lifted polytope in `(u, t)`.
///
/// A vertex has `M + 1` linearly independent active constraints: the `r`
/// equality rows plus `M + 1 − r` of the inequalities `u_i − t ≥ 0`
/// (`i < M`) and `t ≥ 0` (index `M`).
fn lifted_maximin<T: Scalar>(
    l_sel: &Matrix<T>,
    b_sel: &[T],
    m: usize,
    feasible: &dyn Fn(&[T]) -> bool,
    tol: T,
) -> Option<T> {
    let r = l_sel.rows();
    let dim = m + 1;
    if r > dim {
        return None;
    }
    let mut best: Option<T> = None;
    for active in (0..dim).combinations(dim - r) {
        let mut sys = Matrix::zeros(dim, dim);
        let mut rhs = vec![T::zero(); dim];
        for i in 0..r {
            for j in 0..m {
                sys[(i, j)] = l_sel.entry(i, j);
            }
            rhs[i] = b_sel[i];
        }
        for (k, &c) in active.iter().enumerate() {
            let row = r + k;
            if c < m {
                sys[(row, c)] = T::one();
                sys[(row, m)] = -T::one();
            } else {
                sys[(row, m)] = T::one();
            }
        }
        let Ok(lu) = LuFactorization::new(&sys, T::lit(T::PIVOT_TOL)) else { continue };
        let Ok(sol) = lu.solve(&rhs) else { continue };
        let (u, t) = (&sol[..m], sol[m]);
        if t < -tol || u.iter().any(|&ui| ui - t < -tol) || !feasible(u) {
            continue;
        }
        let t = t.max(T::zero());
        best = Some(best.map_or(t, |b: T| b.max(t)));
    }
    best
}
