//! Dense two-phase tableau simplex for equality-form linear programs
//!
//! ```text
//! minimize cᵀx  subject to  A x = b,  x ⪰ 0
//! ```
//!
//! Phase 1 adds one artificial variable per row and minimizes their sum.
//! Artificials left in the basis at zero level are pivoted out afterwards,
//! or their rows are dropped as redundant. Pricing is Dantzig's rule; after
//! `R` consecutive degenerate pivots it falls back to Bland's rule until the
//! next non-degenerate pivot, which rules out cycling. The tableau is rebuilt
//! from an LU factorization of the basis every 64 pivots.

use crate::error::{Error, Result};
use crate::linalg::{self, LuFactorization, Matrix};
use crate::scalar::Scalar;

const REFACTOR_EVERY: usize = 64;

/// `minimize cᵀx s.t. A x = b, x ⪰ 0`, stored with `b ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp<T> {
    a: Matrix<T>,
    b: Vec<T>,
    c: Vec<T>,
}

impl<T: Scalar> StandardLp<T> {
    /// Rows with `b_i < 0` are negated so the stored right-hand side is nonnegative.
    pub fn new(a: Matrix<T>, b: Vec<T>, c: Vec<T>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
        }
        if c.len() != a.cols() {
            return Err(Error::DimensionMismatch { expected: a.cols(), found: c.len() });
        }
        if b.iter().chain(&c).any(|v| !v.is_finite()) {
            return Err(Error::InvalidShape("non-finite LP data".into()));
        }
        let mut a = a;
        let mut b = b;
        for i in 0..b.len() {
            if b[i] < T::zero() {
                b[i] = -b[i];
                for j in 0..a.cols() {
                    a[(i, j)] = -a[(i, j)];
                }
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn num_cols(&self) -> usize {
        self.a.cols()
    }

    /// Same LP with rows and columns reordered: row `i` of the result is row
    /// `row_perm[i]` of `self`, likewise for columns.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        let a = self.a.select_rows(row_perm).select_columns(col_perm);
        let b = row_perm.iter().map(|&i| self.b[i]).collect();
        let c = col_perm.iter().map(|&j| self.c[j]).collect();
        Self { a, b, c }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions<T> {
    pub feas_tol: T,
    pub dual_tol: T,
    /// Defaults to `50 · (R + C)` when absent.
    pub max_pivots: Option<usize>,
}

impl<T: Scalar> Default for SimplexOptions<T> {
    fn default() -> Self {
        Self { feas_tol: T::lit(T::FEAS_TOL), dual_tol: T::lit(T::DUAL_TOL), max_pivots: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct LpOutcome<T> {
    pub status: LpStatus,
    /// Primal solution (empty unless optimal).
    pub x: Vec<T>,
    pub objective: T,
    /// Dual solution for the stored rows (empty unless optimal).
    pub y: Vec<T>,
    /// Basic column per active row.
    pub basis: Vec<usize>,
    /// Rows kept after redundancy removal, aligned with `basis`.
    pub active_rows: Vec<usize>,
    /// Optimal phase-1 value (sum of artificials).
    pub phase1_objective: T,
    pub pivots: usize,
}

impl<T: Scalar> LpOutcome<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// `bᵀy`.
    pub fn dual_objective(&self, lp: &StandardLp<T>) -> T {
        linalg::dot(lp.b(), &self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pricing {
    Dantzig,
    Bland,
}

struct Tableau<'a, T> {
    lp: &'a StandardLp<T>,
    /// Row stride; columns `C..C+R` are artificials.
    width: usize,
    /// Columns eligible to enter and kept up to date.
    live: usize,
    rows: Vec<usize>,
    t: Vec<T>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    cost: Vec<T>,
    reduced: Vec<T>,
    pivots: usize,
    since_refactor: usize,
    degenerate_run: usize,
    pricing: Pricing,
    max_pivots: usize,
    piv_tol: T,
    opt_tol: T,
}

impl<'a, T: Scalar> Tableau<'a, T> {
    fn new(lp: &'a StandardLp<T>, opts: &SimplexOptions<T>) -> Self {
        let (r, c) = (lp.num_rows(), lp.num_cols());
        let width = c + r;
        let mut t = vec![T::zero(); r * width];
        for i in 0..r {
            t[i * width..i * width + c].copy_from_slice(lp.a.row(i));
            t[i * width + c + i] = T::one();
        }
        let mut cost = vec![T::zero(); width];
        for v in &mut cost[c..] {
            *v = T::one();
        }
        let mut tab = Self {
            lp,
            width,
            live: width,
            rows: (0..r).collect(),
            t,
            rhs: lp.b.clone(),
            basis: (c..c + r).collect(),
            cost,
            reduced: vec![T::zero(); width],
            pivots: 0,
            since_refactor: 0,
            degenerate_run: 0,
            pricing: Pricing::Dantzig,
            max_pivots: opts.max_pivots.unwrap_or(50 * (r + c)),
            piv_tol: T::lit(1e3 * T::PIVOT_TOL),
            opt_tol: opts.dual_tol * T::lit(1e-2),
        };
        tab.price();
        tab
    }

    fn n_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.t[i * self.width + j]
    }

    /// Recomputes reduced costs `c_j − c_Bᵀ t_j` from the current tableau.
    fn price(&mut self) {
        for j in 0..self.live {
            let mut s = self.cost[j];
            for i in 0..self.n_rows() {
                s -= self.cost[self.basis[i]] * self.at(i, j);
            }
            self.reduced[j] = s;
        }
        for &bj in &self.basis {
            self.reduced[bj] = T::zero();
        }
    }

    fn objective(&self) -> T {
        self.basis.iter().zip(&self.rhs).map(|(&j, &x)| self.cost[j] * x).sum()
    }

    fn original_column(&self, j: usize) -> Vec<T> {
        let c = self.lp.num_cols();
        self.rows
            .iter()
            .map(|&r| {
                if j < c {
                    self.lp.a.entry(r, j)
                } else if j - c == r {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect()
    }

    /// Rebuilds tableau, right-hand side and reduced costs from the original data.
    fn refactor(&mut self) -> Result<()> {
        if self.basis.is_empty() {
            return Ok(());
        }
        let cols: Vec<Vec<T>> = self.basis.iter().map(|&j| self.original_column(j)).collect();
        let bmat = Matrix::from_columns(&cols)?;
        let lu = LuFactorization::new(&bmat, T::lit(T::PIVOT_TOL))?;
        let b_active: Vec<T> = self.rows.iter().map(|&r| self.lp.b[r]).collect();
        self.rhs = lu.solve(&b_active)?.into_iter().map(|v| v.max(T::zero())).collect();
        for j in 0..self.live {
            let col = lu.solve(&self.original_column(j))?;
            for (i, v) in col.into_iter().enumerate() {
                self.t[i * self.width + j] = v;
            }
        }
        for (i, &bj) in self.basis.iter().enumerate() {
            for k in 0..self.n_rows() {
                self.t[k * self.width + bj] = if k == i { T::one() } else { T::zero() };
            }
        }
        self.price();
        self.since_refactor = 0;
        Ok(())
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let p = self.at(r, q);
        for j in 0..self.live {
            self.t[r * w + j] /= p;
        }
        self.rhs[r] /= p;
        let (pivot_row, pivot_rhs) = (self.t[r * w..r * w + self.live].to_vec(), self.rhs[r]);
        for i in 0..self.n_rows() {
            if i == r {
                continue;
            }
            let f = self.at(i, q);
            if f == T::zero() {
                continue;
            }
            let row = &mut self.t[i * w..i * w + self.live];
            for (x, &pr) in row.iter_mut().zip(&pivot_row) {
                *x -= f * pr;
            }
            self.t[i * w + q] = T::zero();
            self.rhs[i] = (self.rhs[i] - f * pivot_rhs).max(T::zero());
        }
        let f = self.reduced[q];
        if f != T::zero() {
            for (d, &pr) in self.reduced[..self.live].iter_mut().zip(&pivot_row) {
                *d -= f * pr;
            }
        }
        self.reduced[q] = T::zero();
        self.basis[r] = q;
        self.pivots += 1;
        self.since_refactor += 1;
    }

    fn choose_entering(&self, allowed: usize) -> Option<usize> {
        let candidates = (0..allowed).filter(|&j| self.reduced[j] < -self.opt_tol);
        match self.pricing {
            Pricing::Bland => candidates.min(),
            Pricing::Dantzig => candidates.min_by(|&a, &b| {
                self.reduced[a].partial_cmp(&self.reduced[b]).expect("finite reduced costs")
            }),
        }
    }

    fn choose_leaving(&self, q: usize) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for i in 0..self.n_rows() {
            let a = self.at(i, q);
            if a <= self.piv_tol {
                continue;
            }
            let ratio = self.rhs[i].max(T::zero()) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let tie = (ratio - br).abs() <= T::lit(1e3) * T::epsilon() * br.max(T::one());
                    let better = if tie {
                        match self.pricing {
                            Pricing::Bland => self.basis[i] < self.basis[bi],
                            Pricing::Dantzig => a > self.at(bi, q),
                        }
                    } else {
                        ratio < br
                    };
                    if better { Some((i, ratio)) } else { Some((bi, br)) }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    /// Runs simplex iterations over columns `< allowed` until optimal.
    fn optimize(&mut self, allowed: usize, feas_tol: T) -> Result<()> {
        loop {
            let Some(q) = self.choose_entering(allowed) else {
                return Ok(());
            };
            let Some(r) = self.choose_leaving(q) else {
                return Err(Error::UnboundedProblem);
            };
            if self.pivots >= self.max_pivots {
                return Err(Error::PivotLimitExceeded(self.max_pivots));
            }
            let step = self.rhs[r].max(T::zero()) / self.at(r, q);
            self.pivot(r, q);
            if step <= feas_tol {
                self.degenerate_run += 1;
                if self.degenerate_run >= self.n_rows().max(1) {
                    self.pricing = Pricing::Bland;
                }
            } else {
                self.degenerate_run = 0;
                self.pricing = Pricing::Dantzig;
            }
            if self.since_refactor >= REFACTOR_EVERY {
                // A singular refactorization leaves the running tableau in place.
                let _ = self.refactor();
            }
        }
    }

    /// Pivots zero-level artificials out of the basis, dropping rows that are
    /// linear combinations of the others.
    fn purge_artificials(&mut self) {
        let c = self.lp.num_cols();
        let mut i = 0;
        while i < self.n_rows() {
            if self.basis[i] < c {
                i += 1;
                continue;
            }
            let candidate = (0..c)
                .filter(|j| !self.basis.contains(j))
                .map(|j| (j, self.at(i, j).abs()))
                .filter(|&(_, v)| v > self.piv_tol)
                .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"));
            match candidate {
                Some((j, _)) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => self.drop_row(i),
            }
        }
    }

    fn drop_row(&mut self, i: usize) {
        let w = self.width;
        self.t.drain(i * w..(i + 1) * w);
        self.rhs.remove(i);
        self.basis.remove(i);
        self.rows.remove(i);
    }

    fn primal(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.lp.num_cols()];
        for (&j, &v) in self.basis.iter().zip(&self.rhs) {
            if j < x.len() {
                x[j] = v.max(T::zero());
            }
        }
        x
    }
}

/// Solves the LP with the two-phase method.
pub fn solve<T: Scalar>(lp: &StandardLp<T>, opts: &SimplexOptions<T>) -> Result<LpOutcome<T>> {
    let c = lp.num_cols();
    let mut tab = Tableau::new(lp, opts);
    tab.optimize(tab.width, opts.feas_tol)?;
    let _ = tab.refactor();
    tab.optimize(tab.width, opts.feas_tol)?;
    let phase1 = tab.objective();
    if phase1 > opts.feas_tol {
        return Ok(LpOutcome {
            status: LpStatus::Infeasible,
            x: Vec::new(),
            objective: T::nan(),
            y: Vec::new(),
            basis: tab.basis.clone(),
            active_rows: tab.rows.clone(),
            phase1_objective: phase1,
            pivots: tab.pivots,
        });
    }
    tab.purge_artificials();

    tab.live = c;
    tab.cost = lp.c.clone();
    tab.cost.resize(tab.width, T::zero());
    tab.pricing = Pricing::Dantzig;
    tab.degenerate_run = 0;
    tab.refactor()?;
    tab.optimize(c, opts.feas_tol)?;
    tab.refactor()?;
    // Cleanup after refactorization may expose a few remaining improving columns.
    tab.optimize(c, opts.feas_tol)?;

    let x = tab.primal();
    let y = extract_dual(lp, &tab.basis, &tab.rows)?;
    let objective = linalg::dot(&lp.c, &x);
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        x,
        objective,
        y,
        basis: tab.basis.clone(),
        active_rows: tab.rows.clone(),
        phase1_objective: phase1,
        pivots: tab.pivots,
    })
}

/// Dual solution `y = B⁻ᵀ c_B` for a basis over `active_rows`; rows
/// dropped as redundant receive a zero multiplier.
pub fn extract_dual<T: Scalar>(lp: &StandardLp<T>, basis: &[usize], active_rows: &[usize]) -> Result<Vec<T>> {
    if basis.len() != active_rows.len() {
        return Err(Error::DimensionMismatch { expected: active_rows.len(), found: basis.len() });
    }
    let mut y = vec![T::zero(); lp.num_rows()];
    if basis.is_empty() {
        return Ok(y);
    }
    let bmat = lp.a.select_rows(active_rows).select_columns(basis);
    let c_b: Vec<T> = basis.iter().map(|&j| lp.c[j]).collect();
    let ya = LuFactorization::new(&bmat, T::lit(T::PIVOT_TOL))?.solve_transpose(&c_b)?;
    for (&r, v) in active_rows.iter().zip(ya) {
        y[r] = v;
    }
    Ok(y)
}

/// Reduced costs `c − Aᵀy`.
pub fn reduced_costs<T: Scalar>(lp: &StandardLp<T>, y: &[T]) -> Result<Vec<T>> {
    let aty = lp.a.tr_matvec(y)?;
    Ok(lp.c.iter().zip(aty).map(|(&c, v)| c - v).collect())
}

/// Checks both complementary slackness families:
/// `|y_i (a_i·x − b_i)| ≤ tol` for every row and `|x_j (c_j − yᵀA_j)| ≤ tol` for every column.
pub fn check_complementary_slackness<T: Scalar>(x: &[T], y: &[T], lp: &StandardLp<T>, tol: T) -> Result<bool> {
    if x.len() != lp.num_cols() {
        return Err(Error::DimensionMismatch { expected: lp.num_cols(), found: x.len() });
    }
    if y.len() != lp.num_rows() {
        return Err(Error::DimensionMismatch { expected: lp.num_rows(), found: y.len() });
    }
    let ax = lp.a.matvec(x)?;
    let rows_ok = ax.iter().zip(&lp.b).zip(y).all(|((&axi, &bi), &yi)| (yi * (axi - bi)).abs() <= tol);
    let cols_ok = reduced_costs(lp, y)?.iter().zip(x).all(|(&r, &xj)| (xj * r).abs() <= tol);
    Ok(rows_ok && cols_ok)
}
