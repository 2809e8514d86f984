//! Augmented Lagrangian scheme for `min uᵀu` subject to `L u = b`, `u ⪰ 0`,
//! with `L = [F(Φ); 𝟙ᵀ]` and `b = (0, …, 0, 1)`.
//!
//! Each iteration minimizes the augmented Lagrangian in closed form, clips the
//! result to the nonnegative orthant and then updates the multipliers and the
//! penalty. Two update rules are available: [`UpdateMode::Classical`] is the
//! method of multipliers; [`UpdateMode::PaperLiteral`] moves both the
//! multipliers and the penalty downhill with step `η`.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fmap::FMatrix;
use crate::frame::ScalingWeights;
use crate::linalg::{self, Matrix};
use crate::programs::{stacked_constraints, Method, ScalabilityReport, Tolerances};
use crate::scalar::Scalar;

const LAMBDA_MIN: f64 = 1e-8;
const LAMBDA_MAX: f64 = 1e8;
const GROWTH: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdateMode {
    /// `μ' = μ − η r`, `λ' = max(λ − η/2 ‖r‖², 1e−8)`.
    PaperLiteral,
    /// `μ' = μ + λ r`, `λ' = min(1.5 λ, 1e8)`.
    #[default]
    Classical,
}

#[derive(Debug, Clone)]
pub struct AugLagOptions<T> {
    pub eta: T,
    pub lambda0: T,
    /// Initial multipliers; empty means zero.
    pub mu0: Vec<T>,
    pub max_iters: usize,
    /// Stop once `‖L u − b‖₂` is at most this.
    pub res_tol: T,
    pub update_mode: UpdateMode,
    /// Keep the per-iteration trace.
    pub record_trace: bool,
}

impl<T: Scalar> Default for AugLagOptions<T> {
    fn default() -> Self {
        Self {
            eta: T::lit(0.5),
            lambda0: T::one(),
            mu0: Vec::new(),
            max_iters: 100_000,
            res_tol: T::lit(1e-6),
            update_mode: UpdateMode::Classical,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AugLagState<T> {
    pub u: Vec<T>,
    pub mu: Vec<T>,
    pub lambda: T,
    pub eta: T,
    pub iter: usize,
    /// `‖L u − b‖₂`.
    pub residual: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<T> {
    pub iter: usize,
    pub residual: T,
    pub lambda: T,
    pub objective: T,
}

#[derive(Debug, Clone)]
pub struct AugLagSolution<T> {
    pub report: ScalabilityReport<T>,
    pub state: AugLagState<T>,
    pub trace: Vec<TraceRow<T>>,
}

/// `L = [F(Φ); 𝟙ᵀ]`, `b = (0, …, 0, 1)`.
pub fn build_l_and_b<T: Scalar>(fm: &FMatrix<T>) -> (Matrix<T>, Vec<T>) {
    stacked_constraints(fm)
}

fn residual_vec<T: Scalar>(l: &Matrix<T>, b: &[T], u: &[T]) -> Result<Vec<T>> {
    Ok(l.matvec(u)?.iter().zip(b).map(|(&p, &q)| p - q).collect())
}

/// Unconstrained minimizer of the augmented Lagrangian in `u`:
/// solves `(2/λ I + LᵀL) u = Lᵀ(b − μ/λ)`.
pub fn primal_update<T: Scalar>(l: &Matrix<T>, b: &[T], mu: &[T], lambda: T) -> Result<Vec<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::InvalidShape(format!("penalty must be positive, got {lambda}")));
    }
    if mu.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), found: mu.len() });
    }
    let mut sys = l.gram();
    let shift = T::lit(2.0) / lambda;
    for i in 0..sys.rows() {
        sys[(i, i)] += shift;
    }
    let rhs_r: Vec<T> = b.iter().zip(mu).map(|(&bi, &mi)| bi - mi / lambda).collect();
    let rhs = l.tr_matvec(&rhs_r)?;
    let u = linalg::solve_spd(&sys, &rhs)?;
    #[cfg(debug_assertions)]
    {
        let back = sys.matvec(&u)?;
        let err = back.iter().zip(&rhs).fold(T::zero(), |m, (&p, &q)| m.max((p - q).abs()));
        let scale = T::one().max(linalg::norm_inf(&rhs)).max(sys.max_abs() * linalg::norm_inf(&u));
        debug_assert!(err <= T::lit(1e-10).max(T::epsilon() * T::lit(1e3)) * scale, "primal update residual {err}");
    }
    Ok(u)
}

/// Componentwise `max(v_i, 0)`.
pub fn project_nonneg<T: Scalar>(v: &[T]) -> Vec<T> {
    v.iter().map(|&x| x.max(T::zero())).collect()
}

/// Multiplier and penalty update at the current primal point.
pub fn dual_update<T: Scalar>(state: &AugLagState<T>, l: &Matrix<T>, b: &[T], mode: UpdateMode) -> Result<(Vec<T>, T)> {
    let r = residual_vec(l, b, &state.u)?;
    Ok(match mode {
        UpdateMode::PaperLiteral => {
            let mu = state.mu.iter().zip(&r).map(|(&m, &ri)| m - state.eta * ri).collect();
            let rr = linalg::dot(&r, &r);
            let lambda = (state.lambda - state.eta / T::lit(2.0) * rr).max(T::lit(LAMBDA_MIN));
            (mu, lambda)
        }
        UpdateMode::Classical => {
            let mu = state.mu.iter().zip(&r).map(|(&m, &ri)| m + state.lambda * ri).collect();
            let grown = if r.iter().all(|&ri| ri == T::zero()) {
                state.lambda
            } else {
                (state.lambda * T::lit(GROWTH)).min(T::lit(LAMBDA_MAX).max(state.lambda))
            };
            (mu, grown)
        }
    })
}

/// `𝓛 = uᵀu + ⟨μ, Lu − b⟩ + λ/2 ‖Lu − b‖²` and `∇ᵤ𝓛 = 2u + Lᵀμ + λ Lᵀ(Lu − b)`.
pub fn lagrangian_value_and_grad<T: Scalar>(
    u: &[T],
    mu: &[T],
    lambda: T,
    l: &Matrix<T>,
    b: &[T],
) -> Result<(T, Vec<T>)> {
    let r = residual_vec(l, b, u)?;
    let value = linalg::dot(u, u) + linalg::dot(mu, &r) + lambda / T::lit(2.0) * linalg::dot(&r, &r);
    let w: Vec<T> = mu.iter().zip(&r).map(|(&m, &ri)| m + lambda * ri).collect();
    let lt = l.tr_matvec(&w)?;
    let grad = u.iter().zip(lt).map(|(&ui, g)| T::lit(2.0) * ui + g).collect();
    Ok((value, grad))
}

/// Iterates until `‖L u − b‖₂ ≤ target` or the cap, whichever comes first, and
/// returns the final state with the trace (empty unless `record_trace`).
pub fn iterate<T: Scalar>(fm: &FMatrix<T>, opts: &AugLagOptions<T>, target: T) -> Result<(AugLagState<T>, Vec<TraceRow<T>>)> {
    if !(opts.eta > T::zero() && opts.lambda0 > T::zero()) {
        return Err(Error::InvalidShape("eta and lambda0 must be positive".into()));
    }
    let (l, b) = build_l_and_b(fm);
    let mu = if opts.mu0.is_empty() { vec![T::zero(); b.len()] } else { opts.mu0.clone() };
    if mu.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), found: mu.len() });
    }
    let mut state = AugLagState {
        u: vec![T::zero(); fm.m()],
        mu,
        lambda: opts.lambda0,
        eta: opts.eta,
        iter: 0,
        residual: linalg::norm2(&b),
    };
    let mut trace = Vec::new();
    while state.iter < opts.max_iters {
        let v = primal_update(&l, &b, &state.mu, state.lambda)?;
        state.u = project_nonneg(&v);
        state.iter += 1;
        state.residual = linalg::norm2(&residual_vec(&l, &b, &state.u)?);
        if opts.record_trace {
            let (objective, _) = lagrangian_value_and_grad(&state.u, &state.mu, state.lambda, &l, &b)?;
            trace.push(TraceRow { iter: state.iter, residual: state.residual, lambda: state.lambda, objective });
        }
        if state.residual <= target {
            break;
        }
        let (mu, lambda) = dual_update(&state, &l, &b, opts.update_mode)?;
        state.mu = mu;
        state.lambda = lambda;
    }
    Ok((state, trace))
}

/// Runs the scheme until `‖L u − b‖₂` is at most both `res_tol` and the
/// feasibility tolerance `tols.feas`, so that accepted weights pass the same
/// tightness check as the LP methods. The weights are then renormalized to sum one.
///
/// Hitting `max_iters` yields [`Error::Inconclusive`]; that says nothing about
/// scalability either way.
pub fn solve_auglag<T: Scalar>(fm: &FMatrix<T>, opts: &AugLagOptions<T>, tols: &Tolerances<T>) -> Result<AugLagSolution<T>> {
    let target = opts.res_tol.min(tols.feas);
    let (state, trace) = iterate(fm, opts, target)?;
    if !(state.residual <= target) {
        return Err(Error::Inconclusive { iterations: state.iter, residual: state.residual.as_f64() });
    }
    let weights = ScalingWeights::with_relative_zero_tol(&state.u, tols.zero_rel)?;
    let norm = linalg::dot(weights.values(), weights.values());
    let mut report = ScalabilityReport::with_weights(Method::AugLag, fm, weights)?;
    report.primal_objective = Some(norm);
    Ok(AugLagSolution { report, state, trace })
}

/// Writes `iter,residual,lambda,objective` rows.
pub fn write_trace_csv<T: Scalar>(trace: &[TraceRow<T>], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iter", "residual", "lambda", "objective"])?;
    for row in trace {
        w.write_record([
            row.iter.to_string(),
            format!("{:.16e}", row.residual.as_f64()),
            format!("{:.16e}", row.lambda.as_f64()),
            format!("{:.16e}", row.objective.as_f64()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Same as [`write_trace_csv`] for an arbitrary writer.
pub fn write_trace<T: Scalar, W: Write>(trace: &[TraceRow<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iter", "residual", "lambda", "objective"])?;
    for row in trace {
        w.write_record([
            row.iter.to_string(),
            format!("{:.16e}", row.residual.as_f64()),
            format!("{:.16e}", row.lambda.as_f64()),
            format!("{:.16e}", row.objective.as_f64()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
