//! Log-barrier program P3, `max Σ ln(u_i + ε)` over the scalability polytope.
//!
//! Solved by conditional gradient (Frank–Wolfe): every step minimizes the
//! linearized objective with the simplex solver over the same polytope and
//! moves toward that vertex. Iterates are convex combinations of feasible
//! points and therefore stay feasible.

use std::fmt;

use crate::error::{Error, Result};
use crate::fmap::FMatrix;
use crate::frame::ScalingWeights;
use crate::linalg;
use crate::programs::{self, CoefficientRule, Method, ScalabilityReport, Tolerances};
use crate::scalar::Scalar;
use crate::simplex::{self, StandardLp};

/// Gradient used for a coordinate at which `ln(u_i + ε)` is `−∞`.
const BOUNDARY_GRADIENT: f64 = 1e12;
const GOLDEN_TOL: f64 = 1e-12;
const GAP_TOL: f64 = 1e-9;
const STALL_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// `γ_k = 2 / (k + 2)`.
    Diminishing,
    /// Golden-section maximization of the objective on the segment.
    ExactLineSearch,
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepRule::Diminishing => "diminishing",
            StepRule::ExactLineSearch => "exact",
        })
    }
}

#[derive(Debug, Clone)]
pub struct BarrierOptions<T> {
    /// Barrier shift `ε ∈ [0, 1)`.
    pub epsilon: T,
    pub max_iters: usize,
    /// Relative objective improvement below which an iteration counts as stalled.
    pub obj_tol: T,
    pub step_rule: StepRule,
    /// Smallest weight accepted as strictly positive.
    pub positivity_threshold: T,
    /// Keep every accepted iterate in [`BarrierSolution::iterates`].
    pub record_iterates: bool,
}

impl<T: Scalar> Default for BarrierOptions<T> {
    fn default() -> Self {
        Self {
            epsilon: T::lit(1e-8),
            max_iters: 2000,
            obj_tol: T::lit(1e-10),
            step_rule: StepRule::ExactLineSearch,
            positivity_threshold: T::lit(1e-10),
            record_iterates: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Frank–Wolfe gap below tolerance.
    Gap,
    /// Relative improvement below `obj_tol` for several consecutive iterations.
    Stalled,
    /// With `ε = 0`, some coordinate is zero on the whole polytope.
    NoStrictlyPositivePoint,
}

#[derive(Debug, Clone)]
pub struct BarrierSolution<T> {
    pub report: ScalabilityReport<T>,
    /// Final `Σ ln(u_i + ε)`, `−∞` if some `u_i + ε = 0`.
    pub objective: T,
    pub iterations: usize,
    pub converged: bool,
    pub stop: StopReason,
    /// Objective after each iteration, starting with the initial point.
    pub trace: Vec<T>,
    pub gap: T,
    pub min_weight: T,
    /// Accepted iterates including the start, when requested.
    pub iterates: Vec<Vec<T>>,
}

/// `Σ ln(u_i + ε)`, or `−∞` when some `u_i + ε` is zero.
pub fn p3_objective<T: Scalar>(u: &[T], epsilon: T) -> Result<T> {
    let slack = T::lit(1e-12);
    if let Some(index) = u.iter().position(|&v| v < -slack) {
        return Err(Error::NegativeWeight { index, value: u[index].as_f64() });
    }
    Ok(objective_unchecked(u, epsilon))
}

fn objective_unchecked<T: Scalar>(u: &[T], epsilon: T) -> T {
    u.iter()
        .map(|&v| {
            let s = v.max(T::zero()) + epsilon;
            if s > T::zero() { s.ln() } else { T::neg_infinity() }
        })
        .sum()
}

/// `∂/∂u_i Σ ln(u_i + ε) = 1 / (u_i + ε)`, with a large finite value at the boundary.
pub fn p3_gradient<T: Scalar>(u: &[T], epsilon: T) -> Vec<T> {
    let cap = T::lit(BOUNDARY_GRADIENT);
    u.iter()
        .map(|&v| {
            let s = v.max(T::zero()) + epsilon;
            if s > T::zero() { (T::one() / s).min(cap.max(T::one() / s)) } else { cap }
        })
        .collect()
}

/// Maximizes a concave `phi` on `[0, 1]` by golden-section search, then compares
/// against both endpoints.
fn golden_section<T: Scalar>(phi: impl Fn(T) -> T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (T::zero(), T::one());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    let tol = T::lit(GOLDEN_TOL).max(T::epsilon().sqrt());
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = phi(d);
        }
    }
    let mid = (a + b) / T::lit(2.0);
    [(mid, phi(mid)), (T::one(), phi(T::one())), (T::zero(), phi(T::zero()))]
        .into_iter()
        .fold((T::zero(), T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best })
}

/// Solves P3 by Frank–Wolfe, starting from the P1 solution.
///
/// Fails with [`Error::NotScalable`] when the feasible set is empty and with
/// [`Error::Inconclusive`] when `max_iters` is reached while still improving.
pub fn solve_p3_logbarrier<T: Scalar>(
    fm: &FMatrix<T>,
    opts: &BarrierOptions<T>,
    tols: &Tolerances<T>,
) -> Result<BarrierSolution<T>> {
    if !(opts.epsilon >= T::zero() && opts.epsilon < T::one()) {
        return Err(Error::InvalidShape(format!("barrier epsilon {} outside [0, 1)", opts.epsilon)));
    }
    let start = programs::solve_p1_detailed(fm, CoefficientRule::Ones, tols)?;
    if !start.outcome.is_optimal() {
        return Err(Error::NotScalable);
    }
    let lp_base = start.lp;
    let eps = opts.epsilon;
    let mut u = start.outcome.x;
    let mut f = objective_unchecked(&u, eps);
    let mut trace = vec![f];
    let mut iterates = if opts.record_iterates { vec![u.clone()] } else { Vec::new() };
    let mut stalled = 0usize;
    let mut gap = T::infinity();
    let mut stop = None;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        let g = p3_gradient(&u, eps);
        let gmax = g.iter().fold(T::zero(), |m, &v| m.max(v));
        let cost: Vec<T> = g.iter().map(|&v| -v / gmax).collect();
        let lp = StandardLp::new(lp_base.a().clone(), lp_base.b().to_vec(), cost)?;
        let out = simplex::solve(&lp, &tols.simplex())?;
        if !out.is_optimal() {
            return Err(Error::NotScalable);
        }
        let s = out.x;
        let dir: Vec<T> = s.iter().zip(&u).map(|(&si, &ui)| si - ui).collect();
        gap = linalg::dot(&g, &dir);
        iterations += 1;

        let point = |gamma: T| -> Vec<T> { u.iter().zip(&dir).map(|(&ui, &di)| ui + gamma * di).collect() };
        let phi = |gamma: T| objective_unchecked(&point(gamma), eps);

        if f.is_finite() && gap <= T::lit(GAP_TOL) {
            stop = Some(StopReason::Gap);
            trace.push(f);
            break;
        }
        if !f.is_finite() {
            // The boundary gradient dominates the cost, so `s` maximizes the mass on the
            // zero set Z. If even that is zero, every point of the polytope vanishes on Z.
            let reach = u
                .iter()
                .zip(&s)
                .filter(|(&ui, _)| ui.max(T::zero()) + eps <= T::zero())
                .fold(T::zero(), |acc, (_, &si)| acc + si.max(T::zero()));
            let stuck = reach <= tols.feas;
            if stuck {
                stop = Some(StopReason::NoStrictlyPositivePoint);
                trace.push(f);
                break;
            }
        }

        let gamma = match opts.step_rule {
            StepRule::Diminishing => T::lit(2.0) / T::from_usize(iterations + 1).unwrap(),
            StepRule::ExactLineSearch => {
                let (gamma, best) = golden_section(&phi);
                if best == T::neg_infinity() {
                    T::lit(2.0) / T::from_usize(iterations + 1).unwrap()
                } else {
                    gamma
                }
            }
        };
        let candidate = point(gamma);
        let f_new = objective_unchecked(&candidate, eps);
        let improvement = f_new - f;
        let small = f.is_finite() && f_new.is_finite() && improvement.abs() <= opts.obj_tol * f.abs().max(T::one());
        if opts.step_rule == StepRule::ExactLineSearch && f_new < f {
            // Line search could not improve; the current point is optimal up to its resolution.
            stalled += 1;
        } else {
            u = candidate;
            f = f_new;
            if opts.record_iterates {
                iterates.push(u.clone());
            }
            stalled = if small { stalled + 1 } else { 0 };
        }
        trace.push(f);
        if stalled >= STALL_WINDOW {
            stop = Some(StopReason::Stalled);
            break;
        }
    }

    let Some(stop) = stop else {
        return Err(Error::Inconclusive { iterations, residual: gap.as_f64() });
    };
    let weights = ScalingWeights::with_relative_zero_tol(&u, tols.zero_rel)?;
    let min_weight = u.iter().fold(T::infinity(), |m, &v| m.min(v));
    let converged = stop != StopReason::NoStrictlyPositivePoint
        && f.is_finite()
        && (eps > T::zero() || min_weight > opts.positivity_threshold);
    let mut report = ScalabilityReport::with_weights(Method::Barrier, fm, weights)?;
    report.primal_objective = Some(f);
    Ok(BarrierSolution { report, objective: f, iterations, converged, stop, trace, gap, min_weight, iterates })
}
