//! Seeded Monte Carlo studies on unit-norm Gaussian frames.
//!
//! Trial `t` of cell `(N, M)` draws its frame from `mix_seed(seed, N, M, t)`
//! (see [`crate::seed`]), so results do not depend on the order in which
//! trials run. Trials execute on the rayon pool and are reduced in index order.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::{gaussian_frame, Frame, ScalingWeights};
use crate::programs::{is_scalable, Method, ScalingOptions};
use crate::scalar::Scalar;
use crate::seed::mix_seed;

/// Cells with fewer scalable trials than this report no average.
pub const MIN_SCALABLE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityCell {
    pub n: usize,
    pub m: usize,
    pub trials_total: usize,
    pub trials_scalable: usize,
    /// Trials whose solver returned an error; counted as not scalable.
    pub trials_failed: usize,
    /// Mean support size over scalable trials, when there are enough of them.
    pub avg_retained: Option<f64>,
    /// Largest support size seen.
    pub max_retained: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProportionPoint {
    pub n: usize,
    pub m: usize,
    /// `(M − N) / (4N² − N)`, so the sweep `N+1 … 4N²` lands in `(0, 1]`.
    pub m_scaled: f64,
    pub proportion: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Scalable { retained: usize },
    NotScalable,
    Failed,
}

/// Seed of trial `trial` in cell `(n, m)`.
pub fn trial_seed(seed: u64, n: usize, m: usize, trial: usize) -> u64 {
    mix_seed(seed, n as u64, m as u64, trial as u64)
}

/// Runs one trial: draw the frame, then decide scalability with `method`.
pub fn run_trial<T: Scalar>(n: usize, m: usize, seed: u64, method: Method, opts: &ScalingOptions<T>) -> TrialOutcome {
    let Ok(frame) = gaussian_frame::<T>(n, m, seed, true) else { return TrialOutcome::Failed };
    match is_scalable(&frame, method, opts) {
        Ok(r) if r.scalable => TrialOutcome::Scalable { retained: r.support_size().unwrap_or(0) },
        Ok(_) => TrialOutcome::NotScalable,
        Err(_) => TrialOutcome::Failed,
    }
}

/// All trial outcomes of one cell, in trial order.
pub fn cell_outcomes<T: Scalar>(
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    method: Method,
    opts: &ScalingOptions<T>,
) -> Vec<TrialOutcome> {
    (0..trials)
        .into_par_iter()
        .map(|t| run_trial(n, m, trial_seed(seed, n, m, t), method, opts))
        .collect()
}

fn summarize(n: usize, m: usize, outcomes: &[TrialOutcome]) -> SparsityCell {
    let retained: Vec<usize> = outcomes
        .iter()
        .filter_map(|o| match o {
            TrialOutcome::Scalable { retained } => Some(*retained),
            _ => None,
        })
        .collect();
    let trials_scalable = retained.len();
    let avg_retained = (trials_scalable >= MIN_SCALABLE)
        .then(|| retained.iter().sum::<usize>() as f64 / trials_scalable as f64);
    SparsityCell {
        n,
        m,
        trials_total: outcomes.len(),
        trials_scalable,
        trials_failed: outcomes.iter().filter(|o| **o == TrialOutcome::Failed).count(),
        avg_retained,
        max_retained: retained.into_iter().max().unwrap_or(0),
    }
}

/// Average support size of scalable trials for every `(N, M)` pair, in
/// row-major order of `n_list × m_list`. Pairs with `M < N` yield empty cells.
pub fn sparsity_experiment<T: Scalar>(
    n_list: &[usize],
    m_list: &[usize],
    trials: usize,
    seed: u64,
    method: Method,
    opts: &ScalingOptions<T>,
) -> Result<Vec<SparsityCell>> {
    if trials == 0 {
        return Err(Error::InvalidShape("trials must be at least 1".into()));
    }
    let mut cells = Vec::with_capacity(n_list.len() * m_list.len());
    for &n in n_list {
        for &m in m_list {
            let outcomes = if m < n { vec![TrialOutcome::Failed; trials] } else { cell_outcomes(n, m, trials, seed, method, opts) };
            cells.push(summarize(n, m, &outcomes));
        }
    }
    Ok(cells)
}

/// Default sweep stride: 1 up to `N = 5`, then about 40 points per sweep.
pub fn default_stride(n: usize) -> usize {
    if n <= 5 {
        1
    } else {
        (4 * n * n - n).div_ceil(40)
    }
}

/// The values of `M` swept for dimension `n`: `N+1, N+1+stride, …`, always ending at `4N²`.
pub fn sweep(n: usize, stride: usize) -> Vec<usize> {
    let top = 4 * n * n;
    let mut ms: Vec<usize> = (n + 1..=top).step_by(stride.max(1)).collect();
    if ms.last() != Some(&top) {
        ms.push(top);
    }
    ms
}

/// Fraction of scalable frames along the sweep of every `N`.
///
/// `stride` overrides [`default_stride`] when given.
pub fn proportion_experiment<T: Scalar>(
    n_list: &[usize],
    trials: usize,
    seed: u64,
    method: Method,
    opts: &ScalingOptions<T>,
    stride: Option<usize>,
) -> Result<Vec<ProportionPoint>> {
    if trials == 0 {
        return Err(Error::InvalidShape("trials must be at least 1".into()));
    }
    let mut points = Vec::new();
    for &n in n_list {
        let span = (4 * n * n - n) as f64;
        for m in sweep(n, stride.unwrap_or_else(|| default_stride(n))) {
            let outcomes = cell_outcomes(n, m, trials, seed, method, opts);
            let scalable = outcomes.iter().filter(|o| matches!(o, TrialOutcome::Scalable { .. })).count();
            points.push(ProportionPoint {
                n,
                m,
                m_scaled: (m - n) as f64 / span,
                proportion: scalable as f64 / trials as f64,
                trials,
            });
        }
    }
    Ok(points)
}

/// Data for an R² vector diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct R2Figure<T> {
    /// Unit-normalized frame vectors, one per column.
    pub original: Vec<[T; 2]>,
    /// `(k, √u_k φ_k)` for every `k` in the support.
    pub scaled: Vec<(usize, [T; 2])>,
}

pub fn r2_figure_data<T: Scalar>(frame: &Frame<T>, weights: Option<&ScalingWeights<T>>) -> Result<R2Figure<T>> {
    if frame.n() != 2 {
        return Err(Error::WrongDimension(frame.n()));
    }
    let original = frame.normalize_columns()?.columns().into_iter().map(|c| [c[0], c[1]]).collect();
    let scaled = match weights {
        None => Vec::new(),
        Some(w) => {
            if w.m() != frame.m() {
                return Err(Error::DimensionMismatch { expected: frame.m(), found: w.m() });
            }
            let x = w.scaling_diagonal();
            (0..frame.m())
                .filter(|&k| x[k] > T::zero())
                .map(|k| {
                    let v = frame.vector(k);
                    (k, [x[k] * v[0], x[k] * v[1]])
                })
                .collect()
        }
    };
    Ok(R2Figure { original, scaled })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendRow {
    pub n: usize,
    /// Mean of the published cell averages for this `N`.
    pub avg_over_cells: f64,
    /// `N(N+1)/2`.
    pub d_plus_1: usize,
    /// `(avg − (d+1)) / (d+1)`.
    pub relative_gap: f64,
}

/// Compares the average support per `N` with `N(N+1)/2`. Dimensions without any
/// published cell are skipped.
pub fn dplus1_trend(cells: &[SparsityCell]) -> Vec<TrendRow> {
    let mut ns: Vec<usize> = cells.iter().map(|c| c.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .filter_map(|n| {
            let avgs: Vec<f64> = cells.iter().filter(|c| c.n == n).filter_map(|c| c.avg_retained).collect();
            if avgs.is_empty() {
                return None;
            }
            let avg = avgs.iter().sum::<f64>() / avgs.len() as f64;
            let d1 = n * (n + 1) / 2;
            Some(TrendRow { n, avg_over_cells: avg, d_plus_1: d1, relative_gap: (avg - d1 as f64) / d1 as f64 })
        })
        .collect()
}

/// Seventeen significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_sparsity_csv<W: Write>(cells: &[SparsityCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "M", "trials_total", "trials_scalable", "avg_retained"])?;
    for c in cells {
        w.write_record([
            c.n.to_string(),
            c.m.to_string(),
            c.trials_total.to_string(),
            c.trials_scalable.to_string(),
            c.avg_retained.map(format_float).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_proportion_csv<W: Write>(points: &[ProportionPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "M", "m_scaled", "trials", "proportion"])?;
    for p in points {
        w.write_record([
            p.n.to_string(),
            p.m.to_string(),
            format_float(p.m_scaled),
            p.trials.to_string(),
            format_float(p.proportion),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::mercedes_benz;

    #[test]
    fn sweep_ranges() {
        assert_eq!(sweep(2, 1), (3..=16).collect::<Vec<_>>());
        let s = sweep(10, default_stride(10));
        assert_eq!((s[0], *s.last().unwrap()), (11, 400));
        assert!(s.len() <= 41);
    }

    #[test]
    fn small_cell_is_absent() {
        let cells = sparsity_experiment::<f64>(&[3], &[3], 20, 1, Method::Lp, &ScalingOptions::default()).unwrap();
        assert_eq!(cells[0].avg_retained, None);
        assert!(sparsity_experiment::<f64>(&[2], &[3], 0, 1, Method::Lp, &ScalingOptions::default()).is_err());
    }

    #[test]
    fn summary_threshold() {
        let mut o = vec![TrialOutcome::Scalable { retained: 3 }; 9];
        o.push(TrialOutcome::NotScalable);
        assert_eq!(summarize(2, 5, &o).avg_retained, None);
        o.push(TrialOutcome::Scalable { retained: 2 });
        let c = summarize(2, 5, &o);
        assert_eq!(c.avg_retained, Some(2.9));
        assert_eq!((c.trials_total, c.trials_scalable, c.max_retained), (11, 10, 3));
    }

    #[test]
    fn r2_examples() {
        let mb = mercedes_benz::<f64>();
        let fig = r2_figure_data(&mb, Some(&ScalingWeights::uniform(3))).unwrap();
        assert_eq!((fig.original.len(), fig.scaled.len()), (3, 3));
        for (_, v) in &fig.scaled {
            assert!(((v[0] * v[0] + v[1] * v[1]).sqrt() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        let w = ScalingWeights::from_raw(&[1.0, 0.0, 1.0]).unwrap();
        let fig = r2_figure_data(&mb, Some(&w)).unwrap();
        assert_eq!(fig.scaled.iter().map(|s| s.0).collect::<Vec<_>>(), vec![0, 2]);
        let f3 = Frame::from_columns(&[vec![1.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(r2_figure_data(&f3, None), Err(Error::WrongDimension(3))));
    }

    #[test]
    fn trend_rows() {
        let cell = |n, m, avg| SparsityCell {
            n,
            m,
            trials_total: 100,
            trials_scalable: 50,
            trials_failed: 0,
            avg_retained: avg,
            max_retained: 0,
        };
        let rows = dplus1_trend(&[cell(2, 5, Some(3.0)), cell(4, 20, Some(10.0)), cell(4, 30, Some(10.2)), cell(5, 5, None)]);
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].d_plus_1, rows[0].relative_gap), (3, 0.0));
        assert_eq!(rows[1].d_plus_1, 10);
        assert!((rows[1].relative_gap - 0.01).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let cells = vec![SparsityCell {
            n: 2,
            m: 3,
            trials_total: 4,
            trials_scalable: 1,
            trials_failed: 0,
            avg_retained: None,
            max_retained: 3,
        }];
        let mut buf = Vec::new();
        write_sparsity_csv(&cells, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "N,M,trials_total,trials_scalable,avg_retained\n2,3,4,1,\n");
        let mut buf = Vec::new();
        write_proportion_csv(&[ProportionPoint { n: 2, m: 16, m_scaled: 1.0, proportion: 0.5, trials: 2 }], &mut buf)
            .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "N,M,m_scaled,trials,proportion\n2,16,1.0000000000000000e0,2,5.0000000000000000e-1\n"
        );
    }
}
