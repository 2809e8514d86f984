//! Acceptance suite. Every test prints one `PASS`/`FAIL` line per criterion.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use framescale::auglag::{self, AugLagOptions, UpdateMode};
use framescale::barrier::{self, BarrierOptions};
use framescale::experiments::{self, cell_outcomes, TrialOutcome};
use framescale::fmap::f_of_frame;
use framescale::frame::{gaussian_frame, mercedes_benz};
use framescale::programs::{
    self, dual_start_p2, oracle_vertex_enumeration, solve_p1_detailed, solve_p4_maximin, tightness_error,
    verify_dual_feasible, CoefficientRule, Method, ScalingOptions, Tolerances,
};
use framescale::seed::mix_seed;
use framescale::simplex::check_complementary_slackness;
use framescale::{cli, linalg, Frame64, ScalingWeights};

const SEED: u64 = 1;

fn verdict(id: &str, ok: bool, detail: &str) {
    println!("criterion {id}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
}

fn finish(id: &str, checks: &[(String, bool)]) {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
    verdict(id, failed.is_empty(), &if failed.is_empty() { format!("{} checks", checks.len()) } else { failed.join("; ") });
    assert!(failed.is_empty(), "criterion {id} failed: {failed:?}");
}

fn frame(cols: &[[f64; 2]]) -> Frame64 {
    Frame64::from_columns(&cols.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn criterion_1_sparsity_table() {
    let opts = ScalingOptions::<f64>::default();
    let expected: [(usize, usize, f64, f64); 8] = [
        (2, 3, 3.0, 0.1),
        (2, 5, 3.0, 0.1),
        (2, 10, 3.0, 0.1),
        (2, 30, 3.0, 0.1),
        (3, 10, 6.0, 0.3),
        (3, 20, 6.0, 0.3),
        (4, 20, 10.1, 0.5),
        (5, 20, 15.1, 0.7),
    ];
    let mut checks = Vec::new();
    for &(n, m, target, tol) in &expected {
        let cell = &experiments::sparsity_experiment(&[n], &[m], 100, SEED, Method::Lp, &opts).unwrap()[0];
        let ok = cell.avg_retained.is_some_and(|a| (a - target).abs() <= tol);
        println!(
            "  N={n} M={m}: avg_retained={:?} over {} scalable of {} (target {target} ± {tol})",
            cell.avg_retained, cell.trials_scalable, cell.trials_total
        );
        checks.push((format!("N={n} M={m} avg={:?} scalable={}", cell.avg_retained, cell.trials_scalable), ok));
    }
    finish("1", &checks);
}

#[test]
fn criterion_2_d_plus_one_law() {
    let opts = ScalingOptions::<f64>::default();
    let ms = [3, 4, 5, 10, 20, 30, 40, 50];
    let cells = experiments::sparsity_experiment(&[2, 3, 4, 5], &ms, 100, SEED, Method::Lp, &opts).unwrap();
    let mut checks = Vec::new();
    for row in experiments::dplus1_trend(&cells) {
        println!("  N={}: avg={} d+1={} gap={:+.4}", row.n, row.avg_over_cells, row.d_plus_1, row.relative_gap);
        checks.push((format!("N={} gap {}", row.n, row.relative_gap), row.relative_gap.abs() <= 0.05));
    }
    checks.push(("all four dimensions published".into(), experiments::dplus1_trend(&cells).len() == 4));
    for c in &cells {
        let bound = c.n * (c.n + 1) / 2;
        checks.push((format!("N={} M={} max retained {} > {bound}", c.n, c.m, c.max_retained), c.max_retained <= bound));
    }
    finish("2", &checks);
}

#[test]
fn criterion_3_oracle_equivalence() {
    let tols = Tolerances::<f64>::default();
    let mut checks = Vec::new();
    for (n, m) in [(2usize, 3usize), (2, 4), (2, 5), (3, 7), (3, 8)] {
        let (mut agree, mut scalable, mut worst_t) = (0, 0, 0.0f64);
        let mut t_ok = true;
        for trial in 0..200 {
            let f = gaussian_frame::<f64>(n, m, mix_seed(SEED, n as u64, m as u64, trial), true).unwrap();
            let fm = f_of_frame(&f).unwrap();
            let oracle = oracle_vertex_enumeration(&fm, 1e-9).unwrap();
            let lp = programs::solve_p1(&fm, CoefficientRule::Ones, &tols).unwrap();
            agree += usize::from(lp.scalable == oracle.scalable);
            if oracle.scalable {
                scalable += 1;
                let p4 = solve_p4_maximin(&fm, &tols).unwrap();
                match (p4.t_star, oracle.optimal_maximin) {
                    (Some(a), Some(b)) => worst_t = worst_t.max((a - b).abs()),
                    _ => t_ok = false,
                }
            }
        }
        println!("  N={n} M={m}: agreement {agree}/200, scalable {scalable}, max |t* - oracle| = {worst_t:e}");
        checks.push((format!("N={n} M={m} agreement {agree}/200"), agree == 200));
        checks.push((format!("N={n} M={m} maximin gap {worst_t:e}"), t_ok && worst_t <= 1e-8));
    }
    finish("3", &checks);
}

#[test]
fn criterion_4_tightness_postcondition() {
    let mut opts = ScalingOptions::<f64>::default();
    // Only positive verdicts are checked; a lower cap just turns slow failures into Inconclusive sooner.
    opts.auglag.max_iters = 20_000;
    let mut checks = Vec::new();
    let mut positives = 0;
    for (n, m, trials) in [(2usize, 5usize, 20u64), (3, 10, 20), (4, 20, 10)] {
        for trial in 0..trials {
            let f = gaussian_frame::<f64>(n, m, mix_seed(SEED, n as u64, m as u64, 1000 + trial), true).unwrap();
            for method in Method::ALL {
                if method == Method::Oracle && n > 3 {
                    continue;
                }
                let Ok(r) = programs::is_scalable(&f, method, &opts) else { continue };
                let Some(w) = &r.weights else { continue };
                positives += 1;
                let err = tightness_error(&f, w.values()).unwrap();
                let cond = r.cond_after.unwrap();
                if err > 1e-6 || cond > 1.0 + 1e-6 {
                    checks.push((format!("N={n} M={m} trial {trial} {method}: err {err:e} cond {cond}"), false));
                }
            }
        }
    }
    println!("  {positives} positive verdicts checked");
    checks.push((format!("{positives} positive verdicts"), positives > 0));
    finish("4", &checks);
}

#[test]
fn criterion_5_duality() {
    let tols = Tolerances::<f64>::default();
    let mut checks = Vec::new();
    let (mut found, mut worst_gap, mut trial) = (0, 0.0f64, 0u64);
    while found < 100 {
        let f = gaussian_frame::<f64>(3, 12, mix_seed(SEED, 5, 0, trial), false).unwrap();
        trial += 1;
        let fm = f_of_frame(&f).unwrap();
        let rule = if trial % 2 == 0 { CoefficientRule::Ones } else { CoefficientRule::InverseFNorm };
        let sol = solve_p1_detailed(&fm, rule, &tols).unwrap();
        if !sol.report.scalable {
            continue;
        }
        found += 1;
        let gap = (sol.report.primal_objective.unwrap() - sol.report.dual_objective.unwrap()).abs();
        worst_gap = worst_gap.max(gap);
        let cs = check_complementary_slackness(&sol.outcome.x, &sol.outcome.y, &sol.lp, 1e-8).unwrap();
        if !cs {
            checks.push((format!("slackness fails on trial {trial}"), false));
        }
    }
    println!("  100 scalable frames from {trial} draws, max |primal - dual| = {worst_gap:e}");
    checks.push((format!("duality gap {worst_gap:e}"), worst_gap <= 1e-8));
    let mut failures = 0;
    for t in 0..1000u64 {
        let n = 2 + (t % 4) as usize;
        let f = gaussian_frame::<f64>(n, n + 1 + (t % 7) as usize, mix_seed(SEED, 6, 0, t), t % 3 == 0).unwrap();
        let fm = f_of_frame(&f).unwrap();
        for rule in [CoefficientRule::Ones, CoefficientRule::InverseFNorm] {
            let (w, v) = dual_start_p2(&fm, rule).unwrap();
            failures += usize::from(!verify_dual_feasible(&fm, rule, w, &v, 0.0).unwrap());
        }
    }
    println!("  dual start infeasible on {failures} of 2000 (frame, rule) pairs");
    checks.push((format!("dual start failures {failures}"), failures == 0));
    finish("5", &checks);
}

/// `∂𝓛/∂u_j` by central differences with step `h`.
fn central_difference(u: &[f64], mu: &[f64], lambda: f64, l: &framescale::Matrix64, b: &[f64], h: f64) -> Vec<f64> {
    (0..u.len())
        .map(|j| {
            let mut plus = u.to_vec();
            let mut minus = u.to_vec();
            plus[j] += h;
            minus[j] -= h;
            let fp = auglag::lagrangian_value_and_grad(&plus, mu, lambda, l, b).unwrap().0;
            let fm = auglag::lagrangian_value_and_grad(&minus, mu, lambda, l, b).unwrap().0;
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

#[test]
fn criterion_6_augmented_lagrangian() {
    use rand::{Rng, SeedableRng};
    let tols = Tolerances::<f64>::default();
    let mut checks = Vec::new();
    let opts = AugLagOptions { max_iters: 10_000, ..Default::default() };
    let identity = f_of_frame(&frame(&[[1.0, 0.0], [0.0, 1.0]])).unwrap();
    let mb = f_of_frame(&mercedes_benz::<f64>()).unwrap();
    for (name, fm, target) in [("I2", &identity, 0.5), ("Mercedes-Benz", &mb, 1.0 / 3.0)] {
        match auglag::solve_auglag(fm, &opts, &tols) {
            Ok(sol) => {
                let dev = sol.report.weights.unwrap().values().iter().map(|&x| (x - target).abs()).fold(0.0, f64::max);
                println!("  {name}: {} iterations, max deviation {dev:e}", sol.state.iter);
                checks.push((format!("{name} deviation {dev:e}"), dev <= 1e-5 && sol.state.iter <= 10_000));
            }
            Err(e) => checks.push((format!("{name}: {e}"), false)),
        }
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for k in 0..100u64 {
        let f = gaussian_frame::<f64>(3, 6, mix_seed(SEED, 7, 0, k), false).unwrap();
        let (l, b) = auglag::build_l_and_b(&f_of_frame(&f).unwrap());
        let u: Vec<f64> = (0..l.cols()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mu: Vec<f64> = (0..l.rows()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lambda = rng.random_range(0.1..10.0);
        let (_, g) = auglag::lagrangian_value_and_grad(&u, &mu, lambda, &l, &b).unwrap();
        let fd = central_difference(&u, &mu, lambda, &l, &b, 1e-6);
        let diff: Vec<f64> = g.iter().zip(&fd).map(|(a, c)| a - c).collect();
        worst = worst.max(linalg::norm2(&diff) / linalg::norm2(&g).max(1.0));
    }
    println!("  gradient vs central differences: max relative error {worst:e}");
    checks.push((format!("gradient error {worst:e}"), worst <= 1e-6));

    let (l, b) = auglag::build_l_and_b(&identity);
    let u = auglag::primal_update(&l, &b, &[0.0; 3], 2.0).unwrap();
    let dev = u.iter().map(|&x| (x - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    checks.push((format!("closed form deviation {dev:e}"), dev <= 1e-12));

    let literal = AugLagOptions { update_mode: UpdateMode::PaperLiteral, max_iters: 2000, ..Default::default() };
    let mut outcomes = [0usize; 3];
    for k in 0..20u64 {
        let f = gaussian_frame::<f64>(2 + (k % 2) as usize, 6, mix_seed(SEED, 8, 0, k), true).unwrap();
        match auglag::solve_auglag(&f_of_frame(&f).unwrap(), &literal, &tols) {
            Ok(_) => outcomes[0] += 1,
            Err(framescale::Error::Inconclusive { .. }) => outcomes[1] += 1,
            Err(_) => outcomes[2] += 1,
        }
    }
    println!(
        "  update as printed: {} converged, {} inconclusive, {} errors of 20",
        outcomes[0], outcomes[1], outcomes[2]
    );
    checks.push((format!("update as printed raised {} errors", outcomes[2]), outcomes[2] == 0));
    finish("6", &checks);
}

/// Maximizer of `Σ ln(u_i + ε)` over `{(t, 1/2, 1/2 − t)}` on a uniform grid.
fn grid_oracle(eps: f64) -> f64 {
    let steps = 500_000;
    (1..steps)
        .map(|k| 0.5 * k as f64 / steps as f64)
        .map(|t| (t, (t + eps).ln() + (0.5 + eps).ln() + (0.5 - t + eps).ln()))
        .fold((0.0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

#[test]
fn criterion_7_barrier() {
    let tols = Tolerances::<f64>::default();
    let mut checks = Vec::new();
    for eps in [0.0, 1e-8] {
        let opts = BarrierOptions { epsilon: eps, ..Default::default() };
        let mb = barrier::solve_p3_logbarrier(&f_of_frame(&mercedes_benz::<f64>()).unwrap(), &opts, &tols).unwrap();
        let dev = mb.report.weights.as_ref().unwrap().values().iter().map(|&x| (x - 1.0 / 3.0).abs()).fold(0.0, f64::max);
        checks.push((format!("eps={eps} Mercedes-Benz deviation {dev:e}"), dev <= 1e-6));

        let e121 = f_of_frame(&frame(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])).unwrap();
        let sol = barrier::solve_p3_logbarrier(&e121, &opts, &tols).unwrap();
        let t = grid_oracle(eps);
        let u = sol.report.weights.as_ref().unwrap().values().to_vec();
        let dev = [u[0] - t, u[1] - 0.5, u[2] - (0.5 - t)].iter().map(|x| x.abs()).fold(0.0, f64::max);
        println!("  eps={eps}: e1,e2,e1 -> {u:?} (grid oracle t = {t}), {} iterations", sol.iterations);
        checks.push((format!("eps={eps} e1e2e1 deviation {dev:e}"), dev <= 1e-4 && (t - 0.25).abs() <= 1e-4));
    }

    let zero = BarrierOptions { epsilon: 0.0, ..Default::default() };
    let (mut converged, mut nonmonotone) = (0, 0);
    for k in 0..60u64 {
        let n = 2 + (k % 2) as usize;
        let f = gaussian_frame::<f64>(n, 4 * n, mix_seed(SEED, 9, 0, k), true).unwrap();
        let fm = f_of_frame(&f).unwrap();
        let Ok(sol) = barrier::solve_p3_logbarrier(&fm, &zero, &tols) else { continue };
        if sol.trace.windows(2).any(|w| w[1] < w[0]) {
            nonmonotone += 1;
        }
        if sol.converged {
            converged += 1;
            if !(sol.min_weight > 1e-10) {
                checks.push((format!("frame {k}: converged with min u = {:e}", sol.min_weight), false));
            }
        }
    }
    println!("  {converged} converged random runs; {nonmonotone} non-monotone traces");
    checks.push((format!("{nonmonotone} non-monotone traces"), nonmonotone == 0));
    checks.push((format!("{converged} converged runs"), converged > 0));
    finish("7", &checks);
}

#[test]
fn criterion_8_proportion() {
    let opts = ScalingOptions::<f64>::default();
    let trials = 100;
    let lp = experiments::proportion_experiment(&[2], trials, SEED, Method::Lp, &opts, Some(1)).unwrap();
    let mut checks = vec![(format!("{} sweep points", lp.len()), lp.len() == 14 && lp[0].m == 3 && lp[13].m == 16)];
    for p in &lp {
        let oracle = cell_outcomes(2, p.m, trials, SEED, Method::Oracle, &opts);
        let scalable = oracle.iter().filter(|o| matches!(o, TrialOutcome::Scalable { .. })).count();
        let op = scalable as f64 / trials as f64;
        println!("  M={:2}: lp {:.2} oracle {:.2}", p.m, p.proportion, op);
        checks.push((format!("M={} lp {} oracle {op}", p.m, p.proportion), p.proportion == op));
    }
    for w in lp.windows(2) {
        let sigma = |p: f64| (p * (1.0 - p) / trials as f64).sqrt();
        let slack = 3.0 * (sigma(w[0].proportion).powi(2) + sigma(w[1].proportion).powi(2)).sqrt();
        checks.push((format!("M={} drop", w[1].m), w[1].proportion >= w[0].proportion - slack));
    }
    let last = lp.last().unwrap().proportion;
    checks.push((format!("proportion at M=16 is {last}"), last >= 0.95));
    finish("8", &checks);
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn criterion_9_figure_substitutes() {
    let mut checks = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("mb.svg");
    let output = Command::new(env!("CARGO_BIN_EXE_framescale"))
        .args(["plot", "r2"])
        .arg(fixture("mercedes_benz.json"))
        .arg("--weights")
        .arg(fixture("mercedes_benz_weights.json"))
        .arg("--out")
        .arg(&svg)
        .output()
        .unwrap();
    let golden = fs::read_to_string(fixture("mercedes_benz_r2.svg")).unwrap();
    checks.push(("plot r2 exit status".into(), output.status.code() == Some(0)));
    checks.push(("golden SVG bytes".into(), fs::read_to_string(&svg).ok().as_deref() == Some(golden.as_str())));

    let mut round_trips = 0;
    for k in 0..8u64 {
        let f = dir.path().join(format!("f{k}.json"));
        let w = dir.path().join(format!("w{k}.json"));
        let seed = (40 + k).to_string();
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let args = ["framescale", "gen", "--n", "2", "--m", "7", "--unit-norm", "--seed", &seed, "--out", f.to_str().unwrap()];
        assert_eq!(cli::run(args, &mut o, &mut e), 0);
        let code = cli::run(["framescale", "scale", f.to_str().unwrap(), "--out", w.to_str().unwrap()], &mut o, &mut e);
        if code != 0 {
            checks.push((format!("seed {seed}: scale exit {code}"), code == 1 && !w.exists()));
            continue;
        }
        let frame = cli::io::read_frame(&f).unwrap();
        let weights: ScalingWeights<f64> = cli::io::read_weights(&w).unwrap();
        let tight = frame.apply_scaling(&weights).unwrap().is_tight(1e-6);
        checks.push((format!("seed {seed}: round trip tight"), tight));
        round_trips += 1;
    }
    println!("  {round_trips} scalable round trips");
    checks.push((format!("{round_trips} round trips"), round_trips > 0));
    finish("9", &checks);
}
