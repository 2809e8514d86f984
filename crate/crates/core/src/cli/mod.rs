//! The `framescale` command line.
//!
//! Exit status: 0 when the frame is scalable (or a command succeeds), 1 when it
//! is provably not scalable, 2 on errors and inconclusive runs.

pub mod io;
pub mod svg;

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::auglag::{self, AugLagOptions, UpdateMode};
use crate::error::{Error, Result};
use crate::experiments;
use crate::fmap::f_of_frame;
use crate::frame::{gaussian_frame, Frame};
use crate::programs::{is_scalable, CoefficientRule, Method, ScalabilityReport, ScalingOptions};

use self::io::{FrameDoc, ReportDoc, WeightsDoc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_SCALABLE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "framescale", version, about = "Scalability testing and tight scaling of finite frames")]
pub struct Cli {
    /// Primal feasibility tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_feas: f64,
    /// Support threshold relative to the largest weight.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_zero: f64,
    /// Master seed for random frames and experiments.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a Gaussian random frame.
    Gen(GenArgs),
    /// Decide scalability and print the report as JSON.
    Check(SolveArgs),
    /// Compute scaling weights and write them as JSON.
    Scale(ScaleArgs),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Exp(ExpCommand),
    /// Vector diagrams.
    #[command(subcommand)]
    Plot(PlotCommand),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Normalize every column.
    #[arg(long)]
    pub unit_norm: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Lp,
    Maximin,
    Barrier,
    Auglag,
    Oracle,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Lp => Method::Lp,
            MethodArg::Maximin => Method::Maximin,
            MethodArg::Barrier => Method::Barrier,
            MethodArg::Auglag => Method::AugLag,
            MethodArg::Oracle => Method::Oracle,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CoefArg {
    Ones,
    InvFnorm,
}

impl From<CoefArg> for CoefficientRule {
    fn from(c: CoefArg) -> Self {
        match c {
            CoefArg::Ones => CoefficientRule::Ones,
            CoefArg::InvFnorm => CoefficientRule::InverseFNorm,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Classical,
    PaperLiteral,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "lp")]
    pub method: MethodArg,
    /// Objective coefficients of the linear program.
    #[arg(long, value_enum, default_value = "ones")]
    pub coef: CoefArg,
    /// Barrier shift.
    #[arg(long, default_value_t = 1e-8)]
    pub epsilon: f64,
    /// Multiplier and penalty update of the augmented Lagrangian.
    #[arg(long, value_enum, default_value = "classical")]
    pub auglag_mode: ModeArg,
    /// Iteration cap for the augmented Lagrangian.
    #[arg(long, default_value_t = 100_000)]
    pub auglag_iters: usize,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Frame JSON file.
    pub frame: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the augmented Lagrangian iteration trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Weights JSON output.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ExpCommand {
    /// Average support size of LP scalings.
    Sparsity(SparsityArgs),
    /// Fraction of scalable frames as M grows.
    Proportion(ProportionArgs),
}

#[derive(Debug, Args)]
pub struct SparsityArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProportionArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Step between consecutive M values.
    #[arg(long)]
    pub stride: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum PlotCommand {
    /// Original and scaled vectors of a frame in R².
    R2(PlotArgs),
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub frame: PathBuf,
    /// Weights JSON; without it only the original vectors are drawn.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

fn scaling_options(cli: &Cli, s: &SolverArgs) -> ScalingOptions<f64> {
    let mut opts = ScalingOptions::default();
    opts.tols.feas = cli.tol_feas;
    opts.tols.zero_rel = cli.tol_zero;
    opts.rule = s.coef.into();
    opts.barrier.epsilon = s.epsilon;
    opts.auglag = AugLagOptions {
        update_mode: match s.auglag_mode {
            ModeArg::Classical => UpdateMode::Classical,
            ModeArg::PaperLiteral => UpdateMode::PaperLiteral,
        },
        max_iters: s.auglag_iters,
        ..AugLagOptions::default()
    };
    opts
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(cli.seed, a, out),
        Command::Check(a) => cmd_check(cli, a, out),
        Command::Scale(a) => cmd_scale(cli, a, out),
        Command::Exp(ExpCommand::Sparsity(a)) => cmd_sparsity(cli, a, out),
        Command::Exp(ExpCommand::Proportion(a)) => cmd_proportion(cli, a, out),
        Command::Plot(PlotCommand::R2(a)) => cmd_plot_r2(a, out),
    }
}

fn cmd_gen(seed: u64, a: &GenArgs, out: &mut dyn Write) -> Result<i32> {
    let frame = gaussian_frame::<f64>(a.n, a.m, seed, a.unit_norm)?;
    io::write_json(&a.out, &FrameDoc::from_frame(&frame))?;
    let (lo, hi) = frame.frame_bounds()?;
    writeln!(out, "{}", a.out.display())?;
    writeln!(out, "frame bounds: A = {lo:e}, B = {hi:e}")?;
    Ok(EXIT_OK)
}

/// Trace of the augmented Lagrangian run, written whether or not it converges.
fn write_trace(frame: &Frame<f64>, opts: &ScalingOptions<f64>, path: &Path) -> Result<()> {
    let fm = f_of_frame(frame)?;
    let aopts = AugLagOptions { record_trace: true, ..opts.auglag.clone() };
    let (_, trace) = auglag::iterate(&fm, &aopts, aopts.res_tol.min(opts.tols.feas))?;
    auglag::write_trace_csv(&trace, path)
}

fn solve(cli: &Cli, a: &SolveArgs) -> Result<(Frame<f64>, ScalabilityReport<f64>)> {
    let frame = io::read_frame(&a.frame)?;
    let opts = scaling_options(cli, &a.solver);
    let method: Method = a.solver.method.into();
    if let Some(path) = &a.trace {
        if method != Method::AugLag {
            return Err(Error::InvalidShape("--trace requires --method auglag".into()));
        }
        write_trace(&frame, &opts, path)?;
    }
    let report = is_scalable(&frame, method, &opts)?;
    Ok((frame, report))
}

fn cmd_check(cli: &Cli, a: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let (_, report) = solve(cli, a)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&ReportDoc::from(&report))?)?;
    Ok(if report.scalable { EXIT_OK } else { EXIT_NOT_SCALABLE })
}

fn cmd_scale(cli: &Cli, a: &ScaleArgs, out: &mut dyn Write) -> Result<i32> {
    let (frame, report) = solve(cli, &a.solve)?;
    let Some(w) = &report.weights else {
        writeln!(out, "not scalable")?;
        return Ok(EXIT_NOT_SCALABLE);
    };
    let doc = WeightsDoc {
        m: w.m(),
        u: w.values().to_vec(),
        method: report.method.to_string(),
        residual: report.residual.unwrap_or(f64::NAN),
    };
    io::write_json(&a.out, &doc)?;
    writeln!(out, "cond_before: {:e}", frame.condition_number()?)?;
    writeln!(out, "cond_after: {:e}", report.cond_after.unwrap_or(f64::NAN))?;
    Ok(EXIT_OK)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_sparsity(cli: &Cli, a: &SparsityArgs, out: &mut dyn Write) -> Result<i32> {
    let opts = scaling_options(cli, &a.solver);
    let cells = experiments::sparsity_experiment(&a.n, &a.m, a.trials, cli.seed, a.solver.method.into(), &opts)?;
    experiments::write_sparsity_csv(&cells, create(&a.out)?)?;
    writeln!(out, "{}", a.out.display())?;
    Ok(EXIT_OK)
}

fn cmd_proportion(cli: &Cli, a: &ProportionArgs, out: &mut dyn Write) -> Result<i32> {
    let opts = scaling_options(cli, &a.solver);
    let points =
        experiments::proportion_experiment(&a.n, a.trials, cli.seed, a.solver.method.into(), &opts, a.stride)?;
    experiments::write_proportion_csv(&points, create(&a.out)?)?;
    writeln!(out, "{}", a.out.display())?;
    Ok(EXIT_OK)
}

fn cmd_plot_r2(a: &PlotArgs, out: &mut dyn Write) -> Result<i32> {
    let frame = io::read_frame(&a.frame)?;
    let weights = a.weights.as_deref().map(io::read_weights).transpose()?;
    let fig = experiments::r2_figure_data(&frame, weights.as_ref())?;
    fs::write(&a.out, svg::render_r2(&fig))?;
    writeln!(out, "{}", a.out.display())?;
    Ok(EXIT_OK)
}
