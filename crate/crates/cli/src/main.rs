use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use lans_core::io::Checkpoint;
use lans_core::runner::{run_experiment, run_verify, ReportFile, Suite, VerifyOptions};
use lans_core::ExperimentConfig;

#[derive(Parser)]
#[command(name = "lans", version, about = "Pseudo-spectral LANS-alpha laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an initial-data checkpoint.
    GenIc {
        #[command(flatten)]
        run: RunArgs,
        /// Checkpoint path.
        #[arg(long, default_value = "initial.lans")]
        out: PathBuf,
    },
    /// Evolve with the timestepper.
    Solve(RunArgs),
    /// Solve the mild formulation by Picard iteration.
    Picard(RunArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    id: Option<String>,
    /// Spatial dimension (2 or 3).
    #[arg(long)]
    n: Option<usize>,
    /// Grid points per axis.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// `taylor-green` or `random-sobolev`.
    #[arg(long)]
    generator: Option<String>,
    /// Regularity of random data.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Final time T.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// `uniform` or `log`.
    #[arg(long)]
    sampling: Option<String>,
    /// Extra timeseries norm as `s,p`; repeatable.
    #[arg(long = "norm", value_parser = parse_norm)]
    norms: Vec<[f64; 2]>,
    /// Root directory for run output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// projectors, smoothing, bilinear, lipschitz, energy, h2, higher-reg, conditions, alpha-limit or all.
    suite: String,
    /// TOML file with suite options.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Smaller grids and ensembles.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    s1: Option<f64>,
    #[arg(long)]
    s2: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Root directory for run output.
    #[arg(long, default_value = "runs")]
    output: PathBuf,
}

fn parse_norm(text: &str) -> std::result::Result<[f64; 2], String> {
    let (s, p) = text.split_once(',').ok_or("expected `s,p`")?;
    let s = s.trim().parse().map_err(|e| format!("bad s: {e}"))?;
    let p = p.trim().parse().map_err(|e| format!("bad p: {e}"))?;
    Ok([s, p])
}

impl RunArgs {
    fn resolve(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path).with_context(|| format!("reading {}", path.display()))?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag { cfg.$($field).+ = v; })*
            };
        }
        set!(
            id => id,
            n => grid.n,
            points => grid.points,
            alpha => params.alpha,
            nu => params.nu,
            generator => data.generator,
            s => data.s,
            amplitude => data.amplitude,
            seed => data.seed,
            horizon => time.horizon,
            dt => time.dt,
            samples => time.samples,
            sampling => time.sampling,
            output => output,
        );
        cfg.norms.extend(self.norms);
        cfg.validate()?;
        Ok(cfg)
    }
}

impl VerifyArgs {
    fn resolve(&self) -> Result<(Suite, VerifyOptions)> {
        let suite: Suite = self.suite.parse()?;
        let mut opts = match &self.config {
            Some(path) => VerifyOptions::load(path).with_context(|| format!("reading {}", path.display()))?,
            None => VerifyOptions::default(),
        };
        opts.quick |= self.quick;
        macro_rules! set {
            ($($f:ident),*) => { $(if self.$f.is_some() { opts.$f = self.$f; })* };
        }
        set!(n, points, seed, s1, s2, p, r, q);
        Ok((suite, opts))
    }
}

fn print_report(report: &ReportFile) {
    for case in &report.reports {
        println!("{}", case.summary());
        for note in &case.notes {
            println!("    note: {note}");
        }
    }
    println!("{}: {}", report.name, if report.passed { "all passed" } else { "FAILED" });
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenIc { run, out } => {
            let cfg = run.resolve()?;
            let field = cfg.initial_data()?;
            Checkpoint { time: 0.0, params: cfg.alpha_param()?, field }.save(&out)?;
            println!("wrote {}", out.display());
            Ok(true)
        }
        Command::Solve(run) => experiment(run, "timestep"),
        Command::Picard(run) => experiment(run, "picard"),
        Command::Verify(args) => {
            let (suite, opts) = args.resolve()?;
            let (dir, report) = run_verify(suite, &opts, &args.output)?;
            print_report(&report);
            println!("output: {}", dir.display());
            Ok(report.passed)
        }
    }
}

fn experiment(run: RunArgs, solver: &str) -> Result<bool> {
    let mut cfg = run.resolve()?;
    cfg.solver = solver.into();
    let outcome = run_experiment(&cfg)?;
    print_report(&outcome.report);
    println!("output: {}", outcome.dir.display());
    Ok(outcome.report.passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
