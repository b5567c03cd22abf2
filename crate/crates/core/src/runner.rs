//! Experiment runs and verification suites.
//!
//! Every run writes into a fresh directory. Reports carry no timings or
//! paths, so a rerun with the same inputs reproduces `report.json` byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{LansError, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::harness::conditions::{check_conditions_ct, default_axes, scan, ListFamily, LocalParamSet, ScanResult};
use crate::harness::experiments::{
    alpha_limit_experiment, bilinear_bound_experiment, energy_monotonicity_check, h2_bound_check,
    higher_reg_weight_check, lipschitz_experiment, projector_identity_experiment, smoothing_rate_experiment,
    taylor_green_decay_check, EstimateSetup, SmoothingSetup,
};
use crate::harness::report::{CaseReport, Provenance, Verdict};
use crate::init::{gen_random_sobolev, gen_taylor_green};
use crate::io::{write_timeseries, Checkpoint};
use crate::mild::{picard_solve, PicardConfig, PicardDiagnostics};
use crate::semigroup::{TimeGrid, Trajectory};
use crate::spectral::AlphaParam;
use crate::timestep::{evolve, StepConfig};

/// Version string recorded in manifests.
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Horizon halvings attempted after a non-contracting Picard run.
pub const MAX_HORIZON_HALVINGS: usize = 5;

/// Creates `root/name`, or `root/name-2`, `root/name-3`, … if taken.
pub fn fresh_dir(root: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(root)?;
    for i in 1.. {
        let candidate = if i == 1 { root.join(name) } else { root.join(format!("{name}-{i}")) };
        match fs::create_dir(&candidate) {
            Ok(()) => return Ok(candidate),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    unreachable!()
}

/// Top-level content of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub name: String,
    pub passed: bool,
    pub reports: Vec<CaseReport>,
}

impl ReportFile {
    pub fn new(name: impl Into<String>, reports: Vec<CaseReport>) -> Self {
        let passed = !reports.is_empty() && reports.iter().all(CaseReport::passed);
        Self { name: name.into(), passed, reports }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a, T: Serialize> {
    code_version: &'a str,
    kind: &'a str,
    config: &'a T,
}

fn write_manifest<T: Serialize>(dir: &Path, kind: &str, config: &T) -> Result<()> {
    let text = toml::to_string(&Manifest { code_version: CODE_VERSION, kind, config })
        .map_err(|e| LansError::Format(e.to_string()))?;
    fs::write(dir.join("manifest.toml"), text)?;
    Ok(())
}

fn failed(id: &str, err: &LansError) -> CaseReport {
    let mut rep = CaseReport::new(id, Provenance::Derived);
    rep.verdict = Verdict::Fail;
    rep.note(err.to_string());
    rep
}

/// Picard solve that halves the horizon after a non-contraction, up to
/// [`MAX_HORIZON_HALVINGS`] times. Returns the horizon that succeeded.
pub fn picard_with_retry(
    phi: &SpectralField,
    cfg: &PicardConfig,
    params: AlphaParam,
) -> Result<(Trajectory, PicardDiagnostics, f64)> {
    let mut attempt = *cfg;
    for halvings in 0..=MAX_HORIZON_HALVINGS {
        match picard_solve(phi, &attempt, params) {
            Err(LansError::NonContraction { .. }) if halvings < MAX_HORIZON_HALVINGS => attempt.horizon /= 2.0,
            other => return other.map(|(u, d)| (u, d, attempt.horizon)),
        }
    }
    unreachable!()
}

/// Outcome of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub report: ReportFile,
}

/// Validates `cfg`, runs the configured solvers and writes all artifacts
/// into a fresh directory under `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let dir = fresh_dir(&cfg.output, &cfg.id)?;
    write_manifest(&dir, "experiment", cfg)?;
    let checkpoints = dir.join("checkpoints");
    fs::create_dir(&checkpoints)?;
    let params = cfg.alpha_param()?;
    let phi = cfg.initial_data()?;
    Checkpoint { time: 0.0, params, field: phi.clone() }.save(&checkpoints.join("initial.lans"))?;

    let mut reports = Vec::new();
    let mut timeseries: Option<Trajectory> = None;
    let mut stepped: Option<SpectralField> = None;
    if cfg.solver != "picard" {
        match run_timestepper(cfg, &phi, params) {
            Ok((rep, traj)) => {
                reports.push(rep);
                let last = traj.last().clone();
                Checkpoint { time: cfg.time.horizon, params, field: last.clone() }
                    .save(&checkpoints.join("timestep-final.lans"))?;
                stepped = Some(last);
                timeseries = Some(traj);
            }
            Err(e) => reports.push(failed("timestep", &e)),
        }
    }
    if cfg.solver != "timestep" {
        match picard_with_retry(&phi, &cfg.picard_config(), params) {
            Ok((traj, diag, horizon)) => {
                diag.write_csv(fs::File::create(dir.join("diagnostics.csv"))?)?;
                let mut rep = CaseReport::new("picard", Provenance::Derived)
                    .input("T", horizon)
                    .input("nodes", traj.len());
                rep.measure("iterations", diag.iterations() as f64);
                rep.measure("max_ratio", diag.max_ratio().unwrap_or(0.0));
                rep.measure("final_residual", diag.final_residual());
                if horizon < cfg.time.horizon {
                    rep.note(format!("horizon reduced from {} to {horizon} after non-contraction", cfg.time.horizon));
                }
                rep.verdict = Verdict::from_bool(diag.converged);
                Checkpoint { time: horizon, params, field: traj.last().clone() }
                    .save(&checkpoints.join("picard-final.lans"))?;
                if let Some(step_last) = stepped.as_ref().filter(|_| horizon == cfg.time.horizon) {
                    let mut oracle = CaseReport::new("oracle-agreement", Provenance::Derived).input("dt", cfg.time.dt);
                    let rel = (traj.last() - step_last).plancherel_norm(0.0) / step_last.plancherel_norm(0.0).max(f64::MIN_POSITIVE);
                    oracle.measure("relative_l2_difference", rel);
                    oracle.expect(0.0, 1e-4);
                    oracle.verdict = Verdict::from_bool(rel < 1e-4);
                    reports.push(rep);
                    reports.push(oracle);
                } else {
                    reports.push(rep);
                }
                if timeseries.is_none() {
                    timeseries = Some(traj);
                }
            }
            Err(e) => reports.push(failed("picard", &e)),
        }
    }
    if let Some(traj) = timeseries {
        write_timeseries(&traj, &cfg.extra_norms(), fs::File::create(dir.join("timeseries.csv"))?)?;
    }
    let report = ReportFile::new(cfg.id.clone(), reports);
    fs::write(dir.join("report.json"), report.to_json()?)?;
    Ok(RunOutcome { dir, report })
}

fn run_timestepper(cfg: &ExperimentConfig, phi: &SpectralField, params: AlphaParam) -> Result<(CaseReport, Trajectory)> {
    let step = StepConfig::new(cfg.time.dt)?;
    let ev = evolve(phi, cfg.time.horizon, &step, params, &cfg.sample_grid()?)?;
    let energies = ev.energies(params.alpha);
    let monotone = energies.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let mut rep = CaseReport::new("timestep", Provenance::Derived)
        .input("dt", cfg.time.dt)
        .input("T", cfg.time.horizon);
    rep.measure("steps", ev.steps as f64);
    rep.measure("max_step_divergence", ev.max_step_divergence);
    rep.measure("e_alpha_initial", energies[0]);
    rep.measure("e_alpha_final", *energies.last().unwrap());
    rep.measure("energy_non_increasing", if monotone { 1.0 } else { 0.0 });
    rep.verdict = Verdict::from_bool(monotone);
    Ok((rep, ev.trajectory()?))
}

/// Verification suites of the `verify` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Projectors,
    Smoothing,
    Bilinear,
    Lipschitz,
    Energy,
    H2,
    HigherReg,
    Conditions,
    AlphaLimit,
    All,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Projectors,
        Suite::Smoothing,
        Suite::Bilinear,
        Suite::Lipschitz,
        Suite::Energy,
        Suite::H2,
        Suite::HigherReg,
        Suite::Conditions,
        Suite::AlphaLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Projectors => "projectors",
            Suite::Smoothing => "smoothing",
            Suite::Bilinear => "bilinear",
            Suite::Lipschitz => "lipschitz",
            Suite::Energy => "energy",
            Suite::H2 => "h2",
            Suite::HigherReg => "higher-reg",
            Suite::Conditions => "conditions",
            Suite::AlphaLimit => "alpha-limit",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = LansError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| LansError::InvalidParameter(format!("unknown suite `{s}`")))
    }
}

/// Overrides for the suites; unset fields take the suite defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyOptions {
    /// Smaller grids and ensembles; checks the same properties.
    #[serde(default)]
    pub quick: bool,
    pub n: Option<usize>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub p: Option<f64>,
    pub r: Option<f64>,
    pub q: Option<f64>,
}

impl VerifyOptions {
    pub fn load(path: &Path) -> Result<Self> {
        toml::from_str(&fs::read_to_string(path)?).map_err(|e| LansError::Config {
            field: "<toml>".into(),
            message: e.to_string(),
        })
    }

    fn pick(&self, full: usize, quick: usize) -> usize {
        if self.quick {
            quick
        } else {
            full
        }
    }

    fn grid(&self, default_dim: usize, full: usize, quick: usize) -> Result<Grid> {
        Grid::new(self.n.unwrap_or(default_dim), self.points.unwrap_or(self.pick(full, quick)))
    }
}

/// Reports plus the condition scans, if any were run.
#[derive(Debug, Clone, Default)]
pub struct SuiteOutcome {
    pub reports: Vec<CaseReport>,
    pub scans: Vec<ScanResult>,
}

/// Runs one suite, or every suite for [`Suite::All`].
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::default();
    let seed = |default: u64| opts.seed.unwrap_or(default);
    let guard = |id: &str, r: Result<CaseReport>| r.unwrap_or_else(|e| failed(id, &e));
    match suite {
        Suite::All => {
            for s in Suite::EACH {
                let part = run_suite(s, opts)?;
                out.reports.extend(part.reports);
                out.scans.extend(part.scans);
            }
        }
        Suite::Projectors => {
            let grid = opts.grid(3, 32, 16)?;
            out.reports.push(projector_identity_experiment(grid, &[0.1, 0.5, 1.0], opts.pick(100, 10), seed(1)));
        }
        Suite::Smoothing => {
            let p = opts.p.unwrap_or(2.0);
            let pairs = match (opts.s1, opts.s2) {
                (Some(s1), Some(s2)) => vec![(s1, s2)],
                (None, None) => vec![(0.75, 1.0), (0.5, 1.0), (0.25, 0.75), (0.75, 1.25)],
                _ => return Err(LansError::InvalidParameter("give both --s1 and --s2 or neither".into())),
            };
            let dim = opts.n.unwrap_or(3);
            let grid = opts.grid(3, if dim == 2 { 1024 } else { 128 }, if dim == 2 { 256 } else { 64 })?;
            for (s1, s2) in pairs {
                let mut setup = SmoothingSetup::new(grid, s1, s2, p);
                setup.seed = seed(1);
                if opts.quick {
                    setup.t_min = 1e-3;
                    setup.samples = 9;
                }
                out.reports.push(guard("smoothing", smoothing_rate_experiment(&setup)));
            }
        }
        Suite::Bilinear | Suite::Lipschitz => {
            let dim = opts.n.unwrap_or(3);
            let base = opts.points.unwrap_or(opts.pick(32, 16));
            let grids = vec![Grid::new(dim, base)?, Grid::new(dim, 2 * base)?];
            let mut setup =
                EstimateSetup::new(opts.r.unwrap_or(2.0), opts.p.unwrap_or(2.0), opts.q.unwrap_or(4.0 / 3.0), grids);
            setup.ensemble = opts.pick(4, 2);
            setup.seed = seed(100);
            out.reports.push(if suite == Suite::Bilinear {
                guard("bilinear", bilinear_bound_experiment(&setup))
            } else {
                guard("lipschitz", lipschitz_experiment(&setup))
            });
        }
        Suite::Energy => out.reports.extend(energy_suite(opts, seed(4))),
        Suite::H2 => out.reports.push(guard("h2-bound", h2_suite(opts, seed(21)))),
        Suite::HigherReg => out.reports.extend(higher_reg_suite(opts, seed(9))),
        Suite::Conditions => {
            let (reports, scans) = conditions_suite();
            out.reports.extend(reports);
            out.scans.extend(scans);
        }
        Suite::AlphaLimit => {
            let grid = Grid::new(2, opts.points.unwrap_or(32))?;
            let phi = gen_random_sobolev(grid, 3.0, seed(5), 1.0);
            out.reports.push(guard("alpha-limit", alpha_limit_experiment(&[0.2, 0.1, 0.05, 0.025], &phi, 1.0, 0.05, 0.01)));
            out.reports.push(guard("taylor-green-decay", taylor_green_decay_check(grid, 0.1, 1.0, 0.01)));
        }
    }
    Ok(out)
}

/// Energy law on resolved runs, sampled at every step.
fn energy_suite(opts: &VerifyOptions, seed: u64) -> Vec<CaseReport> {
    let g2 = Grid::new(2, 32).expect("valid grid");
    let g3 = Grid::new(3, opts.pick(32, 16)).expect("valid grid");
    let mut cases = vec![
        ("taylor-green-2d", gen_taylor_green(g2, 1.0), 0.1, 0.01, 2.0),
        ("random-2d", gen_random_sobolev(g2, 2.0, seed, 1.0), 0.05, 0.005, 1.0),
    ];
    if !opts.quick {
        cases.push(("random-3d", gen_random_sobolev(g3, 2.0, seed, 0.05), 0.1, 0.005, 0.5));
        cases.push(("taylor-green-3d", gen_taylor_green(g3, 0.1), 0.1, 0.01, 1.0));
    }
    cases
        .into_iter()
        .map(|(name, phi, nu, dt, horizon)| {
            let id = format!("energy/{name}");
            let run = || -> Result<CaseReport> {
                let params = AlphaParam::new(0.5, nu)?;
                let samples = TimeGrid::uniform(horizon, (horizon / dt).round() as usize)?;
                let ev = evolve(&phi, horizon, &StepConfig::new(dt)?, params, &samples)?;
                let mut rep = energy_monotonicity_check(&ev.trajectory()?, params, dt, 0.05);
                rep.id = id.clone();
                Ok(rep.input("nu", nu).input("dt", dt).input("T", horizon))
            };
            run().unwrap_or_else(|e| failed(&id, &e))
        })
        .collect()
}

/// Amplitudes of the `H^{1,2}` data in the a priori bound runs.
pub const H2_AMPLITUDES: [f64; 5] = [0.05, 0.1, 0.2, 0.4, 0.8];

fn h2_suite(opts: &VerifyOptions, seed: u64) -> Result<CaseReport> {
    let grid = opts.grid(3, 48, 16)?;
    let horizon = if opts.quick { 0.5 } else { 2.0 };
    let params = AlphaParam::new(0.5, 0.1)?;
    let step = StepConfig::new(0.01)?;
    let samples = TimeGrid::uniform(horizon, 40)?;
    let base = gen_random_sobolev(grid, 1.0, seed, 1.0);
    let runs = H2_AMPLITUDES
        .iter()
        .map(|&a| evolve(&base.scale(a), horizon, &step, params, &samples)?.trajectory())
        .collect::<Result<Vec<_>>>()?;
    Ok(h2_bound_check(&runs)
        .input("grid", format!("n={} N={}", grid.dim(), grid.points()))
        .input("T", horizon)
        .input("amplitudes", format!("{H2_AMPLITUDES:?}"))
        .input("seed", seed))
}

fn higher_reg_suite(opts: &VerifyOptions, seed: u64) -> Vec<CaseReport> {
    let s1 = opts.s1.unwrap_or(0.75);
    let run = || -> Result<Vec<CaseReport>> {
        let grid = opts.grid(3, 32, 16)?;
        let phi = gen_random_sobolev(grid, s1, seed, 1.0);
        let params = AlphaParam::new(0.5, 1.0)?;
        let samples = TimeGrid::log_graded_from(0.1, 1e-5, 25)?;
        let traj = evolve(&phi, 0.1, &StepConfig::new(1e-3)?, params, &samples)?.trajectory()?;
        [2.0, 3.0]
            .into_iter()
            .map(|r| {
                higher_reg_weight_check(&traj, s1, r, 2.0, 1e-5, 1e-1)
                    .map(|rep| rep.input("grid", format!("n={} N={}", grid.dim(), grid.points())).input("seed", seed))
            })
            .collect()
    };
    run().unwrap_or_else(|e| vec![failed("higher-reg", &e)])
}

fn conditions_suite() -> (Vec<CaseReport>, Vec<ScanResult>) {
    let n = Rational64::from_integer(3);
    let axes = default_axes();
    let scans: Vec<ScanResult> = [ListFamily::Continuous, ListFamily::Integrable]
        .into_iter()
        .map(|f| scan(f, n, &axes))
        .collect();
    let mut reports = Vec::new();
    for s in &scans {
        let name = match s.family {
            ListFamily::Continuous => "continuous",
            ListFamily::Integrable => "integrable",
        };
        let disagreements: Vec<_> = s.disagreements().collect();
        let mut rep = CaseReport::new(format!("conditions/{name}-agreement"), Provenance::Analysis)
            .input("tuples", s.rows.len())
            .input("b_prime", 1);
        rep.measure("full_passing", s.passing(false) as f64);
        rep.measure("simplified_passing", s.passing(true) as f64);
        rep.measure("disagreements", disagreements.len() as f64);
        rep.expect(0.0, 0.0);
        if let Some(first) = disagreements.first() {
            rep.note(format!(
                "first disagreement {}: full violates [{}], simplified violates [{}]",
                first.params,
                first.full.violated.join("; "),
                first.simplified.violated.join("; ")
            ));
        }
        rep.verdict = Verdict::from_bool(disagreements.is_empty());
        reports.push(rep);

        let negative = s.negative_b_passes().count();
        let mut rep = CaseReport::new(format!("conditions/{name}-negative-b"), Provenance::Analysis);
        rep.measure("passing_with_negative_b", negative as f64);
        rep.expect(0.0, 0.0);
        rep.verdict = Verdict::from_bool(negative == 0);
        reports.push(rep);
    }
    let q = |a, b| Rational64::new(a, b);
    let ps = LocalParamSet::continuous(n, q(2, 1), q(3, 1), q(3, 2), q(0, 1), q(1, 1));
    let check = check_conditions_ct(&ps, true);
    let mut rep = CaseReport::new("conditions/h32-tuple", Provenance::Analysis).input("params", &ps);
    rep.measure("passes_simplified", if check.passed { 1.0 } else { 0.0 });
    for v in &check.violated {
        rep.note(format!("violated: {v}"));
    }
    rep.verdict = Verdict::from_bool(check.passed);
    reports.push(rep);
    (reports, scans)
}

/// Runs `suite` and writes `report.json`, `scan.csv` and a manifest into a fresh directory.
pub fn run_verify(suite: Suite, opts: &VerifyOptions, output: &Path) -> Result<(PathBuf, ReportFile)> {
    let dir = fresh_dir(output, &format!("verify-{}", suite.name()))?;
    write_manifest(&dir, suite.name(), opts)?;
    let outcome = run_suite(suite, opts)?;
    if !outcome.scans.is_empty() {
        let mut file = fs::File::create(dir.join("scan.csv"))?;
        for (i, s) in outcome.scans.iter().enumerate() {
            let mut buf = Vec::new();
            s.write_csv(&mut buf)?;
            // one header for the concatenated families
            let text = String::from_utf8(buf).expect("csv is utf-8");
            let body = if i == 0 { text.as_str() } else { text.split_once('\n').map_or("", |x| x.1) };
            std::io::Write::write_all(&mut file, body.as_bytes())?;
        }
    }
    let report = ReportFile::new(suite.name(), outcome.reports);
    fs::write(dir.join("report.json"), report.to_json()?)?;
    Ok((dir, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    fn small_config(root: &Path) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.id = "small".into();
        cfg.grid.n = 2;
        cfg.grid.points = 16;
        cfg.params.nu = 0.5;
        cfg.time.horizon = 0.05;
        cfg.time.dt = 5e-4;
        cfg.solver = "both".into();
        cfg.norms = vec![[0.75, 2.0]];
        cfg.output = root.to_path_buf();
        cfg.picard.log_nodes = Some(20);
        cfg.picard.uniform_intervals = Some(20);
        cfg
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn fresh_dirs_never_collide() {
        let tmp = tempfile::tempdir().unwrap();
        let a = fresh_dir(tmp.path(), "x").unwrap();
        let b = fresh_dir(tmp.path(), "x").unwrap();
        assert_ne!(a, b);
        assert!(b.ends_with("x-2"));
    }

    #[test]
    fn experiment_writes_artifacts_and_reproduces_report() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = small_config(tmp.path());
        let first = run_experiment(&cfg).unwrap();
        assert!(first.report.passed, "{:?}", first.report);
        for name in ["manifest.toml", "report.json", "timeseries.csv", "diagnostics.csv", "checkpoints/initial.lans"] {
            assert!(first.dir.join(name).exists(), "missing {name}");
        }
        let ids: Vec<_> = first.report.reports.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["timestep", "picard", "oracle-agreement"]);
        let second = run_experiment(&cfg).unwrap();
        assert_ne!(first.dir, second.dir);
        assert_eq!(fs::read(first.dir.join("report.json")).unwrap(), fs::read(second.dir.join("report.json")).unwrap());
        let cp = Checkpoint::load(&first.dir.join("checkpoints/initial.lans")).unwrap();
        assert_eq!(cp.field, cfg.initial_data().unwrap());
    }

    #[test]
    fn invalid_config_is_rejected_before_writing() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = small_config(tmp.path());
        cfg.time.horizon = 0.0;
        assert!(matches!(run_experiment(&cfg), Err(LansError::Config { .. })));
        assert!(fs::read_dir(tmp.path()).unwrap().next().is_none());
    }

    #[test]
    fn solver_failures_become_failed_reports() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = small_config(tmp.path());
        cfg.solver = "timestep".into();
        cfg.data.amplitude = 1e6;
        cfg.time.dt = 0.01;
        cfg.time.horizon = 0.05;
        let out = run_experiment(&cfg).unwrap();
        assert!(!out.report.passed);
        assert_eq!(out.report.reports[0].verdict, Verdict::Fail);
        assert!(!out.report.reports[0].notes.is_empty());
    }
}
