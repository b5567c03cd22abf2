//! Experiment configuration in TOML.
//!
//! ```toml
//! id = "tg-small"
//! solver = "both"
//! norms = [[0.75, 2.0], [1.0, 2.0]]
//! output = "runs"
//!
//! [grid]
//! n = 3
//! points = 32
//!
//! [params]
//! alpha = 0.5
//! nu = 1.0
//!
//! [data]
//! generator = "taylor-green"
//! amplitude = 0.5
//! seed = 1
//!
//! [time]
//! horizon = 0.1
//! dt = 0.002
//! samples = 10
//! sampling = "uniform"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LansError, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::init::{gen_random_sobolev, gen_taylor_green};
use crate::mild::PicardConfig;
use crate::semigroup::TimeGrid;
use crate::spectral::{AlphaParam, SobolevIndex};

pub const GENERATORS: [&str; 2] = ["taylor-green", "random-sobolev"];
pub const SOLVERS: [&str; 3] = ["picard", "timestep", "both"];
pub const SAMPLINGS: [&str; 2] = ["uniform", "log"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub alpha: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub generator: String,
    /// Regularity of `random-sobolev` data; ignored by `taylor-green`.
    #[serde(default)]
    pub s: f64,
    pub amplitude: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub horizon: f64,
    pub dt: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_sampling")]
    pub sampling: String,
}

/// Optional overrides of the Picard defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardSpec {
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub a: Option<f64>,
    pub log_nodes: Option<usize>,
    pub uniform_intervals: Option<usize>,
    pub max_iterations: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    pub grid: GridSpec,
    pub params: ParamSpec,
    pub data: DataSpec,
    pub time: TimeSpec,
    #[serde(default = "default_solver")]
    pub solver: String,
    /// Extra `(s, p)` norms written to the timeseries.
    #[serde(default)]
    pub norms: Vec<[f64; 2]>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub picard: PicardSpec,
}

fn default_samples() -> usize {
    10
}

fn default_sampling() -> String {
    "uniform".into()
}

fn default_solver() -> String {
    "timestep".into()
}

fn default_output() -> PathBuf {
    PathBuf::from("runs")
}

fn field_err(field: &str, message: impl Into<String>) -> LansError {
    LansError::Config { field: field.into(), message: message.into() }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(field_err(field, format!("must be a positive finite number, got {v}")))
    }
}

fn one_of(field: &str, value: &str, allowed: &[&str]) -> Result<()> {
    if allowed.contains(&value) {
        Ok(())
    } else {
        Err(field_err(field, format!("unknown value `{value}`, expected one of {}", allowed.join(", "))))
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            id: "run".into(),
            grid: GridSpec { n: 3, points: 32 },
            params: ParamSpec { alpha: 0.5, nu: 1.0 },
            data: DataSpec { generator: "taylor-green".into(), s: 0.75, amplitude: 0.5, seed: 1 },
            time: TimeSpec { horizon: 0.1, dt: 2e-3, samples: default_samples(), sampling: default_sampling() },
            solver: default_solver(),
            norms: Vec::new(),
            output: default_output(),
            picard: PicardSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| field_err("<toml>", e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every field; the error names the first offending one.
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() || self.id.contains(['/', '\\']) || self.id.starts_with('.') {
            return Err(field_err("id", "must be a non-empty file name"));
        }
        Grid::new(self.grid.n, self.grid.points).map_err(|e| field_err("grid", e.to_string()))?;
        positive("params.alpha", self.params.alpha)?;
        positive("params.nu", self.params.nu)?;
        one_of("data.generator", &self.data.generator, &GENERATORS)?;
        if !self.data.s.is_finite() {
            return Err(field_err("data.s", "must be finite"));
        }
        if !(self.data.amplitude.is_finite() && self.data.amplitude >= 0.0) {
            return Err(field_err("data.amplitude", "must be a non-negative finite number"));
        }
        positive("time.horizon", self.time.horizon)?;
        positive("time.dt", self.time.dt)?;
        if self.time.dt > self.time.horizon {
            return Err(field_err("time.dt", "must not exceed time.horizon"));
        }
        if self.time.samples < 2 {
            return Err(field_err("time.samples", "must be at least 2"));
        }
        one_of("time.sampling", &self.time.sampling, &SAMPLINGS)?;
        one_of("solver", &self.solver, &SOLVERS)?;
        for (i, [s, p]) in self.norms.iter().enumerate() {
            SobolevIndex::new(*s, *p).map_err(|e| field_err(&format!("norms[{i}]"), e.to_string()))?;
        }
        self.picard_config().validate().map_err(|e| field_err("picard", e.to_string()))?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n, self.grid.points)
    }

    pub fn alpha_param(&self) -> Result<AlphaParam> {
        AlphaParam::new(self.params.alpha, self.params.nu)
    }

    pub fn initial_data(&self) -> Result<SpectralField> {
        let grid = self.grid()?;
        let d = &self.data;
        match d.generator.as_str() {
            "taylor-green" => Ok(gen_taylor_green(grid, d.amplitude)),
            "random-sobolev" => Ok(gen_random_sobolev(grid, d.s, d.seed, d.amplitude)),
            other => Err(field_err("data.generator", format!("unknown value `{other}`"))),
        }
    }

    /// Output sample times on `[0, T]`.
    pub fn sample_grid(&self) -> Result<TimeGrid> {
        let t = &self.time;
        match t.sampling.as_str() {
            "log" => TimeGrid::log_graded_from(t.horizon, t.horizon * 1e-4, t.samples),
            _ => TimeGrid::uniform(t.horizon, t.samples),
        }
    }

    pub fn extra_norms(&self) -> Vec<SobolevIndex> {
        self.norms.iter().map(|[s, p]| SobolevIndex::of(*s, *p)).collect()
    }

    pub fn picard_config(&self) -> PicardConfig {
        let base = PicardConfig { horizon: self.time.horizon, ..PicardConfig::default() };
        let o = &self.picard;
        PicardConfig {
            s1: o.s1.unwrap_or(base.s1),
            s2: o.s2.unwrap_or(base.s2),
            a: o.a.unwrap_or(base.a),
            log_nodes: o.log_nodes.unwrap_or(base.log_nodes),
            uniform_intervals: o.uniform_intervals.unwrap_or(base.uniform_intervals),
            max_iterations: o.max_iterations.unwrap_or(base.max_iterations),
            tolerance: o.tolerance.unwrap_or(base.tolerance),
            ..base
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
id = "demo"
solver = "both"
norms = [[0.75, 2.0]]

[grid]
n = 2
points = 16

[params]
alpha = 0.5
nu = 0.1

[data]
generator = "random-sobolev"
s = 1.0
amplitude = 0.2
seed = 9

[time]
horizon = 0.5
dt = 0.01
"#;

    fn field_of(err: LansError) -> String {
        match err {
            LansError::Config { field, .. } => field,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.time.samples, 10);
        assert_eq!(cfg.output, PathBuf::from("runs"));
        assert_eq!(ExperimentConfig::from_toml_str(&cfg.to_toml()).unwrap(), cfg);
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn zero_horizon_is_rejected_by_field() {
        let mut cfg = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        cfg.time.horizon = 0.0;
        assert_eq!(field_of(cfg.validate().unwrap_err()), "time.horizon");
    }

    #[test]
    fn bad_fields_are_named() {
        let base = ExperimentConfig::from_toml_str(SAMPLE).unwrap();
        let mut c = base.clone();
        c.data.generator = "vortex-sheet".into();
        assert_eq!(field_of(c.validate().unwrap_err()), "data.generator");
        let mut c = base.clone();
        c.grid.points = 15;
        assert_eq!(field_of(c.validate().unwrap_err()), "grid");
        let mut c = base.clone();
        c.norms.push([1.0, 0.5]);
        assert_eq!(field_of(c.validate().unwrap_err()), "norms[1]");
        let mut c = base;
        c.solver = "rk4".into();
        assert_eq!(field_of(c.validate().unwrap_err()), "solver");
        assert!(ExperimentConfig::from_toml_str("id = 3").is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("{SAMPLE}\nbogus = 1")).is_err());
    }
}
