//! Heat semigroup, Duhamel integral and the two time-norm families.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LansError, Result};
use crate::field::SpectralField;
use crate::grid::k_squared;
use crate::spectral::{sobolev_norm, SobolevIndex};

/// How the nodes of a [`TimeGrid`] were laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Uniform,
    LogGraded,
    Custom,
}

/// Sample times `0 = t_0 < t_1 < … < t_M = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    spacing: Spacing,
}

impl TimeGrid {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        Self::with_spacing(nodes, Spacing::Custom)
    }

    fn with_spacing(nodes: Vec<f64>, spacing: Spacing) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(LansError::InvalidParameter(format!(
                "time grid needs at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        if nodes[0] != 0.0 {
            return Err(LansError::InvalidParameter("time grid must start at t = 0".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || !nodes.iter().all(|t| t.is_finite()) {
            return Err(LansError::InvalidParameter("time nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes, spacing })
    }

    /// `intervals` equal steps on `[0, horizon]`.
    pub fn uniform(horizon: f64, intervals: usize) -> Result<Self> {
        check_horizon(horizon)?;
        let h = horizon / intervals as f64;
        let mut nodes: Vec<f64> = (0..=intervals).map(|i| i as f64 * h).collect();
        *nodes.last_mut().unwrap() = horizon;
        Self::with_spacing(nodes, Spacing::Uniform)
    }

    /// `t_0 = 0` followed by `count` geometric nodes from `horizon · 10⁻⁶` to `horizon`.
    pub fn log_graded(horizon: f64, count: usize) -> Result<Self> {
        Self::log_graded_from(horizon, horizon * 1e-6, count)
    }

    /// `t_0 = 0` followed by `count` geometric nodes from `first` to `horizon`.
    pub fn log_graded_from(horizon: f64, first: f64, count: usize) -> Result<Self> {
        check_horizon(horizon)?;
        if !(first > 0.0 && first < horizon) || count < 2 {
            return Err(LansError::InvalidParameter(format!(
                "log-graded grid needs 0 < first < horizon and count >= 2 (first {first}, count {count})"
            )));
        }
        let ratio = (horizon / first).ln() / (count - 1) as f64;
        let mut nodes = Vec::with_capacity(count + 1);
        nodes.push(0.0);
        for i in 0..count {
            nodes.push(first * (ratio * i as f64).exp());
        }
        *nodes.last_mut().unwrap() = horizon;
        Self::with_spacing(nodes, Spacing::LogGraded)
    }

    /// Union of the nodes of two grids sharing a horizon.
    pub fn merged(&self, other: &TimeGrid) -> Result<Self> {
        if (self.horizon() - other.horizon()).abs() > 1e-14 * self.horizon() {
            return Err(LansError::TimeGridMismatch);
        }
        let mut nodes: Vec<f64> = self.nodes.iter().chain(other.nodes.iter()).copied().collect();
        nodes.sort_by(f64::total_cmp);
        let h = self.horizon();
        nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * h);
        *nodes.last_mut().unwrap() = h;
        Self::with_spacing(nodes, Spacing::Custom)
    }

    /// Same spacing policy with every interval split into `factor` pieces.
    pub fn refined(&self, factor: usize) -> Self {
        let mut nodes = Vec::with_capacity((self.nodes.len() - 1) * factor + 1);
        nodes.push(0.0);
        for w in self.nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let geometric = self.spacing == Spacing::LogGraded && a > 0.0;
            for j in 1..=factor {
                let f = j as f64 / factor as f64;
                let t = if j == factor {
                    b
                } else if geometric {
                    a * (b / a).powf(f)
                } else {
                    a + (b - a) * f
                };
                nodes.push(t);
            }
        }
        Self { nodes, spacing: self.spacing }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn horizon(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(LansError::InvalidParameter(format!("horizon must be > 0, got {horizon}")));
    }
    Ok(())
}

/// One field per time node.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    time_grid: TimeGrid,
    states: Vec<SpectralField>,
}

impl Trajectory {
    pub fn new(time_grid: TimeGrid, states: Vec<SpectralField>) -> Result<Self> {
        if states.is_empty() {
            return Err(LansError::EmptyTrajectory);
        }
        if states.len() != time_grid.len() {
            return Err(LansError::SizeMismatch { expected: time_grid.len(), got: states.len() });
        }
        let grid = states[0].grid();
        if states.iter().any(|s| s.grid() != grid) {
            return Err(LansError::GridMismatch);
        }
        Ok(Self { time_grid, states })
    }

    /// Every node holds the same field.
    pub fn constant(time_grid: TimeGrid, state: &SpectralField) -> Self {
        let states = vec![state.clone(); time_grid.len()];
        Self { time_grid, states }
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time_grid
    }

    pub fn times(&self) -> &[f64] {
        self.time_grid.nodes()
    }

    pub fn states(&self) -> &[SpectralField] {
        &self.states
    }

    pub fn state(&self, j: usize) -> &SpectralField {
        &self.states[j]
    }

    pub fn last(&self) -> &SpectralField {
        self.states.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn map(&self, f: impl FnMut(&SpectralField) -> SpectralField) -> Self {
        Self { time_grid: self.time_grid.clone(), states: self.states.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl FnMut(&SpectralField) -> Result<SpectralField>) -> Result<Self> {
        let states = self.states.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self { time_grid: self.time_grid.clone(), states })
    }

    fn check_compatible(&self, other: &Trajectory) -> Result<()> {
        if self.time_grid != other.time_grid {
            return Err(LansError::TimeGridMismatch);
        }
        self.states[0].check_same_grid(&other.states[0])
    }

    /// `self + s · other`, node by node.
    pub fn combine(&self, s: f64, other: &Trajectory) -> Result<Self> {
        self.check_compatible(other)?;
        let states = self
            .states
            .iter()
            .zip(other.states.iter())
            .map(|(a, b)| {
                let mut out = a.clone();
                out.axpy(s, b);
                out
            })
            .collect();
        Ok(Self { time_grid: self.time_grid.clone(), states })
    }

    pub fn sub(&self, other: &Trajectory) -> Result<Self> {
        self.combine(-1.0, other)
    }

    pub fn add(&self, other: &Trajectory) -> Result<Self> {
        self.combine(1.0, other)
    }
}

/// `e^{νtΔ}`: multiplies `û(k)` by `e^{-ν|k|²t}`.
pub fn heat_propagate(f: &SpectralField, t: f64, nu: f64) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(LansError::InvalidParameter(format!("propagation time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.map_symbol(|k| (-nu * k_squared(k) * t).exp()))
}

/// `(Γφ)(t_j) = e^{νt_jΔ}φ` on every node.
pub fn gamma(phi: &SpectralField, tg: &TimeGrid, nu: f64) -> Trajectory {
    let states = tg
        .nodes()
        .iter()
        .map(|&t| heat_propagate(phi, t, nu).expect("time nodes are non-negative"))
        .collect();
    Trajectory { time_grid: tg.clone(), states }
}

/// `φ₁(z) = (1 − e^{−z})/z`.
fn phi1(z: f64) -> f64 {
    if z < 1e-8 {
        1.0 - 0.5 * z
    } else {
        -(-z).exp_m1() / z
    }
}

/// `ψ(z) = (1 − e^{−z}(1+z))/z² = Σ_m (−1)^m (m+1) z^m/(m+2)!`.
fn psi(z: f64) -> f64 {
    if z < 0.5 {
        let mut term = 0.5; // m = 0: 1/2!
        let mut sum = term;
        for m in 1..24 {
            // ratio of successive terms: -(m+1)/m * z/(m+2)
            term *= -z * (m as f64 + 1.0) / (m as f64 * (m as f64 + 2.0));
            sum += term;
        }
        sum
    } else {
        (1.0 - (-z).exp() * (1.0 + z)) / (z * z)
    }
}

/// Duhamel integral `(G·g)(t) = ∫₀ᵗ e^{ν(t−s)Δ} g(s) ds`.
///
/// Between consecutive nodes `g` is interpolated linearly in time and the
/// resulting integral against the heat kernel is evaluated in closed form,
/// mode by mode.
pub fn duhamel(g: &Trajectory, nu: f64) -> Result<Trajectory> {
    if g.is_empty() {
        return Err(LansError::EmptyTrajectory);
    }
    let grid = g.states[0].grid();
    let times = g.times();
    let dim = grid.dim();
    let mut states = Vec::with_capacity(times.len());
    let mut current = SpectralField::zeros(grid);
    states.push(current.clone());
    let lambdas: Vec<f64> = grid.modes().map(|(_, k)| nu * k_squared(k)).collect();
    for j in 0..times.len() - 1 {
        let h = times[j + 1] - times[j];
        let left = &g.states[j];
        let right = &g.states[j + 1];
        let mut next = SpectralField::zeros(grid);
        for (flat, &lam) in lambdas.iter().enumerate() {
            let z = lam * h;
            let decay = (-z).exp();
            let p = psi(z);
            let w_left = h * p;
            let w_right = h * (phi1(z) - p);
            for c in 0..dim {
                let v: Complex64 = current.component(c)[flat] * decay
                    + left.component(c)[flat] * w_left
                    + right.component(c)[flat] * w_right;
                next.component_mut(c)[flat] = v;
            }
        }
        current = next;
        states.push(current.clone());
    }
    Ok(Trajectory { time_grid: g.time_grid.clone(), states })
}

/// Spatial norm specification for the weighted sup norm `sup_t t^a ‖u(t)‖_{k,q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormSpec {
    pub a: f64,
    pub k: f64,
    pub q: f64,
}

impl WeightedNormSpec {
    pub fn new(a: f64, k: f64, q: f64) -> Result<Self> {
        if !(a >= 0.0) {
            return Err(LansError::InvalidParameter(format!("time weight must be >= 0, got {a}")));
        }
        SobolevIndex::new(k, q)?;
        Ok(Self { a, k, q })
    }

    pub fn index(&self) -> SobolevIndex {
        SobolevIndex { s: self.k, p: self.q }
    }
}

/// `L^a((0,T); H^{k,q})` exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaNormSpec {
    pub a: f64,
    pub k: f64,
    pub q: f64,
}

impl LaNormSpec {
    pub fn new(a: f64, k: f64, q: f64) -> Result<Self> {
        if !(a >= 1.0) {
            return Err(LansError::InvalidParameter(format!("time exponent must be >= 1, got {a}")));
        }
        SobolevIndex::new(k, q)?;
        Ok(Self { a, k, q })
    }

    pub fn index(&self) -> SobolevIndex {
        SobolevIndex { s: self.k, p: self.q }
    }
}

/// Spatial norm at every node.
pub fn norm_series(u: &Trajectory, idx: SobolevIndex) -> Vec<f64> {
    u.states.iter().map(|s| sobolev_norm(s, idx)).collect()
}

/// `max_{t_j > 0} t_j^a ‖u(t_j)‖_{k,q}`.
pub fn weighted_time_norm(u: &Trajectory, spec: WeightedNormSpec) -> f64 {
    weighted_sup(u.times(), &norm_series(u, spec.index()), spec.a)
}

/// Weighted sup of a precomputed norm series; `t_0 = 0` is skipped.
pub fn weighted_sup(times: &[f64], norms: &[f64], a: f64) -> f64 {
    times
        .iter()
        .zip(norms.iter())
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, n)| if a == 0.0 { *n } else { t.powf(a) * n })
        .fold(0.0, f64::max)
}

/// `(∫₀ᵀ ‖u(t)‖^a_{k,q} dt)^{1/a}` by the trapezoid rule over the nodes.
pub fn la_time_norm(u: &Trajectory, spec: LaNormSpec) -> f64 {
    la_integral(u.times(), &norm_series(u, spec.index()), spec.a)
}

pub fn la_integral(times: &[f64], norms: &[f64], a: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..times.len() - 1 {
        let h = times[j + 1] - times[j];
        acc += 0.5 * h * (norms[j].powf(a) + norms[j + 1].powf(a));
    }
    acc.powf(1.0 / a)
}
