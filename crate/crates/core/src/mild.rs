//! Picard iteration of the Duhamel map on the contraction space.
//!
//! The iterates live on a fixed [`TimeGrid`]. The distance used for the
//! stopping rule and the contraction ratios is
//! `sup_t ‖w‖_{s₁,p} + sup_{t>0} t^a ‖w‖_{s₂,c}`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{LansError, Result};
use crate::field::SpectralField;
use crate::semigroup::{duhamel, gamma, norm_series, weighted_sup, TimeGrid, Trajectory};
use crate::spectral::{
    divergence_residual, quadratic_term, stokes_project, AlphaParam, Nonlinearity, SobolevIndex,
    DIVERGENCE_TOLERANCE,
};

/// Consecutive ratios `≥ 1` that abort the iteration.
pub const NON_CONTRACTION_RUN: usize = 3;
/// E-norm beyond which the iteration is declared divergent.
pub const DIVERGENCE_BOUND: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    /// Data regularity `s₁`.
    pub s1: f64,
    pub p: f64,
    /// Auxiliary regularity `s₂`.
    pub s2: f64,
    /// Auxiliary integrability `c`.
    pub c: f64,
    /// Time weight of the auxiliary norm.
    pub a: f64,
    pub horizon: f64,
    /// Geometric nodes from `T·10⁻⁶` to `T`.
    pub log_nodes: usize,
    /// Uniform intervals merged into the geometric nodes (0 for none).
    pub uniform_intervals: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub nonlinearity: Nonlinearity,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            s1: 0.75,
            p: 2.0,
            s2: 1.0,
            c: 2.0,
            a: 0.125,
            horizon: 0.1,
            log_nodes: 40,
            uniform_intervals: 40,
            max_iterations: 60,
            tolerance: 1e-10,
            nonlinearity: Nonlinearity::Lans,
        }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(LansError::InvalidParameter("tolerance must be > 0".into()));
        }
        if self.max_iterations < 1 {
            return Err(LansError::InvalidParameter("max_iterations must be >= 1".into()));
        }
        if !(self.a >= 0.0) {
            return Err(LansError::InvalidParameter("weight a must be >= 0".into()));
        }
        SobolevIndex::new(self.s1, self.p)?;
        SobolevIndex::new(self.s2, self.c)?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(LansError::InvalidParameter("horizon must be > 0".into()));
        }
        Ok(())
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        let log = TimeGrid::log_graded(self.horizon, self.log_nodes)?;
        if self.uniform_intervals == 0 {
            return Ok(log);
        }
        log.merged(&TimeGrid::uniform(self.horizon, self.uniform_intervals)?)
    }

    fn primary(&self) -> SobolevIndex {
        SobolevIndex { s: self.s1, p: self.p }
    }

    fn auxiliary(&self) -> SobolevIndex {
        SobolevIndex { s: self.s2, p: self.c }
    }

    /// `sup_t ‖w‖_{s₁,p} + sup_{t>0} t^a ‖w‖_{s₂,c}`.
    pub fn distance(&self, w: &Trajectory) -> f64 {
        let sup = norm_series(w, self.primary()).into_iter().fold(0.0, f64::max);
        sup + weighted_sup(w.times(), &norm_series(w, self.auxiliary()), self.a)
    }

    /// `sup_t ‖v − Γφ‖_{s₁,p} + sup_{t>0} t^a ‖v‖_{s₂,c}`.
    pub fn e_norm(&self, v: &Trajectory, gamma_phi: &Trajectory) -> Result<f64> {
        let shifted = v.sub(gamma_phi)?;
        let sup = norm_series(&shifted, self.primary()).into_iter().fold(0.0, f64::max);
        Ok(sup + weighted_sup(v.times(), &norm_series(v, self.auxiliary()), self.a))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub e_norm: f64,
    pub diff_norm: f64,
    pub ratio: Option<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PicardDiagnostics {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
}

impl PicardDiagnostics {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.ratio).collect()
    }

    pub fn max_ratio(&self) -> Option<f64> {
        self.ratios().into_iter().reduce(f64::max)
    }

    pub fn final_residual(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.residual)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "e_norm", "diff_norm", "ratio", "residual"])
            .map_err(csv_err)?;
        for r in &self.records {
            let ratio = r.ratio.map_or(String::new(), |x| x.to_string());
            w.write_record([
                r.iteration.to_string(),
                r.e_norm.to_string(),
                r.diff_norm.to_string(),
                ratio,
                r.residual.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> LansError {
    LansError::Format(e.to_string())
}

/// `Φu = Γφ − G·P^α V^α(u, u)`.
pub fn phi_map(u: &Trajectory, phi: &SpectralField, params: AlphaParam) -> Result<Trajectory> {
    phi_map_with(u, phi, params, Nonlinearity::Lans)
}

pub fn phi_map_with(
    u: &Trajectory,
    phi: &SpectralField,
    params: AlphaParam,
    mode: Nonlinearity,
) -> Result<Trajectory> {
    u.state(0).check_same_grid(phi)?;
    let base = gamma(phi, u.time_grid(), params.nu);
    if mode == Nonlinearity::Off {
        return Ok(base);
    }
    let forcing = u.try_map(|s| Ok(stokes_project(&quadratic_term(s, s, params.alpha, mode)?, params.alpha)))?;
    base.sub(&duhamel(&forcing, params.nu)?)
}

/// Distance between `u` and `Φu`.
pub fn residual(u: &Trajectory, phi: &SpectralField, params: AlphaParam, cfg: &PicardConfig) -> Result<f64> {
    let image = phi_map_with(u, phi, params, cfg.nonlinearity)?;
    Ok(cfg.distance(&u.sub(&image)?))
}

fn check_data(phi: &SpectralField) -> Result<()> {
    let res = divergence_residual(phi);
    if res > DIVERGENCE_TOLERANCE {
        return Err(LansError::NotDivergenceFree(res));
    }
    Ok(())
}

/// Iterates from `u⁰ = Γφ`.
pub fn picard_solve(
    phi: &SpectralField,
    cfg: &PicardConfig,
    params: AlphaParam,
) -> Result<(Trajectory, PicardDiagnostics)> {
    cfg.validate()?;
    let start = gamma(phi, &cfg.time_grid()?, params.nu);
    picard_solve_from(start, phi, cfg, params)
}

/// Iterates from an arbitrary initial trajectory.
pub fn picard_solve_from(
    initial: Trajectory,
    phi: &SpectralField,
    cfg: &PicardConfig,
    params: AlphaParam,
) -> Result<(Trajectory, PicardDiagnostics)> {
    cfg.validate()?;
    check_data(phi)?;
    let gamma_phi = gamma(phi, initial.time_grid(), params.nu);
    let mut current = initial;
    let mut diag = PicardDiagnostics::default();
    let mut previous_diff: Option<f64> = None;
    let mut streak = 0;
    for m in 0..cfg.max_iterations {
        let next = phi_map_with(&current, phi, params, cfg.nonlinearity)?;
        let diff = cfg.distance(&next.sub(&current)?);
        let e_norm = cfg.e_norm(&next, &gamma_phi)?;
        if !e_norm.is_finite() || e_norm > DIVERGENCE_BOUND || !diff.is_finite() {
            return Err(LansError::Divergence(m));
        }
        let ratio = previous_diff.filter(|d| *d > 0.0).map(|d| diff / d);
        if let Some(last) = diag.records.last_mut() {
            last.residual = diff;
        }
        diag.records.push(IterationRecord { iteration: m, e_norm, diff_norm: diff, ratio, residual: f64::NAN });
        current = next;
        if diff < cfg.tolerance {
            diag.converged = true;
            break;
        }
        streak = if ratio.is_some_and(|r| r >= 1.0) { streak + 1 } else { 0 };
        if streak >= NON_CONTRACTION_RUN {
            return Err(LansError::NonContraction { iteration: m, ratios: diag.ratios() });
        }
        previous_diff = Some(diff);
    }
    let final_residual = residual(&current, phi, params, cfg)?;
    if let Some(last) = diag.records.last_mut() {
        last.residual = final_residual;
    }
    Ok((current, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{k_squared, Grid};
    use crate::spectral::{leray_project, v_alpha};
    use num_complex::Complex64;

    fn small_flow(grid: Grid, amp: f64) -> SpectralField {
        let mut f = SpectralField::from_fn(grid, |k| {
            let d = (-0.5 * k_squared(k)).exp() * amp;
            let ph = (k[0] * 5 - k[1] * 3 + k[2]) as f64;
            [Complex64::from_polar(d, ph), Complex64::from_polar(d, 2.0 * ph + 1.0), Complex64::from_polar(d, -ph)]
        });
        for c in 0..grid.dim() {
            f.set_coefficient(c, [0, 0, 0], Complex64::default());
        }
        for (flat, k) in grid.modes() {
            if grid.has_nyquist(k) {
                for c in 0..grid.dim() {
                    f.component_mut(c)[flat] = Complex64::default();
                }
            }
        }
        f.symmetrize();
        leray_project(&f)
    }

    fn config() -> PicardConfig {
        PicardConfig { horizon: 0.2, log_nodes: 12, uniform_intervals: 10, ..PicardConfig::default() }
    }

    #[test]
    fn zero_data_is_a_fixed_point_after_one_iteration() {
        let g = Grid::new(2, 8).unwrap();
        let cfg = config();
        let (traj, diag) = picard_solve(&SpectralField::zeros(g), &cfg, AlphaParam::new(0.5, 1.0).unwrap()).unwrap();
        assert_eq!(diag.iterations(), 1);
        assert!(diag.converged);
        assert!(traj.states().iter().all(|s| s.max_abs() == 0.0));
    }

    #[test]
    fn phi_map_with_nonlinearity_off_is_gamma() {
        let g = Grid::new(2, 16).unwrap();
        let phi = small_flow(g, 0.3);
        let tg = config().time_grid().unwrap();
        let params = AlphaParam::new(0.5, 0.7).unwrap();
        let u = Trajectory::constant(tg.clone(), &small_flow(g, 2.0));
        let out = phi_map_with(&u, &phi, params, Nonlinearity::Off).unwrap();
        assert_eq!(out, gamma(&phi, &tg, params.nu));
    }

    #[test]
    fn phi_map_matches_term_by_term_assembly() {
        let g = Grid::new(2, 16).unwrap();
        let phi = small_flow(g, 0.3);
        let tg = config().time_grid().unwrap();
        let params = AlphaParam::new(0.5, 0.7).unwrap();
        let u0 = gamma(&phi, &tg, params.nu);
        let image = phi_map(&u0, &phi, params).unwrap();
        let forcing = u0.map(|s| {
            let nl = v_alpha(&s.clone(), s, params.alpha).unwrap();
            leray_project(&nl)
        });
        let expect = gamma(&phi, &tg, params.nu).sub(&duhamel(&forcing, params.nu).unwrap()).unwrap();
        for (a, b) in image.states().iter().zip(expect.states()) {
            assert!((a - b).max_abs() <= 1e-13 * phi.max_abs());
        }
        assert_eq!(image.state(0), &phi);
        assert!(image.states().iter().all(|s| divergence_residual(s) < 1e-12));
    }

    #[test]
    fn small_data_contracts_and_reaches_a_fixed_point() {
        let g = Grid::new(2, 16).unwrap();
        let phi = small_flow(g, 0.2);
        let cfg = config();
        let params = AlphaParam::new(0.5, 1.0).unwrap();
        let (u, diag) = picard_solve(&phi, &cfg, params).unwrap();
        assert!(diag.converged, "{diag:?}");
        assert!(diag.max_ratio().unwrap() < 0.8);
        assert!(residual(&u, &phi, params, &cfg).unwrap() < 1e-9);
        // a second start converges to the same trajectory
        let zero_start = Trajectory::new(
            u.time_grid().clone(),
            (0..u.len()).map(|j| if j == 0 { phi.clone() } else { SpectralField::zeros(g) }).collect(),
        )
        .unwrap();
        let (w, _) = picard_solve_from(zero_start, &phi, &cfg, params).unwrap();
        assert!(cfg.distance(&u.sub(&w).unwrap()) < 10.0 * cfg.tolerance);
    }

    #[test]
    fn residual_grows_linearly_under_perturbation() {
        let g = Grid::new(2, 16).unwrap();
        let phi = small_flow(g, 0.2);
        let cfg = config();
        let params = AlphaParam::new(0.5, 1.0).unwrap();
        let (u, _) = picard_solve(&phi, &cfg, params).unwrap();
        let bump = small_flow(g, 1.0);
        let pert = Trajectory::constant(u.time_grid().clone(), &bump);
        let r1 = residual(&u.combine(1e-4, &pert).unwrap(), &phi, params, &cfg).unwrap();
        let r2 = residual(&u.combine(2e-4, &pert).unwrap(), &phi, params, &cfg).unwrap();
        assert!((r2 / r1 - 2.0).abs() < 0.05, "r1 {r1} r2 {r2}");
    }

    #[test]
    fn large_data_reports_non_contraction() {
        let g = Grid::new(2, 16).unwrap();
        let phi = small_flow(g, 400.0);
        let cfg = PicardConfig { horizon: 2.0, ..config() };
        let params = AlphaParam::new(0.5, 0.05).unwrap();
        let err = picard_solve(&phi, &cfg, params).unwrap_err();
        assert!(matches!(err, LansError::NonContraction { .. } | LansError::Divergence(_)), "{err:?}");
    }

    #[test]
    fn diagnostics_csv_has_header_and_rows() {
        let g = Grid::new(2, 8).unwrap();
        let (_, diag) = picard_solve(&small_flow(g, 0.1), &config(), AlphaParam::new(0.5, 1.0).unwrap()).unwrap();
        let mut buf = Vec::new();
        diag.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iteration,e_norm,diff_norm,ratio,residual\n"));
        assert_eq!(text.lines().count(), diag.iterations() + 1);
    }
}
