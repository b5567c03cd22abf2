//! Integrating-factor Heun stepping for LANS-α and its Navier-Stokes limit.

use serde::{Deserialize, Serialize};

use crate::error::{LansError, Result};
use crate::field::SpectralField;
use crate::grid::k_squared;
use crate::semigroup::{TimeGrid, Trajectory};
use crate::spectral::{
    divergence_residual, leray_project, self_quadratic, stokes_project, AlphaParam, Nonlinearity,
    DIVERGENCE_TOLERANCE,
};

/// Relative growth of `E_α` within one step treated as blow-up.
pub const BLOWUP_GROWTH: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    IntegratingFactorHeun,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    pub dealias: bool,
    pub nonlinearity: Nonlinearity,
}

impl StepConfig {
    pub fn new(dt: f64) -> Result<Self> {
        let cfg = Self { dt, scheme: Scheme::default(), dealias: true, nonlinearity: Nonlinearity::Lans };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_nonlinearity(mut self, mode: Nonlinearity) -> Self {
        self.nonlinearity = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(LansError::InvalidParameter(format!("dt must be > 0, got {}", self.dt)));
        }
        Ok(())
    }
}

/// `E_α = ‖u‖² + α²‖∇u‖²`.
pub fn alpha_energy(u: &SpectralField, alpha: f64) -> f64 {
    u.energy() + alpha * alpha * u.homogeneous_energy(1)
}

/// `‖∇u‖² + α²‖Δu‖²`.
pub fn alpha_dissipation(u: &SpectralField, alpha: f64) -> f64 {
    u.homogeneous_energy(1) + alpha * alpha * u.homogeneous_energy(2)
}

fn nonlinear(u: &SpectralField, cfg: &StepConfig, params: AlphaParam) -> SpectralField {
    let q = self_quadratic(u, params.alpha, cfg.nonlinearity, cfg.dealias);
    let mut out = stokes_project(&q, params.alpha);
    out.scale_mut(-1.0);
    out
}

fn advance(u: &SpectralField, dt: f64, cfg: &StepConfig, params: AlphaParam) -> std::result::Result<SpectralField, String> {
    let nu = params.nu;
    let decay = |k: [i64; 3]| (-nu * k_squared(k) * dt).exp();
    let n0 = nonlinear(u, cfg, params);
    let mut predictor = u.clone();
    predictor.axpy(dt, &n0);
    predictor.apply_symbol(decay);
    if !predictor.is_finite() {
        return Err("non-finite predictor".into());
    }
    let n1 = nonlinear(&predictor, cfg, params);
    let mut next = u.clone();
    next.axpy(0.5 * dt, &n0);
    next.apply_symbol(decay);
    next.axpy(0.5 * dt, &n1);
    let next = leray_project(&next);
    if !next.is_finite() {
        return Err("non-finite coefficient".into());
    }
    let before = alpha_energy(u, params.alpha);
    let after = alpha_energy(&next, params.alpha);
    if after > (1.0 + BLOWUP_GROWTH) * before && after > f64::MIN_POSITIVE {
        return Err(format!("E_alpha grew from {before:e} to {after:e} in one step"));
    }
    Ok(next)
}

fn check_input(u: &SpectralField) -> Result<()> {
    let res = divergence_residual(u);
    if res > DIVERGENCE_TOLERANCE {
        return Err(LansError::NotDivergenceFree(res));
    }
    Ok(())
}

/// One step of size `cfg.dt`.
pub fn step(u: &SpectralField, cfg: &StepConfig, params: AlphaParam) -> Result<SpectralField> {
    cfg.validate()?;
    check_input(u)?;
    advance(u, cfg.dt, cfg, params).map_err(|reason| LansError::BlowupDetected { last_good_time: 0.0, reason })
}

/// Samples of an evolved state.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub divergence: Vec<f64>,
    pub steps: usize,
    pub max_step_divergence: f64,
}

impl Evolution {
    pub fn last(&self) -> &SpectralField {
        self.states.last().expect("evolution holds the initial state")
    }

    pub fn trajectory(&self) -> Result<Trajectory> {
        Trajectory::new(TimeGrid::from_nodes(self.times.clone())?, self.states.clone())
    }

    pub fn energies(&self, alpha: f64) -> Vec<f64> {
        self.states.iter().map(|s| alpha_energy(s, alpha)).collect()
    }
}

/// Evolves `φ` to `horizon`, recording the state at each node of `samples` in `[0, horizon]`.
///
/// Each gap between consecutive sample times is split into
/// `max(1, round(gap/dt))` equal steps, so every sample is hit exactly.
pub fn evolve(
    phi: &SpectralField,
    horizon: f64,
    cfg: &StepConfig,
    params: AlphaParam,
    samples: &TimeGrid,
) -> Result<Evolution> {
    cfg.validate()?;
    check_input(phi)?;
    if !(horizon >= 0.0) {
        return Err(LansError::InvalidParameter(format!("horizon must be >= 0, got {horizon}")));
    }
    let tol = 1e-12 * horizon.max(1.0);
    let mut targets: Vec<f64> = samples.nodes().iter().copied().filter(|&t| t > 0.0 && t <= horizon + tol).collect();
    if horizon > 0.0 && targets.last().is_none_or(|&t| (t - horizon).abs() > tol) {
        targets.push(horizon);
    }
    let mut out = Evolution {
        times: vec![0.0],
        states: vec![phi.clone()],
        divergence: vec![divergence_residual(phi)],
        steps: 0,
        max_step_divergence: divergence_residual(phi),
    };
    let mut u = phi.clone();
    let mut t = 0.0;
    for target in targets {
        let gap = target - t;
        let n = ((gap / cfg.dt).round() as usize).max(1);
        let h = gap / n as f64;
        for i in 0..n {
            u = advance(&u, h, cfg, params).map_err(|reason| LansError::BlowupDetected {
                last_good_time: t + i as f64 * h,
                reason,
            })?;
            out.steps += 1;
            out.max_step_divergence = out.max_step_divergence.max(divergence_residual(&u));
        }
        t = target;
        out.times.push(t);
        out.divergence.push(divergence_residual(&u));
        out.states.push(u.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PhysicalField;
    use crate::grid::Grid;
    use num_complex::Complex64;

    fn taylor_green_2d(grid: Grid) -> SpectralField {
        PhysicalField::from_fn(grid, |x| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]).to_spectral()
    }

    fn smooth_flow(grid: Grid, amp: f64) -> SpectralField {
        let mut f = SpectralField::from_fn(grid, |k| {
            let d = amp * (-0.3 * k_squared(k)).exp();
            let ph = (3 * k[0] - 2 * k[1] + 5 * k[2]) as f64;
            [Complex64::from_polar(d, ph), Complex64::from_polar(d, 1.0 - ph), Complex64::from_polar(d, 2.0 * ph)]
        });
        for c in 0..grid.dim() {
            f.set_coefficient(c, [0, 0, 0], Complex64::default());
        }
        f.symmetrize();
        leray_project(&f)
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = Grid::new(2, 16).unwrap();
        let cfg = StepConfig::new(0.01).unwrap();
        let out = step(&SpectralField::zeros(g), &cfg, AlphaParam::new(0.3, 1.0).unwrap()).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn linear_mode_decays_exactly() {
        let g = Grid::new(3, 8).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set_coefficient(0, [0, 1, 2], Complex64::new(0.0, 1.0));
        f.set_coefficient(0, [0, -1, -2], Complex64::new(0.0, -1.0));
        let cfg = StepConfig::new(0.05).unwrap().with_nonlinearity(Nonlinearity::Off);
        let params = AlphaParam::new(0.3, 0.8).unwrap();
        let out = step(&f, &cfg, params).unwrap();
        let expect = (-0.8f64 * 5.0 * 0.05).exp();
        assert!((out.coefficient(0, [0, 1, 2]).unwrap().im - expect).abs() < 1e-15);
    }

    #[test]
    fn taylor_green_matches_analytic_decay() {
        let g = Grid::new(2, 16).unwrap();
        let u0 = taylor_green_2d(g);
        let nu = 0.1;
        let params = AlphaParam::new(1.0, nu).unwrap();
        let cfg = StepConfig::new(0.01).unwrap().with_nonlinearity(Nonlinearity::NavierStokes);
        let samples = TimeGrid::uniform(1.0, 4).unwrap();
        let ev = evolve(&u0, 1.0, &cfg, params, &samples).unwrap();
        for (t, s) in ev.times.iter().zip(ev.states.iter()) {
            let expect = u0.scale((-2.0 * nu * t).exp());
            assert!((s - &expect).max_abs() < 1e-8 * u0.max_abs(), "t={t}");
        }
    }

    #[test]
    fn heun_is_second_order() {
        let g = Grid::new(2, 16).unwrap();
        let u0 = smooth_flow(g, 1.0);
        let params = AlphaParam::new(0.4, 0.05).unwrap();
        let samples = TimeGrid::uniform(0.5, 2).unwrap();
        let run = |dt: f64| evolve(&u0, 0.5, &StepConfig::new(dt).unwrap(), params, &samples).unwrap().last().clone();
        let (a, b, c) = (run(0.02), run(0.01), run(0.005));
        let order = ((&a - &b).plancherel_norm(0.0) / (&b - &c).plancherel_norm(0.0)).log2();
        assert!((1.8..=2.2).contains(&order), "order {order}");
    }

    #[test]
    fn evolve_at_zero_horizon_returns_data() {
        let g = Grid::new(2, 8).unwrap();
        let u0 = smooth_flow(g, 1.0);
        let ev = evolve(&u0, 0.0, &StepConfig::new(0.1).unwrap(), AlphaParam::new(0.5, 1.0).unwrap(), &TimeGrid::uniform(1.0, 2).unwrap()).unwrap();
        assert_eq!(ev.states, vec![u0]);
        assert_eq!(ev.times, vec![0.0]);
    }

    #[test]
    fn evolution_keeps_divergence_free_and_dissipates() {
        let g = Grid::new(2, 16).unwrap();
        let u0 = smooth_flow(g, 2.0);
        let params = AlphaParam::new(0.3, 0.1).unwrap();
        let samples = TimeGrid::uniform(1.0, 20).unwrap();
        let ev = evolve(&u0, 1.0, &StepConfig::new(0.01).unwrap(), params, &samples).unwrap();
        assert!(ev.max_step_divergence < 1e-10);
        let e = ev.energies(params.alpha);
        assert!(e.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(ev.trajectory().unwrap().len(), 21);
    }

    #[test]
    fn blowup_is_reported_with_last_good_time() {
        let g = Grid::new(2, 16).unwrap();
        let u0 = smooth_flow(g, 1e4);
        let params = AlphaParam::new(0.3, 1e-4).unwrap();
        let samples = TimeGrid::uniform(1.0, 2).unwrap();
        let err = evolve(&u0, 1.0, &StepConfig::new(0.05).unwrap(), params, &samples).unwrap_err();
        match err {
            LansError::BlowupDetected { last_good_time, .. } => assert!((0.0..1.0).contains(&last_good_time)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
