//! Spatial operators on the periodic box: Bessel potentials, the Helmholtz
//! inverse, derivatives, projectors, the Reynolds stress and the LANS-α
//! right-hand side.
//!
//! Odd-order symbols (derivatives, projectors) use the derivative
//! wavenumber, which drops the unpaired `-N/2` component so that real
//! fields stay real. Even symbols use the full lattice wavenumber.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LansError, Result};
use crate::fft;
use crate::field::{SpectralField, TensorField};
use crate::grid::{k_squared, Grid};

/// Relative divergence residual above which a field is rejected as not
/// divergence-free.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

/// Index pair `(s, p)` of the Bessel-potential space `H^{s,p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevIndex {
    pub s: f64,
    pub p: f64,
}

impl SobolevIndex {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(LansError::InvalidParameter(format!("regularity {s} is not finite")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(LansError::InvalidParameter(format!("integrability {p} not in (1, inf)")));
        }
        Ok(Self { s, p })
    }

    /// Shorthand for trusted literals; panics on invalid input.
    pub fn of(s: f64, p: f64) -> Self {
        Self::new(s, p).expect("invalid Sobolev index")
    }
}

/// Averaging length `alpha` and viscosity `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaParam {
    pub alpha: f64,
    pub nu: f64,
}

impl AlphaParam {
    pub fn new(alpha: f64, nu: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LansError::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(LansError::InvalidParameter(format!("nu must be > 0, got {nu}")));
        }
        Ok(Self { alpha, nu })
    }
}

/// Which quadratic term drives the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nonlinearity {
    /// `div(u⊗u) + div τ^α(u)`.
    #[default]
    Lans,
    /// `div(u⊗u)` only: the α → 0 limit.
    NavierStokes,
    /// Pure heat flow.
    Off,
}

#[inline]
fn deriv_k(grid: Grid, k: [i64; 3]) -> [f64; 3] {
    let ny = grid.nyquist();
    let mut out = [0.0; 3];
    for axis in 0..grid.dim() {
        if k[axis] != ny {
            out[axis] = k[axis] as f64;
        }
    }
    out
}

/// `(1-Δ)^{s/2}`: multiplies `û(k)` by `(1+|k|²)^{s/2}`.
pub fn bessel_multiplier(f: &SpectralField, s: f64) -> SpectralField {
    if s == 0.0 {
        return f.clone();
    }
    f.map_symbol(|k| (1.0 + k_squared(k)).powf(0.5 * s))
}

/// `(1-α²Δ)^{-1}`: multiplies `û(k)` by `1/(1+α²|k|²)`.
pub fn helmholtz_inverse(f: &SpectralField, alpha: f64) -> SpectralField {
    let a2 = alpha * alpha;
    f.map_symbol(|k| 1.0 / (1.0 + a2 * k_squared(k)))
}

/// `‖f‖_{s,p} = ‖(1-Δ)^{s/2} f‖_{L^p}` with volume-normalised measure.
///
/// For `p = 2` the discrete Parseval identity is used directly.
pub fn sobolev_norm(f: &SpectralField, idx: SobolevIndex) -> f64 {
    if idx.p == 2.0 {
        f.plancherel_norm(idx.s)
    } else {
        sobolev_norm_quadrature(f, idx)
    }
}

/// Physical-space route for every `p`: Bessel potential, synthesis, then
/// discrete `L^p` quadrature.
pub fn sobolev_norm_quadrature(f: &SpectralField, idx: SobolevIndex) -> f64 {
    bessel_multiplier(f, idx.s).to_physical().lp_norm(idx.p)
}

/// Velocity gradient `G_jk = ∂_k u_j`.
pub fn grad(f: &SpectralField) -> TensorField {
    let grid = f.grid();
    let d = grid.dim();
    let mut out = TensorField::zeros(grid);
    for (flat, k) in grid.modes() {
        let kd = deriv_k(grid, k);
        for j in 0..d {
            let u = f.component(j)[flat];
            for (kk, &kv) in kd.iter().enumerate().take(d) {
                out.entry_mut(j, kk)[flat] = Complex64::new(-kv * u.im, kv * u.re);
            }
        }
    }
    out
}

/// Row divergence `(div T)_j = Σ_k ∂_k T_jk`.
pub fn div_tensor(t: &TensorField) -> SpectralField {
    let grid = t.grid();
    let d = grid.dim();
    let mut comps = vec![vec![Complex64::default(); grid.len()]; d];
    for (flat, k) in grid.modes() {
        let kd = deriv_k(grid, k);
        for (j, comp) in comps.iter_mut().enumerate() {
            let mut acc = Complex64::default();
            for (kk, &kv) in kd.iter().enumerate().take(d) {
                acc += t.entry(j, kk)[flat] * kv;
            }
            comp[flat] = Complex64::new(-acc.im, acc.re);
        }
    }
    SpectralField::from_components(grid, comps).expect("component layout")
}

/// `Def(u) = (∇u + ∇uᵀ)/2`.
pub fn def_tensor(f: &SpectralField) -> TensorField {
    let g = grad(f);
    g.combine(0.5, &g.transpose(), 0.5)
}

/// `Rot(u) = (∇u - ∇uᵀ)/2`.
pub fn rot_tensor(f: &SpectralField) -> TensorField {
    let g = grad(f);
    g.combine(0.5, &g.transpose(), -0.5)
}

/// Spectral divergence `Σ_j i k_j û_j` as a scalar coefficient array.
pub fn divergence(f: &SpectralField) -> Vec<Complex64> {
    let grid = f.grid();
    let mut out = vec![Complex64::default(); grid.len()];
    for (flat, k) in grid.modes() {
        let kd = deriv_k(grid, k);
        let mut acc = Complex64::default();
        for (c, &kv) in kd.iter().enumerate().take(grid.dim()) {
            acc += f.component(c)[flat] * kv;
        }
        out[flat] = Complex64::new(-acc.im, acc.re);
    }
    out
}

/// `‖div f‖_{L²} / ‖∇f‖_{L²}`; zero for fields without gradient content.
pub fn divergence_residual(f: &SpectralField) -> f64 {
    let grid = f.grid();
    let mut num = 0.0;
    let mut den = 0.0;
    for (flat, k) in grid.modes() {
        let kd = deriv_k(grid, k);
        let mut acc = Complex64::default();
        for (c, &kv) in kd.iter().enumerate().take(grid.dim()) {
            let u = f.component(c)[flat];
            acc += u * kv;
            den += (kd[0] * kd[0] + kd[1] * kd[1] + kd[2] * kd[2]) * u.norm_sqr();
        }
        num += acc.norm_sqr();
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Leray–Helmholtz projection `û − k (k·û)/|k|²`; the mean mode is kept.
pub fn leray_project(f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let d = grid.dim();
    f.map_modes(|k, v| {
        let kd = deriv_k(grid, k);
        let k2 = kd[0] * kd[0] + kd[1] * kd[1] + kd[2] * kd[2];
        if k2 == 0.0 {
            return v;
        }
        let mut dot = Complex64::default();
        for c in 0..d {
            dot += v[c] * kd[c];
        }
        let mut w = v;
        for c in 0..d {
            w[c] -= dot * (kd[c] / k2);
        }
        w
    })
}

/// Stokes projector `P^α w = w − (1−α²Δ)^{-1}∇f`, where `f` solves
/// `(1−α²Δ)v + ∇f = (1−α²Δ)w` with `div v = 0`.
pub fn stokes_project(f: &SpectralField, alpha: f64) -> SpectralField {
    let grid = f.grid();
    let d = grid.dim();
    let a2 = alpha * alpha;
    f.map_modes(|k, w| {
        let kd = deriv_k(grid, k);
        let k2 = kd[0] * kd[0] + kd[1] * kd[1] + kd[2] * kd[2];
        if k2 == 0.0 {
            return w;
        }
        let helm = 1.0 + a2 * k_squared(k);
        // divergence of the Stokes system: i|k|² f̂ = (1+α²|k|²) k·ŵ
        let mut kw = Complex64::default();
        for c in 0..d {
            kw += w[c] * kd[c];
        }
        let pressure = Complex64::new(0.0, -1.0) * kw * (helm / k2);
        let mut v = w;
        for c in 0..d {
            let grad_p = Complex64::new(0.0, kd[c]) * pressure;
            v[c] -= grad_p / helm;
        }
        v
    })
}

/// 2/3-rule mask: zero every mode with some `|k_i| > N/3`.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let n = grid.points() as i64;
    f.map_symbol(|k| if k.iter().any(|&kc| 3 * kc.abs() > n) { 0.0 } else { 1.0 })
}

fn dealias_mask(grid: Grid) -> Vec<bool> {
    let n = grid.points() as i64;
    grid.modes().map(|(_, k)| k.iter().all(|&kc| 3 * kc.abs() <= n)).collect()
}

fn physical_gradient(f: &SpectralField) -> Vec<Vec<f64>> {
    let g = grad(f);
    let refs: Vec<&[Complex64]> = g.entries().iter().map(|e| e.as_slice()).collect();
    fft::to_real(f.grid(), &refs)
}

/// Pointwise `½(Def(a)·Rot(b) + Def(b)·Rot(a))` from physical gradients.
fn def_rot_product(d: usize, ga: &[Vec<f64>], gb: &[Vec<f64>], len: usize) -> Vec<Vec<f64>> {
    let same = std::ptr::eq(ga, gb);
    let mut out = vec![vec![0.0; len]; d * d];
    let mut da = [[0.0; 3]; 3];
    let mut ra = [[0.0; 3]; 3];
    let mut db = [[0.0; 3]; 3];
    let mut rb = [[0.0; 3]; 3];
    for i in 0..len {
        for j in 0..d {
            for k in 0..d {
                let a_jk = ga[j * d + k][i];
                let a_kj = ga[k * d + j][i];
                da[j][k] = 0.5 * (a_jk + a_kj);
                ra[j][k] = 0.5 * (a_jk - a_kj);
                if !same {
                    let b_jk = gb[j * d + k][i];
                    let b_kj = gb[k * d + j][i];
                    db[j][k] = 0.5 * (b_jk + b_kj);
                    rb[j][k] = 0.5 * (b_jk - b_kj);
                }
            }
        }
        for j in 0..d {
            for k in 0..d {
                let mut acc = 0.0;
                for l in 0..d {
                    if same {
                        acc += da[j][l] * ra[l][k];
                    } else {
                        acc += 0.5 * (da[j][l] * rb[l][k] + db[j][l] * ra[l][k]);
                    }
                }
                out[j * d + k][i] = acc;
            }
        }
    }
    out
}

fn tensor_from_physical(grid: Grid, entries: Vec<Vec<f64>>, mask: &[bool]) -> TensorField {
    let refs: Vec<&[f64]> = entries.iter().map(|e| e.as_slice()).collect();
    let mut spec = fft::from_real(grid, &refs);
    for e in spec.iter_mut() {
        for (z, &keep) in e.iter_mut().zip(mask.iter()) {
            if !keep {
                *z = Complex64::default();
            }
        }
    }
    TensorField::from_entries(grid, spec).expect("entry layout")
}

/// Reynolds stress `τ^α(u,v) = α²(1−α²Δ)^{-1} ½[Def(u)·Rot(v) + Def(v)·Rot(u)]`.
///
/// The product is formed in physical space from 2/3-dealiased inputs and
/// the result is dealiased again. `τ^α(u,u) = α²(1−α²Δ)^{-1}[Def(u)·Rot(u)]`.
pub fn reynolds_stress(u: &SpectralField, v: &SpectralField, alpha: f64) -> Result<TensorField> {
    u.check_same_grid(v)?;
    let grid = u.grid();
    let mask = dealias_mask(grid);
    let du = dealias(u);
    let gu = physical_gradient(&du);
    let prod = if std::ptr::eq(u, v) {
        def_rot_product(grid.dim(), &gu, &gu, grid.len())
    } else {
        let gv = physical_gradient(&dealias(v));
        def_rot_product(grid.dim(), &gu, &gv, grid.len())
    };
    let dr = tensor_from_physical(grid, prod, &mask);
    let a2 = alpha * alpha;
    Ok(dr.map_symbol(|k| a2 / (1.0 + a2 * k_squared(k))))
}

/// `u⊗v` with entries `u_j v_k`, dealiased.
pub fn outer_product(u: &SpectralField, v: &SpectralField) -> Result<TensorField> {
    u.check_same_grid(v)?;
    let grid = u.grid();
    let d = grid.dim();
    let mask = dealias_mask(grid);
    let pu = dealias(u).to_physical();
    let pv = if std::ptr::eq(u, v) { pu.clone() } else { dealias(v).to_physical() };
    let mut entries = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            let a = &pu.components()[j];
            let b = &pv.components()[k];
            entries.push(a.iter().zip(b.iter()).map(|(x, y)| x * y).collect());
        }
    }
    Ok(tensor_from_physical(grid, entries, &mask))
}

/// `V^α(u,v) = div(u⊗v) + div τ^α(u,v)`.
pub fn v_alpha(u: &SpectralField, v: &SpectralField, alpha: f64) -> Result<SpectralField> {
    quadratic_term(u, v, alpha, Nonlinearity::Lans)
}

/// The quadratic term selected by `mode`, bilinear in `(u, v)`.
pub fn quadratic_term(
    u: &SpectralField,
    v: &SpectralField,
    alpha: f64,
    mode: Nonlinearity,
) -> Result<SpectralField> {
    u.check_same_grid(v)?;
    let grid = u.grid();
    if mode == Nonlinearity::Off {
        return Ok(SpectralField::zeros(grid));
    }
    if std::ptr::eq(u, v) {
        return Ok(self_interaction(u, alpha, mode, true));
    }
    let mut out = div_tensor(&outer_product(u, v)?);
    if mode == Nonlinearity::Lans {
        out.axpy(1.0, &div_tensor(&reynolds_stress(u, v, alpha)?));
    }
    Ok(out)
}

/// `V(u,u)` for the selected mode, with the 2/3 rule optional.
pub fn self_quadratic(u: &SpectralField, alpha: f64, mode: Nonlinearity, dealiased: bool) -> SpectralField {
    if mode == Nonlinearity::Off {
        return SpectralField::zeros(u.grid());
    }
    self_interaction(u, alpha, mode, dealiased)
}

/// Diagonal `V(u,u)` with one batched set of transforms.
fn self_interaction(u: &SpectralField, alpha: f64, mode: Nonlinearity, dealiased: bool) -> SpectralField {
    let grid = u.grid();
    let d = grid.dim();
    let len = grid.len();
    let (mask, du) = if dealiased {
        (dealias_mask(grid), dealias(u))
    } else {
        (vec![true; len], u.clone())
    };
    let with_stress = mode == Nonlinearity::Lans;

    let g = grad(&du);
    let mut spectra: Vec<&[Complex64]> = du.components().iter().map(|c| c.as_slice()).collect();
    if with_stress {
        spectra.extend(g.entries().iter().map(|e| e.as_slice()));
    }
    let phys = fft::to_real(grid, &spectra);
    let (vel, gradient) = phys.split_at(d);

    // symmetric flux entries j <= k
    let mut pairs = Vec::new();
    let mut products: Vec<Vec<f64>> = Vec::new();
    for j in 0..d {
        for k in j..d {
            pairs.push((j, k));
            products.push(vel[j].iter().zip(vel[k].iter()).map(|(a, b)| a * b).collect());
        }
    }
    let flux_count = products.len();
    if with_stress {
        products.extend(def_rot_product(d, gradient, gradient, len));
    }
    let refs: Vec<&[f64]> = products.iter().map(|p| p.as_slice()).collect();
    let spec = fft::from_real(grid, &refs);
    let a2 = alpha * alpha;

    let mut comps = vec![vec![Complex64::default(); len]; d];
    let mut flux = [[0usize; 3]; 3];
    for (idx, &(j, k)) in pairs.iter().enumerate() {
        flux[j][k] = idx;
        flux[k][j] = idx;
    }
    for (flat, k) in grid.modes() {
        if !mask[flat] {
            continue;
        }
        let kd = deriv_k(grid, k);
        let h = a2 / (1.0 + a2 * k_squared(k));
        for (j, comp) in comps.iter_mut().enumerate() {
            let mut acc = Complex64::default();
            for (l, &kv) in kd.iter().enumerate().take(d) {
                let mut t = spec[flux[j][l]][flat];
                if with_stress {
                    t += spec[flux_count + j * d + l][flat] * h;
                }
                acc += t * kv;
            }
            comp[flat] = Complex64::new(-acc.im, acc.re);
        }
    }
    SpectralField::from_components(grid, comps).expect("component layout")
}

/// Linear part `νΔu`.
pub fn viscous_term(u: &SpectralField, nu: f64) -> SpectralField {
    u.map_symbol(|k| -nu * k_squared(k))
}

/// `∂_t u = νΔu − P^α V^α(u,u)` for divergence-free `u`.
pub fn lans_rhs(u: &SpectralField, params: AlphaParam) -> Result<SpectralField> {
    lans_rhs_with(u, params, Nonlinearity::Lans)
}

pub fn lans_rhs_with(u: &SpectralField, params: AlphaParam, mode: Nonlinearity) -> Result<SpectralField> {
    let residual = divergence_residual(u);
    if residual > DIVERGENCE_TOLERANCE {
        return Err(LansError::NotDivergenceFree(residual));
    }
    let mut out = viscous_term(u, params.nu);
    let nl = stokes_project(&quadratic_term(u, u, params.alpha, mode)?, params.alpha);
    out.axpy(-1.0, &nl);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PhysicalField;

    fn grid2(n: usize) -> Grid {
        Grid::new(2, n).unwrap()
    }

    fn random_field(grid: Grid, seed: u64) -> SpectralField {
        // deterministic smooth pseudo-random real field built in physical space
        let mut s = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut f = SpectralField::from_fn(grid, |k| {
            let damp = (-0.1 * k_squared(k)).exp();
            let mut v = [Complex64::default(); 3];
            for c in v.iter_mut() {
                *c = Complex64::new(next(), next()) * damp;
            }
            v
        });
        f.symmetrize();
        f
    }

    #[test]
    fn bessel_basics() {
        let g = grid2(16);
        let f = random_field(g, 3);
        assert_eq!(bessel_multiplier(&f, 0.0), f);
        let mut single = SpectralField::zeros(g);
        single.set_coefficient(0, [1, 0, 0], Complex64::new(1.0, 0.0));
        let b = bessel_multiplier(&single, 1.0);
        let c = b.coefficient(0, [1, 0, 0]).unwrap();
        assert!((c.re - 2f64.sqrt()).abs() < 1e-15);
        let back = bessel_multiplier(&bessel_multiplier(&f, 1.3), -1.3);
        assert!((&back - &f).plancherel_norm(0.0) <= 1e-12 * f.plancherel_norm(0.0));
    }

    #[test]
    fn helmholtz_inverse_basics() {
        let g = grid2(16);
        let f = random_field(g, 5);
        assert_eq!(helmholtz_inverse(&f, 0.0), f);
        let mut single = SpectralField::zeros(g);
        single.set_coefficient(1, [0, 2, 0], Complex64::new(1.0, 0.0));
        let h = helmholtz_inverse(&single, 1.0);
        assert!((h.coefficient(1, [0, 2, 0]).unwrap().re - 0.2).abs() < 1e-15);
        let alpha = 0.7;
        let back = helmholtz_inverse(&f, alpha).map_symbol(|k| 1.0 + alpha * alpha * k_squared(k));
        assert!((&back - &f).plancherel_norm(0.0) <= 1e-12 * f.plancherel_norm(0.0));
    }

    #[test]
    fn sobolev_norm_cosine_mode() {
        let g = grid2(16);
        let phys = PhysicalField::from_fn(g, |x| [x[0].cos(), 0.0, 0.0]);
        let f = phys.to_spectral();
        let base = phys.lp_norm(2.0);
        assert!((base - 0.5f64.sqrt()).abs() < 1e-14);
        let n1 = sobolev_norm(&f, SobolevIndex::of(1.0, 2.0));
        assert!((n1 - 2f64.sqrt() * base).abs() < 1e-13);
        assert_eq!(sobolev_norm(&SpectralField::zeros(g), SobolevIndex::of(1.0, 4.0)), 0.0);
    }

    #[test]
    fn sobolev_norm_p4_matches_direct_quadrature() {
        let g = grid2(16);
        let f = random_field(g, 11);
        let s = 0.6;
        // direct: synthesise (1-Δ)^{s/2} f point by point via the series
        let bf = f.map_symbol(|k| (1.0 + k_squared(k)).powf(0.5 * s));
        let mut acc = 0.0;
        for flat in 0..g.len() {
            let x = g.position(flat);
            let mut m2 = 0.0;
            for c in 0..2 {
                let mut val = 0.0;
                for (kf, k) in g.modes() {
                    let phase = k[0] as f64 * x[0] + k[1] as f64 * x[1];
                    val += (bf.component(c)[kf] * Complex64::from_polar(1.0, phase)).re;
                }
                m2 += val * val;
            }
            acc += m2 * m2;
        }
        let direct = (acc / g.len() as f64).powf(0.25);
        let via = sobolev_norm(&f, SobolevIndex::of(s, 4.0));
        assert!((direct - via).abs() < 1e-12 * direct);
        let scaled = sobolev_norm(&f.scale(-3.0), SobolevIndex::of(s, 4.0));
        assert!((scaled - 3.0 * via).abs() < 1e-12 * via);
    }

    #[test]
    fn gradient_identities() {
        let g = grid2(16);
        let mut c = SpectralField::zeros(g);
        c.set_coefficient(0, [0, 0, 0], Complex64::new(2.0, 0.0));
        assert_eq!(grad(&c).max_abs(), 0.0);
        let u = random_field(g, 7);
        let sum = def_tensor(&u).combine(1.0, &rot_tensor(&u), 1.0);
        let gu = grad(&u);
        assert!(sum.combine(1.0, &gu, -1.0).max_abs() <= 1e-13 * gu.max_abs());
    }

    #[test]
    fn shear_flow_def_rot_entries() {
        // u = (sin y, 0): ∂_y u_0 = cos y; Def_01 = Def_10 = ½cos y, Rot_01 = ½cos y = -Rot_10
        let g = grid2(16);
        let u = PhysicalField::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]).to_spectral();
        let d = def_tensor(&u);
        let r = rot_tensor(&u);
        let refs: Vec<&[Complex64]> = d.entries().iter().chain(r.entries().iter()).map(|e| e.as_slice()).collect();
        let p = crate::fft::to_real(g, &refs);
        for flat in 0..g.len() {
            let y = g.position(flat)[1];
            let half = 0.5 * y.cos();
            assert!(p[0][flat].abs() < 1e-14 && p[3][flat].abs() < 1e-14);
            assert!((p[1][flat] - half).abs() < 1e-14 && (p[2][flat] - half).abs() < 1e-14);
            assert!((p[5][flat] - half).abs() < 1e-14 && (p[6][flat] + half).abs() < 1e-14);
        }
    }

    #[test]
    fn projectors_agree_and_are_idempotent() {
        let g = Grid::new(3, 8).unwrap();
        let f = random_field(g, 13);
        let p = leray_project(&f);
        assert!(divergence_residual(&p) < 1e-13);
        assert!((&leray_project(&p) - &p).plancherel_norm(0.0) <= 1e-13 * f.plancherel_norm(0.0));
        for alpha in [0.1, 0.5, 1.0] {
            let s = stokes_project(&f, alpha);
            assert!((&s - &p).plancherel_norm(0.0) <= 1e-12 * f.plancherel_norm(0.0));
        }
    }

    #[test]
    fn projectors_kill_gradients() {
        let g = grid2(16);
        // ∇φ for φ = sin(x) cos(2y) + mean flow
        let mut f = PhysicalField::from_fn(g, |x| {
            [x[0].cos() * (2.0 * x[1]).cos() + 0.3, -2.0 * x[0].sin() * (2.0 * x[1]).sin(), 0.0]
        })
        .to_spectral();
        let p = leray_project(&f);
        assert!((p.coefficient(0, [0, 0, 0]).unwrap().re - 0.3).abs() < 1e-15);
        f.set_coefficient(0, [0, 0, 0], Complex64::default());
        assert!(leray_project(&f).max_abs() < 1e-15);
        assert!(stokes_project(&f, 0.7).max_abs() < 1e-15);
    }

    #[test]
    fn dealias_masks_upper_third() {
        let g = grid2(12);
        let f = random_field(g, 17);
        let d = dealias(&f);
        assert_eq!(dealias(&d), d);
        assert_eq!(d.coefficient(0, [5, 0, 0]).unwrap(), Complex64::default());
        assert_eq!(d.coefficient(0, [4, 1, 0]), f.coefficient(0, [4, 1, 0]));
        let mut low = SpectralField::zeros(g);
        low.set_coefficient(1, [1, -2, 0], Complex64::new(0.5, 0.25));
        assert_eq!(dealias(&low), low);
    }

    #[test]
    fn reynolds_stress_vanishes_on_constants_and_is_symmetric() {
        let g = grid2(16);
        let mut c = SpectralField::zeros(g);
        c.set_coefficient(0, [0, 0, 0], Complex64::new(1.0, 0.0));
        assert_eq!(reynolds_stress(&c, &c, 0.5).unwrap().max_abs(), 0.0);
        let u = random_field(g, 19);
        let v = random_field(g, 23);
        let a = reynolds_stress(&u, &v, 0.5).unwrap();
        let b = reynolds_stress(&v, &u, 0.5).unwrap();
        assert!(a.combine(1.0, &b, -1.0).max_abs() <= 1e-14 * a.max_abs());
    }

    #[test]
    fn reynolds_stress_shear_single_mode() {
        // u = (sin y, 0): Def·Rot has (0,0) = -¼cos²y, (1,1) = ¼cos²y, zero off-diagonal.
        // cos²y = ½ + ½cos 2y, so the |k|=2 part carries α²/(1+4α²).
        let g = grid2(16);
        let alpha = 0.3;
        let u = PhysicalField::from_fn(g, |x| [x[1].sin(), 0.0, 0.0]).to_spectral();
        let t = reynolds_stress(&u, &u, alpha).unwrap();
        let a2 = alpha * alpha;
        let e00 = |k: [i64; 3]| t.entry(0, 0)[g.flat_index(k).unwrap()];
        assert!((e00([0, 0, 0]).re + a2 * 0.125).abs() < 1e-15);
        assert!((e00([0, 2, 0]).re + a2 / (1.0 + 4.0 * a2) * 0.0625).abs() < 1e-15);
        let e11 = t.entry(1, 1)[g.flat_index([0, 2, 0]).unwrap()];
        assert!((e11.re - a2 / (1.0 + 4.0 * a2) * 0.0625).abs() < 1e-15);
        assert!(t.entry(0, 1).iter().chain(t.entry(1, 0).iter()).all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn v_alpha_is_bilinear() {
        let g = Grid::new(3, 8).unwrap();
        let u = random_field(g, 29);
        let v = random_field(g, 31);
        let w = random_field(g, 37);
        let zero = SpectralField::zeros(g);
        assert!(v_alpha(&zero, &v, 0.4).unwrap().max_abs() == 0.0);
        let lhs = v_alpha(&u, &(&v + &w), 0.4).unwrap();
        let rhs = &v_alpha(&u, &v, 0.4).unwrap() + &v_alpha(&u, &w, 0.4).unwrap();
        assert!((&lhs - &rhs).max_abs() <= 1e-12 * lhs.max_abs());
        // diagonal fast path equals the general bilinear form
        let uu = u.clone();
        let diag = v_alpha(&u, &u, 0.4).unwrap();
        let general = v_alpha(&u, &uu, 0.4).unwrap();
        assert!((&diag - &general).max_abs() <= 1e-13 * diag.max_abs());
        // V(u) − V(v) = V(u, u−v) + V(u−v, v)
        let d = &u - &v;
        let lhs = &diag - &v_alpha(&v, &v, 0.4).unwrap();
        let rhs = &v_alpha(&u, &d, 0.4).unwrap() + &v_alpha(&d, &v, 0.4).unwrap();
        assert!((&lhs - &rhs).max_abs() <= 1e-12 * lhs.max_abs());
    }

    #[test]
    fn lans_rhs_rejects_compressible_input() {
        let g = grid2(16);
        let f = PhysicalField::from_fn(g, |x| [x[0].sin(), 0.0, 0.0]).to_spectral();
        let params = AlphaParam::new(0.5, 1.0).unwrap();
        assert!(matches!(lans_rhs(&f, params), Err(LansError::NotDivergenceFree(_))));
        let zero = SpectralField::zeros(g);
        assert_eq!(lans_rhs(&zero, params).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn lans_rhs_linear_part_per_mode() {
        // Shear mode (sin y, 0) has V(u,u) with only a gradient part, which projects out.
        let g = grid2(16);
        let u = PhysicalField::from_fn(g, |x| [(2.0 * x[1]).sin(), 0.0, 0.0]).to_spectral();
        let params = AlphaParam::new(0.5, 0.3).unwrap();
        let rhs = lans_rhs(&u, params).unwrap();
        let expect = u.scale(-0.3 * 4.0);
        assert!((&rhs - &expect).max_abs() < 1e-14);
    }
}
