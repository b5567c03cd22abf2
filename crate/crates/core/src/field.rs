//! Vector and tensor fields stored as Fourier coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{LansError, Result};
use crate::fft;
use crate::grid::{k_squared, Grid};

/// Vector field on the periodic box, one coefficient array per component,
/// with `u(x) = Σ_k û(k) e^{ik·x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    comps: Vec<Vec<Complex64>>,
}

/// Real samples of a vector field at the grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    comps: Vec<Vec<f64>>,
}

/// Rank-two tensor field; entry `(j, k)` is stored at `j * dim + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField {
    grid: Grid,
    entries: Vec<Vec<Complex64>>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, comps: vec![vec![Complex64::default(); grid.len()]; grid.dim()] }
    }

    pub fn from_components(grid: Grid, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.len() != grid.dim() {
            return Err(LansError::SizeMismatch { expected: grid.dim(), got: comps.len() });
        }
        for c in &comps {
            if c.len() != grid.len() {
                return Err(LansError::SizeMismatch { expected: grid.len(), got: c.len() });
            }
        }
        Ok(Self { grid, comps })
    }

    /// Build a field by evaluating `f(k)` for every mode.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([i64; 3]) -> [Complex64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for (flat, k) in grid.modes() {
            let v = f(k);
            for (c, comp) in out.comps.iter_mut().enumerate() {
                comp[flat] = v[c];
            }
        }
        out
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn into_components(self) -> Vec<Vec<Complex64>> {
        self.comps
    }

    pub fn coefficient(&self, c: usize, k: [i64; 3]) -> Option<Complex64> {
        self.grid.flat_index(k).map(|i| self.comps[c][i])
    }

    pub fn set_coefficient(&mut self, c: usize, k: [i64; 3], value: Complex64) {
        if let Some(i) = self.grid.flat_index(k) {
            self.comps[c][i] = value;
        }
    }

    pub fn check_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(LansError::GridMismatch);
        }
        Ok(())
    }

    /// Multiply every coefficient by a real symbol `m(k)`.
    pub fn map_symbol(&self, m: impl Fn([i64; 3]) -> f64) -> Self {
        let mut out = self.clone();
        out.apply_symbol(m);
        out
    }

    pub fn apply_symbol(&mut self, m: impl Fn([i64; 3]) -> f64) {
        let grid = self.grid;
        for (flat, k) in grid.modes() {
            let s = m(k);
            for comp in self.comps.iter_mut() {
                comp[flat] *= s;
            }
        }
    }

    /// Apply a mode-local linear map to the coefficient vector at each `k`.
    pub fn map_modes(&self, mut f: impl FnMut([i64; 3], [Complex64; 3]) -> [Complex64; 3]) -> Self {
        let mut out = self.clone();
        let dim = self.grid.dim();
        for (flat, k) in self.grid.modes() {
            let mut v = [Complex64::default(); 3];
            for c in 0..dim {
                v[c] = self.comps[c][flat];
            }
            let w = f(k, v);
            for c in 0..dim {
                out.comps[c][flat] = w[c];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale_mut(s);
        out
    }

    pub fn scale_mut(&mut self, s: f64) {
        for comp in self.comps.iter_mut() {
            for z in comp.iter_mut() {
                *z *= s;
            }
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &SpectralField) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.comps.iter_mut().zip(other.comps.iter()) {
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x += y * s;
            }
        }
    }

    /// Mean-square amplitude `Σ_k |û(k)|²`, i.e. the squared L² norm with
    /// respect to normalised volume.
    pub fn energy(&self) -> f64 {
        self.comps.iter().flat_map(|c| c.iter()).map(|z| z.norm_sqr()).sum()
    }

    /// Plancherel form of the `H^{s,2}` norm, `(Σ (1+|k|²)^s |û|²)^{1/2}`.
    pub fn plancherel_norm(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (flat, k) in self.grid.modes() {
            let w = if s == 0.0 { 1.0 } else { (1.0 + k_squared(k)).powf(s) };
            let mut e = 0.0;
            for comp in &self.comps {
                e += comp[flat].norm_sqr();
            }
            acc += w * e;
        }
        acc.sqrt()
    }

    /// Homogeneous `Σ |k|^{2m} |û|²`.
    pub fn homogeneous_energy(&self, m: u32) -> f64 {
        let mut acc = 0.0;
        for (flat, k) in self.grid.modes() {
            let w = k_squared(k).powi(m as i32);
            if w == 0.0 {
                continue;
            }
            for comp in &self.comps {
                acc += w * comp[flat].norm_sqr();
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flat_map(|c| c.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().flat_map(|c| c.iter()).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest `|û(-k) - conj(û(k))|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for comp in &self.comps {
            for flat in 0..self.grid.len() {
                let d = (comp[self.grid.negated(flat)] - comp[flat].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// Enforce Hermitian symmetry by averaging each pair `(k, -k)`.
    pub fn symmetrize(&mut self) {
        let grid = self.grid;
        for comp in self.comps.iter_mut() {
            for flat in 0..grid.len() {
                let neg = grid.negated(flat);
                if neg < flat {
                    continue;
                }
                let avg = (comp[flat] + comp[neg].conj()) * 0.5;
                comp[flat] = avg;
                comp[neg] = avg.conj();
            }
        }
    }

    /// Sample the field at the grid points.
    pub fn to_physical(&self) -> PhysicalField {
        let refs: Vec<&[Complex64]> = self.comps.iter().map(|c| c.as_slice()).collect();
        PhysicalField { grid: self.grid, comps: fft::to_real(self.grid, &refs) }
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scale(-1.0)
    }
}

impl Mul<&SpectralField> for f64 {
    type Output = SpectralField;
    fn mul(self, rhs: &SpectralField) -> SpectralField {
        rhs.scale(self)
    }
}

impl PhysicalField {
    pub fn new(grid: Grid, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != grid.dim() {
            return Err(LansError::SizeMismatch { expected: grid.dim(), got: comps.len() });
        }
        for c in &comps {
            if c.len() != grid.len() {
                return Err(LansError::SizeMismatch { expected: grid.len(), got: c.len() });
            }
        }
        Ok(Self { grid, comps })
    }

    /// Sample a function of position.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut comps = vec![vec![0.0; grid.len()]; grid.dim()];
        for flat in 0..grid.len() {
            let v = f(grid.position(flat));
            for (c, comp) in comps.iter_mut().enumerate() {
                comp[flat] = v[c];
            }
        }
        Self { grid, comps }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn to_spectral(&self) -> SpectralField {
        let refs: Vec<&[f64]> = self.comps.iter().map(|c| c.as_slice()).collect();
        SpectralField { grid: self.grid, comps: fft::from_real(self.grid, &refs) }
    }

    /// Discrete `L^p` norm of the pointwise Euclidean length, normalised by volume.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let len = self.grid.len();
        let mut acc = 0.0;
        for i in 0..len {
            let m2: f64 = self.comps.iter().map(|c| c[i] * c[i]).sum();
            acc += if p == 2.0 { m2 } else { m2.powf(0.5 * p) };
        }
        (acc / len as f64).powf(1.0 / p)
    }
}

impl TensorField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, entries: vec![vec![Complex64::default(); grid.len()]; grid.dim() * grid.dim()] }
    }

    pub fn from_entries(grid: Grid, entries: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = grid.dim();
        if entries.len() != d * d {
            return Err(LansError::SizeMismatch { expected: d * d, got: entries.len() });
        }
        Ok(Self { grid, entries })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn entry(&self, j: usize, k: usize) -> &[Complex64] {
        &self.entries[j * self.grid.dim() + k]
    }

    pub fn entry_mut(&mut self, j: usize, k: usize) -> &mut [Complex64] {
        let d = self.grid.dim();
        &mut self.entries[j * d + k]
    }

    pub fn entries(&self) -> &[Vec<Complex64>] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let d = self.grid.dim();
        let mut out = Self::zeros(self.grid);
        for j in 0..d {
            for k in 0..d {
                out.entries[k * d + j] = self.entries[j * d + k].clone();
            }
        }
        out
    }

    pub fn combine(&self, a: f64, other: &TensorField, b: f64) -> Self {
        let mut out = self.clone();
        for (x, y) in out.entries.iter_mut().zip(other.entries.iter()) {
            for (p, q) in x.iter_mut().zip(y.iter()) {
                *p = *p * a + q * b;
            }
        }
        out
    }

    pub fn map_symbol(&self, m: impl Fn([i64; 3]) -> f64) -> Self {
        let mut out = self.clone();
        for (flat, k) in self.grid.modes() {
            let s = m(k);
            for e in out.entries.iter_mut() {
                e[flat] *= s;
            }
        }
        out
    }

    /// `(Σ_{jk} Σ_k |T̂_jk|²)^{1/2}`, the volume-normalised L² norm.
    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().flat_map(|c| c.iter()).map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flat_map(|c| c.iter()).map(|z| z.norm()).fold(0.0, f64::max)
    }
}
