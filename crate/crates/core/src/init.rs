//! Initial-data generators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::field::SpectralField;
use crate::grid::{k_squared, Grid};
use crate::spectral::leray_project;

/// Default excess decay of the random generator's spectrum.
pub const DEFAULT_MARGIN: f64 = 0.01;

/// Taylor-Green vortex with unit wavenumbers.
///
/// 2D: `A(sin x cos y, −cos x sin y)`; 3D: `A(sin x cos y cos z, −cos x sin y cos z, 0)`.
pub fn gen_taylor_green(grid: Grid, amplitude: f64) -> SpectralField {
    let dim = grid.dim();
    let weight = amplitude / (1u32 << dim) as f64;
    SpectralField::from_fn(grid, |k| {
        let on_shell = k.iter().take(dim).all(|c| c.abs() == 1);
        if !on_shell {
            return [Complex64::default(); 3];
        }
        // sin(k_j x_j) contributes sign(k_j)/(2i); the cosines contribute 1/2
        let sx = k[0].signum() as f64;
        let sy = k[1].signum() as f64;
        [Complex64::new(0.0, -sx * weight), Complex64::new(0.0, sy * weight), Complex64::default()]
    })
}

fn mode_seed(seed: u64, k: [i64; 3]) -> u64 {
    let mut h = seed ^ 0x6A09_E667_F3BC_C908;
    for c in k {
        h ^= (c as u64).wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 31;
    }
    h
}

/// Divergence-free random field whose amplitudes decay as `|k|^{-(s+n/2+0.01)}`.
pub fn gen_random_sobolev(grid: Grid, s: f64, seed: u64, amplitude: f64) -> SpectralField {
    gen_random_sobolev_with_margin(grid, s, seed, amplitude, DEFAULT_MARGIN)
}

/// As [`gen_random_sobolev`] with decay exponent `s + n/2 + margin`.
///
/// Every coefficient is drawn from a stream keyed by `(seed, k)`, so fields
/// generated at `N` and `2N` agree on the modes they share.
pub fn gen_random_sobolev_with_margin(grid: Grid, s: f64, seed: u64, amplitude: f64, margin: f64) -> SpectralField {
    let mut field = leray_project(&random_coefficients(grid, s, seed, amplitude, margin));
    field.symmetrize();
    field
}

/// Random real field with the same spectrum, not projected.
pub fn gen_random_compressible(grid: Grid, s: f64, seed: u64, amplitude: f64) -> SpectralField {
    random_coefficients(grid, s, seed, amplitude, DEFAULT_MARGIN)
}

fn random_coefficients(grid: Grid, s: f64, seed: u64, amplitude: f64, margin: f64) -> SpectralField {
    let dim = grid.dim();
    let exponent = s + dim as f64 / 2.0 + margin;
    SpectralField::from_fn(grid, |k| {
        let mut out = [Complex64::default(); 3];
        if k == [0, 0, 0] || grid.has_nyquist(k) {
            return out;
        }
        let neg = [-k[0], -k[1], -k[2]];
        let canonical = if k > neg { k } else { neg };
        let mut rng = ChaCha8Rng::seed_from_u64(mode_seed(seed, canonical));
        let scale = amplitude * k_squared(k).powf(-exponent / 2.0) * std::f64::consts::FRAC_1_SQRT_2;
        for value in out.iter_mut().take(dim) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(re, im) * scale;
            *value = if canonical == k { z } else { z.conj() };
        }
        out
    })
}
