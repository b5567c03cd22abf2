//! Multi-dimensional FFTs on the flat storage layout of [`Grid`].
//!
//! Physical fields are real, so transforms of real data are done two at a
//! time by packing a pair into the real and imaginary parts of one complex
//! array.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::Grid;

type Plan = Arc<dyn Fft<f64>>;

static PLANS: LazyLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Plan>)>> =
    LazyLock::new(|| Mutex::new((FftPlanner::new(), HashMap::new())));

fn plan(n: usize, inverse: bool) -> Plan {
    let mut guard = PLANS.lock().expect("fft plan cache poisoned");
    let (planner, cache) = &mut *guard;
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let dir = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
            planner.plan_fft(n, dir)
        })
        .clone()
}

/// Unnormalised in-place transform along every axis.
fn transform(grid: Grid, data: &mut [Complex64], inverse: bool) {
    let n = grid.points();
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    // last axis is contiguous
    fft.process_with_scratch(data, &mut scratch);
    let mut block = Vec::new();
    for axis in (0..grid.dim() - 1).rev() {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        let span = n * stride;
        block.resize(span, Complex64::default());
        for chunk in data.chunks_exact_mut(span) {
            // chunk is an (n x stride) matrix; transpose so each line is contiguous
            for i in 0..n {
                for j in 0..stride {
                    block[j * n + i] = chunk[i * stride + j];
                }
            }
            fft.process_with_scratch(&mut block, &mut scratch);
            for i in 0..n {
                for j in 0..stride {
                    chunk[i * stride + j] = block[j * n + i];
                }
            }
        }
    }
}

/// Forward transform of complex samples to coefficients `c(k)` with
/// `f(x) = Σ c(k) e^{ik·x}`.
pub fn forward(grid: Grid, data: &mut [Complex64]) {
    transform(grid, data, false);
    let scale = 1.0 / grid.len() as f64;
    for z in data.iter_mut() {
        *z *= scale;
    }
}

/// Inverse of [`forward`]: sums the Fourier series at the sample points.
pub fn inverse(grid: Grid, data: &mut [Complex64]) {
    transform(grid, data, true);
}

/// Synthesise several Hermitian-symmetric spectra to real samples.
pub fn to_real(grid: Grid, spectra: &[&[Complex64]]) -> Vec<Vec<f64>> {
    let len = grid.len();
    let mut out = Vec::with_capacity(spectra.len());
    let mut buf = vec![Complex64::default(); len];
    for pair in spectra.chunks(2) {
        let i = Complex64::new(0.0, 1.0);
        match pair {
            [a, b] => {
                for ((z, &x), &y) in buf.iter_mut().zip(a.iter()).zip(b.iter()) {
                    *z = x + i * y;
                }
                inverse(grid, &mut buf);
                out.push(buf.iter().map(|z| z.re).collect());
                out.push(buf.iter().map(|z| z.im).collect());
            }
            [a] => {
                buf.copy_from_slice(a);
                inverse(grid, &mut buf);
                out.push(buf.iter().map(|z| z.re).collect());
            }
            _ => unreachable!(),
        }
    }
    out
}

/// Analyse several real sample arrays to their (Hermitian) spectra.
pub fn from_real(grid: Grid, samples: &[&[f64]]) -> Vec<Vec<Complex64>> {
    let len = grid.len();
    let mut out = Vec::with_capacity(samples.len());
    let mut buf = vec![Complex64::default(); len];
    for pair in samples.chunks(2) {
        match pair {
            [a, b] => {
                for ((z, &x), &y) in buf.iter_mut().zip(a.iter()).zip(b.iter()) {
                    *z = Complex64::new(x, y);
                }
                forward(grid, &mut buf);
                let mut fa = vec![Complex64::default(); len];
                let mut fb = vec![Complex64::default(); len];
                for flat in 0..len {
                    let z = buf[flat];
                    let zc = buf[grid.negated(flat)].conj();
                    fa[flat] = (z + zc) * 0.5;
                    // (z - zc) / (2i)
                    let d = (z - zc) * 0.5;
                    fb[flat] = Complex64::new(d.im, -d.re);
                }
                out.push(fa);
                out.push(fb);
            }
            [a] => {
                for (z, &x) in buf.iter_mut().zip(a.iter()) {
                    *z = Complex64::new(x, 0.0);
                }
                forward(grid, &mut buf);
                out.push(buf.clone());
            }
            _ => unreachable!(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_synthesis() {
        let g = Grid::new(2, 8).unwrap();
        let mut c = vec![Complex64::default(); g.len()];
        // cos(x_0) = (e^{ix} + e^{-ix}) / 2
        c[g.flat_index([1, 0, 0]).unwrap()] = Complex64::new(0.5, 0.0);
        c[g.flat_index([-1, 0, 0]).unwrap()] = Complex64::new(0.5, 0.0);
        // sin(2 x_1) = (e^{2iy} - e^{-2iy}) / 2i
        let mut s = vec![Complex64::default(); g.len()];
        s[g.flat_index([0, 2, 0]).unwrap()] = Complex64::new(0.0, -0.5);
        s[g.flat_index([0, -2, 0]).unwrap()] = Complex64::new(0.0, 0.5);
        let real = to_real(g, &[&c, &s]);
        for flat in 0..g.len() {
            let x = g.position(flat);
            assert!((real[0][flat] - x[0].cos()).abs() < 1e-14);
            assert!((real[1][flat] - (2.0 * x[1]).sin()).abs() < 1e-14);
        }
        let back = from_real(g, &[&real[0], &real[1]]);
        for flat in 0..g.len() {
            assert!((back[0][flat] - c[flat]).norm() < 1e-15);
            assert!((back[1][flat] - s[flat]).norm() < 1e-15);
        }
    }

    #[test]
    fn three_d_round_trip() {
        let g = Grid::new(3, 8).unwrap();
        let orig: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        inverse(g, &mut data);
        forward(g, &mut data);
        for (a, b) in data.iter().zip(orig.iter()) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
