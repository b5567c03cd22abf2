//! Periodic box of side 2π sampled on `N^n` points.

use crate::error::{LansError, Result};

/// Uniform periodic grid with `points` samples per axis in `dim` dimensions.
///
/// Storage is row-major over the index tuple with axis 0 slowest. The
/// wavenumber at index `i` along an axis is `i` for `i < N/2` and `i - N`
/// otherwise, so each component lies in `[-N/2, N/2 - 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    dim: usize,
    points: usize,
}

impl Grid {
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(LansError::InvalidGrid(format!("dimension {dim} not in {{2,3}}")));
        }
        if points < 8 || points % 2 != 0 {
            return Err(LansError::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {points}"
            )));
        }
        Ok(Self { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn box_length(&self) -> f64 {
        std::f64::consts::TAU
    }

    /// Total number of modes (equal to the number of physical samples).
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Signed wavenumber for a storage index along one axis.
    #[inline]
    pub fn wavenumber(&self, index: usize) -> i64 {
        let n = self.points as i64;
        let i = index as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Storage index along one axis for a signed wavenumber, if representable.
    #[inline]
    pub fn axis_index(&self, k: i64) -> Option<usize> {
        let n = self.points as i64;
        if k < -n / 2 || k >= n / 2 {
            return None;
        }
        Some(k.rem_euclid(n) as usize)
    }

    /// Most negative representable wavenumber, `-N/2`.
    pub fn nyquist(&self) -> i64 {
        -(self.points as i64) / 2
    }

    /// Wavenumber vector of a flat index; unused trailing axes are zero.
    #[inline]
    pub fn mode(&self, flat: usize) -> [i64; 3] {
        let n = self.points;
        let mut out = [0i64; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = self.wavenumber(rest % n);
            rest /= n;
        }
        out
    }

    /// Flat index of a wavenumber vector, if representable.
    pub fn flat_index(&self, k: [i64; 3]) -> Option<usize> {
        let mut flat = 0usize;
        for &kc in k.iter().take(self.dim) {
            flat = flat * self.points + self.axis_index(kc)?;
        }
        if k.iter().skip(self.dim).any(|&kc| kc != 0) {
            return None;
        }
        Some(flat)
    }

    /// Flat index of the wavenumber `-k` (modulo the lattice period).
    #[inline]
    pub fn negated(&self, flat: usize) -> usize {
        let n = self.points;
        let mut out = 0usize;
        let mut stride = 1usize;
        let mut rest = flat;
        for _ in 0..self.dim {
            let i = rest % n;
            rest /= n;
            out += ((n - i) % n) * stride;
            stride *= n;
        }
        out
    }

    /// True when any component sits at the unpaired `-N/2` wavenumber.
    #[inline]
    pub fn has_nyquist(&self, k: [i64; 3]) -> bool {
        let ny = self.nyquist();
        k.iter().take(self.dim).any(|&kc| kc == ny)
    }

    /// Iterate over all modes as `(flat index, wavenumber vector)` in storage order.
    pub fn modes(&self) -> Modes {
        Modes { grid: *self, next: 0, len: self.len() }
    }

    /// Physical coordinate of sample `flat`; entries past `dim` are zero.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let h = self.box_length() / self.points as f64;
        let n = self.points;
        let mut out = [0.0; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = (rest % n) as f64 * h;
            rest /= n;
        }
        out
    }
}

/// Iterator over the modes of a [`Grid`].
pub struct Modes {
    grid: Grid,
    next: usize,
    len: usize,
}

impl Iterator for Modes {
    type Item = (usize, [i64; 3]);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.len {
            return None;
        }
        let flat = self.next;
        self.next += 1;
        Some((flat, self.grid.mode(flat)))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.len - self.next;
        (r, Some(r))
    }
}

impl ExactSizeIterator for Modes {}

/// Squared magnitude of an integer wavenumber.
#[inline]
pub fn k_squared(k: [i64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
}
