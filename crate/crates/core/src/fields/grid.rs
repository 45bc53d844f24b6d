use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic box sampled on an `nx × ny × nz` grid, x-index fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
}

impl Grid {
    /// Each axis needs an even sample count of at least 4 and a positive length.
    pub fn new(n: [usize; 3], l: [f64; 3]) -> Result<Self> {
        for (axis, (&count, &len)) in n.iter().zip(&l).enumerate() {
            if count < 4 || count % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: sample count {count} must be even and >= 4"
                )));
            }
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: box length {len} must be positive"
                )));
            }
        }
        Ok(Self {
            nx: n[0],
            ny: n[1],
            nz: n[2],
            lx: l[0],
            ly: l[1],
            lz: l[2],
        })
    }

    pub fn cubic(n: usize, l: f64) -> Result<Self> {
        Self::new([n; 3], [l; 3])
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn lengths(&self) -> [f64; 3] {
        [self.lx, self.ly, self.lz]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.nx * (iy + self.ny * iz)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let ix = idx % self.nx;
        let iy = (idx / self.nx) % self.ny;
        let iz = idx / (self.nx * self.ny);
        [ix, iy, iz]
    }

    pub fn spacing(&self) -> [f64; 3] {
        [
            self.lx / self.nx as f64,
            self.ly / self.ny as f64,
            self.lz / self.nz as f64,
        ]
    }

    pub fn cell_volume(&self) -> f64 {
        let h = self.spacing();
        h[0] * h[1] * h[2]
    }

    /// Sample position `x_i = i·L/n`.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let i = self.unravel(idx);
        let h = self.spacing();
        [i[0] as f64 * h[0], i[1] as f64 * h[1], i[2] as f64 * h[2]]
    }

    /// Signed FFT integer for sample `i` on an axis of `n` points:
    /// `0, 1, …, n/2 - 1, -n/2, …, -1`.
    #[inline]
    pub fn mode_number(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn mode_numbers(&self, idx: usize) -> [i64; 3] {
        let i = self.unravel(idx);
        let n = self.shape();
        [
            Self::mode_number(i[0], n[0]),
            Self::mode_number(i[1], n[1]),
            Self::mode_number(i[2], n[2]),
        ]
    }

    /// Full wavevector `2π n / L` including the Nyquist component.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.mode_numbers(idx);
        let l = self.lengths();
        [
            TAU * m[0] as f64 / l[0],
            TAU * m[1] as f64 / l[1],
            TAU * m[2] as f64 / l[2],
        ]
    }

    /// Wavevector used by first-derivative operators: Nyquist components are zero.
    pub fn derivative_wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.mode_numbers(idx);
        let n = self.shape();
        let l = self.lengths();
        let mut k = [0.0; 3];
        for d in 0..3 {
            if m[d] != -(n[d] as i64) / 2 {
                k[d] = TAU * m[d] as f64 / l[d];
            }
        }
        k
    }

    pub fn touches_nyquist(&self, idx: usize) -> bool {
        let m = self.mode_numbers(idx);
        let n = self.shape();
        (0..3).any(|d| m[d] == -(n[d] as i64) / 2)
    }

    /// Inside the 2/3-rule band `|n_d| <= N_d/3` on every axis.
    pub fn in_dealiased_band(&self, idx: usize) -> bool {
        let m = self.mode_numbers(idx);
        let n = self.shape();
        (0..3).all(|d| 3 * m[d].unsigned_abs() as usize <= n[d])
    }

    /// Largest `|k|` reachable by the derivative operators.
    pub fn k_max(&self) -> f64 {
        let l = self.lengths();
        let n = self.shape();
        (0..3)
            .map(|d| {
                let k = TAU * (n[d] / 2 - 1) as f64 / l[d];
                k * k
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Smallest nonzero wavenumber over the axes.
    pub fn k_min(&self) -> f64 {
        let l = self.lengths();
        TAU / l.iter().cloned().fold(0.0, f64::max)
    }

    /// Periodic sawtooth coordinate centered on the box midpoint, in `[-L/2, L/2)`.
    pub fn centered_position(&self, idx: usize) -> [f64; 3] {
        let x = self.position(idx);
        let l = self.lengths();
        [x[0] - l[0] / 2.0, x[1] - l[1] / 2.0, x[2] - l[2] / 2.0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_or_small_axes() {
        assert!(Grid::new([4, 6, 8], [1.0; 3]).is_ok());
        assert!(Grid::new([5, 6, 8], [1.0; 3]).is_err());
        assert!(Grid::new([2, 6, 8], [1.0; 3]).is_err());
        assert!(Grid::new([4, 4, 4], [1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn mode_numbers_and_nyquist() {
        let g = Grid::new([8, 4, 4], [TAU; 3]).unwrap();
        let ms: Vec<i64> = (0..8).map(|i| Grid::mode_number(i, 8)).collect();
        assert_eq!(ms, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        let idx = g.index(4, 1, 0);
        assert!(g.touches_nyquist(idx));
        assert_eq!(g.derivative_wavevector(idx), [0.0, 1.0, 0.0]);
        assert_eq!(g.wavevector(idx), [-4.0, 1.0, 0.0]);
        assert_eq!(g.unravel(g.index(3, 2, 1)), [3, 2, 1]);
    }
}
