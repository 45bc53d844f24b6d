//! Periodic-box fields and spectral differential operators.
//!
//! Vector fields are stored component-major (`[f_x | f_y | f_z]`, each block
//! x-index fastest) so every component is one contiguous FFT block. Spectral
//! first derivatives use `i k` with Nyquist components set to zero, which keeps
//! `p = -i∇` Hermitian on the grid.

mod fft;
mod grid;
mod random;

pub use fft::Transform;
pub use grid::Grid;
pub use random::{random_scalar_field, random_vector_field, random_wave_field, BandLimit};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn cross(a: [C64; 3], b: [C64; 3]) -> [C64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn cross_real(k: [f64; 3], b: [C64; 3]) -> [C64; 3] {
    [
        b[2] * k[1] - b[1] * k[2],
        b[0] * k[2] - b[2] * k[0],
        b[1] * k[0] - b[0] * k[1],
    ]
}

#[inline]
pub fn dot_real(k: [f64; 3], b: [C64; 3]) -> C64 {
    b[0] * k[0] + b[1] * k[1] + b[2] * k[2]
}

#[inline]
pub fn norm_sqr3(a: [C64; 3]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

fn check_same(a: &Grid, b: &Grid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!("{a:?} vs {b:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub data: Vec<C64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            data: vec![ZERO; grid.len()],
            grid,
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> C64) -> Self {
        let data = (0..grid.len()).map(|i| f(grid.position(i))).collect();
        Self { grid, data }
    }

    pub fn to_spectral(&self) -> Vec<C64> {
        let mut d = self.data.clone();
        Transform::for_grid(&self.grid).forward(&mut d);
        d
    }

    pub fn from_spectral(grid: Grid, mut spec: Vec<C64>) -> Self {
        Transform::for_grid(&grid).inverse(&mut spec);
        Self { grid, data: spec }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Grid L2 norm `sqrt(dV Σ|f|²)`.
    pub fn norm_l2(&self) -> f64 {
        (self.grid.cell_volume() * self.data.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn gradient(&self) -> VectorField {
        gradient(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: Grid,
    pub data: Vec<C64>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            data: vec![ZERO; 3 * grid.len()],
            grid,
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [C64; 3]) -> Self {
        let n = grid.len();
        let mut data = vec![ZERO; 3 * n];
        for i in 0..n {
            let v = f(grid.position(i));
            for c in 0..3 {
                data[c * n + i] = v[c];
            }
        }
        Self { grid, data }
    }

    pub fn from_components(grid: Grid, comps: [Vec<C64>; 3]) -> Result<Self> {
        let n = grid.len();
        if comps.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidArgument("component length mismatch".into()));
        }
        let mut data = Vec::with_capacity(3 * n);
        for c in comps {
            data.extend(c);
        }
        Ok(Self { grid, data })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn component(&self, c: usize) -> &[C64] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [C64] {
        let n = self.grid.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [C64; 3] {
        let n = self.grid.len();
        [self.data[idx], self.data[n + idx], self.data[2 * n + idx]]
    }

    #[inline]
    pub fn set(&mut self, idx: usize, v: [C64; 3]) {
        let n = self.grid.len();
        self.data[idx] = v[0];
        self.data[n + idx] = v[1];
        self.data[2 * n + idx] = v[2];
    }

    pub fn to_spectral(&self) -> Vec<C64> {
        let mut d = self.data.clone();
        Transform::for_grid(&self.grid).forward_blocks(&mut d);
        d
    }

    pub fn from_spectral(grid: Grid, mut spec: Vec<C64>) -> Self {
        Transform::for_grid(&grid).inverse_blocks(&mut spec);
        Self { grid, data: spec }
    }

    /// Apply `f(mode index, amplitude) -> amplitude` to every Fourier mode.
    pub fn map_modes(&self, f: impl Fn(usize, [C64; 3]) -> [C64; 3] + Sync) -> VectorField {
        let spec = self.to_spectral();
        let out = map_vector_modes(&self.grid, &spec, f);
        VectorField::from_spectral(self.grid, out)
    }

    pub fn norm_l2(&self) -> f64 {
        (self.grid.cell_volume() * self.data.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Pointwise maximum of `|f(x)|` (vector modulus).
    pub fn max_abs(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| norm_sqr3(self.at(i)).sqrt())
            .fold(0.0, f64::max)
    }

    /// `<self, other> = dV Σ conj(self)·other`.
    pub fn inner(&self, other: &VectorField) -> C64 {
        let s: C64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.grid.cell_volume()
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    /// `self + alpha·other`.
    pub fn axpy(&self, alpha: C64, other: &VectorField) -> VectorField {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + alpha * b)
            .collect();
        VectorField {
            grid: self.grid,
            data,
        }
    }

    pub fn scaled(&self, alpha: C64) -> VectorField {
        VectorField {
            grid: self.grid,
            data: self.data.iter().map(|a| a * alpha).collect(),
        }
    }

    /// Pointwise `self × other`.
    pub fn cross(&self, other: &VectorField) -> VectorField {
        let n = self.grid.len();
        let mut out = VectorField::zeros(self.grid);
        for i in 0..n {
            out.set(i, cross(self.at(i), other.at(i)));
        }
        out
    }

    /// Pointwise multiplication by a scalar field.
    pub fn mul_scalar_field(&self, s: &[C64]) -> VectorField {
        let n = self.grid.len();
        let mut data = self.data.clone();
        for c in 0..3 {
            for i in 0..n {
                data[c * n + i] *= s[i];
            }
        }
        VectorField {
            grid: self.grid,
            data,
        }
    }
}

/// Six-component wave function `Ψ = (u, v)/√2` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Grid,
    pub u: VectorField,
    pub v: VectorField,
    pub mass: f64,
}

impl WaveField {
    pub fn new(u: VectorField, v: VectorField, mass: f64) -> Result<Self> {
        check_same(&u.grid, &v.grid)?;
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be >= 0, got {mass}")));
        }
        Ok(Self {
            grid: u.grid,
            u,
            v,
            mass,
        })
    }

    pub fn zeros(grid: Grid, mass: f64) -> Self {
        Self {
            grid,
            u: VectorField::zeros(grid),
            v: VectorField::zeros(grid),
            mass,
        }
    }

    /// Component `c` of `(u_x, u_y, u_z, v_x, v_y, v_z)`.
    pub fn component(&self, c: usize) -> &[C64] {
        if c < 3 {
            self.u.component(c)
        } else {
            self.v.component(c - 3)
        }
    }

    /// The six raw values `(u, v)` at a grid point (without the `1/√2`).
    pub fn uv_at(&self, idx: usize) -> [C64; 6] {
        let u = self.u.at(idx);
        let v = self.v.at(idx);
        [u[0], u[1], u[2], v[0], v[1], v[2]]
    }

    /// Spectral amplitudes of all six components, component-major.
    pub fn to_spectral(&self) -> Vec<C64> {
        let n = self.grid.len();
        let mut d = Vec::with_capacity(6 * n);
        d.extend_from_slice(&self.u.data);
        d.extend_from_slice(&self.v.data);
        Transform::for_grid(&self.grid).forward_blocks(&mut d);
        d
    }

    pub fn from_spectral(grid: Grid, mass: f64, mut spec: Vec<C64>) -> Self {
        Transform::for_grid(&grid).inverse_blocks(&mut spec);
        Self::from_flat(grid, mass, spec)
    }

    /// Build from the flat `(u_x,u_y,u_z,v_x,v_y,v_z)` component-major layout.
    pub fn from_flat(grid: Grid, mass: f64, mut flat: Vec<C64>) -> Self {
        let n = grid.len();
        assert_eq!(flat.len(), 6 * n);
        let v = flat.split_off(3 * n);
        Self {
            grid,
            u: VectorField { grid, data: flat },
            v: VectorField { grid, data: v },
            mass,
        }
    }

    pub fn to_flat(&self) -> Vec<C64> {
        let mut d = self.u.data.clone();
        d.extend_from_slice(&self.v.data);
        d
    }

    /// `‖Ψ‖ = sqrt(½(‖u‖² + ‖v‖²))`.
    pub fn norm(&self) -> f64 {
        (0.5 * (self.u.norm_l2().powi(2) + self.v.norm_l2().powi(2))).sqrt()
    }

    /// `<self|other>` with the `1/√2` normalization of Ψ.
    pub fn inner(&self, other: &WaveField) -> C64 {
        (self.u.inner(&other.u) + self.v.inner(&other.v)) * 0.5
    }

    /// Exchange the u and v blocks (`σ₁ ⊗ I`).
    pub fn swapped(&self) -> WaveField {
        WaveField {
            grid: self.grid,
            u: self.v.clone(),
            v: self.u.clone(),
            mass: self.mass,
        }
    }

    pub fn axpy(&self, alpha: C64, other: &WaveField) -> WaveField {
        WaveField {
            grid: self.grid,
            u: self.u.axpy(alpha, &other.u),
            v: self.v.axpy(alpha, &other.v),
            mass: self.mass,
        }
    }

    pub fn sub(&self, other: &WaveField) -> WaveField {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    pub fn scaled(&self, alpha: C64) -> WaveField {
        WaveField {
            grid: self.grid,
            u: self.u.scaled(alpha),
            v: self.v.scaled(alpha),
            mass: self.mass,
        }
    }

    /// `‖self - other‖ / ‖self‖` (zero when both vanish).
    pub fn relative_distance(&self, other: &WaveField) -> f64 {
        let d = self.sub(other).norm();
        let s = self.norm();
        if d == 0.0 {
            0.0
        } else {
            d / s
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.data.iter().chain(&self.v.data).all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Per-mode map over component-major spectral data of a vector field.
pub fn map_vector_modes(
    grid: &Grid,
    spec: &[C64],
    f: impl Fn(usize, [C64; 3]) -> [C64; 3] + Sync,
) -> Vec<C64> {
    let n = grid.len();
    let per_mode: Vec<[C64; 3]> = (0..n)
        .into_par_iter()
        .map(|i| f(i, [spec[i], spec[n + i], spec[2 * n + i]]))
        .collect();
    let mut out = vec![ZERO; 3 * n];
    for (i, v) in per_mode.into_iter().enumerate() {
        out[i] = v[0];
        out[n + i] = v[1];
        out[2 * n + i] = v[2];
    }
    out
}

/// Per-mode map over six-component spectral data.
pub fn map_wave_modes(
    grid: &Grid,
    spec: &[C64],
    f: impl Fn(usize, [C64; 6]) -> [C64; 6] + Sync,
) -> Vec<C64> {
    let n = grid.len();
    let per_mode: Vec<[C64; 6]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut x = [ZERO; 6];
            for c in 0..6 {
                x[c] = spec[c * n + i];
            }
            f(i, x)
        })
        .collect();
    let mut out = vec![ZERO; 6 * n];
    for (i, v) in per_mode.into_iter().enumerate() {
        for c in 0..6 {
            out[c * n + i] = v[c];
        }
    }
    out
}

/// Spectral curl: `i k × f̂` per mode.
pub fn curl(f: &VectorField) -> VectorField {
    let g = f.grid;
    f.map_modes(|i, a| {
        let k = g.derivative_wavevector(i);
        cross_real(k, a).map(|z| z * I)
    })
}

/// Spectral divergence: `i k · f̂` per mode.
pub fn divergence(f: &VectorField) -> ScalarField {
    let g = f.grid;
    let spec = f.to_spectral();
    let n = g.len();
    let out: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let k = g.derivative_wavevector(i);
            I * dot_real(k, [spec[i], spec[n + i], spec[2 * n + i]])
        })
        .collect();
    ScalarField::from_spectral(g, out)
}

/// Spectral gradient: `i k ŝ` per mode.
pub fn gradient(s: &ScalarField) -> VectorField {
    let g = s.grid;
    let spec = s.to_spectral();
    let n = g.len();
    let mut out = vec![ZERO; 3 * n];
    for i in 0..n {
        let k = g.derivative_wavevector(i);
        for c in 0..3 {
            out[c * n + i] = I * k[c] * spec[i];
        }
    }
    VectorField::from_spectral(g, out)
}

/// Componentwise Laplacian `-|k|² f̂`, with the same wavevector as the first
/// derivatives so that `Δ = div grad` holds exactly.
pub fn laplacian(f: &VectorField) -> VectorField {
    let g = f.grid;
    f.map_modes(|i, a| {
        let k = g.derivative_wavevector(i);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        a.map(|z| -z * k2)
    })
}

/// Remove the longitudinal part of every `k ≠ 0` mode:
/// `f̂ ← f̂ - k (k·f̂)/|k|²`. The `k = 0` mode is left untouched.
pub fn project_transverse(f: &VectorField) -> VectorField {
    let g = f.grid;
    f.map_modes(|i, a| transverse_part(g.derivative_wavevector(i), a))
}

#[inline]
pub fn transverse_part(k: [f64; 3], a: [C64; 3]) -> [C64; 3] {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if k2 == 0.0 {
        return a;
    }
    let kd = dot_real(k, a) / k2;
    [a[0] - kd * k[0], a[1] - kd * k[1], a[2] - kd * k[2]]
}

/// Project both blocks of a wave function onto `div u = div v = 0`.
pub fn project_wave_transverse(psi: &WaveField) -> WaveField {
    WaveField {
        grid: psi.grid,
        u: project_transverse(&psi.u),
        v: project_transverse(&psi.v),
        mass: psi.mass,
    }
}

/// Spectral L2 norm `sqrt(dV/N Σ|f̂|²)` matching the grid norm by Parseval.
pub fn spectral_norm(grid: &Grid, spec: &[C64]) -> f64 {
    let n = grid.len() as f64;
    (grid.cell_volume() / n * spec.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn grid() -> Grid {
        Grid::new([8, 8, 16], [TAU, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn curl_of_plane_wave() {
        let g = grid();
        let kz = TAU / g.lz * 2.0;
        let f = VectorField::from_fn(g, |x| {
            let ph = C64::from_polar(1.0, kz * x[2]);
            [ph, ZERO, ZERO]
        });
        let c = curl(&f);
        for i in 0..g.len() {
            let x = g.position(i);
            let ph = C64::from_polar(1.0, kz * x[2]);
            let expect = [ZERO, I * kz * ph, ZERO];
            let got = c.at(i);
            for d in 0..3 {
                assert!((got[d] - expect[d]).norm() < 1e-12, "{got:?} {expect:?}");
            }
        }
    }

    #[test]
    fn constant_field_has_zero_derivatives() {
        let g = grid();
        let f = VectorField::from_fn(g, |_| [C64::new(1.0, 2.0), C64::new(-3.0, 0.5), I]);
        assert!(curl(&f).max_abs() < 1e-13);
        assert!(divergence(&f).max_abs() < 1e-13);
        assert_eq!(project_transverse(&f).sub(&f).max_abs(), 0.0);
    }

    #[test]
    fn divergence_of_plane_waves() {
        let g = grid();
        let k = [TAU / g.lx, 0.0, 0.0];
        let kn = k[0];
        let transverse = VectorField::from_fn(g, |x| {
            let ph = C64::from_polar(1.0, k[0] * x[0]);
            [ZERO, ph, ph * 2.0]
        });
        assert!(divergence(&transverse).max_abs() < 1e-12);
        let longitudinal = VectorField::from_fn(g, |x| [C64::from_polar(1.0, k[0] * x[0]), ZERO, ZERO]);
        let d = divergence(&longitudinal);
        for i in 0..g.len() {
            let x = g.position(i);
            let expect = I * kn * C64::from_polar(1.0, k[0] * x[0]);
            assert!((d.data[i] - expect).norm() < 1e-12);
        }
        assert!(project_transverse(&longitudinal).max_abs() < 1e-13);
        let t = project_transverse(&transverse);
        assert!(t.sub(&transverse).max_abs() < 1e-13);
    }
}
