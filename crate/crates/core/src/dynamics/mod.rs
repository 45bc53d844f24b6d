//! Free evolution, conservation diagnostics and symmetry checks.
//!
//! Evolution is exact per Fourier mode: `Ψ̂(k, t) = V e^{-iΛt} V† Ψ̂(k, 0)`
//! with `H(k) = V Λ V†` from a dense Hermitian eigensolve.

mod checks;
mod diagnostics;

pub use checks::{
    angular_momentum_commutator, apply_angular_momentum, gaussian_packet, kgf_residual,
    longitudinal_frequency, longitudinal_mode, time_reversal_swap_check, KgfResidual,
};
pub use diagnostics::{
    continuity_residual, current_cross_form, current_form_deviation, current_matrix_form,
    density, density_balance, diagnostics, diagnostics_with_continuity, DiagnosticsRecord,
};

use nalgebra::{Matrix6, Vector6};
use rayon::prelude::*;

use crate::fields::{cross_real, Grid, WaveField, C64, I, ZERO};

/// `H(k)ψ` for one mode: upper `k × v + m u`, lower `-k × u - m v`.
#[inline]
pub fn apply_symbol(k: [f64; 3], m: f64, psi: [C64; 6]) -> [C64; 6] {
    let u = [psi[0], psi[1], psi[2]];
    let v = [psi[3], psi[4], psi[5]];
    let kv = cross_real(k, v);
    let ku = cross_real(k, u);
    [
        kv[0] + u[0] * m,
        kv[1] + u[1] * m,
        kv[2] + u[2] * m,
        -ku[0] - v[0] * m,
        -ku[1] - v[1] * m,
        -ku[2] - v[2] * m,
    ]
}

pub fn symbol_matrix(k: [f64; 3], m: f64) -> Matrix6<C64> {
    let mut h = Matrix6::from_element(ZERO);
    for j in 0..6 {
        let mut e = [ZERO; 6];
        e[j] = C64::new(1.0, 0.0);
        let col = apply_symbol(k, m, e);
        for i in 0..6 {
            h[(i, j)] = col[i];
        }
    }
    h
}

/// Free Hamiltonian `a·p + m b` applied spectrally.
pub fn apply_free_hamiltonian(psi: &WaveField) -> WaveField {
    let g = psi.grid;
    let m = psi.mass;
    let spec = psi.to_spectral();
    let out = crate::fields::map_wave_modes(&g, &spec, |i, x| apply_symbol(g.derivative_wavevector(i), m, x));
    WaveField::from_spectral(g, m, out)
}

/// `⟨Ψ|H|Ψ⟩` with `Ψ = (u, v)/√2`, evaluated in Fourier space.
pub fn energy(psi: &WaveField) -> f64 {
    let g = psi.grid;
    let n = g.len();
    let spec = psi.to_spectral();
    // Collected before summing so the result does not depend on the thread count.
    let per_mode: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x: [C64; 6] = std::array::from_fn(|c| spec[c * n + i]);
            let hx = apply_symbol(g.derivative_wavevector(i), psi.mass, x);
            x.iter().zip(&hx).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
        })
        .collect();
    let s: f64 = per_mode.iter().sum();
    0.5 * s * g.cell_volume() / n as f64
}

/// Largest `|ω|` the grid can carry: `√(k_max² + m²)`.
pub fn omega_max(grid: &Grid, m: f64) -> f64 {
    (grid.k_max().powi(2) + m * m).sqrt()
}

/// Per-mode eigendecompositions of `H(k)` cached for repeated evolution.
pub struct FreePropagator {
    grid: Grid,
    mass: f64,
    modes: Vec<(Vector6<f64>, Matrix6<C64>)>,
}

impl FreePropagator {
    pub fn new(grid: Grid, mass: f64) -> Self {
        let modes = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let eig = symbol_matrix(grid.derivative_wavevector(i), mass).symmetric_eigen();
                (eig.eigenvalues, eig.eigenvectors)
            })
            .collect();
        Self { grid, mass, modes }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Eigenvalues of `H(k)` for the mode at flat index `i`.
    pub fn eigenvalues(&self, i: usize) -> [f64; 6] {
        std::array::from_fn(|j| self.modes[i].0[j])
    }

    pub fn evolve(&self, psi: &WaveField, t: f64) -> WaveField {
        assert_eq!(psi.grid, self.grid, "propagator built for another grid");
        if t == 0.0 {
            return psi.clone();
        }
        let spec = psi.to_spectral();
        let out = crate::fields::map_wave_modes(&self.grid, &spec, |i, x| {
            let (vals, vecs) = &self.modes[i];
            let x = Vector6::from_column_slice(&x);
            let mut c = vecs.ad_mul(&x);
            for j in 0..6 {
                c[j] *= (-I * vals[j] * t).exp();
            }
            let y = vecs * c;
            std::array::from_fn(|j| y[j])
        });
        WaveField::from_spectral(self.grid, psi.mass, out)
    }

    /// Keep only the components along eigenvectors of `H(k)` with positive
    /// eigenvalue.
    pub fn positive_energy_part(&self, psi: &WaveField) -> WaveField {
        let spec = psi.to_spectral();
        let out = crate::fields::map_wave_modes(&self.grid, &spec, |i, x| {
            let (vals, vecs) = &self.modes[i];
            let mut c = vecs.ad_mul(&Vector6::from_column_slice(&x));
            for j in 0..6 {
                if vals[j] <= 0.0 {
                    c[j] = ZERO;
                }
            }
            let y = vecs * c;
            std::array::from_fn(|j| y[j])
        });
        WaveField::from_spectral(self.grid, psi.mass, out)
    }
}

/// `Ψ(t) = e^{-iHt} Ψ(0)`, exact in time.
pub fn evolve_free(psi: &WaveField, t: f64) -> WaveField {
    FreePropagator::new(psi.grid, psi.mass).evolve(psi, t)
}
