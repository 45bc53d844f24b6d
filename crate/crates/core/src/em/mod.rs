//! Minimal coupling to a static external potential `(Φ, A)`.
//!
//! `π = p - eA` with `p = -i∇` spectral and `A` multiplied pointwise. The
//! potential is filtered to the 2/3 band on construction; products are then
//! formed at the collocation points, which keeps every multiplication operator
//! Hermitian and mutually commuting on the grid.

mod evolve;
pub mod landau;

pub use evolve::{
    em_continuity_residual, em_diagnostics, em_energy, evolve_em, gauge_covariance_check, rk4_step,
    second_order_rhs, second_order_residual, stability_bound, EmTrajectory,
};
pub use landau::{landau_spectrum, LandauAnalysis, LandauCluster, LandauConfig, LandauLevelCheck};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{
    cross, random_wave_field, BandLimit, Grid, ScalarField, Transform, VectorField, WaveField, C64, I, ZERO,
};
use crate::report::ResidualReport;

/// `c·cos(2π n·x/L) + s·sin(2π n·x/L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub n: [i64; 3],
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VectorSeries {
    #[serde(default)]
    pub x: Vec<FourierTerm>,
    #[serde(default)]
    pub y: Vec<FourierTerm>,
    #[serde(default)]
    pub z: Vec<FourierTerm>,
}

/// Static potential as a finite real Fourier series.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(default)]
    pub phi: Vec<FourierTerm>,
    #[serde(default)]
    pub a: VectorSeries,
}

fn eval_series(grid: &Grid, terms: &[FourierTerm]) -> Vec<f64> {
    let l = grid.lengths();
    (0..grid.len())
        .map(|i| {
            let x = grid.position(i);
            terms
                .iter()
                .map(|t| {
                    let arg: f64 = (0..3).map(|d| std::f64::consts::TAU * t.n[d] as f64 * x[d] / l[d]).sum();
                    t.cos * arg.cos() + t.sin * arg.sin()
                })
                .sum()
        })
        .collect()
}

/// Zero every Fourier mode outside the 2/3 band.
pub fn dealias(grid: &Grid, f: &[f64]) -> Vec<f64> {
    let t = Transform::for_grid(grid);
    let mut s: Vec<C64> = f.iter().map(|&x| C64::new(x, 0.0)).collect();
    t.forward(&mut s);
    for (i, z) in s.iter_mut().enumerate() {
        if !grid.in_dealiased_band(i) || grid.touches_nyquist(i) {
            *z = ZERO;
        }
    }
    t.inverse(&mut s);
    s.iter().map(|z| z.re).collect()
}

fn real_to_complex(f: &[f64]) -> Vec<C64> {
    f.iter().map(|&x| C64::new(x, 0.0)).collect()
}

fn grad_real(grid: &Grid, f: &[f64]) -> [Vec<f64>; 3] {
    let g = ScalarField {
        grid: *grid,
        data: real_to_complex(f),
    }
    .gradient();
    std::array::from_fn(|d| g.component(d).iter().map(|z| z.re).collect())
}

/// Static external field with charge `e`; `E = -∇Φ`, `H = curl A`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalField {
    pub grid: Grid,
    pub charge: f64,
    pub phi: Vec<f64>,
    pub avec: [Vec<f64>; 3],
    pub evec: [Vec<f64>; 3],
    pub hvec: [Vec<f64>; 3],
}

impl ExternalField {
    /// Potentials are filtered to the 2/3 band before use.
    pub fn new(grid: Grid, charge: f64, phi: Vec<f64>, avec: [Vec<f64>; 3]) -> Result<Self> {
        let n = grid.len();
        if phi.len() != n || avec.iter().any(|a| a.len() != n) {
            return Err(Error::GridMismatch("potential samples do not match grid".into()));
        }
        if !charge.is_finite() || phi.iter().chain(avec.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite potential".into()));
        }
        let phi = dealias(&grid, &phi);
        let avec: [Vec<f64>; 3] = std::array::from_fn(|d| dealias(&grid, &avec[d]));
        let gp = grad_real(&grid, &phi);
        let evec = std::array::from_fn(|d| gp[d].iter().map(|x| -x).collect());
        let af = VectorField::from_components(grid, std::array::from_fn(|d| real_to_complex(&avec[d])))?;
        let h = crate::fields::curl(&af);
        let hvec = std::array::from_fn(|d| h.component(d).iter().map(|z| z.re).collect());
        Ok(Self {
            grid,
            charge,
            phi,
            avec,
            evec,
            hvec,
        })
    }

    pub fn from_spec(grid: Grid, charge: f64, spec: &PotentialSpec) -> Result<Self> {
        let phi = eval_series(&grid, &spec.phi);
        let avec = [
            eval_series(&grid, &spec.a.x),
            eval_series(&grid, &spec.a.y),
            eval_series(&grid, &spec.a.z),
        ];
        Self::new(grid, charge, phi, avec)
    }

    pub fn zero(grid: Grid, charge: f64) -> Self {
        let z = vec![0.0; grid.len()];
        Self {
            grid,
            charge,
            phi: z.clone(),
            avec: [z.clone(), z.clone(), z.clone()],
            evec: [z.clone(), z.clone(), z.clone()],
            hvec: [z.clone(), z.clone(), z],
        }
    }

    /// Same field in the gauge `A → A + ∇χ`.
    pub fn gauge_shifted(&self, chi: &[f64]) -> Result<Self> {
        let g = grad_real(&self.grid, chi);
        let avec = std::array::from_fn(|d| self.avec[d].iter().zip(&g[d]).map(|(a, b)| a + b).collect());
        Self::new(self.grid, self.charge, self.phi.clone(), avec)
    }

    #[inline]
    pub fn a_at(&self, i: usize) -> [f64; 3] {
        [self.avec[0][i], self.avec[1][i], self.avec[2][i]]
    }

    pub fn max_abs_a(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                let a = self.a_at(i);
                (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_phi(&self) -> f64 {
        self.phi.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn mean_a_squared(&self) -> f64 {
        let n = self.grid.len() as f64;
        (0..self.grid.len())
            .map(|i| {
                let a = self.a_at(i);
                a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
            })
            .sum::<f64>()
            / n
    }

    fn check_grid(&self, g: &Grid) -> Result<()> {
        if *g == self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("field on {g:?}, potential on {:?}", self.grid)))
        }
    }

    // --- π operators -------------------------------------------------------

    /// `(π_0 f, π_1 f, π_2 f)` for a scalar `f`.
    pub fn pi_scalar(&self, f: &[C64]) -> [Vec<C64>; 3] {
        let g = self.grid;
        let t = Transform::for_grid(&g);
        let mut s = f.to_vec();
        t.forward(&mut s);
        let e = self.charge;
        let out: Vec<Vec<C64>> = (0..3)
            .into_par_iter()
            .map(|d| {
                let mut c: Vec<C64> = s
                    .iter()
                    .enumerate()
                    .map(|(i, z)| z * g.derivative_wavevector(i)[d])
                    .collect();
                t.inverse(&mut c);
                for (i, z) in c.iter_mut().enumerate() {
                    *z -= f[i] * (e * self.avec[d][i]);
                }
                c
            })
            .collect();
        let mut it = out.into_iter();
        std::array::from_fn(|_| it.next().unwrap())
    }

    /// `π·w = Σ_j (p_j - eA_j) w_j`.
    pub fn pi_dot(&self, w: &VectorField) -> Vec<C64> {
        let g = self.grid;
        let n = g.len();
        let mut spec = w.to_spectral();
        for d in 0..3 {
            for i in 0..n {
                spec[d * n + i] *= g.derivative_wavevector(i)[d];
            }
        }
        let mut acc = vec![ZERO; n];
        for d in 0..3 {
            for i in 0..n {
                acc[i] += spec[d * n + i];
            }
        }
        Transform::for_grid(&g).inverse(&mut acc);
        let e = self.charge;
        for (i, z) in acc.iter_mut().enumerate() {
            let a = self.a_at(i);
            let wi = w.at(i);
            *z -= (wi[0] * a[0] + wi[1] * a[1] + wi[2] * a[2]) * e;
        }
        acc
    }

    /// `π × w = -i curl w - e A × w`.
    pub fn pi_cross(&self, w: &VectorField) -> VectorField {
        let mut c = crate::fields::curl(w).scaled(-I);
        let e = self.charge;
        for i in 0..self.grid.len() {
            let a = self.a_at(i).map(|x| C64::new(x, 0.0));
            let ax = cross(a, w.at(i));
            let mut ci = c.at(i);
            for d in 0..3 {
                ci[d] -= ax[d] * e;
            }
            c.set(i, ci);
        }
        c
    }

    /// `π² w = Σ_j π_j π_j w`, componentwise.
    pub fn pi_squared(&self, w: &VectorField) -> VectorField {
        let comps: Vec<Vec<C64>> = (0..3)
            .map(|c| {
                let f = w.component(c);
                let first = self.pi_scalar(f);
                let mut acc = vec![ZERO; f.len()];
                for d in 0..3 {
                    let second = self.pi_scalar(&first[d]);
                    for (a, s) in acc.iter_mut().zip(&second[d]) {
                        *a += s;
                    }
                }
                acc
            })
            .collect();
        let mut it = comps.into_iter();
        VectorField::from_components(self.grid, std::array::from_fn(|_| it.next().unwrap()))
            .expect("component sizes match")
    }

    /// `(Σ·H) w = i H × w` on one block.
    pub fn spin_dot_h(&self, w: &VectorField) -> VectorField {
        let mut out = VectorField::zeros(self.grid);
        for i in 0..self.grid.len() {
            let h = [self.hvec[0][i], self.hvec[1][i], self.hvec[2][i]].map(|x| C64::new(x, 0.0));
            out.set(i, cross(h, w.at(i)).map(|z| I * z));
        }
        out
    }

    /// `(a·E) w` on a six-component field: upper `E × v`, lower `-E × u`.
    pub fn a_dot_e(&self, psi: &WaveField) -> WaveField {
        let mut out = WaveField::zeros(self.grid, psi.mass);
        for i in 0..self.grid.len() {
            let e = [self.evec[0][i], self.evec[1][i], self.evec[2][i]].map(|x| C64::new(x, 0.0));
            out.u.set(i, cross(e, psi.v.at(i)));
            out.v.set(i, cross(e, psi.u.at(i)).map(|z| -z));
        }
        out
    }

    pub fn phi_times(&self, psi: &WaveField) -> WaveField {
        let s = real_to_complex(&self.phi);
        WaveField {
            grid: psi.grid,
            u: psi.u.mul_scalar_field(&s),
            v: psi.v.mul_scalar_field(&s),
            mass: psi.mass,
        }
    }
}

/// `(a·π)Ψ`.
fn apply_a_pi(psi: &WaveField, ext: &ExternalField) -> WaveField {
    let u = ext.pi_cross(&psi.v);
    let v = ext.pi_cross(&psi.u).scaled(C64::new(-1.0, 0.0));
    WaveField {
        grid: psi.grid,
        u,
        v,
        mass: psi.mass,
    }
}

/// `H_A Ψ = (a·(p - eA) + m b) Ψ`.
pub fn apply_hamiltonian_a(psi: &WaveField, ext: &ExternalField) -> Result<WaveField> {
    ext.check_grid(&psi.grid)?;
    let m = psi.mass;
    let mut out = apply_a_pi(psi, ext);
    out.u = out.u.axpy(C64::new(m, 0.0), &psi.u);
    out.v = out.v.axpy(C64::new(-m, 0.0), &psi.v);
    Ok(out)
}

/// `(a·π)Ψ` without the mass term.
pub fn apply_a_dot_pi(psi: &WaveField, ext: &ExternalField) -> Result<WaveField> {
    ext.check_grid(&psi.grid)?;
    Ok(apply_a_pi(psi, ext))
}

/// `(H_A + eΦ) Ψ`, the generator of the coupled evolution.
pub fn apply_generator(psi: &WaveField, ext: &ExternalField) -> Result<WaveField> {
    let h = apply_hamiltonian_a(psi, ext)?;
    Ok(h.axpy(C64::new(ext.charge, 0.0), &ext.phi_times(psi)))
}

/// Iterations and final `max|π·w|` for the two blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub iterations: [usize; 2],
    pub residual: [f64; 2],
    pub tolerance: [f64; 2],
}

pub const PROJECTION_REL_TOL: f64 = 1e-10;
pub const PROJECTION_MAX_ITER: usize = 500;

fn max_abs(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `π·π φ` on scalars.
fn pi_dot_pi(ext: &ExternalField, phi: &[C64]) -> Vec<C64> {
    let p = ext.pi_scalar(phi);
    let w = VectorField::from_components(ext.grid, p).expect("component sizes match");
    ext.pi_dot(&w)
}

/// Spectral preconditioner `1/(|k|² + e²⟨|A|²⟩)`, zero where the denominator is.
fn precondition(ext: &ExternalField, r: &[C64], shift: f64) -> Vec<C64> {
    let g = ext.grid;
    let t = Transform::for_grid(&g);
    let mut s = r.to_vec();
    t.forward(&mut s);
    for (i, z) in s.iter_mut().enumerate() {
        let k = g.derivative_wavevector(i);
        let den = k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + shift;
        *z = if den > 0.0 { *z / den } else { ZERO };
    }
    t.inverse(&mut s);
    s
}

/// Remove the covariant gradient part of `w`: solve `π·π φ = π·w` by
/// preconditioned conjugate gradients and return `w - πφ`.
fn project_block(ext: &ExternalField, w: &VectorField) -> Result<(VectorField, usize, f64, f64)> {
    let g = ext.grid;
    let lmin = g.lengths().iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = PROJECTION_REL_TOL * (std::f64::consts::TAU / lmin) * w.max_abs();
    let b = ext.pi_dot(w);
    if max_abs(&b) <= tol {
        return Ok((w.clone(), 0, max_abs(&b), tol));
    }
    let shift = ext.charge * ext.charge * ext.mean_a_squared();
    let n = g.len();
    let mut x = vec![ZERO; n];
    let mut r = b.clone();
    let mut z = precondition(ext, &r, shift);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut it = 0;
    let mut out = w.clone();
    let mut res = max_abs(&r);
    while it < PROJECTION_MAX_ITER {
        it += 1;
        let ap = pi_dot_pi(ext, &p);
        let pap = dot(&p, &ap);
        if pap.norm() == 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if max_abs(&r) <= tol {
            // Confirm with the true residual of the projected field.
            let grad = ext.pi_scalar(&x);
            out = w.sub(&VectorField::from_components(g, grad)?);
            res = max_abs(&ext.pi_dot(&out));
            if res <= tol {
                return Ok((out, it, res, tol));
            }
            r = b.iter().zip(pi_dot_pi(ext, &x)).map(|(bi, ai)| bi - ai).collect();
        }
        z = precondition(ext, &r, shift);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let _ = out;
    Err(Error::NoConvergence {
        iterations: it,
        residual: res.max(max_abs(&r)),
        tolerance: tol,
    })
}

/// Project both blocks onto `π·u = π·v = 0`.
pub fn covariant_project(psi: &WaveField, ext: &ExternalField) -> Result<(WaveField, ProjectionReport)> {
    ext.check_grid(&psi.grid)?;
    let (u, iu, ru, tu) = project_block(ext, &psi.u)?;
    let (v, iv, rv, tv) = project_block(ext, &psi.v)?;
    Ok((
        WaveField {
            grid: psi.grid,
            u,
            v,
            mass: psi.mass,
        },
        ProjectionReport {
            iterations: [iu, iv],
            residual: [ru, rv],
            tolerance: [tu, tv],
        },
    ))
}

/// `max|π·u|`, `max|π·v|`.
pub fn covariant_residuals(psi: &WaveField, ext: &ExternalField) -> [f64; 2] {
    [max_abs(&ext.pi_dot(&psi.u)), max_abs(&ext.pi_dot(&psi.v))]
}

/// Settings for the seeded identity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSettings {
    pub mass: f64,
    pub trials: usize,
    pub seed: u64,
    /// Spectral cutoff of the random test fields.
    pub k_cutoff: f64,
}

impl Default for TrialSettings {
    fn default() -> Self {
        Self {
            mass: 1.0,
            trials: 10,
            seed: 1,
            k_cutoff: 1.0,
        }
    }
}

fn trial_field(ext: &ExternalField, s: &TrialSettings, t: usize) -> WaveField {
    random_wave_field(ext.grid, s.mass, BandLimit::new(s.k_cutoff, s.seed.wrapping_add(t as u64)), false)
}

fn rel(a: &WaveField, b: &WaveField) -> f64 {
    let d = a.sub(b).norm();
    let s = a.norm().max(b.norm());
    if s > 0.0 {
        d / s
    } else {
        d
    }
}

pub const SQUARED_HAMILTONIAN_TOL: f64 = 1e-12;
pub const SPIN_FIELD_TOL: f64 = 1e-8;
pub const SPIN_FIELD_CONTROL_MIN: f64 = 1e-2;

/// `H_A² = (a·π)² + m²` on unconstrained random fields, plus the control with
/// the mass matrix replaced by the identity, which does not anticommute with `a`.
pub fn squared_hamiltonian_check(ext: &ExternalField, s: &TrialSettings) -> Result<ResidualReport> {
    let mut worst = 0.0f64;
    let mut control = f64::INFINITY;
    for t in 0..s.trials {
        let psi = trial_field(ext, s, t);
        let m = psi.mass;
        let lhs = apply_hamiltonian_a(&apply_hamiltonian_a(&psi, ext)?, ext)?;
        let api = apply_a_pi(&psi, ext);
        let rhs = apply_a_pi(&api, ext).axpy(C64::new(m * m, 0.0), &psi);
        worst = worst.max(rel(&lhs, &rhs));
        // b → I: (a·π + m)² = (a·π)² + 2m(a·π) + m².
        let hp = api.axpy(C64::new(m, 0.0), &psi);
        let lhs_c = apply_a_pi(&hp, ext).axpy(C64::new(m, 0.0), &hp);
        control = control.min(rel(&lhs_c, &rhs));
    }
    let mut rep = ResidualReport::new("square of the coupled Hamiltonian");
    rep.at_most("H_A^2 - (a.pi)^2 - m^2", worst, SQUARED_HAMILTONIAN_TOL);
    if s.mass > 0.0 {
        rep.at_least("control with identity mass matrix", control, SQUARED_HAMILTONIAN_TOL * 1e6);
    }
    Ok(rep)
}

/// `(a·π)²Ψ - π²Ψ + e(Σ·H)Ψ` relative to `‖(a·π)²Ψ‖`.
pub fn spin_field_residual(psi: &WaveField, ext: &ExternalField) -> Result<f64> {
    let lhs = apply_a_dot_pi(&apply_a_dot_pi(psi, ext)?, ext)?;
    let e = C64::new(-ext.charge, 0.0);
    let rhs = WaveField {
        grid: psi.grid,
        u: ext.pi_squared(&psi.u).axpy(e, &ext.spin_dot_h(&psi.u)),
        v: ext.pi_squared(&psi.v).axpy(e, &ext.spin_dot_h(&psi.v)),
        mass: psi.mass,
    };
    Ok(rel(&lhs, &rhs))
}

/// `(a·π)² = π² - e(Σ·H)` must hold on covariantly projected fields and
/// fail on unprojected ones.
pub fn spin_field_check(ext: &ExternalField, s: &TrialSettings) -> Result<ResidualReport> {
    let mut worst = 0.0f64;
    let mut control = f64::INFINITY;
    let mut iters = 0usize;
    for t in 0..s.trials {
        let psi = trial_field(ext, s, t);
        let (proj, pr) = covariant_project(&psi, ext)?;
        iters = iters.max(pr.iterations[0]).max(pr.iterations[1]);
        worst = worst.max(spin_field_residual(&proj, ext)?);
        control = control.min(spin_field_residual(&psi, ext)?);
    }
    let mut rep = ResidualReport::new("squared spin-momentum operator on the constraint manifold");
    rep.at_most("projected residual", worst, SPIN_FIELD_TOL);
    rep.at_least("unprojected residual", control, SPIN_FIELD_CONTROL_MIN);
    rep.info("max projection iterations", iters as f64);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn spec_round_trip_and_derived_fields() {
        let g = Grid::cubic(8, TAU).unwrap();
        let spec = PotentialSpec {
            phi: vec![FourierTerm {
                n: [1, 0, 0],
                cos: 0.5,
                sin: 0.0,
            }],
            a: VectorSeries {
                y: vec![FourierTerm {
                    n: [1, 0, 0],
                    cos: 0.0,
                    sin: 0.3,
                }],
                ..Default::default()
            },
        };
        let ext = ExternalField::from_spec(g, 0.5, &spec).unwrap();
        for i in 0..g.len() {
            let x = g.position(i);
            // E = -∇Φ = 0.5 sin x x̂, H = curl(0.3 sin x ŷ) = 0.3 cos x ẑ.
            assert!((ext.evec[0][i] - 0.5 * x[0].sin()).abs() < 1e-13);
            assert!((ext.hvec[2][i] - 0.3 * x[0].cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn out_of_band_terms_are_filtered() {
        let g = Grid::cubic(8, TAU).unwrap();
        let spec = PotentialSpec {
            phi: vec![FourierTerm {
                n: [3, 0, 0],
                cos: 1.0,
                sin: 0.0,
            }],
            ..Default::default()
        };
        let ext = ExternalField::from_spec(g, 1.0, &spec).unwrap();
        assert!(ext.max_abs_phi() < 1e-14);
    }

    #[test]
    fn grid_mismatch() {
        let g = Grid::cubic(8, TAU).unwrap();
        let h = Grid::cubic(4, TAU).unwrap();
        let ext = ExternalField::zero(g, 1.0);
        let psi = WaveField::zeros(h, 1.0);
        assert!(matches!(apply_hamiltonian_a(&psi, &ext), Err(Error::GridMismatch(_))));
    }
}
