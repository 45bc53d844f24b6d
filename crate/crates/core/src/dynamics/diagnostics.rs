use serde::{Deserialize, Serialize};

use super::{energy, omega_max, FreePropagator};
use crate::algebra::MatrixSet;
use crate::error::{Error, Result};
use crate::fields::{cross, divergence, VectorField, WaveField, C64};

/// Time-stamped conserved quantities and constraint residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub total_probability: f64,
    pub total_current: [f64; 3],
    pub energy: f64,
    pub div_u_res: f64,
    pub div_v_res: f64,
    pub continuity_res: f64,
}

impl DiagnosticsRecord {
    pub fn at_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }
}

/// `ρ = ½(|u|² + |v|²)` pointwise.
pub fn density(psi: &WaveField) -> Vec<f64> {
    (0..psi.grid.len())
        .map(|i| {
            let p = psi.uv_at(i);
            0.5 * p.iter().map(|z| z.norm_sqr()).sum::<f64>()
        })
        .collect()
}

/// `j = ½(v* × u + v × u*)` pointwise, one vector per grid point.
pub fn current_cross_form(psi: &WaveField) -> Vec<[f64; 3]> {
    (0..psi.grid.len())
        .map(|i| {
            let u = psi.u.at(i);
            let v = psi.v.at(i);
            let a = cross(v.map(|z| z.conj()), u);
            let b = cross(v, u.map(|z| z.conj()));
            std::array::from_fn(|d| 0.5 * (a[d] + b[d]).re)
        })
        .collect()
}

/// `Ψ† a_k Ψ` pointwise with `Ψ = (u, v)/√2`, kept complex so that a
/// nonzero imaginary part would show up as a deviation.
pub fn current_matrix_form(ms: &MatrixSet, psi: &WaveField) -> Vec<[C64; 3]> {
    let a: Vec<_> = ms.a.iter().map(|x| x.to_complex()).collect();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..psi.grid.len())
        .map(|i| {
            let p: Vec<C64> = psi.uv_at(i).iter().map(|z| z * s).collect();
            std::array::from_fn(|k| {
                let ap = a[k].apply(&p);
                p.iter().zip(&ap).map(|(x, y)| x.conj() * y).sum()
            })
        })
        .collect()
}

/// Largest componentwise gap between the two current formulas.
pub fn current_form_deviation(ms: &MatrixSet, psi: &WaveField) -> f64 {
    let a = current_cross_form(psi);
    let b = current_matrix_form(ms, psi);
    a.iter()
        .zip(&b)
        .flat_map(|(x, y)| (0..3).map(move |d| (y[d] - x[d]).norm()))
        .fold(0.0, f64::max)
}

/// Probability, current, energy and divergence residuals. The continuity
/// residual is left at zero; see [`diagnostics_with_continuity`].
pub fn diagnostics(psi: &WaveField) -> DiagnosticsRecord {
    let dv = psi.grid.cell_volume();
    let total_probability = density(psi).iter().sum::<f64>() * dv;
    let mut total_current = [0.0; 3];
    for j in current_cross_form(psi) {
        for d in 0..3 {
            total_current[d] += j[d] * dv;
        }
    }
    DiagnosticsRecord {
        time: 0.0,
        total_probability,
        total_current,
        energy: energy(psi),
        div_u_res: divergence(&psi.u).max_abs(),
        div_v_res: divergence(&psi.v).max_abs(),
        continuity_res: 0.0,
    }
}

pub fn diagnostics_with_continuity(prop: &FreePropagator, psi: &WaveField, dt: f64) -> Result<DiagnosticsRecord> {
    let mut rec = diagnostics(psi);
    rec.continuity_res = continuity_with(prop, psi, dt)?;
    Ok(rec)
}

fn check_step(psi: &WaveField, dt: f64) -> Result<()> {
    let bound = 0.1 / omega_max(&psi.grid, psi.mass);
    if !(dt > 0.0) || dt > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }
    Ok(())
}

/// L2 norm of `∂ρ/∂t + div j` with `∂ρ/∂t` from a central difference over
/// `±dt` of the exact evolution.
pub fn continuity_residual(psi: &WaveField, dt: f64) -> Result<f64> {
    check_step(psi, dt)?;
    let prop = FreePropagator::new(psi.grid, psi.mass);
    continuity_with(&prop, psi, dt)
}

pub(crate) fn continuity_with(prop: &FreePropagator, psi: &WaveField, dt: f64) -> Result<f64> {
    check_step(psi, dt)?;
    let plus = density(&prop.evolve(psi, dt));
    let minus = density(&prop.evolve(psi, -dt));
    Ok(density_balance(psi, &plus, &minus, dt))
}

/// `‖(ρ₊ - ρ₋)/(2dt) + div j(ψ)‖₂`.
pub fn density_balance(psi: &WaveField, plus: &[f64], minus: &[f64], dt: f64) -> f64 {
    let g = psi.grid;
    let j = current_cross_form(psi);
    let mut jf = VectorField::zeros(g);
    for (i, v) in j.iter().enumerate() {
        jf.set(i, v.map(|x| C64::new(x, 0.0)));
    }
    let div = divergence(&jf);
    let s: f64 = (0..g.len())
        .map(|i| {
            let r = (plus[i] - minus[i]) / (2.0 * dt) + div.data[i].re;
            r * r + div.data[i].im.powi(2)
        })
        .sum();
    (s * g.cell_volume()).sqrt()
}
