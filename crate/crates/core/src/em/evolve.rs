use serde::{Deserialize, Serialize};

use super::{apply_generator, covariant_residuals, ExternalField};
use crate::dynamics::{current_cross_form, density, density_balance, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::fields::{WaveField, C64, I};

/// Largest RK4 step accepted: `0.5 / (k_max + |e| max|A| + |e| max|Φ| + m)`.
pub fn stability_bound(ext: &ExternalField, mass: f64) -> f64 {
    let e = ext.charge.abs();
    0.5 / (ext.grid.k_max() + e * ext.max_abs_a() + e * ext.max_abs_phi() + mass.abs())
}

fn check_dt(ext: &ExternalField, mass: f64, dt: f64) -> Result<()> {
    let bound = stability_bound(ext, mass);
    if !(dt.abs() > 0.0) || dt.abs() > bound {
        return Err(Error::StepTooLarge { dt, bound });
    }
    Ok(())
}

fn rhs(psi: &WaveField, ext: &ExternalField) -> Result<WaveField> {
    Ok(apply_generator(psi, ext)?.scaled(-I))
}

/// One classical RK4 step of `iΨ̇ = (H_A + eΦ)Ψ`; `dt` may be negative.
pub fn rk4_step(psi: &WaveField, ext: &ExternalField, dt: f64) -> Result<WaveField> {
    let h = C64::new(dt, 0.0);
    let k1 = rhs(psi, ext)?;
    let k2 = rhs(&psi.axpy(h * 0.5, &k1), ext)?;
    let k3 = rhs(&psi.axpy(h * 0.5, &k2), ext)?;
    let k4 = rhs(&psi.axpy(h, &k3), ext)?;
    Ok(psi
        .axpy(h / 6.0, &k1)
        .axpy(h / 3.0, &k2)
        .axpy(h / 3.0, &k3)
        .axpy(h / 6.0, &k4))
}

/// `Re⟨Ψ|(H_A + eΦ)|Ψ⟩`.
pub fn em_energy(psi: &WaveField, ext: &ExternalField) -> Result<f64> {
    Ok(psi.inner(&apply_generator(psi, ext)?).re)
}

/// Conserved quantities with covariant constraint residuals; continuity left at zero.
pub fn em_diagnostics(psi: &WaveField, ext: &ExternalField) -> Result<DiagnosticsRecord> {
    let dv = psi.grid.cell_volume();
    let mut total_current = [0.0; 3];
    for j in current_cross_form(psi) {
        for d in 0..3 {
            total_current[d] += j[d] * dv;
        }
    }
    let [du, dvv] = covariant_residuals(psi, ext);
    Ok(DiagnosticsRecord {
        time: 0.0,
        total_probability: density(psi).iter().sum::<f64>() * dv,
        total_current,
        energy: em_energy(psi, ext)?,
        div_u_res: du,
        div_v_res: dvv,
        continuity_res: 0.0,
    })
}

/// `‖∂ρ/∂t + div j‖₂` with `∂ρ/∂t` from single RK4 steps over `±dt`.
pub fn em_continuity_residual(psi: &WaveField, ext: &ExternalField, dt: f64) -> Result<f64> {
    check_dt(ext, psi.mass, dt)?;
    let plus = density(&rk4_step(psi, ext, dt)?);
    let minus = density(&rk4_step(psi, ext, -dt)?);
    Ok(density_balance(psi, &plus, &minus, dt))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmTrajectory {
    pub dt: f64,
    pub steps: usize,
    pub records: Vec<DiagnosticsRecord>,
    #[serde(skip)]
    pub final_state: Option<WaveField>,
}

/// Evolve for `steps` RK4 steps, recording diagnostics every `stride` steps
/// and at the end.
pub fn evolve_em(psi0: &WaveField, ext: &ExternalField, dt: f64, steps: usize, stride: usize) -> Result<EmTrajectory> {
    if psi0.grid != ext.grid {
        return Err(Error::GridMismatch("wave field and potential grids differ".into()));
    }
    check_dt(ext, psi0.mass, dt)?;
    let stride = stride.max(1);
    let record = |psi: &WaveField, t: f64| -> Result<DiagnosticsRecord> {
        let mut r = em_diagnostics(psi, ext)?.at_time(t);
        r.continuity_res = em_continuity_residual(psi, ext, dt)?;
        Ok(r)
    };
    let mut psi = psi0.clone();
    let mut records = vec![record(&psi, 0.0)?];
    for s in 1..=steps {
        psi = rk4_step(&psi, ext, dt)?;
        let t = s as f64 * dt;
        if !psi.is_finite() {
            return Err(Error::NonFiniteState { time: t });
        }
        if s % stride == 0 || s == steps {
            records.push(record(&psi, t)?);
        }
    }
    Ok(EmTrajectory {
        dt,
        steps,
        records,
        final_state: Some(psi),
    })
}

/// `(π² + m²)Ψ - e(Σ·H)Ψ + ie(a·E)Ψ`; equals `H_A²Ψ + ie(a·E)Ψ` only where
/// `π·u = π·v = 0`.
pub fn second_order_rhs(psi: &WaveField, ext: &ExternalField) -> Result<WaveField> {
    if psi.grid != ext.grid {
        return Err(Error::GridMismatch("wave field and potential grids differ".into()));
    }
    let m2 = C64::new(psi.mass * psi.mass, 0.0);
    let e = C64::new(-ext.charge, 0.0);
    let block = |w: &crate::fields::VectorField| ext.pi_squared(w).axpy(m2, w).axpy(e, &ext.spin_dot_h(w));
    let base = WaveField {
        grid: psi.grid,
        u: block(&psi.u),
        v: block(&psi.v),
        mass: psi.mass,
    };
    Ok(base.axpy(I * ext.charge, &ext.a_dot_e(psi)))
}

/// Relative residual of `(i∂_t - eΦ)²Ψ` against [`second_order_rhs`] with time
/// derivatives from central differences over one RK4 step each way.
pub fn second_order_residual(psi: &WaveField, ext: &ExternalField, dt: f64) -> Result<f64> {
    check_dt(ext, psi.mass, dt)?;
    let plus = rk4_step(psi, ext, dt)?;
    let minus = rk4_step(psi, ext, -dt)?;
    let e = ext.charge;
    let second = plus.axpy(C64::new(-2.0, 0.0), psi).axpy(C64::new(1.0, 0.0), &minus);
    let first = plus.sub(&minus);
    // -Ψ̈ - 2ieΦΨ̇ + e²Φ²Ψ
    let lhs = second
        .scaled(C64::new(-1.0 / (dt * dt), 0.0))
        .axpy(-I * (e / dt), &ext.phi_times(&first))
        .axpy(C64::new(e * e, 0.0), &ext.phi_times(&ext.phi_times(psi)));
    let rhs = second_order_rhs(psi, ext)?;
    let s = rhs.norm();
    Ok(if s > 0.0 { lhs.sub(&rhs).norm() / s } else { lhs.sub(&rhs).norm() })
}

/// `‖e^{ieχ}Ψ(t) - Ψ'(t)‖/‖Ψ'(t)‖`, with `Ψ'` evolved in the potential
/// shifted by `∇χ` from `e^{ieχ}Ψ(0)`.
pub fn gauge_covariance_check(
    psi0: &WaveField,
    ext: &ExternalField,
    chi: &[f64],
    dt: f64,
    steps: usize,
) -> Result<f64> {
    let shifted = ext.gauge_shifted(chi)?;
    check_dt(ext, psi0.mass, dt)?;
    check_dt(&shifted, psi0.mass, dt)?;
    let phase: Vec<C64> = chi.iter().map(|&c| C64::from_polar(1.0, ext.charge * c)).collect();
    let rephase = |p: &WaveField| WaveField {
        grid: p.grid,
        u: p.u.mul_scalar_field(&phase),
        v: p.v.mul_scalar_field(&phase),
        mass: p.mass,
    };
    let mut a = psi0.clone();
    let mut b = rephase(psi0);
    for _ in 0..steps {
        a = rk4_step(&a, ext, dt)?;
        b = rk4_step(&b, &shifted, dt)?;
    }
    Ok(b.relative_distance(&rephase(&a)))
}
