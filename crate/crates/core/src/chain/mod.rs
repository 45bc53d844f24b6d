//! Solutions of the first-order system manufactured from a four-potential.
//!
//! Everything here is per plane-wave mode with `∂t → -iω`, `∇ → ik`. The
//! inverse time derivative conjugated by the mass phase becomes the factor
//! `1/(i(σm - ω))`, which is only defined away from its pole.

mod potential;

pub use potential::{Branch, PlaneWavePotential, PotentialMode, DEFAULT_MODE_CAP};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{hamiltonian_symbol, MatrixSet};
use crate::error::{Error, Result};
use crate::fields::{cross_real, dot_real, norm_sqr3, Grid, VectorField, WaveField, C64, I};
use crate::report::ResidualReport;

pub const SYSTEM_TOL: f64 = 1e-12;
pub const DIVERGENCE_TOL: f64 = 1e-13;
pub const PROCA_TOL: f64 = 1e-12;
pub const MAXWELL_TOL: f64 = 1e-13;
/// Threshold a negative control must exceed.
pub const CONTROL_MIN: f64 = 1e-3;

/// Per-mode field strengths `E`, `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMode {
    pub k: [f64; 3],
    pub omega: f64,
    pub e: [C64; 3],
    pub h: [C64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivedFields {
    pub mass: f64,
    pub modes: Vec<FieldMode>,
}

/// `E = -ikφ + iωA`, `H = ik × A`.
pub fn derive_eh(pw: &PlaneWavePotential) -> DerivedFields {
    let modes = pw
        .modes
        .iter()
        .map(|md| {
            let a = md.avec();
            let phi = md.phi();
            let e = std::array::from_fn(|d| -I * md.k[d] * phi + I * md.omega * a[d]);
            let h = cross_real(md.k, a).map(|z| I * z);
            FieldMode {
                k: md.k,
                omega: md.omega,
                e,
                h,
            }
        })
        .collect();
    DerivedFields {
        mass: pw.mass,
        modes,
    }
}

fn vec_norm(a: [C64; 3]) -> f64 {
    norm_sqr3(a).sqrt()
}

fn sub3(a: [C64; 3], b: [C64; 3]) -> [C64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Proca equations per mode:
/// `∂E/∂t = curl H + m² A` and `div E = -m² φ`.
///
/// Residuals are divided by the largest `(|ω| + |k| + m)² · |potential|`
/// over the modes. Also reports the Lorenz and mass-shell violations.
pub fn proca_residual(pw: &PlaneWavePotential) -> ResidualReport {
    let m = pw.mass;
    let df = derive_eh(pw);
    let mut scale = 0.0f64;
    let (mut r8, mut r9, mut lorenz, mut shell) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (md, f) in pw.modes.iter().zip(&df.modes) {
        let s = (md.omega.abs() + md.k_norm() + m).powi(2) * md.scale();
        scale = scale.max(s);
        let a = md.avec();
        let lhs = f.e.map(|z| -I * md.omega * z);
        let curl_h = cross_real(md.k, f.h).map(|z| I * z);
        let rhs: [C64; 3] = std::array::from_fn(|d| curl_h[d] + a[d] * (m * m));
        r8 = r8.max(vec_norm(sub3(lhs, rhs)));
        let div_e = I * dot_real(md.k, f.e);
        r9 = r9.max((div_e + md.phi() * (m * m)).norm());
        lorenz = lorenz.max(md.lorenz_violation());
        shell = shell.max(md.shell_violation(m));
    }
    let rel = |x: f64| if scale > 0.0 { x / scale } else { x };
    let mut rep = ResidualReport::new("proca");
    rep.at_most("dE/dt = curl H + m^2 A", rel(r8), PROCA_TOL);
    rep.at_most("div E = -m^2 phi", rel(r9), PROCA_TOL);
    rep.info("lorenz violation |w phi - k.A|", lorenz);
    rep.info("mass shell violation |w^2 - k^2 - m^2|", shell);
    rep
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `u = ∂t H + iσm H`, `v = curl H`.
    H,
    /// `ũ = curl E`, `ṽ = ∂t E + iσm E + m² e^{iσmt} ∂t⁻¹ e^{-iσmt} ∇φ`.
    E,
    /// `H̃ = curl A`, `Ẽ = -∇φ - ∂t A + iσm (A + e^{-iσmt} ∂t⁻¹ e^{iσmt} ∇φ)`.
    A,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::H => "H-chain",
            Variant::E => "E-chain",
            Variant::A => "A-chain",
        }
    }

    pub fn needs_inverse_time_derivative(self) -> bool {
        !matches!(self, Variant::H)
    }
}

/// Sign σ multiplying `i·m` in a chain definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MassSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl MassSign {
    pub fn value(self) -> f64 {
        match self {
            MassSign::Plus => 1.0,
            MassSign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            MassSign::Plus => MassSign::Minus,
            MassSign::Minus => MassSign::Plus,
        }
    }

    /// The sign as the definition is originally written for each variant.
    pub fn original(variant: Variant) -> Self {
        match variant {
            Variant::H | Variant::A => MassSign::Plus,
            Variant::E => MassSign::Minus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            MassSign::Plus => '+',
            MassSign::Minus => '-',
        }
    }
}

/// Which chain output is placed in the `u` slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Roles {
    /// First quantity → u, second → v.
    Direct,
    /// First quantity → v, second → u.
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UvMode {
    pub k: [f64; 3],
    pub omega: f64,
    pub u: [C64; 3],
    pub v: [C64; 3],
}

impl UvMode {
    pub fn swapped(&self) -> Self {
        Self {
            u: self.v,
            v: self.u,
            ..*self
        }
    }

    pub fn psi(&self) -> [C64; 6] {
        [self.u[0], self.u[1], self.u[2], self.v[0], self.v[1], self.v[2]]
    }
}

/// Per-mode `(u, v)` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct UvModes {
    pub mass: f64,
    pub modes: Vec<UvMode>,
}

impl UvModes {
    pub fn with_roles(&self, roles: Roles) -> UvModes {
        match roles {
            Roles::Direct => self.clone(),
            Roles::Swapped => UvModes {
                mass: self.mass,
                modes: self.modes.iter().map(UvMode::swapped).collect(),
            },
        }
    }

    /// `Σ (u, v) e^{i(k·x - ωt)}` on the grid.
    pub fn sample(&self, grid: &Grid, t: f64) -> WaveField {
        let n = grid.len();
        let pts: Vec<[C64; 6]> = (0..n)
            .into_par_iter()
            .map(|i| {
                let x = grid.position(i);
                let mut acc = [C64::new(0.0, 0.0); 6];
                for md in &self.modes {
                    let ph = C64::from_polar(1.0, md.k[0] * x[0] + md.k[1] * x[1] + md.k[2] * x[2] - md.omega * t);
                    for (c, a) in md.psi().iter().enumerate() {
                        acc[c] += a * ph;
                    }
                }
                acc
            })
            .collect();
        let mut u = VectorField::zeros(*grid);
        let mut v = VectorField::zeros(*grid);
        for (i, p) in pts.iter().enumerate() {
            u.set(i, [p[0], p[1], p[2]]);
            v.set(i, [p[3], p[4], p[5]]);
        }
        WaveField {
            grid: *grid,
            u,
            v,
            mass: self.mass,
        }
    }
}

/// `1/(i(σm - ω))`, the per-mode form of `e^{-iσmt} ∂t⁻¹ e^{iσmt}`.
fn inverse_dt_factor(idx: usize, omega: f64, sm: f64) -> Result<C64> {
    let d = sm - omega;
    if d.abs() <= 1e-14 * (1.0 + omega.abs()) {
        return Err(Error::Pole { mode: idx, omega });
    }
    Ok(C64::new(1.0, 0.0) / (I * d))
}

/// Build `(u, v)` amplitudes from the potential with the given chain and
/// mass sign. Outputs are in the definitional roles (first quantity → u).
pub fn derive_uv(pw: &PlaneWavePotential, variant: Variant, sign: MassSign) -> Result<UvModes> {
    let m = pw.mass;
    let sm = sign.value() * m;
    let df = derive_eh(pw);
    let mut modes = Vec::with_capacity(pw.modes.len());
    for (idx, (md, f)) in pw.modes.iter().zip(&df.modes).enumerate() {
        let w = md.omega;
        let k = md.k;
        let (u, v) = match variant {
            Variant::H => {
                let u = f.h.map(|z| (-I * w + I * sm) * z);
                let v = cross_real(k, f.h).map(|z| I * z);
                (u, v)
            }
            Variant::E => {
                // The conjugation runs the other way round here: e^{iσmt} ∂t⁻¹ e^{-iσmt}.
                let inv = inverse_dt_factor(idx, w, -sm)?;
                let phi = md.phi();
                let u = cross_real(k, f.e).map(|z| I * z);
                let v = std::array::from_fn(|d| (-I * w + I * sm) * f.e[d] + inv * (I * k[d] * phi) * (m * m));
                (u, v)
            }
            Variant::A => {
                let inv = inverse_dt_factor(idx, w, sm)?;
                let phi = md.phi();
                let a = md.avec();
                let u = f.h;
                let v = std::array::from_fn(|d| {
                    -I * k[d] * phi + I * w * a[d] + I * sm * (a[d] + inv * I * k[d] * phi)
                });
                (u, v)
            }
        };
        modes.push(UvMode { k, omega: w, u, v });
    }
    Ok(UvModes { mass: m, modes })
}

/// Maximum residuals of the per-mode matrix equation and constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemResidual {
    /// `max ‖ωΨ - H(k)Ψ‖ / max(|ω|‖Ψ‖)`.
    pub dynamics: f64,
    /// `max |k·u| / max(|k|‖u‖)`.
    pub div_u: f64,
    pub div_v: f64,
}

/// Evaluate the per-mode system with mass matrix `b_sign · b`.
pub fn system_residual_values(ms: &MatrixSet, uv: &UvModes, b_sign: f64) -> SystemResidual {
    let m = uv.mass;
    let (mut res, mut scale) = (0.0f64, 0.0f64);
    let (mut du, mut su, mut dv, mut sv) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for md in &uv.modes {
        let h = hamiltonian_symbol(ms, md.k, b_sign * m);
        let psi = md.psi();
        let hpsi = h.apply(&psi);
        let r: f64 = psi
            .iter()
            .zip(&hpsi)
            .map(|(p, hp)| (p * md.omega - hp).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let pn: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        res = res.max(r);
        scale = scale.max(md.omega.abs() * pn);
        let kn = (md.k[0] * md.k[0] + md.k[1] * md.k[1] + md.k[2] * md.k[2]).sqrt();
        du = du.max(dot_real(md.k, md.u).norm());
        dv = dv.max(dot_real(md.k, md.v).norm());
        su = su.max(kn * vec_norm(md.u));
        sv = sv.max(kn * vec_norm(md.v));
    }
    let rel = |x: f64, s: f64| if s > 0.0 { x / s } else { x };
    SystemResidual {
        dynamics: rel(res, scale),
        div_u: rel(du, su),
        div_v: rel(dv, sv),
    }
}

/// Residual report for the per-mode matrix equation `ωΨ = H(k)Ψ` and the
/// constraints `k·u = k·v = 0`.
pub fn system_residual(ms: &MatrixSet, uv: &UvModes) -> ResidualReport {
    let r = system_residual_values(ms, uv, 1.0);
    let mut rep = ResidualReport::new("system");
    rep.at_most("w psi - H(k) psi", r.dynamics, SYSTEM_TOL);
    rep.at_most("k.u", r.div_u, DIVERGENCE_TOL);
    rep.at_most("k.v", r.div_v, DIVERGENCE_TOL);
    rep
}

/// Source-free Maxwell equations per mode with `u → H`, `v → E`:
/// `ωH = k × E`, `ωE = -k × H`, `k·E = k·H = 0`.
pub fn maxwell_residual(uv: &UvModes) -> f64 {
    let (mut r, mut s) = (0.0f64, 0.0f64);
    for md in &uv.modes {
        let (h, e) = (md.u, md.v);
        let w = md.omega;
        let kxe = cross_real(md.k, e);
        let kxh = cross_real(md.k, h);
        let r1 = vec_norm(sub3(h.map(|z| z * w), kxe));
        let r2 = vec_norm(std::array::from_fn(|d| e[d] * w + kxh[d]));
        let r3 = dot_real(md.k, e).norm() + dot_real(md.k, h).norm();
        r = r.max(r1).max(r2).max(r3);
        s = s.max(w.abs() * (vec_norm(h) + vec_norm(e)));
    }
    if s > 0.0 {
        r / s
    } else {
        r
    }
}

/// Evaluate one chain and mass sign in both role assignments and both mass
/// matrix signs. Passes if some role assignment satisfies the system with the
/// standard mass matrix; the findings name what works.
pub fn chain_report(ms: &MatrixSet, pw: &PlaneWavePotential, variant: Variant, sign: MassSign) -> Result<ResidualReport> {
    let uv = derive_uv(pw, variant, sign)?;
    let mut rep = ResidualReport::new(format!("{} mass sign {}", variant.label(), sign.symbol()));
    let mut best = f64::INFINITY;
    let mut best_div = 0.0f64;
    for roles in [Roles::Direct, Roles::Swapped] {
        for b_sign in [1.0, -1.0] {
            let r = system_residual_values(ms, &uv.with_roles(roles), b_sign);
            let b_label = if b_sign > 0.0 { "b" } else { "-b" };
            rep.info(format!("residual roles={roles:?} mass matrix={b_label}"), r.dynamics);
            if r.dynamics <= SYSTEM_TOL {
                rep.finding(format!(
                    "{} with mass sign {} satisfies the system with roles {:?} and mass matrix {} (residual {:.1e})",
                    variant.label(),
                    sign.symbol(),
                    roles,
                    b_label,
                    r.dynamics
                ));
            }
            if b_sign > 0.0 && r.dynamics < best {
                best = r.dynamics;
                best_div = r.div_u.max(r.div_v);
            }
        }
    }
    if rep.findings.is_empty() {
        rep.finding(format!(
            "{} with mass sign {} satisfies the system in no role/mass-matrix combination",
            variant.label(),
            sign.symbol()
        ));
    }
    rep.at_most("best residual with standard mass matrix", best, SYSTEM_TOL);
    rep.at_most("divergence residual", best_div, DIVERGENCE_TOL);
    Ok(rep)
}

/// Try the original sign and its conjugate for a chain; passes if either one
/// satisfies the system with the standard mass matrix.
pub fn sign_search(ms: &MatrixSet, pw: &PlaneWavePotential, variant: Variant) -> Result<ResidualReport> {
    let original = MassSign::original(variant);
    let mut rep = ResidualReport::new(format!("{} sign search", variant.label()));
    let mut best = f64::INFINITY;
    for (label, sign) in [("original", original), ("conjugate", original.flipped())] {
        let sub = chain_report(ms, pw, variant, sign)?;
        let v = sub.value("best residual with standard mass matrix").unwrap_or(f64::INFINITY);
        rep.info(format!("{label} sign {} best residual", sign.symbol()), v);
        best = best.min(v);
        rep.findings.extend(sub.findings);
    }
    rep.at_most("best residual over signs and roles", best, SYSTEM_TOL);
    Ok(rep)
}
