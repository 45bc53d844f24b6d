use rayon::prelude::*;

use super::{apply_free_hamiltonian, apply_symbol, FreePropagator};
use crate::fields::{transverse_part, Grid, VectorField, WaveField, C64, I};

/// Result of comparing `H²Ψ` with `(-Δ + m²)Ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KgfResidual {
    /// Relative residual on the transverse part of Ψ.
    pub transverse_res: f64,
    /// Norm of the residual on the longitudinal part of Ψ.
    pub longitudinal_demo: f64,
    /// `‖k² Ψ_L‖`, what the longitudinal residual should be if `H²` acts as `m²` there.
    pub longitudinal_expected: f64,
}

fn split_blocks(k: [f64; 3], x: [C64; 6]) -> ([C64; 6], [C64; 6]) {
    let ut = transverse_part(k, [x[0], x[1], x[2]]);
    let vt = transverse_part(k, [x[3], x[4], x[5]]);
    let t = [ut[0], ut[1], ut[2], vt[0], vt[1], vt[2]];
    let l = std::array::from_fn(|c| x[c] - t[c]);
    (t, l)
}

fn kgf_mode_residual(k: [f64; 3], m: f64, x: [C64; 6]) -> [C64; 6] {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    let h2 = apply_symbol(k, m, apply_symbol(k, m, x));
    std::array::from_fn(|c| h2[c] - x[c] * (k2 + m * m))
}

fn sq(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

pub fn kgf_residual(psi: &WaveField) -> KgfResidual {
    let g = psi.grid;
    let n = g.len();
    let m = psi.mass;
    let spec = psi.to_spectral();
    let (rt, st, rl, el) = (0..n)
        .into_par_iter()
        .map(|i| {
            let k = g.derivative_wavevector(i);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let x: [C64; 6] = std::array::from_fn(|c| spec[c * n + i]);
            let (t, l) = split_blocks(k, x);
            let r_t = kgf_mode_residual(k, m, t);
            let r_l = kgf_mode_residual(k, m, l);
            let e_l = l.map(|z| z * k2);
            (sq(&r_t), sq(&t) * (k2 + m * m).powi(2), sq(&r_l), sq(&e_l))
        })
        .reduce(|| (0.0, 0.0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3));
    // Parseval with the 1/√2 of Ψ.
    let w = 0.5 * g.cell_volume() / n as f64;
    KgfResidual {
        transverse_res: if st > 0.0 { (rt / st).sqrt() } else { rt.sqrt() },
        longitudinal_demo: (w * rl).sqrt(),
        longitudinal_expected: (w * el).sqrt(),
    }
}

/// Purely longitudinal plane wave: `u = k̂ e^{ik·x}` for lattice mode numbers
/// `n`, and `v = 0`.
pub fn longitudinal_mode(grid: Grid, mass: f64, n: [i64; 3]) -> WaveField {
    let l = grid.lengths();
    let k: [f64; 3] = std::array::from_fn(|d| std::f64::consts::TAU * n[d] as f64 / l[d]);
    let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let u = VectorField::from_fn(grid, |x| {
        let ph = C64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
        k.map(|kd| ph * (kd / kn))
    });
    WaveField {
        grid,
        u,
        v: VectorField::zeros(grid),
        mass,
    }
}

/// Frequency of `⟨Ψ₀|Ψ(t)⟩ ∝ e^{-iωt}` from a least-squares fit of the
/// unwrapped phase through the origin.
pub fn longitudinal_frequency(prop: &FreePropagator, psi: &WaveField, times: &[f64]) -> f64 {
    let n0 = psi.inner(psi);
    let mut prev = 0.0;
    let mut offset = 0.0;
    let (mut stp, mut stt) = (0.0, 0.0);
    for &t in times {
        let c = psi.inner(&prop.evolve(psi, t)) / n0;
        let raw = c.arg();
        let mut ph = raw + offset;
        while ph - prev > std::f64::consts::PI {
            offset -= std::f64::consts::TAU;
            ph -= std::f64::consts::TAU;
        }
        while ph - prev < -std::f64::consts::PI {
            offset += std::f64::consts::TAU;
            ph += std::f64::consts::TAU;
        }
        prev = ph;
        stp += t * ph;
        stt += t * t;
    }
    -stp / stt
}

/// `‖swap(Ψ(t)) - e^{+iHt} swap(Ψ₀)‖ / ‖swap(Ψ(t))‖`.
pub fn time_reversal_swap_check(psi: &WaveField, t: f64) -> f64 {
    let prop = FreePropagator::new(psi.grid, psi.mass);
    let a = prop.evolve(psi, t).swapped();
    let b = prop.evolve(&psi.swapped(), -t);
    a.relative_distance(&b)
}

/// Spectral derivative `∂_d f` of one component.
fn derivative(grid: &Grid, f: &[C64], d: usize) -> Vec<C64> {
    let t = crate::fields::Transform::for_grid(grid);
    let mut s = f.to_vec();
    t.forward(&mut s);
    for (i, z) in s.iter_mut().enumerate() {
        *z *= I * grid.derivative_wavevector(i)[d];
    }
    t.inverse(&mut s);
    s
}

/// `J_c Ψ = (L_c + Σ_c)Ψ` with `L_c = -i(r_a ∂_b - r_b ∂_a)`, `(a, b, c)`
/// cyclic, and `r` measured from the box midpoint.
pub fn apply_angular_momentum(psi: &WaveField, c: usize) -> WaveField {
    let g = psi.grid;
    let n = g.len();
    let (a, b) = ((c + 1) % 3, (c + 2) % 3);
    let r: Vec<[f64; 3]> = (0..n).map(|i| g.centered_position(i)).collect();
    let comps: Vec<Vec<C64>> = (0..6)
        .into_par_iter()
        .map(|comp| {
            let f = psi.component(comp);
            let da = derivative(&g, f, a);
            let db = derivative(&g, f, b);
            (0..n).map(|i| -I * (db[i] * r[i][a] - da[i] * r[i][b])).collect()
        })
        .collect();
    let mut flat: Vec<C64> = comps.into_iter().flatten().collect();
    // Σ_c = I ⊗ S_c with (S_c w)_i = -i ε_{cij} w_j, i.e. S_c w = i e_c × w.
    for block in 0..2 {
        let base = 3 * block;
        for i in 0..n {
            let w: [C64; 3] = std::array::from_fn(|d| psi.component(base + d)[i]);
            let mut e = [0.0; 3];
            e[c] = 1.0;
            let s = crate::fields::cross_real(e, w).map(|z| I * z);
            for d in 0..3 {
                flat[(base + d) * n + i] += s[d];
            }
        }
    }
    WaveField::from_flat(g, psi.mass, flat)
}

/// Largest relative `‖[J_c, H]Ψ‖` over `c`.
pub fn angular_momentum_commutator(psi: &WaveField) -> f64 {
    let hpsi = apply_free_hamiltonian(psi);
    (0..3)
        .map(|c| {
            let jh = apply_angular_momentum(&hpsi, c);
            let hj = apply_free_hamiltonian(&apply_angular_momentum(psi, c));
            let d = jh.sub(&hj).norm();
            let s = jh.norm().max(hj.norm());
            if s > 0.0 {
                d / s
            } else {
                d
            }
        })
        .fold(0.0, f64::max)
}

/// Gaussian packet `exp(-|r|²/(2σ²)) e^{ik₀·r}` centered at the box midpoint
/// with polarizations `pu`, `pv`, normalized to `‖Ψ‖ = 1`.
pub fn gaussian_packet(grid: Grid, mass: f64, sigma: f64, k0: [f64; 3], pu: [C64; 3], pv: [C64; 3]) -> WaveField {
    let env = |i: usize| {
        let r = grid.centered_position(i);
        let r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
        C64::from_polar((-r2 / (2.0 * sigma * sigma)).exp(), k0[0] * r[0] + k0[1] * r[1] + k0[2] * r[2])
    };
    let mut u = VectorField::zeros(grid);
    let mut v = VectorField::zeros(grid);
    for i in 0..grid.len() {
        let e = env(i);
        u.set(i, pu.map(|p| p * e));
        v.set(i, pv.map(|p| p * e));
    }
    let psi = WaveField { grid, u, v, mass };
    let nrm = psi.norm();
    if nrm > 0.0 {
        psi.scaled(C64::new(1.0 / nrm, 0.0))
    } else {
        psi
    }
}
