use std::f64::consts::TAU;

use spin1::algebra::{build_matrix_set, check_spin_hamiltonian_commutator, check_swap_anticommutation, hermitian_eigen};
use spin1::algebra::hamiltonian_symbol;
use spin1::chain::{derive_uv, MassSign, PlaneWavePotential, Variant};
use spin1::dynamics::*;
use spin1::fields::{
    project_wave_transverse, random_wave_field, BandLimit, Grid, VectorField, WaveField, C64, I, ZERO,
};
use spin1::Error;

fn grid32() -> Grid {
    Grid::cubic(32, TAU).unwrap()
}

fn constrained(grid: Grid, m: f64, seed: u64) -> WaveField {
    let psi = random_wave_field(grid, m, BandLimit::new(0.9, seed), true);
    project_wave_transverse(&psi)
}

#[test]
fn norm_and_energy_conserved_to_t_100() {
    let g = grid32();
    let prop = FreePropagator::new(g, 1.0);
    let psi = project_wave_transverse(&prop.positive_energy_part(&constrained(g, 1.0, 7)));
    let d0 = diagnostics(&psi);
    for &t in &[0.5, 3.0, 17.0, 42.0, 100.0] {
        let d = diagnostics(&prop.evolve(&psi, t));
        let dn = (d.total_probability - d0.total_probability).abs() / d0.total_probability;
        let de = (d.energy - d0.energy).abs() / d0.energy.abs();
        println!("t={t} norm drift {dn:.2e} energy drift {de:.2e} div {:.2e}/{:.2e}", d.div_u_res, d.div_v_res);
        assert!(dn <= 1e-13, "norm drift {dn}");
        assert!(de <= 1e-13, "energy drift {de}");
        assert!(d.div_u_res.max(d.div_v_res) <= 10.0 * d0.div_u_res.max(d0.div_v_res).max(div_floor(&psi)));
    }
}

/// Round-off level of a spectral divergence: ε · k_max · max|w|.
fn div_floor(psi: &WaveField) -> f64 {
    f64::EPSILON * psi.grid.k_max() * psi.u.max_abs().max(psi.v.max_abs())
}

#[test]
fn mixed_energy_state_conserves_energy_against_its_scale() {
    let g = grid32();
    let psi = constrained(g, 1.0, 8);
    let prop = FreePropagator::new(g, 1.0);
    let e0 = energy(&psi);
    let scale = energy(&prop.positive_energy_part(&psi)) - energy(&psi.sub(&prop.positive_energy_part(&psi)));
    let e1 = energy(&prop.evolve(&psi, 100.0));
    println!("mixed energy {e0:e} scale {scale:e} drift {:e}", (e1 - e0).abs());
    assert!((e1 - e0).abs() <= 1e-13 * scale);
}

#[test]
fn continuity_converges_at_second_order() {
    let g = grid32();
    let psi = constrained(g, 1.0, 11);
    let dt = 0.5 * 0.1 / omega_max(&g, 1.0);
    let r1 = continuity_residual(&psi, dt).unwrap();
    let r2 = continuity_residual(&psi, dt / 2.0).unwrap();
    println!("continuity {r1:.3e} {r2:.3e} ratio {}", r1 / r2);
    assert!((3.5..=4.5).contains(&(r1 / r2)));
}

#[test]
fn continuity_rejects_large_step() {
    let g = Grid::cubic(8, TAU).unwrap();
    let psi = constrained(g, 1.0, 1);
    let err = continuity_residual(&psi, 1.0).unwrap_err();
    assert!(matches!(err, Error::StepTooLarge { .. }));
}

#[test]
fn kgf_dichotomy() {
    let g = Grid::cubic(16, TAU).unwrap();
    let psi = random_wave_field(g, 1.0, BandLimit::new(1.5, 3), false);
    let k = kgf_residual(&psi);
    println!("{k:?}");
    assert!(k.transverse_res <= 1e-12);
    let lm = longitudinal_mode(g, 1.0, [0, 0, 1]);
    let kl = kgf_residual(&lm);
    println!("{kl:?} norm {}", lm.norm());
    assert!(kl.longitudinal_demo >= 1.0 * lm.norm() * (1.0 - 1e-12));
    let prop = FreePropagator::new(g, 0.8);
    let times: Vec<f64> = (1..=40).map(|i| 0.1 * i as f64).collect();
    for n in [[0, 0, 1], [1, 2, 0], [3, -2, 4]] {
        let psi = longitudinal_mode(g, 0.8, n);
        let w = longitudinal_frequency(&prop, &psi, &times);
        let ws = longitudinal_frequency(&prop, &psi.swapped(), &times);
        println!("n={n:?} w={w} swapped {ws}");
        assert!((w - 0.8).abs() <= 1e-10);
        assert!((ws + 0.8).abs() <= 1e-10);
    }
}

#[test]
fn swap_time_reversal() {
    let ms = build_matrix_set();
    assert!(check_swap_anticommutation(&ms).all_passed());
    let g = Grid::cubic(16, TAU).unwrap();
    let psi = random_wave_field(g, 1.0, BandLimit::new(1.5, 5), false);
    let r = time_reversal_swap_check(&psi, 1.7);
    println!("swap {r:e}");
    assert!(r <= 1e-12);
    assert_eq!(time_reversal_swap_check(&psi, 0.0), 0.0);
}

#[test]
fn angular_momentum_packet() {
    let ms = build_matrix_set();
    assert!(check_spin_hamiltonian_commutator(&ms).all_passed());
    let n = 64;
    let g = Grid::cubic(n, TAU).unwrap();
    let sigma = TAU / 16.0;
    let psi = gaussian_packet(
        g,
        1.0,
        sigma,
        [1.0, -2.0, 0.5],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.5), ZERO],
        [ZERO, C64::new(0.3, 0.0), C64::new(0.0, -1.0)],
    );
    let r = angular_momentum_commutator(&psi);
    println!("[J,H] {r:e}");
    assert!(r <= 1e-8);
}

#[test]
fn current_forms_agree() {
    let ms = build_matrix_set();
    let g = Grid::cubic(8, TAU).unwrap();
    let psi = random_wave_field(g, 1.0, BandLimit::new(2.0, 9), false);
    let d = current_form_deviation(&ms, &psi);
    println!("current gap {d:e}");
    assert!(d <= 1e-12);
    // u = x̂ f, v = ŷ f gives j = -ẑ |f|².
    let f = |x: [f64; 3]| C64::new((x[0]).cos() + 2.0, 0.0);
    let u = VectorField::from_fn(g, |x| [f(x), ZERO, ZERO]);
    let v = VectorField::from_fn(g, |x| [ZERO, f(x), ZERO]);
    let psi = WaveField::new(u, v, 1.0).unwrap();
    let j = current_cross_form(&psi);
    for i in 0..g.len() {
        let fx = f(g.position(i)).norm_sqr();
        assert!((j[i][2] + fx).abs() < 1e-14 && j[i][0] == 0.0 && j[i][1] == 0.0);
    }
}

#[test]
fn chain_output_evolves_as_sampled_plane_waves() {
    let g = Grid::cubic(16, TAU).unwrap();
    let pw = PlaneWavePotential::random_lorenz(&g, 1.0, 6, 2, 21).unwrap();
    let uv = derive_uv(&pw, Variant::H, MassSign::Minus).unwrap();
    let psi0 = uv.sample(&g, 0.0);
    let t = 2.3;
    let exact = uv.sample(&g, t);
    let evolved = evolve_free(&psi0, t);
    let r = exact.relative_distance(&evolved);
    println!("chain vs propagator {r:e}");
    assert!(r <= 1e-12);
}

#[test]
fn transverse_eigenmode_is_pure_phase() {
    let ms = build_matrix_set();
    let g = Grid::cubic(8, TAU).unwrap();
    let m = 1.0;
    let k = [0.0, 0.0, 1.0];
    let eig = hermitian_eigen(&hamiltonian_symbol(&ms, k, m));
    let e = (2.0f64).sqrt();
    let j = eig.values.iter().position(|&x| (x - e).abs() < 1e-12).unwrap();
    let vec = eig.vector(j);
    let u = VectorField::from_fn(g, |x| {
        let ph = C64::from_polar(1.0, x[2]);
        [vec[0] * ph, vec[1] * ph, vec[2] * ph]
    });
    let v = VectorField::from_fn(g, |x| {
        let ph = C64::from_polar(1.0, x[2]);
        [vec[3] * ph, vec[4] * ph, vec[5] * ph]
    });
    let psi = WaveField::new(u, v, m).unwrap();
    let t = 0.9;
    let out = evolve_free(&psi, t);
    let expect = psi.scaled((-I * e * t).exp());
    assert!(out.relative_distance(&expect) < 1e-13);
    let c = continuity_residual(&psi, 1e-3).unwrap();
    println!("eigenmode continuity {c:e}");
    assert!(c <= 1e-10);
}
