use std::f64::consts::TAU;

use spin1::algebra::build_matrix_set;
use spin1::chain::*;
use spin1::dynamics::apply_free_hamiltonian;
use spin1::fields::{divergence, Grid, C64};

fn grid() -> Grid {
    Grid::cubic(16, TAU).unwrap()
}

fn twenty_modes(seed: u64) -> PlaneWavePotential {
    PlaneWavePotential::random_lorenz(&grid(), 1.0, 20, 3, seed).unwrap()
}

/// Per-mode fields computed from scratch: `H = ik×A`, `E = -ikφ + iωA`,
/// `u = -iωH - imH`, `v = ik×H`.
fn oracle_h_chain(pw: &PlaneWavePotential) -> Vec<([C64; 3], [C64; 3])> {
    let i = C64::new(0.0, 1.0);
    let cross = |a: [f64; 3], b: [C64; 3]| {
        [
            b[2] * a[1] - b[1] * a[2],
            b[0] * a[2] - b[2] * a[0],
            b[1] * a[0] - b[0] * a[1],
        ]
    };
    pw.modes
        .iter()
        .map(|md| {
            let a = md.avec();
            let h = cross(md.k, a).map(|z| i * z);
            let u = h.map(|z| -i * md.omega * z - i * pw.mass * z);
            let v = cross(md.k, h).map(|z| i * z);
            (u, v)
        })
        .collect()
}

#[test]
fn h_chain_matches_hand_oracle() {
    let pw = twenty_modes(1);
    let uv = derive_uv(&pw, Variant::H, MassSign::Minus).unwrap();
    for (md, (u, v)) in uv.modes.iter().zip(oracle_h_chain(&pw)) {
        for d in 0..3 {
            assert!((md.u[d] - u[d]).norm() <= 1e-13 * (1.0 + u[d].norm()));
            assert!((md.v[d] - v[d]).norm() <= 1e-13 * (1.0 + v[d].norm()));
        }
    }
}

#[test]
fn twenty_mode_end_to_end() {
    let ms = build_matrix_set();
    for seed in [1, 2, 3] {
        let pw = twenty_modes(seed);
        let proca = proca_residual(&pw);
        assert!(proca.passed(), "{proca:?}");
        let uv = derive_uv(&pw, Variant::H, MassSign::Minus).unwrap();
        let rep = system_residual(&ms, &uv);
        println!("seed {seed}: {:?}", rep.entries.iter().map(|e| e.value).collect::<Vec<_>>());
        assert!(rep.passed(), "{rep:?}");
    }
}

#[test]
fn sampled_fields_satisfy_the_pde() {
    // Independent of the per-mode matrices: spectral H on the grid against the
    // exact time derivative of the sampled superposition.
    let g = grid();
    let pw = twenty_modes(4);
    let uv = derive_uv(&pw, Variant::H, MassSign::Minus).unwrap();
    let t = 0.37;
    let psi = uv.sample(&g, t);
    let dt_modes = UvModes {
        mass: uv.mass,
        modes: uv
            .modes
            .iter()
            .map(|m| UvMode {
                u: m.u.map(|z| z * m.omega),
                v: m.v.map(|z| z * m.omega),
                ..*m
            })
            .collect(),
    };
    let i_dt_psi = dt_modes.sample(&g, t);
    let r = apply_free_hamiltonian(&psi).relative_distance(&i_dt_psi);
    println!("grid PDE residual {r:e}");
    assert!(r <= 1e-12);
    let scale = psi.u.max_abs().max(psi.v.max_abs()) * g.k_max();
    assert!(divergence(&psi.u).max_abs() <= 1e-13 * scale);
    assert!(divergence(&psi.v).max_abs() <= 1e-13 * scale);
}

#[test]
fn broken_lorenz_control() {
    let ms = build_matrix_set();
    let mut pw = twenty_modes(5);
    for md in pw.modes.iter_mut() {
        md.eps[0] += C64::new(0.5, 0.2);
    }
    let proca = proca_residual(&pw);
    let div_e = proca.value("div E = -m^2 phi").unwrap();
    println!("broken Lorenz: proca div E {div_e:e}");
    assert!(div_e >= CONTROL_MIN);
    let e = derive_uv(&pw, Variant::E, MassSign::Minus).unwrap();
    let re = system_residual_values(&ms, &e.with_roles(Roles::Swapped), 1.0);
    println!("broken Lorenz: E-chain {re:?}");
    assert!(re.dynamics.max(re.div_u).max(re.div_v) >= CONTROL_MIN);
    // The H-chain never sees φ.
    let h = derive_uv(&pw, Variant::H, MassSign::Minus).unwrap();
    assert!(system_residual(&ms, &h).passed());
}

#[test]
fn off_shell_control() {
    let ms = build_matrix_set();
    let mut pw = twenty_modes(6);
    for md in pw.modes.iter_mut() {
        md.omega *= 1.1;
    }
    let proca = proca_residual(&pw);
    let worst = proca.entries.iter().filter(|e| e.threshold > 0.0).map(|e| e.value).fold(0.0, f64::max);
    assert!(worst >= CONTROL_MIN);
    let uv = derive_uv(&pw, Variant::H, MassSign::Minus).unwrap();
    let r = system_residual_values(&ms, &uv, 1.0);
    println!("off shell: {r:?}");
    assert!(r.dynamics >= CONTROL_MIN);
}

#[test]
fn sign_findings() {
    let ms = build_matrix_set();
    let pw = twenty_modes(7);
    let ok = |v, s, roles, b: f64| system_residual_values(&ms, &derive_uv(&pw, v, s).unwrap().with_roles(roles), b).dynamics <= SYSTEM_TOL;
    // H-chain: σ = - with the standard mass matrix, σ = + with -b.
    assert!(ok(Variant::H, MassSign::Minus, Roles::Direct, 1.0));
    assert!(ok(Variant::H, MassSign::Plus, Roles::Direct, -1.0));
    assert!(!ok(Variant::H, MassSign::Plus, Roles::Direct, 1.0));
    // E-chain: roles swapped; original σ = - with b.
    assert!(ok(Variant::E, MassSign::Minus, Roles::Swapped, 1.0));
    assert!(ok(Variant::E, MassSign::Plus, Roles::Swapped, -1.0));
    assert!(!ok(Variant::E, MassSign::Minus, Roles::Direct, 1.0));
    // A-chain: direct roles; the conjugate σ = - with b, original σ = + with -b.
    assert!(ok(Variant::A, MassSign::Minus, Roles::Direct, 1.0));
    assert!(ok(Variant::A, MassSign::Plus, Roles::Direct, -1.0));
    assert!(!ok(Variant::A, MassSign::Plus, Roles::Direct, 1.0));
    for v in [Variant::H, Variant::E, Variant::A] {
        let rep = sign_search(&ms, &pw, v).unwrap();
        println!("{}: {:?}", v.label(), rep.findings);
        assert!(rep.passed());
    }
}

#[test]
fn maxwell_limit() {
    let pw = PlaneWavePotential::random_lorenz(&grid(), 0.0, 20, 3, 8).unwrap();
    let uv = derive_uv(&pw, Variant::H, MassSign::Minus).unwrap();
    let r = maxwell_residual(&uv);
    println!("maxwell {r:e}");
    assert!(r <= MAXWELL_TOL);
    let massive = derive_uv(&twenty_modes(8), Variant::H, MassSign::Minus).unwrap();
    assert!(maxwell_residual(&massive) >= CONTROL_MIN);
}
