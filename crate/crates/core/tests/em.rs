use std::f64::consts::TAU;
use std::time::Instant;

use spin1::dynamics::{apply_free_hamiltonian, evolve_free, kgf_residual};
use spin1::em::*;
use spin1::fields::{
    project_wave_transverse, random_wave_field, BandLimit, Grid, VectorField, WaveField, C64, I, ZERO,
};
use spin1::Error;

fn term(n: [i64; 3], cos: f64, sin: f64) -> FourierTerm {
    FourierTerm { n, cos, sin }
}

fn magnetic_spec() -> PotentialSpec {
    PotentialSpec {
        phi: vec![],
        a: VectorSeries {
            x: vec![term([0, 1, 0], 0.0, 0.4), term([0, 0, 1], 0.2, 0.0)],
            y: vec![term([0, 0, 1], 0.3, 0.0), term([1, 0, 0], 0.0, -0.25)],
            z: vec![term([1, 0, 0], 0.0, 0.2), term([1, 1, 0], 0.15, 0.0)],
        },
    }
}

fn electric_spec() -> PotentialSpec {
    PotentialSpec {
        phi: vec![term([1, 0, 0], 0.5, 0.0), term([0, 1, 1], 0.0, 0.3)],
        a: VectorSeries::default(),
    }
}

fn mixed_spec() -> PotentialSpec {
    let mut s = magnetic_spec();
    s.phi = electric_spec().phi;
    s
}

fn field(n: usize, e: f64, spec: &PotentialSpec) -> ExternalField {
    ExternalField::from_spec(Grid::cubic(n, TAU).unwrap(), e, spec).unwrap()
}

fn random(g: Grid, seed: u64) -> WaveField {
    random_wave_field(g, 1.0, BandLimit::new(1.0, seed), false)
}

#[test]
fn zero_field_matches_free_hamiltonian() {
    let g = Grid::cubic(12, TAU).unwrap();
    let ext = ExternalField::zero(g, 0.7);
    let psi = random(g, 3);
    let a = apply_hamiltonian_a(&psi, &ext).unwrap();
    assert!(a.relative_distance(&apply_free_hamiltonian(&psi)) <= 1e-13);
}

#[test]
fn constant_potential_shifts_momentum() {
    let g = Grid::cubic(8, TAU).unwrap();
    let (e, a0) = (0.5, 0.8);
    let z = vec![0.0; g.len()];
    let ext = ExternalField::new(g, e, z.clone(), [z.clone(), z, vec![a0; g.len()]]).unwrap();
    let k = [1.0, -2.0, 3.0];
    let pol = [
        C64::new(0.3, 0.1),
        C64::new(-0.2, 0.5),
        C64::new(0.7, 0.0),
        C64::new(0.1, -0.4),
        C64::new(0.0, 0.9),
        C64::new(-0.6, 0.2),
    ];
    let wave = |p: [C64; 6]| {
        let u = VectorField::from_fn(g, |x| {
            let ph = C64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            [p[0] * ph, p[1] * ph, p[2] * ph]
        });
        let v = VectorField::from_fn(g, |x| {
            let ph = C64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            [p[3] * ph, p[4] * ph, p[5] * ph]
        });
        WaveField::new(u, v, 1.0).unwrap()
    };
    let out = apply_hamiltonian_a(&wave(pol), &ext).unwrap();
    let shifted = spin1::dynamics::apply_symbol([k[0], k[1], k[2] - e * a0], 1.0, pol);
    assert!(out.relative_distance(&wave(shifted)) <= 1e-13);
}

#[test]
fn generator_is_hermitian() {
    let ext = field(16, 0.6, &mixed_spec());
    let a = random(ext.grid, 1);
    let b = random(ext.grid, 2);
    let lhs = a.inner(&apply_generator(&b, &ext).unwrap());
    let rhs = apply_generator(&a, &ext).unwrap().inner(&b);
    let gap = (lhs - rhs).norm() / lhs.norm();
    println!("hermiticity gap {gap:e}");
    assert!(gap <= 1e-12);
}

#[test]
fn projection_zero_field_and_fixed_point() {
    let g = Grid::cubic(16, TAU).unwrap();
    let ext = ExternalField::zero(g, 1.0);
    let psi = random(g, 4);
    let (p, rep) = covariant_project(&psi, &ext).unwrap();
    let d = p.sub(&project_wave_transverse(&psi));
    let diff = d.u.max_abs().max(d.v.max_abs());
    println!("zero-field projection diff {diff:e} iterations {:?}", rep.iterations);
    assert!(diff <= 1e-13);

    let ext = field(16, 0.5, &magnetic_spec());
    let (p1, _) = covariant_project(&psi, &ext).unwrap();
    let (p2, rep2) = covariant_project(&p1, &ext).unwrap();
    let r = p2.relative_distance(&p1);
    println!("fixed point {r:e} iterations {:?}", rep2.iterations);
    assert!(r <= 1e-12);
}

#[test]
fn projection_converges_and_is_idempotent() {
    let ext = field(24, 0.5, &magnetic_spec());
    let psi = random(ext.grid, 5);
    let t0 = Instant::now();
    let (p, rep) = covariant_project(&psi, &ext).unwrap();
    println!("projection {rep:?} in {:?}", t0.elapsed());
    for b in 0..2 {
        assert!(rep.residual[b] <= rep.tolerance[b]);
    }
    let res = covariant_residuals(&p, &ext);
    let scale = psi.u.max_abs().max(psi.v.max_abs());
    assert!(res[0].max(res[1]) <= 1e-10 * scale);
    let (pp, _) = covariant_project(&p, &ext).unwrap();
    assert!(pp.relative_distance(&p) <= 1e-9);
}

#[test]
fn projection_reports_non_convergence() {
    // A potential this strong makes π·π badly conditioned for the free preconditioner.
    let mut spec = magnetic_spec();
    for t in spec.a.x.iter_mut().chain(spec.a.y.iter_mut()).chain(spec.a.z.iter_mut()) {
        t.cos *= 400.0;
        t.sin *= 400.0;
    }
    let ext = field(8, 1.0, &spec);
    let psi = random(ext.grid, 6);
    match covariant_project(&psi, &ext) {
        Err(Error::NoConvergence { iterations, .. }) => assert_eq!(iterations, PROJECTION_MAX_ITER),
        Ok((_, rep)) => {
            // Converged after all; the result must then honour the tolerance.
            assert!(rep.residual[0] <= rep.tolerance[0] && rep.residual[1] <= rep.tolerance[1]);
        }
        Err(e) => panic!("unexpected {e}"),
    }
}

#[test]
fn squared_hamiltonian_unconditional_with_control() {
    let ext = field(24, 0.3, &magnetic_spec());
    let s = TrialSettings {
        mass: 1.0,
        trials: 10,
        seed: 17,
        k_cutoff: 1.0,
    };
    let t0 = Instant::now();
    let rep = squared_hamiltonian_check(&ext, &s).unwrap();
    println!("{rep:?} in {:?}", t0.elapsed());
    assert!(rep.passed());
    let massless = squared_hamiltonian_check(&ext, &TrialSettings { mass: 0.0, ..s }).unwrap();
    assert!(massless.passed());
}

#[test]
fn spin_field_identity_needs_the_constraints() {
    let ext = field(24, 0.5, &magnetic_spec());
    let s = TrialSettings {
        mass: 1.0,
        trials: 3,
        seed: 23,
        k_cutoff: 1.0,
    };
    let t0 = Instant::now();
    let rep = spin_field_check(&ext, &s).unwrap();
    println!("{rep:?} in {:?}", t0.elapsed());
    assert!(rep.passed());
}

#[test]
fn spin_field_identity_free_transverse_case() {
    let ext = field(12, 0.5, &electric_spec());
    let psi = project_wave_transverse(&random(ext.grid, 8));
    assert!(spin_field_residual(&psi, &ext).unwrap() <= 1e-12);
}

#[test]
fn zero_field_rk4_is_fourth_order() {
    let g = Grid::cubic(12, TAU).unwrap();
    let ext = ExternalField::zero(g, 1.0);
    let psi = random(g, 9);
    let t = 0.4;
    let exact = evolve_free(&psi, t);
    let err = |steps: usize| {
        let tr = evolve_em(&psi, &ext, t / steps as f64, steps, steps).unwrap();
        tr.final_state.unwrap().relative_distance(&exact)
    };
    let (e1, e2) = (err(10), err(20));
    println!("rk4 errors {e1:e} {e2:e} ratio {}", e1 / e2);
    assert!((14.0..=18.0).contains(&(e1 / e2)));
}

#[test]
fn constant_scalar_potential_is_a_phase() {
    let g = Grid::cubic(12, TAU).unwrap();
    let (e, phi0) = (0.8, 0.6);
    let z = vec![0.0; g.len()];
    let ext = ExternalField::new(g, e, vec![phi0; g.len()], [z.clone(), z.clone(), z]).unwrap();
    let psi = random(g, 10);
    let t = 0.5;
    let oracle = evolve_free(&psi, t).scaled((-I * e * phi0 * t).exp());
    let err = |steps: usize| {
        let tr = evolve_em(&psi, &ext, t / steps as f64, steps, steps).unwrap();
        tr.final_state.unwrap().relative_distance(&oracle)
    };
    let (e1, e2) = (err(20), err(40));
    println!("phase oracle {e1:e} {e2:e}");
    assert!(e1 <= 1e-5 && (14.0..=18.0).contains(&(e1 / e2)));
}

#[test]
fn norm_drift_over_1000_steps() {
    let ext = field(12, 0.5, &mixed_spec());
    let (psi, _) = covariant_project(&random(ext.grid, 11), &ext).unwrap();
    let dt = 0.01;
    assert!(dt <= stability_bound(&ext, 1.0));
    let t0 = Instant::now();
    let tr = evolve_em(&psi, &ext, dt, 1000, 250).unwrap();
    let p0 = tr.records[0].total_probability;
    let drift = tr
        .records
        .iter()
        .map(|r| (r.total_probability - p0).abs() / p0)
        .fold(0.0, f64::max);
    let e0 = tr.records[0].energy;
    let edrift = tr.records.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max);
    for r in &tr.records {
        println!(
            "t={:.2} P={:.15} E={:.12} pi.u={:.2e} pi.v={:.2e} cont={:.2e}",
            r.time, r.total_probability, r.energy, r.div_u_res, r.div_v_res, r.continuity_res
        );
    }
    println!("norm drift {drift:e} energy drift {edrift:e} in {:?}", t0.elapsed());
    assert_eq!(tr.records.len(), 5);
    assert!(drift <= 1e-8);
}

#[test]
fn step_and_grid_errors() {
    let ext = field(8, 0.5, &mixed_spec());
    let psi = random(ext.grid, 12);
    let bound = stability_bound(&ext, 1.0);
    assert!(matches!(
        evolve_em(&psi, &ext, 2.0 * bound, 1, 1),
        Err(Error::StepTooLarge { .. })
    ));
    assert!(matches!(
        second_order_residual(&psi, &ext, 2.0 * bound),
        Err(Error::StepTooLarge { .. })
    ));
    let other = random(Grid::cubic(4, TAU).unwrap(), 1);
    assert!(matches!(evolve_em(&other, &ext, 0.5 * bound, 1, 1), Err(Error::GridMismatch(_))));
}

#[test]
fn gauge_covariance() {
    let ext = field(24, 0.7, &mixed_spec());
    let g = ext.grid;
    let chi: Vec<f64> = (0..g.len())
        .map(|i| {
            let x = g.position(i);
            0.3 * x[0].sin() + 0.2 * (x[1] + x[2]).cos()
        })
        .collect();
    let psi = random_wave_field(g, 1.0, BandLimit::new(0.7, 13), false);
    let dt = 0.02;
    let steps = 25;
    let gap = gauge_covariance_check(&psi, &ext, &chi, dt, steps).unwrap();
    // Integrator error at the same step, against a step four times smaller.
    let coarse = evolve_em(&psi, &ext, dt, steps, steps).unwrap().final_state.unwrap();
    let fine = evolve_em(&psi, &ext, dt / 4.0, 4 * steps, 4 * steps)
        .unwrap()
        .final_state
        .unwrap();
    let integ = coarse.relative_distance(&fine);
    println!("gauge gap {gap:e} integrator error {integ:e}");
    assert!(gap <= integ);
    assert!(gap <= 1e-10);
}

fn second_order_ratio(ext: &ExternalField, seed: u64) -> (f64, f64) {
    let (psi, _) = covariant_project(&random(ext.grid, seed), ext).unwrap();
    let dt = 0.25 * stability_bound(ext, 1.0);
    let r1 = second_order_residual(&psi, ext, dt).unwrap();
    let r2 = second_order_residual(&psi, ext, dt / 2.0).unwrap();
    (r1, r1 / r2)
}

#[test]
fn second_order_equation_magnetic() {
    let ext = field(16, 0.5, &magnetic_spec());
    let (r, ratio) = second_order_ratio(&ext, 14);
    println!("second order, A only: {r:e} ratio {ratio}");
    assert!((3.5..=4.5).contains(&ratio));
}

#[test]
fn second_order_equation_electric() {
    let ext = field(16, 0.5, &electric_spec());
    let (r, ratio) = second_order_ratio(&ext, 15);
    println!("second order, phi only: {r:e} ratio {ratio}");
    assert!((3.5..=4.5).contains(&ratio));
}

#[test]
fn second_order_free_limit() {
    let g = Grid::cubic(12, TAU).unwrap();
    let ext = ExternalField::zero(g, 1.0);
    let psi = project_wave_transverse(&random(g, 16));
    assert!(kgf_residual(&psi).transverse_res <= 1e-12);
    let r1 = second_order_residual(&psi, &ext, 1e-3).unwrap();
    let r2 = second_order_residual(&psi, &ext, 5e-4).unwrap();
    println!("free second order {r1:e} {r2:e}");
    assert!(r1 <= 1e-6 && (3.5..=4.5).contains(&(r1 / r2)));
    let zero = WaveField::zeros(g, 1.0);
    assert_eq!(second_order_residual(&zero, &ext, 1e-3).unwrap(), 0.0);
}

#[test]
fn landau_levels() {
    let t0 = Instant::now();
    let a = landau_spectrum(&LandauConfig::default()).unwrap();
    println!("landau in {:?}", t0.elapsed());
    for c in &a.clusters {
        println!(
            "E2-m2 {:.4} count {} rank {:?} constrained u {:?}",
            c.e2_mean - 1.0,
            c.count,
            c.rank,
            c.constrained[0]
        );
    }
    for l in &a.levels {
        println!("{l:?}");
    }
    for e in &a.report.entries {
        println!("{} {} {}", e.name, e.value, e.passed);
    }
    assert_eq!(a.e2.len(), 1536);
    assert!(a.e2.windows(2).all(|w| w[0] <= w[1]));
    assert!(a.report.passed());
    let _ = ZERO;
}
