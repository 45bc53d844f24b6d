use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use spin1::algebra::{build_matrix_set, numerical_spectrum, verify_all};
use spin1::chain::{
    chain_report, derive_uv, maxwell_residual, proca_residual, MassSign, PlaneWavePotential, Roles, Variant,
    MAXWELL_TOL,
};
use spin1::dynamics::{diagnostics_with_continuity, omega_max, DiagnosticsRecord, FreePropagator};
use spin1::em::{
    apply_generator, covariant_project, evolve_em, squared_hamiltonian_check, spin_field_check, landau_spectrum,
    ExternalField, LandauConfig, TrialSettings,
};
use spin1::fields::{random_wave_field, BandLimit, Grid, WaveField, C64};
use spin1::report::ResidualReport;

use crate::config::{EmCheckConfig, InitialCondition, SimConfig, Validated};
use crate::snapshot::{read_snapshot, write_snapshot, VERSION};
use crate::{CliError, Cli, Command, SignArg, VariantArg, EXIT_FAILED, EXIT_OK};

const GENERATOR_HERMITICITY_TOL: f64 = 1e-12;

pub(crate) fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::VerifyAlgebra => verify_algebra(cli.json),
        Command::Dispersion { m, k } => dispersion(cli.json, *m, k),
        Command::ChainCheck {
            seed,
            modes,
            mass,
            variant,
            mass_sign,
        } => chain_check(*seed, *modes, *mass, *variant, *mass_sign),
        Command::Evolve { config, out, diag } => evolve(config, out.as_deref(), diag.as_deref()),
        Command::EmCheck { config } => em_check(config),
        Command::Landau {
            grid,
            flux,
            mass,
            charge,
            length,
            csv,
        } => landau(*grid, *flux, *mass, *charge, *length, csv.as_deref()),
        Command::SnapshotInfo { path } => snapshot_info(path),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::failed(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::failed(e.to_string())),
        _ => Ok(()),
    }
}

fn exit_for(passed: bool) -> i32 {
    if passed {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn verify_algebra(json: bool) -> Result<i32, CliError> {
    let rep = verify_all(&build_matrix_set());
    if json {
        print_json(&rep)?;
    } else {
        let mut out = std::io::stdout().lock();
        for c in &rep.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{tag} {} (max deviation {:e})", c.identity_name, c.max_abs_deviation);
        }
    }
    Ok(exit_for(rep.all_passed()))
}

fn dispersion(json: bool, m: f64, k: &[f64]) -> Result<i32, CliError> {
    if k.len() != 3 || !k.iter().all(|x| x.is_finite()) {
        return Err(CliError::usage("--k takes three finite components x,y,z"));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(CliError::usage(format!("--m must be finite and >= 0, got {m}")));
    }
    let kv = [k[0], k[1], k[2]];
    let ev = numerical_spectrum(&build_matrix_set(), kv, m);
    if json {
        print_json(&serde_json::json!({ "k": kv, "m": m, "eigenvalues": ev }))?;
    } else {
        let mut out = std::io::stdout().lock();
        for e in ev {
            let _ = writeln!(out, "{e:.15}");
        }
    }
    Ok(EXIT_OK)
}

fn variant_of(v: VariantArg) -> Variant {
    match v {
        VariantArg::H => Variant::H,
        VariantArg::E => Variant::E,
        VariantArg::A => Variant::A,
    }
}

fn sign_of(s: SignArg) -> MassSign {
    match s {
        SignArg::Plus => MassSign::Plus,
        SignArg::Minus => MassSign::Minus,
    }
}

fn chain_check(seed: u64, modes: usize, mass: f64, variant: VariantArg, sign: SignArg) -> Result<i32, CliError> {
    if !(mass >= 0.0 && mass.is_finite()) {
        return Err(CliError::usage(format!("--mass must be finite and >= 0, got {mass}")));
    }
    if modes == 0 {
        return Err(CliError::usage("--modes must be >= 1"));
    }
    let grid = Grid::cubic(16, TAU).map_err(|e| CliError::usage(e.to_string()))?;
    let pw = PlaneWavePotential::random_lorenz(&grid, mass, modes, 3, seed).map_err(|e| CliError::usage(e.to_string()))?;
    let (variant, sign) = (variant_of(variant), sign_of(sign));
    let mut rep = ResidualReport::new(format!("chain check: {} mass sign {}", variant.label(), sign.symbol()));
    rep.merge(proca_residual(&pw));
    rep.merge(chain_report(&build_matrix_set(), &pw, variant, sign).map_err(|e| CliError::failed(e.to_string()))?);
    if mass == 0.0 {
        let uv = derive_uv(&pw, Variant::H, MassSign::Minus).map_err(|e| CliError::failed(e.to_string()))?;
        rep.at_most("maxwell limit residual", maxwell_residual(&uv), MAXWELL_TOL);
    }
    print_json(&rep)?;
    Ok(exit_for(rep.passed()))
}

fn initial_state(v: &Validated) -> Result<WaveField, CliError> {
    let cfg = &v.config;
    match &cfg.initial_condition {
        InitialCondition::RandomBandLimited {
            seed,
            k_cutoff,
            transverse,
        } => {
            let psi = random_wave_field(v.grid, cfg.mass, BandLimit::new(*k_cutoff, *seed), *transverse);
            match (&v.external, transverse) {
                (Some(ext), true) => {
                    let (p, _) = covariant_project(&psi, ext).map_err(|e| CliError::failed(e.to_string()))?;
                    let n = p.norm();
                    if !(n > 0.0) {
                        return Err(CliError::failed("covariant projection removed the whole initial state"));
                    }
                    Ok(p.scaled(C64::new(1.0 / n, 0.0)))
                }
                _ => Ok(psi),
            }
        }
        InitialCondition::PlaneModes {
            seed,
            modes,
            max_n,
            variant,
            mass_sign,
        } => {
            let pw = PlaneWavePotential::random_lorenz(&v.grid, cfg.mass, *modes, *max_n, *seed)
                .map_err(|e| CliError::usage(e.to_string()))?;
            let uv = derive_uv(&pw, *variant, *mass_sign).map_err(|e| CliError::failed(e.to_string()))?;
            let roles = if *variant == Variant::E {
                Roles::Swapped
            } else {
                Roles::Direct
            };
            Ok(uv.with_roles(roles).sample(&v.grid, 0.0))
        }
    }
}

fn write_csv(path: &Path, records: &[DiagnosticsRecord]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::failed(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record([
        "t",
        "total_probability",
        "energy",
        "jx",
        "jy",
        "jz",
        "div_u_res",
        "div_v_res",
        "continuity_res",
    ])
    .map_err(io)?;
    for r in records {
        let row = [
            r.time,
            r.total_probability,
            r.energy,
            r.total_current[0],
            r.total_current[1],
            r.total_current[2],
            r.div_u_res,
            r.div_v_res,
            r.continuity_res,
        ];
        w.write_record(row.iter().map(|x| format!("{x:e}"))).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::failed(e.to_string()))
}

#[derive(Serialize)]
struct EvolveSummary<'a> {
    steps: usize,
    dt: f64,
    t_final: f64,
    coupled: bool,
    records: usize,
    initial: &'a DiagnosticsRecord,
    last: &'a DiagnosticsRecord,
}

fn evolve(config: &Path, out: Option<&Path>, diag: Option<&Path>) -> Result<i32, CliError> {
    let v = SimConfig::load(config)
        .and_then(SimConfig::validate)
        .map_err(CliError::usage)?;
    let snap_path = out.map(Path::to_path_buf).or_else(|| v.config.output.snapshot.clone());
    let diag_path = diag.map(Path::to_path_buf).or_else(|| v.config.output.diagnostics.clone());
    let psi0 = initial_state(&v)?;
    let ev = v.config.evolution;
    let run_err = |e: spin1::Error| CliError::failed(e.to_string());
    let (records, last) = match &v.external {
        Some(ext) => {
            let traj = evolve_em(&psi0, ext, ev.dt, v.steps, ev.diag_stride).map_err(run_err)?;
            (traj.records, traj.final_state.expect("evolve_em keeps the final state"))
        }
        None => {
            let prop = FreePropagator::new(v.grid, v.config.mass);
            let dc = ev.dt.min(0.05 / omega_max(&v.grid, v.config.mass));
            let mut at: Vec<usize> = (0..=v.steps).step_by(ev.diag_stride).collect();
            if *at.last().unwrap() != v.steps {
                at.push(v.steps);
            }
            let mut records = Vec::with_capacity(at.len());
            let mut last = psi0.clone();
            for s in at {
                let t = s as f64 * ev.dt;
                let psi = if s == 0 { psi0.clone() } else { prop.evolve(&psi0, t) };
                records.push(diagnostics_with_continuity(&prop, &psi, dc).map_err(run_err)?.at_time(t));
                last = psi;
            }
            (records, last)
        }
    };
    if let Some(p) = &diag_path {
        write_csv(p, &records)?;
    }
    if let Some(p) = &snap_path {
        write_snapshot(p, &last, v.steps as f64 * ev.dt).map_err(|e| CliError::failed(e.to_string()))?;
    }
    print_json(&EvolveSummary {
        steps: v.steps,
        dt: ev.dt,
        t_final: v.steps as f64 * ev.dt,
        coupled: v.external.is_some(),
        records: records.len(),
        initial: &records[0],
        last: records.last().unwrap(),
    })?;
    Ok(EXIT_OK)
}

fn hermiticity_gap(ext: &ExternalField, s: &TrialSettings) -> Result<f64, spin1::Error> {
    let a = random_wave_field(ext.grid, s.mass, BandLimit::new(s.k_cutoff, s.seed ^ 0x5eed), false);
    let b = random_wave_field(ext.grid, s.mass, BandLimit::new(s.k_cutoff, s.seed ^ 0xface), false);
    let lhs = a.inner(&apply_generator(&b, ext)?);
    let rhs = apply_generator(&a, ext)?.inner(&b);
    Ok((lhs - rhs).norm() / lhs.norm().max(f64::MIN_POSITIVE))
}

fn em_check(config: &Path) -> Result<i32, CliError> {
    let cfg = EmCheckConfig::load(config).map_err(CliError::usage)?;
    let grid = cfg.grid.build().map_err(CliError::usage)?;
    let ext = ExternalField::from_spec(grid, cfg.charge, &cfg.potential).map_err(|e| CliError::usage(e.to_string()))?;
    let s = TrialSettings {
        mass: cfg.mass,
        trials: cfg.trials,
        seed: cfg.seed,
        k_cutoff: cfg.k_cutoff,
    };
    let err = |e: spin1::Error| CliError::failed(e.to_string());
    let mut rep = ResidualReport::new("coupled-field identities");
    rep.merge(squared_hamiltonian_check(&ext, &s).map_err(err)?);
    rep.merge(spin_field_check(&ext, &s).map_err(err)?);
    rep.at_most("generator hermiticity gap", hermiticity_gap(&ext, &s).map_err(err)?, GENERATOR_HERMITICITY_TOL);
    print_json(&rep)?;
    Ok(exit_for(rep.passed()))
}

fn landau(grid: usize, flux: u32, mass: f64, charge: f64, length: Option<f64>, csv_path: Option<&Path>) -> Result<i32, CliError> {
    let cfg = LandauConfig {
        n: grid,
        flux,
        mass,
        charge,
        length: length.unwrap_or(LandauConfig::default().length),
    };
    let a = landau_spectrum(&cfg).map_err(|e| CliError::usage(e.to_string()))?;
    if let Some(p) = csv_path {
        let io = |e: csv::Error| CliError::failed(format!("cannot write {}: {e}", p.display()));
        let mut w = csv::Writer::from_path(p).map_err(io)?;
        w.write_record(["index", "e2"]).map_err(io)?;
        for (i, e) in a.e2.iter().enumerate() {
            w.write_record([i.to_string(), format!("{e:e}")]).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::failed(e.to_string()))?;
    }
    print_json(&a)?;
    Ok(exit_for(a.report.passed()))
}

fn snapshot_info(path: &Path) -> Result<i32, CliError> {
    let s = read_snapshot(path).map_err(|e| CliError::usage(e.to_string()))?;
    let g = s.psi.grid;
    print_json(&serde_json::json!({
        "version": VERSION,
        "shape": g.shape(),
        "lengths": g.lengths(),
        "mass": s.psi.mass,
        "time": s.time,
        "norm": s.psi.norm(),
    }))?;
    Ok(EXIT_OK)
}
