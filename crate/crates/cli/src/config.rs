//! JSON configuration for `evolve` and `em-check`. Units: ħ = c = 1.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spin1::chain::{MassSign, Variant};
use spin1::em::{stability_bound, ExternalField, PotentialSpec};
use spin1::fields::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid, String> {
        Grid::new([self.nx, self.ny, self.nz], [self.lx, self.ly, self.lz]).map_err(|e| e.to_string())
    }
}

fn default_cutoff() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn default_max_n() -> i64 {
    2
}

fn default_variant() -> Variant {
    Variant::H
}

fn default_sign() -> MassSign {
    MassSign::Minus
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// Gaussian-envelope random field, normalized to `‖Ψ‖ = 1`.
    RandomBandLimited {
        seed: u64,
        #[serde(default = "default_cutoff")]
        k_cutoff: f64,
        #[serde(default = "yes")]
        transverse: bool,
    },
    /// Seeded Lorenz-gauge plane waves pushed through a chain.
    PlaneModes {
        seed: u64,
        modes: usize,
        #[serde(default = "default_max_n")]
        max_n: i64,
        #[serde(default = "default_variant")]
        variant: Variant,
        #[serde(default = "default_sign")]
        mass_sign: MassSign,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub t_final: f64,
    pub dt: f64,
    #[serde(default = "one")]
    pub diag_stride: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub snapshot: Option<PathBuf>,
    #[serde(default)]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub grid: GridConfig,
    pub mass: f64,
    #[serde(default)]
    pub charge: f64,
    pub initial_condition: InitialCondition,
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub external_field: Option<PotentialSpec>,
    #[serde(default)]
    pub output: OutputConfig,
}

/// A checked configuration with the derived objects it needs.
pub struct Validated {
    pub config: SimConfig,
    pub grid: Grid,
    pub external: Option<ExternalField>,
    pub steps: usize,
}

impl SimConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    pub fn validate(self) -> Result<Validated, String> {
        let grid = self.grid.build()?;
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return Err(format!("mass must be finite and >= 0, got {}", self.mass));
        }
        if !self.charge.is_finite() {
            return Err("charge must be finite".into());
        }
        let ev = self.evolution;
        if !(ev.dt > 0.0 && ev.dt.is_finite()) {
            return Err(format!("dt must be positive, got {}", ev.dt));
        }
        if !(ev.t_final >= 0.0 && ev.t_final.is_finite()) {
            return Err(format!("t_final must be >= 0, got {}", ev.t_final));
        }
        if ev.diag_stride == 0 {
            return Err("diag_stride must be >= 1".into());
        }
        let steps = (ev.t_final / ev.dt).round();
        if (steps * ev.dt - ev.t_final).abs() > 1e-9 * ev.t_final.max(ev.dt) {
            return Err(format!("t_final {} is not a multiple of dt {}", ev.t_final, ev.dt));
        }
        match &self.initial_condition {
            InitialCondition::RandomBandLimited { k_cutoff, .. } => {
                if !(*k_cutoff > 0.0 && k_cutoff.is_finite()) {
                    return Err(format!("k_cutoff must be positive, got {k_cutoff}"));
                }
            }
            InitialCondition::PlaneModes { modes, max_n, .. } => {
                if *modes == 0 || *max_n < 1 {
                    return Err("plane_modes needs modes >= 1 and max_n >= 1".into());
                }
            }
        }
        let external = match &self.external_field {
            Some(spec) => {
                let ext = ExternalField::from_spec(grid, self.charge, spec).map_err(|e| e.to_string())?;
                let bound = stability_bound(&ext, self.mass);
                if ev.dt > bound {
                    return Err(format!("dt {} exceeds the stability bound {bound}", ev.dt));
                }
                Some(ext)
            }
            None => None,
        };
        Ok(Validated {
            config: self,
            grid,
            external,
            steps: steps as usize,
        })
    }
}

/// Configuration of `em-check`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmCheckConfig {
    pub grid: GridConfig,
    pub mass: f64,
    pub charge: f64,
    pub potential: PotentialSpec,
    pub seed: u64,
    pub trials: usize,
    #[serde(default = "default_cutoff")]
    pub k_cutoff: f64,
}

impl EmCheckConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        if cfg.trials == 0 {
            return Err("trials must be >= 1".into());
        }
        if !(cfg.mass >= 0.0 && cfg.mass.is_finite()) || !cfg.charge.is_finite() {
            return Err("mass must be >= 0 and charge finite".into());
        }
        if !(cfg.k_cutoff > 0.0) {
            return Err("k_cutoff must be positive".into());
        }
        Ok(cfg)
    }
}
