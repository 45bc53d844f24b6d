use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{dot_real, Grid, C64, ZERO};

pub const DEFAULT_MODE_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

/// One plane-wave mode `amplitude · eps · e^{i(k·x - ωt)}` of the four-potential,
/// `eps = (φ, A_x, A_y, A_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialMode {
    pub k: [f64; 3],
    pub omega: f64,
    pub eps: [C64; 4],
    pub amplitude: C64,
}

impl PotentialMode {
    /// Mode with `ω = branch·√(k² + m²)`.
    pub fn on_shell(k: [f64; 3], branch: Branch, eps: [C64; 4], amplitude: C64, m: f64) -> Self {
        let omega = branch.sign() * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + m * m).sqrt();
        Self {
            k,
            omega,
            eps,
            amplitude,
        }
    }

    /// On-shell mode whose scalar part is fixed by `ω φ = k·A`.
    pub fn lorenz(k: [f64; 3], branch: Branch, avec: [C64; 3], m: f64) -> Self {
        let mut mode = Self::on_shell(k, branch, [ZERO, avec[0], avec[1], avec[2]], C64::new(1.0, 0.0), m);
        mode.eps[0] = dot_real(k, avec) / mode.omega;
        mode
    }

    pub fn phi(&self) -> C64 {
        self.amplitude * self.eps[0]
    }

    pub fn avec(&self) -> [C64; 3] {
        [
            self.amplitude * self.eps[1],
            self.amplitude * self.eps[2],
            self.amplitude * self.eps[3],
        ]
    }

    pub fn k_norm(&self) -> f64 {
        (self.k[0] * self.k[0] + self.k[1] * self.k[1] + self.k[2] * self.k[2]).sqrt()
    }

    /// `|ω φ - k·A|`.
    pub fn lorenz_violation(&self) -> f64 {
        (self.phi() * self.omega - dot_real(self.k, self.avec())).norm()
    }

    /// `|ω² - k² - m²|`.
    pub fn shell_violation(&self, m: f64) -> f64 {
        let k2 = self.k_norm().powi(2);
        (self.omega * self.omega - k2 - m * m).abs()
    }

    /// Largest potential component magnitude.
    pub fn scale(&self) -> f64 {
        self.eps
            .iter()
            .map(|e| (e * self.amplitude).norm())
            .fold(0.0, f64::max)
    }
}

/// Finite superposition of four-potential plane waves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneWavePotential {
    pub mass: f64,
    pub modes: Vec<PotentialMode>,
}

impl PlaneWavePotential {
    pub fn new(mass: f64, modes: Vec<PotentialMode>) -> Result<Self> {
        Self::with_cap(mass, modes, DEFAULT_MODE_CAP)
    }

    pub fn with_cap(mass: f64, modes: Vec<PotentialMode>, cap: usize) -> Result<Self> {
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass must be >= 0, got {mass}")));
        }
        if modes.len() > cap {
            return Err(Error::InvalidArgument(format!(
                "{} modes exceed the cap of {cap}",
                modes.len()
            )));
        }
        Ok(Self { mass, modes })
    }

    pub fn zero(mass: f64) -> Self {
        Self {
            mass,
            modes: Vec::new(),
        }
    }

    /// Seeded on-shell modes obeying the Lorenz condition, with wavevectors on
    /// the lattice of `grid` (integer mode numbers in `[-max_n, max_n]`, never
    /// all zero) and random branches.
    pub fn random_lorenz(grid: &Grid, mass: f64, n_modes: usize, max_n: i64, seed: u64) -> Result<Self> {
        if max_n < 1 {
            return Err(Error::InvalidArgument("max_n must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = grid.lengths();
        let mut modes = Vec::with_capacity(n_modes);
        while modes.len() < n_modes {
            let n: [i64; 3] = std::array::from_fn(|_| rng.random_range(-max_n..=max_n));
            if n == [0, 0, 0] {
                continue;
            }
            let k: [f64; 3] = std::array::from_fn(|d| std::f64::consts::TAU * n[d] as f64 / l[d]);
            let branch = if rng.random::<bool>() {
                Branch::Positive
            } else {
                Branch::Negative
            };
            let avec: [C64; 3] = std::array::from_fn(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re, im)
            });
            modes.push(PotentialMode::lorenz(k, branch, avec, mass));
        }
        Self::new(mass, modes)
    }

    pub fn scale(&self) -> f64 {
        self.modes.iter().map(|m| m.scale()).fold(0.0, f64::max)
    }
}
