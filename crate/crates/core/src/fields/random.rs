use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{project_transverse, Grid, ScalarField, VectorField, WaveField, C64};

/// Gaussian spectral envelope `exp(-|k|²/(2 k_c²))`, restricted to the 2/3 band
/// and with Nyquist modes removed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandLimit {
    pub k_cutoff: f64,
    pub seed: u64,
}

impl BandLimit {
    pub fn new(k_cutoff: f64, seed: u64) -> Self {
        Self { k_cutoff, seed }
    }
}

fn envelope(grid: &Grid, idx: usize, kc: f64) -> f64 {
    if grid.touches_nyquist(idx) || !grid.in_dealiased_band(idx) {
        return 0.0;
    }
    let k = grid.wavevector(idx);
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    (-k2 / (2.0 * kc * kc)).exp()
}

fn random_spectrum(grid: &Grid, blocks: usize, band: BandLimit, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let n = grid.len();
    let mut spec = vec![C64::new(0.0, 0.0); blocks * n];
    for b in 0..blocks {
        for i in 0..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            spec[b * n + i] = C64::new(re, im) * envelope(grid, i, band.k_cutoff);
        }
    }
    spec
}

/// Rescale so that the mean of `|f|²` over all samples is one.
fn unit_rms(data: &mut [C64]) {
    let ms = data.iter().map(|z| z.norm_sqr()).sum::<f64>() / data.len() as f64;
    if ms > 0.0 {
        let s = 1.0 / ms.sqrt();
        data.iter_mut().for_each(|z| *z *= s);
    }
}

pub fn random_scalar_field(grid: Grid, band: BandLimit) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(band.seed);
    let spec = random_spectrum(&grid, 1, band, &mut rng);
    let mut f = ScalarField::from_spectral(grid, spec);
    unit_rms(&mut f.data);
    f
}

pub fn random_vector_field(grid: Grid, band: BandLimit) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(band.seed);
    let spec = random_spectrum(&grid, 3, band, &mut rng);
    let mut f = VectorField::from_spectral(grid, spec);
    unit_rms(&mut f.data);
    f
}

/// Random smooth wave function. With `transverse`, both blocks are projected
/// onto zero divergence before normalization to unit norm.
pub fn random_wave_field(grid: Grid, mass: f64, band: BandLimit, transverse: bool) -> WaveField {
    let mut u = random_vector_field(grid, band);
    let mut v = random_vector_field(grid, BandLimit::new(band.k_cutoff, band.seed ^ 0x9e37_79b9_7f4a_7c15));
    if transverse {
        u = project_transverse(&u);
        v = project_transverse(&v);
    }
    let psi = WaveField {
        grid,
        u,
        v,
        mass,
    };
    let nrm = psi.norm();
    psi.scaled(C64::new(1.0 / nrm, 0.0))
}
