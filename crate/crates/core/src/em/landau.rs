//! Spectrum of the squared Hamiltonian in a uniform magnetic field along z on
//! a two-dimensional staggered lattice with Peierls phases.
//!
//! Components are placed on a Yee-type layout: `u_x(½,0) u_y(0,½) u_z(0,0)`,
//! `v_x(0,½) v_y(½,0) v_z(½,½)` in units of the spacing `h`. The discrete curl
//! `R` maps the u-grid to the v-grid and `H = [[m, -iR†], [iR, -m]]`, so
//! `H² = diag(m² + R†R, m² + RR†)`. Landau gauge `A = (0, -Bx, 0)` with a
//! twisted wrap in x; the flux through the box is `eBL² = 2πN`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{C64, ZERO};
use crate::report::ResidualReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauConfig {
    /// Sites per side.
    pub n: usize,
    /// Flux quanta through the box.
    pub flux: u32,
    pub mass: f64,
    pub charge: f64,
    /// Box side.
    pub length: f64,
}

impl Default for LandauConfig {
    fn default() -> Self {
        Self {
            n: 16,
            flux: 1,
            mass: 1.0,
            charge: 1.0,
            length: std::f64::consts::TAU.sqrt(),
        }
    }
}

impl LandauConfig {
    /// `eB = sign(e) 2πN / L²`; zero for a neutral particle.
    pub fn eb(&self) -> f64 {
        if self.charge == 0.0 {
            0.0
        } else {
            self.charge.signum() * std::f64::consts::TAU * self.flux as f64 / (self.length * self.length)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidGrid(format!("landau lattice needs n >= 4, got {}", self.n)));
        }
        if !(self.length > 0.0 && self.length.is_finite()) || !self.mass.is_finite() || !self.charge.is_finite() {
            return Err(Error::InvalidArgument("landau parameters must be finite with L > 0".into()));
        }
        Ok(())
    }
}

/// One group of nearly degenerate `E²` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandauCluster {
    pub e2_mean: f64,
    pub e2_min: f64,
    pub e2_max: f64,
    pub count: usize,
    /// Dimension of the cluster restricted to the u and v blocks.
    pub rank: [usize; 2],
    /// `(‖Cw‖²/‖w‖², σ)` for the constrained states of each block.
    pub constrained: [Vec<(f64, f64)>; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauLevelCheck {
    pub level: u32,
    pub sigma: i32,
    /// `(E² - m²)/|eB|` predicted and measured.
    pub predicted: f64,
    pub measured: f64,
}

impl LandauLevelCheck {
    pub fn relative_error(&self) -> f64 {
        let d = (self.measured - self.predicted).abs();
        if self.predicted.abs() > 0.0 {
            d / self.predicted.abs()
        } else {
            d
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandauAnalysis {
    pub config: LandauConfig,
    pub eb: f64,
    /// All eigenvalues of `H²`, ascending.
    pub e2: Vec<f64>,
    pub clusters: Vec<LandauCluster>,
    pub levels: Vec<LandauLevelCheck>,
    pub report: ResidualReport,
}

pub const LEVEL_TOL: f64 = 0.05;
const CLUSTERS_ANALYSED: usize = 8;

struct Lattice {
    n: usize,
    h: f64,
    l: f64,
    eb: f64,
}

impl Lattice {
    fn idx(&self, i: usize, j: usize) -> usize {
        (i % self.n) + self.n * (j % self.n)
    }

    /// `(U ψ(r + d) - ψ(r))/h` for a scalar living at offset `off`.
    fn fwd(&self, d: usize, off: (f64, f64)) -> DMatrix<C64> {
        let (n, h, l, eb) = (self.n, self.h, self.l, self.eb);
        let mut m = DMatrix::from_element(n * n, n * n, ZERO);
        for j in 0..n {
            for i in 0..n {
                let r = self.idx(i, j);
                let (x, y) = ((i as f64 + off.0) * h, (j as f64 + off.1) * h);
                if d == 0 {
                    let ph = if i == n - 1 { C64::from_polar(1.0, eb * l * y) } else { C64::new(1.0, 0.0) };
                    m[(r, self.idx(i + 1, j))] += ph / h;
                } else {
                    m[(r, self.idx(i, j + 1))] += C64::from_polar(1.0, -eb * x * h) / h;
                }
                m[(r, r)] -= C64::new(1.0 / h, 0.0);
            }
        }
        m
    }

    /// `(ψ(r) - U ψ(r - d))/h` for a scalar living at offset `off`.
    fn bwd(&self, d: usize, off: (f64, f64)) -> DMatrix<C64> {
        let (n, h, l, eb) = (self.n, self.h, self.l, self.eb);
        let mut m = DMatrix::from_element(n * n, n * n, ZERO);
        for j in 0..n {
            for i in 0..n {
                let r = self.idx(i, j);
                let (x, y) = ((i as f64 + off.0) * h, (j as f64 + off.1) * h);
                m[(r, r)] += C64::new(1.0 / h, 0.0);
                if d == 0 {
                    let ph = if i == 0 { C64::from_polar(1.0, -eb * l * y) } else { C64::new(1.0, 0.0) };
                    m[(r, self.idx(i + n - 1, j))] -= ph / h;
                } else {
                    m[(r, self.idx(i, j + n - 1))] -= C64::from_polar(1.0, eb * x * h) / h;
                }
            }
        }
        m
    }

    /// Curl from the u-grid to the v-grid.
    fn curl(&self) -> DMatrix<C64> {
        let s = self.n * self.n;
        let mut r = DMatrix::from_element(3 * s, 3 * s, ZERO);
        let dy_z = self.fwd(1, (0.0, 0.0));
        let dx_z = self.fwd(0, (0.0, 0.0));
        let dy_x = self.fwd(1, (0.5, 0.0));
        let dx_y = self.fwd(0, (0.0, 0.5));
        r.view_mut((0, 2 * s), (s, s)).copy_from(&dy_z);
        r.view_mut((s, 2 * s), (s, s)).copy_from(&(-dx_z));
        r.view_mut((2 * s, 0), (s, s)).copy_from(&(-dy_x));
        r.view_mut((2 * s, s), (s, s)).copy_from(&dx_y);
        r
    }

    /// Covariant gradients whose adjoints are the divergences on each block.
    fn gradients(&self) -> [DMatrix<C64>; 2] {
        let s = self.n * self.n;
        let mut gu = DMatrix::from_element(3 * s, s, ZERO);
        gu.view_mut((0, 0), (s, s)).copy_from(&self.fwd(0, (0.0, 0.0)));
        gu.view_mut((s, 0), (s, s)).copy_from(&self.fwd(1, (0.0, 0.0)));
        let mut gv = DMatrix::from_element(3 * s, s, ZERO);
        gv.view_mut((0, 0), (s, s)).copy_from(&self.bwd(0, (0.5, 0.5)));
        gv.view_mut((s, 0), (s, s)).copy_from(&self.bwd(1, (0.5, 0.5)));
        [gu, gv]
    }
}

fn sorted_eigen(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// `2 Im Σ w_x* w_y / ‖w‖²`, the z spin of one block.
fn spin_z(w: &[C64], s: usize) -> f64 {
    let num: f64 = (0..s).map(|i| (w[i].conj() * w[s + i]).im).sum();
    let den: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    2.0 * num / den
}

/// Constrained states inside the span of `q` (orthonormal columns).
fn constrained_states(q: &DMatrix<C64>, grad: &DMatrix<C64>, threshold: f64, s: usize) -> Vec<(f64, f64)> {
    if q.ncols() == 0 {
        return Vec::new();
    }
    let y = grad.adjoint() * q;
    let (viol, vecs) = sorted_eigen(y.adjoint() * &y);
    viol.iter()
        .enumerate()
        .filter(|(_, &v)| v < threshold)
        .map(|(k, &v)| {
            let w = q * vecs.column(k);
            (v.max(0.0), spin_z(w.as_slice(), s))
        })
        .collect()
}

/// Group ascending values whose consecutive gaps are below `tol`.
fn cluster_ranges(e2: &[f64], tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=e2.len() {
        if k == e2.len() || e2[k] - e2[k - 1] >= tol {
            out.push((start, k));
            start = k;
        }
    }
    out
}

/// Diagonalize `H²` and classify its lowest clusters by spin and constraint.
pub fn landau_spectrum(cfg: &LandauConfig) -> Result<LandauAnalysis> {
    cfg.validate()?;
    let eb = cfg.eb();
    let lat = Lattice {
        n: cfg.n,
        h: cfg.length / cfg.n as f64,
        l: cfg.length,
        eb,
    };
    let s = cfg.n * cfg.n;
    let m2 = cfg.mass * cfg.mass;
    let r = lat.curl();
    let grads = lat.gradients();
    let ((su, vu), (sv, vv)) = rayon::join(
        || sorted_eigen(r.adjoint() * &r),
        || sorted_eigen(&r * r.adjoint()),
    );
    let mut e2: Vec<f64> = su.iter().chain(&sv).map(|x| m2 + x.max(0.0)).collect();
    e2.sort_by(f64::total_cmp);

    let scale = if eb != 0.0 { eb.abs() } else { (std::f64::consts::TAU / cfg.length).powi(2) };
    let ctol = 0.1 * scale;
    let threshold = if eb != 0.0 { LEVEL_TOL * scale } else { 1e-8 * scale };
    let mut clusters = Vec::new();
    for &(a, b) in cluster_ranges(&e2, ctol).iter().take(CLUSTERS_ANALYSED) {
        let (lo, hi) = (e2[a], e2[b - 1]);
        let block = |vals: &[f64], vecs: &DMatrix<C64>| {
            let cols: Vec<usize> = (0..vals.len())
                .filter(|&k| {
                    let x = m2 + vals[k].max(0.0);
                    x >= lo - 1e-12 * (1.0 + lo) && x <= hi + 1e-12 * (1.0 + hi)
                })
                .collect();
            DMatrix::from_fn(vecs.nrows(), cols.len(), |r, c| vecs[(r, cols[c])])
        };
        let qu = block(&su, &vu);
        let qv = block(&sv, &vv);
        clusters.push(LandauCluster {
            e2_mean: e2[a..b].iter().sum::<f64>() / (b - a) as f64,
            e2_min: lo,
            e2_max: hi,
            count: b - a,
            rank: [qu.ncols(), qv.ncols()],
            constrained: [
                constrained_states(&qu, &grads[0], threshold, s),
                constrained_states(&qv, &grads[1], threshold, s),
            ],
        });
    }

    let mut report = ResidualReport::new("Landau levels of the squared Hamiltonian");
    let mut levels = Vec::new();
    report.info("eB", eb);
    report.info("lowest E^2 - m^2", e2[0] - m2);
    if eb == 0.0 {
        report.finding("neutral particle: no Landau quantization");
        return Ok(LandauAnalysis {
            config: *cfg,
            eb,
            e2,
            clusters,
            levels,
            report,
        });
    }
    let sg = eb.signum();
    let mut minus_count = 0usize;
    for c in &clusters {
        let nu = (c.e2_mean - m2) / eb.abs();
        for &(_, sigma) in &c.constrained[0] {
            let sr = sigma.round();
            if (sigma - sr).abs() > 0.25 {
                continue;
            }
            let sr = sr as i32;
            if sr == -1 {
                minus_count += 1;
            }
            let n = ((nu - 1.0 + sr as f64 * sg) / 2.0).round().max(0.0) as u32;
            if !levels.iter().any(|l: &LandauLevelCheck| l.level == n && l.sigma == sr) {
                levels.push(LandauLevelCheck {
                    level: n,
                    sigma: sr,
                    predicted: (2 * n + 1) as f64 - sr as f64 * sg,
                    measured: nu,
                });
            }
        }
    }
    let find = |n: u32, sigma: i32| levels.iter().find(|l| l.level == n && l.sigma == sigma).copied();
    let aligned = sg as i32;
    match find(0, aligned) {
        Some(l) => report.at_most("n=0 aligned spin: (E^2 - m^2)/eB", l.measured.abs(), LEVEL_TOL),
        None => report.at_most("n=0 aligned spin: (E^2 - m^2)/eB", f64::INFINITY, LEVEL_TOL),
    }
    for n in 0..3 {
        let v = find(n, 0).map_or(f64::INFINITY, |l| l.relative_error());
        report.at_most(format!("n={n} sigma=0: relative level error"), v, LEVEL_TOL);
    }
    let split = match (find(0, 0), find(0, aligned)) {
        (Some(a), Some(b)) => a.measured - b.measured,
        _ => f64::INFINITY,
    };
    report.at_most("spin splitting / eB - 1", (split - 1.0).abs(), LEVEL_TOL);
    report.info("constrained states with spin against the field", minus_count as f64);
    report.info(
        "constraint violation of the lowest aligned state",
        clusters.first().and_then(|c| c.constrained[0].first()).map_or(f64::NAN, |x| x.0),
    );
    if minus_count == 0 {
        report.finding("no constrained states with spin against the field in the analysed clusters");
    }
    levels.sort_by_key(|l| (l.level, -l.sigma));
    Ok(LandauAnalysis {
        config: *cfg,
        eb,
        e2,
        clusters,
        levels,
        report,
    })
}
