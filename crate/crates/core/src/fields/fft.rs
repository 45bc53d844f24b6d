//! Three-dimensional FFTs assembled from rustfft line transforms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::grid::Grid;

pub struct Transform {
    shape: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

type Cache = Mutex<HashMap<[usize; 3], Arc<Transform>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Transform {
    pub fn for_grid(grid: &Grid) -> Arc<Transform> {
        let shape = grid.shape();
        let mut map = cache().lock().expect("fft plan cache poisoned");
        map.entry(shape)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                let plan = |n: usize, dir: FftDirection, p: &mut FftPlanner<f64>| {
                    p.plan_fft(n, dir)
                };
                Arc::new(Transform {
                    shape,
                    forward: [
                        plan(shape[0], FftDirection::Forward, &mut planner),
                        plan(shape[1], FftDirection::Forward, &mut planner),
                        plan(shape[2], FftDirection::Forward, &mut planner),
                    ],
                    inverse: [
                        plan(shape[0], FftDirection::Inverse, &mut planner),
                        plan(shape[1], FftDirection::Inverse, &mut planner),
                        plan(shape[2], FftDirection::Inverse, &mut planner),
                    ],
                })
            })
            .clone()
    }

    /// Unnormalized forward transform of one scalar block.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform including the `1/N` normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    /// Forward-transform every contiguous block of `N` values in parallel.
    pub fn forward_blocks(&self, data: &mut [Complex64]) {
        let n = self.len();
        data.par_chunks_mut(n).for_each(|b| self.forward(b));
    }

    pub fn inverse_blocks(&self, data: &mut [Complex64]) {
        let n = self.len();
        data.par_chunks_mut(n).for_each(|b| self.inverse(b));
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn run(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [nx, ny, nz] = self.shape;
        assert_eq!(data.len(), nx * ny * nz, "block size does not match grid");

        // x lines are contiguous.
        let mut scratch = vec![Complex64::default(); plans[0].get_inplace_scratch_len()];
        plans[0].process_with_scratch(data, &mut scratch);

        // y lines: stride nx inside each z slab.
        let mut line = vec![Complex64::default(); ny];
        let mut scratch = vec![Complex64::default(); plans[1].get_inplace_scratch_len()];
        for iz in 0..nz {
            let slab = &mut data[iz * nx * ny..(iz + 1) * nx * ny];
            for ix in 0..nx {
                for iy in 0..ny {
                    line[iy] = slab[ix + nx * iy];
                }
                plans[1].process_with_scratch(&mut line, &mut scratch);
                for iy in 0..ny {
                    slab[ix + nx * iy] = line[iy];
                }
            }
        }

        // z lines: stride nx*ny.
        let plane = nx * ny;
        let mut line = vec![Complex64::default(); nz];
        let mut scratch = vec![Complex64::default(); plans[2].get_inplace_scratch_len()];
        for p in 0..plane {
            for iz in 0..nz {
                line[iz] = data[p + plane * iz];
            }
            plans[2].process_with_scratch(&mut line, &mut scratch);
            for iz in 0..nz {
                data[p + plane * iz] = line[iz];
            }
        }
    }
}
