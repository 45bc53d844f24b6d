//! Dense Hermitian eigensolver wrapper.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::mat::CMat;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector for `values[j]`.
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j).iter().copied().collect()
    }
}

pub fn hermitian_eigen(m: &CMat) -> HermitianEigen {
    hermitian_eigen_dense(m.to_nalgebra())
}

/// Full eigendecomposition, sorted ascending.
pub fn hermitian_eigen_dense(m: DMatrix<Complex64>) -> HermitianEigen {
    let eig = m.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEigen { values, vectors }
}

pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    hermitian_eigenvalues_dense(m.to_nalgebra())
}

pub fn hermitian_eigenvalues_dense(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}
