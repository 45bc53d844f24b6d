//! Small dense square matrices over exact Gaussian integers or `f64` complex numbers.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};

/// Gaussian integer: every entry of the constructed matrices lies in {0, ±1, ±i}.
pub type GaussInt = Complex<i64>;

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T> {
    dim: usize,
    entries: Vec<T>,
}

pub type ExactMat = Mat<GaussInt>;
pub type CMat = Mat<Complex64>;

/// Element operations a matrix entry type needs.
pub trait Entry:
    Copy
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn conj(self) -> Self;
    fn modulus(self) -> f64;
    fn to_c64(self) -> Complex64;
}

impl Entry for GaussInt {
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn modulus(self) -> f64 {
        ((self.re * self.re + self.im * self.im) as f64).sqrt()
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }
}

impl Entry for Complex64 {
    fn conj(self) -> Self {
        Complex::conj(&self)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn to_c64(self) -> Complex64 {
        self
    }
}

impl<T: Entry> Mat<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[&[T]]) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "matrix must be square");
            entries.extend_from_slice(r);
        }
        Self { dim, entries }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.dim + j] = v;
    }

    /// Kronecker product with the left factor selecting coarse blocks:
    /// `(P ⊗ Q)[i·n + k, j·n + l] = P[i, j] · Q[k, l]` where `n = Q.dim()`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let n = rhs.dim;
        Self::from_fn(self.dim * n, |r, c| {
            self.get(r / n, c / n) * rhs.get(r % n, c % n)
        })
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &(self * rhs) - &(rhs * self)
    }

    pub fn anticommutator(&self, rhs: &Self) -> Self {
        &(self * rhs) + &(rhs * self)
    }

    /// Largest entry modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| (a - b).modulus())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.modulus()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.dagger()
    }

    pub fn to_complex(&self) -> CMat {
        Mat {
            dim: self.dim,
            entries: self.entries.iter().map(|x| x.to_c64()).collect(),
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let row = &self.entries[i * self.dim..(i + 1) * self.dim];
                row.iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }
}

impl ExactMat {
    /// True when every entry lies in {0, ±1, ±i}.
    pub fn entries_are_units_or_zero(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.abs() + z.im.abs() <= 1)
    }
}

impl CMat {
    /// Tolerance-based equality.
    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        self.max_abs_diff(rhs) <= tol
    }

    pub fn is_hermitian_within(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.dagger()) <= tol
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }
}

impl<'a, T: Entry> Mul for &'a Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: Self) -> Mat<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] = out.entries[i * n + j] + a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }
}

impl<'a, T: Entry> Add for &'a Mat<T> {
    type Output = Mat<T>;
    fn add(self, rhs: Self) -> Mat<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Mat {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<'a, T: Entry> Sub for &'a Mat<T> {
    type Output = Mat<T>;
    fn sub(self, rhs: Self) -> Mat<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Mat {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<'a, T: Entry> Neg for &'a Mat<T> {
    type Output = Mat<T>;
    fn neg(self) -> Mat<T> {
        Mat {
            dim: self.dim,
            entries: self.entries.iter().map(|&a| -a).collect(),
        }
    }
}

/// Gaussian-integer constants.
pub const G0: GaussInt = Complex { re: 0, im: 0 };
pub const G1: GaussInt = Complex { re: 1, im: 0 };
pub const GI: GaussInt = Complex { re: 0, im: 1 };
