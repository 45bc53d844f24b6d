//! Spin-1 matrix algebra.
//!
//! The six-component wave function is `Ψ = (u_x, u_y, u_z, v_x, v_y, v_z) / √2`.
//! With the Kronecker convention `(P ⊗ Q)[i·n + k, j·n + l] = P[i, j]·Q[k, l]`
//! the left factor acts on the (u, v) block index and the right factor on the
//! Cartesian index, so
//!
//! * `a_k = σ₂ ⊗ S_k`, `b = σ₃ ⊗ I`, `Σ_k = I ⊗ S_k` for spin one,
//! * `α_k = σ₂ ⊗ σ_k`, `β = σ₃ ⊗ I` for the Dirac comparison set.
//!
//! All of these have entries in {0, ±1, ±i}, so identities between them are
//! checked in exact Gaussian-integer arithmetic.

mod eigen;
mod mat;

pub use eigen::{
    hermitian_eigen, hermitian_eigen_dense, hermitian_eigenvalues, hermitian_eigenvalues_dense,
    HermitianEigen,
};
pub use mat::{CMat, Entry, ExactMat, GaussInt, Mat, G0, G1, GI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::report::IdentityReport;

/// Tolerance for identities where real momenta enter.
pub const FLOAT_IDENTITY_TOL: f64 = 1e-14;

const NEG_I: GaussInt = GaussInt { re: 0, im: -1 };

/// Pauli matrices σ₁, σ₂, σ₃.
pub fn pauli() -> [ExactMat; 3] {
    [
        ExactMat::from_rows(&[&[G0, G1], &[G1, G0]]),
        ExactMat::from_rows(&[&[G0, NEG_I], &[GI, G0]]),
        ExactMat::from_rows(&[&[G1, G0], &[G0, -G1]]),
    ]
}

/// Spin-1 matrices in the Cartesian basis, `(S_k)_{ij} = -i ε_{kij}`.
pub fn spin_one() -> [ExactMat; 3] {
    [
        ExactMat::from_rows(&[&[G0, G0, G0], &[G0, G0, NEG_I], &[G0, GI, G0]]),
        ExactMat::from_rows(&[&[G0, G0, GI], &[G0, G0, G0], &[NEG_I, G0, G0]]),
        ExactMat::from_rows(&[&[G0, NEG_I, G0], &[GI, G0, G0], &[G0, G0, G0]]),
    ]
}

/// Levi-Civita symbol on 0-based indices.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet {
    pub spin_matrices: [ExactMat; 3],
    pub a: [ExactMat; 3],
    pub b: ExactMat,
    /// Spin operator Σ_k acting on six-component wave functions.
    pub sigma_big: [ExactMat; 3],
    pub dirac_alpha: [ExactMat; 3],
    pub dirac_beta: ExactMat,
}

pub fn build_matrix_set() -> MatrixSet {
    let [s1, s2, s3] = pauli();
    let spin = spin_one();
    let i2 = ExactMat::identity(2);
    let i3 = ExactMat::identity(3);
    let a = [s2.kron(&spin[0]), s2.kron(&spin[1]), s2.kron(&spin[2])];
    let b = s3.kron(&i3);
    let sigma_big = [i2.kron(&spin[0]), i2.kron(&spin[1]), i2.kron(&spin[2])];
    let pauli_k = [s1, s2.clone(), s3.clone()];
    let dirac_alpha = [
        s2.kron(&pauli_k[0]),
        s2.kron(&pauli_k[1]),
        s2.kron(&pauli_k[2]),
    ];
    let dirac_beta = s3.kron(&i2);
    MatrixSet {
        spin_matrices: spin,
        a,
        b,
        sigma_big,
        dirac_alpha,
        dirac_beta,
    }
}

/// The block exchange `σ₁ ⊗ I` swapping u and v.
pub fn swap_matrix() -> ExactMat {
    pauli()[0].kron(&ExactMat::identity(3))
}

fn deviation(lhs: &ExactMat, rhs: &ExactMat) -> f64 {
    lhs.max_abs_diff(rhs)
}

/// Structural invariants: the Kronecker definitions, Hermiticity, unit entries.
pub fn check_construction(ms: &MatrixSet) -> IdentityReport {
    let mut report = IdentityReport::new();
    let [_, s2, s3] = pauli();
    let i2 = ExactMat::identity(2);
    let i3 = ExactMat::identity(3);
    for k in 0..3 {
        let n = k + 1;
        report.expect_at_most(
            format!("a_{n} = sigma_2 (x) S_{n}"),
            deviation(&ms.a[k], &s2.kron(&ms.spin_matrices[k])),
            0.0,
        );
        report.expect_at_most(
            format!("Sigma_{n} = I (x) S_{n}"),
            deviation(&ms.sigma_big[k], &i2.kron(&ms.spin_matrices[k])),
            0.0,
        );
    }
    report.expect_at_most("b = sigma_3 (x) I", deviation(&ms.b, &s3.kron(&i3)), 0.0);

    let all: Vec<&ExactMat> = ms
        .a
        .iter()
        .chain(std::iter::once(&ms.b))
        .chain(ms.sigma_big.iter())
        .collect();
    let herm_dev = all
        .iter()
        .map(|m| deviation(m, &m.dagger()))
        .fold(0.0, f64::max);
    report.expect_at_most("a_k, b, Sigma_k Hermitian", herm_dev, 0.0);
    let units = all.iter().all(|m| m.entries_are_units_or_zero());
    report.push("entries in {0, +-1, +-i}", units, 0.0);
    report
}

/// `b² = I`, `{a_k, b} = 0`, and the Dirac-set contrast.
pub fn check_anticommutation(ms: &MatrixSet) -> IdentityReport {
    let mut report = IdentityReport::new();
    let i6 = ExactMat::identity(6);
    let z6 = ExactMat::zeros(6);
    let i4 = ExactMat::identity(4);
    let z4 = ExactMat::zeros(4);

    report.expect_at_most("b^2 = I", deviation(&(&ms.b * &ms.b), &i6), 0.0);
    for k in 0..3 {
        report.expect_at_most(
            format!("a_{} b + b a_{} = 0", k + 1, k + 1),
            deviation(&ms.a[k].anticommutator(&ms.b), &z6),
            0.0,
        );
    }

    report.expect_at_most(
        "dirac: beta^2 = I",
        deviation(&(&ms.dirac_beta * &ms.dirac_beta), &i4),
        0.0,
    );
    for k in 0..3 {
        report.expect_at_most(
            format!("dirac: alpha_{} beta + beta alpha_{} = 0", k + 1, k + 1),
            deviation(&ms.dirac_alpha[k].anticommutator(&ms.dirac_beta), &z4),
            0.0,
        );
    }
    let mut dirac_clifford = 0.0f64;
    let mut spin1_clifford = 0.0f64;
    for j in 0..3 {
        for k in 0..3 {
            let two = GaussInt::new(if j == k { 2 } else { 0 }, 0);
            dirac_clifford = dirac_clifford.max(deviation(
                &ms.dirac_alpha[j].anticommutator(&ms.dirac_alpha[k]),
                &i4.scale(two),
            ));
            spin1_clifford = spin1_clifford.max(deviation(
                &ms.a[j].anticommutator(&ms.a[k]),
                &i6.scale(two),
            ));
        }
    }
    report.expect_at_most(
        "dirac: {alpha_j, alpha_k} = 2 delta_jk I",
        dirac_clifford,
        0.0,
    );
    report.expect_violation(
        "spin-1: {a_j, a_k} = 2 delta_jk I does not hold",
        spin1_clifford,
        0.0,
    );
    let a3_sq = &ms.a[2] * &ms.a[2];
    report.expect_at_most(
        "spin-1: a_3^2 = diag(1,1,0,1,1,0)",
        deviation(&a3_sq, &ExactMat::diag(&[G1, G1, G0, G1, G1, G0])),
        0.0,
    );
    report
}

/// Σ from commutators of the `a_k`, `Σ² = 2I`, inferred spin, and the
/// angular-momentum algebra of Σ.
pub fn check_spin_operator(ms: &MatrixSet) -> IdentityReport {
    let mut report = IdentityReport::new();
    let i2 = ExactMat::identity(2);
    for c in 0..3 {
        let (j, k) = ((c + 1) % 3, (c + 2) % 3);
        let from_a = ms.a[j].commutator(&ms.a[k]).scale(NEG_I);
        report.expect_at_most(
            format!("Sigma_{} = -i (a_{} a_{} - a_{} a_{})", c + 1, j + 1, k + 1, k + 1, j + 1),
            deviation(&from_a, &ms.sigma_big[c]),
            0.0,
        );
        report.expect_at_most(
            format!("-i [a_{}, a_{}] = I (x) S_{}", j + 1, k + 1, c + 1),
            deviation(&from_a, &i2.kron(&ms.spin_matrices[c])),
            0.0,
        );
    }
    let sigma_sq = ms
        .sigma_big
        .iter()
        .fold(ExactMat::zeros(6), |acc, s| &acc + &(s * s));
    let two_i = ExactMat::identity(6).scale(GaussInt::new(2, 0));
    report.expect_at_most("Sigma^2 = 2 I", deviation(&sigma_sq, &two_i), 0.0);

    // Σ² = c·I with c = S(S+1); solve for S.
    let c = sigma_sq.get(0, 0).re as f64;
    let scalar_dev = deviation(&sigma_sq, &ExactMat::identity(6).scale(sigma_sq.get(0, 0)));
    let spin = (-1.0 + (1.0 + 4.0 * c).sqrt()) / 2.0;
    report.expect_at_most(
        "inferred spin S = 1 from Sigma^2 = S(S+1) I",
        (spin - 1.0).abs() + scalar_dev,
        0.0,
    );

    for c in 0..3 {
        let (j, k) = ((c + 1) % 3, (c + 2) % 3);
        report.expect_at_most(
            format!("[Sigma_{}, Sigma_{}] = i Sigma_{}", j + 1, k + 1, c + 1),
            deviation(
                &ms.sigma_big[j].commutator(&ms.sigma_big[k]),
                &ms.sigma_big[c].scale(GI),
            ),
            0.0,
        );
    }
    report
}

/// `[Σ_c, a_j] = i ε_{cjl} a_l` and `[Σ_c, b] = 0`: the spin part of `[J, H] = 0`.
pub fn check_spin_hamiltonian_commutator(ms: &MatrixSet) -> IdentityReport {
    let mut report = IdentityReport::new();
    let mut dev_a = 0.0f64;
    let mut dev_b = 0.0f64;
    for c in 0..3 {
        for j in 0..3 {
            let lhs = ms.sigma_big[c].commutator(&ms.a[j]);
            let rhs = (0..3).fold(ExactMat::zeros(6), |acc, l| {
                &acc + &ms.a[l].scale(GI * levi_civita(c, j, l))
            });
            dev_a = dev_a.max(deviation(&lhs, &rhs));
        }
        dev_b = dev_b.max(ms.sigma_big[c].commutator(&ms.b).max_abs());
    }
    report.expect_at_most("[Sigma_c, a_j] = i eps_cjl a_l", dev_a, 0.0);
    report.expect_at_most("[Sigma_c, b] = 0", dev_b, 0.0);
    report
}

/// `(σ₁⊗I) a_k (σ₁⊗I) = -a_k` and `(σ₁⊗I) b (σ₁⊗I) = -b`.
pub fn check_swap_anticommutation(ms: &MatrixSet) -> IdentityReport {
    let mut report = IdentityReport::new();
    let x = swap_matrix();
    for k in 0..3 {
        let conj = &(&x * &ms.a[k]) * &x;
        report.expect_at_most(
            format!("swap a_{} swap = -a_{}", k + 1, k + 1),
            deviation(&conj, &(-&ms.a[k])),
            0.0,
        );
    }
    let conj_b = &(&x * &ms.b) * &x;
    report.expect_at_most("swap b swap = -b", deviation(&conj_b, &(-&ms.b)), 0.0);
    report
}

/// `H(k) = Σ_j a_j k_j + m b`.
pub fn hamiltonian_symbol(ms: &MatrixSet, k: [f64; 3], m: f64) -> CMat {
    hamiltonian_symbol_with(&ms.a, &ms.b, k, m)
}

/// Same as [`hamiltonian_symbol`] with an arbitrary mass matrix, used for
/// sign-convention checks (`b → -b`) and perturbed-algebra controls.
pub fn hamiltonian_symbol_with(a: &[ExactMat; 3], b: &ExactMat, k: [f64; 3], m: f64) -> CMat {
    let a: Vec<CMat> = a.iter().map(|x| x.to_complex()).collect();
    let b = b.to_complex();
    CMat::from_fn(6, |i, j| {
        let mut z = b.get(i, j) * m;
        for d in 0..3 {
            z += a[d].get(i, j) * k[d];
        }
        z
    })
}

/// `Σ_j a_j n_j`.
pub fn a_dot(ms: &MatrixSet, n: [f64; 3]) -> CMat {
    hamiltonian_symbol(ms, n, 0.0)
}

/// Closed-form spectrum of `H(k)`: `±√(k²+m²)` twice each and `±m` once each,
/// sorted ascending.
pub fn analytic_spectrum(k: [f64; 3], m: f64) -> [f64; 6] {
    let e = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + m * m).sqrt();
    let mut v = [-e, -e, -m, m, e, e];
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenvalues of `H(k)` from the dense eigensolver, ascending.
pub fn numerical_spectrum(ms: &MatrixSet, k: [f64; 3], m: f64) -> Vec<f64> {
    hermitian_eigenvalues(&hamiltonian_symbol(ms, k, m))
}

/// Two unit vectors orthogonal to `n` and to each other.
pub fn transverse_basis(n: [f64; 3]) -> [[f64; 3]; 2] {
    let pick = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize(cross(n, pick));
    let e2 = cross(n, e1);
    [e1, e2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

fn embed(block: usize, w: [f64; 3]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); 6];
    for i in 0..3 {
        out[3 * block + i] = Complex64::new(w[i], 0.0);
    }
    out
}

fn vec_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `(a·n)²` is not the identity: it is the identity on the transverse
/// subspace `n·u = n·v = 0` and zero on the longitudinal one.
pub fn check_square_identity(ms: &MatrixSet, n: [f64; 3]) -> Result<IdentityReport> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector, |n| = {norm}"
        )));
    }
    let an = a_dot(ms, n);
    let sq = &an * &an;
    let mut report = IdentityReport::new();
    report.expect_violation(
        "(a.n)^2 != I",
        sq.max_abs_diff(&CMat::identity(6)),
        FLOAT_IDENTITY_TOL,
    );

    let [e1, e2] = transverse_basis(n);
    let mut transverse_dev = 0.0f64;
    let mut longitudinal_dev = 0.0f64;
    for block in 0..2 {
        for e in [e1, e2] {
            let x = embed(block, e);
            transverse_dev = transverse_dev.max(vec_dev(&sq.apply(&x), &x));
        }
        let x = embed(block, n);
        let zero = vec![Complex64::new(0.0, 0.0); 6];
        longitudinal_dev = longitudinal_dev.max(vec_dev(&sq.apply(&x), &zero));
    }
    report.expect_at_most(
        "(a.n)^2 = I on transverse subspace",
        transverse_dev,
        FLOAT_IDENTITY_TOL,
    );
    report.expect_at_most(
        "(a.n)^2 = 0 on longitudinal subspace",
        longitudinal_dev,
        FLOAT_IDENTITY_TOL,
    );

    let alpha_n = hamiltonian_symbol_dirac(ms, n);
    report.expect_at_most(
        "dirac: (alpha.n)^2 = I",
        (&alpha_n * &alpha_n).max_abs_diff(&CMat::identity(4)),
        FLOAT_IDENTITY_TOL,
    );
    Ok(report)
}

fn hamiltonian_symbol_dirac(ms: &MatrixSet, n: [f64; 3]) -> CMat {
    let alpha: Vec<CMat> = ms.dirac_alpha.iter().map(|x| x.to_complex()).collect();
    CMat::from_fn(4, |i, j| {
        (0..3).fold(Complex64::new(0.0, 0.0), |acc, d| acc + alpha[d].get(i, j) * n[d])
    })
}

/// Everything `verify-algebra` reports.
pub fn verify_all(ms: &MatrixSet) -> IdentityReport {
    let mut report = check_construction(ms);
    report.extend(check_anticommutation(ms));
    report.extend(check_spin_operator(ms));
    report.extend(check_spin_hamiltonian_commutator(ms));
    report.extend(check_swap_anticommutation(ms));
    for n in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.6, 0.0, 0.8]] {
        let r = check_square_identity(ms, n).expect("unit vectors");
        for mut c in r.checks {
            c.identity_name = format!("{} [n = ({}, {}, {})]", c.identity_name, n[0], n[1], n[2]);
            report.checks.push(c);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn s3_entries() {
        let s = spin_one();
        // 1-indexed (1,2) = -i, (2,1) = +i
        assert_eq!(s[2].get(0, 1), NEG_I);
        assert_eq!(s[2].get(1, 0), GI);
        let nonzero = s[2].entries().iter().filter(|z| **z != G0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn b_and_sigma3_expand() {
        let ms = build_matrix_set();
        assert_eq!(ms.b, ExactMat::diag(&[G1, G1, G1, -G1, -G1, -G1]));
        let mut blk = ExactMat::zeros(6);
        for i in 0..3 {
            for j in 0..3 {
                blk.set(i, j, ms.spin_matrices[2].get(i, j));
                blk.set(i + 3, j + 3, ms.spin_matrices[2].get(i, j));
            }
        }
        assert_eq!(ms.sigma_big[2], blk);
    }

    #[test]
    fn anticommutation_report_all_pass() {
        let ms = build_matrix_set();
        let r = check_anticommutation(&ms);
        assert!(r.all_passed(), "{r:#?}");
        assert_eq!(r.get("b^2 = I").unwrap().max_abs_deviation, 0.0);
        assert_eq!(r.get("a_1 b + b a_1 = 0").unwrap().max_abs_deviation, 0.0);
        assert!(r.get("spin-1: {a_j, a_k} = 2 delta_jk I does not hold").unwrap().max_abs_deviation > 0.0);
    }

    #[test]
    fn a3_squared_by_direct_multiplication() {
        // Oracle: multiply the explicit 6x6 a_3 by hand-built entries.
        // a_3 = [[0, -i S3], [i S3, 0]]; S3 = [[0,-i,0],[i,0,0],[0,0,0]].
        let mut a3 = [[c(0.0, 0.0); 6]; 6];
        a3[0][4] = c(-1.0, 0.0); // -i * (-i) = -1
        a3[1][3] = c(1.0, 0.0); // -i * i = 1
        a3[3][1] = c(1.0, 0.0); // i * (-i) = 1
        a3[4][0] = c(-1.0, 0.0); // i * i = -1
        let mut sq = [[c(0.0, 0.0); 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    sq[i][j] += a3[i][k] * a3[k][j];
                }
            }
        }
        let expect = [1.0, 1.0, 0.0, 1.0, 1.0, 0.0];
        for i in 0..6 {
            for j in 0..6 {
                let e = if i == j { expect[i] } else { 0.0 };
                assert_eq!(sq[i][j], c(e, 0.0));
            }
        }
        let ms = build_matrix_set();
        let oracle = CMat::from_fn(6, |i, j| a3[i][j]);
        assert_eq!(ms.a[2].to_complex(), oracle);
    }

    #[test]
    fn spin_operator_report() {
        let ms = build_matrix_set();
        let r = check_spin_operator(&ms);
        assert!(r.all_passed(), "{r:#?}");
        for ch in &r.checks {
            assert_eq!(ch.max_abs_deviation, 0.0, "{}", ch.identity_name);
        }
        // [Σ1, Σ2] = iΣ3 by direct multiplication.
        let comm = ms.sigma_big[0].commutator(&ms.sigma_big[1]);
        assert_eq!(comm, ms.sigma_big[2].scale(GI));
    }

    #[test]
    fn hamiltonian_at_rest_is_mass_times_b() {
        let ms = build_matrix_set();
        let h = hamiltonian_symbol(&ms, [0.0; 3], 1.0);
        assert_eq!(h, ms.b.to_complex());
        let ev = numerical_spectrum(&ms, [0.0; 3], 1.0);
        let expect = [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn massless_and_massive_spectra_along_z() {
        let ms = build_matrix_set();
        let ev = numerical_spectrum(&ms, [0.0, 0.0, 1.0], 0.0);
        for (a, b) in ev.iter().zip([-1.0, -1.0, 0.0, 0.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-14, "{ev:?}");
        }
        let r2 = 2f64.sqrt();
        let ev = numerical_spectrum(&ms, [0.0, 0.0, 1.0], 1.0);
        for (a, b) in ev.iter().zip([-r2, -r2, -1.0, 1.0, r2, r2]) {
            assert!((a - b).abs() < 1e-14, "{ev:?}");
        }
    }

    #[test]
    fn square_identity_along_z() {
        let ms = build_matrix_set();
        let an = a_dot(&ms, [0.0, 0.0, 1.0]);
        let sq = &an * &an;
        let expect = CMat::diag(&[1.0, 1.0, 0.0, 1.0, 1.0, 0.0].map(|x| c(x, 0.0)));
        assert_eq!(sq, expect);
        let t = embed(0, [1.0, 0.0, 0.0]);
        assert_eq!(sq.apply(&t), t);
        let l = embed(0, [0.0, 0.0, 1.0]);
        assert!(sq.apply(&l).iter().all(|z| *z == c(0.0, 0.0)));
        assert!(check_square_identity(&ms, [0.0, 0.0, 1.0]).unwrap().all_passed());
        assert!(check_square_identity(&ms, [0.0, 0.0, 2.0]).is_err());
    }

    #[test]
    fn swap_anticommutes_and_sigma_commutator() {
        let ms = build_matrix_set();
        assert!(check_swap_anticommutation(&ms).all_passed());
        assert!(check_spin_hamiltonian_commutator(&ms).all_passed());
        assert!(check_construction(&ms).all_passed());
        assert!(verify_all(&ms).all_passed());
    }
}
