//! Dense complex linear algebra helpers shared by every module.
//!
//! Everything at desk scale (dimensions ≤ ~30) is kept as dense
//! `nalgebra` matrices over `Complex<f64>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// Commutator [a, b] = ab - ba.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Max absolute entry, `‖m‖_max`.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius norm of the difference.
pub fn frob_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm()
}

/// `‖m m† - 1‖_max`, zero for a unitary.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    max_abs(&(m * m.adjoint() - CMat::identity(n, n)))
}

/// `‖m - m†‖_max`, zero for a Hermitian matrix.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// exp(-i θ H) for Hermitian H, via unitary diagonalization.
///
/// Diagonalizing keeps the result unitary to rounding for any θ,
/// with no step-size tuning.
pub fn expi_hermitian(h: &CMat, theta: f64) -> CMat {
    debug_assert!(hermiticity_defect(h) < 1e-12, "generator must be Hermitian");
    let eig = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut phases = CMat::zeros(n, n);
    for (k, ev) in eig.eigenvalues.iter().enumerate() {
        let ang = -theta * ev;
        phases[(k, k)] = Complex64::new(ang.cos(), ang.sin());
    }
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}
