use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ComplexAmplitude;

/// Truncated ladder operator `a`, with `a|n⟩ = √n |n−1⟩`.
pub fn annihilation_operator(dim: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn number_operator(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |n, _| Complex64::new(n as f64, 0.0)))
}

/// `D(β) = exp(β a† − β* a)` on the truncated basis.
///
/// The generator is anti-Hermitian, so `i·(β a† − β* a)` is diagonalized
/// and exponentiated exactly; the result is unitary on the truncated space
/// but only matches the true displacement on the low-photon block.
pub fn displacement_operator(beta: ComplexAmplitude, dim: usize) -> DMatrix<Complex64> {
    let beta = beta.to_complex();
    if beta.norm() == 0.0 {
        return DMatrix::identity(dim, dim);
    }
    let a = annihilation_operator(dim);
    let generator = a.adjoint() * beta - &a * beta.conj();
    let hermitian = generator * Complex64::i();
    let eigen = hermitian.symmetric_eigen();
    let phases = eigen.eigenvalues.map(|lambda| Complex64::from_polar(1.0, -lambda));
    let v = &eigen.eigenvectors;
    v * DMatrix::from_diagonal(&phases) * v.adjoint()
}
