use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{hermitize, TruncatedState, PSD_TOL};
use crate::error::{NlaError, Result};

/// First and symmetrized second moments of the quadratures, vacuum variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var: f64,
}

impl GaussianMoments {
    /// Coherent amplitude equivalent to the mean, `(mean_x + i mean_p) / 2`.
    pub fn mean_amplitude(&self) -> f64 {
        0.5 * self.mean_x.hypot(self.mean_p)
    }

    /// `mean² / var` with the mean measured along the displacement direction.
    pub fn snr(&self) -> f64 {
        (self.mean_x * self.mean_x + self.mean_p * self.mean_p) / self.var
    }
}

/// Moments of `x = a + a†`, `p = −i(a − a†)`; `var` averages the two.
pub fn quadrature_moments(state: &TruncatedState) -> Result<GaussianMoments> {
    if !state.is_normalized() {
        return Err(NlaError::NotNormalized { weight: state.weight() });
    }
    let rho = state.matrix();
    let dim = state.dim();
    // ⟨a⟩ = Σ √n ρ_{n,n−1}
    let mut mean_a = Complex64::new(0.0, 0.0);
    for n in 1..dim {
        mean_a += rho[(n, n - 1)] * (n as f64).sqrt();
    }
    let mean_n = state.mean_photon_number();
    Ok(GaussianMoments {
        mean_x: 2.0 * mean_a.re,
        mean_p: 2.0 * mean_a.im,
        var: 2.0 * mean_n + 1.0 - 2.0 * mean_a.norm_sqr(),
    })
}

/// Uhlmann fidelity `(tr √(√a b √a))²`.
///
/// Evaluated as the squared trace norm of `√a √b`: its singular values are
/// the square roots of the eigenvalues of `√a b √a`, but they do not pick up
/// the `√ε` noise floor that the eigenvalue route suffers for pure states.
pub fn fidelity(a: &TruncatedState, b: &TruncatedState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(NlaError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    for s in [a, b] {
        if !s.is_normalized() {
            return Err(NlaError::NotNormalized { weight: s.weight() });
        }
    }
    let product = psd_sqrt(a.matrix()) * psd_sqrt(b.matrix());
    let trace_norm: f64 = product.singular_values().iter().sum();
    Ok((trace_norm * trace_norm).clamp(0.0, 1.0))
}

/// Principal square root of a Hermitian PSD matrix; eigenvalues below zero
/// (at most `PSD_TOL` for valid states) are zeroed.
pub(crate) fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut h = m.clone();
    hermitize(&mut h);
    let eigen = h.symmetric_eigen();
    debug_assert!(eigen.eigenvalues.iter().all(|&l| l >= -PSD_TOL * 10.0));
    let roots = eigen.eigenvalues.map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let v = &eigen.eigenvectors;
    v * DMatrix::from_diagonal(&roots) * v.adjoint()
}
