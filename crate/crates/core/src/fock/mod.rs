//! Truncated number-basis representation of single-mode states.
//!
//! Quadratures follow the shot-noise convention `N0 = 1`: the vacuum has
//! variance 1 in both `x = a + a†` and `p = -i(a - a†)`, and a coherent
//! amplitude `γ` sits at `(2 Re γ, 2 Im γ)` in phase space.

mod metrics;
mod operators;
mod wigner;

pub use metrics::{fidelity, quadrature_moments, GaussianMoments};
pub use operators::{annihilation_operator, displacement_operator, number_operator};
pub use wigner::{wigner_at, wigner_grid};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NlaError, Result};

/// Largest photon-number tail mass a constructor may silently drop.
pub const TAIL_THRESHOLD: f64 = 1e-10;

pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
pub(crate) const PSD_TOL: f64 = 1e-10;

/// Coherent amplitude `γ = re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexAmplitude {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmplitude {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn scale(self, factor: f64) -> Self {
        Self::new(self.re * factor, self.im * factor)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    fn check_finite(self) -> Result<()> {
        if self.re.is_finite() && self.im.is_finite() {
            Ok(())
        } else {
            Err(NlaError::Domain {
                name: "amplitude",
                value: if self.re.is_finite() { self.im } else { self.re },
                expected: "finite components",
            })
        }
    }
}

impl From<f64> for ComplexAmplitude {
    fn from(re: f64) -> Self {
        Self::real(re)
    }
}

/// Relative sign of the two coherent components of a cat state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CatParity {
    /// `|α⟩ + |−α⟩`
    Even,
    /// `|α⟩ − |−α⟩`
    Odd,
}

impl CatParity {
    pub fn sign(self) -> f64 {
        match self {
            CatParity::Even => 1.0,
            CatParity::Odd => -1.0,
        }
    }
}

/// Density operator on the basis `|0⟩ … |dim−1⟩`.
///
/// The matrix is stored with unit trace; the (possibly huge or tiny)
/// trace of the unnormalized operator lives in `log_weight`, so that
/// post-selected maps such as `g^n̂` never overflow the matrix entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    matrix: DMatrix<Complex64>,
    log_weight: f64,
}

impl TruncatedState {
    /// Wraps an arbitrary positive semidefinite operator, recording its trace
    /// as the weight.
    pub fn from_density_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        let state = Self::from_unnormalized(matrix, 0.0)?;
        state.check_invariants()?;
        Ok(state)
    }

    /// Projector onto a (not necessarily normalized) pure state.
    pub fn from_pure(amplitudes: &DVector<Complex64>) -> Result<Self> {
        let matrix = amplitudes * amplitudes.adjoint();
        Self::from_unnormalized(matrix, 0.0)
    }

    /// Builds a state from `exp(log_scale) · matrix`, splitting off the trace.
    pub(crate) fn from_unnormalized(mut matrix: DMatrix<Complex64>, log_scale: f64) -> Result<Self> {
        let dim = matrix.nrows();
        if dim < 2 || matrix.ncols() != dim {
            return Err(NlaError::InvalidState(format!(
                "expected a square matrix of size ≥ 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        hermitize(&mut matrix);
        let trace = matrix.trace().re;
        if !(trace.is_finite() && trace > 0.0) || !log_scale.is_finite() {
            return Err(NlaError::Overflow("state weight"));
        }
        matrix.unscale_mut(trace);
        Ok(Self {
            matrix,
            log_weight: log_scale + trace.ln(),
        })
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::fock(0, dim)
    }

    /// Number state `|n⟩`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        if n >= dim {
            return Err(NlaError::TruncationInsufficient {
                dim,
                tail: 1.0,
                threshold: TAIL_THRESHOLD,
            });
        }
        let mut matrix = DMatrix::zeros(dim, dim);
        matrix[(n, n)] = Complex64::new(1.0, 0.0);
        Ok(Self {
            matrix,
            log_weight: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Unit-trace density matrix.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Trace of the unnormalized operator.
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }

    pub fn log_weight(&self) -> f64 {
        self.log_weight
    }

    pub fn is_normalized(&self) -> bool {
        (self.weight() - 1.0).abs() <= 1e-9
    }

    /// Same state with weight 1.
    pub fn normalized(&self) -> Self {
        Self {
            matrix: self.matrix.clone(),
            log_weight: 0.0,
        }
    }

    /// Unnormalized operator `weight · ρ`; overflows to infinity for
    /// extreme weights.
    pub fn unnormalized_matrix(&self) -> DMatrix<Complex64> {
        self.matrix.scale(self.weight())
    }

    /// Photon-number distribution of the normalized state.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.matrix[(n, n)].re).collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Normalized population on levels `level..dim`.
    pub fn mass_from_level(&self, level: usize) -> f64 {
        self.populations().iter().skip(level).sum()
    }

    /// Checks Hermiticity, unit trace of the stored matrix and positivity.
    pub fn check_invariants(&self) -> Result<()> {
        let dim = self.dim();
        let mut asym: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                asym = asym.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        if asym > HERMITIAN_TOL {
            return Err(NlaError::InvalidState(format!("not Hermitian (defect {asym:.3e})")));
        }
        let trace = self.matrix.trace().re;
        if (trace - 1.0).abs() > HERMITIAN_TOL {
            return Err(NlaError::InvalidState(format!("stored trace {trace} differs from 1")));
        }
        let min_eig = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(NlaError::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn with_log_weight(mut self, log_weight: f64) -> Self {
        self.log_weight = log_weight;
        self
    }
}

/// Coherent state `|α⟩`, truncated and renormalized.
pub fn coherent_state(alpha: ComplexAmplitude, dim: usize) -> Result<TruncatedState> {
    check_dim(dim)?;
    alpha.check_finite()?;
    let tail = poisson_tail(alpha.norm_sqr(), dim);
    check_tail(tail, dim)?;
    TruncatedState::from_pure(&coherent_amplitudes(alpha.to_complex(), dim)).map(|s| s.normalized())
}

/// Thermal state `(1−λ²) Σ λ^{2n} |n⟩⟨n|` of variance `(1+λ²)/(1−λ²)`.
pub fn thermal_state(lambda: f64, dim: usize) -> Result<TruncatedState> {
    check_dim(dim)?;
    if !(0.0..1.0).contains(&lambda) {
        return Err(NlaError::Domain {
            name: "lambda",
            value: lambda,
            expected: "0 <= lambda < 1",
        });
    }
    let ratio = lambda * lambda;
    check_tail(ratio.powi(dim as i32), dim)?;
    let mut matrix = DMatrix::zeros(dim, dim);
    let mut p = 1.0 - ratio;
    for n in 0..dim {
        matrix[(n, n)] = Complex64::new(p, 0.0);
        p *= ratio;
    }
    TruncatedState::from_unnormalized(matrix, 0.0).map(|s| s.normalized())
}

/// Cat state `∝ |α⟩ ± |−α⟩`.
pub fn cat_state(alpha: ComplexAmplitude, parity: CatParity, dim: usize) -> Result<TruncatedState> {
    check_dim(dim)?;
    alpha.check_finite()?;
    let mean = alpha.norm_sqr();
    let sign = parity.sign();
    let norm = 2.0 * (1.0 + sign * (-2.0 * mean).exp());
    if norm <= 1e-300 || (parity == CatParity::Odd && mean < 1e-12) {
        return Err(NlaError::Domain {
            name: "alpha",
            value: mean.sqrt(),
            expected: "nonzero amplitude for an odd cat",
        });
    }
    // Parity-filtered Poisson tail.
    let tail: f64 = poisson_terms_from(mean, dim)
        .enumerate()
        .map(|(i, p)| {
            let n = dim + i;
            let factor = 1.0 + sign * if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            p * factor * factor / norm
        })
        .sum();
    check_tail(tail, dim)?;
    let plus = coherent_amplitudes(alpha.to_complex(), dim);
    let minus = coherent_amplitudes(-alpha.to_complex(), dim);
    let superposition = plus + minus.scale(sign);
    TruncatedState::from_pure(&superposition).map(|s| s.normalized())
}

/// Untruncated Fock amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n < dim`.
pub(crate) fn coherent_amplitudes(alpha: Complex64, dim: usize) -> DVector<Complex64> {
    let mut amps = DVector::zeros(dim);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        amps[n] = c;
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    amps
}

/// Poisson probabilities `P(n)` for `n = start, start+1, …` until negligible.
fn poisson_terms_from(mean: f64, start: usize) -> impl Iterator<Item = f64> {
    let first = if mean == 0.0 {
        if start == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        (-mean + start as f64 * mean.ln() - ln_factorial(start)).exp()
    };
    let mut n = start;
    let mut term = first;
    std::iter::from_fn(move || {
        if term == 0.0 || (n as f64 > mean && term < 1e-300) {
            return None;
        }
        let current = term;
        n += 1;
        term *= mean / n as f64;
        Some(current)
    })
}

/// `P(N ≥ dim)` for `N ~ Poisson(mean)`.
pub fn poisson_tail(mean: f64, dim: usize) -> f64 {
    poisson_terms_from(mean, dim).sum()
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(NlaError::Domain {
            name: "dim",
            value: dim as f64,
            expected: "dim >= 2",
        });
    }
    Ok(())
}

fn check_tail(tail: f64, dim: usize) -> Result<()> {
    if tail > TAIL_THRESHOLD {
        Err(NlaError::TruncationInsufficient {
            dim,
            tail,
            threshold: TAIL_THRESHOLD,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn hermitize(matrix: &mut DMatrix<Complex64>) {
    let dim = matrix.nrows();
    for i in 0..dim {
        matrix[(i, i)].im = 0.0;
        for j in (i + 1)..dim {
            let avg = (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5;
            matrix[(i, j)] = avg;
            matrix[(j, i)] = avg.conj();
        }
    }
}
