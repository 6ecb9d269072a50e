//! Physical maps on truncated states: the symmetric Gaussian channel,
//! pure loss, the quantum-limited amplifier and the noiseless amplifier.
//!
//! Every phase-insensitive Kraus operator used here maps each number state
//! onto a single number state, `K|n⟩ = c_n |n + s⟩`, so operators are kept
//! in that banded form and applied in `O(dim²)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NlaError, Result};
use crate::fock::{ln_factorial, TruncatedState};

/// Symmetric Gaussian channel: input noise `eps` (shot-noise units)
/// followed by loss of intensity transmission `transmission`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub transmission: f64,
    pub eps: f64,
}

impl ChannelParams {
    pub fn new(transmission: f64, eps: f64) -> Result<Self> {
        if !(transmission.is_finite() && transmission > 0.0 && transmission <= 1.0) {
            return Err(NlaError::Domain {
                name: "T",
                value: transmission,
                expected: "0 < T <= 1",
            });
        }
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(NlaError::Domain {
                name: "eps",
                value: eps,
                expected: "eps >= 0",
            });
        }
        Ok(Self { transmission, eps })
    }

    /// `T·ε`, the only combination the thermal parameter depends on.
    pub fn noise_product(&self) -> f64 {
        self.transmission * self.eps
    }

    /// Variance map `V → T(V + ε) + 1 − T`.
    pub fn output_variance(&self, var: f64) -> f64 {
        self.transmission * (var + self.eps) + 1.0 - self.transmission
    }
}

/// Gain of the ideal noiseless amplifier `g^n̂` (`g < 1` attenuates).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct NlaGain(f64);

impl NlaGain {
    pub fn new(g: f64) -> Result<Self> {
        if g.is_finite() && g > 0.0 {
            Ok(Self(g))
        } else {
            Err(NlaError::Domain {
                name: "g",
                value: g,
                expected: "finite g > 0",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn inverse(self) -> Self {
        Self(1.0 / self.0)
    }
}

/// `K|n⟩ = coefficients[n] · |n + shift⟩`; entries that would leave the
/// basis are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperator {
    pub shift: isize,
    pub coefficients: Vec<f64>,
}

impl KrausOperator {
    fn target(&self, n: usize) -> Option<usize> {
        let m = n as isize + self.shift;
        (m >= 0 && (m as usize) < self.coefficients.len()).then_some(m as usize)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.coefficients.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (n, &c) in self.coefficients.iter().enumerate() {
            if let Some(row) = self.target(n) {
                m[(row, n)] = Complex64::new(c, 0.0);
            }
        }
        m
    }

    /// `other ∘ self`, i.e. apply `self` first.
    fn then(&self, other: &KrausOperator) -> KrausOperator {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(n, &c)| match self.target(n) {
                Some(mid) => c * other.coefficients[mid],
                None => 0.0,
            })
            .collect();
        KrausOperator {
            shift: self.shift + other.shift,
            coefficients,
        }
    }

    fn is_negligible(&self) -> bool {
        self.coefficients.iter().map(|c| c * c).sum::<f64>() < 1e-30
    }
}

/// A channel as a list of Kraus operators on the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    dim: usize,
    ops: Vec<KrausOperator>,
    completeness_defect: f64,
}

impl KrausSet {
    fn from_ops(dim: usize, ops: Vec<KrausOperator>) -> Self {
        let ops: Vec<_> = ops.into_iter().filter(|op| !op.is_negligible()).collect();
        let block = low_photon_block(dim);
        let completeness_defect = (0..block)
            .map(|n| {
                let sum: f64 = ops
                    .iter()
                    .filter(|op| op.target(n).is_some())
                    .map(|op| op.coefficients[n].powi(2))
                    .sum();
                (sum - 1.0).abs()
            })
            .fold(0.0, f64::max);
        Self {
            dim,
            ops,
            completeness_defect,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_ops(
            dim,
            vec![KrausOperator {
                shift: 0,
                coefficients: vec![1.0; dim],
            }],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[KrausOperator] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `max |Σ K†K − 1|` over the low-photon block (top-left quarter).
    pub fn completeness_defect(&self) -> f64 {
        self.completeness_defect
    }

    pub fn dense_ops(&self) -> Vec<DMatrix<Complex64>> {
        self.ops.iter().map(KrausOperator::to_dense).collect()
    }

    /// Channel that applies `self` and then `next`.
    pub fn then(&self, next: &KrausSet) -> Result<KrausSet> {
        if self.dim != next.dim {
            return Err(NlaError::DimensionMismatch {
                left: self.dim,
                right: next.dim,
            });
        }
        let ops = next
            .ops
            .iter()
            .flat_map(|second| self.ops.iter().map(move |first| first.then(second)))
            .collect();
        Ok(Self::from_ops(self.dim, ops))
    }
}

/// Size of the block on which truncated operators are trusted.
pub fn low_photon_block(dim: usize) -> usize {
    (dim / 4).max(1)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Beam-splitter loss: `K_k = √((1−τ)^k / k!) a^k τ^{n̂/2}`, `k ≤ max_k`.
pub fn pure_loss_kraus(tau: f64, dim: usize, max_k: usize) -> Result<KrausSet> {
    if !(tau.is_finite() && tau > 0.0 && tau <= 1.0) {
        return Err(NlaError::Domain {
            name: "tau",
            value: tau,
            expected: "0 < tau <= 1",
        });
    }
    let max_k = max_k.min(dim - 1);
    let ops = (0..=max_k)
        .map(|k| {
            let coefficients = (0..dim)
                .map(|n| {
                    if n < k {
                        0.0
                    } else if k == 0 {
                        tau.powf(n as f64 / 2.0)
                    } else if tau == 1.0 {
                        0.0
                    } else {
                        (0.5 * ln_binomial(n, k) + 0.5 * (n - k) as f64 * tau.ln() + 0.5 * k as f64 * (1.0 - tau).ln())
                            .exp()
                    }
                })
                .collect();
            KrausOperator {
                shift: -(k as isize),
                coefficients,
            }
        })
        .collect();
    Ok(KrausSet::from_ops(dim, ops))
}

/// Phase-insensitive amplifier of intensity gain `G` at the quantum limit,
/// `⟨n+k|A_k|n⟩ = G^{−(n+1)/2} ((G−1)/G)^{k/2} √C(n+k, k)`.
pub fn quantum_limited_amp_kraus(gain: f64, dim: usize, max_k: usize) -> Result<KrausSet> {
    if !(gain.is_finite() && gain >= 1.0) {
        return Err(NlaError::Domain {
            name: "G",
            value: gain,
            expected: "G >= 1",
        });
    }
    let max_k = max_k.min(dim - 1);
    let ln_g = gain.ln();
    let ln_ratio = ((gain - 1.0) / gain).ln();
    let ops = (0..=max_k)
        .map(|k| {
            let coefficients = (0..dim)
                .map(|n| {
                    if n + k >= dim || (k > 0 && gain == 1.0) {
                        0.0
                    } else {
                        let ln_ratio_term = if k == 0 { 0.0 } else { 0.5 * k as f64 * ln_ratio };
                        (0.5 * ln_binomial(n + k, k) - 0.5 * (n + 1) as f64 * ln_g + ln_ratio_term).exp()
                    }
                })
                .collect();
            KrausOperator {
                shift: k as isize,
                coefficients,
            }
        })
        .collect();
    Ok(KrausSet::from_ops(dim, ops))
}

/// Symmetric Gaussian channel `(T, ε)` realized as loss `T/G'` followed by a
/// quantum-limited amplifier `G' = 1 + Tε/2`; both moment maps match
/// `m → √T m`, `V → T(V + ε) + 1 − T` exactly.
pub fn gaussian_channel(params: ChannelParams, dim: usize) -> Result<KrausSet> {
    let amp_gain = 1.0 + params.noise_product() / 2.0;
    let loss = pure_loss_kraus(params.transmission / amp_gain, dim, dim - 1)?;
    let amp = quantum_limited_amp_kraus(amp_gain, dim, dim - 1)?;
    loss.then(&amp)
}

/// `Σ_k K_k ρ K_k†`, weight carried forward.
pub fn apply_kraus(kraus: &KrausSet, state: &TruncatedState) -> Result<TruncatedState> {
    let dim = state.dim();
    if kraus.dim != dim {
        return Err(NlaError::DimensionMismatch {
            left: kraus.dim,
            right: dim,
        });
    }
    let rho = state.matrix();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for op in &kraus.ops {
        let support: Vec<(usize, usize, f64)> = (0..dim)
            .filter_map(|n| op.target(n).map(|m| (n, m, op.coefficients[n])))
            .filter(|&(_, _, c)| c != 0.0)
            .collect();
        for &(n, m, c) in &support {
            for &(n2, m2, c2) in &support {
                out[(m, m2)] += rho[(n, n2)] * (c * c2);
            }
        }
    }
    TruncatedState::from_unnormalized(out, state.log_weight())
}

/// `g^n̂ ρ g^n̂` without renormalization.
///
/// The diagonal scale is evaluated relative to its largest entry and the
/// offset is folded into the log-weight, so only a non-finite exponent or a
/// vanishing result can fail.
pub fn apply_nla(gain: NlaGain, state: &TruncatedState) -> Result<TruncatedState> {
    let dim = state.dim();
    let ln_g = gain.value().ln();
    let offset = if ln_g > 0.0 { (dim - 1) as f64 * ln_g } else { 0.0 };
    if !offset.is_finite() {
        return Err(NlaError::Overflow("noiseless amplifier scale"));
    }
    let scale: Vec<f64> = (0..dim).map(|n| (n as f64 * ln_g - offset).exp()).collect();
    let rho = state.matrix();
    let out = DMatrix::from_fn(dim, dim, |i, j| rho[(i, j)] * (scale[i] * scale[j]));
    TruncatedState::from_unnormalized(out, state.log_weight() + 2.0 * offset)
        .map_err(|_| NlaError::Overflow("noiseless amplifier"))
}
