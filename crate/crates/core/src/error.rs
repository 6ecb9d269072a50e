use thiserror::Error;

/// Errors raised by state construction, channel application and the
/// effective-parameter computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NlaError {
    /// The closed-form photon-number tail beyond the basis is too heavy.
    #[error("truncation insufficient: tail mass {tail:.3e} beyond dim {dim} exceeds {threshold:.1e}")]
    TruncationInsufficient { dim: usize, tail: f64, threshold: f64 },

    /// A parameter lies outside the domain of the operation.
    #[error("{name} = {value} out of range: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// The NLA gain violates the single physicality bound of the scenario.
    #[error("unphysical NLA gain: g = {g} ≥ g_lim = {g_lim:.7} (eps_lim = {eps_lim:.7})")]
    Physicality { g: f64, g_lim: f64, eps_lim: f64 },

    /// A requested (Δ, G, τ) triple is not a valid Gaussian channel.
    #[error("infeasible reduction: delta = {delta:.6}, G = {amp_gain:.6}, tau = {tau:.6}")]
    InfeasibleReduction { delta: f64, amp_gain: f64, tau: f64 },

    /// Two reductions that were expected to describe the same scenario do not.
    #[error("reductions disagree on {quantity}: {left} vs {right}")]
    ReductionMismatch {
        quantity: &'static str,
        left: f64,
        right: f64,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("state is not normalized (weight = {weight})")]
    NotNormalized { weight: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    /// The unnormalized weight left the representable range.
    #[error("weight overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, NlaError>;
