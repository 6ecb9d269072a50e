//! Noiseless linear amplification after symmetric Gaussian channels.
//!
//! A lossy, noisy channel `(T, ε)` followed by an ideal NLA `g^n̂` acts on
//! every input like an NLA of gain `g_in` followed by an effective Gaussian
//! channel, up to a state-independent factor `μ`. This crate computes the
//! effective parameters in closed form ([`effective`]) and checks the
//! identity by brute-force simulation in a truncated number basis
//! ([`equivalence`]), then builds loss suppression and phase concentration
//! on top of it ([`applications`]).

pub mod applications;
pub mod channels;
pub mod effective;
pub mod equivalence;
pub mod error;
pub mod fock;
pub mod sweep;

pub use channels::{ChannelParams, KrausSet, NlaGain};
pub use effective::{ChannelReduction, EffectiveParams, ReductionKind};
pub use equivalence::VerificationReport;
pub use error::{NlaError, Result};
pub use fock::{CatParity, ComplexAmplitude, GaussianMoments, TruncatedState};
pub use sweep::Execution;
