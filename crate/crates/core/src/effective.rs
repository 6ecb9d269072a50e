//! Closed-form effective parameters of "channel then NLA" rewritten as
//! "NLA of gain g_in then an effective symmetric Gaussian channel".
//!
//! Notation: `s = Tε`, `x = g² − 1`. The physicality condition collapses to
//! `x·s < 2`, i.e. `g < g_lim = √(1 + 2/(Tε))`.

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelParams, NlaGain};
use crate::error::{NlaError, Result};

/// Relative tolerance for classifying `η = 1`.
pub const UNIT_ETA_TOL: f64 = 1e-12;
/// Negative `Δ` slack absorbed as rounding at the physicality boundary.
pub const DELTA_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReductionKind {
    /// `G = 1`, `τ = η`.
    Loss,
    /// `G = τ = 1`.
    NoiseOnly,
    /// `τ = 1`, `G = η`.
    Amp,
    /// Any other feasible `(Δ, G, τ)` with `τG = η`.
    General,
}

/// Effective channel: input noise `delta`, then a quantum-limited amplifier
/// of gain `amp_gain`, then loss `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelReduction {
    pub kind: ReductionKind,
    pub delta: f64,
    pub amp_gain: f64,
    pub tau: f64,
}

impl ChannelReduction {
    pub fn eta(&self) -> f64 {
        self.tau * self.amp_gain
    }

    pub fn is_feasible(&self) -> bool {
        self.delta >= 0.0 && self.amp_gain >= 1.0 && self.tau > 0.0 && self.tau <= 1.0
    }

    /// `(χ_ch, χ_tot)`.
    pub fn chi_decomposition(&self) -> (f64, f64) {
        chi_decomposition(self)
    }
}

/// Everything derived from `(g, T, ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub gain: NlaGain,
    pub channel: ChannelParams,
    pub lambda_ch: f64,
    pub g_tilde: f64,
    pub g_in: f64,
    pub eta: f64,
    pub chi_tot: f64,
    pub mu: f64,
    /// `+∞` for a noiseless channel.
    pub g_lim: f64,
    /// `+∞` at `g ≤ 1`.
    pub eps_lim: f64,
    pub reduction: ChannelReduction,
}

impl EffectiveParams {
    /// `Δ` of the reduction with amplifier gain `amp_gain`.
    pub fn delta_for_gain(&self, amp_gain: f64) -> f64 {
        delta_for_gain(self.gain, self.channel, amp_gain)
    }

    /// The member of the degenerate family with amplifier gain `amp_gain`,
    /// `τ = η / G`; rejected unless `Δ ≥ 0`, `G ≥ 1`, `τ ≤ 1`.
    pub fn general_reduction(&self, amp_gain: f64) -> Result<ChannelReduction> {
        let tau = self.eta / amp_gain;
        let delta = clip_delta(self.delta_for_gain(amp_gain));
        let reduction = ChannelReduction {
            kind: ReductionKind::General,
            delta,
            amp_gain,
            tau,
        };
        if amp_gain.is_finite() && reduction.is_feasible() {
            Ok(reduction)
        } else {
            Err(NlaError::InfeasibleReduction { delta, amp_gain, tau })
        }
    }

    /// Canonical reduction chosen from `η` alone.
    pub fn canonical_reduction(&self) -> ChannelReduction {
        canonical_reduction(self.gain, self.channel, self.eta)
    }
}

/// `λ_ch² = Tε / (2 + Tε)`.
pub fn lambda_ch_sq(params: ChannelParams) -> f64 {
    let s = params.noise_product();
    s / (2.0 + s)
}

pub fn lambda_ch(params: ChannelParams) -> f64 {
    lambda_ch_sq(params).sqrt()
}

/// `g̃ = g (1 − λ²) / (1 − g²λ²)`, the mean-amplitude gain of the NLA on a
/// displaced thermal state of parameter `λ`.
pub fn g_tilde(gain: NlaGain, lambda: f64) -> Result<f64> {
    let g = gain.value();
    if g * lambda >= 1.0 {
        return Err(NlaError::Physicality {
            g,
            g_lim: 1.0 / lambda,
            eps_lim: f64::NAN,
        });
    }
    let lam2 = lambda * lambda;
    Ok(g * (1.0 - lam2) / (1.0 - g * g * lam2))
}

/// `g_lim = √(1 + 2/(Tε))`; `+∞` when `ε = 0`.
pub fn g_lim(params: ChannelParams) -> f64 {
    let s = params.noise_product();
    if s == 0.0 {
        f64::INFINITY
    } else {
        (1.0 + 2.0 / s).sqrt()
    }
}

/// `ε_lim = 2 / ((g² − 1) T)`; `+∞` for `g ≤ 1`.
pub fn eps_lim(gain: NlaGain, transmission: f64) -> f64 {
    let x = gain.value().powi(2) - 1.0;
    if x <= 0.0 {
        f64::INFINITY
    } else {
        2.0 / (x * transmission)
    }
}

fn check_physical(gain: NlaGain, params: ChannelParams) -> Result<()> {
    let x = gain.value().powi(2) - 1.0;
    if x * params.noise_product() >= 2.0 {
        return Err(NlaError::Physicality {
            g: gain.value(),
            g_lim: g_lim(params),
            eps_lim: eps_lim(gain, params.transmission),
        });
    }
    Ok(())
}

/// `g_in = √((2 + (g²−1)(2−ε)T) / (2 − (g²−1)εT))`.
fn g_in_unchecked(gain: NlaGain, p: ChannelParams) -> f64 {
    let x = gain.value().powi(2) - 1.0;
    let (t, e) = (p.transmission, p.eps);
    ((2.0 + x * (2.0 - e) * t) / (2.0 - x * e * t)).sqrt()
}

/// `η = τG = g²T / (1 + (g²−1)T[¼(g²−1)(ε−2)εT − ε + 1])`.
fn eta_unchecked(gain: NlaGain, p: ChannelParams) -> f64 {
    let g2 = gain.value().powi(2);
    let x = g2 - 1.0;
    let (t, e) = (p.transmission, p.eps);
    g2 * t / (1.0 + x * t * (0.25 * x * (e - 2.0) * e * t - e + 1.0))
}

/// `Δ(G) = 2/G + (2−ε)/2 · [(g²−1)Tε − 2]`.
fn delta_for_gain(gain: NlaGain, p: ChannelParams, amp_gain: f64) -> f64 {
    let x = gain.value().powi(2) - 1.0;
    let (t, e) = (p.transmission, p.eps);
    2.0 / amp_gain + 0.5 * (2.0 - e) * (x * t * e - 2.0)
}

/// `χ_tot = 1/(g²T) + (ε[4 − (g⁴−1)T(ε−2)] − 4) / (4g²)`.
fn chi_tot_closed_form(gain: NlaGain, p: ChannelParams) -> f64 {
    let g2 = gain.value().powi(2);
    let (t, e) = (p.transmission, p.eps);
    1.0 / (g2 * t) + (e * (4.0 - (g2 * g2 - 1.0) * t * (e - 2.0)) - 4.0) / (4.0 * g2)
}

fn clip_delta(delta: f64) -> f64 {
    if (-DELTA_SLACK..0.0).contains(&delta) {
        0.0
    } else {
        delta
    }
}

fn canonical_reduction(gain: NlaGain, p: ChannelParams, eta: f64) -> ChannelReduction {
    if (eta - 1.0).abs() <= UNIT_ETA_TOL {
        ChannelReduction {
            kind: ReductionKind::NoiseOnly,
            delta: clip_delta(delta_for_gain(gain, p, 1.0)),
            amp_gain: 1.0,
            tau: 1.0,
        }
    } else if eta < 1.0 {
        ChannelReduction {
            kind: ReductionKind::Loss,
            delta: clip_delta(delta_for_gain(gain, p, 1.0)),
            amp_gain: 1.0,
            tau: eta,
        }
    } else {
        ChannelReduction {
            kind: ReductionKind::Amp,
            delta: clip_delta(delta_for_gain(gain, p, eta)),
            amp_gain: eta,
            tau: 1.0,
        }
    }
}

/// Effective parameters of the scenario. With `general_gain = Some(G)` the
/// reduction is the GENERAL member with that amplifier gain when it is
/// feasible; otherwise the canonical reduction is kept.
pub fn effective(gain: NlaGain, params: ChannelParams, general_gain: Option<f64>) -> Result<EffectiveParams> {
    check_physical(gain, params)?;
    let lam2 = lambda_ch_sq(params);
    let g = gain.value();
    let eta = eta_unchecked(gain, params);
    let reduction = canonical_reduction(gain, params, eta);
    if reduction.delta < 0.0 {
        return Err(NlaError::Physicality {
            g,
            g_lim: g_lim(params),
            eps_lim: eps_lim(gain, params.transmission),
        });
    }
    let mut out = EffectiveParams {
        gain,
        channel: params,
        lambda_ch: lam2.sqrt(),
        g_tilde: g_tilde(gain, lam2.sqrt())?,
        g_in: g_in_unchecked(gain, params),
        eta,
        chi_tot: chi_tot_closed_form(gain, params),
        mu: (1.0 - lam2) / (1.0 - g * g * lam2),
        g_lim: g_lim(params),
        eps_lim: eps_lim(gain, params.transmission),
        reduction,
    };
    if let Some(amp_gain) = general_gain {
        if let Ok(general) = out.general_reduction(amp_gain) {
            out.reduction = general;
        }
    }
    Ok(out)
}

/// Gain at which `η` crosses 1, by bisection on `(1, g_lim)`.
///
/// `+∞` for a noiseless lossy channel (η < 1 for every g) and exactly 1 when
/// `T = 1`.
pub fn g_max(params: ChannelParams) -> f64 {
    if params.transmission == 1.0 {
        return 1.0;
    }
    if params.eps == 0.0 {
        return f64::INFINITY;
    }
    let eta_minus_one = |g: f64| eta_unchecked(NlaGain::new(g).expect("g > 1"), params) - 1.0;
    let (mut lo, mut hi) = (1.0, g_lim(params));
    // η(1) = T < 1 and η → +∞ as g → g_lim⁻.
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if eta_minus_one(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `χ_ch = (τ(G−2) + 1)/(τG)` and `χ_tot = Δ + χ_ch`.
pub fn chi_decomposition(red: &ChannelReduction) -> (f64, f64) {
    let chi_ch = (red.tau * (red.amp_gain - 2.0) + 1.0) / (red.tau * red.amp_gain);
    (chi_ch, red.delta + chi_ch)
}
