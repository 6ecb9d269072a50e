//! Loss suppression with a noiseless attenuator, and phase concentration
//! by adding thermal noise before the NLA.

use serde::{Deserialize, Serialize};

use crate::channels::{apply_kraus, apply_nla, gaussian_channel, ChannelParams, NlaGain};
use crate::effective::{effective, eps_lim, ChannelReduction};
use crate::equivalence::reduction_channel;
use crate::error::{NlaError, Result};
use crate::fock::{coherent_state, fidelity, quadrature_moments, TruncatedState};
use crate::sweep::{self, Execution};

/// Attenuator `ν = 1/g_in` placed before the channel so that only the
/// effective channel survives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSuppressionPlan {
    pub nu: f64,
    pub g: f64,
    pub g_in: f64,
    pub eta: f64,
    pub residual: ChannelReduction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossSuppressionRun {
    pub pipeline: TruncatedState,
    pub reference: TruncatedState,
    pub fidelity: f64,
}

pub fn plan_loss_suppression(params: ChannelParams, gain: NlaGain) -> Result<LossSuppressionPlan> {
    let eff = effective(gain, params, None)?;
    Ok(LossSuppressionPlan {
        nu: 1.0 / eff.g_in,
        g: gain.value(),
        g_in: eff.g_in,
        eta: eff.eta,
        residual: eff.reduction,
    })
}

/// Runs attenuator → channel → NLA and compares with the residual channel
/// applied directly.
pub fn run_loss_suppression(
    state: &TruncatedState,
    plan: &LossSuppressionPlan,
    params: ChannelParams,
) -> Result<LossSuppressionRun> {
    let dim = state.dim();
    let attenuated = apply_nla(NlaGain::new(plan.nu)?, state)?;
    let transmitted = apply_kraus(&gaussian_channel(params, dim)?, &attenuated)?;
    let pipeline = apply_nla(NlaGain::new(plan.g)?, &transmitted)?;

    let mut reference = state.clone();
    for stage in reduction_channel(&plan.residual, dim)? {
        reference = apply_kraus(&stage, &reference)?;
    }
    let fidelity = fidelity(&pipeline.normalized(), &reference.normalized())?;
    Ok(LossSuppressionRun {
        pipeline,
        reference,
        fidelity,
    })
}

/// One point of the phase-concentration curve for a coherent input of real
/// amplitude `alpha`, noise `eps_added` added on a lossless line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub eps_added: f64,
    pub phi: f64,
    pub snr: f64,
    pub g_tilde: f64,
    pub g_in: f64,
    pub chi_tot: f64,
    /// `tan(φ/2)` from the amplified displaced-thermal picture.
    pub tan_half_direct: f64,
    /// `tan(φ/2)` from the effective picture, `√(1+χ_tot)/(2 g_in α)`.
    pub tan_half_effective: f64,
}

impl PhasePoint {
    pub fn lambda_ch_sq(&self) -> f64 {
        self.eps_added / (2.0 + self.eps_added)
    }
}

pub fn phase_uncertainty(alpha: f64, gain: NlaGain, eps_added: f64) -> Result<PhasePoint> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(NlaError::Domain {
            name: "alpha",
            value: alpha,
            expected: "alpha > 0",
        });
    }
    let limit = eps_lim(gain, 1.0);
    if eps_added >= limit {
        return Err(NlaError::Physicality {
            g: gain.value(),
            g_lim: crate::effective::g_lim(ChannelParams::new(1.0, eps_added)?),
            eps_lim: limit,
        });
    }
    let params = ChannelParams::new(1.0, eps_added)?;
    let eff = effective(gain, params, None)?;
    let g = gain.value();
    let glam2 = g * g * eff.lambda_ch * eff.lambda_ch;
    let std_dev = ((1.0 + glam2) / (1.0 - glam2)).sqrt();
    let tan_half_direct = std_dev / (2.0 * eff.g_tilde * alpha);
    let tan_half_effective = (1.0 + eff.chi_tot).sqrt() / (2.0 * eff.g_in * alpha);
    Ok(PhasePoint {
        eps_added,
        phi: 2.0 * tan_half_direct.atan(),
        snr: 1.0 / (tan_half_direct * tan_half_direct),
        g_tilde: eff.g_tilde,
        g_in: eff.g_in,
        chi_tot: eff.chi_tot,
        tan_half_direct,
        tan_half_effective,
    })
}

/// Phase curve over `eps_grid`, in grid order. The whole grid is checked
/// before any point is evaluated.
pub fn phase_sweep(alpha: f64, gain: NlaGain, eps_grid: &[f64], execution: Execution) -> Result<Vec<PhasePoint>> {
    if let Some(&bad) = eps_grid.iter().find(|&&e| !(e.is_finite() && e >= 0.0)) {
        return Err(NlaError::Domain {
            name: "eps",
            value: bad,
            expected: "eps >= 0",
        });
    }
    let limit = eps_lim(gain, 1.0);
    if let Some(&bad) = eps_grid.iter().find(|&&e| e >= limit) {
        return Err(NlaError::Physicality {
            g: gain.value(),
            g_lim: crate::effective::g_lim(ChannelParams::new(1.0, bad)?),
            eps_lim: limit,
        });
    }
    sweep::map(eps_grid, execution, |&e| phase_uncertainty(alpha, gain, e))
        .into_iter()
        .collect()
}

/// SNR `mean_x² / var` of the simulated amplified state: coherent `alpha`
/// through the `(1, eps)` channel and the NLA, normalized.
pub fn simulated_snr(alpha: f64, gain: NlaGain, eps_added: f64, dim: usize) -> Result<f64> {
    let state = coherent_state(alpha.into(), dim)?;
    let noisy = apply_kraus(&gaussian_channel(ChannelParams::new(1.0, eps_added)?, dim)?, &state)?;
    let amplified = apply_nla(gain, &noisy)?;
    Ok(quadrature_moments(&amplified.normalized())?.snr())
}
