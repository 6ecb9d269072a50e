//! Dual-path check of `T̂ 𝓛[ρ] T̂ = μ 𝓒_eff[T̂_in ρ T̂_in]`.
//!
//! The direct path runs the physical channel and then the NLA of gain `g`;
//! the effective path runs the NLA of gain `g_in` and then the reduced
//! effective channel. Both are independent Fock-space simulations; only
//! the effective parameters come from the closed forms.

use serde::{Deserialize, Serialize};

use crate::channels::{
    apply_kraus, apply_nla, gaussian_channel, pure_loss_kraus, quantum_limited_amp_kraus, ChannelParams, KrausSet,
    NlaGain,
};
use crate::effective::{effective, ChannelReduction, EffectiveParams};
use crate::error::{NlaError, Result};
use crate::fock::{cat_state, coherent_state, fidelity, thermal_state, CatParity, TruncatedState};
use crate::sweep::{self, Execution};

pub const DEFAULT_TOL_FIDELITY: f64 = 1e-6;
pub const DEFAULT_TOL_MU: f64 = 1e-4;
/// Normalized population allowed in the highest Fock level.
pub const TAIL_BUDGET: f64 = 1e-6;
/// `⟨n̂⟩ · PHOTON_SAFETY_FACTOR` must not exceed `dim`.
pub const PHOTON_SAFETY_FACTOR: f64 = 4.0;
const REDUCTION_MATCH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub fidelity: f64,
    /// Direct-path weight over effective-path weight.
    pub trace_ratio: f64,
    pub mu_expected: f64,
    pub mu_rel_error: f64,
    /// `log10(TAIL_BUDGET / p_top)` with `p_top` the highest-level
    /// population of the worse output; `≥ 0` means the basis was large
    /// enough.
    pub truncation_margin: f64,
    pub passed: bool,
}

/// Physical channel then NLA `g`; unnormalized.
pub fn direct_path(state: &TruncatedState, params: ChannelParams, gain: NlaGain) -> Result<TruncatedState> {
    effective(gain, params, None)?;
    let channel = gaussian_channel(params, state.dim())?;
    let out = apply_nla(gain, &apply_kraus(&channel, state)?)?;
    check_photon_budget(&out)?;
    Ok(out)
}

/// NLA `g_in` then the effective channel `red`; unnormalized.
pub fn effective_path(
    state: &TruncatedState,
    params: ChannelParams,
    gain: NlaGain,
    red: &ChannelReduction,
) -> Result<TruncatedState> {
    let eff = effective(gain, params, None)?;
    check_reduction(&eff, red)?;
    let mut out = apply_nla(NlaGain::new(eff.g_in)?, state)?;
    for stage in reduction_channel(red, state.dim())? {
        out = apply_kraus(&stage, &out)?;
    }
    check_photon_budget(&out)?;
    Ok(out)
}

/// Stages of the effective channel in order: input noise `Δ`, amplifier
/// `G`, loss `τ`. Identity stages are omitted.
pub fn reduction_channel(red: &ChannelReduction, dim: usize) -> Result<Vec<KrausSet>> {
    let mut stages = Vec::with_capacity(3);
    if red.delta > 0.0 {
        stages.push(gaussian_channel(ChannelParams::new(1.0, red.delta)?, dim)?);
    }
    if red.amp_gain > 1.0 {
        stages.push(quantum_limited_amp_kraus(red.amp_gain, dim, dim - 1)?);
    }
    if red.tau < 1.0 {
        stages.push(pure_loss_kraus(red.tau, dim, dim - 1)?);
    }
    Ok(stages)
}

pub fn verify(
    state: &TruncatedState,
    params: ChannelParams,
    gain: NlaGain,
    red: &ChannelReduction,
    tol_f: f64,
    tol_mu: f64,
) -> Result<VerificationReport> {
    let eff = effective(gain, params, None)?;
    let direct = direct_path(state, params, gain)?;
    let effective = effective_path(state, params, gain, red)?;
    let fidelity = fidelity(&direct.normalized(), &effective.normalized())?;
    let trace_ratio = (direct.log_weight() - effective.log_weight()).exp();
    let mu_rel_error = ((trace_ratio - eff.mu) / eff.mu).abs();
    let truncation_margin = truncation_margin(&[&direct, &effective]);
    Ok(VerificationReport {
        fidelity,
        trace_ratio,
        mu_expected: eff.mu,
        mu_rel_error,
        truncation_margin,
        passed: fidelity >= 1.0 - tol_f && mu_rel_error <= tol_mu && truncation_margin >= 0.0,
    })
}

/// Fidelity between the effective-path outputs of two reductions of the
/// same scenario.
pub fn degeneracy_check(
    state: &TruncatedState,
    params: ChannelParams,
    gain: NlaGain,
    red_a: &ChannelReduction,
    red_b: &ChannelReduction,
) -> Result<f64> {
    let a = effective_path(state, params, gain, red_a)?;
    let b = effective_path(state, params, gain, red_b)?;
    fidelity(&a.normalized(), &b.normalized())
}

fn check_reduction(eff: &EffectiveParams, red: &ChannelReduction) -> Result<()> {
    if !red.is_feasible() {
        return Err(NlaError::InfeasibleReduction {
            delta: red.delta,
            amp_gain: red.amp_gain,
            tau: red.tau,
        });
    }
    if ((red.eta() - eff.eta) / eff.eta).abs() > REDUCTION_MATCH_TOL {
        return Err(NlaError::ReductionMismatch {
            quantity: "eta",
            left: red.eta(),
            right: eff.eta,
        });
    }
    let (_, chi_tot) = red.chi_decomposition();
    if (chi_tot - eff.chi_tot).abs() > REDUCTION_MATCH_TOL * (1.0 + eff.chi_tot.abs()) {
        return Err(NlaError::ReductionMismatch {
            quantity: "chi_tot",
            left: chi_tot,
            right: eff.chi_tot,
        });
    }
    Ok(())
}

fn top_quarter_mass(state: &TruncatedState) -> f64 {
    let dim = state.dim();
    state.mass_from_level(dim - (dim / 4).max(1))
}

fn check_photon_budget(out: &TruncatedState) -> Result<()> {
    let dim = out.dim();
    if out.mean_photon_number() * PHOTON_SAFETY_FACTOR > dim as f64 {
        return Err(NlaError::TruncationInsufficient {
            dim,
            tail: top_quarter_mass(out),
            threshold: TAIL_BUDGET,
        });
    }
    Ok(())
}

pub fn truncation_margin(outputs: &[&TruncatedState]) -> f64 {
    let tail = outputs
        .iter()
        .map(|s| s.mass_from_level(s.dim() - 1))
        .fold(0.0, f64::max)
        .max(1e-300);
    (TAIL_BUDGET / tail).log10()
}

/// The five reference inputs: vacuum, coherent 0.8, thermal λ = 0.3,
/// Fock |2⟩, odd cat α = 1.
pub fn reference_states(dim: usize) -> Result<Vec<(&'static str, TruncatedState)>> {
    Ok(vec![
        ("vacuum", TruncatedState::vacuum(dim)?),
        ("coherent_0.8", coherent_state(0.8.into(), dim)?),
        ("thermal_0.3", thermal_state(0.3, dim)?),
        ("fock_2", TruncatedState::fock(2, dim)?),
        ("odd_cat_1", cat_state(1.0.into(), CatParity::Odd, dim)?),
    ])
}

/// Scenario grid for the theorem suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteGrid {
    pub transmissions: Vec<f64>,
    pub noises: Vec<f64>,
    pub gains: Vec<f64>,
    /// Gains at or above this fraction of `g_lim` are skipped.
    pub max_gain_fraction: f64,
    pub dim: usize,
    pub tol_f: f64,
    pub tol_mu: f64,
}

impl Default for SuiteGrid {
    fn default() -> Self {
        Self {
            transmissions: vec![0.4, 0.6, 1.0],
            noises: vec![0.0, 0.2, 0.4],
            gains: vec![1.0, 1.2, 1.5],
            max_gain_fraction: 0.95,
            dim: 40,
            tol_f: DEFAULT_TOL_FIDELITY,
            tol_mu: DEFAULT_TOL_MU,
        }
    }
}

impl SuiteGrid {
    pub fn scenarios(&self) -> Result<Vec<(ChannelParams, NlaGain)>> {
        let mut out = Vec::new();
        for &t in &self.transmissions {
            for &e in &self.noises {
                let params = ChannelParams::new(t, e)?;
                for &g in &self.gains {
                    if g < self.max_gain_fraction * crate::effective::g_lim(params) {
                        out.push((params, NlaGain::new(g)?));
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteCase {
    pub params: ChannelParams,
    pub gain: NlaGain,
    pub state: &'static str,
    pub report: VerificationReport,
}

/// Verifies every scenario of `grid` on every reference state, using the
/// canonical reduction of each scenario.
pub fn run_theorem_suite(grid: &SuiteGrid, execution: Execution) -> Result<Vec<SuiteCase>> {
    let states = reference_states(grid.dim)?;
    let jobs: Vec<(ChannelParams, NlaGain, usize)> = grid
        .scenarios()?
        .into_iter()
        .flat_map(|(p, g)| (0..states.len()).map(move |i| (p, g, i)))
        .collect();
    sweep::map(&jobs, execution, |&(params, gain, i)| {
        let (label, state) = &states[i];
        let eff = effective(gain, params, None)?;
        let report = verify(state, params, gain, &eff.reduction, grid.tol_f, grid.tol_mu)?;
        Ok(SuiteCase {
            params,
            gain,
            state: label,
            report,
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::ReductionKind;
    use crate::fock::quadrature_moments;

    const DIM: usize = 40;

    fn p(t: f64, e: f64) -> ChannelParams {
        ChannelParams::new(t, e).unwrap()
    }

    fn g(v: f64) -> NlaGain {
        NlaGain::new(v).unwrap()
    }

    #[test]
    fn unit_gain_paths_coincide_with_channel() {
        let s = coherent_state(0.8.into(), DIM).unwrap();
        let params = p(0.6, 0.2);
        let direct = direct_path(&s, params, g(1.0)).unwrap();
        let channel_only = apply_kraus(&gaussian_channel(params, DIM).unwrap(), &s).unwrap();
        assert_eq!(direct, channel_only);

        let eff = effective(g(1.0), params, None).unwrap();
        let via_eff = effective_path(&s, params, g(1.0), &eff.reduction).unwrap();
        assert!(fidelity(&via_eff.normalized(), &channel_only.normalized()).unwrap() >= 1.0 - 1e-10);

        let report = verify(&s, params, g(1.0), &eff.reduction, 1e-6, 1e-4).unwrap();
        assert!((report.fidelity - 1.0).abs() < 1e-10);
        assert!((report.trace_ratio - 1.0).abs() < 1e-9);
        assert_eq!(report.mu_expected, 1.0);
        assert!(report.passed);
    }

    #[test]
    fn direct_path_on_coherent_is_displaced_thermal() {
        let out = direct_path(&coherent_state(0.8.into(), DIM).unwrap(), p(0.6, 0.2), g(1.5)).unwrap();
        let m = quadrature_moments(&out.normalized()).unwrap();
        // amplitude g̃√T·0.8 and variance (1+g²λ²)/(1−g²λ²), 30-digit oracle
        assert!((m.mean_x / 2.0 - 1.0048821655).abs() < 1e-7);
        assert!((m.var - 1.29189189189).abs() < 1e-7);
    }

    #[test]
    fn direct_path_on_vacuum_is_thermal() {
        let out = direct_path(&TruncatedState::vacuum(DIM).unwrap(), p(0.6, 0.2), g(1.5)).unwrap();
        let expected = thermal_state(0.356873213573, DIM).unwrap();
        assert!(fidelity(&out.normalized(), &expected).unwrap() >= 1.0 - 1e-8);
    }

    #[test]
    fn theorem_instances() {
        let params = p(0.6, 0.2);
        let eff = effective(g(1.5), params, None).unwrap();
        assert_eq!(eff.reduction.kind, ReductionKind::Loss);
        let s = coherent_state(0.8.into(), DIM).unwrap();
        let report = verify(&s, params, g(1.5), &eff.reduction, 1e-7, 1e-5).unwrap();
        assert!(report.fidelity >= 1.0 - 1e-7, "{report:?}");
        assert!((report.mu_expected - 1.08108108108).abs() < 1e-10);
        assert!(report.mu_rel_error <= 1e-5);
        assert!(report.passed);

        let two = TruncatedState::fock(2, DIM).unwrap();
        assert!(verify(&two, params, g(1.5), &eff.reduction, 1e-6, 1e-4).unwrap().passed);

        let params = p(1.0, 0.4);
        let eff = effective(g(1.5), params, None).unwrap();
        assert_eq!(eff.reduction.kind, ReductionKind::Amp);
        let cat = cat_state(1.0.into(), CatParity::Odd, DIM).unwrap();
        let direct = direct_path(&cat, params, g(1.5)).unwrap();
        let via_eff = effective_path(&cat, params, g(1.5), &eff.reduction).unwrap();
        assert!(fidelity(&direct.normalized(), &via_eff.normalized()).unwrap() >= 1.0 - 1e-6);
    }

    #[test]
    fn degeneracy_examples() {
        let params = p(0.6, 0.2);
        let eff = effective(g(1.5), params, None).unwrap();
        let s = coherent_state(0.8.into(), DIM).unwrap();
        let same = degeneracy_check(&s, params, g(1.5), &eff.reduction, &eff.reduction).unwrap();
        assert!((same - 1.0).abs() < 1e-12);

        let general = eff.general_reduction(1.1).unwrap();
        let f = degeneracy_check(&s, params, g(1.5), &eff.reduction, &general).unwrap();
        assert!(f >= 1.0 - 1e-6);

        let eff = effective(g(1.5), p(1.0, 0.4), None).unwrap();
        assert!(eff.general_reduction(3.0).is_err());
    }

    #[test]
    fn mismatched_reduction_is_rejected() {
        let params = p(0.6, 0.2);
        let other = effective(g(1.2), params, None).unwrap().reduction;
        let s = TruncatedState::vacuum(DIM).unwrap();
        assert!(matches!(
            effective_path(&s, params, g(1.5), &other),
            Err(NlaError::ReductionMismatch { .. })
        ));
        let bad = ChannelReduction {
            delta: -0.1,
            ..effective(g(1.5), params, None).unwrap().reduction
        };
        assert!(matches!(
            effective_path(&s, params, g(1.5), &bad),
            Err(NlaError::InfeasibleReduction { .. })
        ));
    }

    #[test]
    fn unphysical_gain_is_rejected() {
        let s = TruncatedState::vacuum(DIM).unwrap();
        assert!(matches!(
            direct_path(&s, p(0.6, 0.2), g(5.0)),
            Err(NlaError::Physicality { .. })
        ));
    }

    #[test]
    fn mu_is_state_independent() {
        let params = p(0.4, 0.4);
        let eff = effective(g(1.5), params, None).unwrap();
        let ratios: Vec<f64> = reference_states(DIM)
            .unwrap()
            .iter()
            .map(|(_, s)| {
                verify(s, params, g(1.5), &eff.reduction, 1e-6, 1e-4)
                    .unwrap()
                    .trace_ratio
            })
            .collect();
        for r in &ratios {
            assert!(((r - ratios[0]) / ratios[0]).abs() < 1e-4);
        }
    }

    #[test]
    fn truncation_defect_shrinks_with_dim() {
        let params = p(1.0, 0.4);
        let eff = effective(g(1.5), params, None).unwrap();
        let defects: Vec<f64> = [20, 30, 40]
            .iter()
            .map(|&dim| {
                let s = cat_state(1.0.into(), CatParity::Odd, dim).unwrap();
                1.0 - verify(&s, params, g(1.5), &eff.reduction, 1.0, 1.0).unwrap().fidelity
            })
            .collect();
        for w in defects.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{defects:?}");
        }
    }

    #[test]
    fn suite_grid_skips_near_limit_gains() {
        let grid = SuiteGrid {
            gains: vec![1.0, 2.4],
            ..SuiteGrid::default()
        };
        let scenarios = grid.scenarios().unwrap();
        // g = 2.4 is within 5% of g_lim only for (T, ε) = (1, 0.4)
        assert_eq!(scenarios.len(), 9 + 8);
    }
}
