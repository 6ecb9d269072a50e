use anyhow::{bail, Result};
use nla_core::applications::{phase_sweep, plan_loss_suppression, run_loss_suppression, PhasePoint};
use nla_core::effective::{effective, g_max};
use nla_core::equivalence::verify;
use nla_core::fock::{cat_state, coherent_state, thermal_state, wigner_grid};
use nla_core::{CatParity, ChannelParams, ChannelReduction, Execution, NlaGain, TruncatedState, VerificationReport};
use serde_json::{json, Value};

use crate::output::{csv_text, emit, fmt_num, json_text};
use crate::{ChannelArgs, Command, Format, OutputArgs, Parity, StateArgs, StateKind, UsageError, VerifyFailed};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Params { channel, output } => params(&channel, &output),
        Command::Verify {
            channel,
            state,
            amp_gain,
            tol_f,
            tol_mu,
            output,
        } => verify_cmd(&channel, &state, amp_gain, tol_f, tol_mu, &output),
        Command::Suppress { channel, state, output } => suppress(&channel, &state, &output),
        Command::Phase {
            alpha,
            g,
            eps,
            points,
            sequential,
            output,
        } => phase(alpha, g, eps, points, sequential, &output),
        Command::Wigner {
            state,
            range,
            step,
            output,
        } => wigner(&state, range, step, &output),
    }
}

fn scenario(args: &ChannelArgs) -> Result<(ChannelParams, NlaGain)> {
    Ok((ChannelParams::new(args.t, args.eps)?, NlaGain::new(args.g)?))
}

fn build_state(args: &StateArgs) -> Result<TruncatedState> {
    let dim = args.dim;
    let state = match args.state {
        StateKind::Vacuum => TruncatedState::vacuum(dim)?,
        StateKind::Coherent => coherent_state(args.param.unwrap_or(0.8).into(), dim)?,
        StateKind::Thermal => thermal_state(args.param.unwrap_or(0.3), dim)?,
        StateKind::Fock => {
            let n = args.param.unwrap_or(2.0);
            if n < 0.0 || n.fract() != 0.0 {
                bail!(UsageError(format!("--param {n}: fock needs a non-negative integer")));
            }
            TruncatedState::fock(n as usize, dim)?
        }
        StateKind::Cat => {
            let parity = match args.parity {
                Parity::Even => CatParity::Even,
                Parity::Odd => CatParity::Odd,
            };
            cat_state(args.param.unwrap_or(1.0).into(), parity, dim)?
        }
    };
    Ok(state)
}

fn reduction_json(red: &ChannelReduction) -> Value {
    let (chi_ch, _) = red.chi_decomposition();
    json!({
        "kind": red.kind,
        "delta": red.delta,
        "amp_gain": red.amp_gain,
        "tau": red.tau,
        "chi_ch": chi_ch,
    })
}

fn params(args: &ChannelArgs, out: &OutputArgs) -> Result<()> {
    let (p, g) = scenario(args)?;
    let e = effective(g, p, None)?;
    let gm = g_max(p);
    let text = match out.format.unwrap_or(Format::Json) {
        Format::Json => json_text(json!({
            "g": g.value(),
            "T": p.transmission,
            "eps": p.eps,
            "lambda_ch": e.lambda_ch,
            "g_tilde": e.g_tilde,
            "g_in": e.g_in,
            "eta": e.eta,
            "chi_tot": e.chi_tot,
            "mu": e.mu,
            "g_lim": e.g_lim,
            "eps_lim": e.eps_lim,
            "g_max": gm,
            "reduction": reduction_json(&e.reduction),
        }))?,
        Format::Csv => {
            let r = &e.reduction;
            let kind = serde_json::to_value(r.kind)?.as_str().unwrap_or_default().to_owned();
            let nums = [
                g.value(),
                p.transmission,
                p.eps,
                e.lambda_ch,
                e.g_tilde,
                e.g_in,
                e.eta,
                e.chi_tot,
                e.mu,
                e.g_lim,
                e.eps_lim,
                gm,
                r.delta,
                r.amp_gain,
                r.tau,
            ];
            let mut row: Vec<String> = nums.iter().map(|&v| fmt_num(v)).collect();
            row.insert(12, kind);
            csv_text(
                &[
                    "g",
                    "T",
                    "eps",
                    "lambda_ch",
                    "g_tilde",
                    "g_in",
                    "eta",
                    "chi_tot",
                    "mu",
                    "g_lim",
                    "eps_lim",
                    "g_max",
                    "reduction",
                    "delta",
                    "amp_gain",
                    "tau",
                ],
                [row],
            )?
        }
    };
    emit(&text, out.output.as_deref())
}

fn report_text(r: &VerificationReport, format: Format) -> Result<String> {
    match format {
        Format::Json => json_text(serde_json::to_value(r)?),
        Format::Csv => csv_text(
            &[
                "fidelity",
                "trace_ratio",
                "mu_expected",
                "mu_rel_error",
                "truncation_margin",
                "passed",
            ],
            [vec![
                fmt_num(r.fidelity),
                fmt_num(r.trace_ratio),
                fmt_num(r.mu_expected),
                fmt_num(r.mu_rel_error),
                fmt_num(r.truncation_margin),
                r.passed.to_string(),
            ]],
        ),
    }
}

fn verify_cmd(
    args: &ChannelArgs,
    state: &StateArgs,
    amp_gain: Option<f64>,
    tol_f: f64,
    tol_mu: f64,
    out: &OutputArgs,
) -> Result<()> {
    let (p, g) = scenario(args)?;
    let e = effective(g, p, None)?;
    let red = match amp_gain {
        Some(amp) => e.general_reduction(amp)?,
        None => e.reduction,
    };
    let input = build_state(state)?;
    let report = verify(&input, p, g, &red, tol_f, tol_mu)?;
    emit(
        &report_text(&report, out.format.unwrap_or(Format::Json))?,
        out.output.as_deref(),
    )?;
    if !report.passed {
        bail!(VerifyFailed);
    }
    Ok(())
}

fn suppress(args: &ChannelArgs, state: &StateArgs, out: &OutputArgs) -> Result<()> {
    let (p, g) = scenario(args)?;
    let plan = plan_loss_suppression(p, g)?;
    let run = run_loss_suppression(&build_state(state)?, &plan, p)?;
    let text = match out.format.unwrap_or(Format::Json) {
        Format::Json => json_text(json!({
            "nu": plan.nu,
            "g": plan.g,
            "g_in": plan.g_in,
            "eta": plan.eta,
            "residual": reduction_json(&plan.residual),
            "fidelity": run.fidelity,
        }))?,
        Format::Csv => csv_text(
            &["nu", "g", "g_in", "eta", "delta", "fidelity"],
            [
                [plan.nu, plan.g, plan.g_in, plan.eta, plan.residual.delta, run.fidelity]
                    .iter()
                    .map(|&v| fmt_num(v))
                    .collect(),
            ],
        )?,
    };
    emit(&text, out.output.as_deref())
}

const PHASE_COLUMNS: [&str; 7] = ["eps", "phi_rad", "snr", "g_tilde", "g_in", "chi_tot", "lambda_ch_sq"];

fn phase_row(pt: &PhasePoint) -> [f64; 7] {
    [
        pt.eps_added,
        pt.phi,
        pt.snr,
        pt.g_tilde,
        pt.g_in,
        pt.chi_tot,
        pt.lambda_ch_sq(),
    ]
}

fn phase(alpha: f64, g: f64, eps: Vec<f64>, points: usize, sequential: bool, out: &OutputArgs) -> Result<()> {
    let gain = NlaGain::new(g)?;
    let grid = if eps.is_empty() {
        if points < 2 {
            bail!(UsageError("--points must be at least 2".into()));
        }
        let limit = nla_core::effective::eps_lim(gain, 1.0);
        let top = if limit.is_finite() {
            limit * (1.0 - 1.0 / points as f64)
        } else {
            2.0
        };
        (0..points).map(|i| top * i as f64 / (points - 1) as f64).collect()
    } else {
        eps
    };
    let exec = if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let curve = phase_sweep(alpha, gain, &grid, exec)?;
    let text = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_text(
            &PHASE_COLUMNS,
            curve
                .iter()
                .map(|pt| phase_row(pt).iter().map(|&v| fmt_num(v)).collect()),
        )?,
        Format::Json => json_text(Value::Array(
            curve
                .iter()
                .map(|pt| {
                    PHASE_COLUMNS
                        .iter()
                        .zip(phase_row(pt))
                        .map(|(k, v)| (k.to_string(), json!(v)))
                        .collect()
                })
                .collect(),
        ))?,
    };
    emit(&text, out.output.as_deref())
}

fn wigner(state: &StateArgs, range: f64, step: f64, out: &OutputArgs) -> Result<()> {
    if !(step > 0.0 && range >= 0.0 && range.is_finite()) {
        bail!(UsageError(format!(
            "need --step > 0 and --range >= 0, got {step} and {range}"
        )));
    }
    let n = (range / step + 1e-9).floor() as i64;
    // Integer multiples of the step keep the origin exactly on the grid.
    let axis: Vec<f64> = (-n..=n).map(|i| i as f64 * step).collect();
    let w = wigner_grid(&build_state(state)?, &axis, &axis);
    let text = match out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let rows = axis.iter().enumerate().flat_map(|(i, &x)| {
                let w = &w;
                axis.iter()
                    .enumerate()
                    .map(move |(j, &p)| vec![fmt_num(x), fmt_num(p), fmt_num(w[(i, j)])])
            });
            csv_text(&["x", "p", "w"], rows)?
        }
        Format::Json => {
            let rows: Vec<Vec<f64>> = (0..axis.len()).map(|i| w.row(i).iter().copied().collect()).collect();
            json_text(json!({ "x": axis, "p": axis, "w": rows }))?
        }
    };
    emit(&text, out.output.as_deref())
}
