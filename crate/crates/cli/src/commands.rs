//! The five subcommands. Each returns an [`Outcome`]; numerical failures
//! after output has started are recorded in it rather than returned.

use gamow_core::decay::{
    amplitude_series, classify_regimes, fit_pole_from_series, gamow_approximation, zeno_check,
    DecayError, RegimeOptions, RegimeReport, SurvivalSeries, Window,
};
use gamow_core::evolution::{
    temperature_monotonicity, thermal_evolve, time_evolve, verify_ode_solutions, EvolutionError,
    LadderCoefficient, LadderMode,
};
use gamow_core::friedrichs::{
    discretize, find_pole, perturbative_pole, pole_residual, FriedrichsError, FriedrichsModel,
    ResonancePole,
};
use gamow_core::numerics::{QuadratureSpec, RootSearchConfig};
use gamow_core::thermo::{
    complex_entropy, entropy_scan_beta, Monotonicity, ThermoError, ThermoPoint,
};
use gamow_core::Complex;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::Config;
use crate::output::{Cell, Outcome, PoleInfo, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Pole,
    Survival,
    Entropy,
    Evolve,
    Scan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pole => "pole",
            Command::Survival => "survival",
            Command::Entropy => "entropy",
            Command::Evolve => "evolve",
            Command::Scan => "scan",
        }
    }
}

pub fn run(command: Command, cfg: &Config) -> Result<Outcome, CliError> {
    let ctx = Context {
        cfg,
        spec: cfg.quadrature()?,
        root: cfg.root_search()?,
    };
    let mut outcome = Outcome::new(command.name());
    match command {
        Command::Pole => pole(&ctx, &mut outcome)?,
        Command::Survival => survival(&ctx, &mut outcome)?,
        Command::Entropy => entropy(&ctx, &mut outcome)?,
        Command::Evolve => evolve(&ctx, &mut outcome)?,
        Command::Scan => scan(&ctx, &mut outcome)?,
    }
    Ok(outcome)
}

struct Context<'a> {
    cfg: &'a Config,
    spec: QuadratureSpec<f64>,
    root: RootSearchConfig<f64>,
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn thermo_error(e: ThermoError, key: &str) -> CliError {
    match e {
        ThermoError::Derivative(_) | ThermoError::IllDefinedBracket => numerical(e),
        ThermoError::NonPositiveK(_) => CliError::Config(format!("thermo.k: {e}")),
        _ => CliError::Config(format!("{key}: {e}")),
    }
}

fn trend(m: Monotonicity) -> &'static str {
    match m {
        Monotonicity::StrictlyIncreasing => "strictly_increasing",
        Monotonicity::StrictlyDecreasing => "strictly_decreasing",
        Monotonicity::Constant => "constant",
        Monotonicity::Mixed => "mixed",
    }
}

fn window(w: &Window<f64>) -> Value {
    json!([w.start, w.end])
}

/// Pole of the configured model. Without an analytic continuation the
/// golden-rule estimate stands in, with a warning.
fn model_pole(
    ctx: &Context,
    model: &FriedrichsModel<f64>,
    outcome: &mut Outcome,
) -> Result<ResonancePole<f64>, CliError> {
    let (pole, source) = match find_pole(model, &ctx.root, &ctx.spec) {
        Ok(p) if model.lambda() == 0.0 => (p, "stable"),
        Ok(p) => (p, "find_pole"),
        Err(FriedrichsError::ContinuationUnavailable) => {
            outcome.warnings.push(
                "form factor has no analytic continuation; using the golden-rule pole".into(),
            );
            (perturbative_pole(model, &ctx.spec).map_err(numerical)?, "perturbative")
        }
        Err(e) => return Err(numerical(format!("pole search failed: {e}"))),
    };
    outcome.pole = Some(PoleInfo {
        e_r: pole.e_r(),
        gamma: pole.gamma(),
        source,
    });
    Ok(pole)
}

/// `pole.e_r`/`pole.gamma` when given, else the model pole.
fn resolved_pole(ctx: &Context, outcome: &mut Outcome) -> Result<ResonancePole<f64>, CliError> {
    match ctx.cfg.explicit_pole()? {
        Some(p) => {
            outcome.pole = Some(PoleInfo {
                e_r: p.e_r(),
                gamma: p.gamma(),
                source: "config",
            });
            Ok(p)
        }
        None => model_pole(ctx, &ctx.cfg.model()?, outcome),
    }
}

fn oracle_omega_max(ctx: &Context, model: &FriedrichsModel<f64>) -> Result<f64, CliError> {
    let raw = ctx.cfg.get("oracle.omega_max").unwrap_or("auto");
    if raw.trim() != "auto" {
        return ctx.cfg.number("oracle.omega_max");
    }
    let ff = model.form_factor();
    let end = ff.support_end();
    let span = if end.is_finite() {
        1.2 * end
    } else {
        // f^2 ~ 2 s / w^3 beyond the peak; stop where lambda^2 f^2 < 1e-7.
        let s = ff.energy_scale().powi(2);
        (20.0 * ff.energy_scale()).max((2.0 * s * model.lambda().powi(2) / 1e-7).cbrt())
    };
    Ok(span.max(2.0 * model.omega0()))
}

fn pole(ctx: &Context, outcome: &mut Outcome) -> Result<(), CliError> {
    let model = ctx.cfg.model()?;
    let bins = ctx.cfg.count("oracle.bins")?;
    let omega_max = oracle_omega_max(ctx, &model)?;
    let pole = model_pole(ctx, &model, outcome)?;
    let pert = perturbative_pole(&model, &ctx.spec).map_err(numerical)?;
    let source = outcome.pole.as_ref().map(|p| p.source).unwrap_or("");
    let mut table = Table::new("pole", &["method", "e_r", "gamma", "residual", "gamma_delta"]);

    if model.lambda() == 0.0 {
        outcome
            .warnings
            .push("stable state: lambda = 0 leaves the level undamped".into());
        table.push(vec!["pole".into(), pole.e_r().into(), 0.0.into(), 0.0.into(), 0.0.into()]);
    } else if source == "find_pole" {
        let residual = pole_residual(&model, &pole, &ctx.spec).map_err(numerical)?;
        table.push(vec![
            "pole".into(),
            pole.e_r().into(),
            pole.gamma().into(),
            residual.into(),
            0.0.into(),
        ]);
    }
    table.push(vec![
        "perturbative".into(),
        pert.e_r().into(),
        pert.gamma().into(),
        Cell::Empty,
        (pert.gamma() - pole.gamma()).into(),
    ]);

    if model.lambda() != 0.0 && pole.gamma() > 0.0 {
        outcome.summary.insert("gamma_over_lambda2".into(), json!(pole.gamma() / model.lambda().powi(2)));
    }
    if pert.gamma() > 0.0 {
        outcome.summary.insert("golden_rule_ratio".into(), json!(pole.gamma() / pert.gamma()));
    }

    if bins > 0 && pole.gamma() > 0.0 {
        match oracle_fit(&model, &pole, bins, omega_max) {
            Ok((e, g, overlap_sum)) => {
                table.push(vec![
                    "oracle".into(),
                    e.into(),
                    g.into(),
                    Cell::Empty,
                    (g - pole.gamma()).into(),
                ]);
                outcome.summary.insert(
                    "oracle".into(),
                    json!({
                        "bins": bins,
                        "omega_max": omega_max,
                        "overlap_sum": overlap_sum,
                        "gamma_rel_delta": (g - pole.gamma()) / pole.gamma(),
                    }),
                );
            }
            Err(e) => outcome.warnings.push(format!("oracle: {e}")),
        }
    }
    outcome.tables.push(table);
    Ok(())
}

/// Pole read off the discretised model's survival curve on `[1/Gamma, 5/Gamma]`.
fn oracle_fit(
    model: &FriedrichsModel<f64>,
    pole: &ResonancePole<f64>,
    bins: usize,
    omega_max: f64,
) -> Result<(f64, f64, f64), String> {
    let spectrum = discretize(model, bins, omega_max).map_err(|e| e.to_string())?;
    let (start, end) = (1.0 / pole.gamma(), 5.0 / pole.gamma());
    let times: Vec<f64> = (0..=160).map(|i| start + (end - start) * i as f64 / 160.0).collect();
    let amplitudes = times.iter().map(|&t| spectrum.amplitude(t)).collect();
    let series = SurvivalSeries::from_amplitudes(times, amplitudes).map_err(|e| e.to_string())?;
    let (e, g) = fit_pole_from_series(&series, start, end).ok_or("degenerate oracle fit")?;
    Ok((e, g, spectrum.overlap_sum()))
}

fn survival(ctx: &Context, outcome: &mut Outcome) -> Result<(), CliError> {
    let model = ctx.cfg.model()?;
    let times = ctx
        .cfg
        .grid("time")?
        .ok_or_else(|| CliError::Config("grid.time: survival needs a time grid".into()))?;
    if times.iter().any(|&t| t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(CliError::Config("grid.time: times must be non-negative and ordered".into()));
    }
    let regimes = ctx.cfg.flag("survival.regimes")?;
    let zeno = ctx.cfg.flag("survival.zeno")?;
    let pole = model_pole(ctx, &model, outcome)?;

    let results = amplitude_series(&model, &times, &ctx.spec).map_err(numerical)?;
    let mut table = Table::new("survival", &["t", "re_a", "im_a", "p", "p_gamow"]);
    let mut amplitudes = Vec::with_capacity(times.len());
    for (&t, r) in times.iter().zip(results) {
        match r {
            Ok(a) => {
                table.push(vec![
                    t.into(),
                    a.re.into(),
                    a.im.into(),
                    a.norm_sqr().into(),
                    gamow_approximation(&pole, t).norm_sqr().into(),
                ]);
                amplitudes.push(a);
            }
            Err(e) => {
                let msg = format!("t = {t}: {e}");
                table.failure = Some(msg.clone());
                outcome.error = Some(msg);
                break;
            }
        }
    }
    outcome.tables.push(table);
    if outcome.error.is_some() {
        return Ok(());
    }
    let series = match SurvivalSeries::from_amplitudes(times, amplitudes) {
        Ok(s) => s,
        Err(e) => {
            outcome.error = Some(e.to_string());
            return Ok(());
        }
    };

    if regimes {
        match classify_regimes(&series, &pole, &RegimeOptions::default()) {
            Ok(r) => {
                outcome.summary.insert("regimes".into(), regime_summary(&r, &pole));
            }
            Err(e) => {
                if matches!(e, DecayError::InsufficientSpan { .. }) {
                    outcome.warnings.push(format!("regimes: {e}"));
                } else {
                    outcome.warnings.push(format!("regimes unavailable: {e}"));
                }
                outcome.summary.insert("regimes".into(), json!({ "error": e.to_string() }));
            }
        }
    }
    if zeno {
        match zeno_check(&model, &ctx.spec) {
            Ok(z) => {
                if !z.resolved {
                    outcome
                        .warnings
                        .push("zeno: derivative error estimate exceeds the Zeno bound".into());
                }
                outcome.summary.insert(
                    "zeno".into(),
                    json!({
                        "derivative": z.derivative,
                        "error_estimate": z.error_estimate,
                        "scale": z.scale,
                        "step": z.step,
                        "is_zeno": z.is_zeno,
                        "resolved": z.resolved,
                    }),
                );
            }
            Err(e) => outcome.warnings.push(format!("zeno: {e}")),
        }
    }
    Ok(())
}

fn regime_summary(r: &RegimeReport<f64>, pole: &ResonancePole<f64>) -> Value {
    let tail = &r.tail;
    json!({
        "zeno_window": r.zeno_window.as_ref().map(window),
        "zeno_curvature": r.zeno_curvature,
        "exponential_window": window(&r.exponential_window),
        "gamma_fit": r.gamma_fit,
        "seed_gamma_fit": r.seed_gamma_fit,
        "gamma_fit_rel_delta": (r.gamma_fit - pole.gamma()) / pole.gamma(),
        "tail": {
            "resolved": tail.resolved,
            "window": tail.window.as_ref().map(window),
            "exponent": tail.exponent,
            "last_envelope_ratio": tail.envelope_ratio.last().map(|p| p.1),
            "ratio_increasing": tail.ratio_increasing,
            "largest_resolved_time": tail.largest_resolved_time,
        },
        "fit_residuals": {
            "zeno": r.fit_residuals.zeno,
            "exponential": r.fit_residuals.exponential,
            "tail": r.fit_residuals.tail,
        },
    })
}

fn entropy(ctx: &Context, outcome: &mut Outcome) -> Result<(), CliError> {
    let k = ctx.cfg.number("thermo.k")?;
    let betas = match ctx.cfg.grid("beta")? {
        Some(b) => b,
        None => vec![ctx.cfg.number("thermo.beta")?],
    };
    if let Some(b) = betas.iter().find(|b| b.is_nan() || **b <= 0.0) {
        return Err(CliError::Config(format!("grid.beta: beta must be positive, got {b}")));
    }
    ThermoPoint::new(1.0, k).map_err(|e| thermo_error(e, "thermo.k"))?;
    let pole = resolved_pole(ctx, outcome)?;
    let scan = entropy_scan_beta(&pole, &betas, k).map_err(|e| thermo_error(e, "grid.beta"))?;
    let mut table = Table::new("entropy", &["beta", "re_s", "im_s", "identity_gap"]);
    let mut worst = 0.0f64;
    for row in &scan.rows {
        worst = worst.max(row.identity_gap);
        table.push(vec![
            row.parameter.into(),
            row.entropy.real_part.into(),
            row.entropy.imag_part.into(),
            row.identity_gap.into(),
        ]);
    }
    outcome.tables.push(table);
    outcome.summary.insert("k".into(), json!(k));
    outcome.summary.insert("max_identity_gap".into(), json!(worst));
    outcome.summary.insert("real_trend".into(), json!(trend(scan.real_trend)));
    outcome.summary.insert("imag_trend".into(), json!(trend(scan.imag_trend)));
    Ok(())
}

fn evolve(ctx: &Context, outcome: &mut Outcome) -> Result<(), CliError> {
    let mode = match ctx.cfg.choice("evolve.mode", &["in", "out"])? {
        "in" => LadderMode::InCreation,
        _ => LadderMode::OutAnnihilation,
    };
    let thermal = ctx.cfg.choice("evolve.branch", &["thermal", "time"])? == "thermal";
    let value = Complex::new(ctx.cfg.number("evolve.value.re")?, ctx.cfg.number("evolve.value.im")?);
    let (grid_key, column) = if thermal { ("tau", "tau") } else { ("time", "t") };
    let grid = ctx.cfg.grid(grid_key)?.ok_or_else(|| {
        CliError::Config(format!("grid.{grid_key}: evolve needs a {grid_key} grid"))
    })?;
    if thermal && grid.iter().any(|&x| x < 0.0) {
        return Err(CliError::Config("grid.tau: thermal evolution needs tau >= 0".into()));
    }
    let temperatures = ctx.cfg.grid("temperature")?;
    let k = ctx.cfg.number("thermo.k")?;
    let pole = resolved_pole(ctx, outcome)?;
    let c0 = LadderCoefficient::new(mode, value).map_err(|e| CliError::Config(format!("evolve.value: {e}")))?;

    let mut table = Table::new("evolve", &[column, "re", "im", "modulus"]);
    for &x in &grid {
        let step = if thermal {
            thermal_evolve(&c0, &pole, x)
        } else {
            time_evolve(&c0, &pole, x)
        };
        match step {
            Ok(c) => table.push(vec![x.into(), c.value.re.into(), c.value.im.into(), c.value.norm().into()]),
            Err(e) => {
                let msg = format!("{column} = {x}: {e}");
                table.failure = Some(msg.clone());
                outcome.error = Some(msg);
                break;
            }
        }
    }
    outcome.tables.push(table);

    if thermal && outcome.error.is_none() {
        match verify_ode_solutions(&pole, &grid) {
            Ok(check) => {
                outcome
                    .summary
                    .insert("ode_max_deviation".into(), json!(check.max_deviation()));
            }
            Err(e) => outcome.warnings.push(format!("ode check: {e}")),
        }
    }

    if let Some(temps) = temperatures {
        match temperature_monotonicity(&pole, &temps, k) {
            Ok(m) => {
                let mut t = Table::new("monotonicity", &["temperature", "in_factor", "out_factor"]);
                for r in &m.rows {
                    t.push(vec![r.temperature.into(), r.in_factor.into(), r.out_factor.into()]);
                }
                outcome.tables.push(t);
                outcome.summary.insert(
                    "monotonicity".into(),
                    json!({
                        "in_strictly_decreasing": m.in_strictly_decreasing,
                        "out_strictly_increasing": m.out_strictly_increasing,
                    }),
                );
            }
            Err(EvolutionError::InvalidTemperatures(msg)) => {
                return Err(CliError::Config(format!("grid.temperature: {msg}")))
            }
            Err(e) => outcome.warnings.push(format!("monotonicity: {e}")),
        }
    }
    Ok(())
}

fn scan(ctx: &Context, outcome: &mut Outcome) -> Result<(), CliError> {
    let axis = match ctx.cfg.get("scan.axis") {
        None => return Err(CliError::Config("scan.axis: missing (lambda, gamma or beta)".into())),
        Some(_) => ctx.cfg.choice("scan.axis", &["lambda", "gamma", "beta"])?,
    };
    let values = ctx
        .cfg
        .grid("scan")?
        .ok_or_else(|| CliError::Config("grid.scan: scan needs values".into()))?;

    let table = match axis {
        "lambda" => scan_lambda(ctx, &values, outcome)?,
        _ => scan_entropy(ctx, axis, &values, outcome)?,
    };
    let failures = table
        .rows
        .iter()
        .filter(|r| !matches!(r.last(), Some(Cell::Text(s)) if s.is_empty()))
        .count();
    outcome.summary.insert("points".into(), json!(values.len()));
    outcome.summary.insert("failures".into(), json!(failures));
    if failures == values.len() {
        outcome.error = Some("every scan point failed".into());
    } else if failures > 0 {
        outcome.warnings.push(format!("{failures} scan point(s) failed"));
    }
    outcome.tables.push(table);
    Ok(())
}

fn scan_lambda(ctx: &Context, values: &[f64], outcome: &mut Outcome) -> Result<Table, CliError> {
    let model = ctx.cfg.model()?;
    type PolePair = (ResonancePole<f64>, ResonancePole<f64>);
    let rows: Vec<Result<PolePair, String>> = values
        .par_iter()
        .map(|&lambda| {
            let m = model.with_lambda(lambda).map_err(|e| e.to_string())?;
            let pole = find_pole(&m, &ctx.root, &ctx.spec).map_err(|e| e.to_string())?;
            let pert = perturbative_pole(&m, &ctx.spec).map_err(|e| e.to_string())?;
            Ok((pole, pert))
        })
        .collect();
    let mut table = Table::new(
        "scan",
        &["lambda", "e_r", "gamma", "gamma_golden", "gamma_over_lambda2", "error"],
    );
    let mut ratios = Vec::new();
    for (&lambda, row) in values.iter().zip(rows) {
        match row {
            Ok((pole, pert)) => {
                let ratio = if lambda != 0.0 {
                    let r = pole.gamma() / (lambda * lambda);
                    ratios.push(r);
                    Cell::Num(r)
                } else {
                    Cell::Empty
                };
                table.push(vec![
                    lambda.into(),
                    pole.e_r().into(),
                    pole.gamma().into(),
                    pert.gamma().into(),
                    ratio,
                    "".into(),
                ]);
            }
            Err(e) => table.push(vec![
                lambda.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Text(e),
            ]),
        }
    }
    if let (Some(lo), Some(hi)) = (
        ratios.iter().copied().reduce(f64::min),
        ratios.iter().copied().reduce(f64::max),
    ) {
        outcome
            .summary
            .insert("gamma_over_lambda2_spread".into(), json!((hi - lo) / hi));
    }
    Ok(table)
}

fn scan_entropy(
    ctx: &Context,
    axis: &str,
    values: &[f64],
    outcome: &mut Outcome,
) -> Result<Table, CliError> {
    let k = ctx.cfg.number("thermo.k")?;
    let beta = ctx.cfg.number("thermo.beta")?;
    let point = ThermoPoint::new(beta, k).map_err(|e| thermo_error(e, "thermo.beta"))?;
    let by_gamma = axis == "gamma";
    let pole = if by_gamma && ctx.cfg.get("pole.e_r").is_some() && ctx.cfg.get("pole.gamma").is_none() {
        // A width scan only needs the resonance energy.
        let e_r = ctx.cfg.number("pole.e_r")?;
        let p = ResonancePole::new(e_r, 0.0)
            .map_err(|e| CliError::Config(format!("pole.e_r: {e}")))?;
        outcome.pole = Some(PoleInfo {
            e_r,
            gamma: 0.0,
            source: "config",
        });
        p
    } else {
        resolved_pole(ctx, outcome)?
    };
    let by_gamma = axis == "gamma";
    let rows: Vec<Result<(f64, f64), String>> = values
        .par_iter()
        .map(|&x| {
            let (p, pt) = if by_gamma {
                (ResonancePole::new(pole.e_r(), x).map_err(|e| e.to_string())?, point)
            } else {
                (pole, ThermoPoint::new(x, k).map_err(|e| e.to_string())?)
            };
            let s = complex_entropy(&p, &pt);
            Ok((s.real_part, s.imag_part))
        })
        .collect();
    let name = if by_gamma { "gamma" } else { "beta" };
    let mut table = Table::new("scan", &[name, "re_s", "im_s", "error"]);
    let mut ok = Vec::new();
    for (&x, row) in values.iter().zip(rows) {
        match row {
            Ok((re, im)) => {
                ok.push((x, re, im));
                table.push(vec![x.into(), re.into(), im.into(), "".into()]);
            }
            Err(e) => table.push(vec![x.into(), Cell::Empty, Cell::Empty, Cell::Text(e)]),
        }
    }
    ok.sort_by(|a, b| a.0.total_cmp(&b.0));
    outcome
        .summary
        .insert("real_trend".into(), json!(trend(Monotonicity::of(ok.iter().map(|r| r.1)))));
    outcome
        .summary
        .insert("imag_trend".into(), json!(trend(Monotonicity::of(ok.iter().map(|r| r.2)))));
    Ok(table)
}
