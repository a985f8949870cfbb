//! Command-line front end for the `cdcqed` simulator.
//!
//! Every command reads an optional JSON scenario (`--config`), writes one
//! artifact (CSV or JSON) and prints a one-line summary to stdout.
//! Exit codes: 0 success, 1 numerical or I/O failure, 2 bad arguments or
//! configuration.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use cdcqed::gate::{self, FidelityDefinition, SweepVariable};
use cdcqed::model::DEFAULT_G;
use cdcqed::pulse::{self, propagate_frequency, propagate_time};
use cdcqed::spectra::{self, DEFAULT_PROMINENCE};
use cdcqed::{CaseId, ConditionalAmplitudes, TwoQubitState, ValidatedParams};
use clap::{Parser, Subcommand};
use serde::Serialize;

pub mod scenario;
pub mod selftest;

use scenario::Scenario;

pub const DEFAULT_SEED: u64 = 2008;
const DEFAULT_SWEEP_POINTS: usize = 61;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{message}\n  parameters: {params}")]
    Numerical { message: String, params: String },
    #[error("{0}")]
    Output(String),
    #[error("selftest: {0} check(s) failed")]
    Selftest(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn from_config(e: cdcqed::Error) -> Self {
        CliError::Config(e.to_string())
    }

    /// Classify a core error raised while computing with `params`.
    fn from_core(e: cdcqed::Error, params: &ValidatedParams) -> Self {
        use cdcqed::Error as E;
        match e {
            E::Singular { .. } | E::ZeroNorm => CliError::Numerical {
                message: e.to_string(),
                params: serde_json::to_string(params.raw()).unwrap_or_default(),
            },
            E::Io { .. } | E::Csv { .. } | E::Json(_) => CliError::Output(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn parse_case(s: &str) -> Result<CaseId, String> {
    s.parse().map_err(|e: cdcqed::Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "cdcqed",
    version,
    about = "Cavity-dipole-cavity QED spin-photon gate simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON scenario file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path, overriding the scenario's.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Case preset I..VII, overriding the scenario's parameters.
    #[arg(long, global = true, value_parser = parse_case)]
    case: Option<CaseId>,
    /// Grid points (spectrum, fidelity-sweep) or samples (pulse).
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transmission/reflection/loss versus detuning.
    Spectrum,
    /// Gate fidelity versus κ₁ or γ for a case.
    FidelitySweep,
    /// Propagate a Gaussian pulse.
    Pulse,
    /// Gate matrix, fidelity and entangling power at the operating point.
    Gate,
    /// Basis-state truth table of the gate.
    TruthTable {
        /// Use the ideal amplitudes instead of a computed operating point.
        #[arg(long)]
        ideal: bool,
    },
    /// List the case presets.
    CaseList,
    /// Run the built-in consistency checks.
    Selftest {
        #[arg(long, hide = true)]
        corrupt_sign: bool,
    },
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<String, CliError> {
    let scenario = match &cli.config {
        Some(path) => Scenario::load(path)?,
        None => Scenario::default(),
    };
    match &cli.command {
        Command::Spectrum => spectrum(cli, &scenario),
        Command::FidelitySweep => fidelity_sweep(cli, &scenario),
        Command::Pulse => pulse_cmd(cli, &scenario),
        Command::Gate => gate_cmd(cli, &scenario),
        Command::TruthTable { ideal } => truth_table(cli, &scenario, *ideal),
        Command::CaseList => case_list(cli),
        Command::Selftest { corrupt_sign } => {
            let convention = if *corrupt_sign {
                cdcqed::steady_state::OutputConvention::FlippedOddOutput
            } else {
                cdcqed::steady_state::OutputConvention::Standard
            };
            let seed = cli.seed.unwrap_or(DEFAULT_SEED);
            let report = selftest::run_checks(seed, convention);
            for check in &report {
                println!("{check}");
            }
            let failed = report.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(CliError::Selftest(failed));
            }
            Ok(format!(
                "selftest: {}/{} checks passed (seed {seed})",
                report.len(),
                report.len()
            ))
        }
    }
}

/// Reject a scenario that carries a block for a different command.
fn expect_block(scenario: &Scenario, command: &str) -> Result<(), CliError> {
    let blocks = [
        ("spectrum", scenario.spectrum.is_some()),
        ("fidelity-sweep", scenario.fidelity_sweep.is_some()),
        ("pulse", scenario.pulse.is_some()),
        ("gate", scenario.gate.is_some()),
        ("truth-table", scenario.truth_table.is_some()),
    ];
    match blocks.iter().find(|(_, present)| *present) {
        Some((name, _)) if *name != command => Err(CliError::Config(format!(
            "scenario block `{}` does not match command `{command}`",
            name.replace('-', "_")
        ))),
        _ => Ok(()),
    }
}

fn output_path(cli: &Cli, block: Option<&PathBuf>, default: &str) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| block.cloned())
        .unwrap_or_else(|| PathBuf::from(default))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
}

fn spectrum(cli: &Cli, scenario: &Scenario) -> Result<String, CliError> {
    expect_block(scenario, "spectrum")?;
    let block = scenario.spectrum.as_ref().ok_or_else(|| {
        CliError::Config("spectrum needs --config with a `spectrum` block".into())
    })?;
    let (params, _) = scenario.resolve_params(cli.case)?;
    let points = cli.points.unwrap_or(block.points);
    let spec = spectra::sweep(
        &params,
        block.spin,
        block.delta_min,
        block.delta_max,
        points,
    )
    .map_err(|e| CliError::from_core(e, &params))?;
    let prominence = block.min_prominence.unwrap_or(DEFAULT_PROMINENCE);
    let peaks = spectra::find_peaks(&spec, prominence);
    let path = output_path(cli, block.out.as_ref(), "spectrum.csv");
    spectra::emit(&spec, &path).map_err(|e| CliError::from_core(e, &params))?;
    let at_zero = spec.nearest(0.0);
    let peak_list: Vec<String> = peaks.iter().map(|p| format!("{:.4}", p.delta)).collect();
    Ok(format!(
        "spectrum: spin={} points={} R(0)={:.6} T(0)={:.3e} peaks={} [{}] -> {}",
        block.spin,
        spec.len(),
        spec.reflection[at_zero],
        spec.transmission[at_zero],
        peaks.len(),
        peak_list.join(", "),
        path.display()
    ))
}

fn sweep_case(cli: &Cli, scenario: &Scenario) -> Result<CaseId, CliError> {
    if let Some(case) = cli.case {
        return Ok(case);
    }
    if scenario.params.is_some() {
        return Err(CliError::Config(
            "fidelity-sweep needs a case preset (`case`), not explicit `params`".into(),
        ));
    }
    scenario
        .case
        .ok_or_else(|| CliError::Config("fidelity-sweep needs --case or a scenario `case`".into()))
}

fn fidelity_sweep(cli: &Cli, scenario: &Scenario) -> Result<String, CliError> {
    expect_block(scenario, "fidelity-sweep")?;
    let case = sweep_case(cli, scenario)?;
    let block = scenario
        .fidelity_sweep
        .clone()
        .unwrap_or(scenario::FidelitySweepBlock {
            variable: None,
            min: None,
            max: None,
            points: None,
            definition: None,
            out: None,
        });
    let g = scenario.g.unwrap_or(DEFAULT_G);
    let variable = match &block.variable {
        Some(v) => v.parse::<SweepVariable>().map_err(CliError::from_config)?,
        None => SweepVariable::default_for(case),
    };
    let definition = match block.definition.as_deref() {
        None | Some("amplitude") => FidelityDefinition::AmplitudeOverlap,
        Some("probability") => FidelityDefinition::ProbabilityOverlap,
        Some(other) => return Err(CliError::Config(format!(
            "invalid parameter `definition`: expected `amplitude` or `probability`, got `{other}`"
        ))),
    };
    let (lo, hi) = match variable {
        SweepVariable::Kappa1 => (3.0, 300.0),
        SweepVariable::Gamma => (0.01, 10.0),
    };
    let points = cli.points.or(block.points).unwrap_or(DEFAULT_SWEEP_POINTS);
    let grid = gate::log_grid(block.min.unwrap_or(lo), block.max.unwrap_or(hi), points)
        .map_err(CliError::from_config)?;
    let curve = gate::fidelity_sweep(case, variable, &grid, g, definition).map_err(|e| {
        let (params, _) = cdcqed::case_params(case, g).expect("case presets are valid");
        CliError::from_core(e, &params)
    })?;
    let path = output_path(cli, block.out.as_ref(), "fidelity_sweep.csv");
    gate::emit_sweep(&curve, &path).map_err(|e| CliError::Output(e.to_string()))?;
    let best = curve
        .iter()
        .copied()
        .fold(None::<gate::SweepPoint>, |acc, p| match acc {
            Some(a) if a.fidelity >= p.fidelity => Some(a),
            _ => Some(p),
        })
        .expect("grid has at least two points");
    let name = match variable {
        SweepVariable::Kappa1 => "kappa1",
        SweepVariable::Gamma => "gamma",
    };
    Ok(format!(
        "fidelity-sweep: case={case} variable={name} points={} max F={:.6} at {name}={:.6} -> {}",
        curve.len(),
        best.fidelity,
        best.x,
        path.display()
    ))
}

fn pulse_cmd(cli: &Cli, scenario: &Scenario) -> Result<String, CliError> {
    expect_block(scenario, "pulse")?;
    let block = scenario
        .pulse
        .as_ref()
        .ok_or_else(|| CliError::Config("pulse needs --config with a `pulse` block".into()))?;
    let (params, default_omega) = scenario.resolve_params(cli.case)?;
    let core = |e| CliError::from_core(e, &params);
    let tau = match (block.tau, block.tau_kappa) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "`tau` and `tau_kappa` are mutually exclusive".into(),
            ))
        }
        (Some(tau), None) => tau,
        (None, tk) => tk.unwrap_or(10.0) / params.kappa_e(),
    };
    let omega_l = block.omega_l.unwrap_or(default_omega);
    let samples = cli.points.unwrap_or(block.samples);
    let window = pulse::settling_window(
        &params,
        tau,
        block.lead.unwrap_or(10.0),
        block.settle.unwrap_or(1e-10),
    )
    .map_err(core)?;
    let waveform = pulse::gaussian_pulse(tau, omega_l, window, samples).map_err(core)?;
    let method = block.method.as_deref().unwrap_or("frequency");
    let out = match method {
        "frequency" => propagate_frequency(&params, block.spin, &waveform),
        "time" => {
            let dt = pulse::time_step_for(
                &params,
                omega_l,
                waveform.dt(),
                block.rate_product.unwrap_or(0.02),
            );
            propagate_time(&params, block.spin, &waveform, dt)
        }
        other => {
            return Err(CliError::Config(format!(
                "invalid parameter `method`: expected `frequency` or `time`, got `{other}`"
            )))
        }
    }
    .map_err(core)?;
    let path = output_path(cli, block.out.as_ref(), "pulse.csv");
    pulse::emit_time_series(&waveform, &out, &path).map_err(core)?;
    Ok(format!(
        "pulse: method={method} spin={} tau={tau:.6} samples={} transmitted={:.6} reflected={:.6} dissipated={:.6} -> {}",
        block.spin,
        waveform.len(),
        out.norm_t,
        out.norm_r,
        out.dissipated,
        path.display()
    ))
}

/// Amplitudes at the scenario's operating point.
fn operating_amplitudes(
    cli: &Cli,
    scenario: &Scenario,
    omega_override: Option<f64>,
) -> Result<(ConditionalAmplitudes, f64), CliError> {
    let (params, default_omega) = scenario.resolve_params(cli.case)?;
    let omega_l = omega_override.unwrap_or(default_omega);
    let amps = gate::conditional_amplitudes(&params, omega_l)
        .map_err(|e| CliError::from_core(e, &params))?;
    Ok((amps, omega_l))
}

#[derive(Serialize)]
struct GateReport {
    omega_l: f64,
    amplitudes: ConditionalAmplitudes,
    fidelity: f64,
    fidelity_probability: f64,
    concurrence_plus_plus: f64,
    gate: gate::GateMatrix,
}

fn gate_cmd(cli: &Cli, scenario: &Scenario) -> Result<String, CliError> {
    expect_block(scenario, "gate")?;
    let block = scenario.gate.clone().unwrap_or_default();
    let (amps, omega_l) = operating_amplitudes(cli, scenario, block.omega_l)?;
    let matrix = gate::gate_matrix(&amps);
    let entangled = matrix.operator().apply(&TwoQubitState::plus_plus());
    let concurrence = gate::concurrence(&entangled).map_err(|e| CliError::Output(e.to_string()))?;
    let report = GateReport {
        omega_l,
        amplitudes: amps,
        fidelity: gate::fidelity(&amps, FidelityDefinition::AmplitudeOverlap),
        fidelity_probability: gate::fidelity(&amps, FidelityDefinition::ProbabilityOverlap),
        concurrence_plus_plus: concurrence,
        gate: matrix,
    };
    let path = output_path(cli, block.out.as_ref(), "gate.json");
    write_json(&report, &path)?;
    Ok(format!(
        "gate: F={:.6} t_up={:.6} t_down={:.6} concurrence(+,+)={:.6} -> {}",
        report.fidelity,
        amps.t_up,
        amps.t_down,
        concurrence,
        path.display()
    ))
}

#[derive(Serialize)]
struct TruthReport {
    ideal: bool,
    basis: [&'static str; 4],
    rows: Vec<gate::TruthRow>,
    max_deviation: f64,
}

fn truth_table(cli: &Cli, scenario: &Scenario, ideal_flag: bool) -> Result<String, CliError> {
    expect_block(scenario, "truth-table")?;
    let block = scenario.truth_table.clone().unwrap_or_default();
    let ideal = ideal_flag || block.ideal;
    let amps = if ideal {
        ConditionalAmplitudes::ideal()
    } else {
        operating_amplitudes(cli, scenario, block.omega_l)?.0
    };
    let rows = gate::truth_table(&amps);
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    for row in &rows {
        eprintln!("{row}");
    }
    let path = output_path(cli, block.out.as_ref(), "truth_table.json");
    write_json(
        &TruthReport {
            ideal,
            basis: gate::BASIS_LABELS,
            rows,
            max_deviation,
        },
        &path,
    )?;
    Ok(format!(
        "truth-table: {} max deviation={max_deviation:.3e} -> {}",
        if ideal { "ideal" } else { "computed" },
        path.display()
    ))
}

#[derive(Serialize)]
struct CaseEntry {
    case: CaseId,
    preset: cdcqed::model::CaseSpec,
    sweep_variable: &'static str,
    fidelity: f64,
}

fn case_list(cli: &Cli) -> Result<String, CliError> {
    let mut entries = Vec::new();
    for case in CaseId::ALL {
        let (params, omega_l) =
            cdcqed::case_params(case, DEFAULT_G).map_err(CliError::from_config)?;
        let amps = gate::conditional_amplitudes(&params, omega_l)
            .map_err(|e| CliError::from_core(e, &params))?;
        let s = case.spec();
        let entry = CaseEntry {
            case,
            preset: s,
            sweep_variable: match SweepVariable::default_for(case) {
                SweepVariable::Kappa1 => "kappa1",
                SweepVariable::Gamma => "gamma",
            },
            fidelity: gate::fidelity(&amps, FidelityDefinition::AmplitudeOverlap),
        };
        println!(
            "{:<4} kappa_e0={:<4} kappa_o0={:<4} kappa_o1/kappa_e1={:.4} delta_el={:<3} delta_ol={:<3} delta_al={:<3} sweep={:<6} F(g=30)={:.5}",
            case.as_str(),
            s.kappa_e0,
            s.kappa_o0,
            s.odd_external_ratio,
            s.delta_el,
            s.delta_ol,
            s.delta_al,
            entry.sweep_variable,
            entry.fidelity
        );
        entries.push(entry);
    }
    if let Some(path) = &cli.out {
        write_json(&entries, path)?;
    }
    Ok(format!("case-list: {} cases", entries.len()))
}
