//! Batch front end: read a JSON run configuration, execute one command,
//! print a JSON report to stdout and write artifacts (the same report,
//! plus optional CSVs) into an output directory.
//!
//! Exit status is 0 on success, 1 on configuration/expression/I-O
//! errors, and 2 when a solver honestly failed to converge — the report
//! with diagnostics is still printed and written in that case.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ifsw::config::{BuiltSystem, RunConfig};
use ifsw::dictionary::standard_dictionary;
use ifsw::error::{Error, Result};
use ifsw::expr::parse;
use ifsw::holonomic::{
    average_entropy, holonomic_lift, positive_candidates, variational_entropy_upper,
};
use ifsw::ifs::normalize;
use ifsw::markov::{chaos_game, eigen_measure, hutchinson_fixed_point};
use ifsw::pressure::{
    equilibrium, gateaux_probe, pressure, pressure_full, PressureMethod, ProbeTable,
};
use ifsw::transfer::{eigen_discounted, eigen_power, log_pressure_sequence};
use ifsw::verify::{run_config_suite, run_suite, CheckStatus};

#[derive(Parser)]
#[command(
    name = "ifsw",
    version,
    about = "Thermodynamic formalism for weighted iterated function systems",
    after_help = "Reports are printed to stdout as JSON and written to the output \
directory (--out, then $IFSW_OUT_DIR, then the working directory). Exit status: \
0 success, 1 configuration error, 2 solver non-convergence."
)]
struct Cli {
    /// Directory artifacts are written to [default: $IFSW_OUT_DIR or .]
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

/// Scalar config fields that may be overridden from the command line.
#[derive(Args, Debug, Clone, Default)]
struct Overrides {
    /// Override the grid resolution (nodes per axis).
    #[arg(long, global = true, value_name = "M")]
    grid: Option<usize>,
    /// Override the eigen-solver tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    tol: Option<f64>,
    /// Override the eigen-solver iteration cap.
    #[arg(long, global = true, value_name = "N")]
    max_iter: Option<usize>,
    /// Override the growth-average sequence length.
    #[arg(long, global = true, value_name = "N")]
    n_max: Option<usize>,
    /// Override the measure-solver tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    measure_tol: Option<f64>,
    /// Override the measure-solver iteration cap.
    #[arg(long, global = true, value_name = "N")]
    measure_max_iter: Option<usize>,
    /// Override the chaos-game length.
    #[arg(long, global = true, value_name = "N")]
    particles: Option<usize>,
    /// Override the random seed.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
    /// Override the number of discount stages.
    #[arg(long, global = true, value_name = "K")]
    k_max: Option<u32>,
    /// Override the chaos-game burn-in.
    #[arg(long, global = true, value_name = "N")]
    burn_in: Option<usize>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.grid {
            cfg.grid = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = self.n_max {
            cfg.n_max = v;
        }
        if let Some(v) = self.measure_tol {
            cfg.measure_tol = v;
        }
        if let Some(v) = self.measure_max_iter {
            cfg.measure_max_iter = v;
        }
        if let Some(v) = self.particles {
            cfg.particles = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.k_max {
            cfg.k_max = v;
        }
        if let Some(v) = self.burn_in {
            cfg.burn_in = v;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check that the maps stay inside the cube and the weights are positive.
    Validate {
        /// JSON run configuration.
        config: PathBuf,
        /// Accept weights that merely stay ≥ 0 (the eigen solvers still
        /// require strict positivity).
        #[arg(long)]
        allow_nonnegative: bool,
    },
    /// Compute the topological pressure ln ρ by one route or all three.
    Pressure {
        config: PathBuf,
        /// Which eigenvalue route to use.
        #[arg(long, value_enum, default_value = "power")]
        method: MethodArg,
    },
    /// Solve the eigenproblem on both sides: eigenfunction and eigenmeasure.
    Eigen {
        config: PathBuf,
        /// Function-side solver.
        #[arg(long, value_enum, default_value = "power")]
        solver: SolverArg,
        /// Write the eigenfunction nodes to this CSV file.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        /// Write the eigenmeasure particles to this CSV file.
        #[arg(long, value_name = "FILE")]
        measure_csv: Option<PathBuf>,
    },
    /// Turn the weights into branch probabilities pⱼ = qⱼ·(h∘τⱼ)/(ρh).
    Normalize {
        config: PathBuf,
        /// Write the probability table to this CSV file.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Build the equilibrium state of a potential: invariant measure,
    /// entropies and the pressure identity.
    Equilibrium {
        config: PathBuf,
        /// Write the equilibrium measure particles to this CSV file.
        #[arg(long, value_name = "FILE")]
        measure_csv: Option<PathBuf>,
    },
    /// Entropy readings (plug-in and variational) of the invariant measure.
    Entropy { config: PathBuf },
    /// Sample the invariant measure by the chaos game.
    ChaosGame {
        config: PathBuf,
        /// Number of steps [default: the config's particle budget]
        #[arg(long, value_name = "N")]
        steps: Option<usize>,
        /// Starting point, e.g. "0.5" or "0.25,0.75" [default: the centre]
        #[arg(long, value_name = "COORDS")]
        x0: Option<String>,
        /// Write the orbit to this CSV file.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
        /// Write the compacted empirical measure to this CSV file.
        #[arg(long, value_name = "FILE")]
        measure_csv: Option<PathBuf>,
    },
    /// Probe the Gâteaux derivative of the pressure in chosen directions.
    Probe {
        config: PathBuf,
        /// Direction η (repeatable) [default: coordinate functions]
        #[arg(long = "eta", value_name = "EXPR")]
        etas: Vec<String>,
        /// Comma-separated forward-difference step sizes.
        #[arg(long, value_name = "LIST", default_value = "1e-2,1e-3,1e-4")]
        steps: String,
        /// Write the quotient table to this CSV file.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Run the cross-module identity suite.
    Verify {
        /// Run the checks on this configured system instead of the
        /// built-in families.
        config: Option<PathBuf>,
        /// Include the slow checks (long orbits, fine grids).
        #[arg(long)]
        full: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Power,
    Discounted,
    Sequence,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Power,
    Discounted,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors are exit 1 here (clap's default of 2 would
            // collide with "solver did not converge"); --help/--version
            // stay exit 0.
            let code = if e.use_stderr() { 1u8 } else { 0u8 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn out_dir(cli_out: &Option<PathBuf>) -> PathBuf {
    cli_out
        .clone()
        .or_else(|| std::env::var_os("IFSW_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load(config: &Path, ov: &Overrides) -> Result<(RunConfig, BuiltSystem)> {
    let mut cfg = RunConfig::from_path(config)?;
    ov.apply(&mut cfg);
    let built = cfg.build()?;
    Ok((cfg, built))
}

/// Write the JSON report into the output directory (always) and note the
/// location on stderr so stdout stays machine-readable.
fn save_report(dir: &Path, command: &str, value: &Value) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("ifsw-{command}-report.json"));
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(&path, text)?;
    eprintln!("report: {}", path.display());
    Ok(())
}

fn write_artifact(
    dir: &Path,
    rel: &Path,
    write: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    let path = if rel.is_absolute() { rel.to_path_buf() } else { dir.join(rel) };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut out = BufWriter::new(File::create(&path)?);
    write(&mut out)?;
    out.flush()?;
    eprintln!("wrote: {}", path.display());
    Ok(())
}

fn print_json(value: &Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// Merge `"command": name` into a serialised report object.
fn tagged(command: &str, v: Value) -> Value {
    match v {
        Value::Object(mut map) => {
            map.insert("command".into(), Value::String(command.into()));
            Value::Object(map)
        }
        other => json!({ "command": command, "report": other }),
    }
}

fn to_method(m: MethodArg) -> PressureMethod {
    match m {
        MethodArg::Power => PressureMethod::Power,
        MethodArg::Discounted => PressureMethod::Discounted,
        MethodArg::Sequence => PressureMethod::Sequence,
        MethodArg::All => unreachable!("handled by the caller"),
    }
}

fn parse_coords(s: &str, dim: usize, flag: &str) -> Result<Vec<f64>> {
    let mut v = Vec::new();
    for t in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        v.push(t.parse::<f64>().map_err(|_| Error::Config {
            field: flag.into(),
            message: format!("cannot parse {t:?} as a number"),
        })?);
    }
    if v.len() != dim {
        return Err(Error::Config {
            field: flag.into(),
            message: format!("needs {dim} coordinate(s), got {}", v.len()),
        });
    }
    Ok(v)
}

fn parse_steps(s: &str) -> Result<Vec<f64>> {
    let mut v = Vec::new();
    for t in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        v.push(t.parse::<f64>().map_err(|_| Error::Config {
            field: "steps".into(),
            message: format!("cannot parse {t:?} as a number"),
        })?);
    }
    if v.is_empty() {
        return Err(Error::Config {
            field: "steps".into(),
            message: "needs at least one step".into(),
        });
    }
    Ok(v)
}

fn run(cli: Cli) -> Result<i32> {
    let dir = out_dir(&cli.out);
    match cli.command {
        Command::Validate { config, allow_nonnegative } => {
            let (cfg, built) = load(&config, &cli.overrides)?;
            let rep = built.ifs().validate(cfg.seed, allow_nonnegative);
            println!("{}", rep.to_string().trim_end());
            let value = json!({
                "command": "validate",
                "dimension": rep.dim,
                "n_maps": rep.n_maps,
                "points_checked": rep.points_checked,
                "max_map_escape": rep.max_map_escape,
                "escape_count": rep.escape_count,
                "min_weight": rep.min_weight,
                "nonpositive_count": rep.nonpositive_count,
                "domain_error_count": rep.domain_error_count,
                "allow_nonnegative": rep.allow_nonnegative,
                "ok": rep.ok(),
            });
            save_report(&dir, "validate", &value)?;
            Ok(if rep.ok() { 0 } else { 1 })
        }

        Command::Pressure { config, method } => {
            let (cfg, built) = load(&config, &cli.overrides)?;
            let opts = cfg.solve_options();
            let ifs = built.ifs();
            let (value, ok) = match method {
                MethodArg::All => {
                    let full = pressure_full(ifs, &opts)?;
                    let ok = full.power.converged
                        && full.discounted.converged
                        && full.sequence.converged;
                    (tagged("pressure", serde_json::to_value(&full)?), ok)
                }
                m => {
                    let report = pressure(ifs, to_method(m), &opts)?;
                    let ok = report.converged;
                    (tagged("pressure", serde_json::to_value(&report)?), ok)
                }
            };
            print_json(&value)?;
            save_report(&dir, "pressure", &value)?;
            Ok(if ok { 0 } else { 2 })
        }

        Command::Eigen { config, solver, csv, measure_csv } => {
            let (cfg, built) = load(&config, &cli.overrides)?;
            let opts = cfg.solve_options();
            let ifs = built.ifs();
            let (pair, warnings) = match solver {
                SolverArg::Power => (eigen_power(ifs, opts.tol, opts.max_iter)?, Vec::new()),
                SolverArg::Discounted => {
                    let out = eigen_discounted(ifs, &opts.schedule)?;
                    let warns: Vec<String> = out
                        .stages
                        .iter()
                        .filter(|s| !s.inner_converged)
                        .map(|s| format!("discount stage k = {} hit the inner iteration cap", s.k))
                        .collect();
                    (out.pair, warns)
                }
            };
            let em = eigen_measure(ifs, opts.measure_tol, opts.measure_max_iter)?;
            let ok = pair.converged && em.converged;
            let mut value = json!({
                "command": "eigen",
                "solver": match solver {
                    SolverArg::Power => "power",
                    SolverArg::Discounted => "discounted",
                },
                "function_side": {
                    "rho": pair.rho,
                    "rho_lower": pair.rho_lower,
                    "rho_upper": pair.rho_upper,
                    "relative_bracket_width": pair.gap(),
                    "residual": pair.residual,
                    "iterations": pair.iterations,
                    "converged": pair.converged,
                },
                "measure_side": {
                    "rho": em.rho,
                    "tv_change_per_sweep": em.residual,
                    "iterations": em.iterations,
                    "converged": em.converged,
                    "support_cells": em.measure.len(),
                },
                "sides_gap": (pair.rho - em.rho).abs(),
                "converged": ok,
                "warnings": warnings,
            });
            if !pair.converged {
                // Attach the growth-average spread: for systems without a
                // positive continuous eigenfunction the averages a_N keep
                // a non-vanishing spread over x, which is the observable
                // signature of the failure.
                let n = cfg.n_max.clamp(10, 40);
                let seq = log_pressure_sequence(ifs, n)?;
                let spread_rows: Vec<Value> = seq
                    .averages
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        json!({
                            "n": i + 1,
                            "min": a.min_value(),
                            "max": a.max_value(),
                            "spread": a.max_value() - a.min_value(),
                        })
                    })
                    .collect();
                let last = seq.averages.last().expect("n ≥ 10");
                let diagnostic = format!(
                    "no positive eigenfunction certified: the Collatz–Wielandt bracket \
stalled at [{:.9}, {:.9}] (relative width {:.4}) after {} iterations, and the growth \
averages a_N = N⁻¹·ln Bᴺ1 still have spread {:.4} at N = {}",
                    pair.rho_lower,
                    pair.rho_upper,
                    pair.gap(),
                    pair.iterations,
                    last.max_value() - last.min_value(),
                    n,
                );
                eprintln!("{diagnostic}");
                value["diagnostic"] = Value::String(diagnostic);
                value["a_n_spread"] = Value::Array(spread_rows);
            }
            if let Some(p) = csv {
                write_artifact(&dir, &p, |w| pair.h.write_csv(&mut *w))?;
            }
            if let Some(p) = measure_csv {
                write_artifact(&dir, &p, |w| em.measure.write_csv(w))?;
            }
            print_json(&value)?;
            save_report(&dir, "eigen", &value)?;
            Ok(if ok { 0 } else { 2 })
        }

        Command::Normalize { config, csv } => {
            let (cfg, built) = load(&config, &cli.overrides)?;
            let opts = cfg.solve_options();
            let ifs = built.ifs();
            let pair = eigen_power(ifs, opts.tol, opts.max_iter)?;
            let nifs = normalize(ifs, &pair.h, pair.rho)?;
            let mut warnings = Vec::new();
            if let Some(w) = nifs.warning() {
                warnings.push(w.to_string());
            }
            if !pair.converged {
                warnings.push(format!(
                    "eigen solve unconverged (bracket [{:.9}, {:.9}]) — the probabilities \
are not reliable",
                    pair.rho_lower, pair.rho_upper
                ));
            }
            let value = json!({
                "command": "normalize",
                "rho": pair.rho,
                "eigen_converged": pair.converged,
                "eigen_iterations": pair.iterations,
                "sum_deviation": nifs.sum_deviation(),
                "n_maps": nifs.n(),
                "warnings": warnings,
            });
            if let Some(p) = csv {
                let grid = nifs.grid();
                write_artifact(&dir, &p, |w| {
                    let mut header = String::from("x1");
                    if grid.dim() == 2 {
                        header.push_str(",x2");
                    }
                    for j in 1..=nifs.n() {
                        header.push_str(&format!(",p{j}"));
                    }
                    writeln!(w, "{header}")?;
                    for (k, pnt) in grid.nodes() {
                        let mut row = format!("{}", pnt[0]);
                        if grid.dim() == 2 {
                            row.push_str(&format!(",{}", pnt[1]));
                        }
                        for i in 0..nifs.n() {
                            row.push_str(&format!(",{}", nifs.probabilities()[i].values()[k]));
                        }
                        writeln!(w, "{row}")?;
                    }
                    Ok(())
                })?;
            }
            print_json(&value)?;
            save_report(&dir, "normalize", &value)?;
            Ok(if pair.converged { 0 } else { 2 })
        }

        Command::Equilibrium { config, measure_csv } => {
            let (cfg, built) = load(&config, &cli.overrides)?;
            let sys = built.potential().ok_or_else(|| Error::Config {
                field: "weights".into(),
                message: "the equilibrium command needs a potential system \
(\"weights\": {\"potential\": …})"
                    .into(),
            })?;
            let eq = equilibrium(sys, &cfg.solve_options())?;
            let value = json!({
                "command": "equilibrium",
                "rho": eq.pair.rho,
                "pressure": eq.pair.rho.ln(),
                "eigen_iterations": eq.pair.iterations,
                "normalized_sum_deviation": eq.normalized_sum_deviation,
                "measure": {
                    "support_cells": eq.measure.len(),
                    "total_mass": eq.measure.total_mass(),
                    "iterations": eq.measure_iterations,
                },
                "entropy_lower": eq.entropy_lower,
                "entropy_upper": eq.entropy_upper.value,
                "entropy_best_candidate": eq.entropy_upper.best_candidate,
                "entropy_per_candidate": eq.entropy_upper.per_candidate,
                "optimal_candidate": eq.optimal_candidate,
                "optimal_candidate_bound":
                    eq.entropy_upper.per_candidate[eq.optimal_candidate],
                "energy": eq.energy,
                "pressure_gap": eq.pressure_gap,
                "converged": eq.converged,
                "warnings": eq.warnings,
            });
            if let Some(p) = measure_csv {
                write_artifact(&dir, &p, |w| eq.measure.write_csv(w))?;
            }
            print_json(&value)?;
            save_report(&dir, "equilibrium", &value)?;
            Ok(if eq.converged { 0 } else { 2 })
        }

        Command::Entropy { config } => {
            let (cfg, built) = load(&config, &cli.overrides)?;
            let opts = cfg.solve_options();
            let (value, ok) = match built.potential() {
                Some(sys) => {
                    let eq = equilibrium(sys, &opts)?;
                    (
                        json!({
                            "command": "entropy",
                            "source": "equilibrium state of the potential",
                            "entropy_lower": eq.entropy_lower,
                            "entropy_upper": eq.entropy_upper.value,
                            "entropy_per_candidate": eq.entropy_upper.per_candidate,
                            "optimal_candidate_bound":
                                eq.entropy_upper.per_candidate[eq.optimal_candidate],
                            "energy": eq.energy,
                            "pressure": eq.pair.rho.ln(),
                            "pressure_gap": eq.pressure_gap,
                            "converged": eq.converged,
                            "warnings": eq.warnings,
                        }),
                        eq.converged,
                    )
                }
                None => {
                    let nifs = built.probability_system().map_err(|e| Error::Config {
                        field: "weights".into(),
                        message: format!(
                            "the entropy command needs a potential or probability weights: {e}"
                        ),
                    })?;
                    let fp =
                        hutchinson_fixed_point(&nifs, opts.measure_tol, opts.measure_max_iter)?;
                    let lift = holonomic_lift(&nifs, &fp.measure)?;
                    let d = lift.disintegrate(nifs.grid())?;
                    let lower = average_entropy(&d);
                    let bound = variational_entropy_upper(
                        &nifs,
                        &d,
                        &positive_candidates(nifs.grid()),
                    )?;
                    (
                        json!({
                            "command": "entropy",
                            "source": "invariant measure of the probability weights",
                            "entropy_lower": lower,
                            "entropy_upper": bound.value,
                            "entropy_per_candidate": bound.per_candidate,
                            "measure_iterations": fp.iterations,
                            "converged": fp.converged,
                        }),
                        fp.converged,
                    )
                }
            };
            print_json(&value)?;
            save_report(&dir, "entropy", &value)?;
            Ok(if ok { 0 } else { 2 })
        }

        Command::ChaosGame { config, steps, x0, csv, measure_csv } => {
            let (cfg, built) = load(&config, &cli.overrides)?;
            let opts = cfg.solve_options();
            let ifs = built.ifs();
            let dim = ifs.grid().dim();
            let steps = steps.unwrap_or(cfg.particles);
            let start = match &x0 {
                Some(s) => parse_coords(s, dim, "x0")?,
                None => vec![0.5; dim],
            };
            let (nifs, via) = match built.probability_system() {
                Ok(n) => (n, "config weights are already probabilities".to_string()),
                Err(_) => {
                    let pair = eigen_power(ifs, opts.tol, opts.max_iter)?;
                    if !pair.converged {
                        let diagnostic = format!(
                            "cannot normalise the weights: no positive eigenfunction \
certified (bracket [{:.9}, {:.9}] after {} iterations)",
                            pair.rho_lower, pair.rho_upper, pair.iterations
                        );
                        eprintln!("{diagnostic}");
                        let value = json!({
                            "command": "chaos-game",
                            "converged": false,
                            "diagnostic": diagnostic,
                        });
                        print_json(&value)?;
                        save_report(&dir, "chaos-game", &value)?;
                        return Ok(2);
                    }
                    (
                        normalize(ifs, &pair.h, pair.rho)?,
                        format!("weights normalised through the eigenpair (ρ = {:.12})", pair.rho),
                    )
                }
            };
            let orbit = chaos_game(&nifs, &start, steps, cfg.seed)?;
            let empirical = orbit.empirical_measure(cfg.burn_in)?;
            let compacted = empirical.compacted(nifs.grid())?;
            let mut moments = serde_json::Map::new();
            for t in standard_dictionary(dim) {
                moments.insert(t.name.to_string(), json!(compacted.integrate(|p| (t.f)(p))));
            }
            let fin = orbit.final_point();
            let value = json!({
                "command": "chaos-game",
                "steps": steps,
                "seed": cfg.seed,
                "burn_in": cfg.burn_in,
                "normalisation": via,
                "start": start,
                "final": &fin[..dim],
                "support_cells": compacted.len(),
                "moments": moments,
                "converged": true,
            });
            if let Some(p) = csv {
                write_artifact(&dir, &p, |w| orbit.write_csv(w))?;
            }
            if let Some(p) = measure_csv {
                write_artifact(&dir, &p, |w| compacted.write_csv(w))?;
            }
            print_json(&value)?;
            save_report(&dir, "chaos-game", &value)?;
            Ok(0)
        }

        Command::Probe { config, etas, steps, csv } => {
            let (cfg, built) = load(&config, &cli.overrides)?;
            let opts = cfg.solve_options();
            let sys = built.potential().ok_or_else(|| Error::Config {
                field: "weights".into(),
                message: "the probe command needs a potential system \
(\"weights\": {\"potential\": …})"
                    .into(),
            })?;
            let dim = sys.ifs().grid().dim();
            let sources: Vec<String> = if etas.is_empty() {
                if dim == 1 {
                    vec!["x".into(), "sin(pi * x)".into()]
                } else {
                    vec!["x1".into(), "x2".into()]
                }
            } else {
                etas
            };
            let step_values = parse_steps(&steps)?;
            let mut tables: Vec<(String, ProbeTable)> = Vec::new();
            for (i, src) in sources.iter().enumerate() {
                let expr = parse(src).map_err(|e| Error::Config {
                    field: format!("eta[{i}]"),
                    message: e.to_string(),
                })?;
                let table = gateaux_probe(sys, &expr, &step_values, &opts)?;
                tables.push((format!("eta{}", i + 1), table));
            }
            let ok = tables.iter().all(|(_, t)| t.rows.iter().all(|r| r.converged));
            let mut probes = Vec::with_capacity(tables.len());
            for (id, t) in &tables {
                let mut v = serde_json::to_value(t)?;
                v["id"] = json!(id);
                probes.push(v);
            }
            let value = json!({
                "command": "probe",
                "base_pressure": tables[0].1.base_pressure,
                "steps": step_values,
                "probes": probes,
                "converged": ok,
            });
            if let Some(p) = csv {
                write_artifact(&dir, &p, |w| {
                    writeln!(w, "{}", ProbeTable::CSV_HEADER)?;
                    for (id, t) in &tables {
                        t.write_csv_rows(id, &mut *w)?;
                    }
                    Ok(())
                })?;
            }
            print_json(&value)?;
            save_report(&dir, "probe", &value)?;
            Ok(if ok { 0 } else { 2 })
        }

        Command::Verify { config, full } => {
            let mut results = Vec::new();
            match &config {
                Some(path) => {
                    let (cfg, built) = load(path, &cli.overrides)?;
                    results.extend(run_config_suite(&built, &cfg.solve_options()));
                    if full {
                        results.extend(run_suite(false));
                    }
                }
                None => results.extend(run_suite(!full)),
            }
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed()).count();
            let skipped =
                results.iter().filter(|r| r.status == CheckStatus::Skip).count();
            let passed = results.len() - failed - skipped;
            println!("{passed} passed, {skipped} skipped, {failed} failed");
            let checks: Vec<Value> = results
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "status": match r.status {
                            CheckStatus::Pass => "pass",
                            CheckStatus::Fail => "fail",
                            CheckStatus::Skip => "skip",
                        },
                        "detail": r.detail,
                    })
                })
                .collect();
            let value = json!({
                "command": "verify",
                "checks": checks,
                "passed": passed,
                "skipped": skipped,
                "failed": failed,
                "ok": failed == 0,
            });
            save_report(&dir, "verify", &value)?;
            Ok(if failed == 0 { 0 } else { 2 })
        }
    }
}
