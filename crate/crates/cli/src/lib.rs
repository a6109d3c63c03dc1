//! `lqcc` command line: argument parsing, file formats and exit codes.
//!
//! Exit codes: 0 success, 2 usage error, 3 infeasible or failed check,
//! 4 I/O, parse or invalid input.

mod input;
mod output;

use std::ffi::OsString;
use std::io::{self, Read, Write};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use lqcc_core::concentrate::{solve_weighted, Weights};
use lqcc_core::lp::{rational_from_f64, LpProblem};
use lqcc_core::{
    apply_povm_element, asymptotic_yield_curve, average_target, build_theorem1_povm,
    ensemble_feasible, entropy, max_conversion_probability, merge_duplicates, optimal_plan,
    optimality_certificate, simplex_solve, simulate, single_shot_povm, verify_solution,
    vidal_monotones, DiagonalPovm, FeasibilityReport, LpStatus, MERGE_TOL, ZERO_TOL,
};
use serde_json::{json, Map, Value};
use thiserror::Error;

pub use output::{format_g17, Format, Units};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILED: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error(transparent)]
    Invalid(#[from] lqcc_core::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lqcc",
    version,
    about = "Local conversion and concentration of bipartite pure states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Unit for entanglement values in the output.
    #[arg(long, global = true, value_enum, default_value_t = Units::Nats)]
    pub units: Units,
    /// Squared Schmidt coefficients below this are dropped.
    #[arg(long, global = true, default_value_t = ZERO_TOL)]
    pub zero_tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schmidt spectrum, entropy and monotones of a state.
    Decompose {
        /// State file (`-` for stdin).
        #[arg(long)]
        state: String,
    },
    /// Test whether the source can reach a target state or ensemble.
    CheckFeasible(CheckArgs),
    /// Measurement taking the source to a target ensemble.
    BuildPovm {
        #[arg(long)]
        source: String,
        #[arg(long)]
        ensemble: String,
        /// Output file; stdout if omitted or `-`.
        #[arg(long)]
        out: Option<String>,
    },
    /// Optimal distribution over maximally entangled states.
    Concentrate(ConcentrateArgs),
    /// Solve a JSON linear program (debugging aid).
    LpSolve {
        file: String,
        /// Solve in exact rational arithmetic.
        #[arg(long)]
        exact: bool,
    },
    /// Monte Carlo run of a measurement protocol.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub source: String,
    #[arg(
        long,
        required_unless_present = "ensemble",
        conflicts_with = "ensemble"
    )]
    pub target: Option<String>,
    #[arg(long)]
    pub ensemble: Option<String>,
    /// Allowed negative slack per inequality.
    #[arg(long, default_value_t = lqcc_core::FEASIBILITY_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ConcentrateArgs {
    #[arg(long)]
    pub state: String,
    /// `ln`, `log2`, `indicator`, or a JSON file of per-level weights.
    #[arg(long, default_value = "ln")]
    pub weights: String,
    /// Check optimality: reduced costs for `ln`, LP verification otherwise.
    #[arg(long)]
    pub certify: bool,
    /// Per-copy yield for 1..=N copies.
    #[arg(long, value_name = "N")]
    pub asymptotic: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub state: String,
    /// `optimal`, or `povm FILE` with a `build-povm` report.
    #[arg(long, num_args = 1..=2, value_names = ["KIND", "FILE"], default_values = ["optimal"])]
    pub protocol: Vec<String>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Runs against the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        args,
        &mut io::stdin().lock(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    )
}

pub fn run_with<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, stdin, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "lqcc: {e}");
            e.exit_code()
        }
    }
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })
}

fn execute(cli: &Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let units = cli.units;
    let zt = cli.zero_tol;
    match &cli.command {
        Command::Decompose { state } => {
            let s = input::load_state(state, stdin, zt)?;
            let mut out = Map::new();
            out.insert("spectrum".into(), json!(s.coeffs()));
            out.insert("rank".into(), json!(s.rank()));
            out.insert(
                units.key("entropy"),
                json!(units.convert(entropy(&s).nats())),
            );
            out.insert("monotones".into(), json!(vidal_monotones(&s).values()));
            emit(stdout, &output::to_json(&out))?;
            Ok(EXIT_OK)
        }
        Command::CheckFeasible(args) => check_feasible(args, zt, stdin, stdout),
        Command::BuildPovm {
            source,
            ensemble,
            out,
        } => build_povm(source, ensemble, out.as_deref(), zt, stdin, stdout),
        Command::Concentrate(args) => concentrate(args, units, zt, stdin, stdout),
        Command::LpSolve { file, exact } => {
            let lp = input::load_lp(file, stdin)?;
            let (report, optimal) = if *exact {
                lp_exact(&lp)?
            } else {
                lp_float(&lp)
            };
            emit(stdout, &output::to_json(&report))?;
            Ok(if optimal { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Simulate(args) => simulate_cmd(args, units, zt, stdin, stdout),
    }
}

fn feasibility_json(report: &FeasibilityReport) -> Map<String, Value> {
    let mut out = Map::new();
    out.insert("feasible".into(), json!(report.feasible));
    out.insert("violated_indices".into(), json!(report.violated_indices));
    out.insert("slack".into(), json!(report.slack));
    out.insert("min_slack".into(), json!(report.min_slack()));
    out
}

fn check_feasible(
    args: &CheckArgs,
    zt: f64,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let source = input::load_state(&args.source, stdin, zt)?;
    let mut out;
    let feasible = match (&args.target, &args.ensemble) {
        (Some(target), None) => {
            let target = input::load_state(target, stdin, zt)?;
            let report =
                lqcc_core::monotones::nielsen_feasible_with_tol(&source, &target, args.tol);
            out = feasibility_json(&report);
            out.insert("mode".into(), json!("deterministic"));
            out.insert(
                "max_conversion_probability".into(),
                json!(max_conversion_probability(&source, &target)),
            );
            report.feasible
        }
        (None, Some(ensemble)) => {
            let ensemble = input::load_ensemble(ensemble, stdin, zt)?;
            let report =
                lqcc_core::monotones::ensemble_feasible_with_tol(&source, &ensemble, args.tol);
            out = feasibility_json(&report);
            out.insert("mode".into(), json!("ensemble"));
            report.feasible
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --target or --ensemble".into(),
            ))
        }
    };
    emit(stdout, &output::to_json(&out))?;
    Ok(if feasible { EXIT_OK } else { EXIT_FAILED })
}

fn povm_json(povm: &DiagonalPovm) -> Value {
    povm.elements
        .iter()
        .map(|e| json!({"label": e.label, "diag": e.diag}))
        .collect()
}

fn build_povm(
    source: &str,
    ensemble: &str,
    out: Option<&str>,
    zt: f64,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let source = input::load_state(source, stdin, zt)?;
    let ensemble = input::load_ensemble(ensemble, stdin, zt)?;
    let report = ensemble_feasible(&source, &ensemble);
    if !report.feasible {
        emit(stdout, &output::to_json(&feasibility_json(&report)))?;
        return Ok(EXIT_FAILED);
    }
    let (merged, die) = merge_duplicates(&ensemble, MERGE_TOL);
    let povm = build_theorem1_povm(&merged);
    let avg = average_target(&merged);
    let die: Vec<Value> = die
        .groups
        .iter()
        .map(|g| {
            let members: Vec<Value> = g
                .members
                .iter()
                .map(|(label, weight)| json!({"label": label, "weight": weight}))
                .collect();
            json!({"label": g.representative, "members": members})
        })
        .collect();
    let text = output::to_json(&json!({
        "elements": povm_json(&povm),
        "die": die,
        "average_target": avg.coeffs(),
        "outcome_probabilities": povm.outcome_probabilities(&avg),
        "completeness_residual": povm.completeness_residual(),
    }));
    match out {
        None | Some("-") => emit(stdout, &text)?,
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_string(),
            source,
        })?,
    }
    Ok(EXIT_OK)
}

fn parse_weights(spec: &str, stdin: &mut dyn Read) -> Result<Weights, CliError> {
    Ok(match spec {
        "ln" => Weights::Ln,
        "log2" => Weights::Log2,
        "indicator" => Weights::Indicator,
        path => Weights::Custom(input::load_weights(path, stdin)?),
    })
}

fn concentrate(
    args: &ConcentrateArgs,
    units: Units,
    zt: f64,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    if args.state == "-" && args.weights == "-" {
        return Err(CliError::Usage("stdin can feed only one input".into()));
    }
    let s = input::load_state(&args.state, stdin, zt)?;
    let weights = parse_weights(&args.weights, stdin)?;
    let mut passed = true;

    // Entanglement values are in nats only for `ln` weights; other weights
    // define their own objective and are reported as such.
    let (probabilities, objective, certificate) = if weights == Weights::Ln {
        let plan = optimal_plan(&s);
        let certificate = if args.certify {
            let cert = optimality_certificate(s.rank());
            let lp = solve_weighted(&s, &Weights::Ln)?;
            let verified = verify_solution(&lp.problem, &lp.solution, 1e-9);
            let agrees = lp
                .plan
                .probabilities
                .iter()
                .zip(&plan.probabilities)
                .all(|(a, b)| (a - b).abs() <= 1e-9);
            passed = cert.passed && verified && agrees;
            Some(json!({
                "z": cert.z_values,
                "reduced_costs_nonnegative": cert.passed,
                "simplex_verified": verified,
                "simplex_agrees": agrees,
                "passed": passed,
            }))
        } else {
            None
        };
        (plan.probabilities, plan.expected_entanglement, certificate)
    } else {
        let lp = solve_weighted(&s, &weights)?;
        let certificate = if args.certify {
            passed = verify_solution(&lp.problem, &lp.solution, 1e-9);
            Some(json!({"simplex_verified": passed, "passed": passed}))
        } else {
            None
        };
        (lp.plan.probabilities, lp.objective, certificate)
    };
    let objective_key = if weights == Weights::Ln {
        units.key("expected")
    } else {
        "objective".to_string()
    };
    let objective = if weights == Weights::Ln {
        units.convert(objective)
    } else {
        objective
    };
    let curve = match args.asymptotic {
        Some(n) => Some(
            asymptotic_yield_curve(&s, n)?
                .into_iter()
                .map(|(k, y)| (k, units.convert(y)))
                .collect::<Vec<_>>(),
        ),
        None => None,
    };

    match args.format {
        Format::Json => {
            let mut plan = Map::new();
            plan.insert("p".into(), json!(probabilities));
            plan.insert(objective_key, json!(objective));
            let mut out = Map::new();
            out.insert("plan".into(), Value::Object(plan));
            if let Some(cert) = certificate {
                out.insert("certificate".into(), cert);
            }
            if let Some(curve) = curve {
                let rows: Vec<Value> = curve
                    .iter()
                    .map(|(n, y)| {
                        let mut row = Map::new();
                        row.insert("n".into(), json!(n));
                        row.insert(units.key("yield_per_copy"), json!(y));
                        Value::Object(row)
                    })
                    .collect();
                out.insert("curve".into(), Value::Array(rows));
            }
            emit(stdout, &output::to_json(&out))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["table", "index", "value"])?;
            for (j, p) in probabilities.iter().enumerate() {
                w.write_record(["plan", &(j + 1).to_string(), &format_g17(*p)])?;
            }
            w.write_record([objective_key.as_str(), "", &format_g17(objective)])?;
            for (n, y) in curve.iter().flatten() {
                w.write_record([units.key("curve").as_str(), &n.to_string(), &format_g17(*y)])?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io {
                path: "<stdout>".into(),
                source: e.into_error(),
            })?;
            emit(stdout, &String::from_utf8_lossy(&bytes))?;
        }
    }
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

fn status_name(status: LpStatus) -> &'static str {
    match status {
        LpStatus::Optimal => "optimal",
        LpStatus::Unbounded => "unbounded",
        LpStatus::Infeasible => "infeasible",
    }
}

fn lp_float(lp: &LpProblem) -> (Value, bool) {
    let sol = simplex_solve(lp);
    let optimal = sol.is_optimal();
    let mut out = json!({ "status": status_name(sol.status) });
    if optimal {
        out["values"] = json!(sol.values);
        out["objective_value"] = json!(sol.objective_value);
        out["basis"] = json!(sol.basis);
        out["duals"] = json!(sol.duals);
        out["reduced_costs"] = json!(sol.reduced_costs);
        out["verified"] = json!(verify_solution(lp, &sol, 1e-9));
    }
    (out, optimal)
}

fn lp_exact(lp: &LpProblem) -> Result<(Value, bool), CliError> {
    let exact = lp.to_exact()?;
    let sol = simplex_solve(&exact);
    let optimal = sol.is_optimal();
    let mut out = json!({ "status": status_name(sol.status) });
    if optimal {
        let approx = sol.to_f64();
        let strings = |v: &[_]| v.iter().map(ToString::to_string).collect::<Vec<String>>();
        out["values"] = json!(approx.values);
        out["objective_value"] = json!(approx.objective_value);
        out["values_exact"] = json!(strings(&sol.values));
        out["objective_exact"] = json!(sol.objective_value.to_string());
        out["basis"] = json!(sol.basis);
        out["duals_exact"] = json!(strings(&sol.duals));
        let zero = rational_from_f64(0.0).expect("zero is finite");
        out["verified"] = json!(verify_solution(&exact, &sol, zero));
    }
    Ok((out, optimal))
}

fn simulate_cmd(
    args: &SimulateArgs,
    units: Units,
    zt: f64,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let s = input::load_state(&args.state, stdin, zt)?;
    let povm = match args.protocol.as_slice() {
        [kind] if kind == "optimal" => single_shot_povm(&s),
        [kind, file] if kind == "povm" => {
            if args.state == "-" && file == "-" {
                return Err(CliError::Usage("stdin can feed only one input".into()));
            }
            input::load_povm(file, stdin)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "--protocol expects `optimal` or `povm FILE`, got {other:?}"
            )))
        }
    };
    let report = simulate(&povm, &s, args.trials, args.seed)?;
    let (mean, stderr) = lqcc_core::yield_statistics(&report);
    let post_entropy: Vec<f64> = povm
        .elements
        .iter()
        .map(|e| {
            Ok(match apply_povm_element(&e.diag, &s)?.1 {
                Some(post) => entropy(&post).nats(),
                None => 0.0,
            })
        })
        .collect::<Result<_, lqcc_core::Error>>()?;
    let mean_post_entropy = report
        .counts
        .iter()
        .zip(&post_entropy)
        .map(|(&c, h)| c as f64 * h)
        .sum::<f64>()
        / report.trials as f64;
    let (stat, dof) = report.chi_square();

    let mut out = Map::new();
    out.insert("trials".into(), json!(report.trials));
    out.insert("seed".into(), json!(report.seed));
    out.insert("labels".into(), json!(report.labels));
    out.insert("counts".into(), json!(report.counts));
    out.insert("empirical_probs".into(), json!(report.empirical_probs));
    out.insert("expected_probs".into(), json!(report.expected_probs));
    out.insert("max_abs_deviation".into(), json!(report.max_abs_deviation));
    out.insert(units.key("mean_yield"), json!(units.convert(mean)));
    out.insert(units.key("yield_stderr"), json!(units.convert(stderr)));
    out.insert(
        units.key("mean_post_entropy"),
        json!(units.convert(mean_post_entropy)),
    );
    out.insert("chi_square".into(), json!({"statistic": stat, "dof": dof}));
    emit(stdout, &output::to_json(&out))?;
    Ok(EXIT_OK)
}
