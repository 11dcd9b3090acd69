//! `qmod`: stability, filtrations, and moduli geometry of quiver
//! representations from JSON instance files.
//!
//! Every subcommand reads an instance with `--input`, prints one JSON report
//! to standard output, and exits 0 on success, 2 when the numerics could not
//! reach a verdict, and 1 on errors.

use clap::{Parser, Subcommand};
use qmod::{
    audit_instance, check_report, chern_report, classify_stability, descended_chern_integral,
    descended_metric_chart, facet_report, filtration_report, flow_summary, hn_filtration,
    instance_representation, jh_filtration, kempf_ness_flow, kronecker_moduli_report,
    moduli_report, parse_theta_arg, read_instance, s_equivalent, to_json, ClassifyOptions, Error,
    FiltrationOptions, FlowOptions, LineBundleData, ParsedInstance, SEquivalenceReport, Weight,
};

#[derive(Parser)]
#[command(name = "qmod", version, about = "Stability and moduli of quiver representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Instance file (JSON).
    #[arg(long, global = true)]
    input: Option<String>,

    /// Weight override: comma-separated exact rationals in vertex order.
    #[arg(long, global = true)]
    theta: Option<String>,

    /// Seed override for generated matrices and randomized checks.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Convergence tolerance override for the gradient flow.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Iteration cap override for the gradient flow.
    #[arg(long, global = true)]
    max_iters: Option<usize>,

    /// Grid size override for quadrature commands.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Output format; only `json` is supported.
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the stability of the instance at its weight.
    Check,
    /// Facet signature of the weight and the primitive integral weight on
    /// its ray.
    Facet,
    /// Primitive integral weight in the facet of the instance weight.
    IntegralWeight,
    /// Run the moment-map gradient flow and report its trajectory.
    Flow,
    /// Harder-Narasimhan filtration of the instance.
    Hn,
    /// Jordan-Holder filtration of a semistable instance.
    Jh,
    /// S-equivalence of the instance with a second one.
    Sequiv {
        /// Second instance file.
        #[arg(long)]
        other: String,
    },
    /// Quadrature of the descended Kahler form on the Kronecker moduli.
    Moduli,
    /// Descended line-bundle metric and curvature on the Kronecker moduli.
    Chern,
    /// Internal-consistency audit of the instance.
    Audit,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let is_error = e.use_stderr();
            let _ = e.print();
            std::process::exit(if is_error { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(Error::Numeric(reason)) => {
            let report = serde_json::json!({
                "verdict": "Indeterminate",
                "reason": reason,
            });
            emit(&serde_json::to_string_pretty(&report).expect("static report"));
            std::process::exit(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

/// Print a report line; a closed pipe (`qmod ... | head`) ends the run
/// quietly instead of panicking.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout();
    if writeln!(out, "{text}").is_err() || out.flush().is_err() {
        std::process::exit(0);
    }
}

fn run(cli: &Cli) -> Result<i32, Error> {
    check_worker_cap()?;
    if cli.format != "json" {
        return Err(Error::Instance(format!(
            "unsupported output format `{}`; only `json` is available",
            cli.format
        )));
    }
    let parsed = load_instance(cli)?;

    match &cli.command {
        Command::Check => {
            let rep = instance_representation(&parsed, cli.seed);
            let theta = resolve_weight(cli, &parsed)?;
            let verdict = classify_stability(&rep, &theta, &classify_options(cli, &parsed))?;
            emit(&to_json(&check_report(&verdict)));
            Ok(0)
        }
        Command::Facet | Command::IntegralWeight => {
            let theta = resolve_weight(cli, &parsed)?;
            let report = facet_report(&theta, &parsed.dims)?;
            emit(&to_json(&report));
            Ok(0)
        }
        Command::Flow => {
            let rep = instance_representation(&parsed, cli.seed);
            let theta = resolve_weight(cli, &parsed)?;
            let theta_f = qmod::weight::weight_to_scalars::<f64>(&theta);
            let mut opts = flow_options(cli, &parsed);
            opts.record_history = true;
            let report = kempf_ness_flow(&rep, &theta_f, &opts)?;
            emit(&to_json(&flow_summary(&report, true)));
            Ok(0)
        }
        Command::Hn => {
            let rep = instance_representation(&parsed, cli.seed);
            let theta = resolve_weight(cli, &parsed)?;
            let filtration = hn_filtration(&rep, &theta, &filtration_options(cli, &parsed))?;
            emit(&to_json(&filtration_report("harder-narasimhan", &filtration)));
            Ok(0)
        }
        Command::Jh => {
            let rep = instance_representation(&parsed, cli.seed);
            let theta = resolve_weight(cli, &parsed)?;
            let filtration = jh_filtration(&rep, &theta, &filtration_options(cli, &parsed))?;
            emit(&to_json(&filtration_report("jordan-holder", &filtration)));
            Ok(0)
        }
        Command::Sequiv { other } => {
            let rep = instance_representation(&parsed, cli.seed);
            let other_parsed = read_instance(other)?;
            let other_rep = instance_representation(&other_parsed, cli.seed);
            let theta = resolve_weight(cli, &parsed)?;
            let equivalent =
                s_equivalent(&rep, &other_rep, &theta, &filtration_options(cli, &parsed))?;
            let report = SEquivalenceReport {
                equivalent,
                dims: rep.dims().to_vec(),
            };
            emit(&to_json(&report));
            Ok(0)
        }
        Command::Moduli => {
            let theta = resolve_weight(cli, &parsed)?;
            let theta_f = qmod::weight::weight_to_scalars::<f64>(&theta);
            let grid = grid_size(cli, &parsed, 64);
            let report = kronecker_moduli_report::<f64>(grid, &theta_f)?;
            emit(&to_json(&moduli_report(&report)));
            Ok(0)
        }
        Command::Chern => {
            let theta = resolve_weight(cli, &parsed)?;
            let data = LineBundleData::new(&theta, &parsed.dims)?;
            let grid = grid_size(cli, &parsed, 48);
            let integral = descended_chern_integral::<f64>(grid, &data)?;
            let samples: Vec<_> = [(0.0, 0.0), (0.5, 0.3), (-1.2, 2.0)]
                .iter()
                .map(|&(u, v)| descended_metric_chart(u, v, &data))
                .collect::<Result<_, _>>()?;
            emit(&to_json(&chern_report(&data, &integral, &samples)));
            Ok(0)
        }
        Command::Audit => {
            let rep = instance_representation(&parsed, cli.seed);
            let theta = resolve_weight(cli, &parsed)?;
            let seed = cli.seed.or(parsed.seed).unwrap_or(0);
            let report = audit_instance(&rep, &theta, seed, &flow_options(cli, &parsed))?;
            emit(&to_json(&report));
            Ok(if report.pass { 0 } else { 2 })
        }
    }
}

/// `QMOD_THREADS` caps the worker count.  Every current computation path is
/// single-threaded, so any valid cap is already respected; the variable is
/// still validated so misconfigurations fail loudly.
fn check_worker_cap() -> Result<(), Error> {
    match std::env::var("QMOD_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(Error::Instance(format!(
                "QMOD_THREADS must be a positive integer, got `{raw}`",
            ))),
        },
    }
}

fn load_instance(cli: &Cli) -> Result<ParsedInstance, Error> {
    let path = cli
        .input
        .as_deref()
        .ok_or_else(|| Error::Instance("no instance: pass --input <file>".into()))?;
    read_instance(path)
}

fn resolve_weight(cli: &Cli, parsed: &ParsedInstance) -> Result<Weight, Error> {
    let theta = match &cli.theta {
        Some(arg) => parse_theta_arg(arg)?,
        None => parsed
            .weight
            .clone()
            .ok_or_else(|| {
                Error::Instance(
                    "this command needs a weight: add one to the instance or pass --theta".into(),
                )
            })?,
    };
    if theta.len() != parsed.dims.len() {
        return Err(Error::Instance(format!(
            "weight has {} entries for {} vertices",
            theta.len(),
            parsed.dims.len(),
        )));
    }
    Ok(theta)
}

fn flow_options(cli: &Cli, parsed: &ParsedInstance) -> FlowOptions<f64> {
    let mut opts = FlowOptions::default();
    if let Some(tol) = cli.tol.or(parsed.options.tol) {
        opts.epsilon = tol;
    }
    if let Some(iters) = cli.max_iters.or(parsed.options.max_iters) {
        opts.max_iters = iters;
    }
    opts
}

fn classify_options(cli: &Cli, parsed: &ParsedInstance) -> ClassifyOptions<f64> {
    ClassifyOptions {
        flow: flow_options(cli, parsed),
        ..ClassifyOptions::default()
    }
}

fn filtration_options(cli: &Cli, parsed: &ParsedInstance) -> FiltrationOptions<f64> {
    FiltrationOptions {
        classify: classify_options(cli, parsed),
        ..FiltrationOptions::default()
    }
}

fn grid_size(cli: &Cli, parsed: &ParsedInstance, default: usize) -> usize {
    cli.grid.or(parsed.options.grid).unwrap_or(default)
}
