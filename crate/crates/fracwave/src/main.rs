//! Command-line front end: convergence sweeps, single solves, and the
//! coefficient / kernel / operator verification suites.

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use fracwave::error::Error;
use fracwave::harness::{
    self, parse_f64_list, parse_key_value_file, parse_usize_list, ExampleId, ExperimentConfig,
};
use fracwave::operators::truncation_error_scan;
use fracwave::problem::check_compatibility;
use fracwave::soe::{build_soe, geometric_grid};
use fracwave::solver::{solve, Scheme, SpatialGrid};
use fracwave::coeffs::check_coefficient_properties;
use fracwave::mesh::FractionalOrder;

#[derive(Parser)]
#[command(
    name = "fracwave",
    about = "Finite difference solvers for the time-fractional hyperbolic equation",
    version
)]
struct Cli {
    /// Optional key=value config file; explicit flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solve and print an error/timing summary.
    Solve(RunArgs),
    /// Run a convergence sweep and emit a CSV table.
    Convergence(RunArgs),
    /// Coefficient property suites.
    Coeffs {
        #[command(subcommand)]
        command: CoeffsCommand,
    },
    /// Sum-of-exponentials kernel checks.
    Soe {
        #[command(subcommand)]
        command: SoeCommand,
    },
    /// Discrete-operator accuracy scans.
    Operator {
        #[command(subcommand)]
        command: OperatorCommand,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Benchmark id: ex51 (smooth) or ex52 (weak initial regularity).
    #[arg(long)]
    example: Option<String>,
    /// h3n3-direct | h3n3-fast | h3n3-graded | h3n3-graded-fast | l2c.
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated fractional orders in (1,2).
    #[arg(long)]
    alpha: Option<String>,
    /// Comma-separated time step counts (dyadic when sweeping).
    #[arg(long = "N")]
    n: Option<String>,
    /// Comma-separated spatial interval counts (dyadic when sweeping).
    #[arg(long = "M")]
    m: Option<String>,
    /// Grading exponent for the graded schemes.
    #[arg(long)]
    r: Option<f64>,
    /// Kernel-compression tolerance for the fast schemes.
    #[arg(long)]
    eps: Option<f64>,
    /// Full table profile (M = 5000, N up to 1280) instead of the desk one.
    #[arg(long)]
    full: bool,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone)]
enum CoeffsCommand {
    /// Scan the weight inequalities over k and alpha.
    Check {
        #[arg(long, default_value_t = 2000)]
        kmax: usize,
        #[arg(long, default_value_t = 0.01)]
        tau: f64,
        /// Override the default alpha grid 1.05, 1.10, ..., 1.95.
        #[arg(long)]
        alpha: Option<String>,
    },
}

#[derive(Subcommand, Clone)]
enum SoeCommand {
    /// Build a kernel compression and report (N_exp, max grid error).
    Check {
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long = "T", default_value_t = 1.0)]
        t_final: f64,
    },
}

#[derive(Subcommand, Clone)]
enum OperatorCommand {
    /// Truncation-error scan of the uniform operator on p = t^mu.
    Scan {
        #[arg(long, default_value_t = 5.0)]
        mu: f64,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        #[arg(long = "N", default_value = "64,128,256")]
        n: String,
        #[arg(long = "T", default_value_t = 1.0)]
        t_final: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::SoeTolerance { .. } | Error::SingularPivot { .. } | Error::OutOfWindow { .. } => {
            ExitCode::from(2)
        }
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file_pairs = match &cli.config {
        Some(path) => match parse_key_value_file(path) {
            Ok(pairs) => pairs.into_iter().collect::<HashMap<_, _>>(),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        },
        None => HashMap::new(),
    };
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args, &file_pairs),
        Command::Convergence(args) => cmd_convergence(args, &file_pairs),
        Command::Coeffs { command } => cmd_coeffs(command),
        Command::Soe { command } => cmd_soe(command),
        Command::Operator { command } => cmd_operator(command),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Flag value, falling back to the config file, then to a default.
fn pick(cli: &Option<String>, file: &HashMap<String, String>, key: &str, default: &str) -> String {
    cli.clone()
        .or_else(|| file.get(key).cloned())
        .unwrap_or_else(|| default.to_string())
}

fn resolve_config(
    args: &RunArgs,
    file: &HashMap<String, String>,
) -> Result<ExperimentConfig, Error> {
    let example = ExampleId::from_str(&pick(&args.example, file, "example", "ex51"))?;
    let default_scheme = match example {
        ExampleId::Ex51 => "h3n3-fast",
        ExampleId::Ex52 => "h3n3-graded-fast",
    };
    let scheme = Scheme::from_str(&pick(&args.scheme, file, "scheme", default_scheme))?;
    let alphas = parse_f64_list(&pick(&args.alpha, file, "alpha", "1.1,1.5,1.9"))?;
    let default_n = match (example, args.full) {
        (ExampleId::Ex51, false) => "160,320,640",
        (ExampleId::Ex51, true) => "160,320,640,1280",
        (ExampleId::Ex52, _) => "32,64,128,256",
    };
    let default_m = if args.full { "5000" } else { "2000" };
    let n_list = parse_usize_list(&pick(&args.n, file, "N", default_n))?;
    let m_list = parse_usize_list(&pick(&args.m, file, "M", default_m))?;
    let grading = args
        .r
        .or_else(|| file.get("r").and_then(|v| v.parse().ok()))
        .unwrap_or(if scheme.is_graded() { 2.0 } else { 1.0 });
    let soe_eps = args
        .eps
        .or_else(|| file.get("eps").and_then(|v| v.parse().ok()))
        .unwrap_or(1e-12);
    let out = args
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from));
    let config = ExperimentConfig {
        example,
        scheme,
        alphas,
        n_list,
        m_list,
        grading,
        soe_eps,
        out,
    };
    config.validate()?;
    Ok(config)
}

fn cmd_convergence(args: RunArgs, file: &HashMap<String, String>) -> Result<ExitCode, Error> {
    let config = resolve_config(&args, file)?;
    let report = harness::run_convergence(&config)?;
    print!("{}", report.render_table());
    if let Some(path) = &config.out {
        std::fs::write(path, report.to_csv())
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        println!("csv written to {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: RunArgs, file: &HashMap<String, String>) -> Result<ExitCode, Error> {
    let mut config = resolve_config(&args, file)?;
    // A single solve wants single values; take the last (finest) entries.
    config.alphas.truncate(1);
    let n = *config.n_list.last().unwrap();
    let m = *config.m_list.last().unwrap();
    let order = FractionalOrder::new(config.alphas[0])?;
    let problem = config.example.problem(order);
    let grid = SpatialGrid::new(problem.length, m)?;

    let compat = check_compatibility(&problem, m.min(256));
    for warning in &compat.warnings {
        eprintln!("warning: {warning}");
    }

    let result = solve(&problem, &grid, n, config.scheme, config.grading, config.soe_eps)?;
    println!(
        "scheme {}  alpha {}  N {}  M {}",
        result.scheme, config.alphas[0], n, m
    );
    if let Some(err) = result.max_error(&problem, &grid, config.example.error_from_level()) {
        println!("max error vs exact: {err:.5e}");
    }
    println!("max level L2 norm: {:.6e}", result.max_level_l2());
    println!(
        "seconds: setup {:.3}  stepping {:.3}  post {:.3}",
        result.timings.setup_seconds, result.timings.step_seconds, result.timings.post_seconds
    );
    if let Some(path) = &config.out {
        let mut csv = String::from("x,u\n");
        let last = result.field.last().unwrap();
        for (i, v) in last.iter().enumerate() {
            csv.push_str(&format!("{},{:.12e}\n", grid.node(i), v));
        }
        std::fs::write(path, csv)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        println!("final level written to {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_coeffs(command: CoeffsCommand) -> Result<ExitCode, Error> {
    match command {
        CoeffsCommand::Check { kmax, tau, alpha } => {
            let alphas = match alpha {
                Some(list) => parse_f64_list(&list)?,
                None => (1..=19).map(|i| 1.0 + 0.05 * i as f64).collect(),
            };
            let report = check_coefficient_properties(kmax, &alphas, tau)?;
            println!(
                "coefficient properties: k <= {}, {} alphas, tau = {}, {} checks",
                report.k_max,
                report.alphas.len(),
                report.tau,
                report.checks
            );
            if report.all_pass() {
                println!("all inequalities hold (decrease, lower-bound, sigma-combination, running-sum)");
                Ok(ExitCode::SUCCESS)
            } else {
                for v in &report.violations {
                    println!(
                        "VIOLATION {} at k = {}, alpha = {}, margin = {:.3e}",
                        v.family, v.k, v.alpha, v.margin
                    );
                }
                Ok(ExitCode::from(2))
            }
        }
    }
}

fn cmd_soe(command: SoeCommand) -> Result<ExitCode, Error> {
    match command {
        SoeCommand::Check {
            gamma,
            eps,
            delta,
            t_final,
        } => {
            let soe = build_soe(gamma, eps, delta, t_final)?;
            let grid = geometric_grid(delta, t_final, 10_000);
            let max_err = soe.max_error_on(&grid);
            println!("N_exp = {}", soe.n_exp());
            println!("max grid error = {max_err:.3e} (tolerance {eps:.1e})");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_operator(command: OperatorCommand) -> Result<ExitCode, Error> {
    match command {
        OperatorCommand::Scan {
            mu,
            alpha,
            n,
            t_final,
            out,
        } => {
            let n_list = parse_usize_list(&n)?;
            let rows = truncation_error_scan(mu, alpha, &n_list, t_final)?;
            let mut csv = String::from("N,max_error,order\n");
            println!("{:>7} {:>12} {:>9}", "N", "max error", "order");
            for row in &rows {
                let order = row.order.map(|o| format!("{o:.4}")).unwrap_or_default();
                println!(
                    "{:>7} {:>12.4e} {:>9}",
                    row.n,
                    row.max_error,
                    if order.is_empty() { "-" } else { &order }
                );
                csv.push_str(&format!("{},{:.5e},{}\n", row.n, row.max_error, order));
            }
            if let Some(path) = out {
                std::fs::write(&path, csv)
                    .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
                println!("csv written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
