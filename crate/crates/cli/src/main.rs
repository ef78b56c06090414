use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use bvchain_cli::config::PathKind;
use bvchain_cli::{run_scenario, scenarios, validate_scenario, write_outputs, CliError, ScenarioConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bvchain", version, about = "Quench dynamics of XY chains with impurities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its series and report.
    Simulate {
        /// Scenario file.
        #[arg(long, conflicts_with = "scenario")]
        config: Option<PathBuf>,
        /// Name of a bundled scenario.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value = "bvchain-out")]
        out_dir: PathBuf,
        /// Comma-separated subset of the configured paths.
        #[arg(long, value_delimiter = ',')]
        paths: Option<Vec<String>>,
        /// Replace every comparison tolerance.
        #[arg(long)]
        tolerance_override: Option<f64>,
    },
    /// Run bundled scenarios (all by default) and check their comparisons.
    Verify {
        names: Vec<String>,
        #[arg(long, default_value = "bvchain-verify")]
        out_dir: PathBuf,
        #[arg(long)]
        tolerance_override: Option<f64>,
    },
    /// List the bundled scenarios.
    Scenarios,
}

fn configure_threads() {
    if let Some(n) = std::env::var("BVCHAIN_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn load(config: Option<PathBuf>, scenario: Option<String>) -> Result<ScenarioConfig, CliError> {
    match (config, scenario) {
        (Some(path), _) => ScenarioConfig::parse(
            &std::fs::read_to_string(&path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?,
        ),
        (None, Some(name)) => scenarios::load(&name),
        (None, None) => Err(CliError::Parse("pass --config or --scenario".into())),
    }
}

fn simulate(
    config: Option<PathBuf>,
    scenario: Option<String>,
    out_dir: PathBuf,
    paths: Option<Vec<String>>,
    tol: Option<f64>,
) -> Result<bool, CliError> {
    let mut cfg = load(config, scenario)?;
    if let Some(paths) = paths {
        let keep = paths
            .iter()
            .map(|p| PathKind::parse(p.trim()).ok_or_else(|| CliError::Parse(format!("unknown path {p}"))))
            .collect::<Result<BTreeSet<_>, _>>()?;
        cfg.restrict_paths(&keep);
    }
    if let Some(t) = tol {
        cfg.override_tolerances(t);
    }
    validate_scenario(&cfg)?;
    let run = run_scenario(&cfg)?;
    write_outputs(&run, &cfg, &out_dir)?;
    for c in &run.report.comparisons {
        println!(
            "{} {} {} vs {} sup={:.3e} tol={:.1e} {}",
            c.kind,
            c.observable,
            c.a,
            c.b.as_deref().unwrap_or("-"),
            c.sup,
            c.tolerance,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    Ok(run.report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let result = match cli.command {
        Command::Simulate { config, scenario, out_dir, paths, tolerance_override } => {
            simulate(config, scenario, out_dir, paths, tolerance_override)
        }
        Command::Verify { names, out_dir, tolerance_override } => {
            let names: Vec<String> =
                if names.is_empty() { scenarios::names().map(String::from).collect() } else { names };
            let mut all = Ok(true);
            for name in names {
                println!("== {name}");
                match simulate(None, Some(name.clone()), out_dir.join(&name), None, tolerance_override) {
                    Ok(p) => all = all.map(|a| a && p),
                    Err(e) => {
                        all = Err(e);
                        break;
                    }
                }
            }
            all
        }
        Command::Scenarios => {
            for name in scenarios::names() {
                let cfg = scenarios::load(name).expect("bundled scenarios parse");
                println!("{name}\t{}", cfg.description);
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
