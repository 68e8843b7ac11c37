use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gencont::scenario::{parse_scenario_as, run, ScenarioKind, EXIT_INVALID};

/// Generalized continuity equations for one-dimensional scattering.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reflection and transmission amplitudes of one or more landscapes.
    Scatter(Common),
    /// Two-field currents on the equality domains of two landscapes.
    Currents(Common),
    /// Non-local invariant currents inside a locally symmetric domain.
    LocalSymmetry(Common),
    /// Co-evolve wave packets and track the continuity residual.
    Evolve(Common),
    /// SU(N) decomposition and commutator identities.
    SunCheck(Common),
    /// Region-II amplitude reconstruction for two landscapes.
    Fig1(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; defaults to the scenario's `output` or `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces the primary tolerance of the scenario kind.
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Scatter(a) => (ScenarioKind::Scatter, a),
        Command::Currents(a) => (ScenarioKind::Currents, a),
        Command::LocalSymmetry(a) => (ScenarioKind::LocalSymmetry, a),
        Command::Evolve(a) => (ScenarioKind::Evolve, a),
        Command::SunCheck(a) => (ScenarioKind::SunCheck, a),
        Command::Fig1(a) => (ScenarioKind::Fig1, a),
    };
    ExitCode::from(execute(kind, args) as u8)
}

fn execute(kind: ScenarioKind, args: Common) -> i32 {
    let text = match std::fs::read_to_string(&args.scenario) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.scenario.display());
            return EXIT_INVALID;
        }
    };
    let mut scenario = match parse_scenario_as(&text, Some(kind)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    if let Some(tol) = args.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            eprintln!("error: --tol must be positive, got {tol}");
            return EXIT_INVALID;
        }
        scenario.tolerances.override_primary(kind, tol);
    }
    let out = args
        .out
        .or_else(|| scenario.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    match run(&scenario, &out) {
        Ok(report) => {
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!(
                    "[{tag}] {}: {:e} (tolerance {:e})",
                    c.name, c.value, c.tolerance
                );
            }
            for p in &report.outputs {
                println!("wrote {}", p.display());
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}
