use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use corona_cli::commands::{self, Outcome};
use corona_cli::scenario::{self, Overrides};
use corona_cli::selftest::{self, Faults};
use corona_cli::{exit, CliError};
use corona_core::CircleMode;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "corona", version, about = "Classify projections in corona algebras over 1-D spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide MvN / unitary / homotopy equivalence from symbolic jump data.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = RelationArg::All)]
        relation: RelationArg,
    },
    /// Measure jump integers of numeric liftings and compare with declarations.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Build and verify a partial-isometry witness between two numeric liftings.
    Deform {
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suites.
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_timestamp: bool,
        /// Corrupt the named suite (for testing the harness).
        #[arg(long, hide = true)]
        inject_fault: Vec<String>,
    },
}

#[derive(Args)]
struct Common {
    scenario: PathBuf,
    #[arg(long, value_enum)]
    circle_mode: Option<CircleModeArg>,
    /// Residual threshold for deformation witnesses.
    #[arg(long)]
    tol: Option<f64>,
    /// Truncation dimension for numeric scenarios.
    #[arg(long)]
    dim: Option<usize>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp from the JSON report.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    Mvn,
    Unitary,
    Homotopy,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum CircleModeArg {
    Strict,
    Paper,
}

fn write_report(mut report: Value, out: Option<&PathBuf>, no_timestamp: bool) -> Result<(), CliError> {
    let Some(path) = out else { return Ok(()) };
    if !no_timestamp {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        report["timestamp"] = now.into();
    }
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run_scenario(common: &Common, f: impl FnOnce(&scenario::Loaded) -> Result<Outcome, CliError>) -> Result<i32, CliError> {
    if common.tol.is_some_and(|t| t.is_nan() || t <= 0.0) {
        return Err(CliError::Input("--tol must be positive".into()));
    }
    let overrides = Overrides {
        dim: common.dim,
        circle_mode: common.circle_mode.map(|m| match m {
            CircleModeArg::Strict => CircleMode::StrictCyclic,
            CircleModeArg::Paper => CircleMode::PaperRemark,
        }),
        tol: common.tol,
    };
    let loaded = scenario::read(&common.scenario)?.load(&overrides)?;
    let outcome = f(&loaded)?;
    print!("{}", outcome.summary);
    write_report(outcome.report, common.out.as_ref(), common.no_timestamp)?;
    Ok(outcome.exit_code)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Classify { common, relation } => {
            let name = match relation {
                RelationArg::Mvn => "mvn",
                RelationArg::Unitary => "unitary",
                RelationArg::Homotopy => "homotopy",
                RelationArg::All => "all",
            };
            let rels = commands::relations(name).expect("known relation");
            run_scenario(&common, |s| commands::classify(s, &rels))
        }
        Command::Analyze { common } => run_scenario(&common, commands::analyze),
        Command::Deform { common } => run_scenario(&common, commands::deform),
        Command::Selftest { out, no_timestamp, inject_fault } => {
            let known: Vec<_> = selftest::registry().iter().map(|s| s.name).collect();
            if let Some(bad) = inject_fault.iter().find(|f| !known.contains(&f.as_str())) {
                return Err(CliError::Input(format!("unknown suite {bad}")));
            }
            let results = selftest::run(&Faults::inject(inject_fault));
            let mut suites = Vec::new();
            for r in &results {
                match &r.outcome {
                    Ok(n) => println!("PASS {} — {} ({n} checks)", r.name, r.invariant),
                    Err(why) => println!("FAIL {} — {}: {why}", r.name, r.invariant),
                }
                suites.push(serde_json::json!({
                    "name": r.name,
                    "invariant": r.invariant,
                    "passed": r.passed(),
                    "detail": match &r.outcome { Ok(n) => format!("{n} checks"), Err(e) => e.clone() },
                }));
            }
            let failed = results.iter().filter(|r| !r.passed()).count();
            println!("{} suites, {failed} failed", results.len());
            write_report(serde_json::json!({ "command": "selftest", "suites": suites }), out.as_ref(), no_timestamp)?;
            Ok(if failed == 0 { exit::OK } else { exit::ERROR })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::ERROR as u8)
        }
    }
}
