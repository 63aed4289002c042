//! Command-line front end: run scenarios, compare traces, list presets.
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bellnoise::runner::run_scenario_with_threads;
use bellnoise::scenario::{preset, preset_text, Scenario, PRESETS};
use bellnoise::trace::{compare, ConcurrenceTrace};
use bellnoise::{Error, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    version,
    about = "Entanglement decay of two qubits under correlated classical noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a bundled preset and write its CSV trace
    Run {
        /// Config file, or a preset name such as `fig4`
        scenario: String,
        /// Output CSV (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for Monte Carlo ensembles
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare traces that share a time grid
    Compare {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        /// Fail when |dC| exceeds tol + 3 stderr anywhere
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Bundled figure scenarios
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    /// Print the config text of a preset
    Show {
        name: String,
    },
}

fn load_scenario(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.exists() {
        return Scenario::from_path(path);
    }
    preset(arg)
        .ok_or_else(|| Error::InvalidArgument(format!("`{arg}` is neither a file nor a preset")))
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run {
            scenario,
            out,
            threads,
        } => {
            let s = load_scenario(&scenario)?;
            let trace = run_scenario_with_threads(&s, threads)?;
            match out {
                Some(path) => trace.save(&path)?,
                None => trace.write_csv(std::io::stdout().lock())?,
            }
        }
        Command::Compare { traces, tol } => {
            let loaded = traces
                .iter()
                .map(|p| {
                    let name = p
                        .file_stem()
                        .map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into());
                    ConcurrenceTrace::load(p).map(|t| (name, t))
                })
                .collect::<Result<Vec<_>>>()?;
            let report = compare(&loaded, tol)?;
            print!("{report}");
            if report.violations() > 0 {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Presets { action } => match action {
            PresetAction::List => {
                let mut out = std::io::stdout().lock();
                for (name, _) in PRESETS {
                    let s = preset(name).expect("bundled presets parse");
                    writeln!(
                        out,
                        "{name}\t{} {} noise, {} Bell state(s)",
                        s.geometry,
                        kind_name(&s),
                        s.states.len()
                    )?;
                }
            }
            PresetAction::Show { name } => {
                let text = preset_text(&name)
                    .ok_or_else(|| Error::InvalidArgument(format!("no preset named `{name}`")))?;
                print!("{text}");
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn kind_name(s: &Scenario) -> &'static str {
    match s.noise.kind {
        bellnoise::noise::NoiseKind::White { .. } => "white",
        bellnoise::noise::NoiseKind::OrnsteinUhlenbeck { .. } => "ou",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
