use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ostn::harness::{list_presets, run_checks, run_sweep, write_csv, FlatConfig};
use ostn::OstnError;

#[derive(Parser)]
#[command(name = "ostn", version, about = "Outage sweeps for relay-assisted satellite/IoT spectrum sharing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate analytic bounds, asymptotes and simulation over an SNR grid.
    Sweep(SweepArgs),
    /// List the built-in presets.
    Presets {
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in cross-checks.
    Validate {
        #[arg(long, default_value_t = 200_000)]
        trials: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long)]
    preset: Option<String>,
    /// Flat key = value file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// start:stop:step in dB.
    #[arg(long)]
    snr: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// A fixed value in (0, 1) or `adaptive`.
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the whole curve as JSON.
    #[arg(long)]
    json: bool,
}

/// Writes `text` to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<(), OstnError> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(OstnError::Io(e.to_string())),
        _ => Ok(()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, OstnError> {
    serde_json::to_string_pretty(v).map_err(|e| OstnError::Io(e.to_string()))
}

fn sweep(args: SweepArgs) -> Result<(), OstnError> {
    let mut cfg = match &args.config {
        Some(p) => FlatConfig::load(p)?,
        None => FlatConfig::default(),
    };
    let flags = [
        ("preset", args.preset),
        ("snr", args.snr),
        ("trials", args.trials.map(|v| v.to_string())),
        ("seed", args.seed.map(|v| v.to_string())),
        ("mu", args.mu),
        ("epsilon", args.epsilon.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.set(k, v);
        }
    }
    let spec = cfg.to_spec()?;
    let curve = run_sweep(&spec)?;
    for w in &curve.warnings {
        eprintln!("warning: {w}");
    }
    let io = |e: io::Error| OstnError::Io(e.to_string());
    if args.json {
        emit(&to_json(&curve)?)?;
    }
    match args.out {
        Some(path) => write_csv(&curve.rows, BufWriter::new(File::create(&path).map_err(io)?))?,
        None if !args.json => write_csv(&curve.rows, io::stdout().lock())?,
        None => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Presets { json } => {
            let presets = list_presets();
            if json {
                to_json(&presets).and_then(|t| emit(&t))
            } else {
                let lines: Vec<String> = presets.iter().map(|p| format!("{:<22} {}", p.name, p.description)).collect();
                emit(&lines.join("\n"))
            }
        }
        Command::Validate { trials, json } => {
            let checks = run_checks(trials);
            let shown = if json {
                to_json(&checks)
            } else {
                Ok(checks
                    .iter()
                    .map(|c| format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
                    .collect::<Vec<_>>()
                    .join("\n"))
            };
            match shown.and_then(|t| emit(&t)) {
                Ok(()) if !checks.iter().all(|c| c.passed) => return ExitCode::FAILURE,
                r => r,
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
