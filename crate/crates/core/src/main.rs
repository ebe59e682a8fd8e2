use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rirsim::harness::{
    emit_csv, emit_skips, figure_preset, run_experiment, selfcheck, selfcheck_preset, skip_log_path, write_csv,
    write_skips, ExperimentConfig, HarnessError, Mode,
};

#[derive(Parser)]
#[command(name = "rirsim", version, about = "Relay-aided MIMO broadcast delay and DoF simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// CSV destination; skips go to `<out>.skips.log`. Stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override one config key, e.g. `--set N=10..25`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Event and signal-level simulation over the configured sweep.
    Simulate,
    /// Closed forms and complexity only.
    Analytic,
    /// Oracle agreement run; exits 2 on any mismatch.
    Selfcheck,
    /// Sweep grid of one figure (4 to 8).
    Figure { number: u8 },
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match cli.command {
        Command::Simulate => ExperimentConfig::default(),
        Command::Analytic => ExperimentConfig {
            mode: Mode::Analytic,
            ..ExperimentConfig::default()
        },
        Command::Selfcheck => selfcheck_preset(),
        Command::Figure { number } => figure_preset(number)?,
    };
    let mode = cfg.mode;
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.clone(),
            source,
        })?;
        cfg.apply_lines(&text)?;
    }
    cfg.set_all(cli.overrides.iter().map(String::as_str))?;
    // The subcommand decides the mode.
    cfg.mode = mode;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, HarnessError> {
    let cfg = build_config(cli)?;
    let (output, failures) = if cfg.mode == Mode::Selfcheck {
        let report = selfcheck(&cfg)?;
        (report.output, Some(report.failures))
    } else {
        (run_experiment(&cfg)?, None)
    };

    match &cfg.out {
        Some(path) => {
            emit_csv(&output.rows, path)?;
            emit_skips(&output.skips, &skip_log_path(path))?;
        }
        None => {
            let stdout = PathBuf::from("<stdout>");
            write_csv(&output.rows, io::stdout().lock()).map_err(|source| HarnessError::Io {
                path: stdout.clone(),
                source,
            })?;
            write_skips(&output.skips, io::stderr().lock()).map_err(|source| HarnessError::Io { path: stdout, source })?;
        }
    }
    if !output.skips.is_empty() {
        eprintln!("{} (scheme, point) pairs skipped", output.skips.len());
    }

    match failures {
        Some(f) if !f.is_empty() => {
            for line in &f {
                eprintln!("selfcheck FAIL: {line}");
            }
            Ok(false)
        }
        Some(_) => {
            eprintln!("selfcheck passed ({} rows)", output.rows.len());
            Ok(true)
        }
        None => Ok(true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
