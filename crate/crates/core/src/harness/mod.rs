//! Experiment harness: sweeps over network configurations and data sets,
//! Monte-Carlo trials, figure presets and the self-check run.

mod config;
mod output;

use std::fmt;
use std::path::PathBuf;

use rayon::prelude::*;
use thiserror::Error;

use crate::metrics::{closed_form_dod, closed_form_dof, complexity, event_dod, DsfTable};
use crate::model::{DataSetSpec, NetworkConfig};
use crate::numerics::RngStream;
use crate::schemes::{simulate, Scheme, SchemeError, SchemeTrace, SimOptions};

pub use config::{ExperimentConfig, Mode, DEFAULT_TRIALS};
pub use output::{emit_csv, emit_skips, format_real, skip_log_path, write_csv, write_skips, CSV_HEADER};

/// Absolute tolerance of the self-check comparisons.
pub const SELFCHECK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// One CSV row; `None` fields are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub dod_event: Option<f64>,
    pub dod_closed: Option<f64>,
    pub dof_empirical: Option<f64>,
    pub dof_closed: Option<f64>,
    pub relay_cost: Option<f64>,
    pub user_cost: Option<f64>,
    pub max_recovery_error: Option<f64>,
    pub resamples: Option<u64>,
    pub slots_used: Option<usize>,
}

impl SweepRow {
    fn empty(scheme: Scheme, k: usize, m: usize, n: usize, a: usize, b: usize) -> Self {
        Self {
            scheme,
            k,
            m,
            n,
            a,
            b,
            dod_event: None,
            dod_closed: None,
            dof_empirical: None,
            dof_closed: None,
            relay_cost: None,
            user_cost: None,
            max_recovery_error: None,
            resamples: None,
            slots_used: None,
        }
    }
}

/// A `(scheme, point)` whose simulation could not run.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipRecord {
    pub scheme: Scheme,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub reason: String,
}

impl fmt::Display for SkipRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {},{},{},{},{} SKIPPED: {}",
            self.scheme, self.k, self.m, self.n, self.a, self.b, self.reason
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentOutput {
    pub rows: Vec<SweepRow>,
    pub skips: Vec<SkipRecord>,
}

/// Sweep grid of a figure mode.
pub fn figure_preset(figure: u8) -> Result<ExperimentConfig, HarnessError> {
    let base = ExperimentConfig {
        mode: Mode::Figure(figure),
        signal_level: false,
        pad_partial_periods: true,
        trials: 1,
        ..ExperimentConfig::default()
    };
    let cfg = match figure {
        4 => ExperimentConfig {
            schemes: Scheme::BASELINES.to_vec(),
            k: 2,
            m: 4,
            n_values: vec![3],
            data: (0..=2400).step_by(24).map(|a| (a, 2400 - a)).collect(),
            ..base
        },
        5 => ExperimentConfig {
            schemes: Scheme::BASELINES.to_vec(),
            k: 2,
            m: 4,
            n_values: vec![3],
            data: (24..=1200).step_by(24).map(|a| (a, a)).collect(),
            ..base
        },
        6..=8 => ExperimentConfig {
            schemes: Scheme::ALL.to_vec(),
            k: 3,
            m: 60,
            n_values: (10..=25).collect(),
            data: vec![(1400, 1400)],
            ..base
        },
        _ => return Err(HarnessError::Config(format!("no figure {figure}; choose 4 to 8"))),
    };
    Ok(cfg)
}

/// Base configuration of the self-check: `(2,6,2)`, `A = B = 600`, seed 42.
pub fn selfcheck_preset() -> ExperimentConfig {
    ExperimentConfig {
        mode: Mode::Selfcheck,
        ..ExperimentConfig::default()
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    cfg.validate()?;
    let analytic_only = matches!(cfg.mode, Mode::Analytic | Mode::Figure(8));
    let points: Vec<(usize, usize, (usize, usize))> = cfg
        .n_values
        .iter()
        .flat_map(|&n| cfg.data.iter().map(move |&d| (n, d)))
        .enumerate()
        .map(|(i, (n, d))| (i, n, d))
        .collect();
    for &n in &cfg.n_values {
        network_for(cfg, n).map_err(|e| HarnessError::Config(format!("N = {n}: {e}")))?;
    }
    let jobs: Vec<(usize, usize, (usize, usize), Scheme)> = points
        .iter()
        .flat_map(|&(i, n, d)| cfg.schemes.iter().map(move |&s| (i, n, d, s)))
        .collect();

    let results: Vec<(SweepRow, Option<SkipRecord>)> = jobs
        .par_iter()
        .map(|&(point, n, (a, b), scheme)| evaluate(cfg, point, n, a, b, scheme, analytic_only))
        .collect();

    let mut out = ExperimentOutput::default();
    for (row, skip) in results {
        out.rows.push(row);
        out.skips.extend(skip);
    }
    Ok(out)
}

fn network_for(cfg: &ExperimentConfig, n: usize) -> Result<NetworkConfig, crate::model::ModelError> {
    match cfg.q {
        Some(q) => NetworkConfig::new(cfg.k, cfg.m, n, q),
        None => NetworkConfig::with_ample_relay(cfg.k, cfg.m, n),
    }
}

fn evaluate(
    cfg: &ExperimentConfig,
    point: usize,
    n: usize,
    a: usize,
    b: usize,
    scheme: Scheme,
    analytic_only: bool,
) -> (SweepRow, Option<SkipRecord>) {
    let (k, m) = (cfg.k, cfg.m);
    let mut row = SweepRow::empty(scheme, k, m, n, a, b);
    let skip = |reason: String| SkipRecord {
        scheme,
        k,
        m,
        n,
        a,
        b,
        reason: reason.strip_prefix(&format!("{scheme}: ")).unwrap_or(&reason).to_string(),
    };
    let network = network_for(cfg, n).expect("networks are validated before the sweep");
    let dataset = DataSetSpec { a, b };

    row.dod_closed = Some(closed_form_dod(scheme, &network, &dataset).value);
    row.dof_closed = Some(closed_form_dof(scheme, &network));
    if let Some(c) = complexity(scheme, &network) {
        row.relay_cost = c.relay_cost;
        row.user_cost = Some(c.user_cost);
    }
    if analytic_only {
        return (row, None);
    }

    let options = SimOptions {
        signal_level: cfg.signal_level,
        pad_partial_periods: cfg.pad_partial_periods,
        csit_fault: None,
        keep_slot_log: false,
    };
    match run_trials(scheme, &network, &dataset, cfg, point, &options) {
        Ok(summary) => {
            row.dod_event = summary.dod_event;
            row.dof_empirical = Some(summary.dof);
            row.max_recovery_error = summary.max_recovery_error;
            row.resamples = Some(summary.resamples);
            row.slots_used = Some(summary.slots_used);
            (row, None)
        }
        Err(e) => (row, Some(skip(e.to_string()))),
    }
}

struct TrialSummary {
    dod_event: Option<f64>,
    dof: f64,
    slots_used: usize,
    max_recovery_error: Option<f64>,
    resamples: u64,
}

/// Runs the Monte-Carlo trials of one point. Event quantities do not depend
/// on the channel draw, so they come from the first trial; recovery error is
/// the worst over trials and resamples are summed.
fn run_trials(
    scheme: Scheme,
    network: &NetworkConfig,
    dataset: &DataSetSpec,
    cfg: &ExperimentConfig,
    point: usize,
    options: &SimOptions,
) -> Result<TrialSummary, SchemeError> {
    let signal = options.signal_level && scheme != Scheme::Ria;
    let trials = if signal { cfg.trials } else { 1 };
    let traces: Vec<SchemeTrace> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::new(cfg.seed, ((point as u64) << 32) | t as u64);
            simulate(scheme, network, dataset, &mut rng, options)
        })
        .collect::<Result<_, _>>()?;
    let first = &traces[0];
    let dod_event = event_dod(&first.events, &DsfTable::default()).ok().map(|r| r.dod);
    let max_recovery_error = traces
        .iter()
        .filter_map(|t| t.max_recovery_error)
        .reduce(f64::max);
    Ok(TrialSummary {
        dod_event,
        dof: first.empirical_dof(),
        slots_used: first.slots_used,
        max_recovery_error,
        resamples: traces.iter().map(|t| t.resamples).sum(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfcheckReport {
    pub output: ExperimentOutput,
    pub failures: Vec<String>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs every scheme on `cfg` and checks the event/closed-form agreement,
/// exact recovery and the empirical throughput.
pub fn selfcheck(cfg: &ExperimentConfig) -> Result<SelfcheckReport, HarnessError> {
    let output = run_experiment(&ExperimentConfig {
        mode: Mode::Selfcheck,
        ..cfg.clone()
    })?;
    let mut failures = Vec::new();
    for skip in &output.skips {
        failures.push(skip.to_string());
    }
    for row in &output.rows {
        let label = format!("{} ({},{},{}) A={} B={}", row.scheme, row.k, row.m, row.n, row.a, row.b);
        // Only where the formula's own divisibility assumptions hold.
        let formula_applies = row.scheme != Scheme::HaaCieRir
            && network_for(cfg, row.n)
                .map(|net| closed_form_dod(row.scheme, &net, &DataSetSpec { a: row.a, b: row.b }).divisible)
                .unwrap_or(false);
        if formula_applies {
            if let (Some(e), Some(c)) = (row.dod_event, row.dod_closed) {
                if (e - c).abs() >= SELFCHECK_TOLERANCE {
                    failures.push(format!("{label}: event DoD {e} vs closed form {c}"));
                }
            }
        }
        if let Some(err) = row.max_recovery_error {
            if err >= SELFCHECK_TOLERANCE {
                failures.push(format!("{label}: recovery error {err:e}"));
            }
        }
        if let (Some(e), Some(c)) = (row.dof_empirical, row.dof_closed) {
            if (e - c).abs() >= SELFCHECK_TOLERANCE {
                failures.push(format!("{label}: empirical DoF {e} vs closed form {c}"));
            }
        }
    }
    Ok(SelfcheckReport { output, failures })
}
