//! CSV rows and the skip sidecar.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::{HarnessError, SkipRecord, SweepRow};

pub const CSV_HEADER: [&str; 15] = [
    "scheme",
    "K",
    "M",
    "N",
    "A",
    "B",
    "dod_event",
    "dod_closed",
    "dof_empirical",
    "dof_closed",
    "relay_cost",
    "user_cost",
    "max_recovery_error",
    "resamples",
    "slots_used",
];

/// At most 12 significant digits, shortest form.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("scientific notation parses");
    if rounded.abs() < 1e-4 || rounded.abs() >= 1e15 {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

fn opt_real(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

fn opt_count<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl SweepRow {
    pub fn fields(&self) -> [String; 15] {
        [
            self.scheme.name().to_string(),
            self.k.to_string(),
            self.m.to_string(),
            self.n.to_string(),
            self.a.to_string(),
            self.b.to_string(),
            opt_real(self.dod_event),
            opt_real(self.dod_closed),
            opt_real(self.dof_empirical),
            opt_real(self.dof_closed),
            opt_real(self.relay_cost),
            opt_real(self.user_cost),
            opt_real(self.max_recovery_error),
            opt_count(self.resamples),
            opt_count(self.slots_used),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], sink: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<(), HarnessError> {
    let io_err = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_csv(rows, file).map_err(io_err)
}

/// `<out>.skips.log` next to the CSV.
pub fn skip_log_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".skips.log");
    PathBuf::from(name)
}

pub fn write_skips<W: Write>(skips: &[SkipRecord], mut sink: W) -> io::Result<()> {
    for s in skips {
        writeln!(sink, "{s}")?;
    }
    Ok(())
}

pub fn emit_skips(skips: &[SkipRecord], path: &Path) -> Result<(), HarnessError> {
    let io_err = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_skips(skips, file).map_err(io_err)
}
