//! Line-oriented `key = value` experiment files.

use std::path::PathBuf;
use std::str::FromStr;

use crate::schemes::Scheme;

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Analytic,
    Selfcheck,
    Figure(u8),
}

impl FromStr for Mode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase();
        match key.as_str() {
            "simulate" => Ok(Mode::Simulate),
            "analytic" => Ok(Mode::Analytic),
            "selfcheck" => Ok(Mode::Selfcheck),
            _ => {
                let fig = key.strip_prefix("figure").map(str::trim).unwrap_or("");
                match fig.parse::<u8>() {
                    Ok(n) if (4..=8).contains(&n) => Ok(Mode::Figure(n)),
                    _ => Err(HarnessError::Config(format!("unknown mode `{s}`"))),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub schemes: Vec<Scheme>,
    pub k: usize,
    pub m: usize,
    pub n_values: Vec<usize>,
    /// Relay antennas; `None` sizes the relay for every scheme.
    pub q: Option<usize>,
    /// `(A, B)` sweep points.
    pub data: Vec<(usize, usize)>,
    pub trials: usize,
    pub seed: u64,
    pub signal_level: bool,
    pub pad_partial_periods: bool,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_TRIALS: usize = 100;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Simulate,
            schemes: Scheme::ALL.to_vec(),
            k: 2,
            m: 6,
            n_values: vec![2],
            q: None,
            data: vec![(600, 600)],
            trials: DEFAULT_TRIALS,
            seed: 42,
            signal_level: true,
            pad_partial_periods: false,
            out: None,
        }
    }
}

impl ExperimentConfig {
    /// Parses a config file body on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        cfg.apply_lines(text)?;
        Ok(cfg)
    }

    pub fn apply_lines(&mut self, text: &str) -> Result<(), HarnessError> {
        let mut pending = DataKeys::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            self.set_inner(key.trim(), value.trim(), &mut pending)
                .map_err(|e| HarnessError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        pending.apply(self)
    }

    /// Applies a single `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), HarnessError> {
        self.set_all([assignment])
    }

    /// Applies overrides as one block, so `num` and `a_step` combine.
    pub fn set_all<'a>(&mut self, assignments: impl IntoIterator<Item = &'a str>) -> Result<(), HarnessError> {
        let mut pending = DataKeys::default();
        for assignment in assignments {
            let (key, value) = assignment
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("override `{assignment}` is not `key=value`")))?;
            self.set_inner(key.trim(), value.trim(), &mut pending)
                .map_err(HarnessError::Config)?;
        }
        pending.apply(self)
    }

    fn set_inner(&mut self, key: &str, value: &str, data: &mut DataKeys) -> Result<(), String> {
        match key.to_ascii_lowercase().as_str() {
            "mode" => self.mode = value.parse().map_err(|e: HarnessError| e.to_string())?,
            "schemes" | "scheme" => {
                self.schemes = list(value)
                    .map(|s| s.parse::<Scheme>().map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?;
            }
            "k" => self.k = number(key, value)?,
            "m" => self.m = number(key, value)?,
            "n" => self.n_values = usize_list(key, value)?,
            "q" => {
                self.q = match value {
                    "auto" | "" => None,
                    v => Some(number(key, v)?),
                }
            }
            "a" => data.a = Some(usize_list(key, value)?),
            "b" => data.b = Some(usize_list(key, value)?),
            "num" => data.num = Some(number(key, value)?),
            "a_step" => data.a_step = Some(number(key, value)?),
            "trials" => self.trials = number(key, value)?,
            "seed" => self.seed = number(key, value)?,
            "signal" | "signal_level" => self.signal_level = boolean(key, value)?,
            "pad" | "pad_partial_periods" => self.pad_partial_periods = boolean(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.n_values.is_empty() {
            return Err(HarnessError::Config("N range is empty".into()));
        }
        if self.schemes.is_empty() {
            return Err(HarnessError::Config("no schemes selected".into()));
        }
        if self.data.is_empty() {
            return Err(HarnessError::Config("no (A, B) points".into()));
        }
        if let Some(&(a, b)) = self.data.iter().find(|(a, b)| a + b == 0) {
            return Err(HarnessError::Config(format!("data point A = {a}, B = {b} is empty")));
        }
        Ok(())
    }
}

/// Data-set keys resolved together once a whole file or override is read.
#[derive(Default)]
struct DataKeys {
    a: Option<Vec<usize>>,
    b: Option<Vec<usize>>,
    num: Option<usize>,
    a_step: Option<usize>,
}

impl DataKeys {
    fn apply(self, cfg: &mut ExperimentConfig) -> Result<(), HarnessError> {
        if let Some(num) = self.num {
            let step = self.a_step.unwrap_or(1).max(1);
            cfg.data = (0..=num).step_by(step).map(|a| (a, num - a)).collect();
            return Ok(());
        }
        let current_a: Vec<usize> = cfg.data.iter().map(|p| p.0).collect();
        let current_b: Vec<usize> = cfg.data.iter().map(|p| p.1).collect();
        if self.a.is_none() && self.b.is_none() {
            return Ok(());
        }
        let a = self.a.unwrap_or(current_a);
        let b = self.b.unwrap_or(current_b);
        cfg.data = match (a.len(), b.len()) {
            (la, lb) if la == lb => a.into_iter().zip(b).collect(),
            (1, _) => b.into_iter().map(|b| (a[0], b)).collect(),
            (_, 1) => a.into_iter().map(|a| (a, b[0])).collect(),
            (la, lb) => {
                return Err(HarnessError::Config(format!("A has {la} values but B has {lb}")));
            }
        };
        Ok(())
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn number<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("`{key}` expects a non-negative integer, got `{value}`"))
}

fn boolean(key: &str, value: &str) -> Result<bool, String> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("`{key}` expects true or false, got `{value}`")),
    }
}

/// Comma list whose items may be inclusive ranges `lo..hi`.
fn usize_list(key: &str, value: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in list(value) {
        if let Some((lo, hi)) = item.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let (lo, hi): (usize, usize) = (number(key, lo)?, number(key, hi)?);
            if lo > hi {
                return Err(format!("`{key}` range {item} is empty"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(number(key, item)?);
        }
    }
    Ok(out)
}
