//! Delay and throughput metrics: DSF weights, event-driven DoD, the
//! closed-form DoD/DoF expressions and the per-node multiplication counts.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{ceil_div, DataSetSpec, NetworkConfig};
use crate::schemes::{ria_operating_point, DecodeEvent, Scheme};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no decode events to average over")]
    EmptyEventList,
    #[error("priority {priority} outside 1..={levels}")]
    PriorityOutOfRange { priority: u8, levels: u8 },
}

/// Delay-sensitive factor per priority: `dsf(p) = (P - p + 1) / P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DsfTable {
    pub levels: u8,
}

impl Default for DsfTable {
    fn default() -> Self {
        Self { levels: 5 }
    }
}

impl DsfTable {
    pub fn new(levels: u8) -> Self {
        assert!(levels >= 1);
        Self { levels }
    }

    /// Integer numerator `P - p + 1` of the weight.
    fn numerator(&self, p: u8) -> Result<u64, MetricsError> {
        if p == 0 || p > self.levels {
            return Err(MetricsError::PriorityOutOfRange {
                priority: p,
                levels: self.levels,
            });
        }
        Ok(u64::from(self.levels - p + 1))
    }

    pub fn dsf(&self, p: u8) -> f64 {
        let num = self.numerator(p).expect("priority in range");
        num as f64 / f64::from(self.levels)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DodReport {
    pub dod: f64,
    /// Total weighted delay in coherence slots.
    pub d_sum: f64,
    pub num: usize,
    /// Weighted delay summed per priority.
    pub per_priority: BTreeMap<u8, f64>,
}

/// Priority-weighted average wait. A symbol decoded in slot `t` waited
/// `t - 1` slots.
pub fn event_dod(events: &[DecodeEvent], table: &DsfTable) -> Result<DodReport, MetricsError> {
    if events.is_empty() {
        return Err(MetricsError::EmptyEventList);
    }
    // Integer sums keep the result exact until the final division.
    let mut waits: BTreeMap<u8, u64> = BTreeMap::new();
    for e in events {
        table.numerator(e.priority)?;
        *waits.entry(e.priority).or_default() += (e.decode_slot - 1) as u64;
    }
    let p = f64::from(table.levels);
    let mut weighted: u128 = 0;
    let mut per_priority = BTreeMap::new();
    for (&prio, &w) in &waits {
        let num = table.numerator(prio)?;
        weighted += u128::from(num) * u128::from(w);
        per_priority.insert(prio, (num * w) as f64 / p);
    }
    let d_sum = weighted as f64 / p;
    Ok(DodReport {
        dod: weighted as f64 / (p * events.len() as f64),
        d_sum,
        num: events.len(),
        per_priority,
    })
}

/// Closed-form DoD. `divisible` is false when the data set does not fill
/// whole periods; the value is evaluated regardless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormDod {
    pub value: f64,
    pub divisible: bool,
}

/// Shared shape of the single-phase expressions with `s` symbols per slot.
fn tdma_like(a: f64, b: f64, s: f64) -> f64 {
    let num = a + b;
    4.0 * a * a / (10.0 * num * s) + num / (10.0 * s) - (5.0 * a + b) / (10.0 * num)
}

fn ria_phi(config: &NetworkConfig) -> (f64, f64) {
    let (k, m) = ria_operating_point(config);
    let n = config.n;
    ((k * (n / (m - n))) as f64, k as f64)
}

/// `(phi, applies)` for the two-phase branch of the circular scheme.
fn cie_phi(config: &NetworkConfig) -> (f64, bool) {
    let (k, m, n) = (config.k, config.m, config.n);
    if ceil_div(m, 2) <= n {
        (0.0, false)
    } else {
        ((k * (n / (m - 2 * n))) as f64, true)
    }
}

pub fn closed_form_dod(scheme: Scheme, config: &NetworkConfig, dataset: &DataSetSpec) -> ClosedFormDod {
    let (a, b) = (dataset.a as f64, dataset.b as f64);
    let (k, m, n) = (config.k as f64, config.m as f64, config.n as f64);
    let value = match scheme {
        Scheme::Tdma => tdma_like(a, b, n),
        Scheme::BdTdma => tdma_like(a, b, m),
        Scheme::Ria => {
            let (phi, k) = ria_phi(config);
            let num = a + b;
            (phi + 1.0) * num / (10.0 * (phi + k) * n)
                + 4.0 * (phi + 1.0) * a * a / (10.0 * (phi + k) * n * num)
                + (phi - 1.0) * (5.0 * a + b) / (10.0 * num)
        }
        Scheme::HaaPieRir => tdma_like(a, b, (2.0 * n).min(m)),
        Scheme::HaaIpieRir => tdma_like(a, b, (k * n).min(m)),
        Scheme::HaaCieRir => match cie_phi(config) {
            (phi, true) => {
                let s = 2.0 * n * phi + k * n;
                let num = a + b;
                4.0 * (phi + 1.0) * a * a / (10.0 * s * num) + (phi + 1.0) * num / (10.0 * s)
                    - (5.0 * a + b) * (phi + 1.0) / (10.0 * num)
            }
            (_, false) => tdma_like(a, b, m),
        },
    };
    ClosedFormDod {
        value,
        divisible: formula_assumptions_hold(scheme, config, dataset),
    }
}

/// The closed forms assume each priority class fills whole periods of the
/// nominal size.
fn formula_assumptions_hold(scheme: Scheme, config: &NetworkConfig, dataset: &DataSetSpec) -> bool {
    if crate::schemes::check_divisibility(scheme, config, dataset).is_err() {
        return false;
    }
    if !scheme.uses_relay() {
        return true;
    }
    match crate::schemes::schedule(scheme, config) {
        Ok(p) => {
            let s = p.symbols_per_period;
            p.is_exact() && dataset.a.is_multiple_of(s) && dataset.b.is_multiple_of(s)
        }
        Err(_) => false,
    }
}

/// Closed-form symbols per slot.
pub fn closed_form_dof(scheme: Scheme, config: &NetworkConfig) -> f64 {
    let (k, m, n) = (config.k as f64, config.m as f64, config.n as f64);
    match scheme {
        Scheme::Tdma => n,
        Scheme::BdTdma => m,
        Scheme::Ria => {
            let (phi, k) = ria_phi(config);
            (phi + k) * n / (phi + 1.0)
        }
        Scheme::HaaPieRir => (2.0 * n).min(m),
        Scheme::HaaIpieRir => (k * n).min(m),
        Scheme::HaaCieRir => match cie_phi(config) {
            (phi, true) => (2.0 * n * phi + k * n) / (phi + 1.0),
            (_, false) => m,
        },
    }
}

/// Peak multiplication count per unit time at the relay and at a user.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityReport {
    /// `None` when the scheme has no relay.
    pub relay_cost: Option<f64>,
    pub user_cost: f64,
    pub condition_branch: &'static str,
}

/// Table of multiplication counts; the TDMA baselines are not covered.
pub fn complexity(scheme: Scheme, config: &NetworkConfig) -> Option<ComplexityReport> {
    let (k, m, n) = (config.k, config.m, config.n);
    let (kf, mf, nf) = (k as f64, m as f64, n as f64);
    let half_floor = (m / 2) as f64;
    let n5 = nf.powi(5);
    let report = match scheme {
        Scheme::Tdma | Scheme::BdTdma => return None,
        Scheme::Ria => {
            if m <= 2 * n {
                let f = (n / (m - n)) as f64;
                ComplexityReport {
                    relay_cost: None,
                    user_cost: f.powi(3) * mf.powi(3),
                    condition_branch: "M <= 2N",
                }
            } else {
                ComplexityReport {
                    relay_cost: None,
                    user_cost: mf.powi(3),
                    condition_branch: "M > 2N",
                }
            }
        }
        Scheme::HaaPieRir | Scheme::HaaCieRir => {
            let extra = if scheme == Scheme::HaaPieRir { 2.0 } else { kf };
            let half = ceil_div(m, 2);
            if half <= n {
                ComplexityReport {
                    relay_cost: Some(2.0 * half_floor * n5),
                    user_cost: (half as f64).powi(3),
                    condition_branch: "ceil(M/2) <= N",
                }
            } else {
                ComplexityReport {
                    relay_cost: Some((2.0 * half_floor + extra) * n5),
                    user_cost: nf.powi(3),
                    condition_branch: "ceil(M/2) > N",
                }
            }
        }
        Scheme::HaaIpieRir => {
            let d = ceil_div(m, k);
            let base = (kf * nf).powi(6) * mf * mf;
            if d <= n {
                ComplexityReport {
                    relay_cost: Some(base),
                    user_cost: (d as f64).powi(3),
                    condition_branch: "ceil(M/K) <= N",
                }
            } else {
                ComplexityReport {
                    relay_cost: Some(base + kf * n5),
                    user_cost: nf.powi(3),
                    condition_branch: "ceil(M/K) > N",
                }
            }
        }
    };
    Some(report)
}
