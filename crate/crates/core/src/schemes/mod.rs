//! Transmission scheme engines.
//!
//! Every engine walks the same symbol queue (priority-1 symbols first) through
//! its period structure and records when each symbol becomes decodable. The
//! relay schemes and the two TDMA baselines can also run at signal level: the
//! channels are drawn, the relay precoders built, and every user actually
//! solves for its symbols, so the trace carries recovery errors alongside the
//! decode events. RIA is simulated at event level only.

mod direct;
mod engine;
pub mod relay;
mod schedule;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{DataSetSpec, ModelError, NetworkConfig, Symbol};
use crate::numerics::{NumericsError, RngStream};

pub use schedule::{ria_operating_point, schedule, ScheduleParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Tdma,
    BdTdma,
    Ria,
    HaaPieRir,
    HaaIpieRir,
    HaaCieRir,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::Tdma,
        Scheme::BdTdma,
        Scheme::Ria,
        Scheme::HaaPieRir,
        Scheme::HaaIpieRir,
        Scheme::HaaCieRir,
    ];

    pub const BASELINES: [Scheme; 3] = [Scheme::Tdma, Scheme::BdTdma, Scheme::Ria];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Tdma => "TDMA",
            Scheme::BdTdma => "BD-TDMA",
            Scheme::Ria => "RIA",
            Scheme::HaaPieRir => "HAA-PIE-RIR",
            Scheme::HaaIpieRir => "HAA-IPIE-RIR",
            Scheme::HaaCieRir => "HAA-CIE-RIR",
        }
    }

    pub fn uses_relay(&self) -> bool {
        matches!(self, Scheme::HaaPieRir | Scheme::HaaIpieRir | Scheme::HaaCieRir)
    }

    /// Relay antennas the scheme needs: receive `M`, plus omni and directional
    /// transmit antennas.
    pub fn required_relay_antennas(&self, config: &NetworkConfig) -> Option<usize> {
        let (k, m, n) = (config.k, config.m, config.n);
        match self {
            Scheme::HaaPieRir => Some(NetworkConfig::min_relay_antennas(m, n)),
            Scheme::HaaIpieRir => Some(m.max(2 * k * n)),
            Scheme::HaaCieRir => Some(m.max(n + k * n)),
            _ => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = SchemeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let scheme = match key.as_str() {
            "tdma" => Scheme::Tdma,
            "bd-tdma" | "bdtdma" => Scheme::BdTdma,
            "ria" => Scheme::Ria,
            "haa-pie-rir" | "pie" => Scheme::HaaPieRir,
            "haa-ipie-rir" | "ipie" => Scheme::HaaIpieRir,
            "haa-cie-rir" | "cie" => Scheme::HaaCieRir,
            _ => return Err(SchemeError::UnknownScheme(s.to_string())),
        };
        Ok(scheme)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("{scheme}: data set A = {a}, B = {b} violates divisibility by {unit} ({rule})")]
    DivisibilityViolation {
        scheme: Scheme,
        a: usize,
        b: usize,
        unit: usize,
        rule: &'static str,
    },
    #[error("{scheme}: {reason}")]
    Unsupported { scheme: Scheme, reason: String },
    #[error("{scheme}: relay has Q = {available} antennas, needs {required}")]
    RelayTooSmall {
        scheme: Scheme,
        required: usize,
        available: usize,
    },
    #[error("{scheme}: {detail}")]
    CapacityExceeded { scheme: Scheme, detail: String },
    #[error("slot {slot}: channel still ill-conditioned after {limit} consecutive resamples")]
    ResampleLimitExceeded { slot: usize, limit: u32 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// When a symbol became decodable at its user. `decode_slot` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeEvent {
    pub symbol_id: usize,
    pub priority: u8,
    pub decode_slot: usize,
    pub user: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotPhase {
    /// Fresh symbols leave the base station.
    Transmission,
    /// Retrospective slot: the relay (or the RIA alignment step) completes
    /// earlier symbols and nothing new is sent.
    Retrospective,
}

/// Transmitted and recovered value of one symbol at its intended user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recovery {
    pub symbol_id: usize,
    pub user: usize,
    pub transmitted: Complex64,
    pub recovered: Complex64,
}

impl Recovery {
    pub fn relative_error(&self) -> f64 {
        (self.recovered - self.transmitted).norm() / self.transmitted.norm().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotRecord {
    pub slot: usize,
    pub phase: SlotPhase,
    /// Base-station symbol vector, or the relay's retrospective payloads.
    pub transmitted: Vec<Complex64>,
    /// Final received vector of every served user, `(user, y)`.
    pub received: Vec<(usize, Vec<Complex64>)>,
    /// Norm of whatever is left in a served user's signal besides its own
    /// cluster's contribution through the equivalent channel.
    pub interference_residual: f64,
}

/// Stale CSIT injected on purpose, for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsitFault {
    /// The relay precodes with the previous slot's channels instead of the
    /// current ones.
    StaleRelayCsi,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Draw channels and solve for symbols; otherwise only the schedule runs.
    pub signal_level: bool,
    /// Fill an incomplete final period with dummy symbols instead of failing
    /// the divisibility precondition.
    pub pad_partial_periods: bool,
    pub csit_fault: Option<CsitFault>,
    /// Keep per-slot transmit/receive vectors in the trace.
    pub keep_slot_log: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            signal_level: true,
            pad_partial_periods: false,
            csit_fault: None,
            keep_slot_log: true,
        }
    }
}

impl SimOptions {
    pub fn event_only() -> Self {
        Self {
            signal_level: false,
            ..Self::default()
        }
    }
}

/// Full record of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeTrace {
    pub scheme: Scheme,
    pub schedule: ScheduleParams,
    pub slots_used: usize,
    pub events: Vec<DecodeEvent>,
    /// Real (non-dummy) symbols with their transmit and decode slots.
    pub symbols: Vec<Symbol>,
    pub recoveries: Vec<Recovery>,
    pub slot_log: Vec<SlotRecord>,
    /// `None` for event-level runs.
    pub max_recovery_error: Option<f64>,
    pub max_interference_residual: Option<f64>,
    pub resamples: u64,
    pub signal_level: bool,
    pub dummy_symbols: usize,
}

impl SchemeTrace {
    /// Decoded symbols per slot.
    pub fn empirical_dof(&self) -> f64 {
        self.events.len() as f64 / self.slots_used as f64
    }

    /// Number of decode events in each slot, indexed by slot - 1.
    pub fn decodes_per_slot(&self) -> Vec<usize> {
        let mut counts = vec![0; self.slots_used];
        for e in &self.events {
            counts[e.decode_slot - 1] += 1;
        }
        counts
    }
}

/// Largest relative recovery error `|recovered - sent| / max(1, |sent|)`
/// over every decoded symbol; zero when nothing was recovered.
pub fn verify_recovery(trace: &SchemeTrace) -> f64 {
    trace
        .recoveries
        .iter()
        .map(Recovery::relative_error)
        .fold(0.0, f64::max)
}

/// Fails when the data set does not fill whole periods of `scheme`, or the
/// scheme has no period structure at this configuration.
pub fn check_divisibility(scheme: Scheme, config: &NetworkConfig, dataset: &DataSetSpec) -> Result<(), SchemeError> {
    let params = schedule(scheme, config)?;
    engine::divisibility(scheme, config, &params, dataset)
}

pub fn simulate(
    scheme: Scheme,
    config: &NetworkConfig,
    dataset: &DataSetSpec,
    rng: &mut RngStream,
    options: &SimOptions,
) -> Result<SchemeTrace, SchemeError> {
    engine::run(scheme, config, dataset, rng, options)
}

pub fn simulate_tdma(config: &NetworkConfig, dataset: &DataSetSpec, rng: &mut RngStream) -> Result<SchemeTrace, SchemeError> {
    simulate(Scheme::Tdma, config, dataset, rng, &SimOptions::default())
}

pub fn simulate_bd_tdma(config: &NetworkConfig, dataset: &DataSetSpec, rng: &mut RngStream) -> Result<SchemeTrace, SchemeError> {
    simulate(Scheme::BdTdma, config, dataset, rng, &SimOptions::default())
}

pub fn simulate_ria(config: &NetworkConfig, dataset: &DataSetSpec, rng: &mut RngStream) -> Result<SchemeTrace, SchemeError> {
    simulate(Scheme::Ria, config, dataset, rng, &SimOptions::default())
}

pub fn simulate_haa_pie_rir(config: &NetworkConfig, dataset: &DataSetSpec, rng: &mut RngStream) -> Result<SchemeTrace, SchemeError> {
    simulate(Scheme::HaaPieRir, config, dataset, rng, &SimOptions::default())
}

pub fn simulate_haa_ipie_rir(config: &NetworkConfig, dataset: &DataSetSpec, rng: &mut RngStream) -> Result<SchemeTrace, SchemeError> {
    simulate(Scheme::HaaIpieRir, config, dataset, rng, &SimOptions::default())
}

pub fn simulate_haa_cie_rir(config: &NetworkConfig, dataset: &DataSetSpec, rng: &mut RngStream) -> Result<SchemeTrace, SchemeError> {
    simulate(Scheme::HaaCieRir, config, dataset, rng, &SimOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, m: usize, n: usize) -> NetworkConfig {
        NetworkConfig::with_ample_relay(k, m, n).unwrap()
    }

    fn data(a: usize, b: usize) -> DataSetSpec {
        DataSetSpec::new(a, b).unwrap()
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!("ipie".parse::<Scheme>().unwrap(), Scheme::HaaIpieRir);
        assert!("zf".parse::<Scheme>().is_err());
    }

    #[test]
    fn slot_counts_follow_period_structure() {
        let c = cfg(2, 4, 3);
        let d = data(24, 24);
        let ev = SimOptions::event_only();
        let run = |s| simulate(s, &c, &d, &mut RngStream::new(1, 0), &ev).unwrap().slots_used;
        assert_eq!(run(Scheme::Tdma), 16);
        assert_eq!(run(Scheme::BdTdma), 12);
        // 7-slot periods of 24 symbols
        assert_eq!(run(Scheme::Ria), 14);
        assert_eq!(run(Scheme::HaaPieRir), 12);
    }

    #[test]
    fn ria_decodes_whole_period_in_last_slot() {
        let t = simulate(Scheme::Ria, &cfg(2, 4, 3), &data(24, 0), &mut RngStream::new(0, 0), &SimOptions::default())
            .unwrap();
        assert!(!t.signal_level);
        assert_eq!(t.decodes_per_slot(), vec![0, 0, 0, 0, 0, 0, 24]);
        assert!(t.max_recovery_error.is_none());
    }

    #[test]
    fn relay_schemes_recover_exactly() {
        let cases = [
            (Scheme::HaaPieRir, cfg(2, 6, 2), 24),
            (Scheme::HaaIpieRir, cfg(3, 9, 2), 54),
            (Scheme::HaaCieRir, cfg(3, 5, 2), 60),
        ];
        for (scheme, c, num) in cases {
            let t = simulate(scheme, &c, &data(num / 2, num / 2), &mut RngStream::new(3, 0), &SimOptions::default())
                .unwrap();
            assert_eq!(t.events.len(), num);
            assert!(t.max_recovery_error.unwrap() < 1e-9, "{scheme}: {:?}", t.max_recovery_error);
            assert!(t.max_interference_residual.unwrap() < 1e-9);
            assert_eq!(t.empirical_dof(), t.schedule.dof());
        }
    }

    #[test]
    fn stale_relay_csi_breaks_recovery() {
        let opts = SimOptions {
            csit_fault: Some(CsitFault::StaleRelayCsi),
            ..SimOptions::default()
        };
        let t = simulate(Scheme::HaaPieRir, &cfg(2, 6, 2), &data(12, 12), &mut RngStream::new(3, 0), &opts).unwrap();
        assert!(t.max_recovery_error.unwrap() > 1e-3);
        assert!(t.max_interference_residual.unwrap() > 1e-3);
    }

    #[test]
    fn two_user_ipie_matches_pie_schedule() {
        let c = cfg(2, 6, 2);
        assert_eq!(schedule(Scheme::HaaIpieRir, &c).unwrap(), schedule(Scheme::HaaPieRir, &c).unwrap());
        let ev = SimOptions::event_only();
        let a = simulate(Scheme::HaaIpieRir, &c, &data(12, 24), &mut RngStream::new(0, 0), &ev).unwrap();
        let b = simulate(Scheme::HaaPieRir, &c, &data(12, 24), &mut RngStream::new(0, 0), &ev).unwrap();
        assert_eq!(a.events, b.events);
    }

    #[test]
    fn strict_mode_rejects_partial_periods_and_padding_fills_them() {
        let c = cfg(2, 6, 2);
        let err = simulate(Scheme::HaaPieRir, &c, &data(5, 0), &mut RngStream::new(0, 0), &SimOptions::default());
        assert!(matches!(err, Err(SchemeError::DivisibilityViolation { unit: 12, .. })));
        let opts = SimOptions {
            pad_partial_periods: true,
            ..SimOptions::default()
        };
        let t = simulate(Scheme::HaaPieRir, &c, &data(5, 0), &mut RngStream::new(0, 0), &opts).unwrap();
        assert_eq!((t.events.len(), t.dummy_symbols, t.slots_used), (5, 7, 3));
        assert!(t.max_recovery_error.unwrap() < 1e-9);
    }

    #[test]
    fn preconditions_are_reported() {
        let c = cfg(3, 60, 25);
        assert!(matches!(
            simulate(Scheme::HaaPieRir, &c, &data(1, 0), &mut RngStream::new(0, 0), &SimOptions::event_only()),
            Err(SchemeError::Unsupported { .. })
        ));
        let small = NetworkConfig::new(2, 6, 2, 7).unwrap();
        assert!(matches!(
            simulate(Scheme::HaaIpieRir, &small, &data(12, 0), &mut RngStream::new(0, 0), &SimOptions::default()),
            Err(SchemeError::RelayTooSmall { required: 8, .. })
        ));
    }

    #[test]
    fn zero_forcing_baseline_recovers_when_users_can_hold_their_streams() {
        let t = simulate(Scheme::BdTdma, &cfg(2, 4, 3), &data(8, 8), &mut RngStream::new(2, 0), &SimOptions::default())
            .unwrap();
        assert!(t.signal_level);
        assert!(t.max_recovery_error.unwrap() < 1e-9);
        let wide = simulate(Scheme::BdTdma, &cfg(2, 6, 2), &data(6, 6), &mut RngStream::new(2, 0), &SimOptions::default())
            .unwrap();
        assert!(!wide.signal_level);
    }
}
