//! Slot-by-slot execution shared by every scheme.

use num_complex::Complex64;

use crate::model::{
    draw_slot_channels_with_layout, ClusterPlan, DataSetSpec, ModelError, NetworkConfig, RelayLayout, SlotChannels,
    Symbol, RESAMPLE_LIMIT,
};
use crate::numerics::{NumericsError, RngStream};

use super::direct::{single_user_slot, zero_forcing_slot, DirectOutcome};
use super::relay::{retrospective_slot, Cancellation, RelaySlot};
use super::schedule::{cluster_plan_for, period_plan, schedule, ScheduleParams, SlotPlan};
use super::{
    verify_recovery, CsitFault, DecodeEvent, Recovery, Scheme, SchemeError, SchemeTrace, SimOptions, SlotPhase,
    SlotRecord,
};

pub(super) fn run(
    scheme: Scheme,
    config: &NetworkConfig,
    dataset: &DataSetSpec,
    rng: &mut RngStream,
    options: &SimOptions,
) -> Result<SchemeTrace, SchemeError> {
    config.validate()?;
    if dataset.total() == 0 {
        return Err(ModelError::InvalidDataSet("A + B must be at least 1".into()).into());
    }
    let params = schedule(scheme, config)?;
    if let Some(required) = scheme.required_relay_antennas(config) {
        if config.q < required {
            return Err(SchemeError::RelayTooSmall {
                scheme,
                required,
                available: config.q,
            });
        }
    }
    if !options.pad_partial_periods {
        divisibility(scheme, config, &params, dataset)?;
    }
    let plan = cluster_plan_for(scheme, config);
    let signal = options.signal_level && signal_supported(scheme, config, &plan);

    let mut engine = Engine::new(scheme, config, params, plan, dataset, rng, options, signal);
    engine.execute()?;
    Ok(engine.finish())
}

/// Strict mode: the data set must fill whole periods.
pub(crate) fn divisibility(
    scheme: Scheme,
    config: &NetworkConfig,
    params: &ScheduleParams,
    dataset: &DataSetSpec,
) -> Result<(), SchemeError> {
    let (a, b) = (dataset.a, dataset.b);
    let violation = |unit: usize, rule: &'static str| SchemeError::DivisibilityViolation { scheme, a, b, unit, rule };
    match scheme {
        Scheme::Tdma => {
            if a % config.n != 0 || b % config.n != 0 {
                return Err(violation(config.n, "N must divide A and B"));
            }
        }
        Scheme::BdTdma => {
            if a % config.m != 0 || b % config.m != 0 {
                return Err(violation(config.m, "M must divide A and B"));
            }
        }
        Scheme::Ria => {
            let s = params.symbols_per_period;
            if a % s != 0 || b % s != 0 {
                return Err(violation(s, "symbols per period must divide A and B"));
            }
        }
        _ => {
            let s = params.symbols_per_period;
            if (a + b) % s != 0 {
                return Err(violation(s, "symbols per period must divide A + B"));
            }
        }
    }
    Ok(())
}

fn signal_supported(scheme: Scheme, config: &NetworkConfig, plan: &ClusterPlan) -> bool {
    match scheme {
        Scheme::Ria => false,
        // Zero-forcing needs every user to own at most N streams.
        Scheme::BdTdma => plan.sizes.iter().all(|&d| d <= config.n),
        _ => true,
    }
}

struct Engine<'a> {
    scheme: Scheme,
    config: NetworkConfig,
    params: ScheduleParams,
    plan: ClusterPlan,
    layout: RelayLayout,
    rng: &'a mut RngStream,
    options: &'a SimOptions,
    signal: bool,
    real_total: usize,
    symbols: Vec<Symbol>,
    cursor: usize,
    slot: usize,
    /// Erased symbols per user awaiting the retrospective slot, with the
    /// relay's copy of each.
    pending: Vec<Vec<(usize, Complex64)>>,
    /// RIA symbols awaiting alignment.
    aligned: Vec<usize>,
    events: Vec<DecodeEvent>,
    recoveries: Vec<Recovery>,
    slot_log: Vec<SlotRecord>,
    resamples: u64,
    max_residual: f64,
    previous: Option<SlotChannels>,
}

impl<'a> Engine<'a> {
    #[allow(clippy::too_many_arguments)]
    fn new(
        scheme: Scheme,
        config: &NetworkConfig,
        params: ScheduleParams,
        plan: ClusterPlan,
        dataset: &DataSetSpec,
        rng: &'a mut RngStream,
        options: &'a SimOptions,
        signal: bool,
    ) -> Self {
        let total = dataset.total();
        let symbols = (0..total)
            .map(|id| Symbol {
                id,
                priority: dataset.priority_of(id),
                payload: if signal { rng.cn01() } else { Complex64::new(0.0, 0.0) },
                tx_slot: None,
                decode_slot: None,
                user: None,
                dummy: false,
            })
            .collect();
        let layout = if scheme == Scheme::HaaIpieRir {
            RelayLayout::stacked(config)
        } else {
            RelayLayout::pairwise(config)
        };
        Self {
            scheme,
            config: *config,
            params,
            plan,
            layout,
            rng,
            options,
            signal,
            real_total: total,
            symbols,
            cursor: 0,
            slot: 0,
            pending: vec![Vec::new(); config.k],
            aligned: Vec::new(),
            events: Vec::new(),
            recoveries: Vec::new(),
            slot_log: Vec::new(),
            resamples: 0,
            max_residual: 0.0,
            previous: None,
        }
    }

    fn execute(&mut self) -> Result<(), SchemeError> {
        while self.cursor < self.real_total {
            let plans = period_plan(self.scheme, &self.config, &self.params, &self.plan, self.slot + 1);
            for p in plans {
                self.slot += 1;
                self.run_slot(&p)?;
            }
        }
        Ok(())
    }

    /// Next `count` queue entries, padding with dummies past the data set.
    fn take(&mut self, count: usize, user: usize) -> Vec<usize> {
        let mut ids = Vec::with_capacity(count);
        for _ in 0..count {
            if self.cursor == self.symbols.len() {
                let id = self.symbols.len();
                let payload = if self.signal { self.rng.cn01() } else { Complex64::new(0.0, 0.0) };
                self.symbols.push(Symbol {
                    id,
                    priority: DataSetSpec::LOW_PRIORITY,
                    payload,
                    tx_slot: None,
                    decode_slot: None,
                    user: None,
                    dummy: true,
                });
            }
            let s = &mut self.symbols[self.cursor];
            s.tx_slot = Some(self.slot);
            s.user = Some(user);
            ids.push(self.cursor);
            self.cursor += 1;
        }
        ids
    }

    fn payloads(&self, ids: &[usize]) -> Vec<Complex64> {
        ids.iter().map(|&i| self.symbols[i].payload).collect()
    }

    fn decode(&mut self, id: usize, recovered: Option<Complex64>) {
        let slot = self.slot;
        let s = &mut self.symbols[id];
        s.decode_slot = Some(slot);
        if s.dummy {
            return;
        }
        let user = s.user.expect("decoded symbols have a user");
        self.events.push(DecodeEvent {
            symbol_id: id,
            priority: s.priority,
            decode_slot: slot,
            user,
        });
        if let Some(r) = recovered {
            self.recoveries.push(Recovery {
                symbol_id: id,
                user,
                transmitted: s.payload,
                recovered: r,
            });
        }
    }

    fn log(&mut self, record: SlotRecord) {
        self.max_residual = self.max_residual.max(record.interference_residual);
        if self.options.keep_slot_log {
            self.slot_log.push(record);
        }
    }

    fn run_slot(&mut self, plan: &SlotPlan) -> Result<(), SchemeError> {
        match plan {
            SlotPlan::Single { user, streams } => {
                let ids = self.take(*streams, *user);
                self.direct_slot(&ids, |ch, s| single_user_slot(ch, *user, s))
            }
            SlotPlan::ZeroForcing { streams } => {
                let mut ids = Vec::new();
                for (k, &d) in streams.iter().enumerate() {
                    ids.extend(self.take(d, k));
                }
                let streams = streams.clone();
                self.direct_slot(&ids, |ch, s| zero_forcing_slot(ch, &streams, s))
            }
            SlotPlan::Aligned { count } => {
                let k_eff = super::ria_operating_point(&self.config).0;
                for _ in 0..*count {
                    let user = self.aligned.len() % k_eff;
                    let id = self.take(1, user);
                    self.aligned.extend(id);
                }
                self.log(event_record(self.slot, SlotPhase::Transmission));
                Ok(())
            }
            SlotPlan::Relay { groups } => self.relay_slot(groups),
            SlotPlan::Retrospective => {
                if self.scheme == Scheme::Ria {
                    for id in std::mem::take(&mut self.aligned) {
                        self.decode(id, None);
                    }
                    self.log(event_record(self.slot, SlotPhase::Retrospective));
                    Ok(())
                } else {
                    self.retrospective()
                }
            }
        }
    }

    /// Draws channels for the current slot and runs `physics`, redrawing when
    /// some derived matrix turns out singular.
    fn with_channels<T>(
        &mut self,
        mut physics: impl FnMut(&SlotChannels, &SlotChannels) -> Result<T, NumericsError>,
    ) -> Result<T, SchemeError> {
        let limit_hit = |slot| SchemeError::ResampleLimitExceeded {
            slot,
            limit: RESAMPLE_LIMIT,
        };
        let mut failures = 0;
        loop {
            let channels = draw_slot_channels_with_layout(&self.config, &self.plan, self.layout, self.rng)
                .map_err(|_| limit_hit(self.slot))?;
            self.resamples += u64::from(channels.resamples);
            let stale = match self.options.csit_fault {
                None => None,
                Some(CsitFault::StaleRelayCsi) => Some(match self.previous.take() {
                    Some(prev) => prev,
                    None => draw_slot_channels_with_layout(&self.config, &self.plan, self.layout, self.rng)
                        .map_err(|_| limit_hit(self.slot))?,
                }),
            };
            let csi = stale.as_ref().unwrap_or(&channels);
            match physics(&channels, csi) {
                Ok(out) => {
                    if self.options.csit_fault.is_some() {
                        self.previous = Some(channels);
                    }
                    return Ok(out);
                }
                Err(NumericsError::Singular { .. }) => {
                    self.previous = stale;
                    failures += 1;
                    self.resamples += 1;
                    if failures >= RESAMPLE_LIMIT {
                        return Err(limit_hit(self.slot));
                    }
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    fn direct_slot(
        &mut self,
        ids: &[usize],
        physics: impl Fn(&SlotChannels, &[Complex64]) -> Result<DirectOutcome, NumericsError>,
    ) -> Result<(), SchemeError> {
        if !self.signal {
            for &id in ids {
                self.decode(id, None);
            }
            self.log(event_record(self.slot, SlotPhase::Transmission));
            return Ok(());
        }
        let s = self.payloads(ids);
        let out = self.with_channels(|ch, _| physics(ch, &s))?;
        let recovered: Vec<Complex64> = out.users.iter().flat_map(|(_, _, r)| r.iter().copied()).collect();
        for (&id, r) in ids.iter().zip(recovered) {
            self.decode(id, Some(r));
        }
        self.log(SlotRecord {
            slot: self.slot,
            phase: SlotPhase::Transmission,
            transmitted: out.transmitted,
            received: out.users.into_iter().map(|(u, y, _)| (u, y)).collect(),
            interference_residual: out.interference_residual,
        });
        Ok(())
    }

    fn relay_slot(&mut self, groups: &[super::relay::Group]) -> Result<(), SchemeError> {
        let n = self.config.n;
        // Queue order follows cluster order, which is also the order of `x`.
        let mut cluster_ids: Vec<Vec<usize>> = vec![Vec::new(); self.plan.len()];
        let mut order: Vec<usize> = (0..groups.len()).collect();
        order.sort_by_key(|&i| groups[i].cluster);
        for &i in &order {
            let g = groups[i];
            cluster_ids[g.cluster] = self.take(self.plan.sizes[g.cluster], g.user);
        }

        if !self.signal {
            for g in groups {
                let ids = cluster_ids[g.cluster].clone();
                let keep = ids.len().min(n);
                for &id in &ids[..keep] {
                    self.decode(id, None);
                }
                for &id in &ids[keep..] {
                    self.pending[g.user].push((id, Complex64::new(0.0, 0.0)));
                }
            }
            self.log(event_record(self.slot, SlotPhase::Transmission));
            return Ok(());
        }

        let all_ids: Vec<usize> = cluster_ids.iter().flatten().copied().collect();
        let x = self.payloads(&all_ids);
        let cancellation = if self.scheme == Scheme::HaaIpieRir {
            Cancellation::Stacked
        } else {
            Cancellation::Pairwise
        };
        let plan = self.plan.clone();
        let out = self.with_channels(|ch, csi| {
            RelaySlot {
                channels: ch,
                relay_csi: csi,
                plan: &plan,
                groups,
                cancellation,
                n,
            }
            .run(&x)
        })?;

        let mut residual: f64 = 0.0;
        let mut received = Vec::with_capacity(out.groups.len());
        for g in out.groups {
            let ids = &cluster_ids[g.cluster];
            for (&id, &r) in ids.iter().zip(&g.decoded) {
                self.decode(id, Some(r));
            }
            for (&id, &copy) in ids[g.decoded.len()..].iter().zip(&g.erased) {
                self.pending[g.user].push((id, copy));
            }
            residual = residual.max(g.interference_residual);
            received.push((g.user, g.received));
        }
        self.log(SlotRecord {
            slot: self.slot,
            phase: SlotPhase::Transmission,
            transmitted: x,
            received,
            interference_residual: residual,
        });
        Ok(())
    }

    fn retrospective(&mut self) -> Result<(), SchemeError> {
        let pending: Vec<(usize, Vec<(usize, Complex64)>)> = self
            .pending
            .iter_mut()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(u, p)| (u, std::mem::take(p)))
            .collect();
        let n = self.config.n;
        for (u, p) in &pending {
            if p.len() > n {
                return Err(SchemeError::CapacityExceeded {
                    scheme: self.scheme,
                    detail: format!("user {u} has {} erased symbols, a retrospective slot carries {n}", p.len()),
                });
            }
        }
        if !self.signal {
            for (_, p) in &pending {
                for &(id, _) in p {
                    self.decode(id, None);
                }
            }
            self.log(event_record(self.slot, SlotPhase::Retrospective));
            return Ok(());
        }
        let values: Vec<(usize, Vec<Complex64>)> = pending
            .iter()
            .map(|(u, p)| (*u, p.iter().map(|&(_, v)| v).collect()))
            .collect();
        let deliveries = self.with_channels(|ch, csi| retrospective_slot(ch, csi, &values, n))?;
        let mut transmitted = Vec::new();
        let mut received = Vec::new();
        for ((_, p), d) in pending.iter().zip(deliveries) {
            for (&(id, _), &r) in p.iter().zip(&d.recovered) {
                self.decode(id, Some(r));
            }
            transmitted.extend(d.transmitted);
            received.push((d.user, d.received));
        }
        self.log(SlotRecord {
            slot: self.slot,
            phase: SlotPhase::Retrospective,
            transmitted,
            received,
            interference_residual: 0.0,
        });
        Ok(())
    }

    fn finish(self) -> SchemeTrace {
        let dummy_symbols = self.symbols.len() - self.real_total;
        let mut symbols = self.symbols;
        symbols.truncate(self.real_total);
        let mut trace = SchemeTrace {
            scheme: self.scheme,
            schedule: self.params,
            slots_used: self.slot,
            events: self.events,
            symbols,
            recoveries: self.recoveries,
            slot_log: self.slot_log,
            max_recovery_error: None,
            max_interference_residual: None,
            resamples: self.resamples,
            signal_level: self.signal,
            dummy_symbols,
        };
        if self.signal {
            trace.max_recovery_error = Some(verify_recovery(&trace));
            trace.max_interference_residual = Some(self.max_residual);
        }
        trace
    }
}

fn event_record(slot: usize, phase: SlotPhase) -> SlotRecord {
    SlotRecord {
        slot,
        phase,
        transmitted: Vec::new(),
        received: Vec::new(),
        interference_residual: 0.0,
    }
}
