//! Period structure of each scheme and the slot plans the engine executes.

use crate::model::{ceil_div, ClusterPlan, NetworkConfig};

use super::{Scheme, SchemeError};

/// Shape of one transmission period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleParams {
    /// Slots in which fresh symbols leave the base station.
    pub phase1_slots: usize,
    pub period_slots: usize,
    /// Symbols actually carried per period.
    pub symbols_per_period: usize,
    /// Per-period count assumed by the closed-form throughput expression.
    pub nominal_symbols_per_period: usize,
    pub has_retrospective_slot: bool,
}

impl ScheduleParams {
    fn single_phase(symbols: usize) -> Self {
        Self {
            phase1_slots: 1,
            period_slots: 1,
            symbols_per_period: symbols,
            nominal_symbols_per_period: symbols,
            has_retrospective_slot: false,
        }
    }

    fn two_phase(phase1: usize, symbols: usize, nominal: usize) -> Self {
        Self {
            phase1_slots: phase1,
            period_slots: phase1 + 1,
            symbols_per_period: symbols,
            nominal_symbols_per_period: nominal,
            has_retrospective_slot: true,
        }
    }

    /// Physical and nominal symbol counts agree.
    pub fn is_exact(&self) -> bool {
        self.symbols_per_period == self.nominal_symbols_per_period
    }

    pub fn dof(&self) -> f64 {
        self.symbols_per_period as f64 / self.period_slots as f64
    }
}

/// `(K_eff, M_eff)` at which RIA operates. Alignment caps the transmit
/// dimension at `2N`; beyond that only two users can be aligned.
pub fn ria_operating_point(config: &NetworkConfig) -> (usize, usize) {
    if config.m > 2 * config.n {
        (2, 2 * config.n)
    } else {
        (config.k, config.m)
    }
}

pub fn schedule(scheme: Scheme, config: &NetworkConfig) -> Result<ScheduleParams, SchemeError> {
    let (k, m, n) = (config.k, config.m, config.n);
    match scheme {
        Scheme::Tdma => Ok(ScheduleParams::single_phase(n)),
        Scheme::BdTdma => Ok(ScheduleParams::single_phase(m)),
        Scheme::Ria => {
            let (k_eff, m_eff) = ria_operating_point(config);
            let phi = k_eff * (n / (m_eff - n));
            let symbols = (phi + k_eff) * n;
            Ok(ScheduleParams::two_phase(phi, symbols, symbols))
        }
        Scheme::HaaPieRir => {
            if k != 2 {
                return Err(SchemeError::Unsupported {
                    scheme,
                    reason: format!("pairwise elimination serves exactly 2 users, got K = {k}"),
                });
            }
            elimination_schedule(scheme, config)
        }
        Scheme::HaaIpieRir => elimination_schedule(scheme, config),
        Scheme::HaaCieRir => {
            if ceil_div(m, 2) <= n {
                return Ok(ScheduleParams::single_phase(m));
            }
            let g = n / (m - 2 * n);
            if g == 0 {
                return Err(SchemeError::Unsupported {
                    scheme,
                    reason: format!(
                        "half-cluster of {} antennas leaves {} erased streams per slot, more than the N = {n} a retrospective slot can carry",
                        ceil_div(m, 2),
                        m - 2 * n
                    ),
                });
            }
            let phi = k * g;
            Ok(ScheduleParams::two_phase(phi, phi * m, 2 * n * phi + k * n))
        }
    }
}

fn elimination_schedule(scheme: Scheme, config: &NetworkConfig) -> Result<ScheduleParams, SchemeError> {
    let (k, m, n) = (config.k, config.m, config.n);
    let d = ceil_div(m, k);
    if d <= n {
        return Ok(ScheduleParams::single_phase(m));
    }
    let phi = n / (d - n);
    if phi == 0 {
        return Err(SchemeError::Unsupported {
            scheme,
            reason: format!("clusters of {d} antennas leave {} erased streams per user, more than N = {n}", d - n),
        });
    }
    Ok(ScheduleParams::two_phase(phi, phi * m, k * n * (phi + 1)))
}

/// Which cluster feeds which user in a relay-assisted slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Group {
    pub cluster: usize,
    pub user: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum SlotPlan {
    /// TDMA: `streams` symbols to the user whose turn it is.
    Single { user: usize, streams: usize },
    /// BD-TDMA: every user at once, `streams[k]` symbols each.
    ZeroForcing { streams: Vec<usize> },
    /// Base station sends through clusters, relay removes inter-cluster
    /// interference.
    Relay { groups: Vec<Group> },
    /// RIA transmission slot.
    Aligned { count: usize },
    /// Relay delivers erased symbols, or RIA finishes alignment.
    Retrospective,
}

/// Slot plans of the period starting at the 1-based `first_slot`.
pub(crate) fn period_plan(
    scheme: Scheme,
    config: &NetworkConfig,
    params: &ScheduleParams,
    plan: &ClusterPlan,
    first_slot: usize,
) -> Vec<SlotPlan> {
    let k = config.k;
    let mut slots: Vec<SlotPlan> = Vec::with_capacity(params.period_slots);
    for t in 0..params.phase1_slots {
        let global = first_slot + t;
        let slot = match scheme {
            Scheme::Tdma => SlotPlan::Single {
                user: (global - 1) % k,
                streams: config.n,
            },
            Scheme::BdTdma => SlotPlan::ZeroForcing {
                streams: plan.sizes.clone(),
            },
            Scheme::Ria => {
                let s = params.symbols_per_period;
                let p = params.phase1_slots;
                SlotPlan::Aligned {
                    count: s / p + usize::from(t < s % p),
                }
            }
            Scheme::HaaPieRir | Scheme::HaaIpieRir => SlotPlan::Relay {
                groups: (0..k).map(|u| Group { cluster: u, user: u }).collect(),
            },
            Scheme::HaaCieRir => {
                // Single-phase periods rotate through users across periods.
                let j = if params.has_retrospective_slot { t % k } else { (global - 1) % k };
                SlotPlan::Relay {
                    groups: vec![
                        Group { cluster: 0, user: j },
                        Group {
                            cluster: 1,
                            user: (j + 1) % k,
                        },
                    ],
                }
            }
        };
        slots.push(slot);
    }
    if params.has_retrospective_slot {
        slots.push(SlotPlan::Retrospective);
    }
    slots
}

pub(crate) fn cluster_plan_for(scheme: Scheme, config: &NetworkConfig) -> ClusterPlan {
    match scheme {
        Scheme::HaaPieRir | Scheme::HaaCieRir => ClusterPlan::split(config.m, 2),
        _ => ClusterPlan::split(config.m, config.k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, m: usize, n: usize) -> NetworkConfig {
        NetworkConfig::with_ample_relay(k, m, n).unwrap()
    }

    #[test]
    fn baseline_periods() {
        let c = cfg(2, 4, 3);
        assert_eq!(schedule(Scheme::Tdma, &c).unwrap().symbols_per_period, 3);
        assert_eq!(schedule(Scheme::BdTdma, &c).unwrap().symbols_per_period, 4);
        let r = schedule(Scheme::Ria, &c).unwrap();
        // phi = 2 * floor(3 / 1) = 6: 6 slots carry 24 symbols, then alignment
        assert_eq!((r.phase1_slots, r.period_slots, r.symbols_per_period), (6, 7, 24));
    }

    #[test]
    fn ria_caps_at_two_users_beyond_twice_n() {
        let c = cfg(3, 60, 25);
        assert_eq!(ria_operating_point(&c), (2, 50));
        let r = schedule(Scheme::Ria, &c).unwrap();
        assert_eq!((r.period_slots, r.symbols_per_period), (3, 100));
    }

    #[test]
    fn relay_periods() {
        let p = schedule(Scheme::HaaPieRir, &cfg(2, 6, 2)).unwrap();
        assert_eq!((p.phase1_slots, p.symbols_per_period, p.nominal_symbols_per_period), (2, 12, 12));
        assert_eq!(schedule(Scheme::HaaPieRir, &cfg(2, 4, 3)).unwrap().period_slots, 1);
        assert!(schedule(Scheme::HaaPieRir, &cfg(3, 60, 25)).is_err());

        let i = schedule(Scheme::HaaIpieRir, &cfg(3, 60, 15)).unwrap();
        assert_eq!((i.phase1_slots, i.symbols_per_period), (3, 180));
        assert!(i.is_exact());
        assert_eq!(schedule(Scheme::HaaIpieRir, &cfg(3, 60, 20)).unwrap().period_slots, 1);

        let c = schedule(Scheme::HaaCieRir, &cfg(3, 60, 25)).unwrap();
        assert_eq!((c.phase1_slots, c.symbols_per_period, c.nominal_symbols_per_period), (6, 360, 375));
        assert!(!c.is_exact());
        assert!(schedule(Scheme::HaaCieRir, &cfg(3, 60, 15)).is_err());
        assert_eq!(schedule(Scheme::HaaCieRir, &cfg(3, 60, 30)).unwrap().period_slots, 1);
    }

    #[test]
    fn cie_rotates_users() {
        let c = cfg(3, 5, 2);
        let params = schedule(Scheme::HaaCieRir, &c).unwrap();
        let plan = cluster_plan_for(Scheme::HaaCieRir, &c);
        let slots = period_plan(Scheme::HaaCieRir, &c, &params, &plan, 1);
        assert_eq!(slots.len(), 7);
        assert_eq!(
            slots[2],
            SlotPlan::Relay {
                groups: vec![Group { cluster: 0, user: 2 }, Group { cluster: 1, user: 0 }]
            }
        );
        assert_eq!(slots[6], SlotPlan::Retrospective);
    }
}
