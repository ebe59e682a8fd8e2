//! Event simulation against a direct per-symbol decode-slot oracle and
//! against the closed forms.

use proptest::prelude::*;

use rirsim::metrics::{closed_form_dod, closed_form_dof, event_dod, DsfTable};
use rirsim::model::{DataSetSpec, NetworkConfig};
use rirsim::numerics::RngStream;
use rirsim::schemes::{schedule, simulate, Scheme, SchemeTrace, SimOptions};

fn cfg(k: usize, m: usize, n: usize) -> NetworkConfig {
    NetworkConfig::with_ample_relay(k, m, n).unwrap()
}

fn run(scheme: Scheme, c: &NetworkConfig, a: usize, b: usize) -> SchemeTrace {
    let d = DataSetSpec::new(a, b).unwrap();
    simulate(scheme, c, &d, &mut RngStream::new(0, 0), &SimOptions::event_only()).unwrap()
}

/// DoD from a decode-slot rule applied to queue positions.
fn oracle_dod(a: usize, b: usize, slot_of: impl Fn(usize) -> usize) -> f64 {
    let total: f64 = (0..a + b)
        .map(|i| {
            let weight = if i < a { 1.0 } else { 0.2 };
            weight * (slot_of(i) - 1) as f64
        })
        .sum();
    total / (a + b) as f64
}

fn sim_dod(t: &SchemeTrace) -> f64 {
    event_dod(&t.events, &DsfTable::default()).unwrap().dod
}

/// Relay schemes: symbols fill `per_slot`-wide slots cluster by cluster; the
/// first `n` of each cluster decode at once, the rest at the period's end.
fn relay_slot_of(i: usize, per_period: usize, per_slot: usize, sizes: &[usize], n: usize, period: usize) -> usize {
    let p = i / per_period;
    let j = i % per_period;
    let t = j / per_slot;
    let mut o = j % per_slot;
    let mut c = 0;
    while o >= sizes[c] {
        o -= sizes[c];
        c += 1;
    }
    if o < n {
        p * period + t + 1
    } else {
        p * period + period
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tdma_and_zero_forcing_follow_slot_rule(n in 1usize..6, extra in 1usize..6, ra in 0usize..20, rb in 0usize..20) {
        prop_assume!(ra + rb > 0);
        let m = n + extra;
        let c = NetworkConfig::with_ample_relay(2, m, n).unwrap();
        let (a, b) = (ra * n * m, rb * n * m);
        let t = run(Scheme::Tdma, &c, a, b);
        let want = oracle_dod(a, b, |i| i / n + 1);
        prop_assert!((sim_dod(&t) - want).abs() < 1e-9);
        let d = DataSetSpec { a, b };
        prop_assert!((closed_form_dod(Scheme::Tdma, &c, &d).value - want).abs() < 1e-9);
        prop_assert_eq!(t.slots_used, (a + b) / n);

        let t = run(Scheme::BdTdma, &c, a, b);
        let want = oracle_dod(a, b, |i| i / m + 1);
        prop_assert!((sim_dod(&t) - want).abs() < 1e-9);
        prop_assert!((closed_form_dod(Scheme::BdTdma, &c, &d).value - want).abs() < 1e-9);
    }

    #[test]
    fn ria_decodes_at_period_end(k in 2usize..4, n in 1usize..8, extra in 1usize..12, ra in 0usize..6, rb in 0usize..6) {
        prop_assume!(ra + rb > 0);
        let m = n + extra;
        prop_assume!(k <= m);
        let c = cfg(k, m, n);
        let p = schedule(Scheme::Ria, &c).unwrap();
        prop_assume!(p.phase1_slots > 0);
        let s = p.symbols_per_period;
        let (a, b) = (ra * s, rb * s);
        let t = run(Scheme::Ria, &c, a, b);
        let want = oracle_dod(a, b, |i| (i / s + 1) * p.period_slots);
        prop_assert!((sim_dod(&t) - want).abs() < 1e-9);
        let d = DataSetSpec { a, b };
        prop_assert!((closed_form_dod(Scheme::Ria, &c, &d).value - want).abs() < 1e-9);
        prop_assert_eq!(t.slots_used * s, p.period_slots * (a + b));
    }

    #[test]
    fn elimination_schemes_follow_slot_rule(
        k in 2usize..5, n in 1usize..7, extra in 1usize..14, ra in 0usize..4, rb in 0usize..4,
    ) {
        prop_assume!(ra + rb > 0);
        let m = n + extra;
        prop_assume!(k <= m);
        let c = cfg(k, m, n);
        let Ok(p) = schedule(Scheme::HaaIpieRir, &c) else { return Ok(()) };
        let s = p.symbols_per_period;
        let (a, b) = (ra * s, rb * s);
        let t = run(Scheme::HaaIpieRir, &c, a, b);
        let sizes = rirsim::model::ClusterPlan::split(m, k).sizes;
        let want = oracle_dod(a, b, |i| relay_slot_of(i, s, m, &sizes, n, p.period_slots));
        prop_assert!((sim_dod(&t) - want).abs() < 1e-9);
        prop_assert_eq!(t.slots_used * s, p.period_slots * (a + b));
        if p.is_exact() {
            let closed = closed_form_dod(Scheme::HaaIpieRir, &c, &DataSetSpec { a, b });
            prop_assert!(closed.divisible);
            prop_assert!((closed.value - want).abs() < 1e-9);
            prop_assert_eq!(t.empirical_dof(), closed_form_dof(Scheme::HaaIpieRir, &c));
        }
    }

    #[test]
    fn circular_scheme_slot_counts(k in 2usize..5, n in 1usize..7, extra in 1usize..14, r in 1usize..4) {
        let m = n + extra;
        prop_assume!(k <= m);
        let c = cfg(k, m, n);
        let Ok(p) = schedule(Scheme::HaaCieRir, &c) else { return Ok(()) };
        let s = p.symbols_per_period;
        let t = run(Scheme::HaaCieRir, &c, r * s, 0);
        prop_assert_eq!(t.slots_used, r * p.period_slots);
        prop_assert_eq!(t.events.len(), r * s);
        let sizes = rirsim::model::ClusterPlan::split(m, 2).sizes;
        let want = oracle_dod(r * s, 0, |i| relay_slot_of(i, s, m, &sizes, n, p.period_slots));
        prop_assert!((sim_dod(&t) - want).abs() < 1e-9);
        if p.is_exact() {
            prop_assert_eq!(t.empirical_dof(), closed_form_dof(Scheme::HaaCieRir, &c));
        }
    }

    #[test]
    fn padding_never_counts_dummies(n in 1usize..5, extra in 1usize..6, a in 0usize..50, b in 0usize..50) {
        prop_assume!(a + b > 0);
        let c = cfg(2, n + extra, n);
        let opts = SimOptions { pad_partial_periods: true, ..SimOptions::event_only() };
        for scheme in Scheme::ALL {
            let Ok(p) = schedule(scheme, &c) else { continue };
            let d = DataSetSpec::new(a, b).unwrap();
            let t = simulate(scheme, &c, &d, &mut RngStream::new(0, 0), &opts).unwrap();
            prop_assert_eq!(t.events.len(), a + b);
            prop_assert_eq!(t.slots_used % p.period_slots, 0);
            prop_assert!(t.symbols.iter().all(|s| !s.dummy && s.decode_slot.is_some()));
        }
    }
}

#[test]
fn two_user_ipie_and_pie_share_closed_forms() {
    for (m, n) in [(6, 2), (4, 3), (9, 4)] {
        let c = cfg(2, m, n);
        let d = DataSetSpec { a: 120, b: 240 };
        assert_eq!(
            closed_form_dod(Scheme::HaaIpieRir, &c, &d).value,
            closed_form_dod(Scheme::HaaPieRir, &c, &d).value
        );
        assert_eq!(closed_form_dof(Scheme::HaaIpieRir, &c), closed_form_dof(Scheme::HaaPieRir, &c));
    }
}

#[test]
fn circular_formula_gap_is_fixed_per_period() {
    // Three divisible period counts; the event/formula gap must not move.
    let c = cfg(2, 6, 2);
    let s = schedule(Scheme::HaaCieRir, &c).unwrap().symbols_per_period;
    let gaps: Vec<f64> = (1..=3)
        .map(|r| {
            let (a, b) = (r * s, r * s);
            let t = run(Scheme::HaaCieRir, &c, a, b);
            sim_dod(&t) - closed_form_dod(Scheme::HaaCieRir, &c, &DataSetSpec { a, b }).value
        })
        .collect();
    assert!(gaps.iter().all(|g| (g - gaps[0]).abs() < 1e-9), "{gaps:?}");
    assert!(gaps[0].abs() > 1e-3, "the single-period formula is not expected to match: {gaps:?}");
}
