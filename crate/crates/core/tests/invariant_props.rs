//! Property tests for the contracts the rest of the stack leans on:
//! parse/serialize round-trips, inequality-index invariances, and the
//! feasibility clamp.

use std::collections::BTreeMap;

use netmend_core::network::{parse_network, serialize_network, Link, LinkId, Network, ParseOptions, ZoneId};
use netmend_core::objective::{enforce_budget, gini, resilience, RestorationPlan};
use netmend_core::scenario::DamagedLink;
use netmend_core::{parse_trips, serialize_trips, DemandTable};
use proptest::prelude::*;

fn arb_network() -> impl Strategy<Value = Network> {
    (2u32..=8).prop_flat_map(|zones| {
        proptest::collection::vec(
            (1u32..=zones, 1u32..=zones, 0.5f64..50.0, 0.1f64..10.0)
                .prop_filter("no self-loops", |(from, to, _, _)| from != to),
            1..=12,
        )
        .prop_map(move |rows| {
            let links = rows
                .iter()
                .enumerate()
                .map(|(i, &(from, to, capacity, free_flow_time))| Link {
                    id: LinkId(i as u32 + 1),
                    from: ZoneId(from),
                    to: ZoneId(to),
                    capacity,
                    free_flow_time,
                })
                .collect();
            Network::new(zones, links).unwrap()
        })
    })
}

fn arb_demand() -> impl Strategy<Value = DemandTable> {
    (2u32..=8).prop_flat_map(|zones| {
        proptest::collection::vec(
            (1u32..=zones, 1u32..=zones, 0.01f64..100.0)
                .prop_filter("no intrazonal trips", |(r, s, _)| r != s),
            0..=10,
        )
        .prop_map(move |entries| {
            let mut dem = DemandTable::empty(zones);
            for (r, s, q) in entries {
                dem.set(ZoneId(r), ZoneId(s), q).unwrap();
            }
            dem
        })
    })
}

fn arb_damaged(len: usize) -> impl Strategy<Value = Vec<DamagedLink>> {
    proptest::collection::vec(0.1f64..20.0, len..=len).prop_map(|headrooms| {
        headrooms
            .into_iter()
            .enumerate()
            .map(|(i, headroom)| DamagedLink {
                id: LinkId(i as u32 + 1),
                index: i,
                residual: 0.5,
                headroom,
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn network_survives_a_serialize_parse_round_trip(net in arb_network()) {
        let text = serialize_network(&net);
        let parsed: Network =
            parse_network(&text, &ParseOptions { allow_parallel_links: true }).unwrap();
        prop_assert_eq!(parsed.zones(), net.zones());
        prop_assert_eq!(parsed.links(), net.links());
    }

    #[test]
    fn trip_table_survives_a_serialize_parse_round_trip(dem in arb_demand()) {
        let text = serialize_trips(&dem);
        let parsed: DemandTable = parse_trips(&text).unwrap();
        prop_assert_eq!(parsed.zones(), dem.zones());
        for r in 1..=dem.zones() {
            for s in 1..=dem.zones() {
                prop_assert_eq!(
                    parsed.get(ZoneId(r), ZoneId(s)),
                    dem.get(ZoneId(r), ZoneId(s)),
                    "pair ({}, {})", r, s
                );
            }
        }
    }

    #[test]
    fn gini_stays_in_range_and_ignores_scale(
        values in proptest::collection::vec(0.01f64..100.0, 1..=12),
        k in 0.1f64..64.0,
    ) {
        let g: f64 = gini(&values).unwrap();
        prop_assert!((0.0..1.0).contains(&g), "gini {} out of range", g);
        let scaled: Vec<f64> = values.iter().map(|v| v * k).collect();
        let gs: f64 = gini(&scaled).unwrap();
        prop_assert!((gs - g).abs() <= 1e-9, "gini {} changed to {} under x{}", g, gs, k);
    }

    #[test]
    fn gini_of_a_uniform_distribution_is_zero(
        value in 0.01f64..100.0,
        len in 1usize..=12,
    ) {
        let g: f64 = gini(&vec![value; len]).unwrap();
        prop_assert_eq!(g, 0.0);
    }

    #[test]
    fn budget_clamp_lands_inside_the_feasible_box(
        (damaged, raw, budget) in (1usize..=8).prop_flat_map(|len| {
            (
                arb_damaged(len),
                proptest::collection::vec(-5.0f64..30.0, len..=len),
                0.0f64..40.0,
            )
        }),
    ) {
        let mut recovery = raw;
        enforce_budget(&mut recovery, &damaged, budget);
        for (v, d) in recovery.iter().zip(&damaged) {
            prop_assert!(*v >= 0.0, "negative recovery {}", v);
            prop_assert!(*v <= d.headroom, "recovery {} above headroom {}", v, d.headroom);
        }
        let cost: f64 = recovery.iter().sum();
        prop_assert!(cost <= budget + 1e-9, "cost {} above budget {}", cost, budget);
    }

    #[test]
    fn plan_construction_accepts_exactly_the_feasible_box(amount in -2.0f64..12.0) {
        let net: Network = parse_network(
            "1 2 10 1\n2 3 10 1\n3 1 10 1\n",
            &ParseOptions::default(),
        )
        .unwrap();
        let sc = netmend_core::parse_scenario(
            "budget = 4.0\nmu = 0.5\ndamaged = [ { link = 1, residual = 2.0 } ]\n\
             [incomes]\n1 = \"low\"\n2 = \"average\"\n3 = \"high\"\n",
        )
        .unwrap();
        let plan = RestorationPlan::new(&net, &sc, BTreeMap::from([(LinkId(1), amount)]));
        // headroom of link 1 is 10 - 2 = 8
        prop_assert_eq!(plan.is_ok(), (0.0..=8.0).contains(&amount));
    }

    #[test]
    fn scalarization_recombines_exactly(
        d in 0.0f64..10.0,
        e in 0.0f64..1.0,
        mu in 0.0f64..=1.0,
    ) {
        let r = resilience(d, e, mu);
        prop_assert!((r - (mu * d + (1.0 - mu) * e)).abs() <= 1e-12);
    }
}
