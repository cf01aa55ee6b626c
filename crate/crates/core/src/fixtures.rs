//! Small hand-checkable instances shared by unit tests across modules.

use std::collections::BTreeMap;

use crate::demand::DemandTable;
use crate::network::{Link, LinkId, Network, ZoneId};
use crate::scenario::Scenario;

fn link(id: u32, from: u32, to: u32, capacity: f64, free_flow_time: f64) -> Link {
    Link {
        id: LinkId(id),
        from: ZoneId(from),
        to: ZoneId(to),
        capacity,
        free_flow_time,
    }
}

fn scenario(
    budget: f64,
    mu: f64,
    damaged: &[(u32, f64)],
    incomes: &[(u32, f64)],
) -> Scenario {
    Scenario {
        budget,
        mu,
        bpr_alpha: 0.15,
        bpr_beta: 4.0,
        lambda1: 1e3,
        lambda2: 1e3,
        damaged: damaged.iter().map(|&(id, r)| (LinkId(id), r)).collect(),
        incomes: incomes.iter().map(|&(z, v)| (ZoneId(z), v)).collect(),
    }
}

/// Three zones, a congestible direct route 1->3 plus a two-hop bypass via
/// zone 2, symmetric reverses; two damaged links with distinct headrooms.
pub(crate) fn two_route_fixture() -> (Network, DemandTable, Scenario) {
    let net = Network::new(
        3,
        vec![
            link(1, 1, 3, 2.0, 1.0),
            link(2, 1, 2, 10.0, 0.5),
            link(3, 2, 3, 10.0, 0.5),
            link(4, 3, 1, 2.0, 1.0),
            link(5, 2, 1, 10.0, 0.5),
            link(6, 3, 2, 10.0, 0.5),
        ],
    )
    .unwrap();
    let mut dem = DemandTable::empty(3);
    dem.set(ZoneId(1), ZoneId(3), 4.0).unwrap();
    dem.set(ZoneId(3), ZoneId(1), 4.0).unwrap();
    let sc = scenario(
        4.0,
        0.5,
        &[(1, 0.5), (3, 2.0)],
        &[(1, 0.6), (2, 1.0), (3, 1.5)],
    );
    (net, dem, sc)
}

/// The same road geometry with three damaged links (both bypass legs and the
/// direct route), for oracle-comparison tests.
pub(crate) fn three_link_fixture() -> (Network, DemandTable, Scenario) {
    let (net, dem, mut sc) = two_route_fixture();
    sc.damaged = [(1u32, 0.5f64), (3, 2.0), (6, 3.0)]
        .iter()
        .map(|&(id, r)| (LinkId(id), r))
        .collect::<BTreeMap<_, _>>();
    sc.budget = 6.0;
    (net, dem, sc)
}
