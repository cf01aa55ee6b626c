//! Built-in Sioux Falls benchmark: the classic 24-zone / 76-link test
//! network, a 25-link earthquake damage scenario, a three-band income map,
//! and a uniform demand table.
//!
//! Capacities are in 10^3 veh/h and free-flow times in minutes. The damage
//! scenario destroys or degrades 25 links; residual capacity is what the
//! disaster left standing (pre-disaster capacity minus the maximum
//! recoverable amount, floored at zero where the recovery table exceeds the
//! link's capacity).

use std::collections::BTreeMap;

use crate::demand::DemandTable;
use crate::network::{Link, LinkId, Network, ZoneId};
use crate::scalar::{cast, Scalar};
use crate::scenario::{IncomeClass, Scenario};

/// `(from, to, free_flow_time [min], capacity [10^3 veh/h])` for links 1..=76.
const LINKS: [(u32, u32, f64, f64); 76] = [
    (1, 2, 3.60, 6.02),
    (1, 3, 2.40, 9.01),
    (2, 1, 3.60, 12.02),
    (2, 6, 3.00, 15.92),
    (3, 1, 2.40, 46.81),
    (3, 4, 2.40, 34.22),
    (3, 12, 2.40, 46.81),
    (4, 3, 2.40, 25.82),
    (4, 5, 1.20, 28.25),
    (4, 11, 3.60, 9.04),
    (5, 4, 1.20, 46.85),
    (5, 6, 2.40, 13.86),
    (5, 9, 3.00, 10.52),
    (6, 2, 3.00, 9.92),
    (6, 5, 2.40, 9.90),
    (6, 8, 1.20, 21.62),
    (7, 8, 1.80, 15.68),
    (7, 18, 1.20, 46.81),
    (8, 6, 1.20, 9.80),
    (8, 7, 1.80, 15.68),
    (8, 9, 2.00, 10.10),
    (8, 16, 3.00, 10.09),
    (9, 5, 3.00, 20.00),
    (9, 8, 2.00, 10.10),
    (9, 10, 1.80, 27.83),
    (10, 9, 1.80, 27.83),
    (10, 11, 3.00, 20.00),
    (10, 15, 3.60, 27.02),
    (10, 16, 3.00, 10.27),
    (10, 17, 4.20, 9.99),
    (11, 4, 3.60, 9.82),
    (11, 10, 3.00, 20.00),
    (11, 12, 3.60, 9.82),
    (11, 14, 2.40, 9.75),
    (12, 3, 2.40, 46.81),
    (12, 11, 3.60, 9.82),
    (12, 13, 1.80, 51.80),
    (13, 12, 1.80, 51.80),
    (13, 24, 2.40, 10.18),
    (14, 11, 2.40, 9.75),
    (14, 15, 3.00, 10.26),
    (14, 23, 2.40, 9.85),
    (15, 10, 3.60, 27.02),
    (15, 14, 3.00, 10.26),
    (15, 19, 2.40, 9.64),
    (15, 22, 2.40, 20.63),
    (16, 8, 3.00, 10.09),
    (16, 10, 3.00, 10.27),
    (16, 17, 1.20, 10.46),
    (16, 18, 1.80, 39.36),
    (17, 10, 4.20, 9.99),
    (17, 16, 1.20, 10.46),
    (17, 19, 1.20, 9.65),
    (18, 7, 1.20, 46.81),
    (18, 16, 1.80, 39.36),
    (18, 20, 2.40, 8.11),
    (19, 15, 2.40, 4.42),
    (19, 17, 1.20, 9.65),
    (19, 20, 2.40, 10.01),
    (20, 18, 2.40, 8.11),
    (20, 19, 2.40, 6.05),
    (20, 21, 3.60, 10.12),
    (20, 22, 3.00, 10.15),
    (21, 20, 3.60, 10.12),
    (21, 22, 1.20, 10.46),
    (21, 24, 1.80, 9.77),
    (22, 15, 2.40, 20.63),
    (22, 20, 3.00, 10.15),
    (22, 21, 1.20, 10.46),
    (22, 23, 2.40, 10.00),
    (23, 14, 2.40, 9.85),
    (23, 22, 2.40, 10.00),
    (23, 24, 1.20, 10.16),
    (24, 13, 2.40, 11.38),
    (24, 21, 1.80, 9.77),
    (24, 23, 1.20, 10.16),
];

/// `(link id, maximum recoverable capacity)` for the 25 damaged links.
const MAX_RECOVERY: [(u32, f64); 25] = [
    (1, 6.01),
    (7, 6.81),
    (10, 9.82),
    (11, 46.85),
    (12, 9.90),
    (17, 15.68),
    (21, 10.10),
    (25, 27.83),
    (30, 9.99),
    (32, 20.00),
    (35, 46.81),
    (36, 9.82),
    (38, 51.80),
    (39, 10.18),
    (40, 9.75),
    (43, 7.02),
    (44, 10.26),
    (45, 4.42),
    (47, 10.09),
    (48, 10.27),
    (56, 8.11),
    (59, 6.05),
    (64, 10.12),
    (66, 9.77),
    (67, 20.63),
];

// Income bands for the 24 zones, eight per band. Low-income zones sit where
// the damage (and hence the recoverable headroom) concentrates, so most of
// the 25 damaged links touch a low-income endpoint, while the five damaged
// links that still carry flow in the unrestored equilibrium (1, 12, 43, 45,
// 59) all have average- or high-income endpoints; zones 1 and 2 make link 1
// the single damaged link with two high-income endpoints.
const LOW_INCOME_ZONES: [u32; 8] = [3, 4, 8, 9, 11, 12, 13, 22];
const AVERAGE_INCOME_ZONES: [u32; 8] = [5, 7, 10, 14, 15, 16, 20, 21];
const HIGH_INCOME_ZONES: [u32; 8] = [1, 2, 6, 17, 18, 19, 23, 24];

/// Zones left without usable outbound capacity by the damage scenario; the
/// built-in demand table excludes them as origins and destinations so that
/// every positive demand stays routable on the damaged network.
const STRANDED_ZONES: [u32; 2] = [12, 13];

/// Demand per ordered zone pair, in the capacity unit (10^3 veh/h).
const DEMAND_PER_PAIR: f64 = 0.6;

/// Default restoration budget, in the capacity unit.
pub const DEFAULT_BUDGET: f64 = 75.0;

/// The intact Sioux Falls network.
pub fn sioux_falls_network<S: Scalar>() -> Network<S> {
    let links = LINKS
        .iter()
        .enumerate()
        .map(|(i, &(from, to, t0, cap))| Link {
            id: LinkId(i as u32 + 1),
            from: ZoneId(from),
            to: ZoneId(to),
            capacity: cast(cap),
            free_flow_time: cast(t0),
        })
        .collect();
    Network::new(24, links).expect("built-in network is well formed")
}

/// Uniform demand between every ordered pair of non-stranded zones.
pub fn sioux_falls_demand<S: Scalar>() -> DemandTable<S> {
    let mut dem = DemandTable::empty(24);
    for r in 1..=24u32 {
        for s in 1..=24u32 {
            if r == s || STRANDED_ZONES.contains(&r) || STRANDED_ZONES.contains(&s) {
                continue;
            }
            dem.set(ZoneId(r), ZoneId(s), cast(DEMAND_PER_PAIR))
                .expect("built-in demand is well formed");
        }
    }
    dem
}

/// The 25-link damage scenario with the default budget, objective weights,
/// and three-band income map.
pub fn sioux_falls_scenario<S: Scalar>() -> Scenario<S> {
    let mut damaged = BTreeMap::new();
    for &(id, max_recovery) in &MAX_RECOVERY {
        let capacity = LINKS[id as usize - 1].3;
        let residual = (capacity - max_recovery).max(0.0);
        damaged.insert(LinkId(id), cast(residual));
    }
    let mut incomes = BTreeMap::new();
    for (zones, class) in [
        (&LOW_INCOME_ZONES, IncomeClass::Low),
        (&AVERAGE_INCOME_ZONES, IncomeClass::Average),
        (&HIGH_INCOME_ZONES, IncomeClass::High),
    ] {
        for &z in zones {
            incomes.insert(ZoneId(z), cast(class.value()));
        }
    }
    Scenario {
        budget: cast(DEFAULT_BUDGET),
        mu: cast(0.2),
        bpr_alpha: cast(0.15),
        bpr_beta: cast(4.0),
        lambda1: cast(1e3),
        lambda2: cast(1e3),
        damaged,
        incomes,
    }
}

/// Network, demand, and scenario in one call.
pub fn sioux_falls<S: Scalar>() -> (Network<S>, DemandTable<S>, Scenario<S>) {
    (sioux_falls_network(), sioux_falls_demand(), sioux_falls_scenario())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::validate;

    #[test]
    fn network_shape_and_totals() {
        let net: Network = sioux_falls_network();
        assert_eq!(net.zones(), 24);
        assert_eq!(net.num_links(), 76);
        let total: f64 = net.links().iter().map(|l| l.capacity).sum();
        assert!((total - 1320.98).abs() < 1e-9, "{total}");
    }

    #[test]
    fn link_spot_checks() {
        let net: Network = sioux_falls_network();
        let l1 = net.link(LinkId(1)).unwrap();
        assert_eq!((l1.from, l1.to, l1.free_flow_time, l1.capacity), (ZoneId(1), ZoneId(2), 3.6, 6.02));
        let l38 = net.link(LinkId(38)).unwrap();
        assert_eq!((l38.from, l38.to, l38.free_flow_time, l38.capacity), (ZoneId(13), ZoneId(12), 1.8, 51.8));
        let l57 = net.link(LinkId(57)).unwrap();
        assert_eq!((l57.from, l57.to, l57.free_flow_time, l57.capacity), (ZoneId(19), ZoneId(15), 2.4, 4.42));
        let l76 = net.link(LinkId(76)).unwrap();
        assert_eq!((l76.from, l76.to, l76.free_flow_time, l76.capacity), (ZoneId(24), ZoneId(23), 1.2, 10.16));
    }

    #[test]
    fn reverse_links_share_free_flow_times() {
        let net: Network = sioux_falls_network();
        for a in net.links() {
            let reverse = net
                .links()
                .iter()
                .find(|b| b.from == a.to && b.to == a.from)
                .expect("every link has a reverse twin");
            assert_eq!(a.free_flow_time, reverse.free_flow_time, "link {}", a.id);
        }
    }

    #[test]
    fn damage_residuals_match_hand_values() {
        let (net, _, sc) = sioux_falls::<f64>();
        let damaged = sc.damaged_links(&net).unwrap();
        assert_eq!(damaged.len(), 25);
        // Ascending by id, residual = capacity - max recovery (floored at 0).
        let by_id: BTreeMap<u32, (f64, f64)> =
            damaged.iter().map(|d| (d.id.0, (d.residual, d.headroom))).collect();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(by_id[&1].0, 0.01) && close(by_id[&1].1, 6.01));
        assert!(close(by_id[&7].0, 40.00) && close(by_id[&7].1, 6.81));
        // Recovery table exceeds this link's capacity: residual floors at 0
        // and the whole capacity is recoverable.
        assert!(close(by_id[&10].0, 0.0) && close(by_id[&10].1, 9.04));
        assert!(close(by_id[&12].0, 3.96) && close(by_id[&12].1, 9.90));
        assert!(close(by_id[&38].0, 0.0) && close(by_id[&38].1, 51.80));
        assert!(close(by_id[&43].0, 20.00) && close(by_id[&43].1, 7.02));
        assert!(close(by_id[&45].0, 5.22) && close(by_id[&45].1, 4.42));
        assert!(close(by_id[&59].0, 3.96) && close(by_id[&59].1, 6.05));
        let headroom: f64 = damaged.iter().map(|d| d.headroom).sum();
        assert!((headroom - 387.31).abs() < 1e-9, "{headroom}");
    }

    #[test]
    fn demand_is_uniform_and_skips_stranded_zones() {
        let dem: DemandTable = sioux_falls_demand();
        assert!((dem.total() - DEMAND_PER_PAIR * 22.0 * 21.0).abs() < 1e-9);
        assert_eq!(dem.get(ZoneId(1), ZoneId(24)), DEMAND_PER_PAIR);
        assert_eq!(dem.get(ZoneId(12), ZoneId(1)), 0.0);
        assert_eq!(dem.get(ZoneId(1), ZoneId(13)), 0.0);
        assert_eq!(dem.get(ZoneId(5), ZoneId(5)), 0.0);
        assert!(dem.is_symmetric());
    }

    #[test]
    fn income_map_covers_all_zones_in_three_bands() {
        let sc: Scenario = sioux_falls_scenario();
        assert_eq!(sc.incomes.len(), 24);
        assert_eq!(sc.incomes[&ZoneId(4)], 0.6);
        assert_eq!(sc.incomes[&ZoneId(7)], 1.0);
        assert_eq!(sc.incomes[&ZoneId(1)], 1.5);
        let low = sc.incomes.values().filter(|&&v| v == 0.6).count();
        let avg = sc.incomes.values().filter(|&&v| v == 1.0).count();
        let high = sc.incomes.values().filter(|&&v| v == 1.5).count();
        assert_eq!((low, avg, high), (8, 8, 8));
    }

    #[test]
    fn builtin_triple_passes_validation() {
        let (net, dem, sc) = sioux_falls::<f64>();
        let violations = validate(&net, &dem, &sc);
        assert!(violations.is_empty(), "{violations:?}");
        assert_eq!(sc.budget, 75.0);
        assert_eq!(sc.mu, 0.2);
    }
}
