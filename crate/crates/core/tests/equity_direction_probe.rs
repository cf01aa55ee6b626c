//! Manual probe for budget-spend and equity-direction behavior; run with
//! `cargo test -p netmend-core --test equity_direction_probe -- --ignored --nocapture`.

use std::collections::BTreeMap;

use netmend_core::anneal::{greedy_marginal, run_sa, AnnealConfig, GreedyConfig};
use netmend_core::dataset::sioux_falls;
use netmend_core::objective::{ObjectiveOptions, PenaltyMode};
use netmend_core::scenario::{classify_links_by_income, IncomeClass};
use netmend_core::solution::Solution;

fn class_sums(
    solution: &Solution,
    classes: &BTreeMap<netmend_core::network::LinkId, IncomeClass>,
) -> (f64, f64, f64) {
    let mut sums = (0.0, 0.0, 0.0);
    for (id, v) in solution.plan.iter() {
        match classes[&id] {
            IncomeClass::Low => sums.0 += v,
            IncomeClass::Average => sums.1 += v,
            IncomeClass::High => sums.2 += v,
        }
    }
    sums
}

#[test]
#[ignore]
fn probe_spend_and_equity_directions() {
    let (net, dem, base) = sioux_falls::<f64>();
    let classes = classify_links_by_income(&net, &base).unwrap();

    println!("--- SA one-sided mu=0.5: spend fraction per budget ---");
    for budget in [75.0, 150.0, 225.0, 300.0] {
        let mut sc = base.clone();
        sc.budget = budget;
        sc.mu = 0.5;
        let cfg = AnnealConfig {
            rng_seed: 42,
            options: ObjectiveOptions { penalty: PenaltyMode::OneSided, ..Default::default() },
            ..Default::default()
        };
        let (s, _) = run_sa(&cfg, &sc, &net, &dem).unwrap();
        println!("B={budget}: cost={:.4} frac={:.4}", s.plan.cost(), s.plan.cost() / budget);
    }

    println!("--- SA mu=0: class allocation per budget ---");
    for budget in [75.0, 150.0, 225.0, 300.0] {
        let mut sc = base.clone();
        sc.budget = budget;
        sc.mu = 0.0;
        let cfg = AnnealConfig {
            rng_seed: 42,
            options: ObjectiveOptions { penalty: PenaltyMode::OneSided, ..Default::default() },
            ..Default::default()
        };
        let (s, _) = run_sa(&cfg, &sc, &net, &dem).unwrap();
        let (low, avg, high) = class_sums(&s, &classes);
        println!("B={budget}: low={low:.3} avg={avg:.3} high={high:.3} cost={:.3}", s.plan.cost());
    }

    println!("--- greedy B=300 mu sweep (one-sided penalty): class allocation ---");
    for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let mut sc = base.clone();
        sc.budget = 300.0;
        sc.mu = mu;
        let cfg = GreedyConfig {
            options: ObjectiveOptions { penalty: PenaltyMode::OneSided, ..Default::default() },
            ..Default::default()
        };
        let s = greedy_marginal(&cfg, &sc, &net, &dem).unwrap();
        let (low, avg, high) = class_sums(&s, &classes);
        println!("mu={mu}: low={low:.3} avg={avg:.3} high={high:.3} cost={:.3}", s.plan.cost());
    }

    println!("--- greedy mu=0 (one-sided): class allocation per budget ---");
    for budget in [75.0, 150.0, 225.0, 300.0] {
        let mut sc = base.clone();
        sc.budget = budget;
        sc.mu = 0.0;
        let cfg = GreedyConfig {
            options: ObjectiveOptions { penalty: PenaltyMode::OneSided, ..Default::default() },
            ..Default::default()
        };
        let s = greedy_marginal(&cfg, &sc, &net, &dem).unwrap();
        let (low, avg, high) = class_sums(&s, &classes);
        println!("B={budget}: low={low:.3} avg={avg:.3} high={high:.3} cost={:.3}", s.plan.cost());
    }

    println!("--- SA B=300 mu sweep (one-sided penalty): class allocation ---");
    for (seed, floor) in [(42u64, 1e-6), (7, 1e-6), (2024, 1e-6), (42, 1e-8), (7, 1e-8)] {
        for mu in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let mut sc = base.clone();
            sc.budget = 300.0;
            sc.mu = mu;
            let cfg = AnnealConfig {
                rng_seed: seed,
                min_temperature_fraction: floor,
                options: ObjectiveOptions { penalty: PenaltyMode::OneSided, ..Default::default() },
                ..Default::default()
            };
            let (s, _) = run_sa(&cfg, &sc, &net, &dem).unwrap();
            let (low, avg, high) = class_sums(&s, &classes);
            println!(
                "seed={seed} floor={floor} mu={mu}: low={low:.3} avg={avg:.3} high={high:.3} cost={:.3}",
                s.plan.cost()
            );
        }
    }
}

#[test]
#[ignore]
fn probe_reference_flow_coverage() {
    use netmend_core::assign::{solve_ue, UEParams};
    use netmend_core::objective::{effective_capacities, RestorationPlan};
    let (net, dem, sc) = sioux_falls::<f64>();
    let ue = UEParams::from_scenario(&sc);
    let caps = effective_capacities(&net, &sc, &RestorationPlan::zero(&net, &sc).unwrap()).unwrap();
    let reference = solve_ue(&net, &dem, &caps, &ue).unwrap();
    let damaged = sc.damaged_links(&net).unwrap();
    let mut visible = 0.0;
    let mut invisible = 0.0;
    for d in &damaged {
        if reference.flows[d.index] > 0.0 {
            visible += d.headroom;
        } else {
            invisible += d.headroom;
            println!("zero-flow damaged link {} headroom {:.2}", d.id.0, d.headroom);
        }
    }
    println!("visible headroom {visible:.2}, invisible {invisible:.2}");
}

#[test]
#[ignore]
fn probe_damaged_link_table() {
    use netmend_core::assign::{solve_ue, UEParams};
    use netmend_core::objective::{effective_capacities, RestorationPlan};
    let (net, dem, sc) = sioux_falls::<f64>();
    let ue = UEParams::from_scenario(&sc);
    let caps = effective_capacities(&net, &sc, &RestorationPlan::zero(&net, &sc).unwrap()).unwrap();
    let reference = solve_ue(&net, &dem, &caps, &ue).unwrap();
    let classes = classify_links_by_income(&net, &sc).unwrap();
    println!("id from to residual headroom refflow class");
    for d in sc.damaged_links(&net).unwrap() {
        let link = &net.links()[d.index];
        println!(
            "{:>3} {:>3} {:>3} {:>7.2} {:>7.2} {:>9.3} {}",
            d.id.0, link.from.0, link.to.0, d.residual, d.headroom,
            reference.flows[d.index], classes[&d.id]
        );
    }
}
