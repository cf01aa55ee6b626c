//! Damage scenarios: what broke, the recovery budget, objective weights,
//! and the zone income map used by the equity objectives.
//!
//! Scenario files are TOML:
//!
//! ```toml
//! budget = 150.0
//! mu = 0.2              # optional, default 0.2
//!
//! [bpr]                 # optional, defaults alpha = 0.15, beta = 4.0
//! alpha = 0.15
//! beta = 4.0
//!
//! [penalty]             # optional, defaults lambda1 = lambda2 = 1000.0
//! lambda1 = 1000.0
//! lambda2 = 1000.0
//!
//! damaged = [           # post-disaster residual capacity per damaged link
//!   { link = 1, residual = 0.01 },
//! ]
//!
//! [incomes]             # one entry per zone: class name or numeric index
//! 1 = "high"
//! 2 = 1.5
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::assign::EPSILON_CAPACITY;
use crate::demand::DemandTable;
use crate::error::{Error, Result};
use crate::network::{LinkId, Network, ZoneId};
use crate::scalar::{as_f64, cast, Scalar};

/// Income band of a zone. The numeric index is the band's income weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IncomeClass {
    Low,
    Average,
    High,
}

impl IncomeClass {
    pub const ALL: [IncomeClass; 3] = [IncomeClass::Low, IncomeClass::Average, IncomeClass::High];

    /// Income index of the band: 0.6, 1.0, 1.5.
    pub fn value<S: Scalar>(self) -> S {
        match self {
            IncomeClass::Low => cast(0.6),
            IncomeClass::Average => cast(1.0),
            IncomeClass::High => cast(1.5),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IncomeClass::Low => "low",
            IncomeClass::Average => "average",
            IncomeClass::High => "high",
        }
    }

    pub fn from_name(name: &str) -> Option<IncomeClass> {
        match name.to_ascii_lowercase().as_str() {
            "low" => Some(IncomeClass::Low),
            "average" | "avg" | "middle" => Some(IncomeClass::Average),
            "high" => Some(IncomeClass::High),
            _ => None,
        }
    }

    /// Maps an arbitrary income index to the nearest band; ties go to the
    /// lower band.
    pub fn classify_value<S: Scalar>(value: S) -> IncomeClass {
        let mut best = IncomeClass::Low;
        let mut best_gap = S::infinity();
        for class in IncomeClass::ALL {
            let gap = (value - class.value()).abs();
            if gap < best_gap {
                best_gap = gap;
                best = class;
            }
        }
        best
    }
}

impl fmt::Display for IncomeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<S = f64> {
    /// Total recovery capacity that may be bought (same units as capacity).
    pub budget: S,
    /// Efficiency weight in R = mu*D + (1-mu)*E.
    pub mu: S,
    pub bpr_alpha: S,
    pub bpr_beta: S,
    /// Budget-penalty weight in the solver Hamiltonian.
    pub lambda1: S,
    /// Capacity-bound penalty weight in the solver Hamiltonian.
    pub lambda2: S,
    /// Post-disaster residual capacity per damaged link.
    pub damaged: BTreeMap<LinkId, S>,
    /// Income index per zone.
    pub incomes: BTreeMap<ZoneId, S>,
}

/// A damaged link resolved against a network, in ascending-id order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamagedLink<S = f64> {
    pub id: LinkId,
    /// 0-based position in the network's link list.
    pub index: usize,
    /// Post-disaster capacity C0.
    pub residual: S,
    /// Maximum recoverable capacity, C - C0.
    pub headroom: S,
}

impl<S: Scalar> Scenario<S> {
    /// Damaged links resolved against `net`, ascending link id.
    pub fn damaged_links(&self, net: &Network<S>) -> Result<Vec<DamagedLink<S>>> {
        self.damaged
            .iter()
            .map(|(&id, &residual)| {
                let index = net.index_of(id).ok_or(Error::UnknownLink(id))?;
                let capacity = net.links()[index].capacity;
                if residual < S::zero() || residual > capacity {
                    return Err(Error::invalid(format!(
                        "residual {residual} on link {id} outside [0, {capacity}]"
                    )));
                }
                Ok(DamagedLink { id, index, residual, headroom: capacity - residual })
            })
            .collect()
    }

    pub fn income(&self, zone: ZoneId) -> Result<S> {
        self.incomes.get(&zone).copied().ok_or(Error::UnknownZone(zone))
    }
}

/// Classifies each damaged link by the minimum of its endpoint incomes.
pub fn classify_links_by_income<S: Scalar>(
    net: &Network<S>,
    sc: &Scenario<S>,
) -> Result<BTreeMap<LinkId, IncomeClass>> {
    let mut classes = BTreeMap::new();
    for &id in sc.damaged.keys() {
        let link = net.link(id)?;
        let income = sc.income(link.from)?.min(sc.income(link.to)?);
        classes.insert(id, IncomeClass::classify_value(income));
    }
    Ok(classes)
}

// ---------------------------------------------------------------------------
// File format

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    budget: f64,
    mu: Option<f64>,
    bpr: Option<RawBpr>,
    penalty: Option<RawPenalty>,
    damaged: Option<Vec<RawDamaged>>,
    incomes: BTreeMap<String, toml::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBpr {
    alpha: Option<f64>,
    beta: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPenalty {
    lambda1: Option<f64>,
    lambda2: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDamaged {
    link: u32,
    residual: f64,
}

pub fn parse_scenario<S: Scalar>(text: &str) -> Result<Scenario<S>> {
    let raw: RawScenario =
        toml::from_str(text).map_err(|e| Error::invalid(format!("scenario file: {e}")))?;
    let bpr = raw.bpr.unwrap_or(RawBpr { alpha: None, beta: None });
    let penalty = raw.penalty.unwrap_or(RawPenalty { lambda1: None, lambda2: None });

    let mut damaged = BTreeMap::new();
    for d in raw.damaged.unwrap_or_default() {
        if d.link == 0 {
            return Err(Error::invalid("damaged link ids are 1-based"));
        }
        if damaged.insert(LinkId(d.link), cast::<S>(d.residual)).is_some() {
            return Err(Error::invalid(format!("link {} listed as damaged twice", d.link)));
        }
    }

    let mut incomes = BTreeMap::new();
    for (zone, value) in raw.incomes {
        let id: u32 = zone
            .parse()
            .map_err(|_| Error::invalid(format!("income key `{zone}` is not a zone id")))?;
        if id == 0 {
            return Err(Error::invalid("income zone ids are 1-based"));
        }
        let income: S = match value {
            toml::Value::String(name) => IncomeClass::from_name(&name)
                .map(IncomeClass::value)
                .ok_or_else(|| Error::invalid(format!("unknown income class `{name}` for zone {id}")))?,
            toml::Value::Float(v) => cast(v),
            toml::Value::Integer(v) => cast(v as f64),
            other => {
                return Err(Error::invalid(format!(
                    "income for zone {id} must be a class name or number, found {other}"
                )))
            }
        };
        incomes.insert(ZoneId(id), income);
    }

    Ok(Scenario {
        budget: cast(raw.budget),
        mu: cast(raw.mu.unwrap_or(0.2)),
        bpr_alpha: cast(bpr.alpha.unwrap_or(0.15)),
        bpr_beta: cast(bpr.beta.unwrap_or(4.0)),
        lambda1: cast(penalty.lambda1.unwrap_or(1e3)),
        lambda2: cast(penalty.lambda2.unwrap_or(1e3)),
        damaged,
        incomes,
    })
}

pub fn load_scenario<S: Scalar>(path: impl AsRef<Path>) -> Result<Scenario<S>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    parse_scenario(&text)
}

// ---------------------------------------------------------------------------
// Validation

/// A single reason a (network, demand, scenario) triple is unusable.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MuOutOfRange(f64),
    NegativeBudget(f64),
    NegativeWeight { name: &'static str, value: f64 },
    BadBpr { name: &'static str, value: f64 },
    UnknownDamagedLink(LinkId),
    ResidualOutOfRange { link: LinkId, residual: f64, capacity: f64 },
    MissingIncome(ZoneId),
    NonPositiveIncome { zone: ZoneId, income: f64 },
    ZoneCountMismatch { network: u32, demand: u32 },
    UnreachableDemand { origin: ZoneId, destination: ZoneId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MuOutOfRange(mu) => write!(f, "mu = {mu} outside [0, 1]"),
            Violation::NegativeBudget(b) => write!(f, "budget = {b} is negative"),
            Violation::NegativeWeight { name, value } => write!(f, "{name} = {value} is negative"),
            Violation::BadBpr { name, value } => write!(f, "bpr {name} = {value} must be positive"),
            Violation::UnknownDamagedLink(id) => write!(f, "damaged link {id} does not exist in the network"),
            Violation::ResidualOutOfRange { link, residual, capacity } => {
                write!(f, "residual {residual} on link {link} outside [0, {capacity}]")
            }
            Violation::MissingIncome(zone) => write!(f, "zone {zone} has no income entry"),
            Violation::NonPositiveIncome { zone, income } => {
                write!(f, "zone {zone} income {income} must be positive")
            }
            Violation::ZoneCountMismatch { network, demand } => {
                write!(f, "network has {network} zones but demand table has {demand}")
            }
            Violation::UnreachableDemand { origin, destination } => {
                write!(
                    f,
                    "demand from zone {origin} to zone {destination} cannot be routed on the damaged network"
                )
            }
        }
    }
}

/// Checks a scenario against a network and demand table, collecting every
/// violation rather than stopping at the first.
pub fn validate<S: Scalar>(net: &Network<S>, dem: &DemandTable<S>, sc: &Scenario<S>) -> Vec<Violation> {
    let mut violations = Vec::new();

    if !(sc.mu >= S::zero() && sc.mu <= S::one()) {
        violations.push(Violation::MuOutOfRange(as_f64(sc.mu)));
    }
    if sc.budget < S::zero() {
        violations.push(Violation::NegativeBudget(as_f64(sc.budget)));
    }
    for (name, value) in [("lambda1", sc.lambda1), ("lambda2", sc.lambda2)] {
        if value < S::zero() {
            violations.push(Violation::NegativeWeight { name, value: as_f64(value) });
        }
    }
    for (name, value) in [("alpha", sc.bpr_alpha), ("beta", sc.bpr_beta)] {
        if !(value > S::zero()) {
            violations.push(Violation::BadBpr { name, value: as_f64(value) });
        }
    }

    for (&id, &residual) in &sc.damaged {
        match net.index_of(id) {
            None => violations.push(Violation::UnknownDamagedLink(id)),
            Some(index) => {
                let capacity = net.links()[index].capacity;
                if residual < S::zero() || residual > capacity {
                    violations.push(Violation::ResidualOutOfRange {
                        link: id,
                        residual: as_f64(residual),
                        capacity: as_f64(capacity),
                    });
                }
            }
        }
    }

    for zone in 1..=net.zones() {
        match sc.incomes.get(&ZoneId(zone)) {
            None => violations.push(Violation::MissingIncome(ZoneId(zone))),
            Some(&income) => {
                if !(income > S::zero()) || !income.is_finite() {
                    violations.push(Violation::NonPositiveIncome { zone: ZoneId(zone), income: as_f64(income) });
                }
            }
        }
    }

    if dem.zones() != net.zones() {
        violations.push(Violation::ZoneCountMismatch { network: net.zones(), demand: dem.zones() });
        return violations; // reachability below indexes by zone; stop here
    }

    // Reachability on the damaged, unrestored network: links whose effective
    // capacity sits at or below the routable floor are absent.
    let n = net.zones() as usize;
    let mut routable = vec![true; net.num_links()];
    for (&id, &residual) in &sc.damaged {
        if let Some(index) = net.index_of(id) {
            if as_f64(residual) <= EPSILON_CAPACITY {
                routable[index] = false;
            }
        }
    }
    let mut reach = vec![false; n];
    for r in 0..n {
        let needs: Vec<usize> = dem.destinations_from(r).map(|(s, _)| s).collect();
        if needs.is_empty() {
            continue;
        }
        reach.iter_mut().for_each(|v| *v = false);
        reach[r] = true;
        let mut stack = vec![r];
        while let Some(u) = stack.pop() {
            for &li in net.out_links(u) {
                let link = &net.links()[li as usize];
                if !routable[li as usize] {
                    continue;
                }
                let v = (link.to.0 - 1) as usize;
                if !reach[v] {
                    reach[v] = true;
                    stack.push(v);
                }
            }
        }
        for s in needs {
            if !reach[s] {
                violations.push(Violation::UnreachableDemand {
                    origin: ZoneId(r as u32 + 1),
                    destination: ZoneId(s as u32 + 1),
                });
            }
        }
    }

    violations
}
