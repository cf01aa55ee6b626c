//! Restoration plans and the objectives that rank them.
//!
//! A plan buys back capacity on damaged links. Plans are scored by
//! `R = mu * D + (1 - mu) * E` where `D` measures lost network efficiency
//! and `E` measures income inequality of the restoration, plus penalty terms
//! that guard the budget and capacity bounds when the score is used as a
//! solver Hamiltonian.

use std::collections::BTreeMap;

use crate::assign::{
    bpr_time, solve_ue, AssignmentResult, CapacityVector, UEParams, EPSILON_CAPACITY,
};
use crate::demand::DemandTable;
use crate::error::{Error, Result};
use crate::network::{LinkId, Network};
use crate::scalar::{as_f64, cast, Scalar};
use crate::scenario::{DamagedLink, Scenario};

/// Which equity term enters the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EquityMode {
    /// Gini over zone incomes; constant with respect to the plan.
    Literal,
    /// Quadratic income-deviation index; constant with respect to the plan.
    Quadratic,
    /// Gini over income-weighted restoration ratios; plan-sensitive.
    #[default]
    Responsive,
}

/// How the budget penalty treats underspend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyMode {
    /// Penalize any deviation from the budget, (cost - B)^2.
    #[default]
    Equality,
    /// Penalize overspend only, max(0, cost - B)^2.
    OneSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ObjectiveOptions {
    pub equity: EquityMode,
    pub penalty: PenaltyMode,
}

/// Capacity bought back per damaged link.
#[derive(Debug, Clone, PartialEq)]
pub struct RestorationPlan<S = f64> {
    recovery: BTreeMap<LinkId, S>,
}

impl<S: Scalar> RestorationPlan<S> {
    /// Builds a plan over exactly the scenario's damaged links. Entries for
    /// links not damaged are rejected; omitted damaged links default to zero
    /// recovery. Each amount must lie within `[0, headroom]` (a hair of
    /// floating-point slack is clamped).
    pub fn new(net: &Network<S>, sc: &Scenario<S>, recovery: BTreeMap<LinkId, S>) -> Result<Self> {
        let slack: S = cast(1e-9);
        let mut plan = BTreeMap::new();
        for d in sc.damaged_links(net)? {
            let amount = recovery.get(&d.id).copied().unwrap_or(S::zero());
            if amount < -slack || amount > d.headroom + slack {
                return Err(Error::invalid(format!(
                    "recovery {amount} on link {} outside [0, {}]",
                    d.id, d.headroom
                )));
            }
            plan.insert(d.id, amount.max(S::zero()).min(d.headroom));
        }
        for id in recovery.keys() {
            if !plan.contains_key(id) {
                return Err(Error::invalid(format!("link {id} is not damaged in this scenario")));
            }
        }
        Ok(RestorationPlan { recovery: plan })
    }

    /// The all-zeros plan.
    pub fn zero(net: &Network<S>, sc: &Scenario<S>) -> Result<Self> {
        Self::new(net, sc, BTreeMap::new())
    }

    /// Total capacity bought: the plan's cost against the budget.
    pub fn cost(&self) -> S {
        self.recovery.values().copied().sum()
    }

    pub fn recovery(&self, id: LinkId) -> Option<S> {
        self.recovery.get(&id).copied()
    }

    /// (link, recovery) pairs in ascending link id.
    pub fn iter(&self) -> impl Iterator<Item = (LinkId, S)> + '_ {
        self.recovery.iter().map(|(&id, &v)| (id, v))
    }

    pub fn len(&self) -> usize {
        self.recovery.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recovery.is_empty()
    }

    /// Values aligned with `damaged` (which is ascending by id, like `iter`).
    pub(crate) fn to_vec(&self, damaged: &[DamagedLink<S>]) -> Vec<S> {
        damaged.iter().map(|d| self.recovery[&d.id]).collect()
    }

    /// Builds a plan from values aligned with `damaged`, clamping each into
    /// its bounds (solver arithmetic may overshoot by an ulp).
    pub(crate) fn from_vec(damaged: &[DamagedLink<S>], values: &[S]) -> Self {
        let recovery = damaged
            .iter()
            .zip(values)
            .map(|(d, &v)| (d.id, v.max(S::zero()).min(d.headroom)))
            .collect();
        RestorationPlan { recovery }
    }
}

/// Post-restoration effective capacities: residual + recovery on damaged
/// links, pre-disaster capacity elsewhere.
pub fn effective_capacities<S: Scalar>(
    net: &Network<S>,
    sc: &Scenario<S>,
    plan: &RestorationPlan<S>,
) -> Result<CapacityVector<S>> {
    let mut caps = CapacityVector::intact(net);
    for d in sc.damaged_links(net)? {
        let recovery = plan
            .recovery(d.id)
            .ok_or_else(|| Error::invalid(format!("plan has no entry for damaged link {}", d.id)))?;
        caps.set(d.index, d.residual + recovery);
    }
    Ok(caps)
}

/// Relative efficiency loss `(t_post - t_pre) / t_pre`, clamped at zero.
pub fn deficiency_full<S: Scalar>(t_pre: S, t_post: S) -> Result<S> {
    if !(t_pre > S::zero()) {
        return Err(Error::invalid(format!("pre-disaster travel time {t_pre} must be positive")));
    }
    Ok(((t_post - t_pre) / t_pre).max(S::zero()))
}

/// Fixed-flow surrogate of [`deficiency_full`]: travel times are re-priced at
/// frozen flows instead of re-solving equilibrium. Numerator sums
/// `alpha*x*t0*((x/c_post)^beta - (x/c_pre)^beta)`; denominator is the frozen
/// pre-disaster total travel time.
pub fn deficiency_surrogate<S: Scalar>(
    flows: &[S],
    caps_pre: &[S],
    caps_post: &[S],
    free_flow_times: &[S],
    alpha: S,
    beta: S,
) -> Result<S> {
    let den = surrogate_denominator(flows, caps_pre, free_flow_times, alpha, beta)?;
    let num = surrogate_numerator(flows, caps_pre, caps_post, free_flow_times, alpha, beta)?;
    Ok(num / den)
}

pub(crate) fn surrogate_denominator<S: Scalar>(
    flows: &[S],
    caps_pre: &[S],
    free_flow_times: &[S],
    alpha: S,
    beta: S,
) -> Result<S> {
    if flows.len() != caps_pre.len() || flows.len() != free_flow_times.len() {
        return Err(Error::invalid("surrogate inputs must share one length"));
    }
    let mut den = S::zero();
    for i in 0..flows.len() {
        if flows[i] > S::zero() {
            den += flows[i] * bpr_time(free_flow_times[i], flows[i], caps_pre[i], alpha, beta)?;
        }
    }
    if !(den > S::zero()) {
        return Err(Error::invalid("frozen pre-disaster travel time is zero; no flow to re-price"));
    }
    Ok(den)
}

pub(crate) fn surrogate_numerator<S: Scalar>(
    flows: &[S],
    caps_pre: &[S],
    caps_post: &[S],
    free_flow_times: &[S],
    alpha: S,
    beta: S,
) -> Result<S> {
    if flows.len() != caps_post.len() {
        return Err(Error::invalid("surrogate inputs must share one length"));
    }
    let floor: S = cast(EPSILON_CAPACITY);
    let mut num = S::zero();
    for i in 0..flows.len() {
        let x = flows[i];
        if x <= S::zero() || caps_post[i] == caps_pre[i] {
            continue;
        }
        if caps_post[i] <= floor {
            return Err(Error::CapacityBelowFloor {
                capacity: as_f64(caps_post[i]),
                floor: EPSILON_CAPACITY,
            });
        }
        let post = crate::assign::pow_beta(x / caps_post[i], beta);
        let pre = crate::assign::pow_beta(x / caps_pre[i], beta);
        num += alpha * x * free_flow_times[i] * (post - pre);
    }
    Ok(num)
}

/// Gini coefficient: `sum_{r,s} |v_r - v_s| / (2 n^2 mean)`.
pub fn gini<S: Scalar>(values: &[S]) -> Result<S> {
    let n = values.len();
    if n == 0 {
        return Err(Error::invalid("gini of an empty vector"));
    }
    let mut total = S::zero();
    for &v in values {
        if v < S::zero() || !v.is_finite() {
            return Err(Error::invalid(format!("gini requires finite non-negative values, found {v}")));
        }
        total += v;
    }
    let n_s: S = cast(n as f64);
    let mean = total / n_s;
    if !(mean > S::zero()) {
        return Err(Error::invalid("gini undefined for zero mean"));
    }
    let mut spread = S::zero();
    for &a in values {
        for &b in values {
            spread += (a - b).abs();
        }
    }
    Ok(spread / (cast::<S>(2.0) * n_s * n_s * mean))
}

/// Gini over the zone income map; independent of any plan.
pub fn equity_literal<S: Scalar>(sc: &Scenario<S>) -> Result<S> {
    let incomes: Vec<S> = sc.incomes.values().copied().collect();
    gini(&incomes)
}

/// Quadratic income-deviation index
/// `sum_{r,s} (I_r - I_s)^2 / (2 n^2 w_bar mean)`; `w_bar` is an exogenous
/// normalizer (1 when unknown). Independent of any plan.
pub fn equity_quadratic<S: Scalar>(sc: &Scenario<S>, w_bar: S) -> Result<S> {
    if !(w_bar > S::zero()) {
        return Err(Error::invalid("w_bar must be positive"));
    }
    let incomes: Vec<S> = sc.incomes.values().copied().collect();
    let n = incomes.len();
    if n == 0 {
        return Err(Error::invalid("no zone incomes"));
    }
    let n_s: S = cast(n as f64);
    let mean = incomes.iter().copied().sum::<S>() / n_s;
    if !(mean > S::zero()) {
        return Err(Error::invalid("quadratic equity undefined for zero mean income"));
    }
    let mut spread = S::zero();
    for &a in &incomes {
        for &b in &incomes {
            spread += (a - b) * (a - b);
        }
    }
    Ok(spread / (cast::<S>(2.0) * n_s * n_s * w_bar * mean))
}

/// Plan-sensitive equity: Gini over `v_r = I_r * rho_r`, where `rho_r` is the
/// restored share of the maximum recoverable capacity incident to zone `r`.
/// Zones with no damaged incident links have `rho_r = 1`, so full restoration
/// reduces to [`equity_literal`].
pub fn equity_responsive<S: Scalar>(
    net: &Network<S>,
    sc: &Scenario<S>,
    plan: &RestorationPlan<S>,
) -> Result<S> {
    let damaged = sc.damaged_links(net)?;
    let precomp = ResponsivePrecomp::new(net, sc, &damaged)?;
    let recovery = plan.to_vec(&damaged);
    precomp.evaluate(&recovery)
}

/// Precomputed zone incidence for the responsive equity term.
pub(crate) struct ResponsivePrecomp<S> {
    /// Damaged-vector indices incident to each zone.
    incident: Vec<Vec<usize>>,
    /// Total headroom incident to each zone.
    max_incident: Vec<S>,
    incomes: Vec<S>,
}

impl<S: Scalar> ResponsivePrecomp<S> {
    pub(crate) fn new(net: &Network<S>, sc: &Scenario<S>, damaged: &[DamagedLink<S>]) -> Result<Self> {
        let n = net.zones() as usize;
        let mut incident = vec![Vec::new(); n];
        let mut max_incident = vec![S::zero(); n];
        for (k, d) in damaged.iter().enumerate() {
            let link = &net.links()[d.index];
            for zone in [link.from, link.to] {
                let z = (zone.0 - 1) as usize;
                incident[z].push(k);
                max_incident[z] += d.headroom;
            }
        }
        let incomes = (1..=net.zones())
            .map(|z| sc.income(crate::network::ZoneId(z)))
            .collect::<Result<Vec<S>>>()?;
        for (z, &income) in incomes.iter().enumerate() {
            if !(income > S::zero()) {
                return Err(Error::invalid(format!("zone {} income must be positive", z + 1)));
            }
        }
        Ok(ResponsivePrecomp { incident, max_incident, incomes })
    }

    pub(crate) fn evaluate(&self, recovery: &[S]) -> Result<S> {
        let mut values = vec![S::zero(); self.incomes.len()];
        self.values_into(recovery, &mut values);
        gini(&values)
    }

    pub(crate) fn values_into(&self, recovery: &[S], out: &mut [S]) {
        for z in 0..self.incomes.len() {
            let rho = if self.max_incident[z] > S::zero() {
                let restored: S = self.incident[z].iter().map(|&k| recovery[k]).sum();
                (restored / self.max_incident[z]).min(S::one())
            } else {
                S::one()
            };
            out[z] = self.incomes[z] * rho;
        }
        // If every zone touches damage and nothing is restored, all values are
        // zero and the Gini mean vanishes. The shares are then uniform, and
        // Gini is scale-invariant, so the uniform-scaling limit is the Gini of
        // raw incomes; use that so the measure is defined everywhere.
        if out.iter().all(|v| *v == S::zero()) {
            out.copy_from_slice(&self.incomes);
        }
    }
}

/// `R = mu * D + (1 - mu) * E`.
pub fn resilience<S: Scalar>(deficiency: S, equity: S, mu: S) -> S {
    mu * deficiency + (S::one() - mu) * equity
}

/// One scored plan, term by term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveBreakdown<S = f64> {
    pub deficiency: S,
    pub equity: S,
    /// `R = mu*D + (1-mu)*E`.
    pub objective: S,
    pub budget_penalty: S,
    pub capacity_penalty: S,
    /// `R` plus both penalties.
    pub hamiltonian: S,
}

pub(crate) fn penalties<S: Scalar>(
    plan: &RestorationPlan<S>,
    net: &Network<S>,
    sc: &Scenario<S>,
    mode: PenaltyMode,
) -> Result<(S, S)> {
    let damaged = sc.damaged_links(net)?;
    let recovery = plan.to_vec(&damaged);
    Ok(penalties_from_slice(&recovery, &damaged, sc, mode))
}

/// Penalty terms for a recovery vector aligned with `damaged`. This is the
/// single arithmetic path for penalties, so solver-internal energies and
/// [`hamiltonian`] agree bit for bit.
pub(crate) fn penalties_from_slice<S: Scalar>(
    recovery: &[S],
    damaged: &[DamagedLink<S>],
    sc: &Scenario<S>,
    mode: PenaltyMode,
) -> (S, S) {
    let cost: S = recovery.iter().copied().sum();
    let deviation = match mode {
        PenaltyMode::Equality => cost - sc.budget,
        PenaltyMode::OneSided => (cost - sc.budget).max(S::zero()),
    };
    let budget_penalty = sc.lambda1 * deviation * deviation;
    let mut capacity_penalty = S::zero();
    for (k, d) in damaged.iter().enumerate() {
        let over = (d.residual + recovery[k] - (d.residual + d.headroom)).max(S::zero());
        capacity_penalty += sc.lambda2 * over * over;
    }
    (budget_penalty, capacity_penalty)
}

/// Projects a recovery vector onto the feasible set: clamps every entry into
/// `[0, headroom]`, then, if the total still exceeds `budget`, scales every
/// entry by `budget / total` and re-clamps. The result's cost never exceeds
/// `budget` by more than float noise; it may fall below it (clamping only
/// removes capacity).
pub fn enforce_budget<S: Scalar>(recovery: &mut [S], damaged: &[DamagedLink<S>], budget: S) {
    for (v, d) in recovery.iter_mut().zip(damaged) {
        *v = (*v).max(S::zero()).min(d.headroom);
    }
    let total: S = recovery.iter().copied().sum();
    if total > budget {
        if budget <= S::zero() {
            for v in recovery.iter_mut() {
                *v = S::zero();
            }
        } else {
            let factor = budget / total;
            for (v, d) in recovery.iter_mut().zip(damaged) {
                *v = (*v * factor).max(S::zero()).min(d.headroom);
            }
        }
    }
}

/// Scores a plan as the annealer sees it: surrogate deficiency at frozen
/// `reference` flows, the selected equity term, and both penalties.
pub fn hamiltonian<S: Scalar>(
    plan: &RestorationPlan<S>,
    sc: &Scenario<S>,
    net: &Network<S>,
    reference: &AssignmentResult<S>,
    options: &ObjectiveOptions,
) -> Result<ObjectiveBreakdown<S>> {
    let caps_pre = CapacityVector::intact(net);
    let caps_post = effective_capacities(net, sc, plan)?;
    let t0: Vec<S> = net.links().iter().map(|l| l.free_flow_time).collect();
    let deficiency = deficiency_surrogate(
        &reference.flows,
        caps_pre.as_slice(),
        caps_post.as_slice(),
        &t0,
        sc.bpr_alpha,
        sc.bpr_beta,
    )?;
    let equity = equity_term(plan, sc, net, options.equity)?;
    finish_breakdown(plan, sc, net, deficiency, equity, options.penalty)
}

pub(crate) fn equity_term<S: Scalar>(
    plan: &RestorationPlan<S>,
    sc: &Scenario<S>,
    net: &Network<S>,
    mode: EquityMode,
) -> Result<S> {
    match mode {
        EquityMode::Literal => equity_literal(sc),
        EquityMode::Quadratic => equity_quadratic(sc, S::one()),
        EquityMode::Responsive => equity_responsive(net, sc, plan),
    }
}

pub(crate) fn finish_breakdown<S: Scalar>(
    plan: &RestorationPlan<S>,
    sc: &Scenario<S>,
    net: &Network<S>,
    deficiency: S,
    equity: S,
    penalty_mode: PenaltyMode,
) -> Result<ObjectiveBreakdown<S>> {
    let objective = resilience(deficiency, equity, sc.mu);
    let (budget_penalty, capacity_penalty) = penalties(plan, net, sc, penalty_mode)?;
    Ok(ObjectiveBreakdown {
        deficiency,
        equity,
        objective,
        budget_penalty,
        capacity_penalty,
        hamiltonian: objective + budget_penalty + capacity_penalty,
    })
}

/// Scores a plan with the full bi-level truth: equilibrium is re-solved at
/// the plan's capacities and compared against the intact-network equilibrium.
pub fn score_plan<S: Scalar>(
    plan: &RestorationPlan<S>,
    sc: &Scenario<S>,
    net: &Network<S>,
    dem: &DemandTable<S>,
    options: &ObjectiveOptions,
    ue: &UEParams<S>,
) -> Result<(ObjectiveBreakdown<S>, AssignmentResult<S>)> {
    let intact = solve_ue(net, dem, &CapacityVector::intact(net), ue)?;
    score_plan_with_baseline(plan, sc, net, dem, options, ue, intact.total_travel_time)
}

pub(crate) fn score_plan_with_baseline<S: Scalar>(
    plan: &RestorationPlan<S>,
    sc: &Scenario<S>,
    net: &Network<S>,
    dem: &DemandTable<S>,
    options: &ObjectiveOptions,
    ue: &UEParams<S>,
    t_pre: S,
) -> Result<(ObjectiveBreakdown<S>, AssignmentResult<S>)> {
    let caps = effective_capacities(net, sc, plan)?;
    let post = solve_ue(net, dem, &caps, ue)?;
    let deficiency = deficiency_full(t_pre, post.total_travel_time)?;
    let equity = equity_term(plan, sc, net, options.equity)?;
    let breakdown = finish_breakdown(plan, sc, net, deficiency, equity, options.penalty)?;
    Ok((breakdown, post))
}
