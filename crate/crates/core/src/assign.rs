//! User-equilibrium traffic assignment on a (possibly damaged) network.
//!
//! Link travel times follow the BPR form `t = t0 * (1 + alpha * (x/c)^beta)`.
//! Equilibrium is computed with link-based Frank-Wolfe: all-or-nothing
//! loading onto time-shortest paths, then an exact bisection line search on
//! the Beckmann objective. Links whose capacity sits at or below
//! [`EPSILON_CAPACITY`] are treated as absent for routing.

use crate::demand::DemandTable;
use crate::error::{Error, Result};
use crate::network::{Network, ZoneId};
use crate::scalar::{as_f64, cast, Scalar};
use crate::scenario::Scenario;

/// Routable capacity floor: BPR time diverges as capacity approaches zero,
/// so anything at or below this is excluded from routing.
pub const EPSILON_CAPACITY: f64 = 1e-3;

/// Frank-Wolfe controls plus the BPR parameters in force.
#[derive(Debug, Clone, PartialEq)]
pub struct UEParams<S = f64> {
    pub alpha: S,
    pub beta: S,
    /// Stop once (sum x*t - sum y*t) / sum x*t falls to this.
    pub relative_gap: S,
    pub max_iterations: usize,
    /// Bisection stops when the step-length interval is this narrow.
    pub line_search_tol: S,
}

impl<S: Scalar> Default for UEParams<S> {
    fn default() -> Self {
        UEParams {
            alpha: cast(0.15),
            beta: cast(4.0),
            relative_gap: cast(1e-4),
            max_iterations: 500,
            line_search_tol: cast(1e-8),
        }
    }
}

impl<S: Scalar> UEParams<S> {
    pub fn from_scenario(sc: &Scenario<S>) -> Self {
        UEParams { alpha: sc.bpr_alpha, beta: sc.bpr_beta, ..UEParams::default() }
    }
}

/// Effective per-link capacities for one restoration state, aligned with the
/// network's link order.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityVector<S = f64>(Vec<S>);

impl<S: Scalar> CapacityVector<S> {
    /// Pre-disaster capacities.
    pub fn intact(net: &Network<S>) -> Self {
        CapacityVector(net.links().iter().map(|l| l.capacity).collect())
    }

    /// Post-disaster capacities with no recovery applied.
    pub fn unrestored(net: &Network<S>, sc: &Scenario<S>) -> Result<Self> {
        let mut caps = Self::intact(net);
        for d in sc.damaged_links(net)? {
            caps.0[d.index] = d.residual;
        }
        Ok(caps)
    }

    /// Wraps raw per-link capacities; length is checked by the consumers.
    pub fn from_raw(caps: Vec<S>) -> Self {
        CapacityVector(caps)
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn get(&self, index: usize) -> S {
        self.0[index]
    }

    pub(crate) fn set(&mut self, index: usize, value: S) {
        self.0[index] = value;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// BPR link travel time `t0 * (1 + alpha * (x/c)^beta)`.
pub fn bpr_time<S: Scalar>(t0: S, flow: S, capacity: S, alpha: S, beta: S) -> Result<S> {
    check_bpr_inputs(flow, capacity)?;
    Ok(bpr_time_raw(t0, flow, capacity.recip(), alpha, beta))
}

/// Integral of `bpr_time` in the flow argument from 0 to `flow`:
/// `t0*x + alpha*t0*x*(x/c)^beta / (beta+1)`.
pub fn bpr_integral<S: Scalar>(t0: S, flow: S, capacity: S, alpha: S, beta: S) -> Result<S> {
    check_bpr_inputs(flow, capacity)?;
    let ratio = flow * capacity.recip();
    Ok(t0 * flow * (S::one() + alpha * pow_beta(ratio, beta) / (beta + S::one())))
}

fn check_bpr_inputs<S: Scalar>(flow: S, capacity: S) -> Result<()> {
    if as_f64(capacity) <= EPSILON_CAPACITY {
        return Err(Error::CapacityBelowFloor { capacity: as_f64(capacity), floor: EPSILON_CAPACITY });
    }
    if flow < S::zero() {
        return Err(Error::invalid(format!("flow {flow} is negative")));
    }
    Ok(())
}

#[inline]
fn bpr_time_raw<S: Scalar>(t0: S, flow: S, inv_capacity: S, alpha: S, beta: S) -> S {
    t0 * (S::one() + alpha * pow_beta(flow * inv_capacity, beta))
}

/// `(x)^beta` with a fast path for the ubiquitous beta = 4.
#[inline]
pub(crate) fn pow_beta<S: Scalar>(x: S, beta: S) -> S {
    if beta == cast(4.0) {
        let x2 = x * x;
        x2 * x2
    } else {
        x.powf(beta)
    }
}

/// Equilibrium (or best-effort) link flows and times.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentResult<S = f64> {
    /// Per-link flow, zero on non-routable links.
    pub flows: Vec<S>,
    /// Per-link travel time at the final flows; infinite on non-routable links.
    pub times: Vec<S>,
    /// Total system travel time, sum of flow * time.
    pub total_travel_time: S,
    /// Relative gap at the returned flows.
    pub relative_gap: S,
    /// Frank-Wolfe iterations performed (each is one all-or-nothing solve).
    pub iterations: usize,
    /// False when `max_iterations` elapsed before the gap target.
    pub converged: bool,
}

struct Kernel<S> {
    t0: Vec<S>,
    inv_c: Vec<S>,
    routable: Vec<bool>,
    alpha: S,
    beta: S,
}

impl<S: Scalar> Kernel<S> {
    fn new(net: &Network<S>, caps: &CapacityVector<S>, params: &UEParams<S>) -> Result<Self> {
        if caps.len() != net.num_links() {
            return Err(Error::invalid(format!(
                "capacity vector has {} entries for {} links",
                caps.len(),
                net.num_links()
            )));
        }
        let floor: S = cast(EPSILON_CAPACITY);
        let mut t0 = Vec::with_capacity(net.num_links());
        let mut inv_c = Vec::with_capacity(net.num_links());
        let mut routable = Vec::with_capacity(net.num_links());
        for (link, &c) in net.links().iter().zip(caps.as_slice()) {
            if c < S::zero() {
                return Err(Error::invalid(format!("negative capacity on link {}", link.id)));
            }
            let usable = c > floor;
            routable.push(usable);
            t0.push(link.free_flow_time);
            inv_c.push(if usable { c.recip() } else { S::zero() });
        }
        Ok(Kernel { t0, inv_c, routable, alpha: params.alpha, beta: params.beta })
    }

    fn times_into(&self, flows: &[S], out: &mut [S]) {
        for i in 0..self.t0.len() {
            out[i] = if self.routable[i] {
                bpr_time_raw(self.t0[i], flows[i], self.inv_c[i], self.alpha, self.beta)
            } else {
                S::infinity()
            };
        }
    }

    /// Derivative of the Beckmann objective along direction `d` at `x + theta*d`.
    fn directional_derivative(&self, x: &[S], d: &[S], theta: S) -> S {
        let mut g = S::zero();
        for i in 0..self.t0.len() {
            if self.routable[i] && d[i] != S::zero() {
                g += d[i] * bpr_time_raw(self.t0[i], x[i] + theta * d[i], self.inv_c[i], self.alpha, self.beta);
            }
        }
        g
    }
}

/// Shortest-path tree from one origin over finite-time links; `O(n^2)` scan
/// Dijkstra, deterministic: unvisited minimum breaks ties toward the lower
/// zone index, and relaxations scan outgoing links in ascending link id with
/// strictly-improving updates only.
fn shortest_tree<S: Scalar>(
    net: &Network<S>,
    times: &[S],
    origin: usize,
    dist: &mut [S],
    pred: &mut [u32],
    done: &mut [bool],
) {
    const NO_PRED: u32 = u32::MAX;
    dist.iter_mut().for_each(|d| *d = S::infinity());
    pred.iter_mut().for_each(|p| *p = NO_PRED);
    done.iter_mut().for_each(|v| *v = false);
    dist[origin] = S::zero();
    let n = dist.len();
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut best = S::infinity();
        for v in 0..n {
            if !done[v] && dist[v] < best {
                best = dist[v];
                u = v;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        for &li in net.out_links(u) {
            let time = times[li as usize];
            if !time.is_finite() {
                continue;
            }
            let link = &net.links()[li as usize];
            let v = (link.to.0 - 1) as usize;
            let alt = dist[u] + time;
            if alt < dist[v] {
                dist[v] = alt;
                pred[v] = li;
            }
        }
    }
}

/// Loads every OD pair onto its current time-shortest path. Links with
/// non-finite time are treated as absent. Errors if a positive-demand pair
/// has no route.
pub fn all_or_nothing<S: Scalar>(net: &Network<S>, dem: &DemandTable<S>, times: &[S]) -> Result<Vec<S>> {
    if dem.zones() != net.zones() {
        return Err(Error::invalid(format!(
            "demand table has {} zones, network has {}",
            dem.zones(),
            net.zones()
        )));
    }
    if times.len() != net.num_links() {
        return Err(Error::invalid("times vector does not match link count"));
    }
    let n = net.zones() as usize;
    let mut flows = vec![S::zero(); net.num_links()];
    let mut dist = vec![S::zero(); n];
    let mut pred = vec![0u32; n];
    let mut done = vec![false; n];
    for r in 0..n {
        if dem.destinations_from(r).next().is_none() {
            continue;
        }
        shortest_tree(net, times, r, &mut dist, &mut pred, &mut done);
        for (s, q) in dem.destinations_from(r) {
            if !dist[s].is_finite() {
                return Err(Error::Unreachable {
                    origin: ZoneId(r as u32 + 1),
                    destination: ZoneId(s as u32 + 1),
                });
            }
            let mut v = s;
            while v != r {
                let li = pred[v] as usize;
                flows[li] += q;
                v = (net.links()[li].from.0 - 1) as usize;
            }
        }
    }
    Ok(flows)
}

/// Solves user equilibrium with link-based Frank-Wolfe.
pub fn solve_ue<S: Scalar>(
    net: &Network<S>,
    dem: &DemandTable<S>,
    caps: &CapacityVector<S>,
    params: &UEParams<S>,
) -> Result<AssignmentResult<S>> {
    let kernel = Kernel::new(net, caps, params)?;
    let m = net.num_links();
    let mut times = vec![S::zero(); m];
    let zero = vec![S::zero(); m];
    kernel.times_into(&zero, &mut times);
    let mut flows = all_or_nothing(net, dem, &times)?;

    let mut gap = S::infinity();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iterations {
        iterations += 1;
        kernel.times_into(&flows, &mut times);
        let target = all_or_nothing(net, dem, &times)?;
        let mut sxt = S::zero();
        let mut syt = S::zero();
        for i in 0..m {
            if kernel.routable[i] {
                sxt += flows[i] * times[i];
                syt += target[i] * times[i];
            }
        }
        gap = if sxt > S::zero() { (sxt - syt) / sxt } else { S::zero() };
        if gap <= params.relative_gap {
            converged = true;
            break;
        }
        let direction: Vec<S> = (0..m).map(|i| target[i] - flows[i]).collect();
        let theta = line_search(&kernel, &flows, &direction, params.line_search_tol);
        for i in 0..m {
            flows[i] = (flows[i] + theta * direction[i]).max(S::zero());
        }
    }

    kernel.times_into(&flows, &mut times);
    let total_travel_time = (0..m).filter(|&i| kernel.routable[i]).map(|i| flows[i] * times[i]).sum();
    Ok(AssignmentResult { flows, times, total_travel_time, relative_gap: gap, iterations, converged })
}

/// Exact step length: bisection on the Beckmann directional derivative.
fn line_search<S: Scalar>(kernel: &Kernel<S>, x: &[S], d: &[S], tol: S) -> S {
    if kernel.directional_derivative(x, d, S::one()) <= S::zero() {
        return S::one();
    }
    let mut lo = S::zero();
    let mut hi = S::one();
    let half: S = cast(0.5);
    for _ in 0..100 {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) * half;
        if kernel.directional_derivative(x, d, mid) > S::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) * half
}

/// Beckmann objective: sum of BPR integrals over routable links.
pub fn beckmann<S: Scalar>(
    net: &Network<S>,
    caps: &CapacityVector<S>,
    flows: &[S],
    params: &UEParams<S>,
) -> Result<S> {
    let floor: S = cast(EPSILON_CAPACITY);
    let mut total = S::zero();
    for (i, link) in net.links().iter().enumerate() {
        let c = caps.get(i);
        if c > floor {
            total += bpr_integral(link.free_flow_time, flows[i], c, params.alpha, params.beta)?;
        }
    }
    Ok(total)
}

/// Sum of flow * time over links with finite time.
pub fn total_travel_time<S: Scalar>(flows: &[S], times: &[S]) -> S {
    flows
        .iter()
        .zip(times)
        .filter(|(_, t)| t.is_finite())
        .map(|(&x, &t)| x * t)
        .sum()
}

/// Largest absolute node-balance violation: for each zone, outflow minus
/// inflow must equal originating demand minus attracted demand.
pub fn conservation_residual<S: Scalar>(net: &Network<S>, dem: &DemandTable<S>, flows: &[S]) -> S {
    let n = net.zones() as usize;
    let mut balance = vec![S::zero(); n];
    for (i, link) in net.links().iter().enumerate() {
        balance[(link.from.0 - 1) as usize] += flows[i];
        balance[(link.to.0 - 1) as usize] -= flows[i];
    }
    for (r, s, q) in dem.positive_pairs() {
        balance[(r.0 - 1) as usize] -= q;
        balance[(s.0 - 1) as usize] += q;
    }
    balance.into_iter().map(|b| b.abs()).fold(S::zero(), S::max)
}

/// Delimited `link_id flow time` rows for an assignment.
pub fn format_flow_rows<S: Scalar>(net: &Network<S>, result: &AssignmentResult<S>) -> String {
    let mut out = String::from("# link_id flow time\n");
    for (i, link) in net.links().iter().enumerate() {
        out.push_str(&format!("{} {} {}\n", link.id, result.flows[i], result.times[i]));
    }
    out
}
