//! Solver output type and the shared energy-evaluation context.
//!
//! Every solver (annealer, genetic algorithm, greedy, brute force, external
//! service) scores candidate plans through one [`EnergyContext`] so that a
//! returned plan re-scored by [`crate::objective::hamiltonian`] or
//! [`crate::objective::score_plan`] reproduces the solver's numbers exactly.

use rand::distributions::uniform::SampleUniform;
use rand::Rng;

use crate::assign::{solve_ue, AssignmentResult, CapacityVector, UEParams};
use crate::demand::DemandTable;
use crate::error::Result;
use crate::network::Network;
use crate::objective::{
    deficiency_full, effective_capacities, enforce_budget, equity_literal, equity_quadratic,
    finish_breakdown, gini, penalties_from_slice, resilience, score_plan_with_baseline,
    surrogate_denominator, surrogate_numerator, EquityMode, ObjectiveBreakdown, ObjectiveOptions,
    ResponsivePrecomp, RestorationPlan,
};
use crate::scalar::{as_f64, cast, Scalar};
use crate::scenario::{DamagedLink, Scenario};

/// How solvers price the efficiency term of a candidate plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitnessMode {
    /// Re-price frozen disaster-equilibrium flows (fast; the default solver
    /// energy).
    #[default]
    Surrogate,
    /// Re-solve user equilibrium per candidate (the full bi-level objective).
    FullUe,
}

/// A solver's answer: the plan plus its full re-scored breakdown and run
/// metadata.
#[derive(Debug, Clone)]
pub struct Solution<S = f64> {
    pub plan: RestorationPlan<S>,
    /// Re-scored from the plan at return with a full equilibrium re-solve;
    /// never a stale solver-internal value.
    pub breakdown: ObjectiveBreakdown<S>,
    pub solver: &'static str,
    pub wall_time_s: f64,
    /// Number of candidate-plan evaluations performed.
    pub evaluations: u64,
    pub converged: bool,
    /// Hard-constraint satisfaction: recovery within `[0, headroom]` on every
    /// link and cost within the budget (to 10^-6).
    pub feasible: bool,
}

/// Reusable per-thread buffers for energy evaluations.
pub(crate) struct Scratch<S> {
    pub caps_post: Vec<S>,
    pub zone_values: Vec<S>,
}

/// Immutable precomputed state for scoring recovery vectors (aligned with the
/// scenario's damaged links in ascending id order).
pub(crate) struct EnergyContext<'a, S: Scalar> {
    pub net: &'a Network<S>,
    pub dem: &'a DemandTable<S>,
    pub sc: &'a Scenario<S>,
    pub damaged: Vec<DamagedLink<S>>,
    pub options: ObjectiveOptions,
    pub mode: FitnessMode,
    pub ue: UEParams<S>,
    /// Equilibrium on the damaged, unrestored network: the frozen flows the
    /// surrogate re-prices.
    pub reference: AssignmentResult<S>,
    /// Total travel time of the intact-network equilibrium.
    pub t_pre: S,
    caps_pre: Vec<S>,
    t0: Vec<S>,
    denominator: S,
    responsive: Option<ResponsivePrecomp<S>>,
    equity_constant: Option<S>,
}

impl<'a, S: Scalar> EnergyContext<'a, S> {
    pub fn new(
        net: &'a Network<S>,
        dem: &'a DemandTable<S>,
        sc: &'a Scenario<S>,
        options: ObjectiveOptions,
        mode: FitnessMode,
    ) -> Result<Self> {
        let ue = UEParams::from_scenario(sc);
        let damaged = sc.damaged_links(net)?;
        let caps_pre: Vec<S> = net.links().iter().map(|l| l.capacity).collect();
        let t0: Vec<S> = net.links().iter().map(|l| l.free_flow_time).collect();
        let intact = solve_ue(net, dem, &CapacityVector::intact(net), &ue)?;
        let unrestored = effective_capacities(net, sc, &RestorationPlan::zero(net, sc)?)?;
        let reference = solve_ue(net, dem, &unrestored, &ue)?;
        let denominator =
            surrogate_denominator(&reference.flows, &caps_pre, &t0, sc.bpr_alpha, sc.bpr_beta)?;
        let (responsive, equity_constant) = match options.equity {
            EquityMode::Responsive => (Some(ResponsivePrecomp::new(net, sc, &damaged)?), None),
            EquityMode::Literal => (None, Some(equity_literal(sc)?)),
            EquityMode::Quadratic => (None, Some(equity_quadratic(sc, S::one())?)),
        };
        Ok(EnergyContext {
            net,
            dem,
            sc,
            damaged,
            options,
            mode,
            ue,
            reference,
            t_pre: intact.total_travel_time,
            caps_pre,
            t0,
            denominator,
            responsive,
            equity_constant,
        })
    }

    pub fn scratch(&self) -> Scratch<S> {
        Scratch {
            caps_post: self.caps_pre.clone(),
            zone_values: vec![S::zero(); self.net.zones() as usize],
        }
    }

    /// Solver energy of a recovery vector under the configured fitness mode:
    /// `mu*D + (1-mu)*E` plus both quadratic penalties.
    pub fn energy(&self, recovery: &[S], scratch: &mut Scratch<S>) -> Result<S> {
        let deficiency = match self.mode {
            FitnessMode::Surrogate => self.surrogate_deficiency(recovery, scratch)?,
            FitnessMode::FullUe => self.full_deficiency(recovery)?,
        };
        let equity = self.equity(recovery, scratch)?;
        let (bp, cp) = penalties_from_slice(recovery, &self.damaged, self.sc, self.options.penalty);
        Ok(resilience(deficiency, equity, self.sc.mu) + bp + cp)
    }

    /// The genetic-algorithm fitness: `mu*D + (1-mu)*E` plus a linear
    /// overspend penalty `rho * max(0, cost - B)`; capacity bounds are
    /// handled by repair, not by penalty.
    pub fn ga_fitness(&self, recovery: &[S], scratch: &mut Scratch<S>, rho: S) -> S {
        let deficiency = match self.mode {
            FitnessMode::Surrogate => self.surrogate_deficiency(recovery, scratch),
            FitnessMode::FullUe => self.full_deficiency(recovery),
        };
        let (Ok(deficiency), Ok(equity)) = (deficiency, self.equity(recovery, scratch)) else {
            return S::infinity();
        };
        let cost: S = recovery.iter().copied().sum();
        let overspend = if cost > self.sc.budget {
            (cost - self.sc.budget) * rho
        } else {
            S::zero()
        };
        resilience(deficiency, equity, self.sc.mu) + overspend
    }

    fn surrogate_deficiency(&self, recovery: &[S], scratch: &mut Scratch<S>) -> Result<S> {
        scratch.caps_post.copy_from_slice(&self.caps_pre);
        for (k, d) in self.damaged.iter().enumerate() {
            scratch.caps_post[d.index] = d.residual + recovery[k];
        }
        let numerator = surrogate_numerator(
            &self.reference.flows,
            &self.caps_pre,
            &scratch.caps_post,
            &self.t0,
            self.sc.bpr_alpha,
            self.sc.bpr_beta,
        )?;
        Ok(numerator / self.denominator)
    }

    fn full_deficiency(&self, recovery: &[S]) -> Result<S> {
        let plan = RestorationPlan::from_vec(&self.damaged, recovery);
        let caps = effective_capacities(self.net, self.sc, &plan)?;
        let post = solve_ue(self.net, self.dem, &caps, &self.ue)?;
        deficiency_full(self.t_pre, post.total_travel_time)
    }

    fn equity(&self, recovery: &[S], scratch: &mut Scratch<S>) -> Result<S> {
        match (&self.responsive, self.equity_constant) {
            (Some(precomp), _) => {
                precomp.values_into(recovery, &mut scratch.zone_values);
                gini(&scratch.zone_values)
            }
            (None, Some(constant)) => Ok(constant),
            (None, None) => unreachable!("one equity source is always configured"),
        }
    }

    /// A uniform-random plan repaired onto the budget: `U[0, headroom]` per
    /// link, then [`enforce_budget`].
    pub fn random_plan<R: Rng>(&self, rng: &mut R) -> Vec<S>
    where
        S: SampleUniform,
    {
        let mut recovery: Vec<S> = self
            .damaged
            .iter()
            .map(|d| {
                if d.headroom > S::zero() {
                    rng.gen_range(S::zero()..=d.headroom)
                } else {
                    S::zero()
                }
            })
            .collect();
        enforce_budget(&mut recovery, &self.damaged, self.sc.budget);
        recovery
    }

    pub fn plan(&self, recovery: &[S]) -> RestorationPlan<S> {
        RestorationPlan::from_vec(&self.damaged, recovery)
    }

    /// Full bi-level breakdown of a recovery vector (equilibrium re-solved at
    /// its capacities, compared against the cached intact equilibrium).
    pub fn full_breakdown(&self, recovery: &[S]) -> Result<(ObjectiveBreakdown<S>, AssignmentResult<S>)> {
        let plan = self.plan(recovery);
        score_plan_with_baseline(
            &plan,
            self.sc,
            self.net,
            self.dem,
            &self.options,
            &self.ue,
            self.t_pre,
        )
    }

    /// Surrogate-mode breakdown (identical to
    /// [`crate::objective::hamiltonian`] at the cached reference flows).
    pub fn surrogate_breakdown(&self, recovery: &[S], scratch: &mut Scratch<S>) -> Result<ObjectiveBreakdown<S>> {
        let deficiency = self.surrogate_deficiency(recovery, scratch)?;
        let equity = self.equity(recovery, scratch)?;
        finish_breakdown(
            &self.plan(recovery),
            self.sc,
            self.net,
            deficiency,
            equity,
            self.options.penalty,
        )
    }

    /// Packages a solver's best vector: clamps it into hard bounds, re-scores
    /// it with a full equilibrium re-solve, and computes the feasibility flag.
    pub fn make_solution(
        &self,
        recovery: &[S],
        solver: &'static str,
        wall_time_s: f64,
        evaluations: u64,
        converged: bool,
    ) -> Result<Solution<S>> {
        let plan = self.plan(recovery);
        let (breakdown, _) = self.full_breakdown(recovery)?;
        let cost = plan.cost();
        let tol: S = cast(1e-6);
        let feasible = cost <= self.sc.budget + tol
            && plan
                .iter()
                .zip(&self.damaged)
                .all(|((_, v), d)| v >= S::zero() && v <= d.headroom);
        Ok(Solution {
            plan,
            breakdown,
            solver,
            wall_time_s,
            evaluations,
            converged,
            feasible,
        })
    }

    pub fn dimension(&self) -> usize {
        self.damaged.len()
    }
}

/// Wall-clock seconds elapsed since `start`, as a plain f64 for reporting.
pub(crate) fn elapsed_s(start: std::time::Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

/// Convenience for logging energies in messages.
#[allow(dead_code)]
pub(crate) fn energy_display<S: Scalar>(e: S) -> f64 {
    as_f64(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::sioux_falls;
    use crate::objective::hamiltonian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn context_energy_matches_hamiltonian_bit_for_bit() {
        let (net, dem, sc) = sioux_falls::<f64>();
        let options = ObjectiveOptions::default();
        let ctx = EnergyContext::new(&net, &dem, &sc, options, FitnessMode::Surrogate).unwrap();
        let mut scratch = ctx.scratch();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let recovery = ctx.random_plan(&mut rng);
            let fast = ctx.energy(&recovery, &mut scratch).unwrap();
            let plan = ctx.plan(&recovery);
            let slow = hamiltonian(&plan, &sc, &net, &ctx.reference, &options).unwrap();
            assert_eq!(fast, slow.hamiltonian, "energy paths diverged");
            let breakdown = ctx.surrogate_breakdown(&recovery, &mut scratch).unwrap();
            assert_eq!(breakdown.hamiltonian, slow.hamiltonian);
            assert_eq!(breakdown.deficiency, slow.deficiency);
            assert_eq!(breakdown.equity, slow.equity);
        }
    }

    #[test]
    fn random_plans_respect_bounds_and_budget() {
        let (net, dem, sc) = sioux_falls::<f64>();
        let ctx = EnergyContext::new(
            &net,
            &dem,
            &sc,
            ObjectiveOptions::default(),
            FitnessMode::Surrogate,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let recovery = ctx.random_plan(&mut rng);
            let cost: f64 = recovery.iter().sum();
            assert!(cost <= sc.budget + 1e-9);
            for (v, d) in recovery.iter().zip(&ctx.damaged) {
                assert!(*v >= 0.0 && *v <= d.headroom);
            }
        }
    }

    #[test]
    fn full_and_surrogate_deficiencies_agree_at_zero_restoration_sign() {
        let (net, dem, sc) = sioux_falls::<f64>();
        let ctx = EnergyContext::new(
            &net,
            &dem,
            &sc,
            ObjectiveOptions::default(),
            FitnessMode::Surrogate,
        )
        .unwrap();
        let mut scratch = ctx.scratch();
        let zero = vec![0.0; ctx.dimension()];
        // At zero restoration the surrogate re-prices the reference flows on
        // their own network: numerator strictly positive (damage raised
        // congestion on flowed links).
        let d0 = ctx.surrogate_deficiency(&zero, &mut scratch).unwrap();
        assert!(d0 > 0.0, "{d0}");
        // Full restoration zeroes the surrogate up to capacity round-trip
        // noise (residual + headroom re-adds what residual subtracted).
        let full: Vec<f64> = ctx.damaged.iter().map(|d| d.headroom).collect();
        let d_full = ctx.surrogate_deficiency(&full, &mut scratch).unwrap();
        assert!(d_full.abs() <= 1e-12, "{d_full}");
    }
}
