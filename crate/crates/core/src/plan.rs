//! End-to-end planning: chain search, action sets, scheduling, validation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::drtree::schedule;
use crate::error::Error;
use crate::isomap::{bit_search_with, check_pair, invert, BitChain, BitParams, Hop, Mapping};
use crate::lattice::{translate_to_origin, Configuration, ModuleId};
use crate::validate::{replay, ActionStep, Failure, Mode, StepCheck, StepKind, ValidationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct PlanParams {
    pub bit: BitParams,
    pub mode: Mode,
    /// Drop connect/disconnect pairs on the same edge when the rest still validates.
    pub prune: bool,
}

/// One hop of a plan. Module indices in `steps` refer to `from`; both
/// configurations carry the start's module ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HopPlan {
    pub from: Configuration,
    pub to: Configuration,
    pub steps: Vec<ActionStep>,
    pub s_con: usize,
    pub s_discon: usize,
    pub compensations: usize,
}

impl HopPlan {
    /// Expected step count before pruning.
    pub fn accounted_steps(&self) -> usize {
        self.s_con + self.s_discon + 2 * self.compensations
    }

    /// The hop's target graph expressed over `from`'s indices.
    pub fn mapped_goal(&self) -> crate::graph::SlotGraph {
        let ids = self.from.id_map();
        let perm: Vec<usize> = self.to.ids().iter().map(|id| ids[id]).collect();
        self.to.graph().permuted(&perm)
    }

    pub fn validate(&self, mode: Mode) -> ValidationReport {
        replay(&self.from.graph(), &self.steps, &self.mapped_goal(), mode)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub start: Configuration,
    pub goal: Configuration,
    pub hops: Vec<HopPlan>,
    /// Goal module id for every start module id, in start order.
    pub assignment: Vec<(ModuleId, ModuleId)>,
    pub samples: usize,
}

impl Plan {
    pub fn step_count(&self) -> usize {
        self.hops.iter().map(|h| h.steps.len()).sum()
    }

    pub fn connects(&self) -> usize {
        self.hops.iter().flat_map(|h| &h.steps).filter(|s| s.kind == StepKind::Connect).count()
    }

    pub fn compensations(&self) -> usize {
        self.hops.iter().map(|h| h.compensations).sum()
    }

    pub fn accounted_steps(&self) -> usize {
        self.hops.iter().map(HopPlan::accounted_steps).sum()
    }

    /// First failing hop and its report, if any.
    pub fn validate(&self, mode: Mode) -> Result<(), (usize, ValidationReport)> {
        for (i, h) in self.hops.iter().enumerate() {
            let r = h.validate(mode);
            if !r.ok {
                return Err((i, r));
            }
        }
        Ok(())
    }
}

fn same_placement(a: &Configuration, b: &Configuration) -> bool {
    if a.n() != b.n() {
        return false;
    }
    let mut pa: Vec<(ModuleId, _)> = a.ids().iter().copied().zip(translate_to_origin(a.cells())).collect();
    let mut pb: Vec<(ModuleId, _)> = b.ids().iter().copied().zip(translate_to_origin(b.cells())).collect();
    pa.sort_unstable();
    pb.sort_unstable();
    pa == pb
}

/// Removes connect/disconnect pairs of the same module pair, keeping each
/// removal only if the hop still validates.
fn prune(hop: &mut HopPlan, mode: Mode) {
    let mut i = 0;
    while i < hop.steps.len() {
        let p = hop.steps[i].edge.pair();
        let later = (i + 1..hop.steps.len()).find(|&j| hop.steps[j].edge.pair() == p);
        if let Some(j) = later.filter(|&j| hop.steps[i].kind != hop.steps[j].kind) {
            let mut trial = hop.clone();
            trial.steps.remove(j);
            trial.steps.remove(i);
            if trial.validate(mode).ok {
                *hop = trial;
                continue;
            }
        }
        i += 1;
    }
}

/// Schedules and validates every hop of `chain`, carrying the start's ids
/// through each intermediate.
fn realize(start: &Configuration, chain: &BitChain, params: &PlanParams) -> Result<(Vec<HopPlan>, Mapping), Error> {
    let mut labels: Vec<ModuleId> = start.ids().to_vec();
    let mut total: Mapping = (0..start.n()).collect();
    let mut hops = Vec::with_capacity(chain.hops.len());
    for Hop { from, to, from_leaf, to_leaf, mapping, sets } in &chain.hops {
        let s = schedule(&sets.s_con, &sets.s_discon, &from_leaf.base, &to_leaf.base)?;
        let from_l = Configuration::new(labels.iter().copied().zip(from.cells().iter().copied()))?;
        let mut next = labels.clone();
        for (j, &m) in mapping.iter().enumerate() {
            next[m] = labels[j];
        }
        let to_l = Configuration::new(next.iter().copied().zip(to.cells().iter().copied()))?;
        let mut hop = HopPlan {
            from: from_l,
            to: to_l,
            steps: s.steps,
            s_con: sets.s_con.len(),
            s_discon: sets.s_discon.len(),
            compensations: s.compensations,
        };
        if !hop.validate(params.mode).ok {
            return Err(Error::ScheduleFailure);
        }
        if params.prune {
            prune(&mut hop, params.mode);
        }
        hops.push(hop);
        total = total.iter().map(|&t| mapping[t]).collect();
        labels = next;
    }
    Ok((hops, total))
}

/// Plans a reconfiguration from `start` to `goal`. Chains whose hops cannot be
/// scheduled or validated are skipped in favour of the next candidate.
pub fn plan(start: &Configuration, goal: &Configuration, params: &PlanParams) -> Result<Plan, Error> {
    check_pair(start, goal)?;
    if same_placement(start, goal) {
        let assignment = start.ids().iter().map(|&id| (id, id)).collect();
        return Ok(Plan { start: start.clone(), goal: goal.clone(), hops: Vec::new(), assignment, samples: 0 });
    }
    let mut found = None;
    let mut rejected = false;
    let chain = bit_search_with(start, goal, &params.bit, |chain| match realize(start, chain, params) {
        Ok(r) => {
            found = Some(r);
            true
        }
        Err(_) => {
            rejected = true;
            false
        }
    });
    let chain = match chain {
        Ok(c) => c,
        Err(Error::SearchExhausted { .. }) if rejected => return Err(Error::ScheduleFailure),
        Err(e) => return Err(e),
    };
    let (hops, total) = found.expect("accepted chains are realized");
    let assignment = (0..start.n()).map(|i| (start.id(i), goal.id(total[i]))).collect();
    Ok(Plan { start: start.clone(), goal: goal.clone(), hops, assignment, samples: chain.samples })
}

/// Connected module pairs of the canonical graph, by id.
pub fn id_pairs(c: &Configuration) -> BTreeSet<(ModuleId, ModuleId)> {
    c.graph()
        .pairs()
        .into_iter()
        .map(|(a, b)| {
            let (x, y) = (c.id(a), c.id(b));
            (x.min(y), x.max(y))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanReport {
    pub ok: bool,
    pub failing_hop: Option<usize>,
    /// Index over all steps of the plan.
    pub failing_step: Option<usize>,
    pub reason: Option<Failure>,
    pub checks: Vec<StepCheck>,
}

/// Replays every hop and checks that the hops chain up from `start` to
/// `goal`: connections must agree module by module at every boundary, with
/// `assignment` naming the goal id each start id ends as.
pub fn validate_plan(
    start: &Configuration,
    goal: &Configuration,
    hops: &[HopPlan],
    assignment: &[(ModuleId, ModuleId)],
    mode: Mode,
) -> PlanReport {
    let mut checks = Vec::new();
    let fail = |hop: Option<usize>, step: Option<usize>, reason: Failure, checks: Vec<StepCheck>| PlanReport {
        ok: false,
        failing_hop: hop,
        failing_step: step,
        reason: Some(reason),
        checks,
    };
    let mut current = id_pairs(start);
    let mut offset = 0;
    for (h, hop) in hops.iter().enumerate() {
        if hop.from.n() != start.n() || id_pairs(&hop.from) != current {
            let reason = if h == 0 { Failure::StartMismatch } else { Failure::ChainBroken };
            return fail(Some(h), None, reason, checks);
        }
        if hop.to.id_map().keys().ne(hop.from.id_map().keys()) {
            return fail(Some(h), None, Failure::UnknownModule, checks);
        }
        let r = hop.validate(mode);
        for c in &r.checks {
            checks.push(StepCheck { index: offset + c.index, ..c.clone() });
        }
        if !r.ok {
            let step = r.failing_step.map(|i| offset + i);
            return fail(Some(h), step, r.reason.unwrap_or(Failure::GoalMismatch), checks);
        }
        offset += hop.steps.len();
        current = id_pairs(&hop.to);
    }
    let to_goal: BTreeMap<ModuleId, ModuleId> = assignment.iter().copied().collect();
    let ids: BTreeSet<ModuleId> = start.ids().iter().copied().collect();
    if to_goal.len() != start.n() || to_goal.keys().copied().collect::<BTreeSet<_>>() != ids {
        return fail(None, None, Failure::GoalMismatch, checks);
    }
    let mapped: BTreeSet<(ModuleId, ModuleId)> = current
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (to_goal[&a], to_goal[&b]);
            (x.min(y), x.max(y))
        })
        .collect();
    if goal.n() != start.n() || mapped != id_pairs(goal) {
        return fail(None, None, Failure::GoalMismatch, checks);
    }
    PlanReport { ok: true, failing_hop: None, failing_step: None, reason: None, checks }
}

impl Plan {
    pub fn report(&self, mode: Mode) -> PlanReport {
        validate_plan(&self.start, &self.goal, &self.hops, &self.assignment, mode)
    }
}

/// Goal index for every start index under `plan`'s assignment.
pub fn assignment_mapping(plan: &Plan) -> Mapping {
    let gi = plan.goal.id_map();
    plan.assignment.iter().map(|(_, g)| gi[g]).collect()
}

/// Inverse of [`assignment_mapping`].
pub fn goal_to_start(plan: &Plan) -> Mapping {
    invert(&assignment_mapping(plan))
}
