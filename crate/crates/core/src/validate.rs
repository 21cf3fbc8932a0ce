//! Step-by-step replay of action sequences.

use alloc::vec::Vec;
use core::fmt;

use crate::fan::closing_records;
use crate::graph::{pair, Edge, SlotGraph};
use crate::lattice::Configuration;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Loops may span every module.
    #[default]
    Paper,
    /// A loop must leave at least one auxiliary module outside it.
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Connect,
    Disconnect,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionStep {
    pub kind: StepKind,
    pub edge: Edge,
    /// Loop the connect closes, as an open path between the edge's endpoints.
    pub cycle: Option<Vec<usize>>,
    pub compensation: bool,
}

impl ActionStep {
    pub fn connect(edge: Edge, cycle: Vec<usize>) -> ActionStep {
        ActionStep { kind: StepKind::Connect, edge, cycle: Some(cycle), compensation: false }
    }

    pub fn disconnect(edge: Edge) -> ActionStep {
        ActionStep { kind: StepKind::Disconnect, edge, cycle: None, compensation: false }
    }

    pub fn compensating(mut self) -> ActionStep {
        self.compensation = true;
        self
    }

    pub fn is_connect(&self) -> bool {
        self.kind == StepKind::Connect
    }

    /// Edges the connect relies on.
    pub fn dependencies(&self) -> Vec<(usize, usize)> {
        self.cycle.as_ref().map(|c| c.windows(2).map(|w| pair(w[0], w[1])).collect()).unwrap_or_default()
    }

    pub fn relabeled(&self, f: impl Fn(usize) -> usize) -> ActionStep {
        let e = Edge::new(f(self.edge.u), self.edge.su, f(self.edge.v), self.edge.sv);
        ActionStep {
            kind: self.kind,
            edge: e,
            cycle: self.cycle.as_ref().map(|c| c.iter().map(|&m| f(m)).collect()),
            compensation: self.compensation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Failure {
    UnknownModule,
    AlreadyConnected,
    SlotOccupied,
    DependencyMissing,
    NoPivotFan,
    NoAuxiliaryModule,
    NotConnected,
    Disconnected,
    GoalMismatch,
    StartMismatch,
    ChainBroken,
}

impl Failure {
    pub fn name(self) -> &'static str {
        match self {
            Failure::UnknownModule => "UnknownModule",
            Failure::AlreadyConnected => "AlreadyConnected",
            Failure::SlotOccupied => "SlotOccupied",
            Failure::DependencyMissing => "DependencyMissing",
            Failure::NoPivotFan => "NoPivotFan",
            Failure::NoAuxiliaryModule => "NoAuxiliaryModule",
            Failure::NotConnected => "NotConnected",
            Failure::Disconnected => "Disconnected",
            Failure::GoalMismatch => "GoalMismatch",
            Failure::StartMismatch => "StartMismatch",
            Failure::ChainBroken => "ChainBroken",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCheck {
    pub index: usize,
    pub ok: bool,
    /// Length of the shortest loop the connect closes.
    pub loop_len: Option<usize>,
    pub reason: Option<Failure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub failing_step: Option<usize>,
    pub reason: Option<Failure>,
    pub checks: Vec<StepCheck>,
}

/// Checks one step against the current graph and applies it when valid.
pub fn apply_step(g: &mut SlotGraph, step: &ActionStep, mode: Mode) -> Result<Option<usize>, Failure> {
    let n = g.n();
    let e = step.edge;
    if e.u >= n || e.v >= n || e.u == e.v {
        return Err(Failure::UnknownModule);
    }
    match step.kind {
        StepKind::Connect => {
            if g.has_edge(e.u, e.v) {
                return Err(Failure::AlreadyConnected);
            }
            if !g.is_free(e.u, e.su) || !g.is_free(e.v, e.sv) {
                return Err(Failure::SlotOccupied);
            }
            if let Some(c) = &step.cycle {
                if c.iter().any(|&m| m >= n) {
                    return Err(Failure::UnknownModule);
                }
                if step.dependencies().iter().any(|&(a, b)| !g.has_edge(a, b)) {
                    return Err(Failure::DependencyMissing);
                }
            }
            let recs = closing_records(g, e);
            if recs.is_empty() {
                return Err(Failure::NoPivotFan);
            }
            let shortest = recs.iter().map(|r| r.len()).min().expect("non-empty");
            if mode == Mode::Strict && shortest >= n {
                return Err(Failure::NoAuxiliaryModule);
            }
            g.connect(e);
            Ok(Some(shortest))
        }
        StepKind::Disconnect => {
            if !g.has_edge(e.u, e.v) {
                return Err(Failure::NotConnected);
            }
            let h = g.without(e.u, e.v);
            if !h.is_connected() {
                return Err(Failure::Disconnected);
            }
            *g = h;
            Ok(None)
        }
    }
}

/// Replays `steps` from `start`; the final graph must match `goal` edge for edge.
pub fn replay(start: &SlotGraph, steps: &[ActionStep], goal: &SlotGraph, mode: Mode) -> ValidationReport {
    let mut g = start.clone();
    let mut checks = Vec::with_capacity(steps.len());
    for (i, s) in steps.iter().enumerate() {
        match apply_step(&mut g, s, mode) {
            Ok(loop_len) => checks.push(StepCheck { index: i, ok: true, loop_len, reason: None }),
            Err(f) => {
                checks.push(StepCheck { index: i, ok: false, loop_len: None, reason: Some(f) });
                return ValidationReport { ok: false, failing_step: Some(i), reason: Some(f), checks };
            }
        }
    }
    if g.n() != goal.n() || g.pairs() != goal.pairs() {
        return ValidationReport { ok: false, failing_step: None, reason: Some(Failure::GoalMismatch), checks };
    }
    ValidationReport { ok: true, failing_step: None, reason: None, checks }
}

pub fn validate_sequence(start: &Configuration, steps: &[ActionStep], mapped_goal: &SlotGraph, mode: Mode) -> ValidationReport {
    replay(&start.graph(), steps, mapped_goal, mode)
}
