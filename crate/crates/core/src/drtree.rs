//! Ordering connect and disconnect actions under loop dependencies.
//!
//! A connect can only fire while every edge of its loop is present, and a
//! disconnect may never split the robot. The scheduler emits one connect at a
//! time, preferring connects that free one of their own loop edges for an
//! immediate disconnect, and relaxes its admission rule over three rounds when
//! nothing qualifies.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::Error;
use crate::fan::{closing_records, CycleRecord};
use crate::graph::{Edge, SlotGraph};
use crate::isomap::ConnectAction;
use crate::validate::ActionStep;

type Pair = (usize, usize);

/// Dependency edges of every connect: one edge set per loop that can close
/// it, the primary loop first and the rest by increasing length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepMap {
    pub alternatives: Vec<Vec<(CycleRecord, Vec<Pair>)>>,
}

impl DepMap {
    pub fn primary(&self, c: usize) -> &[Pair] {
        &self.alternatives[c][0].1
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }
}

pub fn compute_dependencies(s_con: &[ConnectAction], _s_discon: &[Pair], _start: &SlotGraph, _goal: &SlotGraph) -> DepMap {
    let alternatives = s_con
        .iter()
        .map(|c| {
            let mut alts: Vec<&CycleRecord> = c.cycles.iter().collect();
            alts[1..].sort_by_key(|r| r.len());
            alts.into_iter().map(|r| (r.clone(), r.path_pairs())).collect()
        })
        .collect();
    DepMap { alternatives }
}

/// Connects as nodes, each connect's dependencies on other connects as its
/// children, built by inserting from the last connect backwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrTree {
    pub root: Option<usize>,
    pub children: Vec<Vec<usize>>,
}

pub fn build_tree(s_con: &[ConnectAction], deps: &DepMap) -> DrTree {
    let mut children = alloc::vec![Vec::new(); s_con.len()];
    for c in (0..s_con.len()).rev() {
        for (j, other) in s_con.iter().enumerate() {
            if j != c && deps.primary(c).contains(&other.edge.pair()) {
                children[c].push(j);
            }
        }
    }
    DrTree { root: s_con.len().checked_sub(1), children }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub steps: Vec<ActionStep>,
    pub compensations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Candidate {
    Connect { c: usize, alt: usize, paired: Option<Pair> },
    Disconnect(Pair),
}

struct Scheduler<'a> {
    con: &'a [ConnectAction],
    deps: DepMap,
    g: SlotGraph,
    goal: BTreeSet<Pair>,
    pending_con: Vec<usize>,
    pending_dis: Vec<(Pair, bool)>,
    removed: BTreeMap<Pair, Edge>,
    steps: Vec<ActionStep>,
    compensations: usize,
}

impl<'a> Scheduler<'a> {
    fn is_pending_connect(&self, p: Pair) -> bool {
        self.pending_con.iter().any(|&c| self.con[c].edge.pair() == p)
    }

    fn is_pending_disconnect(&self, p: Pair) -> bool {
        self.pending_dis.iter().any(|&(q, _)| q == p)
    }

    fn achievable(&self, c: usize) -> Vec<usize> {
        (0..self.deps.alternatives[c].len())
            .filter(|&a| self.deps.alternatives[c][a].1.iter().all(|&p| self.g.has_edge(p.0, p.1) || self.is_pending_connect(p)))
            .collect()
    }

    /// Whether a pending connect other than `except` cannot do without `d`.
    fn needed(&self, d: Pair, except: Option<usize>) -> bool {
        self.pending_con.iter().filter(|&&c| Some(c) != except).any(|&c| {
            let alts = self.achievable(c);
            !alts.is_empty() && alts.iter().all(|&a| self.deps.alternatives[c][a].1.contains(&d))
        })
    }

    /// First loop of `c` whose edges are all present, when its slots are free.
    fn satisfied(&self, c: usize) -> Option<usize> {
        let e = self.con[c].edge;
        if self.g.has_edge(e.u, e.v) || !self.g.is_free(e.u, e.su) || !self.g.is_free(e.v, e.sv) {
            return None;
        }
        (0..self.deps.alternatives[c].len())
            .find(|&a| self.deps.alternatives[c][a].1.iter().all(|&p| self.g.has_edge(p.0, p.1)))
            .filter(|_| !closing_records(&self.g, e).is_empty())
    }

    /// Whether `d` may be removed right after connecting `c` (or now, if `c` is `None`).
    fn safe(&self, d: Pair, c: Option<usize>) -> bool {
        if !self.is_pending_disconnect(d) || !self.g.has_edge(d.0, d.1) || self.needed(d, c) {
            return false;
        }
        let mut h = self.g.clone();
        if let Some(c) = c {
            h.connect(self.con[c].edge);
        }
        h.disconnect(d.0, d.1);
        h.is_connected()
    }

    fn collect(&self, round: u8) -> Vec<Candidate> {
        let mut out = Vec::new();
        for &c in &self.pending_con {
            let Some(alt) = self.satisfied(c) else { continue };
            let dep = &self.deps.alternatives[c][alt].1;
            let paired = dep.iter().copied().find(|&d| self.safe(d, Some(c)));
            let admit = match round {
                1 => paired.is_some(),
                2 => dep.iter().any(|&d| self.is_pending_disconnect(d) || (!self.needed(d, Some(c)) && !self.goal.contains(&d))),
                _ => true,
            };
            if admit {
                out.push(Candidate::Connect { c, alt, paired });
            }
        }
        if round >= 2 {
            for &(d, _) in &self.pending_dis {
                if self.safe(d, None) {
                    out.push(Candidate::Disconnect(d));
                }
            }
        }
        out
    }

    /// Pending disconnects that only `c` still needs.
    fn unblocks(&self, c: usize) -> usize {
        self.pending_dis.iter().filter(|&&(d, _)| self.needed(d, None) && !self.needed(d, Some(c))).count()
    }

    fn select(&self, cands: &[Candidate]) -> Candidate {
        *cands
            .iter()
            .min_by_key(|cand| match **cand {
                Candidate::Connect { c, .. } => (0, usize::MAX - self.unblocks(c), c, (0, 0)),
                Candidate::Disconnect(d) => (1, usize::MAX, 0, d),
            })
            .expect("non-empty candidate list")
    }

    fn emit_disconnect(&mut self, d: Pair) {
        let i = self.pending_dis.iter().position(|&(q, _)| q == d).expect("pending");
        let (_, comp) = self.pending_dis.remove(i);
        let e = self.g.disconnect(d.0, d.1).expect("present");
        self.removed.insert(d, e);
        let step = ActionStep::disconnect(e);
        self.steps.push(if comp { step.compensating() } else { step });
    }

    fn emit_connect(&mut self, c: usize, alt: usize) {
        self.pending_con.retain(|&x| x != c);
        let e = self.con[c].edge;
        self.g.connect(e);
        let cycle = self.deps.alternatives[c][alt].0.vertices.clone();
        self.steps.push(ActionStep::connect(e, cycle));
    }

    /// Restores any dependency edge that a pending connect can no longer do without.
    fn handle_reinsertion(&mut self) -> Result<(), Error> {
        loop {
            let broken = self.pending_con.iter().copied().find(|&c| self.achievable(c).is_empty());
            let Some(c) = broken else { return Ok(()) };
            let missing = self.deps.primary(c).iter().copied().find(|&p| !self.g.has_edge(p.0, p.1) && !self.is_pending_connect(p));
            let Some(p) = missing else { return Err(Error::ScheduleFailure) };
            let Some(&e) = self.removed.get(&p) else { return Err(Error::ScheduleFailure) };
            let recs = closing_records(&self.g, e);
            let Some(r) = recs.first() else { return Err(Error::ScheduleFailure) };
            self.g.connect(e);
            self.steps.push(ActionStep::connect(e, r.vertices.clone()).compensating());
            self.pending_dis.push((p, true));
            self.compensations += 1;
        }
    }
}

/// Interleaves `s_con` and `s_discon` into one executable sequence.
pub fn schedule(s_con: &[ConnectAction], s_discon: &[Pair], start: &SlotGraph, goal: &SlotGraph) -> Result<Schedule, Error> {
    let deps = compute_dependencies(s_con, s_discon, start, goal);
    let mut s = Scheduler {
        con: s_con,
        deps,
        g: start.clone(),
        goal: goal.pairs().into_iter().collect(),
        pending_con: (0..s_con.len()).collect(),
        pending_dis: s_discon.iter().map(|&p| (p, false)).collect(),
        removed: BTreeMap::new(),
        steps: Vec::new(),
        compensations: 0,
    };
    let budget = 4 * (s_con.len() + s_discon.len()) + 16;
    let mut round = 1u8;
    while !s.pending_con.is_empty() || !s.pending_dis.is_empty() {
        if s.steps.len() > budget {
            return Err(Error::ScheduleFailure);
        }
        let cands = s.collect(round);
        if cands.is_empty() {
            round += 1;
            if round > 3 {
                return Err(Error::ScheduleFailure);
            }
            continue;
        }
        match s.select(&cands) {
            Candidate::Connect { c, alt, paired } => {
                s.emit_connect(c, alt);
                if let Some(d) = paired.filter(|&d| s.safe(d, None)) {
                    s.emit_disconnect(d);
                }
            }
            Candidate::Disconnect(d) => s.emit_disconnect(d),
        }
        s.handle_reinsertion()?;
        round = 1;
    }
    Ok(Schedule { steps: s.steps, compensations: s.compensations })
}
