//! Pivot-fan loops: the loops a morph can close.
//!
//! A loop is closable when the modules along an open path all bend the same
//! way around a common pivot: at every interior module the two path edges sit
//! on perpendicular slots, and the quarter-turn from the incoming to the
//! outgoing slot is identical along the path. The closing edge then takes the
//! slots that face the pivot at both ends, which must be free.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{pair, Edge, SlotGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Turn {
    Counterclockwise,
    Clockwise,
}

impl Turn {
    pub fn quarter_turns(self) -> i32 {
        match self {
            Turn::Counterclockwise => 1,
            Turn::Clockwise => 3,
        }
    }

    fn from_quarter_turns(q: i32) -> Option<Turn> {
        match q.rem_euclid(4) {
            1 => Some(Turn::Counterclockwise),
            3 => Some(Turn::Clockwise),
            _ => None,
        }
    }
}

/// A closable loop: the open path `vertices` plus the edge `closing` joining its ends.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycleRecord {
    pub vertices: Vec<usize>,
    pub closing: Edge,
    pub turn: Turn,
}

impl CycleRecord {
    /// Number of modules on the loop.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Existing edges the loop relies on, as sorted module pairs.
    pub fn path_pairs(&self) -> Vec<(usize, usize)> {
        self.vertices.windows(2).map(|w| pair(w[0], w[1])).collect()
    }

    pub fn contains_pair(&self, p: (usize, usize)) -> bool {
        self.path_pairs().contains(&p) || self.closing.pair() == p
    }
}

/// Turn at `x` when entering from `prev` and leaving toward `next`.
fn turn_at(g: &SlotGraph, prev: usize, x: usize, next: usize) -> Option<Turn> {
    let a = g.slot_toward(x, prev)?.index() as i32;
    let b = g.slot_toward(x, next)?.index() as i32;
    Turn::from_quarter_turns(b - a)
}

/// Builds the record for path `p` (at least three modules, uniform turn already checked).
fn record_for(g: &SlotGraph, p: &[usize], turn: Turn) -> Option<CycleRecord> {
    let (u, v) = (p[0], p[p.len() - 1]);
    let t = turn.quarter_turns();
    let su = g.slot_toward(u, p[1])?.rotate(-t);
    let sv = g.slot_toward(v, p[p.len() - 2])?.rotate(t);
    if !g.is_free(u, su) || !g.is_free(v, sv) {
        return None;
    }
    Some(CycleRecord { vertices: p.to_vec(), closing: Edge::new(u, su, v, sv), turn })
}

/// Calls `f` with every simple path from `u` of at least three modules whose
/// interior turns are uniform, pruning as soon as the turn breaks.
pub fn for_each_fan_path(g: &SlotGraph, u: usize, mut f: impl FnMut(&[usize], Turn)) {
    let mut on_path = vec![false; g.n()];
    let mut path = vec![u];
    on_path[u] = true;
    walk(g, &mut path, &mut on_path, None, &mut f);
}

fn walk(
    g: &SlotGraph,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    turn: Option<Turn>,
    f: &mut impl FnMut(&[usize], Turn),
) {
    let x = path[path.len() - 1];
    for y in g.neighbors(x) {
        if on_path[y] {
            continue;
        }
        let next_turn = if path.len() >= 2 {
            match turn_at(g, path[path.len() - 2], x, y) {
                Some(t) if turn.is_none_or(|t0| t0 == t) => Some(t),
                _ => continue,
            }
        } else {
            None
        };
        path.push(y);
        on_path[y] = true;
        if let Some(t) = next_turn {
            f(path, t);
        }
        walk(g, path, on_path, next_turn, f);
        on_path[y] = false;
        path.pop();
    }
}

/// Every closable loop between the non-adjacent pair `(a, b)`, one record per path.
pub fn fan_records(g: &SlotGraph, a: usize, b: usize) -> Vec<CycleRecord> {
    let (u, v) = pair(a, b);
    if u == v || g.has_edge(u, v) {
        return Vec::new();
    }
    let mut out = Vec::new();
    for_each_fan_path(g, u, |p, t| {
        if p[p.len() - 1] == v {
            if let Some(r) = record_for(g, p, t) {
                out.push(r);
            }
        }
    });
    out
}

/// Every closable loop in `g`, ordered by `(u, v)` and then by path discovery.
pub fn fan_candidates(g: &SlotGraph) -> Vec<CycleRecord> {
    let mut out = Vec::new();
    for u in 0..g.n() {
        let mut here = Vec::new();
        for_each_fan_path(g, u, |p, t| {
            let v = p[p.len() - 1];
            if v > u && !g.has_edge(u, v) {
                if let Some(r) = record_for(g, p, t) {
                    here.push(r);
                }
            }
        });
        here.sort_by_key(|r| r.closing.v);
        out.extend(here);
    }
    out
}

/// Loops through which `e` could be added to `g` with exactly the slots of `e`.
pub fn closing_records(g: &SlotGraph, e: Edge) -> Vec<CycleRecord> {
    fan_records(g, e.u, e.v).into_iter().filter(|r| r.closing == e).collect()
}

/// Whether the present edge `(a, b)` lies on a closable loop of the graph without it.
pub fn edge_on_fan(g: &SlotGraph, a: usize, b: usize, max_len: usize) -> bool {
    let Some(e) = g.edge(a, b) else { return false };
    let h = g.without(a, b);
    closing_records(&h, e).iter().any(|r| r.len() <= max_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dir::Dir;

    #[test]
    fn straight_triple_has_no_loop() {
        let g = SlotGraph::from_cells(&[(0, 0), (1, 0), (2, 0)]);
        assert!(fan_records(&g, 0, 2).is_empty());
    }

    #[test]
    fn l_triomino_ends_close_a_triangle() {
        let g = SlotGraph::from_cells(&[(0, 0), (1, 0), (1, 1)]);
        let r = fan_records(&g, 0, 2);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].vertices, [0, 1, 2]);
        // both ends face the empty inner corner cell (0, 1)
        assert_eq!(r[0].closing, Edge::new(0, Dir::Top, 2, Dir::Right));
    }

    #[test]
    fn loop_slots_do_not_depend_on_direction() {
        let g = SlotGraph::from_cells(&[(0, 0), (1, 0), (1, 1), (1, 2), (0, 2)]);
        for r in fan_candidates(&g) {
            let rev: Vec<usize> = r.vertices.iter().rev().copied().collect();
            let t = if r.turn == Turn::Clockwise { Turn::Counterclockwise } else { Turn::Clockwise };
            assert_eq!(record_for(&g, &rev, t).unwrap().closing, r.closing);
        }
    }

    #[test]
    fn slots_already_taken_block_the_loop() {
        // in the square every end slot facing the centre is already used
        let g = SlotGraph::from_cells(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert!(fan_candidates(&g).is_empty());
    }
}
