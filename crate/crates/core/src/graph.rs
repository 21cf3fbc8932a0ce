use alloc::vec;
use alloc::vec::Vec;

use crate::dir::Dir;
use crate::lattice::Cell;

/// A connection between modules `u < v` occupying slot `su` on `u` and `sv` on `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub su: Dir,
    pub sv: Dir,
}

impl Edge {
    pub fn new(a: usize, sa: Dir, b: usize, sb: Dir) -> Edge {
        if a <= b {
            Edge { u: a, v: b, su: sa, sv: sb }
        } else {
            Edge { u: b, v: a, su: sb, sv: sa }
        }
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    pub fn slot_at(&self, m: usize) -> Option<Dir> {
        if m == self.u {
            Some(self.su)
        } else if m == self.v {
            Some(self.sv)
        } else {
            None
        }
    }
}

pub fn pair(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Connection graph in which every module exposes four slots.
///
/// Slots are module-local: for a canonical lattice configuration they
/// coincide with the global directions, after a morph they need not.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SlotGraph {
    slots: Vec<[Option<usize>; 4]>,
}

impl SlotGraph {
    pub fn empty(n: usize) -> SlotGraph {
        SlotGraph { slots: vec![[None; 4]; n] }
    }

    pub fn from_cells(cells: &[Cell]) -> SlotGraph {
        let mut g = SlotGraph::empty(cells.len());
        for (i, &(x, y)) in cells.iter().enumerate() {
            for d in Dir::ALL {
                let (dx, dy) = d.normal();
                if let Some(j) = cells.iter().position(|&c| c == (x + dx, y + dy)) {
                    g.slots[i][d.index()] = Some(j);
                }
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Option<SlotGraph> {
        let mut g = SlotGraph::empty(n);
        for e in edges {
            if !g.connect(e) {
                return None;
            }
        }
        Some(g)
    }

    pub fn n(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, m: usize, d: Dir) -> Option<usize> {
        self.slots[m][d.index()]
    }

    pub fn is_free(&self, m: usize, d: Dir) -> bool {
        self.slots[m][d.index()].is_none()
    }

    pub fn slot_toward(&self, m: usize, other: usize) -> Option<Dir> {
        self.slots[m].iter().position(|&s| s == Some(other)).map(Dir::from_index)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.slot_toward(a, b).is_some()
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<Edge> {
        Some(Edge::new(a, self.slot_toward(a, b)?, b, self.slot_toward(b, a)?))
    }

    pub fn degree(&self, m: usize) -> usize {
        self.slots[m].iter().flatten().count()
    }

    /// Neighbors in increasing module order.
    pub fn neighbors(&self, m: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.slots[m].iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for u in 0..self.n() {
            for d in Dir::ALL {
                if let Some(v) = self.slots[u][d.index()] {
                    if u < v {
                        out.push(self.edge(u, v).expect("slots are symmetric"));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.edges().iter().map(Edge::pair).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.slots.iter().map(|s| s.iter().flatten().count()).sum::<usize>() / 2
    }

    /// Adds `e` if both slots are free and the modules are not yet connected.
    pub fn connect(&mut self, e: Edge) -> bool {
        if e.u == e.v
            || e.u >= self.n()
            || e.v >= self.n()
            || !self.is_free(e.u, e.su)
            || !self.is_free(e.v, e.sv)
            || self.has_edge(e.u, e.v)
        {
            return false;
        }
        self.slots[e.u][e.su.index()] = Some(e.v);
        self.slots[e.v][e.sv.index()] = Some(e.u);
        true
    }

    pub fn disconnect(&mut self, a: usize, b: usize) -> Option<Edge> {
        let e = self.edge(a, b)?;
        self.slots[e.u][e.su.index()] = None;
        self.slots[e.v][e.sv.index()] = None;
        Some(e)
    }

    pub fn with_edge(&self, e: Edge) -> Option<SlotGraph> {
        let mut g = self.clone();
        g.connect(e).then_some(g)
    }

    pub fn without(&self, a: usize, b: usize) -> SlotGraph {
        let mut g = self.clone();
        g.disconnect(a, b);
        g
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for y in self.slots[x].iter().flatten().copied() {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == n
    }

    /// Same vertex count and the same unordered edge pairs, slots ignored.
    pub fn same_topology(&self, other: &SlotGraph) -> bool {
        self.n() == other.n() && self.pairs() == other.pairs()
    }

    /// Rotates the slot frame of module `m` counterclockwise by `quarter_turns`.
    pub fn rotate_module(&mut self, m: usize, quarter_turns: i32) {
        let old = self.slots[m];
        for d in Dir::ALL {
            self.slots[m][d.rotate(quarter_turns).index()] = old[d.index()];
        }
    }

    /// Relabels module `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> SlotGraph {
        let mut g = SlotGraph::empty(self.n());
        for (i, s) in self.slots.iter().enumerate() {
            g.slots[perm[i]] = s.map(|x| x.map(|j| perm[j]));
        }
        g
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        (0..self.n()).map(|m| self.neighbors(m)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domino_has_one_edge_with_opposite_slots() {
        let g = SlotGraph::from_cells(&[(0, 0), (1, 0)]);
        let e = g.edges();
        assert_eq!(e.len(), 1);
        // module 1 lies at +x of module 0
        assert_eq!(e[0], Edge { u: 0, v: 1, su: Dir::Left, sv: Dir::Right });
        assert_eq!(e[0].sv, e[0].su.opposite());
    }

    #[test]
    fn square_is_a_four_cycle() {
        let g = SlotGraph::from_cells(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(g.edge_count(), 4);
        assert!((0..4).all(|m| g.degree(m) == 2));
    }

    #[test]
    fn l_triomino_is_a_path() {
        let g = SlotGraph::from_cells(&[(0, 0), (1, 0), (1, 1)]);
        assert_eq!(g.pairs(), [(0, 1), (1, 2)]);
    }

    #[test]
    fn connect_refuses_busy_slots() {
        let mut g = SlotGraph::from_cells(&[(0, 0), (1, 0), (2, 0)]);
        assert!(!g.connect(Edge::new(0, Dir::Left, 2, Dir::Top)));
        assert!(g.connect(Edge::new(0, Dir::Top, 2, Dir::Top)));
        assert!(g.has_edge(2, 0));
        assert!(g.disconnect(0, 1).is_some());
        assert!(g.is_connected());
        assert!(g.disconnect(1, 2).is_some());
        assert!(!g.is_connected());
    }

    #[test]
    fn module_rotation_moves_slots() {
        let mut g = SlotGraph::from_cells(&[(0, 0), (1, 0)]);
        g.rotate_module(0, 1);
        assert_eq!(g.slot_toward(0, 1), Some(Dir::Top));
        assert_eq!(g.slot_toward(1, 0), Some(Dir::Right));
    }
}
