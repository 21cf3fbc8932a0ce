//! Virtual graph generation.
//!
//! Starting from a configuration's graph, every closable loop contributes a
//! virtual edge. Edges that compete for a slot (or for the same module pair)
//! cannot coexist, so each stage branches into maximal compatible subsets and
//! the process repeats on every branch until nothing more can be added. The
//! leaves are the virtual graphs.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::fan::{fan_candidates, fan_records, CycleRecord};
use crate::graph::{pair, Edge, SlotGraph};
use crate::lattice::Configuration;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub module: usize,
    pub depth: usize,
    /// Modules from the root down to this node.
    pub path: Vec<usize>,
}

/// Breadth-first expansion of all simple paths from a root. A module may
/// occur several times, once per path, but never twice on one path.
#[derive(Clone, Debug)]
pub struct ExtendedTree {
    pub root: usize,
    pub nodes: Vec<TreeNode>,
}

impl ExtendedTree {
    pub fn depths_of(&self, m: usize) -> Vec<usize> {
        self.nodes.iter().filter(|x| x.module == m).map(|x| x.depth).collect()
    }

    pub fn level(&self, depth: usize) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(move |x| x.depth == depth)
    }

    pub fn max_depth(&self) -> usize {
        self.nodes.iter().map(|x| x.depth).max().unwrap_or(0)
    }
}

pub fn build_extended_tree(g: &SlotGraph, root: usize) -> ExtendedTree {
    let mut nodes = vec![TreeNode { module: root, depth: 0, path: vec![root] }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (m, depth, path) = (nodes[i].module, nodes[i].depth, nodes[i].path.clone());
        for y in g.neighbors(m) {
            if path.contains(&y) {
                continue;
            }
            let mut p = path.clone();
            p.push(y);
            nodes.push(TreeNode { module: y, depth: depth + 1, path: p });
            queue.push_back(nodes.len() - 1);
        }
    }
    ExtendedTree { root, nodes }
}

/// Non-adjacent pairs in the order the per-root, per-level traversal meets them.
pub fn candidate_pairs(g: &SlotGraph) -> Vec<(usize, usize)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for root in 0..g.n() {
        let tree = build_extended_tree(g, root);
        for level in 1..=tree.max_depth() {
            for node in tree.level(level) {
                let p = pair(root, node.module);
                if !g.has_edge(root, node.module) && seen.insert(p) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// All loop records closing the pair; empty when the pair cannot be connected.
pub fn is_valid_cycle(g: &SlotGraph, p: (usize, usize)) -> Vec<CycleRecord> {
    fan_records(g, p.0, p.1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualEdge {
    pub edge: Edge,
    /// Every loop that closed this edge at its stage; the first is primary.
    pub cycles: Vec<CycleRecord>,
    pub stage: usize,
}

impl VirtualEdge {
    pub fn primary(&self) -> &CycleRecord {
        &self.cycles[0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualGraph {
    pub base: SlotGraph,
    pub graph: SlotGraph,
    pub virtual_edges: Vec<VirtualEdge>,
}

impl VirtualGraph {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn topology(&self) -> Vec<Vec<usize>> {
        self.graph.adjacency_lists()
    }

    pub fn is_virtual(&self, p: (usize, usize)) -> bool {
        self.virtual_edges.iter().any(|e| e.edge.pair() == p)
    }

    pub fn virtual_pairs(&self) -> Vec<(usize, usize)> {
        self.virtual_edges.iter().map(|e| e.edge.pair()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct VggResult {
    pub leaves: Vec<VirtualGraph>,
    /// Distinct graphs explored, leaves included.
    pub visited: usize,
    /// Longest closable loop seen anywhere in the exploration.
    pub max_loop: usize,
    /// Longest closable loop that leaves at least one module outside it.
    pub max_strict_loop: usize,
    /// First record found with length `max_strict_loop`.
    pub longest_strict: Option<CycleRecord>,
}

fn conflicts(a: &Edge, b: &Edge) -> bool {
    let sa = [(a.u, a.su), (a.v, a.sv)];
    let sb = [(b.u, b.su), (b.v, b.sv)];
    a.pair() == b.pair() || sa.iter().any(|s| sb.contains(s))
}

/// Maximal compatible subsets, one seeded from each item, deduplicated.
fn compatible_subsets(items: &[Edge]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..items.len() {
        let mut s = vec![i];
        for j in 0..items.len() {
            if j != i && s.iter().all(|&x| !conflicts(&items[j], &items[x])) {
                s.push(j);
            }
        }
        s.sort_unstable();
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

struct Explorer {
    base: SlotGraph,
    seen: BTreeSet<SlotGraph>,
    leaves: Vec<VirtualGraph>,
    max_loop: usize,
    max_strict_loop: usize,
    longest_strict: Option<CycleRecord>,
}

impl Explorer {
    fn explore(&mut self, g: SlotGraph, added: Vec<VirtualEdge>, stage: usize) {
        if !self.seen.insert(g.clone()) {
            return;
        }
        let n = g.n();
        let cands = fan_candidates(&g);
        for r in &cands {
            self.max_loop = self.max_loop.max(r.len());
            if r.len() < n && r.len() > self.max_strict_loop {
                self.max_strict_loop = r.len();
                self.longest_strict = Some(r.clone());
            }
        }
        if cands.is_empty() {
            self.leaves.push(VirtualGraph { base: self.base.clone(), graph: g, virtual_edges: added });
            return;
        }
        let mut items: Vec<Edge> = Vec::new();
        let mut cycles: Vec<Vec<CycleRecord>> = Vec::new();
        for r in cands {
            match items.iter().position(|e| *e == r.closing) {
                Some(i) => cycles[i].push(r),
                None => {
                    items.push(r.closing);
                    cycles.push(vec![r]);
                }
            }
        }
        for sub in compatible_subsets(&items) {
            let mut child = g.clone();
            let mut next = added.clone();
            for &i in &sub {
                child.connect(items[i]);
                next.push(VirtualEdge { edge: items[i], cycles: cycles[i].clone(), stage });
            }
            self.explore(child, next, stage + 1);
        }
    }
}

pub fn vgg(base: &SlotGraph) -> VggResult {
    let mut ex = Explorer {
        base: base.clone(),
        seen: BTreeSet::new(),
        leaves: Vec::new(),
        max_loop: 0,
        max_strict_loop: 0,
        longest_strict: None,
    };
    ex.explore(base.clone(), Vec::new(), 0);
    VggResult { visited: ex.seen.len(), leaves: ex.leaves, max_loop: ex.max_loop, max_strict_loop: ex.max_strict_loop, longest_strict: ex.longest_strict }
}

pub fn vgg_config(c: &Configuration) -> Result<VggResult, Error> {
    Ok(vgg(&c.adjacency()?))
}

/// Longest loop closable from this configuration with a module left outside it.
pub fn loop_size(c: &Configuration) -> usize {
    vgg(&c.graph()).max_strict_loop
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dir::Dir;

    fn graph(cells: &[(i32, i32)]) -> SlotGraph {
        SlotGraph::from_cells(cells)
    }

    /// Seven modules chained so that only the two ends can close a loop
    /// through all of them.
    pub(crate) fn seven_chain() -> SlotGraph {
        // module ids 1..=7 are indices 0..=6; loop order 4,3,2,1,7,6,5
        let order = [3, 2, 1, 0, 6, 5, 4];
        let mut g = SlotGraph::empty(7);
        for w in order.windows(2) {
            assert!(g.connect(Edge::new(w[0], Dir::Top, w[1], Dir::Left)));
        }
        g
    }

    #[test]
    fn extended_tree_depths_on_a_path() {
        let g = graph(&[(0, 0), (1, 0), (2, 0)]);
        let t = build_extended_tree(&g, 0);
        assert_eq!(t.depths_of(0), [0]);
        assert_eq!(t.depths_of(1), [1]);
        assert_eq!(t.depths_of(2), [2]);
    }

    #[test]
    fn extended_tree_revisits_the_far_corner_of_a_square() {
        let g = graph(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let t = build_extended_tree(&g, 0);
        assert_eq!(t.depths_of(2), [2, 2]);
        for node in &t.nodes {
            let mut p = node.path.clone();
            p.sort_unstable();
            p.dedup();
            assert_eq!(p.len(), node.path.len());
        }
    }

    #[test]
    fn extended_tree_on_the_seven_chain() {
        let t = build_extended_tree(&seven_chain(), 0);
        assert_eq!(t.depths_of(3), [3]);
        assert_eq!(t.depths_of(4), [3]);
    }

    #[test]
    fn candidate_pairs_examples() {
        assert!(candidate_pairs(&graph(&[(0, 0), (1, 0)])).is_empty());
        assert_eq!(candidate_pairs(&graph(&[(0, 0), (1, 0), (1, 1)])), [(0, 2)]);
        let block = graph(&[(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]);
        assert_eq!(candidate_pairs(&block).len(), 15 - 7);
    }

    #[test]
    fn square_diagonal_is_not_closable() {
        let g = graph(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert!(is_valid_cycle(&g, (0, 2)).is_empty());
        assert!(is_valid_cycle(&g, (1, 3)).is_empty());
    }

    #[test]
    fn straight_tetromino_has_one_empty_leaf() {
        let r = vgg(&graph(&[(0, 0), (1, 0), (2, 0), (3, 0)]));
        assert_eq!(r.leaves.len(), 1);
        assert!(r.leaves[0].virtual_edges.is_empty());
    }

    #[test]
    fn seven_chain_closes_the_full_loop_last() {
        let r = vgg(&seven_chain());
        assert_eq!(r.leaves.len(), 1);
        let ve = &r.leaves[0].virtual_edges;
        let last = ve.last().unwrap();
        assert_eq!(last.edge.pair(), (3, 4));
        assert_eq!(last.primary().vertices, [3, 2, 1, 0, 6, 5, 4]);
        assert_eq!(r.max_loop, 7);
        assert_eq!(r.max_strict_loop, 0);
    }

    #[test]
    fn leaves_have_no_double_booked_slots_and_records_revalidate() {
        let g = graph(&[(0, 0), (1, 0), (2, 0), (0, 1), (0, 2), (1, 2)]);
        for leaf in vgg(&g).leaves {
            let mut h = leaf.base.clone();
            let mut stages: Vec<&VirtualEdge> = leaf.virtual_edges.iter().collect();
            stages.sort_by_key(|e| e.stage);
            let mut s = 0;
            let mut pending = Vec::new();
            for e in stages {
                if e.stage != s {
                    for x in pending.drain(..) {
                        assert!(h.connect(x));
                    }
                    s = e.stage;
                }
                for c in &e.cycles {
                    assert!(c.len() >= 3);
                    assert!(is_valid_cycle(&h, e.edge.pair()).contains(c));
                }
                pending.push(e.edge);
            }
            for x in pending {
                assert!(h.connect(x));
            }
            assert_eq!(h, leaf.graph);
        }
    }
}
