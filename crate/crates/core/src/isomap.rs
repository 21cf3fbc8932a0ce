//! Isomorphism between virtual graphs, action sets and the bidirectional
//! isomorphism tree.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::fan::CycleRecord;
use crate::graph::{pair, Edge, SlotGraph};
use crate::lattice::{Configuration, Symmetry};
use crate::polyomino::{random_polyomino_with, Polyomino};
use crate::vgg::{vgg, VirtualGraph};

/// `m[i]` is the vertex of the second graph that vertex `i` of the first maps to.
pub type Mapping = Vec<usize>;

pub fn invert(m: &[usize]) -> Mapping {
    let mut inv = vec![0; m.len()];
    for (i, &j) in m.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

pub fn compose(first: &[usize], second: &[usize]) -> Mapping {
    first.iter().map(|&j| second[j]).collect()
}

fn edge_set(g: &[Vec<usize>]) -> BTreeSet<(usize, usize)> {
    g.iter().enumerate().flat_map(|(u, ns)| ns.iter().map(move |&v| pair(u, v))).collect()
}

/// Whether `m` is a bijection carrying the edges of `g1` exactly onto those of `g2`.
pub fn is_isomorphism(g1: &[Vec<usize>], g2: &[Vec<usize>], m: &[usize]) -> bool {
    if g1.len() != g2.len() || m.len() != g1.len() {
        return false;
    }
    if m.iter().collect::<BTreeSet<_>>().len() != m.len() || m.iter().any(|&x| x >= g2.len()) {
        return false;
    }
    let e1 = edge_set(g1);
    let e2 = edge_set(g2);
    e1.len() == e2.len() && e1.iter().all(|&(u, v)| e2.contains(&pair(m[u], m[v])))
}

struct Vf2<'a> {
    g1: &'a [Vec<usize>],
    g2: &'a [Vec<usize>],
    adj2: Vec<Vec<bool>>,
    core1: Vec<Option<usize>>,
    core2: Vec<Option<usize>>,
    /// depth at which a vertex entered the terminal set, 0 if never
    term1: Vec<usize>,
    term2: Vec<usize>,
    depth: usize,
}

impl<'a> Vf2<'a> {
    fn new(g1: &'a [Vec<usize>], g2: &'a [Vec<usize>]) -> Self {
        let n = g1.len();
        let mut adj2 = vec![vec![false; n]; n];
        for (u, ns) in g2.iter().enumerate() {
            for &v in ns {
                adj2[u][v] = true;
            }
        }
        Vf2 {
            g1,
            g2,
            adj2,
            core1: vec![None; n],
            core2: vec![None; n],
            term1: vec![0; n],
            term2: vec![0; n],
            depth: 0,
        }
    }

    /// Next unmatched vertex of the first graph, preferring the terminal set.
    fn next_vertex(&self) -> Option<(usize, bool)> {
        let n = self.g1.len();
        (0..n)
            .find(|&i| self.core1[i].is_none() && self.term1[i] > 0)
            .map(|i| (i, true))
            .or_else(|| (0..n).find(|&i| self.core1[i].is_none()).map(|i| (i, false)))
    }

    fn feasible(&self, x: usize, y: usize) -> bool {
        if self.g1[x].len() != self.g2[y].len() {
            return false;
        }
        let mut mapped = 0;
        let (mut t1, mut t2, mut o1, mut o2) = (0, 0, 0, 0);
        for &a in &self.g1[x] {
            match self.core1[a] {
                Some(b) => {
                    if !self.adj2[y][b] {
                        return false;
                    }
                    mapped += 1;
                }
                None if self.term1[a] > 0 => t1 += 1,
                None => o1 += 1,
            }
        }
        for &b in &self.g2[y] {
            match self.core2[b] {
                Some(_) => mapped -= 1,
                None if self.term2[b] > 0 => t2 += 1,
                None => o2 += 1,
            }
        }
        mapped == 0 && t1 == t2 && o1 == o2
    }

    fn push(&mut self, x: usize, y: usize) {
        self.depth += 1;
        self.core1[x] = Some(y);
        self.core2[y] = Some(x);
        let d = self.depth;
        if self.term1[x] == 0 {
            self.term1[x] = d;
        }
        if self.term2[y] == 0 {
            self.term2[y] = d;
        }
        for &a in &self.g1[x] {
            if self.term1[a] == 0 {
                self.term1[a] = d;
            }
        }
        for &b in &self.g2[y] {
            if self.term2[b] == 0 {
                self.term2[b] = d;
            }
        }
    }

    fn pop(&mut self, x: usize, y: usize) {
        let d = self.depth;
        for t in self.term1.iter_mut().chain(self.term2.iter_mut()) {
            if *t == d {
                *t = 0;
            }
        }
        self.core1[x] = None;
        self.core2[y] = None;
        self.depth -= 1;
    }

    fn search(&mut self, out: &mut Vec<Mapping>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        let Some((x, in_terminal)) = self.next_vertex() else {
            out.push(self.core1.iter().map(|c| c.expect("complete")).collect());
            return;
        };
        let n = self.g2.len();
        for y in 0..n {
            if self.core2[y].is_some() || (in_terminal && self.term2[y] == 0) {
                continue;
            }
            if self.feasible(x, y) {
                self.push(x, y);
                self.search(out, limit);
                self.pop(x, y);
                if out.len() >= limit {
                    return;
                }
            }
        }
    }
}

/// Up to `limit` isomorphisms from `g1` onto `g2`, in deterministic order.
pub fn vf2_all(g1: &[Vec<usize>], g2: &[Vec<usize>], limit: usize) -> Vec<Mapping> {
    if g1.len() != g2.len() || edge_set(g1).len() != edge_set(g2).len() {
        return Vec::new();
    }
    let mut d1: Vec<usize> = g1.iter().map(Vec::len).collect();
    let mut d2: Vec<usize> = g2.iter().map(Vec::len).collect();
    d1.sort_unstable();
    d2.sort_unstable();
    if d1 != d2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    Vf2::new(g1, g2).search(&mut out, limit);
    out
}

pub fn vf2_isomorphic(g1: &[Vec<usize>], g2: &[Vec<usize>]) -> Option<Mapping> {
    vf2_all(g1, g2, 1).into_iter().next()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectAction {
    pub edge: Edge,
    /// Loops available when the edge was generated; the first is primary.
    pub cycles: Vec<CycleRecord>,
    pub stage: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ActionSets {
    pub s_con: Vec<ConnectAction>,
    pub s_discon: Vec<(usize, usize)>,
}

/// Connects are the start leaf's virtual edges; disconnects are the preimages
/// of the goal leaf's edges missing from the goal graph.
pub fn derive_action_sets(
    start_graph: &SlotGraph,
    start_virtual: &VirtualGraph,
    goal_virtual: &VirtualGraph,
    goal_graph: &SlotGraph,
    mapping: &[usize],
) -> Result<ActionSets, Error> {
    if !is_isomorphism(&start_virtual.topology(), &goal_virtual.topology(), mapping) {
        return Err(Error::MappingInvalid);
    }
    let inv = invert(mapping);
    let s_con: Vec<ConnectAction> = start_virtual
        .virtual_edges
        .iter()
        .map(|v| ConnectAction { edge: v.edge, cycles: v.cycles.clone(), stage: v.stage })
        .collect();
    let goal_pairs: BTreeSet<(usize, usize)> = goal_graph.pairs().into_iter().collect();
    let s_discon: Vec<(usize, usize)> = goal_virtual
        .graph
        .pairs()
        .into_iter()
        .filter(|p| !goal_pairs.contains(p))
        .map(|(a, b)| pair(inv[a], inv[b]))
        .collect();
    let sets = ActionSets { s_con, s_discon };
    if !apply_matches_goal(start_graph, &sets, goal_graph, mapping) {
        return Err(Error::MappingInvalid);
    }
    Ok(sets)
}

/// Adds every connect, removes every disconnect, and compares the result with
/// the goal under the mapping.
pub fn apply_matches_goal(start: &SlotGraph, sets: &ActionSets, goal: &SlotGraph, mapping: &[usize]) -> bool {
    let mut pairs: BTreeSet<(usize, usize)> = start.pairs().into_iter().collect();
    for c in &sets.s_con {
        pairs.insert(c.edge.pair());
    }
    for d in &sets.s_discon {
        pairs.remove(d);
    }
    let mapped: BTreeSet<(usize, usize)> = pairs.iter().map(|&(a, b)| pair(mapping[a], mapping[b])).collect();
    mapped == goal.pairs().into_iter().collect()
}

/// One hop of a chain: from one configuration to the next through an
/// isomorphic pair of virtual graphs.
#[derive(Clone, Debug)]
pub struct Hop {
    pub from: Configuration,
    pub to: Configuration,
    pub from_leaf: VirtualGraph,
    pub to_leaf: VirtualGraph,
    /// From-module index to to-module index.
    pub mapping: Mapping,
    pub sets: ActionSets,
}

#[derive(Clone, Debug)]
pub struct BitChain {
    pub hops: Vec<Hop>,
    pub samples: usize,
}

impl BitChain {
    /// Number of intermediate configurations.
    pub fn k(&self) -> usize {
        self.hops.len().saturating_sub(1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BitParams {
    pub seed: u64,
    pub max_intermediates: usize,
    pub max_samples: usize,
    /// Alternative mappings tried per isomorphic leaf pair.
    pub mappings_per_pair: usize,
}

impl Default for BitParams {
    fn default() -> Self {
        BitParams { seed: 0, max_intermediates: 4, max_samples: 5000, mappings_per_pair: 4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Start,
    Goal,
}

#[derive(Clone, Debug)]
struct Link {
    parent: usize,
    parent_leaf: usize,
    own_leaf: usize,
    /// Parent index to own index.
    mapping: Mapping,
}

#[derive(Clone, Debug)]
struct Node {
    config: Configuration,
    leaves: Vec<VirtualGraph>,
    topo: Vec<Vec<Vec<usize>>>,
    side: Side,
    link: Option<Link>,
    depth: usize,
}

impl Node {
    fn new(config: Configuration, side: Side, link: Option<Link>, depth: usize) -> Node {
        let leaves = vgg(&config.graph()).leaves;
        let topo = leaves.iter().map(VirtualGraph::topology).collect();
        Node { config, leaves, topo, side, link, depth }
    }

    fn expandable(&self) -> impl Iterator<Item = usize> + '_ {
        let own = self.link.as_ref().map(|l| l.own_leaf);
        (0..self.leaves.len()).filter(move |&i| Some(i) != own)
    }
}

/// An isomorphic pairing between a tree node's leaf and a candidate's leaf.
#[derive(Clone, Debug)]
struct Match {
    node: usize,
    node_leaf: usize,
    own_leaf: usize,
    /// Node index to candidate index.
    mapping: Mapping,
}

fn find_matches(nodes: &[Node], side: Side, cand: &Node, limit_depth: usize) -> Vec<Match> {
    let mut out = Vec::new();
    for (ni, node) in nodes.iter().enumerate() {
        if node.side != side || node.depth >= limit_depth {
            continue;
        }
        for nl in node.expandable() {
            for (cl, ct) in cand.topo.iter().enumerate() {
                if let Some(m) = vf2_isomorphic(&node.topo[nl], ct) {
                    out.push(Match { node: ni, node_leaf: nl, own_leaf: cl, mapping: m });
                }
            }
        }
    }
    out
}

fn hop(from: &Node, from_leaf: usize, to: &Node, to_leaf: usize, mapping: Mapping) -> Result<Hop, Error> {
    let fl = &from.leaves[from_leaf];
    let tl = &to.leaves[to_leaf];
    let sets = derive_action_sets(&fl.base, fl, tl, &tl.base, &mapping)?;
    Ok(Hop {
        from: from.config.clone(),
        to: to.config.clone(),
        from_leaf: fl.clone(),
        to_leaf: tl.clone(),
        mapping,
        sets,
    })
}

/// Hops from the start root down to `node`, oriented start to goal.
fn hops_down(nodes: &[Node], mut node: usize) -> Result<Vec<Hop>, Error> {
    let mut out = Vec::new();
    while let Some(l) = nodes[node].link.clone() {
        out.push(hop(&nodes[l.parent], l.parent_leaf, &nodes[node], l.own_leaf, l.mapping)?);
        node = l.parent;
    }
    out.reverse();
    Ok(out)
}

/// Hops from `node` up to the goal root, oriented start to goal.
fn hops_up(nodes: &[Node], mut node: usize) -> Result<Vec<Hop>, Error> {
    let mut out = Vec::new();
    while let Some(l) = nodes[node].link.clone() {
        out.push(hop(&nodes[node], l.own_leaf, &nodes[l.parent], l.parent_leaf, invert(&l.mapping))?);
        node = l.parent;
    }
    Ok(out)
}

pub fn check_pair(start: &Configuration, goal: &Configuration) -> Result<(), Error> {
    if start.n() != goal.n() {
        return Err(Error::SizeMismatch { start: start.n(), goal: goal.n() });
    }
    start.adjacency()?;
    goal.adjacency()?;
    if start.n() >= 7 && (start.is_linear() || goal.is_linear()) {
        return Err(Error::LinearConfiguration);
    }
    Ok(())
}

/// Searches for a chain of isomorphic virtual-graph hops from `start` to
/// `goal`, offering candidate chains to `accept` in deterministic order and
/// returning the first accepted one.
pub fn bit_search_with(
    start: &Configuration,
    goal: &Configuration,
    params: &BitParams,
    mut accept: impl FnMut(&BitChain) -> bool,
) -> Result<BitChain, Error> {
    check_pair(start, goal)?;
    let n = start.n();
    let mut nodes = vec![Node::new(start.clone(), Side::Start, None, 0), Node::new(goal.clone(), Side::Goal, None, 0)];

    for sl in 0..nodes[0].leaves.len() {
        for gl in 0..nodes[1].leaves.len() {
            for m in vf2_all(&nodes[0].topo[sl], &nodes[1].topo[gl], params.mappings_per_pair) {
                let chain = BitChain { hops: vec![hop(&nodes[0], sl, &nodes[1], gl, m)?], samples: 0 };
                if accept(&chain) {
                    return Ok(chain);
                }
            }
        }
    }

    let mut seen_start: BTreeSet<Polyomino> = BTreeSet::from([Polyomino::new(start.cells(), Symmetry::Full)]);
    let mut seen_goal: BTreeSet<Polyomino> = BTreeSet::from([Polyomino::new(goal.cells(), Symmetry::Full)]);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let depth_cap = params.max_intermediates;
    for sample in 1..=params.max_samples {
        let shape = random_polyomino_with(n, &mut rng);
        if n >= 3 && shape.is_linear() {
            continue;
        }
        let fresh_start = !seen_start.contains(&shape);
        let fresh_goal = !seen_goal.contains(&shape);
        if !fresh_start && !fresh_goal {
            continue;
        }
        let cand = Node::new(shape.to_config(), Side::Start, None, 0);
        let sm = if fresh_start { find_matches(&nodes, Side::Start, &cand, depth_cap) } else { Vec::new() };
        let gm = if fresh_goal { find_matches(&nodes, Side::Goal, &cand, depth_cap) } else { Vec::new() };

        for a in &sm {
            for b in &gm {
                if a.own_leaf == b.own_leaf || nodes[a.node].depth + nodes[b.node].depth + 1 > depth_cap {
                    continue;
                }
                let mid_s = Node {
                    side: Side::Start,
                    link: Some(Link { parent: a.node, parent_leaf: a.node_leaf, own_leaf: a.own_leaf, mapping: a.mapping.clone() }),
                    depth: nodes[a.node].depth + 1,
                    ..cand.clone()
                };
                let mut hops = hops_down(&nodes, a.node)?;
                hops.push(hop(&nodes[a.node], a.node_leaf, &mid_s, a.own_leaf, a.mapping.clone())?);
                hops.push(hop(&mid_s, b.own_leaf, &nodes[b.node], b.node_leaf, invert(&b.mapping))?);
                hops.extend(hops_up(&nodes, b.node)?);
                let chain = BitChain { hops, samples: sample };
                if accept(&chain) {
                    return Ok(chain);
                }
            }
        }

        if let Some(a) = sm.first() {
            seen_start.insert(shape.clone());
            let depth = nodes[a.node].depth + 1;
            let link = Link { parent: a.node, parent_leaf: a.node_leaf, own_leaf: a.own_leaf, mapping: a.mapping.clone() };
            nodes.push(Node { side: Side::Start, link: Some(link), depth, ..cand.clone() });
        }
        if let Some(b) = gm.first() {
            seen_goal.insert(shape.clone());
            let depth = nodes[b.node].depth + 1;
            let link = Link { parent: b.node, parent_leaf: b.node_leaf, own_leaf: b.own_leaf, mapping: b.mapping.clone() };
            nodes.push(Node { side: Side::Goal, link: Some(link), depth, ..cand });
        }
    }
    Err(Error::SearchExhausted { samples: params.max_samples })
}

pub fn bit_search(start: &Configuration, goal: &Configuration, params: &BitParams) -> Result<BitChain, Error> {
    bit_search_with(start, goal, params, |_| true)
}
