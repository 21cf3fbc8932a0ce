//! Exhaustive reachability over small configurations.
//!
//! A move is one morph, possibly preceded by loosening up to two edges and
//! possibly chained with a second loop through the first connect. After the
//! disconnects the graph is re-embedded rigidly; modules that end up touching
//! without an edge are joined by closure connects, each of which must itself
//! close a loop. Two states are successors when the move exists both ways.
//! States are one-sided polyominoes (translation and rotation removed).

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::embed::embed_rigid;
use crate::error::Error;
use crate::fan::{closing_records, fan_candidates, Turn};
use crate::graph::SlotGraph;
use crate::lattice::{transform_cell, Cell, Configuration, Symmetry};
use crate::polyomino::{enumerate_polyominoes, Flavor, Polyomino};
use crate::validate::ActionStep;
use crate::vgg::vgg;

/// Largest module count the exhaustive oracle accepts.
pub const MAX_ORACLE_N: usize = 8;

const MAX_LOOSENED: usize = 2;

/// One move from a state: steps in the state's module indices starting from
/// its canonical graph, and where every module ends up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morph {
    pub steps: Vec<ActionStep>,
    pub cells: Vec<Cell>,
}

impl Morph {
    pub fn target(&self) -> Polyomino {
        Polyomino::new(&self.cells, Symmetry::Rotation)
    }

    pub fn pivots(&self) -> usize {
        self.steps.iter().filter(|s| s.is_connect()).count()
    }
}

/// Re-embeds `g` and appends the closure connects; `None` when the graph does
/// not embed or a closure cannot be realized.
fn finish(g: &SlotGraph, mut steps: Vec<ActionStep>) -> Option<Morph> {
    let n = g.n();
    let emb = embed_rigid(g)?;
    let mut pending = emb.missing_edges(g);
    if pending.len() > MAX_LOOSENED {
        return None;
    }
    let mut h = g.clone();
    while !pending.is_empty() {
        let before = pending.len();
        let mut i = 0;
        while i < pending.len() {
            let e = pending[i];
            match closing_records(&h, e).into_iter().find(|r| r.len() < n) {
                Some(r) => {
                    h.connect(e);
                    steps.push(ActionStep::connect(e, r.vertices));
                    pending.remove(i);
                }
                None => i += 1,
            }
        }
        if pending.len() == before {
            return None;
        }
    }
    Some(Morph { steps, cells: emb.cells })
}

fn edge_subsets(g: &SlotGraph) -> Vec<Vec<(usize, usize)>> {
    let pairs = g.pairs();
    let mut out = vec![Vec::new()];
    out.extend(pairs.iter().map(|&p| vec![p]));
    for (i, &p) in pairs.iter().enumerate() {
        out.extend(pairs[i + 1..].iter().map(|&q| vec![p, q]));
    }
    out.retain(|s| s.len() <= MAX_LOOSENED);
    out
}

/// Every state one move away from `state`, each with the first morph found.
/// May include `state` itself.
pub fn forward_moves(state: &Polyomino) -> BTreeMap<Polyomino, Morph> {
    let cells = state.cells();
    let n = cells.len();
    let g0 = SlotGraph::from_cells(cells);
    let mut out = BTreeMap::new();
    let mut keep = |m: Morph| {
        out.entry(m.target()).or_insert(m);
    };
    for loosened in edge_subsets(&g0) {
        let mut h = g0.clone();
        let mut pre = Vec::new();
        for &(a, b) in &loosened {
            pre.push(ActionStep::disconnect(h.disconnect(a, b).expect("present")));
        }
        if !h.is_connected() {
            continue;
        }
        for r1 in fan_candidates(&h).into_iter().filter(|r| r.len() < n) {
            let e1 = r1.closing;
            let mut g1 = h.clone();
            g1.connect(e1);
            let mut s1 = pre.clone();
            s1.push(ActionStep::connect(e1, r1.vertices.clone()));
            let c1 = r1.path_pairs();
            for &(a, b) in &c1 {
                let mut g2 = g1.clone();
                let d = g2.disconnect(a, b).expect("loop edge");
                let mut s2 = s1.clone();
                s2.push(ActionStep::disconnect(d));
                if let Some(m) = finish(&g2, s2) {
                    keep(m);
                }
            }
            for r2 in fan_candidates(&g1).into_iter().filter(|r| r.len() < n && r.path_pairs().contains(&e1.pair())) {
                let mut g3 = g1.clone();
                g3.connect(r2.closing);
                let mut s3 = s1.clone();
                s3.push(ActionStep::connect(r2.closing, r2.vertices.clone()));
                let both: Vec<(usize, usize)> = c1.iter().chain(r2.path_pairs().iter()).copied().collect::<BTreeSet<_>>().into_iter().collect();
                for i in 0..both.len() {
                    for j in i + 1..both.len() {
                        let mut g4 = g3.clone();
                        let d1 = g4.disconnect(both[i].0, both[i].1).expect("loop edge");
                        let d2 = g4.disconnect(both[j].0, both[j].1).expect("loop edge");
                        if !g4.is_connected() {
                            continue;
                        }
                        let mut s4 = s3.clone();
                        s4.push(ActionStep::disconnect(d1));
                        s4.push(ActionStep::disconnect(d2));
                        if let Some(m) = finish(&g4, s4) {
                            keep(m);
                        }
                    }
                }
            }
        }
    }
    out
}

/// States reachable by a move that can also be undone by a move.
pub fn morphpivot_successors(state: &Polyomino) -> Vec<Polyomino> {
    let x = state.renormalize(Symmetry::Rotation);
    forward_moves(&x).into_keys().filter(|y| *y != x && forward_moves(y).contains_key(&x)).collect()
}

/// Longest loop closable with a module outside it, over everything VGG
/// explores from the state.
pub fn state_loop_size(state: &Polyomino) -> usize {
    vgg(&SlotGraph::from_cells(state.cells())).max_strict_loop
}

/// The successor graph over all states of one module count.
#[derive(Clone, Debug)]
pub struct MoveGraph {
    pub n: usize,
    /// Sorted one-sided normal forms.
    pub states: Vec<Polyomino>,
    pub succ: Vec<Vec<usize>>,
    pub loop_size: Vec<usize>,
    pub component: Vec<usize>,
    /// Largest loop size in each component.
    pub component_s: Vec<usize>,
}

impl MoveGraph {
    pub fn build(n: usize) -> Result<MoveGraph, Error> {
        if n > MAX_ORACLE_N {
            return Err(Error::BudgetExceeded("module count above the exhaustive limit"));
        }
        let states = enumerate_polyominoes(n, Flavor::OneSided);
        let forward = states.iter().map(|s| forward_moves(s).into_keys().collect()).collect();
        let loop_size = states.iter().map(state_loop_size).collect();
        Ok(MoveGraph::from_forward(n, states, forward, loop_size))
    }

    /// Assembles the graph from precomputed forward move targets and loop sizes.
    pub fn from_forward(n: usize, states: Vec<Polyomino>, forward: Vec<Vec<Polyomino>>, loop_size: Vec<usize>) -> MoveGraph {
        let idx = |p: &Polyomino| states.binary_search(p).ok();
        let fwd: Vec<BTreeSet<usize>> = forward.iter().map(|ys| ys.iter().filter_map(idx).collect()).collect();
        let succ: Vec<Vec<usize>> =
            (0..states.len()).map(|x| fwd[x].iter().copied().filter(|&y| y != x && fwd[y].contains(&x)).collect()).collect();
        let mut component = vec![usize::MAX; states.len()];
        let mut component_s = Vec::new();
        for s in 0..states.len() {
            if component[s] != usize::MAX {
                continue;
            }
            let id = component_s.len();
            let mut best = 0;
            let mut stack = vec![s];
            component[s] = id;
            while let Some(x) = stack.pop() {
                best = best.max(loop_size[x]);
                for &y in &succ[x] {
                    if component[y] == usize::MAX {
                        component[y] = id;
                        stack.push(y);
                    }
                }
            }
            component_s.push(best);
        }
        MoveGraph { n, states, succ, loop_size, component, component_s }
    }

    pub fn index_of(&self, p: &Polyomino) -> Option<usize> {
        self.states.binary_search(&p.renormalize(Symmetry::Rotation)).ok()
    }

    pub fn components(&self) -> usize {
        self.component_s.len()
    }

    pub fn s_of(&self, state: usize) -> usize {
        self.component_s[self.component[state]]
    }

    /// Shortest successor path from `from` to the first state accepted by `goal`.
    pub fn path_to(&self, from: usize, goal: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.states.len()];
        let mut queue = VecDeque::from([from]);
        prev[from] = from;
        while let Some(x) = queue.pop_front() {
            if goal(x) {
                let mut path = vec![x];
                let mut y = x;
                while y != from {
                    y = prev[y];
                    path.push(y);
                }
                path.reverse();
                return Some(path);
            }
            for &y in &self.succ[x] {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        None
    }
}

/// Maximum loop size over everything reachable from `config`, exploring at
/// most `budget` states.
pub fn compute_s(config: &Configuration, budget: usize) -> Result<usize, Error> {
    config.adjacency()?;
    let start = Polyomino::new(config.cells(), Symmetry::Rotation);
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut best = 0;
    while let Some(x) = queue.pop_front() {
        best = best.max(state_loop_size(&x));
        for y in morphpivot_successors(&x) {
            if seen.insert(y.clone()) {
                if seen.len() > budget {
                    return Err(Error::BudgetExceeded("reachable set larger than the budget"));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(best)
}

fn mirror(p: &Polyomino) -> Polyomino {
    let cells: Vec<Cell> = p.cells().iter().map(|&c| transform_cell(c, 0, true)).collect();
    Polyomino::new(&cells, Symmetry::Rotation)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRow {
    /// Free normal form.
    pub shape: Polyomino,
    pub s: usize,
    /// Component id with mirror images identified.
    pub component: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mismatch {
    /// A shape and its mirror image got different loop sizes.
    MirrorImages(Polyomino),
    /// Shapes sharing a positive loop size are spread over several components.
    SplitClass { s: usize, components: usize },
    /// A zero-loop shape still has successors.
    ZeroNotInert(Polyomino),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub n: usize,
    pub rows: Vec<ClassRow>,
    pub s_values: Vec<usize>,
    pub mismatches: Vec<Mismatch>,
}

impl Classification {
    pub fn class(&self, s: usize) -> Vec<&Polyomino> {
        self.rows.iter().filter(|r| r.s == s).map(|r| &r.shape).collect()
    }
}

/// Free shapes of `graph.n` modules grouped by loop size, checked against reachability.
pub fn classify(graph: &MoveGraph) -> Classification {
    let k = graph.components();
    let mut root: Vec<usize> = (0..k).collect();
    fn find(root: &mut [usize], mut x: usize) -> usize {
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    let mut mismatches = Vec::new();
    let mut free: BTreeMap<Polyomino, (usize, usize)> = BTreeMap::new();
    for (i, p) in graph.states.iter().enumerate() {
        let m = graph.index_of(&mirror(p)).expect("mirror images are states");
        let (a, b) = (find(&mut root, graph.component[i]), find(&mut root, graph.component[m]));
        root[a.max(b)] = a.min(b);
        if graph.s_of(i) != graph.s_of(m) {
            let shape = p.renormalize(Symmetry::Full);
            if !mismatches.contains(&Mismatch::MirrorImages(shape.clone())) {
                mismatches.push(Mismatch::MirrorImages(shape));
            }
        }
        free.entry(p.renormalize(Symmetry::Full)).or_insert((i, graph.s_of(i)));
    }
    let mut ids = BTreeMap::new();
    let mut rows = Vec::new();
    for (shape, (i, s)) in free {
        let r = find(&mut root, graph.component[i]);
        let next = ids.len();
        let component = *ids.entry(r).or_insert(next);
        if s == 0 && !graph.succ[i].is_empty() {
            mismatches.push(Mismatch::ZeroNotInert(shape.clone()));
        }
        rows.push(ClassRow { shape, s, component });
    }
    let s_values: Vec<usize> = rows.iter().map(|r| r.s).collect::<BTreeSet<_>>().into_iter().collect();
    for &s in s_values.iter().filter(|&&s| s > 0) {
        let comps: BTreeSet<usize> = rows.iter().filter(|r| r.s == s).map(|r| r.component).collect();
        if comps.len() > 1 {
            mismatches.push(Mismatch::SplitClass { s, components: comps.len() });
        }
    }
    Classification { n: graph.n, rows, s_values, mismatches }
}

pub fn isotypy_classes(n: usize) -> Result<Classification, Error> {
    Ok(classify(&MoveGraph::build(n)?))
}

/// Where the added module touches the loop, counted counterclockwise from
/// the module carrying the auxiliary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GapCase {
    First,
    Second,
    Later,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseResult {
    pub case: GapCase,
    pub instances: usize,
    pub passed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductionReport {
    pub k: usize,
    pub n: usize,
    pub bases: usize,
    pub cases: Vec<CaseResult>,
}

impl InductionReport {
    pub fn holds(&self) -> bool {
        self.bases > 0 && self.cases.iter().all(|c| c.instances > 0 && c.passed == c.instances)
    }
}

fn adjacent(a: Cell, b: Cell) -> bool {
    (a.0 - b.0).abs() + (a.1 - b.1).abs() == 1
}

fn neighbor_cells(cells: &[Cell]) -> BTreeSet<Cell> {
    let taken: BTreeSet<Cell> = cells.iter().copied().collect();
    cells
        .iter()
        .flat_map(|&(x, y)| [(x + 1, y), (x, y + 1), (x - 1, y), (x, y - 1)])
        .filter(|c| !taken.contains(c))
        .collect()
}

/// Every `n`-cell polyomino containing `cells`, in one-sided normal form.
fn completions(cells: &[Cell], n: usize) -> BTreeSet<Polyomino> {
    let mut level: BTreeSet<Vec<Cell>> = BTreeSet::from([cells.to_vec()]);
    for _ in cells.len()..n {
        let mut next = BTreeSet::new();
        for c in &level {
            for extra in neighbor_cells(c) {
                let mut grown = c.clone();
                grown.push(extra);
                grown.sort_unstable();
                next.insert(grown);
            }
        }
        level = next;
    }
    level.iter().map(|c| Polyomino::new(c, Symmetry::Rotation)).collect()
}

/// Checks that a `k`-loop with one auxiliary module, extended by a module at
/// each gap position and completed to `graph.n` modules, can always reach a
/// state with a loop of `k + 1`.
pub fn check_induction_on(graph: &MoveGraph, k: usize) -> Result<InductionReport, Error> {
    let n = graph.n;
    if k < 4 || k + 2 > n {
        return Err(Error::Precondition("loop size must lie in 4..=n-2"));
    }
    let mut instances: BTreeMap<GapCase, BTreeSet<Polyomino>> = BTreeMap::new();
    let mut bases = 0;
    for base in enumerate_polyominoes(k + 1, Flavor::OneSided) {
        let r = vgg(&SlotGraph::from_cells(base.cells()));
        if r.max_strict_loop != k {
            continue;
        }
        let rec = r.longest_strict.expect("a loop of the maximum size was seen");
        bases += 1;
        let cells = base.cells();
        let mut order = rec.vertices.clone();
        if rec.turn == Turn::Clockwise {
            order.reverse();
        }
        let aux = (0..cells.len()).find(|m| !order.contains(m)).expect("one module is off the loop");
        let h = order.iter().position(|&m| adjacent(cells[m], cells[aux])).expect("the auxiliary touches the loop");
        order.rotate_left(h);
        for c in neighbor_cells(cells) {
            let gap = (1..order.len()).find(|&i| adjacent(cells[order[i]], c));
            let Some(gap) = gap else { continue };
            let case = match gap {
                1 => GapCase::First,
                2 => GapCase::Second,
                _ => GapCase::Later,
            };
            let mut grown = cells.to_vec();
            grown.push(c);
            instances.entry(case).or_default().extend(completions(&grown, n));
        }
    }
    let mut cases = Vec::new();
    for case in [GapCase::First, GapCase::Second, GapCase::Later] {
        let set = instances.remove(&case).unwrap_or_default();
        let passed = set
            .iter()
            .filter(|p| {
                graph.index_of(p).and_then(|i| graph.path_to(i, |x| graph.loop_size[x] > k)).is_some()
            })
            .count();
        cases.push(CaseResult { case, instances: set.len(), passed });
    }
    Ok(InductionReport { k, n, bases, cases })
}

pub fn check_induction(k: usize, n: usize) -> Result<InductionReport, Error> {
    if k < 4 || k + 2 > n {
        return Err(Error::Precondition("loop size must lie in 4..=n-2"));
    }
    check_induction_on(&MoveGraph::build(n)?, k)
}

/// Module pairs connected in a morph's final graph, for comparison with the
/// canonical graph of its cells.
pub fn final_pairs(state: &Polyomino, m: &Morph) -> Vec<(usize, usize)> {
    let mut g = SlotGraph::from_cells(state.cells());
    for s in &m.steps {
        if s.is_connect() {
            g.connect(s.edge);
        } else {
            g.disconnect(s.edge.u, s.edge.v);
        }
    }
    g.pairs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::{replay, Mode};

    fn poly(cells: &[Cell]) -> Polyomino {
        Polyomino::new(cells, Symmetry::Rotation)
    }

    #[test]
    fn straight_and_square_tetrominoes_are_inert() {
        assert!(morphpivot_successors(&poly(&[(0, 0), (1, 0), (2, 0), (3, 0)])).is_empty());
        assert!(morphpivot_successors(&poly(&[(0, 0), (1, 0), (0, 1), (1, 1)])).is_empty());
    }

    #[test]
    fn l_triomino_has_no_move() {
        assert!(morphpivot_successors(&poly(&[(0, 0), (1, 0), (1, 1)])).is_empty());
    }

    #[test]
    fn l_tetromino_reaches_another_shape() {
        let l = poly(&[(0, 0), (0, 1), (0, 2), (1, 0)]);
        let next = morphpivot_successors(&l);
        assert!(next.iter().any(|p| p.renormalize(Symmetry::Full) != l.renormalize(Symmetry::Full)));
    }

    #[test]
    fn every_morph_replays_in_strict_mode() {
        for state in enumerate_polyominoes(5, Flavor::OneSided) {
            for (target, m) in forward_moves(&state) {
                let end = SlotGraph::from_cells(&m.cells);
                let g = SlotGraph::from_cells(state.cells());
                let mut h = g.clone();
                for s in &m.steps {
                    crate::validate::apply_step(&mut h, s, Mode::Strict).unwrap();
                }
                assert_eq!(h.pairs(), end.pairs(), "{state:?} -> {target:?}");
                assert!(replay(&g, &m.steps, &h, Mode::Strict).ok);
                assert_eq!(final_pairs(&state, &m), end.pairs());
            }
        }
    }

    #[test]
    fn tetromino_classes() {
        let c = isotypy_classes(4).unwrap();
        assert_eq!(c.s_values, [0, 3]);
        assert!(c.mismatches.is_empty(), "{:?}", c.mismatches);
        assert_eq!(c.class(0).len(), 2);
        assert_eq!(c.class(3).len(), 3);
    }

    #[test]
    fn straight_pentomino_has_zero_s() {
        let i5 = Configuration::from_cells(&[(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)]).unwrap();
        assert_eq!(compute_s(&i5, 100).unwrap(), 0);
    }

    #[test]
    fn budget_is_enforced() {
        let l = Configuration::from_cells(&[(0, 0), (0, 1), (0, 2), (1, 0)]).unwrap();
        assert_eq!(compute_s(&l, 1), Err(Error::BudgetExceeded("reachable set larger than the budget")));
        assert!(matches!(MoveGraph::build(9), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn induction_precondition() {
        assert!(matches!(check_induction(3, 7), Err(Error::Precondition(_))));
        assert!(matches!(check_induction(6, 7), Err(Error::Precondition(_))));
    }

    #[test]
    fn completions_of_a_domino() {
        assert_eq!(completions(&[(0, 0), (1, 0)], 3).len(), 2);
    }
}
