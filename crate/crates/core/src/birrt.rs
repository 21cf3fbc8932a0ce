//! Bidirectional RRT over whole-configuration states, one morph per edge.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::isomap::check_pair;
use crate::lattice::{transform_cell, Cell, Configuration, ModuleId, Symmetry};
use crate::oracle::forward_moves;
use crate::plan::HopPlan;
use crate::polyomino::{random_shape_with, Polyomino};

/// Minimum total cost of a perfect matching rows to columns, with the column
/// chosen for every row.
pub fn min_assignment(cost: &[Vec<i64>]) -> (i64, Vec<usize>) {
    let n = cost.len();
    if n == 0 {
        return (0, Vec::new());
    }
    // potentials over 1-based rows/columns; column 0 is the virtual start
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0usize; n];
    for j in 1..=n {
        col[row_of[j] - 1] = j - 1;
    }
    let total = (0..n).map(|i| cost[i][col[i]]).sum();
    (total, col)
}

fn bounds(cells: &[Cell]) -> (i32, i32, i32, i32) {
    let xs = cells.iter().map(|c| c.0);
    let ys = cells.iter().map(|c| c.1);
    (xs.clone().min().unwrap_or(0), xs.max().unwrap_or(0), ys.clone().min().unwrap_or(0), ys.max().unwrap_or(0))
}

/// Fewest unit cell moves turning one shape into the other, minimized over
/// rotations and overlapping placements of `b`.
pub fn group_manhattan_distance(a: &[Cell], b: &[Cell]) -> i64 {
    if a.len() != b.len() {
        return i64::MAX;
    }
    let (ax0, ax1, ay0, ay1) = bounds(a);
    let mut best = i64::MAX;
    for r in 0..4 {
        let rb: Vec<Cell> = b.iter().map(|&c| transform_cell(c, r, false)).collect();
        let (bx0, bx1, by0, by1) = bounds(&rb);
        for dx in ax0 - bx1..=ax1 - bx0 {
            for dy in ay0 - by1..=ay1 - by0 {
                let cost: Vec<Vec<i64>> = a
                    .iter()
                    .map(|&(x, y)| rb.iter().map(|&(u, v)| ((x - u - dx).abs() + (y - v - dy).abs()) as i64).collect())
                    .collect();
                best = best.min(min_assignment(&cost).0);
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BirrtParams {
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for BirrtParams {
    fn default() -> Self {
        BirrtParams { seed: 0, max_iterations: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirrtResult {
    /// States from start to goal.
    pub states: Vec<Polyomino>,
    pub hops: Vec<HopPlan>,
    /// Goal module id for every start module id.
    pub assignment: Vec<(ModuleId, ModuleId)>,
    pub iterations: usize,
}

impl BirrtResult {
    /// One step per morph.
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }
}

struct Tree {
    nodes: Vec<Polyomino>,
    parent: Vec<Option<usize>>,
    index: BTreeMap<Polyomino, usize>,
}

impl Tree {
    fn new(root: Polyomino) -> Tree {
        Tree { index: BTreeMap::from([(root.clone(), 0)]), nodes: vec![root], parent: vec![None] }
    }

    fn add(&mut self, p: Polyomino, parent: usize) -> usize {
        let i = self.nodes.len();
        self.index.insert(p.clone(), i);
        self.nodes.push(p);
        self.parent.push(Some(parent));
        i
    }

    fn nearest(&self, target: &Polyomino) -> usize {
        (0..self.nodes.len())
            .min_by(|&i, &j| {
                let di = group_manhattan_distance(self.nodes[i].cells(), target.cells());
                let dj = group_manhattan_distance(self.nodes[j].cells(), target.cells());
                di.cmp(&dj).then_with(|| self.nodes[i].cmp(&self.nodes[j]))
            })
            .expect("trees are never empty")
    }

    /// Root to `i`.
    fn path(&self, mut i: usize) -> Vec<Polyomino> {
        let mut out = vec![self.nodes[i].clone()];
        while let Some(p) = self.parent[i] {
            out.push(self.nodes[p].clone());
            i = p;
        }
        out.reverse();
        out
    }
}

/// Successor lookups for one search, with forward moves cached.
#[derive(Default)]
struct Successors {
    forward: BTreeMap<Polyomino, BTreeSet<Polyomino>>,
    succ: BTreeMap<Polyomino, Vec<Polyomino>>,
}

impl Successors {
    fn forward(&mut self, x: &Polyomino) -> &BTreeSet<Polyomino> {
        self.forward.entry(x.clone()).or_insert_with(|| forward_moves(x).into_keys().collect())
    }

    fn of(&mut self, x: &Polyomino) -> Vec<Polyomino> {
        if let Some(s) = self.succ.get(x) {
            return s.clone();
        }
        let fwd: Vec<Polyomino> = self.forward(x).iter().filter(|y| *y != x).cloned().collect();
        let s: Vec<Polyomino> = fwd.into_iter().filter(|y| self.forward(y).contains(x)).collect();
        self.succ.insert(x.clone(), s.clone());
        s
    }
}

fn closest(options: &[Polyomino], target: &Polyomino) -> Option<(Polyomino, i64)> {
    options
        .iter()
        .map(|y| (y.clone(), group_manhattan_distance(y.cells(), target.cells())))
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
}

/// Labeled hops along `states`, carrying `start`'s module ids.
pub fn expand_path(start: &Configuration, states: &[Polyomino]) -> Vec<HopPlan> {
    let norm = start.normalize(Symmetry::Rotation);
    let mut labels: Vec<ModuleId> = norm.origin.iter().map(|&i| start.id(i)).collect();
    let mut hops = Vec::new();
    for w in states.windows(2) {
        let m = forward_moves(&w[0]).remove(&w[1]).expect("consecutive states are one move apart");
        let from = Configuration::new(labels.iter().copied().zip(w[0].cells().iter().copied())).expect("valid state");
        let to = Configuration::new(labels.iter().copied().zip(m.cells.iter().copied())).expect("valid embedding");
        let s_con = m.steps.iter().filter(|s| s.is_connect()).count();
        hops.push(HopPlan { from, to: to.clone(), s_discon: m.steps.len() - s_con, s_con, steps: m.steps, compensations: 0 });
        let next = to.normalize(Symmetry::Rotation);
        labels = next.origin.iter().map(|&i| to.id(i)).collect();
    }
    hops
}

/// Pairs modules of two placements of the same rotation class.
fn match_modules(end: &Configuration, goal: &Configuration) -> Vec<(ModuleId, ModuleId)> {
    let a = end.normalize(Symmetry::Rotation);
    let b = goal.normalize(Symmetry::Rotation);
    let mut out: Vec<(ModuleId, ModuleId)> = a.origin.iter().zip(&b.origin).map(|(&i, &j)| (end.id(i), goal.id(j))).collect();
    out.sort_unstable();
    out
}

pub fn birrt_plan(start: &Configuration, goal: &Configuration, params: &BirrtParams) -> Result<BirrtResult, Error> {
    check_pair(start, goal)?;
    let n = start.n();
    let s = Polyomino::new(start.cells(), Symmetry::Rotation);
    let g = Polyomino::new(goal.cells(), Symmetry::Rotation);
    if s == g {
        return Ok(BirrtResult { states: vec![s], hops: Vec::new(), assignment: match_modules(start, goal), iterations: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut succ = Successors::default();
    let mut a = Tree::new(s);
    let mut b = Tree::new(g);
    let mut a_is_start = true;
    for it in 1..=params.max_iterations {
        let sample = random_shape_with(n, Symmetry::Rotation, &mut rng);
        let near = a.nearest(&sample);
        let options = succ.of(&a.nodes[near].clone());
        let meet = match closest(&options, &sample) {
            Some((x, _)) if !a.index.contains_key(&x) => {
                a.add(x.clone(), near);
                if b.index.contains_key(&x) {
                    Some(x)
                } else {
                    extend_toward(&mut b, &a, &x, &mut succ)
                }
            }
            _ => None,
        };
        if let Some(q) = meet {
            let mut pa = a.path(a.index[&q]);
            let mut pb = b.path(b.index[&q]);
            pb.pop();
            pb.reverse();
            pa.extend(pb);
            if !a_is_start {
                pa.reverse();
            }
            let hops = expand_path(start, &pa);
            let assignment = match_modules(&hops.last().expect("distinct ends need a move").to, goal);
            return Ok(BirrtResult { states: pa, hops, assignment, iterations: it });
        }
        core::mem::swap(&mut a, &mut b);
        a_is_start = !a_is_start;
    }
    Err(Error::SearchExhausted { samples: params.max_iterations })
}

/// Greedily grows `tree` toward `target`; returns a state shared with `other` if reached.
fn extend_toward(tree: &mut Tree, other: &Tree, target: &Polyomino, succ: &mut Successors) -> Option<Polyomino> {
    let mut cur = tree.nearest(target);
    let mut d = group_manhattan_distance(tree.nodes[cur].cells(), target.cells());
    loop {
        let options = succ.of(&tree.nodes[cur].clone());
        let (y, dy) = closest(&options, target)?;
        if dy >= d || tree.index.contains_key(&y) {
            return None;
        }
        cur = tree.add(y.clone(), cur);
        d = dy;
        if other.index.contains_key(&y) {
            return Some(y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::Mode;

    fn brute(cost: &[Vec<i64>]) -> i64 {
        fn go(cost: &[Vec<i64>], row: usize, used: &mut Vec<bool>) -> i64 {
            if row == cost.len() {
                return 0;
            }
            let mut best = i64::MAX;
            for j in 0..cost.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row][j] + go(cost, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        go(cost, 0, &mut vec![false; cost.len()])
    }

    #[test]
    fn assignment_matches_brute_force() {
        let mut x = 12345u64;
        for n in 1..=6 {
            for _ in 0..30 {
                let cost: Vec<Vec<i64>> = (0..n)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                                ((x >> 33) % 20) as i64
                            })
                            .collect()
                    })
                    .collect();
                let (total, col) = min_assignment(&cost);
                assert_eq!(total, brute(&cost));
                assert_eq!(col.iter().collect::<BTreeSet<_>>().len(), n);
            }
        }
    }

    #[test]
    fn distance_ignores_rotation_and_translation() {
        let l = [(0, 0), (0, 1), (0, 2), (1, 0)];
        let turned: Vec<Cell> = l.iter().map(|&c| transform_cell(c, 1, false)).map(|(x, y)| (x + 5, y - 3)).collect();
        assert_eq!(group_manhattan_distance(&l, &turned), 0);
        let line = [(0, 0), (1, 0), (2, 0), (3, 0)];
        assert_eq!(group_manhattan_distance(&l, &line), 2);
    }

    #[test]
    fn heptomino_pair_is_solved_with_valid_hops() {
        let a = Configuration::from_cells(&[(0, 0), (1, 0), (2, 0), (2, 1), (3, 1), (1, 1), (1, 2)]).unwrap();
        let b = Configuration::from_cells(&[(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (3, 1)]).unwrap();
        let r = birrt_plan(&a, &b, &BirrtParams::default()).unwrap();
        assert_eq!(r.hops.len(), r.steps());
        assert_eq!(r.states.first().unwrap(), &Polyomino::new(a.cells(), Symmetry::Rotation));
        assert_eq!(r.states.last().unwrap(), &Polyomino::new(b.cells(), Symmetry::Rotation));
        for h in &r.hops {
            assert!(h.validate(Mode::Strict).ok);
        }
        assert!(crate::plan::validate_plan(&a, &b, &r.hops, &r.assignment, Mode::Strict).ok);
        let ids: Vec<ModuleId> = a.normalize(Symmetry::Rotation).origin.iter().map(|&i| a.id(i)).collect();
        assert_eq!(r.hops[0].from.ids(), ids);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let a = Configuration::from_cells(&[(0, 0), (1, 0), (2, 0), (2, 1), (3, 1), (1, 1), (1, 2)]).unwrap();
        let b = Configuration::from_cells(&[(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (3, 1)]).unwrap();
        let r = birrt_plan(&a, &b, &BirrtParams { seed: 0, max_iterations: 0 });
        assert_eq!(r, Err(Error::SearchExhausted { samples: 0 }));
    }
}
