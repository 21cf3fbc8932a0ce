//! Placing connection graphs back onto the lattice.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::dir::Dir;
use crate::error::Error;
use crate::graph::{Edge, SlotGraph};
use crate::lattice::{translate_to_origin, Cell, Configuration};

/// Placement of a graph whose slots are module-local: `rotation[m]` quarter
/// turns carry module `m`'s slot frame onto the global frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidEmbedding {
    pub cells: Vec<Cell>,
    pub rotation: Vec<u8>,
}

impl RigidEmbedding {
    pub fn global(&self, m: usize, local: Dir) -> Dir {
        local.rotate(self.rotation[m] as i32)
    }

    pub fn local(&self, m: usize, global: Dir) -> Dir {
        global.rotate(-(self.rotation[m] as i32))
    }

    /// Unit-adjacent module pairs not connected in `g`, each as the edge that
    /// would join them, by module and then +x before +y.
    pub fn missing_edges(&self, g: &SlotGraph) -> Vec<Edge> {
        let at: BTreeMap<Cell, usize> = self.cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut out = Vec::new();
        for (i, &(x, y)) in self.cells.iter().enumerate() {
            for d in [Dir::Left, Dir::Top] {
                let (dx, dy) = d.normal();
                if let Some(&j) = at.get(&(x + dx, y + dy)) {
                    if !g.has_edge(i, j) {
                        out.push(Edge::new(i, self.local(i, d), j, self.local(j, d.opposite())));
                    }
                }
            }
        }
        out
    }
}

/// Rigid placement of a connected graph, module 0 fixed at the origin with
/// its frame unrotated. `None` when edges disagree or two modules collide.
pub fn embed_rigid(g: &SlotGraph) -> Option<RigidEmbedding> {
    let n = g.n();
    if n == 0 {
        return Some(RigidEmbedding { cells: Vec::new(), rotation: Vec::new() });
    }
    let mut pos: Vec<Option<Cell>> = vec![None; n];
    let mut rot = vec![0u8; n];
    pos[0] = Some((0, 0));
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        let pu = pos[u].expect("queued modules are placed");
        for su in Dir::ALL {
            let Some(v) = g.slot(u, su) else { continue };
            let sv = g.slot_toward(v, u).expect("slots are symmetric");
            let d = su.rotate(rot[u] as i32);
            let (dx, dy) = d.normal();
            let p = (pu.0 + dx, pu.1 + dy);
            let rv = (d.opposite().index() as i32 - sv.index() as i32).rem_euclid(4) as u8;
            match pos[v] {
                Some(q) => {
                    if q != p || rot[v] != rv {
                        return None;
                    }
                }
                None => {
                    pos[v] = Some(p);
                    rot[v] = rv;
                    stack.push(v);
                }
            }
        }
    }
    let cells: Option<Vec<Cell>> = pos.into_iter().collect();
    let cells = cells?;
    if cells.iter().collect::<BTreeSet<_>>().len() != n {
        return None;
    }
    Some(RigidEmbedding { cells, rotation: rot })
}

/// An edge to embed; `slots` fixes the global directions when given.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LooseEdge {
    pub a: usize,
    pub b: usize,
    pub slots: Option<(Dir, Dir)>,
}

impl LooseEdge {
    pub fn free(a: usize, b: usize) -> LooseEdge {
        LooseEdge { a, b, slots: None }
    }

    pub fn fixed(a: usize, sa: Dir, b: usize, sb: Dir) -> LooseEdge {
        LooseEdge { a, b, slots: Some((sa, sb)) }
    }

    fn allows(&self, from: usize, d: Dir) -> bool {
        match self.slots {
            None => true,
            Some((sa, sb)) => {
                if from == self.a {
                    sa == d && sb == d.opposite()
                } else {
                    sb == d && sa == d.opposite()
                }
            }
        }
    }
}

/// All lattice placements (up to translation) realizing every edge as a unit
/// adjacency in its fixed direction, if any. Results are canonical
/// configurations, so modules that end up adjacent are connected even if the
/// input had no edge between them.
pub fn embed_graph(n: usize, edges: &[LooseEdge]) -> Result<Vec<Configuration>, Error> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut adj: Vec<Vec<(usize, LooseEdge)>> = vec![Vec::new(); n];
    for e in edges {
        if e.a >= n || e.b >= n || e.a == e.b {
            return Err(Error::NoEmbedding);
        }
        adj[e.a].push((e.b, *e));
        adj[e.b].push((e.a, *e));
    }
    if adj.iter().any(|a| a.len() > 4) {
        return Err(Error::NoEmbedding);
    }
    for (m, a) in adj.iter().enumerate() {
        let fixed: Vec<Dir> = a
            .iter()
            .filter_map(|(_, e)| e.slots.map(|(sa, sb)| if e.a == m { sa } else { sb }))
            .collect();
        if fixed.iter().collect::<BTreeSet<_>>().len() != fixed.len() {
            return Err(Error::NoEmbedding);
        }
    }
    // spanning order with a placed parent for every later module
    let mut order = vec![0usize];
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        for &(v, e) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent[v] = Some((u, e));
                order.push(v);
            }
        }
        i += 1;
    }
    if order.len() != n {
        return Err(Error::DisconnectedConfiguration);
    }
    let mut found = BTreeSet::new();
    let mut pos: Vec<Option<Cell>> = vec![None; n];
    pos[0] = Some((0, 0));
    place(1, &order, &parent, &adj, &mut pos, &mut found);
    if found.is_empty() {
        return Err(Error::NoEmbedding);
    }
    Ok(found.into_iter().map(|cells: Vec<Cell>| Configuration::from_cells(&cells).expect("placements are injective")).collect())
}

fn place(
    k: usize,
    order: &[usize],
    parent: &[Option<(usize, LooseEdge)>],
    adj: &[Vec<(usize, LooseEdge)>],
    pos: &mut [Option<Cell>],
    found: &mut BTreeSet<Vec<Cell>>,
) {
    if k == order.len() {
        let cells: Vec<Cell> = pos.iter().map(|p| p.expect("all placed")).collect();
        found.insert(translate_to_origin(&cells));
        return;
    }
    let v = order[k];
    let (u, _) = parent[v].expect("non-root modules have a parent");
    let pu = pos[u].expect("parents are placed first");
    for d in Dir::ALL {
        let (dx, dy) = d.normal();
        let p = (pu.0 + dx, pu.1 + dy);
        if pos.contains(&Some(p)) {
            continue;
        }
        let consistent = adj[v].iter().all(|&(w, e)| match pos[w] {
            None => true,
            Some(pw) => match Dir::from_normal((p.0 - pw.0, p.1 - pw.1)) {
                Some(dir) => e.allows(w, dir),
                None => false,
            },
        });
        if consistent {
            pos[v] = Some(p);
            place(k + 1, order, parent, adj, pos, found);
            pos[v] = None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Symmetry;

    #[test]
    fn rigid_embedding_of_a_canonical_graph_is_the_input() {
        let cells = [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2)];
        let e = embed_rigid(&SlotGraph::from_cells(&cells)).unwrap();
        assert_eq!(e.cells, cells);
        assert!(e.rotation.iter().all(|&r| r == 0));
    }

    #[test]
    fn rigid_embedding_tracks_module_rotation() {
        let mut g = SlotGraph::from_cells(&[(0, 0), (1, 0), (2, 0)]);
        g.rotate_module(1, 1);
        let e = embed_rigid(&g).unwrap();
        assert_eq!(e.rotation[1], 3);
        assert_eq!(e.cells, [(0, 0), (1, 0), (2, 0)]);
    }

    #[test]
    fn path_of_three_embeds_straight_and_bent() {
        let r = embed_graph(3, &[LooseEdge::free(0, 1), LooseEdge::free(1, 2)]).unwrap();
        let shapes: BTreeSet<_> = r.iter().map(|c| c.shape(Symmetry::Full)).collect();
        assert_eq!(shapes.len(), 2);
        // four directions for each edge minus the two folded-back ones
        assert_eq!(r.len(), 12);
    }

    #[test]
    fn four_cycle_is_the_square() {
        let e = [LooseEdge::free(0, 1), LooseEdge::free(1, 2), LooseEdge::free(2, 3), LooseEdge::free(3, 0)];
        let r = embed_graph(4, &e).unwrap();
        let square = Configuration::from_cells(&[(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap().shape(Symmetry::Full);
        assert!(r.iter().all(|c| c.shape(Symmetry::Full) == square));
    }

    #[test]
    fn triangle_has_no_embedding() {
        let e = [LooseEdge::free(0, 1), LooseEdge::free(1, 2), LooseEdge::free(2, 0)];
        assert_eq!(embed_graph(3, &e).unwrap_err(), Error::NoEmbedding);
    }

    #[test]
    fn fixed_slots_are_honored() {
        let e = [LooseEdge::fixed(0, Dir::Top, 1, Dir::Bottom)];
        let r = embed_graph(2, &e).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].cells(), &[(0, 0), (0, 1)]);
    }
}
