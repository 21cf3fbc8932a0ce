use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::Error;
use crate::graph::SlotGraph;

pub type Cell = (i32, i32);
pub type ModuleId = u32;

/// Which symmetries a normal form quotients out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Translation,
    /// Translation plus the four planar rotations.
    Rotation,
    /// Translation plus all eight square symmetries.
    Full,
}

impl Symmetry {
    pub(crate) fn transforms(self) -> &'static [(u8, bool)] {
        const T: [(u8, bool); 1] = [(0, false)];
        const R: [(u8, bool); 4] = [(0, false), (1, false), (2, false), (3, false)];
        const F: [(u8, bool); 8] = [
            (0, false),
            (1, false),
            (2, false),
            (3, false),
            (0, true),
            (1, true),
            (2, true),
            (3, true),
        ];
        match self {
            Symmetry::Translation => &T,
            Symmetry::Rotation => &R,
            Symmetry::Full => &F,
        }
    }
}

/// Mirror (x -> -x) first when `mirror`, then rotate counterclockwise `quarter_turns` times.
pub fn transform_cell(c: Cell, quarter_turns: u8, mirror: bool) -> Cell {
    let (mut x, mut y) = c;
    if mirror {
        x = -x;
    }
    for _ in 0..quarter_turns % 4 {
        (x, y) = (-y, x);
    }
    (x, y)
}

pub fn translate_to_origin(cells: &[Cell]) -> Vec<Cell> {
    let mx = cells.iter().map(|c| c.0).min().unwrap_or(0);
    let my = cells.iter().map(|c| c.1).min().unwrap_or(0);
    cells.iter().map(|&(x, y)| (x - mx, y - my)).collect()
}

pub fn cells_connected(cells: &[Cell]) -> bool {
    if cells.is_empty() {
        return true;
    }
    let set: BTreeSet<Cell> = cells.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![cells[0]];
    seen.insert(cells[0]);
    while let Some((x, y)) = stack.pop() {
        for (dx, dy) in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
            let c = (x + dx, y + dy);
            if set.contains(&c) && seen.insert(c) {
                stack.push(c);
            }
        }
    }
    seen.len() == set.len()
}

pub fn cells_linear(cells: &[Cell]) -> bool {
    match cells.first() {
        None => true,
        Some(&(x0, y0)) => cells.iter().all(|c| c.0 == x0) || cells.iter().all(|c| c.1 == y0),
    }
}

/// Labeled modules placed injectively on the integer lattice.
///
/// Module `i` (an internal index) carries the external id `ids[i]` and sits at `cells[i]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    ids: Vec<ModuleId>,
    cells: Vec<Cell>,
}

/// A normal form together with the label map back to the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub config: Configuration,
    /// `origin[i]` is the input index of normalized module `i`.
    pub origin: Vec<usize>,
}

impl Configuration {
    pub fn new(modules: impl IntoIterator<Item = (ModuleId, Cell)>) -> Result<Self, Error> {
        let (ids, cells): (Vec<_>, Vec<_>) = modules.into_iter().unzip();
        if ids.iter().collect::<BTreeSet<_>>().len() != ids.len() {
            return Err(Error::InvalidConfiguration("duplicate module id"));
        }
        if cells.iter().collect::<BTreeSet<_>>().len() != cells.len() {
            return Err(Error::InvalidConfiguration("two modules share a cell"));
        }
        Ok(Configuration { ids, cells })
    }

    /// Modules numbered `1..=n` in the given cell order.
    pub fn from_cells(cells: &[Cell]) -> Result<Self, Error> {
        Configuration::new(cells.iter().enumerate().map(|(i, &c)| (i as ModuleId + 1, c)))
    }

    pub fn n(&self) -> usize {
        self.cells.len()
    }

    pub fn ids(&self) -> &[ModuleId] {
        &self.ids
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn id(&self, i: usize) -> ModuleId {
        self.ids[i]
    }

    pub fn cell(&self, i: usize) -> Cell {
        self.cells[i]
    }

    pub fn index_of(&self, id: ModuleId) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    pub fn module_at(&self, c: Cell) -> Option<usize> {
        self.cells.iter().position(|&x| x == c)
    }

    pub fn is_connected(&self) -> bool {
        cells_connected(&self.cells)
    }

    pub fn is_linear(&self) -> bool {
        cells_linear(&self.cells)
    }

    /// Canonical connection graph: every unit-distance pair is connected.
    pub fn graph(&self) -> SlotGraph {
        SlotGraph::from_cells(&self.cells)
    }

    pub fn adjacency(&self) -> Result<SlotGraph, Error> {
        let g = self.graph();
        if g.is_connected() {
            Ok(g)
        } else {
            Err(Error::DisconnectedConfiguration)
        }
    }

    pub fn with_ids(&self, ids: Vec<ModuleId>) -> Result<Self, Error> {
        if ids.len() != self.n() {
            return Err(Error::InvalidConfiguration("id count differs from module count"));
        }
        Configuration::new(ids.into_iter().zip(self.cells.iter().copied()))
    }

    /// Normal form under `sym`: the lexicographically smallest sorted cell list
    /// over the symmetry group, shifted to the origin, modules relabeled
    /// `1..=n` by cell order.
    pub fn normalize(&self, sym: Symmetry) -> Normalized {
        let mut best: Option<(Vec<Cell>, Vec<usize>)> = None;
        for &(r, m) in sym.transforms() {
            let moved: Vec<Cell> = self.cells.iter().map(|&c| transform_cell(c, r, m)).collect();
            let moved = translate_to_origin(&moved);
            let mut order: Vec<usize> = (0..self.n()).collect();
            order.sort_by_key(|&i| moved[i]);
            let sorted: Vec<Cell> = order.iter().map(|&i| moved[i]).collect();
            if best.as_ref().is_none_or(|(b, _)| sorted < *b) {
                best = Some((sorted, order));
            }
        }
        let (cells, origin) = best.unwrap_or_default();
        let ids = (1..=cells.len() as ModuleId).collect();
        Normalized { config: Configuration { ids, cells }, origin }
    }

    /// Sorted cell list of the normal form under `sym`.
    pub fn shape(&self, sym: Symmetry) -> Vec<Cell> {
        self.normalize(sym).config.cells
    }

    pub fn id_map(&self) -> BTreeMap<ModuleId, usize> {
        self.ids.iter().enumerate().map(|(i, &id)| (id, i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(cells: &[Cell]) -> Configuration {
        Configuration::from_cells(cells).unwrap()
    }

    #[test]
    fn rejects_shared_cells_and_ids() {
        assert!(Configuration::new([(1, (0, 0)), (2, (0, 0))]).is_err());
        assert!(Configuration::new([(1, (0, 0)), (1, (1, 0))]).is_err());
    }

    #[test]
    fn translation_normal_form() {
        let n = cfg(&[(5, 5), (6, 5)]).normalize(Symmetry::Translation);
        assert_eq!(n.config.cells(), &[(0, 0), (1, 0)]);
    }

    #[test]
    fn vertical_domino_becomes_the_free_domino_form() {
        let v = cfg(&[(3, 3), (3, 4)]).shape(Symmetry::Full);
        let h = cfg(&[(0, 0), (1, 0)]).shape(Symmetry::Full);
        assert_eq!(v, h);
    }

    #[test]
    fn label_map_points_back_to_input() {
        let c = Configuration::new([(7, (2, 1)), (9, (1, 1)), (4, (1, 2))]).unwrap();
        let n = c.normalize(Symmetry::Translation);
        for (i, &o) in n.origin.iter().enumerate() {
            let (x, y) = c.cell(o);
            assert_eq!(n.config.cell(i), (x - 1, y - 1));
        }
    }

    #[test]
    fn linearity() {
        assert!(cfg(&[(0, 0), (1, 0), (2, 0), (3, 0)]).is_linear());
        assert!(!cfg(&[(0, 0), (1, 0), (2, 0), (2, 1)]).is_linear());
        assert!(cfg(&[(4, 4)]).is_linear());
    }

    #[test]
    fn disconnected_configuration_reported() {
        let c = cfg(&[(0, 0), (2, 0)]);
        assert_eq!(c.adjacency().unwrap_err(), Error::DisconnectedConfiguration);
        assert!(cfg(&[(0, 0), (1, 0)]).adjacency().is_ok());
    }

    #[test]
    fn normalize_idempotent_on_an_example() {
        let c = cfg(&[(0, 0), (0, 1), (0, 2), (1, 2)]);
        for sym in [Symmetry::Translation, Symmetry::Rotation, Symmetry::Full] {
            let once = c.normalize(sym).config;
            assert_eq!(once.normalize(sym).config, once);
        }
    }
}
