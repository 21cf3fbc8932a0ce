use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{cells_linear, transform_cell, translate_to_origin, Cell, Configuration, Symmetry};

/// An unlabeled cell set in normal form: sorted and shifted to the origin.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Polyomino(Vec<Cell>);

impl Polyomino {
    pub fn new(cells: &[Cell], sym: Symmetry) -> Polyomino {
        let mut best: Option<Vec<Cell>> = None;
        for &(r, m) in sym.transforms() {
            let moved: Vec<Cell> = cells.iter().map(|&c| transform_cell(c, r, m)).collect();
            let mut moved = translate_to_origin(&moved);
            moved.sort_unstable();
            if best.as_ref().is_none_or(|b| moved < *b) {
                best = Some(moved);
            }
        }
        Polyomino(best.unwrap_or_default())
    }

    pub fn cells(&self) -> &[Cell] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn is_linear(&self) -> bool {
        cells_linear(&self.0)
    }

    pub fn renormalize(&self, sym: Symmetry) -> Polyomino {
        Polyomino::new(&self.0, sym)
    }

    pub fn to_config(&self) -> Configuration {
        Configuration::from_cells(&self.0).expect("normal forms are injective")
    }

    /// Cells rendered as `x,y;x,y;...`.
    pub fn code(&self) -> alloc::string::String {
        use core::fmt::Write;
        let mut s = alloc::string::String::new();
        for (i, (x, y)) in self.0.iter().enumerate() {
            if i > 0 {
                s.push(';');
            }
            let _ = write!(s, "{x},{y}");
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// Up to translation, rotation and reflection.
    Free,
    /// Up to translation and rotation.
    OneSided,
    /// Up to translation only.
    Fixed,
}

impl Flavor {
    pub fn symmetry(self) -> Symmetry {
        match self {
            Flavor::Free => Symmetry::Full,
            Flavor::OneSided => Symmetry::Rotation,
            Flavor::Fixed => Symmetry::Translation,
        }
    }
}

const STEPS: [(i32, i32); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Every polyomino with `n` cells, grown cell by cell and deduplicated by
/// normal form; sorted.
pub fn enumerate_polyominoes(n: usize, flavor: Flavor) -> Vec<Polyomino> {
    if n == 0 {
        return Vec::new();
    }
    let sym = flavor.symmetry();
    let mut level: BTreeSet<Polyomino> = BTreeSet::from([Polyomino(alloc::vec![(0, 0)])]);
    for _ in 1..n {
        let mut next = BTreeSet::new();
        for p in &level {
            let set: BTreeSet<Cell> = p.0.iter().copied().collect();
            for &(x, y) in &p.0 {
                for (dx, dy) in STEPS {
                    let c = (x + dx, y + dy);
                    if !set.contains(&c) {
                        let mut cells = p.0.clone();
                        cells.push(c);
                        next.insert(Polyomino::new(&cells, sym));
                    }
                }
            }
        }
        level = next;
    }
    level.into_iter().collect()
}

/// Grows a polyomino from one cell, adding a uniformly chosen empty neighbor
/// cell at each step. Normalized under all square symmetries.
pub fn random_polyomino_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Polyomino {
    random_shape_with(n, Symmetry::Full, rng)
}

/// Same growth process, normalized under `sym`.
pub fn random_shape_with<R: Rng + ?Sized>(n: usize, sym: Symmetry, rng: &mut R) -> Polyomino {
    if n == 0 {
        return Polyomino(Vec::new());
    }
    let mut cells: Vec<Cell> = alloc::vec![(0, 0)];
    let mut set: BTreeSet<Cell> = cells.iter().copied().collect();
    while cells.len() < n {
        let frontier: BTreeSet<Cell> = cells
            .iter()
            .flat_map(|&(x, y)| STEPS.iter().map(move |&(dx, dy)| (x + dx, y + dy)))
            .filter(|c| !set.contains(c))
            .collect();
        let pick = rng.random_range(0..frontier.len());
        let c = *frontier.iter().nth(pick).expect("frontier is never empty");
        cells.push(c);
        set.insert(c);
    }
    Polyomino::new(&cells, sym)
}

pub fn random_polyomino(n: usize, seed: u64) -> Polyomino {
    random_polyomino_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random polyomino that is not a straight line (for n >= 3).
pub fn random_nonlinear_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Polyomino {
    loop {
        let p = random_polyomino_with(n, rng);
        if n < 3 || !p.is_linear() {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| enumerate_polyominoes(n, Flavor::Free).len()).collect();
        assert_eq!(counts, [1, 1, 2, 5, 12, 35]);
    }

    #[test]
    fn fixed_and_one_sided_counts() {
        assert_eq!(enumerate_polyominoes(4, Flavor::Fixed).len(), 19);
        assert_eq!(enumerate_polyominoes(4, Flavor::OneSided).len(), 7);
        assert_eq!(enumerate_polyominoes(5, Flavor::OneSided).len(), 18);
    }

    #[test]
    fn l_tetromino_images_share_a_normal_form() {
        let l = [(0, 0), (0, 1), (0, 2), (1, 0)];
        let base = Polyomino::new(&l, Symmetry::Full);
        for r in 0..4 {
            for m in [false, true] {
                let img: Vec<Cell> = l.iter().map(|&c| transform_cell(c, r, m)).collect();
                assert_eq!(Polyomino::new(&img, Symmetry::Full), base);
            }
        }
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        assert_eq!(random_polyomino(7, 42), random_polyomino(7, 42));
        assert_eq!(random_polyomino(1, 9).cells(), &[(0, 0)]);
    }

    #[test]
    fn code_format() {
        let p = Polyomino::new(&[(3, 3), (4, 3)], Symmetry::Translation);
        assert_eq!(p.code(), "0,0;1,0");
    }
}
