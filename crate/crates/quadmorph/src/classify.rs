//! Multi-threaded construction of the exhaustive move graph.

use quadmorph_core::oracle::{classify, forward_moves, state_loop_size, Classification, MoveGraph, MAX_ORACLE_N};
use quadmorph_core::polyomino::{enumerate_polyominoes, Flavor};
use quadmorph_core::Error;
use rayon::prelude::*;

/// Same result as `MoveGraph::build`, with the per-state work spread over threads.
pub fn build_graph(n: usize) -> Result<MoveGraph, Error> {
    if n > MAX_ORACLE_N {
        return Err(Error::BudgetExceeded("module count above the exhaustive limit"));
    }
    let states = enumerate_polyominoes(n, Flavor::OneSided);
    let work: Vec<(Vec<_>, usize)> =
        states.par_iter().map(|s| (forward_moves(s).into_keys().collect(), state_loop_size(s))).collect();
    let (forward, loop_size) = work.into_iter().unzip();
    Ok(MoveGraph::from_forward(n, states, forward, loop_size))
}

pub fn isotypy_classes(n: usize) -> Result<Classification, Error> {
    build_graph(n).map(|g| classify(&g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_sequential_build() {
        for n in 1..=6 {
            let a = build_graph(n).unwrap();
            let b = MoveGraph::build(n).unwrap();
            assert_eq!(a.states, b.states);
            assert_eq!(a.succ, b.succ);
            assert_eq!(a.component_s, b.component_s);
        }
    }

    #[test]
    fn refuses_large_n() {
        assert!(matches!(build_graph(MAX_ORACLE_N + 1), Err(Error::BudgetExceeded(_))));
    }
}
