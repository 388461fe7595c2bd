//! Bounded dominating sets, red-blue domination and annotated partial
//! domination. Every search enumerates candidates by size and then
//! lexicographically, so the returned set is the first one in that order.

use serde::Serialize;

use crate::graph::{AnnotatedInstance, Graph, VertexSet};

fn covers(g: &Graph, alive: &VertexSet, dset: &VertexSet, need: &VertexSet) -> bool {
    need.is_subset(&g.closed_neighborhood(dset).intersection(alive))
}

/// Minimum dominating set of `G[alive]` if one of size at most `bound` exists.
pub fn min_dominating_set_within(g: &Graph, alive: &VertexSet, bound: usize) -> Option<VertexSet> {
    red_blue_dominating_set_within(g, alive, alive, alive, bound)
}

pub fn min_dominating_set(g: &Graph, bound: usize) -> Option<VertexSet> {
    min_dominating_set_within(g, &g.vertices(), bound)
}

/// Smallest `D ⊆ blue ∩ alive`, `|D| <= d`, with `red ∩ alive ⊆ N[D]` in `G[alive]`.
pub fn red_blue_dominating_set_within(
    g: &Graph,
    alive: &VertexSet,
    red: &VertexSet,
    blue: &VertexSet,
    d: usize,
) -> Option<VertexSet> {
    let need = red.intersection(alive);
    if need.is_empty() {
        return Some(VertexSet::new());
    }
    // Only blue vertices that see some red vertex are useful.
    let cand: VertexSet = blue
        .intersection(alive)
        .iter()
        .filter(|&v| g.neighbors(v).intersects(&need) || need.contains(v))
        .collect();
    cand.subsets_up_to(d).find(|dset| covers(g, alive, dset, &need))
}

pub fn red_blue_dominating_set(g: &Graph, red: &VertexSet, blue: &VertexSet, d: usize) -> Option<VertexSet> {
    red_blue_dominating_set_within(g, &g.vertices(), red, blue, d)
}

/// Vertices deleted (the red vertices left undominated) and the dominators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialDominationSolution {
    pub deleted: VertexSet,
    pub dominators: VertexSet,
}

/// Pluggable back end for annotated partial domination on `G[alive]`.
pub trait PartialDominationSolver {
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        g: &Graph,
        alive: &VertexSet,
        forbidden: &VertexSet,
        red: &VertexSet,
        blue: &VertexSet,
        k: usize,
        d: usize,
    ) -> Option<PartialDominationSolution>;
}

/// Tries every `D ⊆ blue`, `|D| <= d`, and deletes `red \ N[D]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct EnumerationSolver;

impl PartialDominationSolver for EnumerationSolver {
    fn solve(
        &self,
        g: &Graph,
        alive: &VertexSet,
        forbidden: &VertexSet,
        red: &VertexSet,
        blue: &VertexSet,
        k: usize,
        d: usize,
    ) -> Option<PartialDominationSolution> {
        let red = red.intersection(alive);
        blue.intersection(alive).subsets_up_to(d).find_map(|dset| {
            let x = red.difference(&g.closed_neighborhood(&dset));
            (x.is_disjoint(forbidden) && x.len() <= k)
                .then_some(PartialDominationSolution { deleted: x, dominators: dset })
        })
    }
}

pub fn annotated_partial_domination_within(
    g: &Graph,
    alive: &VertexSet,
    forbidden: &VertexSet,
    red: &VertexSet,
    blue: &VertexSet,
    k: usize,
    d: usize,
) -> Option<PartialDominationSolution> {
    EnumerationSolver.solve(g, alive, forbidden, red, blue, k, d)
}

/// Find `X ⊆ V \ F`, `|X| <= k`, and `D ⊆ B`, `|D| <= d`, with `D`
/// dominating `R \ X`.
pub fn annotated_partial_domination(inst: &AnnotatedInstance) -> Option<PartialDominationSolution> {
    let g = &inst.graph;
    annotated_partial_domination_within(g, &g.vertices(), &inst.forbidden, &inst.red, &inst.blue, inst.k, inst.d)
}

/// Deleted vertices and, per remaining component, its dominators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterDeletion {
    pub deleted: VertexSet,
    pub dominators: Vec<(VertexSet, VertexSet)>,
}

/// Fewest deletions from `deletable` so that every component of
/// `G[alive] - S` is red-blue dominated by at most `d` vertices, if at most
/// `budget` suffice. Components of `G[alive]` are handled independently.
pub fn min_cluster_deletion_within(
    g: &Graph,
    alive: &VertexSet,
    deletable: &VertexSet,
    red: &VertexSet,
    blue: &VertexSet,
    d: usize,
    budget: usize,
) -> Option<ClusterDeletion> {
    let mut out = ClusterDeletion { deleted: VertexSet::new(), dominators: Vec::new() };
    for comp in g.components(alive) {
        let left = budget - out.deleted.len();
        let found = comp.intersection(deletable).subsets_up_to(left).find_map(|s| {
            let rest = comp.difference(&s);
            let doms: Option<Vec<_>> = g
                .components(&rest)
                .into_iter()
                .map(|c| red_blue_dominating_set_within(g, &c, red, blue, d).map(|dd| (c, dd)))
                .collect();
            doms.map(|dd| (s, dd))
        })?;
        out.deleted = out.deleted.union(&found.0);
        out.dominators.extend(found.1);
    }
    out.dominators.sort();
    Some(out)
}
