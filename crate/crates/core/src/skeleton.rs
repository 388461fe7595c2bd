//! Solvers for graphs whose whole vertex set is `(q, k)`-unbreakable. A
//! small family of candidate skeletons is enumerated; each candidate is
//! extended by exhaustive search away from the unique large component and by
//! partial domination inside it.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::domination::{
    annotated_partial_domination_within, min_cluster_deletion_within, min_dominating_set_within,
    red_blue_dominating_set_within, ClusterDeletion,
};
use crate::etree::{EliminationTree, EliminationTreeError};
use crate::graph::{Graph, VertexSet};

/// Candidate skeletons for the plain instance `(g, k, d)`: with `X` a
/// dominating set of size at most `q + d`, branch on deleting a vertex of
/// `X`, of `N(x)` for `x ∈ X` of degree at most `q`, or of `N(y)` for such
/// a neighbour `y` of degree at most `q`.
pub fn skeleton_candidates(g: &Graph, q: usize, k: usize, d: usize) -> BTreeSet<VertexSet> {
    let mut memo = HashMap::new();
    candidates_within(g, g.vertices(), q, k, d, &mut memo)
}

fn low_degree_neighbours(g: &Graph, alive: &VertexSet, xs: &VertexSet, q: usize) -> VertexSet {
    let mut out = VertexSet::new();
    for x in xs {
        let nb = g.neighbors(x).intersection(alive);
        if nb.len() <= q {
            out = out.union(&nb);
        }
    }
    out
}

fn candidates_within(
    g: &Graph,
    alive: VertexSet,
    q: usize,
    k: usize,
    d: usize,
    memo: &mut HashMap<(VertexSet, usize), BTreeSet<VertexSet>>,
) -> BTreeSet<VertexSet> {
    if k == 0 {
        return BTreeSet::from([VertexSet::new()]);
    }
    if let Some(r) = memo.get(&(alive, k)) {
        return r.clone();
    }
    let mut out = BTreeSet::new();
    if let Some(x) = min_dominating_set_within(g, &alive, q + d) {
        out.insert(VertexSet::new());
        let y = low_degree_neighbours(g, &alive, &x, q);
        let z = low_degree_neighbours(g, &alive, &y, q);
        for v in &x.union(&y).union(&z) {
            let mut rest = alive;
            rest.remove(v);
            for mut s in candidates_within(g, rest, q, k - 1, d, memo) {
                s.insert(v);
                out.insert(s);
            }
        }
    }
    memo.insert((alive, k), out.clone());
    out
}

/// For each `D`, `|D| <= d`: `S1 = V - N[D]` and `S2` the neighbours of
/// low-degree vertices of `S1`. Branches with `|S1| > q` or
/// `|S2| > q + kq` are dropped. Returns `(D, S2)` pairs.
pub fn skeletons_via_dominator_guessing(g: &Graph, q: usize, k: usize, d: usize) -> Vec<(VertexSet, VertexSet)> {
    let all = g.vertices();
    let mut out = Vec::new();
    for dset in all.subsets_up_to(d) {
        let s1 = all.difference(&g.closed_neighborhood(&dset));
        if s1.len() > q {
            continue;
        }
        let s2 = low_degree_neighbours(g, &all, &s1, q);
        if s2.len() > q + k * q {
            continue;
        }
        out.push((dset, s2));
    }
    out
}

/// Which candidate family the unbreakable solvers branch over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SkeletonRoute {
    #[default]
    Branching,
    DominatorGuessing,
}

fn candidate_family(g: &Graph, q: usize, k: usize, d: usize, route: SkeletonRoute) -> BTreeSet<VertexSet> {
    match route {
        SkeletonRoute::Branching => skeleton_candidates(g, q, k, d),
        SkeletonRoute::DominatorGuessing => {
            // The empty candidate covers solutions without a large component.
            let mut out = BTreeSet::from([VertexSet::new()]);
            for (_, s2) in skeletons_via_dominator_guessing(g, q, k, d) {
                out.extend(s2.subsets_up_to(k));
            }
            out
        }
    }
}

fn large_component(g: &Graph, rest: &VertexSet, q: usize) -> Option<VertexSet> {
    let large: Vec<_> = g.components(rest).into_iter().filter(|c| c.len() > q).collect();
    (large.len() == 1).then(|| large[0])
}

fn dominators_after(g: &Graph, deleted: &VertexSet, d: usize) -> Vec<(VertexSet, VertexSet)> {
    let all = g.vertices();
    g.connected_components(deleted)
        .into_iter()
        .map(|c| {
            let dd = red_blue_dominating_set_within(g, &c, &all, &all, d).expect("component is dominated");
            (c, dd)
        })
        .collect()
}

/// Extends a candidate skeleton `s`: optimal deletions on `G - s - C0` and
/// partial domination on the unique component `C0` of `G - s` with more
/// than `q` vertices.
pub fn check_skeleton_dcd(g: &Graph, s: &VertexSet, q: usize, k: usize, d: usize) -> Option<ClusterDeletion> {
    if s.len() > k {
        return None;
    }
    let all = g.vertices();
    let rest = all.difference(s);
    let c0 = large_component(g, &rest, q).unwrap_or_default();
    let small = rest.difference(&c0);
    let side = min_cluster_deletion_within(g, &small, &small, &all, &all, d, k - s.len())?;
    let left = k - s.len() - side.deleted.len();
    let x = if c0.is_empty() {
        VertexSet::new()
    } else {
        annotated_partial_domination_within(g, &c0, &VertexSet::new(), &c0, &c0, left, d)?.deleted
    };
    let deleted = s.union(&side.deleted).union(&x);
    Some(ClusterDeletion { deleted, dominators: dominators_after(g, &deleted, d) })
}

/// Solutions of `(g, k, d)` leaving no component with more than `q` vertices.
fn solve_without_large_component(g: &Graph, q: usize, k: usize, d: usize) -> Option<ClusterDeletion> {
    let all = g.vertices();
    all.subsets_up_to(k).find_map(|s| {
        let comps = g.connected_components(&s);
        if comps.iter().any(|c| c.len() > q) {
            return None;
        }
        let doms: Option<Vec<_>> = comps
            .into_iter()
            .map(|c| min_dominating_set_within(g, &c, d).map(|dd| (c, dd)))
            .collect();
        doms.map(|dominators| ClusterDeletion { deleted: s, dominators })
    })
}

/// The skeleton route without the small-graph dispatch. Dominator guessing
/// only locates skeletons next to a large component, so solutions without
/// one are searched for separately on that route.
pub fn solve_dcd_via_skeletons(g: &Graph, q: usize, k: usize, d: usize, route: SkeletonRoute) -> Option<ClusterDeletion> {
    let found = candidate_family(g, q, k, d, route).iter().find_map(|s| check_skeleton_dcd(g, s, q, k, d));
    match route {
        SkeletonRoute::Branching => found,
        SkeletonRoute::DominatorGuessing => found.or_else(|| solve_without_large_component(g, q, k, d)),
    }
}

/// Dominated cluster deletion on a graph whose vertex set is
/// `(q, k)`-unbreakable. Graphs with at most `2q` vertices have no
/// guaranteed large component and are searched exhaustively.
pub fn solve_dcd_unbreakable(g: &Graph, q: usize, k: usize, d: usize) -> Option<ClusterDeletion> {
    if g.n() < 2 * q + 1 {
        let all = g.vertices();
        return min_cluster_deletion_within(g, &all, &all, &all, &all, d, k);
    }
    solve_dcd_via_skeletons(g, q, k, d, SkeletonRoute::Branching)
}

pub fn validate_elimination_tree(g: &Graph, t: &EliminationTree) -> Result<bool, EliminationTreeError> {
    t.is_tree_structured(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EddcSolution {
    pub tree: EliminationTree,
    pub dominators: Vec<(VertexSet, VertexSet)>,
}

/// Exhaustive recursive deletion on `G[comp]` for the plain colouring.
struct Recursive<'a> {
    g: &'a Graph,
    d: usize,
    memo: HashMap<(VertexSet, usize), Option<Option<usize>>>,
}

impl Recursive<'_> {
    /// `Some(None)`: dominated already; `Some(Some(v))`: delete `v` first.
    fn solve(&mut self, comp: VertexSet, depth: usize) -> Option<Option<usize>> {
        if let Some(r) = self.memo.get(&(comp, depth)) {
            return *r;
        }
        let r = if min_dominating_set_within(self.g, &comp, self.d).is_some() {
            Some(None)
        } else if depth == 0 {
            None
        } else {
            comp.iter()
                .find(|&v| {
                    let mut rest = comp;
                    rest.remove(v);
                    self.g.components(&rest).into_iter().all(|c| self.solve(c, depth - 1).is_some())
                })
                .map(Some)
        };
        self.memo.insert((comp, depth), r);
        r
    }

    /// Every component of `G[alive]` within `depth`, as `(vertex, parent)`
    /// pairs hanging below `parent`.
    fn forest(&mut self, alive: VertexSet, depth: usize, parent: Option<usize>, out: &mut Vec<(usize, Option<usize>)>) -> bool {
        for c in self.g.components(&alive) {
            match self.solve(c, depth) {
                None => return false,
                Some(None) => {}
                Some(Some(v)) => {
                    out.push((v, parent));
                    let mut rest = c;
                    rest.remove(v);
                    self.forest(rest, depth - 1, Some(v), out);
                }
            }
        }
        true
    }
}

fn assemble(g: &Graph, pairs: &[(usize, Option<usize>)], d: usize) -> EddcSolution {
    let vertices: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let parent = pairs
        .iter()
        .map(|p| p.1.map(|u| vertices.iter().position(|&w| w == u).expect("parent listed first")))
        .collect();
    let tree = EliminationTree::new(vertices, parent).expect("well-formed forest");
    let dominators = dominators_after(g, &tree.vertex_set(), d);
    EddcSolution { tree, dominators }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// The skeleton route for recursive deletion: for each candidate `s` and
/// each linear order of it, the small components of `G - s` are solved
/// exhaustively below their deepest attachment in the order, and the
/// undominated vertices of the large component form a chain below `s`.
pub fn solve_eddc_via_skeletons(g: &Graph, q: usize, k: usize, d: usize, route: SkeletonRoute) -> Option<EddcSolution> {
    let all = g.vertices();
    let mut rec = Recursive { g, d, memo: HashMap::new() };
    for s in candidate_family(g, q, k, d, route) {
        let rest = all.difference(&s);
        let c0 = large_component(g, &rest, q).unwrap_or_default();
        let x = if c0.is_empty() {
            VertexSet::new()
        } else {
            match annotated_partial_domination_within(g, &c0, &VertexSet::new(), &c0, &c0, k - s.len(), d) {
                Some(pd) => pd.deleted,
                None => continue,
            }
        };
        let smalls: Vec<VertexSet> = g.components(&rest.difference(&c0));
        'order: for order in permutations(&s.to_vec()) {
            let mut pairs: Vec<(usize, Option<usize>)> = Vec::new();
            for (i, &v) in order.iter().enumerate() {
                pairs.push((v, if i == 0 { None } else { Some(order[i - 1]) }));
            }
            for c in &smalls {
                let attach = g.open_neighborhood(c);
                let deepest = order.iter().rposition(|v| attach.contains(*v));
                let used = deepest.map_or(0, |p| p + 1);
                let below = deepest.map(|p| order[p]);
                if !rec.forest(*c, k - used, below, &mut pairs) {
                    continue 'order;
                }
            }
            let mut last = order.last().copied();
            for v in &x {
                pairs.push((v, last));
                last = Some(v);
            }
            let sol = assemble(g, &pairs, d);
            debug_assert!(sol.tree.is_tree_structured(g).unwrap() && sol.tree.depth() <= k);
            return Some(sol);
        }
    }
    None
}

/// Recursive deletion on a graph whose vertex set is `(q, k)`-unbreakable.
/// Below `3q(k + q)` vertices the large component need not be unique and the
/// instance is solved exhaustively.
pub fn solve_eddc_unbreakable(g: &Graph, q: usize, k: usize, d: usize) -> Option<EddcSolution> {
    if g.n() < 3 * q * (k + q) {
        let mut rec = Recursive { g, d, memo: HashMap::new() };
        let mut pairs = Vec::new();
        return rec.forest(g.vertices(), k, None, &mut pairs).then(|| assemble(g, &pairs, d));
    }
    solve_eddc_via_skeletons(g, q, k, d, SkeletonRoute::Branching)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    #[test]
    fn clique_examples() {
        let k6 = clique(6);
        assert!(solve_dcd_unbreakable(&k6, 1, 0, 1).is_some());
        assert!(solve_dcd_via_skeletons(&k6, 1, 0, 1, SkeletonRoute::Branching).is_some());
        // K6 minus a perfect matching is dominated by one edge's endpoints.
        let mut e = Vec::new();
        for u in 0..6 {
            for v in u + 1..6 {
                if v != u + 3 {
                    e.push((u, v));
                }
            }
        }
        let g = Graph::new(6, &e).unwrap();
        assert!(solve_dcd_unbreakable(&g, 1, 1, 1).is_some());
        assert!(solve_dcd_via_skeletons(&g, 1, 1, 1, SkeletonRoute::Branching).is_some());
        assert!(solve_dcd_via_skeletons(&g, 1, 1, 1, SkeletonRoute::DominatorGuessing).is_some());
    }

    #[test]
    fn empty_candidate_always_present() {
        let c = skeleton_candidates(&clique(5), 2, 2, 1);
        assert!(c.contains(&VertexSet::new()));
        assert!(c.iter().all(|s| s.len() <= 2));
        assert_eq!(skeleton_candidates(&cycle(5), 2, 0, 1).len(), 1);
    }

    #[test]
    fn recursive_deletion_on_small_graphs() {
        let c4 = cycle(4);
        assert!(solve_eddc_unbreakable(&c4, 2, 2, 0).is_none());
        let sol = solve_eddc_unbreakable(&c4, 2, 3, 0).unwrap();
        assert!(validate_elimination_tree(&c4, &sol.tree).unwrap());
        assert_eq!(sol.tree.depth(), 3);
    }

    #[test]
    fn skeleton_route_on_a_large_clique() {
        let g = clique(7);
        let sol = solve_eddc_via_skeletons(&g, 1, 1, 1, SkeletonRoute::Branching).unwrap();
        assert!(sol.tree.is_empty());
        assert_eq!(sol.dominators.len(), 1);
    }
}
