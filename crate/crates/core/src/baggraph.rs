//! Bag graphs: the graph of one decomposition bag in which everything hanging
//! below a child is replaced by small gadgets, and the skeleton-based solver
//! for annotated deletion on such graphs.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::decomposition::TreeDecomposition;
use crate::domination::{
    annotated_partial_domination_within, min_cluster_deletion_within, red_blue_dominating_set_within,
};
use crate::graph::{Graph, GraphError, VertexSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BagGraphError {
    #[error("node {child} is not a child of node {node}")]
    NotChild { node: usize, child: usize },
    #[error("part {part:?} of child {child} is not inside its adhesion minus the deleted set")]
    PartOutsideAdhesion { child: usize, part: VertexSet },
    #[error("parts of child {0} overlap")]
    PartsOverlap(usize),
    #[error("part {part:?} of child {child} is not connected below the child")]
    PartDisconnected { child: usize, part: VertexSet },
    #[error("deleted set is not inside the bag")]
    DeletedOutsideBag,
    #[error("vertex {0} is not an interior vertex")]
    NotInterior(usize),
    #[error("exterior vertices must be forbidden")]
    ExteriorNotForbidden,
    #[error("{found} exterior blue vertices exceed the limit {limit}")]
    TooManyExteriorBlue { found: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Apex `a`, inner vertices `b_1..b_p` adjacent to `a`, and outer vertices
/// `b'_1..b'_p` with `b'_i` adjacent only to `b_i`. Every vertex of `plug`
/// is adjacent to the apex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DGadget {
    pub apex: usize,
    pub inner: Vec<usize>,
    pub outer: Vec<usize>,
    pub plug: VertexSet,
}

impl DGadget {
    pub fn size(&self) -> usize {
        self.inner.len()
    }

    pub fn vertices(&self) -> VertexSet {
        let mut s: VertexSet = self.inner.iter().chain(&self.outer).copied().collect();
        s.insert(self.apex);
        s
    }
}

/// Where a gadget came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GadgetOrigin {
    /// Stands for a component below `child` touching the adhesion in `part`.
    ChildComponent { child: usize, part: VertexSet },
    /// Charges one dominator to the component of an already chosen dominator.
    Pin { vertex: usize },
    /// Any other gadget attached to `plug`.
    Extra,
}

/// A graph on the original vertex universe plus gadget vertices allocated
/// above it. Only `interior ∪ exterior` are vertices of the bag graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BagGraph {
    pub graph: Graph,
    pub interior: VertexSet,
    pub exterior: VertexSet,
    pub gadgets: Vec<DGadget>,
    pub origins: Vec<GadgetOrigin>,
}

impl BagGraph {
    pub fn vertices(&self) -> VertexSet {
        self.interior.union(&self.exterior)
    }

    pub fn len(&self) -> usize {
        self.interior.len() + self.exterior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The inner gadget vertices, which act as forced blue choices.
    pub fn gadget_blue(&self) -> VertexSet {
        self.gadgets.iter().flat_map(|g| g.inner.iter().copied()).collect()
    }

    /// The outer gadget vertices, which must be dominated by the inner ones.
    pub fn gadget_red(&self) -> VertexSet {
        self.gadgets.iter().flat_map(|g| g.outer.iter().copied()).collect()
    }

    /// The bag graph as a standalone graph on `0..len` (vertices relabelled
    /// in increasing order) and the original id of each new vertex.
    pub fn compact(&self) -> (Graph, Vec<usize>) {
        let ids = self.vertices().to_vec();
        let mut pos = HashMap::new();
        for (i, &v) in ids.iter().enumerate() {
            pos.insert(v, i);
        }
        let mut h = Graph::empty(ids.len()).expect("bag graph fits");
        for (u, v) in self.graph.edges() {
            if let (Some(&a), Some(&b)) = (pos.get(&u), pos.get(&v)) {
                h.add_edge(a, b).expect("simple");
            }
        }
        (h, ids)
    }

    /// Graph text of [`BagGraph::compact`] preceded by an `# interior:` line
    /// listing the 1-based ids of interior vertices.
    pub fn to_text(&self) -> String {
        let (h, ids) = self.compact();
        let mut s = String::from("# interior:");
        for (i, v) in ids.iter().enumerate() {
            if self.interior.contains(*v) {
                s.push_str(&format!(" {}", i + 1));
            }
        }
        s.push('\n');
        s.push_str(&h.to_text());
        s
    }
}

pub struct BagGraphBuilder {
    bg: BagGraph,
}

impl BagGraphBuilder {
    /// Starts from `G[interior]`, keeping the original ids.
    pub fn new(g: &Graph, interior: VertexSet) -> Self {
        let mut graph = Graph::empty(g.n()).expect("same universe");
        for (u, v) in g.edges() {
            if interior.contains(u) && interior.contains(v) {
                graph.add_edge(u, v).expect("simple");
            }
        }
        BagGraphBuilder {
            bg: BagGraph { graph, interior, exterior: VertexSet::new(), gadgets: Vec::new(), origins: Vec::new() },
        }
    }

    /// Adds a `size`-gadget plugged to `plug` (which must be interior).
    pub fn add_gadget(&mut self, size: usize, plug: VertexSet, origin: GadgetOrigin) -> Result<&DGadget, BagGraphError> {
        if let Some(v) = plug.difference(&self.bg.interior).first() {
            return Err(BagGraphError::NotInterior(v));
        }
        let g = &mut self.bg.graph;
        let apex = g.add_vertices(1 + 2 * size)?;
        let inner: Vec<usize> = (0..size).map(|i| apex + 1 + i).collect();
        let outer: Vec<usize> = (0..size).map(|i| apex + 1 + size + i).collect();
        for i in 0..size {
            g.add_edge(apex, inner[i])?;
            g.add_edge(inner[i], outer[i])?;
        }
        for v in &plug {
            g.add_edge(apex, v)?;
        }
        let gadget = DGadget { apex, inner, outer, plug };
        self.bg.exterior = self.bg.exterior.union(&gadget.vertices());
        self.bg.gadgets.push(gadget);
        self.bg.origins.push(origin);
        Ok(self.bg.gadgets.last().unwrap())
    }

    pub fn build(self) -> BagGraph {
        self.bg
    }
}

/// One component below a child, given by the adhesion vertices it touches
/// and the size of the gadget that replaces it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChildPart {
    pub child: usize,
    pub part: VertexSet,
    pub size: usize,
}

/// The components of `comp(y) - s` adjacent to `adh(y) - s`, for every child
/// `y` of `x`, each as a part of size `d`.
pub fn actual_child_parts(g: &Graph, td: &TreeDecomposition, x: usize, s: &VertexSet, d: usize) -> Vec<ChildPart> {
    let mut out = Vec::new();
    for &y in td.children(x) {
        let adh = td.adhesion(y).difference(s);
        for c in g.components(&td.component(y).difference(s)) {
            let part = g.open_neighborhood(&c).intersection(&adh);
            if !part.is_empty() {
                out.push(ChildPart { child: y, part, size: d });
            }
        }
    }
    out
}

/// Bag graph of node `x` after deleting `s ⊆ bag(x)`: interior `bag(x) - s`,
/// one gadget per child part, plus the `extra` gadgets `(plug, size)`.
pub fn build_bag_graph(
    g: &Graph,
    td: &TreeDecomposition,
    x: usize,
    s: &VertexSet,
    child_parts: &[ChildPart],
    extra: &[(VertexSet, usize)],
) -> Result<BagGraph, BagGraphError> {
    if !s.is_subset(&td.bag(x)) {
        return Err(BagGraphError::DeletedOutsideBag);
    }
    let interior = td.bag(x).difference(s);
    let mut used: HashMap<usize, VertexSet> = HashMap::new();
    for cp in child_parts {
        if !td.children(x).contains(&cp.child) {
            return Err(BagGraphError::NotChild { node: x, child: cp.child });
        }
        let adh = td.adhesion(cp.child).difference(s);
        if cp.part.is_empty() || !cp.part.is_subset(&adh) {
            return Err(BagGraphError::PartOutsideAdhesion { child: cp.child, part: cp.part });
        }
        let u = used.entry(cp.child).or_default();
        if u.intersects(&cp.part) {
            return Err(BagGraphError::PartsOverlap(cp.child));
        }
        *u = u.union(&cp.part);
        let below = td.cone(cp.child).difference(s);
        let first = cp.part.first().unwrap();
        if !cp.part.is_subset(&g.component_of(&below, first)) {
            return Err(BagGraphError::PartDisconnected { child: cp.child, part: cp.part });
        }
    }
    let mut b = BagGraphBuilder::new(g, interior);
    for cp in child_parts {
        b.add_gadget(cp.size, cp.part, GadgetOrigin::ChildComponent { child: cp.child, part: cp.part })?;
    }
    for &(plug, size) in extra {
        b.add_gadget(size, plug, GadgetOrigin::Extra)?;
    }
    Ok(b.build())
}

/// Interior vertices other than `u` adjacent to `u` or joined to it by a
/// path whose inner vertices are all exterior.
fn close(bg: &BagGraph, alive: &VertexSet, u: usize) -> VertexSet {
    let g = &bg.graph;
    let ext = bg.exterior.intersection(alive);
    let start = g.neighbors(u).intersection(&ext);
    let mut reached = start;
    let mut frontier = start;
    while !frontier.is_empty() {
        let mut next = VertexSet::new();
        for v in &frontier {
            next = next.union(&g.neighbors(v));
        }
        frontier = next.intersection(&ext).difference(&reached);
        reached = reached.union(&frontier);
    }
    let mut touch = g.neighbors(u);
    for v in &reached {
        touch = touch.union(&g.neighbors(v));
    }
    let mut out = touch.intersection(&bg.interior).intersection(alive);
    out.remove(u);
    out
}

fn sat_within(bg: &BagGraph, alive: &VertexSet, u: usize, q: usize) -> VertexSet {
    let c = close(bg, alive, u);
    let mut out = VertexSet::singleton(u);
    if c.len() <= q {
        out = out.union(&c);
    }
    out
}

fn sat_power_within(bg: &BagGraph, alive: &VertexSet, xs: &VertexSet, q: usize, i: usize) -> VertexSet {
    let mut cur = *xs;
    for _ in 0..i {
        let mut next = cur;
        for u in &cur.intersection(&bg.interior) {
            next = next.union(&sat_within(bg, alive, u, q));
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

/// `{u} ∪ close(u)` if `close(u)` has at most `q` vertices, else `{u}`.
pub fn saturate(bg: &BagGraph, u: usize, q: usize) -> Result<VertexSet, BagGraphError> {
    if !bg.interior.contains(u) {
        return Err(BagGraphError::NotInterior(u));
    }
    Ok(sat_within(bg, &bg.vertices(), u, q))
}

/// `i`-fold saturation of a set; exterior members are kept unchanged.
pub fn saturate_power(bg: &BagGraph, xs: &VertexSet, q: usize, i: usize) -> VertexSet {
    sat_power_within(bg, &bg.vertices(), xs, q, i)
}

/// Forbidden, red and blue vertices of an annotated bag graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BagColors {
    pub forbidden: VertexSet,
    pub red: VertexSet,
    pub blue: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BagSolution {
    /// The candidate skeleton the solution was extended from.
    pub skeleton: VertexSet,
    pub deleted: VertexSet,
    pub dominators: Vec<(VertexSet, VertexSet)>,
}

struct SkeletonSearch<'a> {
    bg: &'a BagGraph,
    colors: &'a BagColors,
    q: usize,
    d: usize,
    memo: HashMap<(VertexSet, usize), BTreeSet<VertexSet>>,
}

impl SkeletonSearch<'_> {
    /// Branch on keeping the graph (budget `k - 1`) or deleting a vertex of
    /// the `q`-fold saturation of a small red-blue dominating set.
    fn family(&mut self, alive: VertexSet, k: usize) -> BTreeSet<VertexSet> {
        if k == 0 {
            return BTreeSet::from([VertexSet::new()]);
        }
        if let Some(f) = self.memo.get(&(alive, k)) {
            return f.clone();
        }
        let g = &self.bg.graph;
        let c = self.colors;
        let mut out = BTreeSet::new();
        let bound = (3 * self.q * self.d).max(self.q + self.d + self.q * self.d);
        if let Some(x) = red_blue_dominating_set_within(g, &alive, &c.red, &c.blue, bound) {
            out = self.family(alive, k - 1);
            let cand = sat_power_within(self.bg, &alive, &x, self.q, self.q)
                .intersection(&self.bg.interior)
                .intersection(&alive)
                .difference(&c.forbidden);
            for v in &cand {
                let mut rest = alive;
                rest.remove(v);
                for mut s in self.family(rest, k - 1) {
                    s.insert(v);
                    out.insert(s);
                }
            }
        }
        self.memo.insert((alive, k), out.clone());
        out
    }
}

/// Candidate skeletons of the annotated skeleton algorithm on `bg`.
pub fn bag_skeleton_candidates(bg: &BagGraph, colors: &BagColors, q: usize, k: usize, d: usize) -> BTreeSet<VertexSet> {
    candidates_within(bg, colors, bg.vertices(), q, k, d)
}

fn candidates_within(bg: &BagGraph, colors: &BagColors, alive: VertexSet, q: usize, k: usize, d: usize) -> BTreeSet<VertexSet> {
    SkeletonSearch { bg, colors, q, d, memo: HashMap::new() }.family(alive, k)
}

/// Red vertices without a blue vertex in their closed neighbourhood; every
/// solution deletes them.
pub fn forced_deletions(bg: &BagGraph, colors: &BagColors) -> VertexSet {
    let all = bg.vertices();
    colors
        .red
        .intersection(&all)
        .iter()
        .filter(|&v| !bg.graph.closed_neighborhood(&VertexSet::singleton(v)).intersects(&colors.blue.intersection(&all)))
        .collect()
}

fn dominators_of(g: &Graph, alive: &VertexSet, colors: &BagColors, d: usize) -> Option<Vec<(VertexSet, VertexSet)>> {
    g.components(alive)
        .into_iter()
        .map(|c| red_blue_dominating_set_within(g, &c, &colors.red, &colors.blue, d).map(|dd| (c, dd)))
        .collect()
}

/// Annotated deletion on a bag graph: at most `k` interior, non-forbidden
/// vertices so that every component is red-blue dominated by at most `d`
/// vertices. Candidates come from the annotated skeleton algorithm; each is
/// extended by an exhaustive search on the side away from the unique
/// component with more than `q` interior vertices and partial domination on
/// that component.
pub fn solve_adcd_on_bag_graph(
    bg: &BagGraph,
    colors: &BagColors,
    q: usize,
    k: usize,
    d: usize,
) -> Result<Option<BagSolution>, BagGraphError> {
    if !bg.exterior.is_subset(&colors.forbidden) {
        return Err(BagGraphError::ExteriorNotForbidden);
    }
    let ext_blue = bg.exterior.intersection(&colors.blue).len();
    if ext_blue > q * d {
        return Err(BagGraphError::TooManyExteriorBlue { found: ext_blue, limit: q * d });
    }
    let g = &bg.graph;
    let deletable = bg.interior.difference(&colors.forbidden);
    let forced = forced_deletions(bg, colors);
    if !forced.is_subset(&deletable) || forced.len() > k {
        return Ok(None);
    }
    let k = k - forced.len();
    let all = bg.vertices().difference(&forced);
    let interior = bg.interior.difference(&forced);
    // With at most 2q interior vertices no component need be large, and the
    // skeleton argument does not apply: search exhaustively instead.
    if interior.len() < 2 * q + 1 {
        return Ok(min_cluster_deletion_within(g, &all, &deletable, &colors.red, &colors.blue, d, k).map(|s| BagSolution {
            skeleton: VertexSet::new(),
            deleted: s.deleted.union(&forced),
            dominators: s.dominators,
        }));
    }
    for s in candidates_within(bg, colors, all, q, k, d) {
        let rest = all.difference(&s);
        let large: Vec<VertexSet> =
            g.components(&rest).into_iter().filter(|c| c.intersection(&interior).len() > q).collect();
        let c0 = if large.len() == 1 { large[0] } else { VertexSet::new() };
        let small = rest.difference(&c0);
        let budget = k - s.len();
        let Some(side) = min_cluster_deletion_within(g, &small, &deletable, &colors.red, &colors.blue, d, budget) else {
            continue;
        };
        let left = budget - side.deleted.len();
        let big = if c0.is_empty() {
            Some(VertexSet::new())
        } else {
            annotated_partial_domination_within(g, &c0, &colors.forbidden, &colors.red, &colors.blue, left, d)
                .map(|p| p.deleted)
        };
        if let Some(x) = big {
            let deleted = s.union(&side.deleted).union(&x).union(&forced);
            let dominators = dominators_of(g, &bg.vertices().difference(&deleted), colors, d)
                .expect("extension leaves dominated components");
            return Ok(Some(BagSolution { skeleton: s, deleted, dominators }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn gadget_shape() {
        let g = path(3);
        let mut b = BagGraphBuilder::new(&g, g.vertices());
        let gad = b.add_gadget(2, set(&[0, 2]), GadgetOrigin::Extra).unwrap().clone();
        let bg = b.build();
        assert_eq!(gad.apex, 3);
        assert_eq!(bg.len(), 8);
        assert!(bg.graph.has_edge(3, 0) && bg.graph.has_edge(3, 2));
        assert!(bg.graph.has_edge(gad.inner[1], gad.outer[1]));
        assert_eq!(bg.graph.degree(gad.outer[0]), 1);
        let zero = {
            let mut b = BagGraphBuilder::new(&g, g.vertices());
            b.add_gadget(0, set(&[0]), GadgetOrigin::Extra).unwrap();
            b.build()
        };
        assert_eq!(zero.exterior.len(), 1);
        assert!(zero.to_text().starts_with("# interior: 1 2 3\np 4 3\n"));
    }

    #[test]
    fn saturation_through_gadgets() {
        // Interior path 0-1-2-3; a gadget joins 0 and 3.
        let g = path(4);
        let mut b = BagGraphBuilder::new(&g, g.vertices());
        b.add_gadget(1, set(&[0, 3]), GadgetOrigin::Extra).unwrap();
        let bg = b.build();
        assert_eq!(saturate(&bg, 0, 2).unwrap(), set(&[0, 1, 3]));
        assert_eq!(saturate(&bg, 0, 1).unwrap(), set(&[0]));
        assert!(saturate(&bg, 4, 2).is_err());
        let s2 = saturate_power(&bg, &set(&[1]), 2, 2);
        assert!(set(&[0, 1, 2, 3]).is_subset(&s2));
    }

    #[test]
    fn bag_graph_construction_checks() {
        let p5 = path(5);
        let td = TreeDecomposition::new(vec![None, Some(0)], vec![set(&[0, 1, 2]), set(&[2, 3, 4])]).unwrap();
        let parts = actual_child_parts(&p5, &td, 0, &VertexSet::new(), 1);
        assert_eq!(parts, vec![ChildPart { child: 1, part: set(&[2]), size: 1 }]);
        let bg = build_bag_graph(&p5, &td, 0, &VertexSet::new(), &parts, &[]).unwrap();
        assert_eq!(bg.interior, set(&[0, 1, 2]));
        assert_eq!(bg.exterior.len(), 3);
        let bad = [ChildPart { child: 1, part: set(&[1]), size: 1 }];
        assert!(matches!(
            build_bag_graph(&p5, &td, 0, &VertexSet::new(), &bad, &[]),
            Err(BagGraphError::PartOutsideAdhesion { .. })
        ));
    }

    #[test]
    fn solver_matches_exhaustive_search() {
        let g = cycle(9);
        let mut b = BagGraphBuilder::new(&g, g.vertices());
        b.add_gadget(1, set(&[0]), GadgetOrigin::Extra).unwrap();
        let bg = b.build();
        let colors = BagColors {
            forbidden: bg.exterior,
            red: bg.interior.union(&bg.gadget_red()),
            blue: bg.interior.union(&bg.gadget_blue()),
        };
        for k in 0..4 {
            for d in 1..3 {
                let fast = solve_adcd_on_bag_graph(&bg, &colors, 2, k, d).unwrap();
                let slow = min_cluster_deletion_within(
                    &bg.graph,
                    &bg.vertices(),
                    &bg.interior,
                    &colors.red,
                    &colors.blue,
                    d,
                    k,
                );
                assert_eq!(fast.is_some(), slow.is_some(), "k={k} d={d}");
            }
        }
    }
}
