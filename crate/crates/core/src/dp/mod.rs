//! Bottom-up dynamic programming over a tree decomposition whose bags are
//! unbreakable. Each node's profile lists the realizable boundary behaviours
//! ("marks") of the graph induced by its cone.

pub mod dcd;
pub mod eddc;
pub mod extended;
pub mod mark;
pub mod trace;

use serde::Serialize;
use thiserror::Error;

use crate::baggraph::BagGraphError;
use crate::decomposition::Violation;
use crate::graph::{AnnotatedInstance, Graph, VertexSet};

pub use trace::{branch_accounting, BlackWhiteReport, Color, DpTrace, TraceTree};

/// Deliberate defects used to show that the cross-checks catch mistakes.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// Accept child marks that disagree with the parent about deletions.
    IgnoreDeletionConsistency,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpConfig {
    /// Branch only over minimal consistent child marks and take a child
    /// without branching when a single minimal mark remains.
    pub shortcut: bool,
    /// Abandon branches whose committed dominators exceed `q·d`.
    pub dominator_gate: bool,
    /// Abandon layer assignments exceeding `q·k` per layer (recursive deletion).
    pub layer_gate: bool,
    /// Reject branches whose bag graph has no solution before enumerating
    /// local completions.
    pub bag_filter: bool,
    pub record_trace: bool,
    pub collect_bag_graphs: bool,
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

impl Default for DpConfig {
    fn default() -> Self {
        DpConfig {
            shortcut: true,
            dominator_gate: true,
            layer_gate: true,
            bag_filter: true,
            record_trace: false,
            collect_bag_graphs: false,
            fault: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DpStats {
    pub q: usize,
    pub nodes: usize,
    /// Branching-tree nodes created by choosing among several child marks.
    pub branches: usize,
    pub leaves: usize,
    pub local_solutions: usize,
    pub max_profile: usize,
    /// Sum over decomposition nodes of the largest bag graph built there.
    pub bag_graph_vertices: usize,
}

#[derive(Debug, Error)]
pub enum DpError {
    #[error("invalid decomposition: {0:?}")]
    Decomposition(Violation),
    #[error(transparent)]
    BagGraph(#[from] BagGraphError),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

/// All set partitions of `s`, blocks sorted by smallest element.
pub fn set_partitions(s: &VertexSet) -> Vec<Vec<VertexSet>> {
    fn rec(elems: &[usize], i: usize, blocks: &mut Vec<VertexSet>, out: &mut Vec<Vec<VertexSet>>) {
        if i == elems.len() {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].insert(elems[i]);
            rec(elems, i + 1, blocks, out);
            blocks[b].remove(elems[i]);
        }
        blocks.push(VertexSet::singleton(elems[i]));
        rec(elems, i + 1, blocks, out);
        blocks.pop();
    }
    let elems = s.to_vec();
    let mut out = Vec::new();
    rec(&elems, 0, &mut Vec::new(), &mut out);
    out
}

/// A way to dominate one component: total dominators charged, the boundary
/// red vertices left undominated, and the newly chosen dominators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct DomOption {
    pub cost: usize,
    pub undominated: VertexSet,
    pub chosen: VertexSet,
}

/// Pareto-minimal ways to choose at most `room` dominators among `cand`
/// that dominate `inner` (mandatory) and as much of `boundary` as possible.
pub(crate) fn domination_options(
    g: &Graph,
    cand: &VertexSet,
    inner: &VertexSet,
    boundary: &VertexSet,
    base_cost: usize,
    room: usize,
) -> Vec<DomOption> {
    let mut out: Vec<DomOption> = Vec::new();
    let useful: VertexSet = cand
        .iter()
        .filter(|&v| {
            let nv = g.neighbors(v);
            nv.intersects(inner) || nv.intersects(boundary) || inner.contains(v) || boundary.contains(v)
        })
        .collect();
    for size in 0..=room.min(useful.len()) {
        let mut full = false;
        for dset in useful.subsets_of_size(size) {
            let cov = g.closed_neighborhood(&dset);
            if !inner.is_subset(&cov) {
                continue;
            }
            let und = boundary.difference(&cov);
            if out.iter().any(|o| o.undominated.is_subset(&und)) {
                continue;
            }
            full |= und.is_empty();
            out.push(DomOption { cost: base_cost + size, undominated: und, chosen: dset });
        }
        if full {
            break;
        }
    }
    out
}

/// Union-find over vertex ids.
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let nx = self.parent[c];
            self.parent[c] = r;
            c = nx;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Groups `alive` into classes: adjacency inside `alive` plus the extra
/// `links` (each set is merged into one class). Classes sorted by smallest
/// element.
pub(crate) fn classes(g: &Graph, alive: &VertexSet, links: &[VertexSet]) -> Vec<VertexSet> {
    let mut dsu = Dsu::new(g.n());
    for v in alive {
        for u in &g.neighbors(v).intersection(alive) {
            if u > v {
                dsu.union(u, v);
            }
        }
    }
    for l in links {
        let l = l.intersection(alive);
        if let Some(f) = l.first() {
            for v in &l {
                dsu.union(f, v);
            }
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, VertexSet> = Default::default();
    for v in alive {
        by_root.entry(dsu.find(v)).or_default().insert(v);
    }
    let mut out: Vec<VertexSet> = by_root.into_values().collect();
    out.sort_by_key(|c| c.first());
    out
}

/// Checks a deletion set and dominator set against the instance and returns
/// each remaining component with its dominators.
pub fn verify_dcd_certificate(
    inst: &AnnotatedInstance,
    deleted: &VertexSet,
    dominators: &VertexSet,
) -> Result<Vec<(VertexSet, VertexSet)>, String> {
    let g = &inst.graph;
    if deleted.len() > inst.k {
        return Err(format!("{} deletions exceed k = {}", deleted.len(), inst.k));
    }
    if let Some(v) = deleted.intersection(&inst.forbidden).first() {
        return Err(format!("forbidden vertex {v} deleted"));
    }
    verify_domination(inst, &g.vertices().difference(deleted), dominators)
}

/// Every component of `alive` must have at most `d` blue dominators from
/// `dominators` covering its red vertices.
pub(crate) fn verify_domination(
    inst: &AnnotatedInstance,
    alive: &VertexSet,
    dominators: &VertexSet,
) -> Result<Vec<(VertexSet, VertexSet)>, String> {
    let g = &inst.graph;
    let mut out = Vec::new();
    for c in g.components(alive) {
        let dc = dominators.intersection(&c);
        if dc.len() > inst.d {
            return Err(format!("component {:?} uses {} dominators", c.to_vec(), dc.len()));
        }
        if !dc.is_subset(&inst.blue) {
            return Err("dominator is not blue".into());
        }
        if let Some(v) = c.intersection(&inst.red).difference(&g.closed_neighborhood(&dc)).first() {
            return Err(format!("red vertex {v} is not dominated"));
        }
        out.push((c, dc));
    }
    Ok(out)
}
