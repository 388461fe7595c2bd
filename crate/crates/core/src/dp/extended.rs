//! Extended marks for recursive deletion: boundary layers, per-level
//! connectivity classes with hidden-vertex flags, and final parts with
//! dominator budgets.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::graph::{AnnotatedInstance, Graph, VertexSet};

use super::mark::Part;

/// Boundary vertices in one component of the cone minus the layers above
/// some level. Unless `hidden` is set, that component contains no vertex of
/// the level's layer outside the boundary.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LevelClass {
    pub members: VertexSet,
    pub hidden: bool,
}

/// Realized when the cone has layers `L^1..L^k` (deletable vertices, each
/// component of the cone minus `L^1..L^{i-1}` holding at most one vertex of
/// `L^i`) agreeing with `layers` on the boundary, such that for each level
/// `i` the boundary splits into `levels[i]`, the components of the cone
/// minus all layers meet the boundary in `parts`, and the dominator
/// conditions hold as for plain marks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ExtendedMark {
    pub layers: Vec<VertexSet>,
    pub dominators: VertexSet,
    pub undominated: VertexSet,
    pub levels: Vec<Vec<LevelClass>>,
    pub parts: Vec<Part>,
}

impl ExtendedMark {
    pub fn deleted(&self) -> VertexSet {
        self.layers.iter().fold(VertexSet::new(), |acc, l| acc.union(l))
    }

    pub fn extra(&self, part: &Part) -> usize {
        part.budget.saturating_sub(self.dominators.intersection(&part.members).len())
    }

    /// Same decisions and connectivity; budgets, hidden flags and the
    /// undominated set no larger.
    pub fn dominates(&self, other: &ExtendedMark) -> bool {
        self.layers == other.layers
            && self.dominators == other.dominators
            && self.levels.len() == other.levels.len()
            && self.levels.iter().zip(&other.levels).all(|(a, b)| {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.members == y.members && (!x.hidden || y.hidden))
            })
            && self.undominated.is_subset(&other.undominated)
            && self.parts.len() == other.parts.len()
            && self.parts.iter().zip(&other.parts).all(|(a, b)| a.members == b.members && a.budget <= b.budget)
    }

    /// Number of hidden classes at each level.
    pub fn hidden_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.iter().filter(|c| c.hidden).count()).collect()
    }
}

/// Minimal elements under [`ExtendedMark::dominates`].
pub fn minimal_extended<'a>(marks: impl IntoIterator<Item = &'a ExtendedMark>) -> Vec<ExtendedMark> {
    let mut all: Vec<&ExtendedMark> = marks.into_iter().collect();
    all.sort();
    all.dedup();
    all.iter()
        .filter(|m| !all.iter().any(|o| o != *m && o.dominates(m)))
        .map(|m| (*m).clone())
        .collect()
}

/// Groups `a ∩ alive` by the components of `alive`.
pub(crate) fn level_classes(g: &Graph, alive: &VertexSet, a: &VertexSet, layer: &VertexSet) -> Vec<LevelClass> {
    let mut out: Vec<LevelClass> = g
        .components(alive)
        .into_iter()
        .filter(|c| c.intersects(a))
        .map(|c| LevelClass { members: c.intersection(a), hidden: !c.intersection(layer).difference(a).is_empty() })
        .collect();
    out.sort_by_key(|c| c.members.first());
    out
}

/// Marks obtained by raising part budgets, hidden flags and the undominated
/// set.
pub(crate) fn closure(m: &ExtendedMark, a: &VertexSet, d: usize) -> Vec<ExtendedMark> {
    let free = a.difference(&m.deleted()).difference(&m.dominators).difference(&m.undominated);
    let base: Vec<usize> = m.parts.iter().map(|p| p.budget).collect();
    let clear: Vec<(usize, usize)> = m
        .levels
        .iter()
        .enumerate()
        .flat_map(|(i, l)| l.iter().enumerate().filter(|c| !c.1.hidden).map(move |(j, _)| (i, j)))
        .collect();
    let mut out = Vec::new();
    for flips in 0u64..1 << clear.len() {
        let mut levels = m.levels.clone();
        for (b, &(i, j)) in clear.iter().enumerate() {
            if flips >> b & 1 == 1 {
                levels[i][j].hidden = true;
            }
        }
        for extra_u in free.subsets_up_to(free.len()) {
            let mut budgets = base.clone();
            loop {
                let parts = m.parts.iter().zip(&budgets).map(|(p, &b)| Part { members: p.members, budget: b }).collect();
                out.push(ExtendedMark {
                    layers: m.layers.clone(),
                    dominators: m.dominators,
                    undominated: m.undominated.union(&extra_u),
                    levels: levels.clone(),
                    parts,
                });
                let mut i = 0;
                while i < budgets.len() && budgets[i] == d {
                    budgets[i] = base[i];
                    i += 1;
                }
                if i == budgets.len() {
                    break;
                }
                budgets[i] += 1;
            }
        }
    }
    out
}

/// Boundary dominators, total count, boundary red vertices left undominated.
type DomOption = (VertexSet, usize, VertexSet);

/// Ways to dominate one final component touching the boundary.
fn component_options(inst: &AnnotatedInstance, comp: &VertexSet, a: &VertexSet) -> Vec<DomOption> {
    let g = &inst.graph;
    let reds = comp.intersection(&inst.red);
    let inner = reds.difference(a);
    let boundary = reds.intersection(a);
    let mut out = Vec::new();
    for dc in comp.intersection(&inst.blue).subsets_up_to(inst.d) {
        let cov = g.closed_neighborhood(&dc);
        if inner.is_subset(&cov) {
            out.push((dc.intersection(a), dc.len(), boundary.difference(&cov)));
        }
    }
    out
}

/// The extended profile of `cone` with boundary `a`, by enumerating every
/// layer assignment of the cone.
pub fn extended_profile_brute(inst: &AnnotatedInstance, cone: &VertexSet, a: &VertexSet) -> BTreeSet<ExtendedMark> {
    let g = &inst.graph;
    let k = inst.k;
    let deletable: Vec<usize> = cone.difference(&inst.forbidden).to_vec();
    let mut out = BTreeSet::new();
    let mut assign = vec![0usize; deletable.len()];
    loop {
        let mut layers = vec![VertexSet::new(); k];
        for (&v, &l) in deletable.iter().zip(&assign) {
            if l > 0 {
                layers[l - 1].insert(v);
            }
        }
        let mut removed = VertexSet::new();
        let mut levels = Vec::with_capacity(k);
        let mut valid = true;
        for layer in &layers {
            let alive = cone.difference(&removed);
            if g.components(&alive).iter().any(|c| c.intersection(layer).len() > 1) {
                valid = false;
                break;
            }
            levels.push(level_classes(g, &alive, a, layer));
            removed = removed.union(layer);
        }
        if valid {
            let alive = cone.difference(&removed);
            let mut per_comp: Vec<(VertexSet, Vec<DomOption>)> = Vec::new();
            for c in g.components(&alive) {
                let opts = component_options(inst, &c, a);
                if opts.is_empty() {
                    valid = false;
                    break;
                }
                if c.intersects(a) {
                    per_comp.push((c.intersection(a), opts));
                }
            }
            if valid {
                per_comp.sort_by_key(|p| p.0.first());
                let boundary_layers: Vec<VertexSet> = layers.iter().map(|l| l.intersection(a)).collect();
                let mut idx = vec![0usize; per_comp.len()];
                loop {
                    let mut dominators = VertexSet::new();
                    let mut undominated = VertexSet::new();
                    let mut parts = Vec::new();
                    for (pc, &j) in per_comp.iter().zip(&idx) {
                        let o = &pc.1[j];
                        dominators = dominators.union(&o.0);
                        undominated = undominated.union(&o.2);
                        parts.push(Part { members: pc.0, budget: o.1 });
                    }
                    let m = ExtendedMark {
                        layers: boundary_layers.clone(),
                        dominators,
                        undominated,
                        levels: levels.clone(),
                        parts,
                    };
                    out.extend(closure(&m, a, inst.d));
                    let mut i = 0;
                    while i < idx.len() && idx[i] + 1 == per_comp[i].1.len() {
                        idx[i] = 0;
                        i += 1;
                    }
                    if i == idx.len() {
                        break;
                    }
                    idx[i] += 1;
                }
            }
        }
        let mut i = 0;
        while i < assign.len() && assign[i] == k {
            assign[i] = 0;
            i += 1;
        }
        if i == assign.len() {
            break;
        }
        assign[i] += 1;
    }
    out
}

pub fn extended_mark_realized_brute(inst: &AnnotatedInstance, cone: &VertexSet, a: &VertexSet, m: &ExtendedMark) -> bool {
    extended_profile_brute(inst, cone, a).contains(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    #[test]
    fn path_with_one_level() {
        // Path 0-1-2-3-4 with boundary {0}, k = 1, d = 1.
        let inst = AnnotatedInstance::plain(path(5), 1, 1);
        let a = VertexSet::singleton(0);
        let prof = extended_profile_brute(&inst, &inst.graph.vertices(), &a);
        // Deleting 2 leaves {0,1} (one dominator) hidden behind vertex 0's class.
        let m = ExtendedMark {
            layers: vec![VertexSet::new()],
            dominators: VertexSet::new(),
            undominated: VertexSet::new(),
            levels: vec![vec![LevelClass { members: a, hidden: true }]],
            parts: vec![Part { members: a, budget: 1 }],
        };
        assert!(prof.contains(&m));
        let unhidden = ExtendedMark { levels: vec![vec![LevelClass { members: a, hidden: false }]], ..m.clone() };
        assert!(!prof.contains(&unhidden));
        assert!(unhidden.dominates(&m) && !m.dominates(&unhidden));
        // Deleting the boundary vertex of a shorter path.
        let short = AnnotatedInstance::plain(path(3), 1, 1);
        let prof = extended_profile_brute(&short, &short.graph.vertices(), &a);
        let del = ExtendedMark {
            layers: vec![a],
            dominators: VertexSet::new(),
            undominated: VertexSet::new(),
            levels: vec![vec![LevelClass { members: a, hidden: false }]],
            parts: vec![],
        };
        assert!(prof.contains(&del));
    }
}
