//! Marks for annotated deletion to dominated clusters and their brute-force
//! semantics.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::graph::{AnnotatedInstance, VertexSet};

use super::set_partitions;

/// Vertices of the boundary in one component, with the number of dominators
/// the component may use.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Part {
    pub members: VertexSet,
    pub budget: usize,
}

/// Boundary behaviour of a partial solution inside a cone.
///
/// Realized when the cone has a deletion set `S ⊇ deleted` with
/// `S ∩ A = deleted` and `|S - deleted| <= budget`, and dominators `D` with
/// `D ∩ A = dominators`, such that the components of the cone minus `S`
/// meeting `A` meet it exactly in the parts, each using at most its budget of
/// dominators, every other component uses at most `d`, and every red vertex
/// outside `undominated` is dominated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Mark {
    pub deleted: VertexSet,
    pub dominators: VertexSet,
    pub undominated: VertexSet,
    pub budget: usize,
    pub parts: Vec<Part>,
}

impl Mark {
    /// Budget left in `part` after its boundary dominators are paid for.
    pub fn extra(&self, part: &Part) -> usize {
        part.budget.saturating_sub(self.dominators.intersection(&part.members).len())
    }

    /// `self` is at least as strong as `other`: same boundary decisions and
    /// partition, with budgets and undominated set no larger. Any extension
    /// of `other` in a parent is then also an extension of `self`.
    pub fn dominates(&self, other: &Mark) -> bool {
        self.deleted == other.deleted
            && self.dominators == other.dominators
            && self.budget <= other.budget
            && self.undominated.is_subset(&other.undominated)
            && self.parts.len() == other.parts.len()
            && self.parts.iter().zip(&other.parts).all(|(a, b)| a.members == b.members && a.budget <= b.budget)
    }

    pub fn is_well_formed(&self, a: &VertexSet, k: usize, d: usize) -> bool {
        let live = a.difference(&self.deleted);
        let mut cover = VertexSet::new();
        for p in &self.parts {
            if p.members.is_empty() || p.budget > d {
                return false;
            }
            cover = cover.union(&p.members);
        }
        self.budget <= k
            && self.deleted.is_subset(a)
            && self.dominators.is_subset(&live)
            && self.undominated.is_subset(&live.difference(&self.dominators))
            && cover == live
    }
}

/// Every well-formed mark over `a` for budgets `k` and `d`. Parts may carry
/// a budget below their boundary dominator count; such marks are never
/// realized.
pub fn enumerate_marks(a: &VertexSet, k: usize, d: usize) -> Vec<Mark> {
    let mut out = Vec::new();
    for deleted in a.subsets_up_to(a.len()) {
        let live = a.difference(&deleted);
        for dominators in live.subsets_up_to(live.len()) {
            let free = live.difference(&dominators);
            for undominated in free.subsets_up_to(free.len()) {
                for partition in set_partitions(&live) {
                    let mut budgets = vec![0usize; partition.len()];
                    loop {
                        for budget in 0..=k {
                            let parts = partition
                                .iter()
                                .zip(&budgets)
                                .map(|(m, &b)| Part { members: *m, budget: b })
                                .collect();
                            out.push(Mark { deleted, dominators, undominated, budget, parts });
                        }
                        // Odometer over budgets[i] in 0..=d.
                        let mut i = 0;
                        while i < budgets.len() && budgets[i] == d {
                            budgets[i] = 0;
                            i += 1;
                        }
                        if i == budgets.len() {
                            break;
                        }
                        budgets[i] += 1;
                    }
                }
            }
        }
    }
    out
}

/// Decides realizability of `m` in the subgraph induced by `cone`, with
/// boundary `a`, by trying every deletion set and every dominator choice.
pub fn mark_realized_brute(inst: &AnnotatedInstance, cone: &VertexSet, a: &VertexSet, m: &Mark) -> bool {
    let g = &inst.graph;
    let d = inst.d;
    let inner = cone.difference(a);
    let deletable = inner.difference(&inst.forbidden);
    if !m.deleted.is_subset(a) || m.deleted.intersects(&inst.forbidden) || !m.dominators.is_subset(&inst.blue) {
        return false;
    }
    'outer: for extra in deletable.subsets_up_to(m.budget) {
        let alive = cone.difference(&m.deleted).difference(&extra);
        for comp in g.components(&alive) {
            let touch = comp.intersection(a);
            let budget = if touch.is_empty() {
                d
            } else {
                match m.parts.iter().find(|p| p.members == touch) {
                    Some(p) => p.budget,
                    None => continue 'outer,
                }
            };
            let fixed = comp.intersection(&m.dominators);
            if fixed.len() > budget {
                continue 'outer;
            }
            let need = comp
                .intersection(&inst.red)
                .difference(&m.undominated)
                .difference(&g.closed_neighborhood(&fixed));
            let cand = comp.intersection(&inst.blue).difference(a);
            let ok = cand
                .subsets_up_to(budget - fixed.len())
                .any(|extra_dom| need.is_subset(&g.closed_neighborhood(&extra_dom)));
            if !ok {
                continue 'outer;
            }
        }
        return true;
    }
    false
}

/// The profile of `cone` with boundary `a`, by filtering all marks.
pub fn profile_brute(inst: &AnnotatedInstance, cone: &VertexSet, a: &VertexSet) -> BTreeSet<Mark> {
    enumerate_marks(a, inst.k, inst.d)
        .into_iter()
        .filter(|m| mark_realized_brute(inst, cone, a, m))
        .collect()
}

/// The minimal elements of `marks` under [`Mark::dominates`].
pub fn minimal_marks<'a>(marks: impl IntoIterator<Item = &'a Mark>) -> Vec<Mark> {
    let mut out: Vec<Mark> = Vec::new();
    let mut all: Vec<&Mark> = marks.into_iter().collect();
    all.sort();
    all.dedup();
    for m in &all {
        if !all.iter().any(|o| o != m && o.dominates(m) && !m.dominates(o)) {
            out.push((*m).clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    #[test]
    fn mark_counts() {
        assert_eq!(enumerate_marks(&VertexSet::new(), 1, 1).len(), 2);
        assert_eq!(enumerate_marks(&VertexSet::singleton(0), 1, 1).len(), 14);
    }

    #[test]
    fn single_boundary_vertex_on_a_path() {
        // Cone is the path 0-1-2 with boundary {0}, d = 1, k = 0.
        let inst = AnnotatedInstance::plain(path(3), 0, 1);
        let a = VertexSet::singleton(0);
        let prof = profile_brute(&inst, &inst.graph.vertices(), &a);
        let keep = |undominated: VertexSet| Mark {
            deleted: VertexSet::new(),
            dominators: VertexSet::new(),
            undominated,
            budget: 0,
            parts: vec![Part { members: a, budget: 1 }],
        };
        assert!(prof.contains(&keep(VertexSet::new())));
        assert!(!prof.contains(&Mark { parts: vec![Part { members: a, budget: 0 }], ..keep(a) }));
        // Vertex 0 as a dominator leaves 2 undominated.
        let dom = Mark { dominators: a, ..keep(VertexSet::new()) };
        assert!(!prof.contains(&dom));
    }

    #[test]
    fn dominance_is_reflexive_and_respects_budgets() {
        let a: VertexSet = [0, 1].into_iter().collect();
        let marks = enumerate_marks(&a, 1, 1);
        for m in &marks {
            assert!(m.dominates(m));
        }
        let base = Mark {
            deleted: VertexSet::new(),
            dominators: VertexSet::new(),
            undominated: VertexSet::new(),
            budget: 0,
            parts: vec![Part { members: VertexSet::singleton(0), budget: 0 }, Part { members: VertexSet::singleton(1), budget: 1 }],
        };
        let joined = Mark { parts: vec![Part { members: a, budget: 1 }], ..base.clone() };
        let looser = Mark { budget: 1, undominated: VertexSet::singleton(0), ..base.clone() };
        assert!(!base.dominates(&joined));
        assert!(base.dominates(&looser));
        assert!(!looser.dominates(&base));
        assert!(marks.iter().all(|m| m.is_well_formed(&a, 1, 1)));
    }
}
