//! Exhaustive reference solvers. They share nothing with the structural
//! solvers beyond the graph and elimination-tree types, so agreement between
//! the two is meaningful.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::etree::EliminationTree;
use crate::graph::{AnnotatedInstance, Graph, VertexSet};

/// Hard limits that keep the exhaustive search from running away.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_vertices: usize,
    pub max_k: usize,
    pub max_d: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_vertices: 16, max_k: 8, max_d: 4 }
    }
}

impl OracleBudget {
    fn check(&self, n: usize, k: usize, d: usize) -> Result<(), OracleError> {
        if n > self.max_vertices {
            return Err(OracleError::OverBudget { what: "vertices", value: n, limit: self.max_vertices });
        }
        if k > self.max_k {
            return Err(OracleError::OverBudget { what: "k", value: k, limit: self.max_k });
        }
        if d > self.max_d {
            return Err(OracleError::OverBudget { what: "d", value: d, limit: self.max_d });
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance exceeds the oracle budget: {what} = {value} > {limit}")]
    OverBudget { what: &'static str, value: usize, limit: usize },
}

/// Deleted set plus one dominating set per remaining component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DcdWitness {
    pub deleted: VertexSet,
    pub dominators: Vec<(VertexSet, VertexSet)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EddcWitness {
    pub tree: EliminationTree,
    pub dominators: Vec<(VertexSet, VertexSet)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkeletonKind {
    Deletion,
    Elimination,
}

/// Smallest-then-lexicographic `D ⊆ comp ∩ blue`, `|D| <= d`, dominating
/// `comp ∩ red` inside `comp`.
fn dominators_in(g: &Graph, comp: &VertexSet, red: &VertexSet, blue: &VertexSet, d: usize) -> Option<VertexSet> {
    let need = comp.intersection(red);
    if need.is_empty() {
        return Some(VertexSet::new());
    }
    let cand = comp.intersection(blue);
    for size in 1..=d.min(cand.len()) {
        for dset in cand.subsets_of_size(size) {
            let mut covered = dset;
            for v in &dset {
                covered = covered.union(&g.neighbors(v));
            }
            if need.is_subset(&covered) {
                return Some(dset);
            }
        }
    }
    None
}

fn dominate_all(inst: &AnnotatedInstance, comps: &[VertexSet]) -> Option<Vec<(VertexSet, VertexSet)>> {
    comps
        .iter()
        .map(|c| dominators_in(&inst.graph, c, &inst.red, &inst.blue, inst.d).map(|d| (*c, d)))
        .collect()
}

/// Exhaustive annotated dominated cluster deletion: first `S` (by size, then
/// lexicographically) with `|S| <= k`, `S ∩ F = ∅`, every component of
/// `G - S` red-blue dominated by at most `d` vertices.
pub fn brute_dcd(inst: &AnnotatedInstance, budget: &OracleBudget) -> Result<Option<DcdWitness>, OracleError> {
    let g = &inst.graph;
    budget.check(g.n(), inst.k, inst.d)?;
    let deletable = g.vertices().difference(&inst.forbidden);
    for s in deletable.subsets_up_to(inst.k) {
        let comps = g.connected_components(&s);
        if let Some(dominators) = dominate_all(inst, &comps) {
            return Ok(Some(DcdWitness { deleted: s, dominators }));
        }
    }
    Ok(None)
}

/// Memoised search for recursive deletion: a connected set passes at depth
/// `j` if it is red-blue dominated, or `j > 0` and deleting some allowed
/// vertex leaves components that all pass at depth `j - 1`.
struct Eliminator<'a> {
    inst: &'a AnnotatedInstance,
    memo: HashMap<(VertexSet, usize), Option<usize>>,
}

const DOMINATED: usize = usize::MAX;

impl<'a> Eliminator<'a> {
    fn new(inst: &'a AnnotatedInstance) -> Self {
        Eliminator { inst, memo: HashMap::new() }
    }

    /// `Some(DOMINATED)` if no deletion is needed, `Some(v)` for a root
    /// choice, `None` if impossible.
    fn solve(&mut self, comp: VertexSet, depth: usize) -> Option<usize> {
        if let Some(&r) = self.memo.get(&(comp, depth)) {
            return r;
        }
        let inst = self.inst;
        let res = if dominators_in(&inst.graph, &comp, &inst.red, &inst.blue, inst.d).is_some() {
            Some(DOMINATED)
        } else if depth == 0 {
            None
        } else {
            let mut found = None;
            for v in &comp.difference(&inst.forbidden) {
                let mut rest = comp;
                rest.remove(v);
                let ok = inst
                    .graph
                    .components(&rest)
                    .into_iter()
                    .all(|c| self.solve(c, depth - 1).is_some());
                if ok {
                    found = Some(v);
                    break;
                }
            }
            found
        };
        self.memo.insert((comp, depth), res);
        res
    }

    fn build(
        &mut self,
        comp: VertexSet,
        depth: usize,
        parent: Option<usize>,
        verts: &mut Vec<usize>,
        parents: &mut Vec<Option<usize>>,
        doms: &mut Vec<(VertexSet, VertexSet)>,
    ) {
        let inst = self.inst;
        match self.solve(comp, depth).expect("build on a solvable component") {
            DOMINATED => {
                let d = dominators_in(&inst.graph, &comp, &inst.red, &inst.blue, inst.d).unwrap();
                doms.push((comp, d));
            }
            v => {
                let node = verts.len();
                verts.push(v);
                parents.push(parent);
                let mut rest = comp;
                rest.remove(v);
                for c in inst.graph.components(&rest) {
                    self.build(c, depth - 1, Some(node), verts, parents, doms);
                }
            }
        }
    }

    fn run(&mut self, depth: usize) -> Option<EddcWitness> {
        let g = &self.inst.graph;
        let comps = g.components(&g.vertices());
        if !comps.iter().all(|&c| self.solve(c, depth).is_some()) {
            return None;
        }
        let (mut verts, mut parents, mut doms) = (Vec::new(), Vec::new(), Vec::new());
        for c in comps {
            self.build(c, depth, None, &mut verts, &mut parents, &mut doms);
        }
        let tree = EliminationTree::new(verts, parents).expect("well-formed forest");
        doms.sort();
        Some(EddcWitness { tree, dominators: doms })
    }
}

/// Exhaustive annotated elimination distance to dominated clusters.
pub fn brute_eddc(inst: &AnnotatedInstance, budget: &OracleBudget) -> Result<Option<EddcWitness>, OracleError> {
    budget.check(inst.graph.n(), inst.k, inst.d)?;
    Ok(Eliminator::new(inst).run(inst.k))
}

/// Treedepth with an optimal elimination forest.
pub fn brute_treedepth(g: &Graph, budget: &OracleBudget) -> Result<(usize, EliminationTree), OracleError> {
    budget.check(g.n(), 0, 0)?;
    let inst = AnnotatedInstance {
        graph: g.clone(),
        forbidden: VertexSet::new(),
        red: g.vertices(),
        blue: VertexSet::new(),
        k: g.n(),
        d: 0,
    };
    let mut e = Eliminator::new(&inst);
    for depth in 0..=g.n() {
        if let Some(w) = e.run(depth) {
            return Ok((depth, w.tree));
        }
    }
    unreachable!("deleting everything always works")
}

/// Smallest depth of an elimination forest whose labels are exactly `s`.
fn set_elimination_depth(g: &Graph, alive: VertexSet, s: &VertexSet, memo: &mut HashMap<VertexSet, usize>) -> usize {
    if let Some(&r) = memo.get(&alive) {
        return r;
    }
    let mut worst = 0;
    for c in g.components(&alive) {
        let here = c.intersection(s);
        if here.is_empty() {
            continue;
        }
        let best = here
            .iter()
            .map(|v| {
                let mut rest = c;
                rest.remove(v);
                1 + set_elimination_depth(g, rest, s, memo)
            })
            .min()
            .unwrap();
        worst = worst.max(best);
    }
    memo.insert(alive, worst);
    worst
}

/// Skeletons of all solutions of the plain instance `(g, k, d)`. A solution
/// contributes only when `G - S'` has exactly one component with more than
/// `q` vertices, and its skeleton is the set of deleted vertices adjacent to
/// that component and to some vertex outside its closed neighbourhood.
pub fn brute_skeletons(
    g: &Graph,
    q: usize,
    k: usize,
    d: usize,
    kind: SkeletonKind,
    budget: &OracleBudget,
) -> Result<BTreeSet<VertexSet>, OracleError> {
    budget.check(g.n(), k, d)?;
    let all = g.vertices();
    let mut out = BTreeSet::new();
    let mut consider = |s: VertexSet| {
        let comps = g.connected_components(&s);
        if comps.iter().any(|c| dominators_in(g, c, &all, &all, d).is_none()) {
            return;
        }
        let large: Vec<_> = comps.iter().filter(|c| c.len() > q).collect();
        if large.len() != 1 {
            return;
        }
        let c0 = *large[0];
        let n0 = g.closed_neighborhood(&c0);
        let skeleton: VertexSet = s
            .iter()
            .filter(|&v| g.neighbors(v).intersects(&c0) && !g.neighbors(v).is_subset(&n0))
            .collect();
        out.insert(skeleton);
    };
    match kind {
        SkeletonKind::Deletion => all.subsets_up_to(k).for_each(&mut consider),
        SkeletonKind::Elimination => {
            for s in all.subsets_up_to(g.n()) {
                let mut memo = HashMap::new();
                if set_elimination_depth(g, all, &s, &mut memo) <= k {
                    consider(s);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    fn td(g: &Graph) -> usize {
        brute_treedepth(g, &OracleBudget::default()).unwrap().0
    }

    #[test]
    fn treedepth_values() {
        assert_eq!(td(&path(7)), 3);
        assert_eq!(td(&cycle(4)), 3);
        assert_eq!(td(&path(3)), 2);
        assert_eq!(td(&edgeless(1)), 1);
        assert_eq!(td(&edgeless(0)), 0);
        assert_eq!(td(&clique(4)), 4);
    }

    #[test]
    fn treedepth_tree_is_valid() {
        let g = cycle(6);
        let (depth, t) = brute_treedepth(&g, &OracleBudget::default()).unwrap();
        assert_eq!(t.depth(), depth);
        assert_eq!(t.vertex_set(), g.vertices());
        assert!(t.is_tree_structured(&g).unwrap());
    }

    #[test]
    fn dcd_small_cases() {
        let b = OracleBudget::default();
        let p9 = path(9);
        assert!(brute_dcd(&AnnotatedInstance::plain(p9.clone(), 0, 1), &b).unwrap().is_none());
        let w = brute_dcd(&AnnotatedInstance::plain(p9, 2, 1), &b).unwrap().unwrap();
        assert_eq!(w.deleted.len(), 2);
        let two = disjoint_union(&clique(3), &clique(3));
        assert!(brute_dcd(&AnnotatedInstance::plain(two, 0, 1), &b).unwrap().is_some());
    }

    #[test]
    fn eddc_cycle() {
        let b = OracleBudget::default();
        let c4 = AnnotatedInstance::plain(cycle(4), 2, 0);
        assert!(brute_eddc(&c4, &b).unwrap().is_none());
        let c4 = AnnotatedInstance::plain(cycle(4), 3, 0);
        let w = brute_eddc(&c4, &b).unwrap().unwrap();
        assert!(w.tree.depth() <= 3 && w.tree.is_tree_structured(&cycle(4)).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let b = OracleBudget { max_vertices: 3, ..Default::default() };
        assert!(matches!(
            brute_dcd(&AnnotatedInstance::plain(path(4), 1, 1), &b),
            Err(OracleError::OverBudget { what: "vertices", .. })
        ));
    }

    #[test]
    fn skeletons_of_a_clique() {
        let s = brute_skeletons(&clique(6), 2, 1, 1, SkeletonKind::Deletion, &OracleBudget::default()).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![VertexSet::new()]);
    }
}
