//! Rooted tree decompositions, unbreakability checks, regularisation and a
//! recursive-separator construction with an a posteriori certified `q`.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("decomposition has no nodes")]
    Empty,
    #[error("decomposition has {0} roots")]
    RootCount(usize),
    #[error("node {0} has an invalid parent")]
    BadParent(usize),
    #[error("parent pointers contain a cycle")]
    Cycle,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn parse_err(line: usize, msg: impl Into<String>) -> DecompositionError {
    DecompositionError::Parse { line, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    parent: Vec<Option<usize>>,
    bags: Vec<VertexSet>,
    children: Vec<Vec<usize>>,
    cones: Vec<VertexSet>,
    root: usize,
}

impl TreeDecomposition {
    pub fn new(parent: Vec<Option<usize>>, bags: Vec<VertexSet>) -> Result<Self, DecompositionError> {
        let n = parent.len();
        if n == 0 {
            return Err(DecompositionError::Empty);
        }
        if bags.len() != n {
            return Err(DecompositionError::BadParent(n.min(bags.len())));
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(DecompositionError::RootCount(roots.len()));
        }
        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n || p == i {
                    return Err(DecompositionError::BadParent(i));
                }
                children[p].push(i);
            }
        }
        let root = roots[0];
        let mut td = TreeDecomposition { parent, bags, children, cones: vec![VertexSet::new(); n], root };
        let order = td.preorder();
        if order.len() != n {
            return Err(DecompositionError::Cycle);
        }
        for &x in order.iter().rev() {
            let mut c = td.bags[x];
            for &y in &td.children[x] {
                c = c.union(&td.cones[y]);
            }
            td.cones[x] = c;
        }
        Ok(td)
    }

    /// A single bag holding every vertex.
    pub fn trivial(g: &Graph) -> Self {
        Self::new(vec![None], vec![g.vertices()]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    pub fn children(&self, x: usize) -> &[usize] {
        &self.children[x]
    }

    pub fn bag(&self, x: usize) -> VertexSet {
        self.bags[x]
    }

    /// `bag(parent) ∩ bag(x)`, empty at the root.
    pub fn adhesion(&self, x: usize) -> VertexSet {
        match self.parent[x] {
            None => VertexSet::new(),
            Some(p) => self.bags[p].intersection(&self.bags[x]),
        }
    }

    pub fn margin(&self, x: usize) -> VertexSet {
        self.bags[x].difference(&self.adhesion(x))
    }

    /// Union of the bags in the subtree of `x`.
    pub fn cone(&self, x: usize) -> VertexSet {
        self.cones[x]
    }

    pub fn component(&self, x: usize) -> VertexSet {
        self.cones[x].difference(&self.adhesion(x))
    }

    /// Nodes with every parent before its children.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            if out.len() > self.len() {
                break;
            }
            out.push(x);
            for &y in self.children[x].iter().rev() {
                stack.push(y);
            }
        }
        out
    }

    /// Nodes with every child before its parent.
    pub fn postorder(&self) -> Vec<usize> {
        let mut p = self.preorder();
        p.reverse();
        p
    }

    pub fn max_adhesion(&self) -> usize {
        (0..self.len()).map(|x| self.adhesion(x).len()).max().unwrap_or(0)
    }

    pub fn max_bag(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(0)
    }

    /// Reads `t <count>` followed by `n <id> <parent|-> <bag ids..>` lines
    /// (1-based node and vertex ids).
    pub fn parse(text: &str, n: usize) -> Result<Self, DecompositionError> {
        let mut count: Option<usize> = None;
        let mut parent: Vec<Option<Option<usize>>> = Vec::new();
        let mut bags = Vec::new();
        let mut last = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tok: Vec<&str> = content.split_whitespace().collect();
            match tok[0] {
                "t" => {
                    if count.is_some() {
                        return Err(parse_err(line, "duplicate header"));
                    }
                    if tok.len() != 2 {
                        return Err(parse_err(line, "malformed header"));
                    }
                    let c: usize = tok[1].parse().map_err(|_| parse_err(line, "malformed header"))?;
                    count = Some(c);
                    parent = vec![None; c];
                    bags = vec![VertexSet::new(); c];
                }
                "n" => {
                    let c = count.ok_or_else(|| parse_err(line, "missing `t <count>` header"))?;
                    if tok.len() < 3 {
                        return Err(parse_err(line, "malformed node line"));
                    }
                    let id: usize = tok[1].parse().map_err(|_| parse_err(line, "malformed node id"))?;
                    if id == 0 || id > c {
                        return Err(parse_err(line, format!("node id {id} out of range")));
                    }
                    if parent[id - 1].is_some() {
                        return Err(parse_err(line, format!("node {id} listed twice")));
                    }
                    let p = if tok[2] == "-" {
                        None
                    } else {
                        let p: usize = tok[2].parse().map_err(|_| parse_err(line, "malformed parent id"))?;
                        if p == 0 || p > c {
                            return Err(parse_err(line, format!("parent id {p} out of range")));
                        }
                        Some(p - 1)
                    };
                    parent[id - 1] = Some(p);
                    for s in &tok[3..] {
                        let v: usize = s.parse().map_err(|_| parse_err(line, "malformed vertex id"))?;
                        if v == 0 || v > n {
                            return Err(parse_err(line, format!("vertex id {v} out of range")));
                        }
                        bags[id - 1].insert(v - 1);
                    }
                }
                _ => return Err(parse_err(line, "unknown line type")),
            }
        }
        if count.is_none() {
            return Err(parse_err(last.max(1), "missing `t <count>` header"));
        }
        let mut par = Vec::with_capacity(parent.len());
        for (i, p) in parent.into_iter().enumerate() {
            par.push(p.ok_or_else(|| parse_err(last, format!("node {} missing", i + 1)))?);
        }
        Self::new(par, bags)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("t {}\n", self.len());
        for x in 0..self.len() {
            let p = match self.parent[x] {
                None => "-".to_string(),
                Some(p) => (p + 1).to_string(),
            };
            s.push_str(&format!("n {} {}", x + 1, p));
            for v in &self.bags[x] {
                s.push_str(&format!(" {}", v + 1));
            }
            s.push('\n');
        }
        s
    }
}

/// A separation `(left, right)`: `left ∪ right` covers the graph and no edge
/// joins `left \ right` to `right \ left`. Its order is `|left ∩ right|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Separation {
    pub left: VertexSet,
    pub right: VertexSet,
}

impl Separation {
    pub fn separator(&self) -> VertexSet {
        self.left.intersection(&self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnbreakabilityReport {
    pub holds: bool,
    pub violation: Option<Separation>,
}

/// Over all separations of `G[alive]` of order at most `k`, the largest
/// value of `min(|left ∩ x|, |right ∩ x|)`, with a separation attaining it.
pub fn breakability(g: &Graph, alive: &VertexSet, x: &VertexSet, k: usize) -> (usize, Separation) {
    let x = x.intersection(alive);
    let mut best = (0usize, Separation { left: *alive, right: VertexSet::new() });
    let mut have = false;
    for c in alive.subsets_up_to(k) {
        let comps = g.components(&alive.difference(&c));
        let w: Vec<usize> = comps.iter().map(|k| k.intersection(&x).len()).collect();
        let xc = c.intersection(&x).len();
        let total: usize = w.iter().sum();
        // reach[i][s]: some subset of the first i components has x-weight s.
        let mut reach = vec![vec![false; total + 1]; comps.len() + 1];
        reach[0][0] = true;
        for i in 0..comps.len() {
            for s in 0..=total {
                if reach[i][s] {
                    reach[i + 1][s] = true;
                    reach[i + 1][s + w[i]] = true;
                }
            }
        }
        let Some(s) = (0..=total)
            .filter(|&s| reach[comps.len()][s])
            .max_by_key(|&s| (s.min(total - s), std::cmp::Reverse(s)))
        else {
            continue;
        };
        let value = xc + s.min(total - s);
        if !have || value > best.0 {
            have = true;
            let mut left = c;
            let mut rem = s;
            for i in (0..comps.len()).rev() {
                if rem >= w[i] && reach[i][rem - w[i]] {
                    left = left.union(&comps[i]);
                    rem -= w[i];
                }
            }
            let right = alive.difference(&left).union(&c);
            best = (value, Separation { left, right });
        }
    }
    best
}

/// Whether `x` is `(q, k)`-unbreakable in `G[alive]`.
pub fn is_unbreakable_in(g: &Graph, alive: &VertexSet, x: &VertexSet, q: usize, k: usize) -> UnbreakabilityReport {
    if q >= x.len() {
        return UnbreakabilityReport { holds: true, violation: None };
    }
    let (value, sep) = breakability(g, alive, x, k);
    if value > q {
        UnbreakabilityReport { holds: false, violation: Some(sep) }
    } else {
        UnbreakabilityReport { holds: true, violation: None }
    }
}

pub fn is_unbreakable_set(g: &Graph, x: &VertexSet, q: usize, k: usize) -> UnbreakabilityReport {
    is_unbreakable_in(g, &g.vertices(), x, q, k)
}

/// Smallest `q` for which `x` is `(q, k)`-unbreakable in `G[alive]`.
pub fn min_unbreakability(g: &Graph, alive: &VertexSet, x: &VertexSet, k: usize) -> usize {
    breakability(g, alive, x, k).0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    VertexOutOfRange { node: usize, vertex: usize },
    VertexMissing(usize),
    VertexNotConnected(usize),
    EdgeNotCovered(usize, usize),
    AdhesionTooLarge { node: usize, size: usize },
    BagBreakable { node: usize, separation: Separation },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DecompositionReport {
    Valid,
    Invalid(Violation),
}

/// Vertex coverage, edge coverage and connectivity of occurrences.
pub fn check_axioms(g: &Graph, td: &TreeDecomposition) -> Result<(), Violation> {
    let all = g.vertices();
    for x in 0..td.len() {
        if let Some(v) = td.bag(x).difference(&all).first() {
            return Err(Violation::VertexOutOfRange { node: x, vertex: v });
        }
    }
    let covered = td.cone(td.root());
    if let Some(v) = all.difference(&covered).first() {
        return Err(Violation::VertexMissing(v));
    }
    for (u, v) in g.edges() {
        if !(0..td.len()).any(|x| td.bag(x).contains(u) && td.bag(x).contains(v)) {
            return Err(Violation::EdgeNotCovered(u, v));
        }
    }
    // Occurrences are connected iff exactly one occurrence has its parent
    // outside the occurrence set.
    for v in &all {
        let tops = (0..td.len())
            .filter(|&x| td.bag(x).contains(v))
            .filter(|&x| td.parent(x).is_none_or(|p| !td.bag(p).contains(v)))
            .count();
        if tops != 1 {
            return Err(Violation::VertexNotConnected(v));
        }
    }
    Ok(())
}

/// Axioms, adhesion size at most `q`, and every bag `(q, k)`-unbreakable in
/// the graph induced by its cone.
pub fn validate_decomposition(g: &Graph, td: &TreeDecomposition, q: usize, k: usize) -> DecompositionReport {
    if let Err(v) = check_axioms(g, td) {
        return DecompositionReport::Invalid(v);
    }
    for x in td.preorder() {
        let a = td.adhesion(x).len();
        if a > q {
            return DecompositionReport::Invalid(Violation::AdhesionTooLarge { node: x, size: a });
        }
    }
    for x in td.preorder() {
        if let Some(sep) = is_unbreakable_in(g, &td.cone(x), &td.bag(x), q, k).violation {
            return DecompositionReport::Invalid(Violation::BagBreakable { node: x, separation: sep });
        }
    }
    DecompositionReport::Valid
}

/// Smallest `q` for which [`validate_decomposition`] accepts `td`.
pub fn certify_q(g: &Graph, td: &TreeDecomposition, k: usize) -> usize {
    (0..td.len())
        .map(|x| td.adhesion(x).len().max(min_unbreakability(g, &td.cone(x), &td.bag(x), k)))
        .max()
        .unwrap_or(0)
}

/// Non-root margins non-empty, `G[comp(x)]` connected, and every adhesion
/// vertex adjacent to `comp(x)`.
pub fn is_regular(g: &Graph, td: &TreeDecomposition) -> bool {
    (0..td.len()).filter(|&x| x != td.root()).all(|x| {
        let comp = td.component(x);
        !td.margin(x).is_empty()
            && !comp.is_empty()
            && g.is_connected_within(&comp)
            && td.adhesion(x).iter().all(|a| g.neighbors(a).intersects(&comp))
    })
}

struct Arena {
    bag: Vec<VertexSet>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl Arena {
    fn cone(&self, x: usize) -> VertexSet {
        self.children[x].iter().fold(self.bag[x], |c, &y| c.union(&self.cone(y)))
    }

    fn copy_restricted(&mut self, x: usize, keep: &VertexSet, parent: Option<usize>) -> usize {
        let id = self.bag.len();
        self.bag.push(self.bag[x].intersection(keep));
        self.parent.push(parent);
        self.children.push(Vec::new());
        self.alive.push(true);
        for y in self.children[x].clone() {
            let c = self.copy_restricted(y, keep, Some(id));
            self.children[id].push(c);
        }
        id
    }

    fn detach(&mut self, x: usize) {
        if let Some(p) = self.parent[x] {
            self.children[p].retain(|&c| c != x);
        }
        self.alive[x] = false;
    }
}

/// Splits disconnected components into separate subtrees, trims adhesion
/// vertices with no neighbour below, and contracts nodes with empty margin.
/// Returns an identical decomposition if `td` is already regular.
pub fn make_regular(g: &Graph, td: &TreeDecomposition) -> TreeDecomposition {
    if is_regular(g, td) {
        return td.clone();
    }
    let mut a = Arena {
        bag: td.bags.clone(),
        parent: td.parent.clone(),
        children: td.children.clone(),
        alive: vec![true; td.len()],
    };
    let root = td.root();
    let mut queue: VecDeque<usize> = a.children[root].iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        if !a.alive[x] {
            continue;
        }
        let p = a.parent[x].unwrap();
        let adh = a.bag[p].intersection(&a.bag[x]);
        let comp = a.cone(x).difference(&adh);
        let comps = g.components(&comp);
        let already = comps.len() == 1 && adh.iter().all(|v| g.neighbors(v).intersects(&comp));
        let pieces = if already {
            vec![x]
        } else {
            a.detach(x);
            let mut out = Vec::new();
            for k in comps {
                let keep = k.union(&g.open_neighborhood(&k).intersection(&adh));
                let c = a.copy_restricted(x, &keep, Some(p));
                a.children[p].push(c);
                out.push(c);
            }
            out
        };
        for c in pieces {
            if a.bag[c].is_subset(&a.bag[p]) {
                let kids = std::mem::take(&mut a.children[c]);
                a.detach(c);
                for &y in &kids {
                    a.parent[y] = Some(p);
                    a.children[p].push(y);
                    queue.push_back(y);
                }
            } else {
                queue.extend(a.children[c].iter().copied());
            }
        }
    }
    // Renumber the surviving nodes in breadth-first order.
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        order.extend(a.children[x].iter().copied());
        i += 1;
    }
    let mut new_id = vec![usize::MAX; a.bag.len()];
    for (i, &x) in order.iter().enumerate() {
        new_id[x] = i;
    }
    let parent = order.iter().map(|&x| a.parent[x].map(|p| new_id[p])).collect();
    let bags = order.iter().map(|&x| a.bag[x]).collect();
    TreeDecomposition::new(parent, bags).expect("regularisation keeps a rooted tree")
}

fn build_with_threshold(g: &Graph, k: usize, t: usize) -> TreeDecomposition {
    let mut parent = Vec::new();
    let mut bags = Vec::new();
    // (cone, adhesion, parent node)
    let mut stack = vec![(g.vertices(), VertexSet::new(), None)];
    while let Some((cone, adh, par)) = stack.pop() {
        let id = bags.len();
        parent.push(par);
        let (value, sep) = breakability(g, &cone, &cone, k);
        let mut bag = cone;
        if value > t {
            let candidate = adh.union(&sep.separator());
            let rest = cone.difference(&candidate);
            let comps = g.components(&rest);
            let progress = !sep.separator().is_subset(&adh) || comps.len() > 1;
            if progress && !comps.is_empty() {
                bag = candidate;
                for c in comps.into_iter().rev() {
                    let child_adh = g.open_neighborhood(&c).intersection(&bag);
                    stack.push((c.union(&child_adh), child_adh, Some(id)));
                }
            }
        }
        bags.push(bag);
    }
    TreeDecomposition::new(parent, bags).expect("construction yields a rooted tree")
}

/// Recursive balanced-separator decomposition. Every threshold is tried and
/// the regular decomposition with the smallest certified `q` is returned
/// together with that `q`.
pub fn build_decomposition(g: &Graph, k: usize) -> (TreeDecomposition, usize) {
    let mut best: Option<((usize, usize, usize), TreeDecomposition)> = None;
    for t in 0..=g.n() {
        let td = make_regular(g, &build_with_threshold(g, k, t));
        let q = certify_q(g, &td, k);
        let key = (q, td.max_bag(), td.len());
        if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
            best = Some((key, td));
        }
    }
    let ((q, _, _), td) = best.expect("at least one threshold");
    (td, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn unbreakable_examples() {
        let k5 = clique(5);
        assert!(is_unbreakable_set(&k5, &k5.vertices(), 2, 2).holds);
        let p9 = path(9);
        let r = is_unbreakable_set(&p9, &p9.vertices(), 2, 1);
        assert!(!r.holds);
        let sep = r.violation.unwrap();
        assert_eq!(sep.separator().len(), 1);
        assert!(sep.left.len() > 2 && sep.right.len() > 2);
        assert!(is_unbreakable_set(&p9, &set(&[0, 1, 2]), 3, 4).holds);
        assert_eq!(min_unbreakability(&p9, &p9.vertices(), &p9.vertices(), 1), 5);
    }

    #[test]
    fn validation_examples() {
        let k5 = clique(5);
        assert_eq!(validate_decomposition(&k5, &TreeDecomposition::trivial(&k5), 5, 2), DecompositionReport::Valid);
        let p3 = path(3);
        let bad = TreeDecomposition::new(vec![None, Some(0)], vec![set(&[0, 1]), set(&[2])]).unwrap();
        assert_eq!(
            validate_decomposition(&p3, &bad, 3, 1),
            DecompositionReport::Invalid(Violation::EdgeNotCovered(1, 2))
        );
        let p9 = path(9);
        let two = TreeDecomposition::new(vec![None, Some(0)], vec![set(&[0, 1, 2, 3, 4]), set(&[4, 5, 6, 7, 8])])
            .unwrap();
        assert_eq!(validate_decomposition(&p9, &two, 5, 1), DecompositionReport::Valid);
        let split = TreeDecomposition::new(vec![None, Some(0), Some(1)], vec![set(&[0, 1]), set(&[2]), set(&[1, 2])])
            .unwrap();
        assert_eq!(validate_decomposition(&p3, &split, 3, 1), DecompositionReport::Invalid(Violation::VertexNotConnected(1)));
    }

    #[test]
    fn text_round_trip() {
        let td = TreeDecomposition::new(vec![None, Some(0)], vec![set(&[0, 1]), set(&[1, 2])]).unwrap();
        let text = td.to_text();
        assert_eq!(text, "t 2\nn 1 - 1 2\nn 2 1 2 3\n");
        assert_eq!(TreeDecomposition::parse(&text, 3).unwrap(), td);
        assert!(TreeDecomposition::parse("t 1\nn 1 - 4\n", 3).is_err());
        assert_eq!(TreeDecomposition::parse("t 2\nn 1 - 1\nn 2 - 2\n", 2), Err(DecompositionError::RootCount(2)));
    }

    #[test]
    fn views() {
        let td = TreeDecomposition::new(vec![None, Some(0)], vec![set(&[0, 1]), set(&[1, 2])]).unwrap();
        assert_eq!(td.adhesion(1), set(&[1]));
        assert_eq!(td.margin(1), set(&[2]));
        assert_eq!(td.cone(0), set(&[0, 1, 2]));
        assert_eq!(td.component(1), set(&[2]));
        assert_eq!(td.postorder(), vec![1, 0]);
    }

    #[test]
    fn building() {
        let k6 = clique(6);
        let (td, q) = build_decomposition(&k6, 2);
        assert_eq!(td.len(), 1);
        assert!(q <= 5);
        assert_eq!(validate_decomposition(&k6, &td, 5, 2), DecompositionReport::Valid);

        let two = disjoint_union(&clique(4), &clique(4));
        let (td, q) = build_decomposition(&two, 0);
        assert_eq!(td.len(), 3);
        assert_eq!(td.children(td.root()).len(), 2);
        assert_eq!(validate_decomposition(&two, &td, q, 0), DecompositionReport::Valid);

        let p9 = path(9);
        let (td, q) = build_decomposition(&p9, 1);
        assert!(td.len() > 1);
        assert!(is_regular(&p9, &td));
        assert_eq!(validate_decomposition(&p9, &td, q, 1), DecompositionReport::Valid);
    }

    #[test]
    fn regularisation() {
        // Root holds the middle of a path; one child holds both ends.
        let p5 = path(5);
        let td = TreeDecomposition::new(
            vec![None, Some(0), Some(1)],
            vec![set(&[1, 2, 3]), set(&[0, 1, 3, 4]), set(&[1, 3])],
        )
        .unwrap();
        assert!(!is_regular(&p5, &td));
        let r = make_regular(&p5, &td);
        assert!(is_regular(&p5, &r));
        assert!(check_axioms(&p5, &r).is_ok());
        assert_eq!(make_regular(&p5, &r), r);
    }
}
