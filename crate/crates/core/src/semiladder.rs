//! Semi-ladders: vertices `a_1..a_n`, `b_1..b_n`, all distinct, with
//! `a_i b_j` an edge whenever `i > j` and `a_i b_i` a non-edge.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemiLadderWitness {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl SemiLadderWitness {
    pub fn order(&self) -> usize {
        self.a.len()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemiLadderError {
    #[error("sequences have different lengths")]
    LengthMismatch,
    #[error("vertex {0} is not in the graph")]
    VertexOutOfRange(usize),
}

/// Result of a capped search. When `exact` is false the search stopped at
/// `cap + 1` and `index` is only a lower bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemiLadderSearch {
    pub index: usize,
    pub exact: bool,
    pub witness: SemiLadderWitness,
}

pub fn verify_semi_ladder(g: &Graph, w: &SemiLadderWitness) -> Result<bool, SemiLadderError> {
    if w.a.len() != w.b.len() {
        return Err(SemiLadderError::LengthMismatch);
    }
    let mut seen = VertexSet::new();
    for &v in w.a.iter().chain(&w.b) {
        if v >= g.n() {
            return Err(SemiLadderError::VertexOutOfRange(v));
        }
        if !seen.insert(v) {
            return Ok(false);
        }
    }
    let n = w.a.len();
    for i in 0..n {
        if g.has_edge(w.a[i], w.b[i]) {
            return Ok(false);
        }
        for j in 0..i {
            if !g.has_edge(w.a[i], w.b[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Distinct representatives `a_i ∈ sets[i]` (Kuhn's augmenting paths).
fn distinct_representatives(sets: &[VertexSet]) -> Option<Vec<usize>> {
    fn augment(i: usize, sets: &[VertexSet], owner: &mut [Option<usize>], seen: &mut VertexSet) -> bool {
        for v in &sets[i] {
            if seen.insert(v) {
                let free = match owner[v] {
                    None => true,
                    Some(j) => augment(j, sets, owner, seen),
                };
                if free {
                    owner[v] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    let mut owner = vec![None; crate::graph::MAX_VERTICES];
    for i in 0..sets.len() {
        if !augment(i, sets, &mut owner, &mut VertexSet::new()) {
            return None;
        }
    }
    let mut rep = vec![0; sets.len()];
    for (v, o) in owner.iter().enumerate() {
        if let Some(i) = o {
            rep[*i] = v;
        }
    }
    Some(rep)
}

struct Search<'a> {
    g: &'a Graph,
    limit: usize,
    best: SemiLadderWitness,
    b: Vec<usize>,
    /// `common[t]` = vertices adjacent to every one of `b_1..b_t`.
    common: Vec<VertexSet>,
}

impl Search<'_> {
    /// Candidate sets for `a_1..a_t` given the current `b` sequence.
    fn a_sets(&self) -> Vec<VertexSet> {
        let bs: VertexSet = self.b.iter().copied().collect();
        (0..self.b.len())
            .map(|i| {
                let mut nb = self.g.neighbors(self.b[i]);
                nb.insert(self.b[i]);
                self.common[i].difference(&nb).difference(&bs)
            })
            .collect()
    }

    fn extend(&mut self) {
        if self.best.order() >= self.limit {
            return;
        }
        let t = self.b.len();
        let used: VertexSet = self.b.iter().copied().collect();
        for v in &self.g.vertices().difference(&used) {
            let cn = self.common[t].intersection(&self.g.neighbors(v));
            self.b.push(v);
            self.common.push(cn);
            if let Some(a) = distinct_representatives(&self.a_sets()) {
                if t + 1 > self.best.order() {
                    self.best = SemiLadderWitness { a, b: self.b.clone() };
                }
                // Every later a_j must be adjacent to all chosen b's.
                let room = cn.difference(&used).len();
                if t + 1 + room > self.best.order() {
                    self.extend();
                }
            }
            self.b.pop();
            self.common.pop();
            if self.best.order() >= self.limit {
                return;
            }
        }
    }
}

/// Largest semi-ladder order, searching up to `cap + 1`.
pub fn semi_ladder_index(g: &Graph, cap: usize) -> SemiLadderSearch {
    let mut s = Search {
        g,
        limit: cap + 1,
        best: SemiLadderWitness { a: Vec::new(), b: Vec::new() },
        b: Vec::new(),
        common: vec![g.vertices()],
    };
    s.extend();
    let index = s.best.order();
    SemiLadderSearch { index, exact: index <= cap, witness: s.best }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    fn fig2() -> Graph {
        // a1..a4 = 0..3, b1..b4 = 4..7
        Graph::new(8, &[(1, 4), (2, 4), (2, 5), (3, 4), (3, 5), (3, 6)]).unwrap()
    }

    #[test]
    fn known_indices() {
        assert_eq!(semi_ladder_index(&clique(5), 10).index, 0);
        assert_eq!(semi_ladder_index(&edgeless(4), 10).index, 1);
        for n in 1..=5 {
            let r = semi_ladder_index(&crown(n), 10);
            assert_eq!(r.index, n, "crown {n}");
            assert!(verify_semi_ladder(&crown(n), &r.witness).unwrap());
        }
        assert_eq!(semi_ladder_index(&half_graph(5), 10).index, 5);
        assert_eq!(semi_ladder_index(&fig2(), 10).index, 4);
    }

    #[test]
    fn cap_reports_lower_bound() {
        let r = semi_ladder_index(&crown(5), 2);
        assert_eq!((r.index, r.exact), (3, false));
    }

    #[test]
    fn figure_witness() {
        let w = SemiLadderWitness { a: vec![0, 1, 2, 3], b: vec![4, 5, 6, 7] };
        assert!(verify_semi_ladder(&fig2(), &w).unwrap());
        let bad = SemiLadderWitness { a: vec![0, 1], b: vec![5, 4] };
        assert!(!verify_semi_ladder(&fig2(), &bad).unwrap());
        let short = SemiLadderWitness { a: vec![0], b: vec![] };
        assert_eq!(verify_semi_ladder(&fig2(), &short), Err(SemiLadderError::LengthMismatch));
    }
}
