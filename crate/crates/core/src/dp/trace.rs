//! Branching trees recorded while computing profiles, and the Black-White
//! accounting over them.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Color {
    Black,
    White,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceNode {
    pub color: Color,
    pub children: Vec<usize>,
}

/// The branching tree for one decomposition node and one boundary guess.
/// Node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceTree {
    pub node: usize,
    /// Largest profile among the children of `node`.
    pub alpha: usize,
    pub nodes: Vec<TraceNode>,
}

impl TraceTree {
    pub fn new(node: usize, alpha: usize) -> Self {
        TraceTree { node, alpha, nodes: vec![TraceNode { color: Color::White, children: Vec::new() }] }
    }

    pub fn add_child(&mut self, parent: usize, color: Color) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TraceNode { color, children: Vec::new() });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.children.is_empty()).count()
    }

    /// Largest number of Black nodes on a root-to-leaf path.
    pub fn black_budget(&self) -> usize {
        let mut best = vec![0usize; self.nodes.len()];
        let mut out = 0;
        // Children always have larger ids than their parent.
        for i in 0..self.nodes.len() {
            let here = best[i] + usize::from(self.nodes[i].color == Color::Black);
            out = out.max(here);
            for &c in &self.nodes[i].children {
                best[c] = here;
            }
        }
        out
    }

    fn is_black_white(&self) -> bool {
        self.nodes.iter().all(|n| {
            let whites = n.children.iter().filter(|&&c| self.nodes[c].color == Color::White).count();
            n.children.is_empty() || whites == 0 || (whites == 1 && n.children.len() == 1)
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DpTrace {
    /// `k + q·d`.
    pub beta: usize,
    pub trees: Vec<TraceTree>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlackWhiteReport {
    pub trees: usize,
    pub valid: bool,
    pub max_leaves: usize,
    pub max_black_budget: usize,
    pub max_size: usize,
    /// Trees whose leaves exceed `alpha^beta`, by index.
    pub bound_violations: Vec<usize>,
}

impl BlackWhiteReport {
    pub fn holds(&self) -> bool {
        self.valid && self.bound_violations.is_empty()
    }
}

/// Checks that every tree is Black-White and has at most `alpha^beta`
/// leaves. `alpha` is floored at 1 so that nodes without children allow one
/// leaf.
pub fn branch_accounting(trace: &DpTrace) -> BlackWhiteReport {
    let mut rep = BlackWhiteReport {
        trees: trace.trees.len(),
        valid: true,
        max_leaves: 0,
        max_black_budget: 0,
        max_size: 0,
        bound_violations: Vec::new(),
    };
    let exp = u32::try_from(trace.beta).unwrap_or(u32::MAX);
    for (i, t) in trace.trees.iter().enumerate() {
        rep.valid &= t.is_black_white();
        let leaves = t.leaves();
        rep.max_leaves = rep.max_leaves.max(leaves);
        rep.max_black_budget = rep.max_black_budget.max(t.black_budget());
        rep.max_size = rep.max_size.max(t.nodes.len());
        let bound = t.alpha.max(1).checked_pow(exp).unwrap_or(usize::MAX);
        if leaves > bound {
            rep.bound_violations.push(i);
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_path_has_one_leaf() {
        let mut t = TraceTree::new(0, 3);
        let a = t.add_child(0, Color::White);
        t.add_child(a, Color::White);
        let rep = branch_accounting(&DpTrace { beta: 0, trees: vec![t] });
        assert!(rep.holds());
        assert_eq!((rep.max_leaves, rep.max_black_budget), (1, 0));
    }

    #[test]
    fn mixed_children_are_rejected() {
        let mut t = TraceTree::new(0, 3);
        t.add_child(0, Color::White);
        t.add_child(0, Color::Black);
        assert!(!branch_accounting(&DpTrace { beta: 2, trees: vec![t] }).valid);
    }

    #[test]
    fn black_fanout_counts_against_the_bound() {
        let mut t = TraceTree::new(0, 2);
        for _ in 0..3 {
            t.add_child(0, Color::Black);
        }
        let rep = branch_accounting(&DpTrace { beta: 1, trees: vec![t.clone()] });
        assert_eq!(rep.bound_violations, vec![0]);
        assert!(branch_accounting(&DpTrace { beta: 2, trees: vec![t] }).holds());
    }
}
