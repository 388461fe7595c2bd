//! Rooted forests labelled by deleted vertices, used as certificates for
//! recursive deletion.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EliminationTreeError {
    #[error("vertex {0} labels more than one node")]
    RepeatedVertex(usize),
    #[error("vertex {0} is not in the graph")]
    VertexOutOfRange(usize),
    #[error("node {0} has an invalid parent")]
    BadParent(usize),
    #[error("parent pointers contain a cycle")]
    Cycle,
}

/// A forest whose node `i` is labelled by `vertices[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EliminationTree {
    vertices: Vec<usize>,
    parent: Vec<Option<usize>>,
}

impl EliminationTree {
    pub fn empty() -> Self {
        EliminationTree { vertices: Vec::new(), parent: Vec::new() }
    }

    pub fn new(vertices: Vec<usize>, parent: Vec<Option<usize>>) -> Result<Self, EliminationTreeError> {
        if vertices.len() != parent.len() {
            return Err(EliminationTreeError::BadParent(vertices.len().min(parent.len())));
        }
        let mut seen = VertexSet::new();
        for &v in &vertices {
            if v >= crate::graph::MAX_VERTICES {
                return Err(EliminationTreeError::VertexOutOfRange(v));
            }
            if !seen.insert(v) {
                return Err(EliminationTreeError::RepeatedVertex(v));
            }
        }
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= parent.len() || p == i {
                    return Err(EliminationTreeError::BadParent(i));
                }
            }
        }
        let t = EliminationTree { vertices, parent };
        for i in 0..t.len() {
            let mut steps = 0;
            let mut cur = Some(i);
            while let Some(c) = cur {
                steps += 1;
                if steps > t.len() {
                    return Err(EliminationTreeError::Cycle);
                }
                cur = t.parent[c];
            }
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices.iter().copied().collect()
    }

    pub fn node_of(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    /// Number of nodes on the longest root-to-leaf path (0 for the empty forest).
    pub fn depth(&self) -> usize {
        (0..self.len()).map(|i| self.ancestors(i).len()).max().unwrap_or(0)
    }

    /// Nodes on the path from `i` to its root, `i` included.
    pub fn ancestors(&self, i: usize) -> Vec<usize> {
        let mut out = vec![i];
        let mut cur = self.parent[i];
        while let Some(c) = cur {
            out.push(c);
            cur = self.parent[c];
        }
        out
    }

    /// Whether every path of `g` between two labelled vertices passes through
    /// a vertex labelling a common ancestor of their nodes.
    pub fn is_tree_structured(&self, g: &Graph) -> Result<bool, EliminationTreeError> {
        for &v in &self.vertices {
            if v >= g.n() {
                return Err(EliminationTreeError::VertexOutOfRange(v));
            }
        }
        let anc: Vec<Vec<usize>> = (0..self.len()).map(|i| self.ancestors(i)).collect();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if anc[i].contains(&j) || anc[j].contains(&i) {
                    continue;
                }
                let common: VertexSet = anc[i]
                    .iter()
                    .filter(|a| anc[j].contains(a))
                    .map(|&a| self.vertices[a])
                    .collect();
                let alive = g.vertices().difference(&common);
                if g.component_of(&alive, self.vertices[i]).contains(self.vertices[j]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Builds a forest from layers `L^1, L^2, ..` in which two vertices of
    /// the same layer are always separated by lower layers. The parent of a
    /// layer-`i` vertex is the unique layer-`j` vertex (largest `j < i`) in
    /// its component of `G - L^{<j}`.
    pub fn from_layers(g: &Graph, layers: &[VertexSet]) -> EliminationTree {
        let mut vertices = Vec::new();
        let mut layer_of = Vec::new();
        for (i, l) in layers.iter().enumerate() {
            for v in l {
                vertices.push(v);
                layer_of.push(i);
            }
        }
        let mut parent = vec![None; vertices.len()];
        let mut below = vec![VertexSet::new(); layers.len() + 1];
        for i in 0..layers.len() {
            below[i + 1] = below[i].union(&layers[i]);
        }
        for (idx, &v) in vertices.iter().enumerate() {
            let li = layer_of[idx];
            for j in (0..li).rev() {
                let alive = g.vertices().difference(&below[j]);
                let comp = g.component_of(&alive, v);
                if let Some(u) = comp.intersection(&layers[j]).first() {
                    parent[idx] = vertices.iter().position(|&x| x == u);
                    break;
                }
            }
        }
        EliminationTree { vertices, parent }
    }
}
