//! JSON rendering. Vertex ids are 1-based, as in the input formats.

use domclust::dp::{branch_accounting, DpTrace};
use domclust::etree::EliminationTree;
use domclust::VertexSet;
use serde_json::{json, Value};
use std::io::Write;

pub const SCHEMA: u64 = 1;

pub fn ids(s: &VertexSet) -> Vec<usize> {
    s.iter().map(|v| v + 1).collect()
}

pub fn dominators(list: &[(VertexSet, VertexSet)]) -> Value {
    Value::Array(
        list.iter()
            .map(|(c, d)| json!({ "component": ids(c), "dominators": ids(d) }))
            .collect(),
    )
}

pub fn union_of_dominators(list: &[(VertexSet, VertexSet)]) -> VertexSet {
    list.iter().fold(VertexSet::new(), |acc, (_, d)| acc.union(d))
}

/// Nodes as `(vertex, parent vertex)` pairs.
pub fn elimination_tree(t: &EliminationTree) -> Value {
    let vs = t.vertices();
    Value::Array(
        vs.iter()
            .zip(t.parents())
            .map(|(&v, p)| json!({ "vertex": v + 1, "parent": p.map(|p| vs[p] + 1) }))
            .collect(),
    )
}

pub fn trace(t: &DpTrace) -> Value {
    let rep = branch_accounting(t);
    json!({
        "beta": t.beta,
        "trees": rep.trees,
        "black_white": rep.valid,
        "max_leaves": rep.max_leaves,
        "max_black_budget": rep.max_black_budget,
        "max_size": rep.max_size,
        "bound_violations": rep.bound_violations,
        "per_tree": t.trees.iter().map(|tr| json!({
            "node": tr.node + 1,
            "alpha": tr.alpha,
            "size": tr.nodes.len(),
            "leaves": tr.leaves(),
        })).collect::<Vec<_>>(),
    })
}

/// Writes `v` to standard output. A closed pipe is not an error.
pub fn print(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("json values serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// Plain-text counterpart of [`print`].
pub fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}
