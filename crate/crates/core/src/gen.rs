//! Seeded graph and instance generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::{named, AnnotatedInstance, Graph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Family {
    ErdosRenyi { p: f64 },
    Path,
    Cycle,
    Clique,
    HalfGraph,
    SubdividedClique,
    /// Double subdivision of an Erdős–Rényi graph.
    DoubleSubdivision { p: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::ErdosRenyi { .. } => "er",
            Family::Path => "path",
            Family::Cycle => "cycle",
            Family::Clique => "clique",
            Family::HalfGraph => "half-graph",
            Family::SubdividedClique => "subdivided-clique",
            Family::DoubleSubdivision { .. } => "double-subdivision",
        }
    }

    pub fn from_name(name: &str, p: f64) -> Option<Family> {
        Some(match name {
            "er" => Family::ErdosRenyi { p },
            "path" => Family::Path,
            "cycle" => Family::Cycle,
            "clique" => Family::Clique,
            "half-graph" => Family::HalfGraph,
            "subdivided-clique" => Family::SubdividedClique,
            "double-subdivision" => Family::DoubleSubdivision { p },
            _ => return None,
        })
    }
}

/// Mixes a master seed with a stream index (splitmix64 finaliser), so that
/// instance `i` of a run does not depend on how many draws earlier
/// instances made.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::empty(n).expect("size within limit");
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// A member of `family` with parameter `n` (for half graphs, `2n` vertices).
pub fn generate(family: Family, n: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    match family {
        Family::ErdosRenyi { p } => erdos_renyi(n, p, &mut r),
        Family::Path => named::path(n),
        Family::Cycle => named::cycle(n),
        Family::Clique => named::clique(n),
        Family::HalfGraph => named::half_graph(n),
        Family::SubdividedClique => named::subdivided_clique(n),
        Family::DoubleSubdivision { p } => erdos_renyi(n, p, &mut r).double_subdivide().expect("size within limit"),
    }
}

/// Random forbidden/red/blue annotation of `g`.
pub fn random_annotation(g: &Graph, k: usize, d: usize, rng: &mut impl Rng) -> AnnotatedInstance {
    let mut f = VertexSet::new();
    let mut red = VertexSet::new();
    let mut blue = VertexSet::new();
    for v in 0..g.n() {
        if rng.gen_bool(0.2) {
            f.insert(v);
        }
        if rng.gen_bool(0.75) {
            red.insert(v);
        }
        if rng.gen_bool(0.75) {
            blue.insert(v);
        }
    }
    AnnotatedInstance { graph: g.clone(), forbidden: f, red, blue, k, d }
}
