use domclust::decomposition::{
    build_decomposition, check_axioms, is_regular, make_regular, validate_decomposition, DecompositionReport,
    TreeDecomposition, is_unbreakable_set,
};
use domclust::domination::annotated_partial_domination;
use domclust::dp::verify_dcd_certificate;
use domclust::etree::EliminationTree;
use domclust::gen::{erdos_renyi, random_annotation, rng};
use domclust::oracle::{brute_dcd, brute_eddc, OracleBudget};
use domclust::semiladder::{semi_ladder_index, verify_semi_ladder};
use domclust::skeleton::{skeleton_candidates, solve_dcd_unbreakable, solve_eddc_unbreakable};
use domclust::{AnnotatedInstance, Annotations, Graph, VertexSet};
use proptest::prelude::*;

fn graph(n: usize, p: f64, seed: u64) -> Graph {
    erdos_renyi(n, p, &mut rng(seed))
}

fn annotated(n: usize, p: f64, k: usize, d: usize, seed: u64) -> AnnotatedInstance {
    let mut r = rng(seed);
    let g = erdos_renyi(n, p, &mut r);
    random_annotation(&g, k, d, &mut r)
}

/// `g - v` with vertices above `v` shifted down.
fn delete_vertex(g: &Graph, v: usize) -> Graph {
    let edges: Vec<(usize, usize)> = g
        .edges()
        .into_iter()
        .filter(|&(a, b)| a != v && b != v)
        .map(|(a, b)| (a - usize::from(a > v), b - usize::from(b > v)))
        .collect();
    Graph::new(g.n() - 1, &edges).unwrap()
}

fn apd_naive(inst: &AnnotatedInstance) -> bool {
    let g = &inst.graph;
    let deletable = g.vertices().difference(&inst.forbidden);
    deletable.subsets_up_to(inst.k).any(|x| {
        let need = inst.red.difference(&x);
        inst.blue.subsets_up_to(inst.d).any(|dd| need.is_subset(&g.closed_neighborhood(&dd)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn components_partition_the_remaining_vertices(n in 1usize..=14, p in 0.0f64..0.6, seed in any::<u64>(), rm in any::<u16>()) {
        let g = graph(n, p, seed);
        let removed: VertexSet = (0..n).filter(|v| rm >> (v % 16) & 1 == 1).collect();
        let comps = g.connected_components(&removed);
        let mut seen = VertexSet::new();
        for c in &comps {
            prop_assert!(c.is_disjoint(&seen));
            prop_assert!(g.is_connected_within(c));
            let outside = g.vertices().difference(&removed).difference(c);
            prop_assert!(!g.open_neighborhood(c).intersects(&outside));
            seen = seen.union(c);
        }
        prop_assert_eq!(seen, g.vertices().difference(&removed));
    }

    #[test]
    fn text_formats_round_trip(n in 1usize..=20, p in 0.0f64..0.7, seed in any::<u64>()) {
        let inst = annotated(n, p, 1, 1, seed);
        let text = inst.graph.to_text();
        let back = Graph::parse(&text).unwrap();
        prop_assert_eq!(&back, &inst.graph);
        prop_assert_eq!(back.to_text(), text);
        let ann = Annotations { forbidden: inst.forbidden, red: inst.red, blue: inst.blue };
        prop_assert_eq!(Annotations::parse(&ann.to_text(), n).unwrap(), ann);
    }

    #[test]
    fn double_subdivision_has_degeneracy_two(n in 2usize..=10, p in 0.05f64..0.8, seed in any::<u64>()) {
        let g = graph(n, p, seed);
        let h = g.double_subdivide().unwrap();
        prop_assert_eq!((h.n(), h.m()), (n + 2 * g.m(), 4 * g.m()));
        if g.m() > 0 {
            prop_assert_eq!(h.stats().degeneracy, 2);
        }
    }

    #[test]
    fn semi_ladder_index_is_monotone(n in 2usize..=8, p in 0.1f64..0.9, seed in any::<u64>()) {
        let g = graph(n, p, seed);
        let full = semi_ladder_index(&g, 10);
        prop_assert!(full.exact);
        prop_assert_eq!(verify_semi_ladder(&g, &full.witness), Ok(true));
        prop_assert_eq!(full.witness.order(), full.index);
        for v in 0..n {
            prop_assert!(semi_ladder_index(&delete_vertex(&g, v), 10).index <= full.index);
        }
    }

    #[test]
    fn partial_domination_matches_naive_enumeration(n in 1usize..=10, p in 0.1f64..0.6, k in 0usize..=3, d in 0usize..=2, seed in any::<u64>()) {
        let inst = annotated(n, p, k, d, seed);
        let got = annotated_partial_domination(&inst);
        prop_assert_eq!(got.is_some(), apd_naive(&inst));
        if let Some(s) = &got {
            prop_assert!(s.deleted.len() <= k && s.dominators.len() <= d);
            prop_assert!(s.deleted.is_disjoint(&inst.forbidden) && s.dominators.is_subset(&inst.blue));
            prop_assert!(inst.red.difference(&s.deleted).is_subset(&inst.graph.closed_neighborhood(&s.dominators)));
            // Larger budgets stay feasible.
            let more_k = AnnotatedInstance { k: k + 1, ..inst.clone() };
            let more_d = AnnotatedInstance { d: d + 1, ..inst.clone() };
            prop_assert!(annotated_partial_domination(&more_k).is_some());
            prop_assert!(annotated_partial_domination(&more_d).is_some());
        }
    }

    #[test]
    fn built_decompositions_validate(n in 1usize..=10, p in 0.1f64..0.6, k in 0usize..=2, seed in any::<u64>()) {
        let g = graph(n, p, seed);
        let (td, q) = build_decomposition(&g, k);
        prop_assert_eq!(validate_decomposition(&g, &td, q, k), DecompositionReport::Valid);
        prop_assert!(is_regular(&g, &td));
        for x in 0..td.len() {
            prop_assert!(td.adhesion(x).is_subset(&td.bag(x)));
            let below = td.children(x).iter().fold(td.bag(x), |acc, &y| acc.union(&td.cone(y)));
            prop_assert_eq!(td.cone(x), below);
            prop_assert_eq!(td.component(x).union(&td.adhesion(x)), td.cone(x));
            prop_assert_eq!(td.margin(x).union(&td.adhesion(x)), td.bag(x));
        }
        let back = TreeDecomposition::parse(&td.to_text(), n).unwrap();
        prop_assert_eq!(back.to_text(), td.to_text());
    }

    #[test]
    fn regularization_is_idempotent(n in 2usize..=10, p in 0.1f64..0.6, seed in any::<u64>(), cut in 1usize..10) {
        // A path decomposition over vertex order, usually irregular.
        let g = graph(n, p, seed);
        let cut = cut.min(n - 1);
        let first: VertexSet = (0..=cut).collect();
        let all = g.vertices();
        let td = TreeDecomposition::new(vec![None, Some(0)], vec![all, first]).unwrap();
        prop_assert!(check_axioms(&g, &td).is_ok());
        let r = make_regular(&g, &td);
        prop_assert!(check_axioms(&g, &r).is_ok());
        prop_assert!(is_regular(&g, &r));
        prop_assert_eq!(make_regular(&g, &r), r);
    }

    #[test]
    fn deletion_solutions_give_shallow_eliminations(n in 1usize..=8, p in 0.1f64..0.6, k in 0usize..=2, d in 0usize..=1, seed in any::<u64>()) {
        let inst = annotated(n, p, k, d, seed);
        let budget = OracleBudget::default();
        if let Some(w) = brute_dcd(&inst, &budget).unwrap() {
            prop_assert!(brute_eddc(&inst, &budget).unwrap().is_some());
            // The deleted set as a chain.
            let layers: Vec<VertexSet> = w.deleted.iter().map(VertexSet::singleton).collect();
            let t = EliminationTree::from_layers(&inst.graph, &layers);
            prop_assert!(t.depth() <= k);
            prop_assert_eq!(t.is_tree_structured(&inst.graph), Ok(true));
        }
    }

    #[test]
    fn unbreakable_solutions_are_certified(n in 3usize..=9, p in 0.4f64..0.9, k in 1usize..=2, d in 0usize..=2, seed in any::<u64>()) {
        let g = graph(n, p, seed);
        let Some(q) = (1..=n).find(|&q| is_unbreakable_set(&g, &g.vertices(), q, k).holds) else {
            return Ok(());
        };
        let inst = AnnotatedInstance::plain(g.clone(), k, d);
        if let Some(s) = solve_dcd_unbreakable(&g, q, k, d) {
            let dom = s.dominators.iter().fold(VertexSet::new(), |a, (_, x)| a.union(x));
            prop_assert!(verify_dcd_certificate(&inst, &s.deleted, &dom).is_ok());
            // The skeleton of the returned solution is among the candidates.
            let rest = g.vertices().difference(&s.deleted);
            let large: Vec<VertexSet> = g.components(&rest).into_iter().filter(|c| c.len() > q).collect();
            if large.len() == 1 && n > 2 * q {
                let near = g.closed_neighborhood(&large[0]);
                let skeleton: VertexSet = s.deleted.iter()
                    .filter(|&v| g.neighbors(v).intersects(&large[0]) && !g.neighbors(v).is_subset(&near))
                    .collect();
                prop_assert!(skeleton_candidates(&g, q, k, d).contains(&skeleton), "skeleton {:?}", skeleton);
            }
        }
        if d <= 1 {
            if let Some(s) = solve_eddc_unbreakable(&g, q, k, d) {
                prop_assert!(s.tree.depth() <= k);
                prop_assert_eq!(s.tree.is_tree_structured(&g), Ok(true));
            }
        }
    }
}
