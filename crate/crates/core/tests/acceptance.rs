//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use domclust::baggraph::forced_deletions;
use domclust::decomposition::{is_unbreakable_in, is_unbreakable_set};
use domclust::domination::{min_dominating_set, red_blue_dominating_set_within};
use domclust::dp::dcd::{solve_adcd, BagGraphRecord, SolveOptions};
use domclust::dp::eddc::solve_aeddc;
use domclust::dp::{branch_accounting, DpConfig, DpTrace};
use domclust::gen::{derive_seed, erdos_renyi, random_annotation, rng};
use domclust::graph::named::*;
use domclust::oracle::{brute_dcd, brute_eddc, brute_skeletons, brute_treedepth, OracleBudget, SkeletonKind};
use domclust::semiladder::{semi_ladder_index, verify_semi_ladder, SemiLadderWitness};
use domclust::skeleton::{
    skeleton_candidates, skeletons_via_dominator_guessing, solve_dcd_unbreakable, solve_dcd_via_skeletons,
    solve_eddc_unbreakable, SkeletonRoute,
};
use domclust::{AnnotatedInstance, Graph, VertexSet};
use rand::Rng;

const PROBS: [f64; 3] = [0.15, 0.3, 0.5];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Material gathered by the oracle runs and reused by the structural checks.
#[derive(Default)]
struct Collected {
    traces: Vec<DpTrace>,
    /// Bag graphs with the `q`, `d` and input graph they came from.
    bag_graphs: Vec<(BagGraphRecord, usize, usize, usize)>,
    /// `(bag graph vertices summed over nodes, q, d, n)` per decomposed graph.
    sizes: Vec<(usize, usize, usize, usize)>,
    graphs: Vec<Graph>,
}

fn a1(col: &mut Collected) -> Verdict {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let config = DpConfig { record_trace: true, collect_bag_graphs: true, ..DpConfig::default() };
    let (mut total, mut mismatches, mut cert, mut yes) = (0, Vec::new(), 0, 0);
    let mut i = 0u64;
    for n in 1..=10 {
        for p in PROBS {
            for k in 0..=3 {
                for d in 0..=2 {
                    for _ in 0..4 {
                        let seed = derive_seed(0xA1, i);
                        i += 1;
                        let mut r = rng(seed);
                        let g = erdos_renyi(n, p, &mut r);
                        let inst = random_annotation(&g, k, d, &mut r);
                        let out = solve_adcd(&inst, &SolveOptions { decomposition: None, config: config.clone() }).unwrap();
                        let want = brute_dcd(&inst, &budget).unwrap().is_some();
                        total += 1;
                        yes += usize::from(want);
                        if out.verdict != want {
                            mismatches.push(seed);
                        }
                        cert += usize::from(out.certificate_error.is_some());
                        col.sizes.push((out.stats.bag_graph_vertices, out.q, d, n));
                        col.traces.extend(out.trace);
                        let gi = col.graphs.len();
                        col.graphs.push(inst.graph.clone());
                        col.bag_graphs.extend(out.bag_graphs.into_iter().map(|b| (b, out.q, d, gi)));
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    verdict(
        total >= 500 && mismatches.is_empty() && cert == 0 && t < Duration::from_secs(600),
        format!("{total} instances ({yes} yes), {} mismatches {:?}, {cert} bad certificates, {:.1}s", mismatches.len(), mismatches, t.as_secs_f64()),
    )
}

fn a2(col: &mut Collected) -> Verdict {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let config = DpConfig { record_trace: true, ..DpConfig::default() };
    let (mut total, mut mismatches, mut cert, mut yes) = (0, Vec::new(), 0, 0);
    let mut i = 0u64;
    for n in 1..=9 {
        for p in PROBS {
            for k in 0..=3 {
                for d in 0..=1 {
                    for _ in 0..4 {
                        let seed = derive_seed(0xA2, i);
                        i += 1;
                        let mut r = rng(seed);
                        let g = erdos_renyi(n, p, &mut r);
                        let inst = random_annotation(&g, k, d, &mut r);
                        let out = solve_aeddc(&inst, &SolveOptions { decomposition: None, config: config.clone() }).unwrap();
                        let want = brute_eddc(&inst, &budget).unwrap().is_some();
                        total += 1;
                        yes += usize::from(want);
                        if out.verdict != want {
                            mismatches.push(seed);
                        }
                        cert += usize::from(out.certificate_error.is_some());
                        col.traces.extend(out.trace);
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    verdict(
        total >= 300 && mismatches.is_empty() && cert == 0 && t < Duration::from_secs(900),
        format!("{total} instances ({yes} yes), {} mismatches {:?}, {cert} bad certificates, {:.1}s", mismatches.len(), mismatches, t.as_secs_f64()),
    )
}

/// `(graph, q, k)` with `V(G)` verified `(q, k)`-unbreakable.
fn unbreakable_corpus() -> Vec<(Graph, usize, usize)> {
    let mut out = Vec::new();
    let mut r = rng(0xA3);
    for n in 3..=9 {
        for p in [0.4, 0.6, 0.8] {
            for _ in 0..3 {
                let g = erdos_renyi(n, p, &mut r);
                for k in 1..=2 {
                    // Smallest q that works, and one more.
                    if let Some(q) = (1..=n).find(|&q| is_unbreakable_set(&g, &g.vertices(), q, k).holds) {
                        out.push((g.clone(), q, k));
                        if q < n {
                            out.push((g.clone(), q + 1, k));
                        }
                    }
                }
            }
        }
    }
    for n in 4..=8 {
        for k in 1..=2 {
            out.push((clique(n), 1, k));
            out.push((cycle(n), 2 + k, k));
        }
    }
    out
}

fn a3(corpus: &[(Graph, usize, usize)]) -> Verdict {
    let budget = OracleBudget::default();
    let (mut checks, mut bad) = (0, Vec::new());
    for (idx, (g, q, k)) in corpus.iter().enumerate() {
        for d in 0..=2 {
            let inst = AnnotatedInstance::plain(g.clone(), *k, d);
            let want = brute_dcd(&inst, &budget).unwrap().is_some();
            let got = solve_dcd_unbreakable(g, *q, *k, d).is_some();
            let guess = solve_dcd_via_skeletons(g, *q, *k, d, SkeletonRoute::DominatorGuessing).is_some();
            checks += 2;
            if got != want || guess != want {
                bad.push(format!("dcd #{idx} d={d}"));
            }
            if d <= 1 {
                let want = brute_eddc(&inst, &budget).unwrap().is_some();
                let got = solve_eddc_unbreakable(g, *q, *k, d).is_some();
                checks += 1;
                if got != want {
                    bad.push(format!("eddc #{idx} d={d}"));
                }
            }
        }
    }
    verdict(bad.is_empty(), format!("{} unbreakable graphs, {checks} comparisons, {} mismatches {:?}", corpus.len(), bad.len(), bad))
}

fn a4(corpus: &[(Graph, usize, usize)]) -> Verdict {
    let budget = OracleBudget::default();
    let (mut positive, mut skeletons, mut bad) = (0, 0, Vec::new());
    for (idx, (g, q, k)) in corpus.iter().enumerate() {
        for d in 0..=2 {
            if brute_dcd(&AnnotatedInstance::plain(g.clone(), *k, d), &budget).unwrap().is_none() {
                continue;
            }
            positive += 1;
            let brute = brute_skeletons(g, *q, *k, d, SkeletonKind::Deletion, &budget).unwrap();
            skeletons += brute.len();
            let cands = skeleton_candidates(g, *q, *k, d);
            if !brute.is_subset(&cands) {
                bad.push(format!("branching #{idx} d={d}"));
            }
            let s2s: Vec<VertexSet> = skeletons_via_dominator_guessing(g, *q, *k, d).into_iter().map(|p| p.1).collect();
            if !brute.iter().all(|s| s2s.iter().any(|s2| s.is_subset(s2))) {
                bad.push(format!("guessing #{idx} d={d}"));
            }
        }
    }
    verdict(bad.is_empty(), format!("{positive} positive instances, {skeletons} brute skeletons, {} violations {:?}", bad.len(), bad))
}

fn a5() -> Verdict {
    let mut bad = Vec::new();
    for n in 1..=6 {
        if semi_ladder_index(&clique(n), 10).index != 0 {
            bad.push(format!("K{n}"));
        }
        if n >= 2 && semi_ladder_index(&edgeless(n), 10).index != 1 {
            bad.push(format!("edgeless {n}"));
        }
    }
    for n in 1..=5 {
        if semi_ladder_index(&crown(n), 10).index != n {
            bad.push(format!("crown {n}"));
        }
    }
    let fig = Graph::new(8, &[(1, 4), (2, 4), (2, 5), (3, 4), (3, 5), (3, 6)]).unwrap();
    let w = SemiLadderWitness { a: vec![0, 1, 2, 3], b: vec![4, 5, 6, 7] };
    if verify_semi_ladder(&fig, &w) != Ok(true) || semi_ladder_index(&fig, 10).index < 4 {
        bad.push("figure graph".into());
    }
    verdict(bad.is_empty(), format!("cliques, edgeless graphs, crowns and the 8-vertex witness; failures {:?}", bad))
}

fn a6(col: &Collected) -> Verdict {
    let mut ladder = vec![None; col.graphs.len()];
    let mut seen = HashSet::new();
    let (mut checked, mut worst, mut bad) = (0, 0i64, 0);
    for (rec, q, _, gi) in &col.bag_graphs {
        let (h, _) = rec.graph.compact();
        let l = *ladder[*gi].get_or_insert_with(|| semi_ladder_index(&col.graphs[*gi], 12).index);
        if !seen.insert((h.clone(), *q, l)) {
            continue;
        }
        checked += 1;
        let got = semi_ladder_index(&h, q + l + 5).index;
        worst = worst.max(got as i64 - (q + l) as i64);
        if got > q + l + 4 {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("{checked} distinct bag graphs, largest index - (q + l) = {worst}, {bad} violations"))
}

fn a7(col: &Collected) -> Verdict {
    let mut bad = 0;
    let mut ratio: f64 = 0.0;
    for &(total, q, d, n) in &col.sizes {
        // A decomposition certified for q = 0 is also one for q = 1.
        let bound = (4 * d + 5) * q.max(1) * n;
        if total > bound {
            bad += 1;
        }
        if bound > 0 {
            ratio = ratio.max(total as f64 / bound as f64);
        }
    }
    verdict(bad == 0, format!("{} decomposed graphs, max sum/bound = {ratio:.3}, {bad} violations", col.sizes.len()))
}

fn a8(col: &Collected) -> Verdict {
    let (mut trees, mut invalid, mut over, mut leaves) = (0, 0, 0, 0);
    for t in &col.traces {
        let rep = branch_accounting(t);
        trees += rep.trees;
        invalid += usize::from(!rep.valid);
        over += rep.bound_violations.len();
        leaves = leaves.max(rep.max_leaves);
    }
    verdict(
        invalid == 0 && over == 0,
        format!("{} traces, {trees} branching trees, max leaves {leaves}, {invalid} invalid, {over} over alpha^beta", col.traces.len()),
    )
}

fn a9() -> Verdict {
    let budget = OracleBudget { max_vertices: 64, ..OracleBudget::default() };
    let mut r = rng(0xA9);
    let (mut count, mut bad) = (0, Vec::new());
    let mut graphs = vec![path(2), clique(3), cycle(5), star(4), clique(4)];
    while graphs.len() < 40 {
        let n = r.gen_range(2..=7);
        let g = erdos_renyi(n, 0.45, &mut r);
        if g.is_connected_within(&g.vertices()) && g.n() + 2 * g.m() <= 24 {
            graphs.push(g);
        }
    }
    for g in &graphs {
        let h = g.double_subdivide().unwrap();
        let (a, _) = brute_treedepth(g, &budget).unwrap();
        let (b, _) = brute_treedepth(&h, &budget).unwrap();
        count += 1;
        if b != a + 1 || h.stats().degeneracy != 2 {
            bad.push(format!("n={} m={}: {a} -> {b}, degeneracy {}", g.n(), g.m(), h.stats().degeneracy));
        }
    }
    verdict(bad.is_empty(), format!("{count} connected graphs, {} failures {:?}", bad.len(), bad))
}

fn a10() -> Verdict {
    let mut r = rng(0xA10);
    let (mut pairs, mut checks, mut bad, mut tries) = (0, 0, 0, 0);
    while pairs < 200 && tries < 100_000 {
        tries += 1;
        let n = r.gen_range(3..=9);
        let g = erdos_renyi(n, r.gen_range(0.3..0.9), &mut r);
        let x: VertexSet = (0..n).filter(|_| r.gen_bool(0.7)).collect();
        let k = r.gen_range(1..=3);
        let q = r.gen_range(1..=4);
        if x.len() <= q || !is_unbreakable_set(&g, &x, q, k).holds {
            continue;
        }
        pairs += 1;
        for v in 0..n {
            let mut alive = g.vertices();
            alive.remove(v);
            let mut xv = x;
            xv.remove(v);
            checks += 1;
            if !is_unbreakable_in(&g, &alive, &xv, q, k - 1).holds {
                bad += 1;
            }
        }
    }
    verdict(pairs >= 200 && bad == 0, format!("{pairs} pairs, {checks} vertex removals, {bad} violations"))
}

/// A red-blue dominating set of the whole bag graph: the solution's
/// dominators plus one blue neighbour per deleted red vertex.
fn bag_dominators(rec: &BagGraphRecord) -> Option<VertexSet> {
    let sol = rec.solution.as_ref()?;
    let g = &rec.graph.graph;
    let mut dom = sol.dominators.iter().fold(VertexSet::new(), |acc, (_, d)| acc.union(d));
    for v in &sol.deleted.intersection(&rec.colors.red) {
        if !g.closed_neighborhood(&dom).contains(v) {
            let b = g.closed_neighborhood(&VertexSet::singleton(v)).intersection(&rec.colors.blue).intersection(&rec.graph.vertices());
            dom.insert(b.first()?);
        }
    }
    Some(dom)
}

fn a11(corpus: &[(Graph, usize, usize)], col: &Collected) -> Verdict {
    let budget = OracleBudget::default();
    let (mut positive, mut bad_gamma, mut small) = (0, Vec::new(), 0);
    for (idx, (g, q, k)) in corpus.iter().enumerate() {
        for d in 0..=2 {
            if brute_dcd(&AnnotatedInstance::plain(g.clone(), *k, d), &budget).unwrap().is_none() {
                continue;
            }
            if g.n() < 2 * q + 1 {
                small += 1;
                continue;
            }
            positive += 1;
            if min_dominating_set(g, q + d).is_none() {
                bad_gamma.push(format!("#{idx} d={d}"));
            }
        }
    }
    let (mut bags, mut excluded, mut bad_bag) = (0, 0, 0);
    for (rec, q, d, _) in &col.bag_graphs {
        if rec.solution.is_none() {
            continue;
        }
        let limit = 3 * (*q).max(1) * d;
        if *d == 0 || !forced_deletions(&rec.graph, &rec.colors).is_empty() {
            excluded += 1;
            continue;
        }
        bags += 1;
        let ok = match bag_dominators(rec) {
            Some(dom) if dom.len() <= limit => true,
            _ => red_blue_dominating_set_within(&rec.graph.graph, &rec.graph.vertices(), &rec.colors.red, &rec.colors.blue, limit).is_some(),
        };
        if !ok {
            bad_bag += 1;
        }
    }
    verdict(
        bad_gamma.is_empty() && bad_bag == 0,
        format!(
            "{positive} positive unbreakable instances with n >= 2q+1 ({small} smaller skipped), gamma > q+d: {:?}; {bags} positive bag graphs ({excluded} with d = 0 or forced deletions skipped), {bad_bag} without a 3qd red-blue dominating set",
            bad_gamma
        ),
    )
}

fn main() {
    let mut col = Collected::default();
    let start = Instant::now();
    let mut results: Vec<(&str, Verdict)> = Vec::new();
    results.push(("A1", a1(&mut col)));
    results.push(("A2", a2(&mut col)));
    let corpus = unbreakable_corpus();
    results.push(("A3", a3(&corpus)));
    results.push(("A4", a4(&corpus)));
    results.push(("A5", a5()));
    results.push(("A6", a6(&col)));
    results.push(("A7", a7(&col)));
    results.push(("A8", a8(&col)));
    results.push(("A9", a9()));
    results.push(("A10", a10()));
    results.push(("A11", a11(&corpus, &col)));
    let mut failed = 0;
    for (name, v) in &results {
        println!("{name} {} {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of {} criteria pass ({:.1}s)", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
