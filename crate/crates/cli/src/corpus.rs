//! Corpus runs (solver against oracle over a generated grid) and timing
//! benchmarks.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;
use serde_json::{json, Value};

use domclust::dp::dcd::{solve_adcd, SolveOptions};
use domclust::dp::eddc::solve_aeddc;
use domclust::dp::{branch_accounting, DpConfig, DpStats, Fault};
use domclust::gen::{derive_seed, generate, random_annotation, rng, Family};
use domclust::oracle::{brute_dcd, brute_eddc, OracleBudget};
use domclust::{AnnotatedInstance, Annotations, Graph, VertexSet};

use crate::report::SCHEMA;
use crate::{oracle_budget, read_input, Problem};

#[derive(Args)]
pub struct CorpusArgs {
    /// TOML grid description. Without one the default desk corpus runs.
    config: Option<PathBuf>,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    threads: Option<usize>,
    /// Include per-instance wall time.
    #[arg(long)]
    timing: bool,
    /// Omit the per-instance records.
    #[arg(long)]
    summary_only: bool,
    /// Run with the deletion consistency check disabled (mutation test).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn default_problems() -> Vec<Problem> {
    vec![Problem::Dcd, Problem::Eddc]
}

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

fn default_p() -> Vec<f64> {
    vec![0.3]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default)]
    seed: u64,
    #[serde(default = "yes")]
    oracle: bool,
    #[serde(default = "default_problems")]
    problems: Vec<Problem>,
    #[serde(default)]
    family: Vec<FamilySpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilySpec {
    name: String,
    #[serde(default = "default_p")]
    p: Vec<f64>,
    /// Inclusive size range.
    n: [usize; 2],
    k: Vec<usize>,
    d: Vec<usize>,
    #[serde(default = "one")]
    count: usize,
    /// Random forbidden/red/blue annotations instead of the plain colouring.
    #[serde(default = "yes")]
    annotate: bool,
}

impl Config {
    fn desk() -> Config {
        Config {
            seed: 1,
            oracle: true,
            problems: default_problems(),
            family: vec![FamilySpec {
                name: "er".into(),
                p: vec![0.15, 0.3, 0.5],
                n: [1, 9],
                k: vec![0, 1, 2],
                d: vec![0, 1],
                count: 2,
                annotate: true,
            }],
        }
    }
}

struct Item {
    id: usize,
    problem: Problem,
    family: &'static str,
    p: f64,
    seed: u64,
    inst: AnnotatedInstance,
}

fn expand(cfg: &Config) -> Result<Vec<Item>> {
    let mut items = Vec::new();
    for &problem in &cfg.problems {
        if problem == Problem::Apd {
            bail!("corpus problems are dcd and eddc");
        }
    }
    for spec in &cfg.family {
        for &p in &spec.p {
            let Some(family) = Family::from_name(&spec.name, p) else {
                bail!("unknown family `{}`", spec.name);
            };
            if !(0.0..=1.0).contains(&p) {
                bail!("edge probability {p} outside [0, 1]");
            }
            for n in spec.n[0]..=spec.n[1] {
                if n > 16 {
                    bail!("corpus sizes are limited to n <= 16");
                }
                for &k in &spec.k {
                    for &d in &spec.d {
                        for _ in 0..spec.count {
                            let seed = derive_seed(cfg.seed, items.len() as u64 / cfg.problems.len().max(1) as u64);
                            let g = generate(family, n, seed);
                            let inst = if spec.annotate {
                                random_annotation(&g, k, d, &mut rng(derive_seed(seed, 1)))
                            } else {
                                AnnotatedInstance::plain(g, k, d)
                            };
                            for &problem in &cfg.problems {
                                items.push(Item { id: items.len(), problem, family: family.name(), p, seed, inst: inst.clone() });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(items)
}

pub(crate) struct RunResult {
    pub verdict: bool,
    pub certificate_error: Option<String>,
    pub stats: DpStats,
    pub trace: Option<domclust::dp::DpTrace>,
}

pub(crate) fn run_solver(problem: Problem, inst: &AnnotatedInstance, config: &DpConfig) -> Result<RunResult> {
    let opts = SolveOptions { decomposition: None, config: config.clone() };
    Ok(match problem {
        Problem::Dcd => {
            let r = solve_adcd(inst, &opts)?;
            RunResult { verdict: r.verdict, certificate_error: r.certificate_error, stats: r.stats, trace: r.trace }
        }
        Problem::Eddc => {
            let r = solve_aeddc(inst, &opts)?;
            RunResult { verdict: r.verdict, certificate_error: r.certificate_error, stats: r.stats, trace: r.trace }
        }
        Problem::Apd => bail!("apd has no decomposition solver"),
    })
}

fn run_oracle(problem: Problem, inst: &AnnotatedInstance, budget: &OracleBudget) -> Option<bool> {
    match problem {
        Problem::Dcd => brute_dcd(inst, budget).ok().map(|w| w.is_some()),
        Problem::Eddc => brute_eddc(inst, budget).ok().map(|w| w.is_some()),
        Problem::Apd => None,
    }
}

/// True when the solver and the oracle disagree or the certificate fails.
fn fails(problem: Problem, inst: &AnnotatedInstance, config: &DpConfig, budget: &OracleBudget, oracle: bool) -> bool {
    match run_solver(problem, inst, config) {
        Err(_) => true,
        Ok(r) => r.certificate_error.is_some() || (oracle && run_oracle(problem, inst, budget).is_some_and(|o| o != r.verdict)),
    }
}

/// Induced subinstance on `keep`, with vertices renumbered in order.
fn restrict(inst: &AnnotatedInstance, keep: &VertexSet) -> AnnotatedInstance {
    let order = keep.to_vec();
    let mut pos = vec![usize::MAX; inst.graph.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let edges: Vec<(usize, usize)> = inst
        .graph
        .edges()
        .into_iter()
        .filter(|&(u, v)| keep.contains(u) && keep.contains(v))
        .map(|(u, v)| (pos[u], pos[v]))
        .collect();
    let g = Graph::new(order.len(), &edges).expect("induced subgraph is simple");
    let map = |s: &VertexSet| -> VertexSet { s.intersection(keep).iter().map(|v| pos[v]).collect() };
    AnnotatedInstance { graph: g, forbidden: map(&inst.forbidden), red: map(&inst.red), blue: map(&inst.blue), k: inst.k, d: inst.d }
}

/// Greedily drops vertices while the failure persists.
fn shrink(problem: Problem, inst: &AnnotatedInstance, config: &DpConfig, budget: &OracleBudget, oracle: bool) -> AnnotatedInstance {
    let mut cur = inst.clone();
    loop {
        let smaller = (0..cur.graph.n()).find_map(|v| {
            let mut keep = cur.graph.vertices();
            keep.remove(v);
            let cand = restrict(&cur, &keep);
            fails(problem, &cand, config, budget, oracle).then_some(cand)
        });
        match smaller {
            Some(c) => cur = c,
            None => return cur,
        }
    }
}

fn instance_json(problem: Problem, inst: &AnnotatedInstance) -> Value {
    let ann = Annotations { forbidden: inst.forbidden, red: inst.red, blue: inst.blue };
    json!({
        "problem": problem.name(),
        "k": inst.k,
        "d": inst.d,
        "graph": inst.graph.to_text(),
        "annotations": ann.to_text(),
    })
}

/// Runs `f` over `0..len` on `threads` workers; results keep index order.
fn parallel<T: Send>(len: usize, threads: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..len).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= len {
                    break;
                }
                let r = f(i);
                slots.lock().expect("no worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("no worker panicked").into_iter().map(|r| r.expect("every slot filled")).collect()
}

pub fn corpus(a: &CorpusArgs) -> Result<u8> {
    let cfg = match &a.config {
        Some(p) => {
            let text = read_input(&p.to_string_lossy())?;
            toml::from_str::<Config>(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => Config::desk(),
    };
    let items = expand(&cfg)?;
    let budget = oracle_budget()?;
    let mut config = DpConfig { record_trace: true, ..DpConfig::default() };
    if a.inject_fault {
        config.fault = Some(Fault::IgnoreDeletionConsistency);
    }
    let threads = a.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));

    let results = parallel(items.len(), threads, |i| {
        let it = &items[i];
        let start = Instant::now();
        let solved = run_solver(it.problem, &it.inst, &config);
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        let oracle = if cfg.oracle { run_oracle(it.problem, &it.inst, &budget) } else { None };
        (solved.map_err(|e| e.to_string()), oracle, ms)
    });

    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut skipped = 0;
    let (mut trees, mut bw_invalid, mut bound_violations, mut max_leaves) = (0, 0, 0, 0);
    for (it, (solved, oracle, ms)) in items.iter().zip(results) {
        if cfg.oracle && oracle.is_none() {
            skipped += 1;
        }
        let mut rec = json!({
            "id": it.id,
            "problem": it.problem.name(),
            "family": it.family,
            "p": it.p,
            "seed": it.seed,
            "n": it.inst.graph.n(),
            "m": it.inst.graph.m(),
            "k": it.inst.k,
            "d": it.inst.d,
            "oracle_verdict": oracle,
        });
        let failed = match &solved {
            Err(e) => {
                rec["error"] = json!(e);
                true
            }
            Ok(r) => {
                rec["verdict"] = json!(r.verdict);
                rec["stats"] = json!({ "q": r.stats.q, "nodes": r.stats.nodes, "branches": r.stats.branches, "leaves": r.stats.leaves });
                if let Some(t) = &r.trace {
                    let bw = branch_accounting(t);
                    trees += bw.trees;
                    bw_invalid += usize::from(!bw.valid);
                    bound_violations += bw.bound_violations.len();
                    max_leaves = max_leaves.max(bw.max_leaves);
                    rec["black_white"] = json!({ "valid": bw.valid, "max_leaves": bw.max_leaves, "bound_violations": bw.bound_violations.len() });
                }
                if let Some(e) = &r.certificate_error {
                    rec["certificate_error"] = json!(e);
                }
                r.certificate_error.is_some() || oracle.is_some_and(|o| o != r.verdict)
            }
        };
        rec["agree"] = json!(!failed);
        if a.timing {
            rec["wall_ms"] = json!(ms);
        }
        if failed {
            let small = shrink(it.problem, &it.inst, &config, &budget, cfg.oracle);
            failures.push(json!({ "id": it.id, "original": instance_json(it.problem, &it.inst), "minimal": instance_json(it.problem, &small) }));
        }
        records.push(rec);
    }

    let mut out = json!({
        "schema": SCHEMA,
        "seed": cfg.seed,
        "instances": items.len(),
        "oracle": cfg.oracle,
        "oracle_skipped": skipped,
        "disagreements": failures.len(),
        "black_white": {
            "trees": trees,
            "invalid": bw_invalid,
            "bound_violations": bound_violations,
            "max_leaves": max_leaves,
        },
        "failures": failures,
    });
    if !a.summary_only {
        out["records"] = Value::Array(records);
    }
    crate::report::print(&out);
    Ok(if out["disagreements"] == json!(0) { 0 } else { 1 })
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "dcd")]
    problem: Problem,
    #[arg(long, default_value = "er")]
    family: String,
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', default_value = "6,8,10,12")]
    sizes: Vec<usize>,
    #[arg(short, default_value_t = 1)]
    k: usize,
    #[arg(short, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Time the oracle as well.
    #[arg(long)]
    oracle: bool,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    if v.is_empty() {
        0.0
    } else {
        v[v.len() / 2]
    }
}

pub fn bench(a: &BenchArgs) -> Result<u8> {
    let Some(family) = Family::from_name(&a.family, a.p) else {
        bail!("unknown family `{}`", a.family);
    };
    if a.problem == Problem::Apd {
        bail!("bench problems are dcd and eddc");
    }
    let budget = oracle_budget()?;
    let config = DpConfig { record_trace: true, ..DpConfig::default() };
    let mut rows = Vec::new();
    for (si, &n) in a.sizes.iter().enumerate() {
        if n > 64 {
            bail!("bench sizes are limited to n <= 64");
        }
        let mut times = Vec::new();
        let mut oracle_times = Vec::new();
        let mut yes = 0;
        let (mut nodes, mut branches, mut leaves, mut q) = (0, 0, 0, 0);
        for r in 0..a.reps {
            let seed = derive_seed(a.seed, (si * a.reps + r) as u64);
            let g = generate(family, n, seed);
            let inst = AnnotatedInstance::plain(g, a.k, a.d);
            let start = Instant::now();
            let res = run_solver(a.problem, &inst, &config)?;
            times.push(start.elapsed().as_secs_f64() * 1000.0);
            yes += usize::from(res.verdict);
            nodes = nodes.max(res.stats.nodes);
            branches = branches.max(res.stats.branches);
            leaves = leaves.max(res.stats.leaves);
            q = q.max(res.stats.q);
            if a.oracle {
                let start = Instant::now();
                run_oracle(a.problem, &inst, &budget);
                oracle_times.push(start.elapsed().as_secs_f64() * 1000.0);
            }
        }
        let mut row = json!({
            "n": n,
            "reps": a.reps,
            "yes": yes,
            "median_ms": median(&mut times),
            "max_ms": times.iter().cloned().fold(0.0, f64::max),
            "max_q": q,
            "max_nodes": nodes,
            "max_branches": branches,
            "max_leaves": leaves,
        });
        if a.oracle {
            row["oracle_median_ms"] = json!(median(&mut oracle_times));
        }
        rows.push(row);
    }
    crate::report::print(&json!({
        "schema": SCHEMA,
        "problem": a.problem.name(),
        "family": family.name(),
        "k": a.k,
        "d": a.d,
        "seed": a.seed,
        "rows": rows,
    }));
    Ok(0)
}
