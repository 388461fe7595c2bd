mod corpus;
mod report;

use std::io::Read;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use domclust::decomposition::{build_decomposition, certify_q, is_unbreakable_set, validate_decomposition, DecompositionReport, TreeDecomposition};
use domclust::domination::annotated_partial_domination;
use domclust::dp::dcd::{solve_adcd, SolveOptions};
use domclust::dp::eddc::{solve_aeddc, verify_eddc_certificate};
use domclust::dp::{verify_dcd_certificate, DpConfig};
use domclust::gen::{generate, Family};
use domclust::oracle::{brute_dcd, brute_eddc, brute_treedepth, OracleBudget};
use domclust::semiladder::semi_ladder_index;
use domclust::skeleton::{solve_dcd_via_skeletons, solve_eddc_via_skeletons, SkeletonRoute};
use domclust::{AnnotatedInstance, Annotations, Graph};

use report::{ids, SCHEMA};

#[derive(Parser)]
#[command(name = "domclust", version, about = "Deletion to dominated clusters: solvers, oracles and experiment runners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the decomposition-based algorithm.
    Solve(SolveArgs),
    /// Annotated partial domination by enumeration.
    Apd(InstanceArgs),
    /// Semi-ladder index of a graph.
    Semiladder {
        /// Graph file, or `-` for standard input.
        graph: String,
        #[arg(long, default_value_t = 16)]
        cap: usize,
    },
    /// Build a decomposition with unbreakable bags and print it.
    Decompose {
        graph: String,
        #[arg(short)]
        k: usize,
    },
    /// Check a decomposition against adhesion and unbreakability bounds.
    Validate {
        graph: String,
        decomposition: String,
        #[arg(short)]
        q: usize,
        #[arg(short)]
        k: usize,
    },
    /// Exhaustive reference solvers.
    Oracle {
        problem: OracleProblem,
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Print a seeded random or structured graph.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge probability for `er` and `double-subdivision`.
        #[arg(long, default_value_t = 0.3)]
        p: f64,
    },
    /// Solver against oracle over a grid of generated instances.
    Corpus(corpus::CorpusArgs),
    /// Solver timings over a range of sizes.
    Bench(corpus::BenchArgs),
    /// Skeleton solver for graphs whose vertex set is (q, k)-unbreakable.
    DcdUnbreakable(UnbreakableArgs),
    /// Skeleton solver for recursive deletion on (q, k)-unbreakable graphs.
    EddcUnbreakable(UnbreakableArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Dcd,
    Eddc,
    Apd,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Dcd => "dcd",
            Problem::Eddc => "eddc",
            Problem::Apd => "apd",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleProblem {
    Dcd,
    Eddc,
    Treedepth,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Route {
    Branching,
    DominatorGuessing,
}

#[derive(Args)]
struct InstanceArgs {
    /// Graph file, or `-` for standard input.
    graph: String,
    /// Annotation file with `F`, `R` and `B` lines.
    annotations: Option<String>,
    #[arg(short, default_value_t = 0)]
    k: usize,
    #[arg(short, default_value_t = 0)]
    d: usize,
}

#[derive(Args)]
struct SolveArgs {
    problem: Problem,
    #[command(flatten)]
    instance: InstanceArgs,
    /// Use this decomposition instead of building one.
    #[arg(long)]
    decomposition: Option<String>,
    /// Also run the exhaustive oracle.
    #[arg(long)]
    oracle: bool,
    /// Include the branching statistics.
    #[arg(long)]
    trace: bool,
    /// Re-check the certificate (and the oracle witness) independently.
    #[arg(long)]
    verify: bool,
    /// Include wall-clock time.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct UnbreakableArgs {
    graph: String,
    #[arg(short)]
    q: usize,
    #[arg(short)]
    k: usize,
    #[arg(short)]
    d: usize,
    #[arg(long, value_enum, default_value = "branching")]
    route: Route,
    /// Skip the unbreakability check.
    #[arg(long)]
    assume_unbreakable: bool,
}

pub fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
        return Ok(s);
    }
    std::fs::read_to_string(Path::new(path)).with_context(|| format!("reading {path}"))
}

pub fn load_graph(path: &str) -> Result<Graph> {
    Graph::parse(&read_input(path)?).with_context(|| format!("parsing {path}"))
}

fn load_instance(a: &InstanceArgs) -> Result<AnnotatedInstance> {
    let g = load_graph(&a.graph)?;
    let ann = match &a.annotations {
        Some(p) => Annotations::parse(&read_input(p)?, g.n()).with_context(|| format!("parsing {p}"))?,
        None => {
            let all = g.vertices();
            Annotations { forbidden: Default::default(), red: all, blue: all }
        }
    };
    Ok(AnnotatedInstance::with_annotations(g, &ann, a.k, a.d))
}

/// Oracle limits, with the vertex cap overridable through
/// `DOMCLUST_ORACLE_MAX_N`.
pub fn oracle_budget() -> Result<OracleBudget> {
    let mut b = OracleBudget::default();
    if let Ok(v) = std::env::var("DOMCLUST_ORACLE_MAX_N") {
        b.max_vertices = v.trim().parse().with_context(|| format!("DOMCLUST_ORACLE_MAX_N={v}"))?;
    }
    Ok(b)
}

fn exit_for(verdict: bool) -> u8 {
    if verdict {
        0
    } else {
        1
    }
}

fn check_apd(inst: &AnnotatedInstance, deleted: &domclust::VertexSet, dom: &domclust::VertexSet) -> Result<()> {
    let g = &inst.graph;
    if deleted.len() > inst.k || deleted.intersects(&inst.forbidden) {
        bail!("certificate check failed: deletion set too large or forbidden");
    }
    if dom.len() > inst.d || !dom.is_subset(&inst.blue) {
        bail!("certificate check failed: dominators too many or not blue");
    }
    if !inst.red.difference(deleted).is_subset(&g.closed_neighborhood(dom)) {
        bail!("certificate check failed: red vertex left undominated");
    }
    Ok(())
}

fn solve(a: &SolveArgs) -> Result<u8> {
    let inst = load_instance(&a.instance)?;
    let decomposition = match &a.decomposition {
        Some(p) => Some(TreeDecomposition::parse(&read_input(p)?, inst.graph.n()).with_context(|| format!("parsing {p}"))?),
        None => None,
    };
    let opts = SolveOptions { decomposition, config: DpConfig { record_trace: a.trace, ..DpConfig::default() } };
    let start = Instant::now();
    let mut out = json!({ "schema": SCHEMA, "problem": a.problem.name() });
    let verdict = match a.problem {
        Problem::Dcd => {
            let r = solve_adcd(&inst, &opts)?;
            if let Some(e) = r.certificate_error {
                bail!("certificate check failed: {e}");
            }
            if r.verdict {
                let comps = verify_dcd_certificate(&inst, &r.deleted, &report::union_of_dominators(&r.dominators))
                    .map_err(|e| anyhow::anyhow!("certificate check failed: {e}"))?;
                if comps.len() != r.dominators.len() {
                    bail!("certificate check failed: component list mismatch");
                }
                out["deleted"] = json!(ids(&r.deleted));
                out["dominators"] = report::dominators(&r.dominators);
            }
            out["stats"] = json!(r.stats);
            if let Some(t) = &r.trace {
                out["trace"] = report::trace(t);
            }
            r.verdict
        }
        Problem::Eddc => {
            let r = solve_aeddc(&inst, &opts)?;
            if let Some(e) = r.certificate_error {
                bail!("certificate check failed: {e}");
            }
            if r.verdict {
                verify_eddc_certificate(&inst, &r.tree, &report::union_of_dominators(&r.dominators))
                    .map_err(|e| anyhow::anyhow!("certificate check failed: {e}"))?;
                out["elimination_tree"] = report::elimination_tree(&r.tree);
                out["depth"] = json!(r.tree.depth());
                out["dominators"] = report::dominators(&r.dominators);
            }
            out["stats"] = json!(r.stats);
            if let Some(t) = &r.trace {
                out["trace"] = report::trace(t);
            }
            r.verdict
        }
        Problem::Apd => {
            let r = annotated_partial_domination(&inst);
            if let Some(s) = &r {
                check_apd(&inst, &s.deleted, &s.dominators)?;
                out["deleted"] = json!(ids(&s.deleted));
                out["dominators"] = json!(ids(&s.dominators));
            }
            r.is_some()
        }
    };
    out["verdict"] = json!(verdict);
    if a.timing {
        out["wall_ms"] = json!(start.elapsed().as_secs_f64() * 1000.0);
    }
    if a.oracle {
        let budget = oracle_budget()?;
        let res = match a.problem {
            Problem::Dcd => brute_dcd(&inst, &budget).map(|w| {
                let check = match (&w, a.verify) {
                    (Some(w), true) => {
                        verify_dcd_certificate(&inst, &w.deleted, &report::union_of_dominators(&w.dominators)).map(|_| ())
                    }
                    _ => Ok(()),
                };
                check.map(|_| w.is_some())
            }),
            Problem::Eddc => brute_eddc(&inst, &budget).map(|w| {
                let check = match (&w, a.verify) {
                    (Some(w), true) => {
                        verify_eddc_certificate(&inst, &w.tree, &report::union_of_dominators(&w.dominators)).map(|_| ())
                    }
                    _ => Ok(()),
                };
                check.map(|_| w.is_some())
            }),
            // The enumeration is already exhaustive.
            Problem::Apd => Ok(Ok(verdict)),
        };
        match res {
            Ok(Ok(v)) => {
                out["oracle_verdict"] = json!(v);
                out["oracle_agrees"] = json!(v == verdict);
            }
            Ok(Err(e)) => bail!("oracle witness failed the check: {e}"),
            Err(e) => {
                out["oracle_verdict"] = Value::Null;
                out["oracle_error"] = json!(e.to_string());
            }
        }
    }
    if a.verify {
        out["verified"] = json!(true);
    }
    report::print(&out);
    Ok(exit_for(verdict))
}

fn apd(a: &InstanceArgs) -> Result<u8> {
    let inst = load_instance(a)?;
    match annotated_partial_domination(&inst) {
        Some(s) => {
            check_apd(&inst, &s.deleted, &s.dominators)?;
            let line = |tag: &str, s: &domclust::VertexSet| {
                let v: Vec<String> = ids(s).iter().map(|i| i.to_string()).collect();
                format!("{tag} {}", v.join(" ")).trim_end().to_string()
            };
            report::emit(&format!("{}\n", line("deleted", &s.deleted)));
            report::emit(&format!("{}\n", line("dominators", &s.dominators)));
            Ok(0)
        }
        None => {
            report::emit("infeasible\n");
            Ok(1)
        }
    }
}

fn semiladder(graph: &str, cap: usize) -> Result<u8> {
    let g = load_graph(graph)?;
    let r = semi_ladder_index(&g, cap);
    let list = |v: &[usize]| v.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(" ");
    if r.exact {
        report::emit(&format!("index {}\n", r.index));
    } else {
        report::emit(&format!("index {} # at least; search stopped above cap {cap}\n", r.index));
    }
    report::emit(&format!("{}\n", list(&r.witness.a)));
    report::emit(&format!("{}\n", list(&r.witness.b)));
    Ok(0)
}

fn decompose(graph: &str, k: usize) -> Result<u8> {
    let g = load_graph(graph)?;
    let (td, q) = build_decomposition(&g, k);
    report::emit(&format!("# q {q} k {k}\n"));
    report::emit(&td.to_text());
    Ok(0)
}

fn validate(graph: &str, decomposition: &str, q: usize, k: usize) -> Result<u8> {
    let g = load_graph(graph)?;
    let td = TreeDecomposition::parse(&read_input(decomposition)?, g.n()).with_context(|| format!("parsing {decomposition}"))?;
    let (valid, violation) = match validate_decomposition(&g, &td, q, k) {
        DecompositionReport::Valid => (true, Value::Null),
        DecompositionReport::Invalid(v) => (false, json!(format!("{v:?}"))),
    };
    let certified = domclust::decomposition::check_axioms(&g, &td).is_ok().then(|| certify_q(&g, &td, k));
    report::print(&json!({
        "schema": SCHEMA,
        "valid": valid,
        "violation": violation,
        "certified_q": certified,
        "nodes": td.len(),
        "max_adhesion": td.max_adhesion(),
        "max_bag": td.max_bag(),
    }));
    Ok(exit_for(valid))
}

fn oracle(problem: OracleProblem, a: &InstanceArgs) -> Result<u8> {
    let inst = load_instance(a)?;
    let budget = oracle_budget()?;
    let mut out = json!({ "schema": SCHEMA });
    let verdict = match problem {
        OracleProblem::Dcd => {
            out["problem"] = json!("dcd");
            let w = brute_dcd(&inst, &budget)?;
            if let Some(w) = &w {
                out["deleted"] = json!(ids(&w.deleted));
                out["dominators"] = report::dominators(&w.dominators);
            }
            w.is_some()
        }
        OracleProblem::Eddc => {
            out["problem"] = json!("eddc");
            let w = brute_eddc(&inst, &budget)?;
            if let Some(w) = &w {
                out["elimination_tree"] = report::elimination_tree(&w.tree);
                out["depth"] = json!(w.tree.depth());
                out["dominators"] = report::dominators(&w.dominators);
            }
            w.is_some()
        }
        OracleProblem::Treedepth => {
            out["problem"] = json!("treedepth");
            let (td, tree) = brute_treedepth(&inst.graph, &budget)?;
            out["treedepth"] = json!(td);
            out["elimination_tree"] = report::elimination_tree(&tree);
            td <= inst.k
        }
    };
    out["verdict"] = json!(verdict);
    report::print(&out);
    Ok(exit_for(verdict))
}

fn gen(family: &str, n: usize, seed: u64, p: f64) -> Result<u8> {
    let Some(f) = Family::from_name(family, p) else {
        bail!("unknown family `{family}` (er, path, cycle, clique, half-graph, subdivided-clique, double-subdivision)");
    };
    if !(0.0..=1.0).contains(&p) {
        bail!("--p must lie in [0, 1]");
    }
    let size = match f {
        Family::HalfGraph => n.saturating_mul(2),
        Family::SubdividedClique => n.saturating_add(n.saturating_mul(n.saturating_sub(1)) / 2),
        Family::DoubleSubdivision { .. } => n.saturating_mul(n),
        _ => n,
    };
    if size > domclust::graph::MAX_VERTICES {
        bail!("graph would exceed {} vertices", domclust::graph::MAX_VERTICES);
    }
    let g = generate(f, n, seed);
    report::emit(&format!("# family {} n {n} seed {seed} p {p}\n", f.name()));
    report::emit(&g.to_text());
    Ok(0)
}

fn unbreakable(a: &UnbreakableArgs, eddc: bool) -> Result<u8> {
    let g = load_graph(&a.graph)?;
    if !a.assume_unbreakable {
        if let Some(sep) = is_unbreakable_set(&g, &g.vertices(), a.q, a.k).violation {
            bail!(
                "graph is not ({}, {})-unbreakable: separator {:?} splits it",
                a.q,
                a.k,
                ids(&sep.separator())
            );
        }
    }
    let route = match a.route {
        Route::Branching => SkeletonRoute::Branching,
        Route::DominatorGuessing => SkeletonRoute::DominatorGuessing,
    };
    let inst = AnnotatedInstance::plain(g.clone(), a.k, a.d);
    let mut out = json!({ "schema": SCHEMA, "problem": if eddc { "eddc" } else { "dcd" }, "q": a.q });
    let verdict = if eddc {
        let r = if g.n() < 3 * a.q * (a.k + a.q) && route == SkeletonRoute::Branching {
            domclust::skeleton::solve_eddc_unbreakable(&g, a.q, a.k, a.d)
        } else {
            solve_eddc_via_skeletons(&g, a.q, a.k, a.d, route)
        };
        if let Some(s) = &r {
            verify_eddc_certificate(&inst, &s.tree, &report::union_of_dominators(&s.dominators))
                .map_err(|e| anyhow::anyhow!("certificate check failed: {e}"))?;
            out["elimination_tree"] = report::elimination_tree(&s.tree);
            out["depth"] = json!(s.tree.depth());
            out["dominators"] = report::dominators(&s.dominators);
        }
        r.is_some()
    } else {
        let r = if g.n() < 2 * a.q + 1 && route == SkeletonRoute::Branching {
            domclust::skeleton::solve_dcd_unbreakable(&g, a.q, a.k, a.d)
        } else {
            solve_dcd_via_skeletons(&g, a.q, a.k, a.d, route)
        };
        if let Some(s) = &r {
            verify_dcd_certificate(&inst, &s.deleted, &report::union_of_dominators(&s.dominators))
                .map_err(|e| anyhow::anyhow!("certificate check failed: {e}"))?;
            out["deleted"] = json!(ids(&s.deleted));
            out["dominators"] = report::dominators(&s.dominators);
        }
        r.is_some()
    };
    out["verdict"] = json!(verdict);
    report::print(&out);
    Ok(exit_for(verdict))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve(a) => solve(&a),
        Command::Apd(a) => apd(&a),
        Command::Semiladder { graph, cap } => semiladder(&graph, cap),
        Command::Decompose { graph, k } => decompose(&graph, k),
        Command::Validate { graph, decomposition, q, k } => validate(&graph, &decomposition, q, k),
        Command::Oracle { problem, instance } => oracle(problem, &instance),
        Command::Gen { family, n, seed, p } => gen(&family, n, seed, p),
        Command::Corpus(a) => corpus::corpus(&a),
        Command::Bench(a) => corpus::bench(&a),
        Command::DcdUnbreakable(a) => unbreakable(&a, false),
        Command::EddcUnbreakable(a) => unbreakable(&a, true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
