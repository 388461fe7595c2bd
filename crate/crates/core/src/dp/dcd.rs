//! Profiles for annotated deletion to dominated clusters, computed bottom-up.

use std::collections::{BTreeSet, HashMap};

use crate::baggraph::{solve_adcd_on_bag_graph, BagColors, BagGraph, BagGraphBuilder, BagSolution, GadgetOrigin};
use crate::decomposition::{build_decomposition, certify_q, check_axioms, make_regular, TreeDecomposition};
use crate::graph::{AnnotatedInstance, VertexSet};

use super::mark::{minimal_marks, Mark, Part};
use super::trace::{Color, DpTrace, TraceTree};
use super::{classes, domination_options, DomOption, DpConfig, DpError, DpStats, Fault};

/// One accepting branch: the marks chosen for the children and the decisions
/// taken inside the bag.
#[derive(Clone, Debug)]
struct Witness {
    child_marks: Vec<Mark>,
    deleted: VertexSet,
    dominators: VertexSet,
}

#[derive(Clone, Debug)]
pub struct NodeProfile {
    pub node: usize,
    pub adhesion: VertexSet,
    pub marks: BTreeSet<Mark>,
    /// Marks not dominated by another mark of the profile.
    pub minimal: Vec<Mark>,
    witness_of: HashMap<Mark, usize>,
    witnesses: Vec<Witness>,
}

impl NodeProfile {
    pub fn contains(&self, m: &Mark) -> bool {
        self.witness_of.contains_key(m)
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }

    fn witness(&self, m: &Mark) -> Option<&Witness> {
        self.witness_of.get(m).map(|&i| &self.witnesses[i])
    }
}

/// Counters, trace trees and bag graphs produced at one node.
#[derive(Clone, Debug, Default)]
pub struct NodeRun {
    pub stats: DpStats,
    pub trees: Vec<TraceTree>,
    pub bag_graphs: Vec<BagGraphRecord>,
}

/// A bag graph built by the branch filter, with the colouring and deletion
/// budget it was solved under and the solution found.
#[derive(Clone, Debug)]
pub struct BagGraphRecord {
    pub node: usize,
    pub graph: BagGraph,
    pub colors: BagColors,
    pub k: usize,
    pub solution: Option<BagSolution>,
}

#[derive(Clone)]
enum Choice<'a> {
    Mark(&'a Mark),
    /// The child allows any decision on its boundary at no cost.
    Neutral,
}

#[derive(Clone)]
struct State<'a> {
    del: VertexSet,
    dom: VertexSet,
    keep: VertexSet,
    s: usize,
    c: usize,
    chosen: Vec<Choice<'a>>,
}

impl State<'_> {
    fn decided(&self) -> VertexSet {
        self.del.union(&self.dom).union(&self.keep)
    }
}

/// The zero-cost mark: singleton parts, nothing deleted or dominating below,
/// nothing left undominated. When it is realized with every undecided
/// boundary vertex kept, every other decision on those vertices is realized
/// too, so the child constrains nothing.
fn neutral_mark(adh: &VertexSet, del: &VertexSet, dom: &VertexSet) -> Mark {
    let deleted = adh.intersection(del);
    let dominators = adh.intersection(dom);
    let live = adh.difference(&deleted);
    Mark {
        deleted,
        dominators,
        undominated: VertexSet::new(),
        budget: 0,
        parts: live.iter().map(|v| Part { members: VertexSet::singleton(v), budget: usize::from(dominators.contains(v)) }).collect(),
    }
}

/// Marks obtained from `m` by raising the budgets and the undominated set.
fn upward_closure(m: &Mark, a: &VertexSet, k: usize, d: usize) -> Vec<Mark> {
    let free = a.difference(&m.deleted).difference(&m.dominators).difference(&m.undominated);
    let mut out = Vec::new();
    let base: Vec<usize> = m.parts.iter().map(|p| p.budget).collect();
    for extra_u in free.subsets_up_to(free.len()) {
        let undominated = m.undominated.union(&extra_u);
        let mut budgets = base.clone();
        loop {
            for budget in m.budget..=k {
                let parts = m.parts.iter().zip(&budgets).map(|(p, &b)| Part { members: p.members, budget: b }).collect();
                out.push(Mark { deleted: m.deleted, dominators: m.dominators, undominated, budget, parts });
            }
            let mut i = 0;
            while i < budgets.len() && budgets[i] == d {
                budgets[i] = base[i];
                i += 1;
            }
            if i == budgets.len() {
                break;
            }
            budgets[i] += 1;
        }
    }
    out
}

struct Ctx<'a> {
    inst: &'a AnnotatedInstance,
    node: usize,
    q: usize,
    config: &'a DpConfig,
    bag: VertexSet,
    a: VertexSet,
    sx: VertexSet,
    adhs: Vec<VertexSet>,
    child: Vec<&'a NodeProfile>,
    dom_limit: usize,
    derived: HashMap<Mark, Witness>,
    run: NodeRun,
    tree: Option<TraceTree>,
}

impl<'a> Ctx<'a> {
    fn add_trace(&mut self, parent: usize, color: Color) -> usize {
        if color == Color::Black {
            self.run.stats.branches += 1;
        }
        self.tree.as_mut().map_or(0, |t| t.add_child(parent, color))
    }

    fn apply(&self, st: &State<'a>, m: &'a Mark, adh: &VertexSet) -> Option<State<'a>> {
        let ignore_deletions = self.config.fault == Some(Fault::IgnoreDeletionConsistency);
        let mut next = st.clone();
        for v in adh {
            let (want_del, want_dom) = (m.deleted.contains(v), m.dominators.contains(v));
            let (cur_del, cur_dom, cur_keep) = (st.del.contains(v), st.dom.contains(v), st.keep.contains(v));
            if !(cur_del || cur_dom || cur_keep) {
                if want_del {
                    next.del.insert(v);
                } else if want_dom {
                    next.dom.insert(v);
                } else {
                    next.keep.insert(v);
                }
            } else if want_del != cur_del || want_dom != cur_dom {
                if ignore_deletions && (want_del || cur_del) {
                    continue;
                }
                return None;
            }
        }
        next.s += m.budget;
        next.c += m.parts.iter().map(|p| m.extra(p)).sum::<usize>();
        if next.del.difference(&self.sx).len() + next.s > self.inst.k {
            return None;
        }
        if self.config.dominator_gate && next.dom.len() + next.c > self.dom_limit {
            return None;
        }
        next.chosen.push(Choice::Mark(m));
        Some(next)
    }

    fn branch(&mut self, i: usize, st: State<'a>, tnode: usize) -> Result<(), DpError> {
        if i == self.adhs.len() {
            self.run.stats.leaves += 1;
            return self.local(&st);
        }
        let adh = self.adhs[i];
        let prof = self.child[i];
        if self.config.shortcut {
            let n = neutral_mark(&adh, &st.del, &st.dom);
            if prof.contains(&n) {
                let c = self.add_trace(tnode, Color::White);
                let mut next = st;
                next.chosen.push(Choice::Neutral);
                return self.branch(i + 1, next, c);
            }
        }
        let mut next = Vec::new();
        if self.config.shortcut {
            for m in &prof.minimal {
                next.extend(self.apply(&st, m, &adh));
            }
        } else {
            for m in &prof.marks {
                next.extend(self.apply(&st, m, &adh));
            }
        }
        if next.is_empty() {
            self.run.stats.leaves += 1;
        }
        let color = if next.len() == 1 { Color::White } else { Color::Black };
        for st2 in next {
            let c = self.add_trace(tnode, color);
            self.branch(i + 1, st2, c)?;
        }
        Ok(())
    }

    /// Child parts as (members, extra budget), and the boundary vertices that
    /// some child dominates from below.
    fn child_data(&self, st: &State<'a>) -> (Vec<(usize, VertexSet, usize)>, VertexSet) {
        let mut parts = Vec::new();
        let mut covered = VertexSet::new();
        for (i, ch) in st.chosen.iter().enumerate() {
            if let Choice::Mark(m) = ch {
                for p in &m.parts {
                    parts.push((i, p.members, m.extra(p)));
                }
                covered = covered.union(&self.adhs[i].difference(&m.undominated));
            }
        }
        (parts, covered)
    }

    /// Solves the relaxed bag graph of this branch; `false` means no local
    /// completion exists.
    fn bag_filter(&mut self, st: &State<'a>, parts: &[(usize, VertexSet, usize)], need: &VertexSet, r: usize) -> bool {
        let inst = self.inst;
        let interior = self.bag.difference(&st.del);
        let und = self.bag.difference(&st.decided());
        let mut b = BagGraphBuilder::new(&inst.graph, interior);
        for &(i, members, extra) in parts {
            if b.add_gadget(extra, members, GadgetOrigin::ChildComponent { child: i, part: members }).is_err() {
                return true;
            }
        }
        for v in &st.dom {
            if b.add_gadget(1, VertexSet::singleton(v), GadgetOrigin::Pin { vertex: v }).is_err() {
                return true;
            }
        }
        let bg = b.build();
        let colors = BagColors {
            forbidden: inst.forbidden.union(&interior.difference(&und)).union(&bg.exterior),
            red: need.difference(&self.a).union(&bg.gadget_red()),
            blue: inst.blue.intersection(&und).union(&bg.gadget_blue()),
        };
        self.run.stats.bag_graph_vertices = self.run.stats.bag_graph_vertices.max(bg.len());
        let res = solve_adcd_on_bag_graph(&bg, &colors, self.q, r, inst.d);
        if self.config.collect_bag_graphs {
            let solution = res.as_ref().ok().cloned().flatten();
            self.run.bag_graphs.push(BagGraphRecord { node: self.node, graph: bg, colors, k: r, solution });
        }
        !matches!(res, Ok(None))
    }

    fn local(&mut self, st: &State<'a>) -> Result<(), DpError> {
        let inst = self.inst;
        let g = &inst.graph;
        let (k, d) = (inst.k, inst.d);
        let und = self.bag.difference(&st.decided());
        let base_budget = st.del.difference(&self.sx).len() + st.s;
        let r = k - base_budget;
        let (parts, covered) = self.child_data(st);
        let need = inst
            .red
            .intersection(&self.bag)
            .difference(&st.del)
            .difference(&covered)
            .difference(&g.closed_neighborhood(&st.dom));
        if self.config.bag_filter && !self.bag_filter(st, &parts, &need, r) {
            return Ok(());
        }
        let links: Vec<VertexSet> = parts.iter().map(|p| p.1).collect();
        'extra: for s2 in und.difference(&inst.forbidden).subsets_up_to(r) {
            let alive = self.bag.difference(&st.del).difference(&s2);
            let comps = classes(g, &alive, &links);
            let mut chosen_dom = st.dom;
            let mut touching: Vec<(VertexSet, Vec<DomOption>)> = Vec::new();
            for comp in comps {
                let fixed = parts.iter().filter(|p| p.1.is_subset(&comp)).map(|p| p.2).sum::<usize>()
                    + st.dom.intersection(&comp).len();
                if fixed > d {
                    continue 'extra;
                }
                let need_here = need.intersection(&comp);
                let cand = inst.blue.intersection(&und).intersection(&comp);
                let boundary = need_here.intersection(&self.a);
                let opts = domination_options(g, &cand, &need_here.difference(&self.a), &boundary, fixed, d - fixed);
                if opts.is_empty() {
                    continue 'extra;
                }
                let touch = comp.intersection(&self.a);
                if touch.is_empty() {
                    chosen_dom = chosen_dom.union(&opts[0].chosen);
                } else {
                    touching.push((touch, opts));
                }
            }
            self.run.stats.local_solutions += 1;
            let deleted = st.del.union(&s2);
            let mut idx = vec![0usize; touching.len()];
            loop {
                let mut dom = chosen_dom;
                let mut undominated = VertexSet::new();
                let mut mparts = Vec::with_capacity(touching.len());
                for (t, &j) in touching.iter().zip(&idx) {
                    let o = &t.1[j];
                    dom = dom.union(&o.chosen);
                    undominated = undominated.union(&o.undominated);
                    mparts.push(Part { members: t.0, budget: o.cost });
                }
                mparts.sort_by_key(|p| p.members.first());
                let m = Mark {
                    deleted: self.sx,
                    dominators: st.dom.intersection(&self.a),
                    undominated,
                    budget: base_budget + s2.len(),
                    parts: mparts,
                };
                if !self.derived.contains_key(&m) {
                    let child_marks = st
                        .chosen
                        .iter()
                        .zip(&self.adhs)
                        .map(|(ch, adh)| match ch {
                            Choice::Mark(cm) => (*cm).clone(),
                            Choice::Neutral => neutral_mark(adh, &deleted, &dom),
                        })
                        .collect();
                    self.derived.insert(m, Witness { child_marks, deleted, dominators: dom });
                }
                let mut i = 0;
                while i < idx.len() && idx[i] + 1 == touching[i].1.len() {
                    idx[i] = 0;
                    i += 1;
                }
                if i == idx.len() {
                    break;
                }
                idx[i] += 1;
            }
        }
        Ok(())
    }
}

/// Computes the profile of `adh(x)` in `cone(x)` from the profiles of the
/// children of `x` (in the order of `td.children(x)`).
pub fn compute_profile(
    inst: &AnnotatedInstance,
    td: &TreeDecomposition,
    x: usize,
    children: &[&NodeProfile],
    q: usize,
    config: &DpConfig,
) -> Result<(NodeProfile, NodeRun), DpError> {
    let a = td.adhesion(x);
    let kids = td.children(x);
    let mut ctx = Ctx {
        inst,
        node: x,
        q,
        config,
        bag: td.bag(x),
        a,
        sx: VertexSet::new(),
        adhs: kids.iter().map(|&y| td.adhesion(y)).collect(),
        child: children.to_vec(),
        dom_limit: (q + 1) * inst.d,
        derived: HashMap::new(),
        run: NodeRun::default(),
        tree: None,
    };
    let alpha = children.iter().map(|p| p.len()).max().unwrap_or(0);
    let av = a.to_vec();
    // Every assignment of deleted / dominator / kept to the adhesion.
    let mut assign = vec![0u8; av.len()];
    loop {
        let valid = av.iter().zip(&assign).all(|(&v, &s)| match s {
            0 => !inst.forbidden.contains(v),
            1 => inst.blue.contains(v),
            _ => true,
        });
        if valid {
            let pick = |t: u8| av.iter().zip(&assign).filter(|p| *p.1 == t).map(|p| *p.0).collect::<VertexSet>();
            let st = State { del: pick(0), dom: pick(1), keep: pick(2), s: 0, c: 0, chosen: Vec::new() };
            ctx.sx = st.del;
            let fits = !config.dominator_gate || st.dom.len() <= ctx.dom_limit;
            if fits {
                if config.record_trace {
                    ctx.tree = Some(TraceTree::new(ctx.node, alpha));
                }
                ctx.branch(0, st, 0)?;
                if let Some(t) = ctx.tree.take() {
                    ctx.run.trees.push(t);
                }
            }
        }
        let mut i = 0;
        while i < assign.len() && assign[i] == 2 {
            assign[i] = 0;
            i += 1;
        }
        if i == assign.len() {
            break;
        }
        assign[i] += 1;
    }

    let mut profile = NodeProfile {
        node: x,
        adhesion: a,
        marks: BTreeSet::new(),
        minimal: minimal_marks(ctx.derived.keys()),
        witness_of: HashMap::new(),
        witnesses: Vec::new(),
    };
    let mut derived: Vec<(Mark, Witness)> = ctx.derived.into_iter().collect();
    derived.sort_by(|p, q| p.0.cmp(&q.0));
    for (m, w) in derived {
        let wi = profile.witnesses.len();
        profile.witnesses.push(w);
        for c in upward_closure(&m, &a, inst.k, inst.d) {
            profile.witness_of.entry(c.clone()).or_insert(wi);
            profile.marks.insert(c);
        }
    }
    let mut run = ctx.run;
    run.stats.nodes = 1;
    run.stats.max_profile = profile.len();
    Ok((profile, run))
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub decomposition: Option<TreeDecomposition>,
    pub config: DpConfig,
}

#[derive(Clone, Debug)]
pub struct DcdOutcome {
    pub verdict: bool,
    pub deleted: VertexSet,
    /// Components of the remaining graph with their dominators.
    pub dominators: Vec<(VertexSet, VertexSet)>,
    /// Set when the reconstructed solution fails the independent check.
    pub certificate_error: Option<String>,
    pub q: usize,
    pub decomposition: TreeDecomposition,
    pub stats: DpStats,
    pub trace: Option<DpTrace>,
    pub bag_graphs: Vec<BagGraphRecord>,
    pub profiles: Vec<NodeProfile>,
}

/// Builds (or checks) a decomposition, regularizes it and certifies its
/// unbreakability parameter for deletion budget `k`.
pub fn prepare_decomposition(
    inst: &AnnotatedInstance,
    given: Option<&TreeDecomposition>,
) -> Result<(TreeDecomposition, usize), DpError> {
    let g = &inst.graph;
    let td = match given {
        Some(td) => td.clone(),
        None => build_decomposition(g, inst.k).0,
    };
    check_axioms(g, &td).map_err(DpError::Decomposition)?;
    let td = make_regular(g, &td);
    let q = certify_q(g, &td, inst.k);
    Ok((td, q))
}

pub(crate) fn merge_run(stats: &mut DpStats, run: &NodeRun) {
    stats.nodes += run.stats.nodes;
    stats.branches += run.stats.branches;
    stats.leaves += run.stats.leaves;
    stats.local_solutions += run.stats.local_solutions;
    stats.max_profile = stats.max_profile.max(run.stats.max_profile);
    stats.bag_graph_vertices += run.stats.bag_graph_vertices;
}

fn reconstruct(
    profiles: &[Option<NodeProfile>],
    td: &TreeDecomposition,
    x: usize,
    m: &Mark,
    del: &mut VertexSet,
    dom: &mut VertexSet,
) -> Result<(), String> {
    let p = profiles[x].as_ref().ok_or("profile missing")?;
    let w = p.witness(m).ok_or_else(|| format!("mark without witness at node {x}"))?;
    *del = del.union(&w.deleted);
    *dom = dom.union(&w.dominators);
    for (&y, cm) in td.children(x).iter().zip(&w.child_marks) {
        reconstruct(profiles, td, y, cm, del, dom)?;
    }
    Ok(())
}

/// Annotated deletion to dominated clusters through the profile dynamic
/// program.
pub fn solve_adcd(inst: &AnnotatedInstance, options: &SolveOptions) -> Result<DcdOutcome, DpError> {
    let (td, q) = prepare_decomposition(inst, options.decomposition.as_ref())?;
    let config = &options.config;
    let mut profiles: Vec<Option<NodeProfile>> = vec![None; td.len()];
    let mut stats = DpStats { q, ..DpStats::default() };
    let mut trace = config.record_trace.then(|| DpTrace { beta: inst.k + q * inst.d, trees: Vec::new() });
    let mut bag_graphs = Vec::new();
    for x in td.postorder() {
        let kids: Vec<&NodeProfile> =
            td.children(x).iter().map(|&y| profiles[y].as_ref().expect("postorder")).collect();
        let (p, run) = compute_profile(inst, &td, x, &kids, q, config)?;
        merge_run(&mut stats, &run);
        if let Some(t) = trace.as_mut() {
            t.trees.extend(run.trees);
        }
        bag_graphs.extend(run.bag_graphs);
        profiles[x] = Some(p);
    }
    let root = td.root();
    let best = profiles[root].as_ref().and_then(|p| p.marks.iter().next().cloned());
    let mut out = DcdOutcome {
        verdict: best.is_some(),
        deleted: VertexSet::new(),
        dominators: Vec::new(),
        certificate_error: None,
        q,
        decomposition: td.clone(),
        stats,
        trace,
        bag_graphs,
        profiles: Vec::new(),
    };
    if let Some(m) = best {
        let (mut del, mut dom) = (VertexSet::new(), VertexSet::new());
        match reconstruct(&profiles, &td, root, &m, &mut del, &mut dom)
            .and_then(|_| super::verify_dcd_certificate(inst, &del, &dom))
        {
            Ok(comps) => {
                out.deleted = del;
                out.dominators = comps;
            }
            Err(e) => out.certificate_error = Some(e),
        }
    }
    out.profiles = profiles.into_iter().flatten().collect();
    Ok(out)
}
