//! Extended profiles for annotated elimination distance to dominated
//! clusters, computed bottom-up.

use std::collections::{BTreeSet, HashMap};

use crate::decomposition::TreeDecomposition;
use crate::etree::EliminationTree;
use crate::graph::{AnnotatedInstance, VertexSet};

use super::dcd::{merge_run, prepare_decomposition, NodeRun, SolveOptions};
use super::extended::{minimal_extended, ExtendedMark, LevelClass};
use super::mark::Part;
use super::trace::{Color, DpTrace, TraceTree};
use super::{classes, domination_options, verify_domination, DomOption, DpConfig, DpError, DpStats, Fault};

#[derive(Clone, Debug)]
struct Witness {
    child_marks: Vec<ExtendedMark>,
    layers: Vec<VertexSet>,
    dominators: VertexSet,
}

#[derive(Clone, Debug)]
pub struct ExtendedProfile {
    pub node: usize,
    pub adhesion: VertexSet,
    pub marks: BTreeSet<ExtendedMark>,
    pub minimal: Vec<ExtendedMark>,
    witness_of: HashMap<ExtendedMark, usize>,
    witnesses: Vec<Witness>,
}

impl ExtendedProfile {
    pub fn contains(&self, m: &ExtendedMark) -> bool {
        self.witness_of.contains_key(m)
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }

    fn witness(&self, m: &ExtendedMark) -> Option<&Witness> {
        self.witness_of.get(m).map(|&i| &self.witnesses[i])
    }
}

#[derive(Clone)]
enum Choice<'a> {
    Mark(&'a ExtendedMark),
    Neutral,
}

#[derive(Clone)]
struct State<'a> {
    layers: Vec<VertexSet>,
    dom: VertexSet,
    keep: VertexSet,
    hidden: Vec<usize>,
    c: usize,
    chosen: Vec<Choice<'a>>,
}

fn union_all(sets: &[VertexSet]) -> VertexSet {
    sets.iter().fold(VertexSet::new(), |acc, s| acc.union(s))
}

impl State<'_> {
    fn decided(&self) -> VertexSet {
        union_all(&self.layers).union(&self.dom).union(&self.keep)
    }
}

/// Zero-cost mark: singleton classes and parts, nothing hidden, nothing
/// undominated.
fn neutral_mark(adh: &VertexSet, layers: &[VertexSet], dom: &VertexSet) -> ExtendedMark {
    let lay: Vec<VertexSet> = layers.iter().map(|l| l.intersection(adh)).collect();
    let dominators = adh.intersection(dom);
    let mut removed = VertexSet::new();
    let mut levels = Vec::with_capacity(lay.len());
    for l in &lay {
        levels.push(
            adh.difference(&removed).iter().map(|v| LevelClass { members: VertexSet::singleton(v), hidden: false }).collect(),
        );
        removed = removed.union(l);
    }
    ExtendedMark {
        parts: adh
            .difference(&removed)
            .iter()
            .map(|v| Part { members: VertexSet::singleton(v), budget: usize::from(dominators.contains(v)) })
            .collect(),
        layers: lay,
        dominators,
        undominated: VertexSet::new(),
        levels,
    }
}

struct Ctx<'a> {
    inst: &'a AnnotatedInstance,
    q: usize,
    config: &'a DpConfig,
    bag: VertexSet,
    a: VertexSet,
    prefix_layers: Vec<VertexSet>,
    adhs: Vec<VertexSet>,
    child: Vec<&'a ExtendedProfile>,
    derived: HashMap<ExtendedMark, Witness>,
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

    fn apply(&self, st: &State<'a>, m: &'a ExtendedMark, adh: &VertexSet) -> Option<State<'a>> {
        let ignore_deletions = self.config.fault == Some(Fault::IgnoreDeletionConsistency);
        let k = self.inst.k;
        let mut next = st.clone();
        let layer_of = |layers: &[VertexSet], v: usize| layers.iter().position(|l| l.contains(v));
        for v in adh {
            let want_layer = layer_of(&m.layers, v);
            let want_dom = m.dominators.contains(v);
            let cur_layer = layer_of(&st.layers, v);
            let (cur_dom, cur_keep) = (st.dom.contains(v), st.keep.contains(v));
            if cur_layer.is_none() && !cur_dom && !cur_keep {
                match want_layer {
                    Some(i) => {
                        next.layers[i].insert(v);
                    }
                    None if want_dom => {
                        next.dom.insert(v);
                    }
                    None => {
                        next.keep.insert(v);
                    }
                }
            } else if want_layer != cur_layer || want_dom != cur_dom {
                if ignore_deletions && (want_layer.is_some() || cur_layer.is_some()) {
                    continue;
                }
                return None;
            }
        }
        for (h, c) in next.hidden.iter_mut().zip(m.hidden_counts()) {
            *h += c;
        }
        next.c += m.parts.iter().map(|p| m.extra(p)).sum::<usize>();
        if self.config.layer_gate && (0..k).any(|i| next.layers[i].len() + next.hidden[i] > self.q * k) {
            return None;
        }
        if self.config.dominator_gate && next.dom.len() + next.c > (self.q + 1) * self.inst.d {
            return None;
        }
        next.chosen.push(Choice::Mark(m));
        Some(next)
    }

    fn branch(&mut self, i: usize, st: State<'a>, tnode: usize) -> Result<(), DpError> {
        if i == self.adhs.len() {
            self.run.stats.leaves += 1;
            let und = self.bag.difference(&st.decided());
            let layers = st.layers.clone();
            self.level(&st, 0, layers, und, Vec::new());
            return Ok(());
        }
        let adh = self.adhs[i];
        let prof = self.child[i];
        if self.config.shortcut {
            let n = neutral_mark(&adh, &st.layers, &st.dom);
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

    /// Chooses the bag vertices of layer `i`: each component of the bag
    /// minus the earlier layers, joined through the children, gets at most
    /// one layer-`i` vertex counting those hidden below the children.
    fn level(&mut self, st: &State<'a>, i: usize, layers: Vec<VertexSet>, und: VertexSet, mut levels: Vec<Vec<LevelClass>>) {
        let inst = self.inst;
        let g = &inst.graph;
        if i == inst.k {
            self.finish(st, &layers, &und, levels);
            return;
        }
        let removed = union_all(&layers[..i]);
        let alive = self.bag.difference(&removed);
        let mut links: Vec<LevelClass> = Vec::new();
        for ch in &st.chosen {
            if let Choice::Mark(m) = ch {
                links.extend(m.levels[i].iter().cloned());
            }
        }
        let link_sets: Vec<VertexSet> = links.iter().map(|l| l.members).collect();
        let comps = classes(g, &alive, &link_sets);
        let mut choices: Vec<Vec<Option<usize>>> = Vec::with_capacity(comps.len());
        let mut hidden_below: Vec<bool> = Vec::with_capacity(comps.len());
        for comp in &comps {
            let below = links.iter().filter(|l| l.hidden && l.members.is_subset(comp)).count();
            let count = layers[i].intersection(comp).len() + below;
            if count > 1 {
                return;
            }
            hidden_below.push(below > 0);
            let mut opts = vec![None];
            if count == 0 {
                opts.extend(und.intersection(comp).difference(&inst.forbidden).iter().map(Some));
            }
            choices.push(opts);
        }
        let mut idx = vec![0usize; comps.len()];
        levels.push(Vec::new());
        loop {
            let mut layer = layers[i];
            let mut und2 = und;
            for (opts, &j) in choices.iter().zip(&idx) {
                if let Some(v) = opts[j] {
                    layer.insert(v);
                    und2.remove(v);
                }
            }
            let mut here = Vec::new();
            for (comp, &below) in comps.iter().zip(&hidden_below) {
                let members = comp.intersection(&self.a);
                if !members.is_empty() {
                    let hidden = below || !layer.intersection(comp).difference(&self.a).is_empty();
                    here.push(LevelClass { members, hidden });
                }
            }
            here.sort_by_key(|c| c.members.first());
            *levels.last_mut().unwrap() = here;
            let mut next_layers = layers.clone();
            next_layers[i] = layer;
            self.level(st, i + 1, next_layers, und2, levels.clone());
            let mut t = 0;
            while t < idx.len() && idx[t] + 1 == choices[t].len() {
                idx[t] = 0;
                t += 1;
            }
            if t == idx.len() {
                break;
            }
            idx[t] += 1;
        }
    }

    fn finish(&mut self, st: &State<'a>, layers: &[VertexSet], und: &VertexSet, levels: Vec<Vec<LevelClass>>) {
        let inst = self.inst;
        let g = &inst.graph;
        let d = inst.d;
        let deleted = union_all(layers);
        let alive = self.bag.difference(&deleted);
        let mut parts = Vec::new();
        let mut covered = VertexSet::new();
        for (ci, ch) in st.chosen.iter().enumerate() {
            if let Choice::Mark(m) = ch {
                for p in &m.parts {
                    parts.push((p.members, m.extra(p)));
                }
                covered = covered.union(&self.adhs[ci].difference(&m.undominated));
            }
        }
        let need = inst
            .red
            .intersection(&alive)
            .difference(&covered)
            .difference(&g.closed_neighborhood(&st.dom));
        let links: Vec<VertexSet> = parts.iter().map(|p| p.0).collect();
        let mut chosen_dom = st.dom;
        let mut touching: Vec<(VertexSet, Vec<DomOption>)> = Vec::new();
        for comp in classes(g, &alive, &links) {
            let fixed =
                parts.iter().filter(|p| p.0.is_subset(&comp)).map(|p| p.1).sum::<usize>() + st.dom.intersection(&comp).len();
            if fixed > d {
                return;
            }
            let need_here = need.intersection(&comp);
            let cand = inst.blue.intersection(und).intersection(&comp);
            let boundary = need_here.intersection(&self.a);
            let opts = domination_options(g, &cand, &need_here.difference(&self.a), &boundary, fixed, d - fixed);
            if opts.is_empty() {
                return;
            }
            let touch = comp.intersection(&self.a);
            if touch.is_empty() {
                chosen_dom = chosen_dom.union(&opts[0].chosen);
            } else {
                touching.push((touch, opts));
            }
        }
        self.run.stats.local_solutions += 1;
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
            let m = ExtendedMark {
                layers: self.prefix_layers.clone(),
                dominators: st.dom.intersection(&self.a),
                undominated,
                levels: levels.clone(),
                parts: mparts,
            };
            if !self.derived.contains_key(&m) {
                let child_marks = st
                    .chosen
                    .iter()
                    .zip(&self.adhs)
                    .map(|(ch, adh)| match ch {
                        Choice::Mark(cm) => (*cm).clone(),
                        Choice::Neutral => neutral_mark(adh, layers, &dom),
                    })
                    .collect();
                self.derived.insert(m, Witness { child_marks, layers: layers.to_vec(), dominators: dom });
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
}

/// Computes the extended profile of `adh(x)` in `cone(x)`.
pub fn compute_extended_profile(
    inst: &AnnotatedInstance,
    td: &TreeDecomposition,
    x: usize,
    children: &[&ExtendedProfile],
    q: usize,
    config: &DpConfig,
) -> Result<(ExtendedProfile, NodeRun), DpError> {
    let k = inst.k;
    let a = td.adhesion(x);
    let mut ctx = Ctx {
        inst,
        q,
        config,
        bag: td.bag(x),
        a,
        prefix_layers: vec![VertexSet::new(); k],
        adhs: td.children(x).iter().map(|&y| td.adhesion(y)).collect(),
        child: children.to_vec(),
        derived: HashMap::new(),
        run: NodeRun::default(),
        tree: None,
    };
    let alpha = children.iter().map(|p| p.len()).max().unwrap_or(0);
    let av = a.to_vec();
    // Per adhesion vertex: layer 0..k-1, then k = dominator, k+1 = kept.
    let mut assign = vec![0usize; av.len()];
    loop {
        let valid = av.iter().zip(&assign).all(|(&v, &s)| {
            if s < k {
                !inst.forbidden.contains(v)
            } else if s == k {
                inst.blue.contains(v)
            } else {
                true
            }
        });
        if valid {
            let mut st = State {
                layers: vec![VertexSet::new(); k],
                dom: VertexSet::new(),
                keep: VertexSet::new(),
                hidden: vec![0; k],
                c: 0,
                chosen: Vec::new(),
            };
            for (&v, &s) in av.iter().zip(&assign) {
                if s < k {
                    st.layers[s].insert(v);
                } else if s == k {
                    st.dom.insert(v);
                } else {
                    st.keep.insert(v);
                }
            }
            ctx.prefix_layers = st.layers.clone();
            if config.record_trace {
                ctx.tree = Some(TraceTree::new(x, alpha));
            }
            ctx.branch(0, st, 0)?;
            if let Some(t) = ctx.tree.take() {
                ctx.run.trees.push(t);
            }
        }
        let mut i = 0;
        while i < assign.len() && assign[i] == k + 1 {
            assign[i] = 0;
            i += 1;
        }
        if i == assign.len() {
            break;
        }
        assign[i] += 1;
    }
    let mut profile = ExtendedProfile {
        node: x,
        adhesion: a,
        marks: BTreeSet::new(),
        minimal: minimal_extended(ctx.derived.keys()),
        witness_of: HashMap::new(),
        witnesses: Vec::new(),
    };
    let mut derived: Vec<(ExtendedMark, Witness)> = ctx.derived.into_iter().collect();
    derived.sort_by(|p, q| p.0.cmp(&q.0));
    for (m, w) in derived {
        let wi = profile.witnesses.len();
        profile.witnesses.push(w);
        for c in super::extended::closure(&m, &a, inst.d) {
            profile.witness_of.entry(c.clone()).or_insert(wi);
            profile.marks.insert(c);
        }
    }
    let mut run = ctx.run;
    run.stats.nodes = 1;
    run.stats.max_profile = profile.len();
    Ok((profile, run))
}

#[derive(Clone, Debug)]
pub struct EddcOutcome {
    pub verdict: bool,
    pub tree: EliminationTree,
    pub dominators: Vec<(VertexSet, VertexSet)>,
    pub certificate_error: Option<String>,
    pub q: usize,
    pub decomposition: TreeDecomposition,
    pub stats: DpStats,
    pub trace: Option<DpTrace>,
    pub profiles: Vec<ExtendedProfile>,
}

fn reconstruct(
    profiles: &[Option<ExtendedProfile>],
    td: &TreeDecomposition,
    x: usize,
    m: &ExtendedMark,
    layers: &mut [VertexSet],
    dom: &mut VertexSet,
) -> Result<(), String> {
    let p = profiles[x].as_ref().ok_or("profile missing")?;
    let w = p.witness(m).ok_or_else(|| format!("mark without witness at node {x}"))?;
    for (l, wl) in layers.iter_mut().zip(&w.layers) {
        *l = l.union(wl);
    }
    *dom = dom.union(&w.dominators);
    for (&y, cm) in td.children(x).iter().zip(&w.child_marks) {
        reconstruct(profiles, td, y, cm, layers, dom)?;
    }
    Ok(())
}

/// Checks an elimination forest and dominator set against the instance.
pub fn verify_eddc_certificate(
    inst: &AnnotatedInstance,
    tree: &EliminationTree,
    dominators: &VertexSet,
) -> Result<Vec<(VertexSet, VertexSet)>, String> {
    let g = &inst.graph;
    if tree.depth() > inst.k {
        return Err(format!("elimination depth {} exceeds k = {}", tree.depth(), inst.k));
    }
    let s = tree.vertex_set();
    if let Some(v) = s.intersection(&inst.forbidden).first() {
        return Err(format!("forbidden vertex {v} deleted"));
    }
    match tree.is_tree_structured(g) {
        Ok(true) => {}
        Ok(false) => return Err("deleted set is not tree-structured along the forest".into()),
        Err(e) => return Err(e.to_string()),
    }
    verify_domination(inst, &g.vertices().difference(&s), dominators)
}

/// Annotated elimination distance to dominated clusters through the
/// extended-profile dynamic program.
pub fn solve_aeddc(inst: &AnnotatedInstance, options: &SolveOptions) -> Result<EddcOutcome, DpError> {
    let (td, q) = prepare_decomposition(inst, options.decomposition.as_ref())?;
    let config = &options.config;
    let mut profiles: Vec<Option<ExtendedProfile>> = vec![None; td.len()];
    let mut stats = DpStats { q, ..DpStats::default() };
    let mut trace = config.record_trace.then(|| DpTrace { beta: inst.k + q * inst.d, trees: Vec::new() });
    for x in td.postorder() {
        let kids: Vec<&ExtendedProfile> =
            td.children(x).iter().map(|&y| profiles[y].as_ref().expect("postorder")).collect();
        let (p, run) = compute_extended_profile(inst, &td, x, &kids, q, config)?;
        merge_run(&mut stats, &run);
        if let Some(t) = trace.as_mut() {
            t.trees.extend(run.trees);
        }
        profiles[x] = Some(p);
    }
    let root = td.root();
    let best = profiles[root].as_ref().and_then(|p| p.minimal.first().cloned());
    let mut out = EddcOutcome {
        verdict: best.is_some(),
        tree: EliminationTree::empty(),
        dominators: Vec::new(),
        certificate_error: None,
        q,
        decomposition: td.clone(),
        stats,
        trace,
        profiles: Vec::new(),
    };
    if let Some(m) = best {
        let mut layers = vec![VertexSet::new(); inst.k];
        let mut dom = VertexSet::new();
        let res = reconstruct(&profiles, &td, root, &m, &mut layers, &mut dom).and_then(|_| {
            let tree = EliminationTree::from_layers(&inst.graph, &layers);
            verify_eddc_certificate(inst, &tree, &dom).map(|c| (tree, c))
        });
        match res {
            Ok((tree, comps)) => {
                out.tree = tree;
                out.dominators = comps;
            }
            Err(e) => out.certificate_error = Some(e),
        }
    }
    out.profiles = profiles.into_iter().flatten().collect();
    Ok(out)
}
