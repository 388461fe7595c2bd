//! Simple undirected graphs over a bounded vertex universe, stored as
//! adjacency bitsets, plus the plain-text formats used by the tools.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

const WORDS: usize = 4;

/// Largest number of vertices a [`Graph`] may have.
pub const MAX_VERTICES: usize = WORDS * 64;

/// A set of vertex ids in `0..MAX_VERTICES`, as a fixed-width bit vector.
///
/// The total order is canonical: smaller sets first, then lexicographic
/// on the ascending id sequence.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct VertexSet([u64; WORDS]);

impl VertexSet {
    pub const fn new() -> Self {
        VertexSet([0; WORDS])
    }

    pub fn singleton(v: usize) -> Self {
        let mut s = Self::new();
        s.insert(v);
        s
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_VERTICES, "vertex universe too large");
        let mut s = Self::new();
        for (w, word) in s.0.iter_mut().enumerate() {
            let lo = w * 64;
            if n >= lo + 64 {
                *word = u64::MAX;
            } else if n > lo {
                *word = (1u64 << (n - lo)) - 1;
            }
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, v: usize) -> bool {
        let (w, b) = (v / 64, v % 64);
        let fresh = self.0[w] & (1 << b) == 0;
        self.0[w] |= 1 << b;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, v: usize) -> bool {
        let (w, b) = (v / 64, v % 64);
        let present = self.0[w] & (1 << b) != 0;
        self.0[w] &= !(1 << b);
        present
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < MAX_VERTICES && self.0[v / 64] & (1 << (v % 64)) != 0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn union(&self, other: &Self) -> Self {
        let mut r = *self;
        for i in 0..WORDS {
            r.0[i] |= other.0[i];
        }
        r
    }

    #[inline]
    pub fn intersection(&self, other: &Self) -> Self {
        let mut r = *self;
        for i in 0..WORDS {
            r.0[i] &= other.0[i];
        }
        r
    }

    #[inline]
    pub fn difference(&self, other: &Self) -> Self {
        let mut r = *self;
        for i in 0..WORDS {
            r.0[i] &= !other.0[i];
        }
        r
    }

    #[inline]
    pub fn is_subset(&self, other: &Self) -> bool {
        (0..WORDS).all(|i| self.0[i] & !other.0[i] == 0)
    }

    #[inline]
    pub fn is_disjoint(&self, other: &Self) -> bool {
        (0..WORDS).all(|i| self.0[i] & other.0[i] == 0)
    }

    #[inline]
    pub fn intersects(&self, other: &Self) -> bool {
        !self.is_disjoint(other)
    }

    pub fn first(&self) -> Option<usize> {
        for (w, &word) in self.0.iter().enumerate() {
            if word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn last(&self) -> Option<usize> {
        for w in (0..WORDS).rev() {
            if self.0[w] != 0 {
                return Some(w * 64 + 63 - self.0[w].leading_zeros() as usize);
            }
        }
        None
    }

    pub fn iter(&self) -> Iter {
        Iter { words: self.0, w: 0 }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self` with at most `max` elements, by size and then
    /// lexicographically.
    pub fn subsets_up_to(&self, max: usize) -> impl Iterator<Item = VertexSet> {
        let elems = self.to_vec();
        let top = max.min(elems.len());
        (0..=top).flat_map(move |size| Combinations::new(elems.clone(), size))
    }

    /// All subsets of `self` with exactly `size` elements, lexicographically.
    pub fn subsets_of_size(&self, size: usize) -> Combinations {
        Combinations::new(self.to_vec(), size)
    }
}

impl Ord for VertexSet {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len().cmp(&other.len()) {
            Ordering::Equal => {}
            o => return o,
        }
        let diff = VertexSet([
            self.0[0] ^ other.0[0],
            self.0[1] ^ other.0[1],
            self.0[2] ^ other.0[2],
            self.0[3] ^ other.0[3],
        ]);
        match diff.first() {
            None => Ordering::Equal,
            Some(v) if self.contains(v) => Ordering::Less,
            Some(_) => Ordering::Greater,
        }
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::new();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl IntoIterator for &VertexSet {
    type Item = usize;
    type IntoIter = Iter;
    fn into_iter(self) -> Iter {
        self.iter()
    }
}

pub struct Iter {
    words: [u64; WORDS],
    w: usize,
}

impl Iterator for Iter {
    type Item = usize;
    #[inline]
    fn next(&mut self) -> Option<usize> {
        while self.w < WORDS {
            let word = self.words[self.w];
            if word != 0 {
                self.words[self.w] = word & (word - 1);
                return Some(self.w * 64 + word.trailing_zeros() as usize);
            }
            self.w += 1;
        }
        None
    }
}

/// Lexicographic `size`-combinations of a sorted element list.
pub struct Combinations {
    elems: Vec<usize>,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(elems: Vec<usize>, size: usize) -> Self {
        let done = size > elems.len();
        Combinations { elems, idx: (0..size).collect(), done }
    }
}

impl Iterator for Combinations {
    type Item = VertexSet;
    fn next(&mut self) -> Option<VertexSet> {
        if self.done {
            return None;
        }
        let out: VertexSet = self.idx.iter().map(|&i| self.elems[i]).collect();
        let k = self.idx.len();
        let n = self.elems.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("{0} vertices exceed the supported maximum of {MAX_VERTICES}")]
    TooManyVertices(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing `p <n> <m>` header")]
    MissingHeader,
    #[error("malformed header")]
    MalformedHeader,
    #[error("duplicate header")]
    DuplicateHeader,
    #[error("malformed line")]
    MalformedLine,
    #[error("vertex id {0} out of range")]
    IdOutOfRange(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(usize, usize),
    #[error("header announces {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("{0} vertices exceed the supported maximum of {MAX_VERTICES}")]
    TooManyVertices(usize),
}

fn perr(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

/// An undirected simple graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        Ok(Graph { n, adj: vec![VertexSet::new(); n] })
    }

    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::VertexOutOfRange(x));
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.adj[u].contains(v) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    /// Appends `count` isolated vertices and returns the id of the first.
    pub fn add_vertices(&mut self, count: usize) -> Result<usize, GraphError> {
        let first = self.n;
        if first + count > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(first + count));
        }
        self.n += count;
        self.adj.resize(self.n, VertexSet::new());
        Ok(first)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    #[inline]
    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for u in 0..self.n {
            for v in self.adj[u].iter().filter(|&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    /// `N[s]`.
    pub fn closed_neighborhood(&self, s: &VertexSet) -> VertexSet {
        let mut r = *s;
        for v in s {
            r = r.union(&self.adj[v]);
        }
        r
    }

    /// `N(s) = N[s] \ s`.
    pub fn open_neighborhood(&self, s: &VertexSet) -> VertexSet {
        self.closed_neighborhood(s).difference(s)
    }

    /// The component of `G[alive]` containing `start`.
    pub fn component_of(&self, alive: &VertexSet, start: usize) -> VertexSet {
        let mut comp = VertexSet::singleton(start);
        let mut frontier = comp;
        while !frontier.is_empty() {
            let mut next = VertexSet::new();
            for v in &frontier {
                next = next.union(&self.adj[v]);
            }
            frontier = next.intersection(alive).difference(&comp);
            comp = comp.union(&frontier);
        }
        comp
    }

    /// Connected components of `G[alive]`, ordered by smallest vertex.
    pub fn components(&self, alive: &VertexSet) -> Vec<VertexSet> {
        let mut rest = *alive;
        let mut out = Vec::new();
        while let Some(v) = rest.first() {
            let c = self.component_of(&rest, v);
            rest = rest.difference(&c);
            out.push(c);
        }
        out
    }

    /// Connected components of `G - removed`.
    pub fn connected_components(&self, removed: &VertexSet) -> Vec<VertexSet> {
        self.components(&self.vertices().difference(removed))
    }

    pub fn is_connected_within(&self, alive: &VertexSet) -> bool {
        match alive.first() {
            None => true,
            Some(v) => self.component_of(alive, v) == *alive,
        }
    }

    /// Replaces every edge `uv` by two internally disjoint paths of length
    /// two. The new vertices of the `i`-th edge (in sorted edge order) are
    /// `n + 2i` and `n + 2i + 1`.
    pub fn double_subdivide(&self) -> Result<Graph, GraphError> {
        let edges = self.edges();
        let mut h = Graph::empty(self.n)?;
        h.add_vertices(2 * edges.len())?;
        for (i, &(u, v)) in edges.iter().enumerate() {
            for w in [self.n + 2 * i, self.n + 2 * i + 1] {
                h.add_edge(u, w)?;
                h.add_edge(w, v)?;
            }
        }
        Ok(h)
    }

    pub fn stats(&self) -> GraphStats {
        let max_degree = (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0);
        let mut alive = self.vertices();
        let mut degeneracy = 0;
        while !alive.is_empty() {
            let (v, d) = alive
                .iter()
                .map(|v| (v, self.adj[v].intersection(&alive).len()))
                .min_by_key(|&(v, d)| (d, v))
                .unwrap();
            degeneracy = degeneracy.max(d);
            alive.remove(v);
        }
        GraphStats { max_degree, degeneracy }
    }

    /// Reads the `p <n> <m>` / `e <u> <v>` format (1-based ids, `#` comments).
    pub fn parse(text: &str) -> Result<Graph, ParseError> {
        let mut g: Option<Graph> = None;
        let mut expected = 0;
        let mut found = 0;
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tok = content.split_whitespace();
            match tok.next() {
                Some("p") => {
                    if g.is_some() {
                        return Err(perr(line, ParseErrorKind::DuplicateHeader));
                    }
                    let nums: Vec<&str> = tok.collect();
                    if nums.len() != 2 {
                        return Err(perr(line, ParseErrorKind::MalformedHeader));
                    }
                    let n: usize = nums[0]
                        .parse()
                        .map_err(|_| perr(line, ParseErrorKind::MalformedHeader))?;
                    expected = nums[1]
                        .parse()
                        .map_err(|_| perr(line, ParseErrorKind::MalformedHeader))?;
                    g = Some(
                        Graph::empty(n)
                            .map_err(|_| perr(line, ParseErrorKind::TooManyVertices(n)))?,
                    );
                }
                Some("e") => {
                    let graph = g.as_mut().ok_or(perr(line, ParseErrorKind::MissingHeader))?;
                    let ids: Vec<&str> = tok.collect();
                    if ids.len() != 2 {
                        return Err(perr(line, ParseErrorKind::MalformedLine));
                    }
                    let mut uv = [0usize; 2];
                    for (slot, s) in uv.iter_mut().zip(&ids) {
                        let id: usize =
                            s.parse().map_err(|_| perr(line, ParseErrorKind::MalformedLine))?;
                        if id == 0 || id > graph.n {
                            return Err(perr(line, ParseErrorKind::IdOutOfRange(id)));
                        }
                        *slot = id - 1;
                    }
                    match graph.add_edge(uv[0], uv[1]) {
                        Ok(()) => {}
                        Err(GraphError::SelfLoop(v)) => {
                            return Err(perr(line, ParseErrorKind::SelfLoop(v + 1)))
                        }
                        Err(_) => {
                            return Err(perr(
                                line,
                                ParseErrorKind::DuplicateEdge(uv[0] + 1, uv[1] + 1),
                            ))
                        }
                    }
                    found += 1;
                }
                _ => return Err(perr(line, ParseErrorKind::MalformedLine)),
            }
        }
        let g = g.ok_or(perr(last_line.max(1), ParseErrorKind::MissingHeader))?;
        if found != expected {
            return Err(perr(last_line, ParseErrorKind::EdgeCountMismatch { expected, found }));
        }
        Ok(g)
    }

    /// Writes the canonical text form: header, then edges sorted with `u < v`.
    pub fn to_text(&self) -> String {
        let mut s = format!("p {} {}\n", self.n, self.m());
        for (u, v) in self.edges() {
            s.push_str(&format!("e {} {}\n", u + 1, v + 1));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub max_degree: usize,
    pub degeneracy: usize,
}

/// A graph with forbidden, red and blue vertices and the two budgets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedInstance {
    pub graph: Graph,
    pub forbidden: VertexSet,
    pub red: VertexSet,
    pub blue: VertexSet,
    pub k: usize,
    pub d: usize,
}

impl AnnotatedInstance {
    /// No forbidden vertices, every vertex red and blue.
    pub fn plain(graph: Graph, k: usize, d: usize) -> Self {
        let all = graph.vertices();
        AnnotatedInstance { graph, forbidden: VertexSet::new(), red: all, blue: all, k, d }
    }

    pub fn with_annotations(graph: Graph, ann: &Annotations, k: usize, d: usize) -> Self {
        AnnotatedInstance {
            graph,
            forbidden: ann.forbidden,
            red: ann.red,
            blue: ann.blue,
            k,
            d,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Annotations {
    pub forbidden: VertexSet,
    pub red: VertexSet,
    pub blue: VertexSet,
}

impl Annotations {
    /// Reads `F`, `R` and `B` lines of 1-based ids. A missing `F` line means
    /// nothing is forbidden; a missing `R` or `B` line means every vertex.
    pub fn parse(text: &str, n: usize) -> Result<Annotations, ParseError> {
        let mut sets: [Option<VertexSet>; 3] = [None; 3];
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tok = content.split_whitespace();
            let slot = match tok.next() {
                Some("F") => 0,
                Some("R") => 1,
                Some("B") => 2,
                _ => return Err(perr(line, ParseErrorKind::MalformedLine)),
            };
            let set = sets[slot].get_or_insert(VertexSet::new());
            for s in tok {
                let id: usize = s.parse().map_err(|_| perr(line, ParseErrorKind::MalformedLine))?;
                if id == 0 || id > n {
                    return Err(perr(line, ParseErrorKind::IdOutOfRange(id)));
                }
                set.insert(id - 1);
            }
        }
        let all = VertexSet::full(n);
        Ok(Annotations {
            forbidden: sets[0].unwrap_or_default(),
            red: sets[1].unwrap_or(all),
            blue: sets[2].unwrap_or(all),
        })
    }

    pub fn to_text(&self) -> String {
        let line = |tag: &str, s: &VertexSet| {
            let mut out = tag.to_string();
            for v in s {
                out.push_str(&format!(" {}", v + 1));
            }
            out.push('\n');
            out
        };
        format!("{}{}{}", line("F", &self.forbidden), line("R", &self.red), line("B", &self.blue))
    }
}

/// Common small graphs.
pub mod named {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &e).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            e.push((0, n - 1));
        }
        Graph::new(n, &e).unwrap()
    }

    pub fn clique(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::new(n, &e).unwrap()
    }

    pub fn edgeless(n: usize) -> Graph {
        Graph::empty(n).unwrap()
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        let e: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::new(leaves + 1, &e).unwrap()
    }

    /// `K_{n,n}` minus a perfect matching: sides `0..n` and `n..2n`,
    /// `i ~ n + j` iff `i != j`.
    pub fn crown(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    e.push((i, n + j));
                }
            }
        }
        Graph::new(2 * n, &e).unwrap()
    }

    /// Half graph: `a_i = i`, `b_j = n + j`, `a_i ~ b_j` iff `i > j`.
    pub fn half_graph(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in 0..i {
                e.push((i, n + j));
            }
        }
        Graph::new(2 * n, &e).unwrap()
    }

    /// `K_n` with every edge subdivided once.
    pub fn subdivided_clique(n: usize) -> Graph {
        let mut g = Graph::empty(n).unwrap();
        for u in 0..n {
            for v in u + 1..n {
                let w = g.add_vertices(1).unwrap();
                g.add_edge(u, w).unwrap();
                g.add_edge(w, v).unwrap();
            }
        }
        g
    }

    /// Disjoint union of `a` and `b`; `b`'s vertices are shifted by `a.n()`.
    pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
        let mut g = a.clone();
        let off = g.add_vertices(b.n()).unwrap();
        for (u, v) in b.edges() {
            g.add_edge(u + off, v + off).unwrap();
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    fn set(v: &[usize]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn parse_small_graphs() {
        let g = Graph::parse("p 2 1\ne 1 2\n").unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        let g = Graph::parse("# nothing\np 3 0\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 0));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = Graph::parse("p 2 1\ne 1 1\n").unwrap_err();
        assert_eq!(e, ParseError { line: 2, kind: ParseErrorKind::SelfLoop(1) });
        let e = Graph::parse("p 2 2\ne 1 2\ne 2 1\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(matches!(e.kind, ParseErrorKind::DuplicateEdge(..)));
        let e = Graph::parse("p 2 1\ne 1 3\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::IdOutOfRange(3));
        assert_eq!(Graph::parse("p x 1\n").unwrap_err().kind, ParseErrorKind::MalformedHeader);
        assert_eq!(Graph::parse("e 1 2\n").unwrap_err().kind, ParseErrorKind::MissingHeader);
        assert!(matches!(
            Graph::parse("p 3 2\ne 1 2\n").unwrap_err().kind,
            ParseErrorKind::EdgeCountMismatch { expected: 2, found: 1 }
        ));
    }

    #[test]
    fn text_round_trip() {
        let text = "p 4 3\ne 1 2\ne 1 4\ne 3 4\n";
        let g = Graph::parse(text).unwrap();
        assert_eq!(g.to_text(), text);
        assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn components_after_removal() {
        let c = cycle(6).connected_components(&set(&[0, 3]));
        assert_eq!(c, vec![set(&[1, 2]), set(&[4, 5])]);
        let c = path(9).connected_components(&set(&[3, 7]));
        assert_eq!(c, vec![set(&[0, 1, 2]), set(&[4, 5, 6]), set(&[8])]);
    }

    #[test]
    fn closed_neighborhoods() {
        let s = star(4);
        assert_eq!(s.closed_neighborhood(&set(&[0])), s.vertices());
        assert_eq!(path(5).closed_neighborhood(&set(&[2])), set(&[1, 2, 3]));
    }

    #[test]
    fn double_subdivisions() {
        let h = clique(2).double_subdivide().unwrap();
        assert_eq!((h.n(), h.m()), (4, 4));
        assert!(h.stats().max_degree == 2 && h.components(&h.vertices()).len() == 1);
        let h = clique(3).double_subdivide().unwrap();
        assert_eq!((h.n(), h.m()), (9, 12));
    }

    #[test]
    fn stats() {
        assert_eq!(cycle(6).stats(), GraphStats { max_degree: 2, degeneracy: 2 });
        assert_eq!(clique(5).stats(), GraphStats { max_degree: 4, degeneracy: 4 });
        assert_eq!(clique(4).double_subdivide().unwrap().stats().degeneracy, 2);
    }

    #[test]
    fn vertex_set_order_and_subsets() {
        assert!(set(&[5]) < set(&[0, 1]));
        assert!(set(&[0, 9]) < set(&[1, 2]));
        let all: Vec<_> = set(&[1, 3, 4]).subsets_up_to(2).collect();
        assert_eq!(
            all,
            vec![
                set(&[]),
                set(&[1]),
                set(&[3]),
                set(&[4]),
                set(&[1, 3]),
                set(&[1, 4]),
                set(&[3, 4])
            ]
        );
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all);
        assert_eq!(VertexSet::full(70).len(), 70);
        assert_eq!(VertexSet::full(70).last(), Some(69));
    }

    #[test]
    fn annotations_defaults() {
        let a = Annotations::parse("F 2\nR 1 3\n", 3).unwrap();
        assert_eq!(a.forbidden, set(&[1]));
        assert_eq!(a.red, set(&[0, 2]));
        assert_eq!(a.blue, set(&[0, 1, 2]));
        assert_eq!(Annotations::parse(&a.to_text(), 3).unwrap(), a);
        assert_eq!(Annotations::parse("R 4\n", 3).unwrap_err().kind, ParseErrorKind::IdOutOfRange(4));
    }
}
