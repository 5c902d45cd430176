//! Pointed graphs labelled by `X±` with an involutive edge pairing.
//!
//! Edges are stored as half-edge pairs: pair `k` owns half-edges `2k`
//! (the direct edge, positively labelled) and `2k + 1` (its reverse, labelled
//! by the inverse letter). Edge ids in the public API are pair ids.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::fingroup::FactorPair;
use crate::union_find::UnionFind;
use crate::words::{free_reduce, Factor, Letter, Word};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} does not exist")]
    NoSuchVertex(usize),
    #[error("vertex {vertex} is not saturated: no outgoing edge labelled {letter:?}")]
    NotSaturated { vertex: usize, letter: Letter },
    #[error("vertex {0} is not in the component")]
    NotInComponent(usize),
    #[error("monochromatic component {0} is not a tree")]
    NotATree(usize),
    #[error("word cannot be read from vertex {from}: stuck at letter {position}")]
    Untraceable { from: usize, position: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfEdge {
    pub from: usize,
    pub to: usize,
    pub label: Letter,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    halves: Vec<HalfEdge>,
    /// Outgoing half-edge ids per vertex, sorted by (label, id).
    out: Vec<Vec<usize>>,
    basepoint: usize,
}

/// Colour class of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexClass {
    Monochromatic(Factor),
    Bichromatic,
    Isolated,
}

/// A maximal connected one-colour subgraph with at least one edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoComponent {
    pub id: usize,
    pub factor: Factor,
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    /// Sorted edge (pair) ids.
    pub edges: Vec<usize>,
    /// `VB(C)`: vertices of `C` that are bichromatic in the whole graph.
    pub bichromatic: Vec<usize>,
    /// `VM(C)`: the remaining vertices of `C`.
    pub monochromatic: Vec<usize>,
}

impl MonoComponent {
    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub list: Vec<MonoComponent>,
    pub classes: Vec<VertexClass>,
    /// Per vertex, the ids of the components it belongs to (at most one per colour).
    pub membership: Vec<Vec<usize>>,
}

/// A BFS spanning tree, rooted, with a unique tree path to each reached vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    /// Half-edge entering each reached non-root vertex from its parent.
    parent: Vec<Option<usize>>,
    reached: Vec<bool>,
    /// Sorted edge (pair) ids of the tree.
    pub edges: Vec<usize>,
}

impl SpanningTree {
    pub fn reaches(&self, v: usize) -> bool {
        self.reached.get(v).copied().unwrap_or(false)
    }

    pub fn contains_edge(&self, pair: usize) -> bool {
        self.edges.binary_search(&pair).is_ok()
    }

    /// Label of the tree path from the root to `v`.
    pub fn path_label(&self, graph: &LabeledGraph, v: usize) -> Word {
        let mut letters = Vec::new();
        let mut cur = v;
        while let Some(h) = self.parent[cur] {
            let he = graph.halves[h];
            letters.push(he.label);
            cur = he.from;
        }
        letters.reverse();
        Word::from_letters(letters)
    }
}

impl LabeledGraph {
    pub fn new(vertices: usize, basepoint: usize) -> Self {
        assert!(basepoint < vertices.max(1), "basepoint out of range");
        LabeledGraph {
            halves: Vec::new(),
            out: vec![Vec::new(); vertices.max(1)],
            basepoint,
        }
    }

    /// One vertex, no edges: the graph of the trivial subgroup.
    pub fn single_vertex() -> Self {
        LabeledGraph::new(1, 0)
    }

    pub fn add_vertex(&mut self) -> usize {
        self.out.push(Vec::new());
        self.out.len() - 1
    }

    /// Adds the edge `from --letter--> to` together with its reverse and
    /// returns its pair id. An inverse letter is stored as the reverse half
    /// of a positively labelled direct edge.
    pub fn add_edge(&mut self, from: usize, letter: Letter, to: usize) -> usize {
        let (from, label, to) = if letter.inverse {
            (to, letter.inv(), from)
        } else {
            (from, letter, to)
        };
        let k = self.halves.len() / 2;
        self.halves.push(HalfEdge { from, to, label });
        self.halves.push(HalfEdge {
            from: to,
            to: from,
            label: label.inv(),
        });
        self.insert_out(2 * k);
        self.insert_out(2 * k + 1);
        k
    }

    fn insert_out(&mut self, h: usize) {
        let he = self.halves[h];
        let key = (he.label, h);
        let list = &mut self.out[he.from];
        let pos = list
            .binary_search_by(|&x| (self.halves[x].label, x).cmp(&key))
            .unwrap_or_else(|p| p);
        list.insert(pos, h);
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    /// Number of geometric edges (direct/reverse pairs).
    pub fn edge_count(&self) -> usize {
        self.halves.len() / 2
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn with_basepoint(&self, v: usize) -> Result<LabeledGraph, GraphError> {
        if v >= self.vertex_count() {
            return Err(GraphError::NoSuchVertex(v));
        }
        Ok(LabeledGraph {
            basepoint: v,
            ..self.clone()
        })
    }

    pub fn half(&self, h: usize) -> &HalfEdge {
        &self.halves[h]
    }

    /// The direct (positively labelled) half of edge `pair`.
    pub fn edge(&self, pair: usize) -> &HalfEdge {
        &self.halves[2 * pair]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, &HalfEdge)> {
        self.halves.iter().step_by(2).enumerate()
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    /// Target of the first outgoing edge labelled `letter`.
    pub fn follow(&self, v: usize, letter: Letter) -> Option<usize> {
        self.out[v]
            .iter()
            .map(|&h| &self.halves[h])
            .find(|he| he.label == letter)
            .map(|he| he.to)
    }

    /// The first vertex and letter where two outgoing edges share a label.
    pub fn is_well_labelled(&self) -> Result<(), (usize, Letter)> {
        for (v, list) in self.out.iter().enumerate() {
            for w in list.windows(2) {
                if self.halves[w[0]].label == self.halves[w[1]].label {
                    return Err((v, self.halves[w[0]].label));
                }
            }
        }
        Ok(())
    }

    /// `v · w`: the endpoint of the path labelled `w` from `v`, or the index
    /// of the first letter that cannot be read.
    pub fn trace(&self, v: usize, w: &Word) -> Result<usize, usize> {
        let mut cur = v;
        for (i, &l) in w.iter().enumerate() {
            cur = self.follow(cur, l).ok_or(i)?;
        }
        Ok(cur)
    }

    /// Stallings folding to a well-labelled quotient, canonically renumbered.
    pub fn fold_all(&self) -> LabeledGraph {
        let order: Vec<usize> = (0..self.vertex_count()).collect();
        self.fold_all_in_order(&order)
    }

    /// Folding that seeds the worklist with `order` (first entry processed
    /// first). Any order yields the same pointed graph.
    pub fn fold_all_in_order(&self, order: &[usize]) -> LabeledGraph {
        let n = self.vertex_count();
        let mut uf = UnionFind::new(n);
        let mut out = self.out.clone();
        let mut dead = vec![false; self.edge_count()];
        let mut work: Vec<usize> = order.iter().rev().copied().filter(|&v| v < n).collect();
        while let Some(v) = work.pop() {
            let v = uf.find(v);
            let list = std::mem::take(&mut out[v]);
            let mut seen: Vec<(Letter, usize)> = Vec::new();
            let mut kept = Vec::with_capacity(list.len());
            let mut merged = false;
            for h in list {
                if dead[h / 2] {
                    continue;
                }
                let label = self.halves[h].label;
                // A kept half may belong to a pair killed later in this pass.
                if let Some(pos) = seen.iter().position(|&(l, g)| l == label && dead[g / 2]) {
                    seen.swap_remove(pos);
                }
                match seen.iter().find(|(l, _)| *l == label) {
                    Some(&(_, g)) => {
                        dead[h / 2] = true;
                        let a = uf.find(self.halves[g].to);
                        let b = uf.find(self.halves[h].to);
                        if let Some((root, absorbed)) = uf.union(a, b) {
                            let moved = std::mem::take(&mut out[absorbed]);
                            out[root].extend(moved);
                            work.push(root);
                            merged = true;
                        }
                    }
                    None => {
                        seen.push((label, h));
                        kept.push(h);
                    }
                }
            }
            let r = uf.find(v);
            out[r].extend(kept);
            if merged {
                work.push(r);
            }
        }

        let mut quotient = LabeledGraph::new(n, uf.find(self.basepoint));
        for (k, is_dead) in dead.iter().enumerate() {
            if !is_dead {
                let he = self.halves[2 * k];
                quotient.add_edge(uf.find(he.from), he.label, uf.find(he.to));
            }
        }
        quotient.canonical()
    }

    /// Renumbers breadth-first from the basepoint (letter order tie-break),
    /// dropping everything unreachable. The basepoint becomes vertex 0.
    /// For well-labelled graphs the result depends only on the pointed
    /// isomorphism class.
    pub fn canonical(&self) -> LabeledGraph {
        let n = self.vertex_count();
        let mut new_id = vec![usize::MAX; n];
        let mut order = vec![self.basepoint];
        new_id[self.basepoint] = 0;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &h in &self.out[v] {
                let t = self.halves[h].to;
                if new_id[t] == usize::MAX {
                    new_id[t] = order.len();
                    order.push(t);
                }
            }
        }
        let mut edges: Vec<(usize, Letter, usize)> = self
            .edges()
            .filter(|(_, he)| new_id[he.from] != usize::MAX)
            .map(|(_, he)| (new_id[he.from], he.label, new_id[he.to]))
            .collect();
        edges.sort();
        let mut g = LabeledGraph::new(order.len(), 0);
        for (f, l, t) in edges {
            g.add_edge(f, l, t);
        }
        g
    }

    /// Keeps the marked vertices and edges, renumbering in increasing order.
    /// Kept edges must join kept vertices; the basepoint must be kept.
    pub fn retain(&self, keep_vertex: &[bool], keep_edge: &[bool]) -> LabeledGraph {
        let mut new_id = vec![usize::MAX; self.vertex_count()];
        let mut count = 0;
        for (v, &keep) in keep_vertex.iter().enumerate() {
            if keep {
                new_id[v] = count;
                count += 1;
            }
        }
        let mut g = LabeledGraph::new(count, new_id[self.basepoint]);
        for (k, he) in self.edges() {
            if keep_edge[k] {
                g.add_edge(new_id[he.from], he.label, new_id[he.to]);
            }
        }
        g
    }

    /// The same vertex set without the listed edges (`V(Γ') = V(Γ)`).
    pub fn without_edges(&self, remove: &[usize]) -> LabeledGraph {
        let mut keep_edge = vec![true; self.edge_count()];
        for &k in remove {
            keep_edge[k] = false;
        }
        self.retain(&vec![true; self.vertex_count()], &keep_edge)
    }

    /// Iteratively removes edges with a degree-1 endpoint other than the
    /// basepoint; the basepoint is never removed.
    pub fn cut_hairs(&self) -> LabeledGraph {
        let n = self.vertex_count();
        let mut degree: Vec<usize> = self.out.iter().map(Vec::len).collect();
        let mut keep_vertex = vec![true; n];
        let mut keep_edge = vec![true; self.edge_count()];
        let mut stack: Vec<usize> = (0..n).rev().filter(|&v| v != self.basepoint && degree[v] <= 1).collect();
        while let Some(v) = stack.pop() {
            if !keep_vertex[v] || v == self.basepoint || degree[v] > 1 {
                continue;
            }
            if let Some(&h) = self.out[v].iter().find(|&&h| keep_edge[h / 2]) {
                keep_edge[h / 2] = false;
                let t = self.halves[h].to;
                degree[t] -= 1;
                if t != self.basepoint && degree[t] <= 1 {
                    stack.push(t);
                }
            }
            degree[v] = 0;
            keep_vertex[v] = false;
        }
        self.retain(&keep_vertex, &keep_edge)
    }

    pub fn vertex_class(&self, v: usize) -> VertexClass {
        let mut colours = [false; 2];
        for &h in &self.out[v] {
            colours[self.halves[h].label.factor.index()] = true;
        }
        match colours {
            [true, true] => VertexClass::Bichromatic,
            [true, false] => VertexClass::Monochromatic(Factor::First),
            [false, true] => VertexClass::Monochromatic(Factor::Second),
            [false, false] => VertexClass::Isolated,
        }
    }

    /// Monochromatic components in order of their lowest edge id, plus the
    /// colour class of every vertex.
    pub fn components(&self) -> Components {
        let n = self.vertex_count();
        let classes: Vec<VertexClass> = (0..n).map(|v| self.vertex_class(v)).collect();
        let mut comp_of_edge = vec![usize::MAX; self.edge_count()];
        let mut membership = vec![Vec::new(); n];
        let mut list = Vec::new();
        // A vertex lies in at most one component of each colour.
        let mut seen_vertex = [vec![false; n], vec![false; n]];
        for k in 0..self.edge_count() {
            if comp_of_edge[k] != usize::MAX {
                continue;
            }
            let id = list.len();
            let factor = self.halves[2 * k].label.factor;
            let seen_vertex = &mut seen_vertex[factor.index()];
            let mut vertices = vec![self.halves[2 * k].from];
            seen_vertex[vertices[0]] = true;
            let mut edges = Vec::new();
            let mut head = 0;
            while head < vertices.len() {
                let v = vertices[head];
                head += 1;
                for &h in &self.out[v] {
                    let he = self.halves[h];
                    if he.label.factor != factor {
                        continue;
                    }
                    if comp_of_edge[h / 2] == usize::MAX {
                        comp_of_edge[h / 2] = id;
                        edges.push(h / 2);
                    }
                    if !seen_vertex[he.to] {
                        seen_vertex[he.to] = true;
                        vertices.push(he.to);
                    }
                }
            }
            vertices.sort_unstable();
            edges.sort_unstable();
            for &v in &vertices {
                membership[v].push(id);
            }
            let (bichromatic, monochromatic) = vertices
                .iter()
                .partition(|&&v| classes[v] == VertexClass::Bichromatic);
            list.push(MonoComponent {
                id,
                factor,
                vertices,
                edges,
                bichromatic,
                monochromatic,
            });
        }
        Components {
            list,
            classes,
            membership,
        }
    }

    /// BFS spanning tree from `root`, over the whole graph or restricted to
    /// the edges of one monochromatic component.
    pub fn spanning_tree(&self, root: usize, scope: Option<&MonoComponent>) -> Result<SpanningTree, GraphError> {
        if root >= self.vertex_count() {
            return Err(GraphError::NoSuchVertex(root));
        }
        if let Some(c) = scope {
            if !c.contains(root) {
                return Err(GraphError::NotInComponent(root));
            }
        }
        let n = self.vertex_count();
        let mut parent = vec![None; n];
        let mut reached = vec![false; n];
        reached[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut edges = Vec::new();
        while let Some(v) = queue.pop_front() {
            for &h in &self.out[v] {
                let he = self.halves[h];
                if scope.is_some_and(|c| c.factor != he.label.factor) {
                    continue;
                }
                if !reached[he.to] {
                    reached[he.to] = true;
                    parent[he.to] = Some(h);
                    edges.push(h / 2);
                    queue.push_back(he.to);
                }
            }
        }
        edges.sort_unstable();
        Ok(SpanningTree {
            root,
            parent,
            reached,
            edges,
        })
    }

    /// The component as a stand-alone graph based at `root`.
    pub fn component_graph(&self, c: &MonoComponent, root: usize) -> Result<LabeledGraph, GraphError> {
        if !c.contains(root) {
            return Err(GraphError::NotInComponent(root));
        }
        let mut keep_vertex = vec![false; self.vertex_count()];
        for &v in &c.vertices {
            keep_vertex[v] = true;
        }
        let mut keep_edge = vec![false; self.edge_count()];
        for &k in &c.edges {
            keep_edge[k] = true;
        }
        let based = self.with_basepoint(root)?;
        Ok(based.retain(&keep_vertex, &keep_edge))
    }

    /// Whether `(g1, v1)` and `(g2, v2)` are isomorphic as pointed labelled
    /// graphs. Both must be well-labelled; the candidate map is forced by a
    /// simultaneous traversal from the basepoints.
    pub fn pointed_iso(g1: &LabeledGraph, v1: usize, g2: &LabeledGraph, v2: usize) -> bool {
        if g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
            return false;
        }
        if v1 >= g1.vertex_count() || v2 >= g2.vertex_count() {
            return false;
        }
        let n = g1.vertex_count();
        let mut map = vec![usize::MAX; n];
        let mut back = vec![usize::MAX; n];
        map[v1] = v2;
        back[v2] = v1;
        let mut queue = VecDeque::from([v1]);
        let mut mapped = 1;
        while let Some(u) = queue.pop_front() {
            let image = map[u];
            if g1.degree(u) != g2.degree(image) {
                return false;
            }
            for &h in g1.out_edges(u) {
                let he = g1.halves[h];
                let Some(t2) = g2.follow(image, he.label) else {
                    return false;
                };
                match map[he.to] {
                    usize::MAX => {
                        if back[t2] != usize::MAX {
                            return false;
                        }
                        map[he.to] = t2;
                        back[t2] = he.to;
                        mapped += 1;
                        queue.push_back(he.to);
                    }
                    known if known != t2 => return false,
                    _ => {}
                }
            }
        }
        mapped == n
    }

    /// Graphviz text: one arrow per direct edge, coloured by factor, the
    /// basepoint double-circled.
    pub fn to_dot(&self, pair: &FactorPair) -> String {
        let mut s = String::from("digraph subgroup_graph {\n  node [shape=circle];\n");
        for v in 0..self.vertex_count() {
            if v == self.basepoint {
                let _ = writeln!(s, "  {v} [shape=doublecircle];");
            } else {
                let _ = writeln!(s, "  {v};");
            }
        }
        for (_, he) in self.edges() {
            let colour = match he.label.factor {
                Factor::First => "blue",
                Factor::Second => "red",
            };
            let _ = writeln!(
                s,
                "  {} -> {} [label=\"{}\", color={colour}];",
                he.from,
                he.to,
                pair.label(he.label)
            );
        }
        s.push_str("}\n");
        s
    }

    /// `vertex label -> vertex`, one direct edge per line, sorted.
    pub fn adjacency_dump(&self, pair: &FactorPair) -> String {
        let mut lines: Vec<(usize, Letter, usize)> = self.edges().map(|(_, he)| (he.from, he.label, he.to)).collect();
        lines.sort();
        let mut s = format!("basepoint {}\n", self.basepoint);
        for (f, l, t) in lines {
            let _ = writeln!(s, "{f} {} -> {t}", pair.label(l));
        }
        s
    }
}

/// A bouquet of loops at a common basepoint, one per (freely reduced,
/// nonempty) generator word.
pub fn bouquet(gens: &[Word]) -> LabeledGraph {
    let mut g = LabeledGraph::single_vertex();
    for w in gens {
        let w = free_reduce(w);
        let len = w.len();
        let mut cur = 0;
        for (i, &l) in w.iter().enumerate() {
            let next = if i + 1 == len { 0 } else { g.add_vertex() };
            g.add_edge(cur, l, next);
            cur = next;
        }
    }
    g
}
