//! Kurosh decomposition read off a reduced precover.
//!
//! Components that are covers are visited in breadth-first order from the
//! basepoint's component. Each visit records `g_v Lab(C, v) g_v^-1` and cuts
//! `C` down to a spanning tree; what remains is a graph `Δ` whose
//! monochromatic components are trees and whose fundamental group is the
//! free factor.

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use crate::fingroup::{reidemeister_schreier, schreier_stabilizer, FactorPair, Gen, GroupError, Presentation};
use crate::lgraph::{GraphError, LabeledGraph, MonoComponent};
use crate::precover::{check_cover, subgroup_graph, SubgroupGraph};
use crate::words::{free_reduce, normalize, Factor, NormalWord, Word};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum KuroshError {
    #[error("the subgroup graph is not a certified reduced precover")]
    NotCertified,
    #[error("monochromatic component {0} of the residual graph is not a tree")]
    NotATree(usize),
    #[error("vertex {vertex} is not reachable from the basepoint")]
    Unreachable { vertex: usize },
    #[error("emitted word is not in the subgroup: {0:?}")]
    NotInSubgroup(Word),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// One free factor `g H_j g^-1` with `H_j ≤ G_i` nontrivial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugatedFactor {
    /// Label of the approach path from the basepoint.
    pub conjugator: Word,
    pub conjugator_normal: NormalWord,
    pub factor: Factor,
    /// Sorted element ids of `H_j = Lab(C, v)` in `G_i`.
    pub subgroup: Vec<usize>,
    /// Id of the source component among the components of `Γ(H)`.
    pub component: usize,
    /// Vertex where the approach path enters the component.
    pub vertex: usize,
}

#[derive(Clone, Debug)]
pub struct KuroshDecomposition {
    pub factors: Vec<ConjugatedFactor>,
    pub free_basis: Vec<Word>,
    pub delta: LabeledGraph,
    pub presentation: Option<Presentation<Word>>,
}

impl KuroshDecomposition {
    pub fn free_rank(&self) -> usize {
        self.free_basis.len()
    }

    /// Conjugates `g y g^-1` for every nontrivial `y` of every factor,
    /// followed by the free basis.
    pub fn generating_set(&self, pair: &FactorPair) -> Vec<Word> {
        let mut out = Vec::new();
        for f in &self.factors {
            let group = pair.factor(f.factor);
            for &y in &f.subgroup {
                if y != group.identity() {
                    let word = pair.lift(f.factor, group.shortest_word(y));
                    out.push(f.conjugator.conjugate(&word));
                }
            }
        }
        out.extend(self.free_basis.iter().cloned());
        out
    }
}

/// Cover components in processing order: the basepoint's component first,
/// then breadth-first through shared vertices.
pub fn mcc(g: &LabeledGraph, pair: &FactorPair) -> Vec<MonoComponent> {
    let comps = g.components();
    let n = comps.list.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let starts = comps.membership[g.basepoint()].iter().copied().chain(0..n);
    for start in starts {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            order.push(c);
            let mut next: Vec<usize> = comps.list[c]
                .bichromatic
                .iter()
                .flat_map(|&v| comps.membership[v].iter().copied())
                .filter(|&d| !seen[d])
                .collect();
            next.sort_unstable();
            next.dedup();
            for d in next {
                seen[d] = true;
                queue.push_back(d);
            }
        }
    }
    order
        .into_iter()
        .map(|c| comps.list[c].clone())
        .filter(|c| check_cover(g, c, pair).is_ok())
        .collect()
}

/// Shortest path from the basepoint to the first vertex of `c` reached.
fn approach(g: &LabeledGraph, c: &MonoComponent) -> Result<(usize, Word), KuroshError> {
    let v0 = g.basepoint();
    if c.contains(v0) {
        return Ok((v0, Word::new()));
    }
    let tree = g.spanning_tree(v0, None)?;
    let mut queue = VecDeque::from([v0]);
    let mut seen = vec![false; g.vertex_count()];
    seen[v0] = true;
    while let Some(u) = queue.pop_front() {
        for &h in g.out_edges(u) {
            let t = g.half(h).to;
            if !seen[t] {
                seen[t] = true;
                if c.contains(t) {
                    return Ok((t, tree.path_label(g, t)));
                }
                queue.push_back(t);
            }
        }
    }
    Err(KuroshError::Unreachable { vertex: c.vertices[0] })
}

/// Result of one basic step on a component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Factor(ConjugatedFactor),
    Trivial,
}

/// One basic step: `Lab(C, v)` conjugated by the approach word, and the
/// graph with the non-tree edges of `C` removed (vertex ids unchanged).
pub fn basic_step(
    g: &LabeledGraph,
    c: &MonoComponent,
    v: usize,
    approach: &Word,
    pair: &FactorPair,
) -> Result<(StepOutcome, LabeledGraph), KuroshError> {
    if !c.contains(v) {
        return Err(GraphError::NotInComponent(v).into());
    }
    let from = g.basepoint();
    match g.trace(from, approach) {
        Ok(end) if end == v => {}
        Ok(_) => return Err(GraphError::Untraceable { from, position: approach.len() }.into()),
        Err(position) => return Err(GraphError::Untraceable { from, position }.into()),
    }
    let group = pair.factor(c.factor);
    let subgroup = schreier_stabilizer(g, c.factor, v, group)?;
    let tree = g.spanning_tree(v, Some(c))?;
    let cut: Vec<usize> = c.edges.iter().copied().filter(|&k| !tree.contains_edge(k)).collect();
    let rest = g.without_edges(&cut);
    let outcome = if subgroup.len() == 1 {
        StepOutcome::Trivial
    } else {
        StepOutcome::Factor(ConjugatedFactor {
            conjugator: approach.clone(),
            conjugator_normal: normalize(approach, pair),
            factor: c.factor,
            subgroup,
            component: c.id,
            vertex: v,
        })
    };
    Ok((outcome, rest))
}

/// One word `lab(p_ι(e) e p_τ(e)^-1)` per positive edge outside a BFS
/// spanning tree of `delta`, in edge order.
pub fn free_basis(delta: &LabeledGraph) -> Result<Vec<Word>, KuroshError> {
    for c in delta.components().list {
        if c.edges.len() + 1 != c.vertices.len() {
            return Err(KuroshError::NotATree(c.id));
        }
    }
    let tree = delta.spanning_tree(delta.basepoint(), None)?;
    let mut basis = Vec::new();
    for (k, he) in delta.edges() {
        if tree.contains_edge(k) {
            continue;
        }
        if !tree.reaches(he.from) {
            return Err(KuroshError::Unreachable { vertex: he.from });
        }
        let mut w = tree.path_label(delta, he.from);
        w.push(he.label);
        let w = w.concat(&tree.path_label(delta, he.to).inverse());
        basis.push(free_reduce(&w));
    }
    Ok(basis)
}

/// Presentation of `H` on symbols `e1, e2, ...`: free basis symbols first,
/// then Reidemeister–Schreier generators of each factor conjugated into `H`.
pub fn presentation(
    factors: &[ConjugatedFactor],
    free_basis: &[Word],
    pair: &FactorPair,
) -> Result<Presentation<Word>, KuroshError> {
    let mut p = Presentation::<Word>::empty();
    for w in free_basis {
        p.aliases.push(w.clone());
    }
    for f in factors {
        let local = reidemeister_schreier(pair.factor(f.factor), &f.subgroup)?;
        let offset = p.aliases.len();
        for alias in &local.aliases {
            p.aliases.push(free_reduce(&f.conjugator.conjugate(&pair.lift(f.factor, alias))));
        }
        for r in &local.relators {
            p.relators
                .push(r.iter().map(|g| Gen::new(g.index + offset, g.inverse)).collect());
        }
        p.fallback |= local.fallback;
    }
    p.generators = (1..=p.aliases.len()).map(|i| format!("e{i}")).collect();
    Ok(p)
}

/// Runs the basic step over every cover component and assembles the
/// decomposition; every emitted word is checked for membership.
pub fn decompose(sg: &SubgroupGraph) -> Result<KuroshDecomposition, KuroshError> {
    if !(sg.certification.precover && sg.certification.reduced) {
        return Err(KuroshError::NotCertified);
    }
    let pair: &FactorPair = &sg.pair;
    let mut current = sg.graph.clone();
    let mut factors = Vec::new();
    for original in mcc(&sg.graph, pair) {
        // Edge ids shift as edges are removed; vertex ids do not.
        let c = current
            .components()
            .list
            .into_iter()
            .find(|c| c.factor == original.factor && c.contains(original.vertices[0]))
            .ok_or(GraphError::NotInComponent(original.vertices[0]))?;
        let (v, word) = approach(&current, &c)?;
        let (outcome, next) = basic_step(&current, &c, v, &word, pair)?;
        if let StepOutcome::Factor(mut f) = outcome {
            f.component = original.id;
            factors.push(f);
        }
        current = next;
    }
    let free_basis = free_basis(&current)?;
    let presentation = presentation(&factors, &free_basis, pair)?;
    let d = KuroshDecomposition {
        factors,
        free_basis,
        delta: current,
        presentation: Some(presentation),
    };
    if let Some(w) = d.generating_set(pair).into_iter().find(|w| !sg.contains(w)) {
        return Err(KuroshError::NotInSubgroup(w));
    }
    Ok(d)
}

/// Why a decomposition fails to describe a subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyFailure {
    NotInSubgroup(Word),
    GraphMismatch { vertices: usize, edges: usize },
}

/// Rebuilds `Γ` from the decomposition's generating set and compares it
/// with `sg` up to pointed isomorphism.
pub fn verify(d: &KuroshDecomposition, sg: &SubgroupGraph) -> Result<(), VerifyFailure> {
    let gens = d.generating_set(&sg.pair);
    if let Some(w) = gens.iter().find(|w| !sg.contains(w)) {
        return Err(VerifyFailure::NotInSubgroup(w.clone()));
    }
    let rebuilt = subgroup_graph(&gens, Arc::clone(&sg.pair));
    if LabeledGraph::pointed_iso(&rebuilt.graph, rebuilt.basepoint(), &sg.graph, sg.basepoint()) {
        Ok(())
    } else {
        Err(VerifyFailure::GraphMismatch {
            vertices: rebuilt.graph.vertex_count(),
            edges: rebuilt.graph.edge_count(),
        })
    }
}
