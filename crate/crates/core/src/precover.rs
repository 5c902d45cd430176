//! Subgroup graphs: bouquet, folding, Cayley saturation and pruning of
//! redundant components, plus the precover predicates and membership.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::fingroup::{coset_graph, schreier_stabilizer, FactorPair};
use crate::lgraph::{bouquet, GraphError, LabeledGraph, MonoComponent, VertexClass};
use crate::par::{self, Execution};
use crate::words::{normalize, Letter, Word};

/// Why a graph is not a precover.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PrecoverViolation {
    #[error("vertex {vertex} has two outgoing edges labelled {letter:?}")]
    NotWellLabelled { vertex: usize, letter: Letter },
    #[error("component {component}: vertex {vertex} has no outgoing {letter:?} edge")]
    Unsaturated {
        component: usize,
        vertex: usize,
        letter: Letter,
    },
    #[error("component {component} is saturated but is not a coset graph of its factor")]
    NotBased { component: usize },
}

/// Why a precover is not reduced.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReducedViolation {
    #[error(transparent)]
    NotPrecover(#[from] PrecoverViolation),
    #[error("component {component} is redundant")]
    Redundant { component: usize },
    #[error("the graph is a full Cayley graph of one factor with trivial label group")]
    CollapsibleCayley,
}

/// Checks that the component is a cover of its factor: saturated and
/// isomorphic to the coset graph of its own stabilizer.
pub fn check_cover(g: &LabeledGraph, c: &MonoComponent, pair: &FactorPair) -> Result<(), PrecoverViolation> {
    let group = pair.factor(c.factor);
    let root = c.vertices[0];
    let stab = match schreier_stabilizer(g, c.factor, root, group) {
        Ok(s) => s,
        Err(GraphError::NotSaturated { vertex, letter }) => {
            return Err(PrecoverViolation::Unsaturated {
                component: c.id,
                vertex,
                letter,
            })
        }
        Err(e) => unreachable!("component root is a vertex: {e}"),
    };
    let not_based = PrecoverViolation::NotBased { component: c.id };
    let model = coset_graph(group, c.factor, &stab).map_err(|_| not_based.clone())?;
    if model.vertex_count() == c.vertices.len()
        && model.edge_count() == c.edges.len()
        && matches_model(g, root, &model, &pair.alphabet(c.factor))
    {
        Ok(())
    } else {
        Err(not_based)
    }
}

/// Whether the saturated component of `g` at `root` maps onto `model`
/// label-preservingly and injectively, basepoint to basepoint. With equal
/// vertex and edge counts this is a pointed isomorphism.
fn matches_model(g: &LabeledGraph, root: usize, model: &LabeledGraph, letters: &[Letter]) -> bool {
    let mut image: HashMap<usize, usize> = HashMap::from([(root, model.basepoint())]);
    let mut used = vec![false; model.vertex_count()];
    used[model.basepoint()] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let mu = image[&u];
        for &l in letters {
            let (Some(t), Some(mt)) = (g.follow(u, l), model.follow(mu, l)) else {
                return false;
            };
            match image.get(&t) {
                Some(&known) if known != mt => return false,
                Some(_) => {}
                None => {
                    if used[mt] {
                        return false;
                    }
                    used[mt] = true;
                    image.insert(t, mt);
                    queue.push_back(t);
                }
            }
        }
    }
    true
}

pub fn is_precover(g: &LabeledGraph, pair: &FactorPair) -> Result<(), PrecoverViolation> {
    if let Err((vertex, letter)) = g.is_well_labelled() {
        return Err(PrecoverViolation::NotWellLabelled { vertex, letter });
    }
    g.components().list.iter().try_for_each(|c| check_cover(g, c, pair))
}

/// A cover component is redundant when its label group is trivial, it has
/// at most one bichromatic vertex and the basepoint is not one of its
/// monochromatic vertices.
fn is_redundant(c: &MonoComponent, v0: usize, pair: &FactorPair) -> bool {
    c.vertices.len() == pair.factor(c.factor).order()
        && c.bichromatic.len() <= 1
        && c.monochromatic.binary_search(&v0).is_err()
}

fn is_collapsible(g: &LabeledGraph, pair: &FactorPair) -> bool {
    let comps = g.components();
    comps.list.len() == 1
        && comps.list[0].bichromatic.is_empty()
        && comps.list[0].vertices.len() == pair.factor(comps.list[0].factor).order()
        && comps.list[0].vertices.len() == g.vertex_count()
}

/// Reducedness at the graph's basepoint.
pub fn is_reduced_precover(g: &LabeledGraph, pair: &FactorPair) -> Result<(), ReducedViolation> {
    is_precover(g, pair)?;
    if let Some(c) = g
        .components()
        .list
        .iter()
        .find(|c| is_redundant(c, g.basepoint(), pair))
    {
        return Err(ReducedViolation::Redundant { component: c.id });
    }
    if is_collapsible(g, pair) {
        return Err(ReducedViolation::CollapsibleCayley);
    }
    Ok(())
}

/// Glues a copy of `Cayley(G_i)` along `edge`, identifying the identity
/// with the edge's initial vertex.
fn glue_cayley(g: &mut LabeledGraph, edge: usize, pair: &FactorPair) {
    let he = *g.edge(edge);
    let factor = he.label.factor;
    let group = pair.factor(factor);
    let mut vertex_of = vec![usize::MAX; group.order()];
    vertex_of[group.identity()] = he.from;
    for (x, slot) in vertex_of.iter_mut().enumerate() {
        if x != group.identity() {
            *slot = g.add_vertex();
        }
    }
    for x in 0..group.order() {
        for (j, &(_, e)) in group.generators().iter().enumerate() {
            g.add_edge(vertex_of[x], Letter::positive(factor, j), vertex_of[group.mul(x, e)]);
        }
    }
}

/// Glues Cayley graphs onto non-cover components until every monochromatic
/// component is a cover. Each pass glues onto every non-cover component, then folds.
pub fn saturate(g: &LabeledGraph, pair: &FactorPair) -> LabeledGraph {
    let mut g = g.fold_all();
    loop {
        let comps = g.components();
        let starts: Vec<usize> = comps
            .list
            .iter()
            .filter(|c| check_cover(&g, c, pair).is_err())
            .map(|c| c.edges[0])
            .collect();
        if starts.is_empty() {
            return g;
        }
        // Folding is confluent, so one fold after all the glues in a pass
        // reaches the same graph as folding after each.
        for edge in starts {
            glue_cayley(&mut g, edge, pair);
        }
        g = g.fold_all();
    }
}

/// Deletes redundant components (keeping their attaching vertex) until none
/// remain, then collapses a lone trivial Cayley graph to a single vertex.
pub fn prune_redundant(g: &LabeledGraph, pair: &FactorPair) -> LabeledGraph {
    let mut g = g.clone();
    loop {
        let comps = g.components();
        let Some(c) = comps.list.iter().find(|c| is_redundant(c, g.basepoint(), pair)) else {
            break;
        };
        let mut keep_vertex = vec![true; g.vertex_count()];
        for &v in &c.monochromatic {
            keep_vertex[v] = false;
        }
        let mut keep_edge = vec![true; g.edge_count()];
        for &k in &c.edges {
            keep_edge[k] = false;
        }
        g = g.retain(&keep_vertex, &keep_edge);
    }
    if is_collapsible(&g, pair) {
        return LabeledGraph::single_vertex();
    }
    g.canonical()
}

/// Outcome of the structural checks run on a freshly built graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certification {
    pub precover: bool,
    pub reduced: bool,
    pub generators: Vec<Word>,
    /// Total length `m` of the generator words.
    pub input_length: usize,
    pub vertices: usize,
    pub edges: usize,
}

/// `Γ(H)` together with its factor pair and certification.
#[derive(Clone, Debug)]
pub struct SubgroupGraph {
    pub graph: LabeledGraph,
    pub pair: Arc<FactorPair>,
    pub certification: Certification,
}

/// Builds the reduced precover of `⟨gens⟩`, based at vertex 0.
pub fn subgroup_graph(gens: &[Word], pair: impl Into<Arc<FactorPair>>) -> SubgroupGraph {
    let pair = pair.into();
    let folded = bouquet(gens).fold_all().cut_hairs();
    let graph = prune_redundant(&saturate(&folded, &pair), &pair);
    let precover = is_precover(&graph, &pair).is_ok();
    let reduced = is_reduced_precover(&graph, &pair).is_ok();
    let certification = Certification {
        precover,
        reduced,
        generators: gens.to_vec(),
        input_length: gens.iter().map(Word::len).sum(),
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
    };
    SubgroupGraph {
        graph,
        pair,
        certification,
    }
}

/// Builds several subgroup graphs over the same factor pair.
pub fn subgroup_graphs(batches: &[Vec<Word>], pair: impl Into<Arc<FactorPair>>, exec: Execution) -> Vec<SubgroupGraph> {
    let pair = pair.into();
    par::map(exec, batches, |gens| subgroup_graph(gens, Arc::clone(&pair)))
}

impl SubgroupGraph {
    pub fn basepoint(&self) -> usize {
        self.graph.basepoint()
    }

    /// Whether `w ∈ H`: its normal form reads a loop at the basepoint.
    pub fn contains(&self, w: &Word) -> bool {
        let rendered = normalize(w, &self.pair).to_word(&self.pair);
        self.graph.trace(self.basepoint(), &rendered) == Ok(self.basepoint())
    }

    pub fn contains_batch(&self, words: &[Word], exec: Execution) -> Vec<bool> {
        par::map(exec, words, |w| self.contains(w))
    }

    /// `[G : H]` when every vertex is saturated for all of `X±`.
    pub fn index_if_finite(&self) -> Option<usize> {
        let letters: Vec<Letter> = crate::words::Factor::BOTH
            .into_iter()
            .flat_map(|f| self.pair.alphabet(f))
            .collect();
        let saturated = (0..self.graph.vertex_count())
            .all(|v| letters.iter().all(|&l| self.graph.follow(v, l).is_some()));
        saturated.then_some(self.graph.vertex_count())
    }

    /// Colour class of each vertex, as computed on the final graph.
    pub fn vertex_classes(&self) -> Vec<VertexClass> {
        self.graph.components().classes
    }
}
