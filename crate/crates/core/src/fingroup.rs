//! Finite factor groups and the subgroup machinery on them.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::lgraph::{GraphError, LabeledGraph};
use crate::par::{self, Execution};
use crate::words::{self, Factor, Letter, NormalWord, Word, WordError};

/// Largest group order accepted by default.
pub const DEFAULT_CAP: usize = 4096;

/// Up to this order associativity is checked over all triples; above it
/// Light's test over the generators is used (equivalent once the generators
/// are known to generate).
const EXHAUSTIVE_ASSOC_LIMIT: usize = 256;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("group order must be positive")]
    ZeroOrder,
    #[error("table row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("table entry {value} at ({row}, {col}) is not an element id")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("table has no two-sided identity")]
    NoIdentity,
    #[error("element {0} has no two-sided inverse")]
    MissingInverse(usize),
    #[error("not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("generator `{0}` maps to the identity")]
    IdentityGenerator(String),
    #[error("duplicate generator label `{0}`")]
    DuplicateLabel(String),
    #[error("invalid generator label `{0}`")]
    InvalidLabel(String),
    #[error("generator `{label}` refers to element {element}, outside the group")]
    GeneratorOutOfRange { label: String, element: usize },
    #[error("generators do not generate: they reach {reached} of {order} elements")]
    DoesNotGenerate { reached: usize, order: usize },
    #[error("group order {order} exceeds the cap {cap}")]
    TooLarge { order: usize, cap: usize },
    #[error("cap exceeded: enumeration needed more than {0} elements")]
    CapExceeded(usize),
    #[error("relator refers to generator index {0}, which does not exist")]
    UnknownGenerator(usize),
    #[error("relator {0} is not trivial in the group")]
    RelatorNotTrivial(usize),
    #[error("relators present a group of order {presented:?}, table has order {order}")]
    IncompletePresentation { presented: Option<usize>, order: usize },
    #[error("element set is not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("label `{0}` is used by both factors")]
    LabelClash(String),
}

/// A generator of a single group, or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gen {
    pub index: usize,
    pub inverse: bool,
}

impl Gen {
    pub fn new(index: usize, inverse: bool) -> Self {
        Gen { index, inverse }
    }

    pub fn inv(self) -> Self {
        Gen {
            inverse: !self.inverse,
            ..self
        }
    }

    fn column(self) -> usize {
        2 * self.index + self.inverse as usize
    }
}

/// Word over the generators of one group (or over fresh presentation symbols).
pub type GenWord = Vec<Gen>;

pub(crate) fn reduce_gen_word(w: &[Gen]) -> GenWord {
    let mut out: GenWord = Vec::with_capacity(w.len());
    for &g in w {
        if out.last() == Some(&g.inv()) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

fn invert_gen_word(w: &[Gen]) -> GenWord {
    w.iter().rev().map(|g| g.inv()).collect()
}

/// Formats `name`, `name^k` tokens, collapsing runs of equal letters.
pub(crate) fn format_powers<'a>(tokens: impl IntoIterator<Item = (&'a str, bool)>) -> String {
    let mut runs: Vec<(&str, bool, usize)> = Vec::new();
    for (name, inverse) in tokens {
        match runs.last_mut() {
            Some((n, i, k)) if *n == name && *i == inverse => *k += 1,
            _ => runs.push((name, inverse, 1)),
        }
    }
    if runs.is_empty() {
        return "1".to_string();
    }
    runs.iter()
        .map(|&(name, inverse, k)| match (inverse, k) {
            (false, 1) => name.to_string(),
            (false, k) => format!("{name}^{k}"),
            (true, k) => format!("{name}^-{k}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a word over a single group's generator labels.
pub fn parse_gen_word(text: &str, labels: &[String]) -> Result<GenWord, WordError> {
    let tokens = words::parse_tokens(text, |name| labels.iter().position(|l| l == name))?;
    let mut out = Vec::new();
    for (index, k) in tokens {
        for _ in 0..k.unsigned_abs() {
            out.push(Gen::new(index, k < 0));
        }
    }
    Ok(out)
}

fn check_label(label: &str) -> Result<(), GroupError> {
    let ok = label.chars().next().is_some_and(|c| !c.is_ascii_digit())
        && label.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'');
    if ok {
        Ok(())
    } else {
        Err(GroupError::InvalidLabel(label.to_string()))
    }
}

/// A finite group given by its multiplication table and labelled generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u32>,
    inverses: Vec<u32>,
    identity: usize,
    generators: Vec<(String, usize)>,
    relators: Option<Vec<GenWord>>,
    shortest: Vec<GenWord>,
}

impl FiniteGroup {
    /// The cyclic group `Z_n` on one generator `label` with relator `label^n`.
    /// `Z_1` has no generators and no relators.
    pub fn cyclic(n: usize, label: &str) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::ZeroOrder);
        }
        check_label(label)?;
        let table: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        if n == 1 {
            return FiniteGroup::from_table(table, Vec::new());
        }
        let group = FiniteGroup::from_table(table, vec![(label.to_string(), 1)])?;
        Ok(FiniteGroup {
            relators: Some(vec![vec![Gen::new(0, false); n]]),
            ..group
        })
    }

    pub fn from_table(
        table: Vec<Vec<usize>>,
        generators: Vec<(String, usize)>,
    ) -> Result<Self, GroupError> {
        FiniteGroup::from_table_with(table, generators, DEFAULT_CAP, Execution::default())
    }

    /// Validates `table` as a group and `generators` as a generating set.
    pub fn from_table_with(
        table: Vec<Vec<usize>>,
        generators: Vec<(String, usize)>,
        cap: usize,
        exec: Execution,
    ) -> Result<Self, GroupError> {
        let order = table.len();
        if order == 0 {
            return Err(GroupError::ZeroOrder);
        }
        if order > cap {
            return Err(GroupError::TooLarge { order, cap });
        }
        let mut flat = Vec::with_capacity(order * order);
        for (row, entries) in table.iter().enumerate() {
            if entries.len() != order {
                return Err(GroupError::NotSquare {
                    row,
                    len: entries.len(),
                    order,
                });
            }
            for (col, &value) in entries.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::EntryOutOfRange { row, col, value });
                }
                flat.push(value as u32);
            }
        }
        let m = |a: usize, b: usize| flat[a * order + b] as usize;

        let identity = (0..order)
            .find(|&e| (0..order).all(|x| m(e, x) == x && m(x, e) == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverses = Vec::with_capacity(order);
        for a in 0..order {
            let b = (0..order)
                .find(|&b| m(a, b) == identity && m(b, a) == identity)
                .ok_or(GroupError::MissingInverse(a))?;
            inverses.push(b as u32);
        }

        let mut seen = Vec::new();
        for (label, element) in &generators {
            check_label(label)?;
            if seen.contains(&label) {
                return Err(GroupError::DuplicateLabel(label.clone()));
            }
            seen.push(label);
            if *element >= order {
                return Err(GroupError::GeneratorOutOfRange {
                    label: label.clone(),
                    element: *element,
                });
            }
            if *element == identity {
                return Err(GroupError::IdentityGenerator(label.clone()));
            }
        }

        if order <= EXHAUSTIVE_ASSOC_LIMIT {
            check_associative(order, &flat, exec, |_| 0..order)?;
        }

        // Closure under right multiplication by generators from the identity.
        let gen_elems: Vec<usize> = generators.iter().map(|(_, e)| *e).collect();
        let mut reached = vec![false; order];
        reached[identity] = true;
        let mut queue = VecDeque::from([identity]);
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &g in &gen_elems {
                let y = m(x, g);
                if !reached[y] {
                    reached[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        if count != order {
            return Err(GroupError::DoesNotGenerate {
                reached: count,
                order,
            });
        }

        if order > EXHAUSTIVE_ASSOC_LIMIT {
            // Light's test: the identity plus the generators generate as a magma.
            let middles = gen_elems.clone();
            check_associative(order, &flat, exec, move |_| middles.clone().into_iter())?;
        }

        let mut group = FiniteGroup {
            order,
            table: flat,
            inverses,
            identity,
            generators,
            relators: None,
            shortest: Vec::new(),
        };
        group.shortest = group.compute_shortest_words();
        Ok(group)
    }

    /// Enumerates the group presented by `labels` and `relators`, failing
    /// with [`GroupError::CapExceeded`] when more than `cap` elements are live.
    /// Elements are numbered breadth-first from the identity in letter order.
    pub fn from_presentation(
        labels: &[String],
        relators: &[GenWord],
        cap: usize,
    ) -> Result<Self, GroupError> {
        for label in labels {
            check_label(label)?;
        }
        let table = enumerate_cosets(labels.len(), relators, cap)?;
        let order = table.order;
        // Element k is the coset reached by its BFS word; multiplication is
        // filled row by row along the BFS tree of the right-hand factor.
        let mut mult = vec![vec![0usize; order]; order];
        for (x, row) in mult.iter_mut().enumerate() {
            row[0] = x;
            for &(y, parent, col) in &table.tree {
                row[y] = table.act(row[parent], col);
            }
        }
        let generators: Vec<(String, usize)> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), table.act(0, Gen::new(i, false).column())))
            .collect();
        let group = FiniteGroup::from_table_with(mult, generators, cap.max(order), Execution::default())?;
        Ok(FiniteGroup {
            relators: Some(relators.to_vec()),
            ..group
        })
    }

    /// Attaches relators, checking that they present exactly this group.
    pub fn with_relators(self, relators: Vec<GenWord>) -> Result<Self, GroupError> {
        for (i, r) in relators.iter().enumerate() {
            if r.iter().any(|g| g.index >= self.generators.len()) {
                return Err(GroupError::UnknownGenerator(i));
            }
            if self.eval(r) != self.identity {
                return Err(GroupError::RelatorNotTrivial(i));
            }
        }
        let cap = (self.order * 8).max(64);
        let presented = presented_order(self.generators.len(), &relators, cap).ok();
        if presented != Some(self.order) {
            return Err(GroupError::IncompletePresentation {
                presented,
                order: self.order,
            });
        }
        Ok(FiniteGroup {
            relators: Some(relators),
            ..self
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    pub fn generators(&self) -> &[(String, usize)] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.generators[index].0
    }

    pub fn labels(&self) -> Vec<String> {
        self.generators.iter().map(|(l, _)| l.clone()).collect()
    }

    pub fn relators(&self) -> Option<&[GenWord]> {
        self.relators.as_deref()
    }

    pub fn gen_element(&self, g: Gen) -> usize {
        let e = self.generators[g.index].1;
        if g.inverse {
            self.inv(e)
        } else {
            e
        }
    }

    /// Generator letters in canonical order: `x1, x1^-1, x2, x2^-1, ...`.
    pub fn letters(&self) -> Vec<Gen> {
        (0..self.generators.len())
            .flat_map(|i| [Gen::new(i, false), Gen::new(i, true)])
            .collect()
    }

    pub fn eval(&self, w: &[Gen]) -> usize {
        w.iter().fold(self.identity, |acc, &g| self.mul(acc, self.gen_element(g)))
    }

    /// Shortest generator word for `element`, BFS in letter order.
    pub fn shortest_word(&self, element: usize) -> &[Gen] {
        &self.shortest[element]
    }

    fn compute_shortest_words(&self) -> Vec<GenWord> {
        let mut words: Vec<Option<GenWord>> = vec![None; self.order];
        words[self.identity] = Some(Vec::new());
        let letters = self.letters();
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in &letters {
                let y = self.mul(x, self.gen_element(g));
                if words[y].is_none() {
                    let mut w = words[x].clone().unwrap_or_default();
                    w.push(g);
                    words[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        words.into_iter().map(Option::unwrap_or_default).collect()
    }

    /// The subgroup generated by `elements`, sorted.
    pub fn generate_subgroup(&self, elements: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order];
        inside[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in elements {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&x| inside[x]).collect()
    }

    /// Sorts and checks a candidate subgroup (identity, closure, inverses).
    pub fn validate_subgroup(&self, set: &[usize]) -> Result<Vec<usize>, GroupError> {
        let mut inside = vec![false; self.order];
        for &x in set {
            if x >= self.order {
                return Err(GroupError::NotSubgroup(format!("{x} is not an element")));
            }
            inside[x] = true;
        }
        if !inside[self.identity] {
            return Err(GroupError::NotSubgroup("identity missing".into()));
        }
        let members: Vec<usize> = (0..self.order).filter(|&x| inside[x]).collect();
        for &a in &members {
            if !inside[self.inv(a)] {
                return Err(GroupError::NotSubgroup(format!("inverse of {a} missing")));
            }
            for &b in &members {
                if !inside[self.mul(a, b)] {
                    return Err(GroupError::NotSubgroup(format!("{a}*{b} missing")));
                }
            }
        }
        Ok(members)
    }

    fn format_gen_word(&self, w: &[Gen]) -> String {
        format_powers(w.iter().map(|g| (self.label(g.index), g.inverse)))
    }
}

fn check_associative<I, F>(order: usize, flat: &[u32], exec: Execution, middles: F) -> Result<(), GroupError>
where
    I: Iterator<Item = usize>,
    F: Fn(usize) -> I + Sync + Send,
{
    let m = |a: usize, b: usize| flat[a * order + b] as usize;
    let witness = par::find_first(exec, order, |a| {
        for b in middles(a) {
            let ab = m(a, b);
            for c in 0..order {
                if m(ab, c) != m(a, m(b, c)) {
                    return Some((a, b, c));
                }
            }
        }
        None
    });
    match witness {
        Some((a, b, c)) => Err(GroupError::NotAssociative { a, b, c }),
        None => Ok(()),
    }
}

/// `Z_n`; free-function form of [`FiniteGroup::cyclic`].
pub fn make_cyclic(n: usize, label: &str) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::cyclic(n, label)
}

// ---------------------------------------------------------------------------
// Bounded coset enumeration (HLT with coincidence processing) over the
// trivial subgroup.

const UNDEF: u32 = u32::MAX;

/// A completed coset table, renumbered breadth-first from coset 0.
struct CosetTable {
    order: usize,
    cols: usize,
    table: Vec<u32>,
    /// `(coset, parent, column)` in BFS discovery order, excluding coset 0.
    tree: Vec<(usize, usize, usize)>,
}

impl CosetTable {
    fn act(&self, coset: usize, col: usize) -> usize {
        self.table[coset * self.cols + col] as usize
    }
}

struct Enumerator {
    cols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    cap: usize,
}

impl Enumerator {
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.cols + x]
    }

    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.table[c as usize * self.cols + x] = d;
    }

    fn alive(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, x: usize) -> Result<(), GroupError> {
        if self.live >= self.cap || self.parent.len() >= 64 * self.cap + 1024 {
            return Err(GroupError::CapExceeded(self.cap));
        }
        let d = self.parent.len() as u32;
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(UNDEF, self.cols));
        self.live += 1;
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        Ok(())
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut root = c;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = c;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn merge(&mut self, a: u32, b: u32, queue: &mut Vec<u32>) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (keep, drop) = (a.min(b), a.max(b));
        self.parent[drop as usize] = keep;
        self.live -= 1;
        queue.push(drop);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let g = queue[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.get(g, x);
                if d == UNDEF {
                    continue;
                }
                self.set(d, x ^ 1, UNDEF);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mx = self.get(mu, x);
                if mx != UNDEF {
                    self.merge(nu, mx, &mut queue);
                    continue;
                }
                let nx = self.get(nu, x ^ 1);
                if nx != UNDEF {
                    self.merge(mu, nx, &mut queue);
                } else {
                    self.set(mu, x, nu);
                    self.set(nu, x ^ 1, mu);
                }
            }
        }
    }

    fn scan_and_fill(&mut self, alpha: u32, w: &[usize]) -> Result<(), GroupError> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = alpha;
        let mut b = alpha;
        let mut i = 0usize;
        let mut j = w.len() as isize - 1;
        loop {
            while (i as isize) <= j && self.get(f, w[i]) != UNDEF {
                f = self.get(f, w[i]);
                i += 1;
            }
            if (i as isize) > j {
                if f != alpha {
                    self.coincidence(f, alpha);
                }
                return Ok(());
            }
            while j >= i as isize && self.get(b, w[j as usize] ^ 1) != UNDEF {
                b = self.get(b, w[j as usize] ^ 1);
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }
}

fn enumerate_cosets(num_gens: usize, relators: &[GenWord], cap: usize) -> Result<CosetTable, GroupError> {
    for r in relators {
        if let Some(g) = r.iter().find(|g| g.index >= num_gens) {
            return Err(GroupError::UnknownGenerator(g.index));
        }
    }
    let cols = 2 * num_gens;
    let rels: Vec<Vec<usize>> = relators
        .iter()
        .map(|r| reduce_gen_word(r).iter().map(|g| g.column()).collect())
        .collect();
    let mut e = Enumerator {
        cols,
        table: vec![UNDEF; cols],
        parent: vec![0],
        live: 1,
        cap: cap.max(1),
    };
    let mut alpha = 0u32;
    while (alpha as usize) < e.parent.len() {
        if e.alive(alpha) {
            for r in &rels {
                e.scan_and_fill(alpha, r)?;
                if !e.alive(alpha) {
                    break;
                }
            }
            if e.alive(alpha) {
                for x in 0..cols {
                    if e.get(alpha, x) == UNDEF {
                        e.define(alpha, x)?;
                    }
                }
            }
        }
        alpha += 1;
    }

    // Renumber live cosets breadth-first from coset 0.
    let mut new_id = vec![UNDEF; e.parent.len()];
    new_id[0] = 0;
    let mut order_list = vec![0u32];
    let mut tree = Vec::new();
    let mut head = 0;
    while head < order_list.len() {
        let c = order_list[head];
        head += 1;
        for x in 0..cols {
            let d = e.rep(e.get(c, x));
            if new_id[d as usize] == UNDEF {
                new_id[d as usize] = order_list.len() as u32;
                tree.push((order_list.len(), new_id[c as usize] as usize, x));
                order_list.push(d);
            }
        }
    }
    let order = order_list.len();
    let mut table = vec![0u32; order * cols];
    for (k, &c) in order_list.iter().enumerate() {
        for x in 0..cols {
            let d = e.rep(e.get(c, x));
            table[k * cols + x] = new_id[d as usize];
        }
    }
    Ok(CosetTable {
        order,
        cols,
        table,
        tree,
    })
}

/// Order of the group `<x_0..x_{n-1} | relators>`, if it closes within `cap` live elements.
pub fn presented_order(num_gens: usize, relators: &[GenWord], cap: usize) -> Result<usize, GroupError> {
    enumerate_cosets(num_gens, relators, cap).map(|t| t.order)
}

// ---------------------------------------------------------------------------
// Free products of two factors.

/// The two factors of `G = G1 * G2` and the resolution of labels to letters.
#[derive(Clone, Debug)]
pub struct FactorPair {
    factors: [FiniteGroup; 2],
    labels: HashMap<String, (Factor, usize)>,
}

impl FactorPair {
    pub fn new(first: FiniteGroup, second: FiniteGroup) -> Result<Self, GroupError> {
        let mut labels = HashMap::new();
        for (factor, group) in Factor::BOTH.into_iter().zip([&first, &second]) {
            for (i, (label, _)) in group.generators().iter().enumerate() {
                if labels.insert(label.clone(), (factor, i)).is_some() {
                    return Err(GroupError::LabelClash(label.clone()));
                }
            }
        }
        Ok(FactorPair {
            factors: [first, second],
            labels,
        })
    }

    pub fn factor(&self, f: Factor) -> &FiniteGroup {
        &self.factors[f.index()]
    }

    pub fn resolve(&self, name: &str) -> Option<(Factor, usize)> {
        self.labels.get(name).copied()
    }

    pub fn label(&self, l: Letter) -> &str {
        self.factor(l.factor).label(l.generator)
    }

    /// Image of a letter in its factor.
    pub fn letter_element(&self, l: Letter) -> usize {
        self.factor(l.factor).gen_element(Gen::new(l.generator, l.inverse))
    }

    /// All letters of one factor, `x, x^-1` per generator in declaration order.
    pub fn alphabet(&self, f: Factor) -> Vec<Letter> {
        self.factor(f)
            .letters()
            .into_iter()
            .map(|g| Letter::new(f, g.index, g.inverse))
            .collect()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        words::parse_word(text, self)
    }

    pub fn format_word(&self, w: &Word) -> String {
        format_powers(w.iter().map(|&l| (self.label(l), l.inverse)))
    }

    pub fn format_normal(&self, n: &NormalWord) -> String {
        self.format_word(&n.to_word(self))
    }

    pub fn lift(&self, f: Factor, w: &[Gen]) -> Word {
        w.iter().map(|g| Letter::new(f, g.index, g.inverse)).collect()
    }
}

// ---------------------------------------------------------------------------
// Graphs of a single factor.

/// `Cayley(G_i)`: vertices are element ids, the basepoint is the identity.
pub fn cayley_graph(g: &FiniteGroup, factor: Factor) -> LabeledGraph {
    let mut graph = LabeledGraph::new(g.order(), g.identity());
    for v in 0..g.order() {
        for (j, (_, e)) in g.generators().iter().enumerate() {
            graph.add_edge(v, Letter::positive(factor, j), g.mul(v, *e));
        }
    }
    graph
}

/// Right cosets `S·x` of a subgroup, numbered breadth-first from `S·1`.
struct Cosets {
    of_element: Vec<usize>,
    reps: Vec<usize>,
    words: Vec<GenWord>,
    /// Positive-generator edges `(coset, generator)` that belong to the BFS tree.
    tree: Vec<(usize, usize)>,
}

impl Cosets {
    fn new(g: &FiniteGroup, sub: &[usize]) -> Self {
        let mut of_element = vec![usize::MAX; g.order()];
        let mut reps = Vec::new();
        let mut words: Vec<GenWord> = Vec::new();
        let mut tree = Vec::new();
        let claim = |rep: usize, of_element: &mut Vec<usize>, id: usize| {
            for &s in sub {
                of_element[g.mul(s, rep)] = id;
            }
        };
        claim(g.identity(), &mut of_element, 0);
        reps.push(g.identity());
        words.push(Vec::new());
        let letters = g.letters();
        let mut head = 0;
        while head < reps.len() {
            let c = head;
            head += 1;
            for &l in &letters {
                let y = g.mul(reps[c], g.gen_element(l));
                if of_element[y] == usize::MAX {
                    let d = reps.len();
                    claim(y, &mut of_element, d);
                    reps.push(y);
                    let mut w = words[c].clone();
                    w.push(l);
                    words.push(w);
                    tree.push(if l.inverse { (d, l.index) } else { (c, l.index) });
                }
            }
        }
        Cosets {
            of_element,
            reps,
            words,
            tree,
        }
    }

    fn count(&self) -> usize {
        self.reps.len()
    }

    fn act(&self, g: &FiniteGroup, coset: usize, l: Gen) -> usize {
        self.of_element[g.mul(self.reps[coset], g.gen_element(l))]
    }
}

/// The coset graph `Cayley(G_i, S)`, basepoint `S·1` (vertex 0).
pub fn coset_graph(g: &FiniteGroup, factor: Factor, sub: &[usize]) -> Result<LabeledGraph, GroupError> {
    let sub = g.validate_subgroup(sub)?;
    let cosets = Cosets::new(g, &sub);
    let mut graph = LabeledGraph::new(cosets.count(), 0);
    for c in 0..cosets.count() {
        for j in 0..g.generator_count() {
            graph.add_edge(c, Letter::positive(factor, j), cosets.act(g, c, Gen::new(j, false)));
        }
    }
    Ok(graph)
}

/// `Lab(C, v)` for the `factor`-coloured component `C` of `graph` containing `v`,
/// via Schreier generators over a BFS spanning tree.
pub fn schreier_stabilizer(
    graph: &LabeledGraph,
    factor: Factor,
    v: usize,
    g: &FiniteGroup,
) -> Result<Vec<usize>, GraphError> {
    if v >= graph.vertex_count() {
        return Err(GraphError::NoSuchVertex(v));
    }
    // Sized by the component, not the whole graph.
    let mut elem: HashMap<usize, usize> = HashMap::from([(v, g.identity())]);
    let mut queue = VecDeque::from([v]);
    let mut schreier = Vec::new();
    while let Some(u) = queue.pop_front() {
        let eu = elem[&u];
        for l in g.letters() {
            let letter = Letter::new(factor, l.index, l.inverse);
            let w = graph
                .follow(u, letter)
                .ok_or(GraphError::NotSaturated { vertex: u, letter })?;
            let ew = g.mul(eu, g.gen_element(l));
            match elem.get(&w).copied() {
                None => {
                    elem.insert(w, ew);
                    queue.push_back(w);
                }
                Some(known) => {
                    let s = g.mul(ew, g.inv(known));
                    if s != g.identity() {
                        schreier.push(s);
                    }
                }
            }
        }
    }
    schreier.sort_unstable();
    schreier.dedup();
    Ok(g.generate_subgroup(&schreier))
}

// ---------------------------------------------------------------------------
// Presentations.

/// A group presentation on fresh symbols. `aliases[i]` is the value of
/// symbol `i` in the ambient group (a [`GenWord`] inside one factor, a
/// [`Word`] over `X±` for subgroups of the free product).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation<A = GenWord> {
    pub generators: Vec<String>,
    pub relators: Vec<GenWord>,
    pub aliases: Vec<A>,
    /// Set when some part was built from a multiplication table because the
    /// factor carried no relators.
    pub fallback: bool,
}

impl<A> Presentation<A> {
    pub fn empty() -> Self {
        Presentation {
            generators: Vec::new(),
            relators: Vec::new(),
            aliases: Vec::new(),
            fallback: false,
        }
    }

    pub fn format_relator(&self, r: &[Gen]) -> String {
        format_powers(r.iter().map(|g| (self.generators[g.index].as_str(), g.inverse)))
    }
}

impl<A> fmt::Display for Presentation<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.format_relator(r)).collect();
        if self.generators.is_empty() {
            return write!(f, "< | >");
        }
        write!(f, "< {} | {} >", self.generators.join(", "), rels.join(", "))
    }
}

/// Presentation of `sub ≤ g` on Schreier generators, with relators rewritten
/// from every coset and then Tietze-simplified. Without relators on `g` the
/// multiplication-table presentation of `sub` is returned, flagged as fallback.
pub fn reidemeister_schreier(g: &FiniteGroup, sub: &[usize]) -> Result<Presentation, GroupError> {
    let sub = g.validate_subgroup(sub)?;
    if sub.len() == 1 {
        return Ok(Presentation::empty());
    }
    let Some(relators) = g.relators() else {
        return Ok(table_presentation(g, &sub));
    };
    let cosets = Cosets::new(g, &sub);
    let n = g.generator_count();
    let mut symbol: Vec<Option<usize>> = vec![None; cosets.count() * n];
    let mut aliases: Vec<GenWord> = Vec::new();
    for c in 0..cosets.count() {
        for j in 0..n {
            if cosets.tree.contains(&(c, j)) {
                continue;
            }
            let d = cosets.act(g, c, Gen::new(j, false));
            let mut w = cosets.words[c].clone();
            w.push(Gen::new(j, false));
            w.extend(invert_gen_word(&cosets.words[d]));
            symbol[c * n + j] = Some(aliases.len());
            aliases.push(reduce_gen_word(&w));
        }
    }
    let mut rewritten = Vec::new();
    for r in relators {
        for start in 0..cosets.count() {
            let mut c = start;
            let mut out = Vec::new();
            for &l in r {
                if l.inverse {
                    let d = cosets.act(g, c, l);
                    if let Some(s) = symbol[d * n + l.index] {
                        out.push(Gen::new(s, true));
                    }
                    c = d;
                } else {
                    if let Some(s) = symbol[c * n + l.index] {
                        out.push(Gen::new(s, false));
                    }
                    c = cosets.act(g, c, l);
                }
            }
            rewritten.push(out);
        }
    }
    let (kept, relators) = tietze(aliases.len(), rewritten);
    Ok(Presentation {
        generators: (1..=kept.len()).map(|i| format!("s{i}")).collect(),
        aliases: kept.iter().map(|&k| aliases[k].clone()).collect(),
        relators,
        fallback: false,
    })
}

fn table_presentation(g: &FiniteGroup, sub: &[usize]) -> Presentation {
    let gens: Vec<usize> = sub.iter().copied().filter(|&x| x != g.identity()).collect();
    let index = |x: usize| gens.iter().position(|&y| y == x);
    let mut relators = Vec::new();
    for (i, &x) in gens.iter().enumerate() {
        for (j, &y) in gens.iter().enumerate() {
            let mut r = vec![Gen::new(i, false), Gen::new(j, false)];
            if let Some(k) = index(g.mul(x, y)) {
                r.push(Gen::new(k, true));
            }
            relators.push(r);
        }
    }
    Presentation {
        generators: (1..=gens.len()).map(|i| format!("s{i}")).collect(),
        aliases: gens.iter().map(|&x| g.shortest_word(x).to_vec()).collect(),
        relators,
        fallback: true,
    }
}

fn cyclic_reduce(w: &[Gen]) -> GenWord {
    let mut w = reduce_gen_word(w);
    while w.len() >= 2 && w[0] == w[w.len() - 1].inv() {
        w.pop();
        w.remove(0);
    }
    w
}

/// Canonical representative of a relator up to rotation and inversion.
fn relator_key(w: &[Gen]) -> GenWord {
    let inv = invert_gen_word(w);
    let mut best: Option<GenWord> = None;
    for cand in [w, &inv[..]] {
        for k in 0..cand.len().max(1) {
            let rot: GenWord = cand[k..].iter().chain(&cand[..k]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

/// Tietze simplification: drop trivial and repeated relators, and eliminate a
/// generator occurring exactly once in some relator while the total relator
/// length stays within a budget. Returns the surviving generator indices and
/// the relators re-indexed over them.
fn tietze(num_gens: usize, relators: Vec<GenWord>) -> (Vec<usize>, Vec<GenWord>) {
    let clean = |rels: Vec<GenWord>| -> Vec<GenWord> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for r in rels {
            let r = cyclic_reduce(&r);
            if r.is_empty() {
                continue;
            }
            let key = relator_key(&r);
            if seen.insert(key.clone()) {
                out.push(key);
            }
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    };
    let mut rels = clean(relators);
    let budget = 2 * rels.iter().map(Vec::len).sum::<usize>() + 16;
    let mut alive = vec![true; num_gens];
    loop {
        let total: usize = rels.iter().map(Vec::len).sum();
        let mut choice = None;
        'search: for (ri, r) in rels.iter().enumerate() {
            for s in 0..num_gens {
                let count = r.iter().filter(|g| g.index == s).count();
                if count != 1 {
                    continue;
                }
                let elsewhere: usize = rels
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != ri)
                    .map(|(_, o)| o.iter().filter(|g| g.index == s).count())
                    .sum();
                let growth = elsewhere * (r.len().saturating_sub(2));
                if total + growth <= budget {
                    choice = Some((ri, s));
                    break 'search;
                }
            }
        }
        let Some((ri, s)) = choice else { break };
        let r = rels.remove(ri);
        let pos = r.iter().position(|g| g.index == s).unwrap_or(0);
        // r rotated = s^e u  =>  s^e = u^-1
        let rot: GenWord = r[pos..].iter().chain(&r[..pos]).copied().collect();
        let u = &rot[1..];
        let value = if rot[0].inverse { u.to_vec() } else { invert_gen_word(u) };
        let value_inv = invert_gen_word(&value);
        rels = rels
            .into_iter()
            .map(|o| {
                o.into_iter()
                    .flat_map(|g| match (g.index == s, g.inverse) {
                        (false, _) => vec![g],
                        (true, false) => value.clone(),
                        (true, true) => value_inv.clone(),
                    })
                    .collect()
            })
            .collect();
        rels = clean(rels);
        alive[s] = false;
    }
    let kept: Vec<usize> = (0..num_gens).filter(|&i| alive[i]).collect();
    let renumber = |g: Gen| Gen::new(kept.iter().position(|&k| k == g.index).unwrap_or(0), g.inverse);
    let rels = clean(rels.into_iter().map(|r| r.into_iter().map(renumber).collect()).collect());
    (kept, rels)
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = self.labels().join(", ");
        match &self.relators {
            Some(rels) => {
                let rels: Vec<String> = rels.iter().map(|r| self.format_gen_word(r)).collect();
                write!(f, "< {labels} | {} > (order {})", rels.join(", "), self.order)
            }
            None => write!(f, "< {labels} > (order {}, table)", self.order),
        }
    }
}
