//! Words over the alphabet `X± = X1± ∪ X2±` and normal forms in `G1 * G2`.

use std::fmt;

use thiserror::Error;

use crate::fingroup::FactorPair;

/// One of the two free factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    First,
    Second,
}

impl Factor {
    pub const BOTH: [Factor; 2] = [Factor::First, Factor::Second];

    pub fn index(self) -> usize {
        match self {
            Factor::First => 0,
            Factor::Second => 1,
        }
    }

    pub fn other(self) -> Factor {
        match self {
            Factor::First => Factor::Second,
            Factor::Second => Factor::First,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}", self.index() + 1)
    }
}

/// A generator of one factor or its formal inverse.
///
/// The derived order (factor, generator, sign) puts `x` right before `x^-1`
/// and is the tie-break used by every breadth-first search in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub factor: Factor,
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(factor: Factor, generator: usize, inverse: bool) -> Self {
        Letter {
            factor,
            generator,
            inverse,
        }
    }

    pub fn positive(factor: Factor, generator: usize) -> Self {
        Letter::new(factor, generator, false)
    }

    pub fn inv(self) -> Self {
        Letter {
            inverse: !self.inverse,
            ..self
        }
    }
}

/// A word in the free monoid on `X±`; not necessarily reduced.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Letter> {
        self.0.iter()
    }

    /// Concatenation `self · other` (no reduction).
    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// The formal inverse: reversed, every letter inverted.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// `self · w · self^-1`, freely reduced.
    pub fn conjugate(&self, w: &Word) -> Word {
        free_reduce(&self.concat(w).concat(&self.inverse()))
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Letter;
    type IntoIter = std::slice::Iter<'a, Letter>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A maximal one-factor piece of a normal word: a non-identity element of that factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub factor: Factor,
    pub element: usize,
}

/// Normal decomposition `(g_1, ..., g_n)` of an element of `G1 * G2`:
/// non-identity syllables from alternating factors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalWord(Vec<Syllable>);

impl NormalWord {
    pub fn identity() -> Self {
        NormalWord(Vec::new())
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn syllable_length(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Builds a normal word from syllables, checking both normal-form conditions.
    pub fn from_syllables(syllables: Vec<Syllable>, pair: &FactorPair) -> Option<Self> {
        let ok = syllables.iter().all(|s| {
            let g = pair.factor(s.factor);
            s.element < g.order() && s.element != g.identity()
        }) && syllables.windows(2).all(|w| w[0].factor != w[1].factor);
        ok.then_some(NormalWord(syllables))
    }

    /// Renders each syllable as its shortest generator word in the factor's
    /// Cayley graph (ties broken by generator declaration order).
    pub fn to_word(&self, pair: &FactorPair) -> Word {
        let mut out = Word::new();
        for s in &self.0 {
            let group = pair.factor(s.factor);
            for g in group.shortest_word(s.element) {
                out.push(Letter::new(s.factor, g.index, g.inverse));
            }
        }
        out
    }

    /// Product in `G`, returned in normal form.
    pub fn mul(&self, other: &NormalWord, pair: &FactorPair) -> NormalWord {
        let mut stack = self.0.clone();
        for s in &other.0 {
            push_syllable(&mut stack, *s, pair);
        }
        NormalWord(stack)
    }

    pub fn inverse(&self, pair: &FactorPair) -> NormalWord {
        NormalWord(
            self.0
                .iter()
                .rev()
                .map(|s| Syllable {
                    factor: s.factor,
                    element: pair.factor(s.factor).inv(s.element),
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown generator `{name}` at offset {offset}")]
    UnknownGenerator { name: String, offset: usize },
    #[error("malformed exponent in `{token}` at offset {offset}")]
    BadExponent { token: String, offset: usize },
    #[error("zero exponent in `{token}` at offset {offset}")]
    ZeroExponent { token: String, offset: usize },
}

impl WordError {
    /// Byte offset of the offending token in the parsed text.
    pub fn offset(&self) -> usize {
        match self {
            WordError::UnknownGenerator { offset, .. }
            | WordError::BadExponent { offset, .. }
            | WordError::ZeroExponent { offset, .. } => *offset,
        }
    }
}

/// Splits `text` into whitespace-separated `name` / `name^k` tokens and
/// resolves each name with `lookup`. Shared by [`parse_word`] and the
/// single-group relator parser.
pub(crate) fn parse_tokens<T: Copy>(
    text: &str,
    mut lookup: impl FnMut(&str) -> Option<T>,
) -> Result<Vec<(T, i64)>, WordError> {
    let mut out = Vec::new();
    let base = text.as_ptr() as usize;
    for token in text.split_whitespace() {
        let offset = token.as_ptr() as usize - base;
        if token == "1" {
            continue;
        }
        let (name, exp) = match token.split_once('^') {
            None => (token, 1i64),
            Some((name, exp)) => {
                let k: i64 = exp.parse().map_err(|_| WordError::BadExponent {
                    token: token.to_string(),
                    offset,
                })?;
                if k == 0 {
                    return Err(WordError::ZeroExponent {
                        token: token.to_string(),
                        offset,
                    });
                }
                (name, k)
            }
        };
        let sym = lookup(name).ok_or_else(|| WordError::UnknownGenerator {
            name: name.to_string(),
            offset,
        })?;
        out.push((sym, exp));
    }
    Ok(out)
}

/// Parses whitespace-separated `name` / `name^k` tokens into a word;
/// negative powers become inverse letters and `1` stands for the identity.
pub fn parse_word(text: &str, pair: &FactorPair) -> Result<Word, WordError> {
    let tokens = parse_tokens(text, |name| pair.resolve(name))?;
    let mut word = Word::new();
    for ((factor, generator), k) in tokens {
        let letter = Letter::new(factor, generator, k < 0);
        for _ in 0..k.unsigned_abs() {
            word.push(letter);
        }
    }
    Ok(word)
}

/// Removes adjacent `x x^-1` pairs until none remain.
pub fn free_reduce(w: &Word) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

fn push_syllable(stack: &mut Vec<Syllable>, s: Syllable, pair: &FactorPair) {
    match stack.last_mut() {
        Some(top) if top.factor == s.factor => {
            let g = pair.factor(s.factor);
            let e = g.mul(top.element, s.element);
            if e == g.identity() {
                stack.pop();
            } else {
                top.element = e;
            }
        }
        _ => {
            if s.element != pair.factor(s.factor).identity() {
                stack.push(s);
            }
        }
    }
}

/// Normal form of `[w]` in `G1 * G2`.
///
/// Letters are multiplied into a stack of syllables; an identity syllable is
/// popped, which exposes the previous syllable to merging with the next letter,
/// so the stack is in normal form after every step.
pub fn normalize(w: &Word, pair: &FactorPair) -> NormalWord {
    let mut stack = Vec::new();
    for &l in w {
        let s = Syllable {
            factor: l.factor,
            element: pair.letter_element(l),
        };
        push_syllable(&mut stack, s, pair);
    }
    NormalWord(stack)
}

pub fn syllable_length(n: &NormalWord) -> usize {
    n.syllable_length()
}

/// `w1 =_G w2`.
pub fn equal_in_g(w1: &Word, w2: &Word, pair: &FactorPair) -> bool {
    normalize(&w1.concat(&w2.inverse()), pair).is_identity()
}
