#![allow(dead_code)]

use std::sync::Arc;

use freeprod::fingroup::parse_gen_word;
use freeprod::{Factor, FactorPair, FiniteGroup, Letter, Word};
use proptest::prelude::*;

pub fn presented(labels: &[&str], relators: &[&str]) -> FiniteGroup {
    let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    let relators: Vec<_> = relators
        .iter()
        .map(|r| parse_gen_word(r, &labels).expect("relator parses"))
        .collect();
    FiniteGroup::from_presentation(&labels, &relators, 256).expect("small group enumerates")
}

/// Every group of order at most 12, up to isomorphism, with its order.
pub fn small_groups() -> Vec<(&'static str, usize, FiniteGroup)> {
    let mut out = Vec::new();
    for n in 1..=12 {
        out.push(("cyclic", n, FiniteGroup::cyclic(n, "x").unwrap()));
    }
    let comm = "x y x^-1 y^-1";
    out.push(("klein", 4, presented(&["x", "y"], &["x^2", "y^2", comm])));
    out.push(("s3", 6, presented(&["x", "y"], &["x^3", "y^2", "x y x y"])));
    out.push(("z2xz4", 8, presented(&["x", "y"], &["x^2", "y^4", comm])));
    out.push((
        "z2^3",
        8,
        presented(
            &["x", "y", "z"],
            &["x^2", "y^2", "z^2", comm, "x z x^-1 z^-1", "y z y^-1 z^-1"],
        ),
    ));
    out.push(("d4", 8, presented(&["x", "y"], &["x^4", "y^2", "x y x y"])));
    out.push(("q8", 8, presented(&["x", "y"], &["x^4", "x^2 y^-2", "y^-1 x y x"])));
    out.push(("z3xz3", 9, presented(&["x", "y"], &["x^3", "y^3", comm])));
    out.push(("d5", 10, presented(&["x", "y"], &["x^5", "y^2", "x y x y"])));
    out.push(("z2xz6", 12, presented(&["x", "y"], &["x^2", "y^6", comm])));
    out.push(("d6", 12, presented(&["x", "y"], &["x^6", "y^2", "x y x y"])));
    out.push(("a4", 12, presented(&["x", "y"], &["x^2", "y^3", "x y x y x y"])));
    out.push(("dic3", 12, presented(&["x", "y"], &["x^6", "x^3 y^-2", "y^-1 x y x"])));
    out
}

/// All subgroups, as sorted element lists.
pub fn subgroups(g: &FiniteGroup) -> Vec<Vec<usize>> {
    let mut found: Vec<Vec<usize>> = vec![g.generate_subgroup(&[])];
    let mut i = 0;
    while i < found.len() {
        for x in 0..g.order() {
            let mut gens = found[i].clone();
            gens.push(x);
            let mut s = g.generate_subgroup(&gens);
            s.sort_unstable();
            if !found.contains(&s) {
                found.push(s);
            }
        }
        i += 1;
    }
    for s in &mut found {
        s.sort_unstable();
    }
    found.sort();
    found.dedup();
    found
}

pub fn cyclic_pair(n1: usize, n2: usize) -> Arc<FactorPair> {
    Arc::new(
        FactorPair::new(
            FiniteGroup::cyclic(n1, "a").unwrap(),
            FiniteGroup::cyclic(n2, "b").unwrap(),
        )
        .unwrap(),
    )
}

/// `S3 * Z4` with `S3 = <s, t>`.
pub fn s3_z4() -> Arc<FactorPair> {
    let s3 = presented(&["s", "t"], &["s^3", "t^2", "s t s t"]);
    Arc::new(FactorPair::new(s3, FiniteGroup::cyclic(4, "c").unwrap()).unwrap())
}

pub fn pairs() -> Vec<Arc<FactorPair>> {
    vec![cyclic_pair(2, 3), cyclic_pair(4, 6), s3_z4()]
}

pub fn letters(pair: &FactorPair) -> Vec<Letter> {
    let mut out = pair.alphabet(Factor::First);
    out.extend(pair.alphabet(Factor::Second));
    out
}

pub fn word_from(pair: &FactorPair, picks: &[usize]) -> Word {
    let alphabet = letters(pair);
    Word::from_letters(picks.iter().map(|&i| alphabet[i % alphabet.len()]).collect())
}

pub fn words(pair: Arc<FactorPair>, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(any::<usize>(), 0..=max_len).prop_map(move |picks| word_from(&pair, &picks))
}

/// A pair index together with a few generator words over that pair.
pub fn generator_sets(max_gens: usize, max_len: usize) -> impl Strategy<Value = (usize, Vec<Word>)> {
    (0..3usize, prop::collection::vec(prop::collection::vec(any::<usize>(), 1..=max_len), 1..=max_gens))
        .prop_map(|(i, picks)| {
            let pair = &pairs()[i];
            (i, picks.iter().map(|p| word_from(pair, p)).collect())
        })
}

/// All words of length exactly `len` over `alphabet`.
pub fn all_words(alphabet: &[Letter], len: usize) -> Vec<Word> {
    let mut out = vec![Word::new()];
    for _ in 0..len {
        out = out
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
    }
    out
}
