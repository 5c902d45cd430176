//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the PASS/FAIL lines are always printed; exits non-zero if any fails.

use std::collections::{HashMap, HashSet, VecDeque};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use freeprod::fingroup::{cayley_graph, coset_graph, schreier_stabilizer};
use freeprod::kurosh::{decompose, verify};
use freeprod::lgraph::bouquet;
use freeprod::precover::{is_precover, is_reduced_precover, prune_redundant, PrecoverViolation, ReducedViolation};
use freeprod::words::{free_reduce, normalize, Syllable};
use freeprod::{subgroup_graph, Factor, FactorPair, FiniteGroup, LabeledGraph, Letter, SubgroupGraph, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pair(n1: usize, l1: &str, n2: usize, l2: &str) -> Arc<FactorPair> {
    Arc::new(FactorPair::new(FiniteGroup::cyclic(n1, l1).unwrap(), FiniteGroup::cyclic(n2, l2).unwrap()).unwrap())
}

fn z2z3() -> Arc<FactorPair> {
    pair(2, "a", 3, "b")
}

fn z4z6() -> Arc<FactorPair> {
    pair(4, "x", 6, "y")
}

fn parse(p: &FactorPair, w: &str) -> Word {
    p.parse_word(w).unwrap()
}

fn problems_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../problems")
}

fn run_cli(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_freeprod")).args(args).output().expect("binary runs");
    (String::from_utf8_lossy(&out.stdout).into_owned(), out.status.code().unwrap_or(-1))
}

fn record(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn all_letters(p: &FactorPair) -> Vec<Letter> {
    Factor::BOTH.into_iter().flat_map(|f| p.alphabet(f)).collect()
}

fn random_word(rng: &mut ChaCha8Rng, p: &FactorPair, max_len: usize) -> Word {
    let letters = all_letters(p);
    let len = rng.random_range(1..=max_len);
    (0..len).map(|_| letters[rng.random_range(0..letters.len())]).collect()
}

// ---------------------------------------------------------------------------
// Independent normal-form arithmetic for the oracle: a normal word is a list
// of (factor, element) syllables, multiplied by merging at the seam.

type Nf = Vec<(u8, u16)>;

fn nf_mul(p: &FactorPair, a: &Nf, b: &Nf) -> Nf {
    let mut out = a.clone();
    for &(f, e) in b {
        match out.last().copied() {
            Some((g, x)) if g == f => {
                out.pop();
                let group = p.factor(Factor::BOTH[f as usize]);
                let y = group.mul(x as usize, e as usize);
                if y != group.identity() {
                    out.push((f, y as u16));
                }
            }
            _ => out.push((f, e)),
        }
    }
    out
}

fn nf_of_word(p: &FactorPair, w: &Word) -> Nf {
    let mut out = Nf::new();
    for &l in w {
        let f = l.factor.index() as u8;
        out = nf_mul(p, &out, &vec![(f, p.letter_element(l) as u16)]);
    }
    out
}

fn nf_render(p: &FactorPair, n: &Nf) -> Word {
    let mut w = Word::new();
    for &(f, e) in n {
        let factor = Factor::BOTH[f as usize];
        for &l in &p.lift(factor, p.factor(factor).shortest_word(e as usize)) {
            w.push(l);
        }
    }
    w
}

/// Every normal word of syllable length at most `max`.
fn all_normal_words(p: &FactorPair, max: usize) -> Vec<Nf> {
    let mut out = vec![Nf::new()];
    let mut frontier = vec![Nf::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for n in &frontier {
            for f in 0..2u8 {
                if n.last().is_some_and(|&(g, _)| g == f) {
                    continue;
                }
                let group = p.factor(Factor::BOTH[f as usize]);
                for e in 0..group.order() {
                    if e != group.identity() {
                        let mut m = n.clone();
                        m.push((f, e as u16));
                        next.push(m);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Elements of `⟨gens⟩` reachable by left multiplication with generators
/// and their inverses without leaving syllable length `bound`.
fn closure(p: &FactorPair, gens: &[Word], bound: usize) -> HashSet<Nf> {
    let mut steps: Vec<Nf> = Vec::new();
    for g in gens {
        steps.push(nf_of_word(p, g));
        steps.push(nf_of_word(p, &g.inverse()));
    }
    let mut seen: HashSet<Nf> = HashSet::from([Nf::new()]);
    let mut queue = VecDeque::from([Nf::new()]);
    while let Some(h) = queue.pop_front() {
        for s in &steps {
            let n = nf_mul(p, s, &h);
            if n.len() <= bound && !seen.contains(&n) {
                seen.insert(n.clone());
                queue.push_back(n);
            }
        }
    }
    seen
}

// ---------------------------------------------------------------------------
// Corpus.

struct Case {
    name: String,
    pair: Arc<FactorPair>,
    gens: Vec<Word>,
}

fn random_subgroups(seed: u64, count: usize) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..count {
        let (name, p) = if i % 2 == 0 { ("Z2*Z3", z2z3()) } else { ("Z4*Z6", z4z6()) };
        let k = rng.random_range(2..=4);
        let gens: Vec<Word> = (0..k).map(|_| random_word(&mut rng, &p, 8)).collect();
        out.push(Case {
            name: format!("random {i} over {name}"),
            pair: p,
            gens,
        });
    }
    out
}

fn corpus() -> Vec<Case> {
    let p = z2z3();
    let q = z4z6();
    let named = [
        ("worked example H", &p, vec!["a b a^-1 b^-1", "b a b a b a"]),
        ("whole Z2*Z3", &p, vec!["a", "b"]),
        ("<a>", &p, vec!["a"]),
        ("<b>", &p, vec!["b"]),
        ("<a b>", &p, vec!["a b"]),
        ("<x^2, y^3>", &q, vec!["x^2", "y^3"]),
        ("<x y x^-1, y^2 x>", &q, vec!["x y x^-1", "y^2 x"]),
        ("<x y^2 x^-1 y>", &q, vec!["x y^2 x^-1 y"]),
    ];
    let mut out: Vec<Case> = named
        .into_iter()
        .map(|(name, pr, ws)| Case {
            name: name.to_string(),
            pair: Arc::clone(pr),
            gens: ws.iter().map(|w| parse(pr, w)).collect(),
        })
        .collect();
    out.push(Case {
        name: "trivial".into(),
        pair: Arc::clone(&p),
        gens: Vec::new(),
    });
    out.extend(random_subgroups(2024, 24));
    out
}

fn build(c: &Case) -> SubgroupGraph {
    subgroup_graph(&c.gens, Arc::clone(&c.pair))
}

// ---------------------------------------------------------------------------
// Criteria.

fn worked_example() -> Outcome {
    let start = Instant::now();
    let p = z2z3();
    let file = problems_dir().join("worked_example.ini");
    let (out, code) = run_cli(&["kurosh", file.to_str().unwrap()]);
    ensure(code == 0, || format!("kurosh exited with {code}"))?;
    let rec = record(&out);
    ensure(rec.get("factors").map(String::as_str) == Some("1"), || format!("factors: {:?}", rec.get("factors")))?;
    ensure(rec.get("factor.1.order").map(String::as_str) == Some("2"), || "factor order is not 2".into())?;
    ensure(rec.get("factor.1.group").map(String::as_str) == Some("G1"), || "factor does not lie in G1".into())?;
    ensure(rec.get("free_rank").map(String::as_str) == Some("1"), || "free rank is not 1".into())?;
    ensure(rec.get("verified").map(String::as_str) == Some("true"), || "cli verify missing".into())?;

    let gens = [parse(&p, "a b a^-1 b^-1"), parse(&p, "b a b a b a")];
    let sg = subgroup_graph(&gens, Arc::clone(&p));
    let d = decompose(&sg).map_err(|e| e.to_string())?;
    verify(&d, &sg).map_err(|e| format!("verify: {e:?}"))?;
    ensure(d.factors.len() == 1 && d.free_rank() == 1, || "library decomposition shape".into())?;
    let target = parse(&p, "a b^2 a b^-2 a^-1");
    ensure(sg.contains(&target), || "(ab^2)a(ab^2)^-1 not in H".into())?;
    let f = &d.factors[0];
    ensure(f.factor == Factor::First && f.subgroup.len() == 2, || "factor is not <a>".into())?;
    let reported = f.conjugator.conjugate(&parse(&p, "a"));
    let conj_graph = subgroup_graph(std::slice::from_ref(&target), Arc::clone(&p));
    ensure(conj_graph.contains(&reported), || "reported generator not in <(ab^2)a(ab^2)^-1>".into())?;
    let back = subgroup_graph(&[reported], Arc::clone(&p));
    ensure(back.contains(&target), || "subgroups differ".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "1 factor of order 2 in G1, conjugator {}, free rank 1, {:.0?}",
        p.format_word(&f.conjugator),
        elapsed
    ))
}

fn presentation_check() -> Outcome {
    let file = problems_dir().join("worked_example.ini");
    let (out, code) = run_cli(&["present", file.to_str().unwrap()]);
    ensure(code == 0, || format!("present exited with {code}"))?;
    let rec = record(&out);
    ensure(rec.get("generators").map(String::as_str) == Some("2"), || "expected 2 generators".into())?;
    ensure(rec.get("relators").map(String::as_str) == Some("1"), || "expected 1 relator".into())?;
    let rel = rec.get("relator").cloned().unwrap_or_default();
    let square = rel
        .strip_suffix("^2")
        .is_some_and(|g| out.lines().any(|l| l.starts_with(&format!("{g} = "))));
    ensure(square, || format!("relator `{rel}` is not a square of a generator"))?;
    Ok(rec.get("presentation").cloned().unwrap_or_default())
}

fn membership_oracle() -> Outcome {
    let start = Instant::now();
    let cases = random_subgroups(7, 24);
    let mut words_checked = 0usize;
    let mut disagreements = Vec::new();
    let mut members = 0usize;
    for c in &cases {
        let sg = build(c);
        let max_syllables = c.gens.iter().map(|g| nf_of_word(&c.pair, g).len()).max().unwrap_or(0);
        let bound = 6 + max_syllables;
        let reach = closure(&c.pair, &c.gens, bound);
        for n in all_normal_words(&c.pair, 6) {
            let expected = reach.contains(&n);
            let got = sg.contains(&nf_render(&c.pair, &n));
            words_checked += 1;
            members += usize::from(got);
            if expected != got {
                disagreements.push(format!("{}: {} (graph {got}, oracle {expected})", c.name, c.pair.format_word(&nf_render(&c.pair, &n))));
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(disagreements.is_empty(), || {
        format!("{} disagreements, first: {}", disagreements.len(), disagreements[0])
    })?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} subgroups, {words_checked} normal words ({members} members), 0 disagreements, {elapsed:.1?}",
        cases.len()
    ))
}

fn uniqueness() -> Outcome {
    let corpus = corpus();
    for c in &corpus {
        let base = build(c);
        let mut with_products = c.gens.clone();
        for i in 0..c.gens.len() {
            for j in i + 1..c.gens.len() {
                with_products.push(c.gens[i].concat(&c.gens[j]));
            }
        }
        let mut conjugated = Vec::new();
        if let Some(h1) = c.gens.first() {
            conjugated.push(h1.clone());
            for h in &c.gens[1..] {
                conjugated.push(h1.conjugate(h));
            }
        }
        for (label, alt) in [("products", with_products), ("conjugated", conjugated)] {
            let other = subgroup_graph(&alt, Arc::clone(&c.pair));
            ensure(LabeledGraph::pointed_iso(&base.graph, 0, &other.graph, 0), || {
                format!("{}: {label} set gives a different graph", c.name)
            })?;
        }
    }
    Ok(format!("{} subgroups x 3 generating sets", corpus.len()))
}

fn kurosh_roundtrip() -> Outcome {
    let corpus = corpus();
    let mut factors = 0;
    let mut rank = 0;
    for c in &corpus {
        let sg = build(c);
        let d = decompose(&sg).map_err(|e| format!("{}: {e}", c.name))?;
        verify(&d, &sg).map_err(|e| format!("{}: {e:?}", c.name))?;
        factors += d.factors.len();
        rank += d.free_rank();
    }
    Ok(format!("{} of {} verified ({factors} factors, total free rank {rank})", corpus.len(), corpus.len()))
}

fn freeness() -> Outcome {
    let corpus = corpus();
    let mut free = 0;
    for c in &corpus {
        let sg = build(c);
        let d = decompose(&sg).map_err(|e| format!("{}: {e}", c.name))?;
        let comps = sg.graph.components();
        let all_cayley = comps.list.iter().all(|comp| {
            let local = sg.graph.component_graph(comp, comp.vertices[0]).unwrap();
            let group = c.pair.factor(comp.factor);
            let model = cayley_graph(group, comp.factor);
            LabeledGraph::pointed_iso(&local, local.basepoint(), &model, model.basepoint())
        });
        ensure(d.factors.is_empty() == all_cayley, || {
            format!("{}: {} factors but all-Cayley = {all_cayley}", c.name, d.factors.len())
        })?;
        free += usize::from(all_cayley);
    }
    Ok(format!("{} subgroups agree ({free} free)", corpus.len()))
}

fn scaling() -> Outcome {
    const C: f64 = 4.0;
    let p = z2z3();
    let a = Letter::positive(Factor::First, 0);
    let b = Letter::positive(Factor::Second, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut points = Vec::new();
    let mut worst: f64 = 0.0;
    for m in [50usize, 100, 200, 400, 800] {
        let count = 5;
        let gens: Vec<Word> = (0..count)
            .map(|_| {
                let mut w = Word::new();
                let mut use_a = rng.random_bool(0.5);
                for _ in 0..m / count {
                    w.push(if use_a {
                        a
                    } else if rng.random_bool(0.5) {
                        b
                    } else {
                        b.inv()
                    });
                    use_a = !use_a;
                }
                w
            })
            .collect();
        let total: usize = gens.iter().map(Word::len).sum();
        let sg = subgroup_graph(&gens, Arc::clone(&p));
        let ratio = sg.graph.edge_count() as f64 / total as f64;
        worst = worst.max(ratio);
        let mut samples = Vec::new();
        for _ in 0..5 {
            let reps = (4000 / m).max(1);
            let t = Instant::now();
            for _ in 0..reps {
                std::hint::black_box(subgroup_graph(&gens, Arc::clone(&p)));
            }
            samples.push(t.elapsed().as_secs_f64() / reps as f64);
        }
        samples.sort_by(f64::total_cmp);
        points.push((total as f64, samples[samples.len() / 2], sg.graph.edge_count()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let sizes: Vec<String> = points.iter().map(|p| format!("m={} |E|={}", p.0, p.2)).collect();
    ensure(worst <= C, || format!("|E|/m reached {worst:.2} > {C}"))?;
    ensure(slope <= 2.3, || format!("log-log slope {slope:.2}"))?;
    Ok(format!("C = {C} (max |E|/m = {worst:.2}), slope {slope:.2}; {}", sizes.join(", ")))
}

fn gallery() -> Outcome {
    let p = z4z6();
    let x = Letter::positive(Factor::First, 0);
    let y = Letter::positive(Factor::Second, 0);

    // x-components that are not covers: a 3-cycle and a lone edge.
    let mut tri = LabeledGraph::new(3, 0);
    tri.add_edge(0, x, 1);
    tri.add_edge(1, x, 2);
    tri.add_edge(2, x, 0);
    ensure(matches!(is_precover(&tri, &p), Err(PrecoverViolation::NotBased { .. })), || "x 3-cycle accepted".into())?;
    let mut hair = LabeledGraph::new(2, 0);
    hair.add_edge(0, x, 1);
    ensure(matches!(is_precover(&hair, &p), Err(PrecoverViolation::Unsaturated { .. })), || "lone x-edge accepted".into())?;

    // Cayley(Z4) and Cayley(Z6) sharing the basepoint.
    let mut two = LabeledGraph::new(9, 0);
    for i in 0..4 {
        two.add_edge(if i == 0 { 0 } else { i }, x, if i == 3 { 0 } else { i + 1 });
    }
    let ycycle = [0, 4, 5, 6, 7, 8];
    for i in 0..6 {
        two.add_edge(ycycle[i], y, ycycle[(i + 1) % 6]);
    }
    ensure(is_precover(&two, &p).is_ok(), || "two-component precover rejected".into())?;
    ensure(two.components().list.len() == 2, || "expected two components".into())?;

    // Cayley(Z4, <x^2>) and Cayley(Z6, <y^3>) sharing a vertex.
    let mut g4 = coset_graph(p.factor(Factor::First), Factor::First, &[0, 2]).unwrap();
    let offset = g4.vertex_count() - 1;
    let c6 = coset_graph(p.factor(Factor::Second), Factor::Second, &[0, 3]).unwrap();
    for _ in 1..c6.vertex_count() {
        g4.add_vertex();
    }
    let map = |v: usize| if v == 0 { 0 } else { v + offset };
    for (_, he) in c6.edges() {
        g4.add_edge(map(he.from), he.label, map(he.to));
    }
    ensure(is_precover(&g4, &p).is_ok(), || "coset-graph precover rejected".into())?;

    // A y 6-cycle (full Cayley graph, trivial stabilizer) with an x-loop at w.
    let w = 3;
    let mut g2 = LabeledGraph::new(6, 0);
    for i in 0..6 {
        g2.add_edge(i, y, (i + 1) % 6);
    }
    g2.add_edge(w, x, w);
    ensure(is_precover(&g2, &p).is_ok(), || "Γ2 is not a precover".into())?;
    let ycomp = g2.components().list.into_iter().find(|c| c.factor == Factor::Second).unwrap();
    ensure(ycomp.bichromatic == vec![w], || "expected exactly one bichromatic vertex".into())?;
    let stab = schreier_stabilizer(&g2, Factor::Second, 0, p.factor(Factor::Second)).unwrap();
    ensure(stab.len() == 1, || "stabilizer is not trivial".into())?;
    let at_w = g2.with_basepoint(w).unwrap();
    ensure(
        matches!(is_reduced_precover(&at_w, &p), Err(ReducedViolation::Redundant { .. })),
        || "not flagged redundant at w".into(),
    )?;
    for v in (0..6).filter(|&v| v != w) {
        let based = g2.with_basepoint(v).unwrap();
        ensure(is_reduced_precover(&based, &p).is_ok(), || format!("basepoint {v} should be reduced"))?;
    }
    let pruned = prune_redundant(&at_w, &p);
    ensure(pruned.vertex_count() == 1 && pruned.edge_count() == 1, || "pruning at w should leave the x-loop".into())?;
    Ok("non-covers rejected, precovers accepted, redundancy depends on the basepoint".into())
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pairs = [z2z3(), z4z6()];
    let mut cases = HashMap::new();
    let mut bump = |k: &'static str| *cases.entry(k).or_insert(0usize) += 1;

    for i in 0..300 {
        let p = &pairs[i % 2];
        let k = rng.random_range(1..=4);
        let gens: Vec<Word> = (0..k).map(|_| random_word(&mut rng, p, 10)).collect();
        let raw = bouquet(&gens);
        let folded = raw.fold_all();
        ensure(folded.is_well_labelled().is_ok(), || "fold output not well-labelled".into())?;
        ensure(folded.fold_all() == folded, || "fold not idempotent".into())?;
        bump("fold idempotence");
        let mut order: Vec<usize> = (0..raw.vertex_count()).collect();
        for j in (1..order.len()).rev() {
            order.swap(j, rng.random_range(0..=j));
        }
        let other = raw.fold_all_in_order(&order);
        ensure(LabeledGraph::pointed_iso(&folded, 0, &other, 0), || "fold order changes the result".into())?;
        bump("fold order independence");
    }

    for i in 0..300 {
        let p = &pairs[i % 2];
        let w = random_word(&mut rng, p, 12);
        let n = normalize(&w, p);
        let again = normalize(&n.to_word(p), p);
        ensure(n == again, || "normalize not idempotent".into())?;
        let syl = n.syllables();
        let group = |s: &Syllable| p.factor(s.factor);
        ensure(syl.iter().all(|s| s.element != group(s).identity()), || "identity syllable".into())?;
        ensure(syl.windows(2).all(|s| s[0].factor != s[1].factor), || "syllables do not alternate".into())?;
        let oracle = nf_of_word(p, &w);
        ensure(oracle.len() == syl.len(), || "normal form disagrees with the oracle".into())?;
        bump("normalize");
    }

    for i in 0..300 {
        let p = &pairs[i % 2];
        let k = rng.random_range(1..=3);
        let gens: Vec<Word> = (0..k).map(|_| random_word(&mut rng, p, 8)).collect();
        let sg = subgroup_graph(&gens, Arc::clone(p));
        for c in sg.graph.components().list {
            let group = p.factor(c.factor);
            for &v in c.vertices.iter().take(2) {
                let stab = schreier_stabilizer(&sg.graph, c.factor, v, group).map_err(|e| e.to_string())?;
                ensure(stab.len() * c.vertices.len() == group.order(), || "orbit-stabilizer count fails".into())?;
            }
        }
        bump("orbit-stabilizer");
        let d = decompose(&sg).map_err(|e| e.to_string())?;
        let expected = d.delta.edge_count() + 1 - d.delta.vertex_count();
        ensure(d.free_rank() == expected, || "rank formula fails".into())?;
        for w in &d.free_basis {
            ensure(!normalize(w, p).is_identity() && free_reduce(w) == *w, || "degenerate basis word".into())?;
        }
        bump("rank formula");
    }
    let total: usize = cases.values().sum();
    ensure(total >= 1000, || format!("only {total} cases"))?;
    let mut parts: Vec<String> = cases.iter().map(|(k, v)| format!("{k} {v}")).collect();
    parts.sort();
    Ok(format!("{total} cases ({})", parts.join(", ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("worked example end-to-end", worked_example),
        ("presentation of the worked example", presentation_check),
        ("membership agrees with closure oracle", membership_oracle),
        ("uniqueness of the subgroup graph", uniqueness),
        ("kurosh roundtrip", kurosh_roundtrip),
        ("freeness criterion", freeness),
        ("linear size and quadratic time", scaling),
        ("precover gallery", gallery),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
