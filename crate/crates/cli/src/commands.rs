use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use freeprod::fingroup::reidemeister_schreier;
use freeprod::kurosh::{decompose, verify, KuroshDecomposition};
use freeprod::words::normalize;
use freeprod::{subgroup_graph, FactorPair, SubgroupGraph, Word};

use crate::problem::{self, Problem};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Build,
    Member(String),
    Kurosh,
    Present,
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub dot: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub cap: Option<usize>,
    /// Worker threads for multiple files; 0 or 1 runs them in turn.
    pub jobs: usize,
}

/// Output of one command on one file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    pub exit: i32,
}

/// Runs `command` on every file, in file order.
pub fn run(command: &Command, files: &[PathBuf], opts: &Options) -> Vec<Result<Report, CliError>> {
    if files.len() > 1 && (opts.dot.is_some() || opts.out.is_some()) {
        return files
            .iter()
            .map(|_| Err(CliError::Usage("--dot and --out take a single problem file".into())))
            .collect();
    }
    let job = |path: &PathBuf| execute(command, path, opts);
    #[cfg(feature = "parallel")]
    if opts.jobs > 1 && files.len() > 1 {
        use rayon::prelude::*;
        match rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build() {
            Ok(pool) => return pool.install(|| files.par_iter().map(job).collect()),
            Err(e) => return files.iter().map(|_| Err(CliError::Usage(e.to_string()))).collect(),
        }
    }
    files.iter().map(job).collect()
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn execute(command: &Command, path: &Path, opts: &Options) -> Result<Report, CliError> {
    let problem = problem::load(path, opts.cap)?;
    let sg = subgroup_graph(&problem.generators, Arc::clone(&problem.pair));
    let (text, exit) = match command {
        Command::Build => (build(&problem, &sg, opts)?, 0),
        Command::Member(w) => member(&problem, &sg, w)?,
        Command::Kurosh => (kurosh(&problem, &sg)?, 0),
        Command::Present => (present(&problem, &sg)?, 0),
    };
    if let Some(out) = opts.out.as_ref().or(problem.out.as_ref()) {
        write_file(out, &text)?;
    }
    Ok(Report { text, exit })
}

fn build(problem: &Problem, sg: &SubgroupGraph, opts: &Options) -> Result<String, CliError> {
    let cert = &sg.certification;
    let mut s = String::new();
    let _ = writeln!(s, "vertices: {}", cert.vertices);
    let _ = writeln!(s, "edges: {}", cert.edges);
    let _ = writeln!(s, "components: {}", sg.graph.components().list.len());
    let _ = writeln!(s, "precover: {}", cert.precover);
    let _ = writeln!(s, "reduced: {}", cert.reduced);
    match sg.index_if_finite() {
        Some(i) => {
            let _ = writeln!(s, "index: {i}");
        }
        None => s.push_str("index: infinite\n"),
    }
    let _ = writeln!(s, "input_length: {}", cert.input_length);
    if let Some(dot) = opts.dot.as_ref().or(problem.dot.as_ref()) {
        write_file(dot, &sg.graph.to_dot(&problem.pair))?;
    }
    Ok(s)
}

fn render(pair: &FactorPair, w: &Word) -> String {
    pair.format_word(w)
}

fn member(problem: &Problem, sg: &SubgroupGraph, text: &str) -> Result<(String, i32), CliError> {
    let word = problem.pair.parse_word(text).map_err(|e| CliError::Parse {
        path: "--word".into(),
        line: 1,
        column: e.offset() + 1,
        message: e.to_string(),
    })?;
    let normal = normalize(&word, &problem.pair);
    let is_member = sg.contains(&word);
    let mut s = String::new();
    let _ = writeln!(s, "normal_form: {}", problem.pair.format_normal(&normal));
    let _ = writeln!(s, "syllable_length: {}", normal.syllable_length());
    let _ = writeln!(s, "member: {is_member}");
    Ok((s, if is_member { 0 } else { 1 }))
}

fn decomposition(sg: &SubgroupGraph) -> Result<KuroshDecomposition, CliError> {
    let d = decompose(sg)?;
    verify(&d, sg).map_err(|f| CliError::Verify(format!("{f:?}")))?;
    Ok(d)
}

fn kurosh(problem: &Problem, sg: &SubgroupGraph) -> Result<String, CliError> {
    let pair = &problem.pair;
    let d = decomposition(sg)?;
    let mut parts: Vec<String> = d.free_basis.iter().map(|w| format!("<{}>", render(pair, w))).collect();
    let mut record = String::new();
    let _ = writeln!(record, "factors: {}", d.factors.len());
    for (i, f) in d.factors.iter().enumerate() {
        let group = pair.factor(f.factor);
        let local = reidemeister_schreier(group, &f.subgroup).map_err(|source| CliError::Group {
            path: problem.path.display().to_string(),
            line: 0,
            source,
        })?;
        let gens: Vec<String> = local
            .aliases
            .iter()
            .map(|a| render(pair, &pair.lift(f.factor, a)))
            .collect();
        let conj = render(pair, &f.conjugator);
        let inner = format!("<{}>", gens.join(", "));
        parts.push(if f.conjugator.is_empty() {
            inner
        } else {
            format!("({conj}) {inner} ({conj})^-1")
        });
        let k = i + 1;
        let _ = writeln!(record, "factor.{k}.group: {}", problem.names[f.factor.index()]);
        let _ = writeln!(record, "factor.{k}.order: {}", f.subgroup.len());
        let _ = writeln!(record, "factor.{k}.generators: {}", gens.join(", "));
        let _ = writeln!(record, "factor.{k}.conjugator: {conj}");
        let _ = writeln!(record, "factor.{k}.conjugator_normal: {}", pair.format_normal(&f.conjugator_normal));
    }
    let _ = writeln!(record, "free_rank: {}", d.free_rank());
    for (i, w) in d.free_basis.iter().enumerate() {
        let _ = writeln!(record, "free_basis.{}: {}", i + 1, render(pair, w));
    }
    record.push_str("verified: true\n");
    let summary = if parts.is_empty() { "1".to_string() } else { parts.join(" * ") };
    Ok(format!("decomposition: {summary}\n{record}"))
}

fn present(problem: &Problem, sg: &SubgroupGraph) -> Result<String, CliError> {
    let d = decomposition(sg)?;
    let p = d.presentation.unwrap_or_else(freeprod::Presentation::empty);
    let mut s = String::new();
    let _ = writeln!(s, "generators: {}", p.generators.len());
    for (name, alias) in p.generators.iter().zip(&p.aliases) {
        let _ = writeln!(s, "{name} = {}", render(&problem.pair, alias));
    }
    let _ = writeln!(s, "relators: {}", p.relators.len());
    for r in &p.relators {
        let _ = writeln!(s, "relator: {}", p.format_relator(r));
    }
    let _ = writeln!(s, "fallback: {}", p.fallback);
    let _ = writeln!(s, "presentation: {p}");
    Ok(s)
}
