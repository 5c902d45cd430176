//! Problem files.
//!
//! ```text
//! # G = Z2 * Z3
//! [factor G1]
//! type = cyclic 2
//! generators = a
//!
//! [factor G2]
//! type = presentation
//! generators = b
//! relators = b^3
//!
//! [subgroup]
//! generators = a b a^-1 b^-1, b a b a b a
//!
//! [options]
//! cap = 4096
//! dot = out.dot
//! ```
//!
//! Factor types are `cyclic N`, `table FILE` (generators written `name:element`)
//! and `presentation` (generators plus comma-separated relators). A table
//! file holds an optional order line, then one row of element ids per line;
//! element 0 need not be the identity. Paths are relative to the problem file.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use freeprod::fingroup::{parse_gen_word, DEFAULT_CAP};
use freeprod::{FactorPair, FiniteGroup, GroupError, Word, WordError};

use crate::CliError;

#[derive(Clone, Debug)]
pub struct Problem {
    pub path: PathBuf,
    pub names: [String; 2],
    pub pair: Arc<FactorPair>,
    pub generators: Vec<Word>,
    pub cap: usize,
    pub dot: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// `key = value` with the position of the value.
#[derive(Clone, Debug)]
struct Entry {
    value: String,
    line: usize,
    column: usize,
}

#[derive(Debug, Default)]
struct Section {
    header: String,
    line: usize,
    entries: HashMap<String, Entry>,
}

fn parse_error(path: &Path, line: usize, column: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        line,
        column,
        message: message.into(),
    }
}

fn sections(text: &str, path: &Path) -> Result<Vec<Section>, CliError> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(header) = rest.strip_suffix(']') else {
                return Err(parse_error(path, line, indent + 1, "unterminated section header"));
            };
            out.push(Section {
                header: header.split_whitespace().collect::<Vec<_>>().join(" "),
                line,
                entries: HashMap::new(),
            });
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(parse_error(path, line, indent + 1, "expected `key = value`"));
        };
        let Some(section) = out.last_mut() else {
            return Err(parse_error(path, line, indent + 1, "entry outside any section"));
        };
        let key = key.trim().to_string();
        let value_start = key_end(content) + 1;
        let lead = value.len() - value.trim_start().len();
        let entry = Entry {
            value: value.trim().to_string(),
            line,
            column: value_start + lead + 1,
        };
        if section.entries.insert(key.clone(), entry).is_some() {
            return Err(parse_error(path, line, indent + 1, format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

fn key_end(content: &str) -> usize {
    content.find('=').unwrap_or(0)
}

/// Splits a comma-separated value, keeping each item's column.
fn items(entry: &Entry) -> Vec<(String, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for part in entry.value.split(',') {
        let lead = part.len() - part.trim_start().len();
        let item = part.trim();
        if !item.is_empty() {
            out.push((item.to_string(), entry.column + start + lead));
        }
        start += part.len() + 1;
    }
    out
}

fn word_error(path: &Path, entry_line: usize, column: usize, e: &WordError) -> CliError {
    parse_error(path, entry_line, column + e.offset(), e.to_string())
}

fn group_error(path: &Path, line: usize, source: GroupError) -> CliError {
    CliError::Group {
        path: path.display().to_string(),
        line,
        source,
    }
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn require(&self, key: &str, path: &Path) -> Result<&Entry, CliError> {
        self.get(key)
            .ok_or_else(|| parse_error(path, self.line, 1, format!("[{}] needs `{key}`", self.header)))
    }

    fn allow_only(&self, keys: &[&str], path: &Path) -> Result<(), CliError> {
        let mut unknown: Vec<(&String, &Entry)> = self.entries.iter().filter(|(k, _)| !keys.contains(&k.as_str())).collect();
        unknown.sort_by_key(|(_, e)| e.line);
        match unknown.first() {
            Some((k, e)) => Err(parse_error(path, e.line, 1, format!("unknown key `{k}` in [{}]", self.header))),
            None => Ok(()),
        }
    }
}

fn parse_usize(entry: &Entry, text: &str, path: &Path) -> Result<usize, CliError> {
    text.trim()
        .parse()
        .map_err(|_| parse_error(path, entry.line, entry.column, format!("expected a number, found `{text}`")))
}

fn read_table(file: &Path) -> Result<Vec<Vec<usize>>, CliError> {
    let text = std::fs::read_to_string(file).map_err(|source| CliError::Io {
        path: file.display().to_string(),
        source,
    })?;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let base = content.as_ptr() as usize;
        let mut row = Vec::new();
        for token in content.split_whitespace() {
            let column = token.as_ptr() as usize - base + 1;
            let value = token
                .parse()
                .map_err(|_| parse_error(file, i + 1, column, format!("expected an element id, found `{token}`")))?;
            row.push(value);
        }
        rows.push(row);
        lines.push(i + 1);
    }
    // An optional first line gives the order.
    if rows.len() > 1 && rows[0].len() == 1 {
        let order = rows.remove(0)[0];
        if rows.len() != order {
            let message = format!("order line says {order} but {} rows follow", rows.len());
            return Err(parse_error(file, lines[0], 1, message));
        }
    }
    Ok(rows)
}

fn build_factor(section: &Section, path: &Path, cap: usize) -> Result<FiniteGroup, CliError> {
    section.allow_only(&["type", "generators", "relators"], path)?;
    let kind = section.require("type", path)?;
    let gens = section.require("generators", path)?;
    let mut words = kind.value.split_whitespace();
    let head = words.next().unwrap_or("");
    let arg = words.collect::<Vec<_>>().join(" ");
    let group = match head {
        "cyclic" => {
            let n = parse_usize(kind, &arg, path)?;
            let names = items(gens);
            let [(name, _)] = names.as_slice() else {
                return Err(parse_error(path, gens.line, gens.column, "a cyclic factor has exactly one generator"));
            };
            if n > cap {
                return Err(group_error(path, kind.line, GroupError::TooLarge { order: n, cap }));
            }
            FiniteGroup::cyclic(n, name).map_err(|e| group_error(path, kind.line, e))?
        }
        "table" => {
            if arg.is_empty() {
                return Err(parse_error(path, kind.line, kind.column, "`table` needs a file name"));
            }
            let file = path.parent().unwrap_or(Path::new(".")).join(&arg);
            let table = read_table(&file)?;
            let mut generators = Vec::new();
            for (item, column) in items(gens) {
                let Some((name, element)) = item.split_once(':') else {
                    return Err(parse_error(path, gens.line, column, "table generators are written `name:element`"));
                };
                let element = element
                    .trim()
                    .parse()
                    .map_err(|_| parse_error(path, gens.line, column, format!("bad element id in `{item}`")))?;
                generators.push((name.trim().to_string(), element));
            }
            FiniteGroup::from_table_with(table, generators, cap, freeprod::Execution::default())
                .map_err(|e| group_error(path, kind.line, e))?
        }
        "presentation" => {
            let labels: Vec<String> = items(gens).into_iter().map(|(n, _)| n).collect();
            let relators = parse_relators(section, &labels, path)?.unwrap_or_default();
            return FiniteGroup::from_presentation(&labels, &relators, cap).map_err(|e| group_error(path, kind.line, e));
        }
        other => {
            return Err(parse_error(
                path,
                kind.line,
                kind.column,
                format!("unknown factor type `{other}` (expected cyclic, table or presentation)"),
            ))
        }
    };
    match parse_relators(section, &group.labels(), path)? {
        Some(relators) if head == "table" => group
            .with_relators(relators)
            .map_err(|e| group_error(path, section.get("relators").map_or(section.line, |e| e.line), e)),
        Some(_) => Err(parse_error(
            path,
            section.get("relators").map_or(section.line, |e| e.line),
            1,
            "a cyclic factor takes no relators",
        )),
        None => Ok(group),
    }
}

fn parse_relators(section: &Section, labels: &[String], path: &Path) -> Result<Option<Vec<freeprod::GenWord>>, CliError> {
    let Some(entry) = section.get("relators") else {
        return Ok(None);
    };
    let mut out = Vec::new();
    for (item, column) in items(entry) {
        out.push(parse_gen_word(&item, labels).map_err(|e| word_error(path, entry.line, column, &e))?);
    }
    Ok(Some(out))
}

/// Reads and resolves a problem file; `cap` overrides the file's `cap` option.
pub fn load(path: &Path, cap: Option<usize>) -> Result<Problem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text, path, cap)
}

pub fn parse(text: &str, path: &Path, cap_override: Option<usize>) -> Result<Problem, CliError> {
    let sections = sections(text, path)?;
    let mut factors = Vec::new();
    let mut subgroup = None;
    let mut options = None;
    for s in &sections {
        match s.header.split_once(' ') {
            Some(("factor", name)) => factors.push((name.to_string(), s)),
            _ if s.header == "subgroup" && subgroup.is_none() => subgroup = Some(s),
            _ if s.header == "options" && options.is_none() => options = Some(s),
            _ => return Err(parse_error(path, s.line, 1, format!("unexpected section [{}]", s.header))),
        }
    }
    if factors.len() != 2 {
        let line = factors.get(2).map_or(sections.last().map_or(1, |s| s.line), |(_, s)| s.line);
        return Err(parse_error(path, line, 1, format!("expected two [factor NAME] sections, found {}", factors.len())));
    }

    let base = path.parent().unwrap_or(Path::new("."));
    let mut cap = DEFAULT_CAP;
    let mut dot = None;
    let mut out = None;
    if let Some(o) = options {
        o.allow_only(&["cap", "dot", "out"], path)?;
        if let Some(e) = o.get("cap") {
            cap = parse_usize(e, &e.value, path)?;
        }
        dot = o.get("dot").map(|e| base.join(&e.value));
        out = o.get("out").map(|e| base.join(&e.value));
    }
    let cap = cap_override.unwrap_or(cap);

    let first = build_factor(factors[0].1, path, cap)?;
    let second = build_factor(factors[1].1, path, cap)?;
    let pair = FactorPair::new(first, second).map_err(|e| group_error(path, factors[1].1.line, e))?;

    let mut generators = Vec::new();
    if let Some(s) = subgroup {
        s.allow_only(&["generators"], path)?;
        if let Some(entry) = s.get("generators") {
            for (item, column) in items(entry) {
                generators.push(pair.parse_word(&item).map_err(|e| word_error(path, entry.line, column, &e))?);
            }
        }
    }
    Ok(Problem {
        path: path.to_path_buf(),
        names: [factors[0].0.clone(), factors[1].0.clone()],
        pair: Arc::new(pair),
        generators,
        cap,
        dot,
        out,
    })
}
