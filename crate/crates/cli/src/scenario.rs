//! The line-oriented scenario format. See `docs/scenario.md` for the grammar.

use std::collections::BTreeMap;
use std::path::Path;

use slopecert_core::lattice::{DivisorClass, Preset, SurfaceModel};
use slopecert_core::rational::{parse_rational, Q};
use slopecert_core::sheaf::{FormalSheaf, SplitBundle};
use slopecert_core::CyclicCover;

use crate::error::{CliError, Result};
use crate::query::{parse_query_line, Query};

/// A declared bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bundle {
    Sheaf(FormalSheaf),
    Split(SplitBundle),
}

impl Bundle {
    pub fn as_sheaf(&self) -> FormalSheaf {
        match self {
            Bundle::Sheaf(f) => f.clone(),
            Bundle::Split(b) => b.as_sheaf(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryEntry {
    pub line: usize,
    pub text: String,
    pub query: Query,
}

#[derive(Debug, Clone, Default)]
pub struct Scenario {
    pub surface: Option<SurfaceModel>,
    pub cover: Option<CyclicCover>,
    pub bundles: BTreeMap<String, Bundle>,
    pub queries: Vec<QueryEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Surface,
    Cover,
    Bundles,
    Queries,
}

impl Section {
    fn parse(name: &str) -> Option<Section> {
        match name.trim() {
            "surface" => Some(Section::Surface),
            "cover" => Some(Section::Cover),
            "bundles" => Some(Section::Bundles),
            "queries" => Some(Section::Queries),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    key: String,
    value: String,
    value_column: usize,
}

struct Parser<'a> {
    path: &'a str,
}

impl Parser<'_> {
    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> CliError {
        CliError::Parse {
            path: self.path.to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    fn entry_err(&self, entry: &Entry, message: impl Into<String>) -> CliError {
        self.err(entry.line, entry.value_column, message)
    }
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Scenario::parse(&text, &path.display().to_string())
    }

    /// Parses scenario text; `path` is used only in error messages.
    pub fn parse(text: &str, path: &str) -> Result<Scenario> {
        let parser = Parser { path };
        let mut sections: BTreeMap<Section, (usize, Vec<Entry>)> = BTreeMap::new();
        let mut current: Option<Section> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            if let Some(name) = trimmed.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    parser.err(line_no, indent + 1, "section header must end with `]`")
                })?;
                let section = Section::parse(name).ok_or_else(|| {
                    parser.err(
                        line_no,
                        indent + 2,
                        format!("unknown section `{name}` (expected surface, cover, bundles or queries)"),
                    )
                })?;
                if let Some((first, _)) = sections.get(&section) {
                    return Err(parser.err(
                        line_no,
                        indent + 1,
                        format!("section `[{name}]` already declared on line {first}"),
                    ));
                }
                sections.insert(section, (line_no, Vec::new()));
                current = Some(section);
                continue;
            }
            let section = current.ok_or_else(|| {
                parser.err(line_no, indent + 1, "content before any section header")
            })?;
            let entries = &mut sections.get_mut(&section).expect("inserted").1;
            if section == Section::Queries {
                entries.push(Entry {
                    line: line_no,
                    key: String::new(),
                    value: trimmed.to_string(),
                    value_column: indent + 1,
                });
                continue;
            }
            let eq = content
                .find('=')
                .ok_or_else(|| parser.err(line_no, indent + 1, "expected `key = value`"))?;
            let key = content[..eq].trim();
            if key.is_empty() {
                return Err(parser.err(line_no, indent + 1, "missing key before `=`"));
            }
            let after = &content[eq + 1..];
            let value = after.trim();
            let value_column = eq + 2 + (after.len() - after.trim_start().len());
            if value.is_empty() {
                return Err(parser.err(
                    line_no,
                    value_column,
                    format!("missing value for `{key}`"),
                ));
            }
            entries.push(Entry {
                line: line_no,
                key: key.to_string(),
                value: value.to_string(),
                value_column,
            });
        }

        let take =
            |s: Section, sections: &mut BTreeMap<Section, (usize, Vec<Entry>)>| sections.remove(&s);

        let surface = take(Section::Surface, &mut sections)
            .map(|(line, entries)| parse_surface(&parser, line, &entries))
            .transpose()?;
        let cover = take(Section::Cover, &mut sections)
            .map(|(line, entries)| {
                let surface = surface
                    .as_ref()
                    .ok_or_else(|| parser.err(line, 1, "a [cover] needs a [surface] section"))?;
                parse_cover(&parser, line, &entries, surface)
            })
            .transpose()?;
        let mut bundles = BTreeMap::new();
        if let Some((line, entries)) = take(Section::Bundles, &mut sections) {
            let surface = surface
                .as_ref()
                .ok_or_else(|| parser.err(line, 1, "[bundles] need a [surface] section"))?;
            for entry in &entries {
                if !is_identifier(&entry.key) {
                    return Err(parser.err(
                        entry.line,
                        1,
                        format!("bundle name `{}` is not an identifier", entry.key),
                    ));
                }
                if bundles.contains_key(&entry.key) {
                    return Err(parser.err(
                        entry.line,
                        1,
                        format!("bundle `{}` declared twice", entry.key),
                    ));
                }
                let bundle = parse_bundle(&parser, entry, surface)?;
                bundles.insert(entry.key.clone(), bundle);
            }
        }
        let mut queries = Vec::new();
        if let Some((_, entries)) = take(Section::Queries, &mut sections) {
            for entry in entries {
                let query =
                    parse_query_line(&entry.value).map_err(|m| parser.entry_err(&entry, m))?;
                for name in query.bundle_refs() {
                    if !bundles.contains_key(name) {
                        return Err(CliError::Unresolved {
                            name: name.to_string(),
                            line: Some(entry.line),
                        });
                    }
                }
                queries.push(QueryEntry {
                    line: entry.line,
                    text: entry.value,
                    query,
                });
            }
        }
        Ok(Scenario {
            surface,
            cover,
            bundles,
            queries,
        })
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn lookup<'e>(entries: &'e [Entry], key: &str) -> Option<&'e Entry> {
    entries.iter().find(|e| e.key == key)
}

fn check_keys(parser: &Parser, entries: &[Entry], allowed: &[&str]) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    for e in entries {
        if !allowed.contains(&e.key.as_str()) {
            return Err(parser.err(
                e.line,
                1,
                format!(
                    "unknown key `{}` (expected one of: {})",
                    e.key,
                    allowed.join(", ")
                ),
            ));
        }
        if seen.contains(&e.key.as_str()) {
            return Err(parser.err(e.line, 1, format!("key `{}` given twice", e.key)));
        }
        seen.push(&e.key);
    }
    Ok(())
}

fn parse_surface(parser: &Parser, header_line: usize, entries: &[Entry]) -> Result<SurfaceModel> {
    check_keys(
        parser,
        entries,
        &[
            "preset",
            "name",
            "generators",
            "matrix",
            "canonical",
            "polarization",
        ],
    )?;
    if let Some(preset_entry) = lookup(entries, "preset") {
        let preset = Preset::from_name(&preset_entry.value).ok_or_else(|| {
            parser.entry_err(
                preset_entry,
                format!(
                    "unknown preset `{}` (expected p2 or product)",
                    preset_entry.value
                ),
            )
        })?;
        for key in ["name", "generators", "matrix", "polarization"] {
            if let Some(e) = lookup(entries, key) {
                return Err(parser.err(
                    e.line,
                    1,
                    format!("`{key}` cannot be combined with a preset"),
                ));
            }
        }
        return match (preset, lookup(entries, "canonical")) {
            (Preset::ProjectivePlane, Some(e)) => {
                Err(parser.err(e.line, 1, "the p2 preset has a fixed canonical class"))
            }
            (Preset::ProjectivePlane, None) => Ok(SurfaceModel::projective_plane()),
            (Preset::ProductOfCurves, canonical) => {
                let gens = ["a".to_string(), "b".to_string()];
                let canonical = canonical
                    .map(|e| parse_class(&e.value, &gens).map_err(|m| parser.entry_err(e, m)))
                    .transpose()?;
                SurfaceModel::product_of_curves(canonical).map_err(CliError::invariant(format!(
                    "surface on line {header_line}"
                )))
            }
        };
    }

    let require = |key: &str| {
        lookup(entries, key).ok_or_else(|| {
            parser.err(
                header_line,
                1,
                format!("[surface] needs `preset` or `{key}`"),
            )
        })
    };
    let gens_entry = require("generators")?;
    let generators: Vec<String> = gens_entry
        .value
        .split_whitespace()
        .map(str::to_string)
        .collect();
    if let Some(bad) = generators.iter().find(|g| !is_identifier(g)) {
        return Err(parser.entry_err(
            gens_entry,
            format!("generator `{bad}` is not an identifier"),
        ));
    }
    let matrix_entry = require("matrix")?;
    let matrix = matrix_entry
        .value
        .split(';')
        .map(|row| {
            row.split_whitespace()
                .map(|x| {
                    x.parse::<i64>()
                        .map_err(|_| format!("`{x}` is not an integer"))
                })
                .collect::<std::result::Result<Vec<i64>, String>>()
        })
        .collect::<std::result::Result<Vec<_>, String>>()
        .map_err(|m| parser.entry_err(matrix_entry, m))?;
    let class = |key: &str| -> Result<DivisorClass> {
        let e = require(key)?;
        parse_class(&e.value, &generators).map_err(|m| parser.entry_err(e, m))
    };
    let canonical = class("canonical")?;
    let polarization = class("polarization")?;
    let name = lookup(entries, "name")
        .map(|e| e.value.clone())
        .unwrap_or_else(|| "surface".to_string());
    SurfaceModel::new(name, generators, matrix, canonical, polarization).map_err(
        CliError::invariant(format!("surface on line {header_line}")),
    )
}

fn parse_cover(
    parser: &Parser,
    header_line: usize,
    entries: &[Entry],
    surface: &SurfaceModel,
) -> Result<CyclicCover> {
    // `L` is accepted as an alias for `line`.
    let entries: Vec<Entry> = entries
        .iter()
        .cloned()
        .map(|mut e| {
            if e.key == "L" {
                e.key = "line".into();
            }
            e
        })
        .collect();
    let entries = entries.as_slice();
    check_keys(parser, entries, &["line", "n", "char"])?;
    let require = |key: &str| {
        lookup(entries, key)
            .ok_or_else(|| parser.err(header_line, 1, format!("[cover] needs `{key}`")))
    };
    let line_entry = require("line")?;
    let line = parse_class(&line_entry.value, surface.generators())
        .map_err(|m| parser.entry_err(line_entry, m))?;
    let n_entry = require("n")?;
    let n: u32 = n_entry
        .value
        .parse()
        .map_err(|_| parser.entry_err(n_entry, "cover degree must be a positive integer"))?;
    let char_p: u64 = match lookup(entries, "char") {
        Some(e) => e
            .value
            .parse()
            .map_err(|_| parser.entry_err(e, "characteristic must be a nonnegative integer"))?,
        None => 0,
    };
    CyclicCover::new(surface.clone(), line, n, char_p)
        .map_err(CliError::invariant(format!("cover on line {header_line}")))
}

fn parse_bundle(parser: &Parser, entry: &Entry, surface: &SurfaceModel) -> Result<Bundle> {
    let (kind, rest) = entry
        .value
        .split_once(char::is_whitespace)
        .map(|(k, r)| (k, r.trim()))
        .unwrap_or((entry.value.as_str(), ""));
    let gens = surface.generators();
    let class = |text: &str| parse_class(text, gens).map_err(|m| parser.entry_err(entry, m));
    let bundle = match kind {
        "cotangent" if rest.is_empty() => Bundle::Sheaf(FormalSheaf::cotangent(surface)),
        "line" => Bundle::Split(SplitBundle::new(vec![class(rest)?]).map_err(
            CliError::invariant(format!("bundle on line {}", entry.line)),
        )?),
        "trivial" => {
            let rank: u32 = rest
                .parse()
                .map_err(|_| parser.entry_err(entry, "trivial bundle needs a rank"))?;
            Bundle::Sheaf(FormalSheaf::trivial(rank, surface.rank()).map_err(
                CliError::invariant(format!("bundle on line {}", entry.line)),
            )?)
        }
        "sheaf" => {
            let (rank, c1) = rest
                .split_once(char::is_whitespace)
                .ok_or_else(|| parser.entry_err(entry, "expected `sheaf <rank> <class>`"))?;
            let rank: u32 = rank
                .parse()
                .map_err(|_| parser.entry_err(entry, format!("`{rank}` is not a rank")))?;
            Bundle::Sheaf(FormalSheaf::new(rank, class(c1.trim())?).map_err(
                CliError::invariant(format!("bundle on line {}", entry.line)),
            )?)
        }
        "split" => {
            let summands = rest
                .split(';')
                .map(|s| class(s.trim()))
                .collect::<Result<Vec<_>>>()?;
            Bundle::Split(
                SplitBundle::new(summands).map_err(CliError::invariant(format!(
                    "bundle on line {}",
                    entry.line
                )))?,
            )
        }
        _ => {
            return Err(parser.entry_err(
                entry,
                format!(
                    "unknown bundle form `{}` (expected sheaf, line, split, trivial or cotangent)",
                    entry.value
                ),
            ))
        }
    };
    Ok(bundle.labelled(&entry.key))
}

impl Bundle {
    fn labelled(self, name: &str) -> Bundle {
        match self {
            Bundle::Sheaf(f) => Bundle::Sheaf(f.with_label(name)),
            split => split,
        }
    }
}

/// Parses a divisor class: either one rational per generator
/// (`-3`, `1 1/2`) or a combination of generator labels (`3h`, `2a - 1/2 b`).
/// Coefficients precede their label.
pub fn parse_class(text: &str, generators: &[String]) -> std::result::Result<DivisorClass, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty divisor class".into());
    }
    let plain: Vec<&str> = text.split_whitespace().collect();
    if plain.len() == generators.len() {
        if let Ok(coeffs) = plain
            .iter()
            .map(|t| parse_rational(t))
            .collect::<std::result::Result<Vec<Q>, _>>()
        {
            return Ok(DivisorClass::new(coeffs));
        }
    }
    if text == "0" {
        return Ok(DivisorClass::zero(generators.len()));
    }
    parse_combination(text, generators)
}

fn parse_combination(
    text: &str,
    generators: &[String],
) -> std::result::Result<DivisorClass, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bytes = compact.as_bytes();
    let mut coeffs = vec![Q::from_integer(0.into()); generators.len()];
    let mut i = 0;
    let mut first = true;
    while i < bytes.len() {
        let negative = match bytes[i] {
            b'+' => {
                i += 1;
                false
            }
            b'-' => {
                i += 1;
                true
            }
            _ if first => false,
            _ => return Err(format!("expected `+` or `-` in `{text}`")),
        };
        first = false;
        let start = i;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'/') {
            i += 1;
        }
        let coefficient = if start == i {
            Q::from_integer(1.into())
        } else {
            parse_rational(&compact[start..i]).map_err(|e| e.to_string())?
        };
        if i < bytes.len() && bytes[i] == b'*' {
            i += 1;
        }
        let label_start = i;
        if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
        }
        let label = &compact[label_start..i];
        if label.is_empty() {
            return Err(format!(
                "expected a generator label in `{text}` (generators: {})",
                generators.join(", ")
            ));
        }
        let slot = generators.iter().position(|g| g == label).ok_or_else(|| {
            format!(
                "unknown generator `{label}` (generators: {})",
                generators.join(", ")
            )
        })?;
        let coefficient = if negative { -coefficient } else { coefficient };
        coeffs[slot] += coefficient;
    }
    Ok(DivisorClass::new(coeffs))
}
