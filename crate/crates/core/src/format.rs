//! Text formats: `thurston-map v1` presentations, words, curves, multicurves
//! and oracle responses.
//!
//! ```text
//! thurston-map v1
//! comment rabbit-like example
//! degree 2
//! punctures
//!   a maps_to c local_degree 1
//!   ...
//! monodromy
//!   a (1 2)
//!   ...
//! restrictions
//!   a x3 | 1
//!   ...
//! ```
//!
//! Restriction rows list one word per sheet over `x1..x{n-1}`, separated by
//! `|`; the row of the last puncture may be omitted. Blank lines and text
//! after `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cover::{CoverError, CoverPresentation};
use crate::freegroup::ReducedWord;
use crate::perm::Perm;
use crate::pipeline::OracleAnswer;
use crate::sphere::{CurveClass, DisjointnessProvenance, Multicurve, PuncturedSphere};

pub const HEADER: &str = "thurston-map v1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Cover(#[from] CoverError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

/// Parses `x1 x2^-1 x3^2`; `1` or an empty string is the identity.
pub fn parse_word(text: &str, rank: usize) -> Result<ReducedWord, String> {
    let mut raw = Vec::new();
    for tok in text.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let body = tok.strip_prefix('x').ok_or_else(|| format!("bad generator token `{tok}`"))?;
        let (idx, exp) = match body.split_once('^') {
            Some((i, e)) => (i, e.parse::<i32>().map_err(|_| format!("bad exponent in `{tok}`"))?),
            None => (body, 1),
        };
        let idx: i32 = idx.parse().map_err(|_| format!("bad generator index in `{tok}`"))?;
        if idx < 1 || idx as usize > rank {
            return Err(format!("generator `{tok}` outside x1..x{rank}"));
        }
        if exp.unsigned_abs() > 1 << 16 {
            return Err(format!("exponent too large in `{tok}`"));
        }
        let letter = if exp < 0 { -idx } else { idx };
        raw.extend(std::iter::repeat(letter).take(exp.unsigned_abs() as usize));
    }
    ReducedWord::from_signed(&raw, rank).map_err(|e| e.to_string())
}

/// A curve as a word, or `standard i j` for the curve around punctures `i..=j`.
pub fn parse_curve(s: &PuncturedSphere, text: &str) -> Result<CurveClass, String> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.first() == Some(&"standard") {
        let [_, i, j] = toks[..] else { return Err("expected `standard i j`".into()) };
        let i: usize = i.parse().map_err(|_| "bad index".to_string())?;
        let j: usize = j.parse().map_err(|_| "bad index".to_string())?;
        return s.standard_curve(i, j).map_err(|e| e.to_string());
    }
    let w = parse_word(text, s.rank())?;
    CurveClass::from_word(s, &w).map_err(|e| e.to_string())
}

/// One curve per line (or `;`-separated); disjointness is taken on trust.
pub fn parse_multicurve(s: &PuncturedSphere, text: &str) -> Result<Multicurve, FormatError> {
    let mut curves = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = strip_comment(line);
        for part in line.split(';') {
            if !part.trim().is_empty() {
                curves.push(parse_curve(s, part).map_err(|e| syntax(k + 1, e))?);
            }
        }
    }
    Multicurve::new(curves, DisjointnessProvenance::UserAsserted).map_err(|e| syntax(0, e.to_string()))
}

pub fn parse_oracle_response(line: &str) -> Result<OracleAnswer, String> {
    let line = line.trim();
    if line == "unavailable" {
        return Ok(OracleAnswer::Unavailable);
    }
    match line.strip_prefix("token:") {
        Some(t) if !t.is_empty() && !t.contains(char::is_whitespace) => Ok(OracleAnswer::Token(t.to_string())),
        _ => Err(format!("unrecognised oracle response `{line}`")),
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Punctures,
    Monodromy,
    Restrictions,
}

struct Draft {
    comments: Vec<String>,
    degree: Option<usize>,
    names: Vec<String>,
    dynamics: Vec<(usize, String, usize)>,
    monodromy: Vec<(usize, String, String)>,
    rows: Vec<(usize, String, String)>,
}

/// Parses and validates a `thurston-map v1` document.
pub fn parse_presentation(text: &str) -> Result<CoverPresentation, FormatError> {
    Ok(parse_unvalidated(text)?.0.validated()?)
}

/// Parses without running the presentation checks; also returns the comments.
pub fn parse_unvalidated(text: &str) -> Result<(CoverPresentation, Vec<String>), FormatError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, strip_comment(l))).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, HEADER)) => {}
        Some((k, other)) => return Err(syntax(k, format!("expected `{HEADER}`, found `{other}`"))),
        None => return Err(syntax(0, "empty document")),
    }
    let mut d = Draft { comments: Vec::new(), degree: None, names: Vec::new(), dynamics: Vec::new(), monodromy: Vec::new(), rows: Vec::new() };
    let mut section = Section::None;
    let mut seen = Vec::new();
    for (k, line) in lines {
        let (head, rest) = line.split_once(char::is_whitespace).map_or((line, ""), |(h, r)| (h, r.trim()));
        let next = match head {
            "comment" => {
                d.comments.push(rest.to_string());
                continue;
            }
            "degree" => {
                if d.degree.is_some() {
                    return Err(syntax(k, "duplicate degree"));
                }
                d.degree = Some(rest.parse().map_err(|_| syntax(k, format!("bad degree `{rest}`")))?);
                section = Section::None;
                continue;
            }
            "punctures" => Some(Section::Punctures),
            "monodromy" => Some(Section::Monodromy),
            "restrictions" => Some(Section::Restrictions),
            _ => None,
        };
        if let Some(s) = next {
            if !rest.is_empty() {
                return Err(syntax(k, format!("unexpected text after `{head}`")));
            }
            if seen.contains(&head) {
                return Err(syntax(k, format!("duplicate section `{head}`")));
            }
            seen.push(head);
            section = s;
            continue;
        }
        match section {
            Section::None => return Err(syntax(k, format!("unexpected line `{line}`"))),
            Section::Punctures => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                let [name, "maps_to", target, "local_degree", local] = toks[..] else {
                    return Err(syntax(k, "expected `<name> maps_to <name> local_degree <k>`"));
                };
                if d.names.iter().any(|x| x == name) {
                    return Err(syntax(k, format!("duplicate puncture `{name}`")));
                }
                let local = local.parse().map_err(|_| syntax(k, format!("bad local degree `{local}`")))?;
                d.names.push(name.to_string());
                d.dynamics.push((k, target.to_string(), local));
            }
            Section::Monodromy => d.monodromy.push((k, head.to_string(), rest.to_string())),
            Section::Restrictions => d.rows.push((k, head.to_string(), rest.to_string())),
        }
    }
    let degree = d.degree.ok_or_else(|| syntax(0, "missing degree"))?;
    let n = d.names.len();
    if n < 3 {
        return Err(syntax(0, format!("need at least 3 punctures, found {n}")));
    }
    let index: HashMap<&str, usize> = d.names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let lookup = |k: usize, name: &str| index.get(name).copied().ok_or_else(|| syntax(k, format!("unknown puncture `{name}`")));
    let mut point_map = Vec::with_capacity(n);
    let mut local_degrees = Vec::with_capacity(n);
    for (k, target, local) in &d.dynamics {
        point_map.push(lookup(*k, target)?);
        local_degrees.push(*local);
    }
    let mut monodromy: Vec<Option<Perm>> = vec![None; n];
    for (k, name, cycles) in &d.monodromy {
        let i = lookup(*k, name)?;
        if monodromy[i].is_some() {
            return Err(syntax(*k, format!("duplicate monodromy for `{name}`")));
        }
        monodromy[i] = Some(Perm::parse_cycles(cycles, degree).map_err(|e| syntax(*k, e.to_string()))?);
    }
    let monodromy: Vec<Perm> = monodromy
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| syntax(0, format!("missing monodromy for `{}`", d.names[i]))))
        .collect::<Result<_, _>>()?;
    let rank = n - 1;
    let mut rows: Vec<Option<Vec<ReducedWord>>> = vec![None; n];
    for (k, name, body) in &d.rows {
        let i = lookup(*k, name)?;
        if rows[i].is_some() {
            return Err(syntax(*k, format!("duplicate restrictions for `{name}`")));
        }
        let words: Vec<ReducedWord> =
            body.split('|').map(|w| parse_word(w, rank).map_err(|e| syntax(*k, e))).collect::<Result<_, _>>()?;
        if words.len() != degree {
            return Err(syntax(*k, format!("expected {degree} words, found {}", words.len())));
        }
        rows[i] = Some(words);
    }
    let last = rows[n - 1].is_some();
    let rows: Vec<Vec<ReducedWord>> = rows
        .into_iter()
        .take(if last { n } else { n - 1 })
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| syntax(0, format!("missing restrictions for `{}`", d.names[i]))))
        .collect::<Result<_, _>>()?;
    let base = PuncturedSphere::with_labels(d.names).map_err(|e| syntax(0, e.to_string()))?;
    let f = CoverPresentation::new(degree, base, monodromy, rows, point_map, local_degrees)?;
    Ok((f, d.comments))
}

/// Emits a document that parses back to the same presentation.
pub fn emit_presentation(f: &CoverPresentation, comments: &[String]) -> String {
    let names = f.base().labels();
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    for c in comments {
        writeln!(out, "comment {c}").unwrap();
    }
    writeln!(out, "degree {}", f.degree()).unwrap();
    writeln!(out, "punctures").unwrap();
    for (i, name) in names.iter().enumerate() {
        writeln!(out, "  {name} maps_to {} local_degree {}", names[f.point_map()[i]], f.local_degrees()[i]).unwrap();
    }
    writeln!(out, "monodromy").unwrap();
    for (name, p) in names.iter().zip(f.monodromy()) {
        writeln!(out, "  {name} {p}").unwrap();
    }
    writeln!(out, "restrictions").unwrap();
    for (name, row) in names.iter().zip(f.restrictions()) {
        let words: Vec<String> = row.iter().map(ToString::to_string).collect();
        writeln!(out, "  {name} {}", words.join(" | ")).unwrap();
    }
    out
}
