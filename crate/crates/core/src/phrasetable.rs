//! Moses phrase tables and lexical translation tables.
//!
//! A phrase-table line looks like
//!
//! ```text
//! la casa ||| the house ||| 0.5 0.4 0.6 0.3 ||| 0-0 1-1 ||| 2 3 1
//! ```
//!
//! Fields are separated by `" ||| "`: source phrase, target phrase, scores,
//! an optional word alignment, and any further fields, which are carried
//! through untouched. The number of scores is not fixed.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::numfmt::format_sig6;

pub const FIELD_SEPARATOR: &str = " ||| ";
pub const DEFAULT_MAX_PHRASE_LENGTH: usize = 6;
pub const NULL_TOKEN: &str = "NULL";

#[derive(Clone, Debug, PartialEq)]
pub struct PhrasePair {
    pub src: Vec<String>,
    pub tgt: Vec<String>,
    pub scores: Vec<f64>,
    /// Zero-based `(source index, target index)` links.
    pub alignment: Vec<(usize, usize)>,
    /// Fields after the alignment, verbatim.
    pub raw_extras: Vec<String>,
}

impl PhrasePair {
    pub fn new<S: Into<String>>(src: impl IntoIterator<Item = S>, tgt: impl IntoIterator<Item = S>) -> Self {
        PhrasePair {
            src: src.into_iter().map(Into::into).collect(),
            tgt: tgt.into_iter().map(Into::into).collect(),
            scores: Vec::new(),
            alignment: Vec::new(),
            raw_extras: Vec::new(),
        }
    }

    /// Check the structural invariants against a phrase length limit.
    pub fn validate(&self, max_phrase_length: usize) -> Result<()> {
        for (side, tokens) in [("source", &self.src), ("target", &self.tgt)] {
            if tokens.is_empty() {
                return Err(Error::Parse(format!("empty {side} phrase")));
            }
            if tokens.len() > max_phrase_length {
                return Err(Error::Parse(format!(
                    "{side} phrase has {} tokens, limit is {max_phrase_length}",
                    tokens.len()
                )));
            }
            for t in tokens {
                if t.is_empty() || t.contains("|||") || t.contains(char::is_whitespace) {
                    return Err(Error::Parse(format!("invalid {side} token {t:?}")));
                }
            }
        }
        if let Some(s) = self.scores.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::Parse(format!("score {s} is not a finite non-negative number")));
        }
        if let Some(&(i, j)) = self.alignment.iter().find(|&&(i, j)| i >= self.src.len() || j >= self.tgt.len()) {
            return Err(Error::Parse(format!(
                "alignment link {i}-{j} out of range for {}x{} phrase pair",
                self.src.len(),
                self.tgt.len()
            )));
        }
        Ok(())
    }
}

/// Parser settings for phrase-table lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableFormat {
    pub max_phrase_length: usize,
}

impl Default for TableFormat {
    fn default() -> Self {
        TableFormat {
            max_phrase_length: DEFAULT_MAX_PHRASE_LENGTH,
        }
    }
}

/// Split a line on `" ||| "`. A bare `|||` inside a token, or glued to one,
/// is an error rather than a silent extra field.
pub fn split_fields(line: &str) -> Result<Vec<&str>> {
    let raw: Vec<&str> = line.split("|||").collect();
    let last = raw.len() - 1;
    let mut fields = Vec::with_capacity(raw.len());
    for (k, part) in raw.iter().enumerate() {
        let mut field = *part;
        if k > 0 {
            field = match field.strip_prefix(' ') {
                Some(f) => f,
                None if k == last && field.is_empty() => field,
                None => return Err(Error::Parse("`|||` inside a token".into())),
            };
        }
        if k < last {
            field = match field.strip_suffix(' ') {
                Some(f) => f,
                None if k > 0 && field.is_empty() => field,
                None => return Err(Error::Parse("`|||` inside a token".into())),
            };
        }
        fields.push(field);
    }
    Ok(fields)
}

fn parse_alignment(field: &str) -> Result<Vec<(usize, usize)>> {
    field
        .split_whitespace()
        .map(|link| {
            let parsed = link
                .split_once('-')
                .and_then(|(i, j)| Some((i.parse::<usize>().ok()?, j.parse::<usize>().ok()?)));
            parsed.ok_or_else(|| Error::Parse(format!("malformed alignment link {link:?}")))
        })
        .collect()
}

impl TableFormat {
    pub fn parse_line(&self, line: &str) -> Result<PhrasePair> {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let fields = split_fields(line)?;
        if fields.len() < 3 {
            return Err(Error::Parse(format!(
                "expected at least 3 `|||`-separated fields, found {}",
                fields.len()
            )));
        }
        let scores = fields[2]
            .split_whitespace()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("non-numeric score {s:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let pair = PhrasePair {
            src: fields[0].split_whitespace().map(str::to_string).collect(),
            tgt: fields[1].split_whitespace().map(str::to_string).collect(),
            scores,
            alignment: match fields.get(3) {
                Some(f) => parse_alignment(f)?,
                None => Vec::new(),
            },
            raw_extras: fields.iter().skip(4).map(|f| f.to_string()).collect(),
        };
        pair.validate(self.max_phrase_length)?;
        Ok(pair)
    }
}

/// Parse one line with the default phrase length limit.
pub fn parse_phrase_table_line(line: &str) -> Result<PhrasePair> {
    TableFormat::default().parse_line(line)
}

pub fn format_scores(scores: &[f64]) -> String {
    scores.iter().map(|&s| format_sig6(s)).collect::<Vec<_>>().join(" ")
}

pub fn format_alignment(alignment: &[(usize, usize)]) -> String {
    alignment
        .iter()
        .map(|(i, j)| format!("{i}-{j}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Render a pair as a table line (without a newline). The alignment field
/// is written when there are links, or when extras follow it.
pub fn emit_phrase_table_line(p: &PhrasePair) -> String {
    let mut line = format!("{} ||| {} ||| {}", p.src.join(" "), p.tgt.join(" "), format_scores(&p.scores));
    if !p.alignment.is_empty() || !p.raw_extras.is_empty() {
        line.push_str(FIELD_SEPARATOR);
        line.push_str(&format_alignment(&p.alignment));
    }
    for extra in &p.raw_extras {
        line.push_str(FIELD_SEPARATOR);
        line.push_str(extra);
    }
    line
}

/// Rewrite the score field of an already valid `line`, leaving every other
/// byte untouched. `extra` is appended after the existing scores.
pub fn append_scores_to_line(line: &str, extra: &[f64]) -> Result<String> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let mut fields: Vec<String> = split_fields(line)?.into_iter().map(str::to_string).collect();
    if fields.len() < 3 {
        return Err(Error::Parse("missing scores field".into()));
    }
    let added = format_scores(extra);
    if !added.is_empty() {
        if !fields[2].is_empty() {
            fields[2].push(' ');
        }
        fields[2].push_str(&added);
    }
    Ok(fields.join(FIELD_SEPARATOR))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LexiconEntry {
    /// Source word, `None` for the null word.
    pub f: Option<String>,
    /// Target word, `None` for the null word.
    pub e: Option<String>,
    pub p: f64,
}

impl LexiconEntry {
    pub fn is_null(&self) -> bool {
        self.f.is_none() || self.e.is_none()
    }
}

pub fn parse_lexicon_line(line: &str) -> Result<LexiconEntry> {
    let parts: Vec<&str> = line.split(' ').collect();
    if parts.len() != 3 || parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Parse(format!("expected `f e p`, found {} fields", parts.len())));
    }
    let p: f64 = parts[2]
        .parse()
        .map_err(|_| Error::Parse(format!("non-numeric probability {:?}", parts[2])))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parse(format!("probability {p} outside [0, 1]")));
    }
    let word = |t: &str| (t != NULL_TOKEN).then(|| t.to_string());
    let entry = LexiconEntry {
        f: word(parts[0]),
        e: word(parts[1]),
        p,
    };
    if entry.f.is_none() && entry.e.is_none() {
        return Err(Error::Parse("both sides are NULL".into()));
    }
    Ok(entry)
}

/// Read a lexical table of `f e p` lines. Duplicate `(f, e)` rows are
/// rejected.
pub fn parse_lexicon(path: impl AsRef<Path>) -> Result<Vec<LexiconEntry>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let entry = parse_lexicon_line(line).map_err(|e| e.at(path, i + 1))?;
        if !seen.insert((entry.f.clone(), entry.e.clone())) {
            return Err(Error::Parse(format!("duplicate entry {line:?}")).at(path, i + 1));
        }
        entries.push(entry);
    }
    Ok(entries)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

/// Outcome of streaming a table.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StreamSummary {
    pub lines_read: usize,
    pub valid: usize,
    pub errors: Vec<LineError>,
}

#[derive(Clone, Copy, Debug)]
pub struct StreamOptions {
    pub format: TableFormat,
    /// Malformed lines tolerated before the stream is aborted.
    pub error_cap: usize,
}

impl Default for StreamOptions {
    fn default() -> Self {
        StreamOptions {
            format: TableFormat::default(),
            error_cap: 1000,
        }
    }
}

/// One valid line handed to a [`stream_table`] callback.
pub struct TableRow<'a> {
    /// One-based line number.
    pub line_no: usize,
    pub raw: &'a str,
    pub pair: PhrasePair,
}

/// Visit every valid line of a table in file order, reading one line at a
/// time. Malformed lines are collected in the summary; exceeding the error
/// cap aborts with [`Error::ErrorCapExceeded`]. An error returned by the
/// callback aborts the stream.
pub fn stream_table<F>(path: impl AsRef<Path>, opts: &StreamOptions, mut callback: F) -> Result<StreamSummary>
where
    F: FnMut(TableRow<'_>) -> Result<()>,
{
    let path: PathBuf = path.as_ref().to_path_buf();
    let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut reader = BufReader::new(file);
    let mut summary = StreamSummary::default();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf).map_err(|e| Error::io(&path, e))?;
        if n == 0 {
            break;
        }
        summary.lines_read += 1;
        let line_no = summary.lines_read;
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        let parsed = std::str::from_utf8(&buf)
            .map_err(|_| Error::Parse("line is not valid UTF-8".into()))
            .and_then(|line| opts.format.parse_line(line).map(|pair| (line, pair)));
        match parsed {
            Ok((raw, pair)) => {
                summary.valid += 1;
                callback(TableRow { line_no, raw, pair })?;
            }
            Err(e) => {
                summary.errors.push(LineError {
                    line: line_no,
                    message: e.to_string(),
                });
                if summary.errors.len() > opts.error_cap {
                    return Err(Error::ErrorCapExceeded {
                        path,
                        cap: opts.error_cap,
                    });
                }
            }
        }
    }
    Ok(summary)
}
