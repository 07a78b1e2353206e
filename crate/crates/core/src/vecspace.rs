//! Embedding spaces: loading, saving, lookup and phrase vectorization.
//!
//! Vector files use the word2vec text layout:
//!
//! ```text
//! 2 3
//! casa 0.1 -0.2 0.3
//! perro 0.4 0.5 -0.6
//! ```
//!
//! The first line holds `<count> <dim>`, every other line a token followed
//! by exactly `dim` components separated by single spaces.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::embedtrain::PvModel;
use crate::error::{Error, Result};
use crate::numfmt::format_sig6;

/// What the tokens of a space stand for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    Word,
    Phrase,
}

/// An immutable token to dense-vector map of fixed dimension.
#[derive(Clone, Debug)]
pub struct VectorSpace {
    dim: usize,
    kind: SpaceKind,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
}

/// Check that a token can be stored in a space and written to any of the
/// table formats.
pub fn validate_token(token: &str) -> Result<()> {
    let reason = if token.is_empty() {
        "empty token"
    } else if token.contains("|||") {
        "contains the field separator `|||`"
    } else if token.contains(['\t', '\n', '\r']) {
        "contains a tab or line break"
    } else {
        return Ok(());
    };
    Err(Error::InvalidToken {
        token: token.to_string(),
        reason,
    })
}

impl VectorSpace {
    /// Build a space from `(token, vector)` entries. Duplicate tokens keep
    /// the first occurrence; the number of skipped duplicates is returned
    /// alongside the space.
    pub fn from_entries<I, S>(dim: usize, kind: SpaceKind, entries: I) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        if dim == 0 {
            return Err(Error::Empty("vector dimension"));
        }
        let mut space = VectorSpace {
            dim,
            kind,
            tokens: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        };
        let mut duplicates = 0;
        for (token, vector) in entries {
            if !space.push(token.into(), &vector)? {
                duplicates += 1;
            }
        }
        Ok((space, duplicates))
    }

    fn push(&mut self, token: String, vector: &[f64]) -> Result<bool> {
        validate_token(&token)?;
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("non-finite component for {token:?}")));
        }
        if self.index.contains_key(&token) {
            return Ok(false);
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.data.extend_from_slice(vector);
        Ok(true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens in insertion order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Exact-match lookup. Never synthesizes a vector for unknown tokens.
    pub fn lookup(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| self.row(i))
    }

    pub(crate) fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Iterate `(token, vector)` in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.tokens
            .iter()
            .enumerate()
            .map(move |(i, t)| (t.as_str(), self.row(i)))
    }

    /// A copy with every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> VectorSpace {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= factor);
        out
    }
}

/// Options for [`load_vectors_with`].
#[derive(Clone, Debug)]
pub struct LoadOptions {
    pub expected_dim: Option<usize>,
    /// Lowercase tokens while loading. Tokens that collide after folding
    /// are treated as duplicates.
    pub case_fold: bool,
    pub kind: SpaceKind,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            expected_dim: None,
            case_fold: false,
            kind: SpaceKind::Word,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub entries: usize,
    pub duplicates: usize,
}

/// Load a text vector file, warning about duplicate tokens.
pub fn load_vectors(path: impl AsRef<Path>, expected_dim: Option<usize>) -> Result<VectorSpace> {
    let path = path.as_ref();
    let opts = LoadOptions {
        expected_dim,
        ..LoadOptions::default()
    };
    let (space, report) = load_vectors_with(path, &opts)?;
    if report.duplicates > 0 {
        log::warn!(
            "{}: skipped {} duplicate token(s); first occurrence kept",
            path.display(),
            report.duplicates
        );
    }
    Ok(space)
}

pub fn load_vectors_with(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<(VectorSpace, LoadReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_vectors(BufReader::new(file), opts).map_err(|e| match e {
        Error::Format { line, message, .. } => Error::Format {
            path: path.to_path_buf(),
            line,
            message,
        },
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parse the vector text format from any reader. Errors carry line numbers
/// but an empty path.
pub fn read_vectors<R: BufRead>(reader: R, opts: &LoadOptions) -> Result<(VectorSpace, LoadReport)> {
    let fmt = |line: usize, message: String| Error::Format {
        path: Default::default(),
        line,
        message,
    };
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| Error::io("", e))?,
        None => return Err(fmt(1, "empty vector file".into())),
    };
    let mut fields = header.split_ascii_whitespace();
    let (count, dim) = match (fields.next(), fields.next(), fields.next()) {
        (Some(c), Some(d), None) => match (c.parse::<usize>(), d.parse::<usize>()) {
            (Ok(c), Ok(d)) if d > 0 => (c, d),
            _ => return Err(fmt(1, format!("bad header {header:?}"))),
        },
        _ => return Err(fmt(1, format!("header must be `<count> <dim>`, got {header:?}"))),
    };
    if let Some(expected) = opts.expected_dim {
        if expected != dim {
            return Err(fmt(1, format!("file has dimension {dim}, expected {expected}")));
        }
    }

    let mut space = VectorSpace {
        dim,
        kind: opts.kind,
        tokens: Vec::with_capacity(count),
        index: HashMap::with_capacity(count),
        data: Vec::with_capacity(count * dim),
    };
    let mut report = LoadReport::default();
    let mut row = Vec::with_capacity(dim);
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line.map_err(|e| Error::io("", e))?;
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(' ');
        let token = parts.next().unwrap_or_default();
        let token = if opts.case_fold {
            token.to_lowercase()
        } else {
            token.to_string()
        };
        row.clear();
        for part in parts {
            let v: f64 = part
                .parse()
                .map_err(|_| fmt(line_no, format!("non-numeric component {part:?}")))?;
            row.push(v);
        }
        if row.len() != dim {
            return Err(fmt(
                line_no,
                format!("row has {} components, header says {dim}", row.len()),
            ));
        }
        match space.push(token, &row) {
            Ok(true) => report.entries += 1,
            Ok(false) => report.duplicates += 1,
            Err(e) => return Err(fmt(line_no, e.to_string())),
        }
    }
    if space.is_empty() {
        return Err(fmt(1, "vector file has no entries".into()));
    }
    if space.len() + report.duplicates != count {
        log::warn!(
            "vector file header announces {count} rows, found {}",
            space.len() + report.duplicates
        );
    }
    Ok((space, report))
}

/// Write `space` in the text format read by [`load_vectors`]: tokens in
/// lexicographic order, 6 significant digits per component.
pub fn save_vectors(space: &VectorSpace, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if space.is_empty() {
        return Err(Error::Empty("vector space"));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_vectors(space, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_vectors<W: Write>(space: &VectorSpace, out: &mut W) -> std::io::Result<()> {
    let mut order: Vec<usize> = (0..space.len()).collect();
    order.sort_by(|&a, &b| space.tokens[a].cmp(&space.tokens[b]));
    writeln!(out, "{} {}", space.len(), space.dim)?;
    let mut line = String::new();
    for i in order {
        if space.tokens[i].contains(' ') {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("token {:?} contains a space and cannot be written", space.tokens[i]),
            ));
        }
        line.clear();
        line.push_str(&space.tokens[i]);
        for &v in space.row(i) {
            line.push(' ');
            line.push_str(&format_sig6(v));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// `a·b / (‖a‖‖b‖)`, clamped to `[-1, 1]`.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// How multi-word phrases are mapped to a single vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhraseStrategy {
    AverageOfWordVectors,
    ParagraphVectorInference,
}

/// Maps token sequences of any length to vectors of the space dimension.
#[derive(Clone, Copy, Debug)]
pub struct PhraseVectorizer<'a> {
    strategy: PhraseStrategy,
    word_space: &'a VectorSpace,
    pv_model: Option<&'a PvModel>,
}

impl<'a> PhraseVectorizer<'a> {
    pub fn average(word_space: &'a VectorSpace) -> Self {
        PhraseVectorizer {
            strategy: PhraseStrategy::AverageOfWordVectors,
            word_space,
            pv_model: None,
        }
    }

    /// Paragraph-vector inference over `pv`; `word_space` is kept for
    /// dimension checks.
    pub fn paragraph(word_space: &'a VectorSpace, pv: &'a PvModel) -> Self {
        PhraseVectorizer {
            strategy: PhraseStrategy::ParagraphVectorInference,
            word_space,
            pv_model: Some(pv),
        }
    }

    pub fn strategy(&self) -> PhraseStrategy {
        self.strategy
    }

    pub fn dim(&self) -> usize {
        self.word_space.dim()
    }

    pub fn word_space(&self) -> &'a VectorSpace {
        self.word_space
    }

    /// Vector for `phrase`, or `None` when it cannot be vectorized (all
    /// tokens unknown, or no paragraph model available).
    pub fn vectorize<S: AsRef<str>>(&self, phrase: &[S]) -> Result<Option<Vec<f64>>> {
        if phrase.is_empty() {
            return Err(Error::Empty("phrase"));
        }
        match self.strategy {
            PhraseStrategy::AverageOfWordVectors => Ok(average_vector(self.word_space, phrase)),
            PhraseStrategy::ParagraphVectorInference => {
                let Some(pv) = self.pv_model else {
                    return Ok(None);
                };
                match pv.infer(phrase) {
                    Ok(v) => Ok(Some(v)),
                    Err(Error::OutOfVocabulary(_)) => Ok(None),
                    Err(e) => Err(e),
                }
            }
        }
    }
}

/// Free-function form of [`PhraseVectorizer::vectorize`].
pub fn vectorize_phrase<S: AsRef<str>>(vz: &PhraseVectorizer<'_>, phrase: &[S]) -> Result<Option<Vec<f64>>> {
    vz.vectorize(phrase)
}

fn average_vector<S: AsRef<str>>(space: &VectorSpace, phrase: &[S]) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; space.dim()];
    let mut n = 0usize;
    for token in phrase {
        if let Some(v) = space.lookup(token.as_ref()) {
            sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
            n += 1;
        }
    }
    if n == 0 {
        return None;
    }
    let inv = 1.0 / n as f64;
    sum.iter_mut().for_each(|s| *s *= inv);
    Some(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<(VectorSpace, LoadReport)> {
        read_vectors(text.as_bytes(), &LoadOptions::default())
    }

    fn toy() -> VectorSpace {
        VectorSpace::from_entries(
            2,
            SpaceKind::Word,
            [("x", vec![1.0, 0.0]), ("y", vec![0.0, 1.0]), ("Casa", vec![3.0, 4.0])],
        )
        .unwrap()
        .0
    }

    #[test]
    fn parses_header_and_rows() {
        let (space, report) = read("2 3\na 1 0 0\nb 0 1 0\n").unwrap();
        assert_eq!(space.dim(), 3);
        assert_eq!(space.len(), 2);
        assert_eq!(space.lookup("b"), Some(&[0.0, 1.0, 0.0][..]));
        assert_eq!(report.duplicates, 0);
    }

    #[test]
    fn short_row_is_rejected_with_line_number() {
        let err = read("1 3\na 1 0\n").unwrap_err();
        match err {
            Error::Format { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("2 components"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(read("").is_err());
        assert!(read("1 2\na 1 x\n").is_err());
        assert!(read("1 2 3\na 1 1\n").is_err());
        assert!(read("1 2\na 1 inf\n").is_err());
        let opts = LoadOptions {
            expected_dim: Some(4),
            ..LoadOptions::default()
        };
        assert!(read_vectors("1 2\na 1 1\n".as_bytes(), &opts).is_err());
    }

    #[test]
    fn duplicates_keep_first() {
        let (space, report) = read("3 1\na 1\na 2\nb 3\n").unwrap();
        assert_eq!(space.lookup("a"), Some(&[1.0][..]));
        assert_eq!(report.duplicates, 1);
    }

    #[test]
    fn case_folding_is_opt_in() {
        let (space, _) = read("1 1\nCasa 1\n").unwrap();
        assert!(space.lookup("casa").is_none());
        let opts = LoadOptions {
            case_fold: true,
            ..LoadOptions::default()
        };
        let (space, _) = read_vectors("1 1\nCasa 1\n".as_bytes(), &opts).unwrap();
        assert!(space.lookup("casa").is_some());
    }

    #[test]
    fn separator_tokens_rejected() {
        assert!(validate_token("a|||b").is_err());
        assert!(validate_token("a\tb").is_err());
        assert!(validate_token("").is_err());
        assert!(validate_token("ñandú").is_ok());
    }

    #[test]
    fn lookup_is_exact() {
        let space = toy();
        assert_eq!(space.lookup("x"), Some(&[1.0, 0.0][..]));
        assert!(space.lookup("z").is_none());
        assert!(space.lookup("casa").is_none());
    }

    #[test]
    fn writes_sorted_rows() {
        let mut buf = Vec::new();
        write_vectors(&toy(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "3 2\nCasa 3 4\nx 1 0\ny 0 1\n");
    }

    #[test]
    fn empty_space_cannot_be_saved() {
        let (space, _) = VectorSpace::from_entries(2, SpaceKind::Word, Vec::<(String, Vec<f64>)>::new()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            save_vectors(&space, dir.path().join("v.txt")),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn cosine_cases() {
        assert!((cosine(&[1.0, 2.0], &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cosine(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(), -1.0);
        assert!(matches!(cosine(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroNorm)));
        assert!(matches!(cosine(&[1.0], &[1.0, 0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn average_phrase_vectors() {
        let space = toy();
        let vz = PhraseVectorizer::average(&space);
        assert_eq!(vz.vectorize(&["x"]).unwrap(), Some(vec![1.0, 0.0]));
        assert_eq!(vz.vectorize(&["x", "y"]).unwrap(), Some(vec![0.5, 0.5]));
        assert_eq!(vz.vectorize(&["x", "oov"]).unwrap(), Some(vec![1.0, 0.0]));
        assert_eq!(vz.vectorize(&["p", "q"]).unwrap(), None);
        assert!(vz.vectorize::<&str>(&[]).is_err());
    }
}
