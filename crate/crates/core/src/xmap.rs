//! Linear projections between embedding spaces.
//!
//! A [`ProjectionMatrix`] is learned from seed pairs `(x_i, z_i)` so that
//! projecting a source vector lands near its counterpart in the target
//! space. Two solvers are provided: an exact ridge least-squares solve and a
//! stochastic gradient descent solver over the same objective.
//!
//! The matrix is stored `d_src × d_tgt`, row `i` holding the contribution of
//! source component `i`; projecting `x` yields `z_j = Σ_i x_i · M[i][j]`.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::vecspace::{cosine, norm, PhraseVectorizer, VectorSpace};

/// Longest sentence, in tokens per side, accepted as a phrase-level seed.
pub const MAX_SEED_SENTENCE_LEN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    SrcToTgt,
    TgtToSrc,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::SrcToTgt => Direction::TgtToSrc,
            Direction::TgtToSrc => Direction::SrcToTgt,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::SrcToTgt => "src-tgt",
            Direction::TgtToSrc => "tgt-src",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "src-tgt" | "direct" => Ok(Direction::SrcToTgt),
            "tgt-src" | "inverse" => Ok(Direction::TgtToSrc),
            other => Err(Error::Parse(format!("unknown direction {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Word,
    Phrase,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Word => "word",
            Level::Phrase => "phrase",
        })
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "word" => Ok(Level::Word),
            "phrase" => Ok(Level::Phrase),
            other => Err(Error::Parse(format!("unknown level {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Solver {
    ClosedForm { ridge: f64 },
    Sgd { epochs: usize, learning_rate: f64, seed: u64 },
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Solver::ClosedForm { ridge } => write!(f, "closed-form (ridge {ridge})"),
            Solver::Sgd {
                epochs,
                learning_rate,
                seed,
            } => write!(f, "sgd ({epochs} epochs, learning rate {learning_rate}, seed {seed})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingReport {
    pub pairs: usize,
    pub dropped: usize,
    /// Mean squared residual `‖project(x_i) − z_i‖²` over the training pairs.
    pub final_loss: f64,
    pub solver: Solver,
}

impl fmt::Display for TrainingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} pairs ({} dropped), mean squared residual {:.6e}, solver {}",
            self.pairs, self.dropped, self.final_loss, self.solver
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMatrix {
    d_src: usize,
    d_tgt: usize,
    data: Vec<f64>,
    pub direction: Direction,
    pub level: Level,
    pub report: Option<TrainingReport>,
}

impl ProjectionMatrix {
    /// Matrix from row-major `d_src × d_tgt` entries.
    pub fn from_rows(d_src: usize, d_tgt: usize, data: Vec<f64>, direction: Direction, level: Level) -> Result<Self> {
        if data.len() != d_src * d_tgt {
            return Err(Error::DimensionMismatch {
                expected: d_src * d_tgt,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("matrix has non-finite entries".into()));
        }
        Ok(ProjectionMatrix {
            d_src,
            d_tgt,
            data,
            direction,
            level,
            report: None,
        })
    }

    pub fn identity(d: usize, direction: Direction, level: Level) -> Self {
        let mut data = vec![0.0; d * d];
        (0..d).for_each(|i| data[i * d + i] = 1.0);
        ProjectionMatrix::from_rows(d, d, data, direction, level).expect("square identity")
    }

    pub fn zeros(d_src: usize, d_tgt: usize, direction: Direction, level: Level) -> Self {
        ProjectionMatrix::from_rows(d_src, d_tgt, vec![0.0; d_src * d_tgt], direction, level).expect("zero matrix")
    }

    pub fn d_src(&self) -> usize {
        self.d_src
    }

    pub fn d_tgt(&self) -> usize {
        self.d_tgt
    }

    pub fn rows(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d_tgt + j]
    }

    /// Project `x` from the source space into the target space.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d_src {
            return Err(Error::DimensionMismatch {
                expected: self.d_src,
                actual: x.len(),
            });
        }
        let mut z = vec![0.0; self.d_tgt];
        self.project_into(x, &mut z);
        Ok(z)
    }

    fn project_into(&self, x: &[f64], z: &mut [f64]) {
        z.iter_mut().for_each(|v| *v = 0.0);
        for (xi, row) in x.iter().zip(self.data.chunks_exact(self.d_tgt)) {
            if *xi != 0.0 {
                z.iter_mut().zip(row).for_each(|(zj, m)| *zj += xi * m);
            }
        }
    }

    /// Frobenius distance to `other`.
    pub fn frobenius_distance(&self, other: &ProjectionMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        self.write(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(path, e))
    }

    /// Text layout: `<d_src> <d_tgt> <direction> <level>` then `d_src` rows of
    /// `d_tgt` numbers in shortest round-trip form.
    pub fn write<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "{} {} {} {}", self.d_src, self.d_tgt, self.direction, self.level)?;
        let mut line = String::new();
        for row in self.data.chunks_exact(self.d_tgt) {
            line.clear();
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    line.push(' ');
                }
                line.push_str(&v.to_string());
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ProjectionMatrix> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file)).map_err(|e| match e {
            Error::Format { line, message, .. } => Error::Format {
                path: path.to_path_buf(),
                line,
                message,
            },
            other => other,
        })
    }

    pub fn read<R: BufRead>(reader: R) -> Result<ProjectionMatrix> {
        let bad = |line: usize, message: String| Error::Format {
            path: Default::default(),
            line,
            message,
        };
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| bad(1, "empty matrix file".into()))?
            .map_err(|e| Error::io("", e))?;
        let h: Vec<&str> = header.split_ascii_whitespace().collect();
        if h.len() != 4 {
            return Err(bad(1, "expected `<d_src> <d_tgt> <direction> <level>`".into()));
        }
        let d_src: usize = h[0].parse().map_err(|_| bad(1, "bad d_src".into()))?;
        let d_tgt: usize = h[1].parse().map_err(|_| bad(1, "bad d_tgt".into()))?;
        let direction: Direction = h[2].parse().map_err(|e: Error| bad(1, e.to_string()))?;
        let level: Level = h[3].parse().map_err(|e: Error| bad(1, e.to_string()))?;
        let mut data = Vec::with_capacity(d_src * d_tgt);
        let mut rows = 0;
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io("", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let before = data.len();
            for part in line.split_ascii_whitespace() {
                data.push(
                    part.parse::<f64>()
                        .map_err(|_| bad(i + 2, format!("non-numeric entry {part:?}")))?,
                );
            }
            if data.len() - before != d_tgt {
                return Err(bad(i + 2, format!("row has {} entries, expected {d_tgt}", data.len() - before)));
            }
            rows += 1;
        }
        if rows != d_src {
            return Err(bad(1, format!("found {rows} rows, expected {d_src}")));
        }
        ProjectionMatrix::from_rows(d_src, d_tgt, data, direction, level)
    }
}

/// Free-function form of [`ProjectionMatrix::project`].
pub fn project(m: &ProjectionMatrix, x: &[f64]) -> Result<Vec<f64>> {
    m.project(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Word pairs from a bilingual dictionary.
    Dictionary,
    /// Short sentence pairs from a parallel corpus.
    ParallelShortSentences,
}

impl Provenance {
    pub fn level(self) -> Level {
        match self {
            Provenance::Dictionary => Level::Word,
            Provenance::ParallelShortSentences => Level::Phrase,
        }
    }
}

/// Seed pairs for learning one projection. Pairs are oriented along
/// `direction`: the first element lives in the space being projected.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedPairs {
    pairs: Vec<(String, String)>,
    pub provenance: Provenance,
    pub direction: Direction,
}

impl SeedPairs {
    /// Deduplicate `pairs`, keeping first occurrences. Sentence pairs with a
    /// side outside `1..=MAX_SEED_SENTENCE_LEN` tokens are discarded.
    pub fn new<I, A, B>(pairs: I, provenance: Provenance) -> SeedPairs
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for (a, b) in pairs {
            let (a, b) = (a.into(), b.into());
            if provenance == Provenance::ParallelShortSentences
                && !(short_sentence(&a) && short_sentence(&b))
            {
                continue;
            }
            if seen.insert((a.clone(), b.clone())) {
                kept.push((a, b));
            }
        }
        SeedPairs {
            pairs: kept,
            provenance,
            direction: Direction::SrcToTgt,
        }
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The same pairs oriented the other way, for training the inverse map.
    pub fn reversed(&self) -> SeedPairs {
        SeedPairs {
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
            provenance: self.provenance,
            direction: self.direction.reversed(),
        }
    }

    /// Keep the `n` pairs whose source side is most frequent according to
    /// `frequency`; ties keep file order.
    pub fn most_frequent(&self, n: usize, frequency: impl Fn(&str) -> u64) -> SeedPairs {
        let mut order: Vec<usize> = (0..self.pairs.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(frequency(&self.pairs[i].0)));
        order.truncate(n);
        order.sort_unstable();
        SeedPairs {
            pairs: order.into_iter().map(|i| self.pairs[i].clone()).collect(),
            ..self.clone()
        }
    }

    /// A seeded uniform sample of `n` distinct pairs, in original order.
    pub fn sample(&self, n: usize, seed: u64) -> SeedPairs {
        let mut order: Vec<usize> = (0..self.pairs.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        order.truncate(n);
        order.sort_unstable();
        SeedPairs {
            pairs: order.into_iter().map(|i| self.pairs[i].clone()).collect(),
            ..self.clone()
        }
    }

    /// Look each side up verbatim in its space; pairs with an unknown side
    /// are dropped and counted.
    pub fn resolve(&self, src: &VectorSpace, tgt: &VectorSpace) -> ResolvedPairs {
        let mut out = ResolvedPairs::empty(src.dim(), tgt.dim(), self.direction, self.provenance.level());
        for (a, b) in &self.pairs {
            match (src.lookup(a), tgt.lookup(b)) {
                (Some(x), Some(z)) => out.push(x, z),
                _ => out.dropped += 1,
            }
        }
        out
    }

    /// Vectorize each side as a whitespace-tokenized phrase.
    pub fn resolve_with(&self, src: &PhraseVectorizer<'_>, tgt: &PhraseVectorizer<'_>) -> Result<ResolvedPairs> {
        let mut out = ResolvedPairs::empty(src.dim(), tgt.dim(), self.direction, self.provenance.level());
        for (a, b) in &self.pairs {
            let a: Vec<&str> = a.split_whitespace().collect();
            let b: Vec<&str> = b.split_whitespace().collect();
            if a.is_empty() || b.is_empty() {
                out.dropped += 1;
                continue;
            }
            match (src.vectorize(&a)?, tgt.vectorize(&b)?) {
                (Some(x), Some(z)) => out.push(&x, &z),
                _ => out.dropped += 1,
            }
        }
        Ok(out)
    }

    fn resolve_default(&self, src: &VectorSpace, tgt: &VectorSpace) -> Result<ResolvedPairs> {
        match self.provenance {
            Provenance::Dictionary => Ok(self.resolve(src, tgt)),
            Provenance::ParallelShortSentences => {
                self.resolve_with(&PhraseVectorizer::average(src), &PhraseVectorizer::average(tgt))
            }
        }
    }
}

fn short_sentence(s: &str) -> bool {
    (1..=MAX_SEED_SENTENCE_LEN).contains(&s.split_whitespace().count())
}

/// Read `source<TAB>target` lines.
pub fn read_seed_file(path: impl AsRef<Path>, provenance: Provenance) -> Result<SeedPairs> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match line.split_once('\t') {
            Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() && !b.contains('\t') => {
                pairs.push((a.trim().to_string(), b.trim().to_string()))
            }
            _ => return Err(Error::Parse("expected `source<TAB>target`".into()).at(path, i + 1)),
        }
    }
    Ok(SeedPairs::new(pairs, provenance))
}

/// Aligned training vectors: `n` rows of `d_src` and `d_tgt` values.
#[derive(Clone, Debug)]
pub struct ResolvedPairs {
    pub d_src: usize,
    pub d_tgt: usize,
    pub src: Vec<f64>,
    pub tgt: Vec<f64>,
    pub dropped: usize,
    pub direction: Direction,
    pub level: Level,
}

impl ResolvedPairs {
    pub fn empty(d_src: usize, d_tgt: usize, direction: Direction, level: Level) -> Self {
        ResolvedPairs {
            d_src,
            d_tgt,
            src: Vec::new(),
            tgt: Vec::new(),
            dropped: 0,
            direction,
            level,
        }
    }

    pub fn push(&mut self, x: &[f64], z: &[f64]) {
        assert_eq!(x.len(), self.d_src, "source vector dimension");
        assert_eq!(z.len(), self.d_tgt, "target vector dimension");
        self.src.extend_from_slice(x);
        self.tgt.extend_from_slice(z);
    }

    pub fn len(&self) -> usize {
        self.src.len() / self.d_src.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.src.is_empty()
    }

    pub fn source(&self, i: usize) -> &[f64] {
        &self.src[i * self.d_src..(i + 1) * self.d_src]
    }

    pub fn target(&self, i: usize) -> &[f64] {
        &self.tgt[i * self.d_tgt..(i + 1) * self.d_tgt]
    }

    /// Mean squared residual of `m` over these pairs.
    pub fn mean_loss(&self, m: &ProjectionMatrix) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let mut z = vec![0.0; self.d_tgt];
        let total: f64 = (0..self.len())
            .map(|i| {
                m.project_into(self.source(i), &mut z);
                z.iter().zip(self.target(i)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            })
            .sum();
        total / self.len() as f64
    }
}

/// Exact minimizer of `Σ‖project(x_i) − z_i‖² + ridge·‖M‖²_F`.
pub fn fit_closed_form(data: &ResolvedPairs, ridge: f64) -> Result<ProjectionMatrix> {
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::Config(format!("ridge must be non-negative, got {ridge}")));
    }
    let (n, d_src, d_tgt) = (data.len(), data.d_src, data.d_tgt);
    if n == 0 {
        return Err(Error::Empty("no resolvable seed pairs"));
    }
    if ridge == 0.0 && n < d_src {
        return Err(Error::Singular { pairs: n, dim: d_src });
    }
    let x = DMatrix::from_row_slice(n, d_src, &data.src);
    let z = DMatrix::from_row_slice(n, d_tgt, &data.tgt);
    let svd = x.svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let sigma = &svd.singular_values;
    let s_max = sigma.max();
    if ridge == 0.0 {
        let tol = s_max * (n.max(d_src) as f64) * f64::EPSILON;
        if s_max == 0.0 || sigma.iter().any(|&s| s <= tol) {
            return Err(Error::Singular { pairs: n, dim: d_src });
        }
    }
    // M = V · diag(s / (s² + ridge)) · Uᵀ · Z
    let mut ut_z = u.transpose() * &z;
    for (k, mut row) in ut_z.row_iter_mut().enumerate() {
        let s = sigma[k];
        let scale = if s == 0.0 { 0.0 } else { s / (s * s + ridge) };
        row *= scale;
    }
    let m = v_t.transpose() * ut_z;
    let mut rows = Vec::with_capacity(d_src * d_tgt);
    for i in 0..d_src {
        rows.extend((0..d_tgt).map(|j| m[(i, j)]));
    }
    let mut out = ProjectionMatrix::from_rows(d_src, d_tgt, rows, data.direction, data.level)?;
    out.report = Some(TrainingReport {
        pairs: n,
        dropped: data.dropped,
        final_loss: data.mean_loss(&out),
        solver: Solver::ClosedForm { ridge },
    });
    Ok(out)
}

/// Per-pair squared residual and its gradient with respect to the matrix
/// entries (row-major, same layout as the matrix).
pub fn pair_loss_and_gradient(m: &ProjectionMatrix, x: &[f64], z: &[f64]) -> Result<(f64, Vec<f64>)> {
    let projected = m.project(x)?;
    if z.len() != m.d_tgt {
        return Err(Error::DimensionMismatch {
            expected: m.d_tgt,
            actual: z.len(),
        });
    }
    let residual: Vec<f64> = projected.iter().zip(z).map(|(p, t)| p - t).collect();
    let loss = residual.iter().map(|r| r * r).sum();
    let mut grad = Vec::with_capacity(m.data.len());
    for xi in x {
        grad.extend(residual.iter().map(|r| 2.0 * xi * r));
    }
    Ok((loss, grad))
}

/// Stochastic gradient descent on the mean squared residual, from the zero
/// matrix, visiting pairs in a seeded shuffled order each epoch.
///
/// `learning_rate` is relative: the step applied for a pair is
/// `learning_rate / mean‖x‖²` times the residual gradient, decayed linearly
/// to zero over the run, so one value works across embedding scales.
pub fn fit_sgd(data: &ResolvedPairs, epochs: usize, learning_rate: f64, seed: u64) -> Result<ProjectionMatrix> {
    let (n, d_src, d_tgt) = (data.len(), data.d_src, data.d_tgt);
    if n == 0 {
        return Err(Error::Empty("no resolvable seed pairs"));
    }
    if !(learning_rate > 0.0 && learning_rate.is_finite()) {
        return Err(Error::Config(format!("learning rate must be positive, got {learning_rate}")));
    }
    let mut m = ProjectionMatrix::zeros(d_src, d_tgt, data.direction, data.level);
    let mean_sq_norm = (0..n).map(|i| norm(data.source(i)).powi(2)).sum::<f64>() / n as f64;
    if mean_sq_norm > 0.0 {
        let base = learning_rate / mean_sq_norm;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut residual = vec![0.0; d_tgt];
        let total = (epochs * n) as f64;
        let mut step = 0usize;
        for _ in 0..epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                let lr = base * (1.0 - step as f64 / total);
                step += 1;
                let x = data.source(i);
                m.project_into(x, &mut residual);
                residual.iter_mut().zip(data.target(i)).for_each(|(r, t)| *r -= t);
                // d/dM of ‖r‖² is 2·x·rᵀ; the factor 2 is folded into the rate.
                for (xi, row) in x.iter().zip(m.data.chunks_exact_mut(d_tgt)) {
                    let a = lr * xi;
                    row.iter_mut().zip(&residual).for_each(|(w, r)| *w -= a * r);
                }
            }
        }
    }
    m.report = Some(TrainingReport {
        pairs: n,
        dropped: data.dropped,
        final_loss: data.mean_loss(&m),
        solver: Solver::Sgd {
            epochs,
            learning_rate,
            seed,
        },
    });
    Ok(m)
}

pub fn train_projection_closed_form(
    pairs: &SeedPairs,
    src: &VectorSpace,
    tgt: &VectorSpace,
    ridge: f64,
) -> Result<ProjectionMatrix> {
    fit_closed_form(&pairs.resolve_default(src, tgt)?, ridge)
}

pub fn train_projection_sgd(
    pairs: &SeedPairs,
    src: &VectorSpace,
    tgt: &VectorSpace,
    epochs: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<ProjectionMatrix> {
    fit_sgd(&pairs.resolve_default(src, tgt)?, epochs, learning_rate, seed)
}

/// The `k` target tokens closest (by cosine) to the projection of `token`,
/// best first; ties are broken by token order.
pub fn induce_translations(
    m: &ProjectionMatrix,
    src: &VectorSpace,
    tgt: &VectorSpace,
    token: &str,
    k: usize,
) -> Result<Vec<(String, f64)>> {
    let x = src
        .lookup(token)
        .ok_or_else(|| Error::OutOfVocabulary(token.to_string()))?;
    let z = m.project(x)?;
    if z.len() != tgt.dim() {
        return Err(Error::DimensionMismatch {
            expected: tgt.dim(),
            actual: z.len(),
        });
    }
    if norm(&z) == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut scored: Vec<(&str, f64)> = tgt
        .tokens()
        .par_iter()
        .enumerate()
        .filter_map(|(i, t)| cosine(&z, tgt.row(i)).ok().map(|c| (t.as_str(), c)))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    scored.truncate(k);
    Ok(scored.into_iter().map(|(t, c)| (t.to_string(), c)).collect())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct InductionEval {
    pub queries: usize,
    pub correct: usize,
    pub oov: usize,
}

impl InductionEval {
    /// Fraction of in-vocabulary queries whose gold translation appears in
    /// the top `k`.
    pub fn precision(&self) -> f64 {
        let scored = self.queries - self.oov;
        if scored == 0 {
            0.0
        } else {
            self.correct as f64 / scored as f64
        }
    }
}

/// Precision@k of `m` over gold `(source, target)` pairs. A source with
/// several gold targets counts as correct if any of them is retrieved.
pub fn evaluate_induction(
    m: &ProjectionMatrix,
    src: &VectorSpace,
    tgt: &VectorSpace,
    gold: &[(String, String)],
    k: usize,
) -> Result<InductionEval> {
    let mut by_source: Vec<(&str, Vec<&str>)> = Vec::new();
    for (s, t) in gold {
        match by_source.iter_mut().find(|(q, _)| q == s) {
            Some((_, ts)) => ts.push(t),
            None => by_source.push((s, vec![t])),
        }
    }
    let mut eval = InductionEval::default();
    for (query, golds) in by_source {
        eval.queries += 1;
        match induce_translations(m, src, tgt, query, k) {
            Ok(ranked) => {
                if ranked.iter().any(|(t, _)| golds.contains(&t.as_str())) {
                    eval.correct += 1;
                }
            }
            Err(Error::OutOfVocabulary(_)) | Err(Error::ZeroNorm) => eval.oov += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(eval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecspace::SpaceKind;

    fn space(entries: &[(&str, &[f64])]) -> VectorSpace {
        VectorSpace::from_entries(
            entries[0].1.len(),
            SpaceKind::Word,
            entries.iter().map(|(t, v)| (t.to_string(), v.to_vec())),
        )
        .unwrap()
        .0
    }

    #[test]
    fn identity_and_zero_projection() {
        let x = [0.3, -1.0, 2.0];
        let id = ProjectionMatrix::identity(3, Direction::SrcToTgt, Level::Word);
        assert_eq!(id.project(&x).unwrap(), x.to_vec());
        let zero = ProjectionMatrix::zeros(3, 2, Direction::SrcToTgt, Level::Word);
        assert_eq!(zero.project(&x).unwrap(), vec![0.0, 0.0]);
        assert!(zero.project(&[1.0]).is_err());
    }

    #[test]
    fn identity_world_recovers_identity() {
        let s = space(&[("a", &[1.0, 0.0, 0.0]), ("b", &[0.0, 1.0, 0.0]), ("c", &[0.0, 0.0, 1.0]), ("d", &[1.0, 1.0, 1.0])]);
        let seeds = SeedPairs::new([("a", "a"), ("b", "b"), ("c", "c"), ("d", "d")], Provenance::Dictionary);
        let m = train_projection_closed_form(&seeds, &s, &s, 0.0).unwrap();
        let id = ProjectionMatrix::identity(3, Direction::SrcToTgt, Level::Word);
        assert!(m.frobenius_distance(&id) < 1e-8);
    }

    #[test]
    fn single_pair_is_singular() {
        let s = space(&[("a", &[1.0, 2.0, 3.0])]);
        let seeds = SeedPairs::new([("a", "a")], Provenance::Dictionary);
        assert!(matches!(
            train_projection_closed_form(&seeds, &s, &s, 0.0),
            Err(Error::Singular { .. })
        ));
        // Ridge regularization makes the same system solvable.
        assert!(train_projection_closed_form(&seeds, &s, &s, 1e-3).is_ok());
    }

    #[test]
    fn collinear_pairs_are_singular() {
        let s = space(&[("a", &[1.0, 2.0]), ("b", &[2.0, 4.0]), ("c", &[-1.0, -2.0])]);
        let seeds = SeedPairs::new([("a", "a"), ("b", "b"), ("c", "c")], Provenance::Dictionary);
        assert!(matches!(
            train_projection_closed_form(&seeds, &s, &s, 0.0),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn oov_seeds_are_dropped_and_counted() {
        let s = space(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        let seeds = SeedPairs::new([("a", "a"), ("b", "b"), ("zz", "a"), ("a", "b"), ("a", "a")], Provenance::Dictionary);
        assert_eq!(seeds.len(), 4);
        let resolved = seeds.resolve(&s, &s);
        assert_eq!(resolved.len(), 3);
        assert_eq!(resolved.dropped, 1);
    }

    #[test]
    fn zero_epochs_leaves_zero_matrix() {
        let s = space(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        let seeds = SeedPairs::new([("a", "a"), ("b", "b")], Provenance::Dictionary);
        let m = train_projection_sgd(&seeds, &s, &s, 0, 0.5, 1).unwrap();
        assert!(m.rows().iter().all(|&v| v == 0.0));
        let empty = SeedPairs::new([("q", "q")], Provenance::Dictionary);
        assert!(train_projection_sgd(&empty, &s, &s, 5, 0.5, 1).is_err());
    }

    #[test]
    fn sentence_seeds_respect_length_limit() {
        let seeds = SeedPairs::new(
            [
                ("a b", "x y"),
                ("a b c d e f g h i", "x"),
                ("a", "x y z w v u t s"),
            ],
            Provenance::ParallelShortSentences,
        );
        assert_eq!(seeds.len(), 2);
    }

    #[test]
    fn reversed_flips_direction_and_pairs() {
        let seeds = SeedPairs::new([("a", "x")], Provenance::Dictionary);
        let rev = seeds.reversed();
        assert_eq!(rev.direction, Direction::TgtToSrc);
        assert_eq!(rev.pairs()[0], ("x".to_string(), "a".to_string()));
    }

    #[test]
    fn matrix_text_round_trip() {
        let m = ProjectionMatrix::from_rows(2, 3, vec![0.1, -2.0, 3.5e-9, 1.0 / 3.0, 0.0, 7.0], Direction::TgtToSrc, Level::Phrase)
            .unwrap();
        let mut buf = Vec::new();
        m.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("2 3 tgt-src phrase\n"));
        let back = ProjectionMatrix::read(text.as_bytes()).unwrap();
        assert_eq!(back, m);
        assert!(ProjectionMatrix::read("2 3 src-tgt word\n1 2 3\n".as_bytes()).is_err());
        assert!(ProjectionMatrix::read("1 2 sideways word\n1 2\n".as_bytes()).is_err());
    }

    #[test]
    fn induction_ties_break_lexicographically() {
        let src = space(&[("q", &[1.0, 0.0])]);
        let tgt = space(&[("zeta", &[2.0, 0.0]), ("alpha", &[1.0, 0.0]), ("mid", &[0.0, 1.0])]);
        let id = ProjectionMatrix::identity(2, Direction::SrcToTgt, Level::Word);
        let ranked = induce_translations(&id, &src, &tgt, "q", 10).unwrap();
        let names: Vec<&str> = ranked.iter().map(|(t, _)| t.as_str()).collect();
        assert_eq!(names, ["alpha", "zeta", "mid"]);
        assert!(matches!(
            induce_translations(&id, &src, &tgt, "nope", 1),
            Err(Error::OutOfVocabulary(_))
        ));
    }
}
