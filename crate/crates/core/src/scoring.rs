//! Monolingual phrase-table features.
//!
//! Four features replace (or extend) the usual phrase-table scores:
//!
//! | feature               | computed as                                         |
//! |-----------------------|-----------------------------------------------------|
//! | `mono-phrase-direct`  | cos(W_pd · v(src phrase), v(tgt phrase))            |
//! | `mono-lex-direct`     | lexical weight over source words, direct word sims  |
//! | `mono-phrase-inverse` | cos(W_pi · v(tgt phrase), v(src phrase))            |
//! | `mono-lex-inverse`    | lexical weight over target words, inverse word sims |
//!
//! Word similarities stand in for word translation probabilities. The
//! lexical weight of a phrase pair is the product, over the words of the
//! scored side, of the mean similarity across that word's alignment links;
//! an unaligned word contributes a fixed null-alignment constant.
//!
//! Similarities below `cosine_floor` (including negative cosines) are
//! clamped up to it so every emitted feature is positive.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phrasetable::{
    append_scores_to_line, emit_phrase_table_line, stream_table, LexiconEntry, LineError, PhrasePair, StreamOptions,
};
use crate::vecspace::{cosine, PhraseVectorizer, VectorSpace};
use crate::xmap::{Direction, ProjectionMatrix};

/// Monolingual features in their fixed output order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Feature {
    PhraseDirect,
    LexDirect,
    PhraseInverse,
    LexInverse,
}

impl Feature {
    pub const ALL: [Feature; 4] = [
        Feature::PhraseDirect,
        Feature::LexDirect,
        Feature::PhraseInverse,
        Feature::LexInverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::PhraseDirect => "mono-phrase-direct",
            Feature::LexDirect => "mono-lex-direct",
            Feature::PhraseInverse => "mono-phrase-inverse",
            Feature::LexInverse => "mono-lex-inverse",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Feature::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown feature {s:?}")))
    }
}

/// Subset of the four features enabled in replace mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureSet([bool; 4]);

impl FeatureSet {
    pub const ALL: FeatureSet = FeatureSet([true; 4]);
    pub const NONE: FeatureSet = FeatureSet([false; 4]);

    pub fn of(features: &[Feature]) -> Self {
        let mut set = FeatureSet::NONE;
        for f in features {
            set.0[f.index()] = true;
        }
        set
    }

    pub fn contains(&self, f: Feature) -> bool {
        self.0[f.index()]
    }

    /// Enabled features in output order.
    pub fn iter(&self) -> impl Iterator<Item = Feature> + '_ {
        Feature::ALL.into_iter().filter(|f| self.contains(*f))
    }

    pub fn len(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("none");
        }
        let names: Vec<&str> = self.iter().map(Feature::name).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    /// Comma-separated feature names, `all`, or `none`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(FeatureSet::ALL),
            "none" | "" => Ok(FeatureSet::NONE),
            list => {
                let features = list
                    .split(',')
                    .map(|f| f.trim().parse())
                    .collect::<Result<Vec<Feature>>>()?;
                Ok(FeatureSet::of(&features))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Scores become the enabled monolingual features.
    Replace,
    /// All four monolingual features follow the original scores.
    Append,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Replace => "replace",
            Mode::Append => "append",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "replace" => Ok(Mode::Replace),
            "append" => Ok(Mode::Append),
            other => Err(Error::Config(format!("unknown mode {other:?} (replace|append)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OovPolicy {
    /// Unknown words or phrases score `cosine_floor`.
    Floor,
    /// Unknown words or phrases make the pair unscorable.
    DropPair,
}

impl fmt::Display for OovPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OovPolicy::Floor => "floor",
            OovPolicy::DropPair => "drop-pair",
        })
    }
}

impl FromStr for OovPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "floor" => Ok(OovPolicy::Floor),
            "drop-pair" | "drop" => Ok(OovPolicy::DropPair),
            other => Err(Error::Config(format!("unknown oov policy {other:?} (floor|drop-pair)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreConfig {
    pub cosine_floor: f64,
    pub null_align_constant: f64,
    pub mode: Mode,
    pub features: FeatureSet,
    pub oov_policy: OovPolicy,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            cosine_floor: 1e-4,
            null_align_constant: 1e-3,
            mode: Mode::Append,
            features: FeatureSet::ALL,
            oov_policy: OovPolicy::Floor,
        }
    }
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cosine_floor > 0.0 && self.cosine_floor <= 1.0) {
            return Err(Error::Config(format!("cosine floor must lie in (0, 1], got {}", self.cosine_floor)));
        }
        if !(self.null_align_constant > 0.0 && self.null_align_constant <= 1.0) {
            return Err(Error::Config(format!(
                "null-alignment constant must lie in (0, 1], got {}",
                self.null_align_constant
            )));
        }
        Ok(())
    }

    /// Features emitted per pair under the current mode.
    pub fn emitted_features(&self) -> FeatureSet {
        match self.mode {
            Mode::Replace => self.features,
            Mode::Append => FeatureSet::ALL,
        }
    }

    fn unscorable(&self, what: impl FnOnce() -> String) -> Result<f64> {
        match self.oov_policy {
            OovPolicy::Floor => Ok(self.cosine_floor),
            OovPolicy::DropPair => Err(Error::Unscorable(what())),
        }
    }
}

/// Similarity of projected `x` and `z`, clamped to `[cosine_floor, 1]`. A
/// zero projection has no direction and is handled like an unknown word.
fn floored_cosine(m: &ProjectionMatrix, x: &[f64], z: &[f64], cfg: &ScoreConfig, what: impl FnOnce() -> String) -> Result<f64> {
    let projected = m.project(x)?;
    match cosine(&projected, z) {
        Ok(c) => Ok(c.max(cfg.cosine_floor)),
        Err(Error::ZeroNorm) => cfg.unscorable(what),
        Err(e) => Err(e),
    }
}

/// `max(cos(project(m, x_a), z_b), cosine_floor)` for word `a` of `from`
/// and word `b` of `to`.
pub fn word_similarity(
    a: &str,
    b: &str,
    m: &ProjectionMatrix,
    from: &VectorSpace,
    to: &VectorSpace,
    cfg: &ScoreConfig,
) -> Result<f64> {
    match (from.lookup(a), to.lookup(b)) {
        (Some(x), Some(z)) => floored_cosine(m, x, z, cfg, || format!("zero projection for {a:?}")),
        _ => cfg.unscorable(|| format!("word pair {a:?} / {b:?} out of vocabulary")),
    }
}

/// Precomputed word similarities for one direction. Keys are in lookup
/// orientation: `(source word, target word)` for the direct table and
/// `(target word, source word)` for the inverse one.
#[derive(Clone, Debug, PartialEq)]
pub struct WordSimTable {
    pub direction: Direction,
    scores: HashMap<(String, String), f64>,
    pub skipped_null: usize,
    pub dropped_oov: usize,
}

impl WordSimTable {
    pub fn new(direction: Direction) -> Self {
        WordSimTable {
            direction,
            scores: HashMap::new(),
            skipped_null: 0,
            dropped_oov: 0,
        }
    }

    pub fn insert(&mut self, a: impl Into<String>, b: impl Into<String>, score: f64) {
        self.scores.insert((a.into(), b.into()), score);
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        // Borrowed tuple keys cannot be looked up without allocating.
        self.scores.get(&(a.to_string(), b.to_string())).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Entries sorted by key.
    pub fn entries(&self) -> Vec<(&str, &str, f64)> {
        let mut out: Vec<_> = self
            .scores
            .iter()
            .map(|((a, b), &s)| (a.as_str(), b.as_str(), s))
            .collect();
        out.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        out
    }
}

/// Score every non-NULL lexicon pair in one direction. `m` must point the
/// same way as `direction`: source to target for the direct table.
pub fn build_wordsim_table(
    lexicon: &[LexiconEntry],
    direction: Direction,
    m: &ProjectionMatrix,
    src_words: &VectorSpace,
    tgt_words: &VectorSpace,
    cfg: &ScoreConfig,
) -> Result<WordSimTable> {
    if lexicon.is_empty() {
        return Err(Error::Empty("lexicon"));
    }
    if m.direction != direction {
        return Err(Error::Config(format!(
            "{direction} word table needs a {direction} matrix, got {}",
            m.direction
        )));
    }
    let mut table = WordSimTable::new(direction);
    for entry in lexicon {
        let (Some(f), Some(e)) = (&entry.f, &entry.e) else {
            table.skipped_null += 1;
            continue;
        };
        let (a, b, from, to) = match direction {
            Direction::SrcToTgt => (f, e, src_words, tgt_words),
            Direction::TgtToSrc => (e, f, tgt_words, src_words),
        };
        match word_similarity(a, b, m, from, to, cfg) {
            Ok(s) => table.insert(a.clone(), b.clone(), s),
            Err(Error::Unscorable(_)) => table.dropped_oov += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(table)
}

/// Write similarity tables as `direction<TAB>a<TAB>b<TAB>score` lines, each
/// table in key order.
pub fn write_wordsim<W: Write>(tables: &[&WordSimTable], out: &mut W) -> std::io::Result<()> {
    for t in tables {
        for (a, b, s) in t.entries() {
            writeln!(out, "{}\t{a}\t{b}\t{s}", t.direction)?;
        }
    }
    Ok(())
}

/// Read a file written by [`write_wordsim`] into `(direct, inverse)` tables.
pub fn read_wordsim(path: impl AsRef<Path>) -> Result<(WordSimTable, WordSimTable)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut direct = WordSimTable::new(Direction::SrcToTgt);
    let mut inverse = WordSimTable::new(Direction::TgtToSrc);
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [direction, a, b, score] = fields[..] else {
            return Err(Error::Parse(format!("expected 4 tab-separated fields, got {}", fields.len())).at(path, i + 1));
        };
        let direction: Direction = direction.parse().map_err(|e: Error| e.at(path, i + 1))?;
        let score: f64 = score
            .parse()
            .map_err(|_| Error::Parse(format!("bad score {score:?}")).at(path, i + 1))?;
        let table = match direction {
            Direction::SrcToTgt => &mut direct,
            Direction::TgtToSrc => &mut inverse,
        };
        table.insert(a, b, score);
    }
    Ok((direct, inverse))
}

/// Lexical weight of `p` from word similarities.
///
/// Direct: for each source word, the mean of `sim(f_i, e_j)` over its links,
/// or `null_align_constant` when it has none; the weight is the product of
/// these factors. Inverse enumerates target words over transposed links.
/// Repeated links count once.
pub fn lexical_weight(p: &PhrasePair, sim: &WordSimTable, cfg: &ScoreConfig, direction: Direction) -> Result<f64> {
    if sim.direction != direction {
        return Err(Error::Config(format!(
            "{direction} lexical weight needs a {direction} similarity table"
        )));
    }
    let (scored, other) = match direction {
        Direction::SrcToTgt => (&p.src, &p.tgt),
        Direction::TgtToSrc => (&p.tgt, &p.src),
    };
    let mut links: Vec<(usize, usize)> = p
        .alignment
        .iter()
        .map(|&(i, j)| match direction {
            Direction::SrcToTgt => (i, j),
            Direction::TgtToSrc => (j, i),
        })
        .collect();
    if let Some(&(i, j)) = links.iter().find(|&&(i, j)| i >= scored.len() || j >= other.len()) {
        return Err(Error::Parse(format!("alignment link out of range: {i}-{j}")));
    }
    links.sort_unstable();
    links.dedup();

    let mut weight = 1.0;
    let mut cursor = links.iter().peekable();
    for (i, word) in scored.iter().enumerate() {
        let (mut sum, mut count) = (0.0, 0usize);
        while let Some(&&(li, j)) = cursor.peek() {
            if li != i {
                break;
            }
            cursor.next();
            sum += match sim.get(word, &other[j]) {
                Some(s) => s,
                None => cfg.unscorable(|| format!("no similarity for {word:?} / {:?}", other[j]))?,
            };
            count += 1;
        }
        weight *= if count == 0 {
            cfg.null_align_constant
        } else {
            sum / count as f64
        };
    }
    Ok(weight)
}

/// Phrase-level similarity; the matrix direction decides which side is
/// projected.
pub fn phrase_similarity(
    p: &PhrasePair,
    vz_src: &PhraseVectorizer<'_>,
    vz_tgt: &PhraseVectorizer<'_>,
    m: &ProjectionMatrix,
    cfg: &ScoreConfig,
) -> Result<f64> {
    let (from, from_vz, to, to_vz) = match m.direction {
        Direction::SrcToTgt => (&p.src, vz_src, &p.tgt, vz_tgt),
        Direction::TgtToSrc => (&p.tgt, vz_tgt, &p.src, vz_src),
    };
    match (from_vz.vectorize(from)?, to_vz.vectorize(to)?) {
        (Some(x), Some(z)) => floored_cosine(m, &x, &z, cfg, || format!("zero projection for {:?}", from.join(" "))),
        _ => cfg.unscorable(|| format!("phrase pair {:?} / {:?} cannot be vectorized", p.src.join(" "), p.tgt.join(" "))),
    }
}

/// The four projection matrices.
#[derive(Clone, Debug)]
pub struct MatrixSet {
    pub word_direct: ProjectionMatrix,
    pub word_inverse: ProjectionMatrix,
    pub phrase_direct: ProjectionMatrix,
    pub phrase_inverse: ProjectionMatrix,
}

impl MatrixSet {
    pub fn validate(&self, d_src: usize, d_tgt: usize) -> Result<()> {
        let expect = |m: &ProjectionMatrix, direction: Direction, name: &str| -> Result<()> {
            let (ds, dt) = match direction {
                Direction::SrcToTgt => (d_src, d_tgt),
                Direction::TgtToSrc => (d_tgt, d_src),
            };
            if m.direction != direction {
                return Err(Error::Config(format!("{name} matrix must be {direction}, found {}", m.direction)));
            }
            if m.d_src() != ds || m.d_tgt() != dt {
                return Err(Error::Config(format!(
                    "{name} matrix is {}x{}, spaces need {ds}x{dt}",
                    m.d_src(),
                    m.d_tgt()
                )));
            }
            Ok(())
        };
        expect(&self.word_direct, Direction::SrcToTgt, "word-direct")?;
        expect(&self.word_inverse, Direction::TgtToSrc, "word-inverse")?;
        expect(&self.phrase_direct, Direction::SrcToTgt, "phrase-direct")?;
        expect(&self.phrase_inverse, Direction::TgtToSrc, "phrase-inverse")
    }
}

/// Everything needed to score a phrase pair.
#[derive(Clone, Copy, Debug)]
pub struct ScoringModels<'a> {
    pub matrices: &'a MatrixSet,
    pub src_phrases: PhraseVectorizer<'a>,
    pub tgt_phrases: PhraseVectorizer<'a>,
    pub sim_direct: &'a WordSimTable,
    pub sim_inverse: &'a WordSimTable,
}

impl ScoringModels<'_> {
    pub fn validate(&self) -> Result<()> {
        self.matrices.validate(self.src_phrases.dim(), self.tgt_phrases.dim())?;
        if self.sim_direct.direction != Direction::SrcToTgt || self.sim_inverse.direction != Direction::TgtToSrc {
            return Err(Error::Config("word similarity tables are swapped".into()));
        }
        Ok(())
    }
}

/// Monolingual scores of one pair. `values[k]` is set for every computed
/// feature, already clamped to `[cosine_floor, 1]`; `floored[k]` records a
/// clamp.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MonoScores {
    pub values: [Option<f64>; 4],
    pub floored: [bool; 4],
}

impl MonoScores {
    pub fn get(&self, f: Feature) -> Option<f64> {
        self.values[f.index()]
    }
}

/// Compute the features in `which` for `p`.
pub fn score_pair(p: &PhrasePair, models: &ScoringModels<'_>, cfg: &ScoreConfig, which: FeatureSet) -> Result<MonoScores> {
    let mut out = MonoScores::default();
    for feature in which.iter() {
        let raw = match feature {
            Feature::PhraseDirect => phrase_similarity(
                p,
                &models.src_phrases,
                &models.tgt_phrases,
                &models.matrices.phrase_direct,
                cfg,
            )?,
            Feature::PhraseInverse => phrase_similarity(
                p,
                &models.src_phrases,
                &models.tgt_phrases,
                &models.matrices.phrase_inverse,
                cfg,
            )?,
            Feature::LexDirect => lexical_weight(p, models.sim_direct, cfg, Direction::SrcToTgt)?,
            Feature::LexInverse => lexical_weight(p, models.sim_inverse, cfg, Direction::TgtToSrc)?,
        };
        let k = feature.index();
        // Similarities arrive floored already; lexical weights are products
        // and can fall below the floor.
        out.floored[k] = raw <= cfg.cosine_floor;
        out.values[k] = Some(raw.clamp(cfg.cosine_floor, 1.0));
    }
    Ok(out)
}

fn rescore_with(p: &PhrasePair, models: &ScoringModels<'_>, cfg: &ScoreConfig) -> Result<(PhrasePair, MonoScores)> {
    let which = cfg.emitted_features();
    let mono = score_pair(p, models, cfg, which)?;
    let new_scores = which.iter().filter_map(|f| mono.get(f));
    let mut out = p.clone();
    match cfg.mode {
        Mode::Replace => out.scores = new_scores.collect(),
        Mode::Append => out.scores.extend(new_scores),
    }
    Ok((out, mono))
}

/// Rescore one pair: replace mode keeps only the enabled monolingual
/// features, append mode adds all four after the original scores.
pub fn rescore_pair(p: &PhrasePair, models: &ScoringModels<'_>, cfg: &ScoreConfig) -> Result<PhrasePair> {
    rescore_with(p, models, cfg).map(|(pair, _)| pair)
}

/// Totals of a [`rescore_table`] run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunReport {
    pub lines_read: usize,
    pub pairs_in: usize,
    pub pairs_out: usize,
    pub dropped: usize,
    pub floor_hits: [usize; 4],
    pub parse_errors: Vec<LineError>,
    pub wall_time: Duration,
    pub config: Option<ScoreConfig>,
}

impl RunReport {
    /// `report.`-prefixed `key = value` lines.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| out.push_str(&format!("report.{k} = {v}\n"));
        kv("lines_read", self.lines_read.to_string());
        kv("pairs_in", self.pairs_in.to_string());
        kv("pairs_out", self.pairs_out.to_string());
        kv("dropped", self.dropped.to_string());
        kv("parse_errors", self.parse_errors.len().to_string());
        for f in Feature::ALL {
            kv(&format!("floor_hits.{}", f.name()), self.floor_hits[f.index()].to_string());
        }
        if let Some(cfg) = &self.config {
            kv("emitted_features", cfg.emitted_features().to_string());
        }
        kv("wall_time_s", format!("{:.3}", self.wall_time.as_secs_f64()));
        out
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "rescored {} of {} pairs ({} dropped) from {} lines in {:.2?}",
            self.pairs_out, self.pairs_in, self.dropped, self.lines_read, self.wall_time
        )?;
        if let Some(cfg) = &self.config {
            writeln!(
                f,
                "mode {}, features [{}], cosine floor {}, null constant {}, oov policy {}",
                cfg.mode,
                cfg.emitted_features(),
                cfg.cosine_floor,
                cfg.null_align_constant,
                cfg.oov_policy
            )?;
        }
        let hits: Vec<String> = Feature::ALL
            .iter()
            .map(|ft| format!("{} {}", ft.name(), self.floor_hits[ft.index()]))
            .collect();
        writeln!(f, "floor hits: {}", hits.join(", "))?;
        write!(f, "malformed lines: {}", self.parse_errors.len())?;
        for e in self.parse_errors.iter().take(10) {
            write!(f, "\n  line {}: {}", e.line, e.message)?;
        }
        if self.parse_errors.len() > 10 {
            write!(f, "\n  ... {} more", self.parse_errors.len() - 10)?;
        }
        Ok(())
    }
}

const BATCH: usize = 4096;

/// Stream `input` through [`rescore_pair`] into `output`, in input order.
/// Pairs are scored in parallel batches; memory does not grow with the
/// table. In append mode the original line bytes are kept and the new
/// scores are spliced after the existing ones.
pub fn rescore_table(
    input: impl AsRef<Path>,
    output: impl AsRef<Path>,
    models: &ScoringModels<'_>,
    cfg: &ScoreConfig,
    stream: &StreamOptions,
) -> Result<RunReport> {
    cfg.validate()?;
    models.validate()?;
    let start = Instant::now();
    let output = output.as_ref();
    let file = File::create(output).map_err(|e| Error::io(output, e))?;
    let mut out = BufWriter::new(file);
    let mut report = RunReport {
        config: Some(*cfg),
        ..RunReport::default()
    };
    let mut batch: Vec<(String, PhrasePair)> = Vec::with_capacity(BATCH);

    let mut flush = |batch: &mut Vec<(String, PhrasePair)>, report: &mut RunReport| -> Result<()> {
        let results: Vec<Result<Option<(String, MonoScores)>>> = batch
            .par_iter()
            .map(|(raw, pair)| match rescore_with(pair, models, cfg) {
                Ok((rescored, mono)) => {
                    let line = match cfg.mode {
                        Mode::Append => {
                            let added: Vec<f64> = Feature::ALL.iter().filter_map(|f| mono.get(*f)).collect();
                            append_scores_to_line(raw, &added)?
                        }
                        Mode::Replace => emit_phrase_table_line(&rescored),
                    };
                    Ok(Some((line, mono)))
                }
                Err(Error::Unscorable(_)) => Ok(None),
                Err(e) => Err(e),
            })
            .collect();
        for result in results {
            match result? {
                Some((line, mono)) => {
                    out.write_all(line.as_bytes())
                        .and_then(|_| out.write_all(b"\n"))
                        .map_err(|e| Error::io(output, e))?;
                    report.pairs_out += 1;
                    for (hits, &floored) in report.floor_hits.iter_mut().zip(&mono.floored) {
                        *hits += floored as usize;
                    }
                }
                None => report.dropped += 1,
            }
        }
        batch.clear();
        Ok(())
    };

    let summary = stream_table(input, stream, |row| {
        report.pairs_in += 1;
        batch.push((row.raw.to_string(), row.pair));
        if batch.len() >= BATCH {
            flush(&mut batch, &mut report)?;
        }
        Ok(())
    })?;
    flush(&mut batch, &mut report)?;
    out.flush().map_err(|e| Error::io(output, e))?;

    report.lines_read = summary.lines_read;
    report.parse_errors = summary.errors;
    report.wall_time = start.elapsed();
    Ok(report)
}
