//! Synthetic bilingual worlds with a known answer.
//!
//! Source word vectors are standard normal; each target vector is a fixed
//! random rotation of its source counterpart plus Gaussian noise. Because
//! the gold dictionary pairs `s<i>` with `t<i>`, dictionary induction,
//! projection learning and phrase scoring can all be checked against ground
//! truth.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::numfmt::format_sig6;
use crate::phrasetable::{emit_phrase_table_line, LexiconEntry, PhrasePair};
use crate::vecspace::{save_vectors, SpaceKind, VectorSpace};

/// Uniformly random orthogonal `d × d` matrix, row-major.
pub fn random_rotation<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    let a = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let qr = a.qr();
    let (mut q, r) = (qr.q(), qr.r());
    // Fix column signs so the distribution is Haar rather than QR-biased.
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.extend((0..d).map(|j| q[(i, j)]));
    }
    out
}

/// `R·x` for a row-major square `R`.
pub fn rotate(r: &[f64], x: &[f64]) -> Vec<f64> {
    r.chunks_exact(x.len())
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub dim: usize,
    pub vocab: usize,
    /// Standard deviation of the noise added to every target component.
    pub noise: f64,
    /// Source phrases in the toy table; each gets one gold and one
    /// mismatched row.
    pub phrases: usize,
    /// Parallel short sentences for phrase-level seeds.
    pub sentences: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            dim: 50,
            vocab: 200,
            noise: 0.0,
            phrases: 100,
            sentences: 400,
            seed: 1,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dim must be at least 1".into()));
        }
        if self.vocab < 2 {
            return Err(Error::Config("vocab must be at least 2".into()));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::Config(format!("noise must be a non-negative number, got {}", self.noise)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticWorld {
    pub src: VectorSpace,
    pub tgt: VectorSpace,
    /// Row-major rotation applied to source vectors.
    pub rotation: Vec<f64>,
    pub gold: Vec<(String, String)>,
    pub sentence_pairs: Vec<(String, String)>,
    pub table: Vec<PhrasePair>,
    /// Whether each table row is a gold translation.
    pub table_is_gold: Vec<bool>,
    pub lexicon: Vec<LexiconEntry>,
}

pub fn src_token(i: usize) -> String {
    format!("s{i:05}")
}

pub fn tgt_token(i: usize) -> String {
    format!("t{i:05}")
}

/// Target token of a source token under the gold dictionary.
pub fn gold_translation(src: &str) -> Option<String> {
    src.strip_prefix('s').map(|rest| format!("t{rest}"))
}

fn random_phrase<R: Rng>(rng: &mut R, vocab: usize, len: usize) -> Vec<usize> {
    (0..len).map(|_| rng.random_range(0..vocab)).collect()
}

fn probability<R: Rng>(rng: &mut R) -> f64 {
    // Six significant digits so tables round-trip exactly.
    format_sig6(rng.random_range(0.01..1.0)).parse().expect("formatted float")
}

pub fn make_synthetic(cfg: &SyntheticConfig) -> Result<SyntheticWorld> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = cfg.dim;
    let rotation = random_rotation(d, &mut rng);
    let noise = Normal::new(0.0, cfg.noise).map_err(|e| Error::Config(e.to_string()))?;

    let mut src_entries = Vec::with_capacity(cfg.vocab);
    let mut tgt_entries = Vec::with_capacity(cfg.vocab);
    for i in 0..cfg.vocab {
        let x: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let mut z = rotate(&rotation, &x);
        if cfg.noise > 0.0 {
            z.iter_mut().for_each(|v| *v += noise.sample(&mut rng));
        }
        src_entries.push((src_token(i), x));
        tgt_entries.push((tgt_token(i), z));
    }
    let src = VectorSpace::from_entries(d, SpaceKind::Word, src_entries)?.0;
    let tgt = VectorSpace::from_entries(d, SpaceKind::Word, tgt_entries)?.0;
    let gold: Vec<(String, String)> = (0..cfg.vocab).map(|i| (src_token(i), tgt_token(i))).collect();

    let sentence_pairs = (0..cfg.sentences)
        .map(|_| {
            let len = rng.random_range(1..=8);
            let words = random_phrase(&mut rng, cfg.vocab, len);
            let s: Vec<String> = words.iter().map(|&w| src_token(w)).collect();
            let t: Vec<String> = words.iter().map(|&w| tgt_token(w)).collect();
            (s.join(" "), t.join(" "))
        })
        .collect();

    let mut table = Vec::with_capacity(2 * cfg.phrases);
    let mut table_is_gold = Vec::with_capacity(2 * cfg.phrases);
    let mut lex_pairs = BTreeSet::new();
    for _ in 0..cfg.phrases {
        let len = rng.random_range(1..=3);
        let words = random_phrase(&mut rng, cfg.vocab, len);
        let mut wrong = random_phrase(&mut rng, cfg.vocab, len);
        if wrong == words {
            wrong[0] = (wrong[0] + 1) % cfg.vocab;
        }
        for (targets, is_gold) in [(&words, true), (&wrong, false)] {
            let mut p = PhrasePair::new(words.iter().map(|&w| src_token(w)), targets.iter().map(|&w| tgt_token(w)));
            p.scores = (0..4).map(|_| probability(&mut rng)).collect();
            p.alignment = (0..len).map(|i| (i, i)).collect();
            for (&a, &b) in words.iter().zip(targets.iter()) {
                lex_pairs.insert((a, b));
            }
            table.push(p);
            table_is_gold.push(is_gold);
        }
    }
    let mut lexicon: Vec<LexiconEntry> = lex_pairs
        .into_iter()
        .map(|(a, b)| LexiconEntry {
            f: Some(src_token(a)),
            e: Some(tgt_token(b)),
            p: probability(&mut rng),
        })
        .collect();
    lexicon.push(LexiconEntry {
        f: None,
        e: Some(tgt_token(0)),
        p: 0.01,
    });

    Ok(SyntheticWorld {
        src,
        tgt,
        rotation,
        gold,
        sentence_pairs,
        table,
        table_is_gold,
        lexicon,
    })
}

/// Paths written by [`SyntheticWorld::write`].
#[derive(Clone, Debug)]
pub struct SyntheticFiles {
    pub src_vectors: PathBuf,
    pub tgt_vectors: PathBuf,
    pub gold: PathBuf,
    pub sentences: PathBuf,
    pub table: PathBuf,
    pub lexicon: PathBuf,
}

impl SyntheticFiles {
    pub fn in_dir(dir: &Path) -> Self {
        SyntheticFiles {
            src_vectors: dir.join("src.vec"),
            tgt_vectors: dir.join("tgt.vec"),
            gold: dir.join("gold.tsv"),
            sentences: dir.join("sentences.tsv"),
            table: dir.join("phrase-table.txt"),
            lexicon: dir.join("lex.txt"),
        }
    }
}

fn write_lines(path: &Path, lines: impl IntoIterator<Item = String>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for line in lines {
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

impl SyntheticWorld {
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<SyntheticFiles> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let files = SyntheticFiles::in_dir(dir);
        save_vectors(&self.src, &files.src_vectors)?;
        save_vectors(&self.tgt, &files.tgt_vectors)?;
        let tsv = |pairs: &[(String, String)]| pairs.iter().map(|(a, b)| format!("{a}\t{b}")).collect::<Vec<_>>();
        write_lines(&files.gold, tsv(&self.gold))?;
        write_lines(&files.sentences, tsv(&self.sentence_pairs))?;
        write_lines(&files.table, self.table.iter().map(emit_phrase_table_line))?;
        write_lines(
            &files.lexicon,
            self.lexicon.iter().map(|e| {
                format!(
                    "{} {} {}",
                    e.f.as_deref().unwrap_or("NULL"),
                    e.e.as_deref().unwrap_or("NULL"),
                    format_sig6(e.p)
                )
            }),
        )?;
        Ok(files)
    }
}
