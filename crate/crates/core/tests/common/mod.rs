#![allow(dead_code)]

use monophrase::vecspace::{SpaceKind, VectorSpace};
use monophrase::xmap::{Direction, Level, ProjectionMatrix, ResolvedPairs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ProjectionMatrix {
    let data = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    ProjectionMatrix::from_rows(rows, cols, data, Direction::SrcToTgt, Level::Word).unwrap()
}

/// `n` pairs with standard normal `x` and `z = project(w, x) + noise`.
pub fn planted_pairs(w: &ProjectionMatrix, n: usize, sigma: f64, rng: &mut ChaCha8Rng) -> ResolvedPairs {
    let mut data = ResolvedPairs::empty(w.d_src(), w.d_tgt(), Direction::SrcToTgt, Level::Word);
    let noise = Normal::new(0.0, sigma.max(0.0)).unwrap();
    for _ in 0..n {
        let x: Vec<f64> = (0..w.d_src()).map(|_| rng.sample(StandardNormal)).collect();
        let mut z = w.project(&x).unwrap();
        if sigma > 0.0 {
            z.iter_mut().for_each(|v| *v += noise.sample(rng));
        }
        data.push(&x, &z);
    }
    data
}

pub fn space_from(prefix: &str, vectors: &[Vec<f64>]) -> VectorSpace {
    VectorSpace::from_entries(
        vectors[0].len(),
        SpaceKind::Word,
        vectors.iter().enumerate().map(|(i, v)| (format!("{prefix}{i}"), v.clone())),
    )
    .unwrap()
    .0
}

/// Straight evaluation of the lexical weighting formula: for every word `i`
/// of the scored side, `1/|{j : (i,j) ∈ a}| · Σ_{(i,j) ∈ a} w(i, j)`, or the
/// null constant when no link touches `i`; the weight is the product.
pub fn brute_force_lexical_weight(
    n_scored: usize,
    links: &[(usize, usize)],
    w: impl Fn(usize, usize) -> f64,
    null_constant: f64,
) -> f64 {
    let mut product = 1.0;
    for i in 0..n_scored {
        let mine: Vec<usize> = links.iter().filter(|l| l.0 == i).map(|l| l.1).collect();
        let factor = if mine.is_empty() {
            null_constant
        } else {
            mine.iter().map(|&j| w(i, j)).sum::<f64>() / mine.len() as f64
        };
        product *= factor;
    }
    product
}

/// 10k tokens of alternating `a b`, plus a disjoint stream of alternating
/// `c d`, cut into sentences of 50 tokens.
pub fn toy_corpus() -> Vec<Vec<String>> {
    let stream = |x: &str, y: &str| -> Vec<Vec<String>> {
        (0..200)
            .map(|_| (0..50).map(|i| if i % 2 == 0 { x } else { y }.to_string()).collect())
            .collect()
    };
    let mut corpus = stream("a", "b");
    corpus.extend(stream("c", "d"));
    corpus
}

pub fn toy_config(seed: u64, model: monophrase::embedtrain::ModelKind) -> monophrase::embedtrain::TrainConfig {
    monophrase::embedtrain::TrainConfig {
        dim: 20,
        window: 1,
        epochs: 5,
        seed,
        model,
        ..Default::default()
    }
}

/// Nearest of `candidates` to `query` by cosine.
pub fn nearest<'a>(space: &VectorSpace, query: &str, candidates: &[&'a str]) -> &'a str {
    let q = space.lookup(query).unwrap();
    candidates
        .iter()
        .copied()
        .max_by(|x, y| {
            let cx = monophrase::vecspace::cosine(q, space.lookup(x).unwrap()).unwrap();
            let cy = monophrase::vecspace::cosine(q, space.lookup(y).unwrap()).unwrap();
            cx.total_cmp(&cy)
        })
        .unwrap()
}

/// Random spaces, matrices and similarity tables for scoring tests. A few
/// words per side have no vector, to exercise the out-of-vocabulary paths.
pub struct ScoringWorld {
    pub src: VectorSpace,
    pub tgt: VectorSpace,
    pub matrices: monophrase::scoring::MatrixSet,
    pub sim_direct: monophrase::scoring::WordSimTable,
    pub sim_inverse: monophrase::scoring::WordSimTable,
    pub vocab: usize,
}

pub const OOV_WORDS: usize = 3;

impl ScoringWorld {
    pub fn new(seed: u64, dim: usize, vocab: usize, cfg: &monophrase::ScoreConfig) -> Self {
        use monophrase::phrasetable::LexiconEntry;
        use monophrase::scoring::{build_wordsim_table, MatrixSet};
        let mut rng = rng(seed);
        let mut vectors = |n: usize| -> Vec<Vec<f64>> {
            (0..n).map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect()).collect()
        };
        let src = space_from("f", &vectors(vocab));
        let tgt = space_from("e", &vectors(vocab));
        let mut mat = |direction: Direction, level: Level| {
            let data = (0..dim * dim).map(|_| rng.sample(StandardNormal)).collect();
            ProjectionMatrix::from_rows(dim, dim, data, direction, level).unwrap()
        };
        let matrices = MatrixSet {
            word_direct: mat(Direction::SrcToTgt, Level::Word),
            word_inverse: mat(Direction::TgtToSrc, Level::Word),
            phrase_direct: mat(Direction::SrcToTgt, Level::Phrase),
            phrase_inverse: mat(Direction::TgtToSrc, Level::Phrase),
        };
        let mut lexicon = Vec::new();
        for i in 0..vocab + OOV_WORDS {
            for j in 0..vocab + OOV_WORDS {
                if (i * 7 + j * 3) % 4 != 0 {
                    lexicon.push(LexiconEntry {
                        f: Some(format!("f{i}")),
                        e: Some(format!("e{j}")),
                        p: 0.5,
                    });
                }
            }
        }
        let sim_direct =
            build_wordsim_table(&lexicon, Direction::SrcToTgt, &matrices.word_direct, &src, &tgt, cfg).unwrap();
        let sim_inverse =
            build_wordsim_table(&lexicon, Direction::TgtToSrc, &matrices.word_inverse, &src, &tgt, cfg).unwrap();
        ScoringWorld {
            src,
            tgt,
            matrices,
            sim_direct,
            sim_inverse,
            vocab,
        }
    }

    pub fn models(&self) -> monophrase::scoring::ScoringModels<'_> {
        use monophrase::vecspace::PhraseVectorizer;
        monophrase::scoring::ScoringModels {
            matrices: &self.matrices,
            src_phrases: PhraseVectorizer::average(&self.src),
            tgt_phrases: PhraseVectorizer::average(&self.tgt),
            sim_direct: &self.sim_direct,
            sim_inverse: &self.sim_inverse,
        }
    }

    /// A pair of 1–3 words per side, random links, 0–5 six-digit scores.
    pub fn random_pair(&self, rng: &mut ChaCha8Rng) -> monophrase::PhrasePair {
        let n = self.vocab + OOV_WORDS;
        let (ns, nt) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let src: Vec<String> = (0..ns).map(|_| format!("f{}", rng.random_range(0..n))).collect();
        let tgt: Vec<String> = (0..nt).map(|_| format!("e{}", rng.random_range(0..n))).collect();
        let mut p = monophrase::PhrasePair::new(src, tgt);
        p.scores = (0..rng.random_range(0..=5))
            .map(|_| monophrase::numfmt::format_sig6(rng.random_range(0.0..1.0)).parse().unwrap())
            .collect();
        p.alignment = (0..rng.random_range(0..=4))
            .map(|_| (rng.random_range(0..ns), rng.random_range(0..nt)))
            .collect();
        p
    }
}

/// Every link set of at most 3 cells in an `ns × nt` grid.
fn link_sets(ns: usize, nt: usize) -> Vec<Vec<(usize, usize)>> {
    let cells: Vec<(usize, usize)> = (0..ns).flat_map(|i| (0..nt).map(move |j| (i, j))).collect();
    let mut out = vec![vec![]];
    for a in 0..cells.len() {
        out.push(vec![cells[a]]);
        for b in a + 1..cells.len() {
            out.push(vec![cells[a], cells[b]]);
            for c in b + 1..cells.len() {
                out.push(vec![cells[a], cells[b], cells[c]]);
            }
        }
    }
    out
}

/// Compare `lexical_weight` with [`brute_force_lexical_weight`] on every
/// pair of up to 3 words per side with up to 3 links, every assignment of
/// similarities from {0.1, 0.5, 1.0} to the links, both null constants
/// {1e-3, 1e-2} and both directions. Returns (evaluations, max abs error).
pub fn lexical_weight_grid_error() -> (usize, f64) {
    use monophrase::scoring::{lexical_weight, WordSimTable};
    use std::collections::HashMap;
    const GRID: [f64; 3] = [0.1, 0.5, 1.0];
    let (mut checked, mut max_err) = (0, 0.0f64);
    for ns in 1..=3 {
        for nt in 1..=3 {
            let src: Vec<String> = (0..ns).map(|i| format!("f{i}")).collect();
            let tgt: Vec<String> = (0..nt).map(|j| format!("e{j}")).collect();
            for links in link_sets(ns, nt) {
                for code in 0..GRID.len().pow(links.len() as u32) {
                    let mut value = HashMap::new();
                    let mut c = code;
                    for &l in &links {
                        value.insert(l, GRID[c % 3]);
                        c /= 3;
                    }
                    let mut direct = WordSimTable::new(Direction::SrcToTgt);
                    let mut inverse = WordSimTable::new(Direction::TgtToSrc);
                    for (&(i, j), &v) in &value {
                        direct.insert(src[i].clone(), tgt[j].clone(), v);
                        inverse.insert(tgt[j].clone(), src[i].clone(), v);
                    }
                    let mut p = monophrase::PhrasePair::new(src.clone(), tgt.clone());
                    p.alignment = links.clone();
                    let transposed: Vec<(usize, usize)> = links.iter().map(|&(i, j)| (j, i)).collect();
                    for null in [1e-3, 1e-2] {
                        let cfg = monophrase::ScoreConfig {
                            null_align_constant: null,
                            ..Default::default()
                        };
                        let d = lexical_weight(&p, &direct, &cfg, Direction::SrcToTgt).unwrap();
                        let want_d = brute_force_lexical_weight(ns, &links, |i, j| value[&(i, j)], null);
                        let inv = lexical_weight(&p, &inverse, &cfg, Direction::TgtToSrc).unwrap();
                        let want_i = brute_force_lexical_weight(nt, &transposed, |j, i| value[&(i, j)], null);
                        max_err = max_err.max((d - want_d).abs()).max((inv - want_i).abs());
                        checked += 2;
                    }
                }
            }
        }
    }
    (checked, max_err)
}
