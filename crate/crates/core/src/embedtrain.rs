//! Desk-scale word embedding trainer.
//!
//! Word vectors are learned with negative sampling in either of two
//! layouts: skipgram (the center word predicts each context word) or CBOW
//! (the averaged context predicts the center word). Both share one
//! objective: for a hidden vector `h` and output vectors `u_o`,
//!
//! ```text
//! loss = softplus(-h·u_target) + Σ_neg softplus(h·u_neg)
//! ```
//!
//! where `h` is the mean of the input rows of the example. Training is
//! single-threaded plain SGD with a linearly decaying learning rate, so a
//! fixed seed reproduces the same vectors bit for bit.
//!
//! A trained model can be frozen into a [`PvModel`], which infers a
//! paragraph vector for unseen text by gradient steps on that vector alone
//! (PV-DM with averaged context).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vecspace::{SpaceKind, VectorSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Skipgram,
    Cbow,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skipgram" => Ok(ModelKind::Skipgram),
            "cbow" => Ok(ModelKind::Cbow),
            other => Err(Error::Config(format!("unknown model {other:?} (skipgram|cbow)"))),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Skipgram => "skipgram",
            ModelKind::Cbow => "cbow",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    /// Context half-width: `window` words on each side.
    pub window: usize,
    pub epochs: usize,
    pub negative_samples: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub min_count: u64,
    pub model: ModelKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 200,
            window: 5,
            epochs: 30,
            negative_samples: 5,
            learning_rate: 0.025,
            seed: 1,
            min_count: 1,
            model: ModelKind::Skipgram,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.window == 0 || self.epochs == 0 {
            return Err(Error::Config("dim, window and epochs must all be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        Ok(())
    }
}

/// Retained vocabulary, ordered by descending count then token.
#[derive(Clone, Debug)]
pub struct Vocab {
    tokens: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
}

impl Vocab {
    pub fn build<S: AsRef<str>>(corpus: &[Vec<S>], min_count: u64) -> Vocab {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for sentence in corpus {
            for token in sentence {
                *counts.entry(token.as_ref()).or_default() += 1;
            }
        }
        let mut kept: Vec<(&str, u64)> = counts.into_iter().filter(|&(_, c)| c >= min_count.max(1)).collect();
        kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Vocab::from_counts(kept.into_iter().map(|(t, c)| (t.to_string(), c)))
    }

    fn from_counts(entries: impl IntoIterator<Item = (String, u64)>) -> Vocab {
        let (tokens, counts): (Vec<String>, Vec<u64>) = entries.into_iter().unzip();
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocab { tokens, counts, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn count(&self, id: usize) -> u64 {
        self.counts[id]
    }
}

/// Input and output embedding matrices, row-major `vocab × dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub vocab_size: usize,
    pub dim: usize,
    pub input: Vec<f64>,
    pub output: Vec<f64>,
}

impl ModelParams {
    pub fn zeros(vocab_size: usize, dim: usize) -> Self {
        ModelParams {
            vocab_size,
            dim,
            input: vec![0.0; vocab_size * dim],
            output: vec![0.0; vocab_size * dim],
        }
    }

    pub fn input_row(&self, id: usize) -> &[f64] {
        &self.input[id * self.dim..(id + 1) * self.dim]
    }

    pub fn output_row(&self, id: usize) -> &[f64] {
        &self.output[id * self.dim..(id + 1) * self.dim]
    }
}

/// One prediction: the mean of the `inputs` rows predicts `target` against
/// the sampled `negatives`.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub inputs: Vec<usize>,
    pub target: usize,
    pub negatives: Vec<usize>,
}

/// Dense gradient with the same layout as [`ModelParams`].
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub input: Vec<f64>,
    pub output: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

/// Loss of predicting `target` (label 1) and `negatives` (label 0) from
/// `hidden`. Adds `∂loss/∂hidden` into `d_hidden` and records, for every
/// output row touched, the coefficient `g` with `∂loss/∂u_o = g·hidden`.
fn output_terms(
    output: &[f64],
    dim: usize,
    hidden: &[f64],
    target: usize,
    negatives: &[usize],
    d_hidden: &mut [f64],
    out_coeffs: &mut Vec<(usize, f64)>,
) -> f64 {
    let mut loss = 0.0;
    let labelled = std::iter::once((target, 1.0)).chain(negatives.iter().map(|&n| (n, 0.0)));
    for (o, label) in labelled {
        let row = &output[o * dim..(o + 1) * dim];
        let score = dot(hidden, row);
        loss += if label == 1.0 { softplus(-score) } else { softplus(score) };
        let g = sigmoid(score) - label;
        axpy(g, row, d_hidden);
        out_coeffs.push((o, g));
    }
    loss
}

fn mean_rows(params: &ModelParams, ids: &[usize], hidden: &mut [f64]) {
    hidden.iter_mut().for_each(|h| *h = 0.0);
    for &id in ids {
        axpy(1.0, params.input_row(id), hidden);
    }
    let inv = 1.0 / ids.len() as f64;
    hidden.iter_mut().for_each(|h| *h *= inv);
}

/// Summed loss of `batch` and its gradient with respect to both matrices,
/// evaluated at fixed `params`.
pub fn loss_and_gradient(params: &ModelParams, batch: &[Example]) -> (f64, Gradient) {
    let dim = params.dim;
    let mut grad = Gradient {
        input: vec![0.0; params.input.len()],
        output: vec![0.0; params.output.len()],
    };
    let mut hidden = vec![0.0; dim];
    let mut d_hidden = vec![0.0; dim];
    let mut coeffs = Vec::new();
    let mut loss = 0.0;
    for ex in batch {
        if ex.inputs.is_empty() {
            continue;
        }
        mean_rows(params, &ex.inputs, &mut hidden);
        d_hidden.iter_mut().for_each(|d| *d = 0.0);
        coeffs.clear();
        loss += output_terms(&params.output, dim, &hidden, ex.target, &ex.negatives, &mut d_hidden, &mut coeffs);
        for &(o, g) in &coeffs {
            axpy(g, &hidden, &mut grad.output[o * dim..(o + 1) * dim]);
        }
        let share = 1.0 / ex.inputs.len() as f64;
        for &i in &ex.inputs {
            axpy(share, &d_hidden, &mut grad.input[i * dim..(i + 1) * dim]);
        }
    }
    (loss, grad)
}

/// Loss only; used by finite-difference checks.
pub fn loss(params: &ModelParams, batch: &[Example]) -> f64 {
    let mut hidden = vec![0.0; params.dim];
    let mut scratch = vec![0.0; params.dim];
    let mut coeffs = Vec::new();
    batch
        .iter()
        .filter(|ex| !ex.inputs.is_empty())
        .map(|ex| {
            mean_rows(params, &ex.inputs, &mut hidden);
            coeffs.clear();
            output_terms(&params.output, params.dim, &hidden, ex.target, &ex.negatives, &mut scratch, &mut coeffs)
        })
        .sum()
}

/// Unigram^0.75 sampler over vocabulary ids.
#[derive(Clone, Debug)]
pub struct NoiseSampler {
    cumulative: Vec<f64>,
}

impl NoiseSampler {
    pub fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        NoiseSampler { cumulative }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let u = rng.random::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1)
    }

    /// Draw `n` negatives different from `target`. Fewer are returned when
    /// the vocabulary has a single word.
    pub fn negatives<R: Rng>(&self, rng: &mut R, target: usize, n: usize, out: &mut Vec<usize>) {
        out.clear();
        if self.cumulative.len() < 2 {
            return;
        }
        for _ in 0..n {
            for _ in 0..16 {
                let s = self.sample(rng);
                if s != target {
                    out.push(s);
                    break;
                }
            }
        }
    }
}

/// Result of a training run.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub vocab: Vocab,
    pub params: ModelParams,
    pub config: TrainConfig,
    /// Mean loss per prediction, one entry per epoch.
    pub epoch_losses: Vec<f64>,
}

impl TrainedModel {
    /// Exported word vectors: input plus output embedding of each word, in
    /// vocabulary order. The sum places words that occur next to each other
    /// close together, which the input embeddings alone do not.
    pub fn word_space(&self) -> VectorSpace {
        self.space_from(|i| {
            self.params
                .input_row(i)
                .iter()
                .zip(self.params.output_row(i))
                .map(|(a, b)| a + b)
                .collect()
        })
    }

    /// Input embeddings only.
    pub fn input_space(&self) -> VectorSpace {
        self.space_from(|i| self.params.input_row(i).to_vec())
    }

    fn space_from(&self, row: impl Fn(usize) -> Vec<f64>) -> VectorSpace {
        let entries = (0..self.vocab.len()).map(|i| (self.vocab.token(i).to_string(), row(i)));
        VectorSpace::from_entries(self.params.dim, SpaceKind::Word, entries)
            .expect("vocabulary tokens are unique and valid")
            .0
    }

    /// Freeze this model for paragraph-vector inference.
    pub fn pv_model(&self, config: PvConfig) -> PvModel {
        PvModel {
            vocab: self.vocab.clone(),
            params: self.params.clone(),
            window: self.config.window,
            negative_samples: self.config.negative_samples,
            noise: NoiseSampler::new(&self.vocab.counts),
            config,
        }
    }
}

/// Read a whitespace-tokenized corpus, one sentence per line.
pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<Vec<String>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut corpus = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let sentence: Vec<String> = line.split_whitespace().map(str::to_string).collect();
        if !sentence.is_empty() {
            corpus.push(sentence);
        }
    }
    Ok(corpus)
}

/// Train word vectors and return them as a space (see
/// [`TrainedModel::word_space`]).
pub fn train_word_vectors<S: AsRef<str>>(corpus: &[Vec<S>], cfg: &TrainConfig) -> Result<VectorSpace> {
    Ok(train(corpus, cfg)?.word_space())
}

pub fn train<S: AsRef<str>>(corpus: &[Vec<S>], cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    let vocab = Vocab::build(corpus, cfg.min_count);
    if vocab.is_empty() {
        return Err(Error::Empty("corpus has no token at or above min_count"));
    }
    for token in &vocab.tokens {
        crate::vecspace::validate_token(token)?;
    }
    let sentences: Vec<Vec<usize>> = corpus
        .iter()
        .map(|s| s.iter().filter_map(|t| vocab.id(t.as_ref())).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| !s.is_empty())
        .collect();
    let positions: usize = sentences.iter().map(Vec::len).sum();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dim = cfg.dim;
    let mut params = ModelParams::zeros(vocab.len(), dim);
    for v in params.input.iter_mut() {
        *v = (rng.random::<f64>() - 0.5) / dim as f64;
    }
    let noise = NoiseSampler::new(&vocab.counts);

    let total_steps = (positions * cfg.epochs).max(1) as f64;
    let min_lr = cfg.learning_rate * 1e-4;
    let mut step = 0usize;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut state = StepState::new(dim);

    for _ in 0..cfg.epochs {
        let (mut epoch_loss, mut predictions) = (0.0, 0usize);
        for sentence in &sentences {
            for (pos, &center) in sentence.iter().enumerate() {
                let lr = (cfg.learning_rate * (1.0 - step as f64 / total_steps)).max(min_lr);
                step += 1;
                let lo = pos.saturating_sub(cfg.window);
                let hi = (pos + cfg.window + 1).min(sentence.len());
                match cfg.model {
                    ModelKind::Skipgram => {
                        for (ctx_pos, &context) in sentence[lo..hi].iter().enumerate() {
                            if lo + ctx_pos == pos {
                                continue;
                            }
                            noise.negatives(&mut rng, context, cfg.negative_samples, &mut state.negatives);
                            epoch_loss += state.sgd_step(&mut params, &[center], context, lr);
                            predictions += 1;
                        }
                    }
                    ModelKind::Cbow => {
                        state.context.clear();
                        state
                            .context
                            .extend((lo..hi).filter(|&p| p != pos).map(|p| sentence[p]));
                        if state.context.is_empty() {
                            continue;
                        }
                        noise.negatives(&mut rng, center, cfg.negative_samples, &mut state.negatives);
                        let context = std::mem::take(&mut state.context);
                        epoch_loss += state.sgd_step(&mut params, &context, center, lr);
                        state.context = context;
                        predictions += 1;
                    }
                }
            }
        }
        epoch_losses.push(if predictions > 0 { epoch_loss / predictions as f64 } else { 0.0 });
        log::debug!("epoch {} mean loss {:.6}", epoch_losses.len(), epoch_losses.last().unwrap());
    }

    Ok(TrainedModel {
        vocab,
        params,
        config: cfg.clone(),
        epoch_losses,
    })
}

struct StepState {
    hidden: Vec<f64>,
    d_hidden: Vec<f64>,
    coeffs: Vec<(usize, f64)>,
    negatives: Vec<usize>,
    context: Vec<usize>,
}

impl StepState {
    fn new(dim: usize) -> Self {
        StepState {
            hidden: vec![0.0; dim],
            d_hidden: vec![0.0; dim],
            coeffs: Vec::new(),
            negatives: Vec::new(),
            context: Vec::new(),
        }
    }

    /// One SGD step on a single example; gradients are taken at the
    /// pre-step parameters. Uses `self.negatives`.
    fn sgd_step(&mut self, params: &mut ModelParams, inputs: &[usize], target: usize, lr: f64) -> f64 {
        let dim = params.dim;
        mean_rows(params, inputs, &mut self.hidden);
        self.d_hidden.iter_mut().for_each(|d| *d = 0.0);
        self.coeffs.clear();
        let loss = output_terms(
            &params.output,
            dim,
            &self.hidden,
            target,
            &self.negatives,
            &mut self.d_hidden,
            &mut self.coeffs,
        );
        for &(o, g) in &self.coeffs {
            axpy(-lr * g, &self.hidden, &mut params.output[o * dim..(o + 1) * dim]);
        }
        let share = -lr / inputs.len() as f64;
        for &i in inputs {
            axpy(share, &self.d_hidden, &mut params.input[i * dim..(i + 1) * dim]);
        }
        loss
    }
}

/// Inference schedule for paragraph vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct PvConfig {
    pub steps: usize,
    /// Initial rate; decays linearly towards zero over `steps`.
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for PvConfig {
    fn default() -> Self {
        PvConfig {
            steps: 50,
            learning_rate: 0.025,
            seed: 1,
        }
    }
}

/// Frozen word-model parameters used to infer paragraph vectors.
#[derive(Clone, Debug)]
pub struct PvModel {
    vocab: Vocab,
    params: ModelParams,
    window: usize,
    negative_samples: usize,
    noise: NoiseSampler,
    pub config: PvConfig,
}

impl PvModel {
    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Infer a vector for `text`: the paragraph vector joins the averaged
    /// context of every position and is the only parameter updated.
    pub fn infer<S: AsRef<str>>(&self, text: &[S]) -> Result<Vec<f64>> {
        let ids: Vec<usize> = text.iter().filter_map(|t| self.vocab.id(t.as_ref())).collect();
        if ids.is_empty() {
            let joined: Vec<&str> = text.iter().map(AsRef::as_ref).collect();
            return Err(Error::OutOfVocabulary(joined.join(" ")));
        }
        let dim = self.params.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let mut paragraph: Vec<f64> = (0..dim).map(|_| (rng.random::<f64>() - 0.5) / dim as f64).collect();
        let mut hidden = vec![0.0; dim];
        let mut d_hidden = vec![0.0; dim];
        let mut coeffs = Vec::new();
        let mut negatives = Vec::new();
        let steps = self.config.steps;
        for step in 0..steps {
            let lr = self.config.learning_rate * (1.0 - step as f64 / steps as f64);
            for (pos, &target) in ids.iter().enumerate() {
                let lo = pos.saturating_sub(self.window);
                let hi = (pos + self.window + 1).min(ids.len());
                hidden.copy_from_slice(&paragraph);
                let mut n = 1usize;
                for p in (lo..hi).filter(|&p| p != pos) {
                    axpy(1.0, self.params.input_row(ids[p]), &mut hidden);
                    n += 1;
                }
                let inv = 1.0 / n as f64;
                hidden.iter_mut().for_each(|h| *h *= inv);
                self.noise.negatives(&mut rng, target, self.negative_samples, &mut negatives);
                d_hidden.iter_mut().for_each(|d| *d = 0.0);
                coeffs.clear();
                output_terms(&self.params.output, dim, &hidden, target, &negatives, &mut d_hidden, &mut coeffs);
                axpy(-lr * inv, &d_hidden, &mut paragraph);
            }
        }
        Ok(paragraph)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        self.write(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(path, e))
    }

    fn write<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        let c = &self.config;
        writeln!(
            out,
            "pvmodel {} {} {} {} {} {} {}",
            self.vocab.len(),
            self.params.dim,
            self.window,
            self.negative_samples,
            c.steps,
            c.learning_rate,
            c.seed
        )?;
        for id in 0..self.vocab.len() {
            write!(out, "{} {}", self.vocab.token(id), self.vocab.count(id))?;
            for v in self.params.input_row(id).iter().chain(self.params.output_row(id)) {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Load a model written by [`PvModel::save`]. Values are stored in
    /// shortest round-trip form, so inference after reload is bit-identical.
    pub fn load(path: impl AsRef<Path>) -> Result<PvModel> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let bad = |line: usize, msg: &str| Error::Format {
            path: path.to_path_buf(),
            line,
            message: msg.to_string(),
        };
        let mut lines = BufReader::new(file).lines();
        let header = lines
            .next()
            .ok_or_else(|| bad(1, "empty model file"))?
            .map_err(|e| Error::io(path, e))?;
        let h: Vec<&str> = header.split(' ').collect();
        if h.len() != 8 || h[0] != "pvmodel" {
            return Err(bad(1, "expected `pvmodel <vocab> <dim> <window> <negative> <steps> <lr> <seed>`"));
        }
        let num = |i: usize| h[i].parse::<usize>().map_err(|_| bad(1, "bad header field"));
        let (vocab_size, dim, window, negative_samples, steps) = (num(1)?, num(2)?, num(3)?, num(4)?, num(5)?);
        let learning_rate: f64 = h[6].parse().map_err(|_| bad(1, "bad learning rate"))?;
        let seed: u64 = h[7].parse().map_err(|_| bad(1, "bad seed"))?;
        if dim == 0 {
            return Err(bad(1, "dimension must be positive"));
        }

        let mut entries = Vec::with_capacity(vocab_size);
        let mut params = ModelParams::zeros(0, dim);
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let mut parts = line.split(' ');
            let token = parts.next().unwrap_or_default().to_string();
            let count: u64 = parts
                .next()
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| bad(i + 2, "missing count"))?;
            let values: Vec<f64> = parts
                .map(|p| p.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(i + 2, "non-numeric value"))?;
            if values.len() != 2 * dim {
                return Err(bad(i + 2, "row must hold input and output vectors"));
            }
            params.input.extend_from_slice(&values[..dim]);
            params.output.extend_from_slice(&values[dim..]);
            entries.push((token, count));
        }
        if entries.len() != vocab_size || vocab_size == 0 {
            return Err(bad(1, "row count does not match header"));
        }
        params.vocab_size = vocab_size;
        let vocab = Vocab::from_counts(entries);
        Ok(PvModel {
            noise: NoiseSampler::new(&vocab.counts),
            vocab,
            params,
            window,
            negative_samples,
            config: PvConfig {
                steps,
                learning_rate,
                seed,
            },
        })
    }
}

/// Free-function form of [`PvModel::infer`].
pub fn infer_paragraph<S: AsRef<str>>(pv: &PvModel, text: &[S]) -> Result<Vec<f64>> {
    pv.infer(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_params(seed: u64) -> ModelParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = ModelParams::zeros(5, 4);
        p.input.iter_mut().for_each(|v| *v = rng.random::<f64>() - 0.5);
        p.output.iter_mut().for_each(|v| *v = rng.random::<f64>() - 0.5);
        p
    }

    fn batch() -> Vec<Example> {
        vec![
            Example {
                inputs: vec![0],
                target: 1,
                negatives: vec![2, 3],
            },
            Example {
                inputs: vec![1, 2, 4],
                target: 0,
                negatives: vec![3, 3],
            },
        ]
    }

    #[test]
    fn gradient_matches_central_differences() {
        let params = small_params(3);
        let batch = batch();
        let (_, grad) = loss_and_gradient(&params, &batch);
        let h = 1e-4;
        let n = params.input.len();
        for k in 0..2 * n {
            let mut plus = params.clone();
            let mut minus = params.clone();
            let (analytic, slot_p, slot_m) = if k < n {
                (grad.input[k], &mut plus.input[k], &mut minus.input[k])
            } else {
                (grad.output[k - n], &mut plus.output[k - n], &mut minus.output[k - n])
            };
            *slot_p += h;
            *slot_m -= h;
            let numeric = (loss(&plus, &batch) - loss(&minus, &batch)) / (2.0 * h);
            let err = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-6);
            assert!(err < 1e-3, "coordinate {k}: numeric {numeric} analytic {analytic}");
        }
    }

    #[test]
    fn perfect_prediction_has_near_zero_loss() {
        let mut p = ModelParams::zeros(2, 2);
        p.input = vec![10.0, 0.0, 0.0, 0.0];
        p.output = vec![0.0, 0.0, 10.0, 0.0];
        let ex = Example {
            inputs: vec![0],
            target: 1,
            negatives: vec![],
        };
        let (l, _) = loss_and_gradient(&p, &[ex]);
        assert!(l < 1e-40, "{l}");
    }

    #[test]
    fn duplicated_batch_doubles_everything() {
        let params = small_params(9);
        let once = batch();
        let twice: Vec<Example> = once.iter().chain(once.iter()).cloned().collect();
        let (l1, g1) = loss_and_gradient(&params, &once);
        let (l2, g2) = loss_and_gradient(&params, &twice);
        assert!((l2 - 2.0 * l1).abs() <= 1e-12 * l1.abs());
        for (a, b) in g1.input.iter().chain(&g1.output).zip(g2.input.iter().chain(&g2.output)) {
            assert!((b - 2.0 * a).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let corpus: Vec<Vec<String>> = vec![];
        assert!(train_word_vectors(&corpus, &TrainConfig::default()).is_err());
        let corpus = vec![vec!["a"]];
        let cfg = TrainConfig {
            min_count: 2,
            ..TrainConfig::default()
        };
        assert!(train_word_vectors(&corpus, &cfg).is_err());
    }

    #[test]
    fn noise_sampler_skips_target() {
        let sampler = NoiseSampler::new(&[100, 1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut out = Vec::new();
        for _ in 0..50 {
            sampler.negatives(&mut rng, 0, 5, &mut out);
            assert!(out.iter().all(|&n| n != 0));
        }
        let single = NoiseSampler::new(&[3]);
        single.negatives(&mut rng, 0, 5, &mut out);
        assert!(out.is_empty());
    }

    #[test]
    fn all_oov_paragraph_is_an_error() {
        let corpus = vec![vec!["a", "b", "a", "b"]];
        let cfg = TrainConfig {
            dim: 4,
            epochs: 2,
            ..TrainConfig::default()
        };
        let pv = train(&corpus, &cfg).unwrap().pv_model(PvConfig::default());
        assert!(matches!(pv.infer(&["zzz"]), Err(Error::OutOfVocabulary(_))));
        assert_eq!(pv.infer(&["a", "b"]).unwrap().len(), 4);
    }
}
