//! Batch command-line interface.
//!
//! One subcommand per pipeline stage. Every run resolves a
//! [`PipelineConfig`] (defaults, then `--config`, then `--set KEY=VALUE`,
//! then dedicated flags) and writes a report that starts with the resolved
//! configuration, so `--config REPORT` repeats the run.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 internal error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{PipelineConfig, SolverChoice};
use crate::embedtrain::{read_corpus, train, PvModel};
use crate::error::{Error, Result};
use crate::phrasetable::{parse_lexicon, StreamOptions, TableFormat};
use crate::scoring::{
    build_wordsim_table, read_wordsim, rescore_table, write_wordsim, Feature, MatrixSet, ScoringModels, WordSimTable,
};
use crate::synthetic::make_synthetic;
use crate::vecspace::{load_vectors, save_vectors, PhraseVectorizer, VectorSpace};
use crate::xmap::{
    evaluate_induction, fit_closed_form, fit_sgd, induce_translations, read_seed_file, Direction, Level,
    ProjectionMatrix, Provenance, ResolvedPairs,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "monophrase", version, about = "Re-estimate phrase-table scores from monolingual embeddings")]
pub struct Cli {
    /// Flat `key = value` config file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Seed for every random choice of the run.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Override any config key. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    /// Write the run report here instead of stderr.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train word vectors on a tokenized corpus (one sentence per line).
    TrainEmbeddings(TrainEmbeddingsArgs),
    /// Learn a projection matrix from seed pairs.
    TrainProjection(TrainProjectionArgs),
    /// Precompute word similarities over a lexicon.
    BuildWordsim(BuildWordsimArgs),
    /// Rescore a phrase table with monolingual features.
    Rescore(RescoreArgs),
    /// Rank translation candidates for query words.
    InduceDict(InduceDictArgs),
    /// Generate a rotated bilingual world with gold answers.
    MakeSynthetic(MakeSyntheticArgs),
}

#[derive(Debug, Args)]
pub struct TrainEmbeddingsArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Vector file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also save the model for paragraph-vector inference.
    #[arg(long)]
    pub pv_model: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub negative: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub min_count: Option<u64>,
    /// skipgram or cbow.
    #[arg(long)]
    pub model: Option<String>,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    #[arg(long)]
    pub src_vectors: Option<PathBuf>,
    #[arg(long)]
    pub tgt_vectors: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainProjectionArgs {
    #[command(flatten)]
    pub spaces: SpaceArgs,
    /// `source<TAB>target` seed pairs: words, or short sentences at phrase level.
    #[arg(long)]
    pub seeds: Option<PathBuf>,
    /// Matrix file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// word or phrase.
    #[arg(long)]
    pub level: Option<String>,
    /// src-tgt or tgt-src.
    #[arg(long)]
    pub direction: Option<String>,
    /// closed or sgd.
    #[arg(long)]
    pub solver: Option<String>,
    #[arg(long)]
    pub ridge: Option<f64>,
    #[arg(long)]
    pub sgd_epochs: Option<usize>,
    #[arg(long)]
    pub sgd_learning_rate: Option<f64>,
    /// Keep at most this many seed pairs (0 keeps all).
    #[arg(long)]
    pub max_pairs: Option<usize>,
    /// Fail below this many resolved pairs (0 means the input dimension).
    #[arg(long)]
    pub min_pairs: Option<usize>,
    /// Paragraph-vector models for phrase-level seeds; averaging otherwise.
    #[arg(long)]
    pub src_pv: Option<PathBuf>,
    #[arg(long)]
    pub tgt_pv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// replace or append.
    #[arg(long)]
    pub mode: Option<String>,
    /// Comma-separated feature names, `all` or `none`.
    #[arg(long)]
    pub features: Option<String>,
    #[arg(long)]
    pub cosine_floor: Option<f64>,
    #[arg(long)]
    pub null_constant: Option<f64>,
    /// floor or drop.
    #[arg(long)]
    pub oov_policy: Option<String>,
}

#[derive(Debug, Args)]
pub struct BuildWordsimArgs {
    #[command(flatten)]
    pub spaces: SpaceArgs,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub word_direct: Option<PathBuf>,
    #[arg(long)]
    pub word_inverse: Option<PathBuf>,
    /// TSV file to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub score: ScoreArgs,
}

#[derive(Debug, Args)]
pub struct RescoreArgs {
    #[command(flatten)]
    pub spaces: SpaceArgs,
    /// Phrase table to read.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Rescored table to write.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Lexicon for word similarities, unless `--wordsim` is given.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Precomputed word similarities from `build-wordsim`.
    #[arg(long)]
    pub wordsim: Option<PathBuf>,
    #[arg(long)]
    pub word_direct: Option<PathBuf>,
    #[arg(long)]
    pub word_inverse: Option<PathBuf>,
    #[arg(long)]
    pub phrase_direct: Option<PathBuf>,
    #[arg(long)]
    pub phrase_inverse: Option<PathBuf>,
    #[arg(long)]
    pub src_pv: Option<PathBuf>,
    #[arg(long)]
    pub tgt_pv: Option<PathBuf>,
    #[arg(long)]
    pub error_cap: Option<usize>,
    #[arg(long)]
    pub max_phrase_length: Option<usize>,
    #[command(flatten)]
    pub score: ScoreArgs,
}

#[derive(Debug, Args)]
pub struct InduceDictArgs {
    #[command(flatten)]
    pub spaces: SpaceArgs,
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// One query word per line; defaults to the sources of `--eval`.
    #[arg(long)]
    pub queries: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Gold `source<TAB>target` pairs; reports precision@1 and precision@k.
    #[arg(long, value_name = "GOLD")]
    pub eval: Option<PathBuf>,
    /// TSV file to write instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MakeSyntheticArgs {
    /// Directory to write into.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub vocab: Option<usize>,
    /// Standard deviation of target noise.
    #[arg(long, allow_negative_numbers = true)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub phrases: Option<usize>,
    #[arg(long)]
    pub sentences: Option<usize>,
}

/// Flag values destined for config keys; unset flags are skipped.
struct Overrides(Vec<(&'static str, String)>);

impl Overrides {
    fn new() -> Self {
        Overrides(Vec::new())
    }

    fn add<T: ToString>(&mut self, key: &'static str, value: &Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.0.push((key, v.to_string()));
        }
        self
    }

    fn path(&mut self, key: &'static str, value: &Option<PathBuf>) -> &mut Self {
        if let Some(v) = value {
            self.0.push((key, v.display().to_string()));
        }
        self
    }

    fn spaces(&mut self, s: &SpaceArgs) -> &mut Self {
        self.path("src_vectors", &s.src_vectors).path("tgt_vectors", &s.tgt_vectors)
    }

    fn score(&mut self, s: &ScoreArgs) -> &mut Self {
        self.add("mode", &s.mode)
            .add("features", &s.features)
            .add("cosine_floor", &s.cosine_floor)
            .add("null_constant", &s.null_constant)
            .add("oov_policy", &s.oov_policy)
    }
}

fn command_overrides(command: &Command) -> Overrides {
    let mut o = Overrides::new();
    match command {
        Command::TrainEmbeddings(a) => {
            o.path("corpus", &a.corpus)
                .path("output", &a.output)
                .path("pv_model", &a.pv_model)
                .add("dim", &a.dim)
                .add("window", &a.window)
                .add("epochs", &a.epochs)
                .add("negative", &a.negative)
                .add("learning_rate", &a.learning_rate)
                .add("min_count", &a.min_count)
                .add("model", &a.model);
        }
        Command::TrainProjection(a) => {
            o.spaces(&a.spaces)
                .path("seeds", &a.seeds)
                .path("output", &a.output)
                .add("level", &a.level)
                .add("direction", &a.direction)
                .add("solver", &a.solver)
                .add("ridge", &a.ridge)
                .add("sgd_epochs", &a.sgd_epochs)
                .add("sgd_learning_rate", &a.sgd_learning_rate)
                .add("max_pairs", &a.max_pairs)
                .add("min_pairs", &a.min_pairs)
                .path("src_pv", &a.src_pv)
                .path("tgt_pv", &a.tgt_pv);
        }
        Command::BuildWordsim(a) => {
            o.spaces(&a.spaces)
                .path("lexicon", &a.lexicon)
                .path("word_direct", &a.word_direct)
                .path("word_inverse", &a.word_inverse)
                .path("output", &a.output)
                .score(&a.score);
        }
        Command::Rescore(a) => {
            o.spaces(&a.spaces)
                .path("table", &a.table)
                .path("output", &a.output)
                .path("lexicon", &a.lexicon)
                .path("wordsim", &a.wordsim)
                .path("word_direct", &a.word_direct)
                .path("word_inverse", &a.word_inverse)
                .path("phrase_direct", &a.phrase_direct)
                .path("phrase_inverse", &a.phrase_inverse)
                .path("src_pv", &a.src_pv)
                .path("tgt_pv", &a.tgt_pv)
                .add("error_cap", &a.error_cap)
                .add("max_phrase_length", &a.max_phrase_length)
                .score(&a.score);
        }
        Command::InduceDict(a) => {
            o.spaces(&a.spaces)
                .path("matrix", &a.matrix)
                .path("queries", &a.queries)
                .path("gold", &a.eval)
                .add("k", &a.k)
                .path("output", &a.output);
        }
        Command::MakeSynthetic(a) => {
            o.path("output", &a.output)
                .add("synth_dim", &a.dim)
                .add("synth_vocab", &a.vocab)
                .add("synth_noise", &a.noise)
                .add("synth_phrases", &a.phrases)
                .add("synth_sentences", &a.sentences);
        }
    }
    o
}

/// Defaults, then the config file, then `--set`, `--seed`, `--report` and
/// the subcommand flags. All seeds follow the single run seed.
pub fn resolve_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(report) = &cli.report {
        cfg.paths.report = Some(report.clone());
    }
    for (k, v) in command_overrides(&cli.command).0 {
        cfg.set(k, &v)?;
    }
    cfg.train.seed = cfg.seed;
    cfg.pv.seed = cfg.seed;
    cfg.synthetic.seed = cfg.seed;
    Ok(cfg)
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Config(format!("missing required --{flag}")))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Resolved config followed by `report.` lines, to `cfg.paths.report` or
/// stderr.
fn write_report(cfg: &PipelineConfig, lines: &[(String, String)]) -> Result<()> {
    let mut text = cfg.to_text();
    for (k, v) in lines {
        text.push_str(&format!("report.{k} = {v}\n"));
    }
    match &cfg.paths.report {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

fn load_spaces(cfg: &PipelineConfig) -> Result<(VectorSpace, VectorSpace)> {
    let src = load_vectors(require(&cfg.paths.src_vectors, "src-vectors")?, None)?;
    let tgt = load_vectors(require(&cfg.paths.tgt_vectors, "tgt-vectors")?, None)?;
    Ok((src, tgt))
}

fn load_pv(path: &Option<PathBuf>) -> Result<Option<PvModel>> {
    path.as_ref().map(PvModel::load).transpose()
}

fn vectorizer<'a>(space: &'a VectorSpace, pv: &'a Option<PvModel>) -> PhraseVectorizer<'a> {
    match pv {
        Some(pv) => PhraseVectorizer::paragraph(space, pv),
        None => PhraseVectorizer::average(space),
    }
}

fn cmd_train_embeddings(cfg: &PipelineConfig) -> Result<()> {
    let corpus_path = require(&cfg.paths.corpus, "corpus")?;
    let output = require(&cfg.paths.output, "output")?;
    cfg.train.validate()?;
    let corpus = read_corpus(corpus_path)?;
    let model = train(&corpus, &cfg.train)?;
    let space = model.word_space();
    save_vectors(&space, output)?;
    if let Some(pv_path) = &cfg.paths.pv_model {
        model.pv_model(cfg.pv.clone()).save(pv_path)?;
    }
    let mut lines = vec![
        ("vocab".to_string(), space.len().to_string()),
        ("sentences".to_string(), corpus.len().to_string()),
    ];
    for (i, loss) in model.epoch_losses.iter().enumerate() {
        lines.push((format!("epoch_loss.{}", i + 1), loss.to_string()));
    }
    write_report(cfg, &lines)
}

fn cmd_train_projection(cfg: &PipelineConfig) -> Result<()> {
    let seeds_path = require(&cfg.paths.seeds, "seeds")?;
    let output = require(&cfg.paths.output, "output")?;
    let (src, tgt) = load_spaces(cfg)?;
    let provenance = match cfg.level {
        Level::Word => Provenance::Dictionary,
        Level::Phrase => Provenance::ParallelShortSentences,
    };
    let mut seeds = read_seed_file(seeds_path, provenance)?;
    if cfg.max_pairs > 0 && seeds.len() > cfg.max_pairs {
        seeds = match provenance {
            // Dictionaries are expected most frequent first.
            Provenance::Dictionary => seeds.most_frequent(cfg.max_pairs, |_| 0),
            Provenance::ParallelShortSentences => seeds.sample(cfg.max_pairs, cfg.seed),
        };
    }
    let (from, to, src_pv, tgt_pv) = match cfg.direction {
        Direction::SrcToTgt => (&src, &tgt, &cfg.paths.src_pv, &cfg.paths.tgt_pv),
        Direction::TgtToSrc => {
            seeds = seeds.reversed();
            (&tgt, &src, &cfg.paths.tgt_pv, &cfg.paths.src_pv)
        }
    };
    let data: ResolvedPairs = match provenance {
        Provenance::Dictionary => seeds.resolve(from, to),
        Provenance::ParallelShortSentences => {
            let (from_pv, to_pv) = (load_pv(src_pv)?, load_pv(tgt_pv)?);
            seeds.resolve_with(&vectorizer(from, &from_pv), &vectorizer(to, &to_pv))?
        }
    };
    let required = if cfg.min_pairs == 0 { data.d_src } else { cfg.min_pairs };
    if data.len() < required {
        return Err(Error::TooFewPairs {
            resolved: data.len(),
            required,
        });
    }
    if data.dropped > 0 {
        log::warn!("{} seed pairs had no vector and were dropped", data.dropped);
    }
    let m = match cfg.solver {
        SolverChoice::Closed => fit_closed_form(&data, cfg.ridge)?,
        SolverChoice::Sgd => fit_sgd(&data, cfg.sgd_epochs, cfg.sgd_learning_rate, cfg.seed)?,
    };
    m.save(output)?;
    let mut lines = vec![
        ("d_src".to_string(), m.d_src().to_string()),
        ("d_tgt".to_string(), m.d_tgt().to_string()),
    ];
    if let Some(r) = &m.report {
        lines.extend([
            ("pairs".to_string(), r.pairs.to_string()),
            ("dropped".to_string(), r.dropped.to_string()),
            ("final_loss".to_string(), r.final_loss.to_string()),
            ("solver".to_string(), r.solver.to_string()),
        ]);
    }
    write_report(cfg, &lines)
}

fn load_matrix(path: &Option<PathBuf>, flag: &str) -> Result<ProjectionMatrix> {
    ProjectionMatrix::load(require(path, flag)?)
}

fn word_tables(
    cfg: &PipelineConfig,
    src: &VectorSpace,
    tgt: &VectorSpace,
    need_direct: bool,
    need_inverse: bool,
) -> Result<(WordSimTable, WordSimTable)> {
    let lexicon = parse_lexicon(require(&cfg.paths.lexicon, "lexicon")?)?;
    let build = |needed: bool, direction: Direction, path: &Option<PathBuf>, flag: &str| -> Result<WordSimTable> {
        if !needed {
            return Ok(WordSimTable::new(direction));
        }
        let m = load_matrix(path, flag)?;
        build_wordsim_table(&lexicon, direction, &m, src, tgt, &cfg.score)
    };
    Ok((
        build(need_direct, Direction::SrcToTgt, &cfg.paths.word_direct, "word-direct")?,
        build(need_inverse, Direction::TgtToSrc, &cfg.paths.word_inverse, "word-inverse")?,
    ))
}

fn cmd_build_wordsim(cfg: &PipelineConfig) -> Result<()> {
    let output = require(&cfg.paths.output, "output")?;
    cfg.score.validate()?;
    let (src, tgt) = load_spaces(cfg)?;
    let need_direct = cfg.paths.word_direct.is_some();
    let need_inverse = cfg.paths.word_inverse.is_some();
    if !need_direct && !need_inverse {
        return Err(Error::Config("give --word-direct, --word-inverse or both".into()));
    }
    let (direct, inverse) = word_tables(cfg, &src, &tgt, need_direct, need_inverse)?;
    let mut out = create(output)?;
    write_wordsim(&[&direct, &inverse], &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(output, e))?;
    write_report(
        cfg,
        &[
            ("direct_entries".into(), direct.len().to_string()),
            ("inverse_entries".into(), inverse.len().to_string()),
            ("skipped_null".into(), (direct.skipped_null + inverse.skipped_null).to_string()),
            ("dropped_oov".into(), (direct.dropped_oov + inverse.dropped_oov).to_string()),
        ],
    )
}

/// A matrix file for an enabled feature, or a zero placeholder of the right
/// shape for a disabled one (never used for scoring).
fn matrix_or_placeholder(
    path: &Option<PathBuf>,
    flag: &str,
    needed: bool,
    direction: Direction,
    level: Level,
    dims: (usize, usize),
) -> Result<ProjectionMatrix> {
    if needed {
        return load_matrix(path, flag);
    }
    match path {
        Some(p) => ProjectionMatrix::load(p),
        None => Ok(ProjectionMatrix::zeros(dims.0, dims.1, direction, level)),
    }
}

fn cmd_rescore(cfg: &PipelineConfig) -> Result<()> {
    let table = require(&cfg.paths.table, "table")?;
    let output = require(&cfg.paths.output, "output")?;
    cfg.score.validate()?;
    let (src, tgt) = load_spaces(cfg)?;
    let (src_pv, tgt_pv) = (load_pv(&cfg.paths.src_pv)?, load_pv(&cfg.paths.tgt_pv)?);
    let src_phrases = vectorizer(&src, &src_pv);
    let tgt_phrases = vectorizer(&tgt, &tgt_pv);
    let (ds, dt) = (src_phrases.dim(), tgt_phrases.dim());
    let which = cfg.score.emitted_features();
    let need = |f: Feature| which.contains(f);

    let matrices = MatrixSet {
        // Lexical features read the similarity tables, not these.
        word_direct: ProjectionMatrix::zeros(ds, dt, Direction::SrcToTgt, Level::Word),
        word_inverse: ProjectionMatrix::zeros(dt, ds, Direction::TgtToSrc, Level::Word),
        phrase_direct: matrix_or_placeholder(
            &cfg.paths.phrase_direct,
            "phrase-direct",
            need(Feature::PhraseDirect),
            Direction::SrcToTgt,
            Level::Phrase,
            (ds, dt),
        )?,
        phrase_inverse: matrix_or_placeholder(
            &cfg.paths.phrase_inverse,
            "phrase-inverse",
            need(Feature::PhraseInverse),
            Direction::TgtToSrc,
            Level::Phrase,
            (dt, ds),
        )?,
    };
    let (sim_direct, sim_inverse) = match &cfg.paths.wordsim {
        Some(path) => read_wordsim(path)?,
        None if need(Feature::LexDirect) || need(Feature::LexInverse) => {
            word_tables(cfg, &src, &tgt, need(Feature::LexDirect), need(Feature::LexInverse))?
        }
        None => (WordSimTable::new(Direction::SrcToTgt), WordSimTable::new(Direction::TgtToSrc)),
    };
    let models = ScoringModels {
        matrices: &matrices,
        src_phrases,
        tgt_phrases,
        sim_direct: &sim_direct,
        sim_inverse: &sim_inverse,
    };
    let stream = StreamOptions {
        format: TableFormat {
            max_phrase_length: cfg.max_phrase_length,
        },
        error_cap: cfg.error_cap,
    };
    let report = rescore_table(table, output, &models, &cfg.score, &stream)?;
    log::info!("{report}");
    let lines: Vec<(String, String)> = report
        .to_key_values()
        .lines()
        .filter_map(|l| l.strip_prefix("report.")?.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .chain(
            report
                .parse_errors
                .iter()
                .map(|e| (format!("parse_error.{}", e.line), e.message.clone())),
        )
        .collect();
    write_report(cfg, &lines)
}

fn read_word_list(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let word = line.trim();
        if !word.is_empty() {
            out.push(word.to_string());
        }
    }
    Ok(out)
}

fn cmd_induce_dict(cfg: &PipelineConfig) -> Result<()> {
    let m = load_matrix(&cfg.paths.matrix, "matrix")?;
    let (src, tgt) = load_spaces(cfg)?;
    // The matrix direction decides which language the queries come from.
    let (from, to) = match m.direction {
        Direction::SrcToTgt => (&src, &tgt),
        Direction::TgtToSrc => (&tgt, &src),
    };
    if cfg.k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let gold = match &cfg.paths.gold {
        Some(path) => Some(read_seed_file(path, Provenance::Dictionary)?),
        None => None,
    };
    let queries = match (&cfg.paths.queries, &gold) {
        (Some(path), _) => read_word_list(path)?,
        (None, Some(gold)) => {
            let mut seen = std::collections::HashSet::new();
            gold.pairs()
                .iter()
                .filter(|(s, _)| seen.insert(s.clone()))
                .map(|(s, _)| s.clone())
                .collect()
        }
        (None, None) => return Err(Error::Config("missing required --queries (or --eval)".into())),
    };
    if queries.is_empty() {
        return Err(Error::Empty("query list"));
    }

    let mut out: Box<dyn Write> = match &cfg.paths.output {
        Some(path) => Box::new(create(path)?),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    let out_name = cfg.paths.output.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    let mut failed = 0;
    for q in &queries {
        match induce_translations(&m, from, to, q, cfg.k) {
            Ok(ranked) => {
                for (rank, (cand, score)) in ranked.iter().enumerate() {
                    writeln!(out, "{q}\t{}\t{cand}\t{score}", rank + 1).map_err(|e| Error::io(&out_name, e))?;
                }
            }
            Err(e @ (Error::OutOfVocabulary(_) | Error::ZeroNorm)) => {
                failed += 1;
                log::warn!("query {q:?}: {e}");
                writeln!(out, "{q}\tOOV").map_err(|e| Error::io(&out_name, e))?;
            }
            Err(e) => return Err(e),
        }
    }
    out.flush().map_err(|e| Error::io(&out_name, e))?;

    let mut lines = vec![
        ("queries".to_string(), queries.len().to_string()),
        ("failed".to_string(), failed.to_string()),
    ];
    if let Some(gold) = &gold {
        let at1 = evaluate_induction(&m, from, to, gold.pairs(), 1)?;
        let atk = evaluate_induction(&m, from, to, gold.pairs(), cfg.k)?;
        lines.extend([
            ("gold_queries".to_string(), at1.queries.to_string()),
            ("gold_oov".to_string(), at1.oov.to_string()),
            ("precision_at_1".to_string(), at1.precision().to_string()),
            (format!("precision_at_{}", cfg.k), atk.precision().to_string()),
        ]);
    }
    write_report(cfg, &lines)?;
    if failed == queries.len() {
        return Err(Error::OutOfVocabulary(format!("all {failed} queries")));
    }
    Ok(())
}

fn cmd_make_synthetic(cfg: &PipelineConfig) -> Result<()> {
    let dir = require(&cfg.paths.output, "output")?;
    let world = make_synthetic(&cfg.synthetic)?;
    let files = world.write(dir)?;
    write_report(
        cfg,
        &[
            ("src_vectors".into(), files.src_vectors.display().to_string()),
            ("tgt_vectors".into(), files.tgt_vectors.display().to_string()),
            ("gold".into(), files.gold.display().to_string()),
            ("sentences".into(), files.sentences.display().to_string()),
            ("table".into(), files.table.display().to_string()),
            ("lexicon".into(), files.lexicon.display().to_string()),
        ],
    )
}

/// Run a parsed command line.
pub fn execute(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    match &cli.command {
        Command::TrainEmbeddings(_) => cmd_train_embeddings(&cfg),
        Command::TrainProjection(_) => cmd_train_projection(&cfg),
        Command::BuildWordsim(_) => cmd_build_wordsim(&cfg),
        Command::Rescore(_) => cmd_rescore(&cfg),
        Command::InduceDict(_) => cmd_induce_dict(&cfg),
        Command::MakeSynthetic(_) => cmd_make_synthetic(&cfg),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Parse `args`, run, and map the outcome to an exit code. Panics become
/// [`EXIT_INTERNAL`].
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match std::panic::catch_unwind(|| execute(&cli)) {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(_) => EXIT_INTERNAL,
    }
}
