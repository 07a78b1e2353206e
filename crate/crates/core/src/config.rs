//! Flat `key = value` pipeline configuration.
//!
//! Every CLI run resolves one [`PipelineConfig`]: defaults, then the
//! `--config` file, then command-line flags. The resolved configuration is
//! printed with each report and can be fed back with `--config` to repeat a
//! run. Keys starting with `report.` are ignored when loading, so a saved
//! report doubles as a config file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::embedtrain::{ModelKind, PvConfig, TrainConfig};
use crate::error::{Error, Result};
use crate::phrasetable::DEFAULT_MAX_PHRASE_LENGTH;
use crate::scoring::{FeatureSet, Mode, OovPolicy, ScoreConfig};
use crate::synthetic::SyntheticConfig;
use crate::xmap::{Direction, Level};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    Closed,
    Sgd,
}

impl FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(SolverChoice::Closed),
            "sgd" => Ok(SolverChoice::Sgd),
            other => Err(Error::Config(format!("unknown solver {other:?} (closed|sgd)"))),
        }
    }
}

impl std::fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverChoice::Closed => "closed",
            SolverChoice::Sgd => "sgd",
        })
    }
}

/// Input and output locations. Unset paths are omitted from the text form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub pv_model: Option<PathBuf>,
    pub src_vectors: Option<PathBuf>,
    pub tgt_vectors: Option<PathBuf>,
    pub src_pv: Option<PathBuf>,
    pub tgt_pv: Option<PathBuf>,
    pub seeds: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub word_direct: Option<PathBuf>,
    pub word_inverse: Option<PathBuf>,
    pub phrase_direct: Option<PathBuf>,
    pub phrase_inverse: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub wordsim: Option<PathBuf>,
    pub queries: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: Paths,
    pub train: TrainConfig,
    pub pv: PvConfig,
    pub score: ScoreConfig,
    pub error_cap: usize,
    pub max_phrase_length: usize,
    pub level: Level,
    pub direction: Direction,
    pub solver: SolverChoice,
    pub ridge: f64,
    pub sgd_epochs: usize,
    pub sgd_learning_rate: f64,
    /// Keep at most this many seed pairs (0 keeps all): the most frequent
    /// words for dictionaries, a seeded sample for sentences.
    pub max_pairs: usize,
    /// Fail unless this many seed pairs resolve (0 means the source
    /// dimension).
    pub min_pairs: usize,
    pub k: usize,
    pub synthetic: SyntheticConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 1,
            paths: Paths::default(),
            train: TrainConfig::default(),
            pv: PvConfig::default(),
            score: ScoreConfig::default(),
            error_cap: 1000,
            max_phrase_length: DEFAULT_MAX_PHRASE_LENGTH,
            level: Level::Word,
            direction: Direction::SrcToTgt,
            solver: SolverChoice::Closed,
            ridge: 1e-3,
            sgd_epochs: 100,
            sgd_learning_rate: 0.5,
            max_pairs: 0,
            min_pairs: 0,
            k: 5,
            synthetic: SyntheticConfig::default(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

impl PipelineConfig {
    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let path = || Some(PathBuf::from(value));
        match key {
            "seed" => self.seed = parse(key, value)?,
            "corpus" => self.paths.corpus = path(),
            "output" => self.paths.output = path(),
            "pv_model" => self.paths.pv_model = path(),
            "src_vectors" => self.paths.src_vectors = path(),
            "tgt_vectors" => self.paths.tgt_vectors = path(),
            "src_pv" => self.paths.src_pv = path(),
            "tgt_pv" => self.paths.tgt_pv = path(),
            "seeds" => self.paths.seeds = path(),
            "matrix" => self.paths.matrix = path(),
            "word_direct" => self.paths.word_direct = path(),
            "word_inverse" => self.paths.word_inverse = path(),
            "phrase_direct" => self.paths.phrase_direct = path(),
            "phrase_inverse" => self.paths.phrase_inverse = path(),
            "table" => self.paths.table = path(),
            "lexicon" => self.paths.lexicon = path(),
            "wordsim" => self.paths.wordsim = path(),
            "queries" => self.paths.queries = path(),
            "gold" => self.paths.gold = path(),
            "report" => self.paths.report = path(),
            "dim" => self.train.dim = parse(key, value)?,
            "window" => self.train.window = parse(key, value)?,
            "epochs" => self.train.epochs = parse(key, value)?,
            "negative" => self.train.negative_samples = parse(key, value)?,
            "learning_rate" => self.train.learning_rate = parse(key, value)?,
            "min_count" => self.train.min_count = parse(key, value)?,
            "model" => self.train.model = value.parse::<ModelKind>()?,
            "pv_steps" => self.pv.steps = parse(key, value)?,
            "pv_learning_rate" => self.pv.learning_rate = parse(key, value)?,
            "mode" => self.score.mode = value.parse::<Mode>()?,
            "features" => self.score.features = value.parse::<FeatureSet>()?,
            "cosine_floor" => self.score.cosine_floor = parse(key, value)?,
            "null_constant" => self.score.null_align_constant = parse(key, value)?,
            "oov_policy" => self.score.oov_policy = value.parse::<OovPolicy>()?,
            "error_cap" => self.error_cap = parse(key, value)?,
            "max_phrase_length" => self.max_phrase_length = parse(key, value)?,
            "level" => self.level = value.parse::<Level>().map_err(|e| Error::Config(e.to_string()))?,
            "direction" => self.direction = value.parse::<Direction>().map_err(|e| Error::Config(e.to_string()))?,
            "solver" => self.solver = value.parse()?,
            "ridge" => self.ridge = parse(key, value)?,
            "sgd_epochs" => self.sgd_epochs = parse(key, value)?,
            "sgd_learning_rate" => self.sgd_learning_rate = parse(key, value)?,
            "max_pairs" => self.max_pairs = parse(key, value)?,
            "min_pairs" => self.min_pairs = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "synth_dim" => self.synthetic.dim = parse(key, value)?,
            "synth_vocab" => self.synthetic.vocab = parse(key, value)?,
            "synth_noise" => self.synthetic.noise = parse(key, value)?,
            "synth_phrases" => self.synthetic.phrases = parse(key, value)?,
            "synth_sentences" => self.synthetic.sentences = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Every setting as `(key, value)`, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![("seed", self.seed.to_string())];
        let p = &self.paths;
        let paths: [(&'static str, &Option<PathBuf>); 19] = [
            ("corpus", &p.corpus),
            ("output", &p.output),
            ("pv_model", &p.pv_model),
            ("src_vectors", &p.src_vectors),
            ("tgt_vectors", &p.tgt_vectors),
            ("src_pv", &p.src_pv),
            ("tgt_pv", &p.tgt_pv),
            ("seeds", &p.seeds),
            ("matrix", &p.matrix),
            ("word_direct", &p.word_direct),
            ("word_inverse", &p.word_inverse),
            ("phrase_direct", &p.phrase_direct),
            ("phrase_inverse", &p.phrase_inverse),
            ("table", &p.table),
            ("lexicon", &p.lexicon),
            ("wordsim", &p.wordsim),
            ("queries", &p.queries),
            ("gold", &p.gold),
            ("report", &p.report),
        ];
        out.extend(
            paths
                .into_iter()
                .filter_map(|(k, v)| v.as_ref().map(|v| (k, v.display().to_string()))),
        );
        let t = &self.train;
        out.extend([
            ("dim", t.dim.to_string()),
            ("window", t.window.to_string()),
            ("epochs", t.epochs.to_string()),
            ("negative", t.negative_samples.to_string()),
            ("learning_rate", t.learning_rate.to_string()),
            ("min_count", t.min_count.to_string()),
            ("model", t.model.to_string()),
            ("pv_steps", self.pv.steps.to_string()),
            ("pv_learning_rate", self.pv.learning_rate.to_string()),
            ("mode", self.score.mode.to_string()),
            ("features", self.score.features.to_string()),
            ("cosine_floor", self.score.cosine_floor.to_string()),
            ("null_constant", self.score.null_align_constant.to_string()),
            ("oov_policy", self.score.oov_policy.to_string()),
            ("error_cap", self.error_cap.to_string()),
            ("max_phrase_length", self.max_phrase_length.to_string()),
            ("level", self.level.to_string()),
            ("direction", self.direction.to_string()),
            ("solver", self.solver.to_string()),
            ("ridge", self.ridge.to_string()),
            ("sgd_epochs", self.sgd_epochs.to_string()),
            ("sgd_learning_rate", self.sgd_learning_rate.to_string()),
            ("max_pairs", self.max_pairs.to_string()),
            ("min_pairs", self.min_pairs.to_string()),
            ("k", self.k.to_string()),
            ("synth_dim", self.synthetic.dim.to_string()),
            ("synth_vocab", self.synthetic.vocab.to_string()),
            ("synth_noise", self.synthetic.noise.to_string()),
            ("synth_phrases", self.synthetic.phrases.to_string()),
            ("synth_sentences", self.synthetic.sentences.to_string()),
        ]);
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// Apply settings from config text on top of `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if key.starts_with("report.") {
                continue;
            }
            self.set(key, value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        cfg.merge_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut cfg = PipelineConfig::default();
        cfg.seed = 42;
        cfg.paths.table = Some("tables/pt.txt".into());
        cfg.score.mode = Mode::Replace;
        cfg.score.features = "mono-phrase-direct".parse().unwrap();
        cfg.score.cosine_floor = 2.5e-5;
        cfg.direction = Direction::TgtToSrc;
        cfg.synthetic.noise = 0.05;
        let back = PipelineConfig::from_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn comments_reports_and_errors() {
        let cfg = PipelineConfig::from_text("# comment\n\nseed = 7\nreport.pairs_in = 10\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert!(PipelineConfig::from_text("colour = blue\n").is_err());
        assert!(PipelineConfig::from_text("seed 7\n").is_err());
        assert!(PipelineConfig::from_text("seed = seven\n").is_err());
    }
}
