//! The whole pipeline on a synthetic world: learn the four projections,
//! score the lexicon, then rescore the phrase table in append and replace
//! mode.

use monophrase::phrasetable::StreamOptions;
use monophrase::scoring::{build_wordsim_table, rescore_table, MatrixSet, ScoringModels};
use monophrase::synthetic::{make_synthetic, SyntheticConfig};
use monophrase::xmap::{train_projection_closed_form, Provenance};
use monophrase::{Direction, FeatureSet, Mode, PhraseVectorizer, ScoreConfig, SeedPairs};

fn main() -> monophrase::Result<()> {
    let world = make_synthetic(&SyntheticConfig {
        noise: 0.05,
        phrases: 5,
        ..Default::default()
    })?;
    let dir = std::env::temp_dir().join("monophrase-rescore");
    let files = world.write(&dir)?;

    let words = SeedPairs::new(world.gold.clone(), Provenance::Dictionary);
    let sentences = SeedPairs::new(world.sentence_pairs.clone(), Provenance::ParallelShortSentences);
    let fit = |seeds: &SeedPairs, forward: bool| {
        if forward {
            train_projection_closed_form(seeds, &world.src, &world.tgt, 1e-3)
        } else {
            train_projection_closed_form(&seeds.reversed(), &world.tgt, &world.src, 1e-3)
        }
    };
    let matrices = MatrixSet {
        word_direct: fit(&words, true)?,
        word_inverse: fit(&words, false)?,
        phrase_direct: fit(&sentences, true)?,
        phrase_inverse: fit(&sentences, false)?,
    };

    let mut cfg = ScoreConfig::default();
    let sim_direct = build_wordsim_table(
        &world.lexicon,
        Direction::SrcToTgt,
        &matrices.word_direct,
        &world.src,
        &world.tgt,
        &cfg,
    )?;
    let sim_inverse = build_wordsim_table(
        &world.lexicon,
        Direction::TgtToSrc,
        &matrices.word_inverse,
        &world.src,
        &world.tgt,
        &cfg,
    )?;
    let models = ScoringModels {
        matrices: &matrices,
        src_phrases: PhraseVectorizer::average(&world.src),
        tgt_phrases: PhraseVectorizer::average(&world.tgt),
        sim_direct: &sim_direct,
        sim_inverse: &sim_inverse,
    };

    println!("input:\n{}", std::fs::read_to_string(&files.table).expect("table"));
    for (mode, features) in [(Mode::Append, FeatureSet::ALL), (Mode::Replace, "mono-phrase-direct".parse()?)] {
        cfg.mode = mode;
        cfg.features = features;
        let out = dir.join(format!("rescored-{mode}.txt"));
        let report = rescore_table(&files.table, &out, &models, &cfg, &StreamOptions::default())?;
        println!("{mode}:\n{}", std::fs::read_to_string(&out).expect("output"));
        println!("{report}\n");
    }
    Ok(())
}
