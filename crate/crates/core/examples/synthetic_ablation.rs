//! How well each monolingual feature separates gold from mismatched phrase
//! pairs as the target space gets noisier.

use monophrase::scoring::{build_wordsim_table, score_pair, MatrixSet, ScoringModels};
use monophrase::synthetic::{make_synthetic, SyntheticConfig};
use monophrase::xmap::{train_projection_closed_form, Provenance};
use monophrase::{Direction, Feature, FeatureSet, PhraseVectorizer, ScoreConfig, SeedPairs};

fn main() -> monophrase::Result<()> {
    let cfg = ScoreConfig::default();
    print!("{:<6}", "noise");
    for f in Feature::ALL {
        print!(" {:>20}", f.name());
    }
    println!();

    for noise in [0.5, 2.0, 4.0, 8.0] {
        let world = make_synthetic(&SyntheticConfig {
            noise,
            phrases: 300,
            ..Default::default()
        })?;
        let words = SeedPairs::new(world.gold.clone(), Provenance::Dictionary);
        let sentences = SeedPairs::new(world.sentence_pairs.clone(), Provenance::ParallelShortSentences);
        let fit = |seeds: &SeedPairs| train_projection_closed_form(seeds, &world.src, &world.tgt, 1e-3);
        let fit_back = |seeds: &SeedPairs| train_projection_closed_form(&seeds.reversed(), &world.tgt, &world.src, 1e-3);
        let matrices = MatrixSet {
            word_direct: fit(&words)?,
            word_inverse: fit_back(&words)?,
            phrase_direct: fit(&sentences)?,
            phrase_inverse: fit_back(&sentences)?,
        };
        let sim = |d: Direction, m| build_wordsim_table(&world.lexicon, d, m, &world.src, &world.tgt, &cfg);
        let sim_direct = sim(Direction::SrcToTgt, &matrices.word_direct)?;
        let sim_inverse = sim(Direction::TgtToSrc, &matrices.word_inverse)?;
        let models = ScoringModels {
            matrices: &matrices,
            src_phrases: PhraseVectorizer::average(&world.src),
            tgt_phrases: PhraseVectorizer::average(&world.tgt),
            sim_direct: &sim_direct,
            sim_inverse: &sim_inverse,
        };

        // Rows come in (gold, mismatched) pairs for the same source phrase.
        let mut wins = [0usize; 4];
        for rows in world.table.chunks_exact(2) {
            let gold = score_pair(&rows[0], &models, &cfg, FeatureSet::ALL)?;
            let wrong = score_pair(&rows[1], &models, &cfg, FeatureSet::ALL)?;
            for (w, f) in wins.iter_mut().zip(Feature::ALL) {
                *w += (gold.get(f) > wrong.get(f)) as usize;
            }
        }
        print!("{noise:<6}");
        for w in wins {
            print!(" {:>20.3}", w as f64 / (world.table.len() / 2) as f64);
        }
        println!();
    }
    Ok(())
}
