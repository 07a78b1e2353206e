//! Train skipgram and CBOW vectors on a toy corpus in which `a` always
//! appears next to `b` and `c` next to `d`.

use monophrase::embedtrain::{train, ModelKind, TrainConfig};
use monophrase::vecspace::cosine;

fn main() -> monophrase::Result<()> {
    let mut corpus: Vec<Vec<&str>> = Vec::new();
    for _ in 0..200 {
        corpus.push(["a", "b"].repeat(25));
        corpus.push(["c", "d"].repeat(25));
    }

    for model in [ModelKind::Skipgram, ModelKind::Cbow] {
        let cfg = TrainConfig {
            dim: 20,
            window: 1,
            epochs: 5,
            model,
            ..Default::default()
        };
        let trained = train(&corpus, &cfg)?;
        let space = trained.word_space();
        let a = space.lookup("a").expect("in vocabulary");
        println!("{model}: epoch losses {:.5?}", trained.epoch_losses);
        for other in ["b", "c", "d"] {
            let sim = cosine(a, space.lookup(other).expect("in vocabulary"))?;
            println!("  cos(a, {other}) = {sim:+.3}");
        }
    }
    Ok(())
}
