//! Infer paragraph vectors for short texts from a frozen word model.

use monophrase::embedtrain::{train, PvConfig, TrainConfig};
use monophrase::vecspace::cosine;

fn main() -> monophrase::Result<()> {
    let mut corpus: Vec<Vec<&str>> = Vec::new();
    for _ in 0..200 {
        corpus.push(["a", "b"].repeat(25));
        corpus.push(["c", "d"].repeat(25));
    }
    let cfg = TrainConfig {
        dim: 20,
        window: 1,
        epochs: 5,
        ..Default::default()
    };
    let pv = train(&corpus, &cfg)?.pv_model(PvConfig::default());

    let texts: [&[&str]; 4] = [&["a", "b"], &["b", "a"], &["c", "d"], &["a", "unknown", "b"]];
    let vectors: Vec<Vec<f64>> = texts.iter().map(|t| pv.infer(t)).collect::<Result<_, _>>()?;
    for (i, t) in texts.iter().enumerate() {
        for (j, u) in texts.iter().enumerate().skip(i + 1) {
            println!("{:>14} ~ {:<14} {:+.3}", t.join(" "), u.join(" "), cosine(&vectors[i], &vectors[j])?);
        }
    }
    match pv.infer(&["nothing", "known"]) {
        Ok(_) => println!("unexpected vector"),
        Err(e) => println!("all-unknown text: {e}"),
    }
    Ok(())
}
