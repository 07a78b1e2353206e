//! Translate held-out words by projecting them and ranking target words,
//! at increasing noise levels.

use monophrase::synthetic::{make_synthetic, SyntheticConfig};
use monophrase::xmap::{evaluate_induction, induce_translations, train_projection_closed_form, Provenance, SeedPairs};

fn main() -> monophrase::Result<()> {
    for noise in [0.0, 0.05, 0.2, 0.5] {
        let world = make_synthetic(&SyntheticConfig {
            dim: 50,
            vocab: 200,
            noise,
            ..Default::default()
        })?;
        let (train, test) = world.gold.split_at(150);
        let seeds = SeedPairs::new(train.to_vec(), Provenance::Dictionary);
        let m = train_projection_closed_form(&seeds, &world.src, &world.tgt, 1e-3)?;
        let p1 = evaluate_induction(&m, &world.src, &world.tgt, test, 1)?.precision();
        let p5 = evaluate_induction(&m, &world.src, &world.tgt, test, 5)?.precision();
        println!("noise {noise:<4} precision@1 {p1:.2} precision@5 {p5:.2}");
        if noise == 0.2 {
            let (query, gold) = &test[0];
            println!("  {query} (gold {gold}):");
            for (t, score) in induce_translations(&m, &world.src, &world.tgt, query, 3)? {
                println!("    {t} {score:.3}");
            }
        }
    }
    Ok(())
}
