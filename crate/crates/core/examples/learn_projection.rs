//! Learn a source-to-target projection from a seed dictionary with both
//! solvers and compare them.

use monophrase::synthetic::{make_synthetic, SyntheticConfig};
use monophrase::xmap::{fit_closed_form, fit_sgd, Provenance, SeedPairs};

fn main() -> monophrase::Result<()> {
    let world = make_synthetic(&SyntheticConfig {
        dim: 50,
        vocab: 300,
        noise: 0.05,
        ..Default::default()
    })?;
    let seeds = SeedPairs::new(world.gold.clone(), Provenance::Dictionary);
    let data = seeds.resolve(&world.src, &world.tgt);

    let closed = fit_closed_form(&data, 1e-3)?;
    let sgd = fit_sgd(&data, 100, 0.5, 1)?;
    for (name, m) in [("closed form", &closed), ("sgd", &sgd)] {
        println!("{name}: {}", m.report.as_ref().expect("fitted matrix has a report"));
    }
    println!("distance between solutions: {:.3e}", closed.frobenius_distance(&sgd));

    // The inverse map is trained on the same pairs turned around.
    let back = fit_closed_form(&seeds.reversed().resolve(&world.tgt, &world.src), 1e-3)?;
    println!("inverse: {} ({})", back.report.as_ref().expect("report"), back.direction);
    Ok(())
}
