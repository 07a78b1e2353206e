//! Lexical weights of an aligned phrase pair from word similarities, in
//! both directions.

use monophrase::phrasetable::parse_phrase_table_line;
use monophrase::scoring::{lexical_weight, WordSimTable};
use monophrase::xmap::Direction;
use monophrase::ScoreConfig;

fn main() -> monophrase::Result<()> {
    let pair = parse_phrase_table_line("la casa azul ||| the blue house ||| 0.4 0.3 0.5 0.2 ||| 0-0 1-2 2-1")?;

    let mut direct = WordSimTable::new(Direction::SrcToTgt);
    let mut inverse = WordSimTable::new(Direction::TgtToSrc);
    for (f, e, s) in [("la", "the", 0.7), ("casa", "house", 0.9), ("azul", "blue", 0.8)] {
        direct.insert(f, e, s);
        inverse.insert(e, f, s - 0.1);
    }

    let cfg = ScoreConfig::default();
    let d = lexical_weight(&pair, &direct, &cfg, Direction::SrcToTgt)?;
    let i = lexical_weight(&pair, &inverse, &cfg, Direction::TgtToSrc)?;
    println!("direct  {d:.6}  (0.7 * 0.9 * 0.8)");
    println!("inverse {i:.6}  (0.6 * 0.7 * 0.8)");

    // Dropping a link leaves `azul` unaligned: it contributes the null constant.
    let mut partial = pair.clone();
    partial.alignment.retain(|&(s, _)| s != 2);
    let d = lexical_weight(&partial, &direct, &cfg, Direction::SrcToTgt)?;
    println!("direct without azul's link {d:.3e}  (0.7 * 0.9 * {})", cfg.null_align_constant);
    Ok(())
}
