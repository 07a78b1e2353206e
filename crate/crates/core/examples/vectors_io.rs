//! Build a small vector space, save it, load it back and compare words and
//! phrases by cosine similarity.

use monophrase::vecspace::{cosine, load_vectors, save_vectors, PhraseVectorizer, SpaceKind, VectorSpace};

fn main() -> monophrase::Result<()> {
    let (space, _) = VectorSpace::from_entries(
        3,
        SpaceKind::Word,
        [
            ("cat", vec![0.9, 0.1, 0.0]),
            ("dog", vec![0.8, 0.3, 0.1]),
            ("car", vec![0.0, 0.2, 0.95]),
        ],
    )?;

    let dir = std::env::temp_dir().join("monophrase-vectors-io");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let path = dir.join("words.vec");
    save_vectors(&space, &path)?;
    println!("{}", std::fs::read_to_string(&path).expect("written file"));

    let reloaded = load_vectors(&path, Some(3))?;
    let v = |t: &str| reloaded.lookup(t).expect("known word");
    println!("cos(cat, dog) = {:.4}", cosine(v("cat"), v("dog"))?);
    println!("cos(cat, car) = {:.4}", cosine(v("cat"), v("car"))?);

    // Unknown words are skipped when averaging a phrase.
    let phrases = PhraseVectorizer::average(&reloaded);
    let pets = phrases.vectorize(&["cat", "and", "dog"])?.expect("some word known");
    println!("v(cat and dog) = {pets:.4?}");
    Ok(())
}
