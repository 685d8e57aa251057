//! Write and read `EMBF` sentence-embedding files and score from them.
//!
//! ```text
//! cargo run --example precomputed_embeddings
//! ```

use bitext_filter::corpus::{Corpus, Origin, SentencePair};
use bitext_filter::embed::{load_embedding_file, write_embedding_file};
use bitext_filter::filter::{score_pairs_precomputed, Method, MissingPolicy};

fn main() -> Result<(), bitext_filter::Error> {
    let dir = tempfile::tempdir().expect("temp dir");
    let src_path = dir.path().join("laser.src.embf");
    let tgt_path = dir.path().join("laser.tgt.embf");

    // Pair 2 has no vectors, as if the exporter skipped it.
    write_embedding_file(
        &src_path,
        4,
        [
            (0, [1.0, 0.0, 0.0, 0.0]),
            (1, [0.5, 0.5, 0.0, 0.0]),
            (3, [0.0, 0.0, 1.0, 1.0]),
        ],
    )?;
    write_embedding_file(
        &tgt_path,
        4,
        [
            (0, [0.9, 0.1, 0.0, 0.0]),
            (1, [0.0, 0.0, 0.5, 0.5]),
            (3, [0.0, 0.1, 1.0, 0.9]),
        ],
    )?;

    let bytes = std::fs::read(&src_path).unwrap();
    println!(
        "{}: {} bytes, magic {:?}",
        src_path.display(),
        bytes.len(),
        std::str::from_utf8(&bytes[..4]).unwrap()
    );

    let src = load_embedding_file(&src_path)?;
    let tgt = load_embedding_file(&tgt_path)?;
    println!(
        "loaded {} source / {} target vectors of dim {}",
        src.len(),
        tgt.len(),
        src.dim()
    );

    let corpus = Corpus::new(
        (0..4)
            .map(|id| {
                SentencePair::new(
                    id,
                    format!("source {id}"),
                    format!("target {id}"),
                    Origin::Emea,
                )
            })
            .collect(),
        "example",
    )?;

    match score_pairs_precomputed(
        corpus.clone(),
        &src,
        &tgt,
        Method::Laser,
        MissingPolicy::Strict,
    ) {
        Ok(_) => println!("strict: all pairs covered"),
        Err(e) => println!("strict: {}", e.diagnostic()),
    }

    let scored =
        score_pairs_precomputed(corpus, &src, &tgt, Method::Laser, MissingPolicy::Permissive)?;
    let mut out = Vec::new();
    scored.write_scores_to(&mut out).unwrap();
    print!("{}", String::from_utf8(out).unwrap());
    println!("uncovered: {:?}", scored.uncovered());
    Ok(())
}
