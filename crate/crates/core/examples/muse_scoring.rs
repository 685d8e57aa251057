//! Score pairs with mean-pooled cross-lingual word vectors.
//!
//! Pass two word-vector text files (`<count> <dim>` header, then
//! `word v1 .. vd` per line) and a corpus TSV to score real data:
//!
//! ```text
//! cargo run --example muse_scoring -- wiki.multi.en.vec wiki.multi.pl.vec corpus.tsv
//! ```
//!
//! Without arguments a toy dictionary is used.

use bitext_filter::corpus::{read_tsv, Corpus, Origin, SentencePair};
use bitext_filter::embed::{embed_sentence_mean, load_word_table, tokenize, WordEmbeddingTable};
use bitext_filter::filter::score_pairs_muse;
use std::path::Path;

fn toy() -> (WordEmbeddingTable, WordEmbeddingTable, Corpus) {
    let mut en = WordEmbeddingTable::new("en", 3);
    let mut pl = WordEmbeddingTable::new("pl", 3);
    for (e, p, v) in [
        ("vaccine", "szczepionka", [0.9, 0.1, 0.0]),
        ("safe", "bezpieczna", [0.1, 0.8, 0.2]),
        ("children", "dzieci", [0.0, 0.3, 0.9]),
        ("the", "ta", [0.3, 0.3, 0.3]),
    ] {
        en.insert(e, &v).unwrap();
        pl.insert(p, &[v[0] + 0.05, v[1] - 0.05, v[2]]).unwrap();
    }
    let pairs = vec![
        SentencePair::new(
            0,
            "The vaccine is safe.",
            "Szczepionka jest bezpieczna.",
            Origin::Ecdc,
        ),
        SentencePair::new(1, "The vaccine is safe.", "Dzieci!", Origin::Ecdc),
        SentencePair::new(2, "Nothing known here", "Nic", Origin::Ecdc),
    ];
    (en, pl, Corpus::new(pairs, "toy").unwrap())
}

fn main() -> Result<(), bitext_filter::Error> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (en, pl, corpus) = match args.as_slice() {
        [src, tgt, tsv] => (
            load_word_table(Path::new(src))?,
            load_word_table(Path::new(tgt))?,
            read_tsv(Path::new(tsv))?,
        ),
        _ => toy(),
    };
    println!(
        "tables: {} ({} words), {} ({} words), dim {}",
        en.language(),
        en.len(),
        pl.language(),
        pl.len(),
        en.dim()
    );

    let first = &corpus.pairs()[0];
    let tokens = tokenize(&first.source_text);
    println!("tokens of pair {}: {:?}", first.pair_id, tokens);
    if let Some(v) = embed_sentence_mean(&tokens, &en) {
        println!("mean vector: {:?}", v.as_slice());
    }

    let scored = score_pairs_muse(corpus, &en, &pl)?;
    for s in scored.scores() {
        println!("pair {}: {:.6}", s.pair_id, s.score);
    }
    println!("uncovered: {:?}", scored.uncovered());
    Ok(())
}
