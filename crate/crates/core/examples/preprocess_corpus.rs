//! Ingest two aligned files and run the cleaning cascade.
//!
//! ```text
//! cargo run --example preprocess_corpus
//! ```

use std::fs;

use bitext_filter::corpus::{self, Corpus, Origin};

fn main() -> Result<(), bitext_filter::Error> {
    let dir = tempfile::tempdir().expect("temp dir");
    let en = dir.path().join("emea.en");
    let pl = dir.path().join("emea.pl");
    fs::write(
        &en,
        "Take one tablet every morning.\n\
         Take one tablet every morning.\n\
         Store below 25 °C.\n\
         Keep out of the reach of children.\n\
         Paracetamol 500 mg film-coated tablets\n\
         Do not use after the expiry date.\n",
    )
    .unwrap();
    fs::write(
        &pl,
        "Przyjmować jedną tabletkę rano.\n\
         Przyjmować jedną tabletkę rano.\n\
         Nie przechowywać w temp. powyżej 25 °C.\n\
         Przechowywać w miejscu niedostępnym dla dzieci.\n\
         Paracetamol 500 mg film-coated tablets\n\
         Не использовать после истечения срока.\n",
    )
    .unwrap();

    let mut corpus = Corpus::default();
    let added = corpus.ingest_parallel(&en, &pl, Origin::Emea)?;
    println!("ingested {added} pairs");

    let (clean, stats) = corpus::preprocess(&corpus);
    print!("{}", stats.to_report());
    for pair in clean.iter() {
        println!(
            "{}\t{} ||| {}",
            pair.pair_id, pair.source_text, pair.target_text
        );
    }

    let out = dir.path().join("preprocessed.tsv");
    corpus::write_tsv(&clean, &out)?;
    println!("{}", fs::read_to_string(out).unwrap());
    Ok(())
}
