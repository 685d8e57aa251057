//! Keep the top-scoring fraction and draw seeded random baselines of the
//! same size.
//!
//! ```text
//! cargo run --example retention_and_sampling
//! ```

use std::collections::HashMap;

use bitext_filter::corpus::{Corpus, Origin, SentencePair};
use bitext_filter::filter::{
    random_subset, retain_top_fraction, Method, RetentionSpec, ScoredCorpus,
};

fn ids(c: &Corpus) -> Vec<u64> {
    c.ids().collect()
}

fn main() -> Result<(), bitext_filter::Error> {
    let corpus = Corpus::new(
        (0..10)
            .map(|id| {
                SentencePair::new(
                    id,
                    format!("source {id}"),
                    format!("target {id}"),
                    Origin::Subtitles,
                )
            })
            .collect(),
        "example",
    )?;
    // Pairs 3 and 6 tie; pair 9 has no score.
    let scores: HashMap<u64, f64> = [
        (0, 0.12),
        (1, 0.85),
        (2, 0.40),
        (3, 0.77),
        (4, -0.20),
        (5, 0.91),
        (6, 0.77),
        (7, 0.33),
        (8, 0.05),
    ]
    .into();
    let scored = ScoredCorpus::from_scores(corpus.clone(), Method::Labse, &scores)?;
    println!("ranking (positions): {:?}", scored.ranking());

    for f in [0.2, 0.4, 0.6] {
        let spec = RetentionSpec::new(f)?;
        println!(
            "top {:>3}% -> {} pairs {:?}",
            f * 100.0,
            spec.count(corpus.len()),
            ids(&retain_top_fraction(&scored, spec))
        );
    }
    for seed in [1, 2, 3] {
        let spec = RetentionSpec::new(0.2)?;
        println!(
            "random 20% seed {seed} -> {:?}",
            ids(&random_subset(&corpus, spec, seed))
        );
    }

    match RetentionSpec::new(0.0) {
        Ok(_) => unreachable!(),
        Err(e) => println!("{}", e.diagnostic()),
    }
    Ok(())
}
