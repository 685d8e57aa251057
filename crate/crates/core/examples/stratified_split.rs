//! Train/validation split that keeps each origin's share.
//!
//! ```text
//! cargo run --example stratified_split
//! ```

use bitext_filter::corpus::{Corpus, Origin, SentencePair};
use bitext_filter::filter::{stratified_split, stratum_seed, SplitSpec};

fn main() -> Result<(), bitext_filter::Error> {
    let mut pairs = Vec::new();
    for (origin, n) in [
        (Origin::Ecdc, 100),
        (Origin::Emea, 200),
        (Origin::Subtitles, 700),
    ] {
        for _ in 0..n {
            let id = pairs.len() as u64;
            pairs.push(SentencePair::new(
                id,
                format!("source {id}"),
                format!("target {id}"),
                origin,
            ));
        }
    }
    let corpus = Corpus::new(pairs, "strata")?;

    let spec = SplitSpec::new(0.8, 42)?;
    let (train, valid) = stratified_split(&corpus, spec);
    for origin in [Origin::Ecdc, Origin::Emea, Origin::Subtitles] {
        let t = train.iter().filter(|p| p.origin == origin).count();
        let v = valid.iter().filter(|p| p.origin == origin).count();
        println!(
            "{origin:<10} train {t:>4}  valid {v:>4}  stream seed {:#018x}",
            stratum_seed(spec.seed(), origin)
        );
    }
    println!(
        "first validation ids: {:?}",
        valid.ids().take(8).collect::<Vec<_>>()
    );
    Ok(())
}
