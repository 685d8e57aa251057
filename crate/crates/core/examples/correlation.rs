//! Compare two scoring methods: Pearson correlation over shared pairs and
//! a histogram of each score distribution.
//!
//! ```text
//! cargo run --example correlation
//! ```

use std::collections::{BTreeMap, HashMap};

use bitext_filter::corpus::{Corpus, Origin, SentencePair};
use bitext_filter::eval::{correlate, score_histogram};
use bitext_filter::filter::{Method, ScoredCorpus};
use bitext_filter::rng::SplitMix64;

fn main() -> Result<(), bitext_filter::Error> {
    let n = 500u64;
    let mut rng = SplitMix64::new(7);
    let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;

    // Two noisy views of one latent quality score.
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    for id in 0..n {
        let q = unit();
        a.insert(id, (0.2 + 0.6 * q + 0.2 * (unit() - 0.5)).clamp(-1.0, 1.0));
        if id % 10 != 0 {
            b.insert(id, (0.5 + 0.4 * q + 0.3 * (unit() - 0.5)).clamp(-1.0, 1.0));
        }
    }
    print!("{}", correlate(&a, Method::Laser, &b, Method::Labse)?);

    let corpus = Corpus::new(
        (0..n)
            .map(|id| SentencePair::new(id, "s", "t", Origin::Other))
            .collect(),
        "synthetic",
    )?;
    for (method, scores) in [(Method::Laser, &a), (Method::Labse, &b)] {
        let map: HashMap<u64, f64> = scores.iter().map(|(k, v)| (*k, *v)).collect();
        let scored = ScoredCorpus::from_scores(corpus.clone(), method, &map)?;
        let h = score_histogram(&scored, 10)?;
        println!(
            "{method:<6} {:?} ({} uncovered)",
            h.counts,
            scored.uncovered().len()
        );
    }
    Ok(())
}
