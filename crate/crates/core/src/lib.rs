//! Parallel-corpus filtering for machine-translation fine-tuning data.
//!
//! The pipeline, module by module:
//!
//! * [`corpus`]: ingest aligned text, then drop duplicates, untranslated
//!   pairs, pairs outside the 15..=200 character window and pairs with
//!   non-Latin letters.
//! * [`embed`]: sentence vectors, either mean-pooled from a cross-lingual
//!   word-vector dictionary or loaded from precomputed `EMBF` files, and
//!   cosine similarity.
//! * [`filter`]: score pairs, keep the best fraction, draw seeded random
//!   baselines, and split train/validation per origin.
//! * [`eval`]: SacreBLEU-compatible corpus BLEU, Pearson correlation and
//!   score histograms.
//! * [`cli`]: the `bitext-filter` command line and its config file.
//!
//! ```
//! use bitext_filter::corpus::{preprocess, Corpus, Origin, SentencePair};
//!
//! let corpus = Corpus::new(
//!     vec![
//!         SentencePair::new(0, "The vaccine is safe for adults.", "Szczepionka jest bezpieczna dla dorosłych.", Origin::Emea),
//!         SentencePair::new(1, "The vaccine is safe for adults.", "Szczepionka jest bezpieczna dla dorosłych.", Origin::Emea),
//!         SentencePair::new(2, "Too short", "Za krótko", Origin::Ecdc),
//!     ],
//!     "inline",
//! )?;
//! let (clean, stats) = preprocess(&corpus);
//! assert_eq!(clean.len(), 1);
//! assert_eq!(stats.removed_by_rule["dedup"], 1);
//! assert_eq!(stats.removed_by_rule["length"], 1);
//! # Ok::<(), bitext_filter::Error>(())
//! ```

pub mod cli;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod eval;
pub mod filter;
mod lines;
pub mod rng;

pub use error::{Error, Result};
