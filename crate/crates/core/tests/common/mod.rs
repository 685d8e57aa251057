#![allow(dead_code)]

use std::path::PathBuf;

use serde_json::Value;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn bleu_fixtures() -> Value {
    let text = std::fs::read_to_string(fixture_path("bleu_fixtures.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

pub fn u64s(v: &Value) -> Vec<u64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|n| n.as_u64().unwrap())
        .collect()
}

use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

use bitext_filter::corpus::{Corpus, Origin, SentencePair};
use bitext_filter::embed::write_embedding_file;
use bitext_filter::rng::SplitMix64;

pub const VOCAB: usize = 300;

fn unit(rng: &mut SplitMix64) -> f32 {
    ((rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0) as f32
}

/// `n` pairs over a synthetic vocabulary: source words `enK`, target words
/// `plK`, with about one pair in ten using an out-of-vocabulary word only.
pub fn synthetic_corpus(n: usize, seed: u64) -> Corpus {
    let mut rng = SplitMix64::new(seed);
    let origins = [
        Origin::Ecdc,
        Origin::Emea,
        Origin::Emea,
        Origin::Subtitles,
        Origin::Subtitles,
        Origin::Subtitles,
    ];
    let pairs = (0..n as u64)
        .map(|id| {
            let len = 3 + rng.below(6) as usize;
            let (src, tgt): (Vec<String>, Vec<String>) = if rng.below(10) == 0 {
                (0..len)
                    .map(|i| (format!("oov{id}x{i}"), format!("brak{id}x{i}")))
                    .unzip()
            } else {
                (0..len)
                    .map(|_| {
                        let k = rng.below(VOCAB as u64);
                        let noise = rng.below(VOCAB as u64);
                        let t = if rng.below(3) == 0 { noise } else { k };
                        (format!("en{k}"), format!("pl{t}"))
                    })
                    .unzip()
            };
            let origin = origins[rng.below(origins.len() as u64) as usize];
            SentencePair::new(id, src.join(" "), tgt.join(" "), origin)
        })
        .collect();
    Corpus::new(pairs, "synthetic").unwrap()
}

/// Word-vector text files `wiki.en.vec` / `wiki.pl.vec` whose target
/// vectors are noisy copies of the source ones.
pub fn write_word_tables(dir: &Path, dim: usize, seed: u64) -> (PathBuf, PathBuf) {
    let mut rng = SplitMix64::new(seed);
    let mut en = format!("{VOCAB} {dim}\n");
    let mut pl = format!("{VOCAB} {dim}\n");
    for k in 0..VOCAB {
        let v: Vec<f32> = (0..dim).map(|_| unit(&mut rng)).collect();
        let _ = write!(en, "en{k}");
        let _ = write!(pl, "pl{k}");
        for x in &v {
            let _ = write!(en, " {x:.6}");
            let _ = write!(pl, " {:.6}", x + 0.3 * unit(&mut rng));
        }
        en.push('\n');
        pl.push('\n');
    }
    let (a, b) = (dir.join("wiki.en.vec"), dir.join("wiki.pl.vec"));
    std::fs::write(&a, en).unwrap();
    std::fs::write(&b, pl).unwrap();
    (a, b)
}

/// EMBF files holding one random vector per pair id, target = source + noise.
pub fn write_embf_pair(dir: &Path, ids: &[u64], dim: usize, seed: u64) -> (PathBuf, PathBuf) {
    let mut rng = SplitMix64::new(seed);
    let mut src = Vec::new();
    let mut tgt = Vec::new();
    for &id in ids {
        let v: Vec<f32> = (0..dim).map(|_| unit(&mut rng)).collect();
        let w: Vec<f32> = v.iter().map(|x| x + 0.5 * unit(&mut rng)).collect();
        src.push((id, v));
        tgt.push((id, w));
    }
    let (a, b) = (dir.join("laser.src.embf"), dir.join("laser.tgt.embf"));
    write_embedding_file(&a, dim, src).unwrap();
    write_embedding_file(&b, dim, tgt).unwrap();
    (a, b)
}

pub fn run_cli<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_bitext-filter"))
        .args(args)
        .output()
        .unwrap()
}

pub fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
