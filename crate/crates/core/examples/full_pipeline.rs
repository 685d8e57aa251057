//! Every stage of the command line, driven from a config, on a small
//! generated corpus: preprocess, score, filter, sample, split, report.
//!
//! ```text
//! cargo run --example full_pipeline
//! ```
//!
//! The equivalent shell session:
//!
//! ```text
//! bitext-filter preprocess --config run.conf
//! bitext-filter score      --config run.conf
//! bitext-filter filter     --config run.conf
//! bitext-filter sample     --config run.conf
//! bitext-filter split      --config run.conf --corpus out/filtered_muse_60.tsv
//! bitext-filter report     --config run.conf
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bitext_filter::cli::{execute, parse_config_text, Command, PipelineConfig};
use bitext_filter::rng::SplitMix64;

const VOCAB: usize = 50;

fn generate(dir: &Path) {
    let mut rng = SplitMix64::new(3);
    let mut src = String::new();
    let mut tgt = String::new();
    for _ in 0..400 {
        let len = 4 + rng.below(5) as usize;
        let words: Vec<u64> = (0..len).map(|_| rng.below(VOCAB as u64)).collect();
        let noisy = rng.below(4) == 0;
        let en: Vec<String> = words.iter().map(|w| format!("word{w}")).collect();
        let pl: Vec<String> = words
            .iter()
            .map(|w| format!("slowo{}", if noisy { rng.below(VOCAB as u64) } else { *w }))
            .collect();
        writeln!(src, "{}", en.join(" ")).unwrap();
        writeln!(tgt, "{}", pl.join(" ")).unwrap();
    }
    fs::write(dir.join("subs.en"), src).unwrap();
    fs::write(dir.join("subs.pl"), tgt).unwrap();

    let dim = 8;
    let mut en = format!("{VOCAB} {dim}\n");
    let mut pl = format!("{VOCAB} {dim}\n");
    for w in 0..VOCAB {
        let v: Vec<f64> = (0..dim)
            .map(|_| (rng.next_u64() % 2000) as f64 / 1000.0 - 1.0)
            .collect();
        en.push_str(&format!("word{w}"));
        pl.push_str(&format!("slowo{w}"));
        for x in v {
            en.push_str(&format!(" {x:.4}"));
            pl.push_str(&format!(" {:.4}", x + 0.1));
        }
        en.push('\n');
        pl.push('\n');
    }
    fs::write(dir.join("vectors.en.vec"), en).unwrap();
    fs::write(dir.join("vectors.pl.vec"), pl).unwrap();
}

fn main() -> Result<(), bitext_filter::Error> {
    let dir = tempfile::tempdir().expect("temp dir");
    let d = dir.path();
    generate(d);

    let conf = format!(
        "# inputs\n\
         input.subtitles.source = {d}/subs.en\n\
         input.subtitles.target = {d}/subs.pl\n\
         source_table = {d}/vectors.en.vec\n\
         target_table = {d}/vectors.pl.vec\n\
         \n\
         fractions = 0.2, 0.6\n\
         seeds = 1, 2, 3\n\
         train_fraction = 0.9\n\
         split_seed = 7\n\
         output_dir = {d}/out\n",
        d = d.display()
    );
    let pairs = parse_config_text(&conf)?;
    let cfg = PipelineConfig::from_pairs(pairs.clone())?;

    let stages = [
        Command::Preprocess { input: vec![] },
        Command::Score {
            corpus: None,
            method: None,
        },
        Command::Filter {
            corpus: None,
            scores: None,
            fractions: None,
        },
        Command::Sample {
            corpus: None,
            fractions: None,
            seeds: None,
        },
    ];
    for stage in &stages {
        println!("== {}", stage.name());
        print!("{}", execute(stage, &cfg)?.stdout);
    }

    println!("== split");
    let mut split_pairs = pairs;
    split_pairs.push((
        "corpus".into(),
        d.join("out/filtered_muse_60.tsv").display().to_string(),
    ));
    print!(
        "{}",
        execute(
            &Command::Split {
                corpus: None,
                train_fraction: None,
                seed: None
            },
            &PipelineConfig::from_pairs(split_pairs)?
        )?
        .stdout
    );

    println!("== report");
    print!("{}", execute(&Command::Report, &cfg)?.stdout);
    Ok(())
}
