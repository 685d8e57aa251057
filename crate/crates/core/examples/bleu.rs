//! Corpus BLEU with the 13a tokenizer and exponential smoothing.
//!
//! ```text
//! cargo run --example bleu -- hyp.txt ref.txt
//! ```
//!
//! Without arguments a few built-in Polish segments are scored.

use bitext_filter::eval::{corpus_bleu, tokenize_13a, BleuStats};

fn lines(path: &str) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{path}: {e}"))
        .lines()
        .map(str::to_string)
        .collect()
}

fn main() -> Result<(), bitext_filter::Error> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (hyps, refs) = match args.as_slice() {
        [h, r] => (lines(h), lines(r)),
        _ => (
            vec![
                "Przyjmować jedną tabletkę dziennie, najlepiej rano.".to_string(),
                "Szczepionka jest bezpieczna dla dzieci.".to_string(),
                "Nie stosować po upływie terminu ważności.".to_string(),
            ],
            vec![
                "Przyjmować jedną tabletkę na dobę, najlepiej rano.".to_string(),
                "Szczepionka jest bezpieczna dla dzieci.".to_string(),
                "Nie stosować tego leku po upływie terminu ważności.".to_string(),
            ],
        ),
    };

    println!("13a tokens: {:?}", tokenize_13a(&hyps[0]));
    let first = BleuStats::segment(&hyps[0], &refs[0]);
    println!("segment 0 matches {:?} of {:?}", first.correct, first.total);
    println!("{}", corpus_bleu(&hyps, &refs)?);
    Ok(())
}
