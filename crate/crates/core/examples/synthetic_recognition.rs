//! Recognition accuracy on a noun-corrupted synthetic corpus, naive argmax
//! against re-ranking.
//!
//! `cargo run --release --example synthetic_recognition -- [distractor_mass]`

use lta::metrics::recognition_accuracy;
use lta::recognition::{recognize_corpus, RecognitionMode};
use lta::synthgen::{generate_corpus, SynthConfig};
use lta::CooccurrenceMatrix;

fn main() -> lta::Result<()> {
    let eps: f64 = std::env::args()
        .nth(1)
        .map_or(0.4, |s| s.parse().expect("distractor mass"));
    let corpus = generate_corpus(&SynthConfig {
        distractor_mass: eps,
        ..SynthConfig::default()
    })?;
    let matrix = CooccurrenceMatrix::build(&corpus.train, &corpus.taxonomy, 0.0)?;
    println!(
        "{} test clips, {} segments, distractor mass {eps}",
        corpus.test.len(),
        corpus.distributions.len()
    );
    for (name, mode) in [("naive", RecognitionMode::Naive), ("rerank", RecognitionMode::Rerank)] {
        let rec = recognize_corpus(&corpus.distributions, &matrix, 5, mode)?;
        let acc = recognition_accuracy(&corpus.test, &rec)?;
        println!(
            "{name:<7} verb {:6.2}  noun {:6.2}  action {:6.2}",
            acc.verb, acc.noun, acc.action
        );
    }
    Ok(())
}
