//! Co-occurrence re-ranking resolving an ambiguous noun.
//!
//! `cargo run --example cooccurrence_rerank`

use lta::recognition::recognize_naive;
use lta::{rerank, ClipRecord, CooccurrenceMatrix, SegmentDistribution, Taxonomy};

fn main() -> lta::Result<()> {
    let tax = Taxonomy::new(["cut", "pour", "wash"], ["onion", "water", "cup"])?;
    let a = |s: &str| tax.parse_action(s).unwrap();

    // "cut" goes with onions, "pour" with water, "wash" with cups
    let train = vec![ClipRecord {
        clip_id: "train".into(),
        observed: vec![
            a("cut onion"),
            a("cut onion"),
            a("pour water"),
            a("wash cup"),
            a("pour water"),
        ],
        future: Some(vec![a("wash cup"), a("cut onion")]),
    }];
    let matrix = CooccurrenceMatrix::build(&train, &tax, 0.0)?;
    for v in 0..tax.num_verbs() {
        let row: Vec<String> = (0..tax.num_nouns())
            .map(|n| format!("{:.2}", matrix.noun_given_verb(v, n)))
            .collect();
        println!("P(noun | {:<4}) = [{}]", tax.verbs()[v], row.join(", "));
    }

    // the verb is clear, the noun classifier is confused
    let dist = SegmentDistribution {
        clip_id: "clip".into(),
        segment_index: 0,
        verb_probs: vec![0.8, 0.1, 0.1],
        noun_probs: vec![0.35, 0.45, 0.2],
    };
    let naive = recognize_naive(&dist);
    let reranked = rerank(&dist, &matrix, 2)?;
    println!("naive   : {}", tax.format_action(naive.chosen)?);
    println!("reranked: {}", tax.format_action(reranked.chosen)?);
    for c in &reranked.candidates {
        println!("  {:<12} {:.4} {:?}", tax.format_action(c.action)?, c.score, c.branch);
    }
    Ok(())
}
