//! Restricted Damerau-Levenshtein distance and min-over-K clip scoring.
//!
//! `cargo run --example edit_distance`

use lta::metrics::{clip_ed, damerau_levenshtein, normalized_ed};
use lta::{PredictionSet, Taxonomy};

fn main() -> lta::Result<()> {
    // adjacent swap costs 1; OSA forbids editing a transposed pair again
    println!("ab -> ba : {}", damerau_levenshtein(b"ab", b"ba"));
    println!("CA -> ABC: {}", damerau_levenshtein(b"CA", b"ABC"));

    let tax = Taxonomy::new(["take", "cut", "put"], ["knife", "onion", "board"])?;
    let seq = |s: &str| -> lta::Result<Vec<_>> { s.split(", ").map(|a| tax.parse_action(a)).collect() };

    let gt = seq("take knife, cut onion, put knife, take board")?;
    let set = PredictionSet {
        clip_id: "demo".into(),
        candidates: vec![
            seq("take knife, put knife, cut onion, take board")?,
            seq("take board, cut board, put knife, take board")?,
        ],
    };
    for (k, c) in set.candidates.iter().enumerate() {
        println!("candidate {k}: action ED {:.4}", normalized_ed(c, &gt)?);
    }

    let eval = clip_ed(&set, &gt)?;
    println!(
        "clip ED  verb {:.4} (cand {})  noun {:.4} (cand {})  action {:.4} (cand {})",
        eval.ed.verb, eval.best.verb, eval.ed.noun, eval.best.noun, eval.ed.action, eval.best.action
    );
    Ok(())
}
