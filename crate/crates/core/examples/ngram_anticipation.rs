//! n-gram anticipation against the repeat-last baseline, greedy and sampled.
//!
//! `cargo run --release --example ngram_anticipation`

use lta::anticipation::{predict_corpus, DecodeMode, NgramModel, PredictConfig, Predictor, RepeatLast};
use lta::metrics::corpus_eval;
use lta::synthgen::{generate_corpus, SynthConfig};

fn main() -> lta::Result<()> {
    let corpus = generate_corpus(&SynthConfig {
        transition_noise: 0.1,
        seed: 1,
        ..SynthConfig::default()
    })?;
    let histories: Vec<_> = corpus
        .test
        .iter()
        .map(|c| (c.clip_id.clone(), c.observed.clone()))
        .collect();

    let model = NgramModel::fit(&corpus.train, &corpus.taxonomy, 2, 0.01)?;
    let tax = &corpus.taxonomy;
    let ctx = &histories[0].1;
    let probs = model.distribution(&ctx[ctx.len() - 2..]);
    let best = (0..probs.len()).max_by(|&a, &b| probs[a].total_cmp(&probs[b])).unwrap();
    println!(
        "after `{}`: most likely next is `{}` (p = {:.3})",
        lta::anticipation::format_actions(&ctx[ctx.len() - 2..], tax)?,
        tax.format_action(tax.action_from_id(best))?,
        probs[best]
    );

    let runs: [(&str, &dyn Predictor, DecodeMode, usize); 4] = [
        ("repeat-last", &RepeatLast, DecodeMode::Greedy, 1),
        ("ngram K=1", &model, DecodeMode::Greedy, 1),
        ("ngram K=5", &model, DecodeMode::Greedy, 5),
        ("ngram sampled K=5", &model, DecodeMode::Sample, 5),
    ];
    for (name, predictor, mode, k) in runs {
        let config = PredictConfig {
            num_candidates: k,
            mode,
            seed: 7,
            ..PredictConfig::default()
        };
        let preds = predict_corpus(predictor, &histories, &config)?;
        let ev = corpus_eval(&preds, &corpus.test, None)?;
        println!(
            "{name:<18} ED verb {:.4} noun {:.4} action {:.4}",
            ev.verb_ed, ev.noun_ed, ev.action_ed
        );
    }
    Ok(())
}
