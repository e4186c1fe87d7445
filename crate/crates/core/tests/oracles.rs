mod common;

use common::{oracle_for, osa_brute, osa_memo, random_instance};
use lta::metrics::{clip_ed, damerau_levenshtein, normalized_ed};
use lta::recognition::{recognize_clip, rerank, top_k, RecognitionMode};
use lta::{Action, PredictionSet, SegmentDistribution};
use proptest::prelude::*;

fn seq(max_len: usize, alphabet: u8) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0..alphabet, 0..=max_len)
}

fn actions(z: usize) -> impl Strategy<Value = Vec<Action>> {
    prop::collection::vec((0..3usize, 0..3usize).prop_map(|(v, n)| Action::new(v, n)), z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn dp_matches_script_search(a in seq(7, 3), b in seq(7, 3)) {
        prop_assert_eq!(damerau_levenshtein(&a, &b), osa_brute(&a, &b));
    }

    #[test]
    fn memo_search_matches_unmemoized(a in seq(6, 4), b in seq(6, 4)) {
        prop_assert_eq!(osa_memo(&a, &b), osa_brute(&a, &b));
    }

    #[test]
    fn rerank_matches_enumeration(seed in any::<u64>(), k in 1usize..=8) {
        let (dist, matrix) = random_instance(seed, 12);
        let got = rerank(&dist, &matrix, k).unwrap();
        let want = oracle_for(&dist, &matrix, k);
        let got_c: Vec<_> = got.candidates.iter().map(|c| (c.action, c.score, c.branch)).collect();
        prop_assert_eq!(got_c, want.candidates);
        prop_assert_eq!(got.chosen, want.chosen);
        prop_assert_eq!(got.degenerate, want.degenerate);
    }

    #[test]
    fn top_k_matches_full_sort(probs in prop::collection::vec(prop_oneof![Just(0.0), Just(0.25), 0.0..1.0f64], 1..15), k in 1usize..15) {
        let k = k.min(probs.len());
        let mut all: Vec<(usize, f64)> = probs.iter().copied().enumerate().collect();
        all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        all.truncate(k);
        prop_assert_eq!(top_k(&probs, k).unwrap(), all);
    }

    #[test]
    fn clip_ed_matches_candidate_loop(cands in prop::collection::vec(actions(20), 1..=5), gt in actions(20)) {
        let set = PredictionSet { clip_id: "c".into(), candidates: cands.clone() };
        let got = clip_ed(&set, &gt).unwrap();
        let z = gt.len() as f64;
        let best = |f: &dyn Fn(&Action) -> usize| {
            let g: Vec<usize> = gt.iter().map(f).collect();
            cands.iter()
                .map(|c| osa_memo(&c.iter().map(f).collect::<Vec<_>>(), &g) as f64 / z)
                .fold(f64::INFINITY, f64::min)
        };
        prop_assert_eq!(got.ed.verb, best(&|a| a.verb));
        prop_assert_eq!(got.ed.noun, best(&|a| a.noun));
        prop_assert_eq!(got.ed.action, best(&|a| a.verb * 3 + a.noun));
    }

    #[test]
    fn normalized_ed_is_bounded_and_symmetric(a in actions(12), b in actions(12)) {
        let d = normalized_ed(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(d, normalized_ed(&b, &a).unwrap());
        prop_assert_eq!(normalized_ed(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn clip_recognition_ignores_segment_order(seed in any::<u64>(), perm_seed in any::<u64>()) {
        let (base, matrix) = random_instance(seed, 6);
        let segs: Vec<SegmentDistribution> = (0..5)
            .map(|i| SegmentDistribution {
                segment_index: i,
                verb_probs: base.verb_probs.iter().cycle().skip(i).take(base.verb_probs.len()).copied().collect(),
                ..base.clone()
            })
            .collect();
        let mut shuffled: Vec<&SegmentDistribution> = segs.iter().collect();
        shuffled.rotate_left((perm_seed % 5) as usize);
        let ordered: Vec<&SegmentDistribution> = segs.iter().collect();
        prop_assert_eq!(
            recognize_clip(&shuffled, &matrix, 5, RecognitionMode::Rerank).unwrap(),
            recognize_clip(&ordered, &matrix, 5, RecognitionMode::Rerank).unwrap()
        );
    }
}

#[test]
fn corpus_means_ignore_clip_order() {
    use lta::metrics::corpus_eval;
    use lta::ClipRecord;
    use rand::seq::SliceRandom;
    use rand::Rng;

    let mut r = common::rng(99);
    let seq = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<Action> {
        (0..20)
            .map(|_| Action::new(r.random_range(0..3), r.random_range(0..3)))
            .collect()
    };
    let mut gt = Vec::new();
    let mut preds = Vec::new();
    for i in 0..50 {
        let id = format!("c{i}");
        gt.push(ClipRecord {
            clip_id: id.clone(),
            observed: seq(&mut r),
            future: Some(seq(&mut r)),
        });
        preds.push(PredictionSet {
            clip_id: id,
            candidates: (0..3).map(|_| seq(&mut r)).collect(),
        });
    }
    let base = corpus_eval(&preds, &gt, None).unwrap();
    for _ in 0..10 {
        gt.shuffle(&mut r);
        preds.shuffle(&mut r);
        let other = corpus_eval(&preds, &gt, None).unwrap();
        for (a, b) in [
            (base.verb_ed, other.verb_ed),
            (base.noun_ed, other.noun_ed),
            (base.action_ed, other.action_ed),
        ] {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }
}
