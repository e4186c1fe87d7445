//! Reference implementations shared by the integration suites.
//!
//! Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use std::collections::HashMap;

use lta::cooccurrence::CooccurrenceMatrix;
use lta::recognition::Branch;
use lta::{Action, SegmentDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Exhaustive search over every restricted edit script, front to back, with
/// no memoization. Each step consumes a prefix of `a` and/or `b` by one of:
/// delete, insert, match/substitute, or swap an adjacent pair.
pub fn osa_brute<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut best = 1 + osa_brute(&a[1..], b);
    best = best.min(1 + osa_brute(a, &b[1..]));
    best = best.min(usize::from(a[0] != b[0]) + osa_brute(&a[1..], &b[1..]));
    if a.len() >= 2 && b.len() >= 2 && a[0] == b[1] && a[1] == b[0] {
        best = best.min(1 + osa_brute(&a[2..], &b[2..]));
    }
    best
}

/// The same front-to-back script search as [`osa_brute`], memoized on the
/// remaining suffix lengths so that it stays usable for `Z = 20`.
pub fn osa_memo<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    fn go<T: PartialEq>(a: &[T], b: &[T], memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if a.is_empty() {
            return b.len();
        }
        if b.is_empty() {
            return a.len();
        }
        if let Some(&d) = memo.get(&(a.len(), b.len())) {
            return d;
        }
        let mut best = 1 + go(&a[1..], b, memo);
        best = best.min(1 + go(a, &b[1..], memo));
        best = best.min(usize::from(a[0] != b[0]) + go(&a[1..], &b[1..], memo));
        if a.len() >= 2 && b.len() >= 2 && a[0] == b[1] && a[1] == b[0] {
            best = best.min(1 + go(&a[2..], &b[2..], memo));
        }
        memo.insert((a.len(), b.len()), best);
        best
    }
    go(a, b, &mut HashMap::new())
}

/// Position of entry `i` when `xs` is ordered by value descending, index
/// ascending; computed by counting entries that precede it.
fn rank(xs: &[f64], i: usize) -> usize {
    (0..xs.len())
        .filter(|&j| xs[j] > xs[i] || (xs[j] == xs[i] && j < i))
        .count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub chosen: Action,
    pub candidates: Vec<(Action, f64, Branch)>,
    pub naive: Action,
    pub degenerate: bool,
}

fn sort_key(a: &(Action, f64, Branch), b: &(Action, f64, Branch)) -> std::cmp::Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap()
        .then(a.0.verb.cmp(&b.0.verb))
        .then(a.0.noun.cmp(&b.0.noun))
        .then(a.2.cmp(&b.2))
}

/// Enumerates every (verb, noun) pair and admits it to a branch when its
/// anchor ranks in the top `k` and its partner ranks in the top `k` of the
/// co-occurrence-adjusted partner scores.
pub fn rerank_oracle(
    verb_probs: &[f64],
    noun_probs: &[f64],
    row: impl Fn(usize, usize) -> f64,
    col: impl Fn(usize, usize) -> f64,
    k: usize,
) -> OracleResult {
    let (nv, nn) = (verb_probs.len(), noun_probs.len());
    let (kv, kn) = (k.min(nv), k.min(nn));

    let mut verb_side = Vec::new();
    let mut noun_side = Vec::new();
    for v in 0..nv {
        for n in 0..nn {
            if rank(verb_probs, v) < kv {
                let q: Vec<f64> = (0..nn).map(|m| noun_probs[m] * row(v, m)).collect();
                if rank(&q, n) < kn {
                    verb_side.push((Action::new(v, n), verb_probs[v] * q[n], Branch::VerbAnchored));
                }
            }
            if rank(noun_probs, n) < kn {
                let r: Vec<f64> = (0..nv).map(|u| verb_probs[u] * col(u, n)).collect();
                if rank(&r, v) < kv {
                    noun_side.push((Action::new(v, n), noun_probs[n] * r[v], Branch::NounAnchored));
                }
            }
        }
    }
    verb_side.sort_by(sort_key);
    verb_side.truncate(k);
    noun_side.sort_by(sort_key);
    noun_side.truncate(k);
    let mut candidates = verb_side;
    candidates.extend(noun_side);
    candidates.sort_by(sort_key);

    let naive = Action::new(
        (0..nv).find(|&v| rank(verb_probs, v) == 0).unwrap(),
        (0..nn).find(|&n| rank(noun_probs, n) == 0).unwrap(),
    );
    let degenerate = candidates.iter().all(|c| c.1 == 0.0);
    let chosen = if degenerate { naive } else { candidates[0].0 };
    OracleResult {
        chosen,
        candidates,
        naive,
        degenerate,
    }
}

pub fn oracle_for(dist: &SegmentDistribution, m: &CooccurrenceMatrix, k: usize) -> OracleResult {
    rerank_oracle(
        &dist.verb_probs,
        &dist.noun_probs,
        |v, n| m.noun_given_verb(v, n),
        |v, n| m.verb_given_noun(v, n),
        k,
    )
}

/// Random probability vector. Coarse quantization and forced zeros make
/// exact ties common so tie-breaking is exercised.
pub fn random_probs(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let coarse = rng.random_bool(0.5);
    let mut raw: Vec<f64> = (0..len)
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else if coarse {
                rng.random_range(1..=4) as f64
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    if raw.iter().all(|&x| x == 0.0) {
        raw[rng.random_range(0..len)] = 1.0;
    }
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// Random sparse integer count matrix with optional smoothing.
pub fn random_matrix(rng: &mut ChaCha8Rng, nv: usize, nn: usize) -> CooccurrenceMatrix {
    let density = rng.random_range(0.2..1.0);
    let counts: Vec<f64> = (0..nv * nn)
        .map(|_| {
            if rng.random_bool(density) {
                rng.random_range(1..=6) as f64
            } else {
                0.0
            }
        })
        .collect();
    let alpha = if rng.random_bool(0.3) { 0.5 } else { 0.0 };
    CooccurrenceMatrix::from_counts(nv, nn, counts, alpha).unwrap()
}

pub fn random_instance(seed: u64, max_dim: usize) -> (SegmentDistribution, CooccurrenceMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = rng.random_range(1..=max_dim);
    let nn = rng.random_range(1..=max_dim);
    let dist = SegmentDistribution {
        clip_id: format!("case{seed}"),
        segment_index: 0,
        verb_probs: random_probs(&mut rng, nv),
        noun_probs: random_probs(&mut rng, nn),
    };
    (dist, random_matrix(&mut rng, nv, nn))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
