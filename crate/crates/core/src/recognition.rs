//! Co-occurrence re-ranking of per-segment verb and noun distributions.
//!
//! Two branches each contribute `k` candidate pairs:
//!
//! * verb-anchored: for each of the top-`k` verbs `v`, every noun is rescored
//!   as `noun_probs[n] * P(n | v)`; the `k` best nouns give pairs scored
//!   `verb_probs[v] * (noun_probs[n] * P(n | v))`, and the `k` best of those
//!   `k²` pairs are kept.
//! * noun-anchored: the mirror image using `P(v | n)`.
//!
//! The union (at most `2k` pairs, duplicates across branches kept) is sorted
//! by score descending, then verb index, then noun index, and the first entry
//! is the recognized action. If every candidate scores zero the independent
//! argmax pair is used instead and the result is flagged `degenerate`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cooccurrence::CooccurrenceMatrix;
use crate::dataset_io::SegmentDistribution;
use crate::error::{Error, Result};
use crate::taxonomy::Action;

/// Anchors per branch.
pub const DEFAULT_TOP_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    VerbAnchored,
    NounAnchored,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidatePair {
    pub action: Action,
    pub score: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionResult {
    pub clip_id: String,
    pub segment_index: usize,
    pub chosen: Action,
    /// Sorted by score descending, then verb, noun and branch ascending.
    pub candidates: Vec<CandidatePair>,
    pub naive: Action,
    /// Every candidate scored zero and `chosen` fell back to `naive`.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecognitionMode {
    #[default]
    Rerank,
    /// Independent argmax of each distribution; no co-occurrence.
    Naive,
}

/// Descending by value, ascending by index on ties.
fn rank_order(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

pub fn candidate_order(a: &CandidatePair, b: &CandidatePair) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.action.verb.cmp(&b.action.verb))
        .then(a.action.noun.cmp(&b.action.noun))
        .then(a.branch.cmp(&b.branch))
}

/// The `k` largest entries in descending order, ties broken by lower index.
pub fn top_k(probs: &[f64], k: usize) -> Result<Vec<(usize, f64)>> {
    if k == 0 {
        return Err(Error::invalid("top-k requires k >= 1"));
    }
    if k > probs.len() {
        return Err(Error::invalid(format!(
            "top-k with k = {k} exceeds vector length {}",
            probs.len()
        )));
    }
    let mut ranked: Vec<(usize, f64)> = probs.iter().copied().enumerate().collect();
    if k < ranked.len() {
        ranked.select_nth_unstable_by(k - 1, rank_order);
        ranked.truncate(k);
    }
    ranked.sort_unstable_by(rank_order);
    Ok(ranked)
}

pub fn argmax(probs: &[f64]) -> usize {
    probs
        .iter()
        .copied()
        .enumerate()
        .min_by(rank_order)
        .map(|(i, _)| i)
        .unwrap_or(0)
}

fn check_shape(dist: &SegmentDistribution, matrix: &CooccurrenceMatrix) -> Result<()> {
    if dist.verb_probs.len() != matrix.num_verbs() {
        return Err(Error::Dimension {
            what: format!("verb_probs of clip `{}` segment {}", dist.clip_id, dist.segment_index),
            expected: matrix.num_verbs(),
            actual: dist.verb_probs.len(),
        });
    }
    if dist.noun_probs.len() != matrix.num_nouns() {
        return Err(Error::Dimension {
            what: format!("noun_probs of clip `{}` segment {}", dist.clip_id, dist.segment_index),
            expected: matrix.num_nouns(),
            actual: dist.noun_probs.len(),
        });
    }
    Ok(())
}

fn naive_pair(dist: &SegmentDistribution) -> Action {
    Action::new(argmax(&dist.verb_probs), argmax(&dist.noun_probs))
}

/// One branch of the re-ranker. `anchor_probs`/`partner_probs` are the
/// distributions of the anchor and partner vocabularies, `conditional(a, p)`
/// yields `P(partner | anchor)`, and `pair(a, p)` assembles the action.
fn branch_candidates(
    anchor_probs: &[f64],
    partner_probs: &[f64],
    k: usize,
    branch: Branch,
    conditional: impl Fn(usize, usize) -> f64,
    pair: impl Fn(usize, usize) -> Action,
) -> Result<Vec<CandidatePair>> {
    let anchors = top_k(anchor_probs, k.min(anchor_probs.len()))?;
    let partners_per_anchor = k.min(partner_probs.len());
    let mut adjusted = vec![0.0; partner_probs.len()];
    let mut out = Vec::with_capacity(anchors.len() * partners_per_anchor);
    for (a, anchor_p) in anchors {
        for (p, slot) in adjusted.iter_mut().enumerate() {
            *slot = partner_probs[p] * conditional(a, p);
        }
        for (p, q) in top_k(&adjusted, partners_per_anchor)? {
            out.push(CandidatePair {
                action: pair(a, p),
                score: anchor_p * q,
                branch,
            });
        }
    }
    out.sort_unstable_by(candidate_order);
    out.truncate(k);
    Ok(out)
}

pub fn rerank(dist: &SegmentDistribution, matrix: &CooccurrenceMatrix, k: usize) -> Result<RecognitionResult> {
    if k == 0 {
        return Err(Error::invalid("rerank requires k >= 1"));
    }
    check_shape(dist, matrix)?;

    let mut candidates = branch_candidates(
        &dist.verb_probs,
        &dist.noun_probs,
        k,
        Branch::VerbAnchored,
        |v, n| matrix.noun_given_verb(v, n),
        Action::new,
    )?;
    candidates.extend(branch_candidates(
        &dist.noun_probs,
        &dist.verb_probs,
        k,
        Branch::NounAnchored,
        |n, v| matrix.verb_given_noun(v, n),
        |n, v| Action::new(v, n),
    )?);
    candidates.sort_unstable_by(candidate_order);

    let naive = naive_pair(dist);
    let degenerate = candidates.iter().all(|c| c.score == 0.0);
    let chosen = if degenerate { naive } else { candidates[0].action };
    Ok(RecognitionResult {
        clip_id: dist.clip_id.clone(),
        segment_index: dist.segment_index,
        chosen,
        candidates,
        naive,
        degenerate,
    })
}

/// Independent argmax recognition, formatted like a rerank result.
pub fn recognize_naive(dist: &SegmentDistribution) -> RecognitionResult {
    let naive = naive_pair(dist);
    RecognitionResult {
        clip_id: dist.clip_id.clone(),
        segment_index: dist.segment_index,
        chosen: naive,
        candidates: Vec::new(),
        naive,
        degenerate: false,
    }
}

fn order_segments<'a>(segments: &[&'a SegmentDistribution]) -> Result<Vec<&'a SegmentDistribution>> {
    let mut ordered = segments.to_vec();
    ordered.sort_by_key(|d| d.segment_index);
    for (expected, d) in ordered.iter().enumerate() {
        match d.segment_index.cmp(&expected) {
            Ordering::Equal => {}
            Ordering::Greater => {
                return Err(Error::invalid(format!(
                    "clip `{}` is missing segment {expected}",
                    d.clip_id
                )));
            }
            Ordering::Less => {
                return Err(Error::invalid(format!(
                    "clip `{}` has duplicate segment {}",
                    d.clip_id, d.segment_index
                )));
            }
        }
    }
    Ok(ordered)
}

/// Recognizes every segment of one clip, in segment order.
pub fn recognize_clip(
    segments: &[&SegmentDistribution],
    matrix: &CooccurrenceMatrix,
    k: usize,
    mode: RecognitionMode,
) -> Result<Vec<RecognitionResult>> {
    order_segments(segments)?
        .into_iter()
        .map(|d| match mode {
            RecognitionMode::Rerank => rerank(d, matrix, k),
            RecognitionMode::Naive => Ok(recognize_naive(d)),
        })
        .collect()
}

/// Groups distributions by clip (first-appearance order) and recognizes
/// each clip in parallel. Output order does not depend on scheduling.
pub fn recognize_corpus(
    dists: &[SegmentDistribution],
    matrix: &CooccurrenceMatrix,
    k: usize,
    mode: RecognitionMode,
) -> Result<Vec<RecognitionResult>> {
    let mut order: Vec<&str> = Vec::new();
    let mut by_clip: BTreeMap<&str, Vec<&SegmentDistribution>> = BTreeMap::new();
    for d in dists {
        let entry = by_clip.entry(d.clip_id.as_str()).or_default();
        if entry.is_empty() {
            order.push(d.clip_id.as_str());
        }
        entry.push(d);
    }
    let per_clip: Vec<Vec<RecognitionResult>> = order
        .par_iter()
        .map(|id| recognize_clip(&by_clip[id], matrix, k, mode))
        .collect::<Result<_>>()?;
    Ok(per_clip.into_iter().flatten().collect())
}
