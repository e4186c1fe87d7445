//! Edit-distance evaluation of predicted futures and recognition accuracy.
//!
//! The distance is the optimal-string-alignment form of Damerau-Levenshtein:
//! unit-cost insertion, deletion, substitution and adjacent transposition,
//! with no substring edited more than once. It can exceed the unrestricted
//! distance, e.g. `CA -> ABC` costs 3 here and 2 unrestricted.
//!
//! Per clip, each of the verb, noun and action tracks takes the minimum
//! normalized distance over the candidates independently. Corpus numbers are
//! unweighted means over clips.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset_io::{write_atomic, ClipRecord, PredictionSet};
use crate::error::{Error, Result};
use crate::recognition::RecognitionResult;
use crate::taxonomy::Action;

pub fn damerau_levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (n, m) = (a.len(), b.len());
    if n == 0 {
        return m;
    }
    if m == 0 {
        return n;
    }
    // three rolling rows: i-2, i-1, i
    let mut prev2 = vec![0usize; m + 1];
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for i in 1..=n {
        cur[0] = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut d = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d = d.min(prev2[j - 2] + 1);
            }
            cur[j] = d;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Distance divided by the sequence length, clamped to `[0, 1]`.
pub fn normalized_ed<T: PartialEq>(pred: &[T], gt: &[T]) -> Result<f64> {
    if pred.len() != gt.len() {
        return Err(Error::Dimension {
            what: "predicted sequence".into(),
            expected: gt.len(),
            actual: pred.len(),
        });
    }
    if gt.is_empty() {
        return Ok(0.0);
    }
    Ok((damerau_levenshtein(pred, gt) as f64 / gt.len() as f64).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackScores {
    pub verb: f64,
    pub noun: f64,
    pub action: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestCandidates {
    pub verb: usize,
    pub noun: usize,
    pub action: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipEval {
    pub clip_id: String,
    pub ed: TrackScores,
    pub best: BestCandidates,
}

fn min_over<F>(candidates: &[Vec<Action>], gt: &[Action], project: F) -> Result<(f64, usize)>
where
    F: Fn(&Action) -> usize + Copy,
{
    let gt: Vec<usize> = gt.iter().map(project).collect();
    let mut best = (f64::INFINITY, 0);
    for (k, c) in candidates.iter().enumerate() {
        let c: Vec<usize> = c.iter().map(project).collect();
        let d = normalized_ed(&c, &gt)?;
        if d < best.0 {
            best = (d, k);
        }
    }
    Ok(best)
}

/// Minimum normalized distance per track over all candidates; the lowest
/// candidate index wins ties.
pub fn clip_ed(predictions: &PredictionSet, gt: &[Action]) -> Result<ClipEval> {
    if predictions.candidates.is_empty() {
        return Err(Error::invalid(format!(
            "clip `{}` has no candidates",
            predictions.clip_id
        )));
    }
    let cands = &predictions.candidates;
    let (verb, bv) = min_over(cands, gt, |a| a.verb)?;
    let (noun, bn) = min_over(cands, gt, |a| a.noun)?;
    let (action, ba) = cands
        .iter()
        .enumerate()
        .map(|(k, c)| normalized_ed(c, gt).map(|d| (d, k)))
        .try_fold((f64::INFINITY, 0), |best, r| {
            r.map(|(d, k)| if d < best.0 { (d, k) } else { best })
        })?;
    Ok(ClipEval {
        clip_id: predictions.clip_id.clone(),
        ed: TrackScores { verb, noun, action },
        best: BestCandidates {
            verb: bv,
            noun: bn,
            action: ba,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub num_clips: usize,
    pub verb_ed: f64,
    pub noun_ed: f64,
    pub action_ed: f64,
    /// Percentages; present only when recognition results were supplied.
    pub ar_verb_acc: Option<f64>,
    pub ar_noun_acc: Option<f64>,
    pub ar_action_acc: Option<f64>,
    pub num_segments: Option<usize>,
    pub per_clip: Vec<ClipEval>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecognitionAccuracy {
    pub verb: f64,
    pub noun: f64,
    pub action: f64,
    pub segments: usize,
}

/// Percentage of observed segments whose chosen action matches the
/// annotation, per verb, noun and full pair.
pub fn recognition_accuracy(
    annotations: &[ClipRecord],
    recognition: &[RecognitionResult],
) -> Result<RecognitionAccuracy> {
    let observed: HashMap<&str, &[Action]> = annotations
        .iter()
        .map(|r| (r.clip_id.as_str(), r.observed.as_slice()))
        .collect();
    let mut seen = HashSet::new();
    let (mut verb, mut noun, mut action) = (0usize, 0usize, 0usize);
    for r in recognition {
        let obs = observed
            .get(r.clip_id.as_str())
            .ok_or_else(|| Error::invalid(format!("recognition clip `{}` is not annotated", r.clip_id)))?;
        let truth = obs.get(r.segment_index).ok_or_else(|| {
            Error::invalid(format!(
                "clip `{}` segment {} exceeds its {} observed actions",
                r.clip_id,
                r.segment_index,
                obs.len()
            ))
        })?;
        if !seen.insert((r.clip_id.as_str(), r.segment_index)) {
            return Err(Error::invalid(format!(
                "duplicate recognition for clip `{}` segment {}",
                r.clip_id, r.segment_index
            )));
        }
        verb += usize::from(r.chosen.verb == truth.verb);
        noun += usize::from(r.chosen.noun == truth.noun);
        action += usize::from(r.chosen == *truth);
    }
    let n = recognition.len();
    if n == 0 {
        return Err(Error::invalid("no recognition results to score"));
    }
    let pct = |c: usize| 100.0 * c as f64 / n as f64;
    Ok(RecognitionAccuracy {
        verb: pct(verb),
        noun: pct(noun),
        action: pct(action),
        segments: n,
    })
}

/// Scores every annotated clip that has a future.
///
/// Prediction clip ids must match those clips exactly.
pub fn corpus_eval(
    predictions: &[PredictionSet],
    ground_truth: &[ClipRecord],
    recognition: Option<&[RecognitionResult]>,
) -> Result<EvalReport> {
    let mut by_clip: HashMap<&str, &PredictionSet> = HashMap::new();
    for p in predictions {
        if by_clip.insert(p.clip_id.as_str(), p).is_some() {
            return Err(Error::invalid(format!("duplicate prediction for clip `{}`", p.clip_id)));
        }
    }
    let mut gt_ids = HashSet::new();
    let scored: Vec<(&ClipRecord, &[Action])> = ground_truth
        .iter()
        .filter_map(|r| r.future.as_deref().map(|f| (r, f)))
        .collect();
    for (r, _) in &scored {
        if !gt_ids.insert(r.clip_id.as_str()) {
            return Err(Error::invalid(format!("duplicate ground-truth clip `{}`", r.clip_id)));
        }
        if !by_clip.contains_key(r.clip_id.as_str()) {
            return Err(Error::invalid(format!("no prediction for clip `{}`", r.clip_id)));
        }
    }
    if let Some(extra) = predictions.iter().find(|p| !gt_ids.contains(p.clip_id.as_str())) {
        return Err(Error::invalid(format!(
            "prediction for clip `{}` has no ground-truth future",
            extra.clip_id
        )));
    }
    if scored.is_empty() {
        return Err(Error::invalid("no clips with ground-truth futures to evaluate"));
    }

    let per_clip: Vec<ClipEval> = scored
        .par_iter()
        .map(|(r, future)| clip_ed(by_clip[r.clip_id.as_str()], future))
        .collect::<Result<_>>()?;
    let n = per_clip.len() as f64;
    let mean = |f: fn(&ClipEval) -> f64| per_clip.iter().map(f).sum::<f64>() / n;

    let accuracy = recognition
        .map(|rec| recognition_accuracy(ground_truth, rec))
        .transpose()?;
    Ok(EvalReport {
        num_clips: per_clip.len(),
        verb_ed: mean(|c| c.ed.verb),
        noun_ed: mean(|c| c.ed.noun),
        action_ed: mean(|c| c.ed.action),
        ar_verb_acc: accuracy.map(|a| a.verb),
        ar_noun_acc: accuracy.map(|a| a.noun),
        ar_action_acc: accuracy.map(|a| a.action),
        num_segments: accuracy.map(|a| a.segments),
        per_clip,
    })
}

impl EvalReport {
    /// Plain-text summary in leaderboard layout.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<10} {:>8} {:>8} {:>8}", "", "Verb", "Noun", "Action");
        let _ = writeln!(
            out,
            "{:<10} {:>8.4} {:>8.4} {:>8.4}",
            "LTA ED", self.verb_ed, self.noun_ed, self.action_ed
        );
        if let (Some(v), Some(n), Some(a)) = (self.ar_verb_acc, self.ar_noun_acc, self.ar_action_acc) {
            let _ = writeln!(out, "{:<10} {:>8.2} {:>8.2} {:>8.2}", "AR Acc", v, n, a);
        }
        let _ = writeln!(out, "clips: {}", self.num_clips);
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut json = serde_json::to_vec_pretty(self).map_err(Error::invalid)?;
        json.push(b'\n');
        write_atomic(path, &json)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e))
    }
}
