//! JSON-lines readers and writers for every stage boundary.
//!
//! Annotations, distributions, predictions and recognition outputs are all
//! stored one JSON object per line. Blank lines are skipped. Writers go
//! through [`write_atomic`] so a failed run never leaves a half-written file.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recognition::{Branch, CandidatePair, RecognitionResult};
use crate::taxonomy::{Action, Taxonomy};

/// Prediction horizon used throughout unless configured otherwise.
pub const DEFAULT_HORIZON: usize = 20;
/// Number of observed segments per clip in generated corpora.
pub const DEFAULT_OBSERVED: usize = 8;
/// Candidate futures per clip.
pub const DEFAULT_CANDIDATES: usize = 5;

/// Tolerance inside which a probability vector is taken as already normalized.
pub const SUM_EXACT_TOL: f64 = 1e-6;
/// Tolerance inside which a probability vector is rescaled to sum to one.
pub const SUM_RENORM_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClipRecord {
    pub clip_id: String,
    pub observed: Vec<Action>,
    /// Absent for test-mode clips.
    pub future: Option<Vec<Action>>,
}

impl ClipRecord {
    /// Observed followed by future actions.
    pub fn full_sequence(&self) -> impl Iterator<Item = Action> + '_ {
        self.observed.iter().chain(self.future.iter().flatten()).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentDistribution {
    pub clip_id: String,
    pub segment_index: usize,
    pub verb_probs: Vec<f64>,
    pub noun_probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionSet {
    pub clip_id: String,
    pub candidates: Vec<Vec<Action>>,
}

impl PredictionSet {
    pub fn validate(&self, horizon: usize) -> Result<()> {
        if self.candidates.is_empty() {
            return Err(Error::invalid(format!(
                "clip `{}` has no candidate sequences",
                self.clip_id
            )));
        }
        for (k, c) in self.candidates.iter().enumerate() {
            if c.len() != horizon {
                return Err(Error::invalid(format!(
                    "clip `{}` candidate {k} has {} actions, expected {horizon}",
                    self.clip_id,
                    c.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct AnnotationLine {
    clip_id: String,
    observed: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    future: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct DistributionLine {
    clip_id: String,
    segment: usize,
    verb_probs: Vec<f64>,
    noun_probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct PredictionLine {
    clip_id: String,
    candidates: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct CandidateLine {
    action: String,
    score: f64,
    branch: Branch,
}

#[derive(Serialize, Deserialize)]
struct RecognitionLine {
    clip_id: String,
    segment: usize,
    chosen: String,
    naive: String,
    degenerate: bool,
    candidates: Vec<CandidateLine>,
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::parse(path, i + 1, e))?;
        out.push((i + 1, value));
    }
    Ok(out)
}

fn to_jsonl<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    for row in rows {
        serde_json::to_writer(&mut buf, &row).map_err(|e| Error::invalid(e.to_string()))?;
        buf.push(b'\n');
    }
    Ok(buf)
}

fn parse_actions(path: &Path, line: usize, taxonomy: &Taxonomy, labels: &[String]) -> Result<Vec<Action>> {
    labels
        .iter()
        .map(|s| taxonomy.parse_action(s).map_err(|e| Error::parse(path, line, e)))
        .collect()
}

fn format_actions(taxonomy: &Taxonomy, actions: &[Action]) -> Result<Vec<String>> {
    actions.iter().map(|&a| taxonomy.format_action(a)).collect()
}

fn ensure_unique<'a>(ids: impl IntoIterator<Item = &'a str>, what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::invalid(format!("duplicate clip id `{id}` in {what}")));
        }
    }
    Ok(())
}

/// Loads clip annotations; every present future must have exactly `horizon` actions.
pub fn load_annotations(path: impl AsRef<Path>, taxonomy: &Taxonomy, horizon: usize) -> Result<Vec<ClipRecord>> {
    let path = path.as_ref();
    let mut records = Vec::new();
    for (line, row) in read_jsonl::<AnnotationLine>(path)? {
        let observed = parse_actions(path, line, taxonomy, &row.observed)?;
        let future = match row.future {
            Some(f) => {
                if f.len() != horizon {
                    return Err(Error::parse(
                        path,
                        line,
                        format!(
                            "clip `{}` has {} future actions, expected {horizon}",
                            row.clip_id,
                            f.len()
                        ),
                    ));
                }
                Some(parse_actions(path, line, taxonomy, &f)?)
            }
            None => None,
        };
        records.push(ClipRecord {
            clip_id: row.clip_id,
            observed,
            future,
        });
    }
    ensure_unique(records.iter().map(|r| r.clip_id.as_str()), "annotations")?;
    Ok(records)
}

pub fn save_annotations(path: impl AsRef<Path>, records: &[ClipRecord], taxonomy: &Taxonomy) -> Result<()> {
    let rows = records
        .iter()
        .map(|r| {
            Ok(AnnotationLine {
                clip_id: r.clip_id.clone(),
                observed: format_actions(taxonomy, &r.observed)?,
                future: r.future.as_deref().map(|f| format_actions(taxonomy, f)).transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_atomic(path, &to_jsonl(rows)?)
}

/// Checks shape and nonnegativity, rescaling if the sum is slightly off.
///
/// Sums within [`SUM_EXACT_TOL`] of one are returned unchanged; sums within
/// [`SUM_RENORM_TOL`] are divided through; anything else is rejected.
pub fn validate_probs(what: &str, probs: &mut [f64], expected_len: usize) -> Result<()> {
    if probs.len() != expected_len {
        return Err(Error::Dimension {
            what: what.to_string(),
            expected: expected_len,
            actual: probs.len(),
        });
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::invalid(format!("{what} contains invalid probability {p}")));
    }
    let sum: f64 = probs.iter().sum();
    let off = (sum - 1.0).abs();
    if off <= SUM_EXACT_TOL {
        Ok(())
    } else if off <= SUM_RENORM_TOL {
        probs.iter_mut().for_each(|p| *p /= sum);
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} sums to {sum}, expected 1")))
    }
}

pub fn load_distributions(path: impl AsRef<Path>, taxonomy: &Taxonomy) -> Result<Vec<SegmentDistribution>> {
    let path = path.as_ref();
    read_jsonl::<DistributionLine>(path)?
        .into_iter()
        .map(|(line, mut row)| {
            let ctx = |e: Error| Error::parse(path, line, e);
            validate_probs("verb_probs", &mut row.verb_probs, taxonomy.num_verbs()).map_err(ctx)?;
            validate_probs("noun_probs", &mut row.noun_probs, taxonomy.num_nouns()).map_err(ctx)?;
            Ok(SegmentDistribution {
                clip_id: row.clip_id,
                segment_index: row.segment,
                verb_probs: row.verb_probs,
                noun_probs: row.noun_probs,
            })
        })
        .collect()
}

pub fn save_distributions(path: impl AsRef<Path>, dists: &[SegmentDistribution]) -> Result<()> {
    let rows = dists.iter().map(|d| DistributionLine {
        clip_id: d.clip_id.clone(),
        segment: d.segment_index,
        verb_probs: d.verb_probs.clone(),
        noun_probs: d.noun_probs.clone(),
    });
    write_atomic(path, &to_jsonl(rows)?)
}

pub fn save_predictions(path: impl AsRef<Path>, predictions: &[PredictionSet], taxonomy: &Taxonomy) -> Result<()> {
    let rows = predictions
        .iter()
        .map(|p| {
            Ok(PredictionLine {
                clip_id: p.clip_id.clone(),
                candidates: p
                    .candidates
                    .iter()
                    .map(|c| format_actions(taxonomy, c))
                    .collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_atomic(path, &to_jsonl(rows)?)
}

pub fn load_predictions(path: impl AsRef<Path>, taxonomy: &Taxonomy, horizon: usize) -> Result<Vec<PredictionSet>> {
    let path = path.as_ref();
    let sets = read_jsonl::<PredictionLine>(path)?
        .into_iter()
        .map(|(line, row)| {
            let set = PredictionSet {
                candidates: row
                    .candidates
                    .iter()
                    .map(|c| parse_actions(path, line, taxonomy, c))
                    .collect::<Result<_>>()?,
                clip_id: row.clip_id,
            };
            set.validate(horizon).map_err(|e| Error::parse(path, line, e))?;
            Ok(set)
        })
        .collect::<Result<Vec<_>>>()?;
    ensure_unique(sets.iter().map(|s| s.clip_id.as_str()), "predictions")?;
    Ok(sets)
}

pub fn save_recognition(path: impl AsRef<Path>, results: &[RecognitionResult], taxonomy: &Taxonomy) -> Result<()> {
    let rows = results
        .iter()
        .map(|r| {
            Ok(RecognitionLine {
                clip_id: r.clip_id.clone(),
                segment: r.segment_index,
                chosen: taxonomy.format_action(r.chosen)?,
                naive: taxonomy.format_action(r.naive)?,
                degenerate: r.degenerate,
                candidates: r
                    .candidates
                    .iter()
                    .map(|c| {
                        Ok(CandidateLine {
                            action: taxonomy.format_action(c.action)?,
                            score: c.score,
                            branch: c.branch,
                        })
                    })
                    .collect::<Result<_>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_atomic(path, &to_jsonl(rows)?)
}

pub fn load_recognition(path: impl AsRef<Path>, taxonomy: &Taxonomy) -> Result<Vec<RecognitionResult>> {
    let path = path.as_ref();
    read_jsonl::<RecognitionLine>(path)?
        .into_iter()
        .map(|(line, row)| {
            let parse = |s: &str| taxonomy.parse_action(s).map_err(|e| Error::parse(path, line, e));
            Ok(RecognitionResult {
                chosen: parse(&row.chosen)?,
                naive: parse(&row.naive)?,
                candidates: row
                    .candidates
                    .iter()
                    .map(|c| {
                        Ok(CandidatePair {
                            action: parse(&c.action)?,
                            score: c.score,
                            branch: c.branch,
                        })
                    })
                    .collect::<Result<_>>()?,
                degenerate: row.degenerate,
                clip_id: row.clip_id,
                segment_index: row.segment,
            })
        })
        .collect()
}
