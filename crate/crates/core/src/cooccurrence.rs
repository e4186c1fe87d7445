//! Verb–noun co-occurrence statistics.
//!
//! Counts are tallied over every annotated action (observed and future) and
//! kept alongside two normalizations: row-stochastic `P(noun | verb)` and
//! column-stochastic `P(verb | noun)`. An additive smoothing constant `alpha`
//! is added to every cell before normalizing.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::dataset_io::{write_atomic, ClipRecord};
use crate::error::{Error, Result};
use crate::taxonomy::Taxonomy;

const HEADER: &str = "# lta co-occurrence matrix v1";

#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceMatrix {
    num_verbs: usize,
    num_nouns: usize,
    alpha: f64,
    counts: Vec<f64>,
    row_stochastic: Vec<f64>,
    col_stochastic: Vec<f64>,
}

impl CooccurrenceMatrix {
    /// Wraps a dense row-major `num_verbs × num_nouns` count matrix.
    pub fn from_counts(num_verbs: usize, num_nouns: usize, counts: Vec<f64>, alpha: f64) -> Result<Self> {
        if num_verbs == 0 || num_nouns == 0 {
            return Err(Error::invalid("co-occurrence matrix must be non-empty"));
        }
        if counts.len() != num_verbs * num_nouns {
            return Err(Error::Dimension {
                what: "co-occurrence counts".into(),
                expected: num_verbs * num_nouns,
                actual: counts.len(),
            });
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::invalid(format!("smoothing alpha must be >= 0, got {alpha}")));
        }
        if let Some(c) = counts.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::invalid(format!("invalid co-occurrence count {c}")));
        }

        let mut row_stochastic = vec![0.0; counts.len()];
        for v in 0..num_verbs {
            let row = &counts[v * num_nouns..(v + 1) * num_nouns];
            let total: f64 = row.iter().map(|c| c + alpha).sum();
            if total > 0.0 {
                for (n, c) in row.iter().enumerate() {
                    row_stochastic[v * num_nouns + n] = (c + alpha) / total;
                }
            }
        }
        let mut col_stochastic = vec![0.0; counts.len()];
        for n in 0..num_nouns {
            let total: f64 = (0..num_verbs).map(|v| counts[v * num_nouns + n] + alpha).sum();
            if total > 0.0 {
                for v in 0..num_verbs {
                    col_stochastic[v * num_nouns + n] = (counts[v * num_nouns + n] + alpha) / total;
                }
            }
        }

        Ok(Self {
            num_verbs,
            num_nouns,
            alpha,
            counts,
            row_stochastic,
            col_stochastic,
        })
    }

    /// Matrix with every count equal to one.
    pub fn uniform(num_verbs: usize, num_nouns: usize) -> Result<Self> {
        Self::from_counts(num_verbs, num_nouns, vec![1.0; num_verbs * num_nouns], 0.0)
    }

    pub fn build(annotations: &[ClipRecord], taxonomy: &Taxonomy, alpha: f64) -> Result<Self> {
        let (nv, nn) = (taxonomy.num_verbs(), taxonomy.num_nouns());
        let mut counts = vec![0.0; nv * nn];
        let mut total = 0usize;
        for record in annotations {
            for action in record.full_sequence() {
                taxonomy.check(action)?;
                counts[action.verb * nn + action.noun] += 1.0;
                total += 1;
            }
        }
        if total == 0 && alpha == 0.0 {
            return Err(Error::invalid(
                "no annotated actions and alpha = 0: co-occurrence matrix has no mass",
            ));
        }
        Self::from_counts(nv, nn, counts, alpha)
    }

    pub fn num_verbs(&self) -> usize {
        self.num_verbs
    }

    pub fn num_nouns(&self) -> usize {
        self.num_nouns
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn count(&self, verb: usize, noun: usize) -> f64 {
        self.counts[verb * self.num_nouns + noun]
    }

    /// `P(noun | verb)`.
    pub fn noun_given_verb(&self, verb: usize, noun: usize) -> f64 {
        self.row_stochastic[verb * self.num_nouns + noun]
    }

    /// `P(verb | noun)`.
    pub fn verb_given_noun(&self, verb: usize, noun: usize) -> f64 {
        self.col_stochastic[verb * self.num_nouns + noun]
    }

    pub fn row_stochastic(&self) -> &[f64] {
        &self.row_stochastic
    }

    pub fn col_stochastic(&self) -> &[f64] {
        &self.col_stochastic
    }

    pub fn total_count(&self) -> f64 {
        self.counts.iter().sum()
    }

    /// Copy with every count multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_counts(
            self.num_verbs,
            self.num_nouns,
            self.counts.iter().map(|c| c * factor).collect(),
            self.alpha,
        )
    }

    pub fn check_dims(&self, taxonomy: &Taxonomy) -> Result<()> {
        if self.num_verbs != taxonomy.num_verbs() {
            return Err(Error::Dimension {
                what: "co-occurrence verbs".into(),
                expected: taxonomy.num_verbs(),
                actual: self.num_verbs,
            });
        }
        if self.num_nouns != taxonomy.num_nouns() {
            return Err(Error::Dimension {
                what: "co-occurrence nouns".into(),
                expected: taxonomy.num_nouns(),
                actual: self.num_nouns,
            });
        }
        Ok(())
    }

    fn counts_digest(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.num_verbs as u64).to_le_bytes());
        h.update((self.num_nouns as u64).to_le_bytes());
        h.update(self.alpha.to_bits().to_le_bytes());
        for c in &self.counts {
            h.update(c.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    fn normalized_digest(&self) -> String {
        let mut h = Sha256::new();
        for p in self.row_stochastic.iter().chain(&self.col_stochastic) {
            h.update(p.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{HEADER}");
        let _ = writeln!(out, "verbs {}", self.num_verbs);
        let _ = writeln!(out, "nouns {}", self.num_nouns);
        let _ = writeln!(out, "alpha {}", self.alpha);
        let _ = writeln!(out, "counts_sha256 {}", self.counts_digest());
        let _ = writeln!(out, "normalized_sha256 {}", self.normalized_digest());
        out.push_str("counts\n");
        for row in self.counts.chunks(self.num_nouns) {
            let line: Vec<String> = row.iter().map(f64::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let src = "<matrix>";
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim() == HEADER => {}
            _ => return Err(Error::parse(src, 1, "missing co-occurrence header")),
        }
        let mut field = |name: &str| -> Result<String> {
            let (i, line) = lines
                .next()
                .ok_or_else(|| Error::parse(src, 0, format!("missing `{name}`")))?;
            let rest = line
                .strip_prefix(name)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| Error::parse(src, i + 1, format!("expected `{name} <value>`")))?;
            Ok(rest.trim().to_string())
        };
        let num = |s: String, what: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::parse(src, 0, format!("bad {what} `{s}`")))
        };
        let num_verbs = num(field("verbs")?, "verb count")?;
        let num_nouns = num(field("nouns")?, "noun count")?;
        let alpha_text = field("alpha")?;
        let alpha: f64 = alpha_text
            .parse()
            .map_err(|_| Error::parse(src, 4, format!("bad alpha `{alpha_text}`")))?;
        let counts_sha = field("counts_sha256")?;
        let normalized_sha = field("normalized_sha256")?;
        match lines.next() {
            Some((_, l)) if l.trim() == "counts" => {}
            _ => return Err(Error::parse(src, 7, "expected `counts`")),
        }

        let mut counts = Vec::with_capacity(num_verbs * num_nouns);
        let mut rows = 0;
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let before = counts.len();
            for tok in line.split_whitespace() {
                counts.push(
                    tok.parse::<f64>()
                        .map_err(|_| Error::parse(src, i + 1, format!("bad count `{tok}`")))?,
                );
            }
            if counts.len() - before != num_nouns {
                return Err(Error::Dimension {
                    what: format!("co-occurrence row {rows}"),
                    expected: num_nouns,
                    actual: counts.len() - before,
                });
            }
            rows += 1;
        }
        if rows != num_verbs {
            return Err(Error::Dimension {
                what: "co-occurrence rows".into(),
                expected: num_verbs,
                actual: rows,
            });
        }

        let m = Self::from_counts(num_verbs, num_nouns, counts, alpha)?;
        if m.counts_digest() != counts_sha {
            return Err(Error::Integrity("co-occurrence counts checksum mismatch".into()));
        }
        if m.normalized_digest() != normalized_sha {
            return Err(Error::Integrity("co-occurrence normalization checksum mismatch".into()));
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path, self.to_text().as_bytes())
    }

    /// Loads a matrix, checking its shape against `taxonomy` when given.
    pub fn load(path: impl AsRef<Path>, taxonomy: Option<&Taxonomy>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m = Self::parse_text(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::parse(path, line, message),
            other => other,
        })?;
        if let Some(t) = taxonomy {
            m.check_dims(t)?;
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::Action;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn taxonomy(nv: usize, nn: usize) -> Taxonomy {
        Taxonomy::new((0..nv).map(|i| format!("v{i}")), (0..nn).map(|i| format!("n{i}"))).unwrap()
    }

    fn record(id: &str, observed: Vec<Action>, future: Option<Vec<Action>>) -> ClipRecord {
        ClipRecord {
            clip_id: id.into(),
            observed,
            future,
        }
    }

    fn random_records(seed: u64, nv: usize, nn: usize, count: usize) -> Vec<ClipRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|i| {
                let mut seq = |len: usize| -> Vec<Action> {
                    (0..len)
                        .map(|_| Action::new(rng.random_range(0..nv), rng.random_range(0..nn)))
                        .collect()
                };
                let observed = seq(8);
                let future = if i % 3 == 0 { None } else { Some(seq(20)) };
                record(&format!("c{i}"), observed, future)
            })
            .collect()
    }

    #[test]
    fn single_count() {
        let t = taxonomy(2, 2);
        let m = CooccurrenceMatrix::build(&[record("a", vec![Action::new(0, 1)], None)], &t, 0.0).unwrap();
        assert_eq!(m.counts(), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn row_normalization_no_smoothing() {
        let t = taxonomy(2, 2);
        let obs = vec![
            Action::new(0, 0),
            Action::new(0, 0),
            Action::new(0, 1),
            Action::new(0, 1),
        ];
        let m = CooccurrenceMatrix::build(&[record("a", obs, None)], &t, 0.0).unwrap();
        assert_eq!(m.noun_given_verb(0, 0), 0.5);
        assert_eq!(m.noun_given_verb(0, 1), 0.5);
        // zero rows stay zero without smoothing
        assert_eq!(m.noun_given_verb(1, 0), 0.0);
        assert_eq!(m.verb_given_noun(0, 1), 1.0);
    }

    #[test]
    fn empty_corpus_requires_smoothing() {
        let t = taxonomy(2, 3);
        assert!(CooccurrenceMatrix::build(&[], &t, 0.0).is_err());
        let m = CooccurrenceMatrix::build(&[], &t, 1.0).unwrap();
        assert!((m.noun_given_verb(1, 2) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn counts_match_flat_tally() {
        let (nv, nn) = (4, 5);
        let t = taxonomy(nv, nn);
        let records = random_records(7, nv, nn, 10);
        let m = CooccurrenceMatrix::build(&records, &t, 0.0).unwrap();

        let mut flat: Vec<Action> = Vec::new();
        for r in &records {
            flat.extend(&r.observed);
            if let Some(f) = &r.future {
                flat.extend(f);
            }
        }
        for v in 0..nv {
            for n in 0..nn {
                let tally = flat.iter().filter(|a| a.verb == v && a.noun == n).count();
                assert_eq!(m.count(v, n), tally as f64, "cell ({v},{n})");
            }
        }
        assert_eq!(m.total_count(), flat.len() as f64);
    }

    #[test]
    fn smoothed_rows_and_columns_sum_to_one() {
        let t = taxonomy(4, 5);
        let m = CooccurrenceMatrix::build(&random_records(3, 4, 5, 2), &t, 0.5).unwrap();
        for v in 0..4 {
            let s: f64 = (0..5).map(|n| m.noun_given_verb(v, n)).sum();
            assert!((s - 1.0).abs() < 1e-9);
            let expected = (m.count(v, 2) + 0.5) / (0..5).map(|n| m.count(v, n) + 0.5).sum::<f64>();
            assert_eq!(m.noun_given_verb(v, 2), expected);
        }
        for n in 0..5 {
            let s: f64 = (0..4).map(|v| m.verb_given_noun(v, n)).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn build_is_order_invariant() {
        let t = taxonomy(4, 5);
        let mut records = random_records(11, 4, 5, 10);
        let a = CooccurrenceMatrix::build(&records, &t, 0.0).unwrap();
        records.reverse();
        records.swap(1, 6);
        let b = CooccurrenceMatrix::build(&records, &t, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn file_round_trip_and_integrity() {
        let t = taxonomy(4, 5);
        let m = CooccurrenceMatrix::build(&random_records(7, 4, 5, 10), &t, 0.25).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        m.save(&p).unwrap();
        let back = CooccurrenceMatrix::load(&p, Some(&t)).unwrap();
        assert_eq!(back, m);

        let err = CooccurrenceMatrix::load(&p, Some(&taxonomy(3, 5))).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }), "{err}");

        let text = std::fs::read_to_string(&p).unwrap();
        let tampered = text.replacen("counts_sha256 ", "counts_sha256 0", 1);
        std::fs::write(&p, tampered).unwrap();
        assert!(matches!(CooccurrenceMatrix::load(&p, None), Err(Error::Integrity(_))));

        // editing a count without updating the checksum is caught too
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let last = lines.len() - 1;
        let mut row: Vec<f64> = lines[last].split(' ').map(|t| t.parse().unwrap()).collect();
        row[0] += 1.0;
        lines[last] = row.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        std::fs::write(&p, lines.join("\n")).unwrap();
        assert!(matches!(CooccurrenceMatrix::load(&p, None), Err(Error::Integrity(_))));
    }

    #[test]
    fn integer_scaling_is_exact() {
        let t = taxonomy(4, 5);
        let m = CooccurrenceMatrix::build(&random_records(5, 4, 5, 10), &t, 0.0).unwrap();
        for c in [0.5, 3.0, 1000.0] {
            let s = m.scaled(c).unwrap();
            assert_eq!(s.row_stochastic(), m.row_stochastic());
            assert_eq!(s.col_stochastic(), m.col_stochastic());
        }
    }
}
