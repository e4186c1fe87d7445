//! Seeded generator for routine corpora and noisy recognition outputs.
//!
//! Each verb is compatible with a small random subset of nouns. Routine
//! templates are cycles over compatible actions; clips are windows of a
//! routine (the first `observed` actions become the history, the next
//! `horizon` the future). Per-segment distributions soften the true one-hot
//! with a temperature and then move a random share of the mass onto one
//! confusable label, with nouns corrupted more heavily than verbs by default.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset_io::{
    save_annotations, save_distributions, write_atomic, ClipRecord, SegmentDistribution, DEFAULT_HORIZON,
    DEFAULT_OBSERVED,
};
use crate::error::{Error, Result};
use crate::taxonomy::{Action, Taxonomy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub num_verbs: usize,
    pub num_nouns: usize,
    /// Size of each verb's compatible noun set.
    pub nouns_per_verb: usize,
    pub num_templates: usize,
    /// Number of distinct actions in one routine cycle.
    pub cycle_length: usize,
    pub routine_length: usize,
    pub train_clips: usize,
    pub test_clips: usize,
    pub observed: usize,
    pub horizon: usize,
    /// Softmax temperature applied to the one-hot truth.
    pub noise_temperature: f64,
    /// Mean share of noun mass moved onto a confusable noun.
    pub distractor_mass: f64,
    /// Verb distractor mass as a fraction of the noun one.
    pub verb_noise_scale: f64,
    /// Probability that a routine step emits a random compatible action
    /// instead of the cycle's next one. Zero gives deterministic routines.
    pub transition_noise: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            num_verbs: 20,
            num_nouns: 30,
            nouns_per_verb: 3,
            num_templates: 6,
            cycle_length: 6,
            routine_length: 60,
            train_clips: 200,
            test_clips: 500,
            observed: DEFAULT_OBSERVED,
            horizon: DEFAULT_HORIZON,
            noise_temperature: 0.25,
            distractor_mass: 0.4,
            verb_noise_scale: 0.25,
            transition_noise: 0.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("num_verbs", self.num_verbs),
            ("num_nouns", self.num_nouns),
            ("nouns_per_verb", self.nouns_per_verb),
            ("num_templates", self.num_templates),
            ("cycle_length", self.cycle_length),
            ("routine_length", self.routine_length),
            ("train_clips", self.train_clips),
            ("test_clips", self.test_clips),
            ("observed", self.observed),
            ("horizon", self.horizon),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        if self.num_nouns < 2 {
            return Err(Error::Config("num_nouns must be at least 2".into()));
        }
        if self.nouns_per_verb > self.num_nouns {
            return Err(Error::Config("nouns_per_verb exceeds num_nouns".into()));
        }
        if self.observed + self.horizon > self.routine_length {
            return Err(Error::Config(format!(
                "observed + horizon = {} exceeds routine_length {}",
                self.observed + self.horizon,
                self.routine_length
            )));
        }
        if !(self.noise_temperature.is_finite() && self.noise_temperature > 0.0) {
            return Err(Error::Config("noise_temperature must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.distractor_mass) {
            return Err(Error::Config("distractor_mass must be in [0, 1)".into()));
        }
        if !(0.0..=1.0).contains(&self.verb_noise_scale) {
            return Err(Error::Config("verb_noise_scale must be in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.transition_noise) {
            return Err(Error::Config("transition_noise must be in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub config: SynthConfig,
    pub taxonomy: Taxonomy,
    /// `compatible[v]` lists the nouns verb `v` can take, ascending.
    pub compatible: Vec<Vec<usize>>,
    pub templates: Vec<Vec<Action>>,
    pub train: Vec<ClipRecord>,
    pub test: Vec<ClipRecord>,
    /// Observed-segment distributions of the test clips.
    pub distributions: Vec<SegmentDistribution>,
}

/// `softmax(onehot(truth) / tau)`, stable for tiny `tau`.
fn softened(size: usize, truth: usize, tau: f64) -> Vec<f64> {
    let off = (-1.0 / tau).exp();
    let total = 1.0 + off * (size - 1) as f64;
    (0..size)
        .map(|i| if i == truth { 1.0 / total } else { off / total })
        .collect()
}

fn corrupt(size: usize, truth: usize, tau: f64, mean_mass: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let clean = softened(size, truth, tau);
    if mean_mass == 0.0 || size < 2 {
        return clean;
    }
    let mass = (rng.random::<f64>() * 2.0 * mean_mass).min(0.95);
    let mut confuser = rng.random_range(0..size - 1);
    if confuser >= truth {
        confuser += 1;
    }
    let distract = softened(size, confuser, tau);
    clean
        .iter()
        .zip(&distract)
        .map(|(c, d)| (1.0 - mass) * c + mass * d)
        .collect()
}

fn routine(template: &[Action], pool: &[Action], cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<Action> {
    let start = rng.random_range(0..template.len());
    (0..cfg.routine_length)
        .map(|i| {
            if cfg.transition_noise > 0.0 && rng.random::<f64>() < cfg.transition_noise {
                pool[rng.random_range(0..pool.len())]
            } else {
                template[(start + i) % template.len()]
            }
        })
        .collect()
}

fn window(id: String, routine: &[Action], cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> ClipRecord {
    let span = cfg.observed + cfg.horizon;
    let w = rng.random_range(0..=routine.len() - span);
    ClipRecord {
        clip_id: id,
        observed: routine[w..w + cfg.observed].to_vec(),
        future: Some(routine[w + cfg.observed..w + span].to_vec()),
    }
}

pub fn generate_corpus(config: &SynthConfig) -> Result<SynthCorpus> {
    config.validate()?;
    let cfg = config;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let taxonomy = Taxonomy::new(
        (0..cfg.num_verbs).map(|i| format!("verb_{i:02}")),
        (0..cfg.num_nouns).map(|i| format!("noun_{i:02}")),
    )?;

    let compatible: Vec<Vec<usize>> = (0..cfg.num_verbs)
        .map(|_| {
            let mut nouns = rand::seq::index::sample(&mut rng, cfg.num_nouns, cfg.nouns_per_verb).into_vec();
            nouns.sort_unstable();
            nouns
        })
        .collect();
    let pool: Vec<Action> = compatible
        .iter()
        .enumerate()
        .flat_map(|(v, ns)| ns.iter().map(move |&n| Action::new(v, n)))
        .collect();

    // Disjoint templates when the pool allows it, so that a bigram context
    // identifies its template unambiguously.
    let mut shuffled = pool.clone();
    shuffled.shuffle(&mut rng);
    let templates: Vec<Vec<Action>> = if shuffled.len() >= cfg.num_templates * cfg.cycle_length {
        shuffled
            .chunks(cfg.cycle_length)
            .take(cfg.num_templates)
            .map(<[Action]>::to_vec)
            .collect()
    } else {
        (0..cfg.num_templates)
            .map(|_| {
                (0..cfg.cycle_length)
                    .map(|_| pool[rng.random_range(0..pool.len())])
                    .collect()
            })
            .collect()
    };

    let make_clips = |prefix: &str, count: usize, rng: &mut ChaCha8Rng| -> Vec<ClipRecord> {
        (0..count)
            .map(|i| {
                let t = &templates[i % templates.len()];
                let r = routine(t, &pool, cfg, rng);
                window(format!("{prefix}_{i:05}"), &r, cfg, rng)
            })
            .collect()
    };
    let train = make_clips("train", cfg.train_clips, &mut rng);
    let test = make_clips("test", cfg.test_clips, &mut rng);

    let verb_mass = cfg.distractor_mass * cfg.verb_noise_scale;
    let mut distributions = Vec::with_capacity(test.len() * cfg.observed);
    for clip in &test {
        for (i, a) in clip.observed.iter().enumerate() {
            let verb_probs = corrupt(cfg.num_verbs, a.verb, cfg.noise_temperature, verb_mass, &mut rng);
            let noun_probs = corrupt(
                cfg.num_nouns,
                a.noun,
                cfg.noise_temperature,
                cfg.distractor_mass,
                &mut rng,
            );
            distributions.push(SegmentDistribution {
                clip_id: clip.clip_id.clone(),
                segment_index: i,
                verb_probs,
                noun_probs,
            });
        }
    }

    Ok(SynthCorpus {
        config: cfg.clone(),
        taxonomy,
        compatible,
        templates,
        train,
        test,
        distributions,
    })
}

/// File names written by [`SynthCorpus::write`].
pub mod files {
    pub const TAXONOMY: &str = "taxonomy.txt";
    pub const TRAIN: &str = "train.jsonl";
    pub const TEST: &str = "test.jsonl";
    pub const DISTRIBUTIONS: &str = "distributions.jsonl";
    pub const PROVENANCE: &str = "provenance.json";
}

#[derive(Serialize)]
struct Provenance<'a> {
    generator: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a SynthConfig,
    compatible: &'a [Vec<usize>],
    files: [&'static str; 4],
}

impl SynthCorpus {
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_atomic(dir.join(files::TAXONOMY), self.taxonomy.to_text().as_bytes())?;
        save_annotations(dir.join(files::TRAIN), &self.train, &self.taxonomy)?;
        save_annotations(dir.join(files::TEST), &self.test, &self.taxonomy)?;
        save_distributions(dir.join(files::DISTRIBUTIONS), &self.distributions)?;
        let provenance = Provenance {
            generator: "lta synth",
            version: env!("CARGO_PKG_VERSION"),
            seed: self.config.seed,
            config: &self.config,
            compatible: &self.compatible,
            files: [files::TAXONOMY, files::TRAIN, files::TEST, files::DISTRIBUTIONS],
        };
        let mut json = serde_json::to_vec_pretty(&provenance).map_err(Error::invalid)?;
        json.push(b'\n');
        write_atomic(dir.join(files::PROVENANCE), &json)
    }
}
