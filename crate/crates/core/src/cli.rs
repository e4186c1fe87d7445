//! The `lta` command line.
//!
//! Every stage reads and writes files, so stages can be swapped for
//! externally produced inputs. A `--config` TOML file may provide any flag:
//! top-level keys apply to every subcommand that accepts them and a table
//! named after the subcommand (e.g. `[anticipate]`) overrides those. Flags
//! given on the command line always win.
//!
//! Exit status: 0 success, 1 usage or configuration, 2 data validation or
//! I/O, 3 LLM transport.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use crate::anticipation::{
    histories_from_recognition, predict_corpus, DecodeMode, LlmPredictor, NgramModel, PredictConfig, Predictor,
    PromptTemplate, RepeatLast,
};
use crate::cooccurrence::CooccurrenceMatrix;
use crate::dataset_io::{
    load_annotations, load_distributions, load_predictions, load_recognition, save_predictions, save_recognition,
    write_atomic,
};
use crate::error::{Error, Result};
use crate::llm_client::{ChatClient, ChatCompletion, LlmConfig, ScriptedTransport};
use crate::metrics::{clip_ed, corpus_eval};
use crate::recognition::{recognize_corpus, RecognitionMode};
use crate::synthgen::{generate_corpus, SynthConfig};
use crate::taxonomy::Taxonomy;

#[derive(Debug, Parser)]
#[command(name = "lta", version, about = "Long-term action anticipation pipeline")]
pub struct Cli {
    /// TOML file supplying default values for any flag
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for clip-parallel stages (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic corpus in the standard file formats
    Synth(SynthArgs),
    /// Count verb–noun co-occurrences over an annotation file
    BuildCooccur(BuildCooccurArgs),
    /// Recognize one action per observed segment
    Recognize(RecognizeArgs),
    /// Predict candidate future action sequences per clip
    Anticipate(AnticipateArgs),
    /// Score predictions with the normalized edit distance
    Evaluate(EvaluateArgs),
    /// Print a qualitative dump of one clip
    Report(ReportArgs),
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    /// Output directory
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Verb vocabulary size
    #[arg(long, default_value_t = 20)]
    pub num_verbs: usize,
    /// Noun vocabulary size
    #[arg(long, default_value_t = 30)]
    pub num_nouns: usize,
    /// Nouns compatible with each verb
    #[arg(long, default_value_t = 3)]
    pub nouns_per_verb: usize,
    /// Routine templates
    #[arg(long, default_value_t = 6)]
    pub num_templates: usize,
    /// Actions per routine cycle
    #[arg(long, default_value_t = 6)]
    pub cycle_length: usize,
    /// Length of each generated routine
    #[arg(long, default_value_t = 60)]
    pub routine_length: usize,
    /// Clips in the training split
    #[arg(long, default_value_t = 200)]
    pub train_clips: usize,
    /// Clips in the test split
    #[arg(long, default_value_t = 500)]
    pub test_clips: usize,
    /// Observed segments per clip
    #[arg(long, default_value_t = 8)]
    pub observed: usize,
    /// Future actions per clip (Z)
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
    /// Softmax temperature for the recognition noise
    #[arg(long, default_value_t = 0.25)]
    pub noise_temperature: f64,
    /// Mean noun probability mass moved onto a confusable noun
    #[arg(long, default_value_t = 0.4)]
    pub distractor_mass: f64,
    /// Verb distractor mass as a fraction of the noun one
    #[arg(long, default_value_t = 0.25)]
    pub verb_noise_scale: f64,
    /// Per-step probability of leaving the routine cycle
    #[arg(long, default_value_t = 0.0)]
    pub transition_noise: f64,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, clap::Args)]
pub struct BuildCooccurArgs {
    /// Taxonomy file (#verbs / #nouns sections)
    #[arg(long)]
    pub taxonomy: PathBuf,
    /// Annotation file (JSON lines)
    #[arg(long)]
    pub annotations: PathBuf,
    /// Additive smoothing added to every cell
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Future length expected in the annotations
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
    /// Output matrix file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct RecognizeArgs {
    /// Taxonomy file (#verbs / #nouns sections)
    #[arg(long)]
    pub taxonomy: PathBuf,
    /// Per-segment distributions (JSON lines)
    #[arg(long)]
    pub distributions: PathBuf,
    /// Co-occurrence matrix file (unused with --naive)
    #[arg(long, required_unless_present = "naive")]
    pub matrix: Option<PathBuf>,
    /// Anchors per branch
    #[arg(long, default_value_t = 5)]
    pub top_k: usize,
    /// Independent argmax of each distribution instead of re-ranking
    #[arg(long)]
    pub naive: bool,
    /// Output recognition file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredictorKind {
    /// Last observed action for the whole horizon
    RepeatLast,
    /// Unigram model: order-1 n-gram
    Frequency,
    /// Backoff n-gram over actions (--order, --beta)
    Ngram,
    /// Chat-completions endpoint, or the scripted mock
    Llm,
}

#[derive(Debug, clap::Args)]
pub struct AnticipateArgs {
    /// Taxonomy file (#verbs / #nouns sections)
    #[arg(long)]
    pub taxonomy: PathBuf,
    /// Recognition file providing the observed histories
    #[arg(long)]
    pub recognition: PathBuf,
    /// Anticipation model
    #[arg(long, value_enum, default_value_t = PredictorKind::Ngram)]
    pub predictor: PredictorKind,
    /// Training annotations (required for frequency and ngram)
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// N-gram order
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// N-gram additive smoothing
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    /// Future actions per candidate (Z)
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
    /// Candidate sequences per clip (K)
    #[arg(long, default_value_t = 5)]
    pub num_candidates: usize,
    /// Decoding mode for the candidates
    #[arg(long, value_enum, default_value_t = DecodeMode::Greedy)]
    pub mode: DecodeMode,
    /// Sampling keeps only this many most likely next actions
    #[arg(long, default_value_t = 5)]
    pub sample_top_k: usize,
    /// Seed for sampled candidates
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use only the last N recognized segments of each clip
    #[arg(long)]
    pub history_len: Option<usize>,
    /// Prompt template file (TOML with system_text and user_template)
    #[arg(long)]
    pub prompt: Option<PathBuf>,
    /// Chat-completions endpoint URL
    #[arg(long, default_value = "http://127.0.0.1:8000/v1/chat/completions")]
    pub llm_endpoint: String,
    /// Model name sent with each request
    #[arg(long, default_value = "lta-chat")]
    pub llm_model: String,
    /// Temperature for sampled candidates; the first greedy one uses 0
    #[arg(long, default_value_t = 0.7)]
    pub llm_temperature: f64,
    /// Completion token limit
    #[arg(long, default_value_t = 512)]
    pub llm_max_tokens: u32,
    /// Per-request timeout in milliseconds
    #[arg(long, default_value_t = 60_000)]
    pub llm_timeout_ms: u64,
    /// Retries after a failed request
    #[arg(long, default_value_t = 3)]
    pub llm_max_retries: u32,
    /// Initial retry delay, doubled per retry
    #[arg(long, default_value_t = 250)]
    pub llm_backoff_ms: u64,
    /// Concurrent requests in flight
    #[arg(long, default_value_t = 4)]
    pub llm_max_in_flight: usize,
    /// Environment variable holding the bearer token
    #[arg(long, default_value = "LTA_LLM_TOKEN")]
    pub llm_token_env: String,
    /// Replay this script instead of calling the endpoint (JSON lines of
    /// {"respond": text}, {"fail": message} or {"raw": body})
    #[arg(long)]
    pub llm_mock_script: Option<PathBuf>,
    /// Write the mock's recorded requests here
    #[arg(long, requires = "llm_mock_script")]
    pub llm_request_log: Option<PathBuf>,
    /// Output predictions file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct EvaluateArgs {
    /// Taxonomy file (#verbs / #nouns sections)
    #[arg(long)]
    pub taxonomy: PathBuf,
    /// Predictions file (JSON lines)
    #[arg(long)]
    pub predictions: PathBuf,
    /// Ground-truth annotations
    #[arg(long)]
    pub annotations: PathBuf,
    /// Recognition file; enables the recognition accuracy columns
    #[arg(long)]
    pub recognition: Option<PathBuf>,
    /// Future length expected in predictions and annotations
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
    /// Output report (JSON)
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the plain-text table here
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    /// Clip to dump
    #[arg(long)]
    pub clip: String,
    /// Taxonomy file (#verbs / #nouns sections)
    #[arg(long)]
    pub taxonomy: PathBuf,
    #[arg(long)]
    pub annotations: PathBuf,
    /// Recognition file
    #[arg(long)]
    pub recognition: Option<PathBuf>,
    /// Predictions file (JSON lines)
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Future length expected in predictions and annotations
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
    /// Write the dump here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn toml_flag_values(key: &str, value: &toml::Value) -> Result<Vec<String>> {
    let flag = format!("--{}", key.replace('_', "-"));
    let scalar = |v: &toml::Value| -> Result<String> {
        Ok(match v {
            toml::Value::String(s) => s.clone(),
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(f) => f.to_string(),
            other => return Err(Error::Config(format!("unsupported value for `{key}`: {other}"))),
        })
    };
    Ok(match value {
        toml::Value::Boolean(true) => vec![flag],
        toml::Value::Boolean(false) => vec![],
        toml::Value::Array(items) => items
            .iter()
            .map(|v| scalar(v).map(|s| [flag.clone(), s]))
            .collect::<Result<Vec<_>>>()?
            .concat(),
        v => vec![flag, scalar(v)?],
    })
}

/// Inserts flags from the config file right after the subcommand name,
/// skipping any flag the user already passed.
fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text =
        std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let table: toml::Table = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;

    let command = Cli::command();
    let Some((pos, sub)) = argv.iter().enumerate().skip(1).find_map(|(i, a)| {
        let name = a.to_str()?;
        command.find_subcommand(name).map(|s| (i, s.clone()))
    }) else {
        return Ok(argv);
    };
    let accepted: Vec<String> = sub
        .get_arguments()
        .chain(command.get_arguments())
        .filter_map(|a| a.get_long().map(str::to_string))
        .collect();
    let given = |long: &str| {
        argv.iter().any(|a| {
            let s = a.to_string_lossy();
            s == format!("--{long}") || s.starts_with(&format!("--{long}="))
        })
    };

    let mut merged: Vec<(String, toml::Value)> = Vec::new();
    let mut set = |key: &str, value: &toml::Value| {
        let long = key.replace('_', "-");
        merged.retain(|(k, _)| *k != long);
        merged.push((long, value.clone()));
    };
    for (key, value) in &table {
        if value.is_table() || !accepted.contains(&key.replace('_', "-")) {
            continue;
        }
        set(key, value);
    }
    if let Some(section) = table.get(sub.get_name()).and_then(|v| v.as_table()) {
        for (key, value) in section {
            if !accepted.contains(&key.replace('_', "-")) {
                return Err(Error::Config(format!("[{}] has unknown key `{key}`", sub.get_name())));
            }
            set(key, value);
        }
    }

    let mut injected = Vec::new();
    for (long, value) in merged {
        if long != "config" && !given(&long) {
            injected.extend(toml_flag_values(&long, &value)?.into_iter().map(OsString::from));
        }
    }
    let mut out = argv[..=pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("lta: error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("lta: error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Synth(a) => synth(a),
        Command::BuildCooccur(a) => build_cooccur(a),
        Command::Recognize(a) => recognize(a),
        Command::Anticipate(a) => anticipate(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Report(a) => report(a),
    })
}

fn synth(a: SynthArgs) -> Result<()> {
    let config = SynthConfig {
        num_verbs: a.num_verbs,
        num_nouns: a.num_nouns,
        nouns_per_verb: a.nouns_per_verb,
        num_templates: a.num_templates,
        cycle_length: a.cycle_length,
        routine_length: a.routine_length,
        train_clips: a.train_clips,
        test_clips: a.test_clips,
        observed: a.observed,
        horizon: a.horizon,
        noise_temperature: a.noise_temperature,
        distractor_mass: a.distractor_mass,
        verb_noise_scale: a.verb_noise_scale,
        transition_noise: a.transition_noise,
        seed: a.seed,
    };
    generate_corpus(&config)?.write(&a.out_dir)
}

fn build_cooccur(a: BuildCooccurArgs) -> Result<()> {
    let taxonomy = Taxonomy::load(&a.taxonomy)?;
    let annotations = load_annotations(&a.annotations, &taxonomy, a.horizon)?;
    CooccurrenceMatrix::build(&annotations, &taxonomy, a.alpha)?.save(&a.out)
}

fn recognize(a: RecognizeArgs) -> Result<()> {
    let taxonomy = Taxonomy::load(&a.taxonomy)?;
    let dists = load_distributions(&a.distributions, &taxonomy)?;
    let (matrix, mode) = if a.naive {
        (
            CooccurrenceMatrix::uniform(taxonomy.num_verbs(), taxonomy.num_nouns())?,
            RecognitionMode::Naive,
        )
    } else {
        let path = a.matrix.as_ref().expect("clap enforces --matrix");
        (
            CooccurrenceMatrix::load(path, Some(&taxonomy))?,
            RecognitionMode::Rerank,
        )
    };
    let results = recognize_corpus(&dists, &matrix, a.top_k, mode)?;
    save_recognition(&a.out, &results, &taxonomy)
}

fn anticipate(a: AnticipateArgs) -> Result<()> {
    let taxonomy = Taxonomy::load(&a.taxonomy)?;
    let recognition = load_recognition(&a.recognition, &taxonomy)?;
    let mut histories = histories_from_recognition(&recognition);
    if let Some(n) = a.history_len {
        if n == 0 {
            return Err(Error::Config("--history-len must be >= 1".into()));
        }
        for (_, h) in &mut histories {
            let drop = h.len().saturating_sub(n);
            h.drain(..drop);
        }
    }
    let config = PredictConfig {
        horizon: a.horizon,
        num_candidates: a.num_candidates,
        mode: a.mode,
        seed: a.seed,
        sample_top_k: a.sample_top_k,
    };
    let train = a
        .train
        .as_ref()
        .map(|p| load_annotations(p, &taxonomy, a.horizon))
        .transpose()?;
    let require_train = || {
        train
            .as_deref()
            .ok_or_else(|| Error::Config(format!("--predictor {:?} needs --train", a.predictor)))
    };

    let predictions = match a.predictor {
        PredictorKind::RepeatLast => predict_corpus(&RepeatLast, &histories, &config)?,
        PredictorKind::Frequency => {
            let model = NgramModel::fit(require_train()?, &taxonomy, 1, a.beta)?;
            predict_corpus(&model, &histories, &config)?
        }
        PredictorKind::Ngram => {
            let model = NgramModel::fit(require_train()?, &taxonomy, a.order, a.beta)?;
            predict_corpus(&model, &histories, &config)?
        }
        PredictorKind::Llm => {
            let template = match &a.prompt {
                Some(p) => PromptTemplate::load(p)?,
                None => PromptTemplate::builtin(),
            };
            // padding fallback when a completion yields no parseable action
            let fallback = match &train {
                Some(t) => NgramModel::fit(t, &taxonomy, 1, a.beta)?.most_frequent_action(),
                None => histories
                    .iter()
                    .find_map(|(_, h)| h.last().copied())
                    .unwrap_or(crate::Action::new(0, 0)),
            };
            let llm = LlmConfig {
                endpoint_url: a.llm_endpoint.clone(),
                model_name: a.llm_model.clone(),
                temperature: a.llm_temperature,
                max_tokens: a.llm_max_tokens,
                timeout: Duration::from_millis(a.llm_timeout_ms),
                max_retries: a.llm_max_retries,
                auth_token_env_var: Some(a.llm_token_env.clone()).filter(|s| !s.is_empty()),
                backoff_base: Duration::from_millis(a.llm_backoff_ms),
                backoff_max: Duration::from_secs(10),
                max_in_flight: a.llm_max_in_flight,
            };
            if llm.temperature < 0.0 {
                return Err(Error::Config("--llm-temperature must be >= 0".into()));
            }
            match &a.llm_mock_script {
                Some(script) => {
                    let transport = std::sync::Arc::new(ScriptedTransport::from_file(script)?);
                    let client = ChatClient::new(llm, std::sync::Arc::clone(&transport));
                    let result = run_llm(client, template, &taxonomy, fallback, &histories, &config);
                    if let Some(log) = &a.llm_request_log {
                        transport.save_request_log(log)?;
                    }
                    result?
                }
                None => {
                    let client = ChatClient::http(llm)?;
                    run_llm(client, template, &taxonomy, fallback, &histories, &config)?
                }
            }
        }
    };
    save_predictions(&a.out, &predictions, &taxonomy)
}

fn run_llm<C: ChatCompletion>(
    client: C,
    template: PromptTemplate,
    taxonomy: &Taxonomy,
    fallback: crate::Action,
    histories: &[(String, Vec<crate::Action>)],
    config: &PredictConfig,
) -> Result<Vec<crate::PredictionSet>> {
    let predictor = LlmPredictor::new(client, template, taxonomy.clone(), fallback);
    predict_corpus(&predictor as &dyn Predictor, histories, config)
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let taxonomy = Taxonomy::load(&a.taxonomy)?;
    let predictions = load_predictions(&a.predictions, &taxonomy, a.horizon)?;
    let annotations = load_annotations(&a.annotations, &taxonomy, a.horizon)?;
    let recognition = a
        .recognition
        .as_ref()
        .map(|p| load_recognition(p, &taxonomy))
        .transpose()?;
    let report = corpus_eval(&predictions, &annotations, recognition.as_deref())?;
    report.save(&a.out)?;
    let table = report.to_table();
    if let Some(p) = &a.table {
        write_atomic(p, table.as_bytes())?;
    }
    print!("{table}");
    Ok(())
}

/// Renders the qualitative dump for one clip.
pub fn clip_report(
    clip_id: &str,
    taxonomy: &Taxonomy,
    annotations: &[crate::ClipRecord],
    recognition: &[crate::RecognitionResult],
    predictions: &[crate::PredictionSet],
) -> Result<String> {
    let record = annotations
        .iter()
        .find(|r| r.clip_id == clip_id)
        .ok_or_else(|| Error::invalid(format!("clip `{clip_id}` is not annotated")))?;
    let fmt = |a: crate::Action| taxonomy.format_action(a);
    let mut out = String::new();
    let _ = writeln!(out, "clip {clip_id}");

    let mut segments: Vec<&crate::RecognitionResult> = recognition.iter().filter(|r| r.clip_id == clip_id).collect();
    segments.sort_by_key(|r| r.segment_index);
    let _ = writeln!(out, "\nobserved ({} segments)", record.observed.len());
    for (i, truth) in record.observed.iter().enumerate() {
        let _ = write!(out, "  [{i}] truth: {}", fmt(*truth)?);
        if let Some(r) = segments.iter().find(|r| r.segment_index == i) {
            let mark = if r.chosen == *truth { "ok" } else { "MISS" };
            let _ = write!(out, " | chosen: {} ({mark}) | naive: {}", fmt(r.chosen)?, fmt(r.naive)?);
            if r.degenerate {
                out.push_str(" | degenerate");
            }
            out.push('\n');
            for c in &r.candidates {
                let branch = match c.branch {
                    crate::recognition::Branch::VerbAnchored => "verb",
                    crate::recognition::Branch::NounAnchored => "noun",
                };
                let _ = writeln!(out, "        {:<24} {:.6}  {branch}", fmt(c.action)?, c.score);
            }
        } else {
            out.push('\n');
        }
    }

    let joined = |seq: &[crate::Action]| -> Result<String> {
        Ok(seq.iter().map(|&a| fmt(a)).collect::<Result<Vec<_>>>()?.join(", "))
    };
    if let Some(future) = &record.future {
        let _ = writeln!(out, "\nground truth future\n  {}", joined(future)?);
    }
    if let Some(set) = predictions.iter().find(|p| p.clip_id == clip_id) {
        let eval = record.future.as_deref().map(|f| clip_ed(set, f)).transpose()?;
        let _ = writeln!(out, "\npredicted futures ({} candidates)", set.candidates.len());
        for (k, c) in set.candidates.iter().enumerate() {
            let _ = writeln!(out, "  [{k}] {}", joined(c)?);
        }
        if let Some(e) = eval {
            let _ = writeln!(
                out,
                "\nED verb {:.4} (cand {})  noun {:.4} (cand {})  action {:.4} (cand {})",
                e.ed.verb, e.best.verb, e.ed.noun, e.best.noun, e.ed.action, e.best.action
            );
        }
    }
    Ok(out)
}

fn report(a: ReportArgs) -> Result<()> {
    let taxonomy = Taxonomy::load(&a.taxonomy)?;
    let annotations = load_annotations(&a.annotations, &taxonomy, a.horizon)?;
    let recognition = match &a.recognition {
        Some(p) => load_recognition(p, &taxonomy)?,
        None => Vec::new(),
    };
    let predictions = match &a.predictions {
        Some(p) => load_predictions(p, &taxonomy, a.horizon)?,
        None => Vec::new(),
    };
    let text = clip_report(&a.clip, &taxonomy, &annotations, &recognition, &predictions)?;
    match &a.out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
