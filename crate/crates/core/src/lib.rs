//! Long-term action anticipation toolkit.
//!
//! The pipeline has three file-separated stages:
//!
//! 1. [`recognition`]: per-segment verb and noun distributions are re-ranked
//!    with a verb–noun [`cooccurrence`] matrix into one action per segment.
//! 2. [`anticipation`]: the recognized history is turned into `K` candidate
//!    futures of `Z` actions, by an n-gram model, a simple baseline, or a
//!    chat-completion endpoint through [`llm_client`].
//! 3. [`metrics`]: candidates are scored against ground truth with the
//!    normalized edit distance, min over candidates per track.
//!
//! [`synthgen`] produces seeded corpora in the same file formats so that the
//! whole chain runs without external data. [`cli`] wires the stages into the
//! `lta` binary.

pub mod anticipation;
pub mod cli;
pub mod cooccurrence;
pub mod dataset_io;
pub mod error;
pub mod llm_client;
pub mod metrics;
pub mod recognition;
pub mod synthgen;
pub mod taxonomy;

pub use cooccurrence::CooccurrenceMatrix;
pub use dataset_io::{ClipRecord, PredictionSet, SegmentDistribution};
pub use error::{Error, Result};
pub use recognition::{rerank, RecognitionResult};
pub use taxonomy::{Action, Taxonomy};
