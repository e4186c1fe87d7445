//! LLM-backed anticipation against a scripted transport: one injected
//! failure is retried, and a messy completion is parsed into Z actions.
//!
//! `cargo run --example llm_mock`
//!
//! Against a real OpenAI-compatible server, build the client with
//! `ChatClient::http(config)` and export the token named by
//! `config.auth_token_env_var`.

use std::time::Duration;

use lta::anticipation::{LlmPredictor, PredictConfig, Predictor, PromptTemplate};
use lta::llm_client::{ChatClient, LlmConfig, ScriptEntry};
use lta::Taxonomy;

fn main() -> lta::Result<()> {
    let tax = Taxonomy::new(["take", "cut", "put"], ["knife", "onion", "board"])?;
    let history: Vec<_> = ["take knife", "cut onion", "put knife"]
        .iter()
        .map(|s| tax.parse_action(s))
        .collect::<lta::Result<_>>()?;

    let config = LlmConfig {
        backoff_base: Duration::from_millis(5),
        ..LlmConfig::default()
    };
    let (client, transport) = ChatClient::mock_from_script(
        config,
        vec![
            ScriptEntry::Fail("connection reset".into()),
            ScriptEntry::Respond("1. take board\n2. cut onion\n3. wave hand\n4. put knife.".into()),
        ],
    )?;
    let predictor = LlmPredictor::new(client, PromptTemplate::builtin(), tax.clone(), history[2]);
    println!("prompt:\n{}\n", predictor.render(&history, 6)?);

    let config = PredictConfig {
        horizon: 6,
        num_candidates: 1,
        ..PredictConfig::default()
    };
    let set = predictor.predict("demo", &history, &config)?;
    let names: Vec<String> = set.candidates[0]
        .iter()
        .map(|&a| tax.format_action(a))
        .collect::<lta::Result<_>>()?;
    println!("prediction: {}", names.join(", "));
    println!("attempts sent: {}", transport.requests().len());
    Ok(())
}
