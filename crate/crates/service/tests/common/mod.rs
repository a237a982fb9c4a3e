#![allow(dead_code)]

use ltg_core::EmbeddingTable;
use ltg_service::{ChallengeConfig, Prompt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PROMPT_ID: &str = "hp-001";
pub const PROMPT: &str = "The castle was quiet when Harry woke that morning, and the snow had \
covered the grounds all the way down to the lake.";
pub const VOCAB: usize = 300;

/// Random 16-d vectors sharing a positive common component, like real
/// embedding tables do, so autocorrelations stay positive.
pub fn synthetic_table() -> EmbeddingTable {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut entries: Vec<(String, Vec<f64>)> = (0..VOCAB)
        .map(|i| {
            let v = (0..16).map(|k| if k == 0 { 1.0 } else { rng.random_range(-1.0..1.0) }).collect();
            (format!("w{i}"), v)
        })
        .collect();
    for word in ltg_core::tokenize(PROMPT).tokens {
        let v = (0..16).map(|k| if k == 0 { 1.0 } else { rng.random_range(-1.0..1.0) }).collect();
        entries.push((word, v));
    }
    EmbeddingTable::from_entries("synthetic16", entries).unwrap()
}

/// Prompt followed by `words` tokens from a sticky random walk over the
/// vocabulary; `stickiness` changes the resulting curve.
pub fn submission_text(words: usize, seed: u64, stickiness: f64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::with_capacity(PROMPT.len() + words * 5);
    out.push_str(PROMPT);
    let mut topic = 0usize;
    for _ in 0..words {
        if rng.random::<f64>() > stickiness {
            topic = rng.random_range(0..VOCAB / 10);
        }
        let word = topic * 10 + rng.random_range(0..10);
        out.push_str(" w");
        out.push_str(&word.to_string());
    }
    out
}

pub fn config() -> ChallengeConfig {
    ChallengeConfig::with_prompts([Prompt {
        id: PROMPT_ID.into(),
        text: PROMPT.into(),
        reference_text: Some("A human-written continuation of similar length.".into()),
    }])
}
