#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ltg_core::EmbeddingTable;
use ltg_service::{ChallengeConfig, Prompt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PROMPT_ID: &str = "hp-001";
pub const PROMPT: &str = "The castle was quiet when Harry woke that morning, and the snow had \
covered the grounds all the way down to the lake.";
pub const VOCAB: usize = 300;

/// Entries of a 16-d table whose vectors share a positive first component,
/// so autocorrelations of texts over it stay positive.
pub fn synthetic_entries() -> Vec<(String, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let words = (0..VOCAB)
        .map(|i| format!("w{i}"))
        .chain(ltg_core::tokenize(PROMPT).tokens);
    words
        .map(|w| {
            let v = (0..16).map(|k| if k == 0 { 1.0 } else { rng.random_range(-1.0..1.0) }).collect();
            (w, v)
        })
        .collect()
}

pub fn synthetic_table() -> EmbeddingTable {
    EmbeddingTable::from_entries("synthetic16", synthetic_entries()).unwrap()
}

/// Writes the synthetic table as `synthetic16.txt` in `dir`.
pub fn write_synthetic_table(dir: &Path) -> PathBuf {
    let mut out = String::new();
    for (word, v) in synthetic_entries() {
        out.push_str(&word);
        for x in v {
            let _ = write!(out, " {x:?}");
        }
        out.push('\n');
    }
    let path = dir.join("synthetic16.txt");
    std::fs::write(&path, out).unwrap();
    path
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

/// Runs the `ltg` binary with a clean environment for its own variables.
pub fn ltg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltg"))
        .args(args)
        .env_remove("LTG_EMBEDDINGS")
        .env_remove("LTG_ADMIN_TOKEN")
        .output()
        .expect("ltg binary runs")
}
