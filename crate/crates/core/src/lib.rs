//! Structuredness of long texts from the decay of word-embedding
//! autocorrelations.
//!
//! A text becomes a sequence of unit word vectors; its autocorrelation
//! `C(tau)` is fit by a power law and by an exponential law over lags
//! 10..10000, and the ratio of the two fits' mean absolute percentage errors
//! (GAPELMAPER) tells them apart: below 1 the decay is power-law-like
//! (structured, human-like text), above 1 exponential (Markovian text).
//!
//! ```
//! use ltg_core::{analyze_text, AnalysisConfig, EmbeddingTable};
//!
//! let table = EmbeddingTable::load("a 1 0\nb 0 1\n".as_bytes(), "toy").unwrap();
//! let text = "a ".repeat(1000);
//! let report = analyze_text(&text, &table, &AnalysisConfig::default()).unwrap();
//! assert!(report.degenerate);
//! ```

pub mod analysis;
pub mod autocorr;
pub mod embedding;
pub mod error;
pub mod lawfit;

pub use analysis::{analyze_sequence, analyze_text, analyze_text_detailed, text_curve, Analysis, AnalysisConfig};
pub use autocorr::{autocorrelation_fft, autocorrelation_naive, AutocorrelationCurve};
pub use embedding::{count_tokens, embed_sequence, tokenize, EmbeddingTable, TokenSequence, UnitVectorSequence};
pub use error::{Error, Result};
pub use lawfit::{
    fit_exponential_law, fit_power_law, gapelmaper, lag_grid, select_fit_lags, GapelmaperReport,
    GridMode, LagSelection, Law, LawFit, MetricFields,
};
