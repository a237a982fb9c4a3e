//! End-to-end text analysis: tokens, vectors, curve, fits, report.

use serde::{Deserialize, Serialize};

use crate::autocorr::{autocorrelation_fft, AutocorrelationCurve};
use crate::embedding::{embed_sequence, tokenize, EmbeddingTable, UnitVectorSequence};
use crate::error::{Error, Result};
use crate::lawfit::{
    fit_exponential_law, fit_power_law, gapelmaper, select_fit_lags, GapelmaperReport, GridMode,
    LawFit,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub tau_min: usize,
    pub tau_max: usize,
    pub grid_mode: GridMode,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            tau_min: 10,
            tau_max: 10000,
            grid_mode: GridMode::Geometric20,
        }
    }
}

impl AnalysisConfig {
    /// Smallest usable max lag: one decade above `tau_min`.
    pub fn min_tau_max(&self) -> usize {
        self.tau_min * 10
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau_min == 0 {
            return Err(Error::InvalidConfig("tau_min must be at least 1".into()));
        }
        if self.tau_min >= self.tau_max {
            return Err(Error::InvalidConfig(format!(
                "tau_min ({}) must be below tau_max ({})",
                self.tau_min, self.tau_max
            )));
        }
        if self.tau_max < self.min_tau_max() {
            return Err(Error::InvalidConfig(format!(
                "tau_max ({}) must span at least one decade above tau_min ({})",
                self.tau_max, self.tau_min
            )));
        }
        Ok(())
    }

    /// `min(tau_max, floor(N/2))`, or `TextTooShort` when that leaves less
    /// than a decade of lags.
    pub fn effective_tau_max(&self, n_vectors: usize) -> Result<usize> {
        let tau_max = self.tau_max.min(n_vectors / 2);
        let required = self.min_tau_max();
        if tau_max < required {
            return Err(Error::TextTooShort {
                n_vectors,
                tau_max: required,
                min_vectors: 2 * required,
            });
        }
        Ok(tau_max)
    }
}

/// Everything computed for one text; the report plus intermediate results.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub report: GapelmaperReport,
    pub curve: AutocorrelationCurve,
    pub power_fit: LawFit,
    pub exp_fit: LawFit,
}

pub fn analyze_text(raw_text: &str, table: &EmbeddingTable, config: &AnalysisConfig) -> Result<GapelmaperReport> {
    analyze_text_detailed(raw_text, table, config).map(|a| a.report)
}

pub fn analyze_text_detailed(
    raw_text: &str,
    table: &EmbeddingTable,
    config: &AnalysisConfig,
) -> Result<Analysis> {
    config.validate()?;
    let tokens = tokenize(raw_text);
    let seq = embed_sequence(&tokens, table)?;
    analyze_sequence(&seq, tokens.len(), table.name(), config)
}

/// Runs the metric on an already embedded sequence. `n_tokens` is the token
/// count before out-of-vocabulary words were dropped.
pub fn analyze_sequence(
    seq: &UnitVectorSequence,
    n_tokens: usize,
    embedding_name: &str,
    config: &AnalysisConfig,
) -> Result<Analysis> {
    config.validate()?;
    let tau_max = config.effective_tau_max(seq.len())?;
    let curve = autocorrelation_fft(seq, tau_max)?;
    let selection = select_fit_lags(&curve, config.tau_min, tau_max, config.grid_mode)?;
    let power_fit = fit_power_law(&curve, &selection)?;
    let exp_fit = fit_exponential_law(&curve, &selection)?;
    let metric = gapelmaper(&power_fit, &exp_fit)?;

    let report = GapelmaperReport {
        mape_power: metric.mape_power,
        mape_exp: metric.mape_exp,
        gapelmaper: metric.gapelmaper,
        n_tokens,
        n_vectors: seq.len(),
        tau_min: config.tau_min,
        tau_max,
        grid_mode: config.grid_mode,
        dropped_oov_fraction: seq.dropped_oov_fraction(),
        dropped_nonpositive_fraction: selection.dropped_nonpositive_fraction,
        embedding_name: embedding_name.to_owned(),
        degenerate: metric.degenerate,
    };
    Ok(Analysis {
        report,
        curve,
        power_fit,
        exp_fit,
    })
}

/// The autocorrelation curve on lags `1..=tau_max` (effective), without
/// fitting. Subject to the same length requirement as [`analyze_text`].
pub fn text_curve(raw_text: &str, table: &EmbeddingTable, config: &AnalysisConfig) -> Result<AutocorrelationCurve> {
    config.validate()?;
    let seq = embed_sequence(&tokenize(raw_text), table)?;
    let tau_max = config.effective_tau_max(seq.len())?;
    autocorrelation_fft(&seq, tau_max)
}
