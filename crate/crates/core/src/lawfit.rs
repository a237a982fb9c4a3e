//! Power-law and exponential-law fits of an autocorrelation curve, their
//! mean absolute percentage errors, and the ratio of the two.
//!
//! Both laws are straight lines after taking logs: `ln C = a + b ln tau`
//! (power) and `ln C = a + b tau` (exponential). Each is fit by ordinary
//! least squares over the same lags, then scored by MAPE in linear `C` space.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::autocorr::AutocorrelationCurve;
use crate::error::{Error, Result};

/// Minimum number of lags a fit needs.
pub const MIN_FIT_POINTS: usize = 10;

/// A MAPE at or below this is rounding noise around an exact fit.
pub const EXACT_FIT_MAPE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    /// 20 geometrically spaced lags per decade.
    #[default]
    Geometric20,
    /// Every integer lag.
    All,
}

impl fmt::Display for GridMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridMode::Geometric20 => "geometric20",
            GridMode::All => "all",
        })
    }
}

impl FromStr for GridMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric20" => Ok(GridMode::Geometric20),
            "all" => Ok(GridMode::All),
            other => Err(Error::InvalidConfig(format!(
                "unknown grid mode {other:?} (expected geometric20 or all)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagSelection {
    pub lags: Vec<usize>,
    pub grid_mode: GridMode,
    /// Share of grid lags removed because `C(tau) <= 0` there.
    pub dropped_nonpositive_fraction: f64,
}

/// Candidate lags of `grid_mode` in `[tau_min, tau_max]`, before any
/// filtering on the curve.
pub fn lag_grid(tau_min: usize, tau_max: usize, grid_mode: GridMode) -> Vec<usize> {
    match grid_mode {
        GridMode::All => (tau_min..=tau_max).collect(),
        GridMode::Geometric20 => {
            let mut lags: Vec<usize> = Vec::new();
            for step in 0.. {
                let lag = (tau_min as f64 * 10f64.powf(step as f64 / 20.0)).round() as usize;
                if lag > tau_max {
                    break;
                }
                if lags.last() != Some(&lag) {
                    lags.push(lag);
                }
            }
            lags
        }
    }
}

/// Picks the lags both fits run on: the grid restricted to points where the
/// curve is positive (logs are undefined elsewhere).
pub fn select_fit_lags(
    curve: &AutocorrelationCurve,
    tau_min: usize,
    tau_max: usize,
    grid_mode: GridMode,
) -> Result<LagSelection> {
    if tau_min == 0 || tau_min > tau_max {
        return Err(Error::InvalidSelection(format!(
            "lag range [{tau_min}, {tau_max}] is empty or starts at zero"
        )));
    }
    match curve.max_lag() {
        Some(max) if tau_max <= max => {}
        _ => {
            return Err(Error::InvalidSelection(format!(
                "max lag {tau_max} exceeds the curve's max lag {:?}",
                curve.max_lag()
            )))
        }
    }

    let grid = lag_grid(tau_min, tau_max, grid_mode);
    let mut lags = Vec::with_capacity(grid.len());
    for &lag in &grid {
        let value = curve
            .value_at(lag)
            .ok_or_else(|| Error::InvalidSelection(format!("curve has no value at lag {lag}")))?;
        if value > 0.0 {
            lags.push(lag);
        }
    }

    let span = match (lags.first(), lags.last()) {
        (Some(&lo), Some(&hi)) => hi as f64 / lo as f64,
        _ => 0.0,
    };
    if lags.len() < MIN_FIT_POINTS || span < 10.0 {
        return Err(Error::InsufficientPositiveLags {
            kept: lags.len(),
            span,
        });
    }
    let dropped = grid.len() - lags.len();
    Ok(LagSelection {
        lags,
        grid_mode,
        dropped_nonpositive_fraction: dropped as f64 / grid.len() as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    Power,
    Exponential,
}

impl Law {
    fn regressor(self, tau: f64) -> f64 {
        match self {
            Law::Power => tau.ln(),
            Law::Exponential => tau,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawFit {
    pub law: Law,
    /// Log-amplitude `ln A`.
    pub intercept: f64,
    /// `-alpha` for the power law, `-lambda` per lag for the exponential.
    pub slope: f64,
    /// Mean absolute percentage error as a fraction.
    pub mape: f64,
    pub n_points: usize,
}

impl LawFit {
    pub fn predict(&self, tau: f64) -> f64 {
        (self.intercept + self.slope * self.law.regressor(tau)).exp()
    }
}

pub fn fit_power_law(curve: &AutocorrelationCurve, selection: &LagSelection) -> Result<LawFit> {
    fit_law(curve, selection, Law::Power)
}

pub fn fit_exponential_law(curve: &AutocorrelationCurve, selection: &LagSelection) -> Result<LawFit> {
    fit_law(curve, selection, Law::Exponential)
}

fn fit_law(curve: &AutocorrelationCurve, selection: &LagSelection, law: Law) -> Result<LawFit> {
    let mut points = Vec::with_capacity(selection.lags.len());
    for &lag in &selection.lags {
        let c = curve
            .value_at(lag)
            .ok_or_else(|| Error::InvalidSelection(format!("curve has no value at lag {lag}")))?;
        if c <= 0.0 {
            return Err(Error::InvalidSelection(format!(
                "selected lag {lag} has non-positive autocorrelation {c}"
            )));
        }
        points.push((law.regressor(lag as f64), c));
    }

    let n_points = points.len();
    if n_points < 2 {
        return Err(Error::DegenerateFit { n_points });
    }
    let n = n_points as f64;
    let mean_x = points.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|&(_, c)| c.ln()).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, c) in &points {
        let dx = x - mean_x;
        sxx += dx * dx;
        sxy += dx * (c.ln() - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFit { n_points });
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;

    let mape = points
        .iter()
        .map(|&(x, c)| (c - (intercept + slope * x).exp()).abs() / c.abs())
        .sum::<f64>()
        / n;

    Ok(LawFit {
        law,
        intercept,
        slope,
        mape,
        n_points,
    })
}

/// The ratio of the two fit errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricFields {
    pub mape_power: f64,
    pub mape_exp: f64,
    pub gapelmaper: f64,
    /// Both laws fit exactly (a constant curve); the ratio is reported as 1.
    pub degenerate: bool,
}

/// `MAPE_power / MAPE_exp`. Below 1 the curve looks like power-law decay,
/// above 1 like exponential decay.
pub fn gapelmaper(power_fit: &LawFit, exp_fit: &LawFit) -> Result<MetricFields> {
    if power_fit.law != Law::Power || exp_fit.law != Law::Exponential {
        return Err(Error::InvalidSelection(
            "expected a power-law fit and an exponential-law fit".into(),
        ));
    }
    if power_fit.n_points != exp_fit.n_points {
        return Err(Error::InvalidSelection(format!(
            "fits use different lag counts ({} vs {})",
            power_fit.n_points, exp_fit.n_points
        )));
    }
    let (mape_power, mape_exp) = (power_fit.mape, exp_fit.mape);
    if mape_power <= EXACT_FIT_MAPE && mape_exp <= EXACT_FIT_MAPE {
        return Ok(MetricFields {
            mape_power,
            mape_exp,
            gapelmaper: 1.0,
            degenerate: true,
        });
    }
    if mape_exp == 0.0 {
        return Err(Error::ZeroDenominator { mape_power });
    }
    Ok(MetricFields {
        mape_power,
        mape_exp,
        gapelmaper: mape_power / mape_exp,
        degenerate: false,
    })
}

/// Metric output with the provenance needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapelmaperReport {
    pub mape_power: f64,
    pub mape_exp: f64,
    pub gapelmaper: f64,
    pub n_tokens: usize,
    pub n_vectors: usize,
    pub tau_min: usize,
    pub tau_max: usize,
    pub grid_mode: GridMode,
    pub dropped_oov_fraction: f64,
    pub dropped_nonpositive_fraction: f64,
    pub embedding_name: String,
    /// Only serialized when set.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl GapelmaperReport {
    /// Metric value as shown in tables, two decimals.
    pub fn display_value(&self) -> String {
        format!("{:.2}", self.gapelmaper)
    }

    pub fn is_structured(&self) -> bool {
        self.gapelmaper < 1.0
    }
}
