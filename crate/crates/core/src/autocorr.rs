//! Autocorrelation of a unit-vector sequence,
//! `C(tau) = 1/(N - tau) * sum_i u_i . u_{i+tau}`.
//!
//! Since the vectors are unit-norm the dot product is the cosine similarity.
//! [`autocorrelation_fft`] is the production path; [`autocorrelation_naive`]
//! is the direct double loop and serves as its oracle.

use rayon::prelude::*;
use realfft::num_complex::Complex;
use realfft::RealFftPlanner;
use serde::{Deserialize, Serialize};

use crate::embedding::UnitVectorSequence;
use crate::error::{Error, Result};

/// Dimensions whose columns are gathered in one pass over the sequence.
const DIM_BLOCK: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutocorrelationCurve {
    /// Strictly increasing positive lags.
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    /// Length of the sequence the curve was computed from.
    pub n_source: usize,
}

impl AutocorrelationCurve {
    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }

    pub fn max_lag(&self) -> Option<usize> {
        self.lags.last().copied()
    }

    pub fn value_at(&self, lag: usize) -> Option<f64> {
        self.lags.binary_search(&lag).ok().map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.lags.iter().copied().zip(self.values.iter().copied())
    }

    /// Curve on the contiguous lags `1..=values.len()`.
    pub fn from_values(values: Vec<f64>, n_source: usize) -> Self {
        AutocorrelationCurve {
            lags: (1..=values.len()).collect(),
            values,
            n_source,
        }
    }
}

fn check_lag_range(seq: &UnitVectorSequence, tau_max: usize) -> Result<()> {
    let n = seq.len();
    if n < 2 || tau_max == 0 || tau_max >= n {
        return Err(Error::TextTooShort {
            n_vectors: n,
            tau_max,
            min_vectors: (tau_max + 1).max(2),
        });
    }
    Ok(())
}

/// Direct evaluation, O(N * d * tau_max).
pub fn autocorrelation_naive(seq: &UnitVectorSequence, tau_max: usize) -> Result<AutocorrelationCurve> {
    check_lag_range(seq, tau_max)?;
    let n = seq.len();
    let values = (1..=tau_max)
        .map(|tau| {
            let sum: f64 = (0..n - tau)
                .map(|i| dot(seq.vector(i), seq.vector(i + tau)))
                .sum();
            sum / (n - tau) as f64
        })
        .collect();
    Ok(AutocorrelationCurve::from_values(values, n))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Same contract as [`autocorrelation_naive`], computed as the sum over
/// dimensions of scalar autocorrelations, each via a zero-padded real FFT
/// (Wiener-Khinchin). Cost is O(d * N log N) regardless of `tau_max`.
pub fn autocorrelation_fft(seq: &UnitVectorSequence, tau_max: usize) -> Result<AutocorrelationCurve> {
    check_lag_range(seq, tau_max)?;
    let n = seq.len();
    let dim = seq.dim();
    let fft_len = next_fast_len(2 * n);

    let mut planner = RealFftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(fft_len);
    let inverse = planner.plan_fft_inverse(fft_len);
    let data = seq.as_slice();

    let n_blocks = dim.div_ceil(DIM_BLOCK);
    let per_block: Vec<Vec<Vec<f64>>> = (0..n_blocks)
        .into_par_iter()
        .map_init(
            || {
                let columns = vec![vec![0.0; fft_len]; DIM_BLOCK];
                let spectrum = forward.make_output_vec();
                let output = inverse.make_output_vec();
                let scratch_fwd = forward.make_scratch_vec();
                let scratch_inv = inverse.make_scratch_vec();
                (columns, spectrum, output, scratch_fwd, scratch_inv)
            },
            |(columns, spectrum, output, scratch_fwd, scratch_inv), block| {
                let first = block * DIM_BLOCK;
                let width = DIM_BLOCK.min(dim - first);
                for (i, row) in data.chunks_exact(dim).enumerate() {
                    for (k, column) in columns.iter_mut().take(width).enumerate() {
                        column[i] = row[first + k];
                    }
                }
                let mut lag_sums = Vec::with_capacity(width);
                for column in columns.iter_mut().take(width) {
                    // the transform uses its input as scratch space
                    column[n..].fill(0.0);
                    forward
                        .process_with_scratch(column, spectrum, scratch_fwd)
                        .expect("buffer lengths match the plan");
                    for bin in spectrum.iter_mut() {
                        *bin = Complex::new(bin.norm_sqr(), 0.0);
                    }
                    inverse
                        .process_with_scratch(spectrum, output, scratch_inv)
                        .expect("buffer lengths match the plan");
                    lag_sums.push(output[1..=tau_max].to_vec());
                }
                lag_sums
            },
        )
        .collect();

    let per_dim: Vec<Vec<f64>> = per_block.into_iter().flatten().collect();
    let mut values = pairwise_sum(&per_dim);
    let scale = 1.0 / fft_len as f64;
    for (tau, v) in (1..=tau_max).zip(values.iter_mut()) {
        *v *= scale / (n - tau) as f64;
    }
    Ok(AutocorrelationCurve::from_values(values, n))
}

/// Element-wise sum of equal-length rows by recursive halving, in a fixed
/// order so the result does not depend on thread scheduling.
fn pairwise_sum(rows: &[Vec<f64>]) -> Vec<f64> {
    match rows {
        [] => Vec::new(),
        [single] => single.clone(),
        _ => {
            let (left, right) = rows.split_at(rows.len() / 2);
            let mut acc = pairwise_sum(left);
            for (a, b) in acc.iter_mut().zip(pairwise_sum(right)) {
                *a += b;
            }
            acc
        }
    }
}

/// Smallest integer >= `n` whose only prime factors are 2, 3 and 5.
pub fn next_fast_len(n: usize) -> usize {
    let mut candidate = n.max(1);
    loop {
        let mut m = candidate;
        for p in [2, 3, 5] {
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        if m == 1 {
            return candidate;
        }
        candidate += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(values: &[f64]) -> UnitVectorSequence {
        UnitVectorSequence::from_rows(1, values.to_vec()).unwrap()
    }

    #[test]
    fn perfectly_correlated() {
        let seq = scalar(&[1.0, 1.0, 1.0, 1.0]);
        for curve in [
            autocorrelation_naive(&seq, 2).unwrap(),
            autocorrelation_fft(&seq, 2).unwrap(),
        ] {
            assert_eq!(curve.lags, vec![1, 2]);
            for v in curve.values {
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn perfectly_anticorrelated() {
        let seq = scalar(&[1.0, -1.0, 1.0, -1.0]);
        let naive = autocorrelation_naive(&seq, 1).unwrap();
        let fast = autocorrelation_fft(&seq, 1).unwrap();
        assert_eq!(naive.values, vec![-1.0]);
        assert!((fast.values[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_neighbours() {
        let seq = UnitVectorSequence::from_rows(2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(autocorrelation_naive(&seq, 1).unwrap().values, vec![0.0]);
        assert!(autocorrelation_fft(&seq, 1).unwrap().values[0].abs() < 1e-12);
    }

    #[test]
    fn lag_range_errors() {
        let seq = scalar(&[1.0, 1.0, 1.0]);
        for tau in [0, 3, 4] {
            assert!(matches!(
                autocorrelation_naive(&seq, tau),
                Err(Error::TextTooShort { .. })
            ));
            assert!(matches!(
                autocorrelation_fft(&seq, tau),
                Err(Error::TextTooShort { .. })
            ));
        }
        let one = scalar(&[1.0]);
        assert!(autocorrelation_fft(&one, 1).is_err());
    }

    #[test]
    fn fast_lengths() {
        assert_eq!(next_fast_len(1), 1);
        assert_eq!(next_fast_len(7), 8);
        assert_eq!(next_fast_len(1_200_000), 1_200_000);
        assert_eq!(next_fast_len(1_200_001), 1_215_000);
        assert_eq!(next_fast_len(2 * 1021), 2048);
    }

    #[test]
    fn pairwise_sum_matches_sequential() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 1.0]).collect();
        assert_eq!(pairwise_sum(&rows), vec![10.0, 5.0]);
    }
}
