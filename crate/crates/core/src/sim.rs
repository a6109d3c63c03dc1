//! Seeded Monte Carlo execution of diagonal measurements.
//!
//! Trial `t` draws its uniform variate from a SplitMix64 stream indexed by
//! `(seed, t)`, so any partition of the trials over threads produces the
//! same tallies.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::schmidt::SchmidtSpectrum;
use crate::transform::DiagonalPovm;
use crate::POVM_TOL;

const CHUNK: u64 = 1 << 14;
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw in `[0, 1)` for trial `index` of the stream `seed`.
pub fn uniform(seed: u64, index: u64) -> f64 {
    let bits = mix64(mix64(seed).wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)));
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub trials: u64,
    pub seed: u64,
    /// Outcome labels, in measurement element order.
    pub labels: Vec<usize>,
    pub counts: Vec<u64>,
    pub empirical_probs: Vec<f64>,
    pub expected_probs: Vec<f64>,
    /// Average of `ln(label)` over trials, in nats.
    pub mean_yield: f64,
    pub max_abs_deviation: f64,
}

impl SimulationReport {
    /// Pearson statistic over outcomes with positive expected probability,
    /// with its degrees of freedom.
    pub fn chi_square(&self) -> (f64, usize) {
        let trials = self.trials as f64;
        let mut stat = 0.0;
        let mut cells = 0usize;
        for (&count, &p) in self.counts.iter().zip(&self.expected_probs) {
            if p > 0.0 {
                let expected = trials * p;
                stat += (count as f64 - expected).powi(2) / expected;
                cells += 1;
            }
        }
        (stat, cells.saturating_sub(1))
    }
}

fn tally(cdf: &[f64], last_positive: usize, seed: u64, start: u64, end: u64) -> Vec<u64> {
    let mut counts = vec![0u64; cdf.len()];
    let total = cdf[cdf.len() - 1];
    for t in start..end {
        let u = uniform(seed, t) * total;
        let j = cdf.partition_point(|&c| c <= u).min(last_positive);
        counts[j] += 1;
    }
    counts
}

/// Samples `trials` outcomes of `povm` on `state`.
pub fn simulate(
    povm: &DiagonalPovm,
    state: &SchmidtSpectrum,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "trial count must be positive".into(),
        ));
    }
    if povm.is_empty() {
        return Err(Error::InvalidArgument("measurement has no elements".into()));
    }
    if povm.support_rank < state.rank() {
        return Err(Error::DimensionMismatch {
            expected: state.rank(),
            got: povm.support_rank,
        });
    }
    let residual = povm.completeness_residual_on(state.rank());
    if residual > POVM_TOL {
        return Err(Error::IncompletePovm { residual });
    }

    let expected_probs = povm.outcome_probabilities(state);
    let cdf: Vec<f64> = expected_probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();

    let last_positive = expected_probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let chunks = trials.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            tally(
                &cdf,
                last_positive,
                seed,
                c * CHUNK,
                ((c + 1) * CHUNK).min(trials),
            )
        })
        .reduce(
            || vec![0u64; cdf.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let labels = povm.labels();
    let n = trials as f64;
    let empirical_probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let max_abs_deviation = empirical_probs
        .iter()
        .zip(&expected_probs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mean_yield = counts
        .iter()
        .zip(&labels)
        .map(|(&c, &label)| c as f64 * (label as f64).ln())
        .sum::<f64>()
        / n;
    Ok(SimulationReport {
        trials,
        seed,
        labels,
        counts,
        empirical_probs,
        expected_probs,
        mean_yield,
        max_abs_deviation,
    })
}

/// Sample mean and standard error of `ln(label)` over the trials.
pub fn yield_statistics(report: &SimulationReport) -> (f64, f64) {
    let mean = report.mean_yield;
    if report.trials < 2 {
        return (mean, 0.0);
    }
    let sum_sq: f64 = report
        .counts
        .iter()
        .zip(&report.labels)
        .map(|(&c, &label)| c as f64 * ((label as f64).ln() - mean).powi(2))
        .sum();
    let n = report.trials as f64;
    let variance = sum_sq / (n - 1.0);
    (mean, (variance / n).sqrt())
}
