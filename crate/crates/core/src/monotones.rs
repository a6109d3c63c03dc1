//! Tail-sum entanglement monotones and LQCC feasibility.
//!
//! For a spectrum `alpha_1 >= ... >= alpha_N` the monotones are
//! `E_l = alpha_l + ... + alpha_N`. A pure state converts deterministically
//! into another iff no `E_l` grows, and into an ensemble `{(p_j, eta_j)}` iff
//! no `E_l` grows on average.

use serde::Serialize;

use crate::schmidt::SchmidtSpectrum;
use crate::transform::TargetEnsemble;
use crate::FEASIBILITY_TOL;

/// `E_1, ..., E_N` of a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MonotoneVector(Vec<f64>);

impl MonotoneVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `E_l` for one-based `l`; zero past the Schmidt rank.
    pub fn at(&self, l: usize) -> f64 {
        assert!(l >= 1, "monotone index is one-based");
        self.0.get(l - 1).copied().unwrap_or(0.0)
    }

    /// Recovers `alpha_l = E_l - E_{l+1}`.
    pub fn differences(&self) -> Vec<f64> {
        (1..=self.len())
            .map(|l| self.at(l) - self.at(l + 1))
            .collect()
    }
}

/// Outcome of a monotone comparison.
///
/// `slack[l-1] = E_l(source) - E_l(target side)` for `l = 1..len`, where the
/// target side is a single spectrum or an ensemble average.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// One-based indices `l` whose inequality fails.
    pub violated_indices: Vec<usize>,
    pub slack: Vec<f64>,
}

impl FeasibilityReport {
    fn from_slack(slack: Vec<f64>, tol: f64, forced: impl Fn(usize) -> bool) -> Self {
        let violated_indices: Vec<usize> = slack
            .iter()
            .enumerate()
            .filter(|&(i, &s)| s < -tol || forced(i + 1))
            .map(|(i, _)| i + 1)
            .collect();
        Self {
            feasible: violated_indices.is_empty(),
            violated_indices,
            slack,
        }
    }

    /// Smallest slack over all indices.
    pub fn min_slack(&self) -> f64 {
        self.slack.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Backward cumulative sums of the spectrum.
pub fn vidal_monotones(s: &SchmidtSpectrum) -> MonotoneVector {
    let mut values = vec![0.0; s.rank()];
    let mut tail = 0.0;
    for (value, &alpha) in values.iter_mut().zip(s.coeffs()).rev() {
        tail += alpha;
        *value = tail;
    }
    MonotoneVector(values)
}

/// Deterministic convertibility of `source` into `target` by LQCC.
pub fn nielsen_feasible(source: &SchmidtSpectrum, target: &SchmidtSpectrum) -> FeasibilityReport {
    nielsen_feasible_with_tol(source, target, FEASIBILITY_TOL)
}

pub fn nielsen_feasible_with_tol(
    source: &SchmidtSpectrum,
    target: &SchmidtSpectrum,
    tol: f64,
) -> FeasibilityReport {
    let from = vidal_monotones(source);
    let to = vidal_monotones(target);
    let len = from.len().max(to.len());
    let slack = (1..=len).map(|l| from.at(l) - to.at(l)).collect();
    // The Schmidt rank can never grow, however small the extra coefficients.
    let source_rank = source.rank();
    FeasibilityReport::from_slack(slack, tol, |l| l > source_rank)
}

/// Probabilistic convertibility of `source` into the ensemble.
pub fn ensemble_feasible(source: &SchmidtSpectrum, ensemble: &TargetEnsemble) -> FeasibilityReport {
    ensemble_feasible_with_tol(source, ensemble, FEASIBILITY_TOL)
}

pub fn ensemble_feasible_with_tol(
    source: &SchmidtSpectrum,
    ensemble: &TargetEnsemble,
    tol: f64,
) -> FeasibilityReport {
    let from = vidal_monotones(source);
    let len = from.len().max(ensemble.max_rank());
    let mut averaged = vec![0.0; len];
    for (p, target) in ensemble.iter() {
        let to = vidal_monotones(target);
        for (l, avg) in averaged.iter_mut().enumerate() {
            *avg += p * to.at(l + 1);
        }
    }
    let slack = averaged
        .iter()
        .enumerate()
        .map(|(i, avg)| from.at(i + 1) - avg)
        .collect();
    let source_rank = source.rank();
    let max_rank = ensemble.max_rank();
    FeasibilityReport::from_slack(slack, tol, |l| l > source_rank && l <= max_rank)
}

/// Largest probability of turning `source` into `target` by LQCC.
///
/// Equals `min_l E_l(source) / E_l(target)` over the indices where the target
/// monotone is positive, clamped to `[0, 1]`.
pub fn max_conversion_probability(source: &SchmidtSpectrum, target: &SchmidtSpectrum) -> f64 {
    let from = vidal_monotones(source);
    let to = vidal_monotones(target);
    (1..=to.len())
        .filter(|&l| to.at(l) > 0.0)
        .map(|l| from.at(l) / to.at(l))
        .fold(1.0_f64, f64::min)
        .clamp(0.0, 1.0)
}
