#![allow(dead_code)]

use lqcc_core::lp::{simplex_solve, LpProblem, LpStatus, Relation};
use lqcc_core::{SchmidtSpectrum, TargetEnsemble};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random spectrum of exactly `n` levels; about one in five has a tie.
pub fn random_spectrum<R: Rng>(rng: &mut R, n: usize) -> SchmidtSpectrum {
    let skew: f64 = rng.random_range(0.5..3.0);
    let mut raw: Vec<f64> = (0..n)
        .map(|_| rng.random_range(0.01f64..1.0).powf(skew))
        .collect();
    if n >= 2 && rng.random_bool(0.2) {
        let i = rng.random_range(1..n);
        raw[i] = raw[i - 1];
    }
    let s = SchmidtSpectrum::new(&raw).unwrap();
    assert_eq!(s.rank(), n);
    s
}

/// Random rank between 1 and `max_n`.
pub fn random_spectrum_upto<R: Rng>(rng: &mut R, max_n: usize) -> SchmidtSpectrum {
    let n = rng.random_range(1..=max_n);
    random_spectrum(rng, n)
}

pub fn random_probabilities<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05f64..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

pub fn random_ensemble<R: Rng>(rng: &mut R, max_n: usize, max_m: usize) -> TargetEnsemble {
    let m = rng.random_range(1..=max_m);
    let probs = random_probabilities(rng, m);
    TargetEnsemble::new(
        probs
            .into_iter()
            .map(|p| (p, random_spectrum_upto(rng, max_n)))
            .collect(),
    )
    .unwrap()
}

/// A source that can reach the ensemble: the average target itself, or a
/// spectrum majorized by it (mixing toward uniform on a wider support).
pub fn feasible_source<R: Rng>(rng: &mut R, e: &TargetEnsemble, max_n: usize) -> SchmidtSpectrum {
    let avg = lqcc_core::average_target(e);
    if rng.random_bool(0.3) {
        return avg;
    }
    let n = rng.random_range(avg.rank()..=max_n.max(avg.rank()));
    let t: f64 = rng.random_range(0.0..1.0);
    let mixed: Vec<f64> = (0..n)
        .map(|i| (1.0 - t) * avg.coeff_or_zero(i) + t / n as f64)
        .collect();
    SchmidtSpectrum::new(&mixed).unwrap()
}

/// Whether `alpha` is majorized by `mu`, decided as LP feasibility of a
/// doubly stochastic `D` with `alpha = D mu`.
pub fn majorized_by_lp(alpha: &[f64], mu: &[f64]) -> bool {
    let n = alpha.len().max(mu.len());
    let pad = |v: &[f64]| {
        (0..n)
            .map(|i| v.get(i).copied().unwrap_or(0.0))
            .collect::<Vec<_>>()
    };
    let (alpha, mu) = (pad(alpha), pad(mu));
    let var = |i: usize, k: usize| i * n + k;
    let mut matrix = Vec::new();
    let mut bounds = Vec::new();
    for i in 0..n {
        let mut row = vec![0.0; n * n];
        for k in 0..n {
            row[var(i, k)] = 1.0;
        }
        matrix.push(row);
        bounds.push(1.0);
    }
    for k in 0..n {
        let mut row = vec![0.0; n * n];
        for i in 0..n {
            row[var(i, k)] = 1.0;
        }
        matrix.push(row);
        bounds.push(1.0);
    }
    for i in 0..n {
        let mut row = vec![0.0; n * n];
        for k in 0..n {
            row[var(i, k)] = mu[k];
        }
        matrix.push(row);
        bounds.push(alpha[i]);
    }
    let relations = vec![Relation::Eq; matrix.len()];
    let lp = LpProblem::with_relations(vec![0.0; n * n], matrix, bounds, relations).unwrap();
    match simplex_solve(&lp).status {
        LpStatus::Optimal => true,
        LpStatus::Infeasible => false,
        LpStatus::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

/// Unnormalized average `sum_j p_j mu_j` over zero-padded targets.
pub fn mixed_targets(e: &TargetEnsemble) -> Vec<f64> {
    let len = e.max_rank();
    let mut gamma = vec![0.0; len];
    for (p, t) in e.iter() {
        for (i, g) in gamma.iter_mut().enumerate() {
            *g += p * t.coeff_or_zero(i);
        }
    }
    gamma
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}
