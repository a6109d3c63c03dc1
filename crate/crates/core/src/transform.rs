//! Constructive side of probabilistic LQCC conversion.
//!
//! A feasible ensemble `{(p_j, eta_j)}` is realised in two stages. First the
//! source is converted deterministically into the average target, whose
//! spectrum is `gamma_i = sum_j p_j mu_ji`; that step exists whenever the
//! ensemble passes [`crate::ensemble_feasible`]. Then Alice measures the
//! diagonal operators `A_j = sum_i sqrt(p_j mu_ji / gamma_i) |i><i|`, which
//! leave the average state in `eta_j` with probability `p_j`.
//!
//! Targets are taken in the standard Schmidt basis. A target given in another
//! basis differs from its standard form by a local unitary, applied after the
//! measurement reports outcome `j`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schmidt::{make_spectrum, SchmidtSpectrum};
use crate::NORM_TOL;

/// Probabilistic target of a transformation: `(p_j, eta_j)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetEnsemble {
    entries: Vec<(f64, SchmidtSpectrum)>,
}

impl TargetEnsemble {
    /// Validates probabilities and drops zero-probability entries.
    pub fn new(entries: Vec<(f64, SchmidtSpectrum)>) -> Result<Self> {
        for (index, (p, _)) in entries.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 || *p > 1.0 + NORM_TOL {
                return Err(Error::InvalidProbability { index, value: *p });
            }
        }
        let entries: Vec<_> = entries.into_iter().filter(|(p, _)| *p > 0.0).collect();
        if entries.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let sum: f64 = entries.iter().map(|(p, _)| p).sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::EnsembleNotNormalized { sum });
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &SchmidtSpectrum)> {
        self.entries.iter().map(|(p, s)| (*p, s))
    }

    pub fn entries(&self) -> &[(f64, SchmidtSpectrum)] {
        &self.entries
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|(p, _)| *p).collect()
    }

    /// Largest Schmidt rank among the targets.
    pub fn max_rank(&self) -> usize {
        self.entries
            .iter()
            .map(|(_, s)| s.rank())
            .max()
            .unwrap_or(0)
    }
}

/// `gamma_i = sum_j p_j mu_ji` over zero-padded targets, unnormalized.
fn average_coefficients(e: &TargetEnsemble) -> Vec<f64> {
    let len = e.max_rank();
    let mut gamma = vec![0.0; len];
    for (p, target) in e.iter() {
        for (g, mu) in gamma.iter_mut().zip(target.coeffs()) {
            *g += p * mu;
        }
    }
    gamma
}

/// Spectrum of the average target state.
pub fn average_target(e: &TargetEnsemble) -> SchmidtSpectrum {
    let gamma = average_coefficients(e);
    // A convex combination of nonincreasing vectors is nonincreasing.
    assert!(
        gamma.windows(2).all(|w| w[0] >= w[1]),
        "average of ordered spectra is not ordered: {gamma:?}"
    );
    make_spectrum(&gamma, 0.0).expect("average of valid spectra is a valid spectrum")
}

/// One group of outcomes that share a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DieGroup {
    /// One-based label of the merged outcome.
    pub representative: usize,
    /// One-based labels of the original outcomes with relative weights.
    pub members: Vec<(usize, f64)>,
}

/// Classical redistribution of merged outcomes back onto the original labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DieTable {
    pub groups: Vec<DieGroup>,
}

impl DieTable {
    /// Each original outcome's probability, given probabilities of the merged
    /// outcomes in representative order.
    pub fn expand(&self, merged: &[f64]) -> Vec<f64> {
        let total = self
            .groups
            .iter()
            .flat_map(|g| g.members.iter().map(|(label, _)| *label))
            .max()
            .unwrap_or(0);
        let mut out = vec![0.0; total];
        for group in &self.groups {
            let q = merged[group.representative - 1];
            for &(label, weight) in &group.members {
                out[label - 1] += q * weight;
            }
        }
        out
    }

    /// Picks an original label within the group of `representative`, given a
    /// uniform draw `u` in `[0, 1)`.
    pub fn roll(&self, representative: usize, u: f64) -> usize {
        let group = &self.groups[representative - 1];
        let mut cumulative = 0.0;
        for &(label, weight) in &group.members {
            cumulative += weight;
            if u < cumulative {
                return label;
            }
        }
        group
            .members
            .last()
            .map(|(label, _)| *label)
            .unwrap_or(representative)
    }

    pub fn is_trivial(&self) -> bool {
        self.groups.iter().all(|g| g.members.len() == 1)
    }
}

fn same_spectrum(a: &SchmidtSpectrum, b: &SchmidtSpectrum, tol: f64) -> bool {
    let len = a.rank().max(b.rank());
    (0..len).all(|i| (a.coeff_or_zero(i) - b.coeff_or_zero(i)).abs() <= tol)
}

/// Merges targets whose spectra agree componentwise within `merge_tol`.
///
/// A merged entry keeps the spectrum of its first member. The returned
/// table says how to roll a die among the original outcomes afterwards.
pub fn merge_duplicates(e: &TargetEnsemble, merge_tol: f64) -> (TargetEnsemble, DieTable) {
    let mut merged: Vec<(f64, SchmidtSpectrum)> = Vec::new();
    let mut members: Vec<Vec<(usize, f64)>> = Vec::new();
    for (index, (p, target)) in e.iter().enumerate() {
        match merged
            .iter()
            .position(|(_, rep)| same_spectrum(rep, target, merge_tol))
        {
            Some(group) => {
                merged[group].0 += p;
                members[group].push((index + 1, p));
            }
            None => {
                merged.push((p, target.clone()));
                members.push(vec![(index + 1, p)]);
            }
        }
    }
    let groups = members
        .into_iter()
        .zip(&merged)
        .enumerate()
        .map(|(g, (list, (total, _)))| DieGroup {
            representative: g + 1,
            members: list
                .into_iter()
                .map(|(label, p)| (label, p / total))
                .collect(),
        })
        .collect();
    (TargetEnsemble { entries: merged }, DieTable { groups })
}

/// Measurement element diagonal in the Schmidt basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PovmElement {
    /// One-based outcome label.
    pub label: usize,
    /// Diagonal entries `d_i >= 0` over Schmidt indices.
    pub diag: Vec<f64>,
}

/// Local measurement on Alice's side, diagonal in the Schmidt basis.
///
/// Completeness is required on the first `support_rank` basis vectors; the
/// complement `1 - P` is implicit and never fires on states supported there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalPovm {
    pub elements: Vec<PovmElement>,
    pub support_rank: usize,
}

impl DiagonalPovm {
    pub fn new(elements: Vec<PovmElement>, support_rank: usize) -> Result<Self> {
        for element in &elements {
            if element.diag.len() != support_rank {
                return Err(Error::DimensionMismatch {
                    expected: support_rank,
                    got: element.diag.len(),
                });
            }
            for (index, &d) in element.diag.iter().enumerate() {
                if !d.is_finite() {
                    return Err(Error::NonFinite { index });
                }
                if d < 0.0 {
                    return Err(Error::NegativeCoefficient { index, value: d });
                }
            }
        }
        Ok(Self {
            elements,
            support_rank,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.elements.iter().map(|e| e.label).collect()
    }

    /// `max_i |sum_j d_ji^2 - 1|` over the first `upto` indices.
    pub fn completeness_residual_on(&self, upto: usize) -> f64 {
        (0..upto.min(self.support_rank))
            .map(|i| {
                let total: f64 = self.elements.iter().map(|e| e.diag[i] * e.diag[i]).sum();
                (total - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn completeness_residual(&self) -> f64 {
        self.completeness_residual_on(self.support_rank)
    }

    /// `sum_i d_ji^2 alpha_i` for every element, in element order.
    pub fn outcome_probabilities(&self, state: &SchmidtSpectrum) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| {
                e.diag
                    .iter()
                    .zip(state.coeffs())
                    .map(|(d, a)| d * d * a)
                    .sum()
            })
            .collect()
    }
}

/// Builds `A_j = sum_i sqrt(p_j mu_ji / gamma_i) |i><i|` for the ensemble.
///
/// The measurement acts on the average target state, see [`average_target`].
pub fn build_theorem1_povm(e: &TargetEnsemble) -> DiagonalPovm {
    let gamma = average_coefficients(e);
    let elements = e
        .iter()
        .enumerate()
        .map(|(j, (p, target))| {
            let diag = gamma
                .iter()
                .enumerate()
                .map(|(i, &g)| {
                    let mu = target.coeff_or_zero(i);
                    if g > 0.0 {
                        (p * mu / g).sqrt()
                    } else {
                        assert!(
                            mu == 0.0,
                            "average coefficient vanishes under a positive target"
                        );
                        0.0
                    }
                })
                .collect();
            PovmElement { label: j + 1, diag }
        })
        .collect();
    DiagonalPovm {
        elements,
        support_rank: gamma.len(),
    }
}

/// Applies one diagonal element to a state.
///
/// Returns the outcome probability and the normalized post-measurement
/// spectrum, or `None` for the state when the outcome has probability zero.
pub fn apply_povm_element(
    diag: &[f64],
    state: &SchmidtSpectrum,
) -> Result<(f64, Option<SchmidtSpectrum>)> {
    if diag.len() < state.rank() {
        return Err(Error::DimensionMismatch {
            expected: state.rank(),
            got: diag.len(),
        });
    }
    let weights: Vec<f64> = diag
        .iter()
        .zip(state.coeffs())
        .map(|(d, a)| d * d * a)
        .collect();
    let probability: f64 = weights.iter().sum();
    if probability <= 0.0 {
        return Ok((0.0, None));
    }
    Ok((probability, Some(make_spectrum(&weights, 0.0)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(raw: &[f64]) -> SchmidtSpectrum {
        SchmidtSpectrum::new(raw).unwrap()
    }

    #[test]
    fn ensemble_validation() {
        let s = SchmidtSpectrum::product();
        assert!(matches!(
            TargetEnsemble::new(vec![(0.5, s.clone())]),
            Err(Error::EnsembleNotNormalized { .. })
        ));
        assert!(matches!(
            TargetEnsemble::new(vec![(-0.1, s.clone()), (1.1, s.clone())]),
            Err(Error::InvalidProbability { index: 0, .. })
        ));
        assert_eq!(TargetEnsemble::new(vec![]), Err(Error::EmptyEnsemble));
        let e = TargetEnsemble::new(vec![(0.0, spec(&[0.5, 0.5])), (1.0, s)]).unwrap();
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn average_target_examples() {
        let s = spec(&[0.6, 0.3, 0.1]);
        let e = TargetEnsemble::new(vec![(1.0, s.clone())]).unwrap();
        let avg = average_target(&e);
        assert_eq!(avg.rank(), 3);
        assert!(avg
            .coeffs()
            .iter()
            .zip(s.coeffs())
            .all(|(a, b)| (a - b).abs() < 1e-15));

        let e = TargetEnsemble::new(vec![
            (0.5, SchmidtSpectrum::product()),
            (0.5, spec(&[0.5, 0.5])),
        ])
        .unwrap();
        let avg = average_target(&e);
        assert!((avg.coeffs()[0] - 0.75).abs() < 1e-15);
        assert!((avg.coeffs()[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn merge_duplicates_examples() {
        let bell = spec(&[0.5, 0.5]);
        let e = TargetEnsemble::new(vec![(0.3, bell.clone()), (0.7, bell.clone())]).unwrap();
        let (merged, die) = merge_duplicates(&e, 1e-9);
        assert_eq!(merged.len(), 1);
        assert!((merged.entries()[0].0 - 1.0).abs() < 1e-15);
        assert_eq!(die.groups.len(), 1);
        let weights: Vec<f64> = die.groups[0].members.iter().map(|m| m.1).collect();
        assert!((weights[0] - 0.3).abs() < 1e-15 && (weights[1] - 0.7).abs() < 1e-15);
        let expanded = die.expand(&merged.probabilities());
        assert!((expanded[0] - 0.3).abs() < 1e-15 && (expanded[1] - 0.7).abs() < 1e-15);

        let e = TargetEnsemble::new(vec![(0.4, bell), (0.6, SchmidtSpectrum::product())]).unwrap();
        let (merged, die) = merge_duplicates(&e, 1e-9);
        assert_eq!(merged, e);
        assert!(die.is_trivial());
    }

    #[test]
    fn die_roll_respects_weights() {
        let die = DieTable {
            groups: vec![DieGroup {
                representative: 1,
                members: vec![(1, 0.25), (3, 0.75)],
            }],
        };
        assert_eq!(die.roll(1, 0.1), 1);
        assert_eq!(die.roll(1, 0.3), 3);
        assert_eq!(die.roll(1, 0.999_999), 3);
    }

    #[test]
    fn ensemble_povm_single_target_is_identity() {
        let s = spec(&[0.6, 0.3, 0.1]);
        let e = TargetEnsemble::new(vec![(1.0, s)]).unwrap();
        let povm = build_theorem1_povm(&e);
        assert_eq!(povm.len(), 1);
        for d in &povm.elements[0].diag {
            assert!((d - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ensemble_povm_two_targets() {
        let e = TargetEnsemble::new(vec![
            (0.5, SchmidtSpectrum::product()),
            (0.5, spec(&[0.5, 0.5])),
        ])
        .unwrap();
        let povm = build_theorem1_povm(&e);
        let a1 = &povm.elements[0].diag;
        let a2 = &povm.elements[1].diag;
        assert!((a1[0] - (0.5f64 / 0.75).sqrt()).abs() < 1e-15);
        assert_eq!(a1[1], 0.0);
        assert!((a2[0] - (0.25f64 / 0.75).sqrt()).abs() < 1e-15);
        assert!((a2[1] - 1.0).abs() < 1e-15);
        assert!(povm.completeness_residual() < 1e-15);

        let avg = average_target(&e);
        let (p, post) = apply_povm_element(a1, &avg).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(post.unwrap().coeffs(), &[1.0]);
        let (p, post) = apply_povm_element(a2, &avg).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let post = post.unwrap();
        assert!((post.coeffs()[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn apply_examples() {
        let s = spec(&[0.5, 0.3, 0.2]);
        let (p, post) = apply_povm_element(&[1.0, 1.0, 1.0], &s).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert_eq!(post.unwrap(), s);

        let (p, post) = apply_povm_element(&[1.0, 0.0], &spec(&[0.5, 0.5])).unwrap();
        assert_eq!(p, 0.5);
        assert_eq!(post.unwrap().coeffs(), &[1.0]);

        let (p, post) = apply_povm_element(&[0.0, 0.0], &spec(&[0.5, 0.5])).unwrap();
        assert_eq!((p, post), (0.0, None));

        assert!(apply_povm_element(&[1.0], &s).is_err());
    }
}
