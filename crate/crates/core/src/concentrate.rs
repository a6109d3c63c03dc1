//! Optimal entanglement concentration of a single pure state.
//!
//! Alice and Bob end in the maximally entangled state `|phi_j>` of `j`
//! levels with probability `p_j`. Feasibility of such a distribution is the
//! linear system `B p <= q` with `b_lj = (j + 1 - l) / j` for `j >= l` and
//! `q_l = E_l(psi)`. Maximizing the average entanglement `sum_j p_j ln j`
//! gives `p_j = j (alpha_j - alpha_{j+1})`, which saturates every row. Its
//! optimality is certified by the reduced costs
//! `z_k = sum_i ln(i) beta_ik >= 0`, where `beta = B^{-1}` has only three
//! nonzero entries per column.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{simplex_solve, LpProblem, LpScalar, LpSolution, Relation};
use crate::monotones::vidal_monotones;
use crate::schmidt::{xlnx, SchmidtSpectrum};
use crate::transform::{DiagonalPovm, PovmElement};

/// Default cap on the number of coefficients of a tensor power.
pub const DEFAULT_SIZE_CAP: u64 = 1 << 20;
/// Allowed negative margin on certificate entries.
pub const CERT_TOL: f64 = 1e-12;

/// `E_l(|phi_j>)`: `(j - l + 1) / j` for `l <= j`, else 0.
pub fn phi_monotone(j: usize, l: usize) -> f64 {
    assert!(j >= 1 && l >= 1, "levels and indices are one-based");
    if l <= j {
        (j - l + 1) as f64 / j as f64
    } else {
        0.0
    }
}

/// Probabilities over maximally entangled levels `1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationPlan {
    /// `probabilities[j-1]` is the chance of ending in `|phi_j>`.
    pub probabilities: Vec<f64>,
    /// `sum_j p_j ln j`, in nats.
    pub expected_entanglement: f64,
}

impl ConcentrationPlan {
    pub fn from_probabilities(probabilities: Vec<f64>) -> Self {
        let expected_entanglement = probabilities
            .iter()
            .enumerate()
            .map(|(i, p)| p * ((i + 1) as f64).ln())
            .sum();
        Self {
            probabilities,
            expected_entanglement,
        }
    }

    pub fn levels(&self) -> usize {
        self.probabilities.len()
    }
}

/// `p_j = j (alpha_j - alpha_{j+1})` with `alpha_{N+1} = 0`.
pub fn optimal_probabilities<T: LpScalar>(alphas: &[T]) -> Vec<T> {
    (0..alphas.len())
        .map(|i| {
            let next = alphas.get(i + 1).cloned().unwrap_or_else(T::zero);
            T::from_u64(i as u64 + 1) * (alphas[i].clone() - next)
        })
        .collect()
}

/// The distribution maximizing the average distilled entanglement.
pub fn optimal_plan(s: &SchmidtSpectrum) -> ConcentrationPlan {
    let probabilities = optimal_probabilities(s.coeffs());
    let total: f64 = probabilities.iter().sum();
    debug_assert!((total - 1.0).abs() < 1e-12, "telescoping sum is {total}");
    let alphas = s.coeffs();
    let expected_entanglement = (0..alphas.len())
        .map(|i| {
            let next = alphas.get(i + 1).copied().unwrap_or(0.0);
            (alphas[i] - next) * xlnx((i + 1) as f64)
        })
        .sum();
    ConcentrationPlan {
        probabilities,
        expected_entanglement,
    }
}

/// Objective weights for the level probabilities.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    /// `ln j`, the entanglement of `|phi_j>` in nats.
    Ln,
    /// `log2 j`.
    Log2,
    /// 0 for the product state, 1 for any entangled level.
    Indicator,
    Custom(Vec<f64>),
}

impl Weights {
    pub fn values(&self, levels: usize) -> Result<Vec<f64>> {
        let values = match self {
            Weights::Ln => (1..=levels).map(|j| (j as f64).ln()).collect(),
            Weights::Log2 => (1..=levels).map(|j| (j as f64).log2()).collect(),
            Weights::Indicator => (1..=levels)
                .map(|j| if j == 1 { 0.0 } else { 1.0 })
                .collect(),
            Weights::Custom(w) => {
                if w.len() != levels {
                    return Err(Error::WeightLengthMismatch {
                        expected: levels,
                        got: w.len(),
                    });
                }
                w.clone()
            }
        };
        Ok(values)
    }
}

/// `b_lj = (j + 1 - l) / j` for `j >= l`, zero below the diagonal.
pub fn constraint_matrix<T: LpScalar>(levels: usize) -> Vec<Vec<T>> {
    (1..=levels)
        .map(|l| {
            (1..=levels)
                .map(|j| {
                    if j >= l {
                        T::from_u64((j + 1 - l) as u64) / T::from_u64(j as u64)
                    } else {
                        T::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Tail sums `q_l = alpha_l + ... + alpha_N`.
pub fn tail_sums<T: LpScalar>(alphas: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); alphas.len()];
    let mut tail = T::zero();
    for (slot, a) in out.iter_mut().zip(alphas).rev() {
        tail = tail + a.clone();
        *slot = tail.clone();
    }
    out
}

/// The concentration LP in any scalar type.
///
/// Row `l = 1` is an equality: the level probabilities form a distribution.
/// Rows `l >= 2` are the `<=` monotone constraints.
pub fn concentration_lp_in<T: LpScalar>(alphas: &[T], weights: Vec<T>) -> Result<LpProblem<T>> {
    let levels = alphas.len();
    if weights.len() != levels {
        return Err(Error::WeightLengthMismatch {
            expected: levels,
            got: weights.len(),
        });
    }
    let mut relations = vec![Relation::Le; levels];
    if let Some(first) = relations.first_mut() {
        *first = Relation::Eq;
    }
    LpProblem::with_relations(
        weights,
        constraint_matrix(levels),
        tail_sums(alphas),
        relations,
    )
}

/// `maximize weights.p` subject to the monotone constraints of `s`.
pub fn concentration_lp(s: &SchmidtSpectrum, weights: &[f64]) -> Result<LpProblem> {
    concentration_lp_in(s.coeffs(), weights.to_vec())
}

/// `B p - q` for the spectrum's constraint system.
pub fn saturation_residual<T: LpScalar>(alphas: &[T], p: &[T]) -> Vec<T> {
    let b = constraint_matrix::<T>(alphas.len());
    b.iter()
        .zip(tail_sums(alphas))
        .map(|(row, q)| {
            row.iter()
                .zip(p)
                .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
                - q
        })
        .collect()
}

/// Plan from solving the weighted concentration LP with the simplex method.
#[derive(Debug, Clone)]
pub struct WeightedPlan {
    pub plan: ConcentrationPlan,
    /// `weights.p` at the optimum.
    pub objective: f64,
    pub problem: LpProblem,
    pub solution: LpSolution,
}

pub fn solve_weighted(s: &SchmidtSpectrum, weights: &Weights) -> Result<WeightedPlan> {
    let problem = concentration_lp(s, &weights.values(s.rank())?)?;
    let solution = simplex_solve(&problem);
    // p = 0 except p_1 = 1 is always feasible and the feasible set is a
    // subset of the probability simplex, so neither status can occur.
    if !solution.is_optimal() {
        return Err(Error::NotOptimal(format!("{:?}", solution.status)));
    }
    Ok(WeightedPlan {
        plan: ConcentrationPlan::from_probabilities(solution.values.clone()),
        objective: solution.objective_value,
        problem,
        solution,
    })
}

/// Entry `beta_ik` of `B^{-1}`, one-based.
pub fn inverse_entry(i: usize, k: usize) -> f64 {
    if i == k {
        k as f64
    } else if i + 1 == k {
        -2.0 * (k as f64 - 1.0)
    } else if i + 2 == k {
        k as f64 - 2.0
    } else {
        0.0
    }
}

/// Reduced costs `z_k` of the saturated basis for weights `ln j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityCertificate {
    pub z_values: Vec<f64>,
    pub passed: bool,
}

/// `z_k = sum_i ln(i) beta_ik` for `k = 1..=levels`.
///
/// For `k >= 3` this is `(k-2) ln(k-2) + k ln k - 2 (k-1) ln(k-1)`, which is
/// nonnegative because `x ln x` is convex. It does not depend on the spectrum.
pub fn optimality_certificate(levels: usize) -> OptimalityCertificate {
    let z_values: Vec<f64> = (1..=levels)
        .map(|k| {
            (k.saturating_sub(2).max(1)..=k)
                .map(|i| (i as f64).ln() * inverse_entry(i, k))
                .sum()
        })
        .collect();
    let passed = z_values.iter().all(|&z| z >= -CERT_TOL);
    OptimalityCertificate { z_values, passed }
}

/// Single local measurement realising the optimal plan.
///
/// Element `j` has `sqrt((alpha_j - alpha_{j+1}) / alpha_i)` for `i <= j`
/// and zero elsewhere; it leaves `|phi_j>` with probability `p_j`. Elements
/// with `alpha_j = alpha_{j+1}` are zero but kept so labels equal levels.
pub fn single_shot_povm(s: &SchmidtSpectrum) -> DiagonalPovm {
    let alphas = s.coeffs();
    let n = alphas.len();
    let elements = (0..n)
        .map(|j| {
            let gap = alphas[j] - alphas.get(j + 1).copied().unwrap_or(0.0);
            let diag = (0..n)
                .map(|i| {
                    if i <= j {
                        (gap / alphas[i]).sqrt()
                    } else {
                        0.0
                    }
                })
                .collect();
            PovmElement { label: j + 1, diag }
        })
        .collect();
    DiagonalPovm {
        elements,
        support_rank: n,
    }
}

/// Distinct products of an `n`-fold tensor power with their multiplicities,
/// sorted by nonincreasing value and normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSpectrum {
    pub groups: Vec<(f64, u64)>,
}

impl GroupedSpectrum {
    pub fn total_count(&self) -> u64 {
        self.groups.iter().map(|g| g.1).sum()
    }

    pub fn expand(&self) -> Vec<f64> {
        self.groups
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat_n(v, m as usize))
            .collect()
    }

    /// `sum_j (a_j - a_{j+1}) j ln j` over the expanded spectrum, where only
    /// group boundaries contribute.
    pub fn optimal_yield(&self) -> f64 {
        let mut cumulative = 0u64;
        let mut total = 0.0;
        for (g, &(value, count)) in self.groups.iter().enumerate() {
            cumulative += count;
            let next = self.groups.get(g + 1).map_or(0.0, |x| x.0);
            total += (value - next) * xlnx(cumulative as f64);
        }
        total
    }
}

fn check_cap(rank: usize, copies: usize, cap: u64) -> Result<()> {
    let requested = u32::try_from(copies)
        .ok()
        .and_then(|c| (rank as u128).checked_pow(c))
        .unwrap_or(u128::MAX);
    if requested > cap as u128 {
        return Err(Error::SizeCapExceeded { requested, cap });
    }
    Ok(())
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Groups the coefficients of `s^{(x) copies}` by exponent pattern.
pub fn grouped_tensor_power(
    s: &SchmidtSpectrum,
    copies: usize,
    cap: u64,
) -> Result<GroupedSpectrum> {
    if copies == 0 {
        return Err(Error::InvalidArgument(
            "copy count must be at least 1".into(),
        ));
    }
    check_cap(s.rank(), copies, cap)?;
    let alphas = s.coeffs();
    let mut groups = Vec::new();
    let mut exponents = vec![0usize; alphas.len()];
    collect_compositions(alphas, copies, 0, &mut exponents, &mut groups);
    let total: f64 = groups.iter().map(|&(v, m)| v * m as f64).sum();
    for g in &mut groups {
        g.0 /= total;
    }
    groups.retain(|g| g.0 > 0.0);
    groups.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(GroupedSpectrum { groups })
}

fn collect_compositions(
    alphas: &[f64],
    remaining: usize,
    index: usize,
    exponents: &mut [usize],
    out: &mut Vec<(f64, u64)>,
) {
    if index + 1 == alphas.len() {
        exponents[index] = remaining;
        let copies: usize = exponents.iter().sum();
        let mut left = copies as u64;
        let mut multiplicity = 1u64;
        let mut value = 1.0;
        for (&a, &k) in alphas.iter().zip(exponents.iter()) {
            multiplicity *= binomial(left, k as u64);
            left -= k as u64;
            value *= a.powi(k as i32);
        }
        out.push((value, multiplicity));
        return;
    }
    for k in (0..=remaining).rev() {
        exponents[index] = k;
        collect_compositions(alphas, remaining - k, index + 1, exponents, out);
    }
}

/// Spectrum of `copies` independent copies of the state.
pub fn tensor_power(s: &SchmidtSpectrum, copies: usize) -> Result<SchmidtSpectrum> {
    tensor_power_with_cap(s, copies, DEFAULT_SIZE_CAP)
}

pub fn tensor_power_with_cap(
    s: &SchmidtSpectrum,
    copies: usize,
    cap: u64,
) -> Result<SchmidtSpectrum> {
    let grouped = grouped_tensor_power(s, copies, cap)?;
    Ok(SchmidtSpectrum::from_sorted_positive(grouped.expand()))
}

/// Per-copy optimal yield `<E>_max(s^{(x) n}) / n` for `n = 1..=max_n`.
pub fn asymptotic_yield_curve(s: &SchmidtSpectrum, max_n: usize) -> Result<Vec<(usize, f64)>> {
    asymptotic_yield_curve_with_cap(s, max_n, DEFAULT_SIZE_CAP)
}

pub fn asymptotic_yield_curve_with_cap(
    s: &SchmidtSpectrum,
    max_n: usize,
    cap: u64,
) -> Result<Vec<(usize, f64)>> {
    check_cap(s.rank(), max_n, cap)?;
    (1..=max_n)
        .map(|n| {
            let grouped = grouped_tensor_power(s, n, cap)?;
            Ok((n, grouped.optimal_yield() / n as f64))
        })
        .collect()
}

/// `sum_j p_j E_l(phi_j)` for every `l`, to compare with `E_l(s)`.
pub fn averaged_phi_monotones(plan: &ConcentrationPlan) -> Vec<f64> {
    let n = plan.levels();
    (1..=n)
        .map(|l| {
            plan.probabilities
                .iter()
                .enumerate()
                .map(|(i, p)| p * phi_monotone(i + 1, l))
                .sum()
        })
        .collect()
}

/// Largest `|sum_j p_j E_l(phi_j) - E_l(s)|`.
pub fn monotone_conservation_gap(s: &SchmidtSpectrum, plan: &ConcentrationPlan) -> f64 {
    let e = vidal_monotones(s);
    averaged_phi_monotones(plan)
        .iter()
        .enumerate()
        .map(|(i, v)| (v - e.at(i + 1)).abs())
        .fold(0.0, f64::max)
}
