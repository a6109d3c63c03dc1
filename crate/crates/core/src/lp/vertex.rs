use itertools::Itertools;

use super::{solve, LpProblem, LpScalar};
use crate::error::{Error, Result};

/// Largest `variables + constraints` accepted by [`enumerate_vertices`].
pub const ENUMERATION_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct VertexOptimum<T = f64> {
    pub values: Vec<T>,
    pub objective_value: T,
    pub basis: Vec<usize>,
}

/// Best basic feasible solution by exhaustive search over bases.
///
/// Every choice of `m` columns from `[A | S]` is solved directly; nonsingular
/// choices with a nonnegative solution are vertices. Returns `Ok(None)` when
/// no vertex is feasible. Unboundedness is not detected: the result is the
/// best vertex, which is the optimum only for bounded problems.
pub fn enumerate_vertices<T: LpScalar>(prob: &LpProblem<T>) -> Result<Option<VertexOptimum<T>>> {
    let n = prob.num_vars();
    let m = prob.num_constraints();
    if n + m > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            vars: n,
            constraints: m,
            limit: ENUMERATION_LIMIT,
        });
    }
    let columns: Vec<Vec<T>> = (0..prob.num_columns()).map(|j| prob.column(j)).collect();
    let tol = T::feasibility_tol();
    let mut best: Option<VertexOptimum<T>> = None;
    for basis in (0..columns.len()).combinations(m) {
        let b_mat: Vec<Vec<T>> = (0..m)
            .map(|i| basis.iter().map(|&j| columns[j][i].clone()).collect())
            .collect();
        let Some(x_basic) = solve(&b_mat, prob.bounds()) else {
            continue;
        };
        if x_basic.iter().any(|v| *v < -tol.clone()) {
            continue;
        }
        let mut values = vec![T::zero(); n];
        for (&j, v) in basis.iter().zip(&x_basic) {
            if j < n {
                values[j] = v.clone();
            }
        }
        let objective_value = prob.evaluate(&values);
        if best
            .as_ref()
            .is_none_or(|b| objective_value > b.objective_value.clone())
        {
            best = Some(VertexOptimum {
                values,
                objective_value,
                basis,
            });
        }
    }
    Ok(best)
}
