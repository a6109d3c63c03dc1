use super::{dot, solve, LpProblem, LpScalar, LpSolution};

/// Re-derives a claimed optimum from its basis.
///
/// Solves `B x_B = q` and `B^T y = c_B` for the stated basis columns, then
/// checks that `x_B >= 0`, that the reported values are that basic solution
/// and satisfy every constraint, and that every reduced cost
/// `y.A_j - c_j` is nonnegative, all at `tol`. A singular or malformed basis
/// fails verification.
pub fn verify_solution<T: LpScalar>(prob: &LpProblem<T>, sol: &LpSolution<T>, tol: T) -> bool {
    let n = prob.num_vars();
    let m = prob.num_constraints();
    let columns = prob.num_columns();
    if !sol.is_optimal() || sol.values.len() != n || sol.basis.len() != m {
        return false;
    }
    let mut seen = vec![false; columns];
    for &b in &sol.basis {
        if b >= columns || seen[b] {
            return false;
        }
        seen[b] = true;
    }

    let basis_cols: Vec<Vec<T>> = sol.basis.iter().map(|&j| prob.column(j)).collect();
    // Row-major B and its transpose.
    let b_mat: Vec<Vec<T>> = (0..m)
        .map(|i| basis_cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    let Some(x_basic) = solve(&b_mat, prob.bounds()) else {
        return false;
    };
    if x_basic.iter().any(|v| *v < -tol.clone()) {
        return false;
    }
    let mut x = vec![T::zero(); n];
    for (&j, v) in sol.basis.iter().zip(&x_basic) {
        if j < n {
            x[j] = v.clone();
        }
    }
    let matches = x
        .iter()
        .zip(&sol.values)
        .all(|(a, b)| (a.clone() - b.clone()).abs_val() <= tol);
    if !matches || !prob.is_feasible(&sol.values, &tol) {
        return false;
    }

    let costs: Vec<T> = sol.basis.iter().map(|&j| prob.cost(j)).collect();
    let Some(y) = solve(&basis_cols, &costs) else {
        return false;
    };
    (0..columns).all(|j| dot(&y, &prob.column(j)) - prob.cost(j) >= -tol.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{simplex_solve, LpStatus};

    fn box_problem() -> LpProblem {
        LpProblem::new(
            vec![1.0, 1.0],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![1.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn solver_output_verifies() {
        let p = box_problem();
        let s = simplex_solve(&p);
        assert!(verify_solution(&p, &s, 1e-9));
    }

    #[test]
    fn perturbed_values_fail() {
        let p = box_problem();
        let mut s = simplex_solve(&p);
        s.values[0] += 1e-3;
        assert!(!verify_solution(&p, &s, 1e-9));
    }

    #[test]
    fn suboptimal_basis_fails() {
        let p = box_problem();
        let origin = LpSolution {
            values: vec![0.0, 0.0],
            objective_value: 0.0,
            basis: vec![2, 3],
            reduced_costs: vec![-1.0, -1.0, 0.0, 0.0],
            duals: vec![0.0, 0.0],
            status: LpStatus::Optimal,
        };
        assert!(!verify_solution(&p, &origin, 1e-9));
    }

    #[test]
    fn singular_basis_fails_cleanly() {
        let p = LpProblem::new(
            vec![1.0, 1.0],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![1.0, 1.0],
        )
        .unwrap();
        let bogus = LpSolution {
            values: vec![0.5, 0.5],
            objective_value: 1.0,
            basis: vec![0, 1],
            reduced_costs: vec![0.0; 4],
            duals: vec![0.0; 2],
            status: LpStatus::Optimal,
        };
        assert!(!verify_solution(&p, &bogus, 1e-9));
    }
}
