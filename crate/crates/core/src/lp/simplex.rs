use super::{LpProblem, LpScalar, LpSolution, LpStatus, Relation};

const MAX_PIVOTS_PER_DIM: usize = 10_000;

/// Dense tableau. `reduced[j] = z_j - c_j`; a maximization is optimal when
/// no allowed column has a negative entry.
struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    reduced: Vec<T>,
    value: T,
    basis: Vec<usize>,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl<T: LpScalar> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in &mut self.rows[row] {
            *v = v.clone() / p.clone();
        }
        self.rhs[row] = self.rhs[row].clone() / p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[r].iter_mut().zip(&pivot_row) {
                *v = v.clone() - factor.clone() * pv.clone();
            }
            self.rhs[r] = self.rhs[r].clone() - factor * pivot_rhs.clone();
        }
        let factor = self.reduced[col].clone();
        if !factor.is_zero() {
            for (v, pv) in self.reduced.iter_mut().zip(&pivot_row) {
                *v = v.clone() - factor.clone() * pv.clone();
            }
            self.value = self.value.clone() - factor * pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Rebuilds the reduced-cost row for the given column costs.
    fn price(&mut self, costs: &[T]) {
        let width = costs.len();
        self.reduced = (0..width)
            .map(|j| {
                self.basis
                    .iter()
                    .zip(&self.rows)
                    .fold(-costs[j].clone(), |acc, (&b, row)| {
                        acc + costs[b].clone() * row[j].clone()
                    })
            })
            .collect();
        self.value = self
            .basis
            .iter()
            .zip(&self.rhs)
            .fold(T::zero(), |acc, (&b, r)| acc + costs[b].clone() * r.clone());
    }

    /// Bland's rule: lowest-index improving column, and among tied ratios the
    /// row whose basic column has the lowest index.
    fn run(&mut self, allowed: usize) -> Phase {
        let tol = T::pivot_tol();
        let limit = MAX_PIVOTS_PER_DIM * (self.rows.len() + self.reduced.len()).max(1);
        for _ in 0..limit {
            let Some(col) = (0..allowed).find(|&j| self.reduced[j] < -tol.clone()) else {
                return Phase::Optimal;
            };
            let mut best: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if *a <= tol {
                    continue;
                }
                let ratio = self.rhs[r].clone() / a.clone();
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        let slack = tol.clone() * (T::one() + bratio.abs_val());
                        let smaller = ratio < bratio.clone() - slack.clone();
                        let tie_wins =
                            ratio <= bratio.clone() + slack && self.basis[r] < self.basis[br];
                        if smaller || tie_wins {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return Phase::Unbounded,
            }
        }
        panic!("simplex exceeded {limit} pivots despite Bland's rule");
    }
}

/// Two-phase simplex with Bland's anti-cycling rule.
pub fn simplex_solve<T: LpScalar>(prob: &LpProblem<T>) -> LpSolution<T> {
    let n = prob.num_vars();
    let m = prob.num_constraints();
    let slacks = prob.slack_columns();
    let real = prob.num_columns();

    // Rows are flipped so that every right-hand side is nonnegative; a row
    // whose slack then has coefficient +1 starts with the slack basic,
    // every other row gets an artificial column.
    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut identity_col = Vec::with_capacity(m);
    let mut artificial_rows = Vec::new();
    for (i, &slack) in slacks.iter().enumerate() {
        let flip = prob.bounds()[i] < T::zero();
        let sign = if flip { -T::one() } else { T::one() };
        let mut row: Vec<T> = prob.matrix()[i]
            .iter()
            .map(|v| v.clone() * sign.clone())
            .collect();
        row.resize(real, T::zero());
        let slack_coeff = match prob.relations()[i] {
            Relation::Le => Some(T::one()),
            Relation::Ge => Some(-T::one()),
            Relation::Eq => None,
        };
        let mut starts_basic = false;
        if let (Some(col), Some(coeff)) = (slack, slack_coeff) {
            let coeff = coeff * sign.clone();
            starts_basic = coeff > T::zero();
            row[col] = coeff;
            if starts_basic {
                basis.push(col);
                identity_col.push(col);
            }
        }
        if !starts_basic {
            artificial_rows.push(i);
            basis.push(usize::MAX);
            identity_col.push(usize::MAX);
        }
        signs.push(sign.clone());
        rows.push(row);
        rhs.push(prob.bounds()[i].clone() * sign);
    }
    let width = real + artificial_rows.len();
    for row in &mut rows {
        row.resize(width, T::zero());
    }
    for (k, &i) in artificial_rows.iter().enumerate() {
        let col = real + k;
        rows[i][col] = T::one();
        basis[i] = col;
        identity_col[i] = col;
    }

    let mut tab = Tableau {
        rows,
        rhs,
        reduced: Vec::new(),
        value: T::zero(),
        basis,
    };

    if !artificial_rows.is_empty() {
        let mut phase_one = vec![T::zero(); width];
        for cost in &mut phase_one[real..] {
            *cost = -T::one();
        }
        tab.price(&phase_one);
        tab.run(width);
        if -tab.value.clone() > T::feasibility_tol() {
            return finish(
                prob,
                &tab,
                &signs,
                &identity_col,
                n,
                real,
                LpStatus::Infeasible,
            );
        }
        // Drive zero-valued artificials out of the basis where possible; a
        // row with no usable real column is redundant and keeps its
        // artificial at zero.
        for r in 0..m {
            if tab.basis[r] >= real {
                if let Some(col) = (0..real).find(|&j| tab.rows[r][j].abs_val() > T::pivot_tol()) {
                    tab.pivot(r, col);
                }
            }
        }
    }

    let costs: Vec<T> = (0..width).map(|j| prob.cost(j)).collect();
    tab.price(&costs);
    let status = match tab.run(real) {
        Phase::Optimal => LpStatus::Optimal,
        Phase::Unbounded => LpStatus::Unbounded,
    };
    finish(prob, &tab, &signs, &identity_col, n, real, status)
}

fn finish<T: LpScalar>(
    prob: &LpProblem<T>,
    tab: &Tableau<T>,
    signs: &[T],
    identity_col: &[usize],
    n: usize,
    real: usize,
    status: LpStatus,
) -> LpSolution<T> {
    let mut values = vec![T::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            values[b] = tab.rhs[r].clone();
        }
    }
    let mut basis: Vec<usize> = tab.basis.iter().copied().filter(|&b| b < real).collect();
    basis.sort_unstable();
    // The initial identity columns carry zero cost in phase two, so their
    // reduced costs are the duals of the flipped rows.
    let duals = identity_col
        .iter()
        .zip(signs)
        .map(|(&col, sign)| tab.reduced[col].clone() * sign.clone())
        .collect();
    LpSolution {
        objective_value: prob.evaluate(&values),
        values,
        basis,
        reduced_costs: tab.reduced[..real].to_vec(),
        duals,
        status,
    }
}
