//! Small dense linear programs: `maximize c.x` subject to row constraints
//! `a_l.x (<=|>=|=) q_l` and `x >= 0`.
//!
//! The solver is a two-phase tableau simplex with Bland's rule. It is generic
//! over [`LpScalar`], so the same code runs in `f64` and in exact rational
//! arithmetic ([`BigRational`]). [`verify_solution`] re-derives feasibility
//! and reduced costs from a reported basis, and [`enumerate_vertices`] is a
//! brute-force oracle for tiny instances.

mod linalg;
mod simplex;
mod verify;
mod vertex;

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub use linalg::{invert, solve};
pub use simplex::simplex_solve;
pub use verify::verify_solution;
pub use vertex::{enumerate_vertices, VertexOptimum, ENUMERATION_LIMIT};

/// Field the simplex tableau is computed in.
pub trait LpScalar:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Entries at or below this magnitude are never pivoted on.
    fn pivot_tol() -> Self;
    /// Residual infeasibility accepted at the end of phase one.
    fn feasibility_tol() -> Self;
    fn abs_val(&self) -> Self;
    fn to_f64(&self) -> f64;
    fn from_u64(value: u64) -> Self;
}

impl LpScalar for f64 {
    fn pivot_tol() -> Self {
        1e-11
    }

    fn feasibility_tol() -> Self {
        1e-9
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_u64(value: u64) -> Self {
        value as f64
    }
}

impl LpScalar for BigRational {
    fn pivot_tol() -> Self {
        Self::zero()
    }

    fn feasibility_tol() -> Self {
        Self::zero()
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_u64(value: u64) -> Self {
        Self::from_integer(BigInt::from(value))
    }
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(value: f64) -> Option<BigRational> {
    BigRational::from_float(value)
}

/// `numer / denom` as a rational.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// `maximize objective.x` s.t. `matrix[l].x (relation[l]) bounds[l]`, `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem<T = f64> {
    objective: Vec<T>,
    matrix: Vec<Vec<T>>,
    bounds: Vec<T>,
    relations: Vec<Relation>,
}

impl<T: LpScalar> LpProblem<T> {
    /// All constraints `<=`.
    pub fn new(objective: Vec<T>, matrix: Vec<Vec<T>>, bounds: Vec<T>) -> Result<Self> {
        let relations = vec![Relation::Le; matrix.len()];
        Self::with_relations(objective, matrix, bounds, relations)
    }

    pub fn with_relations(
        objective: Vec<T>,
        matrix: Vec<Vec<T>>,
        bounds: Vec<T>,
        relations: Vec<Relation>,
    ) -> Result<Self> {
        let n = objective.len();
        if n == 0 {
            return Err(Error::InvalidArgument("LP has no variables".into()));
        }
        if bounds.len() != matrix.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.len(),
                got: bounds.len(),
            });
        }
        if relations.len() != matrix.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.len(),
                got: relations.len(),
            });
        }
        if let Some(row) = matrix.iter().find(|row| row.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
        Ok(Self {
            objective,
            matrix,
            bounds,
            relations,
        })
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.matrix
    }

    pub fn bounds(&self) -> &[T] {
        &self.bounds
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.matrix.len()
    }

    /// Slack column index of each row (`None` for equality rows). Slack
    /// columns follow the structural ones in row order.
    pub fn slack_columns(&self) -> Vec<Option<usize>> {
        let mut next = self.num_vars();
        self.relations
            .iter()
            .map(|r| match r {
                Relation::Eq => None,
                _ => {
                    next += 1;
                    Some(next - 1)
                }
            })
            .collect()
    }

    /// Number of structural plus slack columns.
    pub fn num_columns(&self) -> usize {
        self.num_vars()
            + self
                .relations
                .iter()
                .filter(|r| **r != Relation::Eq)
                .count()
    }

    /// Column `j` of `[A | S]`, where a `<=` row gets slack `+1` and a `>=`
    /// row gets surplus `-1`.
    pub fn column(&self, j: usize) -> Vec<T> {
        let n = self.num_vars();
        if j < n {
            return self.matrix.iter().map(|row| row[j].clone()).collect();
        }
        let slacks = self.slack_columns();
        (0..self.num_constraints())
            .map(|i| match (slacks[i], self.relations[i]) {
                (Some(col), Relation::Le) if col == j => T::one(),
                (Some(col), Relation::Ge) if col == j => -T::one(),
                _ => T::zero(),
            })
            .collect()
    }

    /// Cost of column `j`; zero for slacks.
    pub fn cost(&self, j: usize) -> T {
        self.objective.get(j).cloned().unwrap_or_else(T::zero)
    }

    /// `objective.x`.
    pub fn evaluate(&self, x: &[T]) -> T {
        dot(&self.objective, x)
    }

    /// `A x - q` per row.
    pub fn row_residuals(&self, x: &[T]) -> Vec<T> {
        self.matrix
            .iter()
            .zip(&self.bounds)
            .map(|(row, q)| dot(row, x) - q.clone())
            .collect()
    }

    /// Whether `x` satisfies all constraints and nonnegativity within `tol`.
    pub fn is_feasible(&self, x: &[T], tol: &T) -> bool {
        if x.len() != self.num_vars() || x.iter().any(|v| *v < -tol.clone()) {
            return false;
        }
        self.row_residuals(x)
            .iter()
            .zip(&self.relations)
            .all(|(r, rel)| match rel {
                Relation::Le => *r <= tol.clone(),
                Relation::Ge => *r >= -tol.clone(),
                Relation::Eq => r.abs_val() <= tol.clone(),
            })
    }

    /// Reorders the constraint rows; `order[k]` is the old index of new row `k`.
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        Self {
            objective: self.objective.clone(),
            matrix: order.iter().map(|&i| self.matrix[i].clone()).collect(),
            bounds: order.iter().map(|&i| self.bounds[i].clone()).collect(),
            relations: order.iter().map(|&i| self.relations[i]).collect(),
        }
    }
}

impl LpProblem<f64> {
    /// The same problem with every coefficient converted exactly to a rational.
    pub fn to_exact(&self) -> Result<LpProblem<BigRational>> {
        let conv = |v: &f64| {
            rational_from_f64(*v)
                .ok_or_else(|| Error::InvalidArgument(format!("{v} is not finite")))
        };
        let convert_all = |vs: &[f64]| vs.iter().map(conv).collect::<Result<Vec<_>>>();
        LpProblem::with_relations(
            convert_all(&self.objective)?,
            self.matrix
                .iter()
                .map(|row| convert_all(row))
                .collect::<Result<_>>()?,
            convert_all(&self.bounds)?,
            self.relations.clone(),
        )
    }
}

pub(crate) fn dot<T: LpScalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

/// Result of [`simplex_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T = f64> {
    /// Structural variables.
    pub values: Vec<T>,
    pub objective_value: T,
    /// Sorted basic column indices, slacks numbered as in [`LpProblem::slack_columns`].
    pub basis: Vec<usize>,
    /// `y.A_j - c_j` for every structural and slack column; all nonnegative
    /// at a maximization optimum.
    pub reduced_costs: Vec<T>,
    /// Dual value of each constraint row.
    pub duals: Vec<T>,
    pub status: LpStatus,
}

impl<T: LpScalar> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn to_f64(&self) -> LpSolution<f64> {
        let conv = |v: &[T]| v.iter().map(T::to_f64).collect::<Vec<_>>();
        LpSolution {
            values: conv(&self.values),
            objective_value: self.objective_value.to_f64(),
            basis: self.basis.clone(),
            reduced_costs: conv(&self.reduced_costs),
            duals: conv(&self.duals),
            status: self.status,
        }
    }
}
