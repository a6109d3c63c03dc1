use super::LpScalar;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` when a pivot falls to or below [`LpScalar::pivot_tol`].
pub fn solve<T: LpScalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    assert_eq!(b.len(), n, "right-hand side length");
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs_val()
                .partial_cmp(&m[j][col].abs_val())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[pivot][col].abs_val() <= T::pivot_tol() {
            return None;
        }
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for v in &mut m[col][col..] {
            *v = v.clone() / p.clone();
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, pv) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *v = v.clone() - factor.clone() * pv.clone();
            }
        }
    }
    Some(m.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Inverse of a square matrix, or `None` if it is singular.
pub fn invert<T: LpScalar>(a: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = a.len();
    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let unit: Vec<T> = (0..n)
            .map(|i| if i == k { T::one() } else { T::zero() })
            .collect();
        columns.push(solve(a, &unit)?);
    }
    Some(
        (0..n)
            .map(|i| columns.iter().map(|c| c[i].clone()).collect())
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::ratio;

    #[test]
    fn solves_small_system() {
        let a = vec![vec![0.0, 2.0], vec![1.0, 1.0]];
        let x = solve(&a, &[4.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
    }

    #[test]
    fn singular_is_none() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(&a, &[1.0, 2.0]).is_none());
        assert!(invert(&a).is_none());
    }

    #[test]
    fn exact_inverse() {
        let a = vec![
            vec![ratio(1, 1), ratio(1, 1)],
            vec![ratio(0, 1), ratio(1, 2)],
        ];
        let inv = invert(&a).unwrap();
        assert_eq!(
            inv,
            vec![
                vec![ratio(1, 1), ratio(-2, 1)],
                vec![ratio(0, 1), ratio(2, 1)]
            ]
        );
    }
}
