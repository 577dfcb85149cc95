//! Exact rational linear algebra used by the polytope and bound machinery:
//! rank, unique solves, and enumeration of basic feasible solutions.

use num_integer::binomial;
use num_traits::Zero;

use crate::rational::Ratio;
use crate::{Error, Result};

/// Row-echelon rank via exact Gaussian elimination.
pub(crate) fn rank(matrix: &[Vec<Ratio>]) -> usize {
    if matrix.is_empty() || matrix[0].is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<Ratio>> = matrix.to_vec();
    let rows = m.len();
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let delta = &factor * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Solves `A x = b` when the solution is unique; returns `None` when the
/// system is inconsistent or underdetermined.
pub(crate) fn solve_unique(a: &[Vec<Ratio>], b: &[Ratio]) -> Option<Vec<Ratio>> {
    let rows = a.len();
    if rows == 0 || rows != b.len() {
        return None;
    }
    let cols = a[0].len();
    let mut aug: Vec<Vec<Ratio>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut v = row.clone();
            v.push(rhs.clone());
            v
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, pivot);
        let lead = aug[r][c].clone();
        for j in c..=cols {
            aug[r][j] = &aug[r][j] / &lead;
        }
        for i in 0..rows {
            if i != r && !aug[i][c].is_zero() {
                let factor = aug[i][c].clone();
                for j in c..=cols {
                    let delta = &factor * &aug[r][j];
                    aug[i][j] -= delta;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    // inconsistent if any zero row has nonzero rhs
    for row in aug.iter().skip(r) {
        if !row[cols].is_zero() {
            return None;
        }
    }
    if pivot_cols.len() != cols {
        return None; // free variables: not unique
    }
    let mut x = vec![Ratio::zero(); cols];
    for (pivot_row, &c) in pivot_cols.iter().enumerate() {
        x[c] = aug[pivot_row][cols].clone();
    }
    Some(x)
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_subset<F>(n: usize, k: usize, mut visit: F)
where
    F: FnMut(&[usize]),
{
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Enumerates all basic feasible solutions of `{A x = b, x >= 0}` exactly:
/// every subset of `rank(A)` linearly independent columns that solves the
/// system uniquely and nonnegatively contributes one solution. The result is
/// deduplicated and sorted, so enumeration order is deterministic.
///
/// Fails with `SizeLimit` when the number of candidate bases exceeds `cap`.
pub(crate) fn basic_feasible_solutions(
    a: &[Vec<Ratio>],
    b: &[Ratio],
    cap: u64,
) -> Result<Vec<Vec<Ratio>>> {
    let rows = a.len();
    if rows == 0 || rows != b.len() {
        return Err(Error::DimensionMismatch(
            "basic feasible solutions of an empty system".into(),
        ));
    }
    let cols = a[0].len();
    let r = rank(a);
    if r == 0 {
        // A = 0: the only basic solution is x = 0, feasible iff b = 0.
        if b.iter().all(Zero::is_zero) {
            return Ok(vec![vec![Ratio::zero(); cols]]);
        }
        return Ok(Vec::new());
    }
    let candidates = binomial(cols as u64, r as u64);
    if candidates > cap {
        return Err(Error::SizeLimit(format!(
            "{candidates} candidate bases exceed the cap of {cap}"
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for_each_subset(cols, r, |subset| {
        let sub: Vec<Vec<Ratio>> = (0..rows)
            .map(|i| subset.iter().map(|&c| a[i][c].clone()).collect())
            .collect();
        if let Some(solution) = solve_unique(&sub, b)
            && solution.iter().all(|v| v >= &Ratio::zero())
        {
            let mut full = vec![Ratio::zero(); cols];
            for (slot, &c) in subset.iter().enumerate() {
                full[c] = solution[slot].clone();
            }
            seen.insert(full);
        }
    });
    Ok(seen.into_iter().collect())
}

/// Indices of a maximal linearly independent set of rows, chosen greedily in
/// row order.
pub(crate) fn independent_rows(matrix: &[Vec<Ratio>]) -> Vec<usize> {
    if matrix.is_empty() || matrix[0].is_empty() {
        return Vec::new();
    }
    let cols = matrix[0].len();
    let mut basis: Vec<Vec<Ratio>> = Vec::new();
    let mut picked = Vec::new();
    for (i, row) in matrix.iter().enumerate() {
        // reduce the row against the current basis
        let mut reduced = row.clone();
        for b in &basis {
            let lead = b.iter().position(|v| !v.is_zero()).unwrap();
            if !reduced[lead].is_zero() {
                let factor = &reduced[lead] / &b[lead];
                for j in 0..cols {
                    let delta = &factor * &b[j];
                    reduced[j] -= delta;
                }
            }
        }
        if reduced.iter().any(|v| !v.is_zero()) {
            basis.push(reduced);
            picked.push(i);
        }
    }
    picked
}

/// Exact inverse of a square matrix; `None` when singular.
pub(crate) fn invert(matrix: &[Vec<Ratio>]) -> Option<Vec<Vec<Ratio>>> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut aug: Vec<Vec<Ratio>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            for j in 0..n {
                v.push(if i == j {
                    Ratio::from_integer(1.into())
                } else {
                    Ratio::zero()
                });
            }
            v
        })
        .collect();
    for c in 0..n {
        let pivot = (c..n).find(|&i| !aug[i][c].is_zero())?;
        aug.swap(c, pivot);
        let lead = aug[c][c].clone();
        for j in 0..2 * n {
            aug[c][j] = &aug[c][j] / &lead;
        }
        for i in 0..n {
            if i != c && !aug[i][c].is_zero() {
                let factor = aug[i][c].clone();
                for j in 0..2 * n {
                    let delta = &factor * &aug[c][j];
                    aug[i][j] -= delta;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn m(rows: &[&[(i64, i64)]]) -> Vec<Vec<Ratio>> {
        rows.iter()
            .map(|r| r.iter().map(|&(n, d)| ratio(n, d)).collect())
            .collect()
    }

    #[test]
    fn rank_detects_dependent_rows() {
        let a = m(&[
            &[(1, 1), (1, 1), (0, 1)],
            &[(2, 1), (2, 1), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
        ]);
        assert_eq!(rank(&a), 2);
        assert_eq!(rank(&m(&[&[(0, 1), (0, 1)]])), 0);
    }

    #[test]
    fn solve_unique_round_trips() {
        let a = m(&[&[(2, 1), (1, 1)], &[(1, 1), (3, 1)]]);
        let b = vec![ratio(5, 1), ratio(10, 1)];
        let x = solve_unique(&a, &b).unwrap();
        assert_eq!(x, vec![ratio(1, 1), ratio(3, 1)]);
        // inconsistent
        let a = m(&[&[(1, 1)], &[(1, 1)]]);
        assert!(solve_unique(&a, &[ratio(1, 1), ratio(2, 1)]).is_none());
        // underdetermined
        let a = m(&[&[(1, 1), (1, 1)]]);
        assert!(solve_unique(&a, &[ratio(1, 1)]).is_none());
    }

    #[test]
    fn subsets_are_lexicographic_and_complete() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut count = 0;
        for_each_subset(5, 0, |_| count += 1);
        assert_eq!(count, 1);
    }

    #[test]
    fn independent_rows_skips_dependent_ones() {
        let a = m(&[
            &[(1, 1), (0, 1), (1, 1)],
            &[(2, 1), (0, 1), (2, 1)],
            &[(0, 1), (1, 1), (0, 1)],
            &[(1, 1), (1, 1), (1, 1)],
        ]);
        assert_eq!(independent_rows(&a), vec![0, 2]);
    }

    #[test]
    fn bfs_enumeration_finds_simplex_vertices() {
        // { x >= 0, x0 + x1 + x2 = 1 }: vertices are the unit masses.
        let a = m(&[&[(1, 1), (1, 1), (1, 1)]]);
        let b = vec![ratio(1, 1)];
        let sols = basic_feasible_solutions(&a, &b, 1_000).unwrap();
        assert_eq!(sols.len(), 3);
        for s in &sols {
            assert_eq!(s.iter().filter(|v| !v.is_zero()).count(), 1);
        }
    }

    #[test]
    fn inverse_agrees_with_solve() {
        let a = m(&[&[(2, 1), (1, 1)], &[(1, 1), (3, 1)]]);
        let inv = invert(&a).unwrap();
        // A * A^{-1} = I
        for i in 0..2 {
            for j in 0..2 {
                let cell: Ratio = (0..2).map(|k| &a[i][k] * &inv[k][j]).sum();
                assert_eq!(cell, if i == j { ratio(1, 1) } else { ratio(0, 1) });
            }
        }
        assert!(invert(&m(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]])).is_none());
    }
}
