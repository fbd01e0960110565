//! Null vectors of small dense matrices by Gaussian elimination.

use crate::error::{Error, Result};

/// A nonzero null vector together with elimination diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct NullVector {
    /// Scaled so the largest entry has magnitude 1.
    pub vector: Vec<f64>,
    pub rank: usize,
    /// Smallest over largest accepted pivot magnitude.
    pub pivot_ratio: f64,
}

/// Reduce `rows` (all of equal length) to row echelon form with partial pivoting and
/// return a vector of its null space.
///
/// The free variable is the last non-pivot column; every other free variable is zero.
pub fn null_vector(rows: &[Vec<f64>]) -> Result<NullVector> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if ncols == 0 {
        return Err(Error::NumericalBreakdown("empty matrix".into()));
    }
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let scale = a.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs()));
    let eps = f64::EPSILON * scale.max(f64::MIN_POSITIVE) * (nrows.max(ncols) as f64) * 16.0;

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut max_pivot = 0.0_f64;
    let mut min_pivot = f64::INFINITY;
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let (best, mag) =
            (r..nrows).map(|i| (i, a[i][col].abs())).fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= eps {
            continue;
        }
        a.swap(r, best);
        let pivot = a[r][col];
        max_pivot = max_pivot.max(mag);
        min_pivot = min_pivot.min(mag);
        for x in a[r].iter_mut() {
            *x /= pivot;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[col];
            if factor != 0.0 {
                for (x, &p) in row.iter_mut().zip(&pivot_row) {
                    *x -= factor * p;
                }
            }
        }
        pivots.push((r, col));
        r += 1;
    }

    let free = (0..ncols).rev().find(|c| pivots.iter().all(|&(_, pc)| pc != *c)).ok_or_else(|| {
        Error::NumericalBreakdown(format!(
            "matrix has full column rank {ncols}; pivot ratio {:e}",
            min_pivot / max_pivot
        ))
    })?;

    let mut v = vec![0.0; ncols];
    v[free] = 1.0;
    for &(row, col) in &pivots {
        v[col] = -a[row][free];
    }
    let vmax = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    for x in v.iter_mut() {
        *x /= vmax;
    }
    Ok(NullVector {
        vector: v,
        rank: pivots.len(),
        pivot_ratio: if pivots.is_empty() { 0.0 } else { min_pivot / max_pivot },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
        rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn wide_matrix_has_null_vector() {
        let rows = vec![vec![1.0, 2.0, 3.0, 4.0], vec![0.5, -1.0, 2.0, 0.0], vec![1.0, 1.0, 1.0, 1.0]];
        let nv = null_vector(&rows).unwrap();
        assert_eq!(nv.rank, 3);
        assert!(apply(&rows, &nv.vector).iter().all(|x| x.abs() < 1e-14));
        assert_eq!(nv.vector.iter().fold(0.0f64, |m, x| m.max(x.abs())), 1.0);
    }

    #[test]
    fn rank_deficient() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]];
        let nv = null_vector(&rows).unwrap();
        assert_eq!(nv.rank, 1);
        // last free column is 2
        assert!(nv.vector[1] == 0.0 && nv.vector[2] != 0.0);
        assert!(apply(&rows, &nv.vector).iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn square_invertible_fails() {
        let rows = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        assert!(matches!(null_vector(&rows), Err(Error::NumericalBreakdown(_))));
    }

    #[test]
    fn zero_matrix() {
        let nv = null_vector(&[vec![0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(nv.vector, vec![0.0, 0.0, 1.0]);
        assert_eq!(nv.rank, 0);
    }
}
