//! Exact Gaussian elimination over the rational-complex field: row echelon
//! forms, nullspaces, and span membership. Small dense problems only.

use crate::scalar::{rc_is_zero, rc_one, rc_zero, Rc};

/// Row-reduced echelon form computed in place. Returns the pivot column of
/// each nonzero row, in order.
#[allow(clippy::needless_range_loop)] // simultaneous row borrows
pub fn rref(rows: &mut Vec<Vec<Rc>>) -> Vec<usize> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..ncols {
        let Some(pivot_row) = (row..rows.len()).find(|&r| !rc_is_zero(&rows[r][col])) else {
            continue;
        };
        rows.swap(row, pivot_row);
        let inv = rc_one() / rows[row][col].clone();
        for c in col..ncols {
            let v = rows[row][c].clone() * inv.clone();
            rows[row][c] = v;
        }
        for r in 0..rows.len() {
            if r != row && !rc_is_zero(&rows[r][col]) {
                let factor = rows[r][col].clone();
                for c in col..ncols {
                    let v = rows[r][c].clone() - factor.clone() * rows[row][c].clone();
                    rows[r][c] = v;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    rows.truncate(row);
    pivots
}

/// Basis of the right nullspace {x : Ax = 0} of the row span.
pub fn nullspace(rows: &[Vec<Rc>], ncols: usize) -> Vec<Vec<Rc>> {
    let mut reduced: Vec<Vec<Rc>> = rows.to_vec();
    let pivots = rref(&mut reduced);
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![rc_zero(); ncols];
        v[free] = rc_one();
        for (r, &pc) in pivots.iter().enumerate() {
            // Pivot rows are normalized, so x_pc = -A[r][free].
            v[pc] = -reduced[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Reduces `v` against an rref basis; returns the remainder.
pub fn reduce_against(rref_rows: &[Vec<Rc>], pivots: &[usize], v: &[Rc]) -> Vec<Rc> {
    let mut out = v.to_vec();
    for (row, &pc) in pivots.iter().enumerate() {
        if !rc_is_zero(&out[pc]) {
            let factor = out[pc].clone();
            for c in 0..out.len() {
                let val = out[c].clone() - factor.clone() * rref_rows[row][c].clone();
                out[c] = val;
            }
        }
    }
    out
}

pub fn in_span(rref_rows: &[Vec<Rc>], pivots: &[usize], v: &[Rc]) -> bool {
    reduce_against(rref_rows, pivots, v).iter().all(rc_is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rc_from_i64, rc_from_ratio};

    #[test]
    fn rref_and_rank() {
        let mut rows = vec![
            vec![rc_from_i64(1, 0), rc_from_i64(2, 0), rc_from_i64(3, 0)],
            vec![rc_from_i64(2, 0), rc_from_i64(4, 0), rc_from_i64(6, 0)],
            vec![rc_from_i64(0, 0), rc_from_i64(1, 0), rc_from_i64(1, 0)],
        ];
        let pivots = rref(&mut rows);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn nullspace_of_difference_functional() {
        // Row (1, -1): nullspace is the diagonal.
        let rows = vec![vec![rc_from_i64(1, 0), rc_from_i64(-1, 0)]];
        let basis = nullspace(&rows, 2);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0][0], basis[0][1]);
    }

    #[test]
    fn nullspace_annihilates_rows_with_complex_entries() {
        let rows = vec![
            vec![rc_from_i64(0, 1), rc_from_i64(1, 0), rc_from_i64(0, 0)],
            vec![rc_from_i64(0, 0), rc_from_ratio(1, 2), rc_from_i64(1, 0)],
        ];
        let basis = nullspace(&rows, 3);
        assert_eq!(basis.len(), 1);
        for row in &rows {
            let dot = row
                .iter()
                .zip(&basis[0])
                .map(|(a, b)| a.clone() * b.clone())
                .fold(crate::scalar::rc_zero(), |acc, x| acc + x);
            assert!(rc_is_zero(&dot));
        }
    }

    #[test]
    fn span_membership() {
        let mut rows = vec![
            vec![rc_from_i64(1, 0), rc_from_i64(0, 0), rc_from_i64(1, 0)],
            vec![rc_from_i64(0, 0), rc_from_i64(1, 0), rc_from_i64(1, 0)],
        ];
        let pivots = rref(&mut rows);
        let inside = vec![rc_from_i64(2, 0), rc_from_i64(3, 0), rc_from_i64(5, 0)];
        let outside = vec![rc_from_i64(1, 0), rc_from_i64(1, 0), rc_from_i64(1, 0)];
        assert!(in_span(&rows, &pivots, &inside));
        assert!(!in_span(&rows, &pivots, &outside));
    }
}
