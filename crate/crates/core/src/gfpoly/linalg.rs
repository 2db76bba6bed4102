//! Dense linear algebra over F_q.

use super::field::{Fe, Field};

/// Reduces `m` (rows of length `ncols`) to reduced row echelon form in place
/// and returns the pivot columns.
pub fn rref(field: &Field, m: &mut Vec<Vec<Fe>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= m.len() {
            break;
        }
        let Some(pr) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = field.inv(m[row][col]).expect("nonzero pivot");
        for x in m[row].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col];
            for (x, &p) in other.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = field.sub(*x, field.mul(factor, p));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    pivots
}

/// Basis of `{x : M x = 0}`, one vector per free column in increasing order.
pub fn nullspace(field: &Field, rows: &[Vec<Fe>], ncols: usize) -> Vec<Vec<Fe>> {
    let mut m: Vec<Vec<Fe>> = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let pivots = rref(field, &mut m, ncols);
    let mut basis = Vec::new();
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Fe::ZERO; ncols];
        v[free] = Fe::ONE;
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = field.neg(m[r][free]);
        }
        basis.push(v);
    }
    basis
}
