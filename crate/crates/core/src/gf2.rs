//! Small dense linear algebra over GF(2) with one row per `u64`.
//! Bit `j` of a row is column `j`; at most 64 columns.

use crate::error::{Error, Result};

/// Reduced row echelon form. Returns the nonzero rows and their pivot
/// columns; pivots are the lowest set bit of each row.
pub fn rref(rows: &[u64]) -> (Vec<u64>, Vec<usize>) {
    let mut basis: Vec<u64> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for &r in rows {
        let mut r = r;
        for (b, &p) in basis.iter().zip(&pivots) {
            if (r >> p) & 1 == 1 {
                r ^= b;
            }
        }
        if r == 0 {
            continue;
        }
        let p = r.trailing_zeros() as usize;
        for b in basis.iter_mut() {
            if (*b >> p) & 1 == 1 {
                *b ^= r;
            }
        }
        basis.push(r);
        pivots.push(p);
    }
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    (
        order.iter().map(|&i| basis[i]).collect(),
        order.iter().map(|&i| pivots[i]).collect(),
    )
}

pub fn rank(rows: &[u64]) -> usize {
    rref(rows).0.len()
}

/// Basis of `{x : <row, x> = 0 for every row}` in `GF(2)^cols`.
pub fn nullspace(rows: &[u64], cols: usize) -> Vec<u64> {
    let (basis, pivots) = rref(rows);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = 1u64 << free;
            for (b, &p) in basis.iter().zip(&pivots) {
                if (b >> free) & 1 == 1 {
                    x |= 1 << p;
                }
            }
            x
        })
        .collect()
}

/// Inverse of a square `l × l` matrix given as rows.
pub fn inverse(rows: &[u64]) -> Result<Vec<u64>> {
    let l = rows.len();
    if l > 32 {
        return Err(Error::InvalidParameter(format!("matrix of order {l} is too large")));
    }
    // Augment [A | I] with the identity in bits l..2l.
    let mut aug: Vec<u64> = rows.iter().enumerate().map(|(i, r)| r | (1 << (l + i))).collect();
    for col in 0..l {
        let pivot = (col..l).find(|&r| (aug[r] >> col) & 1 == 1).ok_or(Error::Singular)?;
        aug.swap(col, pivot);
        for r in 0..l {
            if r != col && (aug[r] >> col) & 1 == 1 {
                aug[r] ^= aug[col];
            }
        }
    }
    Ok(aug.iter().map(|r| r >> l).collect())
}

/// Row vector times matrix: XOR of the rows selected by `v`.
pub fn vec_mul(v: u64, rows: &[u64]) -> u64 {
    rows.iter()
        .enumerate()
        .filter(|(i, _)| (v >> i) & 1 == 1)
        .fold(0, |acc, (_, r)| acc ^ r)
}
