//! Exact integer rank of sparse boundary matrices.
//!
//! Fraction-free Gaussian elimination over arbitrary-precision integers, with
//! per-row gcd reduction to keep entries small. This is the ground truth the
//! floating-point pipeline is validated against.

use crate::sparse::Csr;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Rank over the rationals of an integer matrix, computed exactly.
pub fn integer_rank(m: &Csr<i64>) -> usize {
    let (nr, nc) = (m.nrows(), m.ncols());
    if nr == 0 || nc == 0 || m.nnz() == 0 {
        return 0;
    }
    // Rows as sparse (col, value) lists kept sorted by column.
    let mut rows: Vec<Vec<(usize, BigInt)>> = (0..nr)
        .map(|r| m.row(r).map(|(c, v)| (c, BigInt::from(v))).collect())
        .collect();
    rows.retain(|r| !r.is_empty());
    let mut rank = 0;
    for col in 0..nc {
        // pick the eligible row with fewest entries, then smallest pivot
        let mut best: Option<(usize, usize, BigInt)> = None;
        for (i, row) in rows.iter().enumerate().skip(rank) {
            if let Some((_, v)) = row.iter().find(|&&(c, _)| c == col) {
                let candidate = (i, row.len(), v.abs());
                let better = match &best {
                    None => true,
                    Some((_, len, piv)) => {
                        candidate.1 < *len || (candidate.1 == *len && candidate.2 < *piv)
                    }
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
        let Some((pivot_row, _, _)) = best else { continue };
        rows.swap(rank, pivot_row);
        let pivot = rows[rank].clone();
        let pval = pivot.iter().find(|&&(c, _)| c == col).unwrap().1.clone();
        for row in rows.iter_mut().skip(rank + 1) {
            let Some(pos) = row.iter().position(|&(c, _)| c == col) else { continue };
            let rval = row[pos].1.clone();
            // row <- pval*row - rval*pivot, exact
            let merged = sparse_axpy(&pval, row, &rval, &pivot);
            *row = reduce_gcd(merged);
        }
        rows.retain(|r| !r.is_empty());
        rank += 1;
        if rank >= rows.len() {
            break;
        }
    }
    rank.min(rows.len().max(rank))
}

/// a*x - b*y over sorted sparse rows.
fn sparse_axpy(
    a: &BigInt,
    x: &[(usize, BigInt)],
    b: &BigInt,
    y: &[(usize, BigInt)],
) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        match (x.get(i), y.get(j)) {
            (Some((cx, vx)), Some((cy, vy))) if cx == cy => {
                let v = a * vx - b * vy;
                if !v.is_zero() {
                    out.push((*cx, v));
                }
                i += 1;
                j += 1;
            }
            (Some((cx, vx)), Some((cy, _))) if cx < cy => {
                out.push((*cx, a * vx));
                i += 1;
            }
            (Some(_), Some((cy, vy))) => {
                out.push((*cy, -(b * vy)));
                j += 1;
            }
            (Some((cx, vx)), None) => {
                out.push((*cx, a * vx));
                i += 1;
            }
            (None, Some((cy, vy))) => {
                out.push((*cy, -(b * vy)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn reduce_gcd(mut row: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    use num_integer::Integer;
    let mut g = BigInt::zero();
    for (_, v) in &row {
        g = g.gcd(v);
        if g == BigInt::from(1) {
            return row;
        }
    }
    if g > BigInt::from(1) {
        for (_, v) in &mut row {
            *v /= &g;
        }
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(nr: usize, nc: usize, vals: &[i64]) -> Csr<i64> {
        let mut t = Vec::new();
        for r in 0..nr {
            for c in 0..nc {
                let v = vals[r * nc + c];
                if v != 0 {
                    t.push((r, c, v));
                }
            }
        }
        Csr::from_triplets(nr, nc, &t)
    }

    #[test]
    fn small_ranks() {
        assert_eq!(integer_rank(&dense(2, 2, &[1, 0, 0, 1])), 2);
        assert_eq!(integer_rank(&dense(2, 2, &[1, 2, 2, 4])), 1);
        assert_eq!(integer_rank(&dense(3, 3, &[0, 0, 0, 0, 0, 0, 0, 0, 0])), 0);
        assert_eq!(integer_rank(&dense(3, 2, &[1, 1, 1, -1, 2, 0])), 2);
    }

    #[test]
    fn rank_insensitive_to_scaling() {
        let a = dense(3, 3, &[2, 4, 6, 1, 2, 3, 0, 1, 0]);
        assert_eq!(integer_rank(&a), 2);
    }

    #[test]
    fn wide_and_tall() {
        let a = dense(2, 4, &[1, 0, 1, 0, 0, 1, 0, 1]);
        assert_eq!(integer_rank(&a), 2);
        assert_eq!(integer_rank(&a.transpose()), 2);
    }
}
