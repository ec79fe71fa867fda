//! Minimum-norm least-squares solves against singular sparse operators.
//!
//! Small systems go through a thresholded dense SVD factored once and reused
//! across right-hand sides; larger ones fall back to conjugate gradients on
//! the normal equations (CGNR), which converges to the pseudo-inverse
//! solution from a zero start.

use crate::error::{BettiError, Result};
use crate::sparse::Csr;
use nalgebra::{DMatrix, DVector};

/// Dimension at which the dense SVD route hands over to CGNR.
pub const DENSE_SVD_LIMIT: usize = 500;

/// Relative singular-value cutoff treating a direction as null.
pub const SINGULAR_CUTOFF: f64 = 1e-10;

/// Singular triples (descending) computed through the symmetric
/// eigendecomposition of the Hermitian dilation [[0, A], [A^T, 0]], whose
/// eigenvalues are +/- the singular values. The direct bidiagonal SVD loses
/// digits on the heavily degenerate spectra of combinatorial operators, while
/// the symmetric path stays at machine precision.
pub struct SingularTriples {
    /// Positive singular values, largest first (count <= min(m, n)).
    pub sigmas: Vec<f64>,
    /// Left singular vectors, one column per sigma.
    pub u: DMatrix<f64>,
    /// Right singular vectors, one column per sigma.
    pub v: DMatrix<f64>,
}

/// Robust singular value decomposition via the Hermitian dilation.
pub fn robust_svd(a: &DMatrix<f64>) -> SingularTriples {
    let (m, n) = (a.nrows(), a.ncols());
    let d = m + n;
    let mut dil = DMatrix::zeros(d, d);
    dil.view_mut((0, m), (m, n)).copy_from(a);
    dil.view_mut((m, 0), (n, m)).copy_from(&a.transpose());
    let eig = nalgebra::SymmetricEigen::new(dil);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());

    let keep = m.min(n);
    let mut sigmas = Vec::with_capacity(keep);
    let mut u = DMatrix::zeros(m, keep);
    let mut v = DMatrix::zeros(n, keep);
    let mut col = 0;
    for &i in order.iter().take(keep) {
        let lambda = eig.eigenvalues[i];
        if lambda <= 0.0 {
            break;
        }
        let w = eig.eigenvectors.column(i);
        let mut uu = DVector::from_iterator(m, w.iter().take(m).cloned());
        let mut vv = DVector::from_iterator(n, w.iter().skip(m).cloned());
        let (nu, nv) = (uu.norm(), vv.norm());
        // eigenvectors at nonzero lambda split evenly between the two halves
        if nu < 1e-8 || nv < 1e-8 {
            continue;
        }
        uu /= nu;
        vv /= nv;
        sigmas.push(lambda);
        u.set_column(col, &uu);
        v.set_column(col, &vv);
        col += 1;
    }
    sigmas.truncate(col);
    SingularTriples { sigmas, u: u.columns(0, col).into_owned(), v: v.columns(0, col).into_owned() }
}

/// Largest singular value (0 for an all-zero matrix).
pub fn operator_norm(a: &DMatrix<f64>) -> f64 {
    robust_svd(a).sigmas.first().copied().unwrap_or(0.0)
}

enum Factor {
    /// V * diag(pinv sigma) * U^T applied densely.
    Svd { u_t: DMatrix<f64>, v: DMatrix<f64>, inv_sigma: DVector<f64> },
    /// Matrix kept sparse; solves run CGNR per column.
    Iterative { a: Csr<f64>, tol: f64, max_iter: usize },
}

/// A reusable minimum-norm least-squares solver for one operator.
pub struct LeastSquares {
    nrows: usize,
    ncols: usize,
    factor: Factor,
}

impl LeastSquares {
    pub fn new(a: &Csr<f64>) -> Result<Self> {
        Self::with_limit(a, DENSE_SVD_LIMIT)
    }

    /// `limit` forces the iterative path for testing when set below the size.
    pub fn with_limit(a: &Csr<f64>, limit: usize) -> Result<Self> {
        let (nrows, ncols) = (a.nrows(), a.ncols());
        if nrows.max(ncols) <= limit {
            let parts = robust_svd(&a.to_dense());
            let smax = parts.sigmas.first().copied().unwrap_or(0.0);
            let inv_sigma = DVector::from_iterator(
                parts.sigmas.len(),
                parts.sigmas.iter().map(|&s| {
                    if s > SINGULAR_CUTOFF * smax {
                        1.0 / s
                    } else {
                        0.0
                    }
                }),
            );
            Ok(LeastSquares {
                nrows,
                ncols,
                factor: Factor::Svd { u_t: parts.u.transpose(), v: parts.v, inv_sigma },
            })
        } else {
            Ok(LeastSquares {
                nrows,
                ncols,
                factor: Factor::Iterative { a: a.clone(), tol: 1e-12, max_iter: 4 * nrows.max(ncols) },
            })
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    /// Minimum-norm least-squares solve, one column per right-hand side.
    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if b.nrows() != self.nrows {
            return Err(BettiError::Solver(format!(
                "rhs has {} rows, operator has {}",
                b.nrows(),
                self.nrows
            )));
        }
        match &self.factor {
            Factor::Svd { u_t, v, inv_sigma } => {
                let mut y = u_t * b;
                for i in 0..inv_sigma.len().min(y.nrows()) {
                    for j in 0..y.ncols() {
                        y[(i, j)] *= inv_sigma[i];
                    }
                }
                Ok(v * y.rows(0, inv_sigma.len()).into_owned())
            }
            Factor::Iterative { a, tol, max_iter } => {
                use rayon::prelude::*;
                let cols: Vec<DVector<f64>> = (0..b.ncols())
                    .into_par_iter()
                    .map(|j| cgnr(a, &b.column(j).into_owned(), *tol, *max_iter))
                    .collect::<Result<Vec<_>>>()?;
                let mut out = DMatrix::zeros(self.ncols, b.ncols());
                for (j, col) in cols.into_iter().enumerate() {
                    out.set_column(j, &col);
                }
                Ok(out)
            }
        }
    }

    pub fn solve_vector(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        let m = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
        Ok(DVector::from_column_slice(self.solve_matrix(&m)?.as_slice()))
    }
}

/// Conjugate gradients on A^T A x = A^T b. Starting from zero keeps the
/// iterates inside the row space, so the limit is the min-norm solution.
fn cgnr(a: &Csr<f64>, b: &DVector<f64>, tol: f64, max_iter: usize) -> Result<DVector<f64>> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut x = vec![0.0; n];
    let mut r = b.as_slice().to_vec(); // r = b - A x
    let mut s = vec![0.0; n]; // s = A^T r
    a.matvec_transpose(&r, &mut s);
    let mut p = s.clone();
    let mut gamma: f64 = s.iter().map(|v| v * v).sum();
    let b_norm = gamma.sqrt().max(f64::MIN_POSITIVE);
    let mut q = vec![0.0; m];
    for _ in 0..max_iter {
        if gamma.sqrt() <= tol * b_norm {
            break;
        }
        a.matvec(&p, &mut q);
        let denom: f64 = q.iter().map(|v| v * v).sum();
        if denom == 0.0 {
            break;
        }
        let alpha = gamma / denom;
        for i in 0..n {
            x[i] += alpha * p[i];
        }
        for i in 0..m {
            r[i] -= alpha * q[i];
        }
        a.matvec_transpose(&r, &mut s);
        let gamma_new: f64 = s.iter().map(|v| v * v).sum();
        let beta = gamma_new / gamma;
        gamma = gamma_new;
        for i in 0..n {
            p[i] = s[i] + beta * p[i];
        }
    }
    Ok(DVector::from_vec(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dense_csr(m: &DMatrix<f64>) -> Csr<f64> {
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != 0.0 {
                    t.push((r, c, m[(r, c)]));
                }
            }
        }
        Csr::from_triplets(m.nrows(), m.ncols(), &t)
    }

    #[test]
    fn svd_route_solves_singular_system() {
        // rank-deficient 3x3 with consistent rhs
        let a = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        let x_true = DVector::from_vec(vec![1.0, -1.0, 0.0]); // orthogonal to ker = const
        let b = &a * &x_true;
        let ls = LeastSquares::new(&dense_csr(&a)).unwrap();
        let x = ls.solve_vector(&b).unwrap();
        assert_relative_eq!(x, x_true, epsilon = 1e-10);
    }

    #[test]
    fn iterative_matches_svd() {
        let a = DMatrix::from_row_slice(
            4,
            3,
            &[1.0, 2.0, 0.0, 0.0, 1.0, -1.0, 3.0, 0.0, 1.0, 1.0, 1.0, 1.0],
        );
        let b = DVector::from_vec(vec![1.0, 0.5, -2.0, 0.25]);
        let sa = dense_csr(&a);
        let svd = LeastSquares::new(&sa).unwrap().solve_vector(&b).unwrap();
        let it = LeastSquares::with_limit(&sa, 0).unwrap().solve_vector(&b).unwrap();
        assert_relative_eq!(svd, it, epsilon = 1e-8);
    }

    #[test]
    fn min_norm_solution_of_underdetermined() {
        // x + y = 2 has min-norm solution (1, 1)
        let a = dense_csr(&DMatrix::from_row_slice(1, 2, &[1.0, 1.0]));
        let b = DVector::from_vec(vec![2.0]);
        for ls in [LeastSquares::new(&a).unwrap(), LeastSquares::with_limit(&a, 0).unwrap()] {
            let x = ls.solve_vector(&b).unwrap();
            assert_relative_eq!(x[0], 1.0, epsilon = 1e-10);
            assert_relative_eq!(x[1], 1.0, epsilon = 1e-10);
        }
    }
}
