//! Dense simulator of block-encoding arithmetic.
//!
//! Encodings are kept in a composable canonical form: the unitary acts on
//! (ancilla) x (system) with the encoded block sitting in the top-left
//! system window, so products, linear combinations and scalings follow the
//! textbook ancilla constructions literally. Polynomial transforms are
//! applied through a dense SVD; what is under test is the linear-algebraic
//! identity and the alpha/error bookkeeping, not a gate sequence.

use crate::error::{BettiError, Result};
use nalgebra::DMatrix;

/// Unitarity slack tolerated on constructed encodings.
pub const UNITARITY_TOL: f64 = 1e-12;

/// An orthogonal matrix whose top-left block is `target / alpha`.
#[derive(Debug, Clone)]
pub struct BlockEncoding {
    u: DMatrix<f64>,
    /// True dimensions of the encoded block (before square padding).
    rows: usize,
    cols: usize,
    /// System window size; `u` has dimension (ancilla multiplicity) * sys.
    sys: usize,
    alpha: f64,
    eps: f64,
}

fn pad_square(a: &DMatrix<f64>, sys: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(sys, sys);
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out
}

/// Symmetric PSD square root via eigendecomposition, clamping negative noise.
fn sqrtm_psd(a: DMatrix<f64>) -> DMatrix<f64> {
    let eig = nalgebra::SymmetricEigen::new(a);
    let vals = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
}

impl BlockEncoding {
    /// Dilation encoding of a strict contraction, alpha = 1. Rectangular
    /// input is zero-padded to the square system window first.
    pub fn encode_dense(a: &DMatrix<f64>) -> Result<Self> {
        let norm = crate::solve::operator_norm(a);
        if norm >= 1.0 {
            return Err(BettiError::Validation(format!(
                "operator norm {norm} >= 1; rescale before encoding"
            )));
        }
        let sys = a.nrows().max(a.ncols());
        let at = pad_square(a, sys);
        let eye = DMatrix::<f64>::identity(sys, sys);
        let s1 = sqrtm_psd(&eye - &at * at.transpose());
        let s2 = sqrtm_psd(&eye - at.transpose() * &at);
        let mut u = DMatrix::zeros(2 * sys, 2 * sys);
        u.view_mut((0, 0), (sys, sys)).copy_from(&at);
        u.view_mut((0, sys), (sys, sys)).copy_from(&s1);
        u.view_mut((sys, 0), (sys, sys)).copy_from(&s2);
        u.view_mut((sys, sys), (sys, sys)).copy_from(&(-at.transpose()));
        let enc =
            BlockEncoding { u, rows: a.nrows(), cols: a.ncols(), sys, alpha: 1.0, eps: 0.0 };
        enc.check_unitary()?;
        Ok(enc)
    }

    /// Any orthogonal matrix block-encodes itself (alpha = 1).
    pub fn from_unitary(v: DMatrix<f64>) -> Result<Self> {
        let n = v.nrows();
        if n != v.ncols() {
            return Err(BettiError::Validation("unitary must be square".into()));
        }
        let enc = BlockEncoding { u: v, rows: n, cols: n, sys: n, alpha: 1.0, eps: 0.0 };
        enc.check_unitary()?;
        Ok(enc)
    }

    /// Frobenius-rescaled encoding: block = A / ||A||_F, alpha = ||A||_F.
    pub fn frobenius_encode(a: &DMatrix<f64>) -> Result<Self> {
        let fro = a.norm();
        if fro == 0.0 {
            return Err(BettiError::Validation("cannot encode the zero matrix".into()));
        }
        let mut enc = Self::encode_dense(&(a / fro))?;
        enc.alpha = fro;
        Ok(enc)
    }

    pub fn check_unitary(&self) -> Result<()> {
        let n = self.u.nrows();
        let err = (&self.u.transpose() * &self.u - DMatrix::<f64>::identity(n, n)).amax();
        if err > UNITARITY_TOL {
            return Err(BettiError::Validation(format!(
                "encoding lost unitarity: |U^T U - I| = {err:.3e}"
            )));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn block_dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn unitary(&self) -> &DMatrix<f64> {
        &self.u
    }

    fn sys_block(&self) -> DMatrix<f64> {
        self.u.view((0, 0), (self.sys, self.sys)).into_owned()
    }

    /// The encoded block (true dimensions): target / alpha.
    pub fn block(&self) -> DMatrix<f64> {
        self.u.view((0, 0), (self.rows, self.cols)).into_owned()
    }

    /// Reconstruct the target matrix alpha * block.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        self.block() * self.alpha
    }

    /// Ancilla multiplicity k such that dim = k * sys.
    fn multiplicity(&self) -> usize {
        self.u.nrows() / self.sys
    }

    /// Extend the ancilla space to multiplicity k (block unchanged).
    fn extend_to(&self, k: usize) -> DMatrix<f64> {
        let cur = self.multiplicity();
        assert!(k >= cur);
        let n = self.sys * k;
        let mut out = DMatrix::identity(n, n);
        out.view_mut((0, 0), (self.u.nrows(), self.u.ncols())).copy_from(&self.u);
        out
    }
}

/// Product lemma: block of the result is (A1/alpha1)(A2/alpha2), built on the
/// tensored ancilla spaces (a1, a2, sys).
pub fn product(e1: &BlockEncoding, e2: &BlockEncoding) -> Result<BlockEncoding> {
    if e1.sys != e2.sys {
        return Err(BettiError::Validation(format!(
            "system windows differ: {} vs {}; pad operands to a common square first",
            e1.sys, e2.sys
        )));
    }
    if e1.cols != e2.rows {
        return Err(BettiError::Validation(format!(
            "inner dimensions differ: {}x{} times {}x{}",
            e1.rows, e1.cols, e2.rows, e2.cols
        )));
    }
    let (k1, k2, sys) = (e1.multiplicity(), e2.multiplicity(), e1.sys);
    let n = k1 * k2 * sys;
    let flat = |a1: usize, a2: usize, s: usize| (a1 * k2 + a2) * sys + s;
    let mut lift1 = DMatrix::zeros(n, n);
    for a1 in 0..k1 {
        for a1p in 0..k1 {
            for s in 0..sys {
                for sp in 0..sys {
                    let v = e1.u[(a1 * sys + s, a1p * sys + sp)];
                    if v != 0.0 {
                        for a2 in 0..k2 {
                            lift1[(flat(a1, a2, s), flat(a1p, a2, sp))] = v;
                        }
                    }
                }
            }
        }
    }
    let mut lift2 = DMatrix::zeros(n, n);
    for a2 in 0..k2 {
        for a2p in 0..k2 {
            for s in 0..sys {
                for sp in 0..sys {
                    let v = e2.u[(a2 * sys + s, a2p * sys + sp)];
                    if v != 0.0 {
                        for a1 in 0..k1 {
                            lift2[(flat(a1, a2, s), flat(a1, a2p, sp))] = v;
                        }
                    }
                }
            }
        }
    }
    let enc = BlockEncoding {
        u: lift1 * lift2,
        rows: e1.rows,
        cols: e2.cols,
        sys,
        alpha: e1.alpha * e2.alpha,
        eps: e1.eps + e2.eps,
    };
    enc.check_unitary()?;
    Ok(enc)
}

/// Scaling lemma: divide the block by p > 1 via the rotation-tensor trick
/// (a literal Kronecker product R_y(theta) âŠ— I with cos(theta/2) = 1/p).
pub fn scale_down(e: &BlockEncoding, p: f64) -> Result<BlockEncoding> {
    if !(p > 1.0) {
        return Err(BettiError::Validation(format!("scale factor {p} must exceed 1")));
    }
    let c = 1.0 / p;
    let s = (1.0 - c * c).sqrt();
    let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let u_rot = rot.kronecker(&DMatrix::<f64>::identity(e.sys, e.sys));
    let rot_enc = BlockEncoding {
        u: u_rot,
        rows: e.rows,
        cols: e.rows,
        sys: e.sys,
        alpha: 1.0,
        eps: 0.0,
    };
    let mut out = product(&rot_enc, e)?;
    out.rows = e.rows;
    out.cols = e.cols;
    out.alpha = e.alpha * p;
    Ok(out)
}

/// Linear-combination lemma: encodes sum of +/- A_i / (m * max alpha). The
/// operands are first aligned to the largest alpha with scale_down, then a
/// uniform-superposition prepare conjugates a signed select unitary.
pub fn linear_combination(
    encodings: &[BlockEncoding],
    signs: &[f64],
) -> Result<BlockEncoding> {
    if encodings.is_empty() {
        return Err(BettiError::Validation("empty linear combination".into()));
    }
    if encodings.len() != signs.len() || signs.iter().any(|s| s.abs() != 1.0) {
        return Err(BettiError::Validation("signs must be +/-1, one per encoding".into()));
    }
    let sys = encodings[0].sys;
    let dims = encodings[0].block_dims();
    if encodings.iter().any(|e| e.sys != sys || e.block_dims() != dims) {
        return Err(BettiError::Validation("linear combination needs equal block dims".into()));
    }
    let alpha_max = encodings.iter().map(|e| e.alpha).fold(0.0, f64::max);
    let aligned: Vec<BlockEncoding> = encodings
        .iter()
        .map(|e| {
            if e.alpha < alpha_max * (1.0 - 1e-15) {
                scale_down(e, alpha_max / e.alpha)
            } else {
                Ok(e.clone())
            }
        })
        .collect::<Result<_>>()?;
    let k = aligned.iter().map(|e| e.multiplicity()).max().unwrap();
    let lifted: Vec<DMatrix<f64>> = aligned.iter().map(|e| e.extend_to(k)).collect();

    let m = lifted.len();
    // prepare: any orthogonal with first column 1/sqrt(m); Householder works
    let prep = uniform_prepare(m);
    let inner = k * sys;
    let n = m * inner;
    let mut select = DMatrix::zeros(n, n);
    for (i, u) in lifted.iter().enumerate() {
        select.view_mut((i * inner, i * inner), (inner, inner)).copy_from(&(u * signs[i]));
    }
    let prep_lift = prep.kronecker(&DMatrix::<f64>::identity(inner, inner));
    let u = prep_lift.transpose() * select * prep_lift;
    let enc = BlockEncoding {
        u,
        rows: dims.0,
        cols: dims.1,
        sys,
        alpha: m as f64 * alpha_max,
        eps: aligned.iter().map(|e| e.eps).fold(0.0, f64::max),
    };
    enc.check_unitary()?;
    Ok(enc)
}

/// Orthogonal m x m matrix whose first column is the uniform superposition.
fn uniform_prepare(m: usize) -> DMatrix<f64> {
    let mut a = DMatrix::<f64>::identity(m, m);
    let ones = DMatrix::from_element(m, 1, 1.0 / (m as f64).sqrt());
    a.set_column(0, &ones.column(0));
    let qr = a.qr();
    let mut q = qr.q();
    // QR may flip the sign of the first column; normalize it back
    if q[(0, 0)] < 0.0 {
        q = -q;
    }
    q
}

/// Hermitian dilation [[0, A], [A^T, 0]]; doubles the Frobenius norm^2.
pub fn hermitian_dilation(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut out = DMatrix::zeros(m + n, m + n);
    out.view_mut((0, m), (m, n)).copy_from(a);
    out.view_mut((m, 0), (n, m)).copy_from(&a.transpose());
    out
}

/// Gram encoding: forms the column-stacked state Phi = sum_i |i> A^i / ||A||_F
/// and traces out the value register, leaving exactly A^T A / ||A||_F^2.
pub fn gram_encoding(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let fro = a.norm();
    if fro == 0.0 {
        return Err(BettiError::Validation("gram encoding of the zero matrix".into()));
    }
    // phi[(i, s)] = A[s, i] / fro; rho[i][j] = sum_s phi[(i,s)] phi[(j,s)]
    let phi = a.transpose() / fro;
    Ok(&phi * phi.transpose())
}

/// Odd Chebyshev-series approximation of 1/(kappa x) on 1/kappa <= |x| <= 1.
///
/// Built as the truncated Chebyshev expansion of (1 - (1 - x^2)^b)/x, whose
/// even cutoff vanishes near the origin (pseudo-inverse convention in the
/// transition band |x| < 1/kappa).
#[derive(Debug, Clone)]
pub struct InversePolynomial {
    /// Coefficients of T_1, T_3, T_5, ... scaled by 1/kappa.
    pub odd_coeffs: Vec<f64>,
    pub kappa: f64,
    pub eps: f64,
}

impl InversePolynomial {
    pub fn degree(&self) -> usize {
        2 * self.odd_coeffs.len() - 1
    }

    /// Evaluate at x in [-1, 1]; odd by construction.
    pub fn eval(&self, x: f64) -> f64 {
        // T_1 = x, T_{k+2} = (4x^2 - 2) T_k - T_{k-2} walks odd orders only
        let mut acc = 0.0;
        let mut t_prev = x; // T_1
        let mut t_cur = 4.0 * x * x * x - 3.0 * x; // T_3
        for (j, &c) in self.odd_coeffs.iter().enumerate() {
            let t = match j {
                0 => t_prev,
                1 => t_cur,
                _ => {
                    let t_next = (4.0 * x * x - 2.0) * t_cur - t_prev;
                    t_prev = t_cur;
                    t_cur = t_next;
                    t_next
                }
            };
            acc += c * t;
        }
        acc
    }
}

/// Chebyshev coefficients of (1 - (1 - x^2)^b)/x truncated to 2J+1:
/// c_{2j+1} = 4 (-1)^j 2^{-2b} sum_{i=j+1}^{b} binom(2b, b+i).
fn cks_coefficients(b: usize, j_max: usize) -> Vec<f64> {
    // t_i = binom(2b, b+i) / 4^b via the stable ratio recurrence
    let mut t = vec![0.0f64; b + 1];
    let mut central = 1.0f64; // binom(2b, b)/4^b = prod (2k-1)/(2k)
    for k in 1..=b {
        central *= (2 * k - 1) as f64 / (2 * k) as f64;
    }
    t[0] = central;
    for i in 0..b {
        t[i + 1] = t[i] * (b - i) as f64 / (b + i + 1) as f64;
    }
    // suffix sums: tail_j = sum_{i=j+1}^{b} t_i
    let mut tail = vec![0.0f64; b + 1];
    for i in (0..b).rev() {
        tail[i] = tail[i + 1] + t[i + 1];
    }
    (0..=j_max.min(b.saturating_sub(1)))
        .map(|j| 4.0 * if j % 2 == 0 { 1.0 } else { -1.0 } * tail[j])
        .collect()
}

/// Build the inverse polynomial for a given kappa and accuracy.
pub fn inverse_polynomial(kappa: f64, eps: f64) -> Result<InversePolynomial> {
    if kappa < 1.0 {
        return Err(BettiError::Validation("kappa must be >= 1".into()));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(BettiError::Validation("eps must lie in (0, 1/2)".into()));
    }
    // accuracy of the un-normalized 1/x target
    let eps_h = (kappa * eps).min(0.25);
    let mut b = ((kappa * kappa) * (kappa / eps_h).ln()).ceil().max(4.0) as usize;
    for _ in 0..12 {
        let j_max = ((b as f64) * ((8.0 * b as f64) / eps_h).ln())
            .sqrt()
            .ceil() as usize;
        let coeffs = cks_coefficients(b, j_max);
        let poly = InversePolynomial {
            odd_coeffs: coeffs.iter().map(|c| c / kappa).collect(),
            kappa,
            eps,
        };
        // grid check on the good region
        let grid = 2000;
        let mut sup = 0.0f64;
        for g in 0..=grid {
            let x = 1.0 / kappa + (1.0 - 1.0 / kappa) * g as f64 / grid as f64;
            sup = sup.max((poly.eval(x) - 1.0 / (kappa * x)).abs());
        }
        if sup <= eps {
            return Ok(poly);
        }
        b = (b as f64 * 1.4).ceil() as usize;
    }
    Err(BettiError::Solver(format!(
        "inverse polynomial did not reach eps = {eps} for kappa = {kappa}"
    )))
}

/// Outcome of a rescaled inversion: the encoding plus the polynomial degree
/// actually used (the rescaled-target degree grows like kappa log(alpha/eps)).
pub struct RescaledInverse {
    pub encoding: BlockEncoding,
    pub degree: usize,
}

fn svd_parts(block: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let parts = crate::solve::robust_svd(block);
    Ok((parts.u, parts.sigmas, parts.v))
}

/// Invert a rescaled encoding per the Appendix-style contract: input encodes
/// A / alpha (alpha = ||A||_F for Frobenius encodings), output encodes
/// A^+ / (alpha * kappa_eff) with the polynomial applied through the SVD.
pub fn invert_rescaled(e: &BlockEncoding, kappa_eff: f64, eps: f64) -> Result<RescaledInverse> {
    invert_impl(e, kappa_eff, eps, false)
}

/// Variant normalized as e(A^+ / kappa_eff); alpha of the result is
/// kappa_eff, matching the scale bookkeeping of the harmonic-matrix chain.
pub fn invert_block(e: &BlockEncoding, kappa_eff: f64, eps: f64) -> Result<RescaledInverse> {
    invert_impl(e, kappa_eff, eps, true)
}

fn invert_impl(
    e: &BlockEncoding,
    kappa_eff: f64,
    eps: f64,
    unit_scale: bool,
) -> Result<RescaledInverse> {
    if kappa_eff < 1.0 {
        return Err(BettiError::Validation("kappa_eff must be >= 1".into()));
    }
    let alpha = e.alpha;
    let block = e.sys_block();
    let (u, sigmas, v) = svd_parts(&block)?;
    let smax = sigmas.iter().cloned().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return Err(BettiError::Validation("cannot invert the zero block".into()));
    }
    // Window check: nonzero singular values of the block must lie within
    // kappa_eff of the largest one. Values at the numerical-rank floor count
    // as exact zeros (pseudo-inverse convention); anything in between means
    // the caller underestimated kappa_eff.
    let lo = smax / kappa_eff;
    let zero_cut = 1e-10 * smax;
    for &s in &sigmas {
        if s > 1.0 + 1e-9 || (s > zero_cut && s < lo * (1.0 - 1e-9)) {
            return Err(BettiError::Validation(format!(
                "singular value {s:.6e} of the rescaled block lies outside the \
                 assumed window [{lo:.6e}, 1]"
            )));
        }
    }
    let smin_nonzero = sigmas.iter().cloned().filter(|&s| s > zero_cut).fold(
        f64::INFINITY,
        f64::min,
    );
    if !smin_nonzero.is_finite() {
        return Err(BettiError::Validation("block has no nonzero spectrum in the window".into()));
    }
    // polynomial domain from the actual spectrum; accuracy rescaled by alpha
    // (the rescaled target ||A||_F / x needs eps / ||A||_F pointwise)
    let kappa_poly = (1.05 / smin_nonzero).max(1.0);
    let eps_poly = (0.5 * eps / alpha.max(1.0)).min(0.4);
    let poly = inverse_polynomial(kappa_poly, eps_poly)?;

    // result block R = c * V diag(P(sigma)) U^T with c chosen so that
    // R * alpha_out = A^+ on the nonzero spectrum
    let mut c = if unit_scale {
        kappa_poly / (alpha * kappa_eff)
    } else {
        kappa_poly / (alpha * alpha * kappa_eff)
    };
    let mut alpha_out = if unit_scale { kappa_eff } else { alpha * kappa_eff };
    // the nominal scale may exceed unit norm (||A^+|| > alpha_out); absorb
    // the excess into alpha so the block stays encodable
    let nominal_norm = sigmas
        .iter()
        .filter(|&&s| s > zero_cut)
        .map(|&s| (poly.eval(s) * c).abs())
        .fold(0.0f64, f64::max);
    if nominal_norm >= 0.999 {
        let bump = nominal_norm / 0.999;
        c /= bump;
        alpha_out *= bump;
    }
    let vals: Vec<f64> = sigmas.iter().map(|&s| poly.eval(s) * c).collect();
    let k = vals.len();
    let mut r = DMatrix::zeros(block.nrows(), block.ncols());
    for i in 0..k {
        if vals[i] != 0.0 {
            let col_v = v.column(i);
            let col_u = u.column(i);
            for a in 0..block.nrows() {
                for bcol in 0..block.ncols() {
                    r[(a, bcol)] += vals[i] * col_v[a] * col_u[bcol];
                }
            }
        }
    }

    // Moore-Penrose verification on the nonzero spectrum
    let mut pinv = DMatrix::zeros(block.nrows(), block.ncols());
    for i in 0..k {
        if sigmas[i] > zero_cut {
            let inv = 1.0 / (sigmas[i] * alpha);
            for a in 0..block.nrows() {
                for bcol in 0..block.ncols() {
                    pinv[(a, bcol)] += inv * v.column(i)[a] * u.column(i)[bcol];
                }
            }
        }
    }
    let err = (&r * alpha_out - &pinv).norm();
    let scale = pinv.norm().max(f64::MIN_POSITIVE);
    if err > eps * scale * 4.0 {
        return Err(BettiError::Solver(format!(
            "inversion verification failed: relative error {:.3e} > {eps:.3e}",
            err / scale
        )));
    }

    let mut enc = BlockEncoding::encode_dense(&r)?;
    enc.rows = e.rows;
    enc.cols = e.cols;
    enc.alpha = alpha_out;
    enc.eps = eps;
    Ok(RescaledInverse { encoding: enc, degree: poly.degree() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_contraction(n: usize, m: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(n, m, |_, _| rng.random::<f64>() - 0.5);
        let norm = a.clone().svd(false, false).singular_values.max();
        a / (norm * 1.3)
    }

    #[test]
    fn encode_dense_identity_half() {
        let a = DMatrix::<f64>::identity(2, 2) * 0.5;
        let e = BlockEncoding::encode_dense(&a).unwrap();
        assert_eq!(e.dim(), 4);
        assert_relative_eq!(e.block(), a, epsilon = 1e-12);
        e.check_unitary().unwrap();
    }

    #[test]
    fn encode_rejects_expansion() {
        let a = DMatrix::<f64>::identity(2, 2) * 1.5;
        assert!(BlockEncoding::encode_dense(&a).is_err());
    }

    #[test]
    fn unitary_encodes_itself() {
        let theta: f64 = 0.7;
        let v = DMatrix::from_row_slice(
            2,
            2,
            &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
        );
        let e = BlockEncoding::from_unitary(v.clone()).unwrap();
        assert_eq!(e.alpha(), 1.0);
        assert_relative_eq!(e.block(), v, epsilon = 1e-15);
    }

    #[test]
    fn encode_reconstructs_random_contraction() {
        let a = random_contraction(3, 3, 1);
        let e = BlockEncoding::encode_dense(&a).unwrap();
        assert!((e.block() - &a).amax() <= 1e-12);
    }

    #[test]
    fn product_matches_dense_multiply() {
        let a = random_contraction(3, 3, 2);
        let b = random_contraction(3, 3, 3);
        let ea = BlockEncoding::encode_dense(&a).unwrap();
        let eb = BlockEncoding::encode_dense(&b).unwrap();
        let ab = product(&ea, &eb).unwrap();
        assert_relative_eq!(ab.alpha(), 1.0);
        assert!((ab.block() - &a * &b).amax() <= 1e-10);
        ab.check_unitary().unwrap();
    }

    #[test]
    fn product_identity_chain_and_alpha() {
        let id = DMatrix::<f64>::identity(2, 2) * 0.9;
        let e = BlockEncoding::frobenius_encode(&id).unwrap();
        let ee = product(&e, &e).unwrap();
        assert_relative_eq!(ee.alpha(), e.alpha() * e.alpha());
        assert!((ee.reconstruct() - &id * &id).amax() <= 1e-9);
    }

    #[test]
    fn product_dimension_mismatch() {
        let a = BlockEncoding::encode_dense(&random_contraction(2, 2, 4)).unwrap();
        let b = BlockEncoding::encode_dense(&random_contraction(3, 3, 5)).unwrap();
        assert!(product(&a, &b).is_err());
    }

    #[test]
    fn linear_combination_cases() {
        let a = random_contraction(2, 2, 6);
        let ea = BlockEncoding::encode_dense(&a).unwrap();
        // (A, A) with (+, +): block is A/1 scaled by 1/m... i.e. (A+A)/2 = A
        let sum = linear_combination(&[ea.clone(), ea.clone()], &[1.0, 1.0]).unwrap();
        assert!((sum.block() - &a).amax() <= 1e-10);
        assert_relative_eq!(sum.alpha(), 2.0);
        // (A, A) with (+, -): zero block
        let diff = linear_combination(&[ea.clone(), ea.clone()], &[1.0, -1.0]).unwrap();
        assert!(diff.block().amax() <= 1e-12);
        // three random terms
        let b = random_contraction(2, 2, 7);
        let c = random_contraction(2, 2, 8);
        let eb = BlockEncoding::encode_dense(&b).unwrap();
        let ec = BlockEncoding::encode_dense(&c).unwrap();
        let lc = linear_combination(&[ea, eb, ec], &[1.0, -1.0, 1.0]).unwrap();
        let want = (&a - &b + &c) / 3.0;
        assert!((lc.block() - want).amax() <= 1e-10);
        assert!(linear_combination(&[], &[]).is_err());
    }

    #[test]
    fn scale_down_cases() {
        let a = DMatrix::<f64>::identity(2, 2) * 0.4;
        let e = BlockEncoding::encode_dense(&a).unwrap();
        let half = scale_down(&e, 2.0).unwrap();
        assert!((half.block() - &a / 2.0).amax() <= 1e-12);
        assert_relative_eq!(half.alpha(), 2.0);

        let b = random_contraction(3, 3, 9);
        let eb = BlockEncoding::encode_dense(&b).unwrap();
        let s = scale_down(&eb, 3.7).unwrap();
        assert!((s.block() - &b / 3.7).amax() <= 1e-12);

        // composition scale(p) . scale(q) = scale(pq) at block level
        let s2 = scale_down(&scale_down(&eb, 2.0).unwrap(), 1.5).unwrap();
        let s3 = scale_down(&eb, 3.0).unwrap();
        assert!((s2.block() - s3.block()).amax() <= 1e-12);
        assert!(scale_down(&eb, 0.9).is_err());
    }

    #[test]
    fn hermitian_dilation_properties() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let d = hermitian_dilation(&a);
        assert_eq!(d.nrows(), 4);
        assert_relative_eq!(d[(0, 3)], 1.0);
        assert_relative_eq!(d[(3, 0)], 1.0);
        assert_eq!(d.iter().filter(|v| **v != 0.0).count(), 2);

        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let a = DMatrix::from_fn(2, 3, |_, _| rng.random::<f64>() - 0.5);
        let d = hermitian_dilation(&a);
        assert_relative_eq!(d.norm(), 2f64.sqrt() * a.norm(), epsilon = 1e-14);
        // eigenvalues of the dilation are +/- singular values of A
        let eig = nalgebra::SymmetricEigen::new(d);
        let mut evs: Vec<f64> = eig.eigenvalues.iter().map(|l| l.abs()).collect();
        evs.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let svs = a.svd(false, false).singular_values;
        assert_relative_eq!(evs[0], svs[0], epsilon = 1e-12);
        assert_relative_eq!(evs[1], svs[0], epsilon = 1e-12);
    }

    #[test]
    fn gram_encoding_properties() {
        let id = DMatrix::<f64>::identity(4, 4);
        let rho = gram_encoding(&id).unwrap();
        assert_relative_eq!(rho, DMatrix::identity(4, 4) / 4.0, epsilon = 1e-14);

        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let a = DMatrix::from_fn(3, 3, |_, _| rng.random::<f64>() - 0.5);
        let rho = gram_encoding(&a).unwrap();
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        let want = a.transpose() * &a / a.norm_squared();
        assert!((rho - want).amax() <= 1e-12);
        assert!(gram_encoding(&DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn cks_series_matches_closed_form() {
        // untruncated series equals (1 - (1-x^2)^b)/x
        let b = 24;
        let coeffs = cks_coefficients(b, b - 1);
        let poly = InversePolynomial { odd_coeffs: coeffs, kappa: 1.0, eps: 0.0 };
        for g in 1..40 {
            let x = g as f64 / 40.0;
            let want = (1.0 - (1.0 - x * x).powi(b as i32)) / x;
            assert_relative_eq!(poly.eval(x), want, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn inverse_polynomial_contracts() {
        // endpoint: kappa = 1
        let p = inverse_polynomial(1.0, 1e-4).unwrap();
        assert!((p.eval(1.0) - 1.0).abs() <= 1e-4);
        // odd symmetry is structural
        assert_eq!(p.eval(-0.7), -p.eval(0.7));

        // kappa = 2 at 1e-3 over [0.5, 1]
        let p = inverse_polynomial(2.0, 1e-3).unwrap();
        let mut sup = 0.0f64;
        for g in 0..=10_000 {
            let x = 0.5 + 0.5 * g as f64 / 10_000.0;
            sup = sup.max((p.eval(x) - 1.0 / (2.0 * x)).abs());
        }
        assert!(sup <= 1e-3, "sup error {sup}");
    }

    #[test]
    fn inverse_polynomial_degree_scaling() {
        // degree grows like c * kappa * log(1/eps) with stable c
        let mut cs = Vec::new();
        for &kappa in &[2.0f64, 4.0, 8.0, 16.0] {
            let p = inverse_polynomial(kappa, 1e-4).unwrap();
            let model = kappa * (1.0f64 / 1e-4f64).ln();
            cs.push(p.degree() as f64 / model);
        }
        let cmax = cs.iter().cloned().fold(0.0f64, f64::max);
        let cmin = cs.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(cmax / cmin <= 2.0, "constants {cs:?}");
    }

    #[test]
    fn invert_rescaled_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.25]));
        let e = BlockEncoding::frobenius_encode(&a).unwrap();
        let kappa = 2.0;
        let inv = invert_rescaled(&e, kappa, 1e-6).unwrap();
        let got = inv.encoding.reconstruct();
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 4.0]));
        assert!((got - want).amax() <= 1e-5);
    }

    #[test]
    fn invert_orthogonal_gives_transpose() {
        let theta: f64 = 0.3;
        let v = DMatrix::from_row_slice(
            2,
            2,
            &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
        );
        let e = BlockEncoding::frobenius_encode(&v).unwrap();
        let inv = invert_rescaled(&e, 1.0, 1e-6).unwrap();
        assert!((inv.encoding.reconstruct() - v.transpose()).amax() <= 1e-5);
    }

    #[test]
    fn invert_window_violation_rejected() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-3]));
        let e = BlockEncoding::frobenius_encode(&a).unwrap();
        // kappa_eff = 10 misses the 1e-3 singular value
        assert!(invert_rescaled(&e, 10.0, 1e-5).is_err());
    }
}
