//! Rank estimation: thresholded-SVD exact rank and the stochastic
//! Chebyshev-Hutchinson estimator (Jackson-damped step filter plus
//! Rademacher trace probes).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Parameters of the stochastic estimator.
#[derive(Debug, Clone)]
pub struct StochasticRankConfig {
    /// Number of Rademacher probe vectors.
    pub n_probes: usize,
    /// Chebyshev filter degree.
    pub cheb_degree: usize,
    /// Eigenvalue gap threshold in (0,1): eigenvalues of the scaled operator
    /// above `gap` count as nonzero, below `gap/2` as zero; the band between
    /// is assumed empty.
    pub gap: f64,
    pub seed: u64,
}

impl StochasticRankConfig {
    /// Wire the gap from a relative singular-value threshold: eigenvalues of
    /// the scaled Gram operator at (threshold)^2 separate zero from nonzero.
    pub fn from_rank_threshold(threshold: f64, seed: u64) -> Self {
        let gap = (threshold * threshold).clamp(1e-6, 0.9);
        let cheb_degree = ((16.0 / gap).ceil() as usize).clamp(16, 4000);
        StochasticRankConfig { n_probes: 32, cheb_degree, gap, seed }
    }
}

impl Default for StochasticRankConfig {
    fn default() -> Self {
        StochasticRankConfig { n_probes: 32, cheb_degree: 96, gap: 0.25, seed: 0 }
    }
}

/// Result of a stochastic rank estimate.
#[derive(Debug, Clone)]
pub struct StochasticRankEstimate {
    /// Estimated fraction rank / n.
    pub fraction: f64,
    /// Sup-norm error of the step filter outside the transition band; the
    /// systematic bias per eigenvalue is at most this.
    pub filter_bias: f64,
    /// Set when the degree is too low for the requested gap (bias > 1%).
    pub degree_warning: bool,
}

/// Count of singular values above `rel_threshold * sigma_max`.
pub fn exact_rank(m: &DMatrix<f64>, rel_threshold: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sigmas = crate::solve::robust_svd(m).sigmas;
    let smax = sigmas.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sigmas.iter().filter(|&&s| s > rel_threshold * smax).count()
}

/// Count of singular values above an absolute cutoff; used when the caller
/// supplies the reference scale (e.g. the norm of the forms a harmonic matrix
/// was projected from, so that a fully-annihilated matrix has rank 0).
pub fn rank_above(m: &DMatrix<f64>, cutoff: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    crate::solve::robust_svd(m).sigmas.iter().filter(|&&s| s > cutoff).count()
}

/// Power-iteration upper bound on the largest eigenvalue of a symmetric PSD
/// operator, inflated by 1%. With >= 50 iterations and a random start the
/// estimate is above lambda_max up to that inflation except with negligible
/// probability (the start would need to be orthogonal to the top eigenspace
/// to thirteen digits).
pub fn spectral_upper_bound<F>(matvec: F, n: usize, iters: usize, seed: u64) -> f64
where
    F: Fn(&[f64], &mut [f64]),
{
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x5bd1_e995);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut w = vec![0.0; n];
    let mut lambda = 0.0f64;
    for _ in 0..iters {
        matvec(&v, &mut w);
        // ||A v|| with ||v|| = 1 approaches lambda_max from below
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nw == 0.0 {
            return 0.0;
        }
        lambda = nw;
        v.iter_mut().zip(&w).for_each(|(a, b)| *a = b / nw);
    }
    lambda * 1.01
}

/// Jackson damping factors g_0..g_n for a degree-n Chebyshev sum. Suppresses
/// the Gibbs overshoot of the truncated step expansion.
fn jackson_coefficients(n: usize) -> Vec<f64> {
    let m = (n + 2) as f64;
    let alpha = std::f64::consts::PI / m;
    (0..=n)
        .map(|j| {
            let jf = j as f64;
            ((m - jf) * (jf * alpha).cos() * alpha.sin() + alpha.cos() * (jf * alpha).sin())
                / (m * alpha.sin())
        })
        .collect()
}

/// Chebyshev coefficients (Jackson damped) of the step 1[t >= tau] for
/// t in [0,1], in the variable x = 2t - 1 on [-1,1].
pub fn step_filter_coefficients(tau: f64, degree: usize) -> Vec<f64> {
    assert!(tau > 0.0 && tau < 1.0);
    let x0 = (2.0 * tau - 1.0).clamp(-1.0, 1.0);
    let theta0 = x0.acos();
    let damping = jackson_coefficients(degree);
    (0..=degree)
        .map(|j| {
            let base = if j == 0 {
                theta0 / std::f64::consts::PI
            } else {
                2.0 * (j as f64 * theta0).sin() / (j as f64 * std::f64::consts::PI)
            };
            base * damping[j]
        })
        .collect()
}

/// Evaluate a Chebyshev series at x in [-1,1] by the three-term recurrence.
pub fn eval_chebyshev(coeffs: &[f64], x: f64) -> f64 {
    let mut t_prev = 1.0;
    let mut t_cur = x;
    let mut acc = coeffs[0];
    for (j, &c) in coeffs.iter().enumerate().skip(1) {
        if j == 1 {
            acc += c * t_cur;
        } else {
            let t_next = 2.0 * x * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = t_next;
            acc += c * t_cur;
        }
    }
    acc
}

/// Sup-norm error of the damped step filter against 1[t >= tau_ref] outside
/// the transition band (lo, hi), on a grid over [0,1].
pub fn step_filter_bias(coeffs: &[f64], lo: f64, hi: f64, grid: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..=grid {
        let t = i as f64 / grid as f64;
        if t > lo && t < hi {
            continue;
        }
        let x = 2.0 * t - 1.0;
        let p = eval_chebyshev(coeffs, x);
        let target = if t >= hi { 1.0 } else { 0.0 };
        worst = worst.max((p - target).abs());
    }
    worst
}

/// Hutchinson estimate of rank(M)/n for a symmetric PSD operator given by
/// matvec, with spectrum scaled into [0,1]. The step filter is centered in
/// the assumed-empty band (gap/2, gap). Probes use fixed per-index seeds and
/// a fixed summation order, so results are reproducible under parallelism.
pub fn stochastic_rank<F>(matvec: F, n: usize, cfg: &StochasticRankConfig) -> StochasticRankEstimate
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    assert!(cfg.gap > 0.0 && cfg.gap < 1.0, "gap must lie in (0,1)");
    assert!(cfg.n_probes >= 1);
    let tau = 0.75 * cfg.gap; // center of the transition band
    let coeffs = step_filter_coefficients(tau, cfg.cheb_degree);
    let filter_bias = step_filter_bias(&coeffs, 0.5 * cfg.gap, cfg.gap, 4000);

    use rayon::prelude::*;
    let quad_forms: Vec<f64> = (0..cfg.n_probes)
        .into_par_iter()
        .map(|probe| {
            let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
            rng.set_stream(0x7261_6465 ^ probe as u64);
            let v: Vec<f64> =
                (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
            // w = p(Mtilde) v with Mtilde = 2 M - I (spectrum [0,1] -> [-1,1])
            let apply = |x: &[f64], out: &mut [f64]| {
                matvec(x, out);
                for i in 0..n {
                    out[i] = 2.0 * out[i] - x[i];
                }
            };
            let mut t_prev = v.clone();
            let mut t_cur = vec![0.0; n];
            apply(&v, &mut t_cur);
            let mut acc: Vec<f64> =
                (0..n).map(|i| coeffs[0] * t_prev[i] + coeffs[1] * t_cur[i]).collect();
            let mut scratch = vec![0.0; n];
            for &c in &coeffs[2..] {
                apply(&t_cur, &mut scratch);
                for i in 0..n {
                    let t_next = 2.0 * scratch[i] - t_prev[i];
                    t_prev[i] = t_cur[i];
                    t_cur[i] = t_next;
                    acc[i] += c * t_next;
                }
            }
            v.iter().zip(&acc).map(|(a, b)| a * b).sum::<f64>()
        })
        .collect();

    let fraction = quad_forms.iter().sum::<f64>() / (cfg.n_probes as f64 * n as f64);
    StochasticRankEstimate { fraction, filter_bias, degree_warning: filter_bias > 0.01 }
}

/// Convenience: stochastic rank fraction of a dense symmetric PSD matrix,
/// normalizing the spectrum internally.
pub fn stochastic_rank_dense(m: &DMatrix<f64>, cfg: &StochasticRankConfig) -> StochasticRankEstimate {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let mv = |x: &[f64], y: &mut [f64]| {
        for r in 0..n {
            let mut s = 0.0;
            for c in 0..n {
                s += m[(r, c)] * x[c];
            }
            y[r] = s;
        }
    };
    let bound = spectral_upper_bound(mv, n, 60, cfg.seed).max(f64::MIN_POSITIVE);
    let scaled = |x: &[f64], y: &mut [f64]| {
        mv(x, y);
        y.iter_mut().for_each(|v| *v /= bound);
    };
    stochastic_rank(scaled, n, cfg)
}
