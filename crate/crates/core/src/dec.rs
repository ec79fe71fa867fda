//! Discrete exterior calculus layer.
//!
//! Builds Poincaré dual-cell measures, cotangent weights, diagonal Hodge
//! stars, coboundary/codifferential matrices and the six-matrix system
//! (A, C, P, K, D, Q) driving the harmonic projection for a chosen degree.
//!
//! Two measure modes exist. `Uniform` treats every top simplex as regular
//! with edge length `a`; the star ratios are then rational constants and the
//! assembled matrices reproduce the closed-form entry patterns exactly
//! (in 2-d, rows of A are {-6,2,2,2} and rows of P are {+2,-2}). `Geometric`
//! computes circumcentric dual measures from vertex coordinates.

use crate::complex::SimplicialComplex;
use crate::error::{BettiError, Result};
use crate::sparse::Csr;
use nalgebra::{DMatrix, DVector};

/// Which measure convention feeds the Hodge stars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureMode {
    /// Closed-form regular-simplex measures; no coordinates needed.
    Uniform,
    /// Circumcentric dual cells computed from vertex coordinates.
    Geometric,
}

impl std::str::FromStr for MeasureMode {
    type Err = BettiError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(MeasureMode::Uniform),
            "geometric" => Ok(MeasureMode::Geometric),
            other => Err(BettiError::Parse(format!("unknown measure mode {other:?}"))),
        }
    }
}

/// Primal and dual Hausdorff measures for one degree.
#[derive(Debug, Clone)]
pub struct DualCellMeasures {
    pub degree: usize,
    /// |sigma| per r-cell.
    pub primal: Vec<f64>,
    /// |sigma-bar| per r-cell (measure of the dual (n-r)-cell).
    pub dual: Vec<f64>,
    /// Cells whose dual measure came out non-positive (obtuse geometry);
    /// allowed in geometric mode but worth surfacing.
    pub nonpositive_dual: Vec<usize>,
}

/// Cotangent edge weights w_e = |dual edge| / |edge| of a 2-manifold.
#[derive(Debug, Clone)]
pub struct CotangentWeights {
    pub weights: Vec<f64>,
}

/// The six sparse matrices of the degree-r Hodge system plus scale metadata.
///
/// C and Q are signed coboundaries; P and D are codifferentials built as
/// sign * star^{-1} * d^T * star. A = C P acts on (r+1)-cochains and
/// K = star_{r-1} * D Q acts on (r-1)-cochains (the measure prefactor of the
/// leading star cancels between the two sides of the exact-term equation, so
/// K is assembled without it and stays symmetric).
#[derive(Debug, Clone)]
pub struct HodgeSystem {
    pub degree: usize,
    pub dim: usize,
    /// Coexact block, present for degree < dim.
    pub a: Option<Csr<f64>>,
    pub c: Option<Csr<f64>>,
    pub p: Option<Csr<f64>>,
    /// Exact block, present for degree > 0.
    pub k: Option<Csr<f64>>,
    pub d: Option<Csr<f64>>,
    pub q: Option<Csr<f64>>,
    /// Prefactor-free right-hand-side operator star_{r-1} * D for the exact
    /// solve; same row space as K.
    pub d_tilde: Option<Csr<f64>>,
    /// Star (diagonal) of degree r, for the measure-weighted inner product.
    pub star_r: Vec<f64>,
    /// Scale metadata: N = kappa_A ||P||_F ||C||_F for the coexact chain.
    pub scale_coexact: Option<f64>,
    /// Scale metadata: M = kappa_K ||Q||_F ||D||_F for the exact chain.
    pub scale_exact: Option<f64>,
}

/// Regular r-simplex volume with unit edge: sqrt(r+1) / (r! * 2^{r/2}).
fn regular_simplex_volume(r: usize) -> f64 {
    let mut fact = 1.0;
    for i in 2..=r {
        fact *= i as f64;
    }
    ((r + 1) as f64).sqrt() / (fact * 2f64.powf(r as f64 / 2.0))
}

/// Volume of the orthoscheme spanned by the chain of barycenters
/// c(sigma_r) < c(sigma_{r+1}) < ... < c(sigma_n) inside a regular unit-edge
/// n-simplex. Each step is orthogonal to the previous affine hull, so the
/// volume is the product of the step heights over (n-r)!.
fn regular_flag_piece(n: usize, r: usize) -> f64 {
    // circumradius of a regular unit-edge k-simplex: R_k = sqrt(k / (2(k+1)))
    let rad = |k: usize| (k as f64 / (2.0 * (k + 1) as f64)).sqrt();
    let mut vol = 1.0;
    for k in r..n {
        // height from the circumcenter of a (k+1)-simplex down to the
        // circumcenter of a k-face: sqrt(R_{k+1}^2 - R_k^2)
        let h = (rad(k + 1).powi(2) - rad(k).powi(2)).sqrt();
        vol *= h / ((k - r + 1) as f64);
    }
    vol
}

/// Dual-cell and primal measures for degree r.
///
/// Uniform mode: primal = regular-simplex volume (with the 2-d convention
/// that the top face measure is sqrt(3) a^2 / 2, twice the true area, so that
/// 1/(w |f|) = 2); dual = (number of incident flags) x (orthoscheme piece).
/// Geometric mode: circumcentric duals from coordinates, signed pieces.
pub fn dual_cell_measures(
    k: &SimplicialComplex,
    r: usize,
    mode: MeasureMode,
) -> Result<DualCellMeasures> {
    let n = k.dim();
    if r > n {
        return Err(BettiError::Validation(format!("degree {r} above dimension {n}")));
    }
    match mode {
        MeasureMode::Uniform => {
            let a = k.edge_length();
            let mut prim = regular_simplex_volume(r) * a.powi(r as i32);
            if n == 2 && r == 2 {
                prim *= 2.0;
            }
            let piece = regular_flag_piece(n, r) * a.powi((n - r) as i32);
            let chains_per_top = (1..=(n - r)).product::<usize>() as f64;
            let counts = k.top_incidence_counts(r);
            let dual: Vec<f64> =
                counts.iter().map(|&c| c as f64 * chains_per_top * piece).collect();
            Ok(DualCellMeasures {
                degree: r,
                primal: vec![prim; k.skeleton_size(r)],
                dual,
                nonpositive_dual: Vec::new(),
            })
        }
        MeasureMode::Geometric => geometric_measures(k, r),
    }
}

fn coords_matrix(k: &SimplicialComplex) -> Result<Vec<DVector<f64>>> {
    let coords = k
        .coords()
        .ok_or_else(|| BettiError::Validation("geometric mode requires vertex coordinates".into()))?;
    Ok(coords.iter().map(|c| DVector::from_column_slice(c)).collect())
}

/// Circumcenter of a set of points (least-squares in their affine hull).
fn circumcenter(pts: &[DVector<f64>]) -> DVector<f64> {
    let m = pts.len();
    let p0 = &pts[0];
    if m == 1 {
        return p0.clone();
    }
    // solve for barycentric offsets: (p_i - p_0) . x = (|p_i|^2 - |p_0|^2)/2
    let dim = p0.len();
    let mut basis = DMatrix::zeros(m - 1, dim);
    let mut rhs = DVector::zeros(m - 1);
    for i in 1..m {
        let d = &pts[i] - p0;
        rhs[i - 1] = d.norm_squared() / 2.0;
        basis.set_row(i - 1, &d.transpose().row(0).into_owned());
    }
    // x = B^T (B B^T)^{-1} rhs keeps the center inside the affine hull
    let gram = &basis * basis.transpose();
    let sol = gram
        .lu()
        .solve(&rhs)
        .unwrap_or_else(|| DVector::zeros(m - 1));
    p0 + basis.transpose() * sol
}

fn simplex_volume(pts: &[DVector<f64>]) -> f64 {
    let m = pts.len();
    if m == 1 {
        return 1.0;
    }
    let p0 = &pts[0];
    let mut basis = DMatrix::zeros(p0.len(), m - 1);
    for i in 1..m {
        basis.set_column(i - 1, &(&pts[i] - p0));
    }
    let gram = basis.transpose() * &basis;
    let det = gram.determinant().max(0.0);
    let mut fact = 1.0;
    for i in 2..m {
        fact *= i as f64;
    }
    det.sqrt() / fact
}

/// Circumcentric dual measures via signed orthoscheme pieces. For each flag
/// sigma_r < sigma_{r+1} < ... < sigma_n the piece volume is the product of
/// signed circumcenter heights; the sign of each height is positive when the
/// higher circumcenter lies on the same side of the lower face as the
/// remaining vertex (negative for obtuse configurations).
fn geometric_measures(k: &SimplicialComplex, r: usize) -> Result<DualCellMeasures> {
    let n = k.dim();
    let pts = coords_matrix(k)?;
    let cell_pts = |rr: usize, j: usize| -> Vec<DVector<f64>> {
        k.skeleton(rr)[j].vertices().iter().map(|&v| pts[v].clone()).collect()
    };

    let nr = k.skeleton_size(r);
    let mut primal = Vec::with_capacity(nr);
    for j in 0..nr {
        let mut vol = simplex_volume(&cell_pts(r, j));
        if n == 2 && r == 2 {
            vol *= 2.0; // top-face convention, see module docs
        }
        if vol <= f64::EPSILON {
            return Err(BettiError::Validation(format!(
                "degenerate simplex {} has zero measure",
                k.skeleton(r)[j]
            )));
        }
        primal.push(vol);
    }

    let mut dual = vec![0.0f64; nr];
    if r == n {
        dual.iter_mut().for_each(|d| *d = 1.0);
    } else {
        // Walk flags upward from each r-cell; accumulate signed pieces.
        for j in 0..nr {
            let mut total = 0.0;
            let c_low = circumcenter(&cell_pts(r, j));
            let mut stack: Vec<(usize, usize, f64, DVector<f64>)> = vec![(r, j, 1.0, c_low)];
            while let Some((rr, idx, piece, center)) = stack.pop() {
                if rr == n {
                    total += piece;
                    continue;
                }
                for &cf in k.cell_cofaces(rr, idx) {
                    let higher = cell_pts(rr + 1, cf);
                    let c_high = circumcenter(&higher);
                    // signed height of c_high over aff(sigma_rr), positive
                    // toward the vertex of the coface not in sigma_rr
                    let base = cell_pts(rr, idx);
                    let (h, side) = signed_height(&base, &higher, &center, &c_high);
                    let step = h * side / ((rr + 1 - r) as f64);
                    stack.push((rr + 1, cf, piece * step, c_high));
                }
            }
            dual[j] = total;
        }
    }

    let nonpositive: Vec<usize> = dual
        .iter()
        .enumerate()
        .filter(|&(_, &d)| d <= 0.0)
        .map(|(i, _)| i)
        .collect();
    for (j, d) in dual.iter().enumerate() {
        if d.abs() <= f64::EPSILON && r < n {
            return Err(BettiError::Validation(format!(
                "degenerate dual cell for {}",
                k.skeleton(r)[j]
            )));
        }
    }
    Ok(DualCellMeasures { degree: r, primal, dual, nonpositive_dual: nonpositive })
}

/// Height of `c_high` above the affine hull of `base`, and the sign relative
/// to the side where the extra vertex of `higher` lies.
fn signed_height(
    base: &[DVector<f64>],
    higher: &[DVector<f64>],
    c_low: &DVector<f64>,
    c_high: &DVector<f64>,
) -> (f64, f64) {
    // The circumcenter of the coface projects onto the circumcenter of the
    // face, so the step vector is orthogonal to the base hull already.
    let step = c_high - c_low;
    let h = step.norm();
    if h == 0.0 {
        return (0.0, 1.0);
    }
    // find the vertex of `higher` not in `base`
    let extra = higher
        .iter()
        .find(|hp| base.iter().all(|bp| (*hp - bp).norm() > 1e-12))
        .expect("coface must add one vertex");
    let toward = extra - c_low;
    let side = if step.dot(&toward) >= 0.0 { 1.0 } else { -1.0 };
    (h, side)
}

/// Cotangent edge weights of a closed 2-manifold.
pub fn cotangent_weights(k: &SimplicialComplex, mode: MeasureMode) -> Result<CotangentWeights> {
    if k.dim() != 2 {
        return Err(BettiError::Validation("cotangent weights are defined on 2-manifolds".into()));
    }
    let ne = k.skeleton_size(1);
    for e in 0..ne {
        let cf = k.cell_cofaces(1, e).len();
        if cf != 2 {
            return Err(BettiError::Validation(format!(
                "edge {} lies in {} triangles; close the manifold first (double cover)",
                k.skeleton(1)[e],
                cf
            )));
        }
    }
    match mode {
        MeasureMode::Uniform => {
            Ok(CotangentWeights { weights: vec![1.0 / 3f64.sqrt(); ne] })
        }
        MeasureMode::Geometric => {
            let pts = coords_matrix(k)?;
            let weights = (0..ne)
                .map(|e| cot_weight_of_edge(k, &pts, e))
                .collect::<Result<Vec<f64>>>()?;
            Ok(CotangentWeights { weights })
        }
    }
}

/// Half-sum of the cotangents of the angles opposite edge `e`, one term per
/// incident triangle.
fn cot_weight_of_edge(k: &SimplicialComplex, pts: &[DVector<f64>], e: usize) -> Result<f64> {
    let ev = k.skeleton(1)[e].vertices();
    let mut w = 0.0;
    for &t in k.cell_cofaces(1, e) {
        let tv = k.skeleton(2)[t].vertices();
        let apex = *tv.iter().find(|v| !ev.contains(v)).unwrap();
        let u = &pts[ev[0]] - &pts[apex];
        let v = &pts[ev[1]] - &pts[apex];
        let cross2 = (u.norm_squared() * v.norm_squared() - u.dot(&v).powi(2)).max(0.0);
        let sin_area = cross2.sqrt();
        if sin_area <= f64::EPSILON * u.norm() * v.norm() {
            return Err(BettiError::Validation(format!(
                "degenerate triangle {} while computing cotangent weight",
                k.skeleton(2)[t]
            )));
        }
        w += 0.5 * u.dot(&v) / sin_area;
    }
    Ok(w)
}

/// Coboundary d_r = B_{r+1}^T mapping r-cochains to (r+1)-cochains.
pub fn coboundary_matrix(k: &SimplicialComplex, r: usize) -> Result<Csr<f64>> {
    if r >= k.dim() {
        return Err(BettiError::Validation(format!(
            "coboundary degree {r} out of range 0..{}",
            k.dim()
        )));
    }
    Ok(k.boundary_matrix(r + 1)?.transpose().to_f64())
}

/// Sign prefactor of the codifferential on r-forms in an n-manifold.
///
/// Matches the general dual-cell formula for r < n; the top degree is pinned
/// to -1 so that the top coexact operator d∘delta has negative diagonal
/// (the {-6, 2, 2, 2} normal form in 2-d).
pub fn codifferential_sign(n: usize, r: usize) -> f64 {
    if r == n {
        return -1.0;
    }
    let e1 = (n * r + n + 1) % 2;
    let e2 = ((n - r + 1) * (r.saturating_sub(1))) % 2;
    if (e1 + e2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Diagonal Hodge stars per degree: star_r[i] = |dual(sigma_i)| / |sigma_i|.
///
/// In uniform mode the common irrational factor shared by every degree is
/// dropped (a global rescale of all stars leaves every codifferential
/// unchanged), so the stored values are exact small rationals and the
/// assembled 2-d matrices carry exact integer entries.
#[derive(Debug, Clone)]
pub struct HodgeStars {
    pub per_degree: Vec<Vec<f64>>,
}

pub fn hodge_stars(k: &SimplicialComplex, mode: MeasureMode) -> Result<HodgeStars> {
    let n = k.dim();
    let mut per_degree = Vec::with_capacity(n + 1);
    match mode {
        MeasureMode::Uniform => {
            let a = k.edge_length();
            for r in 0..=n {
                // star ratio = count * (n-r)! * piece / primal; factor the
                // ratio at count = 1 and keep the integer count exact
                let mut prim = regular_simplex_volume(r) * a.powi(r as i32);
                if n == 2 && r == 2 {
                    prim *= 2.0;
                }
                let chains = (1..=(n - r)).product::<usize>() as f64;
                let unit = regular_flag_piece(n, r) * a.powi((n - r) as i32) * chains / prim;
                let unit = rationalize_unit(n, r, a, unit);
                let counts = k.top_incidence_counts(r);
                per_degree.push(counts.iter().map(|&c| c as f64 * unit).collect());
            }
        }
        MeasureMode::Geometric => {
            for r in 0..=n {
                let m = geometric_measures(k, r)?;
                per_degree
                    .push(m.primal.iter().zip(m.dual.iter()).map(|(p, d)| d / p).collect());
            }
        }
    }
    Ok(HodgeStars { per_degree })
}

/// Exact rational per-incidence star units for the dimensions with known
/// closed forms, scaled so the irrational common factor drops out:
/// 2-d (factor 1/sqrt(3)): 1/4, 1/2, 2;  3-d (factor sqrt(2)): 1/48, 1/24, 1/3, 6.
/// Other dimensions keep the numeric ratio.
fn rationalize_unit(n: usize, r: usize, a: f64, numeric: f64) -> f64 {
    let table: Option<(f64, f64)> = match (n, r) {
        (2, 0) => Some((0.25, 1.0 / 3f64.sqrt())),
        (2, 1) => Some((0.5, 1.0 / 3f64.sqrt())),
        (2, 2) => Some((2.0, 1.0 / 3f64.sqrt())),
        (3, 0) => Some((1.0 / 48.0, 2f64.sqrt())),
        (3, 1) => Some((1.0 / 24.0, 2f64.sqrt())),
        (3, 2) => Some((1.0 / 3.0, 2f64.sqrt())),
        (3, 3) => Some((6.0, 2f64.sqrt())),
        _ => None,
    };
    match table {
        Some((rational, factor)) => {
            let scale = a.powi(n as i32 - 2 * r as i32);
            debug_assert!(
                (rational * factor * scale - numeric).abs() <= 1e-12 * numeric.abs().max(1.0),
                "closed-form star mismatch at (n,r)=({n},{r}): {} vs {}",
                rational * factor * scale,
                numeric
            );
            rational * scale
        }
        None => numeric,
    }
}

/// Coherent orientation signs of top cells (+1/-1 per top simplex), chosen so
/// the two top cofaces of every interior (n-1)-cell induce opposite incidence
/// signs. Non-orientable complexes get a best-effort assignment and a flag.
pub struct TopOrientation {
    pub signs: Vec<f64>,
    pub orientable: bool,
}

pub fn orient_top_cells(k: &SimplicialComplex) -> Result<TopOrientation> {
    let n = k.dim();
    let b = k.boundary_matrix(n)?;
    // incidence sign of face f in top cell t
    let sign_of = {
        let bt = b.transpose();
        move |t: usize, f: usize| -> f64 {
            bt.row(t).find(|&(c, _)| c == f).map(|(_, v)| v as f64).unwrap_or(0.0)
        }
    };
    let nt = k.skeleton_size(n);
    let mut signs = vec![0.0f64; nt];
    let mut orientable = true;
    for start in 0..nt {
        if signs[start] != 0.0 {
            continue;
        }
        signs[start] = 1.0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for &f in k.cell_faces(n, t) {
                let cf = k.cell_cofaces(n - 1, f);
                if cf.len() != 2 {
                    continue;
                }
                let other = if cf[0] == t { cf[1] } else { cf[0] };
                let want = -signs[t] * sign_of(t, f) * sign_of(other, f);
                if signs[other] == 0.0 {
                    signs[other] = want;
                    queue.push_back(other);
                } else if (signs[other] - want).abs() > 0.5 {
                    orientable = false;
                }
            }
        }
    }
    Ok(TopOrientation { signs, orientable })
}

/// Signed coboundary with the coherent top orientation folded into the top
/// degree: d_r = (B_{r+1} E)^T where E flips top columns (identity below top).
fn oriented_coboundary(k: &SimplicialComplex, r: usize, top_signs: &[f64]) -> Result<Csr<f64>> {
    let n = k.dim();
    let b = k.boundary_matrix(r + 1)?.to_f64();
    let b = if r + 1 == n { b.scale_cols(top_signs) } else { b };
    Ok(b.transpose())
}

/// Codifferential on r-forms: sign(n,r) * star_{r-1}^{-1} * d_{r-1}^T * star_r.
pub fn codifferential_matrix(
    k: &SimplicialComplex,
    r: usize,
    stars: &HodgeStars,
    top_signs: &[f64],
) -> Result<Csr<f64>> {
    let n = k.dim();
    if r == 0 || r > n {
        return Err(BettiError::Validation(format!("codifferential degree {r} out of range 1..={n}")));
    }
    let s = codifferential_sign(n, r);
    let d = oriented_coboundary(k, r - 1, top_signs)?; // (r)x(r-1) transpose below
    let dt = d.transpose();
    let inv_low: Vec<f64> = stars.per_degree[r - 1].iter().map(|x| s / x).collect();
    Ok(dt.scale_rows(&inv_low).scale_cols(&stars.per_degree[r]))
}

/// Assemble the degree-r Hodge system in the requested measure mode.
pub fn build_hodge_system(
    k: &SimplicialComplex,
    r: usize,
    mode: MeasureMode,
) -> Result<HodgeSystem> {
    let n = k.dim();
    if r > n {
        return Err(BettiError::Validation(format!("degree {r} out of range 0..={n}")));
    }
    let stars = hodge_stars(k, mode)?;
    let orientation = orient_top_cells(k)?;
    let top_signs = orientation.signs;

    let mut sys = HodgeSystem {
        degree: r,
        dim: n,
        a: None,
        c: None,
        p: None,
        k: None,
        d: None,
        q: None,
        d_tilde: None,
        star_r: stars.per_degree[r].clone(),
        scale_coexact: None,
        scale_exact: None,
    };

    if r < n {
        let c = oriented_coboundary(k, r, &top_signs)?;
        let p = codifferential_matrix(k, r + 1, &stars, &top_signs)?;
        let a = c.matmul(&p);
        sys.scale_coexact = Some(condition_estimate(&a) * p.frobenius_norm() * c.frobenius_norm());
        sys.a = Some(a);
        sys.c = Some(c);
        sys.p = Some(p);
    }
    if r > 0 {
        let q = oriented_coboundary(k, r - 1, &top_signs)?;
        // d_tilde = sign * d_{r-1}^T * star_r stays free of the leading
        // star_{r-1}^{-1}; D divides it back in. Building D from d_tilde (and
        // not the other way around) keeps d_tilde entries exact products.
        let s = codifferential_sign(n, r);
        let d_tilde = q.transpose().scale_cols(&stars.per_degree[r]).map(|_, _, v| s * v);
        let inv_low: Vec<f64> = stars.per_degree[r - 1].iter().map(|x| 1.0 / x).collect();
        let d = d_tilde.scale_rows(&inv_low);
        let kk = d_tilde.matmul(&q);
        sys.scale_exact = Some(condition_estimate(&kk) * q.frobenius_norm() * d.frobenius_norm());
        sys.k = Some(kk);
        sys.d = Some(d);
        sys.q = Some(q);
        sys.d_tilde = Some(d_tilde);
    }
    Ok(sys)
}

/// kappa = ratio of largest to smallest nonzero singular value.
fn condition_estimate(m: &Csr<f64>) -> f64 {
    let sigmas = crate::solve::robust_svd(&m.to_dense()).sigmas;
    let max = sigmas.first().copied().unwrap_or(0.0);
    let min = sigmas.iter().cloned().filter(|&s| s > 1e-10 * max).fold(f64::INFINITY, f64::min);
    if min.is_finite() && min > 0.0 {
        max / min
    } else {
        1.0
    }
}
