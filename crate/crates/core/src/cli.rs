//! End-to-end run orchestration shared by the CLI binary and tests.

use crate::complex::SimplicialComplex;
use crate::dec::MeasureMode;
use crate::error::{BettiError, Result};
use crate::generate::Shape;
use crate::hodge::{
    betti_via_cohomology, betti_via_homology_oracle, CohomologyOptions, RankMethod,
    DEFAULT_RANK_THRESHOLD,
};
use crate::rank::StochasticRankConfig;
use crate::report::{emit_report, ReportFormat, RunReport};
use std::path::PathBuf;

/// Where the complex comes from.
#[derive(Debug, Clone)]
pub enum InputSource {
    Generate(Shape),
    Path(PathBuf),
}

impl InputSource {
    fn label(&self) -> String {
        match self {
            InputSource::Generate(shape) => format!("{shape:?}"),
            InputSource::Path(p) => p.display().to_string(),
        }
    }
}

/// Rank-extraction method requested on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    ExactRank,
    Stochastic,
}

impl std::str::FromStr for MethodChoice {
    type Err = BettiError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-rank" | "exact_rank" => Ok(MethodChoice::ExactRank),
            "stochastic" => Ok(MethodChoice::Stochastic),
            other => Err(BettiError::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// Full configuration of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: InputSource,
    /// Degrees to compute; empty means every degree 0..=dim.
    pub degrees: Vec<usize>,
    pub mode: MeasureMode,
    pub gamma: Option<usize>,
    pub method: MethodChoice,
    /// Stochastic accuracy target; drives the probe-count default.
    pub eps: f64,
    pub probes: Option<usize>,
    pub cheb_degree: Option<usize>,
    pub gap: f64,
    pub seed: u64,
    pub rank_threshold: f64,
    /// None = decide by size (oracle on below 5000 top simplexes).
    pub verify_oracle: Option<bool>,
    pub double_cover: bool,
    pub output: Option<PathBuf>,
    pub format: ReportFormat,
    pub dump_matrices: Option<PathBuf>,
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: InputSource::Generate(Shape::SphereTetra),
            degrees: Vec::new(),
            mode: MeasureMode::Uniform,
            gamma: None,
            method: MethodChoice::ExactRank,
            eps: 0.05,
            probes: None,
            cheb_degree: None,
            gap: 0.25,
            seed: 0,
            rank_threshold: DEFAULT_RANK_THRESHOLD,
            verify_oracle: None,
            double_cover: false,
            output: None,
            format: ReportFormat::Json,
            dump_matrices: None,
            timings: false,
        }
    }
}

/// Threshold below which oracle verification defaults to on.
pub const VERIFY_ORACLE_LIMIT: usize = 5000;

/// Result of a run: the report plus the exit code the CLI should use.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub exit_code: i32,
    pub verify_failures: Vec<String>,
}

pub fn load_complex(source: &InputSource) -> Result<SimplicialComplex> {
    match source {
        InputSource::Generate(shape) => shape.generate(),
        InputSource::Path(path) => {
            match path.extension().and_then(|e| e.to_str()).unwrap_or("") {
                "off" | "OFF" => crate::io::read_off(path),
                "json" => crate::io::read_complex_json(path),
                other => Err(BettiError::Parse(format!(
                    "cannot infer complex format from extension {other:?} (use .json or .off)"
                ))),
            }
        }
    }
}

fn stochastic_config(cfg: &RunConfig, gamma: usize) -> Result<StochasticRankConfig> {
    if !(cfg.eps > 0.0 && cfg.eps < 1.0) {
        return Err(BettiError::Parse(format!("eps {} must lie in (0,1)", cfg.eps)));
    }
    if !(cfg.gap > 0.0 && cfg.gap < 1.0) {
        return Err(BettiError::Parse(format!("gap {} must lie in (0,1)", cfg.gap)));
    }
    // Hutchinson variance per probe is at most 2 Gamma / Gamma^2 for a
    // projector, so this keeps two standard errors under eps.
    let derived_probes = ((8.0 / (cfg.eps * cfg.eps * gamma as f64)).ceil() as usize).max(32);
    let derived_degree = ((3.0 * 100f64.ln() / cfg.gap).ceil() as usize).clamp(16, 4000);
    Ok(StochasticRankConfig {
        n_probes: cfg.probes.unwrap_or(derived_probes),
        cheb_degree: cfg.cheb_degree.unwrap_or(derived_degree),
        gap: cfg.gap,
        seed: cfg.seed,
    })
}

/// Execute a full run: load, validate/close, compute, verify, emit.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let mut k = load_complex(&cfg.input)?;

    let manifold = k.validate_closed_manifold();
    if !manifold.is_closed() {
        if cfg.double_cover {
            k = k.double_cover()?;
        } else {
            let dim = k.dim();
            let mut listing: Vec<String> = manifold
                .violations
                .iter()
                .take(10)
                .map(|&(i, count)| format!("{} (in {} top cells)", k.skeleton(dim - 1)[i], count))
                .collect();
            if manifold.violations.len() > 10 {
                listing.push(format!("... {} more", manifold.violations.len() - 10));
            }
            return Err(BettiError::Validation(format!(
                "complex is not a closed manifold; offending {}-simplexes: {}; \
                 pass --double-cover to glue two copies along the boundary",
                dim - 1,
                listing.join(", ")
            )));
        }
    }

    let degrees: Vec<usize> =
        if cfg.degrees.is_empty() { (0..=k.dim()).collect() } else { cfg.degrees.clone() };
    for &d in &degrees {
        if d > k.dim() {
            return Err(BettiError::Validation(format!(
                "degree {d} above complex dimension {}",
                k.dim()
            )));
        }
    }

    if let Some(dir) = &cfg.dump_matrices {
        dump_matrices(&k, &degrees, cfg.mode, dir)?;
    }

    let verify = cfg
        .verify_oracle
        .unwrap_or_else(|| k.skeleton_size(k.dim()) < VERIFY_ORACLE_LIMIT);

    let mut reports = Vec::with_capacity(degrees.len());
    let mut verify_failures = Vec::new();
    for &degree in &degrees {
        let started = std::time::Instant::now();
        let gamma = cfg.gamma.unwrap_or_else(|| k.skeleton_size(degree));
        let method = match cfg.method {
            MethodChoice::ExactRank => RankMethod::ExactRank,
            MethodChoice::Stochastic => RankMethod::Stochastic(stochastic_config(cfg, gamma)?),
        };
        let opts = CohomologyOptions {
            mode: cfg.mode,
            method,
            seed: cfg.seed,
            gamma: cfg.gamma,
            rank_threshold: cfg.rank_threshold,
        };
        let mut report = betti_via_cohomology(&k, degree, &opts)?;
        if verify {
            let oracle = betti_via_homology_oracle(&k, degree)?;
            if oracle.betti != report.betti {
                verify_failures.push(format!(
                    "degree {degree}: cohomology pipeline found {} but the homology oracle says {}",
                    report.betti, oracle.betti
                ));
            }
        }
        if cfg.timings {
            report.wall_time_ms = Some(started.elapsed().as_millis() as u64);
        }
        reports.push(report);
    }

    let report = RunReport { input: cfg.input.label(), reports };
    if let Some(path) = &cfg.output {
        emit_report(&report, path, cfg.format)?;
    }
    let exit_code = if verify_failures.is_empty() { 0 } else { 3 };
    Ok(RunOutcome { report, exit_code, verify_failures })
}

/// Compose the coexact chain e(P/|P|_F) * e(A^+/kappa) * e(C/|C|_F) in the
/// block-encoding simulator and format one line per step with dimensions,
/// alpha and recorded error. Desk scale only.
pub fn qsvt_trace(k: &SimplicialComplex, degree: usize, mode: MeasureMode) -> Result<String> {
    use crate::qsvt::{invert_block, product, BlockEncoding};
    let sys = crate::dec::build_hodge_system(k, degree, mode)?;
    let (a, c, p) = match (&sys.a, &sys.c, &sys.p) {
        (Some(a), Some(c), Some(p)) => (a, c, p),
        _ => {
            return Err(BettiError::Validation(format!(
                "degree {degree} has no coexact block to trace (top degree)"
            )))
        }
    };
    let side = p.nrows().max(p.ncols());
    if side > 512 {
        return Err(BettiError::Validation(format!(
            "system side {side} exceeds the desk-scale simulator cap of 512"
        )));
    }
    let pad = |m: &crate::sparse::Csr<f64>| {
        let mut out = nalgebra::DMatrix::zeros(side, side);
        out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(&m.to_dense());
        out
    };
    fn log(lines: &mut Vec<String>, label: &str, e: &BlockEncoding) {
        let (r, cdim) = e.block_dims();
        lines.push(format!(
            "{label:<22} block {r}x{cdim}  unitary {}x{}  alpha {:.6}  eps {:.1e}",
            e.dim(),
            e.dim(),
            e.alpha(),
            e.eps()
        ));
    }
    let mut lines = Vec::new();
    let e_p = BlockEncoding::frobenius_encode(&pad(p))?;
    log(&mut lines, "encode P/|P|_F", &e_p);
    let e_a = BlockEncoding::frobenius_encode(&pad(a))?;
    log(&mut lines, "encode A/|A|_F", &e_a);
    let kappa = sys.scale_coexact.unwrap() / (p.frobenius_norm() * c.frobenius_norm());
    let inv = invert_block(&e_a, kappa, 1e-8)?;
    log(&mut lines, "invert  A^+/kappa", &inv.encoding);
    lines.push(format!("{:<22} polynomial degree {}", "", inv.degree));
    let e_c = BlockEncoding::frobenius_encode(&pad(c))?;
    log(&mut lines, "encode C/|C|_F", &e_c);
    let right = product(&inv.encoding, &e_c)?;
    log(&mut lines, "product A^+ C", &right);
    let chain = product(&e_p, &right)?;
    log(&mut lines, "product P A^+ C", &chain);
    lines.push(format!(
        "scale factor alpha = {:.6} (engine metadata N = {:.6})",
        chain.alpha(),
        sys.scale_coexact.unwrap()
    ));
    Ok(lines.join("\n"))
}

fn dump_matrices(
    k: &SimplicialComplex,
    degrees: &[usize],
    mode: MeasureMode,
    dir: &std::path::Path,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for &degree in degrees {
        let sys = crate::dec::build_hodge_system(k, degree, mode)?;
        let pairs: [(&str, Option<&crate::sparse::Csr<f64>>); 6] = [
            ("A", sys.a.as_ref()),
            ("C", sys.c.as_ref()),
            ("P", sys.p.as_ref()),
            ("K", sys.k.as_ref()),
            ("D", sys.d.as_ref()),
            ("Q", sys.q.as_ref()),
        ];
        for (name, m) in pairs {
            if let Some(m) = m {
                let path = dir.join(format!("degree{degree}_{name}.txt"));
                crate::io::write_triplets(m, &path)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_torus_with_oracle() {
        let cfg = RunConfig {
            input: InputSource::Generate(Shape::Torus(4, 4)),
            degrees: vec![1],
            ..Default::default()
        };
        let out = run(&cfg).unwrap();
        assert_eq!(out.exit_code, 0);
        assert_eq!(out.report.reports[0].betti, 2);
    }

    #[test]
    fn run_rejects_open_input_without_flag() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("open.json");
        std::fs::write(&path, r#"{"n_points": 3, "top_simplexes": [[0,1,2]]}"#).unwrap();
        let cfg = RunConfig {
            input: InputSource::Path(path.clone()),
            ..Default::default()
        };
        let err = run(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("[0,1]"));

        let cfg = RunConfig { input: InputSource::Path(path), double_cover: true, ..Default::default() };
        let out = run(&cfg).unwrap();
        let betti: Vec<usize> = out.report.reports.iter().map(|r| r.betti).collect();
        assert_eq!(betti, vec![1, 0, 1]);
    }

    #[test]
    fn run_deterministic_bytes() {
        let cfg = RunConfig {
            input: InputSource::Generate(Shape::Torus(3, 3)),
            degrees: vec![0, 1, 2],
            seed: 42,
            ..Default::default()
        };
        let a = crate::report::render_json(&run(&cfg).unwrap().report).unwrap();
        let b = crate::report::render_json(&run(&cfg).unwrap().report).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_degree_list_means_all() {
        let cfg = RunConfig {
            input: InputSource::Generate(Shape::SphereTetra),
            ..Default::default()
        };
        let out = run(&cfg).unwrap();
        assert_eq!(out.report.reports.len(), 3);
    }

    #[test]
    fn qsvt_trace_tetra() {
        let k = Shape::SphereTetra.generate().unwrap();
        let trace = qsvt_trace(&k, 1, MeasureMode::Uniform).unwrap();
        assert!(trace.contains("encode P/|P|_F"));
        assert!(trace.contains("product P A^+ C"));
        assert!(trace.contains("alpha = 24.0000"));
        assert!(qsvt_trace(&k, 2, MeasureMode::Uniform).is_err());
    }

    #[test]
    fn dump_matrices_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            input: InputSource::Generate(Shape::SphereTetra),
            degrees: vec![1],
            dump_matrices: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        run(&cfg).unwrap();
        for name in ["A", "C", "P", "K", "D", "Q"] {
            assert!(dir.path().join(format!("degree1_{name}.txt")).exists(), "{name}");
        }
    }
}
