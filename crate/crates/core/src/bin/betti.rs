//! Betti numbers of triangulated closed manifolds from the command line.

use betti_core::cli::{run, InputSource, MethodChoice, RunConfig};
use betti_core::dec::MeasureMode;
use betti_core::generate::Shape;
use betti_core::report::{render_csv, render_json, ReportFormat};
use clap::Parser;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "betti",
    about = "Compute Betti numbers of triangulated closed manifolds via the \
             discrete Hodge decomposition, cross-checked by an exact homology oracle.",
    after_help = "EXAMPLES:\n  \
        betti --generate torus:8,8 --degree 1 --verify-oracle\n  \
        betti --generate sphere:icosa --degree 0,1,2\n  \
        betti --input mesh.off --mode geometric --degree 1\n  \
        betti --generate torus:8,8 --degree 1 --method stochastic --eps 0.05 --seed 7"
)]
struct Args {
    /// Generate a fixture: sphere:tetra | sphere:icosa | torus:M,N |
    /// genus:G[,SUBDIV] | three_torus:K
    #[arg(long, value_name = "SHAPE", conflicts_with = "input")]
    generate: Option<String>,

    /// Read a complex from a .json or .off file
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,

    /// Comma-separated degrees (default: every degree of the complex)
    #[arg(long, value_name = "LIST")]
    degree: Option<String>,

    /// Measure mode: uniform | geometric
    #[arg(long, default_value = "uniform")]
    mode: String,

    /// Sub-matrix side for the rank estimate (default |S_r|)
    #[arg(long)]
    gamma: Option<usize>,

    /// Rank method: exact-rank | stochastic
    #[arg(long, default_value = "exact-rank")]
    method: String,

    /// Stochastic accuracy target
    #[arg(long, default_value_t = 0.05)]
    eps: f64,

    /// Number of Rademacher probes (default derived from eps)
    #[arg(long)]
    probes: Option<usize>,

    /// Chebyshev filter degree (default derived from gap)
    #[arg(long = "cheb-degree")]
    cheb_degree: Option<usize>,

    /// Spectral gap threshold of the scaled harmonic Gram operator
    #[arg(long, default_value_t = 0.25)]
    gap: f64,

    /// RNG seed; identical seeds reproduce reports byte for byte
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Relative singular-value threshold for harmonic rank
    #[arg(long = "rank-threshold", default_value_t = 1e-8)]
    rank_threshold: f64,

    /// Check every degree against the exact homology oracle
    /// (default: on below 5000 top simplexes)
    #[arg(long = "verify-oracle", overrides_with = "no_verify_oracle")]
    verify_oracle: bool,

    /// Skip the homology-oracle cross check
    #[arg(long = "no-verify-oracle")]
    no_verify_oracle: bool,

    /// Close an open manifold by gluing two copies along its boundary
    #[arg(long = "double-cover")]
    double_cover: bool,

    /// Write the report here (format from --format)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Report format: json | csv
    #[arg(long, default_value = "json")]
    format: String,

    /// Dump the Hodge-system matrices as sparse triplet files into this directory
    #[arg(long = "dump-matrices", value_name = "DIR")]
    dump_matrices: Option<PathBuf>,

    /// Include wall times in the report (breaks byte-for-byte reproducibility)
    #[arg(long)]
    timings: bool,

    /// Print the block-encoding composition trace of the coexact chain
    /// e(P/|P|_F) e(A^+/k) e(C/|C|_F) instead of computing Betti numbers
    #[arg(long = "qsvt-trace")]
    qsvt_trace: bool,
}

fn parse_config(args: &Args) -> Result<RunConfig, betti_core::BettiError> {
    use betti_core::BettiError;
    let input = match (&args.generate, &args.input) {
        (Some(shape), None) => InputSource::Generate(shape.parse::<Shape>()?),
        (None, Some(path)) => InputSource::Path(path.clone()),
        (None, None) => {
            return Err(BettiError::Parse("one of --generate or --input is required".into()))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let degrees = match &args.degree {
        None => Vec::new(),
        Some(list) => list
            .split(',')
            .filter(|p| !p.is_empty())
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| BettiError::Parse(format!("bad degree {p:?}")))
            })
            .collect::<Result<_, _>>()?,
    };
    let verify_oracle = if args.no_verify_oracle {
        Some(false)
    } else if args.verify_oracle {
        Some(true)
    } else {
        None
    };
    Ok(RunConfig {
        input,
        degrees,
        mode: args.mode.parse::<MeasureMode>()?,
        gamma: args.gamma,
        method: args.method.parse::<MethodChoice>()?,
        eps: args.eps,
        probes: args.probes,
        cheb_degree: args.cheb_degree,
        gap: args.gap,
        seed: args.seed,
        rank_threshold: args.rank_threshold,
        verify_oracle,
        double_cover: args.double_cover,
        output: args.output.clone(),
        format: args.format.parse::<ReportFormat>()?,
        dump_matrices: args.dump_matrices.clone(),
        timings: args.timings,
    })
}

fn main() {
    if let Ok(n) = std::env::var("BETTI_THREADS") {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            // help/version print and exit 0; real usage errors exit 1
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let cfg = match parse_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("betti: {e}");
            std::process::exit(e.exit_code());
        }
    };
    if args.qsvt_trace {
        let result = betti_core::cli::load_complex(&cfg.input)
            .and_then(|k| betti_core::cli::qsvt_trace(&k, *cfg.degrees.first().unwrap_or(&1), cfg.mode));
        match result {
            Ok(trace) => {
                println!("{trace}");
                std::process::exit(0);
            }
            Err(e) => {
                eprintln!("betti: {e}");
                std::process::exit(e.exit_code());
            }
        }
    }
    match run(&cfg) {
        Ok(outcome) => {
            let text = match cfg.format {
                ReportFormat::Json => match render_json(&outcome.report) {
                    Ok(t) => t,
                    Err(e) => {
                        eprintln!("betti: {e}");
                        std::process::exit(e.exit_code());
                    }
                },
                ReportFormat::Csv => render_csv(&outcome.report),
            };
            println!("{text}");
            for warn in outcome.report.reports.iter().flat_map(|r| &r.warnings) {
                eprintln!("betti: warning: {warn}");
            }
            for failure in &outcome.verify_failures {
                eprintln!("betti: verification: {failure}");
            }
            std::process::exit(outcome.exit_code);
        }
        Err(e) => {
            eprintln!("betti: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
