//! Command-line surface: generate synthetic matrices, compute exact or
//! incremental SVDs, build factorizations, and sweep ranks into CSV.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (singularity, rank,
//! malformed content), 3 I/O error.

use crate::cur::{
    build_cur_interpolatory, build_cur_orthogonal, error_certificate, rank_sweep, select_for_rank,
    CurFactorization, SelectionMethod,
};
use crate::error::Error;
use crate::incqr::{approx_svd_from_qr, default_initial_block, incremental_qr};
use crate::io::{
    read_matrix_market, write_index_list, write_matrix_market, write_sweep_csv, write_value_list,
    SweepRecord,
};
use crate::matrix::DenseMatrix;
use crate::svd::{economy_svd, truncate_svd, RankKSvd};
use crate::synth::{gen_sparse_sum, growth_case, tiered_weights, SparseSumSpec};
use clap::{Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "deim-cur",
    version,
    about = "CUR matrix factorization with interpolation-based index selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic test matrix and write it as Matrix Market.
    Gen {
        #[arg(long, value_enum)]
        preset: Preset,
        /// Rows of the generated matrix.
        #[arg(long, default_value_t = 2000)]
        m: usize,
        /// Columns of the generated matrix (basis size for `growth`).
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute a rank-K SVD and write V/S/W plus the residual certificate.
    Svd {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_enum, default_value_t = Engine::Exact)]
        engine: Engine,
        /// Deflation tolerance for the incremental engine.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long)]
        out_prefix: String,
    },
    /// Build a CUR factorization and print its error certificate.
    Factor {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Variant::Orthogonal)]
        variant: Variant,
        #[arg(long, value_enum, default_value_t = Engine::Exact)]
        svd_engine: Engine,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Number of leading singular vectors feeding leverage scores
        /// (required for ls-top and ls-sample).
        #[arg(long)]
        lev_r: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_prefix: String,
    },
    /// Certify ranks 1..=kmax for one or more methods and write a CSV.
    Sweep {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        kmax: usize,
        /// Comma-separated list: deim,ls-top,ls-sample,qr
        #[arg(long, value_enum, value_delimiter = ',', required = true)]
        methods: Vec<Method>,
        #[arg(long, value_enum, default_value_t = Engine::Exact)]
        svd_engine: Engine,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long)]
        lev_r: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Eq61,
    Eq62,
    Growth,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Engine {
    Exact,
    Incremental,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Deim,
    LsTop,
    LsSample,
    Qr,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Orthogonal,
    Interpolatory,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Entry point shared by the binary and the tests. Returns the process
/// exit code instead of exiting, so invocations can be driven in-process.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            return 1;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => 3,
                _ => 2,
            }
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Gen {
            preset,
            m,
            n,
            seed,
            out,
        } => cmd_gen(preset, m, n, seed, out),
        Command::Svd {
            input,
            rank,
            engine,
            tol,
            out_prefix,
        } => cmd_svd(input, rank, engine, tol, out_prefix),
        Command::Factor {
            input,
            rank,
            method,
            variant,
            svd_engine,
            tol,
            lev_r,
            seed,
            out_prefix,
        } => cmd_factor(
            input, rank, method, variant, svd_engine, tol, lev_r, seed, out_prefix,
        ),
        Command::Sweep {
            input,
            kmax,
            methods,
            svd_engine,
            tol,
            lev_r,
            seed,
            out,
        } => cmd_sweep(input, kmax, methods, svd_engine, tol, lev_r, seed, out),
    }
}

/// Entry density of the sparse generating vectors in the eq61/eq62 presets.
const PRESET_DENSITY: f64 = 0.025;

fn cmd_gen(preset: Preset, m: usize, n: usize, seed: u64, out: PathBuf) -> CliResult<()> {
    let a = match preset {
        Preset::Eq61 | Preset::Eq62 => {
            let lead = if matches!(preset, Preset::Eq61) { 2.0 } else { 1000.0 };
            let spec = SparseSumSpec {
                m,
                n,
                density: PRESET_DENSITY,
                weights: tiered_weights(lead, m.min(n)),
                seed,
            };
            gen_sparse_sum(&spec)?
        }
        Preset::Growth => growth_case(m, n)?.v().clone(),
    };
    write_matrix_market(&a, &out)?;
    println!("wrote {}x{} matrix to {}", a.rows(), a.cols(), out.display());
    Ok(())
}

fn compute_svd(a: &DenseMatrix, engine: Engine, tol: f64) -> CliResult<RankKSvd> {
    match engine {
        Engine::Exact => Ok(economy_svd(a)),
        Engine::Incremental => {
            if tol < 0.0 || !tol.is_finite() {
                return Err(Failure::Usage(format!("--tol {tol} must be >= 0")));
            }
            let out = incremental_qr(a.column_iter(), tol, default_initial_block(a.rows()))?;
            Ok(approx_svd_from_qr(&out.q, &out.r, out.certificate)?)
        }
    }
}

fn cmd_svd(input: PathBuf, rank: usize, engine: Engine, tol: f64, prefix: String) -> CliResult<()> {
    let a = read_matrix_market(input)?;
    let svd = compute_svd(&a, engine, tol)?;
    let svd = truncate_svd(&svd, rank)?;
    write_matrix_market(svd.v(), format!("{prefix}V.mtx"))?;
    write_matrix_market(svd.w(), format!("{prefix}W.mtx"))?;
    write_value_list(svd.s(), format!("{prefix}S.txt"))?;
    println!("rank {} SVD written with prefix {prefix}", svd.rank());
    println!("residual_estimate = {:.16e}", svd.residual_estimate());
    Ok(())
}

fn to_method(arg: Method, lev_r: Option<usize>) -> CliResult<SelectionMethod> {
    Ok(match arg {
        Method::Deim => SelectionMethod::Deim,
        Method::Qr => SelectionMethod::QrPivot,
        Method::LsTop => SelectionMethod::LeverageTop {
            r: lev_r.ok_or_else(|| Failure::Usage("--lev-r is required for ls-top".into()))?,
        },
        Method::LsSample => SelectionMethod::LeverageSample {
            r: lev_r.ok_or_else(|| Failure::Usage("--lev-r is required for ls-sample".into()))?,
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_factor(
    input: PathBuf,
    rank: usize,
    method: Method,
    variant: Variant,
    engine: Engine,
    tol: f64,
    lev_r: Option<usize>,
    seed: u64,
    prefix: String,
) -> CliResult<()> {
    let a = read_matrix_market(input)?;
    let method = to_method(method, lev_r)?;
    let svd = compute_svd(&a, engine, tol)?;
    let (p, q) = select_for_rank(&a, &svd, method, rank, seed)?;
    let cur: CurFactorization = match variant {
        Variant::Orthogonal => build_cur_orthogonal(&a, &p, &q)?,
        Variant::Interpolatory => build_cur_interpolatory(&a, &p, &q)?,
    };
    let trunc = truncate_svd(&svd, rank)?;
    let cert = error_certificate(&a, &trunc, &p, &q, &cur)?;
    write_index_list(p.indices(), format!("{prefix}p.txt"))?;
    write_index_list(q.indices(), format!("{prefix}q.txt"))?;
    write_matrix_market(cur.c(), format!("{prefix}C.mtx"))?;
    write_matrix_market(cur.u(), format!("{prefix}U.mtx"))?;
    write_matrix_market(cur.r(), format!("{prefix}R.mtx"))?;
    println!(
        "{} CUR of rank {} via {} written with prefix {prefix}",
        cur.variant(),
        rank,
        method
    );
    println!("{cert}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    input: PathBuf,
    kmax: usize,
    methods: Vec<Method>,
    engine: Engine,
    tol: f64,
    lev_r: Option<usize>,
    seed: u64,
    out: PathBuf,
) -> CliResult<()> {
    let a = read_matrix_market(input)?;
    let svd = compute_svd(&a, engine, tol)?;
    let mut records = Vec::new();
    for arg in methods {
        let method = to_method(arg, lev_r)?;
        for entry in rank_sweep(&a, &svd, method, kmax, seed)? {
            match entry.outcome {
                Ok(cert) => records.push(SweepRecord::from_certificate(
                    entry.k,
                    method.name(),
                    &cert,
                    entry.elapsed_ms,
                )),
                Err(e) => eprintln!("warning: {} k={} skipped: {e}", method.name(), entry.k),
            }
        }
    }
    write_sweep_csv(&records, &out)?;
    println!("wrote {} sweep rows to {}", records.len(), out.display());
    Ok(())
}
