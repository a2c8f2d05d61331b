use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use log::info;
use rira::{
    condition_trace, gen_singular_grid, gen_toy_spectrum, make_sketch, read_matrix_market, rira_solve,
    write_condition_csv, write_matrix_market_file, CsrMatrix, OrthoMethod, RiraConfig, RiraStatus, SketchKind, Which,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_MAX_ITER: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rira",
    version,
    about = "Randomized implicitly restarted Arnoldi eigensolver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a few eigenpairs of a sparse matrix.
    Solve(SolveArgs),
    /// Record the conditioning of sketch-orthonormalized bases column by column.
    BenchOrtho(BenchArgs),
    /// Write a generated test matrix in Matrix Market format.
    Gen(GenArgs),
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["matrix", "toy"])))]
struct SolveArgs {
    /// Matrix Market file.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Use the generated test matrix with spectrum 1..=N.
    #[arg(long, value_name = "N")]
    toy: Option<usize>,
    #[arg(long, default_value_t = 6)]
    nev: usize,
    #[arg(long, default_value_t = 30)]
    ncv: usize,
    #[arg(long, default_value = "LM")]
    which: Which,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
    #[arg(long, default_value = "sparse-sign")]
    sketch: SketchKind,
    /// Defaults to 4 * ncv.
    #[arg(long)]
    sketch_dim: Option<usize>,
    #[arg(long, default_value_t = 8)]
    zeta: usize,
    #[arg(long, default_value = "rgs")]
    ortho: OrthoMethod,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    extra: usize,
    /// Compute ‖Ax − θx‖ / ‖x‖ for every returned pair.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value = "rira-out")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Rows of the generated grid matrix.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Number of columns to orthonormalize.
    #[arg(long, default_value_t = 150)]
    k: usize,
    /// Read the columns from a Matrix Market file instead of the generated grid.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "rgs,rcgs,rcgs2,rcgs2w")]
    methods: Vec<OrthoMethod>,
    #[arg(long, default_value = "gaussian")]
    sketch: SketchKind,
    /// Defaults to min(n - 1, 20 * k).
    #[arg(long)]
    sketch_dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "rira-out")]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Matrix size.
    #[arg(long, value_name = "N")]
    toy: usize,
    #[arg(long)]
    out: PathBuf,
}

/// Failures that map to a specific exit code.
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn config_err<T>(r: rira::Result<T>, what: impl FnOnce() -> String) -> Result<T, Failure> {
    r.map_err(|e| Failure::Config(anyhow::Error::new(e).context(what())))
}

fn load_matrix(args: &SolveArgs) -> Result<CsrMatrix, Failure> {
    match (&args.matrix, args.toy) {
        (Some(path), _) => config_err(read_matrix_market(path), || format!("cannot read {}", path.display())),
        (None, Some(n)) => config_err(gen_toy_spectrum(n), || "cannot generate toy matrix".into()),
        (None, None) => unreachable!("clap requires one input"),
    }
}

fn solve(args: SolveArgs) -> Result<u8, Failure> {
    let a = load_matrix(&args)?;
    let config = RiraConfig {
        nev: args.nev,
        ncv: args.ncv,
        which: args.which,
        tol: args.tol,
        max_outer: args.max_iter,
        sketch: args.sketch,
        sketch_dim: args.sketch_dim,
        seed: args.seed,
        zeta: Some(args.zeta),
        ortho: args.ortho,
        extra: args.extra,
        ..RiraConfig::default()
    };
    config_err(config.validate(a.n()), || "invalid solver configuration".into())?;
    info!(
        "n = {}, nnz = {}, sketch dimension {}",
        a.n(),
        a.nnz(),
        config.effective_sketch_dim(a.n())
    );

    let report = rira_solve(&a, &config).context("solve failed")?;
    let true_res = if args.verify {
        Some(report.true_residuals(&a).context("verification failed")?)
    } else {
        None
    };

    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    let json = report
        .to_json(Some(&config), true_res.as_deref())
        .context("cannot serialize report")?;
    fs::write(args.out.join("report.json"), json).context("cannot write report")?;
    let trace = BufWriter::new(File::create(args.out.join("trace.csv")).context("cannot create trace")?);
    report.write_trace_csv(trace).context("cannot write trace")?;

    println!(
        "status {:?}, {} outer iterations, {} matrix-vector products, {:.3} s",
        report.status,
        report.iterations(),
        report.matvecs,
        report.seconds
    );
    match &true_res {
        Some(_) => println!(
            "{:>4}  {:>24}  {:>24}  {:>12}  {:>12}",
            "#", "re", "im", "sketched", "true"
        ),
        None => println!("{:>4}  {:>24}  {:>24}  {:>12}", "#", "re", "im", "sketched"),
    }
    for (i, p) in report.pairs.iter().enumerate() {
        let mut line = format!(
            "{:>4}  {:>24.16e}  {:>24.16e}  {:>12.4e}",
            i + 1,
            p.theta.re,
            p.theta.im,
            p.sres
        );
        if let Some(t) = &true_res {
            line.push_str(&format!("  {:>12.4e}", t[i]));
        }
        println!("{line}");
    }
    for note in &report.notes {
        println!("note: {note}");
    }
    println!("report written to {}", args.out.display());

    Ok(match report.status {
        RiraStatus::MaxIter => EXIT_MAX_ITER,
        RiraStatus::Converged | RiraStatus::Breakdown => 0,
    })
}

fn bench_ortho(args: BenchArgs) -> Result<u8, Failure> {
    let w = match &args.matrix {
        Some(path) => {
            let a = config_err(read_matrix_market(path), || format!("cannot read {}", path.display()))?;
            let dense = a.to_dense();
            let k = args.k.min(dense.ncols());
            dense.columns(0, k).into_owned()
        }
        None => config_err(gen_singular_grid(args.n, args.k), || {
            "cannot generate grid matrix".into()
        })?,
    };
    let (n, k) = w.shape();
    let d = args.sketch_dim.unwrap_or((20 * k).min(n - 1));
    let op = Arc::new(config_err(make_sketch(args.sketch, n, d, args.seed, None), || {
        "cannot build sketch".into()
    })?);
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;

    println!(
        "{:>8}  {:>8}  {:>12}  {:>12}",
        "method", "columns", "max kappa", "max dev"
    );
    for method in &args.methods {
        let rows = config_err(condition_trace(&w, op.clone(), *method), || format!("{method} failed"))?;
        let path = args.out.join(format!("condition_{method}.csv"));
        write_csv(&path, &rows)?;
        let kappa = rows.iter().map(|r| r.kappa_q).fold(0.0, f64::max);
        let dev = rows.iter().map(|r| r.dev_sts).fold(0.0, f64::max);
        println!(
            "{:>8}  {:>8}  {:>12.4e}  {:>12.4e}",
            method.to_string(),
            rows.len(),
            kappa,
            dev
        );
    }
    Ok(0)
}

fn write_csv(path: &Path, rows: &[rira::ConditionRow]) -> anyhow::Result<()> {
    let file = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
    write_condition_csv(rows, file)?;
    Ok(())
}

fn gen(args: GenArgs) -> Result<u8, Failure> {
    let a = config_err(gen_toy_spectrum(args.toy), || "cannot generate toy matrix".into())?;
    write_matrix_market_file(&a, &args.out).with_context(|| format!("cannot write {}", args.out.display()))?;
    println!(
        "wrote {} ({} x {}, {} nonzeros)",
        args.out.display(),
        a.n(),
        a.n(),
        a.nnz()
    );
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::BenchOrtho(a) => bench_ortho(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
