use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use maxlr::apsolve::{ap_run, estimate_distance, ApConfig, SearchConfig, DEFAULT_BS_TOL, DEFAULT_RESTARTS};
use maxlr::diagnostics::{bound_report, diagnose, DEFAULT_RANK_TOL, DEFAULT_THM8_C};
use maxlr::embeddings::{hw_approximant, jl_approximant, SubGaussian, DEFAULT_TRIALS};
use maxlr::genmat::{MatrixClass, MatrixSpec};
use maxlr::harness::{run_sweep, write_outputs, SweepSpec};
use maxlr::matcore::io::{format_matrix, parse_matrix};
use maxlr::{DenseMatrix, Rng};

#[derive(Parser)]
#[command(name = "maxlr", version, about = "Low-rank approximation in the maximum norm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a matrix from one of the built-in families.
    Gen(GenArgs),
    /// Norms, coherence and distance bounds of a matrix.
    Diag(DiagArgs),
    /// Randomized constructive approximant.
    Construct(ConstructArgs),
    /// One run of alternating projections at a fixed radius.
    Approx(ApproxArgs),
    /// Bracket the rank-r max-norm distance by bisection.
    Distance(DistanceArgs),
    /// Run a parameter sweep described by a TOML file.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Identity,
    Hadamard,
    Uniform,
    Banded,
    StiefelProduct,
}

impl From<ClassArg> for MatrixClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Identity => MatrixClass::Identity,
            ClassArg::Hadamard => MatrixClass::Hadamard,
            ClassArg::Uniform => MatrixClass::Uniform,
            ClassArg::Banded => MatrixClass::Banded,
            ClassArg::StiefelProduct => MatrixClass::StiefelProduct,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    class: ClassArg,
    #[arg(long)]
    n: usize,
    /// Band width (banded).
    #[arg(long)]
    b: Option<usize>,
    /// Factor rank (stiefel-product).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scale to unit max norm (stiefel-product).
    #[arg(long)]
    normalize: bool,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagArgs {
    /// Matrix file, or `-` for stdin.
    input: PathBuf,
    /// Rank at which to evaluate the bounds.
    #[arg(long, default_value_t = 1)]
    rank: usize,
    #[arg(long, default_value_t = DEFAULT_THM8_C)]
    thm8_c: f64,
    /// Accuracy used by the sufficient-rank formulas.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    /// Human-readable output instead of CSV.
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Jl,
    Hw,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Rademacher,
    Gaussian,
}

#[derive(Args)]
struct ConstructArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, short)]
    rank: usize,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = DistArg::Rademacher)]
    dist: DistArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_THM8_C)]
    thm8_c: f64,
    /// Where to write the approximant.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct ApproxArgs {
    input: PathBuf,
    #[arg(long, short)]
    rank: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = ApConfig::default().max_iter)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the last iterate to this file.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct DistanceArgs {
    input: PathBuf,
    #[arg(long, short)]
    rank: usize,
    #[arg(long, default_value_t = DEFAULT_BS_TOL)]
    bs_tol: f64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long, default_value_t = ApConfig::default().max_iter)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the certificate to this file.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_input(path: &Path) -> Result<DenseMatrix> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse_matrix(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_matrix_to(m: &DenseMatrix, path: &Path) -> Result<()> {
    fs::write(path, format_matrix(m)).with_context(|| format!("writing {}", path.display()))
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn gen(a: GenArgs) -> Result<()> {
    let spec = MatrixSpec {
        class: a.class.into(),
        n: a.n,
        b: a.b,
        k: a.k,
        seed: a.seed,
        normalize: a.normalize,
    };
    let m = spec.generate()?;
    match a.out {
        Some(p) => write_matrix_to(&m, &p),
        None => Ok(io::stdout().write_all(format_matrix(&m).as_bytes())?),
    }
}

fn diag(a: DiagArgs) -> Result<()> {
    let x = read_input(&a.input)?;
    let d = diagnose(&x, a.rank_tol)?;
    let b = bound_report(&d, a.rank, a.thm8_c, a.eps);
    let fields: Vec<(&str, String)> = vec![
        ("m", d.m.to_string()),
        ("n", d.n.to_string()),
        ("max_norm", real(d.max_norm)),
        ("spectral_norm", real(d.spectral_norm)),
        ("fro_norm", real(d.fro_norm)),
        ("numerical_rank", d.rank.to_string()),
        ("spikiness", real(d.spikiness)),
        ("mu_col", real(d.mu_col)),
        ("mu_row", real(d.mu_row)),
        ("r", b.rank.to_string()),
        ("ultimate_bound", real(b.ultimate)),
        ("cross_bound", real(b.cross)),
        ("thm4_bound", real(b.thm4.bound)),
        ("thm4_eps", real(b.thm4.eps)),
        ("thm4_valid", b.thm4.valid.to_string()),
        ("thm8_bound", real(b.thm8.bound)),
        ("thm8_eps", real(b.thm8.eps)),
        ("thm8_valid", b.thm8.valid.to_string()),
        ("thm8_C", real(b.thm8_c)),
        ("eps", real(b.eps)),
        ("alon_rank", real(b.alon_rank)),
        ("udell_rank", b.udell_rank.to_string()),
    ];
    print_fields(&fields, a.pretty);
    Ok(())
}

fn print_fields(fields: &[(&str, String)], pretty: bool) {
    if pretty {
        let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in fields {
            println!("{k:<width$}  {v}");
        }
    } else {
        let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
        let vals: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
        println!("{}", keys.join(","));
        println!("{}", vals.join(","));
    }
}

fn construct(a: ConstructArgs) -> Result<()> {
    let x = read_input(&a.input)?;
    let rng = Rng::new(a.seed);
    let dist = match a.dist {
        DistArg::Rademacher => SubGaussian::Rademacher,
        DistArg::Gaussian => SubGaussian::Gaussian,
    };
    let (y, rep) = match a.method {
        Method::Jl => jl_approximant(&x, a.rank, a.trials, &rng)?,
        Method::Hw => hw_approximant(&x, a.rank, dist, a.trials, &rng, a.thm8_c)?,
    };
    write_matrix_to(&y.to_dense(), &a.out)?;
    let method = match a.method {
        Method::Jl => "jl",
        Method::Hw => "hw",
    };
    print_fields(
        &[
            ("method", method.to_string()),
            ("r", a.rank.to_string()),
            ("achieved_error", real(rep.achieved_error)),
            ("theoretical_bound", real(rep.theoretical_bound)),
            ("bound_valid", rep.bound_valid.to_string()),
            ("bound_eps", real(rep.bound_eps)),
            ("trials_used", rep.trials_used.to_string()),
            ("best_trial", rep.best_trial.to_string()),
            ("best_seed", rep.best_seed.to_string()),
            ("degenerate_draws", rep.degenerate_draws.to_string()),
        ],
        false,
    );
    Ok(())
}

fn approx(a: ApproxArgs) -> Result<()> {
    let x = read_input(&a.input)?;
    let cfg = ApConfig {
        max_iter: a.max_iter,
        seed: a.seed,
        ..ApConfig::with_eps(a.eps)
    };
    let rep = ap_run(&x, a.rank, &cfg)?;
    if let Some(p) = &a.dump {
        write_matrix_to(&rep.certificate.to_dense(), p)?;
    }
    print_fields(
        &[
            ("r", a.rank.to_string()),
            ("eps", real(a.eps)),
            ("feasible", rep.feasible.to_string()),
            ("iterations", rep.iterations.to_string()),
            ("final_error", real(rep.final_error)),
            ("stop_reason", rep.stop_reason.as_str().to_string()),
            ("seed", rep.seed.to_string()),
        ],
        false,
    );
    Ok(())
}

fn distance(a: DistanceArgs) -> Result<()> {
    let x = read_input(&a.input)?;
    let search = SearchConfig {
        lo: a.lo,
        hi: a.hi,
        bs_tol: a.bs_tol,
        restarts: a.restarts,
        ..SearchConfig::default()
    };
    let cfg = ApConfig {
        max_iter: a.max_iter,
        seed: a.seed,
        ..ApConfig::default()
    };
    let mut fields = vec![("r", a.rank.to_string())];
    match estimate_distance(&x, a.rank, &search, &cfg) {
        Ok(est) => {
            if let Some(p) = &a.dump {
                write_matrix_to(&est.certificate.to_dense(), p)?;
            }
            fields.extend([
                ("status", "ok".to_string()),
                ("eps_minus", real(est.eps_minus)),
                ("eps_plus", real(est.eps_plus)),
                ("certificate_error", real(est.certificate_error)),
                ("zero_certificate", est.zero_certificate.to_string()),
                ("probes", est.probes.len().to_string()),
            ]);
        }
        Err(e) => {
            let nan = real(f64::NAN);
            fields.extend([
                ("status", format!("\"error: {e}\"")),
                ("eps_minus", nan.clone()),
                ("eps_plus", nan.clone()),
                ("certificate_error", nan),
                ("zero_certificate", "false".to_string()),
                ("probes", "0".to_string()),
            ]);
        }
    }
    print_fields(&fields, false);
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.config)
        .with_context(|| format!("reading {}", a.config.display()))?;
    let spec = SweepSpec::from_toml(&text)?;
    let Some(dir) = a.out.or_else(|| spec.output_dir.clone()) else {
        bail!("no output directory: pass --out or set output_dir");
    };
    let outcome = run_sweep(&spec)?;
    for path in write_outputs(&outcome, &dir)? {
        eprintln!("wrote {}", path.display());
    }
    if outcome.has_failures() {
        for rec in &outcome.records {
            for f in &rec.failures {
                eprintln!("axis {}: {f}", rec.axis);
            }
        }
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(a) => gen(a)?,
        Command::Diag(a) => diag(a)?,
        Command::Construct(a) => construct(a)?,
        Command::Approx(a) => approx(a)?,
        Command::Distance(a) => distance(a)?,
        Command::Sweep(a) => return sweep(a),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
