use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaborbench::erasure::SubsetMode;
use gaborbench::experiments::{self, Lemma, Table};
use gaborbench::parse::{parse_list, parse_range, Expr};
use gaborbench::{Error, ErrorClass, WindowKind};

/// Seeded experiments on finite Gabor frames and mutually unbiased bases.
#[derive(Parser, Debug)]
#[command(name = "gaborbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads (0 or unset: one per core).
    #[arg(long, global = true, env = "GABORBENCH_THREADS")]
    threads: Option<usize>,
    /// Print floats with all significant digits instead of six decimals.
    #[arg(long, global = true)]
    full_precision: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Dims {
    /// Signal dimension.
    #[arg(long = "M", id = "dim", conflicts_with = "m_range")]
    m: Option<usize>,
    /// Dimensions as a:b or a:b:step (inclusive).
    #[arg(long = "M-range")]
    m_range: Option<String>,
}

impl Dims {
    fn resolve(&self, default: &str) -> Result<Vec<usize>, Error> {
        match (&self.m, &self.m_range) {
            (Some(m), _) => Ok(vec![*m]),
            (None, Some(r)) => parse_range(r),
            (None, None) => parse_range(default),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frame bounds, condition number and tightness of (g, Lambda).
    FrameBounds {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value = "steinhaus")]
        window: WindowKind,
        #[arg(long, default_value = "full")]
        lambda: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Normalized frame bounds and eigenvalue histogram for random (g, Lambda).
    SvDistribution {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value = "steinhaus")]
        window: WindowKind,
        /// Bernoulli density as an expression in M.
        #[arg(long, default_value = "4/M")]
        tau: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 60)]
        bins: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Normalized trace moments over a grid of M and density constants C.
    TraceHeatmap {
        #[command(flatten)]
        dims: Dims,
        /// Density constants C.
        #[arg(long, default_value = "1,2,3,4,5,6,7,8")]
        c_list: String,
        #[arg(long, default_value = "steinhaus")]
        window: WindowKind,
        /// Moment order.
        #[arg(long, default_value_t = 4)]
        m: u32,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Worst-case subframe condition numbers of the Alltop frame against
    /// trace-based and theoretical estimates.
    MubTable {
        #[arg(long = "M", default_value_t = 5)]
        m: usize,
        /// Erasure rates (default 0.00, 0.04, ..., 0.68).
        #[arg(long)]
        p_list: Option<String>,
        /// Sample this many subframes per rate instead of enumerating all.
        #[arg(long, requires = "seed")]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Smallest lower frame bound over random subsets of F x Z_M.
    DeltaP {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value = "sphere")]
        window: WindowKind,
        /// |F|, the number of time shifts.
        #[arg(long, default_value_t = 5)]
        f_size: usize,
        /// Erasure rate.
        #[arg(long, default_value = "1/3")]
        p: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte-Carlo checks of tail bounds.
    ProbChecks {
        /// Tail bound to check: hoeffding, gaussian-norm or roots-of-unity.
        #[arg(long)]
        lemma: Lemma,
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        /// Deviation t of the cardinality check.
        #[arg(long, default_value_t = 0.1)]
        t: f64,
        /// Constant C of the roots-of-unity check.
        #[arg(long, default_value_t = 8.0)]
        c: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn seed_for(seed: Option<u64>, command: &str) -> Result<u64, Error> {
    seed.ok_or_else(|| Error::InvalidParameter(format!("--seed is required for {command}")))
}

fn run(command: Command) -> Result<Table, Error> {
    match command {
        Command::FrameBounds { dims, window, lambda, seed } => {
            let cfg = experiments::FrameBoundsConfig { dims: dims.resolve("16:16")?, window, lambda: lambda.parse()?, seed };
            experiments::frame_bounds_table(&cfg)
        }
        Command::SvDistribution { dims, window, tau, trials, bins, seed } => {
            let mut cfg = experiments::SvDistributionConfig::new(dims.resolve("100:300:50")?, trials, seed_for(seed, "sv-distribution")?);
            cfg.window = window;
            cfg.tau = tau.parse::<Expr>()?;
            cfg.bins = bins;
            experiments::sv_distribution_table(&cfg)
        }
        Command::TraceHeatmap { dims, c_list, window, m, samples, seed } => {
            let cfg = experiments::TraceHeatmapConfig {
                dims: dims.resolve("50:200:50")?,
                constants: parse_list(&c_list)?,
                window,
                m,
                samples,
                seed: seed_for(seed, "trace-heatmap")?,
            };
            experiments::trace_heatmap_table(&cfg)
        }
        Command::MubTable { m, p_list, samples, seed } => {
            let rates = match p_list {
                Some(list) => parse_list(&list)?,
                None => experiments::default_rates(),
            };
            let mode = match samples {
                Some(count) => SubsetMode::Sample { count, seed: seed_for(seed, "sampled mub-table")? },
                None => SubsetMode::Exhaustive,
            };
            let rows = experiments::mub_table(&experiments::MubTableConfig { dim: m, rates, mode })?;
            Ok(experiments::nerf_rows_table(&rows))
        }
        Command::DeltaP { dims, window, f_size, p, samples, seed } => {
            let p = p.parse::<Expr>()?.eval(f64::NAN);
            let cfg = experiments::DeltaPConfig {
                dims: dims.resolve("20:60:10")?,
                window,
                f_size,
                p,
                samples,
                seed: seed_for(seed, "delta-p")?,
            };
            experiments::delta_p_table(&cfg)
        }
        Command::ProbChecks { lemma, dims, trials, tau, t, c, seed } => {
            let cfg = experiments::ProbChecksConfig {
                lemma,
                dims: dims.resolve("64:64")?,
                trials,
                tau,
                t,
                c,
                seed: seed_for(seed, "prob-checks")?,
            };
            experiments::prob_checks_table(&cfg)
        }
    }
}

/// Writes through a temporary file in the target directory so that a failed
/// run never leaves partial output behind.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Config => 2,
        ErrorClass::Numerical => 3,
        ErrorClass::ResourceGuard => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.output.threads.unwrap_or(0);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("gaborbench: cannot start worker pool: {e}");
        return ExitCode::from(3);
    }
    let table = match run(cli.command) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("gaborbench: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match cli.output.format {
        Format::Csv => table.to_csv(cli.output.full_precision),
        Format::Json => table.to_json(cli.output.full_precision),
    };
    let written = match &cli.output.out {
        Some(path) => write_atomic(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("gaborbench: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
