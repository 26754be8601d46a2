//! Command-line front end. All subcommands resolve to a [`RunConfig`], which
//! is what actually runs; `run <file>` replays a saved config.

mod commands;
pub mod config;
pub mod pairs_io;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

pub use commands::DEFAULT_PRIME_LIMIT;
pub use config::{CommandName, Format, RunConfig};

use crate::error::{Error, Result};
use crate::generator::ParitySel;
use crate::primality::PrimalityPolicy;
use config::{parse_parity, parse_u64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "quadprime", version, about = "Prime search in sets of the form X^2 + c")]
struct Cli {
    /// Worker threads; 0 means one per core. Output does not depend on it.
    #[arg(long, global = true, env = "QUADPRIME_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Print the resolved run configuration as key=value lines and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Miller-Rabin rounds for numbers above 2^64.
    #[arg(long, default_value_t = PrimalityPolicy::default().miller_rabin_rounds)]
    mr_rounds: u32,
    /// Skip the strong Lucas stage.
    #[arg(long)]
    no_lucas: bool,
    /// Seed for the random Miller-Rabin bases.
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn big(s: &str) -> std::result::Result<BigInt, String> {
    s.parse().map_err(|_| format!("{s:?} is not an integer"))
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate (c, j0) pairs whose sets avoid all small prime divisors.
    GenC {
        /// Largest prime that must not divide any element.
        #[arg(long, value_parser = parse_u64)]
        q1: u64,
        /// Number of pairs to produce.
        #[arg(long, value_parser = parse_u64)]
        count: u64,
        /// odd, even or both.
        #[arg(long, value_parser = parse_parity, default_value = "odd")]
        parity: ParitySel,
        /// 1: exhaustive family walk, 2: seeded nonresidue chain.
        #[arg(long, default_value_t = 1)]
        algo: u8,
        /// First seed X for the seeded chain.
        #[arg(long, value_parser = big)]
        seed: Option<BigInt>,
        /// Number of consecutive seeds to run; repeated classes are dropped.
        #[arg(long, value_parser = parse_u64)]
        seed_count: Option<u64>,
        /// Lift every c to the smallest member of its class with this many digits.
        #[arg(long, value_parser = parse_u64)]
        digits: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the density constant h_c as a product over primes.
    EstimateHc {
        /// The constant c of X^2 + c; may be negative.
        #[arg(long, value_parser = big, allow_hyphen_values = true)]
        c: BigInt,
        /// Multiply over primes up to this bound (default 4000000).
        #[arg(long, value_parser = parse_u64)]
        prime_limit: Option<u64>,
        /// Also count primes X^2 + c for X <= x-max.
        #[arg(long, value_parser = parse_u64)]
        x_max: Option<u64>,
        /// Record the empirical count every this many values of X.
        #[arg(long, value_parser = parse_u64)]
        checkpoint_step: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// List primes X^2 + c in the window X <= 4 m_c / z.
    Hunt {
        /// Pairs CSV written by gen-c.
        #[arg(long, conflicts_with = "c", required_unless_present = "c")]
        pairs: Option<PathBuf>,
        /// A single c instead of a pairs file.
        #[arg(long, value_parser = big, allow_hyphen_values = true)]
        c: Option<BigInt>,
        /// Window divisor: search X <= 4 m_c / z (default 4).
        #[arg(long)]
        z: Option<f64>,
        /// Search X <= x-max instead of the z window.
        #[arg(long, value_parser = parse_u64)]
        x_max: Option<u64>,
        /// Stop each set after this many primes.
        #[arg(long, value_parser = parse_u64)]
        max_results: Option<u64>,
        /// Use only the first `count` pairs of the file.
        #[arg(long, value_parser = parse_u64)]
        count: Option<u64>,
        /// Lift the pairs to this many digits first.
        #[arg(long, value_parser = parse_u64)]
        digits: Option<u64>,
        /// Resume file; progress is saved every checkpoint-step values of X.
        #[arg(long, requires = "output")]
        checkpoint: Option<PathBuf>,
        /// Values of X per saved block.
        #[arg(long, value_parser = parse_u64)]
        checkpoint_step: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Prime-count statistics over a cohort of sets of equal size.
    DensityScan {
        /// Pairs CSV written by gen-c.
        #[arg(long)]
        pairs: PathBuf,
        /// Window divisor: count X <= 4 m_c / z (default 1).
        #[arg(long)]
        z: Option<f64>,
        /// Density constant to compare against; defaults to the cohort mean.
        #[arg(long)]
        h: Option<f64>,
        /// Use only the first `count` pairs of the file.
        #[arg(long, value_parser = parse_u64)]
        count: Option<u64>,
        /// Lift the pairs to this many digits first.
        #[arg(long, value_parser = parse_u64)]
        digits: Option<u64>,
        /// Indices per histogram bucket.
        #[arg(long, value_parser = parse_u64)]
        bucket_width: Option<u64>,
        /// Number of histogram buckets (default 10).
        #[arg(long, value_parser = parse_u64)]
        buckets: Option<u64>,
        /// First bucket one index wider (true) or all buckets equal (false).
        /// By default the layout that tiles the window exactly is used.
        #[arg(long)]
        closed_first: Option<bool>,
        /// Histogram CSV destination (stdout when absent).
        #[arg(long)]
        hist_output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Count primes along the cofactor progression 4n(A1 n + eps X0) + B0.
    CofactorCount {
        /// Multiplier A1 (default 5).
        #[arg(long, value_parser = parse_u64)]
        a1: Option<u64>,
        /// The constant c (default 1).
        #[arg(long, value_parser = big, allow_hyphen_values = true)]
        c: Option<BigInt>,
        /// Sign of the linear term, 1 or -1 (default 1).
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<i64>,
        /// Count n with A1 n < x; repeat or comma-separate.
        #[arg(long = "x", value_parser = parse_u64, value_delimiter = ',')]
        x_values: Vec<u64>,
        /// Also count over 0 <= n <= n-max inclusive.
        #[arg(long, value_parser = parse_u64)]
        n_max: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Quadratic residues and nonresidues modulo odd primes.
    Residues {
        /// Odd primes; repeat or comma-separate.
        #[arg(long = "p", value_parser = parse_u64, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a saved key=value configuration.
    Run { config: PathBuf },
}

fn apply_common(cfg: &mut RunConfig, c: Common) {
    cfg.mr_rounds = c.mr_rounds;
    cfg.lucas = !c.no_lucas;
    cfg.rng_seed = c.rng_seed;
    cfg.format = c.format;
    cfg.output = c.output;
}

fn to_config(cmd: Cmd) -> Result<RunConfig> {
    let cfg = match cmd {
        Cmd::GenC { q1, count, parity, algo, seed, seed_count, digits, common } => {
            let mut cfg = RunConfig::new(CommandName::GenC);
            cfg.q1 = Some(q1);
            cfg.count = Some(count);
            cfg.parity = Some(parity);
            cfg.algo = Some(algo);
            cfg.seed = seed;
            cfg.seed_count = seed_count;
            cfg.digits = digits;
            apply_common(&mut cfg, common);
            cfg
        }
        Cmd::EstimateHc { c, prime_limit, x_max, checkpoint_step, common } => {
            let mut cfg = RunConfig::new(CommandName::EstimateHc);
            cfg.c = Some(c);
            cfg.prime_limit = prime_limit;
            cfg.x_max = x_max;
            cfg.checkpoint_step = checkpoint_step;
            apply_common(&mut cfg, common);
            cfg
        }
        Cmd::Hunt { pairs, c, z, x_max, max_results, count, digits, checkpoint, checkpoint_step, common } => {
            let mut cfg = RunConfig::new(CommandName::Hunt);
            cfg.pairs = pairs;
            cfg.c = c;
            cfg.z = z;
            cfg.x_max = x_max;
            cfg.max_results = max_results;
            cfg.count = count;
            cfg.digits = digits;
            cfg.checkpoint = checkpoint;
            cfg.checkpoint_step = checkpoint_step;
            apply_common(&mut cfg, common);
            cfg
        }
        Cmd::DensityScan { pairs, z, h, count, digits, bucket_width, buckets, closed_first, hist_output, common } => {
            let mut cfg = RunConfig::new(CommandName::DensityScan);
            cfg.pairs = Some(pairs);
            cfg.z = z;
            cfg.h = h;
            cfg.count = count;
            cfg.digits = digits;
            cfg.bucket_width = bucket_width;
            cfg.buckets = buckets;
            cfg.closed_first = closed_first;
            cfg.hist_output = hist_output;
            apply_common(&mut cfg, common);
            cfg
        }
        Cmd::CofactorCount { a1, c, eps, x_values, n_max, common } => {
            let mut cfg = RunConfig::new(CommandName::CofactorCount);
            cfg.a1 = a1;
            cfg.c = c;
            cfg.eps = eps;
            cfg.x_values = x_values;
            cfg.n_max = n_max;
            apply_common(&mut cfg, common);
            cfg
        }
        Cmd::Residues { primes, common } => {
            let mut cfg = RunConfig::new(CommandName::Residues);
            cfg.primes = primes;
            apply_common(&mut cfg, common);
            cfg
        }
        Cmd::Run { config } => RunConfig::from_kv(&std::fs::read_to_string(config)?)?,
    };
    Ok(cfg)
}

/// Run one configuration on the current thread pool.
pub fn execute(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    match cfg.command {
        CommandName::GenC => commands::gen_c(cfg, stdout),
        CommandName::EstimateHc => commands::estimate_hc(cfg, stdout),
        CommandName::Hunt => commands::hunt(cfg, stdout),
        CommandName::DensityScan => commands::density_scan(cfg, stdout),
        CommandName::CofactorCount => commands::cofactor_count(cfg, stdout),
        CommandName::Residues => commands::residues(cfg, stdout),
    }
}

/// Run `cfg` on a pool of `cfg.workers` threads (0: rayon's default).
pub fn execute_with_workers(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start worker pool: {e}")))?;
    // stdout locks are not Send; buffer what goes there and copy it out
    let mut buf = Vec::new();
    let result = pool.install(|| execute(cfg, &mut buf));
    stdout.write_all(&buf)?;
    result
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Verification(_) => EXIT_VERIFICATION,
        _ => EXIT_USAGE,
    }
}

/// Parse `args` (program name first), run, and return the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let from_file = matches!(cli.command, Cmd::Run { .. });
    let mut cfg = match to_config(cli.command) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    if !from_file || cli.workers != 0 {
        cfg.workers = cli.workers;
    }
    if cli.dump_config {
        let _ = write!(stdout, "{}", cfg.to_kv());
        return EXIT_OK;
    }
    match execute_with_workers(&cfg, stdout).and_then(|_| stdout.flush().map_err(Error::from)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
