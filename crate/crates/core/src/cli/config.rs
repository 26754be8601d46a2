//! Flat `key=value` run configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{invalid, Error, Result};
use crate::generator::ParitySel;
use crate::primality::PrimalityPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandName {
    GenC,
    EstimateHc,
    Hunt,
    DensityScan,
    CofactorCount,
    Residues,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandName::GenC => "gen-c",
            CommandName::EstimateHc => "estimate-hc",
            CommandName::Hunt => "hunt",
            CommandName::DensityScan => "density-scan",
            CommandName::CofactorCount => "cofactor-count",
            CommandName::Residues => "residues",
        }
    }
}

impl FromStr for CommandName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gen-c" => CommandName::GenC,
            "estimate-hc" => CommandName::EstimateHc,
            "hunt" => CommandName::Hunt,
            "density-scan" => CommandName::DensityScan,
            "cofactor-count" => CommandName::CofactorCount,
            "residues" => CommandName::Residues,
            _ => return invalid(format!("unknown command {s:?}")),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a run depends on. Equal configs give byte-identical output
/// whatever `workers` is.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: CommandName,
    pub q1: Option<u64>,
    pub count: Option<u64>,
    pub parity: Option<ParitySel>,
    pub algo: Option<u8>,
    pub seed: Option<BigInt>,
    pub seed_count: Option<u64>,
    pub digits: Option<u64>,
    pub z: Option<f64>,
    pub x_max: Option<u64>,
    pub checkpoint_step: Option<u64>,
    pub prime_limit: Option<u64>,
    pub c: Option<BigInt>,
    pub h: Option<f64>,
    pub max_results: Option<u64>,
    pub bucket_width: Option<u64>,
    pub buckets: Option<u64>,
    /// Histogram layout; `None` picks whichever tiles the window exactly.
    pub closed_first: Option<bool>,
    pub a1: Option<u64>,
    pub eps: Option<i64>,
    pub x_values: Vec<u64>,
    pub n_max: Option<u64>,
    pub primes: Vec<u64>,
    pub mr_rounds: u32,
    pub lucas: bool,
    pub rng_seed: u64,
    pub format: Format,
    pub pairs: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub hist_output: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub workers: usize,
}

impl RunConfig {
    pub fn new(command: CommandName) -> Self {
        let policy = PrimalityPolicy::default();
        Self {
            command,
            q1: None,
            count: None,
            parity: None,
            algo: None,
            seed: None,
            seed_count: None,
            digits: None,
            z: None,
            x_max: None,
            checkpoint_step: None,
            prime_limit: None,
            c: None,
            h: None,
            max_results: None,
            bucket_width: None,
            buckets: None,
            closed_first: None,
            a1: None,
            eps: None,
            x_values: Vec::new(),
            n_max: None,
            primes: Vec::new(),
            mr_rounds: policy.miller_rabin_rounds,
            lucas: policy.use_lucas_stage,
            rng_seed: policy.rng_seed,
            format: Format::Csv,
            pairs: None,
            output: None,
            hist_output: None,
            checkpoint: None,
            workers: 0,
        }
    }

    pub fn policy(&self) -> Result<PrimalityPolicy> {
        PrimalityPolicy::new(self.mr_rounds, self.lucas, self.rng_seed)
    }

    /// One `key=value` per line in a fixed key order; unset options are
    /// omitted.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        put("command", self.command.as_str().into());
        macro_rules! opt {
            ($key:literal, $field:expr) => {
                if let Some(v) = &$field {
                    put($key, v.to_string());
                }
            };
        }
        opt!("q1", self.q1);
        opt!("count", self.count);
        if let Some(p) = self.parity {
            put("parity", parity_str(p).into());
        }
        opt!("algo", self.algo);
        opt!("seed", self.seed);
        opt!("seed_count", self.seed_count);
        opt!("digits", self.digits);
        opt!("z", self.z);
        opt!("x_max", self.x_max);
        opt!("checkpoint_step", self.checkpoint_step);
        opt!("prime_limit", self.prime_limit);
        opt!("c", self.c);
        opt!("h", self.h);
        opt!("max_results", self.max_results);
        opt!("bucket_width", self.bucket_width);
        opt!("buckets", self.buckets);
        opt!("closed_first", self.closed_first);
        opt!("a1", self.a1);
        opt!("eps", self.eps);
        if !self.x_values.is_empty() {
            put("x", join(&self.x_values));
        }
        opt!("n_max", self.n_max);
        if !self.primes.is_empty() {
            put("p", join(&self.primes));
        }
        put("mr_rounds", self.mr_rounds.to_string());
        put("lucas", self.lucas.to_string());
        put("rng_seed", self.rng_seed.to_string());
        put("format", format_str(self.format).into());
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        opt!("pairs", path(&self.pairs));
        opt!("output", path(&self.output));
        opt!("hist_output", path(&self.hist_output));
        opt!("checkpoint", path(&self.checkpoint));
        put("workers", self.workers.to_string());
        out
    }

    /// Inverse of [`RunConfig::to_kv`]. Blank lines and `#` comments are
    /// skipped; unknown keys are errors.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return invalid(format!("line {}: expected key=value, got {line:?}", lineno + 1));
            };
            entries.push((k.trim().to_string(), v.trim().to_string()));
        }
        let Some((_, command)) = entries.iter().find(|(k, _)| k == "command") else {
            return invalid("config has no command key");
        };
        let mut cfg = RunConfig::new(command.parse()?);
        for (k, v) in &entries {
            let bad = |what: &str| Error::Invalid(format!("{k}={v}: expected {what}"));
            let num = || parse_u64(v).map_err(|_| bad("a non-negative integer"));
            match k.as_str() {
                "command" => {}
                "q1" => cfg.q1 = Some(num()?),
                "count" => cfg.count = Some(num()?),
                "parity" => cfg.parity = Some(parse_parity(v).map_err(|_| bad("even, odd or both"))?),
                "algo" => cfg.algo = Some(v.parse().map_err(|_| bad("1 or 2"))?),
                "seed" => cfg.seed = Some(v.parse().map_err(|_| bad("an integer"))?),
                "seed_count" => cfg.seed_count = Some(num()?),
                "digits" => cfg.digits = Some(num()?),
                "z" => cfg.z = Some(v.parse().map_err(|_| bad("a number"))?),
                "x_max" => cfg.x_max = Some(num()?),
                "checkpoint_step" => cfg.checkpoint_step = Some(num()?),
                "prime_limit" => cfg.prime_limit = Some(num()?),
                "c" => cfg.c = Some(v.parse().map_err(|_| bad("an integer"))?),
                "h" => cfg.h = Some(v.parse().map_err(|_| bad("a number"))?),
                "max_results" => cfg.max_results = Some(num()?),
                "bucket_width" => cfg.bucket_width = Some(num()?),
                "buckets" => cfg.buckets = Some(num()?),
                "closed_first" => cfg.closed_first = Some(v.parse().map_err(|_| bad("true or false"))?),
                "a1" => cfg.a1 = Some(num()?),
                "eps" => cfg.eps = Some(v.parse().map_err(|_| bad("+1 or -1"))?),
                "x" => cfg.x_values = parse_list(v).map_err(|_| bad("a comma-separated list"))?,
                "n_max" => cfg.n_max = Some(num()?),
                "p" => cfg.primes = parse_list(v).map_err(|_| bad("a comma-separated list"))?,
                "mr_rounds" => cfg.mr_rounds = v.parse().map_err(|_| bad("a positive integer"))?,
                "lucas" => cfg.lucas = v.parse().map_err(|_| bad("true or false"))?,
                "rng_seed" => cfg.rng_seed = v.parse().map_err(|_| bad("a 64-bit integer"))?,
                "format" => cfg.format = parse_format(v).map_err(|_| bad("csv or json"))?,
                "pairs" => cfg.pairs = Some(v.into()),
                "output" => cfg.output = Some(v.into()),
                "hist_output" => cfg.hist_output = Some(v.into()),
                "checkpoint" => cfg.checkpoint = Some(v.into()),
                "workers" => cfg.workers = v.parse().map_err(|_| bad("a worker count"))?,
                _ => return invalid(format!("unknown config key {k:?}")),
            }
        }
        Ok(cfg)
    }
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn parse_list(s: &str) -> std::result::Result<Vec<u64>, String> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_u64(t.trim())).collect()
}

/// A non-negative integer, also accepted in exact scientific form (`4e6`).
pub fn parse_u64(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("{s:?} is not an integer"))?;
    if f >= 0.0 && f.fract() == 0.0 && f < 2f64.powi(53) {
        Ok(f as u64)
    } else {
        Err(format!("{s:?} is not an exact non-negative integer"))
    }
}

pub fn parse_parity(s: &str) -> std::result::Result<ParitySel, String> {
    match s {
        "even" => Ok(ParitySel::Even),
        "odd" => Ok(ParitySel::Odd),
        "both" => Ok(ParitySel::Both),
        _ => Err(format!("{s:?} is not one of even, odd, both")),
    }
}

pub fn parity_str(p: ParitySel) -> &'static str {
    match p {
        ParitySel::Even => "even",
        ParitySel::Odd => "odd",
        ParitySel::Both => "both",
    }
}

fn parse_format(s: &str) -> std::result::Result<Format, ()> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(()),
    }
}

fn format_str(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}
