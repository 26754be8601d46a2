use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer as _;
use serde::Serialize;
use serde_json::json;

use super::config::{Format, RunConfig};
use super::pairs_io::{load_pairs, read_csv, write_csv, PairRow, PAIR_HEADER, SCHEMA_LINE};
use crate::congruence::{residue_sets, Parity};
use crate::density::{
    closed_first_edges, count_primes_ec, decade_marks, densities, hc_product_checkpoints, histogram_by_edges, hunt_range, nz_stats,
    window_bound,
};
use crate::divisors::{cofactor_progression, count_cofactor_primes, count_cofactor_primes_below, Eps};
use crate::ecset::EcParams;
use crate::error::{invalid, Error, Result};
use crate::generator::{algorithm1, algorithm2, lift_to_digits, validate_pair, CandidatePair, ParitySel, Seed};

fn need<T: Clone>(v: &Option<T>, key: &str, cfg: &RunConfig) -> Result<T> {
    v.clone().ok_or_else(|| Error::Invalid(format!("{} needs --{}", cfg.command.as_str(), key.replace('_', "-"))))
}

/// Run `f` against the configured output file, or `stdout` when none.
fn with_output(path: Option<&Path>, stdout: &mut dyn Write, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn conventions() -> serde_json::Value {
    json!({
        "d_per_x": "prime count / X_max",
        "d_per_element": "prime count / ceil(X_max / 2)",
        "h_emp": "m_c * ln(10) * d_per_x",
        "nz_expected": "4 * h / (z * ln(10)), X in [0, floor(4 m_c / z)]",
    })
}

fn load_pairs_file(cfg: &RunConfig) -> Result<Vec<(PairRow, CandidatePair)>> {
    let path = need(&cfg.pairs, "pairs", cfg)?;
    let mut input = BufReader::new(File::open(&path)?);
    load_pairs(&mut input)
}

fn lifted(pair: CandidatePair, digits: Option<u64>) -> Result<CandidatePair> {
    match digits {
        Some(m) => lift_to_digits(&pair, m),
        None => Ok(pair),
    }
}

pub fn gen_c(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let q1 = need(&cfg.q1, "q1", cfg)?;
    let count = need(&cfg.count, "count", cfg)?;
    let parity = cfg.parity.unwrap_or(ParitySel::Odd);
    let mut rows = Vec::new();
    match cfg.algo.unwrap_or(1) {
        1 => {
            let out = algorithm1(q1, count, parity)?;
            if out.truncated {
                eprintln!("note: the family for q1 = {q1} has {} classes; all are returned", out.family_size);
            }
            for p in out.pairs {
                rows.push((lifted(p, cfg.digits)?, None));
            }
        }
        2 => {
            let first = cfg.seed.clone().unwrap_or_else(|| BigInt::from(1));
            let parities: &[Parity] = match parity {
                ParitySel::Even => &[Parity::Even],
                ParitySel::Odd => &[Parity::Odd],
                ParitySel::Both => &[Parity::Even, Parity::Odd],
            };
            let mut seen = HashSet::new();
            for k in 0..cfg.seed_count.unwrap_or(1) {
                let x = &first + k;
                let seed = Seed::new(x.clone())?;
                for &par in parities {
                    for p in algorithm2(q1, count, &seed, par)? {
                        if seen.insert(p.c.mod_floor(&p.modulus)) {
                            rows.push((lifted(p, cfg.digits)?, Some(x.clone())));
                        }
                    }
                }
            }
        }
        a => return invalid(format!("--algo must be 1 or 2, got {a}")),
    }
    let algo = cfg.algo.unwrap_or(1);
    let rows: Vec<PairRow> = rows
        .iter()
        .map(|(p, seed)| {
            validate_pair(p)?;
            Ok(PairRow::new(p, algo, seed.as_ref()))
        })
        .collect::<Result<_>>()?;
    with_output(cfg.output.as_deref(), stdout, |w| match cfg.format {
        Format::Csv => write_csv(w, &rows, &PAIR_HEADER),
        Format::Json => write_json(w, &rows),
    })
}

pub const DEFAULT_PRIME_LIMIT: u64 = 4_000_000;

pub fn estimate_hc(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let c = need(&cfg.c, "c", cfg)?;
    let ec = EcParams::new(c.clone())?;
    let limit = cfg.prime_limit.unwrap_or(DEFAULT_PRIME_LIMIT);
    if limit < 3 {
        return invalid("--prime-limit must be at least 3");
    }
    let marks: Vec<u64> = decade_marks(limit).into_iter().filter(|&m| m < limit).collect();
    let (h, partial) = hc_product_checkpoints(&c, limit, &marks);
    let empirical = match cfg.x_max {
        Some(x_max) => {
            let report = count_primes_ec(&ec, x_max, cfg.checkpoint_step.unwrap_or(0), &cfg.policy()?);
            let checkpoints: Vec<_> = report
                .checkpoints
                .iter()
                .map(|cp| {
                    let (d_x, d_el, h_emp) = densities(&ec, cp.x, cp.count);
                    json!({"x": cp.x, "count": cp.count, "d_per_x": d_x, "d_per_element": d_el, "h_emp": h_emp})
                })
                .collect();
            Some(json!({
                "x_max": x_max,
                "count": report.prime_count,
                "d_per_x": report.d_per_x,
                "d_per_element": report.d_per_element,
                "h_emp": report.h_emp,
                "checkpoints": checkpoints,
            }))
        }
        None => None,
    };
    with_output(cfg.output.as_deref(), stdout, |w| match cfg.format {
        Format::Json => {
            let mut doc = json!({
                "schema": 1,
                "c": c.to_string(),
                "prime_limit": limit,
                "h_product": h,
                "checkpoints": partial.iter().map(|(m, v)| json!({"prime_limit": m, "h": v})).collect::<Vec<_>>(),
                "conventions": conventions(),
            });
            if let Some(e) = empirical {
                doc["empirical"] = e;
            }
            write_json(w, &doc)
        }
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                prime_limit: u64,
                h_product: f64,
            }
            let mut rows: Vec<Row> = partial.iter().map(|&(m, v)| Row { prime_limit: m, h_product: v }).collect();
            rows.push(Row { prime_limit: limit, h_product: h });
            write_csv(w, &rows, &["prime_limit", "h_product"])
        }
    })
}

/// Position reached by a hunt: everything up to `last_x` of the target with
/// this `c` is done.
#[derive(Clone, Debug, PartialEq, Eq)]
struct HuntCheckpoint {
    c: BigInt,
    last_x: u64,
}

impl HuntCheckpoint {
    fn read(path: &Path) -> Result<Option<Self>> {
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(path)?;
        let mut c = None;
        let mut last_x = None;
        for line in text.lines() {
            match line.split_once('=') {
                Some(("c", v)) => c = v.parse().ok(),
                Some(("last_x", v)) => last_x = v.parse().ok(),
                _ => {}
            }
        }
        match (c, last_x) {
            (Some(c), Some(last_x)) => Ok(Some(Self { c, last_x })),
            _ => invalid(format!("unreadable hunt checkpoint {}", path.display())),
        }
    }

    fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, format!("c={}\nlast_x={}\n", self.c, self.last_x))?;
        fs::rename(tmp, path)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
struct HuntRow {
    c: String,
    #[serde(rename = "X")]
    x: u64,
    digits: u64,
    verified: bool,
}

const HUNT_HEADER: &str = "c,X,digits,verified";

fn hunt_row_line(r: &HuntRow) -> String {
    format!("{},{},{},{}\n", r.c, r.x, r.digits, r.verified)
}

struct HuntTarget {
    ec: EcParams,
    x_hi: u64,
}

fn hunt_targets(cfg: &RunConfig) -> Result<Vec<HuntTarget>> {
    let z = cfg.z.unwrap_or(4.0);
    let window = |ec: &EcParams| -> Result<u64> {
        match cfg.x_max {
            Some(x) => Ok(x),
            None => window_bound(ec.digits(), z),
        }
    };
    let ecs: Vec<EcParams> = match (&cfg.c, &cfg.pairs) {
        (Some(c), None) => vec![EcParams::new(c.clone())?],
        (None, Some(_)) => {
            let take = cfg.count.map_or(usize::MAX, |n| n as usize);
            load_pairs_file(cfg)?.into_iter().take(take).map(|(_, p)| lifted(p, cfg.digits).map(|p| p.ec())).collect::<Result<_>>()?
        }
        _ => return invalid("hunt needs exactly one of --c and --pairs"),
    };
    ecs.into_iter().map(|ec| Ok(HuntTarget { x_hi: window(&ec)?, ec })).collect()
}

pub fn hunt(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let policy = cfg.policy()?;
    let targets = hunt_targets(cfg)?;
    let max_results = cfg.max_results.map_or(usize::MAX, |n| n as usize);
    let rows_for = |t: &HuntTarget, lo: u64, hi: u64, limit: usize| -> Result<Vec<HuntRow>> {
        Ok(hunt_range(&t.ec, lo, hi, limit, &policy)?
            .into_iter()
            .map(|h| HuntRow { c: t.ec.c().to_string(), x: h.x, digits: t.ec_digits_of(&h.value), verified: true })
            .collect())
    };

    let Some(ckpt_path) = cfg.checkpoint.as_deref() else {
        let mut rows = Vec::new();
        for t in &targets {
            rows.extend(rows_for(t, 0, t.x_hi, max_results)?);
        }
        return with_output(cfg.output.as_deref(), stdout, |w| match cfg.format {
            Format::Csv => {
                write!(w, "{SCHEMA_LINE}\n{HUNT_HEADER}\n")?;
                rows.iter().try_for_each(|r| w.write_all(hunt_row_line(r).as_bytes()).map_err(Error::from))
            }
            Format::Json => write_json(w, &rows),
        });
    };

    let Some(out_path) = cfg.output.as_deref() else {
        return invalid("--checkpoint needs --output");
    };
    if cfg.format != Format::Csv {
        return invalid("resumable hunts write CSV");
    }
    // restore: keep rows up to the checkpoint and drop anything written after it
    let (start, mut found, resume_x) = match HuntCheckpoint::read(ckpt_path)? {
        Some(ck) => {
            let Some(idx) = targets.iter().position(|t| *t.ec.c() == ck.c) else {
                return invalid(format!("checkpoint c = {} is not among the hunt targets", ck.c));
            };
            let done: HashSet<String> = targets[..idx].iter().map(|t| t.ec.c().to_string()).collect();
            let old: Vec<HuntRow> = match File::open(out_path) {
                Ok(f) => read_csv(&mut BufReader::new(f))?,
                Err(_) => Vec::new(),
            };
            let current = ck.c.to_string();
            let kept: Vec<HuntRow> = old.into_iter().filter(|r| done.contains(&r.c) || (r.c == current && r.x <= ck.last_x)).collect();
            let found = kept.iter().filter(|r| r.c == current).count();
            let mut f = File::create(out_path)?;
            write!(f, "{SCHEMA_LINE}\n{HUNT_HEADER}\n")?;
            for r in &kept {
                f.write_all(hunt_row_line(r).as_bytes())?;
            }
            (idx, found, Some(ck.last_x))
        }
        None => {
            let mut f = File::create(out_path)?;
            write!(f, "{SCHEMA_LINE}\n{HUNT_HEADER}\n")?;
            (0, 0, None)
        }
    };
    let mut out = OpenOptions::new().append(true).open(out_path)?;
    for (i, t) in targets.iter().enumerate().skip(start) {
        let mut lo = match (i == start, resume_x) {
            (true, Some(x)) => x + 1,
            _ => {
                found = 0;
                0
            }
        };
        let block = cfg.checkpoint_step.filter(|&s| s > 0).unwrap_or(u64::MAX);
        while lo <= t.x_hi && found < max_results {
            let hi = lo.saturating_add(block - 1).min(t.x_hi);
            let rows = rows_for(t, lo, hi, max_results - found)?;
            found += rows.len();
            for r in &rows {
                out.write_all(hunt_row_line(r).as_bytes())?;
            }
            out.flush()?;
            let last_x = if found >= max_results { t.x_hi } else { hi };
            HuntCheckpoint { c: t.ec.c().clone(), last_x }.write(ckpt_path)?;
            lo = hi + 1;
            if hi == t.x_hi {
                break;
            }
        }
        if lo > t.x_hi || t.x_hi == 0 {
            HuntCheckpoint { c: t.ec.c().clone(), last_x: t.x_hi }.write(ckpt_path)?;
        }
    }
    Ok(())
}

impl HuntTarget {
    fn ec_digits_of(&self, v: &BigInt) -> u64 {
        crate::arith::decimal_size(v).map(|d| d.digits).unwrap_or(0)
    }
}

pub fn density_scan(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let policy = cfg.policy()?;
    let take = cfg.count.map_or(usize::MAX, |n| n as usize);
    let pairs: Vec<CandidatePair> =
        load_pairs_file(cfg)?.into_iter().take(take).map(|(_, p)| lifted(p, cfg.digits)).collect::<Result<_>>()?;
    let z = cfg.z.unwrap_or(1.0);
    let stats = nz_stats(&pairs, z, cfg.h, &policy)?;
    let n = cfg.buckets.unwrap_or(10);
    if n == 0 {
        return invalid("--buckets must be >= 1");
    }
    let r = pairs.first().map_or(0, |p| p.ec().r() as u64);
    let indices = if stats.bound >= r { (stats.bound - r) / 2 + 1 } else { 0 };
    let closed_first = cfg.closed_first.unwrap_or(indices % n == 1);
    let width = match cfg.bucket_width {
        Some(0) => return invalid("--bucket-width must be >= 1"),
        Some(w) => w,
        None if closed_first => (indices.saturating_sub(1) / n).max(1),
        None => indices.div_ceil(n).max(1),
    };
    let mut edges = if closed_first { closed_first_edges(width, n) } else { (0..=n).map(|k| k * width).collect() };
    if cfg.bucket_width.is_none() {
        // the automatic layout never reaches past the window
        for e in edges.iter_mut() {
            *e = (*e).min(indices.max(1));
        }
        edges.dedup();
    }
    let mut totals = vec![0u64; edges.len() - 1];
    for p in &pairs {
        for (t, k) in totals.iter_mut().zip(histogram_by_edges(&p.ec(), &edges, &policy)?) {
            *t += k;
        }
    }
    #[derive(Serialize)]
    struct Bucket {
        bucket: u64,
        j_lo: u64,
        j_hi: u64,
        count: u64,
        mean_per_pair: f64,
    }
    let buckets: Vec<Bucket> = edges
        .windows(2)
        .zip(&totals)
        .enumerate()
        .map(|(i, (w, &count))| Bucket {
            bucket: i as u64,
            j_lo: w[0],
            j_hi: w[1] - 1,
            count,
            mean_per_pair: count as f64 / pairs.len() as f64,
        })
        .collect();
    let distribution: BTreeMap<String, f64> = stats.distribution.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    let doc = json!({
        "schema": 1,
        "pairs": pairs.len(),
        "z": stats.z,
        "m_c": stats.m_c,
        "x_bound": stats.bound,
        "counts": stats.counts,
        "distribution_percent": distribution,
        "mean": stats.mean,
        "mode": stats.mode,
        "fraction_with_prime": stats.fraction_with_prime,
        "h": stats.h,
        "expected": stats.expected,
        "conventions": conventions(),
    });
    with_output(cfg.output.as_deref(), stdout, |w| write_json(w, &doc))?;
    with_output(cfg.hist_output.as_deref(), stdout, |w| write_csv(w, &buckets, &["bucket", "j_lo", "j_hi", "count", "mean_per_pair"]))
}

pub fn cofactor_count(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let a1 = cfg.a1.unwrap_or(5);
    let c = cfg.c.clone().unwrap_or_else(|| BigInt::from(1));
    let eps = Eps::try_from(cfg.eps.unwrap_or(1))?;
    let cp = cofactor_progression(a1, &EcParams::new(c.clone())?, eps)?;
    let policy = cfg.policy()?;
    #[derive(Serialize)]
    struct Row {
        a1: u64,
        c: String,
        eps: i64,
        x: Option<u64>,
        n_max: Option<u64>,
        count: u64,
    }
    if cfg.x_values.is_empty() && cfg.n_max.is_none() {
        return invalid("cofactor-count needs --x or --n-max");
    }
    let row = |x: Option<u64>, n_max: Option<u64>, count: u64| Row { a1, c: c.to_string(), eps: eps.sign(), x, n_max, count };
    // for x, the indices counted are those with a1 * n < x
    let mut rows: Vec<Row> =
        cfg.x_values.iter().map(|&x| row(Some(x), x.div_ceil(a1).checked_sub(1), count_cofactor_primes_below(&cp, x, &policy))).collect();
    if let Some(n) = cfg.n_max {
        rows.push(row(None, Some(n), count_cofactor_primes(&cp, n, &policy)));
    }
    with_output(cfg.output.as_deref(), stdout, |w| match cfg.format {
        Format::Csv => write_csv(w, &rows, &["a1", "c", "eps", "x", "n_max", "count"]),
        Format::Json => write_json(w, &rows),
    })
}

pub fn residues(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    if cfg.primes.is_empty() {
        return invalid("residues needs --p");
    }
    let sets = cfg.primes.iter().map(|&p| residue_sets(p)).collect::<Result<Vec<_>>>()?;
    with_output(cfg.output.as_deref(), stdout, |w| match cfg.format {
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                p: u64,
                set: &'static str,
                residue: u64,
            }
            let rows: Vec<Row> = sets
                .iter()
                .flat_map(|s| {
                    let rq = s.rq.iter().map(|&b| Row { p: s.p, set: "rq", residue: b });
                    rq.chain(s.nrq.iter().map(|&b| Row { p: s.p, set: "nrq", residue: b }))
                })
                .collect();
            write_csv(w, &rows, &["p", "set", "residue"])
        }
        Format::Json => {
            let doc: Vec<_> = sets.iter().map(|s| json!({"p": s.p, "rq": s.rq, "nrq": s.nrq})).collect();
            write_json(w, &doc)
        }
    })
}
