//! Prime densities in `E_c`: the product constant `h_c`, empirical counts,
//! short-window statistics and prime hunting.
//!
//! Densities use two conventions. Per unit of `X`, `d = count / X_max`, and
//! `h_emp = s(c) d` with `s(c) = m_c ln 10`. Per element, the count is divided
//! by the `ceil(X_max / 2)` elements of the right parity, giving about `2 d`.
//! The expected number of primes with `X` in `[0, 4 m_c / z]` is then
//! `4 h / (z ln 10)`.

use std::collections::BTreeMap;
use std::f64::consts::LN_10;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{legendre_u64, neg_mod_u64};
use crate::congruence::odd_primes_below;
use crate::ecset::{EcParams, Sieve2};
use crate::error::{invalid, Error, Result};
use crate::generator::CandidatePair;
use crate::primality::{is_prime, is_prime_u64, primes_up_to, PrimalityPolicy};

/// Sieve bound used to discard candidates before primality testing.
pub const PREFILTER_BOUND: u64 = 1 << 15;

/// `prod (p - t_p) / (p - 1)` over odd primes `p <= prime_limit`, skipping
/// `p | c`. Factors are multiplied in ascending `p`.
pub fn hc_product(c: &BigInt, prime_limit: u64) -> f64 {
    hc_product_checkpoints(c, prime_limit, &[]).0
}

/// [`hc_product`] together with its partial values at each limit in `marks`
/// (ascending, each `<= prime_limit`).
pub fn hc_product_checkpoints(c: &BigInt, prime_limit: u64, marks: &[u64]) -> (f64, Vec<(u64, f64)>) {
    let mut h = 1.0f64;
    let mut out = Vec::with_capacity(marks.len());
    let mut next = marks.iter().peekable();
    for &p in primes_up_to(prime_limit).odd() {
        while let Some(&&m) = next.peek() {
            if m >= p {
                break;
            }
            out.push((m, h));
            next.next();
        }
        let neg = neg_mod_u64(c, p);
        if neg == 0 {
            continue;
        }
        let t = (legendre_u64(neg, p) + 1) as f64;
        h *= (p as f64 - t) / (p as f64 - 1.0);
    }
    out.extend(next.map(|&m| (m, h)));
    (h, out)
}

/// `10^k` for every `10^k <= limit` with `k >= 1`.
pub fn decade_marks(limit: u64) -> Vec<u64> {
    std::iter::successors(Some(10u64), |m| m.checked_mul(10)).take_while(|&m| m <= limit).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Checkpoint {
    pub x: u64,
    pub count: u64,
}

/// Densities at a cut `X` with `count` primes: `(per X, per element, h_emp)`.
pub fn densities(ec: &EcParams, x: u64, count: u64) -> (f64, f64, f64) {
    if x == 0 {
        return (0.0, 0.0, 0.0);
    }
    let d_x = count as f64 / x as f64;
    let d_el = count as f64 / x.div_ceil(2) as f64;
    (d_x, d_el, ec.log_size() * d_x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    #[serde(serialize_with = "crate::serde_bigint::serialize")]
    pub c: BigInt,
    pub x_max: u64,
    pub prime_count: u64,
    pub d_per_x: f64,
    pub d_per_element: f64,
    pub h_emp: f64,
    pub checkpoints: Vec<Checkpoint>,
}

fn element_is_prime(ec: &EcParams, x: u64, policy: &PrimalityPolicy) -> bool {
    if let Some(c) = ec.c().to_u64() {
        if let Some(v) = (x as u128 * x as u128).checked_add(c as u128).and_then(|v| u64::try_from(v).ok()) {
            return is_prime_u64(v);
        }
    }
    is_prime(&ec.value_at_x(x), policy)
}

const CHUNK: u64 = 1 << 12;

/// `X` of parity `r` in `[0, x_max]` with `X^2 + c` prime, ascending.
pub fn prime_xs(ec: &EcParams, x_max: u64, policy: &PrimalityPolicy) -> Vec<u64> {
    let r = u64::from(ec.r());
    if x_max < r {
        return Vec::new();
    }
    let j_end = (x_max - r) / 2 + 1;
    let sieve = Sieve2::new(ec, PREFILTER_BOUND);
    let chunks = j_end.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let lo = k * CHUNK;
            let hi = (lo + CHUNK).min(j_end);
            let alive = sieve.survivors(lo, hi);
            let sieve_ec = sieve.ec();
            (lo..hi)
                .filter(|&j| alive[(j - lo) as usize])
                .map(|j| sieve_ec.x_of(j))
                .filter(|&x| element_is_prime(sieve_ec, x, policy))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Count primes `X^2 + c` over `0 <= X <= x_max` of parity `r`, with
/// cumulative counts at every multiple of `checkpoint_step` (none when 0).
pub fn count_primes_ec(ec: &EcParams, x_max: u64, checkpoint_step: u64, policy: &PrimalityPolicy) -> DensityReport {
    let xs = prime_xs(ec, x_max, policy);
    let mut checkpoints = Vec::new();
    if checkpoint_step > 0 {
        let mut idx = 0;
        let mut cut = checkpoint_step;
        while cut <= x_max {
            while idx < xs.len() && xs[idx] <= cut {
                idx += 1;
            }
            checkpoints.push(Checkpoint { x: cut, count: idx as u64 });
            cut = match cut.checked_add(checkpoint_step) {
                Some(c) => c,
                None => break,
            };
        }
    }
    let prime_count = xs.len() as u64;
    let (d_per_x, d_per_element, h_emp) = densities(ec, x_max, prime_count);
    DensityReport { c: ec.c().clone(), x_max, prime_count, d_per_x, d_per_element, h_emp, checkpoints }
}

/// `floor(4 m_c / z)`, the upper end of the search window `I_z`.
pub fn window_bound(m_c: u64, z: f64) -> Result<u64> {
    if !z.is_finite() || z < 1.0 {
        return invalid(format!("z must be a finite number >= 1, got {z}"));
    }
    Ok((4.0 * m_c as f64 / z).floor() as u64)
}

/// `4 h / (z ln 10)`.
pub fn expected_nz(h: f64, z: f64) -> f64 {
    4.0 * h / (z * LN_10)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NzStats {
    pub z: f64,
    pub m_c: u64,
    /// Upper end of `I_z`.
    pub bound: u64,
    /// `N_z` per pair, in input order.
    pub counts: Vec<u64>,
    /// Count value to percentage of pairs.
    pub distribution: BTreeMap<u64, f64>,
    pub mean: f64,
    /// Most frequent count; the smallest one on ties.
    pub mode: u64,
    /// Share of pairs with at least one prime.
    pub fraction_with_prime: f64,
    pub h: f64,
    pub expected: f64,
}

/// Default prime limit when `h` is estimated from the product.
pub const NZ_H_LIMIT: u64 = 100_000;

fn common_digits(pairs: &[CandidatePair]) -> Result<u64> {
    let Some(first) = pairs.first() else {
        return invalid("cohort is empty");
    };
    let m = first.ec().digits();
    if let Some(p) = pairs.iter().find(|p| p.ec().digits() != m) {
        return invalid(format!("mixed sizes in cohort: {m} and {} digits (c = {})", p.ec().digits(), p.c));
    }
    Ok(m)
}

/// `N_z` for each pair of a same-size cohort. `h` defaults to the mean of
/// [`hc_product`] over the cohort at [`NZ_H_LIMIT`].
pub fn nz_stats(pairs: &[CandidatePair], z: f64, h: Option<f64>, policy: &PrimalityPolicy) -> Result<NzStats> {
    let m_c = common_digits(pairs)?;
    let bound = window_bound(m_c, z)?;
    let counts: Vec<u64> = pairs.par_iter().map(|p| prime_xs(&p.ec(), bound, policy).len() as u64).collect();
    let h = match h {
        Some(h) => h,
        None => {
            // collected first so the float sum runs in a fixed order
            let hs: Vec<f64> = pairs.par_iter().map(|p| hc_product(&p.c, NZ_H_LIMIT)).collect();
            hs.iter().sum::<f64>() / hs.len() as f64
        }
    };
    let n = counts.len() as f64;
    let mut freq: BTreeMap<u64, u64> = BTreeMap::new();
    for &k in &counts {
        *freq.entry(k).or_default() += 1;
    }
    let mode = freq.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&k, _)| k).unwrap_or(0);
    let distribution = freq.into_iter().map(|(k, f)| (k, 100.0 * f as f64 / n)).collect();
    Ok(NzStats {
        z,
        m_c,
        bound,
        mean: counts.iter().sum::<u64>() as f64 / n,
        mode,
        fraction_with_prime: counts.iter().filter(|&&k| k > 0).count() as f64 / n,
        counts,
        distribution,
        h,
        expected: expected_nz(h, z),
    })
}

/// Prime counts of `eval_element(j)` over buckets `[edges[i], edges[i+1])`.
pub fn histogram_by_edges(ec: &EcParams, edges: &[u64], policy: &PrimalityPolicy) -> Result<Vec<u64>> {
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("bucket edges must be strictly increasing");
    }
    let (Some(&lo), Some(&hi)) = (edges.first(), edges.last()) else {
        return Ok(Vec::new());
    };
    if hi == 0 {
        return Ok(vec![0; edges.len().saturating_sub(1)]);
    }
    let r = u64::from(ec.r());
    let xs = prime_xs(ec, 2 * (hi - 1) + r, policy);
    let js: Vec<u64> = xs.into_iter().map(|x| x / 2).filter(|&j| j >= lo).collect();
    Ok(edges.windows(2).map(|w| js.iter().filter(|&&j| j >= w[0] && j < w[1]).count() as u64).collect())
}

/// `n` buckets of `width` indices: `[0, w-1], [w, 2w-1], ...`.
pub fn interval_histogram(pair: &CandidatePair, width: u64, n: u64, policy: &PrimalityPolicy) -> Result<Vec<u64>> {
    if width == 0 {
        return invalid("bucket width must be >= 1");
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let edges: Vec<u64> = (0..=n).map(|k| k * width).collect();
    histogram_by_edges(&pair.ec(), &edges, policy)
}

/// Edges with a closed first bucket `[0, w]` and then `[w+1, 2w]`, ... :
/// the layout where the first bucket holds one index more.
pub fn closed_first_edges(width: u64, n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    std::iter::once(0).chain((1..=n).map(|k| k * width + 1)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HuntHit {
    pub x: u64,
    #[serde(serialize_with = "crate::serde_bigint::serialize")]
    pub value: BigInt,
}

const HUNT_BATCH: usize = 64;

/// Primes `X^2 + c` for `X` of parity `r` in `I_z`, ascending, at most
/// `max_results`. Every hit is tested again under a reseeded policy; a
/// disagreement is a verification error.
pub fn hunt_primes(pair: &CandidatePair, z: f64, max_results: usize, policy: &PrimalityPolicy) -> Result<Vec<HuntHit>> {
    let ec = pair.ec();
    let bound = window_bound(ec.digits(), z)?;
    hunt_range(&ec, 0, bound, max_results, policy)
}

/// [`hunt_primes`] over `X` in `[x_lo, x_hi]`.
pub fn hunt_range(ec: &EcParams, x_lo: u64, x_hi: u64, max_results: usize, policy: &PrimalityPolicy) -> Result<Vec<HuntHit>> {
    let mut hits = Vec::new();
    if max_results == 0 || x_hi < x_lo {
        return Ok(hits);
    }
    let r = u64::from(ec.r());
    let j_lo = x_lo.saturating_sub(r).div_ceil(2);
    if x_hi < r {
        return Ok(hits);
    }
    let j_hi = (x_hi - r) / 2 + 1;
    if j_lo >= j_hi {
        return Ok(hits);
    }
    let sieve = Sieve2::new(ec, PREFILTER_BOUND);
    let alive = sieve.survivors(j_lo, j_hi);
    let candidates: Vec<u64> = (j_lo..j_hi).filter(|&j| alive[(j - j_lo) as usize]).map(|j| ec.x_of(j)).collect();
    let check = policy.reseeded(0x9e37_79b9_7f4a_7c15);
    for batch in candidates.chunks(HUNT_BATCH) {
        let found: Vec<Option<HuntHit>> = batch
            .par_iter()
            .map(|&x| {
                let value = ec.value_at_x(x);
                if !is_prime(&value, policy) {
                    return Ok(None);
                }
                if !is_prime(&value, &check) {
                    return Err(Error::Verification(format!("X = {x}: primality verdicts disagree for {value}")));
                }
                Ok(Some(HuntHit { x, value }))
            })
            .collect::<Result<_>>()?;
        for hit in found.into_iter().flatten() {
            hits.push(hit);
            if hits.len() == max_results {
                return Ok(hits);
            }
        }
    }
    Ok(hits)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    /// Correlation between fitted and observed values; 1 when the data have
    /// no spread.
    pub r: f64,
}

impl PowerLawFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.a * x.powf(self.b)
    }
}

fn check_fit_points(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 3 {
        return invalid(format!("need at least 3 points, got {}", points.len()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return invalid("all points must be positive and finite");
    }
    let x0 = points[0].0;
    if points.iter().all(|p| (p.0 - x0).abs() <= f64::EPSILON * x0) {
        return invalid("all x are equal");
    }
    Ok(())
}

fn correlation(u: &[f64], v: &[f64]) -> f64 {
    let n = u.len() as f64;
    let (mu, mv) = (u.iter().sum::<f64>() / n, v.iter().sum::<f64>() / n);
    let suu: f64 = u.iter().map(|a| (a - mu).powi(2)).sum();
    let svv: f64 = v.iter().map(|b| (b - mv).powi(2)).sum();
    let suv: f64 = u.iter().zip(v).map(|(a, b)| (a - mu) * (b - mv)).sum();
    if suu <= f64::EPSILON * mu.abs().max(1.0) || svv <= f64::EPSILON * mv.abs().max(1.0) {
        1.0
    } else {
        suv / (suu * svv).sqrt()
    }
}

/// Least squares on the linearized `ln y = ln a + b ln x`; `r` is the
/// correlation of `(ln x, ln y)`.
pub fn log_log_fit(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    check_fit_points(points)?;
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    Ok(PowerLawFit { a: (my - b * mx).exp(), b, r: correlation(&lx, &ly) })
}

/// Least squares of `y - a x^b` on the original scale (Levenberg-Marquardt
/// from the log-log estimate). Large `y` dominate, as in an unweighted
/// nonlinear fit; `r` is the correlation of fitted against observed `y`.
pub fn power_law_fit(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let start = log_log_fit(points)?;
    let sse = |a: f64, b: f64| points.iter().map(|&(x, y)| (y - a * x.powf(b)).powi(2)).sum::<f64>();
    let (mut a, mut b) = (start.a, start.b);
    let mut err = sse(a, b);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        // normal equations for the step in (a, b)
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, y) in points {
            let xb = x.powf(b);
            let (da, db) = (xb, a * xb * x.ln());
            let res = y - a * xb;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * res;
            gb += db * res;
        }
        let mut step = None;
        while step.is_none() && lambda < 1e12 {
            let (maa, mbb) = (jaa * (1.0 + lambda), jbb * (1.0 + lambda));
            let det = maa * mbb - jab * jab;
            let (sa, sb) = ((ga * mbb - gb * jab) / det, (gb * maa - ga * jab) / det);
            let trial = sse(a + sa, b + sb);
            if det.abs() > 0.0 && trial.is_finite() && trial <= err {
                step = Some((sa, sb));
                err = trial;
                lambda = (lambda / 10.0).max(1e-15);
            } else {
                lambda *= 10.0;
            }
        }
        let Some((sa, sb)) = step else { break };
        a += sa;
        b += sb;
        if sa.abs() <= 1e-14 * a.abs() && sb.abs() <= 1e-14 * b.abs().max(1e-12) {
            break;
        }
    }
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fitted: Vec<f64> = points.iter().map(|&(x, _)| a * x.powf(b)).collect();
    Ok(PowerLawFit { a, b, r: correlation(&fitted, &ys) })
}

/// Expected number of primes from all classes for `q1` at size `m_c`, in
/// `log10` form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YieldEstimate {
    /// `log10((q1+1)/2 * prod_{p<q1} (p-1)/2)`.
    pub congruences_log10: f64,
    /// `log10` of `h / (m_c ln 10)` times the congruence count.
    pub lower_log10: f64,
    /// `lower_log10 + m_c / 2`.
    pub upper_log10: f64,
}

impl YieldEstimate {
    /// `10^lower_log10`, infinite when out of range.
    pub fn lower(&self) -> f64 {
        10f64.powf(self.lower_log10)
    }
}

pub fn expected_prime_yield(q1: u64, m_c: u64, h: f64) -> Result<YieldEstimate> {
    if q1 < 3 || !is_prime_u64(q1) {
        return invalid(format!("q1 = {q1} is not an odd prime"));
    }
    if m_c == 0 || h.is_nan() || h <= 0.0 {
        return invalid("m_c and h must be positive");
    }
    let congruences_log10 =
        ((q1 + 1) as f64 / 2.0).log10() + odd_primes_below(q1).iter().map(|&p| ((p - 1) as f64 / 2.0).log10()).sum::<f64>();
    let lower_log10 = (h / (m_c as f64 * LN_10)).log10() + congruences_log10;
    Ok(YieldEstimate { congruences_log10, lower_log10, upper_log10: lower_log10 + m_c as f64 / 2.0 })
}
