//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.
//!
//!     cargo test --release --test acceptance

use std::collections::BTreeSet;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use quadprime::arith::decimal_size;
use quadprime::cli::run_cli;
use quadprime::congruence::{build_cf, build_ctilde, link_parities, FamilyPlan, Parity};
use quadprime::density::{count_primes_ec, densities, hc_product, hunt_primes, log_log_fit, nz_stats, power_law_fit, NZ_H_LIMIT};
use quadprime::divisors::{cofactor_progression, count_cofactor_primes, count_cofactor_primes_below, divisor_subprogressions, Eps};
use quadprime::ecset::{coprime_residue_forms, density_exact, EcParams};
use quadprime::generator::{algorithm1, algorithm2, lift_to_digits, CandidatePair, ParitySel, Seed};
use quadprime::primality::PrimalityPolicy;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn trial_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn odd_primes_below(n: u64) -> Vec<u64> {
    (3..n).filter(|&p| trial_prime(p)).collect()
}

fn c_mod(c: &BigInt, p: u64) -> u64 {
    let r = c % BigInt::from(p);
    let r: u64 = if r < BigInt::zero() { (r + p).try_into().unwrap() } else { r.try_into().unwrap() };
    r
}

/// Does `p` divide some `X^2 + c`? By exhaustion over `X mod p`.
fn has_root(c: &BigInt, p: u64) -> bool {
    let cm = c_mod(c, p);
    (0..p).any(|x| (x * x + cm).is_multiple_of(p))
}

/// Validates a pair from scratch: modulus is `q1#`, no odd prime below `q1`
/// divides any element, `q1` does, and `j0` is the first index it divides.
fn oracle_validate(pair: &CandidatePair) -> Result<(), String> {
    let q1 = pair.q1;
    let primorial: u64 = (2..=q1).filter(|&p| trial_prime(p)).product();
    check(pair.modulus == BigInt::from(primorial), format!("modulus {} != {q1}#", pair.modulus))?;
    check(pair.c > BigInt::zero(), "c must be positive")?;
    for p in odd_primes_below(q1) {
        check(!has_root(&pair.c, p), format!("{p} divides an element of E_{}", pair.c))?;
    }
    let r = 1 - c_mod(&pair.c, 2);
    let cm = c_mod(&pair.c, q1);
    let j0 = (0..q1).find(|&j| {
        let x = (2 * j + r) % q1;
        (x * x + cm).is_multiple_of(q1)
    });
    check(j0 == Some(pair.j0), format!("c={} j0={} but first index is {j0:?}", pair.c, pair.j0))
}

fn criterion_1() -> Outcome {
    let cases = [(1u32, 1.372771, 1e-4), (3, 1.120727, 1e-4), (5, 0.528219, 2e-4)];
    let mut notes = Vec::new();
    for (c, want, tol) in cases {
        let h = hc_product(&BigInt::from(c), 4_000_000);
        check((h - want).abs() <= tol, format!("h_{c} = {h:.6}, want {want} ± {tol}"))?;
        notes.push(format!("h_{c}={h:.6}"));
    }
    Ok(notes.join(" "))
}

fn criterion_2() -> Outcome {
    let cp = cofactor_progression(5, &EcParams::new(1).unwrap(), Eps::Plus).map_err(|e| e.to_string())?;
    let policy = PrimalityPolicy::default();
    let mut inclusive_matches = 0;
    for (x, want) in [(10_000u64, 482u64), (50_000, 1904), (100_000, 3541), (500_000, 15_217)] {
        let got = count_cofactor_primes_below(&cp, x, &policy);
        check(got == want, format!("x={x}: {got} primes with 5n < x, want {want}"))?;
        inclusive_matches += u32::from(count_cofactor_primes(&cp, x / 5, &policy) == want);
    }
    // only one reading of the bound may reproduce the table
    check(inclusive_matches < 4, "the inclusive bound n <= x/5 also matches every count")?;
    Ok(format!("482 1904 3541 15217 with 5n < x; n <= x/5 matches {inclusive_matches} of 4"))
}

const COFACTOR_COUNTS: [(f64, f64); 16] = [
    (1e4, 482.0),
    (5e4, 1904.0),
    (1e5, 3541.0),
    (5e5, 15_217.0),
    (1e6, 28_810.0),
    (5e6, 128_580.0),
    (1e7, 245_094.0),
    (2e7, 468_277.0),
    (3e7, 684_782.0),
    (4e7, 896_539.0),
    (5e7, 1_106_006.0),
    (6e7, 1_312_328.0),
    (7e7, 1_517_012.0),
    (8e7, 1_720_556.0),
    (9e7, 1_922_292.0),
    (1e8, 2_122_714.0),
];

fn criterion_3() -> Outcome {
    let fit = power_law_fit(&COFACTOR_COUNTS).map_err(|e| e.to_string())?;
    check((fit.b - 0.9394).abs() <= 0.01, format!("exponent {} outside 0.9394 ± 0.01", fit.b))?;
    check(fit.r > 0.999, format!("R = {}", fit.r))?;
    let lin = log_log_fit(&COFACTOR_COUNTS).map_err(|e| e.to_string())?;
    Ok(format!("a={:.6} b={:.6} R={:.9} (log-log b={:.4})", fit.a, fit.b, fit.r, lin.b))
}

fn family(f: &[u64], parity: Parity) -> Result<BTreeSet<BigInt>, String> {
    let plan = FamilyPlan::excluding_any(f, parity).map_err(|e| e.to_string())?;
    Ok(plan.materialize().map_err(|e| e.to_string())?.members.into_iter().collect())
}

fn criterion_4() -> Outcome {
    let cf: BTreeSet<BigInt> = build_cf(&[3, 5], Parity::Odd).map_err(|e| e.to_string())?.members.into_iter().collect();
    let want: BTreeSet<BigInt> = [7, 13].into_iter().map(BigInt::from).collect();
    check(cf == want, format!("C_{{3,5}} odd = {cf:?}"))?;

    let ct = build_ctilde(7, Parity::Odd).map_err(|e| e.to_string())?;
    check(ct.members.len() == 8, format!("C~_7 odd has {} classes", ct.members.len()))?;
    for c in &ct.members {
        check(!has_root(c, 3) && !has_root(c, 5) && has_root(c, 7), format!("class {c} fails the root scan"))?;
        check(c_mod(c, 2) == 1, format!("class {c} is not odd"))?;
    }

    // every subset of the first four odd primes
    let base = [3u64, 5, 7, 11];
    for mask in 0u32..16 {
        let f: Vec<u64> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| base[i]).collect();
        let even = FamilyPlan::excluding_any(&f, Parity::Even).and_then(|p| p.materialize()).map_err(|e| e.to_string())?;
        let linked: BTreeSet<BigInt> = link_parities(&even).members.into_iter().collect();
        let odd = family(&f, Parity::Odd)?;
        check(linked == odd, format!("parity link differs for F = {f:?}"))?;
        for c in &odd {
            check(f.iter().all(|&p| !has_root(c, p)), format!("odd class {c} has a root for F = {f:?}"))?;
        }
    }
    Ok("C_{3,5}={7,13} mod 30, |C~_7|=8, link exact on 16 subsets".into())
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    for q1 in [5u64, 7, 11, 13] {
        let all = algorithm1(q1, u64::MAX, ParitySel::Both).map_err(|e| e.to_string())?.pairs;
        for p in &all {
            oracle_validate(p)?;
        }
        checked += all.len();
        let residues: BTreeSet<(BigInt, Parity)> = all.iter().map(|p| (p.c.clone() % &p.modulus, p.parity())).collect();
        for parity in [Parity::Even, Parity::Odd] {
            for x in 1..=6u32 {
                let seed = Seed::new(x).unwrap();
                let out = algorithm2(q1, q1.div_ceil(2), &seed, parity).map_err(|e| e.to_string())?;
                for p in &out {
                    oracle_validate(p)?;
                    check(p.parity() == parity, format!("algorithm2 returned parity {:?}", p.parity()))?;
                    let key = (p.c.clone() % &p.modulus, parity);
                    check(residues.contains(&key), format!("algorithm2 class {} not in the exhaustive family", p.c))?;
                }
                checked += out.len();
            }
        }
    }
    Ok(format!("{checked} pairs validated"))
}

fn criterion_6() -> Outcome {
    let mut cases = 0;
    for a1 in [5u64, 7, 9] {
        for c in [1u64, 3, 7, 157] {
            let ec = EcParams::new(c).unwrap();
            for eps in Eps::both() {
                let Ok(cp) = cofactor_progression(a1, &ec, eps) else {
                    check(!(0..2 * a1).any(|x| (x * x + c) % a1 == 0), format!("{a1} divides some X^2+{c}"))?;
                    continue;
                };
                let values: Vec<BigInt> = (0..=500u64).map(|n| cp.value(n)).collect();
                for modulus in 2..=40u64 {
                    let subs = divisor_subprogressions(&cp, modulus);
                    let brute: BTreeSet<u64> = (0..=500u64).filter(|&n| (&values[n as usize] % modulus).is_zero()).collect();
                    let covered: BTreeSet<u64> = (0..=500u64).filter(|&n| subs.iter().any(|s| s.contains(n))).collect();
                    check(brute == covered, format!("A1={a1} c={c} eps={} A={modulus}: sub-progressions miss or overshoot", eps.sign()))?;
                    for s in subs.iter().filter(|s| s.is_dual(modulus)) {
                        check(s.step == modulus, format!("dual step {} != {modulus}", s.step))?;
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} (A1, c, eps, A) cases match brute force"))
}

fn criterion_7() -> Outcome {
    let base = [3u64, 5, 7, 11, 13];
    let mut cases = 0;
    for c in 1..=200u64 {
        let ec = EcParams::new(c).unwrap();
        let r = 1 - c % 2;
        for mask in 1u32..32 {
            let f: Vec<u64> = (0..5).filter(|i| mask >> i & 1 == 1).map(|i| base[i]).collect();
            if !f.iter().all(|&p| has_root(&BigInt::from(c), p)) {
                continue;
            }
            let p_f: u64 = f.iter().product();
            let survivors = (0..p_f).filter(|j| f.iter().all(|&p| ((2 * j + r) * (2 * j + r) + c) % p != 0)).count() as u64;
            let predicted: u64 = f.iter().map(|&p| p - (0..p).filter(|x| (x * x + c) % p == 0).count() as u64).product();
            check(survivors == predicted, format!("c={c} F={f:?}: {survivors} survivors, want {predicted}"))?;
            let forms = coprime_residue_forms(&ec, &f).map_err(|e| e.to_string())?;
            check(forms.len() as u64 == survivors, format!("c={c} F={f:?}: {} forms", forms.len()))?;
            let d = density_exact(&ec, &f).map_err(|e| e.to_string())?;
            check(d == BigRational::new(survivors.into(), p_f.into()), format!("c={c} F={f:?}: density {d} != {survivors}/{p_f}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (c, F) cases exact"))
}

fn first_odd_pair(q1: u64) -> Result<CandidatePair, String> {
    let mut out = algorithm1(q1, 1, ParitySel::Odd).map_err(|e| e.to_string())?;
    let p = out.pairs.remove(0);
    oracle_validate(&p)?;
    Ok(p)
}

fn criterion_8() -> Outcome {
    let pair = lift_to_digits(&first_odd_pair(31)?, 40).map_err(|e| e.to_string())?;
    let ec = pair.ec();
    check(ec.digits() == 40, "lift did not give 40 digits")?;
    let policy = PrimalityPolicy::default();
    let report = count_primes_ec(&ec, 80_000, 20_000, &policy);
    let mut h_emp = Vec::new();
    for cp in report.checkpoints.iter().filter(|cp| [20_000, 40_000, 80_000].contains(&cp.x)) {
        let (d_x, _, h) = densities(&ec, cp.x, cp.count);
        let s = 40.0 * std::f64::consts::LN_10;
        check(((d_x - h / s) / d_x).abs() < 1e-12, "d_per_x != h_emp / s(c)")?;
        h_emp.push(h);
    }
    check(h_emp.len() == 3, format!("{} of 3 checkpoints reported", h_emp.len()))?;
    let (lo, hi) = h_emp.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &h| (lo.min(h), hi.max(h)));
    check((hi - lo) / lo < 0.25, format!("h_emp varies by {:.1}%", 100.0 * (hi - lo) / lo))?;

    let hs: Vec<f64> =
        [7u64, 13, 31].into_iter().map(|q1| first_odd_pair(q1).map(|p| hc_product(&p.c, NZ_H_LIMIT))).collect::<Result<_, _>>()?;
    check(hs[0] < hs[1] && hs[1] < hs[2], format!("h ordering fails: {hs:?}"))?;
    Ok(format!(
        "h_emp {:.3}/{:.3}/{:.3} spread {:.1}%, h(7)={:.3} < h(13)={:.3} < h(31)={:.3}",
        h_emp[0],
        h_emp[1],
        h_emp[2],
        100.0 * (hi - lo) / lo,
        hs[0],
        hs[1],
        hs[2]
    ))
}

fn criterion_9() -> Outcome {
    let pairs: Vec<CandidatePair> = algorithm1(31, 40, ParitySel::Odd)
        .map_err(|e| e.to_string())?
        .pairs
        .iter()
        .map(|p| lift_to_digits(p, 40).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    check(pairs.len() >= 40, format!("only {} pairs", pairs.len()))?;
    let policy = PrimalityPolicy::default();
    let n1 = nz_stats(&pairs, 1.0, None, &policy).map_err(|e| e.to_string())?;
    let n4 = nz_stats(&pairs, 4.0, Some(n1.h), &policy).map_err(|e| e.to_string())?;

    let mean_h = pairs.iter().map(|p| hc_product(&p.c, 100_000)).collect::<Vec<_>>().iter().sum::<f64>() / 40.0;
    check((n1.h - mean_h).abs() < 1e-9, "h is not the cohort hc_product mean")?;
    let expected = 4.0 * n1.h / std::f64::consts::LN_10;
    check((n1.expected - expected).abs() < 1e-9, "expected N1 != 4h/ln10")?;
    check((n1.mean - expected).abs() <= 0.4 * expected, format!("mean {} vs expected {expected}", n1.mean))?;
    check((n1.mode as f64 - expected.floor()).abs() <= 2.0, format!("mode {} vs floor(expected) {}", n1.mode, expected.floor()))?;
    // direct per-pair counting as the oracle for the reported counts
    for (p, &n) in pairs.iter().zip(&n1.counts) {
        let direct = (0..=160u64)
            .filter(|x| x % 2 == u64::from(p.ec().r()))
            .filter(|&x| quadprime::primality::is_prime(&p.ec().value_at_x(x), &policy))
            .count() as u64;
        check(direct == n, format!("c={}: N1 {n} but direct count {direct}", p.c))?;
    }
    check(
        n4.fraction_with_prime < n1.fraction_with_prime,
        format!("fraction N4>=1 {} not below N1>=1 {}", n4.fraction_with_prime, n1.fraction_with_prime),
    )?;
    Ok(format!(
        "mean {:.2} vs {expected:.2}, mode {}, P(N4>=1)={:.3} < P(N1>=1)={:.3}",
        n1.mean, n1.mode, n4.fraction_with_prime, n1.fraction_with_prime
    ))
}

fn criterion_10() -> Outcome {
    let seed = Seed::new(1).unwrap();
    let pairs = algorithm2(1471, 20, &seed, Parity::Odd).map_err(|e| e.to_string())?;
    let policy = PrimalityPolicy::default();
    for (i, pair) in pairs.iter().enumerate() {
        let lifted = lift_to_digits(pair, 616).map_err(|e| e.to_string())?;
        check(decimal_size(&lifted.c).unwrap().digits == 616, "lift size")?;
        let hits = hunt_primes(&lifted, 4.0, 1, &policy).map_err(|e| e.to_string())?;
        if let Some(hit) = hits.first() {
            let strict = PrimalityPolicy::new(128, true, 0x5eed).unwrap();
            check(quadprime::primality::is_prime(&hit.value, &strict), "hit fails a stricter recheck")?;
            check(decimal_size(&hit.value).unwrap().digits == 616, "prime is not 616 digits")?;
            return Ok(format!("616-digit prime at X={} of pair {}", hit.x, i + 1));
        }
    }
    Err("no prime in 20 pairs".into())
}

fn cli(args: &[&str]) -> Result<(), String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("quadprime").chain(args.iter().copied()), &mut out, &mut err);
    check(code == 0, format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err)))
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).display().to_string();
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("gen1", vec!["gen-c", "--q1", "13", "--count", "50", "--parity", "both"].into_iter().map(String::from).collect()),
        (
            "gen2",
            ["gen-c", "--q1", "31", "--count", "16", "--algo", "2", "--seed", "3", "--seed-count", "2", "--digits", "40"]
                .into_iter()
                .map(String::from)
                .collect(),
        ),
        (
            "hc",
            ["estimate-hc", "--c", "1", "--prime-limit", "1e5", "--x-max", "20000", "--checkpoint-step", "5000", "--format", "json"]
                .into_iter()
                .map(String::from)
                .collect(),
        ),
        ("cof", ["cofactor-count", "--x", "10000,50000"].into_iter().map(String::from).collect()),
        ("res", ["residues", "--p", "3,5,7,11,13"].into_iter().map(String::from).collect()),
    ];
    let mut files = 0;
    for workers in ["1", "4"] {
        for (name, args) in &runs {
            let out = path(&format!("{name}.{workers}"));
            let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
            a.extend(["--workers", workers, "--output", &out]);
            cli(&a)?;
        }
        let pairs = path(&format!("gen2.{workers}"));
        let hunt = path(&format!("hunt.{workers}"));
        cli(&["hunt", "--pairs", &pairs, "--z", "1", "--workers", workers, "--output", &hunt])?;
        let stats = path(&format!("stats.{workers}"));
        let hist = path(&format!("hist.{workers}"));
        cli(&["density-scan", "--pairs", &pairs, "--workers", workers, "--output", &stats, "--hist-output", &hist])?;
    }
    for name in ["gen1", "gen2", "hc", "cof", "res", "hunt", "stats", "hist"] {
        let a = fs::read(path(&format!("{name}.1"))).map_err(|e| e.to_string())?;
        let b = fs::read(path(&format!("{name}.4"))).map_err(|e| e.to_string())?;
        check(!a.is_empty() && a == b, format!("{name} differs between 1 and 4 workers"))?;
        files += 1;
    }
    Ok(format!("{files} outputs byte-identical across 1 and 4 workers"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("density constants for c = 1, 3, 5", criterion_1),
        ("cofactor prime counts", criterion_2),
        ("power-law regression", criterion_3),
        ("congruence families and parity link", criterion_4),
        ("generator soundness", criterion_5),
        ("divisor sub-progressions", criterion_6),
        ("coprime classes and exact density", criterion_7),
        ("empirical density stability and h ordering", criterion_8),
        ("prime-count statistics on a cohort", criterion_9),
        ("616-digit prime hunt", criterion_10),
        ("determinism across worker counts", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
