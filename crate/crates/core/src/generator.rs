//! Candidate values of `c` whose smallest prime divisor over `E_c` is a
//! chosen `q1`.
//!
//! [`algorithm1`] enumerates the whole family of classes modulo `q1#`;
//! [`algorithm2`] follows a single chain, fixing one nonresidue per prime
//! from a seed, and only branches at `q1` itself.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{decimal_size, inv_mod_u64, legendre_u64, mod_u64, neg_mod_u64, primorial};
use crate::congruence::{link_class, odd_primes_below, residue_sets, transfer_first_index, FamilyPlan, Parity, MATERIALIZE_LIMIT};
use crate::ecset::{first_multiple, index_progressions, EcParams};
use crate::error::{invalid, Error, Result};
use crate::primality::{is_prime_u64, primes_up_to};

/// `c` together with the index of the first element of `E_c` divisible by `q1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePair {
    #[serde(with = "crate::serde_bigint")]
    pub c: BigInt,
    pub j0: u64,
    pub q1: u64,
    #[serde(with = "crate::serde_bigint")]
    pub modulus: BigInt,
}

impl CandidatePair {
    pub fn parity(&self) -> Parity {
        Parity::of(&self.c)
    }

    /// `q1 | c`: the two index progressions of `q1` coincide.
    pub fn q1_divides_c(&self) -> bool {
        mod_u64(&self.c, self.q1) == 0
    }

    pub fn ec(&self) -> EcParams {
        EcParams::new(self.c.clone()).expect("candidate c is positive")
    }
}

/// Positive representative of a class: `0` maps to the modulus.
fn positive(c: BigInt, modulus: &BigInt) -> BigInt {
    if c.is_zero() {
        modulus.clone()
    } else {
        c
    }
}

fn pair_for(c: BigInt, q1: u64, modulus: &BigInt) -> Result<CandidatePair> {
    let c = positive(c, modulus);
    let ec = EcParams::new(c.clone())?;
    let Some(fm) = first_multiple(q1, &ec)? else {
        return Err(Error::Verification(format!("{q1} divides no element of E_{c}")));
    };
    Ok(CandidatePair { c, j0: fm.j0, q1, modulus: modulus.clone() })
}

/// The pair for `c + modulus/2`, derived from the pair of `c` through the
/// index transfer rather than a fresh square root.
fn linked_pair(pair: &CandidatePair) -> Result<CandidatePair> {
    let prog = index_progressions(pair.q1, &pair.ec())?
        .ok_or_else(|| Error::Verification(format!("{} divides no element of E_{}", pair.q1, pair.c)))?;
    let j0 = transfer_first_index(prog.start1, pair.q1).min(transfer_first_index(prog.start2, pair.q1));
    let c = positive(link_class(&pair.c, &pair.modulus), &pair.modulus);
    Ok(CandidatePair { c, j0, q1: pair.q1, modulus: pair.modulus.clone() })
}

/// Independent check of a pair: Legendre symbols of `-c` at every odd prime
/// up to `q1`, minimality of `j0` by scanning one period, and `modulus = q1#`.
pub fn validate_pair(pair: &CandidatePair) -> Result<()> {
    let fail = |msg: String| Err(Error::Verification(format!("pair c={} q1={}: {msg}", pair.c, pair.q1)));
    let q1 = pair.q1;
    if q1 < 3 || !is_prime_u64(q1) {
        return fail("q1 is not an odd prime".into());
    }
    if !pair.c.is_positive() {
        return fail("c must be positive".into());
    }
    if pair.modulus != primorial(q1) {
        return fail("modulus is not q1#".into());
    }
    for &p in primes_up_to(q1 - 1).odd() {
        if legendre_u64(neg_mod_u64(&pair.c, p), p) != -1 {
            return fail(format!("{p} divides some element"));
        }
    }
    if legendre_u64(neg_mod_u64(&pair.c, q1), q1) < 0 {
        return fail("q1 divides no element".into());
    }
    let r = u128::from(pair.c.is_even());
    let cm = mod_u64(&pair.c, q1) as u128;
    let q = q1 as u128;
    let first = (0..q1).find(|&j| {
        let x = 2 * j as u128 + r;
        (x * x % q + cm).is_multiple_of(q)
    });
    if first != Some(pair.j0) {
        return fail(format!("j0 = {} but the first multiple is at {first:?}", pair.j0));
    }
    Ok(())
}

/// Which parities of `c` to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParitySel {
    Even,
    Odd,
    Both,
}

impl ParitySel {
    fn includes(self, p: Parity) -> bool {
        matches!((self, p), (ParitySel::Both, _) | (ParitySel::Even, Parity::Even) | (ParitySel::Odd, Parity::Odd))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algorithm1Output {
    /// Ascending in `c`.
    pub pairs: Vec<CandidatePair>,
    /// Size of the requested family (both parities when `Both`).
    pub family_size: BigInt,
    /// Fewer pairs than requested exist.
    pub truncated: bool,
}

/// Most members a single exhaustive walk will visit (reached at `q1 = 37`).
pub const ALGORITHM1_WALK_LIMIT: u64 = 1 << 30;

/// All pairs for `q1`, or the `count` smallest `c`. The even family is built
/// by the CRT chain; odd pairs come from linking each even class to its twin
/// `c ± q1#/2` and transferring the first index.
pub fn algorithm1(q1: u64, count: u64, parity: ParitySel) -> Result<Algorithm1Output> {
    if count == 0 {
        return invalid("count must be at least 1");
    }
    let plan = FamilyPlan::min_divisor(q1, Parity::Even)?;
    let per_parity = plan.cardinal();
    if per_parity > BigInt::from(ALGORITHM1_WALK_LIMIT) {
        return invalid(format!("q1 = {q1} has {per_parity} classes per parity, beyond the exhaustive limit"));
    }
    let per_parity = per_parity.to_u64().expect("below the walk limit");
    let k = count.min(per_parity);
    if k > MATERIALIZE_LIMIT {
        return invalid(format!("count {count} exceeds the materialization limit {MATERIALIZE_LIMIT}"));
    }
    let m = plan.modulus().to_u128().expect("walkable plans fit 128 bits");
    let half = m / 2;
    let rep = |c: u128| if c == 0 { m } else { c };

    let mut pairs = Vec::new();
    if parity.includes(Parity::Even) {
        for c in plan.smallest_by_key(k as usize, rep) {
            pairs.push(pair_for(BigInt::from(c), q1, plan.modulus())?);
        }
    }
    if parity.includes(Parity::Odd) {
        for c in plan.smallest_by_key(k as usize, |c| rep((c + half) % m)) {
            pairs.push(linked_pair(&pair_for(BigInt::from(c), q1, plan.modulus())?)?);
        }
    }
    pairs.sort_by(|a, b| a.c.cmp(&b.c));
    pairs.truncate(count as usize);
    let family_size = BigInt::from(per_parity) * if parity == ParitySel::Both { 2 } else { 1 };
    let truncated = BigInt::from(count) > family_size;
    Ok(Algorithm1Output { pairs, family_size, truncated })
}

/// Seed `X >= 1` of [`algorithm2`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed(#[serde(with = "crate::serde_bigint")] BigInt);

impl Seed {
    pub fn new(x: impl Into<BigInt>) -> Result<Self> {
        let x = x.into();
        if !x.is_positive() {
            return invalid(format!("seed must be >= 1, got {x}"));
        }
        Ok(Self(x))
    }

    pub fn value(&self) -> &BigInt {
        &self.0
    }
}

/// The nonresidue used at the odd prime `p`: `-1` when `p ≡ 3 (mod 4)`, `2`
/// when `p ≡ 5 (mod 8)`, otherwise the smallest prime nonresidue. Returned
/// in `[0, p)`.
pub fn chosen_nonresidue(p: u64) -> u64 {
    match p % 8 {
        3 | 7 => p - 1,
        5 => 2,
        _ => primes_up_to(p - 1)
            .odd()
            .iter()
            .copied()
            .find(|&l| legendre_u64(l, p) == -1)
            .expect("every odd prime has a prime nonresidue below it"),
    }
}

/// Residue of `c` imposed at `p`: `-4 X^2 n (mod p)`, so that `-c` is
/// `(2X)^2 n`, a nonresidue. When `p | X` the seed is replaced by `1` for
/// that prime.
pub fn seeded_residue(p: u64, seed: &Seed) -> u64 {
    let x = match mod_u64(seed.value(), p) {
        0 => 1,
        x => x,
    };
    let n = chosen_nonresidue(p) as u128;
    let pp = p as u128;
    let v = 4 * (x as u128 * x as u128 % pp) % pp * n % pp;
    ((pp - v) % pp) as u64
}

/// Residues admitted at `q1`, nonzero ones ascending and `0` last.
pub fn final_step_order(q1: u64) -> Result<Vec<u64>> {
    let mut rq = residue_sets(q1)?.rq;
    rq.rotate_left(1);
    Ok(rq)
}

/// `count <= (q1+1)/2` pairs from a single chain: one nonresidue per odd
/// prime below `q1` (fixed by the seed), then `count` residues of `q1` in
/// [`final_step_order`].
pub fn algorithm2(q1: u64, count: u64, seed: &Seed, parity: Parity) -> Result<Vec<CandidatePair>> {
    if q1 < 3 || !is_prime_u64(q1) {
        return invalid(format!("q1 = {q1} is not an odd prime"));
    }
    if count == 0 || count > q1.div_ceil(2) {
        return invalid(format!("count must be in [1, {}], got {count}", q1.div_ceil(2)));
    }
    let primes = odd_primes_below(q1);
    // per-prime data is independent; the collect keeps prime order
    let steps: Vec<(u64, u64, u64)> = primes
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let m_mod_p = primes[..i].iter().fold(2 % p, |acc, &q| acc * (q % p) % p);
            let inv = inv_mod_u64(m_mod_p, p).expect("distinct primes");
            (p, (p - inv) % p, seeded_residue(p, seed))
        })
        .collect();

    let mut a = BigInt::from(parity.bit());
    let mut modulus = BigInt::from(2u32);
    for (p, v, b) in steps {
        let d = (mod_u64(&a, p) + p - b) % p;
        let y = (v as u128 * d as u128 % p as u128) as u64;
        a += &modulus * y;
        modulus *= p;
    }
    let total = &modulus * q1;
    let v = (q1 - inv_mod_u64(mod_u64(&modulus, q1), q1).expect("q1 is coprime to 2 p_F")) % q1;
    final_step_order(q1)?
        .into_iter()
        .take(count as usize)
        .map(|b| {
            let d = (mod_u64(&a, q1) + q1 - b) % q1;
            let y = (v as u128 * d as u128 % q1 as u128) as u64;
            pair_for(&a + &modulus * y, q1, &total)
        })
        .collect()
}

/// Smallest `n >= 0` with `c + n q1#` of exactly `target_digits` digits.
pub fn lift_index(pair: &CandidatePair, target_digits: u64) -> Result<BigInt> {
    let current = decimal_size(&pair.c)?.digits;
    if target_digits < current {
        return invalid(format!("c already has {current} digits, more than {target_digits}"));
    }
    let low = BigInt::from(10u32).pow(target_digits as u32 - 1);
    let gap = &low - &pair.c;
    let n = if gap.is_positive() { gap.div_ceil(&pair.modulus) } else { BigInt::zero() };
    let lifted = &pair.c + &n * &pair.modulus;
    if decimal_size(&lifted)?.digits != target_digits {
        return invalid(format!("no lift of c = {} mod {} has {target_digits} digits", pair.c, pair.modulus));
    }
    Ok(n)
}

/// `c + n q1#` for the smallest `n` giving `target_digits` digits. The class
/// modulo `q1#` is unchanged, so `q1` and `j0` carry over.
pub fn lift_to_digits(pair: &CandidatePair, target_digits: u64) -> Result<CandidatePair> {
    lift_to_digits_with_offset(pair, target_digits, &BigInt::zero())
}

/// As [`lift_to_digits`] with `n` advanced by `offset`; the result must still
/// have `target_digits` digits.
pub fn lift_to_digits_with_offset(pair: &CandidatePair, target_digits: u64, offset: &BigInt) -> Result<CandidatePair> {
    if offset.is_negative() {
        return invalid("lift offset must be non-negative");
    }
    let n = lift_index(pair, target_digits)? + offset;
    let c = &pair.c + n * &pair.modulus;
    if decimal_size(&c)?.digits != target_digits {
        return invalid(format!("offset {offset} leaves the {target_digits}-digit range"));
    }
    Ok(CandidatePair { c, ..pair.clone() })
}

/// Pairs are equal modulo `q1#` iff they share residues everywhere below `q1`.
pub fn same_class(a: &CandidatePair, b: &CandidatePair) -> bool {
    a.modulus == b.modulus && a.c.mod_floor(&a.modulus) == b.c.mod_floor(&b.modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::build_ctilde;

    /// Oracle: scan `X < 2 q1#/2` for divisibility by each odd prime `<= q1`.
    fn oracle_min_divisor(c: u64, q1: u64) -> bool {
        let hits = |p: u64| (0..2 * p).any(|x| (x * x + c).is_multiple_of(p) && x % 2 != c % 2);
        primes_up_to(q1 - 1).odd().iter().all(|&p| !hits(p)) && hits(q1)
    }

    fn oracle_j0(c: u64, q1: u64) -> u64 {
        let r = 1 - c % 2;
        (0..).find(|j| ((2 * j + r) * (2 * j + r) + c).is_multiple_of(q1)).unwrap()
    }

    #[test]
    fn algorithm1_q1_7() {
        let out = algorithm1(7, 8, ParitySel::Odd).unwrap();
        assert_eq!(out.pairs.len(), 8);
        assert!(!out.truncated);
        let p157 = out.pairs.iter().find(|p| p.c == BigInt::from(157)).expect("157 present");
        assert_eq!(p157.j0, 1);
        for p in &out.pairs {
            validate_pair(p).unwrap();
            let c = p.c.to_u64().unwrap();
            assert!(oracle_min_divisor(c, 7));
            assert_eq!(p.j0, oracle_j0(c, 7));
            assert!(p.c < BigInt::from(211) && p.c.is_odd());
        }
        assert!(out.pairs.windows(2).all(|w| w[0].c < w[1].c));
    }

    #[test]
    fn algorithm1_small_families() {
        let five = algorithm1(5, 3, ParitySel::Odd).unwrap();
        assert_eq!(five.pairs.len(), 3);
        assert_eq!(five.family_size, BigInt::from(3));

        let three = algorithm1(3, 10, ParitySel::Both).unwrap();
        assert!(three.truncated);
        assert_eq!(three.pairs.len(), 4);
        assert_eq!(three.family_size, BigInt::from(4));
        for p in &three.pairs {
            validate_pair(p).unwrap();
        }
        assert!(algorithm1(7, 0, ParitySel::Odd).is_err());
        assert!(algorithm1(9, 1, ParitySel::Odd).is_err());
    }

    #[test]
    fn algorithm1_matches_materialized_family() {
        for q1 in [5u64, 7, 11, 13] {
            for (sel, parity) in [(ParitySel::Even, Parity::Even), (ParitySel::Odd, Parity::Odd)] {
                let fam = build_ctilde(q1, parity).unwrap();
                let out = algorithm1(q1, u64::MAX, sel).unwrap();
                let mut expect: Vec<BigInt> = fam.members.iter().map(|c| positive(c.clone(), &fam.modulus)).collect();
                expect.sort();
                let got: Vec<BigInt> = out.pairs.iter().map(|p| p.c.clone()).collect();
                assert_eq!(got, expect);
                for p in &out.pairs {
                    validate_pair(p).unwrap();
                    assert_eq!(p.j0, oracle_j0(p.c.to_u64().unwrap(), q1));
                }
            }
            let both = algorithm1(q1, 6, ParitySel::Both).unwrap();
            let all = algorithm1(q1, u64::MAX, ParitySel::Both).unwrap();
            assert_eq!(both.pairs[..], all.pairs[..6]);
        }
    }

    #[test]
    fn algorithm1_streams_large_family() {
        let out = algorithm1(23, 50, ParitySel::Odd).unwrap();
        assert_eq!(out.pairs.len(), 50);
        for p in &out.pairs {
            validate_pair(p).unwrap();
            assert!(oracle_min_divisor(p.c.to_u64().unwrap(), 23));
        }
        // the smallest 50 odd c of the family, by direct scan
        let scan: Vec<BigInt> = (1u64..).step_by(2).filter(|&c| oracle_min_divisor(c, 23)).take(50).map(BigInt::from).collect();
        assert_eq!(out.pairs.iter().map(|p| p.c.clone()).collect::<Vec<_>>(), scan);
    }

    #[test]
    fn nonresidue_rule() {
        assert_eq!(chosen_nonresidue(7), 6);
        assert_eq!(chosen_nonresidue(13), 2);
        assert_eq!(chosen_nonresidue(17), 3);
        assert_eq!(chosen_nonresidue(41), 3);
        assert_eq!(chosen_nonresidue(73), 5);
        for &p in primes_up_to(3000).odd() {
            assert_eq!(legendre_u64(chosen_nonresidue(p), p), -1, "p={p}");
        }
        let one = Seed::new(1).unwrap();
        assert_eq!(seeded_residue(7, &one), 4);
        assert_eq!(seeded_residue(13, &one), 5);
        assert!(Seed::new(0).is_err());
    }

    #[test]
    fn algorithm2_examples() {
        let seed = Seed::new(1).unwrap();
        let pairs = algorithm2(7, 1, &seed, Parity::Odd).unwrap();
        assert_eq!(pairs.len(), 1);
        validate_pair(&pairs[0]).unwrap();
        assert!(oracle_min_divisor(pairs[0].c.to_u64().unwrap(), 7));
        assert!(build_ctilde(7, Parity::Odd).unwrap().members.contains(&pairs[0].c.mod_floor(&pairs[0].modulus)));
        assert!(algorithm2(7, 5, &seed, Parity::Odd).is_err());
        assert!(algorithm2(7, 0, &seed, Parity::Odd).is_err());
        assert_eq!(algorithm2(7, 4, &seed, Parity::Even).unwrap().len(), 4);
    }

    #[test]
    fn algorithm2_inside_algorithm1() {
        for q1 in [3u64, 5, 7, 11, 13] {
            for parity in [Parity::Even, Parity::Odd] {
                let fam = build_ctilde(q1, parity).unwrap();
                for x in 1..=40u64 {
                    let seed = Seed::new(x).unwrap();
                    let pairs = algorithm2(q1, q1.div_ceil(2), &seed, parity).unwrap();
                    assert_eq!(pairs.len() as u64, q1.div_ceil(2));
                    for p in &pairs {
                        validate_pair(p).unwrap();
                        assert_eq!(p.parity(), parity);
                        assert!(fam.members.contains(&p.c.mod_floor(&p.modulus)), "q1={q1} X={x} c={}", p.c);
                    }
                    let flagged = pairs.iter().filter(|p| p.q1_divides_c()).count();
                    assert_eq!(flagged, 1);
                    assert!(pairs.last().unwrap().q1_divides_c());
                }
            }
        }
    }

    #[test]
    fn algorithm2_large_q1_is_valid_and_deterministic() {
        let seed = Seed::new(12345).unwrap();
        let a = algorithm2(1471, 3, &seed, Parity::Odd).unwrap();
        let b = algorithm2(1471, 3, &seed, Parity::Odd).unwrap();
        assert_eq!(a, b);
        for p in &a {
            validate_pair(p).unwrap();
            assert_eq!(decimal_size(&p.modulus).unwrap().digits, 616);
        }
    }

    #[test]
    fn validator_rejects_bad_pairs() {
        let good = algorithm1(7, 1, ParitySel::Odd).unwrap().pairs.remove(0);
        validate_pair(&good).unwrap();
        let wrong_j0 = CandidatePair { j0: good.j0 + 1, ..good.clone() };
        assert!(matches!(validate_pair(&wrong_j0), Err(Error::Verification(_))));
        let wrong_c = CandidatePair { c: BigInt::from(1), ..good.clone() };
        assert!(validate_pair(&wrong_c).is_err());
        let wrong_mod = CandidatePair { modulus: BigInt::from(30), ..good };
        assert!(validate_pair(&wrong_mod).is_err());
    }

    #[test]
    fn lift_examples() {
        let pair = CandidatePair { c: BigInt::from(157), j0: 1, q1: 7, modulus: BigInt::from(210) };
        let lifted = lift_to_digits(&pair, 5).unwrap();
        assert_eq!(lift_index(&pair, 5).unwrap(), BigInt::from(47));
        assert_eq!(lifted.c, BigInt::from(10027));
        validate_pair(&lifted).unwrap();
        assert_eq!(oracle_j0(10027, 7), 1);
        assert_eq!(lift_to_digits(&pair, 3).unwrap(), pair);
        assert!(lift_to_digits(&pair, 2).is_err());
        let off = lift_to_digits_with_offset(&pair, 5, &BigInt::from(3)).unwrap();
        assert_eq!(off.c, BigInt::from(10027 + 3 * 210));
        assert!(lift_to_digits_with_offset(&pair, 5, &BigInt::from(1000)).is_err());
    }

    #[test]
    fn lift_to_616_digits() {
        let seed = Seed::new(1).unwrap();
        let pair = algorithm2(1471, 1, &seed, Parity::Odd).unwrap().remove(0);
        let lifted = lift_to_digits(&pair, 616).unwrap();
        assert_eq!(decimal_size(&lifted.c).unwrap().digits, 616);
        validate_pair(&lifted).unwrap();
        assert!(same_class(&pair, &lifted));
    }

    #[test]
    fn j0_depends_only_on_class_mod_q1() {
        for p in algorithm1(11, u64::MAX, ParitySel::Both).unwrap().pairs {
            for n in 1..5u64 {
                let lifted = CandidatePair { c: &p.c + &p.modulus * n, ..p.clone() };
                validate_pair(&lifted).unwrap();
            }
        }
    }
}
