//! Cofactor progressions of `E_c`.
//!
//! If `A1` divides some element of `E_c`, every `X ≡ ±X0 (mod 2 A1)` gives
//! `X^2 + c = A1 * (4n(A1 n ± X0) + B0)`. The cofactor sequence
//! `n -> 4n(A1 n + eps X0) + B0` is again a quadratic progression; its
//! multiples of a further `A` split into arithmetic sub-progressions indexed by
//! the divisors `a` of `A`.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::arith::{inv_mod_u64, mod_u64};
use crate::ecset::{first_multiple_scan, EcParams, FirstMultiple};
use crate::error::{domain, Result};
use crate::primality::{is_prime, is_prime_u64, PrimalityPolicy};

/// Sign of the `X0` term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Eps {
    Plus,
    Minus,
}

impl Eps {
    pub fn sign(self) -> i64 {
        match self {
            Eps::Plus => 1,
            Eps::Minus => -1,
        }
    }

    pub fn both() -> [Eps; 2] {
        [Eps::Plus, Eps::Minus]
    }
}

impl TryFrom<i64> for Eps {
    type Error = crate::error::Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Eps::Plus),
            -1 => Ok(Eps::Minus),
            _ => domain(format!("eps must be +1 or -1, got {v}")),
        }
    }
}

/// `n -> 4n(A1 n + eps X0) + B0` for `n >= 0`.
#[derive(Clone, Debug)]
pub struct CofactorProgression {
    a1: u64,
    ec: EcParams,
    eps: Eps,
    anchor: FirstMultiple,
}

impl CofactorProgression {
    pub fn a1(&self) -> u64 {
        self.a1
    }

    pub fn ec(&self) -> &EcParams {
        &self.ec
    }

    pub fn eps(&self) -> Eps {
        self.eps
    }

    pub fn anchor(&self) -> &FirstMultiple {
        &self.anchor
    }

    /// `(4 A1, 4 eps X0, B0)`.
    pub fn coefficients(&self) -> (BigInt, BigInt, BigInt) {
        (BigInt::from(4 * self.a1), BigInt::from(4 * self.eps.sign()) * self.anchor.x0, self.anchor.cofactor.clone())
    }

    pub fn value(&self, n: u64) -> BigInt {
        let n_big = BigInt::from(n);
        let inner = BigInt::from(self.a1) * &n_big + BigInt::from(self.eps.sign()) * self.anchor.x0;
        BigInt::from(4u32) * n_big * inner + &self.anchor.cofactor
    }

    /// `X` with `X^2 + c = A1 * value(n)`: `2 A1 n + eps X0`.
    pub fn x_at(&self, n: u64) -> BigInt {
        BigInt::from(2 * self.a1) * n + BigInt::from(self.eps.sign()) * self.anchor.x0
    }

    /// `value(n)` when it fits a machine word.
    fn value_u64(&self, n: u64) -> Option<u64> {
        let b0 = self.anchor.cofactor.to_u128()?;
        let n = n as u128;
        let a1n = (self.a1 as u128).checked_mul(n)?;
        let inner = match self.eps {
            Eps::Plus => a1n.checked_add(self.anchor.x0 as u128)?,
            // n = 0 yields a zero product whatever the sign
            Eps::Minus if n == 0 => 0,
            Eps::Minus => a1n.checked_sub(self.anchor.x0 as u128)?,
        };
        let v = 4u128.checked_mul(n)?.checked_mul(inner)?.checked_add(b0)?;
        u64::try_from(v).ok()
    }

    /// `value(n) mod m`, computed without big integers.
    pub fn value_mod(&self, n: u64, m: u64) -> u64 {
        let m128 = m as i128;
        let n = (n % m) as i128;
        let a1 = (self.a1 % m) as i128;
        let x0 = (self.anchor.x0 % m) as i128 * self.eps.sign() as i128;
        let b0 = mod_u64(&self.anchor.cofactor, m) as i128;
        let inner = (a1 * n + x0).rem_euclid(m128);
        ((4 * n % m128) * inner % m128 + b0).rem_euclid(m128) as u64
    }
}

/// Build the cofactor progression of `A1` in `E_c`. The anchor is located by
/// scanning `X = r, r + 2, ...` over one period, so `A1` may be composite.
pub fn cofactor_progression(a1: u64, ec: &EcParams, eps: Eps) -> Result<CofactorProgression> {
    let Some(anchor) = first_multiple_scan(a1, ec) else {
        return domain(format!("{a1} divides no element of E_{}", ec.c()));
    };
    Ok(CofactorProgression { a1, ec: ec.clone(), eps, anchor })
}

/// Irreducible over the integers iff `gcd(A1, X0, B0) = 1`.
pub fn is_irreducible(cp: &CofactorProgression) -> bool {
    let g = BigInt::from(cp.a1.gcd(&cp.anchor.x0));
    g.gcd(&cp.anchor.cofactor).is_one()
}

/// Indices `n0 + k * step` whose cofactor values are all divisible by `A`,
/// attached to the divisor `a` of `A` that produced them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubProgression {
    pub a: u64,
    pub n0: u64,
    pub step: u64,
}

impl SubProgression {
    pub fn contains(&self, n: u64) -> bool {
        n >= self.n0 && (n - self.n0).is_multiple_of(self.step)
    }

    pub fn nth(&self, k: u64) -> u64 {
        self.n0 + k * self.step
    }

    /// The `a = A` case.
    pub fn is_dual(&self, modulus: u64) -> bool {
        self.a == modulus
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Smallest `n >= 0` with `A | value(n)`. `value mod A` has period dividing
/// `A`, so one period is enough.
pub fn first_divisible_index(cp: &CofactorProgression, modulus: u64) -> Option<u64> {
    (0..modulus).find(|&n| cp.value_mod(n, modulus) == 0)
}

/// The three existence conditions for the sub-progression of divisor `a`,
/// and the resulting class when all hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Solvability {
    /// `gcd(A1, A/a) | A1 n0 + eps X0`
    shift_divisible: bool,
    /// `A1 u ≡ gcd(A1, A/a) (mod A/a)` has a solution `u`
    inverse: Option<u64>,
    /// `gcd(a A1, A/a) | (A1 u + gcd(A1, A/a)) n0 + u eps X0`
    compatible: bool,
    class: Option<(u64, u64)>,
}

fn solvability(cp: &CofactorProgression, modulus: u64, a: u64, n0: u64) -> Solvability {
    let b = modulus / a;
    let a1 = cp.a1;
    let g = a1.gcd(&b);
    let shift = a1 as i128 * n0 as i128 + cp.eps.sign() as i128 * cp.anchor.x0 as i128;
    let mut out = Solvability { shift_divisible: shift % g as i128 == 0, inverse: None, compatible: false, class: None };
    if !out.shift_divisible {
        return out;
    }
    let b_red = b / g;
    let Some(u) = inv_mod_u64((a1 / g) % b_red.max(1), b_red) else {
        return out;
    };
    out.inverse = Some(u);

    // A1 n ≡ -shift (mod b)  <=>  n ≡ n1 (mod b/g)
    let n1 = if b_red == 1 { 0 } else { (-(u as i128) * (shift / g as i128)).rem_euclid(b_red as i128) as u64 };
    let big_g = a.gcd(&b_red);
    out.compatible = (n0 as i128 - n1 as i128).rem_euclid(big_g as i128) == 0;
    if !out.compatible {
        return out;
    }
    // n ≡ n0 (mod a), n ≡ n1 (mod b/g)
    let step = a.lcm(&b_red);
    let t = if b_red / big_g == 1 {
        0
    } else {
        let rhs = (n1 as i128 - n0 as i128).rem_euclid(b_red as i128) as u64 / big_g;
        let inv = inv_mod_u64((a / big_g) % (b_red / big_g), b_red / big_g).expect("coprime after dividing gcd");
        (rhs as u128 * inv as u128 % (b_red / big_g) as u128) as u64
    };
    let n = ((n0 as u128 + a as u128 * t as u128) % step as u128) as u64;
    debug_assert_eq!(step, modulus / (a as u128 * a1 as u128).gcd(&(b as u128)) as u64);
    out.class = Some((n, step));
    out
}

/// Sub-progressions of indices `n` with `A | value(n)`, one per divisor `a`
/// of `A` whose existence conditions hold, ascending in `a`. Their union is
/// exactly `{ n : A | value(n) }`; the last entry (`a = A`) is the dual
/// progression with step `A`. Empty when no value is divisible by `A`.
pub fn divisor_subprogressions(cp: &CofactorProgression, modulus: u64) -> Vec<SubProgression> {
    if modulus < 2 {
        return Vec::new();
    }
    let Some(n0) = first_divisible_index(cp, modulus) else {
        return Vec::new();
    };
    divisors(modulus)
        .into_iter()
        .filter_map(|a| solvability(cp, modulus, a, n0).class.map(|(n, step)| SubProgression { a, n0: n, step }))
        .collect()
}

/// A divisor for which the two published step formulas differ:
/// `A / gcd(a A1, A/a)` (used) versus `A / gcd(a, A/a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepDisagreement {
    pub a: u64,
    pub used_step: u64,
    pub alternative_step: u64,
}

pub fn step_disagreements(cp: &CofactorProgression, modulus: u64) -> Vec<StepDisagreement> {
    divisor_subprogressions(cp, modulus)
        .into_iter()
        .filter_map(|sp| {
            let b = modulus / sp.a;
            let alternative_step = modulus / sp.a.gcd(&b);
            (alternative_step != sp.step).then_some(StepDisagreement { a: sp.a, used_step: sp.step, alternative_step })
        })
        .collect()
}

/// Count `n` in `[0, n_max]` with `value(n)` prime. Parallel over `n`; the
/// count does not depend on the partition.
pub fn count_cofactor_primes(cp: &CofactorProgression, n_max: u64, policy: &PrimalityPolicy) -> u64 {
    (0..=n_max)
        .into_par_iter()
        .filter(|&n| match cp.value_u64(n) {
            Some(v) => is_prime_u64(v),
            None => is_prime(&cp.value(n), policy),
        })
        .count() as u64
}

/// Count `n` with `A1 n < x` and `value(n)` prime, i.e. `n` in
/// `[0, ceil(x / A1))`. For `x` a multiple of `A1` this stops just short of
/// `x / A1`.
pub fn count_cofactor_primes_below(cp: &CofactorProgression, x: u64, policy: &PrimalityPolicy) -> u64 {
    match x.div_ceil(cp.a1) {
        0 => 0,
        end => count_cofactor_primes(cp, end - 1, policy),
    }
}

#[cfg(test)]
pub(crate) fn printed_third_condition(cp: &CofactorProgression, modulus: u64, a: u64, n0: u64) -> Option<bool> {
    // the condition with eps X0 not multiplied by u
    let s = solvability(cp, modulus, a, n0);
    let u = s.inverse?;
    let b = modulus / a;
    let g = cp.a1.gcd(&b) as i128;
    let lhs = (cp.a1 as i128 * a as i128).gcd(&(b as i128));
    let rhs = (cp.a1 as i128 * u as i128 + g) * n0 as i128 + cp.eps.sign() as i128 * cp.anchor.x0 as i128;
    Some(rhs % lhs == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecset::t_p;
    use crate::primality::primes_up_to;

    fn ec(c: u64) -> EcParams {
        EcParams::new(c).unwrap()
    }

    fn cp(a1: u64, c: u64, eps: Eps) -> CofactorProgression {
        cofactor_progression(a1, &ec(c), eps).unwrap()
    }

    /// Oracle: (X^2 + c) / A1 along X ≡ ±X0 (mod 2 A1).
    fn oracle_values(a1: u64, c: u64, eps: Eps, count: u64) -> Vec<u64> {
        let r = 1 - c % 2;
        let x0 = (r..2 * a1 + r).step_by(2).find(|x| (x * x + c).is_multiple_of(a1)).unwrap();
        (0..count)
            .map(|n| {
                let x = match eps {
                    Eps::Plus => 2 * a1 * n + x0,
                    Eps::Minus => (2 * a1 * n).abs_diff(x0),
                };
                (x * x + c) / a1
            })
            .collect()
    }

    #[test]
    fn cofactor_progression_examples() {
        let p = cp(5, 1, Eps::Plus);
        let v: Vec<BigInt> = (0..3).map(|n| p.value(n)).collect();
        assert_eq!(v, [1, 29, 97].map(BigInt::from));
        assert_eq!(oracle_values(5, 1, Eps::Plus, 3), vec![1, 29, 97]);
        assert_eq!((0..3).map(|n| p.x_at(n)).collect::<Vec<_>>(), [2, 12, 22].map(BigInt::from));

        let m = cp(5, 1, Eps::Minus);
        let v: Vec<BigInt> = (0..3).map(|n| m.value(n)).collect();
        assert_eq!(v, [1, 13, 65].map(BigInt::from));
        assert_eq!(oracle_values(5, 1, Eps::Minus, 3), vec![1, 13, 65]);

        assert_eq!(cp(7, 157, Eps::Plus).value(0), BigInt::from(23));
        assert!(cofactor_progression(3, &ec(1), Eps::Plus).is_err());
        assert!(cofactor_progression(4, &ec(1), Eps::Plus).is_err());
    }

    #[test]
    fn values_recover_elements_of_ec() {
        for a1 in [3u64, 5, 7, 9, 13, 15, 21, 25] {
            for c in 1..80u64 {
                let Ok(p) = cofactor_progression(a1, &ec(c), Eps::Plus) else { continue };
                for eps in Eps::both() {
                    let p = CofactorProgression { eps, ..p.clone() };
                    let oracle = oracle_values(a1, c, eps, 30);
                    for n in 0..30u64 {
                        let v = p.value(n);
                        assert_eq!(v, BigInt::from(oracle[n as usize]));
                        assert!(v.is_odd() && v >= BigInt::one());
                        let x = p.x_at(n);
                        assert_eq!(&x * &x + c, &v * a1);
                        assert_eq!(p.value_u64(n), v.to_u64());
                        assert_eq!(p.value_mod(n, 97), mod_u64(&v, 97));
                    }
                }
            }
        }
    }

    #[test]
    fn b0_is_one_when_a1_is_in_ec() {
        for c in 1..40u64 {
            let e = ec(c);
            for j in 0..5 {
                let a1 = e.eval_element(j).to_u64().unwrap();
                let p = cp(a1, c, Eps::Plus);
                if p.anchor().x0 == e.x_of(j) {
                    assert_eq!(p.value(0), BigInt::one());
                }
            }
        }
        assert_eq!(cp(5, 1, Eps::Plus).value(0), BigInt::one());
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&cp(5, 1, Eps::Plus)));
        let nine = cp(9, 9, Eps::Plus);
        assert!(is_irreducible(&nine));
        // oracle search: p^2 | c with p | X0 and p | B0
        let mut reducible = None;
        'search: for p in [3u64, 5, 7] {
            for d in 1..30u64 {
                let c = p * p * d;
                let Some(fm) = first_multiple_scan(p * p, &ec(c)) else { continue };
                if fm.x0 % p == 0 && mod_u64(&fm.cofactor, p) == 0 {
                    reducible = Some((p, c));
                    break 'search;
                }
            }
        }
        let (p, c) = reducible.expect("a reducible case exists");
        assert!(!is_irreducible(&cp(p * p, c, Eps::Plus)));
    }

    fn brute_set(p: &CofactorProgression, modulus: u64, n_max: u64) -> Vec<u64> {
        (0..=n_max).filter(|&n| mod_u64(&p.value(n), modulus) == 0).collect()
    }

    fn covered(sps: &[SubProgression], n_max: u64) -> Vec<u64> {
        (0..=n_max).filter(|&n| sps.iter().any(|s| s.contains(n))).collect()
    }

    #[test]
    fn divisor_subprogression_examples() {
        let p = cp(5, 1, Eps::Plus);
        let sps = divisor_subprogressions(&p, 13);
        let dual = sps.iter().find(|s| s.is_dual(13)).expect("dual progression");
        assert_eq!(dual.step, 13);
        assert_eq!(covered(&sps, 200), brute_set(&p, 13, 200));
        let first = brute_set(&p, 13, 200)[0];
        assert_eq!(first_divisible_index(&p, 13), Some(first));

        // 3 never divides values of B_{5,1,+}: X^2+1 has no root mod 3
        assert!(divisor_subprogressions(&p, 3).is_empty());
        assert!(divisor_subprogressions(&p, 2).is_empty());
    }

    #[test]
    fn subprogression_coverage_and_membership() {
        for a1 in [5u64, 7, 9, 11, 13, 15] {
            for c in 1..=60u64 {
                let Ok(base) = cofactor_progression(a1, &ec(c), Eps::Plus) else { continue };
                for modulus in 2..=60u64 {
                    for eps in Eps::both() {
                        let p = CofactorProgression { eps, ..base.clone() };
                        let sps = divisor_subprogressions(&p, modulus);
                        assert_eq!(covered(&sps, 500), brute_set(&p, modulus, 500), "A1={a1} c={c} A={modulus} {eps:?}");
                        for s in &sps {
                            for k in 0..=50 {
                                assert_eq!(p.value_mod(s.nth(k), modulus), 0);
                            }
                            let b = modulus / s.a;
                            assert_eq!(s.step, modulus / (s.a * a1).gcd(&b));
                        }
                        if let Some(last) = sps.last() {
                            assert!(last.is_dual(modulus));
                            assert_eq!(last.step, modulus);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dual_progressions_exist_for_both_signs() {
        for c in [1u64, 3, 7, 157] {
            for a1 in [5u64, 7, 9] {
                let Ok(base) = cofactor_progression(a1, &ec(c), Eps::Plus) else { continue };
                let minus = CofactorProgression { eps: Eps::Minus, ..base.clone() };
                for modulus in 3..=40u64 {
                    let plus_duals = divisor_subprogressions(&base, modulus);
                    let minus_duals = divisor_subprogressions(&minus, modulus);
                    assert_eq!(plus_duals.is_empty(), minus_duals.is_empty());
                    for sps in [plus_duals, minus_duals] {
                        if let Some(d) = sps.iter().find(|s| s.is_dual(modulus)) {
                            assert_eq!(d.step, modulus);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn printed_third_condition_is_not_the_solvability_test() {
        let mut disagreements = 0;
        for a1 in [5u64, 7, 9, 13, 15] {
            for c in 1..60u64 {
                let Ok(base) = cofactor_progression(a1, &ec(c), Eps::Plus) else { continue };
                for eps in Eps::both() {
                    let p = CofactorProgression { eps, ..base.clone() };
                    for modulus in (3..=60u64).step_by(2) {
                        let Some(n0) = first_divisible_index(&p, modulus) else { continue };
                        for a in divisors(modulus) {
                            let s = solvability(&p, modulus, a, n0);
                            if let Some(printed) = printed_third_condition(&p, modulus, a, n0) {
                                if printed != s.compatible {
                                    disagreements += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(disagreements > 0);
    }

    #[test]
    fn step_formulas_agree_on_irreducible_progressions() {
        // p | A1 and p | X0 make value(n) ≡ B0 (mod p) for every n, so a
        // disagreement needs p | B0 too.
        for a1 in [5u64, 9, 15, 25] {
            for c in 1..120u64 {
                let Ok(p) = cofactor_progression(a1, &ec(c), Eps::Plus) else { continue };
                let any = (3..120u64).any(|m| !step_disagreements(&p, m).is_empty());
                assert_eq!(any, !is_irreducible(&p), "A1={a1} c={c}");
            }
        }
        let reducible = cp(25, 100, Eps::Plus);
        assert!(!is_irreducible(&reducible));
        let d = step_disagreements(&reducible, 25);
        assert!(d.iter().all(|d| d.used_step < d.alternative_step));
    }

    #[test]
    fn prime_divisors_of_cofactors_divide_ec() {
        for a1 in [5u64, 7, 9, 13] {
            for c in 1..50u64 {
                let Ok(p) = cofactor_progression(a1, &ec(c), Eps::Plus) else { continue };
                for eps in Eps::both() {
                    let p = CofactorProgression { eps, ..p.clone() };
                    for n in 0..=200 {
                        let mut v = p.value(n).to_u64().unwrap();
                        let mut d = 3;
                        while d * d <= v {
                            while v.is_multiple_of(d) {
                                assert!(t_p(d, &BigInt::from(c)) >= 1, "p={d} c={c}");
                                v /= d;
                            }
                            d += 2;
                        }
                        if v > 1 {
                            assert!(t_p(v, &BigInt::from(c)) >= 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prime_power_of_c_anchor() {
        // p^nu || c with A1 = p^nu. The two signs coincide when X0 ≡ 0 (mod A1):
        // always for nu = 1, and for odd c (X0 = 0).
        let mut checked = 0;
        for p in [3u64, 5, 7] {
            for nu in 1..=3u32 {
                let a1 = p.pow(nu);
                for d in 1..40u64 {
                    if d % p == 0 {
                        continue;
                    }
                    let c = a1 * d;
                    let Ok(plus) = cofactor_progression(a1, &ec(c), Eps::Plus) else { continue };
                    let minus = CofactorProgression { eps: Eps::Minus, ..plus.clone() };
                    let plus_vals: Vec<BigInt> = (0..=100).map(|n| plus.value(n)).collect();
                    let minus_vals: Vec<BigInt> = (0..=100).map(|n| minus.value(n)).collect();
                    if nu == 1 || c % 2 == 1 {
                        // minus(n) = plus(n - 1) for n >= 1, minus(0) = plus(0)
                        for v in &minus_vals {
                            assert!(plus_vals.contains(v), "p={p} nu={nu} c={c}");
                        }
                        checked += 1;
                    }
                    // p | value(n) for some n forces nu even
                    if plus_vals.iter().chain(&minus_vals).any(|v| mod_u64(v, p) == 0) {
                        assert_eq!(nu % 2, 0, "p={p} nu={nu} c={c}");
                    }
                }
            }
        }
        assert!(checked > 20);
    }

    #[test]
    fn residues_of_cofactor_multiples_match_t_p() {
        for a1 in [5u64, 7, 9, 13] {
            for c in 1..60u64 {
                let Ok(p) = cofactor_progression(a1, &ec(c), Eps::Plus) else { continue };
                for &q in primes_up_to(50).odd() {
                    if a1 % q == 0 {
                        continue;
                    }
                    let t = t_p(q, &BigInt::from(c));
                    if t == 0 {
                        continue;
                    }
                    for eps in Eps::both() {
                        let p = CofactorProgression { eps, ..p.clone() };
                        let roots = (0..q).filter(|&n| p.value_mod(n, q) == 0).count() as u8;
                        assert_eq!(roots, t, "A1={a1} c={c} q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn count_cofactor_primes_small() {
        let policy = PrimalityPolicy::default();
        let p = cp(5, 1, Eps::Plus);
        assert_eq!(count_cofactor_primes(&p, 0, &policy), 0);
        let brute = (0..=300u64).filter(|&n| is_prime_u64(p.value(n).to_u64().unwrap())).count() as u64;
        assert_eq!(count_cofactor_primes(&p, 300, &policy), brute);
    }

    #[test]
    fn counts_along_b_5_1() {
        let policy = PrimalityPolicy::default();
        let p = cp(5, 1, Eps::Plus);
        assert_eq!(count_cofactor_primes(&p, 10_000 / 5, &policy), 482);
        assert_eq!(count_cofactor_primes(&p, 100_000 / 5, &policy), 3541);
        // value(100000) = 200000800001 is prime, so the two bounds part ways
        assert!(is_prime_u64(200_000_800_001));
        assert_eq!(p.value(100_000), BigInt::from(200_000_800_001u64));
        let below = count_cofactor_primes_below(&p, 500_000, &policy);
        assert_eq!(count_cofactor_primes(&p, 100_000, &policy), below + 1);
        assert_eq!(count_cofactor_primes_below(&p, 0, &policy), 0);
        assert_eq!(count_cofactor_primes_below(&p, 1, &policy), count_cofactor_primes(&p, 0, &policy));
        assert_eq!(count_cofactor_primes_below(&p, 6, &policy), count_cofactor_primes(&p, 1, &policy));
    }
}
