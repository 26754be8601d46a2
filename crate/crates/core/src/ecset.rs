//! The set `E_c = { X^2 + c : X ≡ r (mod 2) }`, `r = 1 - (c mod 2)`, indexed
//! by `j` with `X = 2j + r`, so every element is odd.
//!
//! For an odd prime `p` the indices of multiples of `p` form (at most) two
//! arithmetic progressions of difference `p` ("Sieve 2"). This module computes
//! their anchors, uses them to sieve index ranges, and describes the residue
//! classes of `X` modulo `2 p_F` whose elements avoid every prime of `F`.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::arith::{crt_merge, decimal_size, legendre_u64, mod_u64, neg_mod_u64, sqrt_mod, DecimalSize, ResidueClass};
use crate::error::{domain, Result};
use crate::primality::{is_prime_u64, primes_up_to};

/// Parameters of one set `E_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct EcParams {
    c: BigInt,
    r: u8,
    size: DecimalSize,
}

impl EcParams {
    pub fn new(c: impl Into<BigInt>) -> Result<Self> {
        let c = c.into();
        if !c.is_positive() {
            return domain(format!("E_c needs c >= 1, got {c}"));
        }
        let r = if c.is_even() { 1 } else { 0 };
        let size = decimal_size(&c)?;
        Ok(Self { c, r, size })
    }

    pub fn c(&self) -> &BigInt {
        &self.c
    }

    /// Parity of `X` for elements of this set.
    pub fn r(&self) -> u8 {
        self.r
    }

    /// `m_c`, the decimal digit count of `c`.
    pub fn digits(&self) -> u64 {
        self.size.digits
    }

    /// `s(c) = m_c ln 10`.
    pub fn log_size(&self) -> f64 {
        self.size.log_size
    }

    /// `X = 2j + r`.
    pub fn x_of(&self, j: u64) -> u64 {
        2 * j + u64::from(self.r)
    }

    /// The `j`-th element `(2j + r)^2 + c`.
    pub fn eval_element(&self, j: u64) -> BigInt {
        let x = BigInt::from(self.x_of(j));
        &x * &x + &self.c
    }

    /// `X^2 + c` for an explicit `X` (no parity check).
    pub fn value_at_x(&self, x: u64) -> BigInt {
        let x = BigInt::from(x);
        &x * &x + &self.c
    }
}

/// Number of roots of `X^2 + c ≡ 0 (mod p)`: 0, 1 (`p | c`) or 2.
pub fn t_p(p: u64, c: &BigInt) -> u8 {
    (legendre_u64(neg_mod_u64(c, p), p) + 1) as u8
}

/// First multiple of `A` in `E_c`: minimal `X0 ≡ r (mod 2)` with
/// `A | X0^2 + c`, its index `j0`, and the cofactor `B0 = (X0^2 + c)/A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstMultiple {
    pub modulus: u64,
    pub j0: u64,
    pub x0: u64,
    pub cofactor: BigInt,
}

impl FirstMultiple {
    fn from_x0(modulus: u64, x0: u64, ec: &EcParams) -> Self {
        let value = ec.value_at_x(x0);
        debug_assert!(mod_u64(&value, modulus) == 0);
        Self { modulus, j0: x0 / 2, x0, cofactor: value / modulus }
    }
}

/// Lift a residue `rho mod a` (a odd) to the representative in `[0, 2a)` with
/// parity `r`.
fn lift_parity(rho: u64, a: u64, r: u8) -> u64 {
    if rho % 2 == u64::from(r) {
        rho
    } else {
        rho + a
    }
}

/// Anchor of the multiples of the odd prime `a` in `E_c`, via the canonical
/// square root of `-c`. `None` when `-c` is a nonresidue (`t_p = 0`).
pub fn first_multiple(a: u64, ec: &EcParams) -> Result<Option<FirstMultiple>> {
    let Some(s) = sqrt_mod(&-ec.c(), a)? else {
        return Ok(None);
    };
    let x0 = lift_parity(s, a, ec.r).min(lift_parity((a - s) % a, a, ec.r));
    Ok(Some(FirstMultiple::from_x0(a, x0, ec)))
}

/// Same anchor for any odd `a >= 1`, found by scanning one period of `X`.
pub fn first_multiple_scan(a: u64, ec: &EcParams) -> Option<FirstMultiple> {
    if a == 0 || a.is_multiple_of(2) {
        return None;
    }
    let cm = mod_u64(ec.c(), a) as u128;
    let a128 = a as u128;
    (u64::from(ec.r)..2 * a + u64::from(ec.r))
        .step_by(2)
        .find(|&x| ((x as u128 * x as u128) % a128 + cm).is_multiple_of(a128))
        .map(|x0| FirstMultiple::from_x0(a, x0, ec))
}

/// The two index progressions `start + p k` of multiples of `p` in `E_c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexProgressionPair {
    pub start1: u64,
    pub start2: u64,
    pub step: u64,
    /// `p | c`; both progressions then coincide.
    pub merged: bool,
}

impl IndexProgressionPair {
    pub fn contains(&self, j: u64) -> bool {
        let m = j % self.step;
        m == self.start1 || m == self.start2
    }
}

/// Sieve-2 progressions for the odd prime `p`: `j0 + pk` and
/// `(p - j0 - r) mod p + pk`, ordered so that `start1 <= start2`.
pub fn index_progressions(p: u64, ec: &EcParams) -> Result<Option<IndexProgressionPair>> {
    let Some(fm) = first_multiple(p, ec)? else {
        return Ok(None);
    };
    let j0 = fm.j0 % p;
    let other = (2 * p - j0 - u64::from(ec.r)) % p;
    Ok(Some(IndexProgressionPair { start1: j0.min(other), start2: j0.max(other), step: p, merged: mod_u64(ec.c(), p) == 0 }))
}

/// Index sieve over `E_c` by all odd primes up to a bound.
///
/// A surviving index has an element without prime factors `<= bound`, or an
/// element equal to one of those primes.
#[derive(Clone, Debug)]
pub struct Sieve2 {
    ec: EcParams,
    bound: u64,
    progressions: Vec<IndexProgressionPair>,
    small_c: Option<u64>,
}

impl Sieve2 {
    pub fn new(ec: &EcParams, bound: u64) -> Self {
        let progressions = primes_up_to(bound).odd().iter().filter_map(|&p| index_progressions(p, ec).expect("odd prime")).collect();
        let small_c = ec.c().to_u64().filter(|&c| c <= bound);
        Self { ec: ec.clone(), bound, progressions, small_c }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn ec(&self) -> &EcParams {
        &self.ec
    }

    /// Survival flags for `j` in `[j_lo, j_hi)`.
    pub fn survivors(&self, j_lo: u64, j_hi: u64) -> Vec<bool> {
        let len = j_hi.saturating_sub(j_lo) as usize;
        let mut alive = vec![true; len];
        if len == 0 {
            return alive;
        }
        for pr in &self.progressions {
            let starts: &[u64] = if pr.merged { &[pr.start1] } else { &[pr.start1, pr.start2] };
            for &s in starts {
                // first j >= j_lo with j ≡ s (mod p)
                let offset = (s + pr.step - j_lo % pr.step) % pr.step;
                let mut k = offset;
                while k < len as u64 {
                    if !self.element_is_the_prime(j_lo + k, pr.step) {
                        alive[k as usize] = false;
                    }
                    k += pr.step;
                }
            }
        }
        alive
    }

    fn element_is_the_prime(&self, j: u64, p: u64) -> bool {
        match self.small_c {
            Some(c) => {
                let x = self.ec.x_of(j) as u128;
                x * x + c as u128 == p as u128
            }
            None => false,
        }
    }
}

/// `a2 x^2 + a1 x + a0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    pub a2: BigInt,
    pub a1: BigInt,
    pub a0: BigInt,
}

impl QuadraticForm {
    pub fn eval(&self, x: &BigInt) -> BigInt {
        (&self.a2 * x + &self.a1) * x + &self.a0
    }

    pub fn discriminant(&self) -> BigInt {
        &self.a1 * &self.a1 - BigInt::from(4) * &self.a2 * &self.a0
    }
}

/// One class `X ≡ b (mod 2 p_F)` whose elements avoid every prime of `F`,
/// with the expanded form `(2 p_F x + b)^2 + c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoprimeForm {
    pub b: BigInt,
    pub form: QuadraticForm,
}

fn check_prime_set(primes: &[u64]) -> Result<()> {
    for (i, &p) in primes.iter().enumerate() {
        if p < 3 || !is_prime_u64(p) {
            return domain(format!("{p} is not an odd prime"));
        }
        if primes[..i].contains(&p) {
            return domain(format!("prime {p} repeated"));
        }
    }
    Ok(())
}

/// The `prod (p - t_p)` classes of `X` modulo `2 p_F` (parity `r`) for which
/// `X^2 + c` is coprime to every `p` in `F`, ascending in `b`.
pub fn coprime_residue_forms(ec: &EcParams, primes: &[u64]) -> Result<Vec<CoprimeForm>> {
    check_prime_set(primes)?;
    let mut classes = vec![ResidueClass::new(ec.r, 2)?];
    for &p in primes {
        let cm = mod_u64(ec.c(), p);
        if t_p(p, ec.c()) == 0 {
            return domain(format!("{p} never divides E_c (t_p = 0); drop it from F"));
        }
        let allowed: Vec<ResidueClass> =
            (0..p).filter(|&x| !(x * x + cm).is_multiple_of(p)).map(|x| ResidueClass::new(x, p)).collect::<Result<_>>()?;
        let mut next = Vec::with_capacity(classes.len() * allowed.len());
        for a in &classes {
            for b in &allowed {
                next.push(crt_merge(a, b)?);
            }
        }
        classes = next;
    }
    let p_f: BigInt = primes.iter().fold(BigInt::one(), |acc, &p| acc * p);
    let two_pf = &p_f * 2u32;
    let mut bs: Vec<BigInt> = classes.into_iter().map(|rc| rc.value().clone()).collect();
    bs.sort();
    Ok(bs
        .into_iter()
        .map(|b| {
            let form = QuadraticForm { a2: &two_pf * &two_pf, a1: BigInt::from(4) * &b * &p_f, a0: &b * &b + ec.c() };
            CoprimeForm { b, form }
        })
        .collect())
}

/// Exact density `prod (1 - t_p / p)` of elements coprime to `F`. Primes with
/// `t_p = 0` contribute a factor 1.
pub fn density_exact(ec: &EcParams, primes: &[u64]) -> Result<BigRational> {
    check_prime_set(primes)?;
    Ok(primes.iter().fold(BigRational::one(), |acc, &p| {
        let t = t_p(p, ec.c());
        acc * BigRational::new(BigInt::from(p - u64::from(t)), BigInt::from(p))
    }))
}
