//! Prime enumeration and primality testing.
//!
//! Below 2^64 testing is deterministic Miller–Rabin on the first twelve prime
//! bases. Above, a candidate has to pass a base-2 strong test, a strong Lucas
//! test (Selfridge parameters, together a BPSW test) and `rounds - 1`
//! Miller–Rabin rounds on bases drawn from a seeded ChaCha stream.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{mul_mod_u64, pow_mod_u64};
use crate::error::{domain, Result};

/// Increasing list of primes, starting at 2 when 2 is within the limit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrimeList {
    primes: Vec<u64>,
}

impl PrimeList {
    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    /// The odd primes only (`p_1 = 3, p_2 = 5, ...`).
    pub fn odd(&self) -> &[u64] {
        match self.primes.first() {
            Some(2) => &self.primes[1..],
            _ => &self.primes,
        }
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn last(&self) -> Option<u64> {
        self.primes.last().copied()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }
}

/// Sieve of Eratosthenes over the odd numbers.
pub fn primes_up_to(limit: u64) -> PrimeList {
    if limit < 2 {
        return PrimeList::default();
    }
    let limit = usize::try_from(limit).expect("sieve limit fits in memory");
    // index i stands for 2i + 1
    let half = limit / 2 + 1;
    let mut composite = vec![false; half];
    composite[0] = true;
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut k = p * p / 2;
            while k < half {
                composite[k] = true;
                k += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(estimate_pi(limit));
    primes.push(2);
    primes.extend(composite.iter().enumerate().filter(|&(i, &c)| !c && 2 * i < limit).map(|(i, _)| (2 * i + 1) as u64));
    PrimeList { primes }
}

fn estimate_pi(n: usize) -> usize {
    if n < 10 {
        return 4;
    }
    let x = n as f64;
    (1.3 * x / x.ln()) as usize
}

fn small_primes() -> &'static [u64] {
    static SMALL: OnceLock<Vec<u64>> = OnceLock::new();
    SMALL.get_or_init(|| primes_up_to(1000).as_slice().to_vec())
}

/// Knobs for numbers beyond the deterministic range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimalityPolicy {
    pub miller_rabin_rounds: u32,
    pub use_lucas_stage: bool,
    pub rng_seed: u64,
}

impl Default for PrimalityPolicy {
    fn default() -> Self {
        Self { miller_rabin_rounds: 64, use_lucas_stage: true, rng_seed: 0 }
    }
}

impl PrimalityPolicy {
    pub fn new(miller_rabin_rounds: u32, use_lucas_stage: bool, rng_seed: u64) -> Result<Self> {
        if miller_rabin_rounds == 0 {
            return domain("primality policy needs at least one Miller-Rabin round");
        }
        Ok(Self { miller_rabin_rounds, use_lucas_stage, rng_seed })
    }

    /// Same knobs, different base stream. Used to re-verify hits.
    pub fn reseeded(&self, salt: u64) -> Self {
        Self { rng_seed: self.rng_seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15), ..*self }
    }
}

const DETERMINISTIC_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &DETERMINISTIC_BASES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let (d, s) = split_pow2(n - 1);
    DETERMINISTIC_BASES.iter().all(|&a| strong_probable_prime_u64(n, a, d, s))
}

fn split_pow2(m: u64) -> (u64, u32) {
    let s = m.trailing_zeros();
    (m >> s, s)
}

fn strong_probable_prime_u64(n: u64, a: u64, d: u64, s: u32) -> bool {
    let mut x = pow_mod_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Primality verdict. Exact below 2^64; above, BPSW plus seeded Miller–Rabin
/// rounds, reproducible for a given policy.
pub fn is_prime(n: &BigInt, policy: &PrimalityPolicy) -> bool {
    match n.sign() {
        Sign::Minus | Sign::NoSign => false,
        Sign::Plus => match n.to_u64() {
            Some(small) => is_prime_u64(small),
            None => is_probable_prime_big(n.magnitude(), policy),
        },
    }
}

/// Full test on a big odd candidate, skipping the machine-word shortcut. Kept
/// crate-visible so tests can drive it on small inputs.
pub(crate) fn is_probable_prime_big(n: &BigUint, policy: &PrimalityPolicy) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for &p in small_primes() {
        if n == &BigUint::from(p) {
            return true;
        }
        if (n % p).is_zero() {
            return false;
        }
    }
    if !strong_probable_prime(n, &BigUint::from(2u32)) {
        return false;
    }
    if policy.use_lucas_stage && !strong_lucas_probable_prime(n) {
        return false;
    }
    let extra = policy.miller_rabin_rounds.saturating_sub(1);
    if extra == 0 {
        return true;
    }
    let low = n.iter_u64_digits().next().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(policy.rng_seed ^ low);
    let lo = BigUint::from(2u32);
    let hi = n - 1u32;
    (0..extra).all(|_| {
        let a = rng.gen_biguint_range(&lo, &hi);
        strong_probable_prime(n, &a)
    })
}

fn strong_probable_prime(n: &BigUint, a: &BigUint) -> bool {
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = a.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol `(a / n)` for odd `n`.
fn jacobi(a: &BigInt, n: &BigUint) -> i8 {
    let mut a = a.mod_floor(&BigInt::from(n.clone())).magnitude().clone();
    let mut n = n.clone();
    let mut result = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n_mod_8 = (&n % 8u32).to_u32().unwrap_or(0);
        if tz % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
            result = -result;
        }
        if (&a % 4u32).to_u32() == Some(3) && n_mod_8 % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// Strong Lucas probable prime test with Selfridge's method A parameters
/// (`P = 1`, `Q = (1 - D)/4`). `n` odd and greater than the small-prime table.
pub(crate) fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    let root = n.sqrt();
    if &(&root * &root) == n {
        return false;
    }
    let n_int = BigInt::from(n.clone());
    let mut d: i64 = 5;
    loop {
        match jacobi(&BigInt::from(d), n) {
            -1 => break,
            0 if BigInt::from(d.unsigned_abs()) != n_int => {
                return false;
            }
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let q = (1 - d) / 4;
    let to_mod = |v: i64| -> BigUint { BigInt::from(v).mod_floor(&n_int).magnitude().clone() };
    let d_mod = to_mod(d);
    let q_mod = to_mod(q);
    let half = |x: BigUint| -> BigUint {
        let x = x % n;
        if x.is_odd() {
            (x + n) >> 1
        } else {
            x >> 1
        }
    };
    let sub_mod = |a: &BigUint, b: &BigUint| -> BigUint {
        let b = b % n;
        if *a >= b {
            a - &b
        } else {
            a + n - &b
        }
    };

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let k = &n_plus_1 >> s;

    // U_1 = 1, V_1 = P = 1, Q^1 = Q
    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q_mod.clone();
    for bit in (0..k.bits() - 1).rev() {
        u = &u * &v % n;
        v = sub_mod(&(&v * &v % n), &(&qk << 1u32));
        qk = &qk * &qk % n;
        if k.bit(bit) {
            let u_next = half(&u + &v);
            let v_next = half(&d_mod * &u + &v);
            u = u_next;
            v = v_next;
            qk = &qk * &q_mod % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = sub_mod(&(&v * &v % n), &(&qk << 1u32));
        if v.is_zero() {
            return true;
        }
        qk = &qk * &qk % n;
    }
    false
}
