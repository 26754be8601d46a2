//! Integer kernels: Bézout, modular powers, Legendre symbol, modular square
//! roots, Chinese remainder merging, primorials and decimal sizes.
//!
//! Everything number-theoretic is exact. The only floating point value here
//! is the natural-log size `s(N) = m_N * ln(10)` returned by [`decimal_size`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Arbitrary precision signed integer used for `c`, `X`, primorials and
/// elements of `E_c`.
pub type Integer = BigInt;

/// `g = gcd(a, b) >= 0` together with coefficients `a*u + b*v = g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BezoutTriple {
    pub g: BigInt,
    pub u: BigInt,
    pub v: BigInt,
}

/// Extended Euclid.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> Result<BezoutTriple> {
    if a.is_zero() && b.is_zero() {
        return domain("ext_gcd(0, 0) is undefined");
    }
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    Ok(BezoutTriple { g: old_r, u: old_s, v: old_t })
}

/// `base^exp mod m`, in `[0, m)`.
pub fn mod_pow(base: &BigInt, exp: &BigInt, m: &BigInt) -> Result<BigInt> {
    if !m.is_positive() {
        return domain(format!("mod_pow modulus must be >= 1, got {m}"));
    }
    if exp.is_negative() {
        return domain("mod_pow exponent must be >= 0");
    }
    let base = base.mod_floor(m);
    Ok(base.modpow(exp, m))
}

#[inline]
pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` for `m >= 1`, if it exists.
pub fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Nonnegative remainder of a big integer by a machine modulus.
pub fn mod_u64(a: &BigInt, m: u64) -> u64 {
    a.mod_floor(&BigInt::from(m)).to_u64().expect("remainder fits in u64")
}

/// `(-a) mod m` in `[0, m)`.
pub fn neg_mod_u64(a: &BigInt, m: u64) -> u64 {
    let r = mod_u64(a, m);
    if r == 0 {
        0
    } else {
        m - r
    }
}

fn check_odd_prime_modulus(p: u64) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) {
        return domain(format!("expected an odd prime modulus, got {p}"));
    }
    Ok(())
}

/// Legendre symbol on machine words via Euler's criterion. `p` must be an odd
/// prime; `a` may be any residue.
pub fn legendre_u64(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod_u64(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Legendre symbol `(a / p)` for an odd prime `p`.
pub fn legendre(a: &BigInt, p: u64) -> Result<i8> {
    check_odd_prime_modulus(p)?;
    Ok(legendre_u64(mod_u64(a, p), p))
}

/// Tonelli–Shanks on machine words. Returns the root in `[0, (p-1)/2]`.
pub fn sqrt_mod_u64(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre_u64(a, p) != 1 {
        return None;
    }
    let root = if p % 4 == 3 {
        pow_mod_u64(a, (p + 1) / 4, p)
    } else {
        let mut q = p - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let z = (2..p).find(|&z| legendre_u64(z, p) == -1).expect("nonresidue exists");
        let mut m = s;
        let mut c = pow_mod_u64(z, q, p);
        let mut t = pow_mod_u64(a, q, p);
        let mut r = pow_mod_u64(a, q.div_ceil(2), p);
        while t != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mul_mod_u64(t2, t2, p);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = mul_mod_u64(b, b, p);
            }
            m = i;
            c = mul_mod_u64(b, b, p);
            t = mul_mod_u64(t, c, p);
            r = mul_mod_u64(r, b, p);
        }
        r
    };
    Some(root.min(p - root))
}

/// Canonical square root of `a` modulo an odd prime `p`: the root `s` in
/// `[0, (p-1)/2]`, the other one being `p - s`. `None` when `a` is a
/// nonresidue.
pub fn sqrt_mod(a: &BigInt, p: u64) -> Result<Option<u64>> {
    check_odd_prime_modulus(p)?;
    Ok(sqrt_mod_u64(mod_u64(a, p), p))
}

/// A congruence class `value mod modulus` with `0 <= value < modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    value: BigInt,
    modulus: BigInt,
}

impl ResidueClass {
    pub fn new(value: impl Into<BigInt>, modulus: impl Into<BigInt>) -> Result<Self> {
        let modulus = modulus.into();
        if !modulus.is_positive() {
            return domain(format!("residue class modulus must be >= 1, got {modulus}"));
        }
        let value = value.into().mod_floor(&modulus);
        Ok(Self { value, modulus })
    }

    pub fn value(&self) -> &BigInt {
        &self.value
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        n.mod_floor(&self.modulus) == self.value
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// Merge two classes with coprime moduli into one class modulo their product.
pub fn crt_merge(x: &ResidueClass, y: &ResidueClass) -> Result<ResidueClass> {
    let bz = ext_gcd(&x.modulus, &y.modulus)?;
    if !bz.g.is_one() {
        return domain(format!("crt_merge needs coprime moduli, got {} and {}", x.modulus, y.modulus));
    }
    // x.m * u ≡ 1 (mod y.m), so value = x.v + x.m * u * (y.v - x.v)
    let modulus = &x.modulus * &y.modulus;
    let delta = (&y.value - &x.value) * &bz.u;
    let value = &x.value + &x.modulus * delta;
    ResidueClass::new(value, modulus)
}

/// `n# = product of primes <= n` (1 for `n < 2`).
pub fn primorial(n: u64) -> BigInt {
    let primes = crate::primality::primes_up_to(n);
    product_tree(primes.as_slice())
}

fn product_tree(values: &[u64]) -> BigInt {
    match values.len() {
        0 => BigInt::one(),
        1..=16 => values.iter().fold(BigInt::one(), |acc, &p| acc * p),
        len => {
            let (lo, hi) = values.split_at(len / 2);
            product_tree(lo) * product_tree(hi)
        }
    }
}

/// Decimal digit count `m_N` and natural-log size `s(N) = m_N ln 10`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecimalSize {
    pub digits: u64,
    pub log_size: f64,
}

impl DecimalSize {
    fn from_digits(digits: u64) -> Self {
        Self { digits, log_size: digits as f64 * std::f64::consts::LN_10 }
    }
}

/// Exact `m_N = 1 + floor(log10 N)` and `s(N)`.
pub fn decimal_size(n: &BigInt) -> Result<DecimalSize> {
    if !n.is_positive() {
        return domain(format!("decimal_size needs N >= 1, got {n}"));
    }
    if let Some(small) = n.to_u64() {
        return Ok(DecimalSize::from_digits(u64::from(small.ilog10()) + 1));
    }
    // Estimate floor(log10 N) from the bit length, then settle it exactly.
    let bits = n.bits();
    let mut k = ((bits - 1) as f64 * std::f64::consts::LOG10_2).floor() as u32;
    let ten = BigInt::from(10u32);
    let mut lower = ten.pow(k);
    while &lower > n {
        k -= 1;
        lower = ten.pow(k);
    }
    loop {
        let upper = &lower * 10u32;
        if &upper > n {
            break;
        }
        lower = upper;
        k += 1;
    }
    Ok(DecimalSize::from_digits(u64::from(k) + 1))
}
