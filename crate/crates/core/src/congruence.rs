//! Residue classes of `c` that keep small primes out of `E_c`.
//!
//! `c mod p` in the nonresidue set means `p` divides no element of `E_c`;
//! in the residue set it means `p` divides some. Families of admissible `c`
//! modulo `2 p_F` are built one prime at a time by a CRT step whose Bezout
//! coefficient and residue differences are computed once per prime.

use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::arith::{inv_mod_u64, mod_u64, ResidueClass};
use crate::error::{domain, invalid, Result};
use crate::primality::{is_prime_u64, primes_up_to};

/// Parity of `c`. Even `c` walks odd `X` and vice versa.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(c: &BigInt) -> Self {
        if c.is_even() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// `c mod 2`.
    pub fn bit(self) -> u64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// `rq`: residues `b` with `b ≡ -x^2 (mod p)` for some `x`, zero included.
/// `nrq`: the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueSets {
    pub p: u64,
    pub rq: Vec<u64>,
    pub nrq: Vec<u64>,
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime_u64(p) {
        return domain(format!("{p} is not an odd prime"));
    }
    Ok(())
}

pub fn residue_sets(p: u64) -> Result<ResidueSets> {
    require_odd_prime(p)?;
    let mut in_rq = vec![false; p as usize];
    for x in 0..=(p - 1) / 2 {
        let sq = (x as u128 * x as u128 % p as u128) as u64;
        in_rq[((p - sq) % p) as usize] = true;
    }
    let (rq, nrq): (Vec<u64>, Vec<u64>) = (0..p).partition(|&b| in_rq[b as usize]);
    Ok(ResidueSets { p, rq, nrq })
}

/// One CRT step: combine a class modulo `2 p_F` with a class modulo a new odd
/// prime `p`. With `p u - 2 p_F v = 1`, the solution is `2 p_F y + a` where
/// `y = v (a - b) mod p`.
#[derive(Clone, Debug)]
pub struct StepSolver {
    modulus: BigInt,
    p: u64,
    v: u64,
}

impl StepSolver {
    pub fn new(modulus: &BigInt, p: u64) -> Result<Self> {
        require_odd_prime(p)?;
        let m_mod_p = mod_u64(modulus, p);
        let Some(inv) = inv_mod_u64(m_mod_p, p) else {
            return domain(format!("{p} divides the modulus {modulus}"));
        };
        Ok(Self { modulus: modulus.clone(), p, v: (p - inv) % p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Modulus after the step.
    pub fn combined_modulus(&self) -> BigInt {
        &self.modulus * self.p
    }

    fn y(&self, a_mod_p: u64, b: u64) -> u64 {
        let d = (a_mod_p + self.p - b % self.p) % self.p;
        (self.v as u128 * d as u128 % self.p as u128) as u64
    }

    /// `c mod 2 p_F p` with `c ≡ a (mod 2 p_F)` and `c ≡ b (mod p)`.
    pub fn solve(&self, a: &BigInt, b: u64) -> BigInt {
        let y = self.y(mod_u64(a, self.p), b);
        &self.modulus * y + a
    }

    /// All solutions for one `a` and several `b`: the first is solved
    /// directly, the rest shift `y` by the residue differences.
    pub fn solve_batch(&self, a: &BigInt, bs: &[u64]) -> Vec<BigInt> {
        let Some(&b0) = bs.first() else {
            return Vec::new();
        };
        let y0 = self.y(mod_u64(a, self.p), b0);
        let shifts = DiffTable::new(self.v, self.p, bs);
        shifts.ys(y0).map(|y| &self.modulus * y + a).collect()
    }
}

/// `v (b0 - b_j) mod p` for each `b_j`; independent of `a`.
#[derive(Clone, Debug)]
struct DiffTable {
    p: u64,
    shifts: Vec<u64>,
}

impl DiffTable {
    fn new(v: u64, p: u64, bs: &[u64]) -> Self {
        let b0 = bs.first().copied().unwrap_or(0) % p;
        let shifts = bs.iter().map(|&b| (v as u128 * ((b0 + p - b % p) % p) as u128 % p as u128) as u64).collect();
        Self { p, shifts }
    }

    fn ys(&self, y0: u64) -> impl Iterator<Item = u64> + '_ {
        self.shifts.iter().map(move |&s| (y0 + s) % self.p)
    }
}

fn check_step_inputs(b: &ResidueClass) -> Result<(u64, u64)> {
    let Some(p) = b.modulus().to_u64() else {
        return domain(format!("step modulus {} is too large", b.modulus()));
    };
    Ok((p, b.value().to_u64().expect("value below a u64 modulus")))
}

pub fn solve_step(a: &ResidueClass, b: &ResidueClass) -> Result<ResidueClass> {
    let (p, bv) = check_step_inputs(b)?;
    let solver = StepSolver::new(a.modulus(), p)?;
    ResidueClass::new(solver.solve(a.value(), bv), solver.combined_modulus())
}

/// Element-wise [`solve_step`] over residues `bs` of one prime `p`.
pub fn batch_solve_step(a: &ResidueClass, p: u64, bs: &[u64]) -> Result<Vec<ResidueClass>> {
    let solver = StepSolver::new(a.modulus(), p)?;
    let m = solver.combined_modulus();
    solver.solve_batch(a.value(), bs).into_iter().map(|c| ResidueClass::new(c, m.clone())).collect()
}

/// Admissible classes of `c` modulo `2 p_F` (or `q1#`) of one parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceFamily {
    pub modulus: BigInt,
    pub parity: Parity,
    /// Sorted ascending, each in `[0, modulus)`.
    pub members: Vec<BigInt>,
    /// Expected cardinal.
    pub expected: BigInt,
    /// Primes whose nonresidues were imposed.
    pub excluded: Vec<u64>,
    /// Last prime, restricted to residues (zero included).
    pub admitted: Option<u64>,
}

/// Largest family that is materialized. Bigger ones are walked with
/// [`FamilyPlan`].
pub const MATERIALIZE_LIMIT: u64 = 1 << 22;

/// Odd primes `3, 5, ...` below `q1`.
pub fn odd_primes_below(q1: u64) -> Vec<u64> {
    primes_up_to(q1.saturating_sub(1)).odd().to_vec()
}

fn check_consecutive(f: &[u64]) -> Result<()> {
    let expected = primes_up_to(f.last().copied().unwrap_or(0));
    if f != expected.odd() {
        return invalid(format!("excluded primes must be consecutive odd primes from 3, got {f:?}"));
    }
    Ok(())
}

/// The chain of CRT levels behind a family, walkable without materializing.
///
/// Members are produced in chain order: the earlier prime's choice is the
/// outer loop and each prime's residues run in ascending order.
#[derive(Clone, Debug)]
pub struct FamilyPlan {
    parity: Parity,
    excluded: Vec<u64>,
    admitted: Option<u64>,
    levels: Vec<Level>,
    modulus: BigInt,
}

#[derive(Clone, Debug)]
struct Level {
    p: u64,
    modulus_before: u128,
    v: u64,
    choices: Vec<u64>,
    diffs: DiffTable,
}

impl Level {
    fn step(&self, a: u128, out: &mut Vec<u128>) {
        let a_mod_p = (a % self.p as u128) as u64;
        let b0 = self.choices[0];
        let d = (a_mod_p + self.p - b0) % self.p;
        let y0 = (self.v as u128 * d as u128 % self.p as u128) as u64;
        out.extend(self.diffs.ys(y0).map(|y| self.modulus_before * y as u128 + a));
    }
}

impl FamilyPlan {
    /// `C_F`: nonresidues at every prime of `F`.
    pub fn excluding(f: &[u64], parity: Parity) -> Result<Self> {
        check_consecutive(f)?;
        Self::build(f.to_vec(), None, parity)
    }

    /// `C_F` for any set of distinct odd primes, taken in ascending order.
    pub fn excluding_any(f: &[u64], parity: Parity) -> Result<Self> {
        let mut sorted = f.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != f.len() {
            return invalid(format!("repeated prime in {f:?}"));
        }
        for &p in &sorted {
            require_odd_prime(p)?;
        }
        Self::build(sorted, None, parity)
    }

    /// `C~_{q1}`: nonresidues below `q1`, residues (zero included) at `q1`.
    pub fn min_divisor(q1: u64, parity: Parity) -> Result<Self> {
        require_odd_prime(q1)?;
        Self::build(odd_primes_below(q1), Some(q1), parity)
    }

    fn build(excluded: Vec<u64>, admitted: Option<u64>, parity: Parity) -> Result<Self> {
        let mut modulus = BigInt::from(2u32);
        let mut levels = Vec::with_capacity(excluded.len() + 1);
        let primes = excluded.iter().map(|&p| (p, false)).chain(admitted.map(|q| (q, true)));
        for (p, admit) in primes {
            let solver = StepSolver::new(&modulus, p)?;
            let sets = residue_sets(p)?;
            let choices = if admit { sets.rq } else { sets.nrq };
            let Some(modulus_before) = modulus.to_u128().filter(|m| m.checked_mul(p as u128).is_some()) else {
                return invalid(format!("family modulus exceeds 128 bits at prime {p}"));
            };
            levels.push(Level { p, modulus_before, v: solver.v, diffs: DiffTable::new(solver.v, p, &choices), choices });
            modulus *= p;
        }
        Ok(Self { parity, excluded, admitted, levels, modulus })
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn cardinal(&self) -> BigInt {
        self.levels.iter().fold(BigInt::one(), |acc, l| acc * l.choices.len())
    }

    /// Cardinal from the closed form `prod (p-1)/2`, times `(q1+1)/2`.
    pub fn expected_cardinal(&self) -> BigInt {
        let base = self.excluded.iter().fold(BigInt::one(), |acc, &p| acc * ((p - 1) / 2));
        match self.admitted {
            Some(q) => base * q.div_ceil(2),
            None => base,
        }
    }

    fn walk_from(&self, depth: usize, a: u128, f: &mut impl FnMut(u128)) {
        if depth == self.levels.len() {
            f(a);
            return;
        }
        let mut next = Vec::with_capacity(self.levels[depth].choices.len());
        self.levels[depth].step(a, &mut next);
        for c in next {
            self.walk_from(depth + 1, c, f);
        }
    }

    /// Visit every member in chain order.
    pub fn for_each(&self, mut f: impl FnMut(u128)) {
        self.walk_from(0, self.parity.bit() as u128, &mut f);
    }

    /// Partial chains after `depth` levels, in chain order.
    fn prefixes(&self, depth: usize) -> Vec<u128> {
        let mut cur = vec![self.parity.bit() as u128];
        for level in &self.levels[..depth] {
            let mut next = Vec::with_capacity(cur.len() * level.choices.len());
            for a in cur {
                level.step(a, &mut next);
            }
            cur = next;
        }
        cur
    }

    /// The `k` members with the smallest `key`, ascending in `key`, found by
    /// a parallel walk over the whole family. Ties are impossible when `key`
    /// is injective on members.
    pub fn smallest_by_key<K>(&self, k: usize, key: K) -> Vec<u128>
    where
        K: Fn(u128) -> u128 + Sync,
    {
        if k == 0 {
            return Vec::new();
        }
        let mut depth = 0;
        let mut width = 1usize;
        while depth < self.levels.len() && width < 256 {
            width *= self.levels[depth].choices.len();
            depth += 1;
        }
        let heaps: Vec<BinaryHeap<(u128, u128)>> = self
            .prefixes(depth)
            .into_par_iter()
            .map(|start| {
                let mut heap = BinaryHeap::with_capacity((k + 1).min(1 << 12));
                self.walk_from(depth, start, &mut |c| {
                    let kc = key(c);
                    if heap.len() < k {
                        heap.push((kc, c));
                    } else if kc < heap.peek().expect("non-empty").0 {
                        heap.pop();
                        heap.push((kc, c));
                    }
                });
                heap
            })
            .collect();
        let mut all: Vec<(u128, u128)> = heaps.into_iter().flat_map(BinaryHeap::into_vec).collect();
        all.sort_unstable();
        all.truncate(k);
        all.into_iter().map(|(_, c)| c).collect()
    }

    pub fn materialize(&self) -> Result<CongruenceFamily> {
        let cardinal = self.cardinal();
        if cardinal > BigInt::from(MATERIALIZE_LIMIT) {
            return invalid(format!("family has {cardinal} members; walk it with FamilyPlan instead"));
        }
        let mut members = Vec::with_capacity(cardinal.to_usize().unwrap_or(0));
        self.for_each(|c| members.push(BigInt::from(c)));
        members.sort_unstable();
        Ok(CongruenceFamily {
            modulus: self.modulus.clone(),
            parity: self.parity,
            members,
            expected: self.expected_cardinal(),
            excluded: self.excluded.clone(),
            admitted: self.admitted,
        })
    }
}

pub fn build_cf(f: &[u64], parity: Parity) -> Result<CongruenceFamily> {
    FamilyPlan::excluding(f, parity)?.materialize()
}

pub fn build_ctilde(q1: u64, parity: Parity) -> Result<CongruenceFamily> {
    FamilyPlan::min_divisor(q1, parity)?.materialize()
}

/// `c + modulus/2 mod modulus`: the class with the same residues at every odd
/// prime and the other parity.
pub fn link_class(c: &BigInt, modulus: &BigInt) -> BigInt {
    (c + (modulus >> 1u32)).mod_floor(modulus)
}

/// The family of the other parity, obtained without re-solving.
pub fn link_parities(family: &CongruenceFamily) -> CongruenceFamily {
    let mut members: Vec<BigInt> = family.members.iter().map(|c| link_class(c, &family.modulus)).collect();
    members.sort_unstable();
    CongruenceFamily { parity: family.parity.flip(), members, ..family.clone() }
}

/// Index of the first multiple of `q1` after switching the parity of `c`
/// (keeping `c mod q1`): `j'' = ((q1 - 1)/2 - j0) mod q1`. An involution.
pub fn transfer_first_index(j0: u64, q1: u64) -> u64 {
    let half = (q1 - 1) / 2;
    (half + q1 - j0 % q1) % q1
}

/// Membership in the family by direct Legendre checks.
pub fn is_admissible(c: &BigInt, excluded: &[u64], admitted: Option<u64>) -> bool {
    let nonres = excluded.iter().all(|&p| crate::ecset::t_p(p, c) == 0);
    nonres && admitted.is_none_or(|q| crate::ecset::t_p(q, c) >= 1)
}

impl CongruenceFamily {
    pub fn contains(&self, c: &BigInt) -> bool {
        Parity::of(c) == self.parity && is_admissible(c, &self.excluded, self.admitted)
    }
}
