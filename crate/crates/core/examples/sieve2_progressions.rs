//! Which indices of X^2 + c each small prime removes, and the classes of X
//! that avoid a set of primes altogether.
//!
//!     cargo run --release --example sieve2_progressions -- 157

use num_bigint::BigInt;
use quadprime::ecset::{coprime_residue_forms, density_exact, index_progressions, EcParams, Sieve2};

fn main() -> Result<(), quadprime::error::Error> {
    let c: u64 = std::env::args().nth(1).map_or(157, |s| s.parse().expect("c"));
    let ec = EcParams::new(c)?;
    println!("c = {c}, X = 2j + {}", ec.r());
    for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
        match index_progressions(p, &ec)? {
            Some(pr) => println!("  {p:>2} divides j = {} + {p}k and j = {} + {p}k", pr.start1, pr.start2),
            None => println!("  {p:>2} divides no element"),
        }
    }

    let sieve = Sieve2::new(&ec, 50);
    let alive: Vec<u64> = sieve.survivors(0, 40).iter().enumerate().filter(|(_, &a)| a).map(|(j, _)| j as u64).collect();
    println!("indices below 40 with no prime factor <= 50: {alive:?}");

    let f: Vec<u64> = [3u64, 5, 7, 11].into_iter().filter(|&p| index_progressions(p, &ec).unwrap().is_some()).collect();
    let forms = coprime_residue_forms(&ec, &f)?;
    println!("F = {f:?}: {} classes of X, density {}", forms.len(), density_exact(&ec, &f)?);
    for form in forms.iter().take(3) {
        let q = &form.form;
        println!("  X = {} (mod {}): {}x^2 + {}x + {}", form.b, BigInt::from(2) * f.iter().product::<u64>(), q.a2, q.a1, q.a0);
    }
    Ok(())
}
