//! Find a prime of a prescribed decimal size: take c with no prime factor of
//! X^2 + c below q1, lift it to the target size and scan a short window.
//!
//!     cargo run --release --example fixed_size_prime -- 1471 616

use std::time::Instant;

use quadprime::congruence::Parity;
use quadprime::density::hunt_primes;
use quadprime::generator::{algorithm2, lift_to_digits, Seed};
use quadprime::primality::PrimalityPolicy;

fn main() -> Result<(), quadprime::error::Error> {
    let mut args = std::env::args().skip(1);
    let q1: u64 = args.next().map_or(1471, |s| s.parse().expect("q1"));
    let digits: u64 = args.next().map_or(616, |s| s.parse().expect("digits"));
    let policy = PrimalityPolicy::default();
    let start = Instant::now();
    for (i, pair) in algorithm2(q1, 20, &Seed::new(1)?, Parity::Odd)?.into_iter().enumerate() {
        let lifted = lift_to_digits(&pair, digits)?;
        if let Some(hit) = hunt_primes(&lifted, 4.0, 1, &policy)?.first() {
            println!("pair {}: X = {}, {} digits, {:.1}s", i + 1, hit.x, digits, start.elapsed().as_secs_f64());
            println!("{}", hit.value);
            return Ok(());
        }
        println!("pair {}: no prime in the window", i + 1);
    }
    Ok(())
}
