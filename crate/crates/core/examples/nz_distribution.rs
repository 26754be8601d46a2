//! Prime counts in the window X <= 4 m_c / z over a cohort of equal-size
//! sets, against the expected 4h / (z ln 10).
//!
//!     cargo run --release --example nz_distribution -- 40

use quadprime::density::{interval_histogram, nz_stats};
use quadprime::generator::{algorithm1, lift_to_digits, ParitySel};
use quadprime::primality::PrimalityPolicy;

fn main() -> Result<(), quadprime::error::Error> {
    let digits: u64 = std::env::args().nth(1).map_or(40, |s| s.parse().expect("digits"));
    let policy = PrimalityPolicy::default();
    let pairs = algorithm1(31, 60, ParitySel::Odd)?.pairs.iter().map(|p| lift_to_digits(p, digits)).collect::<Result<Vec<_>, _>>()?;
    for z in [1.0, 2.0, 4.0] {
        let s = nz_stats(&pairs, z, None, &policy)?;
        println!(
            "z = {z}: X <= {}, mean {:.2} (expected {:.2}), mode {}, with a prime {:.0}%",
            s.bound,
            s.mean,
            s.expected,
            s.mode,
            100.0 * s.fraction_with_prime
        );
        println!("  distribution %: {:?}", s.distribution);
    }
    let width = (digits / 5).max(1);
    let mut totals = vec![0u64; 10];
    for p in &pairs {
        for (t, n) in totals.iter_mut().zip(interval_histogram(p, width, 10, &policy)?) {
            *t += n;
        }
    }
    println!("primes per index bucket of width {width}: {totals:?}");
    Ok(())
}
