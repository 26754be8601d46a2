//! The cofactor progression 4n(5n + 2) + 1 = (X^2 + 1)/5, its divisibility
//! pattern by a further modulus, and its prime counts.
//!
//!     cargo run --release --example cofactor_progressions

use num_bigint::Sign;
use quadprime::divisors::{cofactor_progression, count_cofactor_primes_below, divisor_subprogressions, Eps};
use quadprime::ecset::EcParams;
use quadprime::primality::PrimalityPolicy;

fn main() -> Result<(), quadprime::error::Error> {
    let ec = EcParams::new(1)?;
    let policy = PrimalityPolicy::default();
    for eps in Eps::both() {
        let cp = cofactor_progression(5, &ec, eps)?;
        let (a2, a1, a0) = cp.coefficients();
        println!(
            "eps = {:+}: value(n) = {a2}n^2 {} {}n + {a0}",
            eps.sign(),
            if a1.sign() == Sign::Minus { '-' } else { '+' },
            a1.magnitude()
        );
        for modulus in [13u64, 17, 65] {
            let subs = divisor_subprogressions(&cp, modulus);
            let shown: Vec<String> = subs.iter().map(|s| format!("a={} n={}+{}k", s.a, s.n0, s.step)).collect();
            println!("  {modulus} | value(n) for {}", if shown.is_empty() { "no n".into() } else { shown.join(", ") });
        }
        for x in [10_000u64, 50_000, 100_000, 500_000] {
            println!("  primes with 5n < {x}: {}", count_cofactor_primes_below(&cp, x, &policy));
        }
    }
    Ok(())
}
