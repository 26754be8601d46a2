//! Count primes X^2 + c up to a bound and compare the empirical density with
//! the Euler product.
//!
//!     cargo run --release --example density_of_ec -- 1 1000000

use num_bigint::BigInt;
use quadprime::density::{count_primes_ec, densities, hc_product};
use quadprime::ecset::EcParams;
use quadprime::primality::PrimalityPolicy;

fn main() -> Result<(), quadprime::error::Error> {
    let mut args = std::env::args().skip(1);
    let c: BigInt = args.next().map_or(BigInt::from(1), |s| s.parse().expect("c"));
    let x_max: u64 = args.next().map_or(1_000_000, |s| s.parse().expect("X_max"));
    let ec = EcParams::new(c.clone())?;
    let report = count_primes_ec(&ec, x_max, x_max / 5, &PrimalityPolicy::default());
    let h = hc_product(&c, 1_000_000);
    println!("c = {c}: {} primes for X <= {x_max}, h_c = {h:.5}", report.prime_count);
    for cp in &report.checkpoints {
        // heuristic: 2h * sum of 1/ln(X^2) over X of the right parity
        let expected: f64 = (ec.r() as u64..=cp.x).step_by(2).skip(1).map(|x| 1.0 / ((x * x) as f64).ln()).sum::<f64>();
        let (d_x, d_el, _) = densities(&ec, cp.x, cp.count);
        println!(
            "  X <= {:>8}: {:>7} primes, per X {d_x:.5}, per element {d_el:.5}, observed/expected = {:.4}",
            cp.x,
            cp.count,
            cp.count as f64 / (2.0 * h * expected)
        );
    }
    Ok(())
}
