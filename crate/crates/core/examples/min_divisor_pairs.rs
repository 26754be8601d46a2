//! Values of c whose set X^2 + c has no prime factor below q1, found by the
//! exhaustive family walk and by the seeded nonresidue chain.
//!
//!     cargo run --release --example min_divisor_pairs

use quadprime::congruence::Parity;
use quadprime::generator::{algorithm1, algorithm2, lift_to_digits, validate_pair, ParitySel, Seed};

fn main() -> Result<(), quadprime::error::Error> {
    let out = algorithm1(7, 8, ParitySel::Odd)?;
    println!("q1 = 7, smallest odd c (family of {}):", out.family_size);
    for p in &out.pairs {
        validate_pair(p)?;
        let first = p.ec().eval_element(p.j0);
        println!("  c = {:>3}  j0 = {}  first multiple of 7: {first}", p.c, p.j0);
    }

    let seed = Seed::new(1)?;
    println!("q1 = 31, seeded chain, lifted to 40 digits:");
    for p in algorithm2(31, 4, &seed, Parity::Odd)? {
        let lifted = lift_to_digits(&p, 40)?;
        validate_pair(&lifted)?;
        println!("  c = {}  j0 = {}{}", lifted.c, lifted.j0, if p.q1_divides_c() { "  (31 | c)" } else { "" });
    }
    Ok(())
}
