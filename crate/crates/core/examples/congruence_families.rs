//! Residue classes of c avoiding small prime divisors, built prime by prime
//! with the stepwise CRT solver, and the even/odd link between them.
//!
//!     cargo run --release --example congruence_families

use quadprime::congruence::{build_cf, build_ctilde, link_parities, residue_sets, Parity};

fn main() -> Result<(), quadprime::error::Error> {
    for p in [3u64, 5, 7] {
        let s = residue_sets(p)?;
        println!("mod {p}: -x^2 hits {:?}, misses {:?}", s.rq, s.nrq);
    }
    for f in [&[3u64][..], &[3, 5], &[3, 5, 7]] {
        let odd = build_cf(f, Parity::Odd)?;
        let even = build_cf(f, Parity::Even)?;
        assert_eq!(link_parities(&even).members, odd.members);
        println!("F = {f:?} mod {}: odd {:?}, even {:?}", odd.modulus, odd.members, even.members);
    }
    let ct = build_ctilde(11, Parity::Odd)?;
    println!("smallest prime divisor 11, odd c mod {}: {} classes, first {:?}", ct.modulus, ct.members.len(), &ct.members[..6]);
    Ok(())
}
