//! Density constants h_c as truncated Euler products, with partial products
//! at each power of ten.
//!
//!     cargo run --release --example shanks_constants -- 4000000

use num_bigint::BigInt;
use quadprime::density::{decade_marks, hc_product_checkpoints};

fn main() {
    let limit: u64 = std::env::args().nth(1).map_or(4_000_000, |s| s.parse().expect("prime limit"));
    for c in [1u32, 2, 3, 5, 7] {
        let marks = decade_marks(limit);
        let (h, partial) = hc_product_checkpoints(&BigInt::from(c), limit, &marks);
        print!("c = {c}: h = {h:.6}   ");
        for (m, v) in partial {
            print!(" [{m}] {v:.5}");
        }
        println!();
    }
}
