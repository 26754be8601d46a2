pub mod arith;
pub mod cli;
pub mod congruence;
pub mod density;
pub mod divisors;
pub mod ecset;
pub mod error;
pub mod generator;
pub mod primality;
pub(crate) mod serde_bigint;
