//! Subgroup-class invariants of PSL₂(p) and the number theory around them.
//!
//! * [`arith`]: primality, factorization, divisor counts, segmented sieve.
//! * [`invariants`]: closed formulas for (i, c, s, n) and the class census.
//! * [`oracle`]: brute-force census of PSL₂(p) for p ≤ 19.
//! * [`search`]: prime triples attaining the lower bounds (17, 18, 6, 12).
//! * [`bhc`]: Bateman–Horn constants and estimates for polynomial families.
//! * [`heathbrown`]: primes p ≡ 5 mod 72 with few prime factors around them.

pub mod arith;
pub mod bhc;
pub mod heathbrown;
pub mod invariants;
pub mod oracle;
pub mod search;
