//! Exact 64-bit number theory: primality, factorization, divisor counts
//! and a segmented prime sieve.
//!
//! Everything here is a pure function of its arguments.

mod factor;
mod primality;
mod sieve;

use thiserror::Error;

pub use factor::{big_omega, factorize, tau, two_adic_valuation, Factorization};
pub use primality::is_prime;
pub use sieve::{
    primes_in_range, primes_upto, SegmentedSieve, DEFAULT_SEGMENT_BYTES, MAX_SEGMENT_BYTES,
};

pub(crate) use primality::{mul_mod, pow_mod};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("argument must be a positive integer, got 0")]
    Zero,
    #[error("empty range: lo = {lo} exceeds hi = {hi}")]
    EmptyRange { lo: u64, hi: u64 },
    #[error("segment size {0} bytes outside 1..=64 MiB")]
    SegmentSize(usize),
}

/// Modular inverse of `a` modulo a prime `p`, for `a` not divisible by `p`.
pub fn inv_mod_prime(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

/// A square root of `a` modulo an odd prime `p` (Tonelli–Shanks), or
/// `None` when `a` is a non-residue.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = (2..p)
        .find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a non-residue");
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}
