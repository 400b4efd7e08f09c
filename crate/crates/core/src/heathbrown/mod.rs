//! Primes p ≡ 5 mod 72 with Ω(p−1) + Ω(p+1) ≤ 11 and each term at most 8,
//! and the resulting worst-case values of (i, c, s, n).
//!
//! For such p, (p+1)/2 is odd and (p−1)/2 is twice an odd number, so
//! k = 0, l = 1 and σ = 0. The divisor counts are largest when the odd
//! parts are products of distinct primes.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{big_omega, primes_in_range};
use crate::invariants::{counts, profile, Counts, InvariantError, InvariantProfile};

pub const MODULUS: u64 = 72;
pub const RESIDUE: u64 = 5;
pub const MAX_OMEGA_SUM: u32 = 11;
pub const MAX_OMEGA_EACH: u32 = 8;
pub const MIN_LIMIT: u64 = 77;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HbError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("limit {0} is below {MIN_LIMIT}")]
    LimitTooSmall(u64),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HbCandidate {
    pub p: u64,
    pub omega_minus: u32,
    pub omega_plus: u32,
    pub qualifies: bool,
    pub profile: Option<InvariantProfile>,
}

impl HbCandidate {
    pub fn counts(&self) -> Option<Counts> {
        self.profile.map(|pr| counts(&pr).expect("profile of a prime"))
    }

    /// `p,omega_minus,omega_plus,i,c,s,n`
    pub fn csv_row(&self) -> String {
        let c = self.counts().map(|c| c.as_array());
        let f = |i: usize| c.map(|c| c[i].to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.p,
            self.omega_minus,
            self.omega_plus,
            f(0),
            f(1),
            f(2),
            f(3)
        )
    }
}

pub const CSV_HEADER: &str = "p,omega_minus,omega_plus,i,c,s,n";

pub fn qualifies(p: u64) -> Result<HbCandidate, HbError> {
    if !crate::arith::is_prime(p) {
        return Err(HbError::NotPrime(p));
    }
    let omega_minus = big_omega(p - 1).expect("p - 1 > 0");
    let omega_plus = big_omega(p + 1).expect("p + 1 > 0");
    let qualifies = p % MODULUS == RESIDUE
        && omega_minus + omega_plus <= MAX_OMEGA_SUM
        && omega_minus <= MAX_OMEGA_EACH
        && omega_plus <= MAX_OMEGA_EACH;
    Ok(HbCandidate {
        p,
        omega_minus,
        omega_plus,
        qualifies,
        profile: if p >= 5 { Some(profile(p)?) } else { None },
    })
}

const BLOCK: u64 = 1 << 20;

/// Every qualifying prime up to `limit`, ascending.
pub fn scan_hb(limit: u64) -> Result<Vec<HbCandidate>, HbError> {
    if limit < MIN_LIMIT {
        return Err(HbError::LimitTooSmall(limit));
    }
    let blocks: Vec<(u64, u64)> = (0..limit.div_ceil(BLOCK))
        .map(|i| (i * BLOCK, ((i + 1) * BLOCK - 1).min(limit)))
        .collect();
    let parts: Vec<Vec<HbCandidate>> = blocks
        .par_iter()
        .map(|&(lo, hi)| {
            primes_in_range(lo, hi)
                .expect("lo <= hi")
                .into_iter()
                .filter(|p| p % MODULUS == RESIDUE)
                .map(|p| qualifies(p).expect("sieved primes are prime"))
                .filter(|c| c.qualifies)
                .collect()
        })
        .collect();
    let out: Vec<HbCandidate> = parts.into_iter().flatten().collect();
    for c in &out {
        let pr = c.profile.expect("qualifying primes are at least 5");
        assert!(
            pr.k == 0 && pr.l == 1 && pr.sigma == 0,
            "p = {} breaks k = 0, l = 1, sigma = 0",
            c.p
        );
    }
    Ok(out)
}

/// The extremal profiles: two and seven distinct odd primes in the odd
/// parts of (p+1)/2 and (p−1)/2, in either order, with α = 1.
pub fn extremal_profiles() -> (InvariantProfile, InvariantProfile) {
    let few_plus = InvariantProfile::hypothetical(1 << 2, 1 << 7, 0, 1, 0, 1)
        .expect("valid extremal profile");
    let many_plus = InvariantProfile::hypothetical(1 << 7, 1 << 2, 0, 1, 0, 1)
        .expect("valid extremal profile");
    (few_plus, many_plus)
}

/// Worst-case (i, c, s, n) over the qualifying primes: i, c and n peak
/// with more divisors on the (p−1)/2 side, s with more on (p+1)/2.
pub fn derive_upper_bounds() -> Counts {
    let (few_plus, many_plus) = extremal_profiles();
    let a = counts(&few_plus).expect("integral");
    let b = counts(&many_plus).expect("integral");
    Counts {
        i: a.i,
        c: a.c,
        s: b.s,
        n: a.n,
    }
}

pub fn within_bounds(c: &Counts, bounds: &Counts) -> bool {
    c.i <= bounds.i && c.c <= bounds.c && c.s <= bounds.s && c.n <= bounds.n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_candidates() {
        let c5 = qualifies(5).unwrap();
        assert!(c5.qualifies);
        assert_eq!((c5.omega_minus, c5.omega_plus), (2, 2));
        let c149 = qualifies(149).unwrap();
        assert!(c149.qualifies);
        assert_eq!((c149.omega_minus, c149.omega_plus), (3, 4));
        assert!(!qualifies(7).unwrap().qualifies);
        assert!(qualifies(3).unwrap().profile.is_none());
        assert_eq!(qualifies(9), Err(HbError::NotPrime(9)));
    }

    #[test]
    fn bounds() {
        assert_eq!(derive_upper_bounds().as_array(), [390, 454, 132, 384]);
    }

    #[test]
    fn scan_to_a_thousand() {
        let v = scan_hb(1000).unwrap();
        assert_eq!(v[0].p, 5);
        assert!(v.windows(2).all(|w| w[0].p < w[1].p));
        assert!(v.iter().all(|c| c.p % 72 == 5 && c.qualifies));
        assert_eq!(scan_hb(76), Err(HbError::LimitTooSmall(76)));
    }

    #[test]
    fn csv() {
        let c = qualifies(149).unwrap();
        let cts = c.counts().unwrap();
        assert_eq!(
            c.csv_row(),
            format!("149,3,4,{},{},{},{}", cts.i, cts.c, cts.s, cts.n)
        );
        assert_eq!(qualifies(3).unwrap().csv_row(), "3,1,2,,,,");
    }
}
