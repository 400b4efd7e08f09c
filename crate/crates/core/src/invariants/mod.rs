//! Closed-form subgroup-class counts for PSL₂(p), p ≥ 5.
//!
//! Four invariants are computed from the divisor structure of (p ± 1)/2:
//!
//! * `i` isomorphism types of non-identity proper subgroups,
//! * `c` conjugacy classes of such subgroups,
//! * `s` classes of self-normalising subgroups,
//! * `n` classes of non-self-normalising subgroups, so `c = s + n`.
//!
//! With δ = τ((p+1)/2), ε = τ((p−1)/2), 2^k ‖ (p+1)/2, 2^l ‖ (p−1)/2,
//! σ = [p ≡ ±1 mod 8] and α = [p ≡ ±1 mod 5]:
//!
//! ```text
//! i = 2δ + 3ε − 3 + σ + α
//! c = (2 + k/(k+1))δ + (3 + l/(l+1))ε − 4 + 3σ + 2α
//! s = δ/(k+1) + ε/(l+1) + 2(σ + α)
//! n = (2 + (k−1)/(k+1))δ + (3 + (l−1)/(l+1))ε − 4 + σ
//! ```
//!
//! All fractions are evaluated exactly and must cancel to integers.

mod census;
mod golden;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{factorize, is_prime};

pub use census::{census, CensusDiff, ClassCensus, ClassEntry, SubgroupKind, SubgroupType};
pub use golden::{
    golden_table, verify_golden, verify_golden_with, CellCheck, CellSource, CellStatus,
    GoldenError, GoldenReport, GoldenRow, GOLDEN_COLUMNS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the closed formulas need p >= 5, got {0}")]
    TooSmall(u64),
    #[error("{what} evaluated to the non-integer {value}")]
    NonIntegral { what: &'static str, value: String },
    #[error("n = {n} but c - s = {c} - {s}")]
    CountMismatch { c: i64, s: i64, n: i64 },
    #[error("inconsistent profile: {0}")]
    InvalidProfile(String),
}

/// The parameters (p, δ, ε, k, l, σ, α) that drive every count.
///
/// `p = 0` marks a hypothetical profile built from parameters alone,
/// as used for worst-case evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct InvariantProfile {
    pub p: u64,
    pub delta: u64,
    pub epsilon: u64,
    pub k: u32,
    pub l: u32,
    pub sigma: u8,
    pub alpha: u8,
}

/// The four invariants (i, c, s, n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Counts {
    pub i: u64,
    pub c: u64,
    pub s: u64,
    pub n: u64,
}

impl Counts {
    pub fn as_array(&self) -> [u64; 4] {
        [self.i, self.c, self.s, self.n]
    }
}

/// Computes the profile of a prime `p >= 5`.
pub fn profile(p: u64) -> Result<InvariantProfile, InvariantError> {
    if p < 5 {
        return Err(if is_prime(p) {
            InvariantError::TooSmall(p)
        } else {
            InvariantError::NotPrime(p)
        });
    }
    if !is_prime(p) {
        return Err(InvariantError::NotPrime(p));
    }
    let plus = factorize(p / 2 + 1).expect("(p+1)/2 > 0");
    let minus = factorize(p / 2).expect("(p-1)/2 > 0");
    let r8 = p % 8;
    let r5 = p % 5;
    Ok(InvariantProfile {
        p,
        delta: plus.tau(),
        epsilon: minus.tau(),
        k: plus.exponent_of(2),
        l: minus.exponent_of(2),
        sigma: u8::from(r8 == 1 || r8 == 7),
        alpha: u8::from(r5 == 1 || r5 == 4),
    })
}

impl InvariantProfile {
    /// A profile not tied to a particular prime. Checks the structural
    /// constraints every real profile satisfies.
    pub fn hypothetical(
        delta: u64,
        epsilon: u64,
        k: u32,
        l: u32,
        sigma: u8,
        alpha: u8,
    ) -> Result<Self, InvariantError> {
        let prof = InvariantProfile {
            p: 0,
            delta,
            epsilon,
            k,
            l,
            sigma,
            alpha,
        };
        prof.validate()?;
        Ok(prof)
    }

    pub fn is_hypothetical(&self) -> bool {
        self.p == 0
    }

    /// Structural checks: one of k, l is zero, σ matches the larger of the
    /// two valuations, and each 2-power divides its divisor count.
    pub fn validate(&self) -> Result<(), InvariantError> {
        let bad = |msg: String| Err(InvariantError::InvalidProfile(msg));
        if self.k != 0 && self.l != 0 {
            return bad(format!("k = {} and l = {} are both nonzero", self.k, self.l));
        }
        if self.sigma > 1 || self.alpha > 1 {
            return bad("sigma and alpha must be 0 or 1".into());
        }
        // p ≡ ±1 mod 8 exactly when 4 divides one of (p ± 1)/2
        if (self.sigma == 1) != (self.k.max(self.l) >= 2) {
            return bad(format!(
                "sigma = {} contradicts k = {}, l = {}",
                self.sigma, self.k, self.l
            ));
        }
        if self.delta == 0 || self.epsilon == 0 {
            return bad("divisor counts must be positive".into());
        }
        if !self.delta.is_multiple_of(u64::from(self.k) + 1) || !self.epsilon.is_multiple_of(u64::from(self.l) + 1)
        {
            return bad("k+1 must divide delta and l+1 must divide epsilon".into());
        }
        Ok(())
    }

    fn parts(&self) -> (Ratio<i64>, Ratio<i64>, i64, i64, i64, i64) {
        (
            Ratio::from_integer(self.delta as i64),
            Ratio::from_integer(self.epsilon as i64),
            i64::from(self.k),
            i64::from(self.l),
            i64::from(self.sigma),
            i64::from(self.alpha),
        )
    }
}

fn integral(what: &'static str, value: Ratio<i64>) -> Result<i64, InvariantError> {
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(InvariantError::NonIntegral {
            what,
            value: value.to_string(),
        })
    }
}

fn non_negative(what: &'static str, v: i64) -> Result<u64, InvariantError> {
    u64::try_from(v).map_err(|_| InvariantError::NonIntegral {
        what,
        value: v.to_string(),
    })
}

/// i(G) = 2δ + 3ε − 3 + σ + α.
pub fn i_count(prof: &InvariantProfile) -> Result<u64, InvariantError> {
    let (d, e, _, _, sigma, alpha) = prof.parts();
    let v = d * 2 + e * 3 + Ratio::from_integer(-3 + sigma + alpha);
    non_negative("i", integral("i", v)?)
}

/// c(G) = (2 + k/(k+1))δ + (3 + l/(l+1))ε − 4 + 3σ + 2α.
pub fn c_count(prof: &InvariantProfile) -> Result<u64, InvariantError> {
    let (d, e, k, l, sigma, alpha) = prof.parts();
    let v = (Ratio::from_integer(2) + Ratio::new(k, k + 1)) * d
        + (Ratio::from_integer(3) + Ratio::new(l, l + 1)) * e
        + Ratio::from_integer(-4 + 3 * sigma + 2 * alpha);
    non_negative("c", integral("c", v)?)
}

/// s(G) = δ/(k+1) + ε/(l+1) + 2(σ + α).
pub fn s_count(prof: &InvariantProfile) -> Result<u64, InvariantError> {
    let (d, e, k, l, sigma, alpha) = prof.parts();
    let v = d / (k + 1) + e / (l + 1) + Ratio::from_integer(2 * (sigma + alpha));
    non_negative("s", integral("s", v)?)
}

/// n(G) = (2 + (k−1)/(k+1))δ + (3 + (l−1)/(l+1))ε − 4 + σ, checked
/// against c − s.
pub fn n_count(prof: &InvariantProfile) -> Result<u64, InvariantError> {
    let (d, e, k, l, sigma, _) = prof.parts();
    let v = (Ratio::from_integer(2) + Ratio::new(k - 1, k + 1)) * d
        + (Ratio::from_integer(3) + Ratio::new(l - 1, l + 1)) * e
        + Ratio::from_integer(-4 + sigma);
    let n = integral("n", v)?;
    let c = c_count(prof)? as i64;
    let s = s_count(prof)? as i64;
    if c - s != n {
        return Err(InvariantError::CountMismatch { c, s, n });
    }
    non_negative("n", n)
}

/// All four counts for a profile.
pub fn counts(prof: &InvariantProfile) -> Result<Counts, InvariantError> {
    Ok(Counts {
        i: i_count(prof)?,
        c: c_count(prof)?,
        s: s_count(prof)?,
        n: n_count(prof)?,
    })
}

/// The lower bounds (17, 18, 6, 12) attained in the generic prime-triple cases.
pub const LOWER_BOUNDS: Counts = Counts {
    i: 17,
    c: 18,
    s: 6,
    n: 12,
};
