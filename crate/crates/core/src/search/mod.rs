//! Prime triples (p, s, r) with (p+1)/2 and (p−1)/2 built from s and r.
//!
//! Each case is a family of three linear forms in t:
//!
//! | case | p      | s    | r     | (p+1)/2 | (p−1)/2 |
//! |------|--------|------|-------|---------|---------|
//! | a    | 12t+5  | 2t+1 | 3t+1  | 3s      | 2r      |
//! | b    | 12t+7  | 3t+2 | 2t+1  | 2s      | 3r      |
//! | c    | 12t+11 | t+1  | 6t+5  | 6s      | r       |
//! | d    | 12t+1  | 6t+1 | t     | s       | 6r      |
//!
//! so |G| = p(p²−1)/2 = 12psr whenever all three are prime.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{inv_mod_prime, is_prime, primes_upto};
use crate::bhc::{Polynomial, PolynomialFamily};
use crate::invariants::{counts, profile, InvariantProfile, LOWER_BOUNDS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("unknown case {0:?} (expected a, b, c or d)")]
    UnknownCase(String),
    #[error("t_max must be at least 1")]
    EmptyRange,
    #[error("t_max = {0} makes 12t+11 overflow 64 bits")]
    Overflow(u64),
    #[error("block size must be positive")]
    BlockSize,
    #[error("could not build a thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    A,
    B,
    C,
    D,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::A, CaseId::B, CaseId::C, CaseId::D];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseId::A => "a",
            CaseId::B => "b",
            CaseId::C => "c",
            CaseId::D => "d",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(CaseId::A),
            "b" => Ok(CaseId::B),
            "c" => Ok(CaseId::C),
            "d" => Ok(CaseId::D),
            _ => Err(SearchError::UnknownCase(s.to_string())),
        }
    }
}

impl Serialize for CaseId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Which polynomial of the family gives p, s and r.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roles {
    pub p: usize,
    pub s: usize,
    pub r: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseSpec {
    pub case: CaseId,
    pub family: PolynomialFamily,
    pub roles: Roles,
    /// Hits are only recorded for p above this.
    pub p_floor: u64,
    /// (p+1)/2 = plus_mult·s and (p−1)/2 = minus_mult·r.
    pub plus_mult: u64,
    pub minus_mult: u64,
    forms: [(u64, u64); 3],
}

pub const P_FLOOR: u64 = 37;

/// The parameterisation of a case. Panics if the defining identities fail
/// anywhere on t = 0..=1000, which would be a bug in the table above.
pub fn case_spec(case: CaseId) -> CaseSpec {
    // forms are (slope, intercept) in family order
    let (forms, roles, plus_mult, minus_mult) = match case {
        CaseId::A => ([(12, 5), (3, 1), (2, 1)], Roles { p: 0, s: 2, r: 1 }, 3, 2),
        CaseId::B => ([(12, 7), (3, 2), (2, 1)], Roles { p: 0, s: 1, r: 2 }, 2, 3),
        CaseId::C => ([(12, 11), (1, 1), (6, 5)], Roles { p: 0, s: 1, r: 2 }, 6, 1),
        CaseId::D => ([(12, 1), (6, 1), (1, 0)], Roles { p: 0, s: 1, r: 2 }, 1, 6),
    };
    let family = PolynomialFamily::new(
        forms
            .iter()
            .map(|&(a, b)| Polynomial::linear(a as i64, b as i64).expect("nonzero"))
            .collect(),
    )
    .expect("three polynomials");
    let spec = CaseSpec {
        case,
        family,
        roles,
        p_floor: P_FLOOR,
        plus_mult,
        minus_mult,
        forms,
    };
    for t in 0..=1000 {
        let (p, s, r) = spec.values(t);
        assert!(
            p + 1 == 2 * plus_mult * s && p - 1 == 2 * minus_mult * r,
            "case {case} identities fail at t = {t}"
        );
    }
    spec
}

impl CaseSpec {
    /// (p, s, r) at t. Overflows only past the range `scan` accepts.
    pub fn values(&self, t: u64) -> (u64, u64, u64) {
        let v = |i: usize| self.forms[i].0 * t + self.forms[i].1;
        (v(self.roles.p), v(self.roles.s), v(self.roles.r))
    }

    pub fn forms(&self) -> [(u64, u64); 3] {
        self.forms
    }
}

/// A t at which p, s and r are all prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleHit {
    pub t: u64,
    pub p: u64,
    pub s: u64,
    pub r: u64,
    pub profile: InvariantProfile,
    /// Whether (i, c, s, n) equal (17, 18, 6, 12), componentwise.
    pub attains: [bool; 4],
}

impl TripleHit {
    pub fn attains_all(&self) -> bool {
        self.attains.iter().all(|&b| b)
    }

    pub fn group_order(&self) -> u128 {
        let p = u128::from(self.p);
        p * (p * p - 1) / 2
    }
}

impl Serialize for TripleHit {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("TripleHit", 5)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("attains", &self.attains)?;
        st.end()
    }
}

/// Compares the invariants of `p` with the lower bounds (17, 18, 6, 12).
pub fn attainment(p: u64) -> [bool; 4] {
    let cts = counts(&profile(p).expect("p is a prime >= 5")).expect("valid profile");
    let got = cts.as_array();
    let want = LOWER_BOUNDS.as_array();
    [0, 1, 2, 3].map(|i| got[i] == want[i])
}

/// Attainment flags for a hit. In cases (a) and (b) with s, r ≥ 7 the
/// group order 12psr is divisible by neither 8 nor 5, so σ = α = 0.
pub fn verify_attainment(case: CaseId, hit: &TripleHit) -> [bool; 4] {
    if matches!(case, CaseId::A | CaseId::B) && hit.s >= 7 && hit.r >= 7 {
        assert!(
            hit.profile.sigma == 0 && hit.profile.alpha == 0,
            "p = {} should have sigma = alpha = 0",
            hit.p
        );
    }
    attainment(hit.p)
}

fn make_hit(spec: &CaseSpec, t: u64) -> TripleHit {
    let (p, s, r) = spec.values(t);
    let prof = profile(p).expect("p is a prime >= 5");
    let mut hit = TripleHit {
        t,
        p,
        s,
        r,
        profile: prof,
        attains: [false; 4],
    };
    hit.attains = verify_attainment(spec.case, &hit);
    hit
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    /// t values per work unit.
    pub block_size: u64,
    /// Largest number of hits kept; counts stay exact.
    pub hit_cap: usize,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Largest prime used to pre-sieve the forms.
    pub sieve_limit: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            block_size: 1 << 16,
            hit_cap: 10_000,
            threads: None,
            sieve_limit: 4_096,
        }
    }
}

/// Result of scanning t = 1..=t_max.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSummary {
    pub case: CaseId,
    pub t_max: u64,
    /// Number of t with all three values prime, whatever the size of p.
    pub q_count: u64,
    /// Hits with p above the floor, in order of t, at most `hit_cap`.
    pub hits: Vec<TripleHit>,
    /// Number of hits above the floor, including those past the cap.
    pub hit_count: u64,
    /// Hits above the floor with σ = α = 0.
    pub sigma_alpha_zero_count: u64,
    /// Number of above-floor hits attaining all four bounds.
    pub attaining_count: u64,
    /// Triples with p at or below the floor.
    pub small_hits: Vec<(u64, u64, u64, u64)>,
}

impl SearchSummary {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("summary serializes")
    }
}

impl Serialize for SearchSummary {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("SearchSummary", 5)?;
        st.serialize_field("case", &self.case)?;
        st.serialize_field("t_max", &self.t_max)?;
        st.serialize_field("q_count", &self.q_count)?;
        st.serialize_field("sigma_alpha_zero", &self.sigma_alpha_zero_count)?;
        st.serialize_field("first_hits", &self.hits)?;
        st.end()
    }
}

#[derive(Default)]
struct BlockResult {
    q_count: u64,
    hits: Vec<TripleHit>,
    hit_count: u64,
    sigma_alpha_zero: u64,
    attaining: u64,
    small: Vec<(u64, u64, u64, u64)>,
}

/// Sieving data for one (form, prime) pair: t ≡ root mod q makes the form
/// divisible by q.
struct SieveEntry {
    q: u64,
    root: u64,
}

fn sieve_entries(forms: &[(u64, u64); 3], limit: u64) -> Vec<SieveEntry> {
    let mut out = Vec::new();
    for q in primes_upto(limit) {
        for &(a, b) in forms {
            if a % q == 0 {
                // a constant residue; b ≢ 0 for every case, and a form with
                // q | a, b would have no prime values beyond q anyway
                continue;
            }
            let root = (q - b % q) % q * inv_mod_prime(a % q, q) % q;
            out.push(SieveEntry { q, root });
        }
    }
    out
}

fn scan_block(
    spec: &CaseSpec,
    entries: &[SieveEntry],
    direct_below: u64,
    lo: u64,
    hi: u64,
    hit_cap: usize,
) -> BlockResult {
    let mut res = BlockResult::default();
    let forms = spec.forms;
    let record = |t: u64, res: &mut BlockResult| {
        let (p, s, r) = spec.values(t);
        if p <= spec.p_floor {
            res.q_count += 1;
            res.small.push((t, p, s, r));
            return;
        }
        res.q_count += 1;
        res.hit_count += 1;
        let hit = make_hit(spec, t);
        if hit.profile.sigma == 0 && hit.profile.alpha == 0 {
            res.sigma_alpha_zero += 1;
        }
        if hit.attains_all() {
            res.attaining += 1;
        }
        if res.hits.len() < hit_cap {
            res.hits.push(hit);
        }
    };
    let all_prime = |t: u64| forms.iter().all(|&(a, b)| is_prime(a * t + b));

    // Small t: a form may equal one of the sieving primes, so test directly.
    let mut start = lo;
    while start <= hi && start < direct_below {
        if all_prime(start) {
            record(start, &mut res);
        }
        start += 1;
    }
    if start > hi {
        return res;
    }
    let len = (hi - start + 1) as usize;
    let mut dead = vec![false; len];
    for e in entries {
        let first = (e.root + e.q - start % e.q) % e.q;
        let mut i = first as usize;
        while i < len {
            dead[i] = true;
            i += e.q as usize;
        }
    }
    for (i, &d) in dead.iter().enumerate() {
        if !d {
            let t = start + i as u64;
            if all_prime(t) {
                record(t, &mut res);
            }
        }
    }
    res
}

/// Counts t in 1..=t_max with p, s, r all prime and records the hits with
/// p above the floor. Blocks run in parallel and are merged in order, so
/// the summary does not depend on the block size or thread count.
pub fn scan(
    spec: &CaseSpec,
    t_max: u64,
    opts: &ScanOptions,
    progress: Option<&(dyn Fn(u64, u64) + Sync)>,
) -> Result<SearchSummary, SearchError> {
    if t_max < 1 {
        return Err(SearchError::EmptyRange);
    }
    if opts.block_size == 0 {
        return Err(SearchError::BlockSize);
    }
    if t_max.checked_mul(12).and_then(|v| v.checked_add(11)).is_none() {
        return Err(SearchError::Overflow(t_max));
    }
    let run = || scan_inner(spec, t_max, opts, progress);
    match opts.threads {
        None => Ok(run()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| SearchError::ThreadPool(e.to_string()))?;
            Ok(pool.install(run))
        }
    }
}

fn scan_inner(
    spec: &CaseSpec,
    t_max: u64,
    opts: &ScanOptions,
    progress: Option<&(dyn Fn(u64, u64) + Sync)>,
) -> SearchSummary {
    let entries = sieve_entries(&spec.forms, opts.sieve_limit);
    // every form is at least t, so beyond the sieve limit no form can equal
    // a sieving prime
    let direct_below = opts.sieve_limit + 1;
    let nblocks = t_max.div_ceil(opts.block_size);
    let done = AtomicU64::new(0);
    let blocks: Vec<BlockResult> = (0..nblocks)
        .into_par_iter()
        .map(|i| {
            let lo = 1 + i * opts.block_size;
            let hi = (lo + opts.block_size - 1).min(t_max);
            let r = scan_block(spec, &entries, direct_below, lo, hi, opts.hit_cap);
            if let Some(cb) = progress {
                let d = done.fetch_add(hi - lo + 1, Ordering::Relaxed) + (hi - lo + 1);
                cb(d, t_max);
            }
            r
        })
        .collect();
    let mut summary = SearchSummary {
        case: spec.case,
        t_max,
        q_count: 0,
        hits: Vec::new(),
        hit_count: 0,
        sigma_alpha_zero_count: 0,
        attaining_count: 0,
        small_hits: Vec::new(),
    };
    for b in blocks {
        summary.q_count += b.q_count;
        summary.hit_count += b.hit_count;
        summary.sigma_alpha_zero_count += b.sigma_alpha_zero;
        summary.attaining_count += b.attaining;
        summary.small_hits.extend(b.small);
        let room = opts.hit_cap - summary.hits.len();
        summary.hits.extend(b.hits.into_iter().take(room));
    }
    summary
}
