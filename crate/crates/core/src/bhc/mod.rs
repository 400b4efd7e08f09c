//! Bateman–Horn heuristics for simultaneous prime values of a polynomial
//! family f₁, …, f_m:
//!
//! ```text
//! E(x) = C ∫_a^x dt / (ln f₁(t) ⋯ ln f_m(t))
//! C    = ∏_p (1 − 1/p)^(−m) (1 − ω(p)/p)
//! ```
//!
//! where ω(p) counts the residues mod p at which the product vanishes.

mod poly;
pub mod quad;

use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::arith::primes_in_range;

pub use poly::{
    check_sh, omega_brute, omega_formula, omega_roots, Polynomial, PolynomialFamily, ShReport,
    OMEGA_BRUTE_FORCE_BELOW,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BhcError {
    #[error("the zero polynomial is not allowed")]
    ZeroPolynomial,
    #[error("a family needs at least one polynomial")]
    EmptyFamily,
    #[error("cannot parse family: {0}")]
    Parse(String),
    #[error("unsupported degree {0} (at most 2)")]
    UnsupportedDegree(usize),
    #[error("family fails the necessary conditions: {0:?}")]
    ConditionsFail(ShReport),
    #[error("truncation bound {0} is below 1000")]
    TruncationTooSmall(u64),
    #[error("no start point with every polynomial at least 2 and increasing")]
    NoStartPoint,
    #[error("x = {x} must exceed the lower limit a = {a}")]
    XNotAboveA { x: f64, a: f64 },
    #[error("quadrature did not converge: value {value}, error estimate {error} after {panels} panels")]
    NotConverged { value: f64, error: f64, panels: usize },
    #[error("the observed count must be at least 1")]
    ZeroCount,
}

/// Smallest truncation bound accepted by [`hl_constant`].
pub const MIN_TRUNCATION: u64 = 1_000;
pub const DEFAULT_TRUNCATION: u64 = 10_000_000;
pub const QUAD_REL_TOL: f64 = 1e-8;
pub const QUAD_MAX_PANELS: usize = 4_000;

/// A truncated Hardy–Littlewood product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HlConstant {
    pub value: f64,
    pub truncation_bound: u64,
    pub tail_bound_estimate: f64,
}

/// ln of the factor (1 − 1/p)^(−m)(1 − ω(p)/p).
fn log_factor(family: &PolynomialFamily, p: u64) -> f64 {
    let pf = p as f64;
    let omega = omega_roots(family, p) as f64;
    -(family.m() as f64) * (-1.0 / pf).ln_1p() + (-omega / pf).ln_1p()
}

/// The factor of prime p in the product.
pub fn local_factor(family: &PolynomialFamily, p: u64) -> f64 {
    log_factor(family, p).exp()
}

#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

const PRIME_BLOCK: u64 = 1 << 20;

/// ∏_{p ≤ P} of the local factors, summed in log space.
///
/// Tail heuristic: for a linear family whose roots are distinct mod p,
/// ω(p) = m and the log factor is −m(m−1)/(2p²) + O(p⁻³); summing 1/p²
/// over p > P gives about 1/(P ln P), and the bound doubles that. For
/// families with a quadratic member ω(p) only equals m on average, so the
/// first-order terms cancel only statistically and the bound is taken as
/// 2/√P instead.
pub fn hl_constant(family: &PolynomialFamily, truncation: u64) -> Result<HlConstant, BhcError> {
    if truncation < MIN_TRUNCATION {
        return Err(BhcError::TruncationTooSmall(truncation));
    }
    let report = check_sh(family)?;
    if !report.passes() {
        return Err(BhcError::ConditionsFail(report));
    }
    let blocks: Vec<(u64, u64)> = (0..truncation.div_ceil(PRIME_BLOCK))
        .map(|i| {
            let lo = (i * PRIME_BLOCK).max(2);
            (lo, ((i + 1) * PRIME_BLOCK - 1).min(truncation))
        })
        .collect();
    let partials: Vec<Kahan> = blocks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc = Kahan::default();
            for p in primes_in_range(lo, hi).expect("lo <= hi") {
                acc.add(log_factor(family, p));
            }
            acc
        })
        .collect();
    // fixed block order, so the result does not depend on the thread count
    let mut total = Kahan::default();
    for k in partials {
        total.add(k.sum);
        total.add(-k.c);
    }
    let value = total.sum.exp();
    let pf = truncation as f64;
    let m = family.m() as f64;
    let relative = if family.is_linear() {
        m * (m - 1.0) / (pf * pf.ln())
    } else {
        2.0 / pf.sqrt()
    };
    Ok(HlConstant {
        value,
        truncation_bound: truncation,
        tail_bound_estimate: value * relative,
    })
}

/// E(x) together with everything that went into it.
#[derive(Debug, Clone, PartialEq)]
pub struct BhcEstimate {
    pub family: PolynomialFamily,
    pub x: f64,
    pub a: f64,
    pub constant: HlConstant,
    pub integral: f64,
    pub e_value: f64,
    pub quadrature_error_estimate: f64,
}

impl Serialize for BhcEstimate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("BhcEstimate", 8)?;
        st.serialize_field("family", &self.family)?;
        st.serialize_field("x", &self.x)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("P", &self.constant.truncation_bound)?;
        st.serialize_field("C", &self.constant.value)?;
        st.serialize_field("integral", &self.integral)?;
        st.serialize_field("E", &self.e_value)?;
        st.serialize_field("tail_bound", &self.constant.tail_bound_estimate)?;
        st.end()
    }
}

/// Smallest integer t₀ ≥ 0 from which every polynomial is at least 2 and
/// non-decreasing, so ln fᵢ stays positive on [t₀, ∞). For degree ≤ 2
/// with positive leading coefficient this set of t is a half-line.
pub fn lower_limit(family: &PolynomialFamily) -> Result<u64, BhcError> {
    let ok = |t: u64| {
        family.polys().iter().all(|f| {
            let t = i128::from(t);
            let v = f.eval(t);
            let v1 = f.eval(t + 1);
            matches!((v, v1), (Some(v), Some(v1)) if v >= 2 && v1 >= v)
        })
    };
    const LIMIT: u64 = 1 << 40;
    if family.max_degree() > 2 || family.polys().iter().any(|f| f.leading() <= 0) {
        return Err(BhcError::NoStartPoint);
    }
    if !ok(LIMIT) {
        return Err(BhcError::NoStartPoint);
    }
    let (mut lo, mut hi) = (0u64, LIMIT);
    if ok(0) {
        return Ok(0);
    }
    // ok(lo) is false, ok(hi) is true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// E(x) = C ∫_a^x dt / ∏ ln fᵢ(t).
pub fn estimate_e(
    family: &PolynomialFamily,
    x: f64,
    constant: &HlConstant,
) -> Result<BhcEstimate, BhcError> {
    let a = lower_limit(family)? as f64;
    if x.partial_cmp(&a) != Some(std::cmp::Ordering::Greater) {
        return Err(BhcError::XNotAboveA { x, a });
    }
    let polys = family.polys();
    let integrand = |t: f64| {
        polys
            .iter()
            .fold(1.0, |acc, f| acc / f.eval_f64(t).ln())
    };
    let q = quad::integrate(integrand, a, x, QUAD_REL_TOL, QUAD_MAX_PANELS).map_err(|e| {
        BhcError::NotConverged {
            value: e.0.value,
            error: e.0.error,
            panels: e.0.panels,
        }
    })?;
    Ok(BhcEstimate {
        family: family.clone(),
        x,
        a,
        constant: *constant,
        integral: q.value,
        e_value: constant.value * q.value,
        quadrature_error_estimate: q.error,
    })
}

/// Signed relative error (E − Q)/Q.
pub fn compare(q: u64, estimate: f64) -> Result<f64, BhcError> {
    if q == 0 {
        return Err(BhcError::ZeroCount);
    }
    Ok((estimate - q as f64) / q as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(s: &str) -> PolynomialFamily {
        s.parse().unwrap()
    }

    #[test]
    fn single_linear_polynomial_has_constant_one() {
        for p in [1_000, 5_000, 100_000] {
            let c = hl_constant(&fam("0,1"), p).unwrap();
            assert!((c.value - 1.0).abs() < 1e-12, "{}", c.value);
            assert_eq!(c.tail_bound_estimate, 0.0);
        }
    }

    #[test]
    fn constant_needs_conditions_and_large_p() {
        assert_eq!(
            hl_constant(&fam("0,1"), 999),
            Err(BhcError::TruncationTooSmall(999))
        );
        assert!(matches!(
            hl_constant(&fam("0,1;1,1"), 10_000),
            Err(BhcError::ConditionsFail(_))
        ));
    }

    #[test]
    fn twin_prime_constant() {
        // 2·C₂ with C₂ = 0.6601618158...
        let c = hl_constant(&fam("0,1;2,1"), 1_000_000).unwrap();
        assert!((c.value - 1.320_323_631_7).abs() < 1e-5, "{}", c.value);
    }

    #[test]
    fn landau_constant() {
        // t² + 1: C = 1.3728134628...
        let c = hl_constant(&fam("1,0,1"), 1_000_000).unwrap();
        assert!((c.value - 1.372_813_462_8).abs() < 1e-3, "{}", c.value);
    }

    #[test]
    fn lower_limits() {
        assert_eq!(lower_limit(&fam("5,12;1,3;1,2")).unwrap(), 1);
        assert_eq!(lower_limit(&fam("7,12;2,3;1,2")).unwrap(), 1);
        assert_eq!(lower_limit(&fam("1,12;1,6;0,1")).unwrap(), 2);
        assert_eq!(lower_limit(&fam("1,0,1")).unwrap(), 1);
        // vertex at t = 5
        assert_eq!(lower_limit(&fam("30,-10,1")).unwrap(), 5);
        assert!(lower_limit(&fam("5,-1")).is_err());
    }

    #[test]
    fn estimate_is_monotone_and_vanishes_at_a() {
        let f = fam("0,1;2,1");
        let c = hl_constant(&f, 10_000).unwrap();
        let e1 = estimate_e(&f, 1e4, &c).unwrap();
        let e2 = estimate_e(&f, 1e5, &c).unwrap();
        assert!(e1.e_value < e2.e_value);
        assert!((e1.e_value - c.value * e1.integral).abs() < 1e-9 * e1.e_value);
        let tiny = estimate_e(&f, e1.a + 1e-9, &c).unwrap();
        assert!(tiny.e_value > 0.0 && tiny.e_value < 1e-8);
        assert!(matches!(
            estimate_e(&f, e1.a, &c),
            Err(BhcError::XNotAboveA { .. })
        ));
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare(100, 100.0).unwrap(), 0.0);
        assert!((compare(614_423, 615_580.7).unwrap() - 0.001_88).abs() < 2e-5);
        assert!((compare(615_369, 615_580.6).unwrap() - 0.000_34).abs() < 2e-5);
        assert_eq!(compare(0, 1.0), Err(BhcError::ZeroCount));
    }

    #[test]
    fn json_keys() {
        let f = fam("0,1;2,1");
        let c = hl_constant(&f, 10_000).unwrap();
        let v = serde_json::to_value(estimate_e(&f, 1e4, &c).unwrap()).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, ["C", "E", "P", "a", "family", "integral", "tail_bound", "x"]);
        assert_eq!(v["family"], serde_json::json!([[0, 1], [2, 1]]));
    }
}
