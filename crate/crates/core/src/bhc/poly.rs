use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::BhcError;
use crate::arith::{factorize, inv_mod_prime, primes_upto, sqrt_mod_prime};

/// An integer polynomial in t with coefficients listed constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<i64>,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped; the zero polynomial is rejected.
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self, BhcError> {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(BhcError::ZeroPolynomial);
        }
        Ok(Polynomial { coeffs })
    }

    pub fn linear(a: i64, b: i64) -> Result<Self, BhcError> {
        Polynomial::new(vec![b, a])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> i64 {
        *self.coeffs.last().expect("nonzero polynomial")
    }

    /// gcd of the coefficients.
    pub fn content(&self) -> u64 {
        self.coeffs
            .iter()
            .fold(0u64, |g, &c| gcd(g, c.unsigned_abs()))
    }

    /// Exact value at an integer point, or `None` on overflow.
    pub fn eval(&self, t: i128) -> Option<i128> {
        self.coeffs
            .iter()
            .rev()
            .try_fold(0i128, |acc, &c| acc.checked_mul(t)?.checked_add(i128::from(c)))
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c as f64)
    }

    /// Derivative evaluated at t.
    pub fn deriv_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (i, &c)| acc * t + i as f64 * c as f64)
    }

    /// Value at t modulo p.
    pub fn eval_mod(&self, t: u64, p: u64) -> u64 {
        let t = t % p;
        self.coeffs.iter().rev().fold(0u64, |acc, &c| {
            ((acc as u128 * t as u128 + reduce(c, p) as u128) % p as u128) as u64
        })
    }

    /// Coefficients reduced into [0, p), trailing zeros dropped.
    fn reduced(&self, p: u64) -> Vec<u64> {
        let mut r: Vec<u64> = self.coeffs.iter().map(|&c| reduce(c, p)).collect();
        while r.last() == Some(&0) {
            r.pop();
        }
        r
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (i, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => f.write_str("t")?,
                (1, _) => write!(f, "{a}t")?,
                (_, 1) => write!(f, "t^{i}")?,
                _ => write!(f, "{a}t^{i}")?,
            }
        }
        Ok(())
    }
}

fn reduce(c: i64, p: u64) -> u64 {
    (i128::from(c).rem_euclid(i128::from(p))) as u64
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A finite list of polynomials whose simultaneous prime values are counted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolynomialFamily {
    polys: Vec<Polynomial>,
}

impl PolynomialFamily {
    pub fn new(polys: Vec<Polynomial>) -> Result<Self, BhcError> {
        if polys.is_empty() {
            return Err(BhcError::EmptyFamily);
        }
        Ok(PolynomialFamily { polys })
    }

    pub fn from_coeffs(lists: Vec<Vec<i64>>) -> Result<Self, BhcError> {
        PolynomialFamily::new(
            lists
                .into_iter()
                .map(Polynomial::new)
                .collect::<Result<_, _>>()?,
        )
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// Number of polynomials.
    pub fn m(&self) -> usize {
        self.polys.len()
    }

    pub fn coeff_lists(&self) -> Vec<Vec<i64>> {
        self.polys.iter().map(|p| p.coeffs.clone()).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.polys.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    /// Degree of the product.
    pub fn total_degree(&self) -> usize {
        self.polys.iter().map(Polynomial::degree).sum()
    }

    pub fn is_linear(&self) -> bool {
        self.polys.iter().all(|p| p.degree() == 1)
    }

    /// Product of the values modulo p.
    pub fn product_mod(&self, t: u64, p: u64) -> u64 {
        self.polys
            .iter()
            .fold(1 % p, |acc, f| ((acc as u128 * f.eval_mod(t, p) as u128) % p as u128) as u64)
    }
}

impl fmt::Display for PolynomialFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.polys.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl Serialize for PolynomialFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeff_lists().serialize(serializer)
    }
}

/// Parses either a JSON list of coefficient lists, `[[5,12],[1,3]]`, or the
/// shorthand `5,12;1,3`. Coefficients are constant term first.
impl FromStr for PolynomialFamily {
    type Err = BhcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let lists: Vec<Vec<i64>> = if s.starts_with('[') {
            serde_json::from_str(s).map_err(|e| BhcError::Parse(e.to_string()))?
        } else {
            s.split(';')
                .map(|poly| {
                    poly.split(',')
                        .map(|c| {
                            c.trim()
                                .parse::<i64>()
                                .map_err(|e| BhcError::Parse(format!("{c:?}: {e}")))
                        })
                        .collect()
                })
                .collect::<Result<_, _>>()?
        };
        PolynomialFamily::from_coeffs(lists)
    }
}

/// Outcome of the necessary conditions for simultaneous prime values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShReport {
    pub positive_leading: bool,
    pub all_irreducible: bool,
    pub no_fixed_prime_divisor: bool,
    pub failing_prime: Option<u64>,
}

impl ShReport {
    pub fn passes(&self) -> bool {
        self.positive_leading && self.all_irreducible && self.no_fixed_prime_divisor
    }
}

fn is_square(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as u128).isqrt();
    r * r == n as u128
}

/// Checks positive leading coefficients, irreducibility and the absence of
/// a fixed prime divisor of the product.
///
/// A prime q fixes a divisor of f = f₁⋯f_m either because f vanishes
/// identically mod q, which by Gauss happens exactly when q divides the
/// content of some fᵢ, or because q ≤ deg f; above the degree a nonzero
/// polynomial mod q has too few roots to cover every residue.
pub fn check_sh(family: &PolynomialFamily) -> Result<ShReport, BhcError> {
    if let Some(f) = family.polys.iter().find(|f| f.degree() >= 3) {
        return Err(BhcError::UnsupportedDegree(f.degree()));
    }
    let positive_leading = family.polys.iter().all(|f| f.leading() > 0);
    let all_irreducible = family.polys.iter().all(|f| match f.degree() {
        0 => false,
        1 => true,
        _ => {
            let [c, b, a] = [f.coeffs[0], f.coeffs[1], f.coeffs[2]].map(i128::from);
            !is_square(b * b - 4 * a * c)
        }
    });

    let mut candidates = primes_upto(family.total_degree() as u64);
    for f in &family.polys {
        let content = f.content();
        if content > 1 {
            candidates.extend(factorize(content).expect("content > 0").factors.iter().map(|&(q, _)| q));
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    let failing_prime = candidates
        .into_iter()
        .find(|&q| (0..q).all(|t| family.product_mod(t, q) == 0));

    Ok(ShReport {
        positive_leading,
        all_irreducible,
        no_fixed_prime_divisor: failing_prime.is_none(),
        failing_prime,
    })
}

/// Below this, ω is counted by trying every residue.
pub const OMEGA_BRUTE_FORCE_BELOW: u64 = 100;

/// ω(p) by evaluating the product at every residue.
pub fn omega_brute(family: &PolynomialFamily, p: u64) -> u64 {
    (0..p).filter(|&t| family.product_mod(t, p) == 0).count() as u64
}

/// ω(p) from explicit roots: −b/a for linear factors, the quadratic formula
/// with a modular square root for quadratics. Needs p odd and degrees ≤ 2.
pub fn omega_formula(family: &PolynomialFamily, p: u64) -> Result<u64, BhcError> {
    if p == 2 {
        return Ok(omega_brute(family, p));
    }
    let mut roots = Vec::new();
    for f in &family.polys {
        let r = f.reduced(p);
        match r.len() {
            0 => return Ok(p),
            1 => {}
            2 => roots.push((p - r[0]) % p * inv_mod_prime(r[1], p) % p),
            3 => {
                let (c, b, a) = (r[0] as u128, r[1] as u128, r[2] as u128);
                let pp = p as u128;
                let disc = ((b * b + 4 * pp * pp - 4 * a * c % pp) % pp) as u64;
                if let Some(s) = sqrt_mod_prime(disc, p) {
                    let inv2a = inv_mod_prime((2 * a % pp) as u64, p) as u128;
                    for sgn in [s, (p - s) % p] {
                        let num = (pp - b + sgn as u128) % pp;
                        roots.push((num * inv2a % pp) as u64);
                    }
                }
            }
            d => return Err(BhcError::UnsupportedDegree(d - 1)),
        }
    }
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.len() as u64)
}

/// ω(p), the number of residues mod p at which the product vanishes.
pub fn omega_roots(family: &PolynomialFamily, p: u64) -> u64 {
    if p < OMEGA_BRUTE_FORCE_BELOW {
        return omega_brute(family, p);
    }
    omega_formula(family, p).unwrap_or_else(|_| omega_brute(family, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(s: &str) -> PolynomialFamily {
        s.parse().unwrap()
    }

    #[test]
    fn parsing_and_display() {
        let a = fam("5,12;1,3;1,2");
        assert_eq!(a.coeff_lists(), vec![vec![5, 12], vec![1, 3], vec![1, 2]]);
        assert_eq!(a.to_string(), "12t + 5, 3t + 1, 2t + 1");
        assert_eq!(fam("[[5,12],[1,3],[1,2]]"), a);
        assert_eq!(fam("1,0,1").to_string(), "t^2 + 1");
        assert_eq!(fam("-1,2,0").polys()[0].degree(), 1);
        assert!(matches!("0,0".parse::<PolynomialFamily>(), Err(BhcError::ZeroPolynomial)));
        assert!("1,x".parse::<PolynomialFamily>().is_err());
    }

    #[test]
    fn evaluation() {
        let f = &fam("1,0,1").polys[0];
        assert_eq!(f.eval(10), Some(101));
        assert_eq!(f.eval_mod(10, 7), 101 % 7);
        assert_eq!(f.eval_f64(0.5), 1.25);
        assert_eq!(f.deriv_f64(3.0), 6.0);
        let g = &fam("-7,3").polys[0];
        assert_eq!(g.eval_mod(1, 5), 1);
        assert_eq!(Polynomial::new(vec![0, i64::MAX]).unwrap().eval(i128::MAX), None);
    }

    #[test]
    fn sh_examples() {
        assert!(check_sh(&fam("5,12;1,3;1,2")).unwrap().passes());
        assert!(check_sh(&fam("0,1;2,1")).unwrap().passes());
        let consecutive = check_sh(&fam("0,1;1,1")).unwrap();
        assert!(!consecutive.no_fixed_prime_divisor);
        assert_eq!(consecutive.failing_prime, Some(2));
        assert!(check_sh(&fam("1,0,1")).unwrap().passes());
        assert!(!check_sh(&fam("-1,0,1")).unwrap().all_irreducible);
        assert!(!check_sh(&fam("5,-1")).unwrap().positive_leading);
        // 3t + 6 is divisible by 3 for every t
        assert_eq!(check_sh(&fam("6,3")).unwrap().failing_prime, Some(3));
        assert!(matches!(check_sh(&fam("1,0,0,1")), Err(BhcError::UnsupportedDegree(3))));
    }

    #[test]
    fn omega_examples() {
        let a = fam("5,12;1,3;1,2");
        assert_eq!(omega_roots(&a, 5), 3);
        assert_eq!(omega_roots(&a, 2), 1);
        assert_eq!(omega_roots(&a, 3), 1);
        assert_eq!(omega_roots(&a, 13), 3);
        assert_eq!(omega_roots(&fam("0,1"), 101), 1);
        // t² + 1 has roots mod p exactly when p ≡ 1 mod 4
        let q = fam("1,0,1");
        assert_eq!(omega_formula(&q, 101).unwrap(), 2);
        assert_eq!(omega_formula(&q, 103).unwrap(), 0);
        assert_eq!(omega_formula(&fam("0,101;1,1"), 101).unwrap(), 101);
    }

    #[test]
    fn omega_paths_agree() {
        let fams = [
            "5,12;1,3;1,2",
            "7,12;2,3;1,2",
            "11,12;1,1;5,6",
            "1,12;1,6;0,1",
            "1,0,1",
            "3,1,2;0,1",
            "0,1;2,1",
        ];
        for s in fams {
            let f = fam(s);
            for p in primes_upto(400) {
                assert_eq!(omega_formula(&f, p).unwrap(), omega_brute(&f, p), "{s} p={p}");
            }
        }
    }
}
