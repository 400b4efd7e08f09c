use serde::Serialize;

use super::primality::{is_prime, mul_mod};
use super::ArithError;

/// Prime factorization of a positive integer, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Number of divisors, the product of `(e + 1)`.
    pub fn tau(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| u64::from(e) + 1).product()
    }

    /// Prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent_of(&self, prime: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == prime)
            .map_or(0, |&(_, e)| e)
    }

    /// All divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(q, e) in &self.factors {
            let len = divs.len();
            let mut pw = 1u64;
            for _ in 0..e {
                pw *= q;
                for i in 0..len {
                    divs.push(divs[i] * pw);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// Multiplies the factors back together.
    pub fn product(&self) -> u64 {
        self.factors.iter().map(|&(q, e)| q.pow(e)).product()
    }
}

const TRIAL_LIMIT: u64 = 1 << 10;

/// Factor `n` by trial division up to 2^10, then Pollard-Brent rho.
pub fn factorize(n: u64) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    let mut primes = Vec::new();
    let mut m = n;

    let tz = m.trailing_zeros();
    if tz > 0 {
        primes.extend(std::iter::repeat_n(2, tz as usize));
        m >>= tz;
    }
    let mut d = 3u64;
    while d < TRIAL_LIMIT && d * d <= m {
        while m.is_multiple_of(d) {
            primes.push(d);
            m /= d;
        }
        d += 2;
    }
    if m > 1 {
        if m < TRIAL_LIMIT * TRIAL_LIMIT {
            // Every factor below the trial limit is gone, so m is prime.
            primes.push(m);
        } else {
            split_into(m, &mut primes);
        }
    }
    primes.sort_unstable();

    let mut factors: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Ok(Factorization { n, factors })
}

/// Pushes the prime factors of an odd `m > 1` without small factors.
fn split_into(m: u64, out: &mut Vec<u64>) {
    if m == 1 {
        return;
    }
    if is_prime(m) {
        out.push(m);
        return;
    }
    let r = m.isqrt();
    if r * r == m {
        split_into(r, out);
        split_into(r, out);
        return;
    }
    let d = find_factor(m);
    split_into(d, out);
    split_into(m / d, out);
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Nontrivial factor of a composite `m`. Tries increments c = 1, 2, ...
/// so the result is a deterministic function of `m`.
fn find_factor(m: u64) -> u64 {
    for c in 1.. {
        if let Some(d) = brent(m, 2, c) {
            return d;
        }
    }
    unreachable!()
}

// Brent's cycle finding with batched gcds.
fn brent(n: u64, x0: u64, c: u64) -> Option<u64> {
    const BATCH: u64 = 128;
    let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let mut y = x0;
    let mut g = 1;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += BATCH;
        }
        r <<= 1;
        if r > 1 << 40 {
            return None;
        }
    }
    if g == n {
        // The batch overshot; step back one at a time.
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Number of divisors of `n`.
pub fn tau(n: u64) -> Result<u64, ArithError> {
    Ok(factorize(n)?.tau())
}

/// Ω(n): prime factors of `n` with multiplicity; Ω(1) = 0.
pub fn big_omega(n: u64) -> Result<u32, ArithError> {
    Ok(factorize(n)?.big_omega())
}

/// Largest `v` with `2^v | n`.
pub fn two_adic_valuation(n: u64) -> Result<u32, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    Ok(n.trailing_zeros())
}
