use crate::arith::{inv_mod_prime, is_prime};

use super::OracleError;

/// Index of an element inside a [`PermGroup`].
pub type Elem = u16;

/// PSL₂(p) as permutations of the projective line {0, …, p−1, ∞}, with ∞
/// stored as point `p`. Elements are indexed; index 0 is the identity.
#[derive(Debug, Clone)]
pub struct PermGroup {
    p: u64,
    perms: Vec<Vec<u16>>,
    mul: Vec<Elem>,
    inv: Vec<Elem>,
    orders: Vec<u32>,
    generators: Vec<Elem>,
}

/// Image of x under x ↦ (ax + b)/(cx + d) over the p-element field.
fn mobius(p: u64, [a, b, c, d]: [u64; 4], x: u64) -> u64 {
    if x == p {
        return if c == 0 { p } else { a * inv_mod_prime(c, p) % p };
    }
    let num = (a * x + b) % p;
    let den = (c * x + d) % p;
    if den == 0 {
        p
    } else {
        num * inv_mod_prime(den, p) % p
    }
}

impl PermGroup {
    pub const MAX_P: u64 = 19;

    /// Builds PSL₂(p) for a prime 3 ≤ p ≤ 19.
    pub fn psl2(p: u64) -> Result<Self, OracleError> {
        if !(3..=Self::MAX_P).contains(&p) || !is_prime(p) {
            return Err(OracleError::OutOfRange(p));
        }
        let deg = (p + 1) as usize;
        // A Möbius map is fixed by the images of 0, 1 and ∞.
        let key = |perm: &[u16]| {
            (perm[0] as usize * deg + perm[1] as usize) * deg + perm[p as usize] as usize
        };
        let mut slot = vec![u16::MAX; deg * deg * deg];
        let mut perms: Vec<Vec<u16>> = vec![(0..deg as u16).collect()];
        slot[key(&perms[0])] = 0;
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        if (a * d + p * p - b * c) % p != 1 {
                            continue;
                        }
                        let perm: Vec<u16> =
                            (0..=p).map(|x| mobius(p, [a, b, c, d], x) as u16).collect();
                        let k = key(&perm);
                        if slot[k] == u16::MAX {
                            slot[k] = perms.len() as u16;
                            perms.push(perm);
                        }
                    }
                }
            }
        }
        let n = perms.len();
        debug_assert_eq!(n as u64, p * (p * p - 1) / 2);

        // (a·b)(x) = a(b(x))
        let mut mul = vec![0 as Elem; n * n];
        let mut buf = vec![0u16; deg];
        for (i, a) in perms.iter().enumerate() {
            for (j, b) in perms.iter().enumerate() {
                for x in 0..deg {
                    buf[x] = a[b[x] as usize];
                }
                mul[i * n + j] = slot[key(&buf)];
            }
        }
        let inv: Vec<Elem> = (0..n)
            .map(|i| (0..n).find(|&j| mul[i * n + j] == 0).expect("group element has an inverse") as Elem)
            .collect();
        let orders = (0..n)
            .map(|i| {
                let mut x = i;
                let mut k = 1;
                while x != 0 {
                    x = mul[x * n + i] as usize;
                    k += 1;
                }
                k
            })
            .collect();

        // S: x ↦ −1/x and T: x ↦ x + 1 generate PSL₂(p).
        let s_perm: Vec<u16> = (0..=p).map(|x| mobius(p, [0, p - 1, 1, 0], x) as u16).collect();
        let t_perm: Vec<u16> = (0..=p).map(|x| mobius(p, [1, 1, 0, 1], x) as u16).collect();
        let generators = vec![slot[key(&s_perm)], slot[key(&t_perm)]];

        Ok(PermGroup {
            p,
            perms,
            mul,
            inv,
            orders,
            generators,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.p as usize + 1
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn identity(&self) -> Elem {
        0
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn perm(&self, x: Elem) -> &[u16] {
        &self.perms[x as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.perms.len() + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a as usize]
    }

    #[inline]
    pub fn conj(&self, g: Elem, h: Elem) -> Elem {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn element_order(&self, a: Elem) -> u32 {
        self.orders[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.perms.len() as Elem
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(PermGroup::psl2(3).unwrap().order(), 12);
        assert_eq!(PermGroup::psl2(5).unwrap().order(), 60);
        assert_eq!(PermGroup::psl2(7).unwrap().order(), 168);
        assert_eq!(PermGroup::psl2(13).unwrap().order(), 1092);
    }

    #[test]
    fn range_is_enforced() {
        for p in [0, 1, 2, 4, 9, 23] {
            assert!(matches!(PermGroup::psl2(p), Err(OracleError::OutOfRange(_))));
        }
    }

    #[test]
    fn group_axioms() {
        let g = PermGroup::psl2(7).unwrap();
        assert_eq!(g.perm(0), (0..8).collect::<Vec<u16>>().as_slice());
        for a in g.elements() {
            assert_eq!(g.mul(a, g.inv(a)), 0);
            assert_eq!(g.mul(0, a), a);
            // perms are bijections of the projective line
            let mut seen = g.perm(a).to_vec();
            seen.sort_unstable();
            assert_eq!(seen, (0..8).collect::<Vec<u16>>());
        }
        for a in g.elements().step_by(7) {
            for b in g.elements().step_by(5) {
                for c in g.elements().step_by(11) {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn generators_generate() {
        let g = PermGroup::psl2(11).unwrap();
        let mut seen = vec![false; g.order()];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &s in g.generators() {
                let y = g.mul(x, s);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    stack.push(y);
                }
            }
        }
        assert!(seen.iter().all(|&b| b));
    }
}
