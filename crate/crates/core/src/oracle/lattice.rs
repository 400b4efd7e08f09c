use std::collections::HashMap;

use super::group::{Elem, PermGroup};
use super::OracleError;

pub const DEFAULT_SUBGROUP_CAP: usize = 1_000_000;

/// A subgroup stored as a membership bitset over element indices, plus a
/// small generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    bits: Vec<u64>,
    order: usize,
    gens: Vec<Elem>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.bits[x as usize / 64] >> (x % 64) & 1 == 1
    }

    pub fn generators(&self) -> &[Elem] {
        &self.gens
    }

    /// Member indices, ascending.
    pub fn elements(&self) -> Vec<Elem> {
        let mut out = Vec::with_capacity(self.order);
        for (w, &word) in self.bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                out.push((w * 64) as Elem + word.trailing_zeros() as Elem);
                word &= word - 1;
            }
        }
        out
    }

    pub(crate) fn bits(&self) -> &[u64] {
        &self.bits
    }
}

fn empty_bits(g: &PermGroup) -> Vec<u64> {
    vec![0; g.order().div_ceil(64)]
}

#[inline]
fn set(bits: &mut [u64], x: Elem) -> bool {
    let (w, b) = (x as usize / 64, x % 64);
    let fresh = bits[w] >> b & 1 == 0;
    bits[w] |= 1 << b;
    fresh
}

/// The subgroup generated by `base` together with `extra`. Builds on the
/// elements of `base` when given; stops early once the closure passes half
/// of |G|, since by Lagrange it must then be all of G.
pub fn closure(g: &PermGroup, base: Option<&Subgroup>, extra: &[Elem]) -> Subgroup {
    let mut gens: Vec<Elem> = base.map(|b| b.gens.clone()).unwrap_or_default();
    gens.extend(extra.iter().copied().filter(|&x| x != 0));
    let mut bits = base.map(|b| b.bits.clone()).unwrap_or_else(|| empty_bits(g));
    let mut members = base.map(|b| b.elements()).unwrap_or_default();
    if members.is_empty() {
        set(&mut bits, 0);
        members.push(0);
    }
    let half = g.order() / 2;
    let mut i = 0;
    // Every member times every generator; members already in `base` only
    // need the new generators.
    let old = members.len();
    let new_from = gens.len() - extra.iter().filter(|&&x| x != 0).count();
    while i < members.len() {
        let x = members[i];
        let from = if i < old && base.is_some() { new_from } else { 0 };
        for &s in &gens[from..] {
            let y = g.mul(x, s);
            if set(&mut bits, y) {
                members.push(y);
            }
        }
        if members.len() > half {
            return whole(g);
        }
        i += 1;
    }
    Subgroup {
        bits,
        order: members.len(),
        gens,
    }
}

/// G itself.
pub fn whole(g: &PermGroup) -> Subgroup {
    let mut bits = vec![u64::MAX; g.order().div_ceil(64)];
    let tail = g.order() % 64;
    if tail != 0 {
        *bits.last_mut().unwrap() = (1 << tail) - 1;
    }
    Subgroup {
        bits,
        order: g.order(),
        gens: g.generators().to_vec(),
    }
}

/// x H x⁻¹.
pub fn conjugate(g: &PermGroup, x: Elem, h: &Subgroup) -> Subgroup {
    let mut bits = empty_bits(g);
    for y in h.elements() {
        set(&mut bits, g.conj(x, y));
    }
    Subgroup {
        bits,
        order: h.order,
        gens: h.gens.iter().map(|&y| g.conj(x, y)).collect(),
    }
}

/// ⟨x⟩.
pub fn cyclic(g: &PermGroup, x: Elem) -> Subgroup {
    let mut bits = empty_bits(g);
    let mut y = 0;
    let mut order = 0;
    loop {
        set(&mut bits, y);
        order += 1;
        y = g.mul(y, x);
        if y == 0 {
            break;
        }
    }
    Subgroup {
        bits,
        order,
        gens: if x == 0 { vec![] } else { vec![x] },
    }
}

/// Every subgroup of `g`, each exactly once, with no particular meaning to
/// the order beyond being deterministic.
///
/// Starts from the cyclic subgroups and closes under joins. Joining with
/// cyclic subgroups is enough: any join H ∨ K is reached by joining H with
/// the cyclic subgroups of K's generators one at a time.
pub fn enumerate_subgroups(g: &PermGroup, cap: usize) -> Result<Vec<Subgroup>, OracleError> {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut subs: Vec<Subgroup> = Vec::new();
    let mut cyclic_gens: Vec<Elem> = Vec::new();
    let mut push = |s: Subgroup, subs: &mut Vec<Subgroup>| -> Result<bool, OracleError> {
        if index.contains_key(&s.bits) {
            return Ok(false);
        }
        if subs.len() >= cap {
            return Err(OracleError::TooManySubgroups { cap });
        }
        index.insert(s.bits.clone(), subs.len());
        subs.push(s);
        Ok(true)
    };
    for x in g.elements() {
        if push(cyclic(g, x), &mut subs)? && x != 0 {
            cyclic_gens.push(x);
        }
    }
    let full = g.order();
    let mut i = 0;
    while i < subs.len() {
        if subs[i].order < full {
            for &x in &cyclic_gens {
                if subs[i].contains(x) {
                    continue;
                }
                let j = closure(g, Some(&subs[i]), &[x]);
                push(j, &mut subs)?;
            }
        }
        i += 1;
    }
    Ok(subs)
}
