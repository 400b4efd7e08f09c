use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::arith::factorize;
use crate::invariants::SubgroupType;

use super::group::{Elem, PermGroup};
use super::lattice::Subgroup;
use super::OracleError;

/// What a class of subgroups is, as far as the census is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OracleLabel {
    Trivial,
    Proper(SubgroupType),
    Whole,
}

impl OracleLabel {
    pub fn excluded_from_census(&self) -> bool {
        !matches!(self, OracleLabel::Proper(_))
    }
}

impl fmt::Display for OracleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleLabel::Trivial => f.write_str("1"),
            OracleLabel::Proper(t) => write!(f, "{t}"),
            OracleLabel::Whole => f.write_str("G"),
        }
    }
}

/// One conjugacy class of subgroups.
#[derive(Debug, Clone)]
pub struct OracleClass {
    /// Index into the subgroup list of the first member found.
    pub representative: usize,
    /// Indices of all members.
    pub members: Vec<usize>,
    pub class_size: usize,
    pub normaliser_order: usize,
    pub order: usize,
    pub label: OracleLabel,
}

impl OracleClass {
    pub fn self_normalising(&self) -> bool {
        self.normaliser_order == self.order
    }
}

/// Order, abelian flag, cyclic flag and element-order multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub order: u64,
    pub abelian: bool,
    pub cyclic: bool,
    pub element_orders: BTreeMap<u64, u64>,
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "order {} abelian={} cyclic={} orders {:?}",
            self.order, self.abelian, self.cyclic, self.element_orders
        )
    }
}

fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .expect("n > 0")
        .factors
        .iter()
        .map(|&(q, e)| (q - 1) * q.pow(e - 1))
        .product()
}

fn divisors(n: u64) -> Vec<u64> {
    factorize(n).expect("n > 0").divisors()
}

/// The fingerprint every group of type `ty` has.
pub fn catalogue_fingerprint(ty: SubgroupType) -> Fingerprint {
    let mut orders = BTreeMap::new();
    let (abelian, cyclic) = match ty {
        SubgroupType::Cyclic(m) => {
            for d in divisors(m) {
                orders.insert(d, euler_phi(d));
            }
            (true, true)
        }
        SubgroupType::Dihedral(n) => {
            for d in divisors(n) {
                orders.insert(d, euler_phi(d));
            }
            *orders.entry(2).or_insert(0) += n;
            (n == 2, false)
        }
        SubgroupType::Affine { p, e } => {
            orders.insert(1, 1);
            orders.insert(p, p - 1);
            for d in divisors(e).into_iter().filter(|&d| d > 1) {
                orders.insert(d, p * euler_phi(d));
            }
            (e == 1, e == 1)
        }
        SubgroupType::A4 => {
            orders.extend([(1, 1), (2, 3), (3, 8)]);
            (false, false)
        }
        SubgroupType::S4 => {
            orders.extend([(1, 1), (2, 9), (3, 8), (4, 6)]);
            (false, false)
        }
        SubgroupType::A5 => {
            orders.extend([(1, 1), (2, 15), (3, 20), (5, 24)]);
            (false, false)
        }
    };
    Fingerprint {
        order: ty.order(),
        abelian,
        cyclic,
        element_orders: orders,
    }
}

/// Catalogue types of order `m` that can occur inside PSL₂(p).
///
/// C_m and D_n are only offered when p does not divide m (resp. n), and
/// E_p:C_e only when p | m. Since p is odd, p | 2n forces p | n, so a
/// dihedral candidate and an affine candidate never share an order; this
/// is what keeps D5 and E5:C2 apart at p = 5. Within one order, C_m is the
/// only cyclic candidate, D_n differs from C_2n by having no element of
/// order 2n (n ≥ 2), D2 from C4 by its three involutions, and A4, S4, A5
/// differ from D6, D12, D30 by the missing elements of order 6, 12, 30.
fn candidates(p: u64, m: u64) -> Vec<SubgroupType> {
    let mut out = Vec::new();
    if m.is_multiple_of(p) {
        out.push(SubgroupType::Affine { p, e: m / p });
    } else {
        out.push(SubgroupType::Cyclic(m));
        if m.is_multiple_of(2) && m >= 4 && !(m / 2).is_multiple_of(p) {
            out.push(SubgroupType::Dihedral(m / 2));
        }
    }
    match m {
        12 => out.push(SubgroupType::A4),
        24 => out.push(SubgroupType::S4),
        60 => out.push(SubgroupType::A5),
        _ => {}
    }
    out
}

pub fn fingerprint(g: &PermGroup, h: &Subgroup) -> Fingerprint {
    let gens = h.generators();
    let abelian = gens
        .iter()
        .all(|&a| gens.iter().all(|&b| g.mul(a, b) == g.mul(b, a)));
    let mut element_orders = BTreeMap::new();
    for x in h.elements() {
        *element_orders
            .entry(u64::from(g.element_order(x)))
            .or_insert(0) += 1;
    }
    let order = h.order() as u64;
    Fingerprint {
        order,
        abelian,
        cyclic: element_orders.contains_key(&order),
        element_orders,
    }
}

/// Matches a subgroup against the catalogue.
pub fn label_of(g: &PermGroup, h: &Subgroup) -> Result<OracleLabel, OracleError> {
    if h.order() == 1 {
        return Ok(OracleLabel::Trivial);
    }
    if h.order() == g.order() {
        return Ok(OracleLabel::Whole);
    }
    let fp = fingerprint(g, h);
    let hits: Vec<SubgroupType> = candidates(g.p(), fp.order)
        .into_iter()
        .filter(|&t| catalogue_fingerprint(t) == fp)
        .collect();
    match hits.as_slice() {
        [t] => Ok(OracleLabel::Proper(*t)),
        [] => Err(OracleError::Unrecognized(fp.to_string())),
        many => Err(OracleError::Ambiguous(
            many.iter().map(|t| t.label()).collect::<Vec<_>>().join(", "),
        )),
    }
}

fn conjugate_bits(g: &PermGroup, x: Elem, members: &[Elem], words: usize) -> Vec<u64> {
    let mut bits = vec![0u64; words];
    for &h in members {
        let y = g.conj(x, h);
        bits[y as usize / 64] |= 1 << (y % 64);
    }
    bits
}

/// Partitions `subs` into conjugacy classes. Each class records its size and
/// the normaliser order of its members, counted as the stabiliser of the
/// representative under conjugation.
pub fn classify(g: &PermGroup, subs: &[Subgroup]) -> Result<Vec<OracleClass>, OracleError> {
    let index: HashMap<&[u64], usize> = subs
        .iter()
        .enumerate()
        .map(|(i, s)| (s.bits(), i))
        .collect();
    let words = g.order().div_ceil(64);
    let mut assigned = vec![false; subs.len()];
    let mut classes = Vec::new();
    for (i, h) in subs.iter().enumerate() {
        if assigned[i] {
            continue;
        }
        let members = h.elements();
        let mut stabiliser = 0;
        let mut orbit = Vec::new();
        for x in g.elements() {
            let bits = conjugate_bits(g, x, &members, words);
            let j = *index
                .get(bits.as_slice())
                .ok_or(OracleError::Inconsistent("conjugate missing from lattice"))?;
            if j == i {
                stabiliser += 1;
            }
            if !assigned[j] {
                assigned[j] = true;
                orbit.push(j);
            }
        }
        if orbit.len() * stabiliser != g.order() {
            return Err(OracleError::Inconsistent("orbit-stabiliser"));
        }
        classes.push(OracleClass {
            representative: i,
            class_size: orbit.len(),
            members: orbit,
            normaliser_order: stabiliser,
            order: h.order(),
            label: label_of(g, h)?,
        });
    }
    Ok(classes)
}
