use std::collections::BTreeSet;
use std::fmt;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use super::{profile, Counts, InvariantError};
use crate::arith::factorize;

/// Isomorphism types of non-identity proper subgroups of PSL₂(p).
///
/// `Dihedral(n)` has order 2n, so `Dihedral(2)` is the Klein four-group.
/// `Affine { p, e }` is C_p ⋊ C_e of order p·e; `e = 1` is C_p itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubgroupType {
    Cyclic(u64),
    Dihedral(u64),
    Affine { p: u64, e: u64 },
    A4,
    S4,
    A5,
}

impl SubgroupType {
    pub fn order(&self) -> u64 {
        match *self {
            SubgroupType::Cyclic(n) => n,
            SubgroupType::Dihedral(n) => 2 * n,
            SubgroupType::Affine { p, e } => p * e,
            SubgroupType::A4 => 12,
            SubgroupType::S4 => 24,
            SubgroupType::A5 => 60,
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SubgroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SubgroupType::Cyclic(n) => write!(f, "C{n}"),
            SubgroupType::Dihedral(n) => write!(f, "D{n}"),
            SubgroupType::Affine { p, e } => write!(f, "E{p}:C{e}"),
            SubgroupType::A4 => f.write_str("A4"),
            SubgroupType::S4 => f.write_str("S4"),
            SubgroupType::A5 => f.write_str("A5"),
        }
    }
}

/// Where a type sits in the classification: the "plus" families come from
/// divisors of (p+1)/2, the "minus" families from divisors of (p−1)/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SubgroupKind {
    CyclicPlus,
    DihedralPlus,
    CyclicMinus,
    DihedralMinus,
    Affine,
    A4,
    S4,
    A5,
}

impl SubgroupKind {
    pub fn of(ty: SubgroupType, p: u64) -> Self {
        let plus = p.div_ceil(2);
        match ty {
            SubgroupType::Cyclic(d) if plus.is_multiple_of(d) => SubgroupKind::CyclicPlus,
            SubgroupType::Cyclic(_) => SubgroupKind::CyclicMinus,
            SubgroupType::Dihedral(d) if plus.is_multiple_of(d) => SubgroupKind::DihedralPlus,
            SubgroupType::Dihedral(_) => SubgroupKind::DihedralMinus,
            SubgroupType::Affine { .. } => SubgroupKind::Affine,
            SubgroupType::A4 => SubgroupKind::A4,
            SubgroupType::S4 => SubgroupKind::S4,
            SubgroupType::A5 => SubgroupKind::A5,
        }
    }
}

/// One isomorphism type together with its number of conjugacy classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassEntry {
    pub ty: SubgroupType,
    pub kind: SubgroupKind,
    pub num_classes: u8,
    pub self_normalising: bool,
}

impl ClassEntry {
    pub fn label(&self) -> String {
        self.ty.label()
    }

    pub fn order(&self) -> u64 {
        self.ty.order()
    }
}

impl Serialize for ClassEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ClassEntry", 4)?;
        st.serialize_field("label", &self.label())?;
        st.serialize_field("order", &self.order())?;
        st.serialize_field("classes", &self.num_classes)?;
        st.serialize_field("self_normalising", &self.self_normalising)?;
        st.end()
    }
}

/// The classes of non-identity proper subgroups of PSL₂(p), grouped by type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCensus {
    pub p: u64,
    pub entries: Vec<ClassEntry>,
}

impl ClassCensus {
    pub fn counts(&self) -> Counts {
        let c: u64 = self.entries.iter().map(|e| u64::from(e.num_classes)).sum();
        let s: u64 = self
            .entries
            .iter()
            .filter(|e| e.self_normalising)
            .map(|e| u64::from(e.num_classes))
            .sum();
        Counts {
            i: self.entries.len() as u64,
            c,
            s,
            n: c - s,
        }
    }

    pub fn get(&self, label: &str) -> Option<&ClassEntry> {
        self.entries.iter().find(|e| e.label() == label)
    }

    pub fn self_normalising_labels(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.self_normalising)
            .map(ClassEntry::label)
            .collect()
    }

    /// `(label, classes, self_normalising)` for every entry.
    pub fn triples(&self) -> BTreeSet<(String, u8, bool)> {
        self.entries
            .iter()
            .map(|e| (e.label(), e.num_classes, e.self_normalising))
            .collect()
    }

    pub fn diff(&self, other: &ClassCensus) -> CensusDiff {
        let a = self.triples();
        let b = other.triples();
        CensusDiff {
            only_left: a.difference(&b).cloned().collect(),
            only_right: b.difference(&a).cloned().collect(),
        }
    }

    /// Labels must be unique within a census.
    pub fn has_unique_labels(&self) -> bool {
        let labels: BTreeSet<String> = self.entries.iter().map(ClassEntry::label).collect();
        labels.len() == self.entries.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("census serializes")
    }
}

impl Serialize for ClassCensus {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let counts = self.counts();
        let mut st = serializer.serialize_struct("ClassCensus", 6)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("entries", &self.entries)?;
        st.serialize_field("i", &counts.i)?;
        st.serialize_field("c", &counts.c)?;
        st.serialize_field("s", &counts.s)?;
        st.serialize_field("n", &counts.n)?;
        st.end()
    }
}

/// Entries present in one census but not the other.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CensusDiff {
    pub only_left: Vec<(String, u8, bool)>,
    pub only_right: Vec<(String, u8, bool)>,
}

impl CensusDiff {
    pub fn is_empty(&self) -> bool {
        self.only_left.is_empty() && self.only_right.is_empty()
    }
}

/// Builds the census of PSL₂(p) from the divisors of (p ± 1)/2.
pub fn census(p: u64) -> Result<ClassCensus, InvariantError> {
    let prof = profile(p)?;
    let plus = p / 2 + 1;
    let minus = p / 2;
    let sigma = prof.sigma == 1;
    let mut entries = Vec::new();
    let mut push = |ty: SubgroupType, num_classes: u8, self_normalising: bool| {
        entries.push(ClassEntry {
            ty,
            kind: SubgroupKind::of(ty, p),
            num_classes,
            self_normalising,
        });
    };

    for half in [plus, minus] {
        for d in factorize(half).expect("half > 0").divisors() {
            if d == 1 {
                continue;
            }
            let odd_quotient = (half / d) % 2 == 1;
            push(SubgroupType::Cyclic(d), 1, false);
            // D2 = V4 is never self-normalising
            push(
                SubgroupType::Dihedral(d),
                if odd_quotient { 1 } else { 2 },
                d > 2 && odd_quotient,
            );
        }
    }
    for e in factorize(minus).expect("minus > 0").divisors() {
        push(SubgroupType::Affine { p, e }, 1, e == minus);
    }
    push(SubgroupType::A4, if sigma { 2 } else { 1 }, !sigma);
    if sigma {
        push(SubgroupType::S4, 2, true);
    }
    if prof.alpha == 1 {
        push(SubgroupType::A5, 2, true);
    }
    Ok(ClassCensus { p, entries })
}
