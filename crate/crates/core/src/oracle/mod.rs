//! Brute-force subgroup census of PSL₂(p) for small p.
//!
//! The group is built as permutations of the projective line, every
//! subgroup is enumerated, and subgroups are sorted into conjugacy classes
//! and labelled by isomorphism type. Nothing here uses the closed formulas,
//! so the result can be used to check them.

mod classify;
mod group;
mod lattice;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::invariants::{ClassCensus, ClassEntry, SubgroupKind, SubgroupType};

pub use classify::{
    catalogue_fingerprint, classify, fingerprint, label_of, Fingerprint, OracleClass, OracleLabel,
};
pub use group::{Elem, PermGroup};
pub use lattice::{closure, conjugate, cyclic, enumerate_subgroups, Subgroup, DEFAULT_SUBGROUP_CAP};

/// Largest p handled without opting in.
pub const DEFAULT_MAX_P: u64 = 13;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("p = {0} is outside the supported primes 3..=19")]
    OutOfRange(u64),
    #[error("p = {0} needs the large-group opt-in (takes minutes)")]
    NeedsOptIn(u64),
    #[error("more than {cap} subgroups")]
    TooManySubgroups { cap: usize },
    #[error("unrecognized type: {0}")]
    Unrecognized(String),
    #[error("several catalogue types fit: {0}")]
    Ambiguous(String),
    #[error("classes labelled {0} disagree on self-normalisation")]
    FlagDisagreement(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Allows p = 17 and 19.
    pub allow_large: bool,
    pub subgroup_cap: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            allow_large: false,
            subgroup_cap: DEFAULT_SUBGROUP_CAP,
        }
    }
}

/// One line of the lattice dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeClass {
    pub order: usize,
    pub class_size: usize,
    pub normaliser_order: usize,
    pub label: String,
}

/// Everything computed for one group.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub group: PermGroup,
    pub subgroups: Vec<Subgroup>,
    pub classes: Vec<OracleClass>,
}

pub fn build_psl2(p: u64, opts: &OracleOptions) -> Result<PermGroup, OracleError> {
    if p > DEFAULT_MAX_P && p <= PermGroup::MAX_P && !opts.allow_large {
        PermGroup::psl2(p)?; // still rejects composites first
        return Err(OracleError::NeedsOptIn(p));
    }
    PermGroup::psl2(p)
}

pub fn run_oracle(p: u64, opts: &OracleOptions) -> Result<OracleRun, OracleError> {
    if p > DEFAULT_MAX_P && !opts.allow_large {
        // avoid building the group just to refuse it
        if p <= PermGroup::MAX_P && crate::arith::is_prime(p) {
            return Err(OracleError::NeedsOptIn(p));
        }
        return Err(OracleError::OutOfRange(p));
    }
    let group = build_psl2(p, opts)?;
    let subgroups = enumerate_subgroups(&group, opts.subgroup_cap)?;
    let classes = classify(&group, &subgroups)?;
    Ok(OracleRun {
        group,
        subgroups,
        classes,
    })
}

impl OracleRun {
    pub fn p(&self) -> u64 {
        self.group.p()
    }

    pub fn representative(&self, class: &OracleClass) -> &Subgroup {
        &self.subgroups[class.representative]
    }

    /// Position of a subgroup with the same members, if enumerated.
    pub fn index_of(&self, h: &Subgroup) -> Option<usize> {
        self.subgroups.iter().position(|s| s.bits() == h.bits())
    }

    /// Classes sorted by subgroup order, then label.
    pub fn lattice(&self) -> Vec<LatticeClass> {
        let mut out: Vec<(usize, OracleLabel, usize, usize)> = self
            .classes
            .iter()
            .map(|c| (c.order, c.label, c.class_size, c.normaliser_order))
            .collect();
        out.sort();
        out.into_iter()
            .map(|(order, label, class_size, normaliser_order)| LatticeClass {
                order,
                class_size,
                normaliser_order,
                label: label.to_string(),
            })
            .collect()
    }

    pub fn lattice_json(&self) -> serde_json::Value {
        serde_json::to_value(self.lattice()).expect("lattice serializes")
    }

    /// Groups the proper non-identity classes by label.
    pub fn census(&self) -> Result<ClassCensus, OracleError> {
        let mut by_type: BTreeMap<SubgroupType, (u8, bool)> = BTreeMap::new();
        for class in &self.classes {
            let OracleLabel::Proper(ty) = class.label else {
                continue;
            };
            let sn = class.self_normalising();
            match by_type.get_mut(&ty) {
                Some((n, flag)) => {
                    if *flag != sn {
                        return Err(OracleError::FlagDisagreement(ty.label()));
                    }
                    *n += 1;
                }
                None => {
                    by_type.insert(ty, (1, sn));
                }
            }
        }
        let p = self.p();
        Ok(ClassCensus {
            p,
            entries: by_type
                .into_iter()
                .map(|(ty, (num_classes, self_normalising))| ClassEntry {
                    ty,
                    kind: SubgroupKind::of(ty, p),
                    num_classes,
                    self_normalising,
                })
                .collect(),
        })
    }
}

/// Census of PSL₂(p) computed by exhaustive enumeration.
pub fn oracle_census(p: u64, opts: &OracleOptions) -> Result<ClassCensus, OracleError> {
    run_oracle(p, opts)?.census()
}
