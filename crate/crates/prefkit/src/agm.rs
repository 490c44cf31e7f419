//! Semantic belief-change operators over finite model sets: revision and
//! contraction as extensional tables, entrenchment as a relation on model
//! sets, postulate checkers for each, and the four interdefinability
//! transforms between them.
//!
//! Postulate identifiers used in reports:
//!
//! | id      | statement |
//! |---------|-----------|
//! | `rev_2` | X\|A ⊆ A |
//! | `rev_3` | X∩A ⊆ X\|A |
//! | `rev_4` | X∩A ≠ ∅ ⇒ X\|A ⊆ X∩A |
//! | `rev_5` | X\|A = ∅ ⇒ A = ∅ |
//! | `rev_7` | (X\|A)∩B ⊆ X\|(A∩B) |
//! | `rev_8` | (X\|A)∩B ≠ ∅ ⇒ X\|(A∩B) ⊆ (X\|A)∩B |
//! | `con_2` | X ⊆ X⊖A |
//! | `con_3` | X ⊈ A ⇒ X⊖A = X |
//! | `con_4` | A ≠ U ⇒ X⊖A ⊈ A |
//! | `con_5` | (X⊖A)∩A ⊆ X |
//! | `con_7` | X⊖(A∩B) ⊆ (X⊖A)∪(X⊖B) |
//! | `con_8` | X⊖(A∩B) ⊈ A ⇒ X⊖A ⊆ X⊖(A∩B) |
//! | `ee_1`  | ≤ is transitive |
//! | `ee_2`  | A ⊆ B ⇒ A ≤ B |
//! | `ee_3`  | A ≤ A∩B or B ≤ A∩B |
//! | `ee_4`  | X ≠ ∅ ⇒ (X ⊈ A iff ∀B. A ≤ B) |
//! | `ee_5`  | (∀B. B ≤ A) ⇒ A = U |

use crate::logic::{DomainFamily, ModelSet};
use crate::report::{PropertyVerdict, Report, Witness, WitnessValue};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Errors raised by the belief-change layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AgmError {
    #[error("ambient space mismatch")]
    SpaceMismatch,
    #[error("operator map misses family argument {0}")]
    MissingArgument(String),
    #[error("operator map argument {0} is outside the family")]
    ForeignArgument(String),
    #[error("transform needs a value at {0}, which the family lacks")]
    MissingComplement(String),
    #[error("relation pair ({0}, {1}) mentions a set outside the family")]
    ForeignPair(String, String),
}

/// The full family of all model sets over a space (the default argument
/// family for belief-change operators).
pub fn full_family(space: usize) -> DomainFamily {
    DomainFamily::powerset_of(&ModelSet::full(space), true)
}

fn validate_table(
    base: &ModelSet,
    family: &DomainFamily,
    map: &BTreeMap<ModelSet, ModelSet>,
) -> Result<(), AgmError> {
    if base.space() != family.space() {
        return Err(AgmError::SpaceMismatch);
    }
    for key in map.keys() {
        if !family.contains(key) {
            return Err(AgmError::ForeignArgument(key.to_string()));
        }
        if key.space() != base.space() {
            return Err(AgmError::SpaceMismatch);
        }
    }
    for a in family.sets() {
        if !map.contains_key(a) {
            return Err(AgmError::MissingArgument(a.to_string()));
        }
    }
    Ok(())
}

/// A revision table: for every argument set `A` of its family, the
/// revised set `X|A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RevisionOperator {
    base: ModelSet,
    family: DomainFamily,
    map: BTreeMap<ModelSet, ModelSet>,
}

impl RevisionOperator {
    pub fn new(
        base: ModelSet,
        family: DomainFamily,
        map: BTreeMap<ModelSet, ModelSet>,
    ) -> Result<Self, AgmError> {
        validate_table(&base, &family, &map)?;
        Ok(RevisionOperator { base, family, map })
    }

    pub fn base(&self) -> &ModelSet {
        &self.base
    }

    pub fn family(&self) -> &DomainFamily {
        &self.family
    }

    pub fn map(&self) -> &BTreeMap<ModelSet, ModelSet> {
        &self.map
    }

    pub fn get(&self, a: &ModelSet) -> Option<&ModelSet> {
        self.map.get(a)
    }

    /// Extensional equality of the tables (base and map).
    pub fn same_table(&self, other: &RevisionOperator) -> bool {
        self.base == other.base && self.map == other.map
    }
}

/// A contraction table: for every argument set `A` of its family, the
/// contracted set `X⊖A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionOperator {
    base: ModelSet,
    family: DomainFamily,
    map: BTreeMap<ModelSet, ModelSet>,
}

impl ContractionOperator {
    pub fn new(
        base: ModelSet,
        family: DomainFamily,
        map: BTreeMap<ModelSet, ModelSet>,
    ) -> Result<Self, AgmError> {
        validate_table(&base, &family, &map)?;
        Ok(ContractionOperator { base, family, map })
    }

    pub fn base(&self) -> &ModelSet {
        &self.base
    }

    pub fn family(&self) -> &DomainFamily {
        &self.family
    }

    pub fn map(&self) -> &BTreeMap<ModelSet, ModelSet> {
        &self.map
    }

    pub fn get(&self, a: &ModelSet) -> Option<&ModelSet> {
        self.map.get(a)
    }

    pub fn same_table(&self, other: &ContractionOperator) -> bool {
        self.base == other.base && self.map == other.map
    }
}

/// An entrenchment relation: ordered pairs `(A, B)` meaning `A ≤ B`
/// ("B is at least as entrenched as A") over a family of model sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntrenchmentRelation {
    base: ModelSet,
    family: DomainFamily,
    rel: BTreeSet<(ModelSet, ModelSet)>,
}

impl EntrenchmentRelation {
    pub fn new(
        base: ModelSet,
        family: DomainFamily,
        rel: BTreeSet<(ModelSet, ModelSet)>,
    ) -> Result<Self, AgmError> {
        if base.space() != family.space() {
            return Err(AgmError::SpaceMismatch);
        }
        for (a, b) in &rel {
            if !family.contains(a) || !family.contains(b) {
                return Err(AgmError::ForeignPair(a.to_string(), b.to_string()));
            }
        }
        Ok(EntrenchmentRelation { base, family, rel })
    }

    pub fn base(&self) -> &ModelSet {
        &self.base
    }

    pub fn family(&self) -> &DomainFamily {
        &self.family
    }

    pub fn pairs(&self) -> &BTreeSet<(ModelSet, ModelSet)> {
        &self.rel
    }

    /// Whether `A ≤ B` holds.
    pub fn le(&self, a: &ModelSet, b: &ModelSet) -> bool {
        self.rel.contains(&(a.clone(), b.clone()))
    }

    /// The strict part: `A < B` iff `A ≤ B` and not `B ≤ A`.
    pub fn lt(&self, a: &ModelSet, b: &ModelSet) -> bool {
        self.le(a, b) && !self.le(b, a)
    }
}

struct Scan {
    checked: u64,
    skipped: u64,
    witness: Option<Witness>,
}

impl Scan {
    fn new() -> Self {
        Scan {
            checked: 0,
            skipped: 0,
            witness: None,
        }
    }

    fn decide(&mut self, ok: bool, witness: impl FnOnce() -> Witness) -> bool {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
            return false;
        }
        ok
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }

    fn verdict(self, id: &str) -> PropertyVerdict {
        match self.witness {
            None => PropertyVerdict::pass(id, self.checked, self.skipped),
            Some(w) => PropertyVerdict::fail(id, self.checked, self.skipped, w),
        }
    }
}

fn set_witness(slots: &[(&str, &ModelSet)]) -> Witness {
    let mut w = Witness::new();
    for (name, value) in slots {
        w = w.with(name, WitnessValue::Set(value.members()));
    }
    w
}

/// Checks the revision postulates, one verdict per postulate.
pub fn check_revision(rev: &RevisionOperator) -> Report {
    let mut report = Report::new("revision postulates");
    let sets = rev.family().sets();

    let mut s2 = Scan::new();
    let mut s3 = Scan::new();
    let mut s4 = Scan::new();
    let mut s5 = Scan::new();
    for a in sets {
        let ra = &rev.map()[a];
        let xa = rev.base().inter(a);
        s2.decide(ra.is_subset(a), || set_witness(&[("A", a), ("X|A", ra)]));
        s3.decide(xa.is_subset(ra), || set_witness(&[("A", a), ("X|A", ra)]));
        if xa.is_empty() {
            s4.checked += 1;
        } else {
            s4.decide(ra.is_subset(&xa), || set_witness(&[("A", a), ("X|A", ra)]));
        }
        s5.decide(!ra.is_empty() || a.is_empty(), || set_witness(&[("A", a)]));
    }
    report.push_verdict(s2.verdict("rev_2"));
    report.push_verdict(s3.verdict("rev_3"));
    report.push_verdict(s4.verdict("rev_4"));
    report.push_verdict(s5.verdict("rev_5"));

    let mut s7 = Scan::new();
    let mut s8 = Scan::new();
    for a in sets {
        let ra = &rev.map()[a];
        for b in sets {
            let lhs = ra.inter(b);
            match rev.get(&a.inter(b)) {
                None => {
                    s7.skip();
                    if lhs.is_empty() {
                        s8.checked += 1;
                    } else {
                        s8.skip();
                    }
                }
                Some(rab) => {
                    s7.decide(lhs.is_subset(rab), || {
                        set_witness(&[("A", a), ("B", b), ("X|A", ra), ("X|(A∩B)", rab)])
                    });
                    if lhs.is_empty() {
                        s8.checked += 1;
                    } else {
                        s8.decide(rab.is_subset(&lhs), || {
                            set_witness(&[("A", a), ("B", b), ("X|A", ra), ("X|(A∩B)", rab)])
                        });
                    }
                }
            }
        }
    }
    report.push_verdict(s7.verdict("rev_7"));
    report.push_verdict(s8.verdict("rev_8"));
    report
}

/// Checks the contraction postulates, one verdict per postulate.
pub fn check_contraction(con: &ContractionOperator) -> Report {
    let mut report = Report::new("contraction postulates");
    let sets = con.family().sets();
    let x = con.base();
    let u = ModelSet::full(x.space());

    let mut s2 = Scan::new();
    let mut s3 = Scan::new();
    let mut s4 = Scan::new();
    let mut s5 = Scan::new();
    for a in sets {
        let ca = &con.map()[a];
        s2.decide(x.is_subset(ca), || set_witness(&[("A", a), ("X⊖A", ca)]));
        if x.is_subset(a) {
            s3.checked += 1;
        } else {
            s3.decide(ca == x, || set_witness(&[("A", a), ("X⊖A", ca)]));
        }
        if a == &u {
            s4.checked += 1;
        } else {
            s4.decide(!ca.is_subset(a), || set_witness(&[("A", a), ("X⊖A", ca)]));
        }
        s5.decide(ca.inter(a).is_subset(x), || {
            set_witness(&[("A", a), ("X⊖A", ca)])
        });
    }
    report.push_verdict(s2.verdict("con_2"));
    report.push_verdict(s3.verdict("con_3"));
    report.push_verdict(s4.verdict("con_4"));
    report.push_verdict(s5.verdict("con_5"));

    let mut s7 = Scan::new();
    let mut s8 = Scan::new();
    for a in sets {
        let ca = &con.map()[a];
        for b in sets {
            let cb = &con.map()[b];
            match con.get(&a.inter(b)) {
                None => {
                    s7.skip();
                    s8.skip();
                }
                Some(cab) => {
                    s7.decide(cab.is_subset(&ca.union(cb)), || {
                        set_witness(&[("A", a), ("B", b), ("X⊖(A∩B)", cab)])
                    });
                    if cab.is_subset(a) {
                        s8.checked += 1;
                    } else {
                        s8.decide(ca.is_subset(cab), || {
                            set_witness(&[("A", a), ("B", b), ("X⊖A", ca), ("X⊖(A∩B)", cab)])
                        });
                    }
                }
            }
        }
    }
    report.push_verdict(s7.verdict("con_7"));
    report.push_verdict(s8.verdict("con_8"));
    report
}

/// Checks the entrenchment postulates, one verdict per postulate.
pub fn check_entrenchment(ee: &EntrenchmentRelation) -> Report {
    let mut report = Report::new("entrenchment postulates");
    let sets = ee.family().sets();
    let x = ee.base();
    let u = ModelSet::full(x.space());

    let mut s1 = Scan::new();
    'ee1: for a in sets {
        for b in sets {
            if !ee.le(a, b) {
                continue;
            }
            for c in sets {
                if ee.le(b, c)
                    && !s1.decide(ee.le(a, c), || {
                        set_witness(&[("A", a), ("B", b), ("C", c)])
                    })
                {
                    break 'ee1;
                }
            }
        }
    }
    report.push_verdict(s1.verdict("ee_1"));

    let mut s2 = Scan::new();
    for a in sets {
        for b in sets {
            if a.is_subset(b) {
                s2.decide(ee.le(a, b), || set_witness(&[("A", a), ("B", b)]));
            }
        }
    }
    report.push_verdict(s2.verdict("ee_2"));

    let mut s3 = Scan::new();
    for a in sets {
        for b in sets {
            let ab = a.inter(b);
            if !ee.family().contains(&ab) {
                s3.skip();
                continue;
            }
            s3.decide(ee.le(a, &ab) || ee.le(b, &ab), || {
                set_witness(&[("A", a), ("B", b)])
            });
        }
    }
    report.push_verdict(s3.verdict("ee_3"));

    let mut s4 = Scan::new();
    if x.is_empty() {
        s4.checked = sets.len() as u64;
    } else {
        for a in sets {
            let not_held = !x.is_subset(a);
            let bottom = sets.iter().all(|b| ee.le(a, b));
            s4.decide(not_held == bottom, || set_witness(&[("A", a)]));
        }
    }
    report.push_verdict(s4.verdict("ee_4"));

    let mut s5 = Scan::new();
    for a in sets {
        if sets.iter().all(|b| ee.le(b, a)) {
            s5.decide(a == &u, || set_witness(&[("A", a)]));
        } else {
            s5.checked += 1;
        }
    }
    report.push_verdict(s5.verdict("ee_5"));
    report
}

/// The overlap identity `(X|A)∩B ≠ ∅ ⇒ X|(A∩B) = (X|A)∩B`, a
/// consequence of `rev_7` and `rev_8` together. Pairs whose intersection
/// lies outside the family are skipped.
pub fn check_overlap_identity(rev: &RevisionOperator) -> PropertyVerdict {
    let sets = rev.family().sets();
    let mut scan = Scan::new();
    for a in sets {
        let ra = &rev.map()[a];
        for b in sets {
            let lhs = ra.inter(b);
            if lhs.is_empty() {
                scan.checked += 1;
                continue;
            }
            match rev.get(&a.inter(b)) {
                None => scan.skip(),
                Some(rab) => {
                    scan.decide(rab == &lhs, || {
                        set_witness(&[("A", a), ("B", b), ("X|A", ra), ("X|(A∩B)", rab)])
                    });
                }
            }
        }
    }
    scan.verdict("overlap_identity")
}

/// `X|A := (X ⊖ 𝒞A) ∩ A`: revision defined from contraction. The
/// contraction's family must contain the complement of every argument.
pub fn revision_from_contraction(con: &ContractionOperator) -> Result<RevisionOperator, AgmError> {
    let space = con.base().space();
    let u = ModelSet::full(space);
    let mut map = BTreeMap::new();
    for a in con.family().sets() {
        let comp = u.minus(a);
        let value = con
            .get(&comp)
            .ok_or_else(|| AgmError::MissingComplement(comp.to_string()))?;
        map.insert(a.clone(), value.inter(a));
    }
    RevisionOperator::new(con.base().clone(), con.family().clone(), map)
}

/// `X⊖A := X ∪ (X | 𝒞A)`: contraction defined from revision. The
/// revision's family must contain the complement of every argument.
pub fn contraction_from_revision(rev: &RevisionOperator) -> Result<ContractionOperator, AgmError> {
    let space = rev.base().space();
    let u = ModelSet::full(space);
    let mut map = BTreeMap::new();
    for a in rev.family().sets() {
        let comp = u.minus(a);
        let value = rev
            .get(&comp)
            .ok_or_else(|| AgmError::MissingComplement(comp.to_string()))?;
        map.insert(a.clone(), rev.base().union(value));
    }
    ContractionOperator::new(rev.base().clone(), rev.family().clone(), map)
}

/// `X⊖A := X` when `A = U`, otherwise `⋂{B : X ⊆ B ⊆ U, A < A∪B}` with
/// the strict part of the entrenchment relation; an empty intersection
/// yields `U`.
pub fn contraction_from_entrenchment(
    ee: &EntrenchmentRelation,
) -> Result<ContractionOperator, AgmError> {
    let space = ee.base().space();
    let u = ModelSet::full(space);
    let x = ee.base();
    let mut map = BTreeMap::new();
    for a in ee.family().sets() {
        let value = if a == &u {
            x.clone()
        } else {
            let mut acc = u.clone();
            for b in ee.family().sets() {
                if x.is_subset(b) && ee.lt(a, &a.union(b)) {
                    acc = acc.inter(b);
                }
            }
            acc
        };
        map.insert(a.clone(), value);
    }
    ContractionOperator::new(x.clone(), ee.family().clone(), map)
}

/// `A ≤ B :⟺ A∩B = U or X⊖(A∩B) ⊈ A`: entrenchment defined from
/// contraction. Pairs whose intersection lies outside the contraction's
/// family are left unrelated.
pub fn entrenchment_from_contraction(
    con: &ContractionOperator,
) -> Result<EntrenchmentRelation, AgmError> {
    let space = con.base().space();
    let u = ModelSet::full(space);
    let mut rel = BTreeSet::new();
    for a in con.family().sets() {
        for b in con.family().sets() {
            let ab = a.inter(b);
            let related = if ab == u {
                true
            } else {
                match con.get(&ab) {
                    None => continue,
                    Some(cab) => !cab.is_subset(a),
                }
            };
            if related {
                rel.insert((a.clone(), b.clone()));
            }
        }
    }
    EntrenchmentRelation::new(con.base().clone(), con.family().clone(), rel)
}

/// The full-meet-flavoured revision `X|A := X∩A` when nonempty, else `A`.
/// Satisfies every checked postulate; a convenient stock operator.
pub fn overlap_or_argument_revision(base: ModelSet, family: DomainFamily) -> RevisionOperator {
    let map = family
        .sets()
        .iter()
        .map(|a| {
            let xa = base.inter(a);
            let value = if xa.is_empty() { a.clone() } else { xa };
            (a.clone(), value)
        })
        .collect();
    RevisionOperator::new(base, family, map).expect("family-aligned table")
}
