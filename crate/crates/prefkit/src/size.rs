//! Abstract size over finite base sets: filters and ideals, coherence of
//! size judgments across different bases, the bridge between principal
//! size systems and choice functions, and a finite evaluator for the
//! normality quantifier `∇`.
//!
//! A [`Filter`] over a non-empty base records which subsets count as "big";
//! the complements of big sets are "small" and everything else has medium
//! size. [`check_filter`] scans the family conditions and their duals on
//! the complement family:
//!
//! | id            | condition |
//! |---------------|-----------|
//! | `f_all`       | `X ∈ ℱ(X)` |
//! | `f_up`        | `A ⊆ B ⊆ X, A ∈ ℱ(X) ⇒ B ∈ ℱ(X)` |
//! | `f_cap`       | `A, B ∈ ℱ(X) ⇒ A ∩ B ∈ ℱ(X)` |
//! | `f_cap_prime` | `A, B ∈ ℱ(X) ⇒ A ∩ B ≠ ∅` |
//! | `i_empty`     | `∅ ∈ ℐ(X)` |
//! | `i_down`      | `A ⊆ B ⊆ X, B ∈ ℐ(X) ⇒ A ∈ ℐ(X)` |
//! | `i_cup`       | `A, B ∈ ℐ(X) ⇒ A ∪ B ∈ ℐ(X)` |
//! | `i_cup_prime` | `A, B ∈ ℐ(X) ⇒ A ∪ B ≠ X` |
//!
//! A strong filter satisfies `f_all`, `f_up`, `f_cap`; a weak filter
//! satisfies `f_all`, `f_up`, `f_cap_prime`.
//!
//! A [`FilterSystem`] assigns a filter to every base in a domain family,
//! and [`check_coherence`] scans how size judgments travel between bases.
//! Writing `ℐ(X)` for the sets whose complement in `X` is big:
//!
//! | id             | condition |
//! |----------------|-----------|
//! | `r_up`         | `X ⊆ Y ⇒ ℐ(X) ⊆ ℐ(Y)` |
//! | `r_down`       | v1: `A, B ∈ ℐ(X) ⇒ A−B ∈ ℐ(X−B)`; v2: `A ∈ ℱ(X), B ∈ ℐ(X) ⇒ A−B ∈ ℱ(X−B)` |
//! | `r_union_disj` | `A ∈ ℐ(X), B ∈ ℐ(Y), X ∩ Y = ∅ ⇒ A ∪ B ∈ ℐ(X ∪ Y)` |
//! | `r_down_down`  | v1: `A ∈ ℐ(X), B ∉ ℱ(X) ⇒ A−B ∈ ℐ(X−B)`; v2: `A ∈ ℱ(X), B ∉ ℱ(X) ⇒ A−B ∈ ℱ(X−B)`; v3: `A ∈ ℳ⁺(X), X ∈ ℳ⁺(Y) ⇒ A ∈ ℳ⁺(Y)` |
//!
//! where `ℳ⁺(X)` holds the subsets of `X` that are not small in `X`.
//! The printed versions of `r_down` and `r_down_down` agree on systems
//! whose bases are closed under set difference and whose filters are
//! upward closed; [`coherence_versions`] exposes the per-version verdicts
//! so that agreement can be asserted.
//!
//! The bridge: a choice function `f` picking inside its argument induces
//! the principal system `ℱ(X) := {X′ : f(X) ⊆ X′ ⊆ X}`
//! ([`filter_from_choice`]); conversely a system of principal filters
//! induces `f(X) :=` the least big set ([`choice_from_filter`]). Under
//! this bridge, on a full power-set domain, coherence conditions
//! correspond to model-side choice conditions row by row
//! ([`check_refclass_row`]):
//!
//! | row | coherence side        | choice side  |
//! |-----|-----------------------|--------------|
//! | 1   | `r_up`                | `mu_wOR`     |
//! | 2   | `r_up` + `i_cup`      | `mu_OR`      |
//! | 3   | `r_up` + `i_cup`      | `mu_PR`      |
//! | 4   | `r_union_disj`        | `mu_disjOR`  |
//! | 5   | `r_down`              | `mu_CM`      |
//! | 6   | `r_down_down`         | `mu_RatM`    |
//!
//! Finally, [`NStructure`] equips a finite domain with monadic predicates
//! and a neighbourhood system (one weak filter per queried subset), and
//! [`eval_nabla`] evaluates formulas of the single-variable fragment with
//! the quantifier `∇`: `∇x φ(x)` holds iff some neighbourhood of the whole
//! domain sits inside the extension of `φ`, and the restricted
//! `∇x φ(x):ψ(x)` holds iff some neighbourhood of `ext(φ)` sits inside
//! `ext(ψ)` (vacuously true when `ext(φ)` is empty).
//! [`check_nabla_axioms`] tests every instance of the quantifier schemata
//! over a formula pool.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::choice::{check_mu_property, ChoiceFunction, MuProperty};
use crate::logic::{DomainFamily, ModelSet};
use crate::report::{PropertyVerdict, Report, Witness, WitnessValue};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Input-shape errors for size families, systems, and `∇` structures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SizeError {
    /// Two objects live in different ambient spaces.
    #[error("ambient space mismatch: {0} vs {1}")]
    SpaceMismatch(usize, usize),
    /// A filter needs a non-empty base set.
    #[error("a size family needs a non-empty base set")]
    EmptyBase,
    /// A family member is not a subset of the base.
    #[error("family member {0} is not a subset of the base {1}")]
    MemberOutsideBase(String, String),
    /// The declared principal generator does not regenerate the family.
    #[error("declared generator {0} does not regenerate the family")]
    GeneratorMismatch(String),
    /// A system entry's filter base differs from its key.
    #[error("filter stored at base {0} actually has base {1}")]
    BaseMismatch(String, String),
    /// A base of the system's family has no filter entry.
    #[error("no filter entry for base {0}")]
    MissingBase(String),
    /// A map key is not a member of the system's base family.
    #[error("filter entry at {0} is outside the base family")]
    ForeignBase(String),
    /// `r_down`/`r_down_down` require difference-closed base families.
    #[error("the base family is not closed under set difference")]
    NotDifferenceClosed,
    /// The bridge needs choice values inside their argument.
    #[error("choice function must pick inside its argument: f({0}) = {1}")]
    ChoiceOutsideArgument(String, String),
    /// The inverse bridge needs a least big set at every base.
    #[error("the filter on {0} has no least member, so no choice value exists")]
    NotPrincipal(String),
    /// The row correspondence is stated on full power-set domains.
    #[error("the row correspondence needs the full power-set domain")]
    DomainNotFullPowerset,
    /// Row index out of range.
    #[error("row {0} does not exist; rows are numbered 1 to 6")]
    NoSuchRow(u8),
    /// A neighbourhood family fails a weak-filter condition.
    #[error("the family on {0} is not a weak filter: {1} fails")]
    NotWeakFilter(String, String),
    /// `∇` structures need at least one element.
    #[error("the domain of a quantifier structure must be non-empty")]
    EmptyDomain,
    /// A formula names a predicate the structure does not interpret.
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    /// A predicate atom occurs outside every quantifier.
    #[error("formula is not closed: a predicate occurs outside every quantifier")]
    OpenFormula,
    /// The neighbourhood system has no entry for a queried subset.
    #[error("no neighbourhood entry for subset {0}")]
    MissingNeighborhood(String),
    /// Unreadable formula text.
    #[error("formula syntax error: {0}")]
    FormulaSyntax(String),
}

fn set_witness(slots: &[(&str, &ModelSet)]) -> Witness {
    let mut w = Witness::new();
    for (name, value) in slots {
        w = w.with(name, WitnessValue::Set(value.members()));
    }
    w
}

// ---------------------------------------------------------------------------
// Filters
// ---------------------------------------------------------------------------

/// Which family conditions a filter is claimed to satisfy: a strong filter
/// is closed under intersection, a weak filter only promises that two big
/// sets meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FilterKind {
    Strong,
    Weak,
}

impl FilterKind {
    pub fn id(self) -> &'static str {
        match self {
            FilterKind::Strong => "strong",
            FilterKind::Weak => "weak",
        }
    }

    pub fn from_id(id: &str) -> Option<FilterKind> {
        match id {
            "strong" => Some(FilterKind::Strong),
            "weak" => Some(FilterKind::Weak),
            _ => None,
        }
    }
}

/// An explicit size family over a non-empty base set: the members are the
/// "big" subsets of the base. The kind records which closure discipline
/// the family is claimed to follow; [`check_filter`] reports what actually
/// holds. An optional principal generator is validated to regenerate the
/// family exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    base: ModelSet,
    family: Vec<ModelSet>,
    kind: FilterKind,
    generator: Option<ModelSet>,
}

impl Filter {
    /// Builds a filter after validating that the base is non-empty, every
    /// member is a subset of the base, and the generator (when given)
    /// regenerates the family.
    pub fn new(
        base: ModelSet,
        family: Vec<ModelSet>,
        kind: FilterKind,
        generator: Option<ModelSet>,
    ) -> Result<Self, SizeError> {
        if base.is_empty() {
            return Err(SizeError::EmptyBase);
        }
        for a in &family {
            if a.space() != base.space() {
                return Err(SizeError::SpaceMismatch(a.space(), base.space()));
            }
            if !a.is_subset(&base) {
                return Err(SizeError::MemberOutsideBase(
                    a.to_string(),
                    base.to_string(),
                ));
            }
        }
        let mut family = family;
        family.sort();
        family.dedup();
        if let Some(g) = &generator {
            if g.space() != base.space() {
                return Err(SizeError::SpaceMismatch(g.space(), base.space()));
            }
            let regenerated: Vec<ModelSet> = base
                .subsets()
                .filter(|a| g.is_subset(a))
                .collect();
            let mut regenerated = regenerated;
            regenerated.sort();
            if regenerated != family {
                return Err(SizeError::GeneratorMismatch(g.to_string()));
            }
        }
        Ok(Filter {
            base,
            family,
            kind,
            generator,
        })
    }

    /// The principal filter `{A : generator ⊆ A ⊆ base}`.
    pub fn principal(base: ModelSet, generator: ModelSet) -> Result<Self, SizeError> {
        if generator.space() != base.space() {
            return Err(SizeError::SpaceMismatch(generator.space(), base.space()));
        }
        if !generator.is_subset(&base) {
            return Err(SizeError::MemberOutsideBase(
                generator.to_string(),
                base.to_string(),
            ));
        }
        let family: Vec<ModelSet> = base
            .subsets()
            .filter(|a| generator.is_subset(a))
            .collect();
        Filter::new(base, family, FilterKind::Strong, Some(generator))
    }

    pub fn base(&self) -> &ModelSet {
        &self.base
    }

    /// Member sets in canonical ascending order.
    pub fn family(&self) -> &[ModelSet] {
        &self.family
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    /// The declared generator hint, if any.
    pub fn generator_hint(&self) -> Option<&ModelSet> {
        self.generator.as_ref()
    }

    /// True iff `a` is big (a member of the family).
    pub fn is_big(&self, a: &ModelSet) -> bool {
        self.family.binary_search(a).is_ok()
    }

    /// True iff `a` is small: its complement in the base is big.
    pub fn is_small(&self, a: &ModelSet) -> bool {
        self.is_big(&self.base.minus(a))
    }

    /// True iff `a` is not small — it has medium or large size.
    pub fn in_m_plus(&self, a: &ModelSet) -> bool {
        !self.is_small(a)
    }

    /// The dual family `{base − A : A big}` — the small subsets, in
    /// canonical ascending order.
    pub fn ideal_family(&self) -> Vec<ModelSet> {
        let mut ideal: Vec<ModelSet> =
            self.family.iter().map(|a| self.base.minus(a)).collect();
        ideal.sort();
        ideal.dedup();
        ideal
    }

    /// The least member generating the family, when the family is exactly
    /// `{A : g ⊆ A ⊆ base}` for some `g`.
    pub fn principal_generator(&self) -> Option<ModelSet> {
        let first = self.family.first()?;
        let g = self
            .family
            .iter()
            .fold(first.clone(), |acc, a| acc.inter(a));
        let count = self.base.subsets().filter(|a| g.is_subset(a)).count();
        if count == self.family.len() && self.family.iter().all(|a| g.is_subset(a)) {
            Some(g)
        } else {
            None
        }
    }

    /// True iff every subset of the base is big or has a big complement.
    pub fn is_ultrafilter(&self) -> bool {
        self.base
            .subsets()
            .all(|a| self.is_big(&a) || self.is_big(&self.base.minus(&a)))
    }

    /// Verifies the weak-filter conditions (`f_all`, `f_up`,
    /// `f_cap_prime`), naming the first condition that fails.
    pub fn verify_weak_filter(&self) -> Result<(), SizeError> {
        let fail = |cond: &str| {
            Err(SizeError::NotWeakFilter(
                self.base.to_string(),
                cond.to_string(),
            ))
        };
        if !self.is_big(&self.base) {
            return fail("f_all");
        }
        for a in &self.family {
            for b in self.base.subsets() {
                if a.is_subset(&b) && !self.is_big(&b) {
                    return fail("f_up");
                }
            }
        }
        for a in &self.family {
            for b in &self.family {
                if !a.intersects(b) {
                    return fail("f_cap_prime");
                }
            }
        }
        Ok(())
    }
}

/// Scans every family condition on the filter and every dual condition on
/// its complement family, then classifies the filter (strong/weak verdict
/// summary, principality, ultrafilter).
pub fn check_filter(filter: &Filter) -> Report {
    let mut report = Report::new("size family conditions");
    let base = &filter.base;
    let family = filter.family();
    let ideal = filter.ideal_family();
    let in_ideal = |a: &ModelSet| ideal.binary_search(a).is_ok();

    // f_all: X ∈ ℱ(X)
    report.push_verdict(if filter.is_big(base) {
        PropertyVerdict::pass("f_all", 1, 0)
    } else {
        PropertyVerdict::fail("f_all", 1, 0, set_witness(&[("base", base)]))
    });

    // f_up: A ⊆ B ⊆ X, A ∈ ℱ(X) ⇒ B ∈ ℱ(X)
    {
        let mut checked = 0;
        let mut witness = None;
        for a in family {
            for b in base.subsets() {
                if !a.is_subset(&b) {
                    continue;
                }
                checked += 1;
                if witness.is_none() && !filter.is_big(&b) {
                    witness = Some(set_witness(&[("A", a), ("B", &b)]));
                }
            }
        }
        report.push_verdict(match witness {
            None => PropertyVerdict::pass("f_up", checked, 0),
            Some(w) => PropertyVerdict::fail("f_up", checked, 0, w),
        });
    }

    // f_cap: A, B ∈ ℱ(X) ⇒ A ∩ B ∈ ℱ(X)
    {
        let mut checked = 0;
        let mut witness = None;
        for a in family {
            for b in family {
                checked += 1;
                let ab = a.inter(b);
                if witness.is_none() && !filter.is_big(&ab) {
                    witness = Some(set_witness(&[("A", a), ("B", b), ("A ∩ B", &ab)]));
                }
            }
        }
        report.push_verdict(match witness {
            None => PropertyVerdict::pass("f_cap", checked, 0),
            Some(w) => PropertyVerdict::fail("f_cap", checked, 0, w),
        });
    }

    // f_cap_prime: A, B ∈ ℱ(X) ⇒ A ∩ B ≠ ∅
    {
        let mut checked = 0;
        let mut witness = None;
        for a in family {
            for b in family {
                checked += 1;
                if witness.is_none() && !a.intersects(b) {
                    witness = Some(set_witness(&[("A", a), ("B", b)]));
                }
            }
        }
        report.push_verdict(match witness {
            None => PropertyVerdict::pass("f_cap_prime", checked, 0),
            Some(w) => PropertyVerdict::fail("f_cap_prime", checked, 0, w),
        });
    }

    // i_empty: ∅ ∈ ℐ(X)
    {
        let empty = ModelSet::empty(base.space());
        report.push_verdict(if in_ideal(&empty) {
            PropertyVerdict::pass("i_empty", 1, 0)
        } else {
            PropertyVerdict::fail("i_empty", 1, 0, set_witness(&[("base", base)]))
        });
    }

    // i_down: A ⊆ B ⊆ X, B ∈ ℐ(X) ⇒ A ∈ ℐ(X)
    {
        let mut checked = 0;
        let mut witness = None;
        for b in &ideal {
            for a in b.subsets() {
                checked += 1;
                if witness.is_none() && !in_ideal(&a) {
                    witness = Some(set_witness(&[("A", &a), ("B", b)]));
                }
            }
        }
        report.push_verdict(match witness {
            None => PropertyVerdict::pass("i_down", checked, 0),
            Some(w) => PropertyVerdict::fail("i_down", checked, 0, w),
        });
    }

    // i_cup: A, B ∈ ℐ(X) ⇒ A ∪ B ∈ ℐ(X)
    {
        let mut checked = 0;
        let mut witness = None;
        for a in &ideal {
            for b in &ideal {
                checked += 1;
                let ab = a.union(b);
                if witness.is_none() && !in_ideal(&ab) {
                    witness = Some(set_witness(&[("A", a), ("B", b), ("A ∪ B", &ab)]));
                }
            }
        }
        report.push_verdict(match witness {
            None => PropertyVerdict::pass("i_cup", checked, 0),
            Some(w) => PropertyVerdict::fail("i_cup", checked, 0, w),
        });
    }

    // i_cup_prime: A, B ∈ ℐ(X) ⇒ A ∪ B ≠ X
    {
        let mut checked = 0;
        let mut witness = None;
        for a in &ideal {
            for b in &ideal {
                checked += 1;
                if witness.is_none() && a.union(b) == *base {
                    witness = Some(set_witness(&[("A", a), ("B", b)]));
                }
            }
        }
        report.push_verdict(match witness {
            None => PropertyVerdict::pass("i_cup_prime", checked, 0),
            Some(w) => PropertyVerdict::fail("i_cup_prime", checked, 0, w),
        });
    }

    let holds = |id: &str| report.verdict(id).map(|v| v.holds).unwrap_or(false);
    let strong = holds("f_all") && holds("f_up") && holds("f_cap");
    let weak = holds("f_all") && holds("f_up") && holds("f_cap_prime");
    report.push_note(format!(
        "strong filter conditions (f_all, f_up, f_cap): {}",
        if strong { "hold" } else { "fail" }
    ));
    report.push_note(format!(
        "weak filter conditions (f_all, f_up, f_cap_prime): {}",
        if weak { "hold" } else { "fail" }
    ));
    match filter.principal_generator() {
        Some(g) => report.push_note(format!("principal, generated by {g}")),
        None => report.push_note("not principal"),
    }
    report.push_note(if filter.is_ultrafilter() {
        "ultrafilter: every subset is big or has a big complement"
    } else {
        "not an ultrafilter"
    });
    report
}

// ---------------------------------------------------------------------------
// Filter systems and coherence
// ---------------------------------------------------------------------------

/// One filter per base set of a domain family: a system of local size
/// judgments whose coherence across bases [`check_coherence`] scans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterSystem {
    family: DomainFamily,
    map: BTreeMap<ModelSet, Filter>,
}

impl FilterSystem {
    /// Builds a system after validating that the map covers exactly the
    /// family's bases (all non-empty) and each filter sits on its key.
    pub fn new(
        family: DomainFamily,
        map: BTreeMap<ModelSet, Filter>,
    ) -> Result<Self, SizeError> {
        for base in family.sets() {
            if base.is_empty() {
                return Err(SizeError::EmptyBase);
            }
            match map.get(base) {
                None => return Err(SizeError::MissingBase(base.to_string())),
                Some(f) => {
                    if f.base() != base {
                        return Err(SizeError::BaseMismatch(
                            base.to_string(),
                            f.base().to_string(),
                        ));
                    }
                }
            }
        }
        for key in map.keys() {
            if key.space() != family.space() {
                return Err(SizeError::SpaceMismatch(key.space(), family.space()));
            }
            if !family.contains(key) {
                return Err(SizeError::ForeignBase(key.to_string()));
            }
        }
        Ok(FilterSystem { family, map })
    }

    /// The family of base sets.
    pub fn family(&self) -> &DomainFamily {
        &self.family
    }

    pub fn filter(&self, base: &ModelSet) -> Option<&Filter> {
        self.map.get(base)
    }

    pub fn map(&self) -> &BTreeMap<ModelSet, Filter> {
        &self.map
    }

    fn big(&self, base: &ModelSet, a: &ModelSet) -> bool {
        self.map[base].is_big(a)
    }

    fn small(&self, base: &ModelSet, a: &ModelSet) -> bool {
        self.map[base].is_small(a)
    }

    fn m_plus(&self, base: &ModelSet, a: &ModelSet) -> bool {
        self.map[base].in_m_plus(a)
    }
}

/// The coherence conditions relating size judgments on different bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceCondition {
    /// `r_up`: small stays small in supersets.
    RUp,
    /// `r_down`: removing a small set keeps small sets small (two
    /// printed versions).
    RDown,
    /// `r_union_disj`: small unions over disjoint bases stay small.
    RUnionDisj,
    /// `r_down_down`: removing a non-big set keeps small sets small
    /// (three printed versions, the third phrased as transitivity of
    /// "not small in").
    RDownDown,
}

impl CoherenceCondition {
    pub const ALL: [CoherenceCondition; 4] = [
        CoherenceCondition::RUp,
        CoherenceCondition::RDown,
        CoherenceCondition::RUnionDisj,
        CoherenceCondition::RDownDown,
    ];

    pub fn id(self) -> &'static str {
        match self {
            CoherenceCondition::RUp => "r_up",
            CoherenceCondition::RDown => "r_down",
            CoherenceCondition::RUnionDisj => "r_union_disj",
            CoherenceCondition::RDownDown => "r_down_down",
        }
    }

    pub fn from_id(id: &str) -> Option<CoherenceCondition> {
        CoherenceCondition::ALL.into_iter().find(|c| c.id() == id)
    }
}

struct CoherenceScan {
    checked: u64,
    skipped: u64,
    witness: Option<Witness>,
}

impl CoherenceScan {
    fn new() -> Self {
        CoherenceScan {
            checked: 0,
            skipped: 0,
            witness: None,
        }
    }

    fn note(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
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

/// `r_up`: for bases `X ⊆ Y`, every set small in `X` is small in `Y`.
fn scan_r_up(sys: &FilterSystem) -> PropertyVerdict {
    let mut scan = CoherenceScan::new();
    for x in sys.family.sets() {
        for y in sys.family.sets() {
            if !x.is_subset(y) {
                continue;
            }
            for a in x.subsets() {
                if !sys.small(x, &a) {
                    continue;
                }
                scan.note(sys.small(y, &a), || {
                    set_witness(&[("X", x), ("Y", y), ("A", &a)])
                });
            }
        }
    }
    scan.verdict("r_up")
}

/// The shared scan shape of `r_down` (small `B`) and `r_down_down`
/// (non-big `B`), in both the ideal-side (v1) and filter-side (v2)
/// readings. Instances whose shrunken base is absent from the system are
/// counted as skipped.
fn scan_removal(
    sys: &FilterSystem,
    id: &str,
    b_admissible: impl Fn(&ModelSet, &ModelSet) -> bool,
    a_side_small: bool,
) -> PropertyVerdict {
    let mut scan = CoherenceScan::new();
    for x in sys.family.sets() {
        for b in x.subsets() {
            if !b_admissible(x, &b) {
                continue;
            }
            let rest = x.minus(&b);
            let present = sys.family.contains(&rest);
            for a in x.subsets() {
                let a_in = if a_side_small {
                    sys.small(x, &a)
                } else {
                    sys.big(x, &a)
                };
                if !a_in {
                    continue;
                }
                if !present {
                    scan.skip();
                    continue;
                }
                let diff = a.minus(&b);
                let ok = if a_side_small {
                    sys.small(&rest, &diff)
                } else {
                    sys.big(&rest, &diff)
                };
                scan.note(ok, || {
                    set_witness(&[("X", x), ("A", &a), ("B", &b), ("X − B", &rest), ("A − B", &diff)])
                });
            }
        }
    }
    scan.verdict(id)
}

/// `r_union_disj`: over disjoint bases, the union of small sets is small
/// in the union base. Instances whose union base is absent are skipped.
fn scan_r_union_disj(sys: &FilterSystem) -> PropertyVerdict {
    let mut scan = CoherenceScan::new();
    for x in sys.family.sets() {
        for y in sys.family.sets() {
            if !x.is_disjoint(y) {
                continue;
            }
            let xy = x.union(y);
            let present = sys.family.contains(&xy);
            for a in x.subsets() {
                if !sys.small(x, &a) {
                    continue;
                }
                for b in y.subsets() {
                    if !sys.small(y, &b) {
                        continue;
                    }
                    if !present {
                        scan.skip();
                        continue;
                    }
                    let ab = a.union(&b);
                    scan.note(sys.small(&xy, &ab), || {
                        set_witness(&[("X", x), ("Y", y), ("A", &a), ("B", &b), ("A ∪ B", &ab)])
                    });
                }
            }
        }
    }
    scan.verdict("r_union_disj")
}

/// `r_down_down` v3: the relation "is not small in" is transitive across
/// bases of the system: `A ∈ ℳ⁺(X), X ∈ ℳ⁺(Y) ⇒ A ∈ ℳ⁺(Y)`.
fn scan_m_plus_transitivity(sys: &FilterSystem) -> PropertyVerdict {
    let mut scan = CoherenceScan::new();
    for y in sys.family.sets() {
        for x in sys.family.sets() {
            if !x.is_subset(y) || !sys.m_plus(y, x) {
                continue;
            }
            for a in x.subsets() {
                if !sys.m_plus(x, &a) {
                    continue;
                }
                scan.note(sys.m_plus(y, &a), || {
                    set_witness(&[("Y", y), ("X", x), ("A", &a)])
                });
            }
        }
    }
    scan.verdict("r_down_down_v3")
}

/// Per-version verdicts for a coherence condition: one verdict for `r_up`
/// and `r_union_disj`, the two printed versions for `r_down`, and the
/// three printed versions for `r_down_down`. The `r_down`/`r_down_down`
/// scans require the base family to be closed under set difference.
pub fn coherence_versions(
    sys: &FilterSystem,
    cond: CoherenceCondition,
) -> Result<Vec<PropertyVerdict>, SizeError> {
    match cond {
        CoherenceCondition::RUp => Ok(vec![scan_r_up(sys)]),
        CoherenceCondition::RUnionDisj => Ok(vec![scan_r_union_disj(sys)]),
        CoherenceCondition::RDown => {
            if !sys.family.flags().closed_under_set_difference {
                return Err(SizeError::NotDifferenceClosed);
            }
            Ok(vec![
                scan_removal(sys, "r_down_v1", |x, b| sys.small(x, b), true),
                scan_removal(sys, "r_down_v2", |x, b| sys.small(x, b), false),
            ])
        }
        CoherenceCondition::RDownDown => {
            if !sys.family.flags().closed_under_set_difference {
                return Err(SizeError::NotDifferenceClosed);
            }
            Ok(vec![
                scan_removal(sys, "r_down_down_v1", |x, b| !sys.big(x, b), true),
                scan_removal(sys, "r_down_down_v2", |x, b| !sys.big(x, b), false),
                scan_m_plus_transitivity(sys),
            ])
        }
    }
}

/// One verdict for the whole condition: it holds iff every printed
/// version holds; the witness (when failing) carries the first failing
/// version's counterexample plus a slot naming that version.
pub fn check_coherence(
    sys: &FilterSystem,
    cond: CoherenceCondition,
) -> Result<PropertyVerdict, SizeError> {
    let versions = coherence_versions(sys, cond)?;
    let checked = versions.iter().map(|v| v.checked).sum();
    let skipped = versions.iter().map(|v| v.skipped).sum();
    match versions.into_iter().find(|v| !v.holds) {
        None => Ok(PropertyVerdict::pass(cond.id(), checked, skipped)),
        Some(bad) => {
            let mut witness = Witness::new().with(
                "failing version",
                WitnessValue::Text(bad.property_id.clone()),
            );
            if let Some(w) = bad.witness {
                witness.slots.extend(w.slots);
            }
            Ok(PropertyVerdict::fail(cond.id(), checked, skipped, witness))
        }
    }
}

// ---------------------------------------------------------------------------
// The bridge between choice functions and principal systems
// ---------------------------------------------------------------------------

/// The principal system induced by a choice function that picks inside
/// its argument: `ℱ(X) := {X′ : f(X) ⊆ X′ ⊆ X}` for each non-empty `X` in
/// the domain (the empty set supports no size family and is dropped).
pub fn filter_from_choice(f: &ChoiceFunction) -> Result<FilterSystem, SizeError> {
    for (x, v) in f.map() {
        if !v.is_subset(x) {
            return Err(SizeError::ChoiceOutsideArgument(
                x.to_string(),
                v.to_string(),
            ));
        }
    }
    let bases: Vec<ModelSet> = f
        .domain()
        .sets()
        .iter()
        .filter(|x| !x.is_empty())
        .cloned()
        .collect();
    let family = DomainFamily::new(f.domain().space(), bases.clone())
        .expect("base sets share the domain's space");
    let mut map = BTreeMap::new();
    for x in bases {
        let value = f.map()[&x].clone();
        let filter = Filter::principal(x.clone(), value)
            .expect("choice values were verified to sit inside their argument");
        map.insert(x, filter);
    }
    FilterSystem::new(family, map)
}

/// The choice function read off a system of principal filters:
/// `f(X) :=` the least big set at `X`. Errors when some filter has no
/// least member.
pub fn choice_from_filter(sys: &FilterSystem) -> Result<ChoiceFunction, SizeError> {
    let mut map = BTreeMap::new();
    for (base, filter) in sys.map() {
        let g = filter
            .principal_generator()
            .ok_or_else(|| SizeError::NotPrincipal(base.to_string()))?;
        map.insert(base.clone(), g);
    }
    let universe = sys.family().universe();
    ChoiceFunction::new(universe, sys.family().clone(), map)
        .map_err(|_| SizeError::SpaceMismatch(sys.family().space(), sys.family().space()))
}

/// The row-by-row correspondence between coherence conditions of the
/// induced principal system and model-side conditions of the choice
/// function (see the module table). The verdict holds iff the two sides
/// agree on this `f`; its witness (when failing) names the disagreeing
/// sides and carries the failing side's counterexample.
///
/// Stated on full power-set domains: the domain must contain every
/// non-empty subset of the universe.
pub fn check_refclass_row(row: u8, f: &ChoiceFunction) -> Result<PropertyVerdict, SizeError> {
    if !(1..=6).contains(&row) {
        return Err(SizeError::NoSuchRow(row));
    }
    if !f.domain().is_full_powerset() {
        return Err(SizeError::DomainNotFullPowerset);
    }
    let sys = filter_from_choice(f)?;

    let (coherence, needs_i_cup, mu) = match row {
        1 => (CoherenceCondition::RUp, false, MuProperty::MuWOR),
        2 => (CoherenceCondition::RUp, true, MuProperty::MuOR),
        3 => (CoherenceCondition::RUp, true, MuProperty::MuPR),
        4 => (CoherenceCondition::RUnionDisj, false, MuProperty::MuDisjOR),
        5 => (CoherenceCondition::RDown, false, MuProperty::MuCM),
        _ => (CoherenceCondition::RDownDown, false, MuProperty::MuRatM),
    };

    let left_main = check_coherence(&sys, coherence)?;
    let mut left_holds = left_main.holds;
    let mut left_witness = left_main.witness.clone();
    let mut checked = left_main.checked;
    let mut skipped = left_main.skipped;
    if needs_i_cup && left_holds {
        // Rows 2 and 3 pair r_up with per-base closure of the small sets
        // under union; principal systems always satisfy it, but the scan
        // keeps the row's statement honest.
        for base in sys.family().sets() {
            let filter = &sys.map()[base];
            let ideal = filter.ideal_family();
            for a in &ideal {
                for b in &ideal {
                    checked += 1;
                    if left_holds && !filter.is_small(&a.union(b)) {
                        left_holds = false;
                        left_witness = Some(set_witness(&[("base", base), ("A", a), ("B", b)]));
                    }
                }
            }
        }
    }

    let right = check_mu_property(f, mu);
    checked += right.checked;
    skipped += right.skipped;

    let id = format!("row_{row}");
    if left_holds == right.holds {
        Ok(PropertyVerdict::pass(&id, checked, skipped))
    } else {
        let mut witness = Witness::new().with(
            "disagreement",
            WitnessValue::Text(format!(
                "{} side {}, {} side {}",
                coherence.id(),
                if left_holds { "holds" } else { "fails" },
                mu.id(),
                if right.holds { "holds" } else { "fails" },
            )),
        );
        let carried = if left_holds { right.witness } else { left_witness };
        if let Some(w) = carried {
            witness.slots.extend(w.slots);
        }
        Ok(PropertyVerdict::fail(&id, checked, skipped, witness))
    }
}

// ---------------------------------------------------------------------------
// The normality quantifier
// ---------------------------------------------------------------------------

/// A formula of the single-variable monadic fragment with the normality
/// quantifier. Written grammar: predicates are identifiers; `~ & | -> <->`
/// as in propositional formulas; `A x. f` (universal), `E x. f`
/// (existential), `N x. f` (normality over the whole domain), and
/// `N x: f . g` (normality over the extension of `f`). Quantifier bodies
/// extend as far right as possible; `A`, `E`, and `N` are reserved words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NablaFormula {
    /// A monadic predicate applied to the bound variable.
    Pred(String),
    Not(Box<NablaFormula>),
    And(Box<NablaFormula>, Box<NablaFormula>),
    Or(Box<NablaFormula>, Box<NablaFormula>),
    Implies(Box<NablaFormula>, Box<NablaFormula>),
    Iff(Box<NablaFormula>, Box<NablaFormula>),
    /// `A x. body`
    ForAll(Box<NablaFormula>),
    /// `E x. body`
    Exists(Box<NablaFormula>),
    /// `N x. body`
    Nabla(Box<NablaFormula>),
    /// `N x: restrictor . body`
    NablaIf(Box<NablaFormula>, Box<NablaFormula>),
}

impl NablaFormula {
    pub fn pred(name: &str) -> Self {
        NablaFormula::Pred(name.to_string())
    }

    pub fn not(f: NablaFormula) -> Self {
        NablaFormula::Not(Box::new(f))
    }

    pub fn and(a: NablaFormula, b: NablaFormula) -> Self {
        NablaFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: NablaFormula, b: NablaFormula) -> Self {
        NablaFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: NablaFormula, b: NablaFormula) -> Self {
        NablaFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: NablaFormula, b: NablaFormula) -> Self {
        NablaFormula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(f: NablaFormula) -> Self {
        NablaFormula::ForAll(Box::new(f))
    }

    pub fn exists(f: NablaFormula) -> Self {
        NablaFormula::Exists(Box::new(f))
    }

    pub fn nabla(f: NablaFormula) -> Self {
        NablaFormula::Nabla(Box::new(f))
    }

    pub fn nabla_if(restrictor: NablaFormula, body: NablaFormula) -> Self {
        NablaFormula::NablaIf(Box::new(restrictor), Box::new(body))
    }

    /// The predicate names the formula mentions, sorted and deduplicated.
    pub fn predicates(&self) -> Vec<String> {
        fn walk(f: &NablaFormula, acc: &mut Vec<String>) {
            match f {
                NablaFormula::Pred(p) => acc.push(p.clone()),
                NablaFormula::Not(a)
                | NablaFormula::ForAll(a)
                | NablaFormula::Exists(a)
                | NablaFormula::Nabla(a) => walk(a, acc),
                NablaFormula::And(a, b)
                | NablaFormula::Or(a, b)
                | NablaFormula::Implies(a, b)
                | NablaFormula::Iff(a, b)
                | NablaFormula::NablaIf(a, b) => {
                    walk(a, acc);
                    walk(b, acc);
                }
            }
        }
        let mut acc = Vec::new();
        walk(self, &mut acc);
        acc.sort();
        acc.dedup();
        acc
    }

    /// True iff every predicate occurrence sits under some quantifier, so
    /// the formula has a truth value on its own.
    pub fn is_closed(&self) -> bool {
        match self {
            NablaFormula::Pred(_) => false,
            NablaFormula::Not(a) => a.is_closed(),
            NablaFormula::And(a, b)
            | NablaFormula::Or(a, b)
            | NablaFormula::Implies(a, b)
            | NablaFormula::Iff(a, b) => a.is_closed() && b.is_closed(),
            NablaFormula::ForAll(_)
            | NablaFormula::Exists(_)
            | NablaFormula::Nabla(_)
            | NablaFormula::NablaIf(_, _) => true,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        // Precedence levels: 4 atoms/negation, 3 `&`, 2 `|`, 1 `->`/`<->`,
        // 0 quantifier bodies.
        let prec = match self {
            NablaFormula::Pred(_) | NablaFormula::Not(_) => 4,
            NablaFormula::And(_, _) => 3,
            NablaFormula::Or(_, _) => 2,
            NablaFormula::Implies(_, _) | NablaFormula::Iff(_, _) => 1,
            _ => 0,
        };
        if prec < parent {
            write!(f, "(")?;
        }
        match self {
            NablaFormula::Pred(p) => write!(f, "{p}")?,
            NablaFormula::Not(a) => {
                write!(f, "~")?;
                a.fmt_prec(f, 4)?;
            }
            NablaFormula::And(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 4)?;
            }
            NablaFormula::Or(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 3)?;
            }
            NablaFormula::Implies(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 1)?;
            }
            NablaFormula::Iff(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " <-> ")?;
                b.fmt_prec(f, 2)?;
            }
            NablaFormula::ForAll(a) => {
                write!(f, "A x. ")?;
                a.fmt_prec(f, 0)?;
            }
            NablaFormula::Exists(a) => {
                write!(f, "E x. ")?;
                a.fmt_prec(f, 0)?;
            }
            NablaFormula::Nabla(a) => {
                write!(f, "N x. ")?;
                a.fmt_prec(f, 0)?;
            }
            NablaFormula::NablaIf(r, b) => {
                write!(f, "N x: ")?;
                r.fmt_prec(f, 1)?;
                write!(f, " . ")?;
                b.fmt_prec(f, 0)?;
            }
        }
        if prec < parent {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for NablaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum NTok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Dot,
    Colon,
}

fn lex_nabla(text: &str) -> Result<Vec<NTok>, SizeError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '~' => {
                toks.push(NTok::Not);
                i += 1;
            }
            '&' => {
                toks.push(NTok::And);
                i += 1;
            }
            '|' => {
                toks.push(NTok::Or);
                i += 1;
            }
            '(' => {
                toks.push(NTok::LParen);
                i += 1;
            }
            ')' => {
                toks.push(NTok::RParen);
                i += 1;
            }
            '.' => {
                toks.push(NTok::Dot);
                i += 1;
            }
            ':' => {
                toks.push(NTok::Colon);
                i += 1;
            }
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push(NTok::Implies);
                    i += 2;
                } else {
                    return Err(SizeError::FormulaSyntax(
                        "expected '>' after '-'".to_string(),
                    ));
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
                    toks.push(NTok::Iff);
                    i += 3;
                } else {
                    return Err(SizeError::FormulaSyntax(
                        "expected '->' after '<'".to_string(),
                    ));
                }
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                toks.push(NTok::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(SizeError::FormulaSyntax(format!(
                    "unexpected character {other:?}"
                )))
            }
        }
    }
    Ok(toks)
}

struct NParser {
    toks: Vec<NTok>,
    pos: usize,
}

impl NParser {
    fn peek(&self) -> Option<&NTok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<NTok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: NTok, what: &str) -> Result<(), SizeError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(SizeError::FormulaSyntax(format!(
                "expected {what} at token {}",
                self.pos
            )))
        }
    }

    fn formula(&mut self) -> Result<NablaFormula, SizeError> {
        let a = self.implication()?;
        if self.peek() == Some(&NTok::Iff) {
            self.bump();
            let b = self.formula()?;
            Ok(NablaFormula::iff(a, b))
        } else {
            Ok(a)
        }
    }

    fn implication(&mut self) -> Result<NablaFormula, SizeError> {
        let a = self.disjunction()?;
        if self.peek() == Some(&NTok::Implies) {
            self.bump();
            let b = self.implication()?;
            Ok(NablaFormula::implies(a, b))
        } else {
            Ok(a)
        }
    }

    fn disjunction(&mut self) -> Result<NablaFormula, SizeError> {
        let mut a = self.conjunction()?;
        while self.peek() == Some(&NTok::Or) {
            self.bump();
            let b = self.conjunction()?;
            a = NablaFormula::or(a, b);
        }
        Ok(a)
    }

    fn conjunction(&mut self) -> Result<NablaFormula, SizeError> {
        let mut a = self.unary()?;
        while self.peek() == Some(&NTok::And) {
            self.bump();
            let b = self.unary()?;
            a = NablaFormula::and(a, b);
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<NablaFormula, SizeError> {
        match self.peek().cloned() {
            Some(NTok::Not) => {
                self.bump();
                let a = self.unary()?;
                Ok(NablaFormula::not(a))
            }
            Some(NTok::LParen) => {
                self.bump();
                let a = self.formula()?;
                self.expect(NTok::RParen, "')'")?;
                Ok(a)
            }
            Some(NTok::Ident(name)) => {
                self.bump();
                match name.as_str() {
                    "A" | "E" | "N" => self.quantifier(&name),
                    _ => Ok(NablaFormula::Pred(name)),
                }
            }
            _ => Err(SizeError::FormulaSyntax(format!(
                "expected a formula at token {}",
                self.pos
            ))),
        }
    }

    fn quantifier(&mut self, kind: &str) -> Result<NablaFormula, SizeError> {
        match self.bump() {
            Some(NTok::Ident(_)) => {}
            _ => {
                return Err(SizeError::FormulaSyntax(format!(
                    "expected a variable after {kind}"
                )))
            }
        }
        if kind == "N" && self.peek() == Some(&NTok::Colon) {
            self.bump();
            let restrictor = self.formula()?;
            self.expect(NTok::Dot, "'.' separating restrictor and body")?;
            let body = self.formula()?;
            return Ok(NablaFormula::nabla_if(restrictor, body));
        }
        self.expect(NTok::Dot, "'.' after the bound variable")?;
        let body = self.formula()?;
        Ok(match kind {
            "A" => NablaFormula::forall(body),
            "E" => NablaFormula::exists(body),
            _ => NablaFormula::nabla(body),
        })
    }
}

/// Parses a quantifier formula from its written grammar.
pub fn parse_nabla_formula(text: &str) -> Result<NablaFormula, SizeError> {
    let toks = lex_nabla(text)?;
    let mut parser = NParser { toks, pos: 0 };
    let f = parser.formula()?;
    if parser.pos != parser.toks.len() {
        return Err(SizeError::FormulaSyntax(format!(
            "trailing input at token {}",
            parser.pos
        )));
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Quantifier structures and evaluation
// ---------------------------------------------------------------------------

/// A finite structure for the normality quantifier: a domain `0..n-1`,
/// monadic predicate interpretations, and a neighbourhood system mapping
/// subsets of the domain to weak filters over them. Entries are needed
/// only for subsets an evaluation actually queries; querying a missing
/// one is a hard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NStructure {
    size: usize,
    predicates: BTreeMap<String, ModelSet>,
    nsystem: BTreeMap<ModelSet, Filter>,
}

impl NStructure {
    /// Builds a structure after validating spaces, base agreement, and
    /// that every neighbourhood family is a weak filter over its key.
    pub fn new(
        size: usize,
        predicates: BTreeMap<String, ModelSet>,
        nsystem: BTreeMap<ModelSet, Filter>,
    ) -> Result<Self, SizeError> {
        if size == 0 {
            return Err(SizeError::EmptyDomain);
        }
        for ext in predicates.values() {
            if ext.space() != size {
                return Err(SizeError::SpaceMismatch(ext.space(), size));
            }
        }
        for (subset, filter) in &nsystem {
            if subset.space() != size {
                return Err(SizeError::SpaceMismatch(subset.space(), size));
            }
            if filter.base() != subset {
                return Err(SizeError::BaseMismatch(
                    subset.to_string(),
                    filter.base().to_string(),
                ));
            }
            filter.verify_weak_filter()?;
        }
        Ok(NStructure {
            size,
            predicates,
            nsystem,
        })
    }

    /// |domain|; the domain elements are `0..size-1`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// The whole domain as a set.
    pub fn domain_set(&self) -> ModelSet {
        ModelSet::full(self.size)
    }

    pub fn predicates(&self) -> &BTreeMap<String, ModelSet> {
        &self.predicates
    }

    pub fn nsystem(&self) -> &BTreeMap<ModelSet, Filter> {
        &self.nsystem
    }

    fn neighborhood(&self, subset: &ModelSet) -> Result<&Filter, SizeError> {
        self.nsystem
            .get(subset)
            .ok_or_else(|| SizeError::MissingNeighborhood(subset.to_string()))
    }

    /// The set of elements satisfying the (possibly open) formula.
    pub fn extension(&self, phi: &NablaFormula) -> Result<ModelSet, SizeError> {
        let mut ext = ModelSet::empty(self.size);
        for a in 0..self.size {
            if self.eval_at(phi, Some(a))? {
                ext.insert(a);
            }
        }
        Ok(ext)
    }

    /// Evaluates a closed formula.
    pub fn eval(&self, phi: &NablaFormula) -> Result<bool, SizeError> {
        self.eval_at(phi, None)
    }

    fn eval_at(&self, phi: &NablaFormula, a: Option<usize>) -> Result<bool, SizeError> {
        match phi {
            NablaFormula::Pred(p) => {
                let ext = self
                    .predicates
                    .get(p)
                    .ok_or_else(|| SizeError::UnknownPredicate(p.clone()))?;
                let elem = a.ok_or(SizeError::OpenFormula)?;
                Ok(ext.contains(elem))
            }
            NablaFormula::Not(f) => Ok(!self.eval_at(f, a)?),
            NablaFormula::And(f, g) => Ok(self.eval_at(f, a)? && self.eval_at(g, a)?),
            NablaFormula::Or(f, g) => Ok(self.eval_at(f, a)? || self.eval_at(g, a)?),
            NablaFormula::Implies(f, g) => Ok(!self.eval_at(f, a)? || self.eval_at(g, a)?),
            NablaFormula::Iff(f, g) => Ok(self.eval_at(f, a)? == self.eval_at(g, a)?),
            NablaFormula::ForAll(f) => Ok(self.extension(f)? == self.domain_set()),
            NablaFormula::Exists(f) => Ok(!self.extension(f)?.is_empty()),
            NablaFormula::Nabla(f) => {
                let ext = self.extension(f)?;
                let hood = self.neighborhood(&self.domain_set())?;
                Ok(hood.family().iter().any(|n| n.is_subset(&ext)))
            }
            NablaFormula::NablaIf(restrictor, body) => {
                let r = self.extension(restrictor)?;
                if r.is_empty() {
                    // An empty restriction supports no size family; the
                    // conditional is counted vacuously true.
                    return Ok(true);
                }
                let ext = self.extension(body)?;
                let hood = self.neighborhood(&r)?;
                Ok(hood.family().iter().any(|n| n.is_subset(&ext)))
            }
        }
    }
}

/// Evaluates a closed formula on the structure.
pub fn eval_nabla(m: &NStructure, phi: &NablaFormula) -> Result<bool, SizeError> {
    m.eval(phi)
}

// ---------------------------------------------------------------------------
// Quantifier schemata
// ---------------------------------------------------------------------------

/// Every instance over the pool of the quantifier schemata, one verdict
/// per schema. Pool members are open formulas (bodies `φ(x)`); instances
/// are built by the schema shapes:
///
/// | id      | schema |
/// |---------|--------|
/// | `n_1`   | `N x. φ ∧ A x. (φ → ψ) → N x. ψ` |
/// | `n_2`   | `N x. φ → ~ N x. ~φ` |
/// | `n_3`   | `A x. φ → N x. φ` and `N x. φ → E x. φ` |
/// | `n_4`   | `N x. φ ↔ N y. φ` (bound-variable renaming) |
/// | `ns_1a` | `N x. φ ↔ N x: (φ ∨ ~φ) . φ` (restriction to the whole domain) |
/// | `ns_1b` | `A x. (σ ↔ τ) ∧ N x: σ . φ → N x: τ . φ` |
/// | `ns_2`  | `N x: φ . ψ ∧ A x. (φ ∧ ψ → θ) → N x: φ . θ` |
/// | `ns_3`  | `E x. φ ∧ N x: φ . ψ → ~ N x: φ . ~ψ` |
/// | `ns_4`  | `A x. (φ → ψ) → N x: φ . ψ` and `N x: φ . ψ → (E x. φ → E x. (φ ∧ ψ))` |
/// | `ns_5`  | `N x: φ . ψ ↔ N y: φ . ψ` (bound-variable renaming) |
///
/// Renaming instances collapse to syntactic identity in the nameless
/// single-variable representation and are evaluated as such.
pub fn check_nabla_axioms(
    m: &NStructure,
    pool: &[NablaFormula],
) -> Result<Report, SizeError> {
    for phi in pool {
        for p in phi.predicates() {
            if !m.predicates().contains_key(&p) {
                return Err(SizeError::UnknownPredicate(p));
            }
        }
    }

    let mut report = Report::new("quantifier schemata");

    let mut run = |id: &str,
                   instances: Box<dyn Iterator<Item = NablaFormula> + '_>|
     -> Result<(), SizeError> {
        let mut checked = 0;
        let mut witness = None;
        for inst in instances {
            checked += 1;
            if witness.is_none() && !m.eval(&inst)? {
                witness =
                    Some(Witness::new().with("instance", WitnessValue::Formula(inst.to_string())));
            }
        }
        report.push_verdict(match witness {
            None => PropertyVerdict::pass(id, checked, 0),
            Some(w) => PropertyVerdict::fail(id, checked, 0, w),
        });
        Ok(())
    };

    use NablaFormula as F;

    run(
        "n_1",
        Box::new(pool.iter().flat_map(|phi| {
            pool.iter().map(move |psi| {
                F::implies(
                    F::and(
                        F::nabla(phi.clone()),
                        F::forall(F::implies(phi.clone(), psi.clone())),
                    ),
                    F::nabla(psi.clone()),
                )
            })
        })),
    )?;

    run(
        "n_2",
        Box::new(pool.iter().map(|phi| {
            F::implies(F::nabla(phi.clone()), F::not(F::nabla(F::not(phi.clone()))))
        })),
    )?;

    run(
        "n_3",
        Box::new(pool.iter().flat_map(|phi| {
            [
                F::implies(F::forall(phi.clone()), F::nabla(phi.clone())),
                F::implies(F::nabla(phi.clone()), F::exists(phi.clone())),
            ]
        })),
    )?;

    run(
        "n_4",
        Box::new(pool.iter().map(|phi| {
            F::iff(F::nabla(phi.clone()), F::nabla(phi.clone()))
        })),
    )?;

    run(
        "ns_1a",
        Box::new(pool.iter().map(|phi| {
            let total = F::or(phi.clone(), F::not(phi.clone()));
            F::iff(F::nabla(phi.clone()), F::nabla_if(total, phi.clone()))
        })),
    )?;

    run(
        "ns_1b",
        Box::new(pool.iter().flat_map(|sigma| {
            pool.iter().flat_map(move |tau| {
                pool.iter().map(move |phi| {
                    F::implies(
                        F::and(
                            F::forall(F::iff(sigma.clone(), tau.clone())),
                            F::nabla_if(sigma.clone(), phi.clone()),
                        ),
                        F::nabla_if(tau.clone(), phi.clone()),
                    )
                })
            })
        })),
    )?;

    run(
        "ns_2",
        Box::new(pool.iter().flat_map(|phi| {
            pool.iter().flat_map(move |psi| {
                pool.iter().map(move |theta| {
                    F::implies(
                        F::and(
                            F::nabla_if(phi.clone(), psi.clone()),
                            F::forall(F::implies(
                                F::and(phi.clone(), psi.clone()),
                                theta.clone(),
                            )),
                        ),
                        F::nabla_if(phi.clone(), theta.clone()),
                    )
                })
            })
        })),
    )?;

    run(
        "ns_3",
        Box::new(pool.iter().flat_map(|phi| {
            pool.iter().map(move |psi| {
                F::implies(
                    F::and(
                        F::exists(phi.clone()),
                        F::nabla_if(phi.clone(), psi.clone()),
                    ),
                    F::not(F::nabla_if(phi.clone(), F::not(psi.clone()))),
                )
            })
        })),
    )?;

    run(
        "ns_4",
        Box::new(pool.iter().flat_map(|phi| {
            pool.iter().flat_map(move |psi| {
                [
                    F::implies(
                        F::forall(F::implies(phi.clone(), psi.clone())),
                        F::nabla_if(phi.clone(), psi.clone()),
                    ),
                    F::implies(
                        F::nabla_if(phi.clone(), psi.clone()),
                        F::implies(
                            F::exists(phi.clone()),
                            F::exists(F::and(phi.clone(), psi.clone())),
                        ),
                    ),
                ]
            })
        })),
    )?;

    run(
        "ns_5",
        Box::new(pool.iter().flat_map(|phi| {
            pool.iter().map(move |psi| {
                F::iff(
                    F::nabla_if(phi.clone(), psi.clone()),
                    F::nabla_if(phi.clone(), psi.clone()),
                )
            })
        })),
    )?;

    Ok(report)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Vocabulary;

    fn ms(space: usize, members: &[usize]) -> ModelSet {
        ModelSet::from_indices(space, members).unwrap()
    }

    fn holds(report: &Report, id: &str) -> bool {
        report.verdict(id).map(|v| v.holds).unwrap_or(false)
    }

    #[test]
    fn principal_filter_by_singleton_is_an_ultrafilter() {
        let base = ms(3, &[0, 1, 2]);
        let f = Filter::principal(base, ms(3, &[0])).unwrap();
        let expected: Vec<ModelSet> = vec![
            ms(3, &[0]),
            ms(3, &[0, 1]),
            ms(3, &[0, 2]),
            ms(3, &[0, 1, 2]),
        ];
        let mut sorted = expected;
        sorted.sort();
        assert_eq!(f.family(), &sorted[..]);
        let report = check_filter(&f);
        for id in [
            "f_all",
            "f_up",
            "f_cap",
            "f_cap_prime",
            "i_empty",
            "i_down",
            "i_cup",
            "i_cup_prime",
        ] {
            assert!(holds(&report, id), "{id} should hold");
        }
        assert_eq!(f.principal_generator(), Some(ms(3, &[0])));
        assert!(f.is_ultrafilter());

        let wide = Filter::principal(ms(3, &[0, 1, 2]), ms(3, &[0, 1])).unwrap();
        assert!(!wide.is_ultrafilter());
        assert_eq!(wide.principal_generator(), Some(ms(3, &[0, 1])));
    }

    #[test]
    fn two_majority_sets_form_a_weak_not_strong_family() {
        let base = ms(3, &[0, 1, 2]);
        let family = vec![ms(3, &[0, 1]), ms(3, &[1, 2]), ms(3, &[0, 1, 2])];
        let f = Filter::new(base, family, FilterKind::Weak, None).unwrap();
        let report = check_filter(&f);
        assert!(holds(&report, "f_all"));
        assert!(holds(&report, "f_up"));
        assert!(!holds(&report, "f_cap"), "the meet {{1}} is missing");
        assert!(holds(&report, "f_cap_prime"));
        let bad = report.verdict("f_cap").unwrap();
        assert!(bad.witness.is_some());
        assert!(f.verify_weak_filter().is_ok());
        assert_eq!(f.principal_generator(), None);
    }

    #[test]
    fn family_with_empty_member_fails_the_weak_meet_condition() {
        let base = ms(2, &[0, 1]);
        let family: Vec<ModelSet> = base.subsets().collect();
        let f = Filter::new(base, family, FilterKind::Strong, None).unwrap();
        let report = check_filter(&f);
        assert!(holds(&report, "f_cap"));
        assert!(!holds(&report, "f_cap_prime"));
        assert!(!holds(&report, "i_cup_prime"));
        assert!(f.verify_weak_filter().is_err());
    }

    #[test]
    fn ideal_verdicts_mirror_filter_verdicts() {
        // Duality: the complement family is an ideal iff the family is a
        // filter, condition by condition.
        let base = ms(3, &[0, 1, 2]);
        let families: Vec<Vec<ModelSet>> = vec![
            vec![ms(3, &[0]), ms(3, &[0, 1]), ms(3, &[0, 2]), ms(3, &[0, 1, 2])],
            vec![ms(3, &[0, 1]), ms(3, &[1, 2]), ms(3, &[0, 1, 2])],
            vec![ms(3, &[0]), ms(3, &[1, 2])],
            base.subsets().collect(),
        ];
        for family in families {
            let f = Filter::new(base.clone(), family, FilterKind::Weak, None).unwrap();
            let report = check_filter(&f);
            assert_eq!(holds(&report, "f_all"), holds(&report, "i_empty"));
            assert_eq!(holds(&report, "f_up"), holds(&report, "i_down"));
            assert_eq!(holds(&report, "f_cap"), holds(&report, "i_cup"));
            assert_eq!(holds(&report, "f_cap_prime"), holds(&report, "i_cup_prime"));
        }
    }

    #[test]
    fn generator_hint_must_regenerate_the_family() {
        let base = ms(2, &[0, 1]);
        let family = vec![ms(2, &[0]), ms(2, &[0, 1])];
        assert!(Filter::new(
            base.clone(),
            family.clone(),
            FilterKind::Strong,
            Some(ms(2, &[0]))
        )
        .is_ok());
        assert_eq!(
            Filter::new(base, family, FilterKind::Strong, Some(ms(2, &[1]))),
            Err(SizeError::GeneratorMismatch("{1}".to_string()))
        );
    }

    fn fraction_system(space: usize) -> FilterSystem {
        // Big iff more than two thirds of the base.
        let universe = ModelSet::full(space);
        let family = DomainFamily::powerset_of(&universe, false);
        let mut map = BTreeMap::new();
        for base in family.sets() {
            let members: Vec<ModelSet> = base
                .subsets()
                .filter(|a| 3 * a.len() > 2 * base.len())
                .collect();
            map.insert(
                base.clone(),
                Filter::new(base.clone(), members, FilterKind::Weak, None).unwrap(),
            );
        }
        FilterSystem::new(family, map).unwrap()
    }

    #[test]
    fn fraction_sizes_cohere_upward_and_over_disjoint_unions() {
        let sys = fraction_system(4);
        let up = check_coherence(&sys, CoherenceCondition::RUp).unwrap();
        assert!(up.holds, "fractional smallness survives growing the base");
        assert!(up.checked > 0);
        let disj = check_coherence(&sys, CoherenceCondition::RUnionDisj).unwrap();
        assert!(disj.holds, "disjoint unions add fractional smallness");
        assert!(disj.checked > 0);
    }

    #[test]
    fn three_small_parts_break_the_removal_condition() {
        // A base split into three "small" parts under a majority notion of
        // size: removing one part must eventually call a whole remainder
        // small, which the scan rejects.
        let space = 3;
        let universe = ModelSet::full(space);
        let family = DomainFamily::powerset_of(&universe, false);
        let mut map = BTreeMap::new();
        for base in family.sets() {
            let members: Vec<ModelSet> = base
                .subsets()
                .filter(|a| 2 * a.len() > base.len())
                .collect();
            map.insert(
                base.clone(),
                Filter::new(base.clone(), members, FilterKind::Weak, None).unwrap(),
            );
        }
        let sys = FilterSystem::new(family, map).unwrap();
        for a in 0..space {
            let part = ms(space, &[a]);
            assert!(sys.small(&universe, &part), "each third is small");
        }
        let down = check_coherence(&sys, CoherenceCondition::RDown).unwrap();
        assert!(!down.holds);
        let witness = down.witness.expect("a failing instance is named");
        assert!(!witness.slots.is_empty());
    }

    #[test]
    fn removal_conditions_demand_difference_closure() {
        let space = 3;
        let bases = vec![ms(space, &[0, 1, 2]), ms(space, &[0, 1])];
        let family = DomainFamily::new(space, bases.clone()).unwrap();
        let mut map = BTreeMap::new();
        for base in &bases {
            map.insert(
                base.clone(),
                Filter::principal(base.clone(), base.clone()).unwrap(),
            );
        }
        let sys = FilterSystem::new(family, map).unwrap();
        assert_eq!(
            coherence_versions(&sys, CoherenceCondition::RDown).unwrap_err(),
            SizeError::NotDifferenceClosed
        );
        assert!(coherence_versions(&sys, CoherenceCondition::RUp).is_ok());
    }

    #[test]
    fn principal_bridge_round_trips() {
        let universe = ModelSet::full(3);
        let domain = DomainFamily::powerset_of(&universe, true);
        let mut map = BTreeMap::new();
        for x in domain.sets() {
            // Keep the least element of each non-empty set.
            let v = match x.least() {
                Some(m) => ModelSet::singleton(3, m),
                None => ModelSet::empty(3),
            };
            map.insert(x.clone(), v);
        }
        let f = ChoiceFunction::new(universe, domain, map).unwrap();
        let sys = filter_from_choice(&f).unwrap();
        assert_eq!(sys.family().len(), 7, "the empty base is dropped");
        let g = choice_from_filter(&sys).unwrap();
        for (x, v) in g.map() {
            assert_eq!(f.map()[x], *v);
        }

        // The identity function induces the one-member family {X} at
        // every base; the constant-empty function makes every subset big.
        let universe = ModelSet::full(2);
        let domain = DomainFamily::powerset_of(&universe, false);
        let id = ChoiceFunction::identity_on(universe.clone(), domain.clone()).unwrap();
        let sys = filter_from_choice(&id).unwrap();
        for (base, filter) in sys.map() {
            assert_eq!(filter.family(), std::slice::from_ref(base));
        }
        let mut empty_map = BTreeMap::new();
        for x in domain.sets() {
            empty_map.insert(x.clone(), ModelSet::empty(2));
        }
        let bottom = ChoiceFunction::new(universe, domain, empty_map).unwrap();
        let sys = filter_from_choice(&bottom).unwrap();
        for (base, filter) in sys.map() {
            assert_eq!(filter.family().len(), 1usize << base.len());
        }
    }

    #[test]
    fn bridge_rejects_values_outside_the_argument() {
        let universe = ModelSet::full(2);
        let domain = DomainFamily::powerset_of(&universe, false);
        let mut map = BTreeMap::new();
        for x in domain.sets() {
            map.insert(x.clone(), universe.clone());
        }
        let f = ChoiceFunction::new(universe, domain, map).unwrap();
        assert!(matches!(
            filter_from_choice(&f),
            Err(SizeError::ChoiceOutsideArgument(_, _))
        ));
    }

    #[test]
    fn layered_choice_satisfies_every_row_on_both_sides() {
        // f(X) = the lowest-layer members of X, for layers {0} < {1} < {2}:
        // the choice function of a ranked ordering satisfies all six
        // correspondence rows with both sides true.
        let universe = ModelSet::full(3);
        let domain = DomainFamily::powerset_of(&universe, true);
        let mut map = BTreeMap::new();
        for x in domain.sets() {
            let v = match x.least() {
                Some(m) => ModelSet::singleton(3, m),
                None => ModelSet::empty(3),
            };
            map.insert(x.clone(), v);
        }
        let f = ChoiceFunction::new(universe, domain, map).unwrap();
        for row in 1..=6u8 {
            let verdict = check_refclass_row(row, &f).unwrap();
            assert!(verdict.holds, "row {row} disagrees");
        }
        let sys = filter_from_choice(&f).unwrap();
        assert!(check_coherence(&sys, CoherenceCondition::RDownDown)
            .unwrap()
            .holds);
        assert!(check_mu_property(&f, MuProperty::MuRatM).holds);
    }

    #[test]
    fn row_verdicts_hold_when_both_sides_fail_together() {
        // f(top) = {0} but f({0,1}) = {1}: rational monotony fails, and so
        // must the strengthened removal condition of the induced system.
        let universe = ModelSet::full(3);
        let domain = DomainFamily::powerset_of(&universe, true);
        let mut map = BTreeMap::new();
        for x in domain.sets() {
            let v = match x.least() {
                Some(m) => ModelSet::singleton(3, m),
                None => ModelSet::empty(3),
            };
            map.insert(x.clone(), v);
        }
        map.insert(ms(3, &[0, 1]), ms(3, &[1]));
        let f = ChoiceFunction::new(universe, domain, map).unwrap();
        assert!(!check_mu_property(&f, MuProperty::MuRatM).holds);
        let sys = filter_from_choice(&f).unwrap();
        assert!(!check_coherence(&sys, CoherenceCondition::RDownDown)
            .unwrap()
            .holds);
        let verdict = check_refclass_row(6, &f).unwrap();
        assert!(verdict.holds, "both sides fail, so the row agrees");
    }

    #[test]
    fn row_check_requires_the_full_powerset() {
        let universe = ModelSet::full(2);
        let domain = DomainFamily::new(2, vec![universe.clone()]).unwrap();
        let f = ChoiceFunction::identity_on(universe, domain).unwrap();
        assert_eq!(
            check_refclass_row(1, &f).unwrap_err(),
            SizeError::DomainNotFullPowerset
        );
        let universe = ModelSet::full(2);
        let domain = DomainFamily::powerset_of(&universe, false);
        let f = ChoiceFunction::identity_on(universe, domain).unwrap();
        assert_eq!(
            check_refclass_row(7, &f).unwrap_err(),
            SizeError::NoSuchRow(7)
        );
    }

    fn simple_structure() -> NStructure {
        // Domain {0,1,2}; P on {0,1}, Q on {2}; neighbourhood of the whole
        // domain principal by {0,1}; every other queried subset principal
        // by itself.
        let mut predicates = BTreeMap::new();
        predicates.insert("P".to_string(), ms(3, &[0, 1]));
        predicates.insert("Q".to_string(), ms(3, &[2]));
        let mut nsystem = BTreeMap::new();
        let full = ModelSet::full(3);
        for subset in full.subsets().filter(|s| !s.is_empty()) {
            let generator = if subset == full {
                ms(3, &[0, 1])
            } else {
                subset.clone()
            };
            nsystem.insert(
                subset.clone(),
                Filter::principal(subset, generator).unwrap(),
            );
        }
        NStructure::new(3, predicates, nsystem).unwrap()
    }

    #[test]
    fn nabla_holds_when_a_neighborhood_fits_the_extension() {
        let m = simple_structure();
        let p = NablaFormula::pred("P");
        let q = NablaFormula::pred("Q");
        assert!(m.eval(&NablaFormula::nabla(p.clone())).unwrap());
        assert!(!m.eval(&NablaFormula::nabla(q.clone())).unwrap());
        // ∀x P fails (2 ∉ P) but ∀ → ∇ as a conditional still holds.
        let schema = NablaFormula::implies(
            NablaFormula::forall(p.clone()),
            NablaFormula::nabla(p.clone()),
        );
        assert!(m.eval(&schema).unwrap());
        // Restricted: normally-P things are Q fails; normally-P things
        // are P holds.
        assert!(m
            .eval(&NablaFormula::nabla_if(p.clone(), p.clone()))
            .unwrap());
        assert!(!m.eval(&NablaFormula::nabla_if(p.clone(), q.clone())).unwrap());
    }

    #[test]
    fn empty_restriction_is_vacuously_true() {
        let m = simple_structure();
        let p = NablaFormula::pred("P");
        let contradiction = NablaFormula::and(p.clone(), NablaFormula::not(p.clone()));
        assert!(m
            .eval(&NablaFormula::nabla_if(contradiction, p))
            .unwrap());
    }

    #[test]
    fn missing_neighborhood_and_open_formulas_are_hard_errors() {
        let mut predicates = BTreeMap::new();
        predicates.insert("P".to_string(), ms(2, &[0]));
        let full = ModelSet::full(2);
        let mut nsystem = BTreeMap::new();
        nsystem.insert(full.clone(), Filter::principal(full, ms(2, &[0])).unwrap());
        let m = NStructure::new(2, predicates, nsystem).unwrap();
        let p = NablaFormula::pred("P");
        // ext(P) = {0} has no neighbourhood entry.
        assert_eq!(
            m.eval(&NablaFormula::nabla_if(p.clone(), p.clone())),
            Err(SizeError::MissingNeighborhood("{0}".to_string()))
        );
        assert_eq!(m.eval(&p), Err(SizeError::OpenFormula));
        assert_eq!(
            m.eval(&NablaFormula::nabla(NablaFormula::pred("R"))),
            Err(SizeError::UnknownPredicate("R".to_string()))
        );
    }

    #[test]
    fn structure_construction_validates_weak_filters() {
        let mut predicates = BTreeMap::new();
        predicates.insert("P".to_string(), ms(2, &[0]));
        let full = ModelSet::full(2);
        // {∅} ∪ {full} fails the pairwise-meet condition.
        let family = vec![ModelSet::empty(2), full.clone()];
        let bad = Filter::new(full.clone(), family, FilterKind::Weak, None).unwrap();
        let mut nsystem = BTreeMap::new();
        nsystem.insert(full, bad);
        assert!(matches!(
            NStructure::new(2, predicates, nsystem),
            Err(SizeError::NotWeakFilter(_, _))
        ));
    }

    #[test]
    fn axiom_schemata_hold_on_a_weak_filter_structure() {
        let m = simple_structure();
        let p = NablaFormula::pred("P");
        let q = NablaFormula::pred("Q");
        let pool = vec![
            p.clone(),
            q.clone(),
            NablaFormula::not(p.clone()),
            NablaFormula::and(p.clone(), q.clone()),
            NablaFormula::or(p.clone(), q.clone()),
            NablaFormula::implies(p, q),
        ];
        let report = check_nabla_axioms(&m, &pool).unwrap();
        for v in report.verdicts() {
            assert!(v.holds, "{} fails", v.property_id);
            assert!(v.checked > 0);
        }
    }

    #[test]
    fn disjoint_neighborhoods_break_the_consistency_schema() {
        // 𝒩(M) = {{0}, {1}, M} violates the pairwise-meet condition; the
        // schema ∇φ → ¬∇¬φ fails at a predicate splitting the two
        // members. Built directly since the public constructor refuses
        // non-weak-filter systems.
        let full = ModelSet::full(2);
        let family = vec![ms(2, &[0]), ms(2, &[1]), full.clone()];
        let bad = Filter::new(full.clone(), family, FilterKind::Weak, None).unwrap();
        let mut predicates = BTreeMap::new();
        predicates.insert("P".to_string(), ms(2, &[0]));
        let mut nsystem = BTreeMap::new();
        for s in [ms(2, &[0]), ms(2, &[1])] {
            nsystem.insert(s.clone(), Filter::principal(s.clone(), s).unwrap());
        }
        nsystem.insert(full, bad);
        let m = NStructure {
            size: 2,
            predicates,
            nsystem,
        };
        let pool = vec![NablaFormula::pred("P")];
        let report = check_nabla_axioms(&m, &pool).unwrap();
        assert!(!report.verdict("n_2").unwrap().holds);
        assert!(report.verdict("n_1").unwrap().holds);

        // An empty neighbourhood family breaks the ∀ → ∇ half instead.
        let full = ModelSet::full(2);
        let empty_hood = Filter {
            base: full.clone(),
            family: Vec::new(),
            kind: FilterKind::Weak,
            generator: None,
        };
        let mut predicates = BTreeMap::new();
        predicates.insert("P".to_string(), full.clone());
        let mut nsystem = BTreeMap::new();
        nsystem.insert(full, empty_hood);
        let m = NStructure {
            size: 2,
            predicates,
            nsystem,
        };
        let pool = vec![NablaFormula::pred("P")];
        let report = check_nabla_axioms(&m, &pool).unwrap();
        assert!(!report.verdict("n_3").unwrap().holds);
    }

    #[test]
    fn formula_grammar_round_trips() {
        let texts = [
            "P",
            "~P & Q",
            "P | Q -> R",
            "A x. P -> Q",
            "E x. (P & ~Q)",
            "N x. P | Q",
            "N x: P . Q",
            "N x: P & Q . ~R",
            "N x: A x. P . Q",
            "P <-> N x. Q",
        ];
        for text in texts {
            let parsed = parse_nabla_formula(text).unwrap();
            let printed = parsed.to_string();
            let reparsed = parse_nabla_formula(&printed).unwrap();
            assert_eq!(parsed, reparsed, "round trip of {text:?} via {printed:?}");
        }
        // Quantifier bodies extend maximally to the right.
        assert_eq!(
            parse_nabla_formula("A x. P -> Q").unwrap(),
            NablaFormula::forall(NablaFormula::implies(
                NablaFormula::pred("P"),
                NablaFormula::pred("Q")
            ))
        );
        assert!(parse_nabla_formula("P &").is_err());
        assert!(parse_nabla_formula("N x P").is_err());
        assert!(parse_nabla_formula("(P").is_err());
    }

    #[test]
    fn vocabulary_sized_spaces_compose_with_filters() {
        // Filters over a model space: big sets of models of a two-atom
        // vocabulary, principal by the models of the first atom.
        let vocab = Vocabulary::of(&["p", "q"]);
        let space = vocab.space();
        let base = ModelSet::full(space);
        let p_models = ms(space, &[1, 3]);
        let f = Filter::principal(base, p_models.clone()).unwrap();
        assert!(f.is_big(&p_models));
        assert!(f.is_small(&ms(space, &[0])));
        assert!(f.in_m_plus(&ms(space, &[1])));
    }
}
