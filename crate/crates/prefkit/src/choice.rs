//! Choice functions over a domain family, the model-side conditions on
//! them, proof-theoretic rules on consequence operators, translations
//! between the two views, and the implication rows between conditions.
//!
//! # Property identifiers
//!
//! Model-side conditions on a choice function `f` over a domain family `Y`
//! (set variables range over `Y`; instances needing `f` at a set outside
//! `Y` are skipped and counted):
//!
//! | id             | condition |
//! |----------------|-----------|
//! | `mu_sub`       | `f(X) ⊆ X` |
//! | `mu_empty`     | `f(X) = ∅ ⇒ X = ∅` |
//! | `mu_empty_fin` | `X ≠ ∅ ⇒ f(X) ≠ ∅` (every set here is finite) |
//! | `mu_PR`        | `X ⊆ Y ⇒ f(Y) ∩ X ⊆ f(X)` |
//! | `mu_PR_prime`  | `f(X) ∩ Y ⊆ f(X ∩ Y)` |
//! | `mu_OR`        | `f(X ∪ Y) ⊆ f(X) ∪ f(Y)` |
//! | `mu_wOR`       | `f(X ∪ Y) ⊆ f(X) ∪ Y` |
//! | `mu_disjOR`    | `X ∩ Y = ∅ ⇒ f(X ∪ Y) ⊆ f(X) ∪ f(Y)` |
//! | `mu_CUT`       | `f(X) ⊆ Y ⊆ X ⇒ f(X) ⊆ f(Y)` |
//! | `mu_CM`        | `f(X) ⊆ Y ⊆ X ⇒ f(Y) ⊆ f(X)` |
//! | `mu_ResM`      | `f(X) ⊆ A ∩ B ⇒ f(X ∩ A) ⊆ B` |
//! | `mu_CUM`       | `f(X) ⊆ Y ⊆ X ⇒ f(Y) = f(X)` |
//! | `mu_sub_sup`   | `f(X) ⊆ Y, f(Y) ⊆ X ⇒ f(X) = f(Y)` |
//! | `mu_RatM`      | `X ⊆ Y, X ∩ f(Y) ≠ ∅ ⇒ f(X) ⊆ f(Y) ∩ X` |
//! | `mu_eq`        | `X ⊆ Y, X ∩ f(Y) ≠ ∅ ⇒ f(X) = f(Y) ∩ X` |
//! | `mu_eq_prime`  | `f(Y) ∩ X ≠ ∅ ⇒ f(Y ∩ X) = f(Y) ∩ X` |
//! | `mu_par`       | `f(X ∪ Y) ∈ {f(X), f(Y), f(X) ∪ f(Y)}` |
//! | `mu_cup`       | `f(Y) ∩ (X − f(X)) ≠ ∅ ⇒ f(X ∪ Y) ∩ Y = ∅` |
//! | `mu_cup_prime` | `f(Y) ∩ (X − f(X)) ≠ ∅ ⇒ f(X ∪ Y) = f(X)` |
//! | `mu_in`        | `a ∈ X − f(X) ⇒ ∃ b ∈ X. a ∉ f({a, b})` |
//!
//! Proof-theoretic rules on a consequence operator `C` (written on the
//! selected-model sets `sel(X)` with `X` the models of the premise theory;
//! theory inclusion reverses model-set inclusion, the union of two
//! axiomatizations intersects their model sets, and the disjunction of two
//! theories unions them):
//!
//! | id             | rule on selected models |
//! |----------------|-------------------------|
//! | `AND`          | `sel(X) ⊆ M(α), sel(X) ⊆ M(β) ⇒ sel(X) ⊆ M(α ∧ β)` |
//! | `OR`           | `sel(X ∪ X′) ⊆ sel(X) ∪ sel(X′)` |
//! | `wOR`          | `sel(X ∪ X′) ⊆ sel(X) ∪ X′` |
//! | `disjOR`       | `X ∩ X′ = ∅ ⇒ sel(X ∪ X′) ⊆ sel(X) ∪ sel(X′)` |
//! | `LLE`          | `X = X′ ⇒ sel(X) = sel(X′)` |
//! | `RW`           | `sel(X) ⊆ M(α), M(α) ⊆ M(β) ⇒ sel(X) ⊆ M(β)` |
//! | `CCL`          | consequences are classically closed |
//! | `SC`, `REF`    | `sel(X) ⊆ X` |
//! | `CP`           | `sel(X) = ∅ ⇒ X = ∅` |
//! | `PR`           | `sel(X) ∩ X′ ⊆ sel(X ∩ X′)` |
//! | `CUT`          | `sel(X) ⊆ X′ ⊆ X ⇒ sel(X) ⊆ sel(X′)` |
//! | `CM`           | `sel(X) ⊆ X′ ⊆ X ⇒ sel(X′) ⊆ sel(X)` |
//! | `ResM`         | `sel(M(Δ)) ⊆ M(α) ∩ M(β) ⇒ sel(M(Δ) ∩ M(α)) ⊆ M(β)` |
//! | `CUM`          | `sel(X) ⊆ X′ ⊆ X ⇒ sel(X′) = sel(X)` |
//! | `sub_sup`      | `sel(X′) ⊆ X, sel(X) ⊆ X′ ⇒ sel(X) = sel(X′)` |
//! | `RatM`         | `X ⊆ X′, X ∩ sel(X′) ≠ ∅ ⇒ sel(X) ⊆ sel(X′) ∩ X` |
//! | `RatM_eq`      | `X ⊆ X′, X ∩ sel(X′) ≠ ∅ ⇒ sel(X) = sel(X′) ∩ X` |
//! | `log_eq_prime` | `sel(X′) ∩ X ≠ ∅ ⇒ sel(X ∩ X′) = sel(X′) ∩ X` |
//! | `log_par`      | `sel(X ∪ X′) ∈ {sel(X), sel(X′), sel(X) ∪ sel(X′)}` |
//! | `log_cup`      | `sel(X′) ∩ X ≠ ∅, sel(X′) ∩ sel(X) = ∅ ⇒ sel(X ∪ X′) ∩ X′ = ∅` |
//! | `log_cup_prime`| `sel(X′) ∩ X ≠ ∅, sel(X′) ∩ sel(X) = ∅ ⇒ sel(X ∪ X′) = sel(X)` |

use crate::logic::{models_of, theory_of, DomainFamily, Formula, ModelSet, Theory, Vocabulary};
use crate::report::{PropertyVerdict, Report, Section, ReportItem, Witness, WitnessValue};
use std::collections::BTreeMap;
use thiserror::Error;

/// Default cap on exhaustive choice-function enumeration.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// Errors raised by the choice layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChoiceError {
    #[error("ambient space mismatch between components of the choice function")]
    SpaceMismatch,
    #[error("map must be defined on exactly the domain sets; offending set {0}")]
    MapDomainMismatch(String),
    #[error("value {value} of map entry {key} is not contained in the universe")]
    ValueOutsideUniverse { key: String, value: String },
    #[error("domain set {0} is not contained in the universe")]
    DomainSetOutsideUniverse(String),
    #[error("not defined at model set {0}")]
    DomainMiss(String),
    #[error("unknown property id `{0}`")]
    UnknownPropertyId(String),
    #[error("unknown rule id `{0}`")]
    UnknownRuleId(String),
    #[error("unknown implication row `{0}`")]
    UnknownRowId(String),
    #[error("enumeration would yield {required} functions, over the cap of {cap}")]
    EnumerationCapExceeded { required: u128, cap: u128 },
    #[error("theory pool must be non-empty")]
    EmptyPool,
    #[error("set space {set_space} does not match the vocabulary's model space {vocab_space}")]
    VocabularySpaceMismatch { set_space: usize, vocab_space: usize },
}

// ---------------------------------------------------------------------------
// Choice functions
// ---------------------------------------------------------------------------

/// A function `f : Y → P(U)` given extensionally: a universe `U`, a domain
/// family `Y`, and a value for exactly each domain set. Values are only
/// required to lie inside the universe — `f(X) ⊆ X` is the checkable
/// condition `mu_sub`, not an invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceFunction {
    universe: ModelSet,
    domain: DomainFamily,
    map: BTreeMap<ModelSet, ModelSet>,
}

impl ChoiceFunction {
    pub fn new(
        universe: ModelSet,
        domain: DomainFamily,
        map: BTreeMap<ModelSet, ModelSet>,
    ) -> Result<Self, ChoiceError> {
        let space = universe.space();
        if domain.space() != space {
            return Err(ChoiceError::SpaceMismatch);
        }
        for x in domain.sets() {
            if !x.is_subset(&universe) {
                return Err(ChoiceError::DomainSetOutsideUniverse(x.to_string()));
            }
            if !map.contains_key(x) {
                return Err(ChoiceError::MapDomainMismatch(x.to_string()));
            }
        }
        for (k, v) in &map {
            if k.space() != space || v.space() != space {
                return Err(ChoiceError::SpaceMismatch);
            }
            if !domain.contains(k) {
                return Err(ChoiceError::MapDomainMismatch(k.to_string()));
            }
            if !v.is_subset(&universe) {
                return Err(ChoiceError::ValueOutsideUniverse {
                    key: k.to_string(),
                    value: v.to_string(),
                });
            }
        }
        Ok(ChoiceFunction {
            universe,
            domain,
            map,
        })
    }

    /// The identity choice function `f(X) = X` on the given domain.
    pub fn identity_on(universe: ModelSet, domain: DomainFamily) -> Result<Self, ChoiceError> {
        let map = domain
            .sets()
            .iter()
            .map(|x| (x.clone(), x.clone()))
            .collect();
        ChoiceFunction::new(universe, domain, map)
    }

    pub fn universe(&self) -> &ModelSet {
        &self.universe
    }

    pub fn domain(&self) -> &DomainFamily {
        &self.domain
    }

    pub fn map(&self) -> &BTreeMap<ModelSet, ModelSet> {
        &self.map
    }

    /// Value at `x`, or `None` when `x` is outside the domain.
    pub fn get(&self, x: &ModelSet) -> Option<&ModelSet> {
        self.map.get(x)
    }

    /// Value at `x`, with a domain-miss error naming the absent set.
    pub fn apply(&self, x: &ModelSet) -> Result<&ModelSet, ChoiceError> {
        self.map
            .get(x)
            .ok_or_else(|| ChoiceError::DomainMiss(x.to_string()))
    }

    /// Extensional equality of domain and map (the universe is not
    /// compared, so functions reconstructed from an operator compare equal
    /// to their source).
    pub fn same_map(&self, other: &ChoiceFunction) -> bool {
        self.domain.sets() == other.domain.sets() && self.map == other.map
    }
}

// ---------------------------------------------------------------------------
// Model-side conditions
// ---------------------------------------------------------------------------

/// The model-side conditions checkable on a [`ChoiceFunction`]. See the
/// module table for each condition's statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MuProperty {
    MuSub,
    MuEmpty,
    MuEmptyFin,
    MuPR,
    MuPRPrime,
    MuOR,
    MuWOR,
    MuDisjOR,
    MuCUT,
    MuCM,
    MuResM,
    MuCUM,
    MuSubSup,
    MuRatM,
    MuEq,
    MuEqPrime,
    MuPar,
    MuCup,
    MuCupPrime,
    MuIn,
}

impl MuProperty {
    pub const ALL: [MuProperty; 20] = [
        MuProperty::MuSub,
        MuProperty::MuEmpty,
        MuProperty::MuEmptyFin,
        MuProperty::MuPR,
        MuProperty::MuPRPrime,
        MuProperty::MuOR,
        MuProperty::MuWOR,
        MuProperty::MuDisjOR,
        MuProperty::MuCUT,
        MuProperty::MuCM,
        MuProperty::MuResM,
        MuProperty::MuCUM,
        MuProperty::MuSubSup,
        MuProperty::MuRatM,
        MuProperty::MuEq,
        MuProperty::MuEqPrime,
        MuProperty::MuPar,
        MuProperty::MuCup,
        MuProperty::MuCupPrime,
        MuProperty::MuIn,
    ];

    pub fn id(self) -> &'static str {
        match self {
            MuProperty::MuSub => "mu_sub",
            MuProperty::MuEmpty => "mu_empty",
            MuProperty::MuEmptyFin => "mu_empty_fin",
            MuProperty::MuPR => "mu_PR",
            MuProperty::MuPRPrime => "mu_PR_prime",
            MuProperty::MuOR => "mu_OR",
            MuProperty::MuWOR => "mu_wOR",
            MuProperty::MuDisjOR => "mu_disjOR",
            MuProperty::MuCUT => "mu_CUT",
            MuProperty::MuCM => "mu_CM",
            MuProperty::MuResM => "mu_ResM",
            MuProperty::MuCUM => "mu_CUM",
            MuProperty::MuSubSup => "mu_sub_sup",
            MuProperty::MuRatM => "mu_RatM",
            MuProperty::MuEq => "mu_eq",
            MuProperty::MuEqPrime => "mu_eq_prime",
            MuProperty::MuPar => "mu_par",
            MuProperty::MuCup => "mu_cup",
            MuProperty::MuCupPrime => "mu_cup_prime",
            MuProperty::MuIn => "mu_in",
        }
    }

    pub fn from_id(id: &str) -> Result<Self, ChoiceError> {
        MuProperty::ALL
            .iter()
            .copied()
            .find(|p| p.id() == id)
            .ok_or_else(|| ChoiceError::UnknownPropertyId(id.to_string()))
    }
}

/// Bookkeeping shared by the condition checkers: instance counts plus the
/// first (least, in scan order) witness found.
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

    /// Records a decided instance; returns true when scanning should stop
    /// (a witness was just recorded).
    fn decide(&mut self, ok: bool, witness: impl FnOnce() -> Witness) -> bool {
        self.checked += 1;
        if !ok {
            self.witness = Some(witness());
            true
        } else {
            false
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

fn set_slot(s: &ModelSet) -> WitnessValue {
    WitnessValue::Set(s.members())
}

/// Checks one model-side condition on a choice function.
///
/// Set variables range over the domain family in canonical ascending order
/// (outer variable first, as named in the condition); evaluation is lazy, so
/// an instance whose truth is determined without a missing value is decided
/// rather than skipped. The witness of a failure is the least one in scan
/// order.
pub fn check_mu_property(f: &ChoiceFunction, prop: MuProperty) -> PropertyVerdict {
    let dom = f.domain().sets();
    let mut scan = Scan::new();
    match prop {
        MuProperty::MuSub => {
            for x in dom {
                let fx = &f.map[x];
                if scan.decide(fx.is_subset(x), || {
                    let stray = fx.minus(x).least().expect("non-subset has a stray member");
                    Witness::new()
                        .with("X", set_slot(x))
                        .with("f(X)", set_slot(fx))
                        .element("x", stray)
                }) {
                    break;
                }
            }
        }
        MuProperty::MuEmpty => {
            for x in dom {
                let fx = &f.map[x];
                if scan.decide(!fx.is_empty() || x.is_empty(), || {
                    Witness::new().with("X", set_slot(x))
                }) {
                    break;
                }
            }
        }
        MuProperty::MuEmptyFin => {
            for x in dom {
                let fx = &f.map[x];
                if scan.decide(x.is_empty() || !fx.is_empty(), || {
                    Witness::new().with("X", set_slot(x))
                }) {
                    break;
                }
            }
        }
        MuProperty::MuPR => {
            'outer: for x in dom {
                for y in dom {
                    if !x.is_subset(y) {
                        continue;
                    }
                    let lhs = f.map[y].inter(x);
                    let fx = &f.map[x];
                    if scan.decide(lhs.is_subset(fx), || {
                        let e = lhs.minus(fx).least().expect("witness element");
                        Witness::new()
                            .with("X", set_slot(x))
                            .with("Y", set_slot(y))
                            .element("x", e)
                    }) {
                        break 'outer;
                    }
                }
            }
        }
        MuProperty::MuPRPrime => {
            'outer: for x in dom {
                for y in dom {
                    let lhs = f.map[x].inter(y);
                    if lhs.is_empty() {
                        scan.checked += 1;
                        continue;
                    }
                    let xy = x.inter(y);
                    match f.get(&xy) {
                        None => scan.skip(),
                        Some(fxy) => {
                            if scan.decide(lhs.is_subset(fxy), || {
                                let e = lhs.minus(fxy).least().expect("witness element");
                                Witness::new()
                                    .with("X", set_slot(x))
                                    .with("Y", set_slot(y))
                                    .element("x", e)
                            }) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        MuProperty::MuOR | MuProperty::MuDisjOR => {
            'outer: for x in dom {
                for y in dom {
                    if prop == MuProperty::MuDisjOR && !x.is_disjoint(y) {
                        scan.checked += 1;
                        continue;
                    }
                    let xy = x.union(y);
                    match f.get(&xy) {
                        None => scan.skip(),
                        Some(fxy) => {
                            let rhs = f.map[x].union(&f.map[y]);
                            if scan.decide(fxy.is_subset(&rhs), || {
                                let e = fxy.minus(&rhs).least().expect("witness element");
                                Witness::new()
                                    .with("X", set_slot(x))
                                    .with("Y", set_slot(y))
                                    .element("x", e)
                            }) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        MuProperty::MuWOR => {
            'outer: for x in dom {
                for y in dom {
                    let xy = x.union(y);
                    match f.get(&xy) {
                        None => scan.skip(),
                        Some(fxy) => {
                            let rhs = f.map[x].union(y);
                            if scan.decide(fxy.is_subset(&rhs), || {
                                let e = fxy.minus(&rhs).least().expect("witness element");
                                Witness::new()
                                    .with("X", set_slot(x))
                                    .with("Y", set_slot(y))
                                    .element("x", e)
                            }) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        MuProperty::MuCUT | MuProperty::MuCM | MuProperty::MuCUM => {
            'outer: for x in dom {
                for y in dom {
                    let fx = &f.map[x];
                    if !(fx.is_subset(y) && y.is_subset(x)) {
                        scan.checked += 1;
                        continue;
                    }
                    let fy = &f.map[y];
                    let ok = match prop {
                        MuProperty::MuCUT => fx.is_subset(fy),
                        MuProperty::MuCM => fy.is_subset(fx),
                        _ => fx == fy,
                    };
                    if scan.decide(ok, || {
                        let diff = match prop {
                            MuProperty::MuCUT => fx.minus(fy),
                            MuProperty::MuCM => fy.minus(fx),
                            _ => fx.minus(fy).union(&fy.minus(fx)),
                        };
                        let e = diff.least().expect("witness element");
                        Witness::new()
                            .with("X", set_slot(x))
                            .with("Y", set_slot(y))
                            .element("x", e)
                    }) {
                        break 'outer;
                    }
                }
            }
        }
        MuProperty::MuResM => {
            'outer: for x in dom {
                for a in dom {
                    for b in dom {
                        let fx = &f.map[x];
                        if !fx.is_subset(&a.inter(b)) {
                            scan.checked += 1;
                            continue;
                        }
                        let xa = x.inter(a);
                        match f.get(&xa) {
                            None => scan.skip(),
                            Some(fxa) => {
                                if scan.decide(fxa.is_subset(b), || {
                                    let e = fxa.minus(b).least().expect("witness element");
                                    Witness::new()
                                        .with("X", set_slot(x))
                                        .with("A", set_slot(a))
                                        .with("B", set_slot(b))
                                        .element("x", e)
                                }) {
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
        MuProperty::MuSubSup => {
            'outer: for x in dom {
                for y in dom {
                    let fx = &f.map[x];
                    let fy = &f.map[y];
                    if !(fx.is_subset(y) && fy.is_subset(x)) {
                        scan.checked += 1;
                        continue;
                    }
                    if scan.decide(fx == fy, || {
                        let diff = fx.minus(fy).union(&fy.minus(fx));
                        let e = diff.least().expect("witness element");
                        Witness::new()
                            .with("X", set_slot(x))
                            .with("Y", set_slot(y))
                            .element("x", e)
                    }) {
                        break 'outer;
                    }
                }
            }
        }
        MuProperty::MuRatM | MuProperty::MuEq => {
            'outer: for x in dom {
                for y in dom {
                    if !x.is_subset(y) {
                        scan.checked += 1;
                        continue;
                    }
                    let fy = &f.map[y];
                    if x.is_disjoint(fy) {
                        scan.checked += 1;
                        continue;
                    }
                    let fx = &f.map[x];
                    let fyx = fy.inter(x);
                    let ok = if prop == MuProperty::MuRatM {
                        fx.is_subset(&fyx)
                    } else {
                        *fx == fyx
                    };
                    if scan.decide(ok, || {
                        let diff = if prop == MuProperty::MuRatM {
                            fx.minus(&fyx)
                        } else {
                            fx.minus(&fyx).union(&fyx.minus(fx))
                        };
                        let e = diff.least().expect("witness element");
                        Witness::new()
                            .with("X", set_slot(x))
                            .with("Y", set_slot(y))
                            .element("x", e)
                    }) {
                        break 'outer;
                    }
                }
            }
        }
        MuProperty::MuEqPrime => {
            'outer: for y in dom {
                for x in dom {
                    let fy = &f.map[y];
                    let fyx = fy.inter(x);
                    if fyx.is_empty() {
                        scan.checked += 1;
                        continue;
                    }
                    let yx = y.inter(x);
                    match f.get(&yx) {
                        None => scan.skip(),
                        Some(fyx_val) => {
                            if scan.decide(*fyx_val == fyx, || {
                                let diff = fyx_val.minus(&fyx).union(&fyx.minus(fyx_val));
                                let e = diff.least().expect("witness element");
                                Witness::new()
                                    .with("Y", set_slot(y))
                                    .with("X", set_slot(x))
                                    .element("x", e)
                            }) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        MuProperty::MuPar => {
            'outer: for x in dom {
                for y in dom {
                    let xy = x.union(y);
                    match f.get(&xy) {
                        None => scan.skip(),
                        Some(fxy) => {
                            let fx = &f.map[x];
                            let fy = &f.map[y];
                            let ok = fxy == fx || fxy == fy || *fxy == fx.union(fy);
                            if scan.decide(ok, || {
                                Witness::new()
                                    .with("X", set_slot(x))
                                    .with("Y", set_slot(y))
                                    .with("f(X∪Y)", set_slot(fxy))
                                    .with("f(X)", set_slot(fx))
                                    .with("f(Y)", set_slot(fy))
                            }) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        MuProperty::MuCup | MuProperty::MuCupPrime => {
            'outer: for x in dom {
                for y in dom {
                    let fx = &f.map[x];
                    let fy = &f.map[y];
                    if fy.inter(&x.minus(fx)).is_empty() {
                        scan.checked += 1;
                        continue;
                    }
                    let xy = x.union(y);
                    match f.get(&xy) {
                        None => scan.skip(),
                        Some(fxy) => {
                            let ok = if prop == MuProperty::MuCup {
                                fxy.is_disjoint(y)
                            } else {
                                fxy == fx
                            };
                            if scan.decide(ok, || {
                                let diff = if prop == MuProperty::MuCup {
                                    fxy.inter(y)
                                } else {
                                    fxy.minus(fx).union(&fx.minus(fxy))
                                };
                                let e = diff.least().expect("witness element");
                                Witness::new()
                                    .with("X", set_slot(x))
                                    .with("Y", set_slot(y))
                                    .element("x", e)
                            }) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        MuProperty::MuIn => {
            // Per instance (X, a) with a ∈ X − f(X): pass when some b ∈ X
            // has {a,b} in the domain with a ∉ f({a,b}); fail when every
            // pair {a,b} is in the domain and none works; skip otherwise.
            'outer: for x in dom {
                let fx = &f.map[x];
                for a in x.minus(fx).iter() {
                    let mut found = false;
                    let mut missing = false;
                    for b in x.iter() {
                        let mut pair = ModelSet::singleton(x.space(), a);
                        pair.insert(b);
                        match f.get(&pair) {
                            None => missing = true,
                            Some(fp) => {
                                if !fp.contains(a) {
                                    found = true;
                                    break;
                                }
                            }
                        }
                    }
                    if found {
                        scan.checked += 1;
                    } else if missing {
                        scan.skip();
                    } else if scan.decide(false, || {
                        Witness::new().with("X", set_slot(x)).element("a", a)
                    }) {
                        break 'outer;
                    }
                }
            }
        }
    }
    scan.verdict(prop.id())
}

/// Evaluates all model-side conditions once, returning `holds` per
/// property — the fast path for exhaustive sweeps.
pub fn mu_profile(f: &ChoiceFunction) -> BTreeMap<MuProperty, bool> {
    MuProperty::ALL
        .iter()
        .map(|&p| (p, check_mu_property(f, p).holds))
        .collect()
}

/// The bound entailed for unions when `mu_wOR` and `mu_sub` hold:
/// `f(X ∪ Y) ⊆ f(X) ∪ f(Y) ∪ (X ∩ Y)`.
pub fn check_union_bound(f: &ChoiceFunction) -> PropertyVerdict {
    let dom = f.domain().sets();
    let mut scan = Scan::new();
    'outer: for x in dom {
        for y in dom {
            let xy = x.union(y);
            match f.get(&xy) {
                None => scan.skip(),
                Some(fxy) => {
                    let bound = f.map[x].union(&f.map[y]).union(&x.inter(y));
                    if scan.decide(fxy.is_subset(&bound), || {
                        let e = fxy.minus(&bound).least().expect("witness element");
                        Witness::new()
                            .with("X", set_slot(x))
                            .with("Y", set_slot(y))
                            .element("x", e)
                    }) {
                        break 'outer;
                    }
                }
            }
        }
    }
    scan.verdict("union_bound")
}

// ---------------------------------------------------------------------------
// Consequence operators
// ---------------------------------------------------------------------------

/// A nonmonotonic consequence operation, represented extensionally: for each
/// covered premise-set of models `X = M(T)`, the set `sel(X)` of models of
/// the conclusions. Keying by model sets makes `LLE` and `CCL` hold by
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsequenceOperator {
    vocab: Vocabulary,
    sel: BTreeMap<ModelSet, ModelSet>,
}

impl ConsequenceOperator {
    pub fn new(
        vocab: Vocabulary,
        sel: BTreeMap<ModelSet, ModelSet>,
    ) -> Result<Self, ChoiceError> {
        let space = vocab.space();
        for (k, v) in &sel {
            if k.space() != space || v.space() != space {
                return Err(ChoiceError::VocabularySpaceMismatch {
                    set_space: if k.space() != space { k.space() } else { v.space() },
                    vocab_space: space,
                });
            }
        }
        Ok(ConsequenceOperator { vocab, sel })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn sel(&self) -> &BTreeMap<ModelSet, ModelSet> {
        &self.sel
    }

    /// The conclusions of a theory: the canonical axiomatization of the
    /// selected models of `M(T)`. Errors when `M(T)` is not covered.
    pub fn consequences(&self, t: &Theory) -> Result<Theory, ChoiceError> {
        let x = models_of(t, &self.vocab);
        let sel = self
            .sel
            .get(&x)
            .ok_or_else(|| ChoiceError::DomainMiss(x.to_string()))?;
        Ok(theory_of(sel, &self.vocab))
    }
}

/// Builds the consequence operation induced by a choice function:
/// conclusions of `T` are the theory of `f(M(T))`. The function's sets must
/// live in the vocabulary's model space.
pub fn logic_from_mu(
    f: &ChoiceFunction,
    vocab: &Vocabulary,
) -> Result<ConsequenceOperator, ChoiceError> {
    if f.universe().space() != vocab.space() {
        return Err(ChoiceError::VocabularySpaceMismatch {
            set_space: f.universe().space(),
            vocab_space: vocab.space(),
        });
    }
    ConsequenceOperator::new(vocab.clone(), f.map().clone())
}

/// Recovers the choice function of an operator: domain = the covered model
/// sets, `f(X) = sel(X)`, universe = everything mentioned attached to the
/// covered sets.
pub fn mu_from_logic(c: &ConsequenceOperator) -> ChoiceFunction {
    let space = c.vocab.space();
    let mut universe = ModelSet::empty(space);
    for (k, v) in &c.sel {
        universe = universe.union(k).union(v);
    }
    let domain = DomainFamily::new(space, c.sel.keys().cloned().collect())
        .expect("operator sets share one space");
    ChoiceFunction::new(universe, domain, c.sel.clone())
        .expect("operator map is total on its own key family")
}

// ---------------------------------------------------------------------------
// Proof-theoretic rules
// ---------------------------------------------------------------------------

/// The checkable rules on a [`ConsequenceOperator`]. See the module table
/// for each rule's reading on selected-model sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LogicRule {
    And,
    Or,
    WOr,
    DisjOr,
    Lle,
    Rw,
    Ccl,
    Sc,
    Ref,
    Cp,
    Pr,
    Cut,
    Cm,
    ResM,
    Cum,
    SubSup,
    RatM,
    RatMEq,
    LogEqPrime,
    LogPar,
    LogCup,
    LogCupPrime,
}

impl LogicRule {
    pub const ALL: [LogicRule; 22] = [
        LogicRule::And,
        LogicRule::Or,
        LogicRule::WOr,
        LogicRule::DisjOr,
        LogicRule::Lle,
        LogicRule::Rw,
        LogicRule::Ccl,
        LogicRule::Sc,
        LogicRule::Ref,
        LogicRule::Cp,
        LogicRule::Pr,
        LogicRule::Cut,
        LogicRule::Cm,
        LogicRule::ResM,
        LogicRule::Cum,
        LogicRule::SubSup,
        LogicRule::RatM,
        LogicRule::RatMEq,
        LogicRule::LogEqPrime,
        LogicRule::LogPar,
        LogicRule::LogCup,
        LogicRule::LogCupPrime,
    ];

    pub fn id(self) -> &'static str {
        match self {
            LogicRule::And => "AND",
            LogicRule::Or => "OR",
            LogicRule::WOr => "wOR",
            LogicRule::DisjOr => "disjOR",
            LogicRule::Lle => "LLE",
            LogicRule::Rw => "RW",
            LogicRule::Ccl => "CCL",
            LogicRule::Sc => "SC",
            LogicRule::Ref => "REF",
            LogicRule::Cp => "CP",
            LogicRule::Pr => "PR",
            LogicRule::Cut => "CUT",
            LogicRule::Cm => "CM",
            LogicRule::ResM => "ResM",
            LogicRule::Cum => "CUM",
            LogicRule::SubSup => "sub_sup",
            LogicRule::RatM => "RatM",
            LogicRule::RatMEq => "RatM_eq",
            LogicRule::LogEqPrime => "log_eq_prime",
            LogicRule::LogPar => "log_par",
            LogicRule::LogCup => "log_cup",
            LogicRule::LogCupPrime => "log_cup_prime",
        }
    }

    pub fn from_id(id: &str) -> Result<Self, ChoiceError> {
        LogicRule::ALL
            .iter()
            .copied()
            .find(|r| r.id() == id)
            .ok_or_else(|| ChoiceError::UnknownRuleId(id.to_string()))
    }
}

/// Cap on the generated formula pool used for formula slots.
pub const FORMULA_POOL_CAP: usize = 256;

/// The generated formula pool: canonical axiomatizations of subsets of the
/// model space in ascending order. When the space has more than
/// [`FORMULA_POOL_CAP`] subsets, the pool is the contradiction, the
/// tautology, all single-model formulas, and their complements.
pub fn formula_pool(vocab: &Vocabulary) -> Vec<Formula> {
    let space = vocab.space();
    let full = ModelSet::full(space);
    let count: u128 = 1u128 << space;
    let sets: Vec<ModelSet> = if count <= FORMULA_POOL_CAP as u128 {
        full.subsets().collect()
    } else {
        let mut sets = vec![ModelSet::empty(space), full.clone()];
        for m in 0..space {
            sets.push(ModelSet::singleton(space, m));
            sets.push(full.minus(&ModelSet::singleton(space, m)));
        }
        sets.sort();
        sets.dedup();
        sets
    };
    sets.iter()
        .map(|s| {
            let t = theory_of(s, vocab);
            t.formulas
                .into_iter()
                .reduce(Formula::and)
                .unwrap_or(Formula::Top)
        })
        .collect()
}

/// The default theory pool: canonical axiomatizations of all subsets of the
/// model space in ascending order (total when the space is small; otherwise
/// the same restricted family as [`formula_pool`], extended with the
/// covered sets of `extra`).
pub fn default_theory_pool(vocab: &Vocabulary, extra: &[ModelSet]) -> Vec<Theory> {
    let space = vocab.space();
    let count: u128 = 1u128 << space;
    let mut sets: Vec<ModelSet> = if count <= FORMULA_POOL_CAP as u128 {
        ModelSet::full(space).subsets().collect()
    } else {
        let full = ModelSet::full(space);
        let mut sets = vec![ModelSet::empty(space), full.clone()];
        for m in 0..space {
            sets.push(ModelSet::singleton(space, m));
            sets.push(full.minus(&ModelSet::singleton(space, m)));
        }
        sets.extend(extra.iter().cloned());
        sets.sort();
        sets.dedup();
        sets
    };
    sets.sort();
    sets.iter().map(|s| theory_of(s, vocab)).collect()
}

struct PoolEntry {
    set: ModelSet,
    text: Vec<String>,
}

fn theory_slot(e: &PoolEntry) -> WitnessValue {
    WitnessValue::Theory(e.text.clone())
}

/// Checks one rule on a consequence operator. Theory slots range over the
/// pool in the given order; formula slots range over the generated
/// [`formula_pool`]. Instances needing `sel` at an uncovered model set are
/// skipped and counted; evaluation is lazy (premise first), so an instance
/// decided without a missing value is decided, not skipped.
pub fn check_logic_rule(
    c: &ConsequenceOperator,
    rule: LogicRule,
    pool: &[Theory],
) -> Result<PropertyVerdict, ChoiceError> {
    if pool.is_empty() {
        return Err(ChoiceError::EmptyPool);
    }
    let vocab = &c.vocab;
    let entries: Vec<PoolEntry> = pool
        .iter()
        .map(|t| PoolEntry {
            set: models_of(t, vocab),
            text: t.formulas.iter().map(|f| f.print(vocab)).collect(),
        })
        .collect();
    let sel = |x: &ModelSet| c.sel.get(x);
    let mut scan = Scan::new();

    match rule {
        LogicRule::Sc | LogicRule::Ref => {
            for t in &entries {
                match sel(&t.set) {
                    None => scan.skip(),
                    Some(s) => {
                        if scan.decide(s.is_subset(&t.set), || {
                            let e = s.minus(&t.set).least().expect("witness element");
                            Witness::new()
                                .with("T", theory_slot(t))
                                .with("M(T)", set_slot(&t.set))
                                .element("x", e)
                        }) {
                            break;
                        }
                    }
                }
            }
        }
        LogicRule::Cp => {
            for t in &entries {
                match sel(&t.set) {
                    None => scan.skip(),
                    Some(s) => {
                        if scan.decide(!s.is_empty() || t.set.is_empty(), || {
                            Witness::new()
                                .with("T", theory_slot(t))
                                .with("M(T)", set_slot(&t.set))
                        }) {
                            break;
                        }
                    }
                }
            }
        }
        LogicRule::Lle => {
            'outer: for t in &entries {
                for t2 in &entries {
                    if t.set != t2.set {
                        scan.checked += 1;
                        continue;
                    }
                    match (sel(&t.set), sel(&t2.set)) {
                        (Some(a), Some(b)) => {
                            if scan.decide(a == b, || {
                                Witness::new()
                                    .with("T", theory_slot(t))
                                    .with("T'", theory_slot(t2))
                            }) {
                                break 'outer;
                            }
                        }
                        _ => scan.skip(),
                    }
                }
            }
        }
        LogicRule::And => {
            let fpool = formula_pool(vocab);
            'outer: for t in &entries {
                let s = match sel(&t.set) {
                    None => {
                        scan.skipped += (fpool.len() * fpool.len()) as u64;
                        continue;
                    }
                    Some(s) => s,
                };
                for alpha in &fpool {
                    let ma = alpha.models(vocab);
                    if !s.is_subset(&ma) {
                        scan.checked += fpool.len() as u64;
                        continue;
                    }
                    for beta in &fpool {
                        let mb = beta.models(vocab);
                        if !s.is_subset(&mb) {
                            scan.checked += 1;
                            continue;
                        }
                        let both = ma.inter(&mb);
                        if scan.decide(s.is_subset(&both), || {
                            Witness::new()
                                .with("T", theory_slot(t))
                                .with("alpha", WitnessValue::Formula(alpha.print(vocab)))
                                .with("beta", WitnessValue::Formula(beta.print(vocab)))
                        }) {
                            break 'outer;
                        }
                    }
                }
            }
        }
        LogicRule::Rw => {
            let fpool = formula_pool(vocab);
            'outer: for t in &entries {
                let s = match sel(&t.set) {
                    None => {
                        scan.skipped += (fpool.len() * fpool.len()) as u64;
                        continue;
                    }
                    Some(s) => s,
                };
                for alpha in &fpool {
                    let ma = alpha.models(vocab);
                    if !s.is_subset(&ma) {
                        scan.checked += fpool.len() as u64;
                        continue;
                    }
                    for beta in &fpool {
                        let mb = beta.models(vocab);
                        if !ma.is_subset(&mb) {
                            scan.checked += 1;
                            continue;
                        }
                        if scan.decide(s.is_subset(&mb), || {
                            Witness::new()
                                .with("T", theory_slot(t))
                                .with("alpha", WitnessValue::Formula(alpha.print(vocab)))
                                .with("beta", WitnessValue::Formula(beta.print(vocab)))
                        }) {
                            break 'outer;
                        }
                    }
                }
            }
        }
        LogicRule::Ccl => {
            // The conclusions of T, restricted to the pool, must already
            // entail every pool formula they classically entail.
            let fpool = formula_pool(vocab);
            'outer: for t in &entries {
                let s = match sel(&t.set) {
                    None => {
                        scan.skipped += fpool.len() as u64;
                        continue;
                    }
                    Some(s) => s,
                };
                let mut closure = ModelSet::full(vocab.space());
                for gamma in &fpool {
                    let mg = gamma.models(vocab);
                    if s.is_subset(&mg) {
                        closure = closure.inter(&mg);
                    }
                }
                for beta in &fpool {
                    let mb = beta.models(vocab);
                    if !closure.is_subset(&mb) {
                        scan.checked += 1;
                        continue;
                    }
                    if scan.decide(s.is_subset(&mb), || {
                        Witness::new()
                            .with("T", theory_slot(t))
                            .with("beta", WitnessValue::Formula(beta.print(vocab)))
                    }) {
                        break 'outer;
                    }
                }
            }
        }
        LogicRule::Or | LogicRule::DisjOr => {
            'outer: for t in &entries {
                for t2 in &entries {
                    if rule == LogicRule::DisjOr && !t.set.is_disjoint(&t2.set) {
                        scan.checked += 1;
                        continue;
                    }
                    let union = t.set.union(&t2.set);
                    match (sel(&union), sel(&t.set), sel(&t2.set)) {
                        (Some(su), Some(s1), Some(s2)) => {
                            let rhs = s1.union(s2);
                            if scan.decide(su.is_subset(&rhs), || {
                                let e = su.minus(&rhs).least().expect("witness element");
                                Witness::new()
                                    .with("T", theory_slot(t))
                                    .with("T'", theory_slot(t2))
                                    .element("x", e)
                            }) {
                                break 'outer;
                            }
                        }
                        _ => scan.skip(),
                    }
                }
            }
        }
        LogicRule::WOr => {
            'outer: for t in &entries {
                for t2 in &entries {
                    let union = t.set.union(&t2.set);
                    match (sel(&union), sel(&t.set)) {
                        (Some(su), Some(s1)) => {
                            let rhs = s1.union(&t2.set);
                            if scan.decide(su.is_subset(&rhs), || {
                                let e = su.minus(&rhs).least().expect("witness element");
                                Witness::new()
                                    .with("T", theory_slot(t))
                                    .with("T'", theory_slot(t2))
                                    .element("x", e)
                            }) {
                                break 'outer;
                            }
                        }
                        _ => scan.skip(),
                    }
                }
            }
        }
        LogicRule::Pr => {
            'outer: for t in &entries {
                for t2 in &entries {
                    let s = match sel(&t.set) {
                        None => {
                            scan.skip();
                            continue;
                        }
                        Some(s) => s,
                    };
                    let lhs = s.inter(&t2.set);
                    if lhs.is_empty() {
                        scan.checked += 1;
                        continue;
                    }
                    let meet = t.set.inter(&t2.set);
                    match sel(&meet) {
                        None => scan.skip(),
                        Some(sm) => {
                            if scan.decide(lhs.is_subset(sm), || {
                                let e = lhs.minus(sm).least().expect("witness element");
                                Witness::new()
                                    .with("T", theory_slot(t))
                                    .with("T'", theory_slot(t2))
                                    .element("x", e)
                            }) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        LogicRule::Cut | LogicRule::Cm | LogicRule::Cum => {
            'outer: for t in &entries {
                for t2 in &entries {
                    let s = match sel(&t.set) {
                        None => {
                            scan.skip();
                            continue;
                        }
                        Some(s) => s,
                    };
                    if !(s.is_subset(&t2.set) && t2.set.is_subset(&t.set)) {
                        scan.checked += 1;
                        continue;
                    }
                    match sel(&t2.set) {
                        None => scan.skip(),
                        Some(s2) => {
                            let ok = match rule {
                                LogicRule::Cut => s.is_subset(s2),
                                LogicRule::Cm => s2.is_subset(s),
                                _ => s == s2,
                            };
                            if scan.decide(ok, || {
                                Witness::new()
                                    .with("T", theory_slot(t))
                                    .with("T'", theory_slot(t2))
                                    .with("sel(M(T))", set_slot(s))
                                    .with("sel(M(T'))", set_slot(s2))
                            }) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        LogicRule::ResM => {
            let fpool = formula_pool(vocab);
            'outer: for delta in &fpool {
                let x = delta.models(vocab);
                let s = match sel(&x) {
                    None => {
                        scan.skipped += (fpool.len() * fpool.len()) as u64;
                        continue;
                    }
                    Some(s) => s,
                };
                for alpha in &fpool {
                    let ma = alpha.models(vocab);
                    for beta in &fpool {
                        let mb = beta.models(vocab);
                        if !s.is_subset(&ma.inter(&mb)) {
                            scan.checked += 1;
                            continue;
                        }
                        let xa = x.inter(&ma);
                        match sel(&xa) {
                            None => scan.skip(),
                            Some(sa) => {
                                if scan.decide(sa.is_subset(&mb), || {
                                    let e = sa.minus(&mb).least().expect("witness element");
                                    Witness::new()
                                        .with("Delta", WitnessValue::Formula(delta.print(vocab)))
                                        .with("alpha", WitnessValue::Formula(alpha.print(vocab)))
                                        .with("beta", WitnessValue::Formula(beta.print(vocab)))
                                        .element("x", e)
                                }) {
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
        LogicRule::SubSup => {
            'outer: for t in &entries {
                for t2 in &entries {
                    match (sel(&t.set), sel(&t2.set)) {
                        (Some(s), Some(s2)) => {
                            if !(s2.is_subset(&t.set) && s.is_subset(&t2.set)) {
                                scan.checked += 1;
                                continue;
                            }
                            if scan.decide(s == s2, || {
                                Witness::new()
                                    .with("T", theory_slot(t))
                                    .with("T'", theory_slot(t2))
                                    .with("sel(M(T))", set_slot(s))
                                    .with("sel(M(T'))", set_slot(s2))
                            }) {
                                break 'outer;
                            }
                        }
                        _ => scan.skip(),
                    }
                }
            }
        }
        LogicRule::RatM | LogicRule::RatMEq => {
            'outer: for t in &entries {
                for t2 in &entries {
                    if !t.set.is_subset(&t2.set) {
                        scan.checked += 1;
                        continue;
                    }
                    let s2 = match sel(&t2.set) {
                        None => {
                            scan.skip();
                            continue;
                        }
                        Some(s2) => s2,
                    };
                    if t.set.is_disjoint(s2) {
                        scan.checked += 1;
                        continue;
                    }
                    match sel(&t.set) {
                        None => scan.skip(),
                        Some(s) => {
                            let rhs = s2.inter(&t.set);
                            let ok = if rule == LogicRule::RatM {
                                s.is_subset(&rhs)
                            } else {
                                *s == rhs
                            };
                            if scan.decide(ok, || {
                                Witness::new()
                                    .with("T", theory_slot(t))
                                    .with("T'", theory_slot(t2))
                                    .with("sel(M(T))", set_slot(s))
                                    .with("sel(M(T'))∩M(T)", set_slot(&rhs))
                            }) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        LogicRule::LogEqPrime => {
            'outer: for t2 in &entries {
                for t in &entries {
                    let s2 = match sel(&t2.set) {
                        None => {
                            scan.skip();
                            continue;
                        }
                        Some(s2) => s2,
                    };
                    let rhs = s2.inter(&t.set);
                    if rhs.is_empty() {
                        scan.checked += 1;
                        continue;
                    }
                    let meet = t.set.inter(&t2.set);
                    match sel(&meet) {
                        None => scan.skip(),
                        Some(sm) => {
                            if scan.decide(*sm == rhs, || {
                                Witness::new()
                                    .with("T'", theory_slot(t2))
                                    .with("T", theory_slot(t))
                                    .with("sel(M(T)∩M(T'))", set_slot(sm))
                                    .with("sel(M(T'))∩M(T)", set_slot(&rhs))
                            }) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        LogicRule::LogPar => {
            'outer: for t in &entries {
                for t2 in &entries {
                    let union = t.set.union(&t2.set);
                    match (sel(&union), sel(&t.set), sel(&t2.set)) {
                        (Some(su), Some(s1), Some(s2)) => {
                            let ok = su == s1 || su == s2 || *su == s1.union(s2);
                            if scan.decide(ok, || {
                                Witness::new()
                                    .with("T", theory_slot(t))
                                    .with("T'", theory_slot(t2))
                                    .with("sel(M(T∨T'))", set_slot(su))
                                    .with("sel(M(T))", set_slot(s1))
                                    .with("sel(M(T'))", set_slot(s2))
                            }) {
                                break 'outer;
                            }
                        }
                        _ => scan.skip(),
                    }
                }
            }
        }
        LogicRule::LogCup | LogicRule::LogCupPrime => {
            'outer: for t in &entries {
                for t2 in &entries {
                    let (s, s2) = match (sel(&t.set), sel(&t2.set)) {
                        (Some(s), Some(s2)) => (s, s2),
                        _ => {
                            scan.skip();
                            continue;
                        }
                    };
                    if s2.is_disjoint(&t.set) || !s2.is_disjoint(s) {
                        scan.checked += 1;
                        continue;
                    }
                    let union = t.set.union(&t2.set);
                    match sel(&union) {
                        None => scan.skip(),
                        Some(su) => {
                            let ok = if rule == LogicRule::LogCup {
                                su.is_disjoint(&t2.set)
                            } else {
                                su == s
                            };
                            if scan.decide(ok, || {
                                Witness::new()
                                    .with("T", theory_slot(t))
                                    .with("T'", theory_slot(t2))
                                    .with("sel(M(T∨T'))", set_slot(su))
                                    .with("sel(M(T))", set_slot(s))
                            }) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(scan.verdict(rule.id()))
}

// ---------------------------------------------------------------------------
// Rule-to-condition correspondence
// ---------------------------------------------------------------------------

/// One correspondence pair between a rule on operators and a condition on
/// choice functions. At finite vocabulary the definability caveat is
/// automatic; what remains are the listed side conditions on `f`, one list
/// per direction. A direction with an empty list holds unconditionally.
#[derive(Debug, Clone, Copy)]
pub struct CorrespondencePair {
    pub rule: LogicRule,
    pub property: MuProperty,
    /// Conditions `f` must satisfy for "rule holds ⇒ condition holds".
    pub rule_to_mu_conditions: &'static [MuProperty],
    /// Conditions `f` must satisfy for "condition holds ⇒ rule holds".
    pub mu_to_rule_conditions: &'static [MuProperty],
}

/// All rule/condition correspondence pairs.
pub const CORRESPONDENCE: &[CorrespondencePair] = &[
    CorrespondencePair { rule: LogicRule::Or, property: MuProperty::MuOR, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::DisjOr, property: MuProperty::MuDisjOR, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::WOr, property: MuProperty::MuWOR, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::Sc, property: MuProperty::MuSub, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::Ref, property: MuProperty::MuSub, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::Cp, property: MuProperty::MuEmpty, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::Pr, property: MuProperty::MuPR, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[MuProperty::MuSub] },
    CorrespondencePair { rule: LogicRule::Cut, property: MuProperty::MuCUT, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::Cm, property: MuProperty::MuCM, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::ResM, property: MuProperty::MuResM, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::SubSup, property: MuProperty::MuSubSup, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::Cum, property: MuProperty::MuCUM, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::RatM, property: MuProperty::MuRatM, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::RatMEq, property: MuProperty::MuEq, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::LogEqPrime, property: MuProperty::MuEqPrime, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::LogPar, property: MuProperty::MuPar, rule_to_mu_conditions: &[], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::LogCup, property: MuProperty::MuCup, rule_to_mu_conditions: &[MuProperty::MuSub, MuProperty::MuEq], mu_to_rule_conditions: &[] },
    CorrespondencePair { rule: LogicRule::LogCupPrime, property: MuProperty::MuCupPrime, rule_to_mu_conditions: &[MuProperty::MuSub, MuProperty::MuEq], mu_to_rule_conditions: &[] },
];

// ---------------------------------------------------------------------------
// Implication rows
// ---------------------------------------------------------------------------

/// How an implication row is claimed to behave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// LHS conjunction entails RHS conjunction (under the domain
    /// conditions).
    Implication,
    /// LHS conjunction and RHS conjunction are equivalent.
    Equivalence,
    /// The implication fails for some function at this scale.
    NonImplication,
    /// The implication fails only for witnesses beyond finite scale; no
    /// counterexample is expected here.
    NonImplicationInfinite,
}

/// Closure conditions a row may require of the domain family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainCondition {
    IntersectionClosed,
    UnionClosed,
    SetDifferenceClosed,
    ContainsSingletons,
    FullPowerset,
}

impl DomainCondition {
    pub fn label(self) -> &'static str {
        match self {
            DomainCondition::IntersectionClosed => "intersection closure",
            DomainCondition::UnionClosed => "union closure",
            DomainCondition::SetDifferenceClosed => "set-difference closure",
            DomainCondition::ContainsSingletons => "singletons",
            DomainCondition::FullPowerset => "full power set",
        }
    }

    pub fn satisfied_by(self, family: &DomainFamily) -> bool {
        let flags = family.flags();
        match self {
            DomainCondition::IntersectionClosed => flags.closed_under_finite_intersection,
            DomainCondition::UnionClosed => flags.closed_under_finite_union,
            DomainCondition::SetDifferenceClosed => flags.closed_under_set_difference,
            DomainCondition::ContainsSingletons => flags.contains_singletons,
            DomainCondition::FullPowerset => family.is_full_powerset(),
        }
    }
}

/// One row of the implication table between model-side conditions.
#[derive(Debug, Clone, Copy)]
pub struct ImplicationRow {
    pub id: &'static str,
    pub group: &'static str,
    pub domain_conditions: &'static [DomainCondition],
    pub lhs: &'static [MuProperty],
    pub rhs: &'static [MuProperty],
    pub kind: RowKind,
}

use DomainCondition::*;
use MuProperty::*;

/// The implication table, in source order, grouped as
/// Basics / Cumulativity / Rationality.
pub const IMPLICATION_ROWS: &[ImplicationRow] = &[
    ImplicationRow { id: "1.1", group: "Basics", domain_conditions: &[IntersectionClosed], lhs: &[MuSub, MuPR], rhs: &[MuPRPrime], kind: RowKind::Implication },
    ImplicationRow { id: "1.2", group: "Basics", domain_conditions: &[], lhs: &[MuPRPrime], rhs: &[MuPR], kind: RowKind::Implication },
    ImplicationRow { id: "2.1", group: "Basics", domain_conditions: &[], lhs: &[MuSub, MuPR], rhs: &[MuOR], kind: RowKind::Implication },
    ImplicationRow { id: "2.2", group: "Basics", domain_conditions: &[SetDifferenceClosed], lhs: &[MuSub, MuOR], rhs: &[MuPR], kind: RowKind::Implication },
    ImplicationRow { id: "3", group: "Basics", domain_conditions: &[], lhs: &[MuPR], rhs: &[MuCUT], kind: RowKind::Implication },
    ImplicationRow { id: "4", group: "Basics", domain_conditions: &[IntersectionClosed], lhs: &[MuSub, MuSubSup, MuCUM, MuRatM], rhs: &[MuPR], kind: RowKind::NonImplication },
    ImplicationRow { id: "5.1", group: "Cumulativity", domain_conditions: &[IntersectionClosed], lhs: &[MuSub, MuCM], rhs: &[MuResM], kind: RowKind::Implication },
    ImplicationRow { id: "5.2", group: "Cumulativity", domain_conditions: &[FullPowerset], lhs: &[MuResM], rhs: &[MuCM], kind: RowKind::Implication },
    ImplicationRow { id: "6", group: "Cumulativity", domain_conditions: &[], lhs: &[MuCM, MuCUT], rhs: &[MuCUM], kind: RowKind::Equivalence },
    ImplicationRow { id: "7", group: "Cumulativity", domain_conditions: &[], lhs: &[MuSub, MuSubSup], rhs: &[MuCUM], kind: RowKind::Implication },
    ImplicationRow { id: "8", group: "Cumulativity", domain_conditions: &[IntersectionClosed], lhs: &[MuSub, MuCUM], rhs: &[MuSubSup], kind: RowKind::Implication },
    ImplicationRow { id: "9", group: "Cumulativity", domain_conditions: &[], lhs: &[MuSub, MuCUM], rhs: &[MuSubSup], kind: RowKind::NonImplication },
    ImplicationRow { id: "10", group: "Rationality", domain_conditions: &[], lhs: &[MuRatM, MuPR], rhs: &[MuEq], kind: RowKind::Implication },
    ImplicationRow { id: "11", group: "Rationality", domain_conditions: &[], lhs: &[MuEq], rhs: &[MuPR], kind: RowKind::Implication },
    ImplicationRow { id: "12.1", group: "Rationality", domain_conditions: &[IntersectionClosed], lhs: &[MuSub, MuEq], rhs: &[MuEqPrime], kind: RowKind::Implication },
    ImplicationRow { id: "12.2", group: "Rationality", domain_conditions: &[], lhs: &[MuEqPrime], rhs: &[MuEq], kind: RowKind::Implication },
    ImplicationRow { id: "13", group: "Rationality", domain_conditions: &[UnionClosed], lhs: &[MuSub, MuEq], rhs: &[MuCup], kind: RowKind::Implication },
    ImplicationRow { id: "14", group: "Rationality", domain_conditions: &[UnionClosed], lhs: &[MuSub, MuEmpty, MuEq], rhs: &[MuPar, MuCupPrime, MuCUM], kind: RowKind::Implication },
    ImplicationRow { id: "15", group: "Rationality", domain_conditions: &[SetDifferenceClosed], lhs: &[MuSub, MuPar], rhs: &[MuEq], kind: RowKind::Implication },
    ImplicationRow { id: "16", group: "Rationality", domain_conditions: &[UnionClosed, ContainsSingletons], lhs: &[MuSub, MuPar, MuIn, MuPR], rhs: &[MuEq], kind: RowKind::Implication },
    ImplicationRow { id: "17", group: "Rationality", domain_conditions: &[UnionClosed, ContainsSingletons], lhs: &[MuCUM, MuEq], rhs: &[MuIn], kind: RowKind::Implication },
    ImplicationRow { id: "18", group: "Rationality", domain_conditions: &[UnionClosed], lhs: &[MuSub, MuCUM, MuEq], rhs: &[MuPar], kind: RowKind::Implication },
    ImplicationRow { id: "19", group: "Rationality", domain_conditions: &[FullPowerset], lhs: &[MuPR, MuCUM, MuPar], rhs: &[MuEq], kind: RowKind::Implication },
    ImplicationRow { id: "20", group: "Rationality", domain_conditions: &[], lhs: &[MuSub, MuPR, MuEq], rhs: &[MuPar], kind: RowKind::NonImplicationInfinite },
    ImplicationRow { id: "21", group: "Rationality", domain_conditions: &[], lhs: &[MuSub, MuPR, MuPar], rhs: &[MuEq], kind: RowKind::NonImplicationInfinite },
    ImplicationRow { id: "22", group: "Rationality", domain_conditions: &[], lhs: &[MuSub, MuPR, MuPar, MuEq, MuCup], rhs: &[MuIn], kind: RowKind::NonImplicationInfinite },
];

/// Looks up a row by id.
pub fn implication_row(id: &str) -> Option<&'static ImplicationRow> {
    IMPLICATION_ROWS.iter().find(|r| r.id == id)
}

fn props_label(props: &[MuProperty]) -> String {
    props
        .iter()
        .map(|p| p.id())
        .collect::<Vec<_>>()
        .join("+")
}

fn row_conditional(
    row: &ImplicationRow,
    profile: &BTreeMap<MuProperty, bool>,
) -> (bool, Option<(MuProperty, bool)>) {
    // Returns (conditional holds, offending property with side). The
    // offending side is false for a failing RHS under a holding LHS, true
    // for the reverse direction of an equivalence.
    let lhs_holds = row.lhs.iter().all(|p| profile[p]);
    if lhs_holds {
        if let Some(&bad) = row.rhs.iter().find(|p| !profile[p]) {
            return (false, Some((bad, false)));
        }
    }
    if row.kind == RowKind::Equivalence {
        let rhs_holds = row.rhs.iter().all(|p| profile[p]);
        if rhs_holds {
            if let Some(&bad) = row.lhs.iter().find(|p| !profile[p]) {
                return (false, Some((bad, true)));
            }
        }
    }
    (true, None)
}

/// Checks one implication row on one choice function: is this `f` a
/// counterexample to the row's conditional? `holds=false` means the LHS
/// conjunction holds on `f` while some RHS property fails (or, for
/// equivalence rows, the reverse direction fails) — for rows claimed as
/// non-implications that outcome is the expected witness. When the domain
/// lacks a required closure condition the verdict is not-applicable.
pub fn check_mu_base_row(row_id: &str, f: &ChoiceFunction) -> Result<PropertyVerdict, ChoiceError> {
    let row = implication_row(row_id).ok_or_else(|| ChoiceError::UnknownRowId(row_id.to_string()))?;
    let verdict_id = format!("row_{}", row.id);
    let unmet: Vec<&str> = row
        .domain_conditions
        .iter()
        .filter(|c| !c.satisfied_by(f.domain()))
        .map(|c| c.label())
        .collect();
    if !unmet.is_empty() {
        return Ok(PropertyVerdict::not_applicable(
            &verdict_id,
            &format!("domain lacks {}", unmet.join(", ")),
        ));
    }
    let profile = mu_profile(f);
    let (holds, offending) = row_conditional(row, &profile);
    let checked = (row.lhs.len() + row.rhs.len()) as u64;
    if holds {
        Ok(PropertyVerdict::pass(&verdict_id, checked, 0))
    } else {
        let (bad, reverse) = offending.expect("failing row names an offending property");
        let inner = check_mu_property(f, bad);
        let mut w = Witness::new()
            .text(
                "direction",
                if reverse {
                    format!("{} all hold", props_label(row.rhs))
                } else {
                    format!("{} all hold", props_label(row.lhs))
                },
            )
            .text("fails", bad.id());
        if let Some(iw) = inner.witness {
            for (name, v) in iw.slots {
                w = w.with(&format!("{}.{name}", bad.id()), v);
            }
        }
        Ok(PropertyVerdict::fail(&verdict_id, checked, 0, w))
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// Exhaustive enumeration of all choice functions `f(X) ⊆ X` on a domain,
/// in a deterministic order: an odometer over the domain sets in canonical
/// order, each position counting through the subsets of its set in
/// canonical order.
#[derive(Debug)]
pub struct ChoiceEnumerator {
    universe: ModelSet,
    domain: DomainFamily,
    subsets: Vec<Vec<ModelSet>>,
    odometer: Vec<usize>,
    done: bool,
}

impl ChoiceEnumerator {
    /// Total number of functions this enumerator will yield.
    pub fn total(&self) -> u128 {
        self.subsets.iter().map(|s| s.len() as u128).product()
    }
}

impl Iterator for ChoiceEnumerator {
    type Item = ChoiceFunction;

    fn next(&mut self) -> Option<ChoiceFunction> {
        if self.done {
            return None;
        }
        let map: BTreeMap<ModelSet, ModelSet> = self
            .domain
            .sets()
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), self.subsets[i][self.odometer[i]].clone()))
            .collect();
        let f = ChoiceFunction::new(self.universe.clone(), self.domain.clone(), map)
            .expect("enumerated values are subsets of their domain sets");
        // Advance the odometer (last position fastest).
        let mut i = self.odometer.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.odometer[i] += 1;
            if self.odometer[i] < self.subsets[i].len() {
                break;
            }
            self.odometer[i] = 0;
        }
        Some(f)
    }
}

/// Builds the exhaustive enumerator, refusing when the function count
/// exceeds `cap` (default [`ENUMERATION_CAP`]).
pub fn enumerate_choice_functions(
    universe: &ModelSet,
    domain: &DomainFamily,
    cap: Option<u128>,
) -> Result<ChoiceEnumerator, ChoiceError> {
    let cap = cap.unwrap_or(ENUMERATION_CAP);
    let mut required: u128 = 1;
    for x in domain.sets() {
        required = required.saturating_mul(1u128 << x.len());
        if required > cap {
            return Err(ChoiceError::EnumerationCapExceeded { required, cap });
        }
    }
    let subsets: Vec<Vec<ModelSet>> = domain
        .sets()
        .iter()
        .map(|x| x.subsets().collect())
        .collect();
    let odometer = vec![0usize; subsets.len()];
    Ok(ChoiceEnumerator {
        universe: universe.clone(),
        domain: domain.clone(),
        subsets,
        odometer,
        done: false,
    })
}

// ---------------------------------------------------------------------------
// The empirical implication matrix
// ---------------------------------------------------------------------------

/// Runs every implication row against the exhaustive enumeration over
/// `domain`, plus the supplied named instances (used to exhibit
/// counterexamples that need restricted domains). Produces a report with
/// one section per row group; each row line records the claimed behaviour
/// and the observed counterexample count.
pub fn implication_matrix_report(
    universe: &ModelSet,
    domain: &DomainFamily,
    extra_instances: &[(String, ChoiceFunction)],
    rows_filter: Option<&[String]>,
    cap: Option<u128>,
) -> Result<Report, ChoiceError> {
    let rows: Vec<&ImplicationRow> = IMPLICATION_ROWS
        .iter()
        .filter(|r| match rows_filter {
            None => true,
            Some(ids) => ids.iter().any(|id| id == r.id),
        })
        .collect();
    if let Some(ids) = rows_filter {
        for id in ids {
            if implication_row(id).is_none() {
                return Err(ChoiceError::UnknownRowId(id.clone()));
            }
        }
    }

    let enumerator = enumerate_choice_functions(universe, domain, cap)?;
    let enum_applicable: Vec<bool> = rows
        .iter()
        .map(|r| r.domain_conditions.iter().all(|c| c.satisfied_by(domain)))
        .collect();

    let mut counts: Vec<u64> = vec![0; rows.len()];
    let mut first_witness: Vec<Option<String>> = vec![None; rows.len()];
    let mut total: u64 = 0;
    for f in enumerator {
        total += 1;
        let profile = mu_profile(&f);
        for (i, row) in rows.iter().enumerate() {
            if !enum_applicable[i] {
                continue;
            }
            let (holds, _) = row_conditional(row, &profile);
            if !holds {
                counts[i] += 1;
                if first_witness[i].is_none() {
                    first_witness[i] = Some(format!("enumerated function #{}", total - 1));
                }
            }
        }
    }

    let mut extra_counts: Vec<Vec<String>> = vec![Vec::new(); rows.len()];
    for (name, f) in extra_instances {
        for (i, row) in rows.iter().enumerate() {
            let verdict = check_mu_base_row(row.id, f)?;
            if verdict.applicable && !verdict.holds {
                extra_counts[i].push(name.clone());
            }
        }
    }

    let mut report = Report::new("implication matrix");
    report.push_note(format!(
        "{total} functions enumerated over a universe of {} elements",
        universe.len()
    ));
    for group in ["Basics", "Cumulativity", "Rationality"] {
        let mut section = Section {
            title: group.to_string(),
            items: Vec::new(),
        };
        for (i, row) in rows.iter().enumerate() {
            if row.group != group {
                continue;
            }
            let observed = counts[i] + extra_counts[i].len() as u64;
            let claimed = match row.kind {
                RowKind::Implication => "implication",
                RowKind::Equivalence => "equivalence",
                RowKind::NonImplication => "non-implication",
                RowKind::NonImplicationInfinite => "non-implication (not refutable at this scale)",
            };
            let conds = if row.domain_conditions.is_empty() {
                String::new()
            } else {
                format!(
                    " [{}]",
                    row.domain_conditions
                        .iter()
                        .map(|c| c.label())
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            };
            let mut w = Witness::new()
                .text("claim", format!(
                    "{} => {}{conds}: {claimed}",
                    props_label(row.lhs),
                    props_label(row.rhs)
                ))
                .text("counterexamples", observed.to_string());
            if let Some(src) = &first_witness[i] {
                w = w.text("first", src.clone());
            }
            for name in &extra_counts[i] {
                w = w.text("witnessed by", name.clone());
            }
            if !enum_applicable[i] {
                w = w.text("note", "enumeration domain lacks the row's closure conditions");
            }
            let id = format!("row_{}", row.id);
            let verdict = match row.kind {
                RowKind::Implication | RowKind::Equivalence => PropertyVerdict {
                    property_id: id,
                    holds: observed == 0,
                    applicable: true,
                    checked: total,
                    skipped: 0,
                    witness: Some(w),
                },
                RowKind::NonImplication => PropertyVerdict {
                    property_id: id,
                    holds: observed >= 1,
                    applicable: true,
                    checked: total,
                    skipped: 0,
                    witness: Some(w),
                },
                RowKind::NonImplicationInfinite => PropertyVerdict {
                    property_id: id,
                    holds: true,
                    applicable: false,
                    checked: total,
                    skipped: 0,
                    witness: Some(w),
                },
            };
            section.items.push(ReportItem::Verdict(verdict));
        }
        if !section.items.is_empty() {
            report.push_section(section);
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    /// Universe {0,1,2} inside an ambient space of 4, with the family of
    /// all non-empty subsets.
    fn small_setup() -> (ModelSet, DomainFamily) {
        let u = ModelSet::from_indices(4, &[0, 1, 2]).unwrap();
        let dom = DomainFamily::powerset_of(&u, false);
        (u, dom)
    }

    fn set(members: &[usize]) -> ModelSet {
        ModelSet::from_indices(4, members).unwrap()
    }

    /// The function that is the identity except {0,1} ↦ {1}, on the full
    /// power set of {0,1,2} including ∅.
    fn need_pr_function() -> ChoiceFunction {
        let u = set(&[0, 1, 2]);
        let dom = DomainFamily::powerset_of(&u, true);
        let map = dom
            .sets()
            .iter()
            .map(|x| {
                let fx = if x.members() == vec![0, 1] {
                    set(&[1])
                } else {
                    x.clone()
                };
                (x.clone(), fx)
            })
            .collect();
        ChoiceFunction::new(u, dom, map).unwrap()
    }

    #[test]
    fn identity_satisfies_pr() {
        let (u, dom) = small_setup();
        let f = ChoiceFunction::identity_on(u, dom).unwrap();
        let v = check_mu_property(&f, MuProperty::MuPR);
        assert!(v.holds);
        assert!(v.checked > 0);
    }

    #[test]
    fn need_pr_fails_pr_with_canonical_witness() {
        let f = need_pr_function();
        let v = check_mu_property(&f, MuProperty::MuPR);
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(
            w.slots[0],
            ("X".to_string(), WitnessValue::Set(vec![0, 1]))
        );
        assert_eq!(
            w.slots[1],
            ("Y".to_string(), WitnessValue::Set(vec![0, 1, 2]))
        );
        assert_eq!(w.slots[2], ("x".to_string(), WitnessValue::Element(0)));
    }

    #[test]
    fn need_pr_passes_companion_properties() {
        let f = need_pr_function();
        for p in [
            MuProperty::MuSub,
            MuProperty::MuCUM,
            MuProperty::MuRatM,
            MuProperty::MuSubSup,
        ] {
            assert!(check_mu_property(&f, p).holds, "{} should hold", p.id());
        }
    }

    /// Two incomparable sets, values {0} and {0,1}: cumulativity is
    /// vacuous, but the two-way containment condition bites.
    fn two_set_function() -> ChoiceFunction {
        let space = 4;
        let x = ModelSet::from_indices(space, &[0, 1, 2]).unwrap();
        let y = ModelSet::from_indices(space, &[0, 1, 3]).unwrap();
        let u = x.union(&y);
        let dom = DomainFamily::new(space, vec![x.clone(), y.clone()]).unwrap();
        let mut map = BTreeMap::new();
        map.insert(x, ModelSet::from_indices(space, &[0]).unwrap());
        map.insert(y, ModelSet::from_indices(space, &[0, 1]).unwrap());
        ChoiceFunction::new(u, dom, map).unwrap()
    }

    #[test]
    fn two_set_function_separates_cum_from_sub_sup() {
        let f = two_set_function();
        assert!(check_mu_property(&f, MuProperty::MuSub).holds);
        assert!(check_mu_property(&f, MuProperty::MuCUM).holds);
        let v = check_mu_property(&f, MuProperty::MuSubSup);
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(
            w.slots[0],
            ("X".to_string(), WitnessValue::Set(vec![0, 1, 2]))
        );
        assert_eq!(
            w.slots[1],
            ("Y".to_string(), WitnessValue::Set(vec![0, 1, 3]))
        );
    }

    #[test]
    fn row_checks_on_the_bundled_instances() {
        // Row 4: LHS holds, PR fails — the non-implication is witnessed.
        let v = check_mu_base_row("4", &need_pr_function()).unwrap();
        assert!(v.applicable);
        assert!(!v.holds);
        // Row 9 on the two-set instance: also a witness.
        let v = check_mu_base_row("9", &two_set_function()).unwrap();
        assert!(v.applicable);
        assert!(!v.holds);
        // Row 8 needs intersection closure, which the two-set domain lacks.
        let v = check_mu_base_row("8", &two_set_function()).unwrap();
        assert!(!v.applicable);
    }

    #[test]
    fn mu_in_skip_semantics() {
        // Domain {0,1,2} and {0,1} only: f({0,1,2}) = {2} leaves 0,1
        // unselected; pair sets {0,2},{1,2} are missing, so instances skip
        // rather than fail, except where the pair is present.
        let space = 4;
        let x = set(&[0, 1, 2]);
        let y = set(&[0, 1]);
        let dom = DomainFamily::new(space, vec![x.clone(), y.clone()]).unwrap();
        let mut map = BTreeMap::new();
        map.insert(x.clone(), set(&[2]));
        map.insert(y.clone(), set(&[0]));
        let f = ChoiceFunction::new(set(&[0, 1, 2]), dom, map).unwrap();
        let v = check_mu_property(&f, MuProperty::MuIn);
        // Instance (X={0,1,2}, a=0): pairs {0,1} has f={0} containing 0; the
        // other pairs are missing → skip. Instance (X, a=1): {0,1} has
        // f={0}, 1 ∉ {0} → witnessed, pass. Instance (Y={0,1}, a=1): pair
        // {0,1}=Y itself, f(Y)={0}, 1 ∉ → pass.
        assert!(v.holds);
        assert_eq!(v.skipped, 1);
        assert_eq!(v.checked, 2);
    }

    #[test]
    fn enumeration_count_and_determinism() {
        let (u, dom) = small_setup();
        let e = enumerate_choice_functions(&u, &dom, None).unwrap();
        assert_eq!(e.total(), 4096);
        let all: Vec<ChoiceFunction> = e.collect();
        assert_eq!(all.len(), 4096);
        // First function maps everything to ∅, last is the identity.
        assert!(all[0].map().values().all(|v| v.is_empty()));
        assert!(all[4095]
            .map()
            .iter()
            .all(|(k, v)| k == v));
        // Deterministic: a second run yields the same stream.
        let again: Vec<ChoiceFunction> =
            enumerate_choice_functions(&u, &dom, None).unwrap().collect();
        assert_eq!(all[17], again[17]);
        assert_eq!(all[4000], again[4000]);
    }

    #[test]
    fn enumeration_cap() {
        let (u, dom) = small_setup();
        let err = enumerate_choice_functions(&u, &dom, Some(10)).unwrap_err();
        assert!(matches!(err, ChoiceError::EnumerationCapExceeded { .. }));
    }

    #[test]
    fn union_bound_consequence_on_small_enumeration() {
        // Over all functions on P({0,1}) ∖ {∅}: whenever mu_wOR and mu_sub
        // hold, the union bound holds.
        let u = ModelSet::from_indices(2, &[0, 1]).unwrap();
        let dom = DomainFamily::powerset_of(&u, false);
        for f in enumerate_choice_functions(&u, &dom, None).unwrap() {
            let wor = check_mu_property(&f, MuProperty::MuWOR).holds;
            let sub = check_mu_property(&f, MuProperty::MuSub).holds;
            if wor && sub {
                assert!(check_union_bound(&f).holds);
            }
        }
    }

    #[test]
    fn logic_round_trip() {
        let vocab = Vocabulary::of(&["p", "q"]);
        let (u, dom) = small_setup();
        for (i, f) in enumerate_choice_functions(&u, &dom, None)
            .unwrap()
            .enumerate()
        {
            if i % 97 != 0 {
                continue;
            }
            let c = logic_from_mu(&f, &vocab).unwrap();
            let back = mu_from_logic(&c);
            assert!(back.same_map(&f));
        }
    }

    #[test]
    fn consequences_and_domain_miss() {
        let vocab = Vocabulary::of(&["p", "q"]);
        let f = need_pr_function();
        let c = logic_from_mu(&f, &vocab).unwrap();
        // M({p}) = {1,3}: not a subset of the universe {0,1,2} → uncovered.
        let t = Theory::parse(&["p"], &vocab).unwrap();
        assert!(matches!(
            c.consequences(&t),
            Err(ChoiceError::DomainMiss(_))
        ));
        // M(~p & q) = {2} ⊆ universe → covered, identity.
        let t = Theory::parse(&["~p & q"], &vocab).unwrap();
        let conclusions = c.consequences(&t).unwrap();
        assert_eq!(models_of(&conclusions, &vocab).members(), vec![2]);
    }

    #[test]
    fn cut_pr_style_rules_on_translated_function() {
        let vocab = Vocabulary::of(&["p", "q"]);
        // Universe {1,2,3} (models of p∨q), identity except {1,3} ↦ {1}.
        let u = ModelSet::from_indices(4, &[1, 2, 3]).unwrap();
        let dom = DomainFamily::powerset_of(&u, true);
        let map = dom
            .sets()
            .iter()
            .map(|x| {
                let fx = if x.members() == vec![1, 3] {
                    ModelSet::from_indices(4, &[1]).unwrap()
                } else {
                    x.clone()
                };
                (x.clone(), fx)
            })
            .collect();
        let f = ChoiceFunction::new(u, dom, map).unwrap();
        let c = logic_from_mu(&f, &vocab).unwrap();
        let pool = default_theory_pool(&vocab, &[]);
        let cut = check_logic_rule(&c, LogicRule::Cut, &pool).unwrap();
        assert!(cut.holds, "CUT should hold: {:?}", cut.witness);
        let pr = check_logic_rule(&c, LogicRule::Pr, &pool).unwrap();
        assert!(!pr.holds);
        let w = pr.witness.unwrap();
        // The first failing pair: premises with model sets {1,2,3} and {1,3},
        // offending element 3.
        assert!(w
            .slots
            .iter()
            .any(|(n, v)| n == "x" && *v == WitnessValue::Element(3)));
    }

    #[test]
    fn sc_fails_when_selection_leaves_the_premise() {
        let vocab = Vocabulary::of(&["p"]);
        let mut sel = BTreeMap::new();
        // sel(M(p)) = {0} ⊄ {1} = M(p).
        sel.insert(
            ModelSet::from_indices(2, &[1]).unwrap(),
            ModelSet::from_indices(2, &[0]).unwrap(),
        );
        let c = ConsequenceOperator::new(vocab.clone(), sel).unwrap();
        let pool = default_theory_pool(&vocab, &[]);
        let v = check_logic_rule(&c, LogicRule::Sc, &pool).unwrap();
        assert!(!v.holds);
    }

    #[test]
    fn unknown_ids_error() {
        assert!(MuProperty::from_id("mu_nope").is_err());
        assert!(LogicRule::from_id("NOPE").is_err());
        assert!(check_mu_base_row("99", &need_pr_function()).is_err());
    }

    #[test]
    fn matrix_smoke_on_tiny_universe() {
        // |U|=2: 2·2·4 = 16 functions; positive rows must have zero
        // counterexamples, and the row-9 witness instance supplies one.
        let u = ModelSet::from_indices(2, &[0, 1]).unwrap();
        let dom = DomainFamily::powerset_of(&u, false);
        let extra = vec![("two-set".to_string(), {
            let f = two_set_function();
            f
        })];
        let report =
            implication_matrix_report(&u, &dom, &extra, None, None).unwrap();
        let row3 = report.verdict("row_3").unwrap();
        assert!(row3.holds);
        let row9 = report.verdict("row_9").unwrap();
        assert!(row9.holds, "row 9 should be witnessed by the extra instance");
        let row20 = report.verdict("row_20").unwrap();
        assert!(!row20.applicable);
    }
}
