//! JSON envelopes for every artifact kind the toolkit loads and saves:
//! choice functions, preferential structures, belief-change tables,
//! entrenchment relations, pseudo-distances, two-place operator tables,
//! size filters and filter systems, and quantifier structures.
//!
//! Encoding conventions:
//!
//! - A model set is an array of ascending element indices: `[0, 2]`.
//! - A family of sets is an array of such arrays.
//! - Maps are arrays of `[key, value]` pairs in canonical key order.
//! - The ambient space (number of elements `0..space-1`) is inferred as
//!   one past the largest index mentioned anywhere in the envelope; an
//!   optional `"space"` key overrides the inference, and dumps emit it
//!   exactly when the inference would under-shoot the artifact's true
//!   space. Quantifier structures carry their space as `"domain"`.
//!
//! Envelope shapes:
//!
//! | kind          | shape |
//! |---------------|-------|
//! | choice        | `{"universe": set, "domain": [set], "map": [[X, fX]]}` (+ optional `"vocabulary"`) |
//! | structure     | `{"carrier": set, "nodes": [[element, copy]], "attacks": [[[e,c],[e',c']]]}` |
//! | revision      | `{"base": set, "map": [[A, result]]}` |
//! | contraction   | `{"base": set, "map": [[A, result]]}` |
//! | entrenchment  | `{"base": set, "rel": [[A, B]]}` |
//! | distance      | `{"pairs": [[u, v, rank]], "symmetric": bool, "respects_identity": bool}` |
//! | binary-op     | `{"base": universe, "map": [[[X, Y], result]]}` (possibly partial) |
//! | filter        | `{"base": set, "family": [set], "kind": "strong"\|"weak"}` (+ optional `"generator"`) |
//! | filter-system | `{"filters": [filter]}` |
//! | nstructure    | `{"domain": n, "predicates": {name: set}, "nsystem": [[subset, filter]]}` (+ optional `"pool"` of formula strings) |
//! | consequence   | `{"vocabulary": [atom], "entries": [[[premise formula], [conclusion formula]]]}` |
//!
//! Belief-change tables and entrenchment relations always live on the
//! full family of all subsets of their space.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agm::{full_family, ContractionOperator, EntrenchmentRelation, RevisionOperator};
use crate::choice::ChoiceFunction;
use crate::distance::{BinaryOperator, PseudoDistance};
use crate::logic::{DomainFamily, ModelSet, Vocabulary};
use crate::pref::PrefStructure;
use crate::size::{
    parse_nabla_formula, Filter, FilterKind, FilterSystem, NStructure, NablaFormula,
};

/// Errors from reading or validating artifact JSON.
#[derive(Debug, Error)]
pub enum JsonError {
    /// The text is not valid JSON of the expected shape.
    #[error("JSON syntax or shape error: {0}")]
    Syntax(String),
    /// The JSON parsed but describes an invalid artifact.
    #[error("invalid artifact: {0}")]
    Invalid(String),
}

fn syntax(e: impl std::fmt::Display) -> JsonError {
    JsonError::Syntax(e.to_string())
}

fn invalid(e: impl std::fmt::Display) -> JsonError {
    JsonError::Invalid(e.to_string())
}

// ---------------------------------------------------------------------------
// Primitives
// ---------------------------------------------------------------------------

fn to_set(space: usize, members: &[usize]) -> Result<ModelSet, JsonError> {
    ModelSet::from_indices(space, members).map_err(invalid)
}

fn max_index<'a>(lists: impl IntoIterator<Item = &'a Vec<usize>>) -> Option<usize> {
    lists
        .into_iter()
        .flat_map(|l| l.iter().copied())
        .max()
}

fn space_from(explicit: Option<usize>, inferred_max: Option<usize>) -> Result<usize, JsonError> {
    match explicit {
        Some(s) => Ok(s),
        None => match inferred_max {
            Some(m) => Ok(m + 1),
            None => Err(JsonError::Invalid(
                "no elements mentioned and no \"space\" key given".to_string(),
            )),
        },
    }
}

// ---------------------------------------------------------------------------
// Choice functions
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ChoiceWire {
    #[serde(skip_serializing_if = "Option::is_none")]
    space: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vocabulary: Option<Vec<String>>,
    universe: Vec<usize>,
    domain: Vec<Vec<usize>>,
    map: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Reads a choice function.
pub fn load_choice(text: &str) -> Result<ChoiceFunction, JsonError> {
    let wire: ChoiceWire = serde_json::from_str(text).map_err(syntax)?;
    let mentioned = std::iter::once(&wire.universe)
        .chain(wire.domain.iter())
        .chain(wire.map.iter().flat_map(|(k, v)| [k, v]));
    let space = space_from(wire.space, max_index(mentioned))?;
    let universe = to_set(space, &wire.universe)?;
    let sets = wire
        .domain
        .iter()
        .map(|s| to_set(space, s))
        .collect::<Result<Vec<_>, _>>()?;
    let domain = DomainFamily::new(space, sets).map_err(invalid)?;
    let mut map = BTreeMap::new();
    for (k, v) in &wire.map {
        map.insert(to_set(space, k)?, to_set(space, v)?);
    }
    ChoiceFunction::new(universe, domain, map).map_err(invalid)
}

/// Reads the optional `"vocabulary"` key of a choice envelope.
pub fn load_choice_vocabulary(text: &str) -> Result<Option<Vocabulary>, JsonError> {
    let wire: ChoiceWire = serde_json::from_str(text).map_err(syntax)?;
    match wire.vocabulary {
        None => Ok(None),
        Some(atoms) => Vocabulary::new(atoms).map(Some).map_err(invalid),
    }
}

fn choice_wire(f: &ChoiceFunction, vocabulary: Option<Vec<String>>) -> ChoiceWire {
    let universe = f.universe().members();
    let domain: Vec<Vec<usize>> = f.domain().sets().iter().map(|s| s.members()).collect();
    let map: Vec<(Vec<usize>, Vec<usize>)> = f
        .map()
        .iter()
        .map(|(k, v)| (k.members(), v.members()))
        .collect();
    let mentioned = std::iter::once(&universe)
        .chain(domain.iter())
        .chain(map.iter().flat_map(|(k, v)| [k, v]));
    let space = needs_space_key(f.universe().space(), max_index(mentioned));
    ChoiceWire {
        space,
        vocabulary,
        universe,
        domain,
        map,
    }
}

/// Writes a choice function.
pub fn dump_choice(f: &ChoiceFunction) -> String {
    serde_json::to_string_pretty(&choice_wire(f, None)).expect("wire structs always serialize")
}

/// Writes a choice function together with the atom names of its model
/// space.
pub fn dump_choice_with_vocabulary(f: &ChoiceFunction, vocab: &Vocabulary) -> String {
    let wire = choice_wire(f, Some(vocab.atom_names().to_vec()));
    serde_json::to_string_pretty(&wire).expect("wire structs always serialize")
}

fn needs_space_key(true_space: usize, inferred_max: Option<usize>) -> Option<usize> {
    match inferred_max {
        Some(m) if m + 1 == true_space => None,
        _ => Some(true_space),
    }
}

// ---------------------------------------------------------------------------
// Preferential structures
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct StructureWire {
    #[serde(skip_serializing_if = "Option::is_none")]
    space: Option<usize>,
    carrier: Vec<usize>,
    nodes: Vec<(usize, usize)>,
    attacks: Vec<((usize, usize), (usize, usize))>,
}

/// Reads a preferential structure.
pub fn load_structure(text: &str) -> Result<PrefStructure, JsonError> {
    let wire: StructureWire = serde_json::from_str(text).map_err(syntax)?;
    let node_elements: Vec<usize> = wire.nodes.iter().map(|&(e, _)| e).collect();
    let space = space_from(
        wire.space,
        max_index([&wire.carrier, &node_elements]),
    )?;
    let carrier = to_set(space, &wire.carrier)?;
    PrefStructure::new(carrier, wire.nodes, wire.attacks).map_err(invalid)
}

/// Writes a preferential structure.
pub fn dump_structure(s: &PrefStructure) -> String {
    let carrier = s.carrier().members();
    let node_elements: Vec<usize> = s.nodes().iter().map(|&(e, _)| e).collect();
    let space = needs_space_key(
        s.carrier().space(),
        max_index([&carrier, &node_elements]),
    );
    let wire = StructureWire {
        space,
        carrier,
        nodes: s.nodes().to_vec(),
        attacks: s.attack_pairs(),
    };
    serde_json::to_string_pretty(&wire).expect("wire structs always serialize")
}

// ---------------------------------------------------------------------------
// Belief-change tables
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TableWire {
    #[serde(skip_serializing_if = "Option::is_none")]
    space: Option<usize>,
    base: Vec<usize>,
    map: Vec<(Vec<usize>, Vec<usize>)>,
}

fn load_table(text: &str) -> Result<(ModelSet, BTreeMap<ModelSet, ModelSet>), JsonError> {
    let wire: TableWire = serde_json::from_str(text).map_err(syntax)?;
    let mentioned = std::iter::once(&wire.base).chain(wire.map.iter().flat_map(|(k, v)| [k, v]));
    let space = space_from(wire.space, max_index(mentioned))?;
    let base = to_set(space, &wire.base)?;
    let mut map = BTreeMap::new();
    for (k, v) in &wire.map {
        map.insert(to_set(space, k)?, to_set(space, v)?);
    }
    Ok((base, map))
}

fn dump_table(base: &ModelSet, map: &BTreeMap<ModelSet, ModelSet>) -> String {
    let base_members = base.members();
    let entries: Vec<(Vec<usize>, Vec<usize>)> = map
        .iter()
        .map(|(k, v)| (k.members(), v.members()))
        .collect();
    let mentioned =
        std::iter::once(&base_members).chain(entries.iter().flat_map(|(k, v)| [k, v]));
    let space = needs_space_key(base.space(), max_index(mentioned));
    let wire = TableWire {
        space,
        base: base_members,
        map: entries,
    };
    serde_json::to_string_pretty(&wire).expect("wire structs always serialize")
}

/// Reads a revision table over the full family of its space.
pub fn load_revision(text: &str) -> Result<RevisionOperator, JsonError> {
    let (base, map) = load_table(text)?;
    RevisionOperator::new(base.clone(), full_family(base.space()), map).map_err(invalid)
}

/// Writes a revision table.
pub fn dump_revision(op: &RevisionOperator) -> String {
    dump_table(op.base(), op.map())
}

/// Reads a contraction table over the full family of its space.
pub fn load_contraction(text: &str) -> Result<ContractionOperator, JsonError> {
    let (base, map) = load_table(text)?;
    ContractionOperator::new(base.clone(), full_family(base.space()), map).map_err(invalid)
}

/// Writes a contraction table.
pub fn dump_contraction(op: &ContractionOperator) -> String {
    dump_table(op.base(), op.map())
}

// ---------------------------------------------------------------------------
// Entrenchment relations
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct EntrenchmentWire {
    #[serde(skip_serializing_if = "Option::is_none")]
    space: Option<usize>,
    base: Vec<usize>,
    rel: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Reads an entrenchment relation over the full family of its space.
pub fn load_entrenchment(text: &str) -> Result<EntrenchmentRelation, JsonError> {
    let wire: EntrenchmentWire = serde_json::from_str(text).map_err(syntax)?;
    let mentioned = std::iter::once(&wire.base).chain(wire.rel.iter().flat_map(|(a, b)| [a, b]));
    let space = space_from(wire.space, max_index(mentioned))?;
    let base = to_set(space, &wire.base)?;
    let mut rel = std::collections::BTreeSet::new();
    for (a, b) in &wire.rel {
        rel.insert((to_set(space, a)?, to_set(space, b)?));
    }
    EntrenchmentRelation::new(base.clone(), full_family(space), rel).map_err(invalid)
}

/// Writes an entrenchment relation.
pub fn dump_entrenchment(e: &EntrenchmentRelation) -> String {
    let base_members = e.base().members();
    let rel: Vec<(Vec<usize>, Vec<usize>)> = e
        .pairs()
        .iter()
        .map(|(a, b)| (a.members(), b.members()))
        .collect();
    let mentioned = std::iter::once(&base_members).chain(rel.iter().flat_map(|(a, b)| [a, b]));
    let space = needs_space_key(e.base().space(), max_index(mentioned));
    let wire = EntrenchmentWire {
        space,
        base: base_members,
        rel,
    };
    serde_json::to_string_pretty(&wire).expect("wire structs always serialize")
}

// ---------------------------------------------------------------------------
// Pseudo-distances and two-place operator tables
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DistanceWire {
    #[serde(skip_serializing_if = "Option::is_none")]
    space: Option<usize>,
    pairs: Vec<(usize, usize, u64)>,
    symmetric: bool,
    respects_identity: bool,
}

/// Reads a pseudo-distance.
pub fn load_distance(text: &str) -> Result<PseudoDistance, JsonError> {
    let wire: DistanceWire = serde_json::from_str(text).map_err(syntax)?;
    let inferred = wire.pairs.iter().map(|&(u, v, _)| u.max(v)).max();
    let space = space_from(wire.space, inferred)?;
    let mut pairs = BTreeMap::new();
    for &(u, v, rank) in &wire.pairs {
        pairs.insert((u, v), rank);
    }
    PseudoDistance::new(space, &pairs, wire.symmetric, wire.respects_identity).map_err(invalid)
}

/// Writes a pseudo-distance.
pub fn dump_distance(d: &PseudoDistance) -> String {
    let pairs: Vec<(usize, usize, u64)> =
        d.pairs().map(|((u, v), rank)| (u, v, rank)).collect();
    let inferred = pairs.iter().map(|&(u, v, _)| u.max(v)).max();
    let space = needs_space_key(d.space(), inferred);
    let wire = DistanceWire {
        space,
        pairs,
        symmetric: d.symmetric(),
        respects_identity: d.respects_identity(),
    };
    serde_json::to_string_pretty(&wire).expect("wire structs always serialize")
}

#[derive(Serialize, Deserialize)]
struct BinaryOpWire {
    #[serde(skip_serializing_if = "Option::is_none")]
    space: Option<usize>,
    base: Vec<usize>,
    map: Vec<((Vec<usize>, Vec<usize>), Vec<usize>)>,
}

/// Reads a two-place operator table over the non-empty subsets of its
/// base universe. The table may be partial: missing pairs are simply
/// unobserved.
pub fn load_binary_op(text: &str) -> Result<BinaryOperator, JsonError> {
    let wire: BinaryOpWire = serde_json::from_str(text).map_err(syntax)?;
    let mentioned = std::iter::once(&wire.base)
        .chain(wire.map.iter().flat_map(|((x, y), v)| [x, y, v]));
    let space = space_from(wire.space, max_index(mentioned))?;
    let universe = to_set(space, &wire.base)?;
    let family = DomainFamily::powerset_of(&universe, false);
    let mut map = BTreeMap::new();
    for ((x, y), v) in &wire.map {
        map.insert((to_set(space, x)?, to_set(space, y)?), to_set(space, v)?);
    }
    BinaryOperator::partial(family, map).map_err(invalid)
}

/// Writes a two-place operator table; the base is the family's universe.
pub fn dump_binary_op(op: &BinaryOperator) -> String {
    let universe = op.family().universe();
    let base_members = universe.members();
    let map: Vec<((Vec<usize>, Vec<usize>), Vec<usize>)> = op
        .map()
        .iter()
        .map(|((x, y), v)| ((x.members(), y.members()), v.members()))
        .collect();
    let mentioned = std::iter::once(&base_members)
        .chain(map.iter().flat_map(|((x, y), v)| [x, y, v]));
    let space = needs_space_key(universe.space(), max_index(mentioned));
    let wire = BinaryOpWire {
        space,
        base: base_members,
        map,
    };
    serde_json::to_string_pretty(&wire).expect("wire structs always serialize")
}

// ---------------------------------------------------------------------------
// Size filters and systems
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FilterWire {
    #[serde(skip_serializing_if = "Option::is_none")]
    space: Option<usize>,
    base: Vec<usize>,
    family: Vec<Vec<usize>>,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator: Option<Vec<usize>>,
}

fn filter_from_wire(wire: &FilterWire) -> Result<Filter, JsonError> {
    let mentioned = std::iter::once(&wire.base)
        .chain(wire.family.iter())
        .chain(wire.generator.iter());
    let space = space_from(wire.space, max_index(mentioned))?;
    let base = to_set(space, &wire.base)?;
    let family = wire
        .family
        .iter()
        .map(|s| to_set(space, s))
        .collect::<Result<Vec<_>, _>>()?;
    let kind = FilterKind::from_id(&wire.kind)
        .ok_or_else(|| JsonError::Invalid(format!("unknown filter kind {:?}", wire.kind)))?;
    let generator = wire
        .generator
        .as_ref()
        .map(|g| to_set(space, g))
        .transpose()?;
    Filter::new(base, family, kind, generator).map_err(invalid)
}

fn filter_to_wire(f: &Filter) -> FilterWire {
    let base = f.base().members();
    let family: Vec<Vec<usize>> = f.family().iter().map(|s| s.members()).collect();
    let generator = f.generator_hint().map(|g| g.members());
    let mentioned = std::iter::once(&base)
        .chain(family.iter())
        .chain(generator.iter());
    let space = needs_space_key(f.base().space(), max_index(mentioned));
    FilterWire {
        space,
        base,
        family,
        kind: f.kind().id().to_string(),
        generator,
    }
}

/// Reads a single filter.
pub fn load_filter(text: &str) -> Result<Filter, JsonError> {
    let wire: FilterWire = serde_json::from_str(text).map_err(syntax)?;
    filter_from_wire(&wire)
}

/// Writes a single filter.
pub fn dump_filter(f: &Filter) -> String {
    serde_json::to_string_pretty(&filter_to_wire(f)).expect("wire structs always serialize")
}

#[derive(Serialize, Deserialize)]
struct FilterSystemWire {
    filters: Vec<FilterWire>,
}

/// Reads a filter system; the base family is the set of filter bases.
pub fn load_filter_system(text: &str) -> Result<FilterSystem, JsonError> {
    let wire: FilterSystemWire = serde_json::from_str(text).map_err(syntax)?;
    if wire.filters.is_empty() {
        return Err(JsonError::Invalid(
            "a filter system needs at least one filter".to_string(),
        ));
    }
    // All filters share one ambient space: take the largest mention.
    let mentioned = wire.filters.iter().flat_map(|f| {
        std::iter::once(&f.base)
            .chain(f.family.iter())
            .chain(f.generator.iter())
    });
    let explicit = wire.filters.iter().find_map(|f| f.space);
    let space = space_from(explicit, max_index(mentioned))?;
    let mut map = BTreeMap::new();
    let mut bases = Vec::new();
    for fw in &wire.filters {
        let pinned = FilterWire {
            space: Some(space),
            base: fw.base.clone(),
            family: fw.family.clone(),
            kind: fw.kind.clone(),
            generator: fw.generator.clone(),
        };
        let filter = filter_from_wire(&pinned)?;
        bases.push(filter.base().clone());
        map.insert(filter.base().clone(), filter);
    }
    let family = DomainFamily::new(space, bases).map_err(invalid)?;
    FilterSystem::new(family, map).map_err(invalid)
}

/// Writes a filter system.
pub fn dump_filter_system(sys: &FilterSystem) -> String {
    let filters: Vec<FilterWire> = sys.map().values().map(filter_to_wire).collect();
    serde_json::to_string_pretty(&FilterSystemWire { filters })
        .expect("wire structs always serialize")
}

// ---------------------------------------------------------------------------
// Quantifier structures
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct NStructureWire {
    domain: usize,
    predicates: BTreeMap<String, Vec<usize>>,
    nsystem: Vec<(Vec<usize>, FilterWire)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pool: Option<Vec<String>>,
}

/// Reads a quantifier structure; the space is the `"domain"` key.
pub fn load_nstructure(text: &str) -> Result<NStructure, JsonError> {
    let wire: NStructureWire = serde_json::from_str(text).map_err(syntax)?;
    let space = wire.domain;
    let mut predicates = BTreeMap::new();
    for (name, members) in &wire.predicates {
        predicates.insert(name.clone(), to_set(space, members)?);
    }
    let mut nsystem = BTreeMap::new();
    for (subset, fw) in &wire.nsystem {
        let pinned = FilterWire {
            space: Some(space),
            base: fw.base.clone(),
            family: fw.family.clone(),
            kind: fw.kind.clone(),
            generator: fw.generator.clone(),
        };
        let filter = filter_from_wire(&pinned)?;
        nsystem.insert(to_set(space, subset)?, filter);
    }
    NStructure::new(space, predicates, nsystem).map_err(invalid)
}

/// Reads the optional `"pool"` key of a quantifier-structure envelope:
/// formula strings for schema instantiation.
pub fn load_nstructure_pool(text: &str) -> Result<Option<Vec<NablaFormula>>, JsonError> {
    let wire: NStructureWire = serde_json::from_str(text).map_err(syntax)?;
    match wire.pool {
        None => Ok(None),
        Some(strings) => strings
            .iter()
            .map(|s| parse_nabla_formula(s).map_err(invalid))
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
    }
}

/// Writes a quantifier structure.
pub fn dump_nstructure(m: &NStructure) -> String {
    let predicates: BTreeMap<String, Vec<usize>> = m
        .predicates()
        .iter()
        .map(|(name, ext)| (name.clone(), ext.members()))
        .collect();
    let nsystem: Vec<(Vec<usize>, FilterWire)> = m
        .nsystem()
        .iter()
        .map(|(subset, filter)| {
            let mut fw = filter_to_wire(filter);
            // The enclosing "domain" key already pins the space.
            fw.space = None;
            (subset.members(), fw)
        })
        .collect();
    let wire = NStructureWire {
        domain: m.size(),
        predicates,
        nsystem,
        pool: None,
    };
    serde_json::to_string_pretty(&wire).expect("wire structs always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{
        random_distance, random_filter_system, random_nstructure, random_structure, seeded_rng,
    };

    fn ms(space: usize, members: &[usize]) -> ModelSet {
        ModelSet::from_indices(space, members).unwrap()
    }

    #[test]
    fn choice_round_trip_and_inference() {
        let text = r#"{
            "universe": [0, 1, 2],
            "domain": [[0, 1], [0, 1, 2]],
            "map": [[[0, 1], [0]], [[0, 1, 2], [0]]]
        }"#;
        let f = load_choice(text).unwrap();
        assert_eq!(f.universe(), &ms(3, &[0, 1, 2]));
        assert_eq!(f.map()[&ms(3, &[0, 1])], ms(3, &[0]));
        let dumped = dump_choice(&f);
        let again = load_choice(&dumped).unwrap();
        assert_eq!(f.map(), again.map());
        assert_eq!(f.universe(), again.universe());
        assert!(!dumped.contains("\"space\""), "inference covers this shape");
    }

    #[test]
    fn explicit_space_widens_the_universe() {
        let text = r#"{
            "space": 4,
            "universe": [0, 1],
            "domain": [[0, 1]],
            "map": [[[0, 1], [0]]]
        }"#;
        let f = load_choice(text).unwrap();
        assert_eq!(f.universe().space(), 4);
        let dumped = dump_choice(&f);
        assert!(dumped.contains("\"space\": 4"), "round trip keeps the width");
        let again = load_choice(&dumped).unwrap();
        assert_eq!(again.universe().space(), 4);
    }

    #[test]
    fn vocabulary_key_is_optional_and_validated() {
        let text = r#"{
            "vocabulary": ["p", "q"],
            "universe": [0, 1, 2, 3],
            "domain": [[0, 1, 2, 3]],
            "map": [[[0, 1, 2, 3], [1, 3]]]
        }"#;
        let vocab = load_choice_vocabulary(text).unwrap().unwrap();
        assert_eq!(vocab.space(), 4);
        let plain = r#"{"universe": [0], "domain": [[0]], "map": [[[0], [0]]]}"#;
        assert!(load_choice_vocabulary(plain).unwrap().is_none());
        let bad = r#"{
            "vocabulary": ["p", "p"],
            "universe": [0], "domain": [[0]], "map": [[[0], [0]]]
        }"#;
        assert!(load_choice_vocabulary(bad).is_err());
    }

    #[test]
    fn structure_round_trip() {
        let mut rng = seeded_rng(7);
        let s = random_structure(&mut rng, &ModelSet::full(3), 2, 0.4);
        let dumped = dump_structure(&s);
        let again = load_structure(&dumped).unwrap();
        assert_eq!(s.carrier(), again.carrier());
        assert_eq!(s.nodes(), again.nodes());
        assert_eq!(s.attack_pairs(), again.attack_pairs());
    }

    #[test]
    fn revision_table_round_trip() {
        let space = 2;
        let base = ms(space, &[0]);
        let mut map = BTreeMap::new();
        for a in ModelSet::full(space).subsets() {
            let value = if a.intersects(&base) {
                a.inter(&base)
            } else {
                a.clone()
            };
            map.insert(a, value);
        }
        let op = RevisionOperator::new(base, full_family(space), map).unwrap();
        let dumped = dump_revision(&op);
        let again = load_revision(&dumped).unwrap();
        assert!(op.same_table(&again));
    }

    #[test]
    fn distance_round_trip() {
        let mut rng = seeded_rng(11);
        let d = random_distance(&mut rng, 4, 5, true, true);
        let dumped = dump_distance(&d);
        let again = load_distance(&dumped).unwrap();
        assert_eq!(
            d.pairs().collect::<Vec<_>>(),
            again.pairs().collect::<Vec<_>>()
        );
        assert_eq!(d.symmetric(), again.symmetric());
    }

    #[test]
    fn partial_binary_op_accepts_sparse_tables() {
        let text = r#"{
            "base": [0, 1, 2],
            "map": [
                [[[0], [1, 2]], [1]],
                [[[0, 1], [2]], [2]]
            ]
        }"#;
        let op = load_binary_op(text).unwrap();
        assert_eq!(op.map().len(), 2);
        let dumped = dump_binary_op(&op);
        let again = load_binary_op(&dumped).unwrap();
        assert_eq!(op.map(), again.map());
    }

    #[test]
    fn filter_round_trip_keeps_the_generator_hint() {
        let f = Filter::principal(ms(3, &[0, 1, 2]), ms(3, &[0])).unwrap();
        let dumped = dump_filter(&f);
        assert!(dumped.contains("\"generator\""));
        let again = load_filter(&dumped).unwrap();
        assert_eq!(f, again);
        let bad = r#"{"base": [0, 1], "family": [[0]], "kind": "both"}"#;
        assert!(matches!(load_filter(bad), Err(JsonError::Invalid(_))));
    }

    #[test]
    fn filter_system_round_trip() {
        let mut rng = seeded_rng(13);
        let sys = random_filter_system(&mut rng, 3);
        let dumped = dump_filter_system(&sys);
        let again = load_filter_system(&dumped).unwrap();
        assert_eq!(sys.map(), again.map());
        assert_eq!(sys.family().sets(), again.family().sets());
    }

    #[test]
    fn nstructure_round_trip_and_pool() {
        let mut rng = seeded_rng(17);
        let m = random_nstructure(&mut rng, 3, &["P", "Q"]);
        let dumped = dump_nstructure(&m);
        let again = load_nstructure(&dumped).unwrap();
        assert_eq!(m.predicates(), again.predicates());
        assert_eq!(m.nsystem(), again.nsystem());
        assert!(load_nstructure_pool(&dumped).unwrap().is_none());

        let with_pool = r#"{
            "domain": 2,
            "predicates": {"P": [0]},
            "nsystem": [[[0, 1], {"base": [0, 1], "family": [[0, 1]], "kind": "weak"}]],
            "pool": ["P", "~P", "N x. P"]
        }"#;
        let pool = load_nstructure_pool(with_pool).unwrap().unwrap();
        assert_eq!(pool.len(), 3);
        assert_eq!(pool[2], NablaFormula::nabla(NablaFormula::pred("P")));
        assert!(load_nstructure(with_pool).is_ok());
    }

    #[test]
    fn entrenchment_round_trip() {
        let space = 2;
        let full = ModelSet::full(space);
        let mut rel = std::collections::BTreeSet::new();
        for a in full.subsets() {
            for b in full.subsets() {
                if a.len() <= b.len() {
                    rel.insert((a.clone(), b.clone()));
                }
            }
        }
        let e = EntrenchmentRelation::new(ms(space, &[0]), full_family(space), rel).unwrap();
        let dumped = dump_entrenchment(&e);
        let again = load_entrenchment(&dumped).unwrap();
        assert_eq!(e.pairs(), again.pairs());
        assert_eq!(e.base(), again.base());
    }

    #[test]
    fn malformed_input_is_a_syntax_error() {
        assert!(matches!(load_choice("not json"), Err(JsonError::Syntax(_))));
        assert!(matches!(
            load_choice(r#"{"universe": "nope"}"#),
            Err(JsonError::Syntax(_))
        ));
        // Out-of-space index with an explicit space key.
        let text = r#"{
            "space": 2,
            "universe": [0, 5],
            "domain": [[0]],
            "map": [[[0], [0]]]
        }"#;
        assert!(matches!(load_choice(text), Err(JsonError::Invalid(_))));
    }
}
