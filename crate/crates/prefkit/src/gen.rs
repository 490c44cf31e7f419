//! Seeded random generators for test subjects: preferential structures
//! of several shapes and related raw material. Every generator draws
//! from an explicit RNG, so a fixed seed reproduces a run exactly.

use crate::agm::{full_family, ContractionOperator, EntrenchmentRelation, RevisionOperator};
use crate::distance::PseudoDistance;
use crate::logic::{DomainFamily, ModelSet};
use crate::pref::PrefStructure;
use crate::size::{Filter, FilterKind, FilterSystem, NStructure, NablaFormula};
use std::collections::BTreeMap;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic RNG for a seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random subset of `of`, keeping each member with probability
/// `keep_prob`.
pub fn random_subset(rng: &mut impl Rng, of: &ModelSet, keep_prob: f64) -> ModelSet {
    let mut out = ModelSet::empty(of.space());
    for e in of.iter() {
        if rng.gen_bool(keep_prob) {
            out.insert(e);
        }
    }
    out
}

/// A random nonempty subset of `of` (which must be nonempty).
pub fn random_nonempty_subset(rng: &mut impl Rng, of: &ModelSet, keep_prob: f64) -> ModelSet {
    loop {
        let s = random_subset(rng, of, keep_prob);
        if !s.is_empty() {
            return s;
        }
    }
}

/// An arbitrary structure: a random nonempty carrier inside `universe`,
/// one to `max_copies` copies per element, and each ordered node pair
/// (self-pairs included) attacking with probability `edge_prob`. Nothing
/// else is imposed, so cycles and self-attacks occur.
pub fn random_structure(
    rng: &mut impl Rng,
    universe: &ModelSet,
    max_copies: usize,
    edge_prob: f64,
) -> PrefStructure {
    let carrier = random_nonempty_subset(rng, universe, 0.7);
    let mut nodes = Vec::new();
    for e in carrier.iter() {
        let copies = rng.gen_range(1..=max_copies.max(1));
        for c in 0..copies {
            nodes.push((e, c));
        }
    }
    let mut attacks = Vec::new();
    for &u in &nodes {
        for &v in &nodes {
            if rng.gen_bool(edge_prob) {
                attacks.push((u, v));
            }
        }
    }
    PrefStructure::new(carrier, nodes, attacks).expect("generated nodes are consistent")
}

/// A layered structure: one copy per carrier element, a random layer for
/// each, attacks exactly from lower layers to higher ones. Such
/// relations are irreflexive, transitive, cycle-free, and modular.
pub fn random_layered_structure(
    rng: &mut impl Rng,
    universe: &ModelSet,
    max_layer: usize,
) -> PrefStructure {
    let carrier = random_nonempty_subset(rng, universe, 0.7);
    let nodes: Vec<(usize, usize)> = carrier.iter().map(|e| (e, 0)).collect();
    let layers: Vec<usize> = nodes
        .iter()
        .map(|_| rng.gen_range(0..=max_layer))
        .collect();
    let mut attacks = Vec::new();
    for (i, &u) in nodes.iter().enumerate() {
        for (j, &v) in nodes.iter().enumerate() {
            if layers[i] < layers[j] {
                attacks.push((u, v));
            }
        }
    }
    PrefStructure::new(carrier, nodes, attacks).expect("generated nodes are consistent")
}

/// A transitively closed cycle-free structure: random forward edges over
/// a random carrier order, then transitive closure. One to `max_copies`
/// copies per element; finite, transitive, cycle-free relations are
/// smooth over every domain.
pub fn random_transitive_dag(
    rng: &mut impl Rng,
    universe: &ModelSet,
    max_copies: usize,
    edge_prob: f64,
) -> PrefStructure {
    let carrier = random_nonempty_subset(rng, universe, 0.7);
    let mut nodes = Vec::new();
    for e in carrier.iter() {
        let copies = rng.gen_range(1..=max_copies.max(1));
        for c in 0..copies {
            nodes.push((e, c));
        }
    }
    let n = nodes.len();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(edge_prob) {
                adj[order[i]][order[j]] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if adj[i][k] {
                for j in 0..n {
                    if adj[k][j] {
                        adj[i][j] = true;
                    }
                }
            }
        }
    }
    let mut attacks = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if adj[i][j] {
                attacks.push((nodes[i], nodes[j]));
            }
        }
    }
    PrefStructure::new(carrier, nodes, attacks).expect("generated nodes are consistent")
}

/// A random layer assignment over the elements of a universe of the
/// given size: the raw material for layer-based revision tables. Ties
/// are allowed.
pub fn random_total_preorder(rng: &mut impl Rng, space: usize) -> Vec<usize> {
    (0..space).map(|_| rng.gen_range(0..space.max(1))).collect()
}

/// The revision table induced by a layer assignment: the base set holds
/// the globally minimal elements, and each argument is revised to its
/// own minimal-layer members. Satisfies every revision postulate.
pub fn revision_from_layers(layers: &[usize]) -> RevisionOperator {
    let space = layers.len();
    let family = full_family(space);
    let minimal = |s: &ModelSet| -> ModelSet {
        let mut out = ModelSet::empty(space);
        if let Some(best) = s.iter().map(|e| layers[e]).min() {
            for e in s.iter() {
                if layers[e] == best {
                    out.insert(e);
                }
            }
        }
        out
    };
    let base = minimal(&ModelSet::full(space));
    let map = family
        .sets()
        .iter()
        .map(|a| (a.clone(), minimal(a)))
        .collect();
    RevisionOperator::new(base, family, map).expect("family-aligned table")
}

/// A raw random revision table over the full family: each argument maps
/// to a random subset of itself (so containment in the argument holds by
/// construction; nothing else does).
pub fn random_revision_table(rng: &mut impl Rng, space: usize) -> RevisionOperator {
    let family = full_family(space);
    let base = random_subset(rng, &ModelSet::full(space), 0.5);
    let map = family
        .sets()
        .iter()
        .map(|a| (a.clone(), random_subset(rng, a, 0.6)))
        .collect();
    RevisionOperator::new(base, family, map).expect("family-aligned table")
}

/// A raw random contraction table over the full family: each argument
/// maps to the base joined with a random subset of the universe.
pub fn random_contraction_table(rng: &mut impl Rng, space: usize) -> ContractionOperator {
    let family = full_family(space);
    let u = ModelSet::full(space);
    let base = random_subset(rng, &u, 0.5);
    let map = family
        .sets()
        .iter()
        .map(|a| (a.clone(), base.union(&random_subset(rng, &u, 0.4))))
        .collect();
    ContractionOperator::new(base, family, map).expect("family-aligned table")
}

/// A raw random entrenchment relation over the full family: each ordered
/// pair is related with probability `pair_prob`.
pub fn random_entrenchment(
    rng: &mut impl Rng,
    space: usize,
    pair_prob: f64,
) -> EntrenchmentRelation {
    let family = full_family(space);
    let base = random_subset(rng, &ModelSet::full(space), 0.5);
    let mut rel = std::collections::BTreeSet::new();
    for a in family.sets() {
        for b in family.sets() {
            if rng.gen_bool(pair_prob) {
                rel.insert((a.clone(), b.clone()));
            }
        }
    }
    EntrenchmentRelation::new(base, family, rel).expect("family-aligned relation")
}

/// A random pseudo-distance over `space` elements with ranks in
/// `1..=max_rank` off the diagonal. Always symmetric and
/// identity-respecting when the flags ask for it; otherwise fully
/// independent entries (with a zero diagonal only by chance).
pub fn random_distance(
    rng: &mut impl Rng,
    space: usize,
    max_rank: u64,
    symmetric: bool,
    respects_identity: bool,
) -> PseudoDistance {
    let mut pairs = std::collections::BTreeMap::new();
    for u in 0..space {
        for v in 0..space {
            if symmetric && v < u {
                continue;
            }
            let rank = if u == v {
                if respects_identity {
                    0
                } else {
                    rng.gen_range(0..=max_rank)
                }
            } else {
                rng.gen_range(1..=max_rank)
            };
            pairs.insert((u, v), rank);
        }
    }
    PseudoDistance::new(space, &pairs, symmetric, respects_identity)
        .expect("generated table honors its flags")
}

/// A random weak filter over a non-empty base: one or two generator sets
/// sharing a common witness element, closed upward within the base. The
/// shared witness makes any two members meet, and upward closure is built
/// in, so the weak-filter conditions always hold. Single-generator draws
/// carry their generator as the principal hint.
pub fn random_weak_filter(rng: &mut impl Rng, base: &ModelSet) -> Filter {
    let members = base.members();
    let witness = members[rng.gen_range(0..members.len())];
    let gen_count = rng.gen_range(1..=2);
    let mut generators = Vec::new();
    for _ in 0..gen_count {
        let mut g = random_subset(rng, base, 0.4);
        g.insert(witness);
        generators.push(g);
    }
    let family: Vec<ModelSet> = base
        .subsets()
        .filter(|a| generators.iter().any(|g| g.is_subset(a)))
        .collect();
    let hint = if generators.len() == 1 {
        Some(generators[0].clone())
    } else {
        None
    };
    Filter::new(base.clone(), family, FilterKind::Weak, hint)
        .expect("generated family sits inside its base")
}

/// A random system assigning a weak filter to every non-empty subset of
/// the `space`-element universe. The bases form a difference-closed
/// family and every filter is upward closed, so all printed versions of
/// the removal conditions are scanned on equal footing.
pub fn random_filter_system(rng: &mut impl Rng, space: usize) -> FilterSystem {
    let universe = ModelSet::full(space);
    let family = DomainFamily::powerset_of(&universe, false);
    let mut map = BTreeMap::new();
    for base in family.sets() {
        map.insert(base.clone(), random_weak_filter(rng, base));
    }
    FilterSystem::new(family, map).expect("one filter per base, each on its key")
}

/// A random quantifier structure: `n` elements, the named predicates with
/// random extensions, and a total neighbourhood system (a random weak
/// filter on every non-empty subset), so any evaluation finds its entry.
pub fn random_nstructure(rng: &mut impl Rng, n: usize, pred_names: &[&str]) -> NStructure {
    let full = ModelSet::full(n);
    let mut predicates = BTreeMap::new();
    for name in pred_names {
        predicates.insert(name.to_string(), random_subset(rng, &full, 0.5));
    }
    let mut nsystem = BTreeMap::new();
    for subset in full.subsets() {
        if subset.is_empty() {
            continue;
        }
        let filter = random_weak_filter(rng, &subset);
        nsystem.insert(subset, filter);
    }
    NStructure::new(n, predicates, nsystem).expect("generated neighbourhoods are weak filters")
}

fn random_nabla_matrix(rng: &mut impl Rng, pred_names: &[&str], depth: usize) -> NablaFormula {
    let pred = |rng: &mut dyn rand::RngCore| {
        NablaFormula::pred(pred_names[rng.gen_range(0..pred_names.len())])
    };
    if depth == 0 {
        return pred(rng);
    }
    match rng.gen_range(0..12u8) {
        0..=2 => pred(rng),
        3 | 4 => NablaFormula::not(random_nabla_matrix(rng, pred_names, depth - 1)),
        5 | 6 => NablaFormula::and(
            random_nabla_matrix(rng, pred_names, depth - 1),
            random_nabla_matrix(rng, pred_names, depth - 1),
        ),
        7 | 8 => NablaFormula::or(
            random_nabla_matrix(rng, pred_names, depth - 1),
            random_nabla_matrix(rng, pred_names, depth - 1),
        ),
        9 | 10 => NablaFormula::implies(
            random_nabla_matrix(rng, pred_names, depth - 1),
            random_nabla_matrix(rng, pred_names, depth - 1),
        ),
        _ => NablaFormula::nabla(random_nabla_matrix(rng, pred_names, depth - 1)),
    }
}

/// A pool of random open formulas of connective depth at most two over
/// the named predicates, including occasional nested quantifiers, for
/// instantiating quantifier schemata.
pub fn random_nabla_pool(
    rng: &mut impl Rng,
    pred_names: &[&str],
    size: usize,
) -> Vec<NablaFormula> {
    (0..size)
        .map(|_| random_nabla_matrix(rng, pred_names, 2))
        .collect()
}
