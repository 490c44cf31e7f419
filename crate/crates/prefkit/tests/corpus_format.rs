//! The bundled corpus files are canonical dumps of programmatically
//! built artifacts. `corpus_files_are_canonical` rebuilds every
//! artifact and compares byte for byte, so a drifted or hand-edited
//! file fails loudly. Run the ignored `write_corpus_files` test to
//! regenerate the directory after a deliberate format change.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use prefkit::choice::ChoiceFunction;
use prefkit::distance::{hamming, induced_operator, BinaryOperator, PseudoDistance};
use prefkit::jsonio::{dump_binary_op, dump_choice, dump_structure};
use prefkit::logic::{DomainFamily, ModelSet, Vocabulary};
use prefkit::pref::PrefStructure;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn choice(
    universe: ModelSet,
    domain: DomainFamily,
    entries: &[(&[usize], &[usize])],
) -> ChoiceFunction {
    let space = universe.space();
    let mut map = BTreeMap::new();
    for (x, v) in entries {
        map.insert(
            ModelSet::from_indices(space, x).unwrap(),
            ModelSet::from_indices(space, v).unwrap(),
        );
    }
    ChoiceFunction::new(universe, domain, map).unwrap()
}

fn identity_choice(universe: ModelSet, include_empty: bool) -> ChoiceFunction {
    let domain = DomainFamily::powerset_of(&universe, include_empty);
    let map = domain.sets().iter().map(|x| (x.clone(), x.clone())).collect();
    ChoiceFunction::new(universe, domain, map).unwrap()
}

/// Distance over four points inducing the two-witness revision table:
/// variant 0 and variant 1 rank the pairs differently but induce the
/// same operator over every pair of nonempty sets.
fn weaktr_distance(variant: usize) -> PseudoDistance {
    let ranks: &[((usize, usize), u64)] = if variant == 0 {
        &[((1, 2), 1), ((1, 3), 1), ((2, 3), 2), ((0, 1), 3), ((0, 2), 4), ((0, 3), 4)]
    } else {
        &[((1, 2), 1), ((1, 3), 1), ((0, 1), 2), ((2, 3), 3), ((0, 2), 4), ((0, 3), 4)]
    };
    let pairs: BTreeMap<(usize, usize), u64> = ranks.iter().copied().collect();
    PseudoDistance::new(4, &pairs, true, true).unwrap()
}

fn weaktr_operator() -> BinaryOperator {
    let family = DomainFamily::powerset_of(&ModelSet::full(4), false);
    induced_operator(&weaktr_distance(0), &family).unwrap()
}

fn artifacts() -> Vec<(&'static str, String)> {
    let mut out = Vec::new();

    // Three-element universe, full domain, identity except {0,1} ↦ {1}.
    let u3 = ModelSet::full(3);
    out.push((
        "need-pr.json",
        dump_choice(&choice(
            u3.clone(),
            DomainFamily::powerset_of(&u3, true),
            &[
                (&[], &[]),
                (&[0], &[0]),
                (&[1], &[1]),
                (&[2], &[2]),
                (&[0, 1], &[1]),
                (&[0, 2], &[0, 2]),
                (&[1, 2], &[1, 2]),
                (&[0, 1, 2], &[0, 1, 2]),
            ],
        )),
    ));

    // Two-set domain over four elements; the two values force the
    // cumulative condition while breaking the two-sided one.
    let u4 = ModelSet::full(4);
    let domain = DomainFamily::new(
        4,
        vec![
            ModelSet::from_indices(4, &[0, 1, 2]).unwrap(),
            ModelSet::from_indices(4, &[0, 1, 3]).unwrap(),
        ],
    )
    .unwrap();
    out.push((
        "mu-cum-cd.json",
        dump_choice(&choice(
            u4,
            domain,
            &[(&[0, 1, 2], &[0]), (&[0, 1, 3], &[0, 1])],
        )),
    ));

    // Both singletons chosen but the pair maps to nothing.
    let u2 = ModelSet::full(2);
    out.push((
        "rank-copies.json",
        dump_choice(&choice(
            u2.clone(),
            DomainFamily::powerset_of(&u2, false),
            &[(&[0], &[0]), (&[1], &[1]), (&[0, 1], &[])],
        )),
    ));

    // Element 0 carries two copies, attacked from 1 and 2 respectively.
    out.push((
        "needcopies.json",
        dump_structure(
            &PrefStructure::new(
                ModelSet::full(3),
                vec![(0, 0), (0, 1), (1, 0), (2, 0)],
                vec![((1, 0), (0, 0)), ((2, 0), (0, 1))],
            )
            .unwrap(),
        ),
    ));

    // Models over atoms p, q: 3 ⊨ p∧q, 1 ⊨ p∧¬q, 2 ⊨ ¬p∧q. Identity
    // except {1,3} ↦ {1}.
    let uc = ModelSet::from_indices(4, &[1, 2, 3]).unwrap();
    let cut_pr = choice(
        uc.clone(),
        DomainFamily::powerset_of(&uc, true),
        &[
            (&[], &[]),
            (&[1], &[1]),
            (&[2], &[2]),
            (&[3], &[3]),
            (&[1, 2], &[1, 2]),
            (&[1, 3], &[1]),
            (&[2, 3], &[2, 3]),
            (&[1, 2, 3], &[1, 2, 3]),
        ],
    );
    let mut value: serde_json::Value = serde_json::from_str(&dump_choice(&cut_pr)).unwrap();
    value
        .as_object_mut()
        .unwrap()
        .insert("vocabulary".into(), serde_json::json!(["p", "q"]));
    out.push((
        "cut-pr.json",
        serde_json::to_string_pretty(&value).unwrap(),
    ));

    // Two observed revisions over three elements whose targets order
    // the same distance pair in both directions.
    let u3 = ModelSet::full(3);
    let mut map = BTreeMap::new();
    map.insert(
        (
            ModelSet::from_indices(3, &[0, 1]).unwrap(),
            ModelSet::from_indices(3, &[1, 2]).unwrap(),
        ),
        ModelSet::from_indices(3, &[1]).unwrap(),
    );
    map.insert(
        (
            ModelSet::from_indices(3, &[0, 2]).unwrap(),
            ModelSet::from_indices(3, &[1, 2]).unwrap(),
        ),
        ModelSet::from_indices(3, &[2]).unwrap(),
    );
    let op = BinaryOperator::partial(DomainFamily::powerset_of(&u3, false), map).unwrap();
    out.push(("tr-rank-indiv.json", dump_binary_op(&op)));

    out.push(("weaktr.json", dump_binary_op(&weaktr_operator())));

    // Full revision table of the Hamming distance over two atoms.
    let d = hamming(&Vocabulary::of(&["p", "q"]));
    let family = DomainFamily::powerset_of(&ModelSet::full(4), false);
    out.push((
        "hamming-op.json",
        dump_binary_op(&induced_operator(&d, &family).unwrap()),
    ));

    // A three-node strict chain: 0 below 1 below 2.
    out.push((
        "chain.json",
        dump_structure(
            &PrefStructure::new(
                ModelSet::full(3),
                vec![(0, 0), (1, 0), (2, 0)],
                vec![((0, 0), (1, 0)), ((1, 0), (2, 0)), ((0, 0), (2, 0))],
            )
            .unwrap(),
        ),
    ));

    out.push((
        "identity.json",
        dump_choice(&identity_choice(ModelSet::full(3), true)),
    ));

    out
}

/// Regenerates the corpus directory. Run explicitly after changing the
/// dump format or an artifact definition:
/// `cargo test --test corpus_format -- --ignored write_corpus_files`
#[test]
#[ignore]
fn write_corpus_files() {
    let dir = corpus_dir();
    fs::create_dir_all(&dir).unwrap();
    for (name, text) in artifacts() {
        fs::write(dir.join(name), format!("{text}\n")).unwrap();
    }
}

#[test]
fn corpus_files_are_canonical() {
    let dir = corpus_dir();
    for (name, text) in artifacts() {
        let on_disk = fs::read_to_string(dir.join(name))
            .unwrap_or_else(|e| panic!("corpus file {name} unreadable: {e}"));
        assert_eq!(on_disk, format!("{text}\n"), "corpus file {name} has drifted");
    }
}

#[test]
fn both_weaktr_distance_variants_induce_the_bundled_table() {
    let family = DomainFamily::powerset_of(&ModelSet::full(4), false);
    let bundled = weaktr_operator();
    for variant in [0, 1] {
        let op = induced_operator(&weaktr_distance(variant), &family).unwrap();
        assert!(op.same_table(&bundled), "variant {variant} diverges");
    }
}
