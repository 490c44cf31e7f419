//! Integration tests for the size layer: agreement of the printed
//! versions of the removal conditions over seeded systems, the row
//! correspondence over the exhaustive enumeration, the principal bridge
//! round trip, and quantifier schemata over seeded weak-filter
//! structures.

use prefkit::choice::{check_mu_property, enumerate_choice_functions, ChoiceFunction, MuProperty};
use prefkit::gen::{
    random_filter_system, random_nabla_pool, random_nstructure, random_total_preorder, seeded_rng,
    random_subset,
};
use prefkit::size::{
    check_coherence, check_refclass_row, choice_from_filter, coherence_versions,
    filter_from_choice, CoherenceCondition,
};
use prefkit::{DomainFamily, ModelSet};
use std::collections::BTreeMap;

/// The printed versions of each removal condition agree — both readings
/// of `r_down`, and all three readings of `r_down_down` — on systems
/// whose filters are upward closed, across 200 seeded draws.
#[test]
fn removal_condition_versions_agree_on_seeded_systems() {
    let mut total_checked = 0u64;
    let mut holds_count = 0u32;
    for seed in 0..200u64 {
        let space = 2 + (seed % 3) as usize;
        let mut rng = seeded_rng(seed);
        let sys = random_filter_system(&mut rng, space);

        let down = coherence_versions(&sys, CoherenceCondition::RDown).unwrap();
        assert_eq!(down.len(), 2);
        assert_eq!(
            down[0].holds, down[1].holds,
            "seed {seed}: the two readings of r_down disagree"
        );

        let down_down = coherence_versions(&sys, CoherenceCondition::RDownDown).unwrap();
        assert_eq!(down_down.len(), 3);
        assert_eq!(
            down_down[0].holds, down_down[1].holds,
            "seed {seed}: the two removal readings of r_down_down disagree"
        );
        assert_eq!(
            down_down[0].holds, down_down[2].holds,
            "seed {seed}: the removal and transitivity readings disagree"
        );

        total_checked += down.iter().chain(down_down.iter()).map(|v| v.checked).sum::<u64>();
        if down[0].holds {
            holds_count += 1;
        }
    }
    assert!(total_checked > 0, "the sweeps must scan real instances");
    assert!(
        holds_count > 0 && holds_count < 200,
        "the draws should include both passing and failing systems (got {holds_count}/200 passing)"
    );
}

/// Every row of the coherence/choice correspondence holds as a
/// biconditional for every inside-picking choice function on the full
/// power-set domain over a three-element universe.
#[test]
fn row_correspondence_is_exhaustive_at_three_elements() {
    let universe = ModelSet::full(3);
    let domain = DomainFamily::powerset_of(&universe, true);
    let enumerator = enumerate_choice_functions(&universe, &domain, Some(1 << 20)).unwrap();
    assert_eq!(enumerator.total(), 4096);
    let mut count = 0u32;
    for f in enumerator {
        for row in 1..=6u8 {
            let verdict = check_refclass_row(row, &f).unwrap();
            assert!(
                verdict.holds,
                "row {row} disagrees on function #{count}: {:?}",
                f.map()
            );
        }
        count += 1;
    }
    assert_eq!(count, 4096);
}

/// Converting a choice function to its principal system and back
/// recovers the function on every non-empty argument, across seeded
/// draws.
#[test]
fn principal_bridge_round_trips_on_seeded_functions() {
    for seed in 0..50u64 {
        let space = 2 + (seed % 3) as usize;
        let mut rng = seeded_rng(1000 + seed);
        let universe = ModelSet::full(space);
        let domain = DomainFamily::powerset_of(&universe, true);
        let mut map = BTreeMap::new();
        for x in domain.sets() {
            map.insert(x.clone(), random_subset(&mut rng, x, 0.5));
        }
        let f = ChoiceFunction::new(universe, domain, map).unwrap();
        let sys = filter_from_choice(&f).unwrap();
        let g = choice_from_filter(&sys).unwrap();
        for (x, v) in g.map() {
            assert_eq!(
                &f.map()[x], v,
                "seed {seed}: the bridge altered the value at {x}"
            );
        }
        assert_eq!(
            g.map().len(),
            f.map().len() - 1,
            "only the empty argument is dropped"
        );
    }
}

/// The choice function of a layered (ranked) ordering satisfies every
/// correspondence row with both sides independently true.
#[test]
fn layered_functions_satisfy_every_row_on_both_sides() {
    for seed in 0..20u64 {
        let space = 3 + (seed % 2) as usize;
        let mut rng = seeded_rng(2000 + seed);
        let layers = random_total_preorder(&mut rng, space);
        let universe = ModelSet::full(space);
        let domain = DomainFamily::powerset_of(&universe, true);
        let mut map = BTreeMap::new();
        for x in domain.sets() {
            let best = x.members().iter().map(|&m| layers[m]).min();
            let v = match best {
                Some(rank) => ModelSet::from_indices(
                    space,
                    &x.members()
                        .into_iter()
                        .filter(|&m| layers[m] == rank)
                        .collect::<Vec<_>>(),
                )
                .unwrap(),
                None => ModelSet::empty(space),
            };
            map.insert(x.clone(), v);
        }
        let f = ChoiceFunction::new(universe, domain, map).unwrap();
        for row in 1..=6u8 {
            let verdict = check_refclass_row(row, &f).unwrap();
            assert!(verdict.holds, "seed {seed}: row {row} disagrees");
        }
        let sys = filter_from_choice(&f).unwrap();
        for cond in CoherenceCondition::ALL {
            assert!(
                check_coherence(&sys, cond).unwrap().holds,
                "seed {seed}: {} fails on a layered system",
                cond.id()
            );
        }
        for mu in [
            MuProperty::MuWOR,
            MuProperty::MuOR,
            MuProperty::MuPR,
            MuProperty::MuDisjOR,
            MuProperty::MuCM,
            MuProperty::MuRatM,
        ] {
            assert!(
                check_mu_property(&f, mu).holds,
                "seed {seed}: {} fails on a layered function",
                mu.id()
            );
        }
    }
}

/// All quantifier schemata hold on every seeded weak-filter structure,
/// with instances drawn from a pool of depth-two open formulas.
#[test]
fn quantifier_schemata_hold_on_seeded_weak_structures() {
    let preds = ["P", "Q"];
    for seed in 0..100u64 {
        let n = 2 + (seed % 4) as usize;
        let mut rng = seeded_rng(3000 + seed);
        let m = random_nstructure(&mut rng, n, &preds);
        let pool = random_nabla_pool(&mut rng, &preds, 4);
        let report = prefkit::size::check_nabla_axioms(&m, &pool).unwrap();
        for v in report.verdicts() {
            assert!(
                v.holds,
                "seed {seed}: schema {} fails on a weak-filter structure",
                v.property_id
            );
            assert!(v.checked > 0);
        }
    }
}
