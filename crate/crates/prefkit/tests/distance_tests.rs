//! Distance-layer sweeps: generated distances must induce operators
//! passing the success/consistency/loop conditions, recovery must
//! reproduce the table, the induced revisions must pass the
//! belief-change postulates, and neighborhoods must agree with both the
//! union-revision and the entrenchment reading.

use prefkit::agm::{
    check_revision, contraction_from_revision, entrenchment_from_contraction,
};
use prefkit::distance::{
    check_operator, collective_rev, individual_rev, induced_operator, induced_revision,
    neighborhood, synth_distance, DistOptions, DistOutcome, DistanceError,
};
use prefkit::gen::{random_distance, seeded_rng};
use prefkit::logic::{DomainFamily, ModelSet};

#[test]
fn generated_operators_pass_conditions_and_recover() {
    let mut rng = seeded_rng(0xD1);
    for space in 2..=4usize {
        let family = DomainFamily::powerset_of(&ModelSet::full(space), false);
        for round in 0..30 {
            let d = random_distance(&mut rng, space, 4, true, true);
            let op = induced_operator(&d, &family).unwrap();
            let report = check_operator(&op, 6);
            for id in ["succ", "con", "loop"] {
                assert!(
                    report.verdict(id).unwrap().holds,
                    "space {space} round {round}: {id} fails\n{}",
                    report.to_markdown()
                );
            }
            match synth_distance(&op, &DistOptions::default()).unwrap() {
                DistOutcome::Distance(found) => {
                    let again = induced_operator(&found, &family).unwrap();
                    assert!(
                        again.same_table(&op),
                        "space {space} round {round}: recovered distance changes the table"
                    );
                }
                DistOutcome::Unsat(r) => {
                    panic!("space {space} round {round}: Unsat\n{}", r.to_markdown())
                }
            }
        }
    }
}

#[test]
fn distance_revisions_pass_belief_change_postulates() {
    let mut rng = seeded_rng(0xD2);
    for space in 2..=4usize {
        let family = DomainFamily::powerset_of(&ModelSet::full(space), false);
        for _ in 0..25 {
            let d = random_distance(&mut rng, space, 5, true, true);
            for base in family.sets() {
                let rev = induced_revision(&d, base).unwrap();
                let report = check_revision(&rev);
                assert!(
                    report.verdicts().iter().all(|v| v.holds),
                    "base {base} fails\n{}",
                    report.to_markdown()
                );
            }
        }
    }
}

#[test]
fn neighborhood_matches_union_revision_and_entrenchment() {
    let mut rng = seeded_rng(0xD3);
    let space = 3usize;
    let family = DomainFamily::powerset_of(&ModelSet::full(space), false);
    let u = ModelSet::full(space);
    for _ in 0..20 {
        let d = random_distance(&mut rng, space, 4, true, true);
        for x in family.sets() {
            let rev = induced_revision(&d, x).unwrap();
            let con = contraction_from_revision(&rev).unwrap();
            let ee = entrenchment_from_contraction(&con).unwrap();
            for y in family.sets() {
                let hood = neighborhood(&d, x, y).unwrap();
                for z in family.sets() {
                    let via_hood = hood.intersects(z);
                    let via_rev = collective_rev(&d, x, &y.union(z)).unwrap().intersects(z);
                    let via_ee = ee.le(&u.minus(z), &u.minus(y));
                    assert_eq!(via_hood, via_rev, "x={x} y={y} z={z}");
                    assert_eq!(via_hood, via_ee, "x={x} y={y} z={z}");
                }
            }
        }
    }
}

#[test]
fn collective_choices_are_individually_reachable() {
    let mut rng = seeded_rng(0xD4);
    for space in 2..=4usize {
        let family = DomainFamily::powerset_of(&ModelSet::full(space), false);
        for _ in 0..20 {
            let d = random_distance(&mut rng, space, 4, true, true);
            for x in family.sets() {
                for y in family.sets() {
                    let coll = collective_rev(&d, x, y).unwrap();
                    let indiv = individual_rev(&d, x, y).unwrap();
                    assert!(
                        coll.is_subset(&indiv),
                        "collective must refine individual at x={x} y={y}"
                    );
                    assert!(!indiv.is_empty());
                }
            }
        }
    }
}

#[test]
fn tiny_budget_is_reported_as_budget_not_unsat() {
    let mut rng = seeded_rng(0xD5);
    let space = 4usize;
    let family = DomainFamily::powerset_of(&ModelSet::full(space), false);
    let d = random_distance(&mut rng, space, 4, true, true);
    let op = induced_operator(&d, &family).unwrap();
    let opts = DistOptions {
        budget: 3,
        ..DistOptions::default()
    };
    match synth_distance(&op, &opts) {
        Err(DistanceError::BudgetExceeded { explored, budget }) => {
            assert!(explored > budget);
        }
        other => panic!("expected a budget error, got {other:?}"),
    }
}
