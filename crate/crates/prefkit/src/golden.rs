//! Bundled corpus of worked examples with pinned verdicts.
//!
//! Each case embeds a JSON artifact from `corpus/`, runs the check or
//! synthesis it illustrates, and compares the outcome against the
//! documented behavior. A case's verdicts are claims: a claim holds
//! when the run reproduced what the corpus entry is known to do —
//! including the failures. A choice function that is *supposed* to
//! break a condition therefore yields a passing claim when the breakage
//! shows up, so a fully green corpus run means every pinned behavior
//! was reproduced exactly.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::choice::{
    check_logic_rule, check_mu_property, default_theory_pool, logic_from_mu, ChoiceFunction,
    LogicRule, MuProperty,
};
use crate::distance::{
    induced_operator, synth_distance, DistOptions, DistOutcome, PseudoDistance, Semantics,
};
use crate::jsonio::{load_binary_op, load_choice, load_choice_vocabulary, load_structure};
use crate::logic::{DomainFamily, ModelSet, Theory};
use crate::pref::{SynthOptions, SynthOutcome};
use crate::report::{PropertyVerdict, Report, ReportItem, Section, Witness, WitnessValue};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GoldenError {
    #[error("no corpus case named {0:?}; known cases: {1}")]
    UnknownCase(String, String),
}

struct Case {
    name: &'static str,
    text: &'static str,
    run: fn(&'static str) -> Result<Vec<ReportItem>, String>,
}

const CASES: [Case; 7] = [
    Case {
        name: "need-pr",
        text: include_str!("../corpus/need-pr.json"),
        run: case_need_pr,
    },
    Case {
        name: "mu-cum-cd",
        text: include_str!("../corpus/mu-cum-cd.json"),
        run: case_mu_cum_cd,
    },
    Case {
        name: "rank-copies",
        text: include_str!("../corpus/rank-copies.json"),
        run: case_rank_copies,
    },
    Case {
        name: "needcopies",
        text: include_str!("../corpus/needcopies.json"),
        run: case_needcopies,
    },
    Case {
        name: "weaktr",
        text: include_str!("../corpus/weaktr.json"),
        run: case_weaktr,
    },
    Case {
        name: "cut-pr",
        text: include_str!("../corpus/cut-pr.json"),
        run: case_cut_pr,
    },
    Case {
        name: "tr-rank-indiv",
        text: include_str!("../corpus/tr-rank-indiv.json"),
        run: case_tr_rank_indiv,
    },
];

/// Names of the bundled cases, in run order.
pub fn case_names() -> Vec<&'static str> {
    CASES.iter().map(|c| c.name).collect()
}

/// Runs the bundled corpus — all cases, or the single named one — and
/// reports one section per case. The report passes iff every documented
/// behavior was reproduced.
pub fn run_golden(filter: Option<&str>) -> Result<Report, GoldenError> {
    let selected: Vec<&Case> = match filter {
        None => CASES.iter().collect(),
        Some(name) => {
            let found = CASES.iter().find(|c| c.name == name).ok_or_else(|| {
                GoldenError::UnknownCase(name.to_string(), case_names().join(", "))
            })?;
            vec![found]
        }
    };
    let mut report = Report::new("golden corpus");
    for case in selected {
        let items = (case.run)(case.text).unwrap_or_else(|e| {
            vec![ReportItem::Verdict(PropertyVerdict::fail(
                "case_ran",
                1,
                0,
                Witness::new().text("error", e),
            ))]
        });
        report.push_section(Section {
            title: case.name.to_string(),
            items,
        });
    }
    Ok(report)
}

/// A one-fact verdict: the documented behavior either reproduced or it
/// did not, with the actual outcome as the counterexample.
fn claim(id: &str, ok: bool, actual: impl FnOnce() -> String) -> ReportItem {
    let v = if ok {
        PropertyVerdict::pass(id, 1, 0)
    } else {
        PropertyVerdict::fail(id, 1, 0, Witness::new().text("actual", actual()))
    };
    ReportItem::Verdict(v)
}

fn note(text: impl Into<String>) -> ReportItem {
    ReportItem::Note { text: text.into() }
}

fn witness_slot<'a>(v: &'a PropertyVerdict, name: &str) -> Option<&'a WitnessValue> {
    v.witness
        .as_ref()?
        .slots
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, value)| value)
}

fn describe(v: &PropertyVerdict) -> String {
    match &v.witness {
        None => format!("holds over {} checked instances", v.checked),
        Some(w) => {
            let slots: Vec<String> = w
                .slots
                .iter()
                .map(|(n, val)| format!("{n} = {}", serde_json::to_string(val).unwrap()))
                .collect();
            format!("fails at {}", slots.join(", "))
        }
    }
}

fn plain_synth(max_copies: usize) -> SynthOptions {
    SynthOptions {
        max_copies,
        ..SynthOptions::default()
    }
}

fn ranked_synth(max_copies: usize) -> SynthOptions {
    SynthOptions {
        require_ranked: true,
        max_copies,
        ..SynthOptions::default()
    }
}

/// Identity except on {0,1}: every inclusion-monotone condition in the
/// documented profile survives, but choosing inside the pair is not
/// stable under growing the argument.
fn case_need_pr(text: &'static str) -> Result<Vec<ReportItem>, String> {
    let f = load_choice(text).map_err(|e| e.to_string())?;
    let mut items = Vec::new();
    for prop in [
        MuProperty::MuSub,
        MuProperty::MuCUM,
        MuProperty::MuRatM,
        MuProperty::MuSubSup,
    ] {
        let v = check_mu_property(&f, prop);
        items.push(claim(prop.id(), v.holds, || describe(&v)));
    }
    let pr = check_mu_property(&f, MuProperty::MuPR);
    let at_pair = witness_slot(&pr, "X") == Some(&WitnessValue::Set(vec![0, 1]));
    items.push(claim("mu_PR_fails", !pr.holds, || describe(&pr)));
    items.push(claim("mu_PR_witness_is_the_pair", at_pair, || describe(&pr)));
    items.push(note("counterexample argument: X = {0, 1} inside Y = {0, 1, 2}"));
    Ok(items)
}

/// Two overlapping arguments whose values satisfy the cumulative
/// condition vacuously while breaking the two-sided variant.
fn case_mu_cum_cd(text: &'static str) -> Result<Vec<ReportItem>, String> {
    let f = load_choice(text).map_err(|e| e.to_string())?;
    let mut items = Vec::new();
    for prop in [MuProperty::MuSub, MuProperty::MuCUM] {
        let v = check_mu_property(&f, prop);
        items.push(claim(prop.id(), v.holds, || describe(&v)));
    }
    let ss = check_mu_property(&f, MuProperty::MuSubSup);
    items.push(claim("mu_sub_sup_fails", !ss.holds, || describe(&ss)));
    items.push(note(
        "the domain pair {0, 1, 2}, {0, 1, 3} has f-values {0} and {0, 1}",
    ));
    Ok(items)
}

/// Both singletons chosen, the pair mapped to nothing: realizable with
/// two copies of each element, but never by a modular relation.
fn case_rank_copies(text: &'static str) -> Result<Vec<ReportItem>, String> {
    let f = load_choice(text).map_err(|e| e.to_string())?;
    let mut items = Vec::new();
    for max_copies in 1..=3usize {
        let out = synth_structure_named(&f, &ranked_synth(max_copies))?;
        items.push(claim(
            &format!("ranked_unsat_copies_{max_copies}"),
            matches!(out, SynthOutcome::Unsat(_)),
            || "a modular structure was found".to_string(),
        ));
    }
    let out = synth_structure_named(&f, &plain_synth(2))?;
    let realized = match &out {
        SynthOutcome::Structure(s) => {
            s.choice_of(f.domain()).map_err(|e| e.to_string())? == f
        }
        SynthOutcome::Unsat(_) => false,
    };
    items.push(claim("plain_synth_copies_2", realized, || match &out {
        SynthOutcome::Unsat(_) => "unsatisfiable without the modularity requirement".to_string(),
        SynthOutcome::Structure(_) => "structure found but it realizes a different function".to_string(),
    }));
    Ok(items)
}

fn synth_structure_named(
    f: &ChoiceFunction,
    opts: &SynthOptions,
) -> Result<SynthOutcome, String> {
    crate::pref::synth_structure(f, opts).map_err(|e| e.to_string())
}

/// One element with two copies, each attacked from a different side:
/// the induced function needs the second copy.
fn case_needcopies(text: &'static str) -> Result<Vec<ReportItem>, String> {
    let s = load_structure(text).map_err(|e| e.to_string())?;
    let space = 3;
    let universe = ModelSet::full(space);
    let pair = ModelSet::from_indices(space, &[0, 1]).map_err(|e| e.to_string())?;
    let mu_universe = s.mu_of(&universe);
    let mu_pair = s.mu_of(&pair);
    let mut items = Vec::new();
    items.push(claim(
        "mu_of_universe",
        mu_universe == ModelSet::from_indices(space, &[1, 2]).map_err(|e| e.to_string())?,
        || format!("μ({universe}) = {mu_universe}"),
    ));
    items.push(claim("mu_of_pair", mu_pair == pair, || {
        format!("μ({pair}) = {mu_pair}")
    }));
    let f = s
        .choice_of(&DomainFamily::powerset_of(&universe, false))
        .map_err(|e| e.to_string())?;
    let single = synth_structure_named(&f, &plain_synth(1))?;
    items.push(claim(
        "single_copy_unsat",
        matches!(single, SynthOutcome::Unsat(_)),
        || "a one-copy structure realizes the function".to_string(),
    ));
    let double = synth_structure_named(&f, &plain_synth(2))?;
    let realized = match &double {
        SynthOutcome::Structure(t) => {
            t.choice_of(f.domain()).map_err(|e| e.to_string())? == f
        }
        SynthOutcome::Unsat(_) => false,
    };
    items.push(claim("two_copies_realize", realized, || {
        "no two-copy structure realizes the induced function".to_string()
    }));
    Ok(items)
}

/// Distance over four points whose ranking is not pinned down by the
/// revision behavior it induces.
fn weaktr_distance(variant: usize) -> PseudoDistance {
    let ranks: &[((usize, usize), u64)] = if variant == 0 {
        &[((1, 2), 1), ((1, 3), 1), ((2, 3), 2), ((0, 1), 3), ((0, 2), 4), ((0, 3), 4)]
    } else {
        &[((1, 2), 1), ((1, 3), 1), ((0, 1), 2), ((2, 3), 3), ((0, 2), 4), ((0, 3), 4)]
    };
    let pairs: BTreeMap<(usize, usize), u64> = ranks.iter().copied().collect();
    PseudoDistance::new(4, &pairs, true, true).expect("symmetric with zero diagonal")
}

/// Two genuinely different distances induce the bundled table, and
/// recovery finds some distance that induces it back.
fn case_weaktr(text: &'static str) -> Result<Vec<ReportItem>, String> {
    let op = load_binary_op(text).map_err(|e| e.to_string())?;
    let mut items = Vec::new();
    for (id, variant) in [("first_distance_matches", 0), ("second_distance_matches", 1)] {
        let induced =
            induced_operator(&weaktr_distance(variant), op.family()).map_err(|e| e.to_string())?;
        items.push(claim(id, induced.same_table(&op), || {
            "induced table differs from the bundled one".to_string()
        }));
    }
    let out = synth_distance(&op, &DistOptions::default()).map_err(|e| e.to_string())?;
    let recovered = match &out {
        DistOutcome::Distance(d) => induced_operator(d, op.family())
            .map_err(|e| e.to_string())?
            .same_table(&op),
        DistOutcome::Unsat(_) => false,
    };
    items.push(claim("distance_recovered", recovered, || match &out {
        DistOutcome::Unsat(_) => "recovery reported unsatisfiable".to_string(),
        DistOutcome::Distance(_) => "recovered distance induces a different table".to_string(),
    }));
    items.push(note(
        "two distances ranking {2,3} against {0,1} differently induce this same table",
    ));
    Ok(items)
}

/// Consequence operator of the choice function over atoms p, q: the
/// cut rule goes through, but conclusions of a theory do not survive
/// strengthening it — the pair T = p ∨ (¬p ∧ q), T' = p breaks it.
fn case_cut_pr(text: &'static str) -> Result<Vec<ReportItem>, String> {
    let f = load_choice(text).map_err(|e| e.to_string())?;
    let vocab = load_choice_vocabulary(text)
        .map_err(|e| e.to_string())?
        .ok_or("corpus entry lost its vocabulary key")?;
    let c = logic_from_mu(&f, &vocab).map_err(|e| e.to_string())?;
    let pool = default_theory_pool(&vocab, &[]);
    let mut items = Vec::new();

    let cut = check_logic_rule(&c, LogicRule::Cut, &pool).map_err(|e| e.to_string())?;
    items.push(claim("CUT", cut.holds, || describe(&cut)));
    let pr = check_logic_rule(&c, LogicRule::Pr, &pool).map_err(|e| e.to_string())?;
    items.push(claim("PR_fails", !pr.holds, || describe(&pr)));

    let t = Theory::parse(&["p | (~p & q)"], &vocab).map_err(|e| e.to_string())?;
    let t_prime = Theory::parse(&["p"], &vocab).map_err(|e| e.to_string())?;
    let focused =
        check_logic_rule(&c, LogicRule::Pr, &[t, t_prime]).map_err(|e| e.to_string())?;
    let pinned = !focused.holds
        && witness_slot(&focused, "x") == Some(&WitnessValue::Element(3));
    items.push(claim("PR_fails_on_stated_pair", pinned, || describe(&focused)));
    items.push(note(
        "T = p | (~p & q) and T' = p: the model of p ∧ q follows from T, is consistent with T', yet is not selected under T ∪ T'",
    ));
    Ok(items)
}

/// Two observed revisions that order the same distance comparison both
/// ways — individual-reading recovery must report the cycle.
fn case_tr_rank_indiv(text: &'static str) -> Result<Vec<ReportItem>, String> {
    let op = load_binary_op(text).map_err(|e| e.to_string())?;
    let opts = DistOptions {
        semantics: Semantics::Individual,
        ..DistOptions::default()
    };
    let out = synth_distance(&op, &opts).map_err(|e| e.to_string())?;
    let mut items = Vec::new();
    match out {
        DistOutcome::Unsat(reason) => {
            items.push(claim("individual_unsat", true, String::new));
            let rendered = reason.to_markdown();
            items.push(claim(
                "cycle_names_the_opposed_pairs",
                rendered.contains("comparison cycle")
                    && rendered.contains("d(0,1)")
                    && rendered.contains("d(0,2)"),
                || rendered.clone(),
            ));
        }
        DistOutcome::Distance(_) => {
            items.push(claim("individual_unsat", false, || {
                "a distance was found".to_string()
            }));
        }
    }
    Ok(items)
}
