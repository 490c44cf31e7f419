//! Preferential structures: carriers of elements, nodes that are
//! element/copy pairs, and an attack relation between nodes. The module
//! computes the induced choice of minimal elements, structural flags
//! (irreflexivity, transitivity, cycle freedom, modularity), layer
//! assignments for modular cycle-free relations, smoothness with respect
//! to a domain, and synthesis of structures representing a given choice
//! function, with optional transitivity, smoothness, and rankedness.

use crate::choice::{check_mu_property, ChoiceError, ChoiceFunction, MuProperty};
use crate::logic::{DomainFamily, ModelSet};
use crate::report::{PropertyVerdict, Report, Section, ReportItem, Witness, WitnessValue};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Default bound on copies per element during synthesis.
pub const DEFAULT_MAX_COPIES: usize = 2;
/// Default bound on total node count during synthesis.
pub const DEFAULT_NODE_BUDGET: usize = 24;

/// Errors raised by the preferential layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrefError {
    #[error("node element {0} is not in the carrier")]
    NodeOutsideCarrier(usize),
    #[error("carrier element {0} has no node")]
    CarrierElementWithoutNode(usize),
    #[error("copy indices of element {0} are not 0..k")]
    CopyIndicesNotContiguous(usize),
    #[error("attack endpoint <{0}, {1}> is not a node")]
    UnknownAttackNode(usize, usize),
    #[error("ambient space mismatch")]
    SpaceMismatch,
    #[error("relation is not modular; witness nodes <{x:?}>, <{y:?}>, <{z:?}>")]
    NotModular {
        x: (usize, usize),
        y: (usize, usize),
        z: (usize, usize),
    },
    #[error("relation has a cycle through <{0:?}>")]
    HasCycle((usize, usize)),
    #[error("synthesis needs {required} nodes, over the budget of {budget}")]
    NodeBudgetExceeded { required: usize, budget: usize },
    #[error(transparent)]
    Choice(#[from] ChoiceError),
}

/// A preferential structure: a carrier of elements, one or more copies
/// (nodes) per carrier element, and attacks `u ≺ v` between nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefStructure {
    space: usize,
    carrier: ModelSet,
    nodes: Vec<(usize, usize)>,
    attacks: BTreeSet<(usize, usize)>,
    /// element -> indices into `nodes`, ascending.
    by_element: BTreeMap<usize, Vec<usize>>,
}

impl PrefStructure {
    /// Builds a structure from a carrier, nodes as (element, copy) pairs,
    /// and attacks as ordered node pairs (attacker, attacked). Every
    /// carrier element must have at least one node with copy indices
    /// forming 0..k, and attacks must connect existing nodes.
    pub fn new(
        carrier: ModelSet,
        nodes: Vec<(usize, usize)>,
        attacks: Vec<((usize, usize), (usize, usize))>,
    ) -> Result<Self, PrefError> {
        let mut sorted = nodes;
        sorted.sort();
        sorted.dedup();
        let mut by_element: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &(e, _)) in sorted.iter().enumerate() {
            if !carrier.contains(e) {
                return Err(PrefError::NodeOutsideCarrier(e));
            }
            by_element.entry(e).or_default().push(i);
        }
        for e in carrier.iter() {
            match by_element.get(&e) {
                None => return Err(PrefError::CarrierElementWithoutNode(e)),
                Some(idxs) => {
                    for (k, &i) in idxs.iter().enumerate() {
                        if sorted[i].1 != k {
                            return Err(PrefError::CopyIndicesNotContiguous(e));
                        }
                    }
                }
            }
        }
        let index_of: BTreeMap<(usize, usize), usize> = sorted
            .iter()
            .enumerate()
            .map(|(i, &n)| (n, i))
            .collect();
        let mut edge_set = BTreeSet::new();
        for (u, v) in attacks {
            let ui = *index_of
                .get(&u)
                .ok_or(PrefError::UnknownAttackNode(u.0, u.1))?;
            let vi = *index_of
                .get(&v)
                .ok_or(PrefError::UnknownAttackNode(v.0, v.1))?;
            edge_set.insert((ui, vi));
        }
        Ok(PrefStructure {
            space: carrier.space(),
            carrier,
            nodes: sorted,
            attacks: edge_set,
            by_element,
        })
    }

    pub fn carrier(&self) -> &ModelSet {
        &self.carrier
    }

    /// Nodes in canonical order, as (element, copy) pairs.
    pub fn nodes(&self) -> &[(usize, usize)] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of copies of one element (0 when outside the carrier).
    pub fn copies_of(&self, element: usize) -> usize {
        self.by_element.get(&element).map_or(0, |v| v.len())
    }

    /// Attacks as (attacker, attacked) pairs of (element, copy) nodes.
    pub fn attack_pairs(&self) -> Vec<((usize, usize), (usize, usize))> {
        self.attacks
            .iter()
            .map(|&(u, v)| (self.nodes[u], self.nodes[v]))
            .collect()
    }

    fn attacked(&self, u: usize, v: usize) -> bool {
        self.attacks.contains(&(u, v))
    }

    /// True when node `v` has no attacker whose element lies in `x`.
    fn minimal_in(&self, v: usize, x: &ModelSet) -> bool {
        !self
            .attacks
            .iter()
            .any(|&(a, b)| b == v && x.contains(self.nodes[a].0))
    }

    /// The minimal elements of `x`: those members of `x` (intersected
    /// with the carrier) owning a node with no attacker from `x`.
    pub fn mu_of(&self, x: &ModelSet) -> ModelSet {
        let mut out = ModelSet::empty(self.space.max(x.space()));
        for e in x.iter() {
            if !self.carrier.contains(e) {
                continue;
            }
            if self.by_element[&e]
                .iter()
                .any(|&v| self.minimal_in(v, x))
            {
                out.insert(e);
            }
        }
        out
    }

    /// The choice function `X ↦ mu_of(X)` on a domain family.
    pub fn choice_of(&self, domain: &DomainFamily) -> Result<ChoiceFunction, PrefError> {
        if domain.space() != self.space {
            return Err(PrefError::SpaceMismatch);
        }
        let mut universe = self.carrier.clone();
        for s in domain.sets() {
            universe = universe.union(s);
        }
        let map = domain
            .sets()
            .iter()
            .map(|x| (x.clone(), self.mu_of(x)))
            .collect();
        Ok(ChoiceFunction::new(universe, domain.clone(), map)?)
    }

    /// The four structural flags, each by direct quantification over
    /// nodes. `ranked` is the incomparability-transfer condition: for
    /// incomparable `x ⊥ y`, every `z ≺ x` also has `z ≺ y`, and every
    /// `x ≺ z` also has `y ≺ z`.
    pub fn structure_flags(&self) -> StructureFlags {
        StructureFlags {
            irreflexive: self.irreflexive_witness().is_none(),
            transitive: self.transitive_witness().is_none(),
            cycle_free: self.cycle_witness().is_none(),
            ranked: self.modularity_witness().is_none(),
        }
    }

    fn irreflexive_witness(&self) -> Option<usize> {
        (0..self.nodes.len()).find(|&v| self.attacked(v, v))
    }

    fn transitive_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.nodes.len();
        for a in 0..n {
            for b in 0..n {
                if !self.attacked(a, b) {
                    continue;
                }
                for c in 0..n {
                    if self.attacked(b, c) && !self.attacked(a, c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    fn cycle_witness(&self) -> Option<usize> {
        // Kahn's algorithm; any node left on a cycle is reported, least
        // first.
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        for &(_, v) in &self.attacks {
            indeg[v] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut removed = vec![false; n];
        while let Some(v) = queue.pop() {
            removed[v] = true;
            for &(a, b) in &self.attacks {
                if a == v && !removed[b] {
                    indeg[b] -= 1;
                    if indeg[b] == 0 {
                        queue.push(b);
                    }
                }
            }
        }
        (0..n).find(|&v| !removed[v])
    }

    fn modularity_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.nodes.len();
        for x in 0..n {
            for y in 0..n {
                if x == y || self.attacked(x, y) || self.attacked(y, x) {
                    continue;
                }
                for z in 0..n {
                    if (self.attacked(z, x) && !self.attacked(z, y))
                        || (self.attacked(x, z) && !self.attacked(y, z))
                    {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    /// A report with one verdict per structural flag, carrying witnesses
    /// of the failed ones.
    pub fn structure_report(&self) -> Report {
        let mut report = Report::new("structure flags");
        let node_w = |i: usize| {
            let (e, c) = self.nodes[i];
            WitnessValue::Node(e, c)
        };
        match self.irreflexive_witness() {
            None => report.push_verdict(PropertyVerdict::pass("irreflexive", self.nodes.len() as u64, 0)),
            Some(v) => report.push_verdict(PropertyVerdict::fail(
                "irreflexive",
                self.nodes.len() as u64,
                0,
                Witness::new().with("node", node_w(v)),
            )),
        }
        match self.transitive_witness() {
            None => report.push_verdict(PropertyVerdict::pass("transitive", self.attacks.len() as u64, 0)),
            Some((a, b, c)) => report.push_verdict(PropertyVerdict::fail(
                "transitive",
                self.attacks.len() as u64,
                0,
                Witness::new()
                    .with("a", node_w(a))
                    .with("b", node_w(b))
                    .with("c", node_w(c)),
            )),
        }
        match self.cycle_witness() {
            None => report.push_verdict(PropertyVerdict::pass("cycle_free", self.nodes.len() as u64, 0)),
            Some(v) => report.push_verdict(PropertyVerdict::fail(
                "cycle_free",
                self.nodes.len() as u64,
                0,
                Witness::new().with("on_cycle", node_w(v)),
            )),
        }
        match self.modularity_witness() {
            None => report.push_verdict(PropertyVerdict::pass("ranked", self.nodes.len() as u64, 0)),
            Some((x, y, z)) => report.push_verdict(PropertyVerdict::fail(
                "ranked",
                self.nodes.len() as u64,
                0,
                Witness::new()
                    .with("x", node_w(x))
                    .with("y", node_w(y))
                    .with("z", node_w(z)),
            )),
        }
        report
    }

    /// Layers realizing the relation of a modular, cycle-free structure:
    /// `u ≺ v` iff `layer(u) < layer(v)`. Layers are the canonical
    /// quotient by incomparability, numbered from 0.
    pub fn rank_layers(&self) -> Result<RankAssignment, PrefError> {
        if let Some((x, y, z)) = self.modularity_witness() {
            return Err(PrefError::NotModular {
                x: self.nodes[x],
                y: self.nodes[y],
                z: self.nodes[z],
            });
        }
        if let Some(v) = self.cycle_witness() {
            return Err(PrefError::HasCycle(self.nodes[v]));
        }
        // Longest incoming chain; modularity plus cycle freedom make this
        // realize the relation exactly.
        let n = self.nodes.len();
        let mut layer = vec![0usize; n];
        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b) in &self.attacks {
                if layer[b] < layer[a] + 1 {
                    layer[b] = layer[a] + 1;
                    changed = true;
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                debug_assert_eq!(
                    self.attacked(a, b),
                    layer[a] < layer[b],
                    "layers must realize the relation"
                );
            }
        }
        Ok(RankAssignment {
            layer: self
                .nodes
                .iter()
                .enumerate()
                .map(|(i, &node)| (node, layer[i]))
                .collect(),
        })
    }

    /// Smoothness with respect to a domain: for every domain set `X` and
    /// every node whose element lies in `X`, the node is minimal in `X`
    /// or has a direct attacker from `X` that is minimal in `X`.
    pub fn is_smooth(&self, domain: &DomainFamily) -> PropertyVerdict {
        let mut checked = 0u64;
        for x in domain.sets() {
            for v in 0..self.nodes.len() {
                if !x.contains(self.nodes[v].0) {
                    continue;
                }
                checked += 1;
                if self.minimal_in(v, x) {
                    continue;
                }
                let rescued = self.attacks.iter().any(|&(a, b)| {
                    b == v && x.contains(self.nodes[a].0) && self.minimal_in(a, x)
                });
                if !rescued {
                    let (e, c) = self.nodes[v];
                    return PropertyVerdict::fail(
                        "smooth",
                        checked,
                        0,
                        Witness::new()
                            .with("X", WitnessValue::Set(x.members()))
                            .with("node", WitnessValue::Node(e, c)),
                    );
                }
            }
        }
        PropertyVerdict::pass("smooth", checked, 0)
    }
}

/// Structural flags of the attack relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureFlags {
    pub irreflexive: bool,
    pub transitive: bool,
    pub cycle_free: bool,
    /// The incomparability-transfer (modularity) condition.
    pub ranked: bool,
}

/// A layer map on nodes realizing a modular cycle-free relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankAssignment {
    pub layer: BTreeMap<(usize, usize), usize>,
}

impl RankAssignment {
    /// Whether `u ≺ v` iff `layer(u) < layer(v)` over the structure's
    /// nodes.
    pub fn realizes(&self, s: &PrefStructure) -> bool {
        for (i, u) in s.nodes.iter().enumerate() {
            for (j, v) in s.nodes.iter().enumerate() {
                let lt = match (self.layer.get(u), self.layer.get(v)) {
                    (Some(a), Some(b)) => a < b,
                    _ => return false,
                };
                if s.attacked(i, j) != lt {
                    return false;
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

/// Requirements and bounds for structure synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    pub require_transitive: bool,
    /// Smoothness with respect to the target function's domain.
    pub require_smooth: bool,
    /// A modular, cycle-free relation (realizable by layers).
    pub require_ranked: bool,
    /// Bound on copies per element (≥ 1).
    pub max_copies: usize,
    /// Bound on total node count.
    pub node_budget: usize,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            require_transitive: false,
            require_smooth: false,
            require_ranked: false,
            max_copies: DEFAULT_MAX_COPIES,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Result of synthesis: a structure, or an unsatisfiability report that
/// lists which characterizing conditions the target violates and whether
/// the bounded search was exhausted.
#[derive(Debug)]
pub enum SynthOutcome {
    Structure(PrefStructure),
    Unsat(Report),
}

struct SynthTarget<'a> {
    f: &'a ChoiceFunction,
    dom: Vec<ModelSet>,
    space: usize,
    /// Elements chosen somewhere.
    chosen: ModelSet,
    /// Elements appearing in some domain set.
    active: ModelSet,
    /// Per element: domain-set indices where it is chosen.
    pos: BTreeMap<usize, Vec<usize>>,
    /// Per element: domain-set indices where it is rejected.
    bad: BTreeMap<usize, Vec<usize>>,
}

impl<'a> SynthTarget<'a> {
    fn new(f: &'a ChoiceFunction) -> Self {
        let dom: Vec<ModelSet> = f.domain().sets().to_vec();
        let space = f.universe().space();
        let mut chosen = ModelSet::empty(space);
        let mut active = ModelSet::empty(space);
        let mut pos: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut bad: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, x) in dom.iter().enumerate() {
            active = active.union(x);
            let fx = &f.map()[x];
            chosen = chosen.union(fx);
            for e in x.iter() {
                if fx.contains(e) {
                    pos.entry(e).or_default().push(i);
                } else {
                    bad.entry(e).or_default().push(i);
                }
            }
        }
        SynthTarget {
            f,
            dom,
            space,
            chosen,
            active,
            pos,
            bad,
        }
    }

    fn verify(&self, s: &PrefStructure, opts: &SynthOptions) -> bool {
        match s.choice_of(self.f.domain()) {
            Err(_) => false,
            Ok(g) => {
                if !g.same_map(self.f) {
                    return false;
                }
                if s.nodes()
                    .iter()
                    .map(|&(e, _)| e)
                    .collect::<BTreeSet<_>>()
                    .iter()
                    .any(|&e| s.copies_of(e) > opts.max_copies)
                {
                    return false;
                }
                let flags = s.structure_flags();
                if opts.require_transitive && !flags.transitive {
                    return false;
                }
                if opts.require_ranked && !(flags.ranked && flags.cycle_free) {
                    return false;
                }
                if opts.require_smooth && !s.is_smooth(self.f.domain()).holds {
                    return false;
                }
                true
            }
        }
    }
}

/// The characterizing conditions reported on unsatisfiability, per kind
/// of requested structure.
fn characterizing_conditions(opts: &SynthOptions) -> Vec<MuProperty> {
    if opts.require_ranked {
        vec![
            MuProperty::MuSub,
            MuProperty::MuEmpty,
            MuProperty::MuEq,
            MuProperty::MuPR,
            MuProperty::MuPar,
            MuProperty::MuCup,
            MuProperty::MuIn,
        ]
    } else if opts.require_smooth {
        vec![MuProperty::MuSub, MuProperty::MuPR, MuProperty::MuCUM]
    } else {
        vec![MuProperty::MuSub, MuProperty::MuPR]
    }
}

fn unsat_report(
    f: &ChoiceFunction,
    opts: &SynthOptions,
    exhausted: bool,
    detail: &str,
) -> Report {
    let mut report = Report::new("synthesis unsatisfiable");
    let mut section = Section {
        title: "characterizing conditions".to_string(),
        items: Vec::new(),
    };
    let mut any_violated = false;
    for p in characterizing_conditions(opts) {
        let v = check_mu_property(f, p);
        any_violated |= !v.holds;
        section.items.push(ReportItem::Verdict(v));
    }
    report.push_section(section);
    if any_violated {
        report.push_note(
            "violated conditions above rule out a representation of the requested kind",
        );
    }
    if exhausted {
        report.push_note(format!(
            "bounded search exhausted (copies ≤ {}, nodes ≤ {})",
            opts.max_copies, opts.node_budget
        ));
    }
    if !detail.is_empty() {
        report.push_note(detail.to_string());
    }
    report
}

/// Synthesizes a preferential structure whose minimal-element choice on
/// `f`'s domain equals `f`, subject to the requested flags and bounds.
///
/// Strategy: a canonical one-node-per-element seed (attacks from each
/// chosen set into its rejected part) is tried first; then a per-element
/// copy construction driven by the sets where the element is chosen or
/// rejected; for ranked requests, a direct layer search; finally a small
/// exhaustive search. Unsatisfiability is reported with the verdicts of
/// the characterizing conditions and, when no condition is violated, the
/// note that the bounded space was exhausted.
pub fn synth_structure(
    f: &ChoiceFunction,
    opts: &SynthOptions,
) -> Result<SynthOutcome, PrefError> {
    let target = SynthTarget::new(f);
    let mut budget_hit: Option<usize> = None;

    if opts.require_ranked {
        return synth_ranked(&target, opts);
    }

    // Fast necessary conditions: any preferential structure's choice
    // satisfies them, so a violation is a definitive no.
    let sub = check_mu_property(f, MuProperty::MuSub);
    let pr = check_mu_property(f, MuProperty::MuPR);
    if !sub.holds || !pr.holds {
        return Ok(SynthOutcome::Unsat(unsat_report(f, opts, false, "")));
    }
    if opts.require_smooth && !check_mu_property(f, MuProperty::MuCUM).holds {
        return Ok(SynthOutcome::Unsat(unsat_report(f, opts, false, "")));
    }

    // Canonical seed: one node per active element, attacks from each
    // chosen set into its rejected part.
    if let Some(seed) = seed_structure(&target) {
        if seed.node_count() <= opts.node_budget && target.verify(&seed, opts) {
            return Ok(SynthOutcome::Structure(seed));
        }
    }

    // Per-element copy construction.
    match class_construction(&target, opts) {
        ClassOutcome::Built(s) => {
            if s.node_count() > opts.node_budget {
                budget_hit = Some(s.node_count());
            } else if target.verify(&s, opts) {
                return Ok(SynthOutcome::Structure(s));
            }
        }
        ClassOutcome::TooManyCopies | ClassOutcome::Infeasible => {}
    }

    // Small exhaustive fallback over one-copy relations.
    if let Some(s) = exhaustive_search(&target, opts) {
        return Ok(SynthOutcome::Structure(s));
    }

    if let Some(required) = budget_hit {
        return Err(PrefError::NodeBudgetExceeded {
            required,
            budget: opts.node_budget,
        });
    }
    Ok(SynthOutcome::Unsat(unsat_report(f, opts, true, "")))
}

/// One node per active element; attacks from every chosen element of a
/// domain set into every rejected element of the same set.
fn seed_structure(target: &SynthTarget) -> Option<PrefStructure> {
    let carrier = target.active.clone();
    let nodes: Vec<(usize, usize)> = carrier.iter().map(|e| (e, 0)).collect();
    let mut attacks = Vec::new();
    for x in &target.dom {
        let fx = &target.f.map()[x];
        for y in fx.iter() {
            for z in x.minus(fx).iter() {
                attacks.push(((y, 0), (z, 0)));
            }
        }
    }
    PrefStructure::new(carrier, nodes, attacks).ok()
}

enum ClassOutcome {
    Built(PrefStructure),
    TooManyCopies,
    Infeasible,
}

/// Partitions each chosen element's positive sets into classes, one node
/// per class, unattacked exactly on its class. For smooth targets the
/// attacker of a class node in a rejecting set `X` is the class node of
/// the least eligible element of `f(X)` (that node is minimal in `X`);
/// otherwise the attacker is the least element of `X` outside the class
/// union, via its first node (adding a self-attacked node for elements
/// never chosen). Transitive targets route all attacks through
/// self-attacked attacker nodes, which keeps chains length one.
fn class_construction(target: &SynthTarget, opts: &SynthOptions) -> ClassOutcome {
    let smooth = opts.require_smooth;
    let empty: Vec<usize> = Vec::new();

    // Choose classes per chosen element.
    let mut classes: BTreeMap<usize, Vec<ModelSet>> = BTreeMap::new();
    for e in target.chosen.iter() {
        let pos = &target.pos[&e];
        let bad = target.bad.get(&e).unwrap_or(&empty);
        let parts = match best_partition(target, e, pos, bad, smooth) {
            None => return ClassOutcome::Infeasible,
            Some(p) => p,
        };
        let max_here = parts.len()
            + if !smooth && opts.require_transitive {
                1 // possible extra self-attacked attacker node
            } else {
                0
            };
        if max_here > opts.max_copies {
            return ClassOutcome::TooManyCopies;
        }
        classes.insert(
            e,
            parts
                .iter()
                .map(|mask| {
                    let mut u = ModelSet::empty(target.space);
                    for (k, &i) in pos.iter().enumerate() {
                        if mask & (1usize << k) != 0 {
                            u = u.union(&target.dom[i]);
                        }
                    }
                    u
                })
                .collect(),
        );
    }

    // Class lookup: for element e chosen in domain set i, which class
    // covers set i.
    let class_of = |e: usize, i: usize| -> Option<usize> {
        classes
            .get(&e)?
            .iter()
            .position(|u| target.dom[i].is_subset(u))
    };

    let mut carrier = target.chosen.clone();
    let mut extra_sink: BTreeSet<usize> = BTreeSet::new();
    let mut attacks: Vec<((usize, usize), (usize, usize))> = Vec::new();

    for e in target.chosen.iter() {
        let bad = target.bad.get(&e).unwrap_or(&empty);
        for (ci, cu) in classes[&e].iter().enumerate() {
            for &bi in bad {
                let x = &target.dom[bi];
                let attacked = (e, ci);
                if smooth {
                    let fx = &target.f.map()[x];
                    let y = match fx.minus(cu).least() {
                        None => return ClassOutcome::Infeasible,
                        Some(y) => y,
                    };
                    let yc = match class_of(y, bi) {
                        None => return ClassOutcome::Infeasible,
                        Some(c) => c,
                    };
                    attacks.push(((y, yc), attacked));
                } else {
                    let z = match x.minus(cu).least() {
                        None => return ClassOutcome::Infeasible,
                        Some(z) => z,
                    };
                    if opts.require_transitive || !target.chosen.contains(z) {
                        // Attack from a self-attacked node of z.
                        let zc = classes.get(&z).map_or(0, |c| c.len());
                        extra_sink.insert(z);
                        carrier.insert(z);
                        attacks.push(((z, zc), (z, zc)));
                        attacks.push(((z, zc), attacked));
                    } else {
                        attacks.push(((z, 0), attacked));
                    }
                }
            }
        }
    }

    let mut nodes: Vec<(usize, usize)> = Vec::new();
    for e in carrier.iter() {
        let k = classes.get(&e).map_or(0, |c| c.len());
        for c in 0..k {
            nodes.push((e, c));
        }
        if extra_sink.contains(&e) {
            nodes.push((e, k));
        }
    }
    for e in extra_sink.iter() {
        if classes.get(e).map_or(0, |c| c.len()) + 1 > opts.max_copies {
            return ClassOutcome::TooManyCopies;
        }
    }

    match PrefStructure::new(carrier, nodes, attacks) {
        Ok(mut s) => {
            if opts.require_transitive {
                s = transitive_closure(&s);
            }
            ClassOutcome::Built(s)
        }
        Err(_) => ClassOutcome::Infeasible,
    }
}

/// Minimal partition of an element's positive-set indices into feasible
/// classes, as bitmasks over `pos`. A class is feasible when every
/// rejecting set keeps an attacker outside the class union (outside
/// entirely for plain targets, inside the rejecting set's chosen part
/// for smooth ones); smooth classes must additionally have their union
/// again among the element's positive sets, which keeps the class node's
/// survival sets aligned with the target.
fn best_partition(
    target: &SynthTarget,
    e: usize,
    pos: &[usize],
    bad: &[usize],
    smooth: bool,
) -> Option<Vec<usize>> {
    let k = pos.len();
    if k == 0 {
        return Some(Vec::new());
    }
    if k > 16 {
        return None;
    }
    let full: usize = (1usize << k) - 1;
    let union_of = |mask: usize| {
        let mut u = ModelSet::empty(target.space);
        for (j, &i) in pos.iter().enumerate() {
            if mask & (1usize << j) != 0 {
                u = u.union(&target.dom[i]);
            }
        }
        u
    };
    let feasible: Vec<bool> = (0..=full)
        .map(|mask| {
            if mask == 0 {
                return false;
            }
            let u = union_of(mask);
            if smooth {
                let u_positive = target
                    .f
                    .get(&u)
                    .map_or(false, |fu| fu.contains(e));
                if !u_positive {
                    return false;
                }
                bad.iter().all(|&bi| {
                    !target.f.map()[&target.dom[bi]].minus(&u).is_empty()
                })
            } else {
                bad.iter().all(|&bi| !target.dom[bi].minus(&u).is_empty())
            }
        })
        .collect();
    // Subset dynamic program for the minimum number of classes, choosing
    // the numerically least class mask at each step for determinism.
    let mut dp: Vec<Option<(usize, usize)>> = vec![None; full + 1]; // (count, chosen mask)
    dp[0] = Some((0, 0));
    for s in 1..=full {
        let low = s & s.wrapping_neg();
        let mut m = s;
        let mut best: Option<(usize, usize)> = None;
        while m > 0 {
            if m & low != 0 && feasible[m] {
                if let Some((c, _)) = dp[s & !m] {
                    let cand = (c + 1, m);
                    if best.map_or(true, |b| cand.0 < b.0 || (cand.0 == b.0 && cand.1 < b.1)) {
                        best = Some(cand);
                    }
                }
            }
            m = (m - 1) & s;
        }
        dp[s] = best;
    }
    dp[full]?;
    let mut parts = Vec::new();
    let mut s = full;
    while s > 0 {
        let (_, m) = dp[s].unwrap();
        parts.push(m);
        s &= !m;
    }
    parts.sort();
    Some(parts)
}

fn transitive_closure(s: &PrefStructure) -> PrefStructure {
    let n = s.nodes.len();
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in &s.attacks {
        adj[a][b] = true;
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
                attacks.push((s.nodes[i], s.nodes[j]));
            }
        }
    }
    PrefStructure::new(s.carrier.clone(), s.nodes.clone(), attacks)
        .expect("closure preserves nodes")
}

/// Exhaustive search over one-copy relations on the active elements,
/// feasible only for very small carriers. Returns the first verifying
/// structure in canonical order.
fn exhaustive_search(target: &SynthTarget, opts: &SynthOptions) -> Option<PrefStructure> {
    let elems: Vec<usize> = target.active.iter().collect();
    let n = elems.len();
    if n == 0 || n > 4 || n > opts.node_budget {
        return None;
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .collect();
    let m = pairs.len();
    for rel in 0u64..(1u64 << m) {
        let attacks: Vec<((usize, usize), (usize, usize))> = (0..m)
            .filter(|&b| rel & (1u64 << b) != 0)
            .map(|b| {
                let (i, j) = pairs[b];
                ((elems[i], 0), (elems[j], 0))
            })
            .collect();
        let carrier = target.active.clone();
        let nodes: Vec<(usize, usize)> = elems.iter().map(|&e| (e, 0)).collect();
        if let Ok(s) = PrefStructure::new(carrier, nodes, attacks) {
            if target.verify(&s, opts) {
                return Some(s);
            }
        }
    }
    None
}

/// Ranked synthesis: searches a layer assignment on elements directly.
/// Copies cannot extend the reach of a modular cycle-free relation (the
/// lowest copy of each element decides membership), so one copy per
/// element suffices whenever anything does.
fn synth_ranked(target: &SynthTarget, opts: &SynthOptions) -> Result<SynthOutcome, PrefError> {
    let f = target.f;
    // Elements chosen nowhere stay out of the carrier; a rejecting set
    // consisting only of such elements must choose nothing.
    for x in &target.dom {
        let fx = &f.map()[x];
        if fx.is_empty() && x.intersects(&target.chosen) {
            return Ok(SynthOutcome::Unsat(unsat_report(
                f,
                opts,
                false,
                &format!(
                    "choosing nothing from {} while its members are chosen elsewhere would need an infinite descending chain, beyond any finite layered structure",
                    x
                ),
            )));
        }
        if !fx.is_subset(x) {
            return Ok(SynthOutcome::Unsat(unsat_report(f, opts, false, "")));
        }
    }

    // Same-layer classes: all elements chosen together share a layer.
    let elems: Vec<usize> = target.chosen.iter().collect();
    if elems.len() > opts.node_budget {
        return Err(PrefError::NodeBudgetExceeded {
            required: elems.len(),
            budget: opts.node_budget,
        });
    }
    let idx: BTreeMap<usize, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut parent: Vec<usize> = (0..elems.len()).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for x in &target.dom {
        let fx = &f.map()[x];
        let mut first: Option<usize> = None;
        for e in fx.iter() {
            let i = idx[&e];
            match first {
                None => first = Some(i),
                Some(j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
    }
    // Strict constraints between classes: chosen below rejected-chosen.
    let mut strict: BTreeSet<(usize, usize)> = BTreeSet::new();
    for x in &target.dom {
        let fx = &f.map()[x];
        for e in fx.iter() {
            for r in x.minus(fx).iter() {
                if target.chosen.contains(r) {
                    let a = find(&mut parent, idx[&e]);
                    let b = find(&mut parent, idx[&r]);
                    strict.insert((a, b));
                }
            }
        }
    }
    for &(a, b) in &strict {
        if a == b {
            return Ok(SynthOutcome::Unsat(unsat_report(
                f,
                opts,
                false,
                "an element is forced both strictly below and level with another",
            )));
        }
    }
    // Cycle detection over class constraints.
    let classes: BTreeSet<usize> = (0..elems.len())
        .map(|i| find(&mut parent, i))
        .collect();
    let mut layer: BTreeMap<usize, usize> = classes.iter().map(|&c| (c, 0)).collect();
    let mut iterations = 0usize;
    let bound = classes.len() * classes.len() + 1;
    let mut changed = true;
    while changed {
        changed = false;
        iterations += 1;
        if iterations > bound {
            return Ok(SynthOutcome::Unsat(unsat_report(
                f,
                opts,
                false,
                "the strict below-ness constraints contain a cycle",
            )));
        }
        for &(a, b) in &strict {
            if layer[&b] < layer[&a] + 1 {
                *layer.get_mut(&b).unwrap() = layer[&a] + 1;
                changed = true;
            }
        }
    }

    let carrier = target.chosen.clone();
    let nodes: Vec<(usize, usize)> = elems.iter().map(|&e| (e, 0)).collect();
    let mut attacks = Vec::new();
    for &a in &elems {
        for &b in &elems {
            let la = layer[&find(&mut parent, idx[&a])];
            let lb = layer[&find(&mut parent, idx[&b])];
            if la < lb {
                attacks.push(((a, 0), (b, 0)));
            }
        }
    }
    let s = PrefStructure::new(carrier, nodes, attacks)?;
    if target.verify(&s, opts) {
        Ok(SynthOutcome::Structure(s))
    } else {
        Ok(SynthOutcome::Unsat(unsat_report(
            f,
            opts,
            true,
            "the forced layer assignment does not reproduce the target",
        )))
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::enumerate_choice_functions;

    fn set(space: usize, members: &[usize]) -> ModelSet {
        ModelSet::from_indices(space, members).unwrap()
    }

    #[test]
    fn mu_with_single_attack() {
        let carrier = set(4, &[0, 1]);
        let s = PrefStructure::new(
            carrier,
            vec![(0, 0), (1, 0)],
            vec![((0, 0), (1, 0))],
        )
        .unwrap();
        assert_eq!(s.mu_of(&set(4, &[0, 1])).members(), vec![0]);
        assert_eq!(s.mu_of(&set(4, &[1])).members(), vec![1]);
        assert_eq!(s.mu_of(&set(4, &[0])).members(), vec![0]);
    }

    #[test]
    fn mu_with_copies_needs_both_killers() {
        // Element 3 has two copies; element 2 kills one, element 0 the
        // other. Both killers present → 3 excluded; one absent → 3 kept.
        let carrier = set(4, &[0, 2, 3]);
        let s = PrefStructure::new(
            carrier,
            vec![(0, 0), (2, 0), (3, 0), (3, 1)],
            vec![((2, 0), (3, 0)), ((0, 0), (3, 1))],
        )
        .unwrap();
        assert_eq!(s.mu_of(&set(4, &[0, 2, 3])).members(), vec![0, 2]);
        assert_eq!(s.mu_of(&set(4, &[2, 3])).members(), vec![2, 3]);
    }

    #[test]
    fn empty_attacks_are_identity() {
        let carrier = set(4, &[0, 1, 2]);
        let s = PrefStructure::new(
            carrier.clone(),
            vec![(0, 0), (1, 0), (2, 0)],
            vec![],
        )
        .unwrap();
        for x in DomainFamily::powerset_of(&carrier, false).sets() {
            assert_eq!(&s.mu_of(x), x);
        }
    }

    #[test]
    fn carrier_and_copy_validation() {
        let carrier = set(4, &[0]);
        assert_eq!(
            PrefStructure::new(carrier.clone(), vec![(1, 0)], vec![]),
            Err(PrefError::NodeOutsideCarrier(1))
        );
        assert_eq!(
            PrefStructure::new(set(4, &[0, 1]), vec![(0, 0)], vec![]),
            Err(PrefError::CarrierElementWithoutNode(1))
        );
        assert_eq!(
            PrefStructure::new(carrier.clone(), vec![(0, 1)], vec![]),
            Err(PrefError::CopyIndicesNotContiguous(0))
        );
        assert_eq!(
            PrefStructure::new(carrier, vec![(0, 0)], vec![((0, 0), (0, 1))]),
            Err(PrefError::UnknownAttackNode(0, 1))
        );
    }

    #[test]
    fn flags_on_chain_and_cycle() {
        let carrier = set(4, &[0, 1, 2]);
        let nodes = vec![(0, 0), (1, 0), (2, 0)];
        // Full chain with shortcut: transitive, modular, cycle-free.
        let s = PrefStructure::new(
            carrier.clone(),
            nodes.clone(),
            vec![((0, 0), (1, 0)), ((1, 0), (2, 0)), ((0, 0), (2, 0))],
        )
        .unwrap();
        let fl = s.structure_flags();
        assert!(fl.irreflexive && fl.transitive && fl.cycle_free && fl.ranked);
        let layers = s.rank_layers().unwrap();
        assert!(layers.realizes(&s));
        assert_eq!(layers.layer[&(0, 0)], 0);
        assert_eq!(layers.layer[&(2, 0)], 2);

        // Chain without shortcut: not transitive, not modular.
        let s = PrefStructure::new(
            carrier.clone(),
            nodes.clone(),
            vec![((0, 0), (1, 0)), ((1, 0), (2, 0))],
        )
        .unwrap();
        let fl = s.structure_flags();
        assert!(!fl.transitive && !fl.ranked && fl.cycle_free);
        assert!(matches!(s.rank_layers(), Err(PrefError::NotModular { .. })));

        // Two-cycle: modular but cyclic.
        let s = PrefStructure::new(
            set(4, &[0, 1]),
            vec![(0, 0), (1, 0)],
            vec![((0, 0), (1, 0)), ((1, 0), (0, 0))],
        )
        .unwrap();
        let fl = s.structure_flags();
        assert!(fl.ranked && !fl.cycle_free && fl.irreflexive);
        assert!(matches!(s.rank_layers(), Err(PrefError::HasCycle(_))));
    }

    #[test]
    fn layers_quotient_incomparable_elements() {
        let carrier = set(4, &[0, 1, 2]);
        let s = PrefStructure::new(
            carrier,
            vec![(0, 0), (1, 0), (2, 0)],
            vec![((0, 0), (1, 0)), ((0, 0), (2, 0))],
        )
        .unwrap();
        let layers = s.rank_layers().unwrap();
        assert_eq!(layers.layer[&(0, 0)], 0);
        assert_eq!(layers.layer[&(1, 0)], 1);
        assert_eq!(layers.layer[&(2, 0)], 1);
    }

    #[test]
    fn smoothness_detects_unfounded_chains() {
        // Two-cycle on {0,1}: neither node minimal in {0,1}, no minimal
        // attacker → not smooth there.
        let s = PrefStructure::new(
            set(4, &[0, 1]),
            vec![(0, 0), (1, 0)],
            vec![((0, 0), (1, 0)), ((1, 0), (0, 0))],
        )
        .unwrap();
        let dom = DomainFamily::powerset_of(&set(4, &[0, 1]), false);
        let v = s.is_smooth(&dom);
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.slots[0].1, WitnessValue::Set(vec![0, 1]));
        assert_eq!(w.slots[1].1, WitnessValue::Node(0, 0));

        // Cycle-free structures over full domains are smooth.
        let s = PrefStructure::new(
            set(4, &[0, 1, 2]),
            vec![(0, 0), (1, 0), (2, 0)],
            vec![((0, 0), (1, 0)), ((1, 0), (2, 0)), ((0, 0), (2, 0))],
        )
        .unwrap();
        let dom = DomainFamily::powerset_of(&set(4, &[0, 1, 2]), false);
        assert!(s.is_smooth(&dom).holds);
    }

    #[test]
    fn choice_of_satisfies_sound_conditions() {
        let s = PrefStructure::new(
            set(4, &[0, 1, 2]),
            vec![(0, 0), (1, 0), (2, 0), (2, 1)],
            vec![((0, 0), (1, 0)), ((1, 0), (2, 0)), ((0, 0), (2, 1))],
        )
        .unwrap();
        let dom = DomainFamily::powerset_of(&set(4, &[0, 1, 2]), false);
        let f = s.choice_of(&dom).unwrap();
        assert!(check_mu_property(&f, MuProperty::MuSub).holds);
        assert!(check_mu_property(&f, MuProperty::MuPR).holds);
    }

    #[test]
    fn synth_identity_needs_no_attacks() {
        let u = set(4, &[0, 1, 2]);
        let dom = DomainFamily::powerset_of(&u, false);
        let f = ChoiceFunction::identity_on(u, dom).unwrap();
        match synth_structure(&f, &SynthOptions::default()).unwrap() {
            SynthOutcome::Structure(s) => {
                assert!(s.attack_pairs().is_empty());
                assert!(target_matches(&s, &f));
            }
            SynthOutcome::Unsat(_) => panic!("identity must be representable"),
        }
    }

    fn target_matches(s: &PrefStructure, f: &ChoiceFunction) -> bool {
        s.choice_of(f.domain()).unwrap().same_map(f)
    }

    #[test]
    fn synth_unsat_when_containment_fails() {
        // f({0}) = {1} violates containment: definitively unrepresentable.
        let space = 4;
        let x = set(space, &[0]);
        let dom = DomainFamily::new(space, vec![x.clone()]).unwrap();
        let mut map = BTreeMap::new();
        map.insert(x, set(space, &[1]));
        let f = ChoiceFunction::new(set(space, &[0, 1]), dom, map).unwrap();
        match synth_structure(&f, &SynthOptions::default()).unwrap() {
            SynthOutcome::Unsat(report) => {
                let v = report.verdict("mu_sub").unwrap();
                assert!(!v.holds);
            }
            SynthOutcome::Structure(_) => panic!("containment violation must be unsat"),
        }
    }

    /// The two-copy shape: an element chosen in two sets but not their
    /// union cannot be represented with one copy.
    #[test]
    fn synth_handles_two_copy_targets() {
        let space = 4;
        let u = set(space, &[0, 2, 3]);
        let dom = DomainFamily::powerset_of(&u, false);
        let map = dom
            .sets()
            .iter()
            .map(|x| {
                let fx = if x.members() == vec![0, 2, 3] {
                    set(space, &[0, 2])
                } else {
                    x.clone()
                };
                (x.clone(), fx)
            })
            .collect();
        let f = ChoiceFunction::new(u, dom, map).unwrap();
        let opts = SynthOptions {
            require_smooth: true,
            ..SynthOptions::default()
        };
        match synth_structure(&f, &opts).unwrap() {
            SynthOutcome::Structure(s) => {
                assert!(target_matches(&s, &f));
                assert!(s.is_smooth(f.domain()).holds);
                assert_eq!(s.copies_of(3), 2);
            }
            SynthOutcome::Unsat(r) => panic!("should be representable: {}", r.to_markdown()),
        }
    }

    #[test]
    fn ranked_synthesis_and_its_limits() {
        let space = 4;
        // A layered target: 0 below 1 below 2.
        let u = set(space, &[0, 1, 2]);
        let dom = DomainFamily::powerset_of(&u, false);
        let map = dom
            .sets()
            .iter()
            .map(|x| (x.clone(), ModelSet::singleton(space, x.least().unwrap())))
            .collect();
        let f = ChoiceFunction::new(u.clone(), dom.clone(), map).unwrap();
        let opts = SynthOptions {
            require_ranked: true,
            ..SynthOptions::default()
        };
        match synth_structure(&f, &opts).unwrap() {
            SynthOutcome::Structure(s) => {
                assert!(target_matches(&s, &f));
                let fl = s.structure_flags();
                assert!(fl.ranked && fl.cycle_free && fl.transitive);
                assert!(s.is_smooth(f.domain()).holds);
            }
            SynthOutcome::Unsat(r) => panic!("layered target: {}", r.to_markdown()),
        }

        // Choosing nothing from {0,1} while keeping both singletons is
        // out of reach for layers at any copy count, but reachable by a
        // plain structure (a two-cycle).
        let u = set(space, &[0, 1]);
        let dom = DomainFamily::powerset_of(&u, false);
        let mut map = BTreeMap::new();
        map.insert(set(space, &[0]), set(space, &[0]));
        map.insert(set(space, &[1]), set(space, &[1]));
        map.insert(set(space, &[0, 1]), ModelSet::empty(space));
        let f = ChoiceFunction::new(u, dom, map).unwrap();
        for max_copies in [1, 2, 3] {
            let opts = SynthOptions {
                require_ranked: true,
                max_copies,
                ..SynthOptions::default()
            };
            match synth_structure(&f, &opts).unwrap() {
                SynthOutcome::Unsat(report) => {
                    assert!(!report.verdict("mu_empty").unwrap().holds);
                    assert!(!report.verdict("mu_par").unwrap().holds);
                }
                SynthOutcome::Structure(_) => panic!("layers cannot empty a set"),
            }
        }
        let plain = SynthOptions::default();
        match synth_structure(&f, &plain).unwrap() {
            SynthOutcome::Structure(s) => {
                assert!(target_matches(&s, &f));
                assert!(!s.structure_flags().cycle_free);
            }
            SynthOutcome::Unsat(r) => panic!("two-cycle target: {}", r.to_markdown()),
        }
    }

    #[test]
    fn node_budget_is_a_distinct_error() {
        let u = set(4, &[0, 1, 2]);
        let dom = DomainFamily::powerset_of(&u, false);
        let f = ChoiceFunction::identity_on(u, dom).unwrap();
        let opts = SynthOptions {
            node_budget: 1,
            ..SynthOptions::default()
        };
        assert!(matches!(
            synth_structure(&f, &opts),
            Err(PrefError::NodeBudgetExceeded { .. })
        ));
    }

    /// Every function on the small enumeration satisfying the sound
    /// conditions is synthesizable with defaults, and the result matches.
    #[test]
    fn synthesis_covers_small_enumeration() {
        let u = set(2, &[0, 1]);
        let dom = DomainFamily::powerset_of(&u, false);
        for f in enumerate_choice_functions(&u, &dom, None).unwrap() {
            let sub = check_mu_property(&f, MuProperty::MuSub).holds;
            let pr = check_mu_property(&f, MuProperty::MuPR).holds;
            let outcome = synth_structure(&f, &SynthOptions::default()).unwrap();
            match outcome {
                SynthOutcome::Structure(s) => {
                    assert!(sub && pr, "sound conditions must hold when a structure exists");
                    assert!(target_matches(&s, &f));
                }
                SynthOutcome::Unsat(_) => {
                    assert!(!(sub && pr), "qualifying functions must be representable");
                }
            }
        }
    }
}
