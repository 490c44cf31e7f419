//! Pseudo-distances on a finite universe and the revision machinery
//! they induce: the collective and individual closest-point operators,
//! neighborhoods, the success/consistency/loop conditions on observed
//! operator tables, and recovery of a representing distance from a
//! table by constraint search.

use crate::agm::{full_family, RevisionOperator};
use crate::logic::{DomainFamily, ModelSet, Vocabulary};
use crate::report::{PropertyVerdict, Report, Witness, WitnessValue};
use std::collections::BTreeMap;
use thiserror::Error;

/// Default node budget for distance recovery (completed witness
/// assignments explored before giving up).
pub const DEFAULT_DIST_BUDGET: u64 = 500_000;

/// Errors raised by the distance layer.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistanceError {
    #[error("ambient space mismatch")]
    SpaceMismatch,
    #[error("distance table misses the pair ({0}, {1})")]
    MissingPair(usize, usize),
    #[error("pair ({0}, {1}) lies outside the universe")]
    PairOutsideUniverse(usize, usize),
    #[error("declared symmetric but d({0},{1}) ≠ d({1},{0})")]
    NotSymmetric(usize, usize),
    #[error("declared identity-respecting but the zero pattern is wrong at ({0}, {1})")]
    IdentityViolation(usize, usize),
    #[error("operand is empty")]
    EmptyOperand,
    #[error("the empty set cannot belong to an operator family")]
    EmptyFamilySet,
    #[error("operator table misses the family pair ({0}, {1})")]
    MissingEntry(String, String),
    #[error("operator entry ({0}, {1}) has a key outside the family")]
    ForeignEntry(String, String),
    #[error("operator value at ({0}, {1}) is not a subset of the second operand")]
    ValueOutsideOperand(String, String),
    #[error("search budget exceeded after {explored} nodes (budget {budget})")]
    BudgetExceeded { explored: u64, budget: u64 },
}

/// A pseudo-distance: a total map from ordered element pairs to natural
/// ranks. Only the order of ranks matters. The `symmetric` and
/// `respects_identity` flags are verified at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoDistance {
    space: usize,
    values: Vec<u64>,
    symmetric: bool,
    respects_identity: bool,
}

impl PseudoDistance {
    /// Builds a distance from explicit pair ranks. When `symmetric` is
    /// set, a missing mirror pair inherits the given direction's rank;
    /// both directions present must then agree. When
    /// `respects_identity` is set, missing identity pairs default to 0.
    pub fn new(
        space: usize,
        pairs: &BTreeMap<(usize, usize), u64>,
        symmetric: bool,
        respects_identity: bool,
    ) -> Result<Self, DistanceError> {
        let mut values: Vec<Option<u64>> = vec![None; space * space];
        for (&(u, v), &rank) in pairs {
            if u >= space || v >= space {
                return Err(DistanceError::PairOutsideUniverse(u, v));
            }
            values[u * space + v] = Some(rank);
        }
        if symmetric {
            for u in 0..space {
                for v in 0..space {
                    if values[u * space + v].is_none() {
                        values[u * space + v] = values[v * space + u];
                    }
                }
            }
        }
        if respects_identity {
            for u in 0..space {
                values[u * space + u].get_or_insert(0);
            }
        }
        let mut filled = Vec::with_capacity(space * space);
        for u in 0..space {
            for v in 0..space {
                match values[u * space + v] {
                    Some(r) => filled.push(r),
                    None => return Err(DistanceError::MissingPair(u, v)),
                }
            }
        }
        let d = PseudoDistance {
            space,
            values: filled,
            symmetric,
            respects_identity,
        };
        if symmetric {
            for u in 0..space {
                for v in (u + 1)..space {
                    if d.rank(u, v) != d.rank(v, u) {
                        return Err(DistanceError::NotSymmetric(u, v));
                    }
                }
            }
        }
        if respects_identity {
            for u in 0..space {
                if d.rank(u, u) != 0 {
                    return Err(DistanceError::IdentityViolation(u, u));
                }
                for v in 0..space {
                    if u != v && d.rank(u, v) == 0 {
                        return Err(DistanceError::IdentityViolation(u, v));
                    }
                }
            }
        }
        Ok(d)
    }

    pub fn space(&self) -> usize {
        self.space
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn respects_identity(&self) -> bool {
        self.respects_identity
    }

    /// The rank of the ordered pair `(u, v)`.
    pub fn rank(&self, u: usize, v: usize) -> u64 {
        self.values[u * self.space + v]
    }

    /// All pair ranks, row-major.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        (0..self.space).flat_map(move |u| {
            (0..self.space).map(move |v| ((u, v), self.rank(u, v)))
        })
    }

    /// `d(X, Y)`: the least rank over `X × Y`.
    pub fn set_rank(&self, x: &ModelSet, y: &ModelSet) -> Result<u64, DistanceError> {
        if x.is_empty() || y.is_empty() {
            return Err(DistanceError::EmptyOperand);
        }
        Ok(x.iter()
            .flat_map(|u| y.iter().map(move |v| self.rank(u, v)))
            .min()
            .expect("nonempty operands"))
    }
}

/// `X|Y`: the members of `Y` realizing the least rank over `X × Y`.
pub fn collective_rev(
    d: &PseudoDistance,
    x: &ModelSet,
    y: &ModelSet,
) -> Result<ModelSet, DistanceError> {
    if x.space() != d.space() || y.space() != d.space() {
        return Err(DistanceError::SpaceMismatch);
    }
    let best = d.set_rank(x, y)?;
    let mut out = ModelSet::empty(d.space());
    for v in y.iter() {
        if x.iter().any(|u| d.rank(u, v) == best) {
            out.insert(v);
        }
    }
    Ok(out)
}

/// `X↑Y`: the union over `x ∈ X` of the members of `Y` closest to that
/// particular `x`.
pub fn individual_rev(
    d: &PseudoDistance,
    x: &ModelSet,
    y: &ModelSet,
) -> Result<ModelSet, DistanceError> {
    if x.space() != d.space() || y.space() != d.space() {
        return Err(DistanceError::SpaceMismatch);
    }
    if x.is_empty() || y.is_empty() {
        return Err(DistanceError::EmptyOperand);
    }
    let mut out = ModelSet::empty(d.space());
    for u in x.iter() {
        let best = y.iter().map(|v| d.rank(u, v)).min().expect("nonempty");
        for v in y.iter() {
            if d.rank(u, v) == best {
                out.insert(v);
            }
        }
    }
    Ok(out)
}

/// `U_Y(X)`: every universe element within distance `d(X, Y)` of `X`.
pub fn neighborhood(
    d: &PseudoDistance,
    x: &ModelSet,
    y: &ModelSet,
) -> Result<ModelSet, DistanceError> {
    if x.space() != d.space() || y.space() != d.space() {
        return Err(DistanceError::SpaceMismatch);
    }
    let bound = d.set_rank(x, y)?;
    let mut out = ModelSet::empty(d.space());
    for z in 0..d.space() {
        let dz = x.iter().map(|u| d.rank(u, z)).min().expect("nonempty");
        if dz <= bound {
            out.insert(z);
        }
    }
    Ok(out)
}

/// The Hamming distance on the model space of a vocabulary: the rank of
/// a model pair is the number of atoms on which the models differ.
pub fn hamming(vocab: &Vocabulary) -> PseudoDistance {
    let space = 1usize << vocab.len();
    let mut pairs = BTreeMap::new();
    for u in 0..space {
        for v in 0..space {
            pairs.insert((u, v), (u ^ v).count_ones() as u64);
        }
    }
    PseudoDistance::new(space, &pairs, true, true).expect("hamming is symmetric and zero-diagonal")
}

/// An observed binary operator table `(X, Y) ↦ X|Y ⊆ Y` over a family
/// of nonempty sets. The table may be partial (a constraint set).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryOperator {
    family: DomainFamily,
    map: BTreeMap<(ModelSet, ModelSet), ModelSet>,
}

impl BinaryOperator {
    /// A total table: every family pair must be present.
    pub fn new(
        family: DomainFamily,
        map: BTreeMap<(ModelSet, ModelSet), ModelSet>,
    ) -> Result<Self, DistanceError> {
        let op = BinaryOperator::partial(family, map)?;
        for a in op.family.sets() {
            for b in op.family.sets() {
                if !op.map.contains_key(&(a.clone(), b.clone())) {
                    return Err(DistanceError::MissingEntry(a.to_string(), b.to_string()));
                }
            }
        }
        Ok(op)
    }

    /// A partial table: keys must lie in the family, values inside the
    /// second operand; missing pairs are simply unobserved.
    pub fn partial(
        family: DomainFamily,
        map: BTreeMap<(ModelSet, ModelSet), ModelSet>,
    ) -> Result<Self, DistanceError> {
        if family.sets().iter().any(|s| s.is_empty()) {
            return Err(DistanceError::EmptyFamilySet);
        }
        for ((a, b), v) in &map {
            if !family.contains(a) || !family.contains(b) {
                return Err(DistanceError::ForeignEntry(a.to_string(), b.to_string()));
            }
            if !v.is_subset(b) {
                return Err(DistanceError::ValueOutsideOperand(
                    a.to_string(),
                    b.to_string(),
                ));
            }
        }
        Ok(BinaryOperator { family, map })
    }

    pub fn family(&self) -> &DomainFamily {
        &self.family
    }

    pub fn map(&self) -> &BTreeMap<(ModelSet, ModelSet), ModelSet> {
        &self.map
    }

    pub fn get(&self, x: &ModelSet, y: &ModelSet) -> Option<&ModelSet> {
        self.map.get(&(x.clone(), y.clone()))
    }

    pub fn is_total(&self) -> bool {
        self.map.len() == self.family.sets().len() * self.family.sets().len()
    }

    /// Extensional equality of the tables.
    pub fn same_table(&self, other: &BinaryOperator) -> bool {
        self.map == other.map
    }
}

/// The collective operator table of a distance over every pair of a
/// family of nonempty sets.
pub fn induced_operator(
    d: &PseudoDistance,
    family: &DomainFamily,
) -> Result<BinaryOperator, DistanceError> {
    let mut map = BTreeMap::new();
    for x in family.sets() {
        for y in family.sets() {
            map.insert((x.clone(), y.clone()), collective_rev(d, x, y)?);
        }
    }
    BinaryOperator::new(family.clone(), map)
}

/// The individual operator table of a distance over a family.
pub fn induced_individual_operator(
    d: &PseudoDistance,
    family: &DomainFamily,
) -> Result<BinaryOperator, DistanceError> {
    let mut map = BTreeMap::new();
    for x in family.sets() {
        for y in family.sets() {
            map.insert((x.clone(), y.clone()), individual_rev(d, x, y)?);
        }
    }
    BinaryOperator::new(family.clone(), map)
}

/// The one-place revision operator a distance gives a fixed base set:
/// `X|A` by the collective reading for nonempty `A`, with `X|∅ := ∅` as
/// the bridge convention for the full family.
pub fn induced_revision(
    d: &PseudoDistance,
    base: &ModelSet,
) -> Result<RevisionOperator, DistanceError> {
    if base.space() != d.space() {
        return Err(DistanceError::SpaceMismatch);
    }
    if base.is_empty() {
        return Err(DistanceError::EmptyOperand);
    }
    let family = full_family(d.space());
    let mut map = BTreeMap::new();
    for a in family.sets() {
        let value = if a.is_empty() {
            ModelSet::empty(d.space())
        } else {
            collective_rev(d, base, a)?
        };
        map.insert(a.clone(), value);
    }
    Ok(RevisionOperator::new(base.clone(), family, map).expect("family-aligned table"))
}

const ENTRY_ABSENT: u8 = 2;

/// Premise tensor: `premise(left, mid, right)` states that revising
/// `mid` by `left ∪ right` keeps a foothold in `left` — the observable
/// trace of "`mid` is at most as far from `left` as from `right`".
struct PremiseTable {
    m: usize,
    cells: Vec<u8>,
}

impl PremiseTable {
    fn build(op: &BinaryOperator) -> PremiseTable {
        let sets = op.family().sets();
        let m = sets.len();
        let mut index: BTreeMap<&ModelSet, usize> = BTreeMap::new();
        for (i, s) in sets.iter().enumerate() {
            index.insert(s, i);
        }
        let mut union_of = vec![usize::MAX; m * m];
        for i in 0..m {
            for k in 0..m {
                let u = sets[i].union(&sets[k]);
                if let Some(&w) = index.get(&u) {
                    union_of[i * m + k] = w;
                }
            }
        }
        let mut cells = vec![ENTRY_ABSENT; m * m * m];
        for left in 0..m {
            for mid in 0..m {
                for right in 0..m {
                    let w = union_of[left * m + right];
                    if w == usize::MAX {
                        continue;
                    }
                    if let Some(v) = op.get(&sets[mid], &sets[w]) {
                        cells[(left * m + mid) * m + right] =
                            u8::from(v.intersects(&sets[left]));
                    }
                }
            }
        }
        PremiseTable { m, cells }
    }

    fn get(&self, left: usize, mid: usize, right: usize) -> u8 {
        self.cells[(left * self.m + mid) * self.m + right]
    }
}

/// Checks the operator conditions: containment in the second operand,
/// agreement with the intersection when consistent, and the loop
/// condition over all chains of length at most `k_max`.
pub fn check_operator(op: &BinaryOperator, k_max: usize) -> Report {
    let mut report = Report::new("distance operator conditions");
    let sets = op.family().sets();
    let m = sets.len();

    let mut succ = PropertyVerdict::pass("succ", 0, 0);
    let mut con = PropertyVerdict::pass("con", 0, 0);
    for ((x, y), v) in op.map() {
        succ.checked += 1;
        if !v.is_subset(y) && succ.holds {
            succ.holds = false;
            succ.witness = Some(
                Witness::new()
                    .with("X", WitnessValue::Set(x.members()))
                    .with("Y", WitnessValue::Set(y.members()))
                    .with("X|Y", WitnessValue::Set(v.members())),
            );
        }
        let xy = x.inter(y);
        if xy.is_empty() {
            con.checked += 1;
        } else {
            con.checked += 1;
            if v != &xy && con.holds {
                con.holds = false;
                con.witness = Some(
                    Witness::new()
                        .with("X", WitnessValue::Set(x.members()))
                        .with("Y", WitnessValue::Set(y.members()))
                        .with("X|Y", WitnessValue::Set(v.members())),
                );
            }
        }
    }
    report.push_verdict(succ);
    report.push_verdict(con);

    // Loop condition. A chain X0..Xk (k ≥ 2) is a walk in the graph
    // whose nodes are ordered set pairs and whose edge (P,Q) → (Q,R)
    // asserts the premise above; the chain's premises form a walk from
    // (X0,X1) to (Xk,X0), and the conclusion demands the premise
    // (X1 revised-towards X1∪Xk from X0), i.e. the edge (X1,X0) → (X0,Xk).
    let table = PremiseTable::build(op);
    let mut loop_v = PropertyVerdict::pass("loop", 0, 0);
    let mut depth = vec![usize::MAX; m * m];
    let mut parent = vec![usize::MAX; m * m];
    for x0 in 0..m {
        for x1 in 0..m {
            let start = x0 * m + x1;
            depth.iter_mut().for_each(|d| *d = usize::MAX);
            parent.iter_mut().for_each(|p| *p = usize::MAX);
            depth[start] = 0;
            let mut frontier = vec![start];
            for step in 1..=k_max {
                let mut next = Vec::new();
                for &node in &frontier {
                    let (p, q) = (node / m, node % m);
                    for r in 0..m {
                        if table.get(p, q, r) != 1 {
                            continue;
                        }
                        let succ_node = q * m + r;
                        if depth[succ_node] == usize::MAX {
                            depth[succ_node] = step;
                            parent[succ_node] = node;
                            next.push(succ_node);
                        }
                    }
                }
                frontier = next;
                if frontier.is_empty() {
                    break;
                }
            }
            for xk in 0..m {
                let end = xk * m + x0;
                let k = depth[end];
                if k == usize::MAX || k < 2 {
                    continue;
                }
                match table.get(x1, x0, xk) {
                    ENTRY_ABSENT => loop_v.skipped += 1,
                    1 => loop_v.checked += 1,
                    _ => {
                        loop_v.checked += 1;
                        if loop_v.holds {
                            loop_v.holds = false;
                            let mut chain = Vec::new();
                            let mut node = end;
                            loop {
                                chain.push(node % m);
                                if node == start {
                                    break;
                                }
                                node = parent[node];
                            }
                            chain.push(x0);
                            chain.reverse();
                            // The walk spells X0, X1, ..., Xk, X0.
                            let mut w = Witness::new();
                            for (i, &s) in chain.iter().enumerate() {
                                let name = if i + 1 == chain.len() {
                                    "X0 (closing)".to_string()
                                } else {
                                    format!("X{i}")
                                };
                                w = w.with(&name, WitnessValue::Set(sets[s].members()));
                            }
                            loop_v.witness = Some(w.with(
                                "conclusion",
                                WitnessValue::Text(
                                    "revising X0 by Xk∪X1 loses X1 despite the chain".to_string(),
                                ),
                            ));
                        }
                    }
                }
            }
        }
    }
    report.push_verdict(loop_v);
    report
}

/// Which closest-point reading an observed table is meant under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Collective,
    Individual,
}

/// Options for distance recovery.
#[derive(Debug, Clone)]
pub struct DistOptions {
    pub symmetric: bool,
    pub respects_identity: bool,
    pub semantics: Semantics,
    pub budget: u64,
}

impl Default for DistOptions {
    fn default() -> Self {
        DistOptions {
            symmetric: true,
            respects_identity: true,
            semantics: Semantics::Collective,
            budget: DEFAULT_DIST_BUDGET,
        }
    }
}

/// Outcome of distance recovery.
#[derive(Debug, Clone)]
pub enum DistOutcome {
    Distance(PseudoDistance),
    Unsat(Report),
}

/// Constraint graph over pair variables: 0 = no edge, 1 = ≤, 2 = <.
#[derive(Clone)]
struct OrderState {
    n: usize,
    edge: Vec<u8>,
}

impl OrderState {
    fn new(n: usize) -> Self {
        OrderState {
            n,
            edge: vec![0; n * n],
        }
    }

    fn add(&mut self, a: usize, b: usize, strict: bool) {
        let cell = &mut self.edge[a * self.n + b];
        *cell = (*cell).max(if strict { 2 } else { 1 });
    }

    /// Reachability closure carrying maximal strictness; inconsistent
    /// iff some variable strictly reaches itself.
    fn closure(&self) -> Vec<u8> {
        let n = self.n;
        let mut reach = self.edge.clone();
        for k in 0..n {
            for i in 0..n {
                if reach[i * n + k] == 0 {
                    continue;
                }
                for j in 0..n {
                    if reach[k * n + j] == 0 {
                        continue;
                    }
                    let through = reach[i * n + k].max(reach[k * n + j]);
                    if through > reach[i * n + j] {
                        reach[i * n + j] = through;
                    }
                }
            }
        }
        reach
    }

    fn consistent(&self) -> bool {
        let reach = self.closure();
        (0..self.n).all(|i| reach[i * self.n + i] != 2)
    }

    /// A strict cycle through some variable, as the list of variables
    /// visited (first = last).
    fn strict_cycle(&self) -> Option<Vec<usize>> {
        let n = self.n;
        let reach = self.closure();
        let seed = (0..n).find(|&i| reach[i * n + i] == 2)?;
        // Breadth-first search from seed back to seed requiring at
        // least one strict edge on the way.
        let mut best: Option<Vec<usize>> = None;
        let mut queue: Vec<(usize, bool, Vec<usize>)> = vec![(seed, false, vec![seed])];
        let mut seen = std::collections::BTreeSet::new();
        while let Some((at, strict_seen, path)) = queue.pop() {
            for next in 0..n {
                let e = self.edge[at * n + next];
                if e == 0 {
                    continue;
                }
                let s = strict_seen || e == 2;
                if next == seed {
                    if s {
                        let mut cycle = path.clone();
                        cycle.push(seed);
                        match &best {
                            Some(b) if b.len() <= cycle.len() => {}
                            _ => best = Some(cycle),
                        }
                    }
                    continue;
                }
                if path.len() < n && seen.insert((at, next, s)) {
                    let mut p = path.clone();
                    p.push(next);
                    queue.push((next, s, p));
                }
            }
        }
        best
    }
}

struct VarSpace {
    /// Index per canonical ordered pair; identity pairs share one
    /// variable when identity is respected.
    index: BTreeMap<(usize, usize), usize>,
    names: Vec<String>,
    zero: Option<usize>,
}

impl VarSpace {
    fn build(space: usize, symmetric: bool, respects_identity: bool) -> VarSpace {
        let mut index = BTreeMap::new();
        let mut names = Vec::new();
        let mut zero = None;
        if respects_identity {
            zero = Some(0);
            names.push("d(u,u)".to_string());
            for u in 0..space {
                index.insert((u, u), 0);
            }
        }
        for u in 0..space {
            for v in 0..space {
                let key = if symmetric && v < u { (v, u) } else { (u, v) };
                if let Some(&existing) = index.get(&key) {
                    index.entry((u, v)).or_insert(existing);
                    continue;
                }
                let id = names.len();
                names.push(format!("d({},{})", key.0, key.1));
                index.insert(key, id);
                index.insert((u, v), id);
            }
        }
        VarSpace { index, names, zero }
    }

    fn var(&self, u: usize, v: usize) -> usize {
        self.index[&(u, v)]
    }

    fn count(&self) -> usize {
        self.names.len()
    }
}

struct DistSearch<'a> {
    opts: &'a DistOptions,
    vars: VarSpace,
    entries: Vec<(&'a ModelSet, &'a ModelSet, &'a ModelSet)>,
    explored: u64,
    last_cycle: Option<Vec<usize>>,
    empty_value: Option<(&'a ModelSet, &'a ModelSet)>,
}

enum SearchEnd {
    Solved(OrderState),
    Exhausted,
}

impl<'a> DistSearch<'a> {
    /// Depth-first search over entry index; for each entry, branch over
    /// the existential witnesses its value demands, accumulate order
    /// constraints, and prune on strict cycles.
    fn run(&mut self, state: OrderState, entry: usize) -> Result<SearchEnd, DistanceError> {
        if entry == self.entries.len() {
            return Ok(SearchEnd::Solved(state));
        }
        let (x, y, v) = self.entries[entry];
        if v.is_empty() {
            self.empty_value = Some((x, y));
            return Ok(SearchEnd::Exhausted);
        }
        let included: Vec<usize> = v.iter().collect();
        let excluded: Vec<usize> = y.minus(v).iter().collect();
        let xs: Vec<usize> = x.iter().collect();
        let ys: Vec<usize> = y.iter().collect();

        match self.opts.semantics {
            Semantics::Collective => {
                // Choose one witness x_w per included point; all witness
                // pairs form the minimum class of X × Y.
                let mut witness = vec![0usize; included.len()];
                loop {
                    self.explored += 1;
                    if self.explored > self.opts.budget {
                        return Err(DistanceError::BudgetExceeded {
                            explored: self.explored,
                            budget: self.opts.budget,
                        });
                    }
                    let mut next = state.clone();
                    let anchor = self.vars.var(xs[witness[0]], included[0]);
                    for (i, &yv) in included.iter().enumerate() {
                        let p = self.vars.var(xs[witness[i]], yv);
                        next.add(anchor, p, false);
                        next.add(p, anchor, false);
                    }
                    for &xv in &xs {
                        for &yv in &ys {
                            next.add(anchor, self.vars.var(xv, yv), false);
                        }
                    }
                    for &zv in &excluded {
                        for &xv in &xs {
                            next.add(anchor, self.vars.var(xv, zv), true);
                        }
                    }
                    if next.consistent() {
                        if let SearchEnd::Solved(s) = self.run(next, entry + 1)? {
                            return Ok(SearchEnd::Solved(s));
                        }
                    } else {
                        self.last_cycle = next.strict_cycle().or(self.last_cycle.take());
                    }
                    // Advance the witness tuple.
                    let mut i = 0;
                    loop {
                        if i == witness.len() {
                            return Ok(SearchEnd::Exhausted);
                        }
                        witness[i] += 1;
                        if witness[i] < xs.len() {
                            break;
                        }
                        witness[i] = 0;
                        i += 1;
                    }
                }
            }
            Semantics::Individual => {
                // Per included point: a witness x seeing it as closest.
                // Per excluded point and every x: a witness y′ strictly
                // closer to that x.
                let slots = included.len() + excluded.len() * xs.len();
                let mut witness = vec![0usize; slots];
                loop {
                    self.explored += 1;
                    if self.explored > self.opts.budget {
                        return Err(DistanceError::BudgetExceeded {
                            explored: self.explored,
                            budget: self.opts.budget,
                        });
                    }
                    let mut next = state.clone();
                    let mut ok = true;
                    for (i, &yv) in included.iter().enumerate() {
                        let xv = xs[witness[i]];
                        let p = self.vars.var(xv, yv);
                        for &yo in &ys {
                            next.add(p, self.vars.var(xv, yo), false);
                        }
                    }
                    for (j, &zv) in excluded.iter().enumerate() {
                        for (xi, &xv) in xs.iter().enumerate() {
                            let pick = ys[witness[included.len() + j * xs.len() + xi]];
                            if pick == zv {
                                ok = false;
                                break;
                            }
                            next.add(self.vars.var(xv, pick), self.vars.var(xv, zv), true);
                        }
                        if !ok {
                            break;
                        }
                    }
                    if ok && next.consistent() {
                        if let SearchEnd::Solved(s) = self.run(next, entry + 1)? {
                            return Ok(SearchEnd::Solved(s));
                        }
                    } else if ok {
                        self.last_cycle = next.strict_cycle().or(self.last_cycle.take());
                    }
                    let mut i = 0;
                    loop {
                        if i == slots {
                            return Ok(SearchEnd::Exhausted);
                        }
                        witness[i] += 1;
                        let limit = if i < included.len() {
                            xs.len()
                        } else {
                            ys.len()
                        };
                        if witness[i] < limit {
                            break;
                        }
                        witness[i] = 0;
                        i += 1;
                    }
                }
            }
        }
    }
}

/// Extracts natural ranks from a consistent constraint state: weakly
/// connected ≤-classes share a rank, strict edges force a gap.
fn assign_ranks(state: &OrderState, vars: &VarSpace) -> Vec<u64> {
    let n = vars.count();
    let reach = state.closure();
    // Union variables mutually reachable by ≤ into classes.
    let mut class = (0..n).collect::<Vec<usize>>();
    for i in 0..n {
        for j in 0..n {
            if reach[i * n + j] != 0 && reach[j * n + i] != 0 {
                let (a, b) = (class[i].min(class[j]), class[i].max(class[j]));
                for c in class.iter_mut() {
                    if *c == b {
                        *c = a;
                    }
                }
            }
        }
    }
    // Longest-path layering over the condensation, strict edges weight
    // 1, weak edges weight 0; iterate to a fixed point.
    let mut rank = vec![0u64; n];
    let base = vars.zero;
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                let e = state.edge[i * n + j];
                if e == 0 || class[i] == class[j] {
                    continue;
                }
                let need = rank[class[i]] + u64::from(e == 2);
                if rank[class[j]] < need {
                    rank[class[j]] = need;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if let Some(z) = base {
        // The zero class anchors rank 0; it never sits above others by
        // construction when identity is respected.
        debug_assert_eq!(rank[class[z]], 0);
    }
    (0..n).map(|i| rank[class[i]]).collect()
}

fn unsat_report(search: &DistSearch, exhausted: bool) -> Report {
    let mut report = Report::new("distance recovery unsatisfiable");
    if let Some((x, y)) = search.empty_value {
        report.push_note(&format!(
            "the table revises {x} by {y} to the empty set, but a closest point always exists over a finite universe"
        ));
    }
    if let Some(cycle) = &search.last_cycle {
        let chain = cycle
            .iter()
            .map(|&v| search.vars.names[v].clone())
            .collect::<Vec<_>>()
            .join(" ⤳ ");
        report.push_note(&format!(
            "the observed values force a comparison cycle with a strict step: {chain}"
        ));
    }
    if exhausted && search.last_cycle.is_none() && search.empty_value.is_none() {
        report.push_note("every witness assignment contradicts the observed table");
    }
    report
}

/// Searches for a pseudo-distance whose induced operator (under the
/// requested reading) reproduces every entry of the observed table.
pub fn synth_distance(
    op: &BinaryOperator,
    opts: &DistOptions,
) -> Result<DistOutcome, DistanceError> {
    let space = op.family().space();
    let vars = VarSpace::build(space, opts.symmetric, opts.respects_identity);
    let mut init = OrderState::new(vars.count());
    if let Some(z) = vars.zero {
        for v in 0..vars.count() {
            if v != z {
                init.add(z, v, true);
            }
        }
    }
    let entries: Vec<(&ModelSet, &ModelSet, &ModelSet)> = op
        .map()
        .iter()
        .map(|((x, y), v)| (x, y, v))
        .collect();
    let mut search = DistSearch {
        opts,
        vars,
        entries,
        explored: 0,
        last_cycle: None,
        empty_value: None,
    };
    match search.run(init, 0)? {
        SearchEnd::Solved(state) => {
            let ranks = assign_ranks(&state, &search.vars);
            let mut pairs = BTreeMap::new();
            for u in 0..space {
                for v in 0..space {
                    pairs.insert((u, v), ranks[search.vars.var(u, v)]);
                }
            }
            let d = PseudoDistance::new(space, &pairs, opts.symmetric, opts.respects_identity)
                .expect("rank assignment honors the requested flags");
            for (x, y, v) in &search.entries {
                let got = match opts.semantics {
                    Semantics::Collective => collective_rev(&d, x, y)?,
                    Semantics::Individual => individual_rev(&d, x, y)?,
                };
                debug_assert_eq!(&&got, v, "constraints must pin the table");
                if &got != *v {
                    return Err(DistanceError::MissingEntry(x.to_string(), y.to_string()));
                }
            }
            Ok(DistOutcome::Distance(d))
        }
        SearchEnd::Exhausted => Ok(DistOutcome::Unsat(unsat_report(&search, true))),
    }
}
