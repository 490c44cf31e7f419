//! Check reports: per-property verdicts with minimal witnesses, grouped into
//! a tree of sections, renderable as deterministic JSON or Markdown.
//!
//! Witnesses are stored as plain index vectors rather than [`crate::ModelSet`]
//! values so reports stay independent of any ambient space and serialize
//! stably.

use serde::Serialize;
use std::fmt::Write as _;

/// One named slot of a witness (e.g. `"X"` bound to a set, `"x"` to an
/// element). Slots are listed in the order the condition names them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum WitnessValue {
    /// A subset of the ambient space, as sorted member indices.
    Set(Vec<usize>),
    /// A single element of the ambient space.
    Element(usize),
    /// A node of a structure: element plus copy index.
    Node(usize, usize),
    /// A pair of nodes (e.g. an offending edge).
    Edge((usize, usize), (usize, usize)),
    /// A rendered formula.
    Formula(String),
    /// A rendered theory (list of formulas).
    Theory(Vec<String>),
    /// Free text for anything else.
    Text(String),
}

/// A counterexample to a property: named slots in canonical order. The
/// checkers produce the lexicographically least witness under their stated
/// scan orders, so reports are reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct Witness {
    pub slots: Vec<(String, WitnessValue)>,
}

impl Witness {
    pub fn new() -> Self {
        Witness { slots: Vec::new() }
    }

    pub fn with(mut self, name: &str, value: WitnessValue) -> Self {
        self.slots.push((name.to_string(), value));
        self
    }

    pub fn set(self, name: &str, members: Vec<usize>) -> Self {
        self.with(name, WitnessValue::Set(members))
    }

    pub fn element(self, name: &str, x: usize) -> Self {
        self.with(name, WitnessValue::Element(x))
    }

    pub fn text(self, name: &str, t: impl Into<String>) -> Self {
        self.with(name, WitnessValue::Text(t.into()))
    }

    fn render(&self) -> String {
        let mut out = String::new();
        for (k, (name, v)) in self.slots.iter().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{name} = {}", render_value(v));
        }
        out
    }
}

fn render_value(v: &WitnessValue) -> String {
    match v {
        WitnessValue::Set(ms) => {
            let inner: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
            format!("{{{}}}", inner.join(", "))
        }
        WitnessValue::Element(x) => x.to_string(),
        WitnessValue::Node(x, i) => format!("<{x},{i}>"),
        WitnessValue::Edge(a, b) => format!("<{},{}> -> <{},{}>", a.0, a.1, b.0, b.1),
        WitnessValue::Formula(s) => format!("`{s}`"),
        WitnessValue::Theory(fs) => {
            let inner: Vec<String> = fs.iter().map(|f| format!("`{f}`")).collect();
            format!("{{{}}}", inner.join(", "))
        }
        WitnessValue::Text(t) => t.clone(),
    }
}

/// Outcome of checking one property on one object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyVerdict {
    /// Stable identifier of the property (e.g. `"mu_PR"`, `"CUT"`).
    pub property_id: String,
    /// True iff no violation was found among applicable instances.
    pub holds: bool,
    /// False marks a condition that was not applicable to this object (e.g.
    /// an implication row whose side conditions the domain fails); such a
    /// verdict never fails a run.
    pub applicable: bool,
    /// Number of instances actually evaluated.
    pub checked: u64,
    /// Number of instances skipped because a required value was outside the
    /// recorded domain.
    pub skipped: u64,
    /// Least counterexample in scan order, when `holds` is false.
    pub witness: Option<Witness>,
}

impl PropertyVerdict {
    pub fn pass(id: &str, checked: u64, skipped: u64) -> Self {
        PropertyVerdict {
            property_id: id.to_string(),
            holds: true,
            applicable: true,
            checked,
            skipped,
            witness: None,
        }
    }

    pub fn fail(id: &str, checked: u64, skipped: u64, witness: Witness) -> Self {
        PropertyVerdict {
            property_id: id.to_string(),
            holds: false,
            applicable: true,
            checked,
            skipped,
            witness: Some(witness),
        }
    }

    pub fn not_applicable(id: &str, reason: &str) -> Self {
        PropertyVerdict {
            property_id: id.to_string(),
            holds: true,
            applicable: false,
            checked: 0,
            skipped: 0,
            witness: Some(Witness::new().text("reason", reason)),
        }
    }
}

/// A report node: either a single verdict or a named section of nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum ReportItem {
    Verdict(PropertyVerdict),
    Section(Section),
    /// A free-form informational line (e.g. a structure statistic).
    Note { text: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Section {
    pub title: String,
    pub items: Vec<ReportItem>,
}

/// A full check report: a titled tree of verdicts. Rendering (JSON or
/// Markdown) is deterministic given the same inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub title: String,
    pub items: Vec<ReportItem>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            items: Vec::new(),
        }
    }

    pub fn push_verdict(&mut self, v: PropertyVerdict) {
        self.items.push(ReportItem::Verdict(v));
    }

    pub fn push_note(&mut self, text: impl Into<String>) {
        self.items.push(ReportItem::Note { text: text.into() });
    }

    pub fn push_section(&mut self, s: Section) {
        self.items.push(ReportItem::Section(s));
    }

    /// All verdicts in the tree, in order.
    pub fn verdicts(&self) -> Vec<&PropertyVerdict> {
        fn walk<'a>(items: &'a [ReportItem], out: &mut Vec<&'a PropertyVerdict>) {
            for item in items {
                match item {
                    ReportItem::Verdict(v) => out.push(v),
                    ReportItem::Section(s) => walk(&s.items, out),
                    ReportItem::Note { .. } => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.items, &mut out);
        out
    }

    /// Finds a verdict by property id (first match in order).
    pub fn verdict(&self, property_id: &str) -> Option<&PropertyVerdict> {
        self.verdicts()
            .into_iter()
            .find(|v| v.property_id == property_id)
    }

    /// True iff every applicable verdict holds.
    pub fn all_pass(&self) -> bool {
        self.verdicts().iter().all(|v| !v.applicable || v.holds)
    }

    /// Serializes the whole report as pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Renders the report as Markdown: one heading per section, one line per
    /// verdict with PASS/FAIL/N-A, counts, and the witness when present.
    pub fn to_markdown(&self) -> String {
        fn verdict_line(v: &PropertyVerdict, out: &mut String) {
            let status = if !v.applicable {
                "N/A"
            } else if v.holds {
                "PASS"
            } else {
                "FAIL"
            };
            let _ = write!(out, "- `{}`: **{status}**", v.property_id);
            if v.applicable {
                let _ = write!(out, " (checked {}", v.checked);
                if v.skipped > 0 {
                    let _ = write!(out, ", skipped {}", v.skipped);
                }
                out.push(')');
            }
            if let Some(w) = &v.witness {
                if !w.slots.is_empty() {
                    let _ = write!(out, " — {}", w.render());
                }
            }
            out.push('\n');
        }
        fn walk(items: &[ReportItem], depth: usize, out: &mut String) {
            for item in items {
                match item {
                    ReportItem::Verdict(v) => verdict_line(v, out),
                    ReportItem::Note { text } => {
                        let _ = writeln!(out, "- {text}");
                    }
                    ReportItem::Section(s) => {
                        let hashes = "#".repeat((depth + 2).min(6));
                        let _ = writeln!(out, "\n{hashes} {}\n", s.title);
                        walk(&s.items, depth + 1, out);
                    }
                }
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "# {}\n", self.title);
        walk(&self.items, 0, &mut out);
        let overall = if self.all_pass() { "PASS" } else { "FAIL" };
        let _ = write!(out, "\nOverall: **{overall}**\n");
        out
    }
}
