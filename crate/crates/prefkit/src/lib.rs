//! Finite-model toolkit for nonmonotonic logics and theory revision.
//!
//! The crate is organized as a tower:
//!
//! - [`logic`]: propositional substrate — vocabularies, models as
//!   bit-indices, formulas, theories, model sets as bitsets, domain
//!   families with verified closure flags.
//! - [`choice`]: abstract choice functions over a domain family, the
//!   model-side conditions on them, the proof-theoretic rules on
//!   consequence operators, translations between the two views, and the
//!   implication matrix between conditions.
//! - [`pref`]: preference structures over indexed copies, minimal-element
//!   selection, smoothness and rankedness, layer extraction, and synthesis
//!   of structures from choice functions.
//! - [`agm`]: revision and contraction operators on a finite universe,
//!   epistemic entrenchment, postulate checkers and the interdefinability
//!   transforms.
//! - [`distance`]: pseudo-distances, distance-based revision (collective
//!   and individual reading), neighborhood consistency, loop conditions,
//!   and recovery of a distance from an operator table.
//! - [`size`]: filter/ideal systems over a base set, coherence conditions
//!   between sizes on different bases, the bridge between principal filter
//!   systems and choice functions, and the defeasible quantifier over
//!   neighborhood systems.
//! - [`gen`]: seeded deterministic generators for all object kinds.
//! - [`jsonio`]: JSON envelopes for every object kind used by the CLI.
//! - [`golden`]: the built-in corpus of small named instances with their
//!   expected verdicts.
//! - [`report`]: verdicts, witnesses, and deterministic report rendering.

pub mod agm;
pub mod choice;
pub mod distance;
pub mod gen;
pub mod golden;
pub mod jsonio;
pub mod logic;
pub mod pref;
pub mod report;
pub mod size;

pub use agm::{ContractionOperator, EntrenchmentRelation, RevisionOperator};
pub use logic::{DomainFamily, Formula, Model, ModelSet, Theory, Vocabulary};
pub use pref::{PrefStructure, StructureFlags, SynthOptions, SynthOutcome};
pub use report::{PropertyVerdict, Report, Witness};
pub use size::{Filter, FilterKind, FilterSystem, NStructure, NablaFormula};
