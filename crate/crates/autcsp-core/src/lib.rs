//! Automatic constraint satisfaction problems: constraint relations are the
//! fixed-length slices `R_k = L(A) ∩ D^k` of a regular language, given by a
//! finite automaton `A`.
//!
//! The crate provides:
//!
//! * [`automaton`] — the finite-automaton engine (parsing, determinization,
//!   Boolean combinations, emptiness, length-bounded and growth queries);
//! * [`ops`] — finite operation tables, polymorphism detection by automata
//!   products, the Schaefer six-operation check, the Boolean Siggers search,
//!   and the Boolean tractability dichotomy with hardness witnesses;
//! * [`instance`] — the CSP instance model and the pattern-driven automaton
//!   searches every solver builds on;
//! * [`semilattice`], [`affine`], [`width1`], [`nu`] — the four
//!   polynomial-time solver families (∧/∨-closed languages, affine languages
//!   over GF(q), width-1 propagation, and majority/near-unanimity
//!   decomposition with path consistency);
//! * [`oracle`] — brute-force ground truth at desk scale;
//! * [`fixtures`] — the named example automata;
//! * [`gen`] — seeded random automata and instances.

pub mod affine;
pub mod automaton;
pub mod domain;
pub mod fixtures;
pub mod gen;
pub mod instance;
pub mod nu;
pub mod ops;
pub mod oracle;
pub mod rng;
pub mod semilattice;
pub mod width1;

pub use automaton::{Automaton, AutomatonError, GrowthClass};
pub use domain::{Domain, Sym, Word};
pub use instance::{Assignment, Constraint, Instance, Pattern, SetPattern};
pub use ops::{DichotomyVerdict, OperationTable, PolymorphismVerdict, SchaeferOp};

/// Outcome of a satisfiability solver: a verified assignment or a refusal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Sat(instance::Assignment),
    Unsat,
}

impl SolveOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Sat(_))
    }

    pub fn assignment(&self) -> Option<&instance::Assignment> {
        match self {
            SolveOutcome::Sat(a) => Some(a),
            SolveOutcome::Unsat => None,
        }
    }
}
