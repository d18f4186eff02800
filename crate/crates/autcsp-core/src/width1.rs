//! 1-minimality over automatic constraint languages, width-1 decision, and
//! solution extraction for semilattice-closed languages over arbitrary
//! finite domains.
//!
//! 1-minimization maintains a unary domain `P_x ⊆ D` per variable and
//! shrinks it to the projection `π_i(R_k ∩ Π_j P_{s_j})` for every
//! constraint and position until nothing changes. Projections are computed
//! by set-pattern extendability, not by tuple enumeration, so the cost is
//! polynomial in the automaton. The fixpoint refutes (some `P_x = ∅`)
//! every unsatisfiable instance exactly when the language has width 1; for
//! languages closed under a semilattice operation the meet of each final
//! `P_x` is a solution.

use thiserror::Error;

use crate::automaton::Stepper;
use crate::domain::Sym;
use crate::instance::{full_mask, mask_iter, Assignment, Instance, SetPattern, SymMask};
use crate::ops::{Counterexample, OperationTable};
#[cfg(debug_assertions)]
use crate::ops::is_polymorphism;
use crate::SolveOutcome;

#[derive(Debug, Error)]
pub enum Width1Error {
    #[error("table is not a binary semilattice operation (idempotent, commutative, associative)")]
    NotSemilattice,
    #[error("operation domain {0} does not match instance domain {1}")]
    DomainMismatch(String, String),
    #[error("domain constraint on `{0}` is not closed under the meet operation")]
    DomainNotMeetClosed(String),
    #[error("automaton language is not closed under the meet: counterexample on words of length {}", .0.output.len())]
    NotClosed(Counterexample),
    #[error("solver produced an assignment that fails verification; the closure precondition was violated")]
    VerificationFailed,
}

/// One shrink event of the fixpoint loop, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainUpdate {
    pub constraint: usize,
    pub position: usize,
    pub var: usize,
    pub old: SymMask,
    pub new: SymMask,
}

/// Result of 1-minimization: final unary domains, whether some domain
/// emptied, and the update trace.
#[derive(Debug, Clone)]
pub struct MinimizedInstance {
    pub domains: Vec<SymMask>,
    pub refuted: bool,
    pub trace: Vec<DomainUpdate>,
}

impl MinimizedInstance {
    /// Re-expresses the fixpoint as an ordinary instance: the base
    /// constraints plus one `domain` line per variable.
    pub fn to_instance(&self, base: &Instance) -> Instance {
        let domain_constraints =
            (0..base.var_count()).map(|v| (v, self.domains[v])).collect();
        Instance::new(
            base.variables().to_vec(),
            base.constraints().to_vec(),
            base.automaton().clone(),
            domain_constraints,
        )
        .expect("minimized instance keeps the base shape")
    }
}

/// The projection `π_i(R_k ∩ Π_j P_{s_j})` onto position `i`, computed by
/// testing one set pattern per candidate value. `O(k·|D|·|A|)`.
pub fn project_with_domains(
    a: &crate::automaton::Automaton,
    scope: &[usize],
    domains: &[SymMask],
    i: usize,
) -> SymMask {
    project_with(&Stepper::new(a), scope, domains, i)
}

fn project_with(stepper: &Stepper<'_>, scope: &[usize], domains: &[SymMask], i: usize) -> SymMask {
    assert!(i < scope.len(), "projection position out of range");
    let mut phi = SetPattern::from_masks(scope.iter().map(|&v| domains[v]).collect());
    let mut out: SymMask = 0;
    for d in mask_iter(domains[scope[i]]) {
        phi.set_cell(i, 1 << d);
        if stepper.extend_set_pattern(&phi).is_some() {
            out |= 1 << d;
        }
    }
    out
}

/// Transforms an instance into an equivalent 1-minimal one: initialize
/// `P_x` to the declared domain (or all of D), then shrink via projections
/// round-robin over constraints in declaration order, positions left to
/// right, until stable. Total shrink events ≤ `|V|·|D|`.
pub fn one_minimize(instance: &Instance) -> MinimizedInstance {
    let stepper = Stepper::new(instance.automaton());
    let full = full_mask(instance.domain());
    let mut domains: Vec<SymMask> =
        (0..instance.var_count()).map(|v| instance.allowed(v) & full).collect();
    let mut trace = Vec::new();
    loop {
        let mut changed = false;
        for (ci, c) in instance.constraints().iter().enumerate() {
            for (pos, &v) in c.scope.iter().enumerate() {
                let new = project_with(&stepper, &c.scope, &domains, pos);
                if new != domains[v] {
                    debug_assert_eq!(new & !domains[v], 0, "projections only shrink");
                    trace.push(DomainUpdate {
                        constraint: ci,
                        position: pos,
                        var: v,
                        old: domains[v],
                        new,
                    });
                    domains[v] = new;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let refuted = domains.contains(&0);
    MinimizedInstance { domains, refuted, trace }
}

/// Satisfiability decision for width-1 languages: `No` iff 1-minimization
/// refutes. Sound in general only under the caller's width-1 promise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
}

pub fn solve_width1(instance: &Instance) -> Decision {
    if one_minimize(instance).refuted {
        Decision::No
    } else {
        Decision::Yes
    }
}

#[cfg(debug_assertions)]
fn debug_check_closed(instance: &Instance, meet: &OperationTable) -> Result<(), Width1Error> {
    let verdict = is_polymorphism(instance.automaton(), meet);
    if verdict.holds {
        Ok(())
    } else {
        Err(Width1Error::NotClosed(verdict.counterexample.unwrap()))
    }
}

#[cfg(not(debug_assertions))]
fn debug_check_closed(_instance: &Instance, _meet: &OperationTable) -> Result<(), Width1Error> {
    Ok(())
}

/// Solves instances over a language closed under a binary semilattice
/// operation (any finite domain): 1-minimize, refute on an empty domain,
/// otherwise assign every variable the meet of its final `P_x`.
pub fn solve_semilattice_general(
    instance: &Instance,
    meet: &OperationTable,
) -> Result<SolveOutcome, Width1Error> {
    if meet.domain() != instance.domain() {
        return Err(Width1Error::DomainMismatch(
            meet.domain().to_string(),
            instance.domain().to_string(),
        ));
    }
    if !meet.is_semilattice() {
        return Err(Width1Error::NotSemilattice);
    }
    // Declared P_x must be meet-closed for the meet assignment argument.
    for (&v, &mask) in instance.domain_constraints() {
        for a in mask_iter(mask) {
            for b in mask_iter(mask) {
                if mask >> meet.apply(&[a, b]) & 1 == 0 {
                    return Err(Width1Error::DomainNotMeetClosed(
                        instance.variables()[v].clone(),
                    ));
                }
            }
        }
    }
    debug_check_closed(instance, meet)?;
    let minimized = one_minimize(instance);
    if minimized.refuted {
        return Ok(SolveOutcome::Unsat);
    }
    let values: Vec<Sym> = minimized
        .domains
        .iter()
        .map(|&mask| {
            let mut it = mask_iter(mask);
            let first = it.next().expect("non-refuted domains are nonempty");
            it.fold(first, |acc, d| meet.apply(&[acc, d]))
        })
        .collect();
    let phi = Assignment::new(values);
    if !instance.verify(&phi) {
        return Err(Width1Error::VerificationFailed);
    }
    Ok(SolveOutcome::Sat(phi))
}
