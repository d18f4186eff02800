//! Polynomial-time solving for Boolean instances whose automaton language
//! is closed under ∧ (with ∨ handled by 0↔1 relabeling duality).
//!
//! An ∧-closed slice `R_n` is a meet-semilattice under `r ≤ r' ⇔ r ∧ r' = r`
//! and has a unique least element. The solver works entirely through
//! minimal extensions of patterns: start from any extension, sweep the
//! positions left to right, and tentatively pin a 0 wherever the current
//! word has a 1; keeping the meet of successful attempts converges to the
//! least extension. Repeated scope variables and cross-constraint conflicts
//! are resolved by pinning the conflicting variable to 1, which minimality
//! shows is forced.

use thiserror::Error;

use crate::automaton::{Automaton, Stepper};
use crate::domain::{Sym, Word};
use crate::instance::{Assignment, Instance, Pattern};
use crate::ops::{Counterexample, SchaeferOp};
#[cfg(debug_assertions)]
use crate::ops::is_polymorphism;
use crate::SolveOutcome;

#[derive(Debug, Error)]
pub enum SemilatticeError {
    #[error("the ∧/∨ solver requires the Boolean domain, got {0}")]
    NonBooleanDomain(String),
    #[error("automaton language is not closed under {op}: counterexample on words of length {}", .counterexample.output.len())]
    NotClosed { op: &'static str, counterexample: Counterexample },
    #[error("solver produced an assignment that fails verification; the closure precondition was violated")]
    VerificationFailed,
}

/// The unique ≤-least word of `R_n` extending `tau`, or `None` when `tau`
/// is not extendable. Correct when ∧ is a polymorphism of `Γ_A` (caller's
/// promise; checked in debug builds by the solvers). Runs in `O(n²·|A|)`.
pub fn minimal_extension(a: &Automaton, tau: &Pattern) -> Option<Word> {
    minimal_extension_with(&Stepper::new(a), tau)
}

fn minimal_extension_with(stepper: &Stepper<'_>, tau: &Pattern) -> Option<Word> {
    let n = tau.arity();
    let mut current = stepper.extend_pattern(tau)?;
    let mut probe = tau.clone();
    for i in 0..n {
        if tau.get(i).is_none() && current[i] == 1 {
            probe.set(i, 0);
            if let Some(m) = stepper.extend_pattern(&probe) {
                for (c, x) in current.iter_mut().zip(&m) {
                    *c &= *x; // the meet stays in R_n by ∧-closure
                }
            }
            probe.unset(i);
        }
    }
    Some(current)
}

/// Least tuple of `R_n` extending `tau` that is consistent on repeated
/// scope variables, together with the induced partial assignment. Pins a
/// variable to 1 (all its occurrences) whenever the current minimal tuple
/// disagrees on it, and recomputes; at most one round per scope variable.
pub fn minimal_constraint_extension(
    a: &Automaton,
    scope: &[usize],
    tau: &Pattern,
) -> Option<(Word, Vec<(usize, Sym)>)> {
    minimal_constraint_extension_with(&Stepper::new(a), scope, tau)
}

fn minimal_constraint_extension_with(
    stepper: &Stepper<'_>,
    scope: &[usize],
    tau: &Pattern,
) -> Option<(Word, Vec<(usize, Sym)>)> {
    assert_eq!(scope.len(), tau.arity());
    let mut pattern = tau.clone();
    let distinct: Vec<usize> = {
        let mut vs: Vec<usize> = scope.to_vec();
        vs.sort_unstable();
        vs.dedup();
        vs
    };
    for _round in 0..=distinct.len() {
        let word = minimal_extension_with(stepper, &pattern)?;
        let mut conflict = None;
        'scan: for (i, &v) in scope.iter().enumerate() {
            for (j, &w) in scope.iter().enumerate().skip(i + 1) {
                if v == w && word[i] != word[j] {
                    conflict = Some(v);
                    break 'scan;
                }
            }
        }
        match conflict {
            None => {
                let mut assignment: Vec<(usize, Sym)> = Vec::new();
                for (i, &v) in scope.iter().enumerate() {
                    if !assignment.iter().any(|&(u, _)| u == v) {
                        assignment.push((v, word[i]));
                    }
                }
                assignment.sort_unstable();
                return Some((word, assignment));
            }
            Some(v) => {
                // Minimality forces v = 1 in every satisfying tuple.
                for (i, &w) in scope.iter().enumerate() {
                    if w == v {
                        if pattern.get(i) == Some(0) {
                            return None;
                        }
                        pattern.set(i, 1);
                    }
                }
            }
        }
    }
    unreachable!("constraint extension pins a new variable every round")
}

fn require_boolean(a: &Automaton) -> Result<(), SemilatticeError> {
    if a.domain().is_boolean() {
        Ok(())
    } else {
        Err(SemilatticeError::NonBooleanDomain(a.domain().to_string()))
    }
}

#[cfg(debug_assertions)]
fn debug_check_closed(a: &Automaton, op: SchaeferOp) -> Result<(), SemilatticeError> {
    let verdict = is_polymorphism(a, &op.table());
    if verdict.holds {
        Ok(())
    } else {
        Err(SemilatticeError::NotClosed {
            op: op.name(),
            counterexample: verdict.counterexample.unwrap(),
        })
    }
}

#[cfg(not(debug_assertions))]
fn debug_check_closed(_a: &Automaton, _op: SchaeferOp) -> Result<(), SemilatticeError> {
    Ok(())
}

/// Decides a Boolean instance whose automaton is ∧-closed and constructs a
/// solution: per-constraint minimal tuples, then a fixpoint that pins any
/// variable receiving conflicting values to 1 in every constraint
/// containing it. At most `|V|` rounds.
pub fn solve_and(instance: &Instance) -> Result<SolveOutcome, SemilatticeError> {
    require_boolean(instance.automaton())?;
    debug_check_closed(instance.automaton(), SchaeferOp::And)?;
    solve_and_inner(instance)
}

fn solve_and_inner(instance: &Instance) -> Result<SolveOutcome, SemilatticeError> {
    let stepper = Stepper::new(instance.automaton());
    let nv = instance.var_count();
    // Hard pins induced by unary domain constraints.
    let mut pinned: Vec<Option<Sym>> = Vec::with_capacity(nv);
    for v in 0..nv {
        pinned.push(match instance.allowed(v) {
            0 => return Ok(SolveOutcome::Unsat),
            0b01 => Some(0),
            0b10 => Some(1),
            _ => None,
        });
    }
    let mut ones: Vec<bool> = pinned.iter().map(|&p| p == Some(1)).collect();
    for _round in 0..=nv {
        let pins: Vec<Option<Sym>> = (0..nv)
            .map(|v| if ones[v] { Some(1) } else { pinned[v] })
            .collect();
        // Minimal consistent tuple per constraint under the current pins.
        let mut seen_zero = vec![false; nv];
        let mut seen_one = vec![false; nv];
        for c in instance.constraints() {
            let mut tau = Pattern::empty(c.scope.len());
            for (i, &v) in c.scope.iter().enumerate() {
                if let Some(d) = pins[v] {
                    tau.set(i, d);
                }
            }
            let Some((_, assignment)) = minimal_constraint_extension_with(&stepper, &c.scope, &tau)
            else {
                return Ok(SolveOutcome::Unsat);
            };
            for (v, d) in assignment {
                if d == 0 {
                    seen_zero[v] = true;
                } else {
                    seen_one[v] = true;
                }
            }
        }
        // First variable (declaration order) with conflicting demands is
        // forced to 1 by minimality of the per-constraint tuples.
        match (0..nv).find(|&v| seen_zero[v] && seen_one[v]) {
            Some(v) => ones[v] = true,
            None => {
                let full: Vec<Sym> = (0..nv)
                    .map(|v| {
                        if seen_one[v] {
                            1
                        } else if seen_zero[v] {
                            0
                        } else {
                            pins[v].unwrap_or_else(|| instance.allowed(v).trailing_zeros() as Sym)
                        }
                    })
                    .collect();
                let phi = Assignment::new(full);
                if !instance.verify(&phi) {
                    return Err(SemilatticeError::VerificationFailed);
                }
                return Ok(SolveOutcome::Sat(phi));
            }
        }
    }
    unreachable!("each round pins a fresh variable to 1, so |V| rounds suffice")
}

/// The ∨-closed case by duality: relabel 0↔1, solve with ∧, relabel back.
pub fn solve_or(instance: &Instance) -> Result<SolveOutcome, SemilatticeError> {
    require_boolean(instance.automaton())?;
    debug_check_closed(instance.automaton(), SchaeferOp::Or)?;
    let relabeled = instance.automaton().relabel(&[1, 0]);
    let swapped_domains = instance
        .domain_constraints()
        .iter()
        .map(|(&v, &mask)| (v, (mask & 1) << 1 | (mask >> 1) & 1))
        .collect();
    let dual = instance.with_automaton(relabeled, swapped_domains);
    match solve_and_inner(&dual)? {
        SolveOutcome::Unsat => Ok(SolveOutcome::Unsat),
        SolveOutcome::Sat(phi) => {
            let back = Assignment::new(phi.values().iter().map(|&d| 1 - d).collect());
            if !instance.verify(&back) {
                return Err(SemilatticeError::VerificationFailed);
            }
            Ok(SolveOutcome::Sat(back))
        }
    }
}
