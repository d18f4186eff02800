//! Brute-force ground truth at desk scale. Nothing here is optimized; it
//! exists to be obviously correct, and every property test in the crate
//! compares a production path against one of these scans.

use thiserror::Error;

use crate::automaton::Automaton;
use crate::domain::{words_of_length, Sym, Word};
use crate::instance::{Assignment, Instance};
use crate::ops::{Counterexample, OperationTable, PolymorphismVerdict};
use crate::SolveOutcome;

/// Explicit work bound; exceeding it is an error, never silent truncation.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub limit: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { limit: 1_000_000 }
    }
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit }
    }

    fn charge(&self, needed: u64) -> Result<(), BudgetExceeded> {
        if needed > self.limit {
            Err(BudgetExceeded { needed, limit: self.limit })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("oracle budget exceeded: needs {needed} steps, limit {limit}")]
pub struct BudgetExceeded {
    pub needed: u64,
    pub limit: u64,
}

fn pow_checked(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).unwrap_or(u64::MAX)
}

/// The relation `R_n = L(A) ∩ Dⁿ` as an explicit tuple list, in
/// lexicographic order. Requires `|D|ⁿ` within budget.
pub fn enumerate_relation(
    a: &Automaton,
    n: usize,
    budget: Budget,
) -> Result<Vec<Word>, BudgetExceeded> {
    budget.charge(pow_checked(a.domain().size() as u64, n as u32))?;
    Ok(words_of_length(a.domain().size(), n).filter(|w| a.accepts(w)).collect())
}

/// Exhaustive assignment scan; returns the lexicographically least solution
/// (variable declaration order, domain order). Requires `|D|^{|V|}` within
/// budget.
pub fn brute_solve(instance: &Instance, budget: Budget) -> Result<SolveOutcome, BudgetExceeded> {
    let d = instance.domain().size();
    budget.charge(pow_checked(d as u64, instance.var_count() as u32))?;
    for values in words_of_length(d, instance.var_count()) {
        let phi = Assignment::new(values);
        if instance.verify(&phi) {
            return Ok(SolveOutcome::Sat(phi));
        }
    }
    Ok(SolveOutcome::Unsat)
}

/// All solutions of an instance, for equivalence checks between original
/// and transformed instances.
pub fn all_solutions(instance: &Instance, budget: Budget) -> Result<Vec<Assignment>, BudgetExceeded> {
    let d = instance.domain().size();
    budget.charge(pow_checked(d as u64, instance.var_count() as u32))?;
    Ok(words_of_length(d, instance.var_count())
        .map(Assignment::new)
        .filter(|phi| instance.verify(phi))
        .collect())
}

/// Checks the polymorphism condition by enumerating all k-tuples of
/// equal-length accepted words up to `max_len`, applying the table
/// columnwise and testing acceptance. Complete up to `max_len` only; the
/// summed tuple count must fit the budget.
pub fn brute_is_polymorphism(
    a: &Automaton,
    f: &OperationTable,
    max_len: usize,
    budget: Budget,
) -> Result<PolymorphismVerdict, BudgetExceeded> {
    let k = f.arity();
    let mut relations: Vec<Vec<Word>> = Vec::with_capacity(max_len + 1);
    let mut cost = 0u64;
    for n in 0..=max_len {
        budget.charge(pow_checked(a.domain().size() as u64, n as u32))?;
        let rel: Vec<Word> = words_of_length(a.domain().size(), n).filter(|w| a.accepts(w)).collect();
        cost = cost.saturating_add(pow_checked(rel.len() as u64, k as u32));
        relations.push(rel);
    }
    budget.charge(cost)?;
    for rel in &relations {
        if rel.is_empty() {
            continue;
        }
        // Iterate index tuples (i_1, ..., i_k) lexicographically.
        let mut idx = vec![0usize; k];
        loop {
            let tuple: Vec<&[Sym]> = idx.iter().map(|&i| rel[i].as_slice()).collect();
            let image = f.apply_words(&tuple);
            if !a.accepts(&image) {
                return Ok(PolymorphismVerdict {
                    holds: false,
                    counterexample: Some(Counterexample {
                        inputs: tuple.iter().map(|w| w.to_vec()).collect(),
                        output: image,
                    }),
                });
            }
            let mut pos = k;
            while pos > 0 {
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < rel.len() {
                    break;
                }
                idx[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX {
                break;
            }
        }
    }
    Ok(PolymorphismVerdict { holds: true, counterexample: None })
}
