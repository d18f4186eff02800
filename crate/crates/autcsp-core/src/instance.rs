//! AutCSP instances and the pattern-driven searches underlying the solvers.
//!
//! An instance is `(V, D, C, A)`: named variables, constraints given as
//! variable scopes (repetitions allowed), and one automaton whose length-k
//! slice `R_k = L(A) ∩ D^k` is the relation of every arity-k constraint.
//! Optional unary domain constraints `P_x ⊆ D` make 1-minimized instances
//! representable.
//!
//! Positions inside patterns and scopes are 0-based throughout the API.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::{Automaton, Stepper};
use crate::domain::{Domain, Sym, Word};

/// Bit mask over domain symbol indices; instances require `|D| ≤ 64`.
pub type SymMask = u64;

pub fn full_mask(domain: &Domain) -> SymMask {
    if domain.size() == 64 {
        u64::MAX
    } else {
        (1u64 << domain.size()) - 1
    }
}

pub fn mask_iter(mask: SymMask) -> impl Iterator<Item = Sym> {
    (0..64u16).filter(move |&d| mask >> d & 1 == 1)
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("domain has {0} symbols; instances support at most 64")]
    DomainTooLarge(usize),
    #[error("constraint scope is empty")]
    EmptyScope,
    #[error("variable index {0} out of range")]
    BadVariable(usize),
}

/// A constraint `⟨s⟩`: a nonempty scope of variable indices, implicitly
/// related by `R_{|s|}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub scope: Vec<usize>,
}

impl Constraint {
    pub fn arity(&self) -> usize {
        self.scope.len()
    }
}

/// A total assignment `V → D`, indexed by variable id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Sym>,
}

impl Assignment {
    pub fn new(values: Vec<Sym>) -> Self {
        Assignment { values }
    }

    pub fn get(&self, var: usize) -> Sym {
        self.values[var]
    }

    pub fn values(&self) -> &[Sym] {
        &self.values
    }

    /// Image of a scope under the assignment, as a word.
    pub fn image(&self, scope: &[usize]) -> Word {
        scope.iter().map(|&v| self.values[v]).collect()
    }
}

/// Partial single-valued pattern `τ : [n] ⇀ D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    cells: Vec<Option<Sym>>,
}

impl Pattern {
    pub fn empty(n: usize) -> Self {
        Pattern { cells: vec![None; n] }
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, Sym)]) -> Self {
        let mut p = Pattern::empty(n);
        for &(i, d) in pairs {
            p.cells[i] = Some(d);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.cells.len()
    }

    pub fn get(&self, i: usize) -> Option<Sym> {
        self.cells[i]
    }

    pub fn set(&mut self, i: usize, d: Sym) {
        self.cells[i] = Some(d);
    }

    pub fn unset(&mut self, i: usize) {
        self.cells[i] = None;
    }

    pub fn is_total(&self) -> bool {
        self.cells.iter().all(|c| c.is_some())
    }
}

/// Total set-valued pattern `φ : [n] → P(D)`; an empty cell forces failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetPattern {
    cells: Vec<SymMask>,
}

impl SetPattern {
    pub fn full(domain: &Domain, n: usize) -> Self {
        SetPattern { cells: vec![full_mask(domain); n] }
    }

    pub fn from_masks(cells: Vec<SymMask>) -> Self {
        SetPattern { cells }
    }

    pub fn arity(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, i: usize) -> SymMask {
        self.cells[i]
    }

    pub fn set_cell(&mut self, i: usize, mask: SymMask) {
        self.cells[i] = mask;
    }
}

/// Extends `τ` to a full accepted word of its arity, if possible; returns
/// the lexicographically least such word. Runs in `O(n·|A|)` by a layered
/// BFS that follows the fixed symbol on defined positions and any
/// transition elsewhere.
pub fn extend_pattern(a: &Automaton, tau: &Pattern) -> Option<Word> {
    Stepper::new(a).extend_pattern(tau)
}

/// Finds an accepted word `t` of the pattern's arity with `t(i) ∈ φ(i)` at
/// every position, if one exists (lexicographically least). `O(n·|A|)`.
pub fn extend_set_pattern(a: &Automaton, phi: &SetPattern) -> Option<Word> {
    Stepper::new(a).extend_set_pattern(phi)
}

impl Stepper<'_> {
    pub(crate) fn extend_pattern(&self, tau: &Pattern) -> Option<Word> {
        self.constrained_word(tau.arity(), |i, d| match tau.get(i) {
            Some(fixed) => fixed == d,
            None => true,
        })
    }

    pub(crate) fn extend_set_pattern(&self, phi: &SetPattern) -> Option<Word> {
        self.constrained_word(phi.arity(), |i, d| phi.cell(i) >> d & 1 == 1)
    }
}

/// An AutCSP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    variables: Vec<String>,
    constraints: Vec<Constraint>,
    automaton: Automaton,
    domain_constraints: BTreeMap<usize, SymMask>,
}

impl Instance {
    pub fn new(
        variables: Vec<String>,
        constraints: Vec<Constraint>,
        automaton: Automaton,
        domain_constraints: BTreeMap<usize, SymMask>,
    ) -> Result<Self, InstanceError> {
        if automaton.domain().size() > 64 {
            return Err(InstanceError::DomainTooLarge(automaton.domain().size()));
        }
        for c in &constraints {
            if c.scope.is_empty() {
                return Err(InstanceError::EmptyScope);
            }
            for &v in &c.scope {
                if v >= variables.len() {
                    return Err(InstanceError::BadVariable(v));
                }
            }
        }
        for &v in domain_constraints.keys() {
            if v >= variables.len() {
                return Err(InstanceError::BadVariable(v));
            }
        }
        Ok(Instance { variables, constraints, automaton, domain_constraints })
    }

    /// Parses the instance format against a separately supplied automaton:
    ///
    /// ```text
    /// vars x y z
    /// constraint x y z
    /// constraint y z
    /// domain x 0 1      # optional P_x line
    /// ```
    pub fn parse(text: &str, automaton: Automaton) -> Result<Self, InstanceError> {
        let mut variables: Vec<String> = Vec::new();
        let mut constraints: Vec<Constraint> = Vec::new();
        let mut domain_constraints: BTreeMap<usize, SymMask> = BTreeMap::new();
        let domain = automaton.domain().clone();
        if domain.size() > 64 {
            return Err(InstanceError::DomainTooLarge(domain.size()));
        }
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let mut tokens = content.split_whitespace();
            let Some(keyword) = tokens.next() else { continue };
            let rest: Vec<&str> = tokens.collect();
            let err = |msg: String| InstanceError::Parse { line, msg };
            let var_id = |name: &str, vars: &[String]| {
                vars.iter()
                    .position(|v| v == name)
                    .ok_or_else(|| err(format!("undeclared variable `{name}`")))
            };
            match keyword {
                "vars" => {
                    for v in &rest {
                        if variables.iter().any(|w| w == v) {
                            return Err(err(format!("duplicate variable `{v}`")));
                        }
                        variables.push(v.to_string());
                    }
                }
                "constraint" => {
                    if rest.is_empty() {
                        return Err(err("constraint needs at least one variable".into()));
                    }
                    let mut scope = Vec::with_capacity(rest.len());
                    for name in &rest {
                        scope.push(var_id(name, &variables)?);
                    }
                    constraints.push(Constraint { scope });
                }
                "domain" => {
                    let Some((name, syms)) = rest.split_first() else {
                        return Err(err("domain needs a variable".into()));
                    };
                    let v = var_id(name, &variables)?;
                    if domain_constraints.contains_key(&v) {
                        return Err(err(format!("duplicate domain line for `{name}`")));
                    }
                    let mut mask: SymMask = 0;
                    for s in syms {
                        let d = domain
                            .index_of(s)
                            .ok_or_else(|| err(format!("symbol `{s}` not in the alphabet")))?;
                        mask |= 1 << d;
                    }
                    domain_constraints.insert(v, mask);
                }
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }
        Instance::new(variables, constraints, automaton, domain_constraints)
    }

    /// Canonical text form (parse ∘ to_text is the identity on the
    /// constraint structure).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "vars {}", self.variables.join(" ")).unwrap();
        for c in &self.constraints {
            let names: Vec<&str> = c.scope.iter().map(|&v| self.variables[v].as_str()).collect();
            writeln!(out, "constraint {}", names.join(" ")).unwrap();
        }
        for (&v, &mask) in &self.domain_constraints {
            let syms: Vec<&str> =
                mask_iter(mask).map(|d| self.automaton.domain().symbol(d)).collect();
            writeln!(out, "domain {} {}", self.variables[v], syms.join(" ")).unwrap();
        }
        out
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn var_count(&self) -> usize {
        self.variables.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn domain(&self) -> &Domain {
        self.automaton.domain()
    }

    pub fn domain_constraints(&self) -> &BTreeMap<usize, SymMask> {
        &self.domain_constraints
    }

    /// The allowed set for a variable: its `P_x` if declared, else all of D.
    pub fn allowed(&self, var: usize) -> SymMask {
        self.domain_constraints
            .get(&var)
            .copied()
            .unwrap_or_else(|| full_mask(self.automaton.domain()))
    }

    /// The size measure `|C| = Σ |s|`.
    pub fn constraint_size(&self) -> usize {
        self.constraints.iter().map(|c| c.scope.len()).sum()
    }

    /// True iff every constraint's scope image is accepted by the automaton
    /// and every declared `P_x` contains `φ(x)`.
    pub fn verify(&self, phi: &Assignment) -> bool {
        debug_assert_eq!(phi.values().len(), self.variables.len());
        for (&v, &mask) in &self.domain_constraints {
            if mask >> phi.get(v) & 1 == 0 {
                return false;
            }
        }
        self.constraints.iter().all(|c| self.automaton.accepts(&phi.image(&c.scope)))
    }

    /// Rebuilds the instance with another automaton over the same domain
    /// (used by the ∨-solver's relabeling duality) and optionally remapped
    /// domain constraints.
    pub(crate) fn with_automaton(
        &self,
        automaton: Automaton,
        domain_constraints: BTreeMap<usize, SymMask>,
    ) -> Instance {
        Instance {
            variables: self.variables.clone(),
            constraints: self.constraints.clone(),
            automaton,
            domain_constraints,
        }
    }
}
