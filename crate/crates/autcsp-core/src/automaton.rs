//! Finite automata over a CSP domain alphabet.
//!
//! Automata are nondeterministic in general (`initial` may hold several
//! states, transitions form a relation). Every operation whose underlying
//! construction needs a total transition function determinizes internally;
//! the determinized automaton is always completed with a non-accepting sink
//! so the transition table is total.
//!
//! The size measure `|A| = |S| + |Δ|` is exposed as [`Automaton::size`].

use std::collections::HashMap;
use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::domain::{Domain, DomainError, Sym, Word};

pub type StateId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub from: StateId,
    pub sym: Sym,
    pub to: StateId,
}

#[derive(Debug, Error)]
pub enum AutomatonError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("empty state set")]
    EmptyStates,
    #[error("empty initial set")]
    EmptyInitial,
    #[error("state index {0} out of range")]
    BadState(StateId),
    #[error("symbol index {0} out of range")]
    BadSymbol(Sym),
    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(String, String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Growth of `gr_A(n) = |L(A) ∩ Dⁿ|`: for regular languages this is
/// always either polynomially or exponentially bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthClass {
    Polynomial,
    Exponential,
}

/// A finite automaton `(S, I, Δ, F)` over a [`Domain`].
#[derive(Debug, Clone, PartialEq)]
pub struct Automaton {
    domain: Domain,
    states: Vec<String>,
    initial: Vec<StateId>,
    accepting: Vec<StateId>,
    transitions: Vec<Transition>,
    deterministic: bool,
}

impl Automaton {
    /// Builds a validated automaton. Initial/accepting/transition lists are
    /// deduplicated and sorted; the deterministic flag is computed, never
    /// declared: it is set iff `|I| = 1` and Δ is a total function S × D → S.
    pub fn new(
        domain: Domain,
        states: Vec<String>,
        mut initial: Vec<StateId>,
        mut accepting: Vec<StateId>,
        mut transitions: Vec<Transition>,
    ) -> Result<Self, AutomatonError> {
        if states.is_empty() {
            return Err(AutomatonError::EmptyStates);
        }
        let n = states.len() as StateId;
        initial.sort_unstable();
        initial.dedup();
        if initial.is_empty() {
            return Err(AutomatonError::EmptyInitial);
        }
        accepting.sort_unstable();
        accepting.dedup();
        transitions.sort_unstable();
        transitions.dedup();
        for &s in initial.iter().chain(accepting.iter()) {
            if s >= n {
                return Err(AutomatonError::BadState(s));
            }
        }
        for t in &transitions {
            if t.from >= n || t.to >= n {
                return Err(AutomatonError::BadState(t.from.max(t.to)));
            }
            if t.sym as usize >= domain.size() {
                return Err(AutomatonError::BadSymbol(t.sym));
            }
        }
        let deterministic = initial.len() == 1 && {
            let mut seen = vec![0usize; states.len() * domain.size()];
            for t in &transitions {
                seen[t.from as usize * domain.size() + t.sym as usize] += 1;
            }
            seen.iter().all(|&c| c == 1)
        };
        Ok(Automaton { domain, states, initial, accepting, transitions, deterministic })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn accepting(&self) -> &[StateId] {
        &self.accepting
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// True iff the automaton has a single initial state and a total
    /// transition function.
    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// The size measure `|A| = |S| + |Δ|`.
    pub fn size(&self) -> usize {
        self.states.len() + self.transitions.len()
    }

    fn is_accepting(&self, s: StateId) -> bool {
        self.accepting.binary_search(&s).is_ok()
    }

    // ------------------------------------------------------------------
    // Parsing and serialization
    // ------------------------------------------------------------------

    /// Parses the line-based automaton format:
    ///
    /// ```text
    /// alphabet 0 1
    /// states q0 q1
    /// initial q0
    /// accepting q1
    /// trans q0 0 q1
    /// ```
    ///
    /// `#` starts a comment. `states`, `initial`, `accepting` and `trans`
    /// lines may be repeated; multiple initial states make an NFA.
    pub fn parse(text: &str) -> Result<Self, AutomatonError> {
        let mut alphabet: Vec<String> = Vec::new();
        let mut states: Vec<String> = Vec::new();
        let mut initial_names: Vec<(usize, String)> = Vec::new();
        let mut accepting_names: Vec<(usize, String)> = Vec::new();
        let mut trans_names: Vec<(usize, String, String, String)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let mut tokens = content.split_whitespace();
            let Some(keyword) = tokens.next() else { continue };
            let rest: Vec<&str> = tokens.collect();
            let err = |msg: String| AutomatonError::Parse { line, msg };
            match keyword {
                "alphabet" => alphabet.extend(rest.iter().map(|s| s.to_string())),
                "states" => {
                    for s in &rest {
                        if states.iter().any(|t| t == s) {
                            return Err(err(format!("duplicate state `{s}`")));
                        }
                        states.push(s.to_string());
                    }
                }
                "initial" => initial_names.extend(rest.iter().map(|s| (line, s.to_string()))),
                "accepting" => accepting_names.extend(rest.iter().map(|s| (line, s.to_string()))),
                "trans" => {
                    if rest.len() != 3 {
                        return Err(err("trans line needs `trans FROM SYMBOL TO`".into()));
                    }
                    trans_names.push((line, rest[0].into(), rest[1].into(), rest[2].into()));
                }
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }

        let domain = Domain::new(alphabet)?;
        if states.is_empty() {
            return Err(AutomatonError::EmptyStates);
        }
        let state_id = |line: usize, name: &str| -> Result<StateId, AutomatonError> {
            states
                .iter()
                .position(|s| s == name)
                .map(|i| i as StateId)
                .ok_or(AutomatonError::Parse { line, msg: format!("undeclared state `{name}`") })
        };
        let mut initial = Vec::new();
        for (line, name) in &initial_names {
            initial.push(state_id(*line, name)?);
        }
        if initial.is_empty() {
            return Err(AutomatonError::EmptyInitial);
        }
        let mut accepting = Vec::new();
        for (line, name) in &accepting_names {
            accepting.push(state_id(*line, name)?);
        }
        let mut transitions = Vec::new();
        for (line, from, sym, to) in &trans_names {
            let sym_id = domain.index_of(sym).ok_or(AutomatonError::Parse {
                line: *line,
                msg: format!("undeclared symbol `{sym}`"),
            })?;
            transitions.push(Transition {
                from: state_id(*line, from)?,
                sym: sym_id,
                to: state_id(*line, to)?,
            });
        }
        Automaton::new(domain, states, initial, accepting, transitions)
    }

    /// Canonical textual form; parses back to an equal automaton.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "alphabet {}", self.domain.symbols().join(" ")).unwrap();
        writeln!(out, "states {}", self.states.join(" ")).unwrap();
        let names = |ids: &[StateId]| {
            ids.iter().map(|&i| self.states[i as usize].as_str()).collect::<Vec<_>>().join(" ")
        };
        writeln!(out, "initial {}", names(&self.initial)).unwrap();
        if !self.accepting.is_empty() {
            writeln!(out, "accepting {}", names(&self.accepting)).unwrap();
        }
        for t in &self.transitions {
            writeln!(
                out,
                "trans {} {} {}",
                self.states[t.from as usize],
                self.domain.symbol(t.sym),
                self.states[t.to as usize]
            )
            .unwrap();
        }
        out
    }

    // ------------------------------------------------------------------
    // Runs and language queries
    // ------------------------------------------------------------------

    /// True iff some run from an initial state on `w` ends in an accepting
    /// state.
    pub fn accepts(&self, w: &[Sym]) -> bool {
        let stepper = Stepper::new(self);
        let mut cur = BitSet::new(self.states.len());
        for &s in &self.initial {
            cur.set(s as usize);
        }
        let mut next = BitSet::new(self.states.len());
        for &d in w {
            debug_assert!((d as usize) < self.domain.size());
            stepper.step(&cur, d, &mut next);
            std::mem::swap(&mut cur, &mut next);
            if cur.is_empty() {
                return false;
            }
        }
        self.accepting.iter().any(|&f| cur.get(f as usize))
    }

    /// Shortest accepted word (lexicographically least among shortest), or
    /// `None` when the language is empty. Linear in `|A|`.
    pub fn shortest_accepted(&self) -> Option<Word> {
        if self.initial.iter().any(|&s| self.is_accepting(s)) {
            return Some(Vec::new());
        }
        let adj = self.adjacency();
        let mut parent: Vec<Option<(StateId, Sym)>> = vec![None; self.states.len()];
        let mut visited = vec![false; self.states.len()];
        let mut queue = VecDeque::new();
        for &s in &self.initial {
            visited[s as usize] = true;
            queue.push_back(s);
        }
        while let Some(s) = queue.pop_front() {
            for d in self.domain.syms() {
                for &t in &adj[s as usize * self.domain.size() + d as usize] {
                    if !visited[t as usize] {
                        visited[t as usize] = true;
                        parent[t as usize] = Some((s, d));
                        if self.is_accepting(t) {
                            let mut word = Vec::new();
                            let mut cur = t;
                            while let Some((p, sym)) = parent[cur as usize] {
                                word.push(sym);
                                cur = p;
                            }
                            word.reverse();
                            return Some(word);
                        }
                        queue.push_back(t);
                    }
                }
            }
        }
        None
    }

    /// True iff the automaton accepts no word at all.
    pub fn is_empty(&self) -> bool {
        self.shortest_accepted().is_none()
    }

    /// An accepted word of exactly length `n` (lexicographically least), or
    /// `None`. Runs in `O(n·|A|)`.
    pub fn has_word_of_length(&self, n: usize) -> Option<Word> {
        let stepper = Stepper::new(self);
        stepper.constrained_word(n, |_, _| true)
    }

    /// True iff the automaton accepts infinitely many words: the trimmed
    /// automaton has a cycle (necessarily on an initial-to-accepting path).
    pub fn is_infinite(&self) -> bool {
        let trimmed = self.trim();
        if trimmed.accepting.is_empty() {
            return false;
        }
        // Cycle detection by iterative three-color DFS.
        let n = trimmed.states.len();
        let succ: Vec<Vec<StateId>> = {
            let mut v = vec![Vec::new(); n];
            for t in &trimmed.transitions {
                v[t.from as usize].push(t.to);
            }
            v
        };
        let mut color = vec![0u8; n]; // 0 white, 1 gray, 2 black
        for start in 0..n {
            if color[start] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            color[start] = 1;
            while let Some(&mut (s, ref mut i)) = stack.last_mut() {
                if *i < succ[s].len() {
                    let t = succ[s][*i] as usize;
                    *i += 1;
                    match color[t] {
                        0 => {
                            color[t] = 1;
                            stack.push((t, 0));
                        }
                        1 => return true,
                        _ => {}
                    }
                } else {
                    color[s] = 2;
                    stack.pop();
                }
            }
        }
        false
    }

    /// Number of accepted words of exactly length `n`, by dynamic
    /// programming over the determinized automaton.
    pub fn count_accepted(&self, n: usize) -> u128 {
        let det = if self.deterministic { self.clone() } else { self.determinize() };
        let ns = det.states.len();
        let d = det.domain.size();
        let mut table = vec![0u32; ns * d];
        for t in &det.transitions {
            table[t.from as usize * d + t.sym as usize] = t.to;
        }
        let mut cur = vec![0u128; ns];
        cur[det.initial[0] as usize] = 1;
        let mut next = vec![0u128; ns];
        for _ in 0..n {
            next.iter_mut().for_each(|x| *x = 0);
            for s in 0..ns {
                if cur[s] > 0 {
                    for sym in 0..d {
                        next[table[s * d + sym] as usize] += cur[s];
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        det.accepting.iter().map(|&f| cur[f as usize]).sum()
    }

    /// Classifies the growth of `gr_A(n)`: exponential iff some useful state
    /// of the trimmed determinized automaton lies on two distinct cycles,
    /// i.e. some state of a strongly connected component has two outgoing
    /// transitions staying inside the component.
    pub fn growth_class(&self) -> GrowthClass {
        let det = if self.deterministic { self.clone() } else { self.determinize() };
        let trimmed = det.trim();
        let scc = trimmed.scc_ids();
        let mut inner_out = vec![0usize; trimmed.states.len()];
        for t in &trimmed.transitions {
            if scc[t.from as usize] == scc[t.to as usize] {
                inner_out[t.from as usize] += 1;
            }
        }
        if inner_out.iter().any(|&c| c >= 2) {
            GrowthClass::Exponential
        } else {
            GrowthClass::Polynomial
        }
    }

    // ------------------------------------------------------------------
    // Constructions
    // ------------------------------------------------------------------

    /// Subset construction. The result is deterministic and complete (an
    /// explicit non-accepting sink is the empty subset), accepts the same
    /// language, and has at most `2^|S|` states. Discovery order (BFS,
    /// symbols in domain order) fixes the state numbering.
    pub fn determinize(&self) -> Automaton {
        let stepper = Stepper::new(self);
        let n = self.states.len();
        let mut start = BitSet::new(n);
        for &s in &self.initial {
            start.set(s as usize);
        }
        let mut ids: HashMap<Vec<u64>, StateId> = HashMap::new();
        let mut subsets: Vec<BitSet> = Vec::new();
        let mut queue = VecDeque::new();
        ids.insert(start.words().to_vec(), 0);
        subsets.push(start);
        queue.push_back(0u32);
        let mut transitions = Vec::new();
        let mut next = BitSet::new(n);
        while let Some(id) = queue.pop_front() {
            for d in self.domain.syms() {
                let cur = subsets[id as usize].clone();
                stepper.step(&cur, d, &mut next);
                let key = next.words().to_vec();
                let to = match ids.get(&key) {
                    Some(&to) => to,
                    None => {
                        let to = subsets.len() as StateId;
                        ids.insert(key, to);
                        subsets.push(next.clone());
                        queue.push_back(to);
                        to
                    }
                };
                transitions.push(Transition { from: id, sym: d, to });
            }
        }
        let accepting: Vec<StateId> = subsets
            .iter()
            .enumerate()
            .filter(|(_, set)| self.accepting.iter().any(|&f| set.get(f as usize)))
            .map(|(i, _)| i as StateId)
            .collect();
        let names = (0..subsets.len()).map(|i| format!("d{i}")).collect();
        Automaton::new(self.domain.clone(), names, vec![0], accepting, transitions)
            .expect("subset construction is well formed")
    }

    /// Complement after internal determinization.
    pub fn complement(&self) -> Automaton {
        let det = self.determinize();
        let accepting: Vec<StateId> = (0..det.states.len() as StateId)
            .filter(|s| !det.is_accepting(*s))
            .collect();
        Automaton::new(det.domain, det.states, det.initial, accepting, det.transitions)
            .expect("complement preserves shape")
    }

    /// Synchronized product recognizing the intersection of the languages.
    pub fn intersect(&self, other: &Automaton) -> Result<Automaton, AutomatonError> {
        if self.domain != other.domain {
            return Err(AutomatonError::DomainMismatch(
                self.domain.to_string(),
                other.domain.to_string(),
            ));
        }
        let adj_a = self.adjacency();
        let adj_b = other.adjacency();
        let d = self.domain.size();
        let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut pairs: Vec<(StateId, StateId)> = Vec::new();
        let mut queue = VecDeque::new();
        for &a in &self.initial {
            for &b in &other.initial {
                if let std::collections::hash_map::Entry::Vacant(e) = ids.entry((a, b)) {
                    e.insert(pairs.len() as StateId);
                    pairs.push((a, b));
                    queue.push_back((a, b));
                }
            }
        }
        let mut transitions = Vec::new();
        while let Some((a, b)) = queue.pop_front() {
            let from = ids[&(a, b)];
            for sym in self.domain.syms() {
                for &ta in &adj_a[a as usize * d + sym as usize] {
                    for &tb in &adj_b[b as usize * d + sym as usize] {
                        let to = match ids.get(&(ta, tb)) {
                            Some(&to) => to,
                            None => {
                                let to = pairs.len() as StateId;
                                ids.insert((ta, tb), to);
                                pairs.push((ta, tb));
                                queue.push_back((ta, tb));
                                to
                            }
                        };
                        transitions.push(Transition { from, sym, to });
                    }
                }
            }
        }
        let accepting: Vec<StateId> = pairs
            .iter()
            .enumerate()
            .filter(|(_, (a, b))| self.is_accepting(*a) && other.is_accepting(*b))
            .map(|(i, _)| i as StateId)
            .collect();
        let initial: Vec<StateId> = (0..self.initial.len() * other.initial.len())
            .map(|i| i as StateId)
            .collect();
        let names = (0..pairs.len()).map(|i| format!("p{i}")).collect();
        Automaton::new(self.domain.clone(), names, initial, accepting, transitions)
    }

    /// Removes states that are not on some initial-to-accepting path. When
    /// nothing survives, a single useless state is kept so the automaton
    /// stays well formed (it accepts nothing).
    pub fn trim(&self) -> Automaton {
        let n = self.states.len();
        let mut fwd = vec![false; n];
        let mut stack: Vec<StateId> = self.initial.clone();
        for &s in &self.initial {
            fwd[s as usize] = true;
        }
        let succ: Vec<Vec<StateId>> = {
            let mut v = vec![Vec::new(); n];
            for t in &self.transitions {
                v[t.from as usize].push(t.to);
            }
            v
        };
        while let Some(s) = stack.pop() {
            for &t in &succ[s as usize] {
                if !fwd[t as usize] {
                    fwd[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        let mut bwd = vec![false; n];
        let pred: Vec<Vec<StateId>> = {
            let mut v = vec![Vec::new(); n];
            for t in &self.transitions {
                v[t.to as usize].push(t.from);
            }
            v
        };
        let mut stack: Vec<StateId> = self.accepting.clone();
        for &s in &self.accepting {
            bwd[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &t in &pred[s as usize] {
                if !bwd[t as usize] {
                    bwd[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&i| fwd[i] && bwd[i]).collect();
        if keep.is_empty() || !self.initial.iter().any(|&s| fwd[s as usize] && bwd[s as usize]) {
            return Automaton::new(
                self.domain.clone(),
                vec!["t0".into()],
                vec![0],
                vec![],
                vec![],
            )
            .unwrap();
        }
        let mut remap = vec![StateId::MAX; n];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new as StateId;
        }
        let states = keep.iter().map(|&i| self.states[i].clone()).collect();
        let initial = self
            .initial
            .iter()
            .filter(|&&s| remap[s as usize] != StateId::MAX)
            .map(|&s| remap[s as usize])
            .collect();
        let accepting = self
            .accepting
            .iter()
            .filter(|&&s| remap[s as usize] != StateId::MAX)
            .map(|&s| remap[s as usize])
            .collect();
        let transitions = self
            .transitions
            .iter()
            .filter(|t| remap[t.from as usize] != StateId::MAX && remap[t.to as usize] != StateId::MAX)
            .map(|t| Transition { from: remap[t.from as usize], sym: t.sym, to: remap[t.to as usize] })
            .collect();
        Automaton::new(self.domain.clone(), states, initial, accepting, transitions).unwrap()
    }

    /// Relabels every transition symbol through `map` (a permutation of the
    /// domain indices). Used for the 0↔1 duality between ∧ and ∨ solving.
    pub fn relabel(&self, map: &[Sym]) -> Automaton {
        assert_eq!(map.len(), self.domain.size());
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition { from: t.from, sym: map[t.sym as usize], to: t.to })
            .collect();
        Automaton::new(
            self.domain.clone(),
            self.states.clone(),
            self.initial.clone(),
            self.accepting.clone(),
            transitions,
        )
        .expect("relabel preserves shape")
    }

    // ------------------------------------------------------------------
    // Internals
    // ------------------------------------------------------------------

    /// Language-equivalent deterministic complete automaton with merged
    /// indistinguishable states (Moore partition refinement). Internal
    /// accelerator for the quaternary polymorphism search; minimization is
    /// deliberately not part of the public surface.
    pub(crate) fn minimized(&self) -> Automaton {
        let det = if self.deterministic { self.clone() } else { self.determinize() };
        let n = det.states.len();
        let d = det.domain.size();
        let mut table = vec![0u32; n * d];
        for t in &det.transitions {
            table[t.from as usize * d + t.sym as usize] = t.to;
        }
        let mut class = vec![0u32; n];
        for &f in &det.accepting {
            class[f as usize] = 1;
        }
        loop {
            let mut sig_ids: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next_class = vec![0u32; n];
            for s in 0..n {
                let mut sig = Vec::with_capacity(d + 1);
                sig.push(class[s]);
                for sym in 0..d {
                    sig.push(class[table[s * d + sym] as usize]);
                }
                let fresh = sig_ids.len() as u32;
                next_class[s] = *sig_ids.entry(sig).or_insert(fresh);
            }
            if next_class == class {
                break;
            }
            class = next_class;
        }
        // Rebuild over reachable classes, numbered in BFS discovery order.
        let start_class = class[det.initial[0] as usize];
        let mut repr: HashMap<u32, StateId> = HashMap::new();
        let mut order: Vec<u32> = Vec::new();
        let mut member: Vec<usize> = Vec::new();
        repr.insert(start_class, 0);
        order.push(start_class);
        member.push(det.initial[0] as usize);
        let mut queue = VecDeque::new();
        queue.push_back(det.initial[0] as usize);
        let mut transitions = Vec::new();
        let mut seen = vec![false; n];
        seen[det.initial[0] as usize] = true;
        while let Some(s) = queue.pop_front() {
            let from = repr[&class[s]];
            for sym in 0..d {
                let t = table[s * d + sym] as usize;
                let to = match repr.get(&class[t]) {
                    Some(&id) => id,
                    None => {
                        let id = order.len() as StateId;
                        repr.insert(class[t], id);
                        order.push(class[t]);
                        member.push(t);
                        id
                    }
                };
                transitions.push(Transition { from, sym: sym as Sym, to });
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        transitions.sort_unstable();
        transitions.dedup();
        let accepting: Vec<StateId> = (0..order.len())
            .filter(|&i| det.is_accepting(member[i] as StateId))
            .map(|i| i as StateId)
            .collect();
        let names = (0..order.len()).map(|i| format!("m{i}")).collect();
        Automaton::new(det.domain.clone(), names, vec![0], accepting, transitions)
            .expect("minimization preserves shape")
    }

    /// Successor lists indexed by `state * |D| + sym`.
    pub(crate) fn adjacency(&self) -> Vec<Vec<StateId>> {
        let d = self.domain.size();
        let mut adj = vec![Vec::new(); self.states.len() * d];
        for t in &self.transitions {
            adj[t.from as usize * d + t.sym as usize].push(t.to);
        }
        adj
    }

    /// Tarjan strongly connected components; returns the component id of
    /// every state.
    fn scc_ids(&self) -> Vec<usize> {
        let n = self.states.len();
        let succ: Vec<Vec<StateId>> = {
            let mut v = vec![Vec::new(); n];
            for t in &self.transitions {
                v[t.from as usize].push(t.to);
            }
            v
        };
        let mut index = vec![usize::MAX; n];
        let mut lowlink = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut scc = vec![usize::MAX; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut next_index = 0usize;
        let mut next_scc = 0usize;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next_index;
            lowlink[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut i)) = call.last_mut() {
                if *i < succ[v].len() {
                    let w = succ[v][*i] as usize;
                    *i += 1;
                    if index[w] == usize::MAX {
                        index[w] = next_index;
                        lowlink[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        lowlink[v] = lowlink[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(p, _)) = call.last() {
                        lowlink[p] = lowlink[p].min(lowlink[v]);
                    }
                    if lowlink[v] == index[v] {
                        loop {
                            let w = stack.pop().unwrap();
                            on_stack[w] = false;
                            scc[w] = next_scc;
                            if w == v {
                                break;
                            }
                        }
                        next_scc += 1;
                    }
                }
            }
        }
        scc
    }
}

// ----------------------------------------------------------------------
// Bit sets and synchronized stepping
// ----------------------------------------------------------------------

/// Fixed-capacity bit set over state indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitSet {
    bits: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { bits: vec![0; len.div_ceil(64)], len }
    }

    pub fn set(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn clear(&mut self) {
        self.bits.iter_mut().for_each(|w| *w = 0);
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn or_assign(&mut self, other: &BitSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn and_assign(&mut self, other: &BitSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

/// Precomputed per-(state, symbol) successor bit sets: synchronized stepping
/// of state sets without determinizing. All pattern-driven searches run on
/// this.
pub(crate) struct Stepper<'a> {
    aut: &'a Automaton,
    // indexed [sym][state]
    succ: Vec<Vec<BitSet>>,
    rev: Vec<Vec<BitSet>>,
}

impl<'a> Stepper<'a> {
    pub fn new(aut: &'a Automaton) -> Self {
        let n = aut.states.len();
        let d = aut.domain.size();
        let mut succ = vec![vec![BitSet::new(n); n]; d];
        let mut rev = vec![vec![BitSet::new(n); n]; d];
        for t in &aut.transitions {
            succ[t.sym as usize][t.from as usize].set(t.to as usize);
            rev[t.sym as usize][t.to as usize].set(t.from as usize);
        }
        Stepper { aut, succ, rev }
    }

    pub fn automaton(&self) -> &Automaton {
        self.aut
    }

    pub fn state_count(&self) -> usize {
        self.aut.states.len()
    }

    pub fn initial_set(&self) -> BitSet {
        let mut s = BitSet::new(self.aut.states.len());
        for &i in &self.aut.initial {
            s.set(i as usize);
        }
        s
    }

    pub fn accepting_set(&self) -> BitSet {
        let mut s = BitSet::new(self.aut.states.len());
        for &f in &self.aut.accepting {
            s.set(f as usize);
        }
        s
    }

    pub fn step(&self, cur: &BitSet, sym: Sym, out: &mut BitSet) {
        out.clear();
        for s in cur.iter_ones() {
            out.or_assign(&self.succ[sym as usize][s]);
        }
    }

    pub fn step_rev(&self, cur: &BitSet, sym: Sym, out: &mut BitSet) {
        out.clear();
        for s in cur.iter_ones() {
            out.or_assign(&self.rev[sym as usize][s]);
        }
    }

    /// Core of every pattern-driven search (extendability in `O(n·|A|)`):
    /// finds the lexicographically least accepted word `t` of length `n`
    /// with `allowed(i, t[i])` at every position, if one exists. Forward
    /// reachable layers are pruned backwards from the accepting set, then a
    /// greedy pass picks the least viable symbol per position.
    pub fn constrained_word(&self, n: usize, allowed: impl Fn(usize, Sym) -> bool) -> Option<Word> {
        let mut layers: Vec<BitSet> = Vec::with_capacity(n + 1);
        layers.push(self.initial_set());
        let mut next = BitSet::new(self.state_count());
        let mut buf = BitSet::new(self.state_count());
        for i in 0..n {
            next.clear();
            for d in self.aut.domain.syms() {
                if allowed(i, d) {
                    self.step(&layers[i], d, &mut buf);
                    next.or_assign(&buf);
                }
            }
            if next.is_empty() {
                return None;
            }
            layers.push(next.clone());
        }
        // Prune each layer to states that still reach acceptance.
        layers[n].and_assign(&self.accepting_set());
        if layers[n].is_empty() {
            return None;
        }
        for i in (0..n).rev() {
            next.clear();
            for d in self.aut.domain.syms() {
                if allowed(i, d) {
                    self.step_rev(&layers[i + 1], d, &mut buf);
                    next.or_assign(&buf);
                }
            }
            layers[i].and_assign(&next);
            if layers[i].is_empty() {
                return None;
            }
        }
        // Greedy extraction of the least word through the pruned layers.
        let mut word = Vec::with_capacity(n);
        let mut cur = layers[0].clone();
        for i in 0..n {
            let mut chosen = None;
            for d in self.aut.domain.syms() {
                if !allowed(i, d) {
                    continue;
                }
                self.step(&cur, d, &mut buf);
                buf.and_assign(&layers[i + 1]);
                if !buf.is_empty() {
                    chosen = Some(d);
                    break;
                }
            }
            let d = chosen?;
            self.step(&cur, d, &mut buf);
            buf.and_assign(&layers[i + 1]);
            std::mem::swap(&mut cur, &mut buf);
            word.push(d);
        }
        Some(word)
    }
}
