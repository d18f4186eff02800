//! Finite operation tables and polymorphism detection.
//!
//! An operation `f : D^k → D` is a polymorphism of the constraint language
//! `Γ_A` when applying `f` columnwise to any k equal-length accepted words
//! yields an accepted word. The check builds a refutation product with
//! state space `S^{k+1}`: it accepts exactly the convolutions
//! `(x_1, …, x_k, f_ω(x̄))` where every `x_i` is accepted and the image is
//! not, so `f` is a polymorphism iff the product is empty.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::{Automaton, Transition};
use crate::domain::{Domain, DomainError, Sym, Word};

#[derive(Debug, Error)]
pub enum OpError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("operation arity must be at least 1")]
    ZeroArity,
    #[error("operation table must have exactly {expected} rows, got {got}")]
    WrongRowCount { expected: usize, got: usize },
    #[error("operation domain {0} does not match automaton domain {1}")]
    DomainMismatch(String, String),
    #[error("operation requires a Boolean domain, got {0}")]
    NonBooleanDomain(String),
    #[error("tuple alphabet of size {0} exceeds the supported maximum")]
    AlphabetTooLarge(u64),
    #[error("product automaton with {0} states is too large to materialize")]
    ProductTooLarge(u128),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// A total k-ary operation `f : D^k → D` stored as the `|D|^k`-row table.
/// Rows are ordered lexicographically by argument tuple, first argument most
/// significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationTable {
    domain: Domain,
    arity: usize,
    values: Vec<Sym>,
}

impl OperationTable {
    pub fn new(domain: Domain, arity: usize, values: Vec<Sym>) -> Result<Self, OpError> {
        if arity == 0 {
            return Err(OpError::ZeroArity);
        }
        let expected = domain.size().pow(arity as u32);
        if values.len() != expected {
            return Err(OpError::WrongRowCount { expected, got: values.len() });
        }
        for &v in &values {
            if v as usize >= domain.size() {
                return Err(OpError::Parse {
                    line: 0,
                    msg: format!("value index {v} outside the domain"),
                });
            }
        }
        Ok(OperationTable { domain, arity, values })
    }

    /// Builds a table from a function.
    pub fn from_fn(domain: Domain, arity: usize, f: impl Fn(&[Sym]) -> Sym) -> Self {
        let rows = domain.size().pow(arity as u32);
        let mut values = Vec::with_capacity(rows);
        let mut args = vec![0 as Sym; arity];
        for r in 0..rows {
            decode_row(r, domain.size(), &mut args);
            values.push(f(&args));
        }
        OperationTable { domain, arity, values }
    }

    /// Parses the operation-table format:
    ///
    /// ```text
    /// alphabet 0 1
    /// arity 2
    /// map 0 0 -> 0
    /// map 0 1 -> 0
    /// map 1 0 -> 0
    /// map 1 1 -> 1
    /// ```
    ///
    /// Exactly `|D|^k` distinct `map` lines are required.
    pub fn parse(text: &str) -> Result<Self, OpError> {
        let mut alphabet: Vec<String> = Vec::new();
        let mut arity: Option<usize> = None;
        let mut rows: Vec<(usize, Vec<String>, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let mut tokens = content.split_whitespace();
            let Some(keyword) = tokens.next() else { continue };
            let rest: Vec<&str> = tokens.collect();
            let err = |msg: String| OpError::Parse { line, msg };
            match keyword {
                "alphabet" => alphabet.extend(rest.iter().map(|s| s.to_string())),
                "arity" => {
                    if rest.len() != 1 {
                        return Err(err("arity needs one integer".into()));
                    }
                    arity = Some(
                        rest[0].parse().map_err(|_| err(format!("bad arity `{}`", rest[0])))?,
                    );
                }
                "map" => {
                    let Some(pos) = rest.iter().position(|t| *t == "->") else {
                        return Err(err("map line needs `->`".into()));
                    };
                    if pos + 2 != rest.len() {
                        return Err(err("map needs exactly one value after `->`".into()));
                    }
                    rows.push((
                        line,
                        rest[..pos].iter().map(|s| s.to_string()).collect(),
                        rest[pos + 1].to_string(),
                    ));
                }
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }
        let domain = Domain::new(alphabet)?;
        let arity = arity.ok_or(OpError::Parse { line: 0, msg: "missing arity line".into() })?;
        if arity == 0 {
            return Err(OpError::ZeroArity);
        }
        let expected = domain.size().pow(arity as u32);
        let mut values: Vec<Option<Sym>> = vec![None; expected];
        for (line, args, value) in rows {
            let err = |msg: String| OpError::Parse { line, msg };
            if args.len() != arity {
                return Err(err(format!("map takes {arity} arguments, got {}", args.len())));
            }
            let mut syms = Vec::with_capacity(arity);
            for a in &args {
                syms.push(domain.index_of(a).ok_or_else(|| err(format!("unknown symbol `{a}`")))?);
            }
            let v = domain
                .index_of(&value)
                .ok_or_else(|| err(format!("unknown symbol `{value}`")))?;
            let r = encode_row(&syms, domain.size());
            if values[r].is_some() {
                return Err(err("duplicate map row".into()));
            }
            values[r] = Some(v);
        }
        let filled: Vec<Sym> = values
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or(OpError::WrongRowCount { expected, got: 0 })
            .map_err(|_| OpError::Parse { line: 0, msg: format!("table is missing rows; {expected} map lines required") })?;
        OperationTable::new(domain, arity, filled)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "alphabet {}", self.domain.symbols().join(" ")).unwrap();
        writeln!(out, "arity {}", self.arity).unwrap();
        let mut args = vec![0 as Sym; self.arity];
        for (r, &v) in self.values.iter().enumerate() {
            decode_row(r, self.domain.size(), &mut args);
            let names: Vec<&str> = args.iter().map(|&a| self.domain.symbol(a)).collect();
            writeln!(out, "map {} -> {}", names.join(" "), self.domain.symbol(v)).unwrap();
        }
        out
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Sym] {
        &self.values
    }

    pub fn apply(&self, args: &[Sym]) -> Sym {
        debug_assert_eq!(args.len(), self.arity);
        self.values[encode_row(args, self.domain.size())]
    }

    /// The lift `f_ω` applied to equal-length words, columnwise.
    pub fn apply_words(&self, words: &[&[Sym]]) -> Word {
        debug_assert_eq!(words.len(), self.arity);
        let n = words[0].len();
        debug_assert!(words.iter().all(|w| w.len() == n));
        let mut out = Vec::with_capacity(n);
        let mut col = vec![0 as Sym; self.arity];
        for i in 0..n {
            for (j, w) in words.iter().enumerate() {
                col[j] = w[i];
            }
            out.push(self.apply(&col));
        }
        out
    }

    pub fn is_idempotent(&self) -> bool {
        self.domain.syms().all(|d| self.apply(&vec![d; self.arity]) == d)
    }

    /// Binary, idempotent, commutative, associative.
    pub fn is_semilattice(&self) -> bool {
        if self.arity != 2 || !self.is_idempotent() {
            return false;
        }
        let d = self.domain.size() as Sym;
        for x in 0..d {
            for y in 0..d {
                if self.apply(&[x, y]) != self.apply(&[y, x]) {
                    return false;
                }
                for z in 0..d {
                    let left = self.apply(&[self.apply(&[x, y]), z]);
                    let right = self.apply(&[x, self.apply(&[y, z])]);
                    if left != right {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Ternary with `g(x,y,y) = g(y,x,y) = g(y,y,x) = y`.
    pub fn is_majority(&self) -> bool {
        self.arity == 3 && self.is_near_unanimity()
    }

    /// `g(x,y,…,y) = … = g(y,…,y,x) = y` for arity ≥ 3.
    pub fn is_near_unanimity(&self) -> bool {
        if self.arity < 3 {
            return false;
        }
        let d = self.domain.size() as Sym;
        for y in 0..d {
            for x in 0..d {
                for pos in 0..self.arity {
                    let mut args = vec![y; self.arity];
                    args[pos] = x;
                    if self.apply(&args) != y {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Quaternary with `f(r,a,r,e) = f(a,r,e,a)`.
    pub fn is_siggers(&self) -> bool {
        if self.arity != 4 {
            return false;
        }
        let d = self.domain.size() as Sym;
        for r in 0..d {
            for a in 0..d {
                for e in 0..d {
                    if self.apply(&[r, a, r, e]) != self.apply(&[a, r, e, a]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The affine operation `f_q(x, y, z) = x − y + z` over GF(q).
    pub fn affine(q: u16) -> Result<Self, OpError> {
        let domain = Domain::gf(q)?;
        Ok(OperationTable::from_fn(domain, 3, |args| {
            let (x, y, z) = (args[0] as i32, args[1] as i32, args[2] as i32);
            ((x - y + z).rem_euclid(q as i32)) as Sym
        }))
    }
}

fn encode_row(args: &[Sym], d: usize) -> usize {
    let mut r = 0usize;
    for &a in args {
        r = r * d + a as usize;
    }
    r
}

fn decode_row(mut r: usize, d: usize, out: &mut [Sym]) {
    for slot in out.iter_mut().rev() {
        *slot = (r % d) as Sym;
        r /= d;
    }
}

// ----------------------------------------------------------------------
// The six Schaefer operations
// ----------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchaeferOp {
    Const0,
    Const1,
    And,
    Or,
    Maj,
    Minor,
}

impl SchaeferOp {
    /// The fixed evaluation order 0, 1, ∧, ∨, Maj, Minor.
    pub fn all() -> [SchaeferOp; 6] {
        [
            SchaeferOp::Const0,
            SchaeferOp::Const1,
            SchaeferOp::And,
            SchaeferOp::Or,
            SchaeferOp::Maj,
            SchaeferOp::Minor,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchaeferOp::Const0 => "const0",
            SchaeferOp::Const1 => "const1",
            SchaeferOp::And => "and",
            SchaeferOp::Or => "or",
            SchaeferOp::Maj => "maj",
            SchaeferOp::Minor => "minor",
        }
    }

    pub fn from_name(name: &str) -> Option<SchaeferOp> {
        SchaeferOp::all().into_iter().find(|op| op.name() == name)
    }

    pub fn table(&self) -> OperationTable {
        let b = Domain::boolean();
        match self {
            SchaeferOp::Const0 => OperationTable::from_fn(b, 1, |_| 0),
            SchaeferOp::Const1 => OperationTable::from_fn(b, 1, |_| 1),
            SchaeferOp::And => OperationTable::from_fn(b, 2, |a| a[0] & a[1]),
            SchaeferOp::Or => OperationTable::from_fn(b, 2, |a| a[0] | a[1]),
            SchaeferOp::Maj => OperationTable::from_fn(b, 3, |a| {
                if a[0] as u8 + a[1] as u8 + a[2] as u8 >= 2 {
                    1
                } else {
                    0
                }
            }),
            SchaeferOp::Minor => OperationTable::from_fn(b, 3, |a| a[0] ^ a[1] ^ a[2]),
        }
    }
}

// ----------------------------------------------------------------------
// Convolution alphabets and the graph automaton of f_ω
// ----------------------------------------------------------------------

/// The alphabet `D^width` of synchronized tuples. Symbol names are the
/// concatenated component symbols (joined with `,` when components are not
/// single characters).
pub fn tuple_domain(base: &Domain, width: usize) -> Result<Domain, OpError> {
    let size = (base.size() as u64).checked_pow(width as u32).filter(|&s| s <= Sym::MAX as u64);
    let Some(size) = size else {
        return Err(OpError::AlphabetTooLarge(
            (base.size() as u64).saturating_pow(width as u32),
        ));
    };
    let single = base.symbols().iter().all(|s| s.chars().count() == 1);
    let mut names = Vec::with_capacity(size as usize);
    let mut col = vec![0 as Sym; width];
    for r in 0..size as usize {
        decode_row(r, base.size(), &mut col);
        let parts: Vec<&str> = col.iter().map(|&c| base.symbol(c)).collect();
        names.push(if single { parts.concat() } else { parts.join(",") });
    }
    Ok(Domain::new(names)?)
}

/// Index of a column tuple within [`tuple_domain`].
pub fn tuple_sym(base_size: usize, column: &[Sym]) -> Sym {
    encode_row(column, base_size) as Sym
}

/// Convolution of equal-length words into a word over [`tuple_domain`].
pub fn convolve(base_size: usize, words: &[&[Sym]]) -> Word {
    let n = words[0].len();
    debug_assert!(words.iter().all(|w| w.len() == n));
    let mut out = Vec::with_capacity(n);
    let mut col = vec![0 as Sym; words.len()];
    for i in 0..n {
        for (j, w) in words.iter().enumerate() {
            col[j] = w[i];
        }
        out.push(tuple_sym(base_size, &col));
    }
    out
}

/// The two-state automaton recognizing the graph of `f_ω`: convolutions
/// `(x_1, …, x_k, f_ω(x̄))` of equal-length words. Transitions matching a
/// table row loop on the accepting start state; all other tuples fall into
/// a dead state.
pub fn graph_automaton(f: &OperationTable) -> Result<Automaton, OpError> {
    let width = f.arity() + 1;
    let alphabet = tuple_domain(f.domain(), width)?;
    let d = f.domain().size();
    let rows = d.pow(f.arity() as u32);
    let mut transitions = Vec::with_capacity(alphabet.size());
    for r in 0..rows {
        for e in 0..d as Sym {
            let label = (r * d + e as usize) as Sym;
            let to = if f.values()[r] == e { 0 } else { 1 };
            transitions.push(Transition { from: 0, sym: label, to });
        }
    }
    Ok(Automaton::new(
        alphabet,
        vec!["s".into(), "dead".into()],
        vec![0],
        vec![0],
        transitions,
    )
    .expect("graph automaton is well formed"))
}

// ----------------------------------------------------------------------
// Polymorphism checking
// ----------------------------------------------------------------------

/// A machine-checkable refutation: each input is accepted, the output is
/// the columnwise image under the table, and the output is rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub inputs: Vec<Word>,
    pub output: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolymorphismVerdict {
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

impl PolymorphismVerdict {
    fn holds() -> Self {
        PolymorphismVerdict { holds: true, counterexample: None }
    }
}

struct DetTable {
    m: usize,
    d: usize,
    delta: Vec<u32>,
    accepting: Vec<bool>,
    initial: u32,
}

impl DetTable {
    fn of(det: &Automaton) -> DetTable {
        debug_assert!(det.is_deterministic());
        let m = det.state_count();
        let d = det.domain().size();
        let mut delta = vec![0u32; m * d];
        for t in det.transitions() {
            delta[t.from as usize * d + t.sym as usize] = t.to;
        }
        let mut accepting = vec![false; m];
        for &f in det.accepting() {
            accepting[f as usize] = true;
        }
        DetTable { m, d, delta, accepting, initial: det.initial()[0] }
    }

    #[inline]
    fn step(&self, s: u32, sym: usize) -> u32 {
        self.delta[s as usize * self.d + sym]
    }
}

fn determinized(a: &Automaton) -> std::borrow::Cow<'_, Automaton> {
    if a.is_deterministic() {
        std::borrow::Cow::Borrowed(a)
    } else {
        std::borrow::Cow::Owned(a.determinize())
    }
}

/// Decides whether `f` is a polymorphism of `Γ_A` by breadth-first
/// emptiness of the refutation product; a nonempty product yields the
/// shortest counterexample tuple (lexicographically least among shortest).
/// NFAs are determinized first; for deterministic complete input the
/// exploration is `O(|A|^{k+1})`.
pub fn is_polymorphism(a: &Automaton, f: &OperationTable) -> PolymorphismVerdict {
    assert_eq!(
        a.domain(),
        f.domain(),
        "is_polymorphism requires matching domains; use check_user_table for fallible checks"
    );
    let det = determinized(a);
    is_polymorphism_det(&DetTable::of(&det), f)
}

/// Decoded table rows: the k argument symbols per row, flattened.
fn table_rows(f: &OperationTable) -> Vec<Sym> {
    let k = f.arity();
    let d = f.domain().size();
    let rows = d.pow(k as u32);
    let mut row_syms: Vec<Sym> = Vec::with_capacity(rows * k);
    let mut args = vec![0 as Sym; k];
    for r in 0..rows {
        decode_row(r, d, &mut args);
        row_syms.extend_from_slice(&args);
    }
    row_syms
}

fn counterexample_from_rows(f: &OperationTable, rows_on_path: &[usize]) -> Counterexample {
    let k = f.arity();
    let row_syms = table_rows(f);
    let mut inputs = vec![Vec::with_capacity(rows_on_path.len()); k];
    let mut output = Vec::with_capacity(rows_on_path.len());
    for &row in rows_on_path {
        for (i, input) in inputs.iter_mut().enumerate() {
            input.push(row_syms[row * k + i]);
        }
        output.push(f.values()[row]);
    }
    Counterexample { inputs, output }
}

// Product state spaces up to this size use flat arrays for the BFS
// bookkeeping; larger ones (possible only for adversarial inputs) fall
// back to hashing reachable codes.
const DENSE_PRODUCT_LIMIT: u128 = 4_000_000;

fn is_polymorphism_det(t: &DetTable, f: &OperationTable) -> PolymorphismVerdict {
    let k = f.arity();
    let total = (t.m as u128).saturating_pow(k as u32 + 1);
    if total <= DENSE_PRODUCT_LIMIT {
        is_polymorphism_dense(t, f, total as usize)
    } else {
        is_polymorphism_sparse(t, f)
    }
}

fn is_polymorphism_dense(t: &DetTable, f: &OperationTable, total: usize) -> PolymorphismVerdict {
    let k = f.arity();
    let m = t.m;
    let d = t.d;
    let rows = d.pow(k as u32);
    let row_syms = table_rows(f);
    let start = {
        let mut c = 0usize;
        for _ in 0..=k {
            c = c * m + t.initial as usize;
        }
        c
    };
    let mut parent: Vec<u32> = vec![u32::MAX; total];
    let mut parent_row: Vec<u32> = vec![0; total];
    let mut visited: Vec<bool> = vec![false; total];
    visited[start] = true;
    let mut queue: VecDeque<u32> = VecDeque::new();
    queue.push_back(start as u32);
    let mut states = vec![0u32; k + 1];
    while let Some(code) = queue.pop_front() {
        let mut c = code as usize;
        for i in (0..=k).rev() {
            states[i] = (c % m) as u32;
            c /= m;
        }
        for r in 0..rows {
            let mut next = 0usize;
            let mut all_accept = true;
            for i in 0..k {
                let ns = t.step(states[i], row_syms[r * k + i] as usize);
                all_accept &= t.accepting[ns as usize];
                next = next * m + ns as usize;
            }
            let nt = t.step(states[k], f.values()[r] as usize);
            next = next * m + nt as usize;
            if !visited[next] {
                visited[next] = true;
                parent[next] = code;
                parent_row[next] = r as u32;
                if all_accept && !t.accepting[nt as usize] {
                    let mut rows_on_path = Vec::new();
                    let mut cur = next;
                    while cur != start {
                        rows_on_path.push(parent_row[cur] as usize);
                        cur = parent[cur] as usize;
                    }
                    rows_on_path.reverse();
                    return PolymorphismVerdict {
                        holds: false,
                        counterexample: Some(counterexample_from_rows(f, &rows_on_path)),
                    };
                }
                queue.push_back(next as u32);
            }
        }
    }
    PolymorphismVerdict::holds()
}

fn is_polymorphism_sparse(t: &DetTable, f: &OperationTable) -> PolymorphismVerdict {
    let k = f.arity();
    let m = t.m as u128;
    let d = t.d;
    let rows = d.pow(k as u32);
    let row_syms = table_rows(f);
    let start: u128 = {
        let mut c = 0u128;
        for _ in 0..=k {
            c = c * m + t.initial as u128;
        }
        c
    };
    let mut parent: HashMap<u128, (u128, u32)> = HashMap::new();
    parent.insert(start, (u128::MAX, u32::MAX));
    let mut queue = VecDeque::new();
    queue.push_back(start);
    let mut states = vec![0u32; k + 1];
    while let Some(code) = queue.pop_front() {
        let mut c = code;
        for i in (0..=k).rev() {
            states[i] = (c % m) as u32;
            c /= m;
        }
        for r in 0..rows {
            let mut next_code = 0u128;
            let mut all_accept = true;
            for i in 0..k {
                let ns = t.step(states[i], row_syms[r * k + i] as usize);
                all_accept &= t.accepting[ns as usize];
                next_code = next_code * m + ns as u128;
            }
            let nt = t.step(states[k], f.values()[r] as usize);
            next_code = next_code * m + nt as u128;
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next_code) {
                e.insert((code, r as u32));
                if all_accept && !t.accepting[nt as usize] {
                    let mut rows_on_path = Vec::new();
                    let mut cur = next_code;
                    loop {
                        let &(p, row) = parent.get(&cur).unwrap();
                        if p == u128::MAX {
                            break;
                        }
                        rows_on_path.push(row as usize);
                        cur = p;
                    }
                    rows_on_path.reverse();
                    return PolymorphismVerdict {
                        holds: false,
                        counterexample: Some(counterexample_from_rows(f, &rows_on_path)),
                    };
                }
                queue.push_back(next_code);
            }
        }
    }
    PolymorphismVerdict::holds()
}

/// Materializes the full refutation product `A_f`:
/// for deterministic complete input with `|S|` states the result has
/// exactly `|S|^{k+1}` states, initial state `(q0,…,q0)`, accepting set
/// `F^k × (S ∖ F)`, over the convolution alphabet `D^{k+1}`.
pub fn product_automaton(a: &Automaton, f: &OperationTable) -> Result<Automaton, OpError> {
    if a.domain() != f.domain() {
        return Err(OpError::DomainMismatch(f.domain().to_string(), a.domain().to_string()));
    }
    let det = determinized(a);
    let t = DetTable::of(&det);
    let k = f.arity();
    let alphabet = tuple_domain(f.domain(), k + 1)?;
    let m = t.m as u128;
    let total = m.checked_pow(k as u32 + 1).ok_or(OpError::ProductTooLarge(u128::MAX))?;
    if total > 2_000_000 {
        return Err(OpError::ProductTooLarge(total));
    }
    let total = total as usize;
    let d = t.d;
    let rows = d.pow(k as u32);
    let mut states = Vec::with_capacity(total);
    let mut scratch = vec![0u32; k + 1];
    for code in 0..total {
        let mut c = code;
        for i in (0..=k).rev() {
            scratch[i] = (c % t.m) as u32;
            c /= t.m;
        }
        let name: Vec<&str> =
            scratch.iter().map(|&s| det.state_names()[s as usize].as_str()).collect();
        states.push(name.join("."));
    }
    let mut accepting = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut ok = true;
        for i in (0..=k).rev() {
            let s = (c % t.m) as u32;
            c /= t.m;
            if i == k {
                ok &= !t.accepting[s as usize];
            } else {
                ok &= t.accepting[s as usize];
            }
        }
        if ok {
            accepting.push(code as u32);
        }
    }
    let mut transitions = Vec::with_capacity(total * rows);
    let mut args = vec![0 as Sym; k];
    for code in 0..total {
        let mut c = code;
        for i in (0..=k).rev() {
            scratch[i] = (c % t.m) as u32;
            c /= t.m;
        }
        for r in 0..rows {
            decode_row(r, d, &mut args);
            let e = f.values()[r];
            let mut next = 0usize;
            for i in 0..k {
                next = next * t.m + t.step(scratch[i], args[i] as usize) as usize;
            }
            next = next * t.m + t.step(scratch[k], e as usize) as usize;
            let label = (r * d + e as usize) as Sym;
            transitions.push(Transition { from: code as u32, sym: label, to: next as u32 });
        }
    }
    let initial = {
        let mut c = 0usize;
        for _ in 0..=k {
            c = c * t.m + t.initial as usize;
        }
        c as u32
    };
    Ok(Automaton::new(alphabet, states, vec![initial], accepting, transitions)
        .expect("product automaton is well formed"))
}

/// Runs the six Schaefer checks over a Boolean automaton; returns the
/// subset of operations that are polymorphisms, in the fixed order
/// 0, 1, ∧, ∨, Maj, Minor.
pub fn schaefer_check(a: &Automaton) -> Result<Vec<SchaeferOp>, OpError> {
    if !a.domain().is_boolean() {
        return Err(OpError::NonBooleanDomain(a.domain().to_string()));
    }
    let det = determinized(a);
    let t = DetTable::of(&det);
    Ok(SchaeferOp::all()
        .into_iter()
        .filter(|op| is_polymorphism_det(&t, &op.table()).holds)
        .collect())
}

/// Polymorphism check for an arbitrary user-supplied table (the bounded-
/// arity family variant); errors on domain mismatch instead of panicking.
pub fn check_user_table(a: &Automaton, f: &OperationTable) -> Result<PolymorphismVerdict, OpError> {
    if a.domain() != f.domain() {
        return Err(OpError::DomainMismatch(f.domain().to_string(), a.domain().to_string()));
    }
    Ok(is_polymorphism(a, f))
}

/// Searches the 2^16 quaternary Boolean tables for a Siggers polymorphism
/// of `Γ_A`: filters by the identity `f(r,a,r,e) = f(a,r,e,a)`, then tests
/// each surviving table against the product construction, returning the
/// first hit in enumeration order.
pub fn siggers_check_boolean(a: &Automaton) -> Result<Option<OperationTable>, OpError> {
    if !a.domain().is_boolean() {
        return Err(OpError::NonBooleanDomain(a.domain().to_string()));
    }
    // The verdict only depends on the language, so shrink the DFA first;
    // the k=4 product is the costly part of the search.
    let det = determinized(a);
    let min = det.minimized();
    let t = DetTable::of(&min);
    // Accepted words of length <= 3 as bit patterns (LSB = position 0):
    // tables refuted already on these short slices skip the product.
    let short_slices: Vec<Vec<u8>> = (0..=3usize)
        .map(|n| {
            (0..1u8 << n)
                .filter(|&bits| {
                    let mut s = t.initial;
                    for i in 0..n {
                        s = t.step(s, (bits >> i & 1) as usize);
                    }
                    t.accepting[s as usize]
                })
                .collect()
        })
        .collect();
    let member: Vec<u16> = short_slices
        .iter()
        .map(|words| words.iter().fold(0u16, |acc, &w| acc | 1 << w))
        .collect();
    let quick_refuted = |values: &[Sym]| -> bool {
        for (n, words) in short_slices.iter().enumerate() {
            for &w in words {
                for &x in words {
                    for &y in words {
                        for &z in words {
                            let mut image = 0u8;
                            for i in 0..n {
                                let idx = ((w >> i & 1) << 3
                                    | (x >> i & 1) << 2
                                    | (y >> i & 1) << 1
                                    | (z >> i & 1)) as usize;
                                image |= (values[idx] as u8) << i;
                            }
                            if member[n] >> image & 1 == 0 {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    };
    for bits in 0u32..1 << 16 {
        let values: Vec<Sym> = (0..16).map(|r| (bits >> r & 1) as Sym).collect();
        let f = OperationTable { domain: Domain::boolean(), arity: 4, values };
        if !f.is_siggers() {
            continue;
        }
        if quick_refuted(f.values()) {
            continue;
        }
        if is_polymorphism_det(&t, &f).holds {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

// ----------------------------------------------------------------------
// The Boolean dichotomy
// ----------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    InP,
    NpComplete,
}

/// For an NP-complete language, one refuted arity per Schaefer operation:
/// `Γ' = {R_{n_f}}` is a finite NP-hard sub-language.
#[derive(Debug, Clone)]
pub struct HardnessWitness {
    pub op: SchaeferOp,
    pub arity: usize,
    pub counterexample: Counterexample,
}

#[derive(Debug, Clone)]
pub struct DichotomyVerdict {
    pub classification: Classification,
    pub tractable_ops: Vec<SchaeferOp>,
    pub witnesses: Vec<HardnessWitness>,
}

/// Full tractability classification of a Boolean automaton: `InP` iff some
/// Schaefer operation is a polymorphism; otherwise `NpComplete` together
/// with the six counterexample arities.
pub fn classify_dichotomy(a: &Automaton) -> Result<DichotomyVerdict, OpError> {
    if !a.domain().is_boolean() {
        return Err(OpError::NonBooleanDomain(a.domain().to_string()));
    }
    let det = determinized(a);
    let t = DetTable::of(&det);
    let mut tractable = Vec::new();
    let mut witnesses = Vec::new();
    for op in SchaeferOp::all() {
        let verdict = is_polymorphism_det(&t, &op.table());
        if verdict.holds {
            tractable.push(op);
        } else {
            let cex = verdict.counterexample.expect("failed verdicts carry counterexamples");
            witnesses.push(HardnessWitness { op, arity: cex.inputs[0].len(), counterexample: cex });
        }
    }
    if tractable.is_empty() {
        Ok(DichotomyVerdict {
            classification: Classification::NpComplete,
            tractable_ops: tractable,
            witnesses,
        })
    } else {
        Ok(DichotomyVerdict {
            classification: Classification::InP,
            tractable_ops: tractable,
            witnesses: Vec::new(),
        })
    }
}
