//! Solving via near-unanimity polymorphisms: relations closed under a k-ary
//! NU operation decompose into their (k−1)-ary projections, so an instance
//! translates into a network of (k−1)-ary relations over variable subsets.
//! Enforcing (k−1,k)-consistency on the network decides satisfiability,
//! and greedy variable-by-variable extension recovers a solution.
//!
//! The ternary case (majority) is kept as a concrete pipeline of its own:
//! binary networks over variable pairs, the classical path-consistency
//! deletion rule, and clique extension.

use std::collections::HashMap;

use thiserror::Error;

use crate::automaton::{Automaton, Stepper};
use crate::domain::{words_of_length, Domain, Sym, Word};
use crate::instance::{full_mask, mask_iter, Assignment, Instance, Pattern, SymMask};
use crate::ops::OperationTable;
use crate::SolveOutcome;

#[derive(Debug, Error)]
pub enum NuError {
    #[error("table is not a majority operation")]
    NotMajority,
    #[error("table is not a near-unanimity operation of arity >= 3")]
    NotNearUnanimity,
    #[error("operation domain {0} does not match instance domain {1}")]
    DomainMismatch(String, String),
    #[error("projection indices ({i}, {j}) out of range for arity {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("consistent network admitted no greedy extension; the closure precondition was violated")]
    ClosureViolated,
    #[error("solver produced an assignment that fails verification; the closure precondition was violated")]
    VerificationFailed,
}

// ----------------------------------------------------------------------
// Binary relations and networks (majority pipeline)
// ----------------------------------------------------------------------

/// A subset of `D²` stored as one support mask per first coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rel2 {
    d: usize,
    rows: Vec<SymMask>,
}

impl Rel2 {
    pub fn full(domain: &Domain) -> Self {
        Rel2 { d: domain.size(), rows: vec![full_mask(domain); domain.size()] }
    }

    pub fn empty(d: usize) -> Self {
        Rel2 { d, rows: vec![0; d] }
    }

    pub fn contains(&self, a: Sym, b: Sym) -> bool {
        self.rows[a as usize] >> b & 1 == 1
    }

    pub fn insert(&mut self, a: Sym, b: Sym) {
        self.rows[a as usize] |= 1 << b;
    }

    pub fn remove(&mut self, a: Sym, b: Sym) {
        self.rows[a as usize] &= !(1 << b);
    }

    /// Support of `a` in the second coordinate.
    pub fn row(&self, a: Sym) -> SymMask {
        self.rows[a as usize]
    }

    /// Support of `b` in the first coordinate.
    pub fn col(&self, b: Sym) -> SymMask {
        let mut mask = 0;
        for (a, &row) in self.rows.iter().enumerate() {
            if row >> b & 1 == 1 {
                mask |= 1 << a;
            }
        }
        mask
    }

    pub fn transpose(&self) -> Rel2 {
        let mut t = Rel2::empty(self.d);
        for a in 0..self.d {
            t.rows[a] = self.col(a as Sym);
        }
        t
    }

    pub fn intersect_assign(&mut self, other: &Rel2) {
        for (r, o) in self.rows.iter_mut().zip(&other.rows) {
            *r &= o;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// `{d : (d, d) ∈ rel}`.
    pub fn diagonal(&self) -> SymMask {
        let mut mask = 0;
        for a in 0..self.d {
            if self.contains(a as Sym, a as Sym) {
                mask |= 1 << a;
            }
        }
        mask
    }

    /// Member pairs in lexicographic order.
    pub fn tuples(&self) -> Vec<(Sym, Sym)> {
        let mut out = Vec::new();
        for a in 0..self.d as Sym {
            for b in mask_iter(self.rows[a as usize]) {
                out.push((a, b));
            }
        }
        out
    }

    /// Closure under a ternary operation, checked tuple-wise.
    pub fn closed_under(&self, g: &OperationTable) -> bool {
        let members = self.tuples();
        for &(a1, b1) in &members {
            for &(a2, b2) in &members {
                for &(a3, b3) in &members {
                    let a = g.apply(&[a1, a2, a3]);
                    let b = g.apply(&[b1, b2, b3]);
                    if !self.contains(a, b) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Binary constraint network over all variable pairs: `P_{xy} ⊆ D²` stored
/// for `x < y`, with `P_{yx}` the implicit transpose, plus unary domains.
#[derive(Debug, Clone)]
pub struct BinaryNetwork {
    var_names: Vec<String>,
    domain: Domain,
    unary: Vec<SymMask>,
    pairs: Vec<Rel2>,
}

fn pair_slot(n: usize, x: usize, y: usize) -> usize {
    debug_assert!(x < y && y < n);
    x * (2 * n - x - 1) / 2 + (y - x - 1)
}

impl BinaryNetwork {
    pub fn full(var_names: Vec<String>, domain: Domain) -> Self {
        let n = var_names.len();
        let slots = n * n.saturating_sub(1) / 2;
        BinaryNetwork {
            var_names,
            unary: vec![full_mask(&domain); n],
            pairs: vec![Rel2::full(&domain); slots],
            domain: domain.clone(),
        }
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn var_count(&self) -> usize {
        self.var_names.len()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn unary(&self, x: usize) -> SymMask {
        self.unary[x]
    }

    pub fn restrict_unary(&mut self, x: usize, mask: SymMask) {
        self.unary[x] &= mask;
    }

    /// The relation on the ordered pair (x, y), x ≠ y, as a copy oriented
    /// so the first coordinate is x.
    pub fn relation(&self, x: usize, y: usize) -> Rel2 {
        if x < y {
            self.pairs[pair_slot(self.var_count(), x, y)].clone()
        } else {
            self.pairs[pair_slot(self.var_count(), y, x)].transpose()
        }
    }

    /// Support mask for `b` over variable y given `x = a`.
    fn support(&self, x: usize, a: Sym, y: usize) -> SymMask {
        if x < y {
            self.pairs[pair_slot(self.var_count(), x, y)].row(a)
        } else {
            self.pairs[pair_slot(self.var_count(), y, x)].col(a)
        }
    }

    /// Intersects the stored relation on (x, y) with `rel` given oriented
    /// with x first.
    pub fn intersect(&mut self, x: usize, y: usize, rel: &Rel2) {
        assert_ne!(x, y);
        let n = self.var_count();
        if x < y {
            self.pairs[pair_slot(n, x, y)].intersect_assign(rel);
        } else {
            self.pairs[pair_slot(n, y, x)].intersect_assign(&rel.transpose());
        }
    }

    pub fn is_emptied(&self) -> bool {
        self.unary.contains(&0)
            || (self.var_count() >= 2 && self.pairs.iter().any(|p| p.is_empty()))
    }
}

/// The binary projection `π_{(i,j)} R_n` computed by two-point patterns,
/// one extendability test per pair of values. `O(n·|A|·|D|²)`.
pub fn binary_projection(a: &Automaton, n: usize, i: usize, j: usize) -> Result<Rel2, NuError> {
    if i >= j || j >= n {
        return Err(NuError::IndexOutOfRange { i, j, n });
    }
    Ok(binary_projection_with(&Stepper::new(a), n, i, j))
}

fn binary_projection_with(stepper: &Stepper<'_>, n: usize, i: usize, j: usize) -> Rel2 {
    let d = stepper.automaton().domain().size();
    let mut rel = Rel2::empty(d);
    for a in 0..d as Sym {
        for b in 0..d as Sym {
            let tau = Pattern::from_pairs(n, &[(i, a), (j, b)]);
            if stepper.extend_pattern(&tau).is_some() {
                rel.insert(a, b);
            }
        }
    }
    rel
}

/// Translates an instance over a majority-closed automaton into an
/// equivalent binary network: `P_{xy}` is the intersection of `R_{i,j}`
/// over all constraints and position pairs realizing (x, y); pairs never
/// co-occurring keep the full relation. Repeated positions of one variable
/// intersect the unary domain with the diagonal.
pub fn translate_majority(
    instance: &Instance,
    g: &OperationTable,
) -> Result<BinaryNetwork, NuError> {
    if !g.is_majority() {
        return Err(NuError::NotMajority);
    }
    if g.domain() != instance.domain() {
        return Err(NuError::DomainMismatch(
            g.domain().to_string(),
            instance.domain().to_string(),
        ));
    }
    let stepper = Stepper::new(instance.automaton());
    let mut net =
        BinaryNetwork::full(instance.variables().to_vec(), instance.domain().clone());
    for (v, _) in instance.variables().iter().enumerate() {
        net.restrict_unary(v, instance.allowed(v));
    }
    let mut cache: HashMap<(usize, usize, usize), Rel2> = HashMap::new();
    for c in instance.constraints() {
        let n = c.scope.len();
        if n == 1 {
            let mut mask = 0;
            for d in instance.domain().syms() {
                if instance.automaton().accepts(&[d]) {
                    mask |= 1 << d;
                }
            }
            net.restrict_unary(c.scope[0], mask);
            continue;
        }
        for i in 0..n {
            for j in i + 1..n {
                let rel = cache
                    .entry((n, i, j))
                    .or_insert_with(|| binary_projection_with(&stepper, n, i, j))
                    .clone();
                let (x, y) = (c.scope[i], c.scope[j]);
                if x == y {
                    net.restrict_unary(x, rel.diagonal());
                } else {
                    net.intersect(x, y, &rel);
                }
            }
        }
    }
    Ok(net)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    Consistent,
    Emptied,
}

/// Runs the path-consistency deletion rule together with arc and node
/// support until fixpoint: `(a,b)` is deleted from `P_{xy}` when some third
/// variable z admits no `c` with `(a,c) ∈ P_{xz}` and `(b,c) ∈ P_{yz}`.
/// `O(|V|³·|D|³)` per sweep.
pub fn enforce_path_consistency(net: &mut BinaryNetwork) -> Propagation {
    let n = net.var_count();
    let d = net.domain.size();
    loop {
        let mut changed = false;
        // node/arc support
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                for a in mask_iter(net.unary[x]).collect::<Vec<_>>() {
                    if net.support(x, a, y) & net.unary[y] == 0 {
                        net.unary[x] &= !(1 << a);
                        changed = true;
                    }
                }
            }
        }
        for x in 0..n {
            for y in x + 1..n {
                let slot = pair_slot(n, x, y);
                for a in 0..d as Sym {
                    let masked = net.pairs[slot].row(a)
                        & net.unary[y]
                        & if net.unary[x] >> a & 1 == 1 { !0 } else { 0 };
                    if masked != net.pairs[slot].row(a) {
                        net.pairs[slot].rows[a as usize] = masked;
                        changed = true;
                    }
                }
            }
        }
        // path rule
        for x in 0..n {
            for y in x + 1..n {
                let slot = pair_slot(n, x, y);
                for a in 0..d as Sym {
                    for b in mask_iter(net.pairs[slot].row(a)).collect::<Vec<_>>() {
                        for z in 0..n {
                            if z == x || z == y {
                                continue;
                            }
                            let witness =
                                net.support(x, a, z) & net.support(y, b, z) & net.unary[z];
                            if witness == 0 {
                                net.pairs[slot].remove(a, b);
                                changed = true;
                                break;
                            }
                        }
                    }
                }
            }
        }
        if net.is_emptied() {
            return Propagation::Emptied;
        }
        if !changed {
            return Propagation::Consistent;
        }
    }
}

/// Clique extension on a path-consistent network: variables in declaration
/// order, each assigned the least domain value compatible with everything
/// already assigned. Succeeds on any nonempty path-consistent network whose
/// relations are closed under a majority operation.
pub fn extract_assignment(net: &BinaryNetwork) -> Option<Assignment> {
    let n = net.var_count();
    let mut values: Vec<Sym> = Vec::with_capacity(n);
    for w in 0..n {
        let mut chosen = None;
        'candidates: for d in mask_iter(net.unary[w]) {
            for (x, &a) in values.iter().enumerate() {
                if net.support(x, a, w) >> d & 1 == 0 {
                    continue 'candidates;
                }
            }
            chosen = Some(d);
            break;
        }
        values.push(chosen?);
    }
    Some(Assignment::new(values))
}

/// Decides a binary network with relations in `Inv(g)` for a majority `g`:
/// path consistency, then clique extension.
pub fn path_consistency_solve(
    net: &BinaryNetwork,
    g: &OperationTable,
) -> Result<SolveOutcome, NuError> {
    if !g.is_majority() {
        return Err(NuError::NotMajority);
    }
    let mut net = net.clone();
    if enforce_path_consistency(&mut net) == Propagation::Emptied {
        return Ok(SolveOutcome::Unsat);
    }
    debug_assert!(
        (0..net.var_count())
            .flat_map(|x| (x + 1..net.var_count()).map(move |y| (x, y)))
            .all(|(x, y)| net.relation(x, y).closed_under(g)),
        "deletion must preserve closure under g"
    );
    match extract_assignment(&net) {
        Some(phi) => Ok(SolveOutcome::Sat(phi)),
        None => Err(NuError::ClosureViolated),
    }
}

// ----------------------------------------------------------------------
// k-ary networks (near-unanimity pipeline)
// ----------------------------------------------------------------------

/// A subset of `D^arity` as a bit set over mixed-radix cell indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelK {
    d: usize,
    arity: usize,
    bits: Vec<u64>,
}

impl RelK {
    pub fn full(d: usize, arity: usize) -> Self {
        let cells = d.pow(arity as u32);
        let mut bits = vec![u64::MAX; cells.div_ceil(64)];
        if !cells.is_multiple_of(64) {
            *bits.last_mut().unwrap() = (1u64 << (cells % 64)) - 1;
        }
        RelK { d, arity, bits }
    }

    pub fn empty(d: usize, arity: usize) -> Self {
        let cells = d.pow(arity as u32);
        RelK { d, arity, bits: vec![0; cells.div_ceil(64)] }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn index(&self, cell: &[Sym]) -> usize {
        debug_assert_eq!(cell.len(), self.arity);
        cell.iter().fold(0usize, |acc, &v| acc * self.d + v as usize)
    }

    fn decode(&self, mut idx: usize, out: &mut [Sym]) {
        for slot in out.iter_mut().rev() {
            *slot = (idx % self.d) as Sym;
            idx /= self.d;
        }
    }

    pub fn contains(&self, cell: &[Sym]) -> bool {
        let i = self.index(cell);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, cell: &[Sym]) {
        let i = self.index(cell);
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn remove_index(&mut self, i: usize) {
        self.bits[i / 64] &= !(1 << (i % 64));
    }

    pub fn intersect_assign(&mut self, other: &RelK) {
        debug_assert_eq!((self.d, self.arity), (other.d, other.arity));
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// Member cells in lexicographic order.
    pub fn tuples(&self) -> Vec<Word> {
        let cells = self.d.pow(self.arity as u32);
        let mut out = Vec::new();
        let mut cell = vec![0 as Sym; self.arity];
        for i in 0..cells {
            if self.bits[i / 64] >> (i % 64) & 1 == 1 {
                self.decode(i, &mut cell);
                out.push(cell.clone());
            }
        }
        out
    }

    pub fn closed_under(&self, g: &OperationTable) -> bool {
        let members = self.tuples();
        if members.is_empty() {
            return true;
        }
        let k = g.arity();
        let mut idx = vec![0usize; k];
        let mut image = vec![0 as Sym; self.arity];
        'tuples: loop {
            for pos in 0..self.arity {
                let args: Vec<Sym> = idx.iter().map(|&i| members[i][pos]).collect();
                image[pos] = g.apply(&args);
            }
            if !self.contains(&image) {
                return false;
            }
            for pos in (0..k).rev() {
                idx[pos] += 1;
                if idx[pos] < members.len() {
                    continue 'tuples;
                }
                idx[pos] = 0;
            }
            return true;
        }
    }
}

/// The projection `π_U R_n` for a strictly increasing position subset `U`,
/// one pattern-extendability test per cell of `D^{|U|}`.
pub fn kary_projection(a: &Automaton, n: usize, positions: &[usize]) -> Result<RelK, NuError> {
    if positions.windows(2).any(|w| w[0] >= w[1]) || positions.last().is_some_and(|&p| p >= n) {
        let (i, j) = (positions.first().copied().unwrap_or(0), positions.last().copied().unwrap_or(0));
        return Err(NuError::IndexOutOfRange { i, j, n });
    }
    Ok(kary_projection_with(&Stepper::new(a), n, positions))
}

fn kary_projection_with(stepper: &Stepper<'_>, n: usize, positions: &[usize]) -> RelK {
    let d = stepper.automaton().domain().size();
    let mut rel = RelK::empty(d, positions.len());
    for cell in words_of_length(d, positions.len()) {
        let pairs: Vec<(usize, Sym)> =
            positions.iter().copied().zip(cell.iter().copied()).collect();
        let tau = Pattern::from_pairs(n, &pairs);
        if stepper.extend_pattern(&tau).is_some() {
            rel.insert(&cell);
        }
    }
    rel
}

/// Network of (k−1)-ary relations over the canonical (k−1)-subsets of the
/// variables, plus unary domains.
#[derive(Debug, Clone)]
pub struct KAryNetwork {
    k: usize,
    var_names: Vec<String>,
    domain: Domain,
    unary: Vec<SymMask>,
    subsets: Vec<Vec<usize>>,
    rels: Vec<RelK>,
}

impl KAryNetwork {
    pub fn nu_arity(&self) -> usize {
        self.k
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn relation(&self, subset_idx: usize) -> &RelK {
        &self.rels[subset_idx]
    }

    pub fn unary(&self, x: usize) -> SymMask {
        self.unary[x]
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn is_emptied(&self) -> bool {
        self.unary.contains(&0) || self.rels.iter().any(|r| r.is_empty())
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Folds a relation over a variable tuple (repetitions allowed) to the
/// diagonal-consistent relation over its sorted distinct variables.
fn fold_to_distinct(vars: &[usize], rel: &RelK) -> (Vec<usize>, RelK) {
    let mut distinct: Vec<usize> = vars.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let slot_of = |v: usize| distinct.iter().position(|&w| w == v).unwrap();
    let mut folded = RelK::empty(rel.d, distinct.len());
    let mut image = vec![0 as Sym; distinct.len()];
    'cells: for cell in rel.tuples() {
        let mut assigned: Vec<Option<Sym>> = vec![None; distinct.len()];
        for (pos, &v) in vars.iter().enumerate() {
            let s = slot_of(v);
            match assigned[s] {
                None => assigned[s] = Some(cell[pos]),
                Some(prev) if prev == cell[pos] => {}
                Some(_) => continue 'cells,
            }
        }
        for (s, a) in assigned.iter().enumerate() {
            image[s] = a.expect("every distinct variable occurs");
        }
        folded.insert(&image);
    }
    (distinct, folded)
}

/// Translates an instance over a k-ary-NU-closed automaton into a network
/// of (k−1)-ary relations `P_u = ⋂ π_u R` over variable subsets. Relations
/// on fewer distinct variables (repeated positions, short scopes) are
/// folded and cylindrified into every containing subset; unary facts narrow
/// the variable domains.
pub fn translate_nu(instance: &Instance, g: &OperationTable) -> Result<KAryNetwork, NuError> {
    if !g.is_near_unanimity() {
        return Err(NuError::NotNearUnanimity);
    }
    if g.domain() != instance.domain() {
        return Err(NuError::DomainMismatch(
            g.domain().to_string(),
            instance.domain().to_string(),
        ));
    }
    let k = g.arity();
    let m = k - 1; // network relation arity
    let stepper = Stepper::new(instance.automaton());
    let nv = instance.var_count();
    let domain = instance.domain().clone();
    let d = domain.size();
    let subsets = combinations(nv, m);
    let subset_index: HashMap<Vec<usize>, usize> =
        subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let mut net = KAryNetwork {
        k,
        var_names: instance.variables().to_vec(),
        domain: domain.clone(),
        unary: (0..nv).map(|v| instance.allowed(v)).collect(),
        rels: vec![RelK::full(d, m); subsets.len()],
        subsets,
    };
    let impose = |net: &mut KAryNetwork, vars: &[usize], rel: &RelK| {
        let (distinct, folded) = fold_to_distinct(vars, rel);
        match distinct.len() {
            1 => {
                let mut mask = 0;
                for t in folded.tuples() {
                    mask |= 1 << t[0];
                }
                net.unary[distinct[0]] &= mask;
            }
            len if len == m => {
                let idx = subset_index[&distinct];
                net.rels[idx].intersect_assign(&folded);
            }
            _ => {
                // cylindrify into every (k−1)-subset containing `distinct`
                for (idx, subset) in net.subsets.iter().enumerate() {
                    if !distinct.iter().all(|v| subset.contains(v)) {
                        continue;
                    }
                    let coords: Vec<usize> = distinct
                        .iter()
                        .map(|v| subset.iter().position(|w| w == v).unwrap())
                        .collect();
                    let rel_k = &mut net.rels[idx];
                    let cells = d.pow(m as u32);
                    let mut cell = vec![0 as Sym; m];
                    let mut sub = vec![0 as Sym; distinct.len()];
                    for i in 0..cells {
                        if rel_k.bits[i / 64] >> (i % 64) & 1 != 1 {
                            continue;
                        }
                        rel_k.decode(i, &mut cell);
                        for (s, &c) in coords.iter().enumerate() {
                            sub[s] = cell[c];
                        }
                        if !folded.contains(&sub) {
                            rel_k.remove_index(i);
                        }
                    }
                }
            }
        }
    };
    let mut cache: HashMap<(usize, Vec<usize>), RelK> = HashMap::new();
    for c in instance.constraints() {
        let n = c.scope.len();
        if n == 1 {
            let mut mask = 0;
            for sym in domain.syms() {
                if instance.automaton().accepts(&[sym]) {
                    mask |= 1 << sym;
                }
            }
            net.unary[c.scope[0]] &= mask;
        } else if n < m {
            // short scope: the explicit relation R_n imposed directly
            let mut rel = RelK::empty(d, n);
            for w in words_of_length(d, n) {
                if instance.automaton().accepts(&w) {
                    rel.insert(&w);
                }
            }
            impose(&mut net, &c.scope, &rel);
        } else {
            for positions in combinations(n, m) {
                let rel = cache
                    .entry((n, positions.clone()))
                    .or_insert_with(|| kary_projection_with(&stepper, n, &positions))
                    .clone();
                let vars: Vec<usize> = positions.iter().map(|&p| c.scope[p]).collect();
                impose(&mut net, &vars, &rel);
            }
        }
    }
    Ok(net)
}

/// Enforces (k−1,k)-consistency: a tuple of `P_u` is deleted when some k-th
/// variable `w` admits no value compatible with every (k−1)-subset of
/// `u ∪ {w}`, together with unary support propagation.
pub fn enforce_kary_consistency(net: &mut KAryNetwork) -> Propagation {
    let m = net.k - 1;
    let nv = net.var_names.len();
    let d = net.domain.size();
    let subset_index: HashMap<Vec<usize>, usize> =
        net.subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    loop {
        let mut changed = false;
        // restrict relations by unary domains, and unary domains by supports
        for (si, subset) in net.subsets.iter().enumerate() {
            let rel = &mut net.rels[si];
            let cells = d.pow(m as u32);
            let mut cell = vec![0 as Sym; m];
            let mut seen: Vec<SymMask> = vec![0; m];
            for i in 0..cells {
                if rel.bits[i / 64] >> (i % 64) & 1 != 1 {
                    continue;
                }
                rel.decode(i, &mut cell);
                if cell.iter().zip(subset).any(|(&v, &x)| net.unary[x] >> v & 1 == 0) {
                    rel.remove_index(i);
                    changed = true;
                } else {
                    for (pos, &v) in cell.iter().enumerate() {
                        seen[pos] |= 1 << v;
                    }
                }
            }
            for (pos, &x) in subset.iter().enumerate() {
                if net.unary[x] & !seen[pos] != 0 {
                    net.unary[x] &= seen[pos];
                    changed = true;
                }
            }
        }
        // the (k−1, k) rule
        for si in 0..net.subsets.len() {
            let subset = net.subsets[si].clone();
            let cells = d.pow(m as u32);
            let mut cell = vec![0 as Sym; m];
            for i in 0..cells {
                if net.rels[si].bits[i / 64] >> (i % 64) & 1 != 1 {
                    continue;
                }
                net.rels[si].decode(i, &mut cell);
                'third: for w in 0..nv {
                    if subset.contains(&w) {
                        continue;
                    }
                    for dv in mask_iter(net.unary[w]) {
                        // candidate value dv for w: check the m subsets
                        // replacing one position of `subset` with w
                        let mut ok = true;
                        for drop in 0..m {
                            let mut u: Vec<usize> = Vec::with_capacity(m);
                            let mut t: Vec<(usize, Sym)> = Vec::with_capacity(m);
                            for (pos, &x) in subset.iter().enumerate() {
                                if pos != drop {
                                    t.push((x, cell[pos]));
                                }
                            }
                            t.push((w, dv));
                            t.sort_unstable();
                            for &(x, _) in &t {
                                u.push(x);
                            }
                            let values: Vec<Sym> = t.iter().map(|&(_, v)| v).collect();
                            let ui = subset_index[&u];
                            if !net.rels[ui].contains(&values) {
                                ok = false;
                                break;
                            }
                        }
                        if ok {
                            continue 'third;
                        }
                    }
                    net.rels[si].remove_index(i);
                    changed = true;
                    break;
                }
            }
        }
        if net.is_emptied() {
            return Propagation::Emptied;
        }
        if !changed {
            return Propagation::Consistent;
        }
    }
}

/// Greedy extension over a (k−1,k)-consistent network, declaration order,
/// least viable value first.
pub fn extract_kary_assignment(net: &KAryNetwork) -> Option<Assignment> {
    let m = net.k - 1;
    let nv = net.var_names.len();
    let subset_index: HashMap<Vec<usize>, usize> =
        net.subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let mut values: Vec<Sym> = Vec::with_capacity(nv);
    for w in 0..nv {
        let assigned: Vec<usize> = (0..w).collect();
        let mut chosen = None;
        'candidates: for dv in mask_iter(net.unary[w]) {
            if assigned.len() + 1 >= m {
                for mut others in combinations(assigned.len(), m - 1) {
                    others.push(w);
                    let subset: Vec<usize> = others.clone();
                    let tuple: Vec<Sym> = subset
                        .iter()
                        .map(|&x| if x == w { dv } else { values[x] })
                        .collect();
                    let idx = subset_index[&subset];
                    if !net.rels[idx].contains(&tuple) {
                        continue 'candidates;
                    }
                }
            }
            chosen = Some(dv);
            break;
        }
        values.push(chosen?);
    }
    Some(Assignment::new(values))
}

/// Full NU pipeline: translate to the (k−1)-ary network, enforce
/// (k−1,k)-consistency, and extend greedily. For k = 3 this delegates to
/// the majority pipeline; instances with fewer than k−1 variables are
/// scanned directly (a constant-size search for fixed k).
pub fn solve_nu(instance: &Instance, g: &OperationTable) -> Result<SolveOutcome, NuError> {
    if !g.is_near_unanimity() {
        return Err(NuError::NotNearUnanimity);
    }
    if g.domain() != instance.domain() {
        return Err(NuError::DomainMismatch(
            g.domain().to_string(),
            instance.domain().to_string(),
        ));
    }
    if g.arity() == 3 {
        let net = translate_majority(instance, g)?;
        return path_consistency_solve(&net, g);
    }
    if instance.var_count() < g.arity() - 1 {
        for w in words_of_length(instance.domain().size(), instance.var_count()) {
            let phi = Assignment::new(w);
            if instance.verify(&phi) {
                return Ok(SolveOutcome::Sat(phi));
            }
        }
        return Ok(SolveOutcome::Unsat);
    }
    let mut net = translate_nu(instance, g)?;
    if enforce_kary_consistency(&mut net) == Propagation::Emptied {
        return Ok(SolveOutcome::Unsat);
    }
    match extract_kary_assignment(&net) {
        Some(phi) => {
            if !instance.verify(&phi) {
                return Err(NuError::VerificationFailed);
            }
            Ok(SolveOutcome::Sat(phi))
        }
        None => Err(NuError::ClosureViolated),
    }
}
