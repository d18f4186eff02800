//! Linear-system extraction and solving for languages closed under the
//! affine operation `f_q(x, y, z) = x − y + z` over GF(q), q prime.
//!
//! A closed slice `R_n` is a coset `r + S` of a subspace `S ≤ GF(q)ⁿ`. The
//! basis construction finds `r` by extending the empty pattern and grows a
//! basis of `S` one vector per round: with `L` the pivot columns of the
//! current row-canonical basis, a fresh independent vector exists iff some
//! pattern pinning `r(k)` on `L` and `r(p)+1` at a fresh column `p`
//! extends. The annihilator of the basis then gives `M, b` with
//! `r ∈ R_n ⇔ M·rᵀ = b`, and instances reduce to one global system solved
//! by Gaussian elimination.

use std::collections::HashMap;

use thiserror::Error;

use crate::automaton::{Automaton, Stepper};
use crate::domain::{Sym, Word};
use crate::instance::{mask_iter, Assignment, Instance, Pattern};
use crate::ops::Counterexample;
#[cfg(debug_assertions)]
use crate::ops::{is_polymorphism, OperationTable};
use crate::SolveOutcome;

#[derive(Debug, Error)]
pub enum AffineError {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u16),
    #[error("automaton domain {domain} is not the field domain 0..{q}")]
    DomainNotField { domain: String, q: u16 },
    #[error("domain constraint on `{0}` is not expressible as a linear equation (neither full nor a single value)")]
    UnencodableDomainConstraint(String),
    #[error("automaton language is not closed under f_{q}: counterexample on words of length {}", .counterexample.output.len())]
    NotClosed { q: u16, counterexample: Counterexample },
    #[error("solver produced an assignment that fails verification; the closure precondition was violated")]
    VerificationFailed,
}

pub fn is_prime(q: u16) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= q as u32 {
        if (q as u32).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_field(a: &Automaton, q: u16) -> Result<(), AffineError> {
    if !is_prime(q) {
        return Err(AffineError::NonPrimeModulus(q));
    }
    if a.domain().as_numeric() != Some(q) {
        return Err(AffineError::DomainNotField { domain: a.domain().to_string(), q });
    }
    Ok(())
}

// ----------------------------------------------------------------------
// Dense matrices over GF(q)
// ----------------------------------------------------------------------

/// Row-major dense matrix over GF(q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfMatrix {
    pub q: u16,
    pub cols: usize,
    data: Vec<u16>,
}

impl GfMatrix {
    pub fn zero(q: u16, rows: usize, cols: usize) -> Self {
        GfMatrix { q, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(q: u16, cols: usize, rows: Vec<Vec<u16>>) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r);
        }
        GfMatrix { q, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.data.len().checked_div(self.cols).unwrap_or(0)
    }

    pub fn row(&self, i: usize) -> &[u16] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn push_row(&mut self, row: &[u16]) {
        assert_eq!(row.len(), self.cols);
        self.data.extend_from_slice(row);
    }

    fn inv(&self, a: u16) -> u16 {
        // Fermat: a^(q-2) mod q for prime q.
        let mut result = 1u32;
        let mut base = a as u32 % self.q as u32;
        let mut e = self.q as u32 - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % self.q as u32;
            }
            base = base * base % self.q as u32;
            e >>= 1;
        }
        result as u16
    }

    /// In-place reduced row echelon form (leftmost-pivot selection, zero
    /// rows dropped); returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let q = self.q as u32;
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..self.cols {
            if row >= self.rows() {
                break;
            }
            let Some(pivot_row) = (row..self.rows()).find(|&r| self.data[r * self.cols + col] != 0)
            else {
                continue;
            };
            if pivot_row != row {
                for c in 0..self.cols {
                    self.data.swap(row * self.cols + c, pivot_row * self.cols + c);
                }
            }
            let inv = self.inv(self.data[row * self.cols + col]) as u32;
            for c in 0..self.cols {
                let x = self.data[row * self.cols + c] as u32;
                self.data[row * self.cols + c] = (x * inv % q) as u16;
            }
            for r in 0..self.rows() {
                if r != row && self.data[r * self.cols + col] != 0 {
                    let factor = self.data[r * self.cols + col] as u32;
                    for c in 0..self.cols {
                        let x = self.data[r * self.cols + c] as u32;
                        let y = self.data[row * self.cols + c] as u32;
                        self.data[r * self.cols + c] = ((x + (q - factor % q) * y % q) % q) as u16;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        self.data.truncate(row * self.cols);
        pivots
    }

    /// A basis of `{x : self · x = 0}`, one row per free column of the
    /// reduced form, in column order.
    pub fn kernel_basis(&self) -> GfMatrix {
        let mut reduced = self.clone();
        let pivots = reduced.rref();
        let q = self.q;
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut kernel = GfMatrix::zero(q, 0, self.cols);
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![0u16; self.cols];
            v[free] = 1;
            for (i, &p) in pivots.iter().enumerate() {
                let coeff = reduced.data[i * self.cols + free];
                v[p] = (q - coeff) % q;
            }
            kernel.push_row(&v);
        }
        kernel
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref();
        m.rows()
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[u16]) -> Vec<u16> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows())
            .map(|r| {
                let mut acc = 0u32;
                for (c, &xc) in x.iter().enumerate() {
                    acc = (acc + self.data[r * self.cols + c] as u32 * xc as u32) % self.q as u32;
                }
                acc as u16
            })
            .collect()
    }
}

/// `M·x = b` over GF(q); the solution set is `{r ∈ Dⁿ : M·rᵀ = b}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub matrix: GfMatrix,
    pub rhs: Vec<u16>,
}

impl LinearSystem {
    pub fn arity(&self) -> usize {
        self.matrix.cols
    }

    pub fn satisfied_by(&self, x: &[u16]) -> bool {
        self.matrix.apply(x) == self.rhs
    }

    /// One solution by Gaussian elimination with free variables set to 0,
    /// or `None` when inconsistent.
    pub fn solve(&self) -> Option<Vec<u16>> {
        let q = self.matrix.q;
        let cols = self.matrix.cols;
        let mut aug = GfMatrix::zero(q, 0, cols + 1);
        for r in 0..self.matrix.rows() {
            let mut row = self.matrix.row(r).to_vec();
            row.push(self.rhs[r]);
            aug.push_row(&row);
        }
        let pivots = aug.rref();
        if pivots.contains(&cols) {
            return None; // a row reduced to 0 = 1
        }
        let mut x = vec![0u16; cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = aug.data[i * (cols + 1) + cols];
        }
        Some(x)
    }
}

/// Coset representation of a nonempty `R_n`: a representative plus a
/// row-canonical basis of the difference subspace `S = R_n − r`.
#[derive(Debug, Clone)]
pub struct AffineBasis {
    pub representative: Word,
    pub basis: GfMatrix,
    pub pivots: Vec<usize>,
}

impl AffineBasis {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
}

/// Basis construction: `None` iff `R_n` is empty. `O(n³·|A|)`.
pub fn basis_construction(
    a: &Automaton,
    n: usize,
    q: u16,
) -> Result<Option<AffineBasis>, AffineError> {
    check_field(a, q)?;
    let stepper = Stepper::new(a);
    Ok(basis_construction_with(&stepper, n, q))
}

fn basis_construction_with(stepper: &Stepper<'_>, n: usize, q: u16) -> Option<AffineBasis> {
    let representative = stepper.extend_pattern(&Pattern::empty(n))?;
    let r = &representative;
    let mut basis = GfMatrix::zero(q, 0, n);
    let mut pivots: Vec<usize> = Vec::new();
    loop {
        let mut grew = false;
        for p in 0..n {
            if pivots.contains(&p) {
                continue;
            }
            let mut phi = Pattern::empty(n);
            for &k in &pivots {
                phi.set(k, r[k]);
            }
            phi.set(p, (r[p] + 1) % q);
            if let Some(x) = stepper.extend_pattern(&phi) {
                let diff: Vec<u16> =
                    x.iter().zip(r.iter()).map(|(&xi, &ri)| (xi + q - ri) % q).collect();
                basis.push_row(&diff);
                pivots = basis.rref();
                grew = true;
                break;
            }
        }
        if !grew {
            return Some(AffineBasis { representative, basis, pivots });
        }
    }
}

/// Extracts `M, b` with `r ∈ R_n ⇔ M·rᵀ = b`; `None` iff `R_n` is empty.
pub fn extract_linear_system(
    a: &Automaton,
    n: usize,
    q: u16,
) -> Result<Option<LinearSystem>, AffineError> {
    check_field(a, q)?;
    let stepper = Stepper::new(a);
    Ok(extract_with(&stepper, n, q))
}

fn extract_with(stepper: &Stepper<'_>, n: usize, q: u16) -> Option<LinearSystem> {
    let affine = basis_construction_with(stepper, n, q)?;
    let matrix = affine.basis.kernel_basis();
    let rhs = matrix.apply(&affine.representative);
    Some(LinearSystem { matrix, rhs })
}

/// Scatters every per-constraint system into the `|V|` instance columns and
/// stacks them. Repeated scope variables fold by summing coefficients mod
/// q; an empty constraint relation contributes the unsatisfiable row
/// `0 = 1`. Unary domain constraints must be full or singletons.
pub fn assemble_global_system(instance: &Instance, q: u16) -> Result<LinearSystem, AffineError> {
    check_field(instance.automaton(), q)?;
    let stepper = Stepper::new(instance.automaton());
    let nv = instance.var_count();
    let mut matrix = GfMatrix::zero(q, 0, nv);
    let mut rhs = Vec::new();
    let mut cache: HashMap<usize, Option<LinearSystem>> = HashMap::new();
    for c in instance.constraints() {
        let n = c.scope.len();
        let local = cache.entry(n).or_insert_with(|| extract_with(&stepper, n, q));
        match local {
            None => {
                // empty relation: no tuple satisfies the constraint
                matrix.push_row(&vec![0; nv]);
                rhs.push(1);
            }
            Some(sys) => {
                for row_idx in 0..sys.matrix.rows() {
                    let local_row = sys.matrix.row(row_idx);
                    let mut global_row = vec![0u16; nv];
                    for (pos, &v) in c.scope.iter().enumerate() {
                        global_row[v] = ((global_row[v] as u32 + local_row[pos] as u32)
                            % q as u32) as u16;
                    }
                    matrix.push_row(&global_row);
                    rhs.push(sys.rhs[row_idx]);
                }
            }
        }
    }
    for (&v, &mask) in instance.domain_constraints() {
        let values: Vec<Sym> = mask_iter(mask).filter(|&d| (d as usize) < q as usize).collect();
        if values.len() == q as usize {
            continue;
        }
        match values.as_slice() {
            [] => {
                matrix.push_row(&vec![0; nv]);
                rhs.push(1);
            }
            [single] => {
                let mut row = vec![0u16; nv];
                row[v] = 1;
                matrix.push_row(&row);
                rhs.push(*single);
            }
            _ => {
                return Err(AffineError::UnencodableDomainConstraint(
                    instance.variables()[v].clone(),
                ))
            }
        }
    }
    Ok(LinearSystem { matrix, rhs })
}

#[cfg(debug_assertions)]
fn debug_check_closed(a: &Automaton, q: u16) -> Result<(), AffineError> {
    let fq = OperationTable::affine(q).expect("q >= 2");
    let verdict = is_polymorphism(a, &fq);
    if verdict.holds {
        Ok(())
    } else {
        Err(AffineError::NotClosed { q, counterexample: verdict.counterexample.unwrap() })
    }
}

#[cfg(not(debug_assertions))]
fn debug_check_closed(_a: &Automaton, _q: u16) -> Result<(), AffineError> {
    Ok(())
}

/// Decides an instance over an `f_q`-closed automaton by Gaussian
/// elimination on the global system; free variables are set to 0.
pub fn solve_affine(instance: &Instance, q: u16) -> Result<SolveOutcome, AffineError> {
    check_field(instance.automaton(), q)?;
    debug_check_closed(instance.automaton(), q)?;
    let system = assemble_global_system(instance, q)?;
    match system.solve() {
        None => Ok(SolveOutcome::Unsat),
        Some(x) => {
            let phi = Assignment::new(x.iter().map(|&v| v as Sym).collect());
            if !instance.verify(&phi) {
                return Err(AffineError::VerificationFailed);
            }
            Ok(SolveOutcome::Sat(phi))
        }
    }
}
