//! Python bindings for the automatic-CSP toolkit: thin wrappers around the
//! core types returning plain Python values (strings, dicts, lists).

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use autcsp_core::instance::mask_iter;
use autcsp_core::ops::{self, OperationTable};
use autcsp_core::oracle::{self, Budget};
use autcsp_core::{affine, fixtures, nu, semilattice, width1};
use autcsp_core::{Automaton, Instance, SolveOutcome};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Automaton", frozen)]
struct PyAutomaton {
    inner: Automaton,
}

#[pymethods]
impl PyAutomaton {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyAutomaton { inner: Automaton::parse(text).map_err(value_err)? })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn state_count(&self) -> usize {
        self.inner.state_count()
    }

    /// |A| = |S| + |Δ|
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn is_deterministic(&self) -> bool {
        self.inner.is_deterministic()
    }

    fn accepts(&self, word: &str) -> PyResult<bool> {
        let w = self.inner.domain().parse_word(word).map_err(value_err)?;
        Ok(self.inner.accepts(&w))
    }

    fn determinize(&self) -> Self {
        PyAutomaton { inner: self.inner.determinize() }
    }

    fn complement(&self) -> Self {
        PyAutomaton { inner: self.inner.complement() }
    }

    fn intersect(&self, other: &PyAutomaton) -> PyResult<Self> {
        Ok(PyAutomaton { inner: self.inner.intersect(&other.inner).map_err(value_err)? })
    }

    fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    fn shortest_accepted(&self) -> Option<String> {
        self.inner.shortest_accepted().map(|w| self.inner.domain().format_word(&w))
    }

    fn has_word_of_length(&self, n: usize) -> Option<String> {
        self.inner.has_word_of_length(n).map(|w| self.inner.domain().format_word(&w))
    }

    fn is_infinite(&self) -> bool {
        self.inner.is_infinite()
    }

    fn growth_class(&self) -> &'static str {
        match self.inner.growth_class() {
            autcsp_core::GrowthClass::Polynomial => "polynomial",
            autcsp_core::GrowthClass::Exponential => "exponential",
        }
    }

    fn count_accepted(&self, n: usize) -> u128 {
        self.inner.count_accepted(n)
    }

    #[pyo3(signature = (n, budget = 1_000_000))]
    fn enumerate(&self, n: usize, budget: u64) -> PyResult<Vec<String>> {
        let rel = oracle::enumerate_relation(&self.inner, n, Budget::new(budget))
            .map_err(value_err)?;
        Ok(rel.iter().map(|w| self.inner.domain().format_word(w)).collect())
    }

    /// The Schaefer operations preserving the language, in the fixed order
    /// const0, const1, and, or, maj, minor.
    fn schaefer_check(&self) -> PyResult<Vec<&'static str>> {
        let ops = ops::schaefer_check(&self.inner).map_err(value_err)?;
        Ok(ops.iter().map(|o| o.name()).collect())
    }

    /// Boolean dichotomy: {"classification", "tractable_ops", "witnesses"}.
    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let verdict = ops::classify_dichotomy(&self.inner).map_err(value_err)?;
        let d = PyDict::new(py);
        let classification = match verdict.classification {
            ops::Classification::InP => "in_p",
            ops::Classification::NpComplete => "np_complete",
        };
        d.set_item("classification", classification)?;
        d.set_item(
            "tractable_ops",
            verdict.tractable_ops.iter().map(|o| o.name()).collect::<Vec<_>>(),
        )?;
        let witnesses: Vec<Bound<'py, PyDict>> = verdict
            .witnesses
            .iter()
            .map(|w| {
                let wd = PyDict::new(py);
                wd.set_item("op", w.op.name())?;
                wd.set_item("arity", w.arity)?;
                wd.set_item(
                    "inputs",
                    w.counterexample
                        .inputs
                        .iter()
                        .map(|x| self.inner.domain().format_word(x))
                        .collect::<Vec<_>>(),
                )?;
                wd.set_item("output", self.inner.domain().format_word(&w.counterexample.output))?;
                Ok(wd)
            })
            .collect::<PyResult<_>>()?;
        d.set_item("witnesses", witnesses)?;
        Ok(d)
    }

    /// First quaternary Boolean Siggers polymorphism in enumeration order,
    /// or None.
    fn siggers_check(&self) -> PyResult<Option<PyOperationTable>> {
        let found = ops::siggers_check_boolean(&self.inner).map_err(value_err)?;
        Ok(found.map(|inner| PyOperationTable { inner }))
    }
}

#[pyclass(name = "OperationTable", frozen)]
struct PyOperationTable {
    inner: OperationTable,
}

#[pymethods]
impl PyOperationTable {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyOperationTable { inner: OperationTable::parse(text).map_err(value_err)? })
    }

    /// One of const0, const1, and, or, maj, minor over {0,1}.
    #[staticmethod]
    fn schaefer(name: &str) -> PyResult<Self> {
        let op = ops::SchaeferOp::from_name(name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown operation `{name}`")))?;
        Ok(PyOperationTable { inner: op.table() })
    }

    /// f_q(x, y, z) = x − y + z over GF(q).
    #[staticmethod]
    fn affine(q: u16) -> PyResult<Self> {
        Ok(PyOperationTable { inner: OperationTable::affine(q).map_err(value_err)? })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn arity(&self) -> usize {
        self.inner.arity()
    }

    fn apply_words(&self, words: Vec<String>) -> PyResult<String> {
        let domain = self.inner.domain();
        let parsed: Vec<_> = words
            .iter()
            .map(|w| domain.parse_word(w))
            .collect::<Result<_, _>>()
            .map_err(value_err)?;
        let refs: Vec<&[u16]> = parsed.iter().map(|w: &Vec<u16>| w.as_slice()).collect();
        if refs.len() != self.inner.arity() || refs.windows(2).any(|p| p[0].len() != p[1].len()) {
            return Err(PyValueError::new_err("need arity-many equal-length words"));
        }
        Ok(domain.format_word(&self.inner.apply_words(&refs)))
    }

    fn is_majority(&self) -> bool {
        self.inner.is_majority()
    }

    fn is_near_unanimity(&self) -> bool {
        self.inner.is_near_unanimity()
    }

    fn is_semilattice(&self) -> bool {
        self.inner.is_semilattice()
    }

    fn is_siggers(&self) -> bool {
        self.inner.is_siggers()
    }

    /// {"holds": bool, "inputs": [...], "output": ...} against an automaton.
    fn is_polymorphism_of<'py>(
        &self,
        py: Python<'py>,
        automaton: &PyAutomaton,
    ) -> PyResult<Bound<'py, PyDict>> {
        let verdict = ops::check_user_table(&automaton.inner, &self.inner).map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("holds", verdict.holds)?;
        if let Some(cex) = verdict.counterexample {
            let dom = automaton.inner.domain();
            d.set_item(
                "inputs",
                cex.inputs.iter().map(|w| dom.format_word(w)).collect::<Vec<_>>(),
            )?;
            d.set_item("output", dom.format_word(&cex.output))?;
        }
        Ok(d)
    }
}

#[pyclass(name = "Instance", frozen)]
struct PyInstance {
    inner: Instance,
}

fn outcome_to_py(
    py: Python<'_>,
    instance: &Instance,
    outcome: SolveOutcome,
) -> PyResult<Option<Py<PyDict>>> {
    match outcome {
        SolveOutcome::Unsat => Ok(None),
        SolveOutcome::Sat(phi) => {
            let d = PyDict::new(py);
            for (v, name) in instance.variables().iter().enumerate() {
                d.set_item(name, instance.domain().symbol(phi.get(v)))?;
            }
            Ok(Some(d.unbind()))
        }
    }
}

#[pymethods]
impl PyInstance {
    #[staticmethod]
    fn parse(text: &str, automaton: &PyAutomaton) -> PyResult<Self> {
        Ok(PyInstance {
            inner: Instance::parse(text, automaton.inner.clone()).map_err(value_err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn variables(&self) -> Vec<String> {
        self.inner.variables().to_vec()
    }

    fn constraint_size(&self) -> usize {
        self.inner.constraint_size()
    }

    fn verify(&self, assignment: BTreeMap<String, String>) -> PyResult<bool> {
        let mut values = Vec::with_capacity(self.inner.var_count());
        for name in self.inner.variables() {
            let sym = assignment
                .get(name)
                .ok_or_else(|| PyValueError::new_err(format!("missing variable `{name}`")))?;
            let idx = self
                .inner
                .domain()
                .index_of(sym)
                .ok_or_else(|| PyValueError::new_err(format!("unknown symbol `{sym}`")))?;
            values.push(idx);
        }
        Ok(self.inner.verify(&autcsp_core::Assignment::new(values)))
    }

    /// Exhaustive scan; None when unsatisfiable.
    #[pyo3(signature = (budget = 1_000_000))]
    fn brute_solve(&self, py: Python<'_>, budget: u64) -> PyResult<Option<Py<PyDict>>> {
        let got = oracle::brute_solve(&self.inner, Budget::new(budget)).map_err(value_err)?;
        outcome_to_py(py, &self.inner, got)
    }

    fn solve_and(&self, py: Python<'_>) -> PyResult<Option<Py<PyDict>>> {
        let got = semilattice::solve_and(&self.inner).map_err(value_err)?;
        outcome_to_py(py, &self.inner, got)
    }

    fn solve_or(&self, py: Python<'_>) -> PyResult<Option<Py<PyDict>>> {
        let got = semilattice::solve_or(&self.inner).map_err(value_err)?;
        outcome_to_py(py, &self.inner, got)
    }

    fn solve_affine(&self, py: Python<'_>, q: u16) -> PyResult<Option<Py<PyDict>>> {
        let got = affine::solve_affine(&self.inner, q).map_err(value_err)?;
        outcome_to_py(py, &self.inner, got)
    }

    #[pyo3(signature = (table = None))]
    fn solve_majority(
        &self,
        py: Python<'_>,
        table: Option<&PyOperationTable>,
    ) -> PyResult<Option<Py<PyDict>>> {
        let g = match table {
            Some(t) => t.inner.clone(),
            None => ops::SchaeferOp::Maj.table(),
        };
        let net = nu::translate_majority(&self.inner, &g).map_err(value_err)?;
        let got = nu::path_consistency_solve(&net, &g).map_err(value_err)?;
        outcome_to_py(py, &self.inner, got)
    }

    fn solve_nu(&self, py: Python<'_>, table: &PyOperationTable) -> PyResult<Option<Py<PyDict>>> {
        let got = nu::solve_nu(&self.inner, &table.inner).map_err(value_err)?;
        outcome_to_py(py, &self.inner, got)
    }

    fn solve_semilattice(
        &self,
        py: Python<'_>,
        meet: &PyOperationTable,
    ) -> PyResult<Option<Py<PyDict>>> {
        let got = width1::solve_semilattice_general(&self.inner, &meet.inner).map_err(value_err)?;
        outcome_to_py(py, &self.inner, got)
    }

    /// Width-1 decision under the promise; no assignment is constructed.
    fn width1_decision(&self) -> bool {
        width1::solve_width1(&self.inner) == width1::Decision::Yes
    }

    /// {"refuted": bool, "domains": {var: [syms]}, "instance_text": str}
    fn one_minimize<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = width1::one_minimize(&self.inner);
        let d = PyDict::new(py);
        d.set_item("refuted", m.refuted)?;
        let domains = PyDict::new(py);
        for (v, name) in self.inner.variables().iter().enumerate() {
            let syms: Vec<&str> =
                mask_iter(m.domains[v]).map(|s| self.inner.domain().symbol(s)).collect();
            domains.set_item(name, syms)?;
        }
        d.set_item("domains", domains)?;
        d.set_item("instance_text", m.to_instance(&self.inner).to_text())?;
        d.set_item("updates", m.trace.len())?;
        Ok(d)
    }
}

/// Named fixture automaton (A_NAE, A_ODD, A_Maj, A_Minor, A_and, A_or,
/// A_0, A_1).
#[pyfunction]
fn fixture(name: &str) -> PyResult<PyAutomaton> {
    fixtures::all()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, inner)| PyAutomaton { inner })
        .ok_or_else(|| PyValueError::new_err(format!("unknown fixture `{name}`")))
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    fixtures::all().into_iter().map(|(n, _)| n).collect()
}

#[pymodule]
fn autcsp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAutomaton>()?;
    m.add_class::<PyOperationTable>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    Ok(())
}
