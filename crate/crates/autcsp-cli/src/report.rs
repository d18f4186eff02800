//! Machine-readable result reports. JSON goes to stdout and must be
//! byte-identical across runs for the same inputs and seeds, so nothing
//! run-dependent (timing, paths outside the request) is serialized; the
//! human summary with timing is printed to stderr instead.

use std::collections::BTreeMap;

use serde::Serialize;

use autcsp_core::ops::{Counterexample, DichotomyVerdict};
use autcsp_core::{Domain, Instance};

#[derive(Serialize)]
pub struct CexJson {
    pub inputs: Vec<String>,
    pub output: String,
}

impl CexJson {
    pub fn new(domain: &Domain, cex: &Counterexample) -> Self {
        CexJson {
            inputs: cex.inputs.iter().map(|w| domain.format_word(w)).collect(),
            output: domain.format_word(&cex.output),
        }
    }
}

#[derive(Serialize)]
pub struct WitnessJson {
    pub op: &'static str,
    pub arity: usize,
    pub counterexample: CexJson,
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub command: &'static str,
    pub status: &'static str,
    pub classification: &'static str,
    pub tractable_ops: Vec<&'static str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ClassifyReport {
    pub fn from_verdict(domain: &Domain, v: &DichotomyVerdict) -> Self {
        let classification = match v.classification {
            autcsp_core::ops::Classification::InP => "in_p",
            autcsp_core::ops::Classification::NpComplete => "np_complete",
        };
        ClassifyReport {
            command: "classify",
            status: "classified",
            classification,
            tractable_ops: v.tractable_ops.iter().map(|op| op.name()).collect(),
            witnesses: v
                .witnesses
                .iter()
                .map(|w| WitnessJson {
                    op: w.op.name(),
                    arity: w.arity,
                    counterexample: CexJson::new(domain, &w.counterexample),
                })
                .collect(),
            note: None,
        }
    }
}

#[derive(Serialize)]
pub struct SolveReport {
    pub command: &'static str,
    pub status: &'static str,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn assignment_map(instance: &Instance, phi: &autcsp_core::Assignment) -> BTreeMap<String, String> {
    instance
        .variables()
        .iter()
        .enumerate()
        .map(|(v, name)| (name.clone(), instance.domain().symbol(phi.get(v)).to_string()))
        .collect()
}

#[derive(Serialize)]
pub struct CheckPolyReport {
    pub command: &'static str,
    pub status: &'static str,
    pub op: String,
    pub arity: usize,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CexJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_len: Option<usize>,
}

#[derive(Serialize)]
pub struct LinearSystemJson {
    pub n: usize,
    pub m: Vec<Vec<u16>>,
    pub b: Vec<u16>,
    pub q: u16,
}

impl LinearSystemJson {
    pub fn new(sys: &autcsp_core::affine::LinearSystem, q: u16) -> Self {
        LinearSystemJson {
            n: sys.arity(),
            m: (0..sys.matrix.rows()).map(|r| sys.matrix.row(r).to_vec()).collect(),
            b: sys.rhs.clone(),
            q,
        }
    }
}

#[derive(Serialize)]
pub struct AffineConstraintJson {
    pub scope: Vec<String>,
    pub empty_relation: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<LinearSystemJson>,
}

#[derive(Serialize)]
pub struct TranslateAffineReport {
    pub command: &'static str,
    pub status: &'static str,
    pub kind: &'static str,
    pub q: u16,
    pub vars: Vec<String>,
    pub constraints: Vec<AffineConstraintJson>,
    pub global: LinearSystemJson,
}

#[derive(Serialize)]
pub struct PairJson {
    pub x: String,
    pub y: String,
    pub tuples: Vec<String>,
}

#[derive(Serialize)]
pub struct TranslateMajorityReport {
    pub command: &'static str,
    pub status: &'static str,
    pub kind: &'static str,
    pub vars: Vec<String>,
    pub unary: BTreeMap<String, Vec<String>>,
    pub pairs: Vec<PairJson>,
}

#[derive(Serialize)]
pub struct MinimizeReport {
    pub command: &'static str,
    pub status: &'static str,
    pub refuted: bool,
    pub updates: usize,
    pub domains: BTreeMap<String, Vec<String>>,
    pub instance_text: String,
}

#[derive(Serialize)]
pub struct EnumerateReport {
    pub command: &'static str,
    pub status: &'static str,
    pub n: usize,
    pub count: usize,
    pub tuples: Vec<String>,
}

#[derive(Serialize)]
pub struct FilesReport {
    pub command: &'static str,
    pub status: &'static str,
    pub kind: String,
    pub files: Vec<String>,
}

#[derive(Serialize)]
pub struct ErrorReport {
    pub status: &'static str,
    pub error: String,
}

pub fn emit<T: Serialize>(report: &T) {
    println!("{}", serde_json::to_string(report).expect("reports serialize"));
}
