//! `autcsp` — classify, solve, translate, and generate automatic CSPs.
//!
//! Machine output is a single JSON object on stdout; the human summary and
//! timing go to stderr. Exit codes: 0 sat / tractable, 1 unsat /
//! NP-complete, 2 usage or input error, 3 oracle budget exceeded.

mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use autcsp_core::affine;
use autcsp_core::fixtures;
use autcsp_core::gen;
use autcsp_core::instance::mask_iter;
use autcsp_core::nu;
use autcsp_core::ops::{self, Classification, OperationTable, SchaeferOp};
use autcsp_core::oracle::{self, Budget};
use autcsp_core::rng::SplitMix64;
use autcsp_core::semilattice;
use autcsp_core::width1;
use autcsp_core::{Assignment, Automaton, Instance, SolveOutcome};

use report::*;

#[derive(Parser)]
#[command(name = "autcsp", version, about = "Automatic constraint satisfaction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tractability classification of AutCSP(A) for a Boolean automaton
    Classify { automaton: PathBuf },
    /// Solve an instance against an automaton
    Solve {
        instance: PathBuf,
        #[arg(long)]
        aut: PathBuf,
        /// auto | and | or | affine:<q> | width1 | semilattice | majority | nu:<k> | brute
        #[arg(long, default_value = "auto")]
        method: String,
        /// Required for --method width1: the width-1 property is a promise
        #[arg(long)]
        assume_width1: bool,
        /// Semilattice meet table file for --method semilattice
        #[arg(long)]
        meet: Option<PathBuf>,
        /// Operation table file for --method majority / nu:<k>
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Check whether an operation is a polymorphism of the language
    CheckPoly {
        automaton: PathBuf,
        /// One of const0, const1, and, or, maj, minor (Boolean domains)
        #[arg(long)]
        op: Option<String>,
        /// Operation table file for arbitrary domains
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Emit solver-ready translations of an instance
    Translate {
        instance: PathBuf,
        #[arg(long)]
        aut: PathBuf,
        /// Emit per-constraint and global linear systems over GF(q)
        #[arg(long)]
        affine: Option<u16>,
        /// Emit the binary network for this majority table
        #[arg(long)]
        majority: Option<PathBuf>,
    },
    /// 1-minimize an instance and emit it with `domain` lines
    Minimize {
        instance: PathBuf,
        #[arg(long)]
        aut: PathBuf,
        /// Also write the minimized instance to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force ground truth (budgeted)
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Write the named fixture automata
    Fixtures {
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate instance/automaton files
    Generate {
        #[command(subcommand)]
        kind: GenerateCmd,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// List R_n = L(A) ∩ D^n explicitly
    Enumerate {
        automaton: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Exhaustive assignment scan
    Solve {
        instance: PathBuf,
        #[arg(long)]
        aut: PathBuf,
    },
    /// Exhaustive polymorphism check up to a word length
    Checkpoly {
        automaton: PathBuf,
        #[arg(long)]
        op: Option<String>,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Pack m random NAE₃ clauses into one constraint of arity 3m
    NaeSingleConstraint {
        #[arg(long)]
        clauses: usize,
        #[arg(long, default_value_t = 4)]
        vars: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded random automaton plus instance
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        domain_size: usize,
        #[arg(long, default_value_t = 4)]
        vars: usize,
        #[arg(long, default_value_t = 3)]
        constraints: usize,
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
    },
}

enum CliError {
    Usage(String),
    Budget(String),
}

impl From<oracle::BudgetExceeded> for CliError {
    fn from(e: oracle::BudgetExceeded) -> Self {
        CliError::Budget(e.to_string())
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

type CmdResult = Result<u8, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let budget = match std::env::var("AUTCSP_BUDGET") {
        Ok(v) => match v.parse::<u64>() {
            Ok(limit) => Budget::new(limit),
            Err(_) => {
                report::emit(&ErrorReport {
                    status: "error",
                    error: format!("AUTCSP_BUDGET must be an integer, got `{v}`"),
                });
                return ExitCode::from(2);
            }
        },
        Err(_) => Budget::default(),
    };
    let outcome = run(cli, budget);
    let elapsed = started.elapsed();
    match outcome {
        Ok(code) => {
            eprintln!("done in {:.1} ms (exit {code})", elapsed.as_secs_f64() * 1e3);
            ExitCode::from(code)
        }
        Err(CliError::Usage(msg)) => {
            report::emit(&ErrorReport { status: "error", error: msg.clone() });
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Budget(msg)) => {
            report::emit(&ErrorReport { status: "error", error: msg.clone() });
            eprintln!("budget: {msg}");
            ExitCode::from(3)
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_automaton(path: &Path) -> Result<Automaton, CliError> {
    Automaton::parse(&read_file(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path, automaton: Automaton) -> Result<Instance, CliError> {
    Instance::parse(&read_file(path)?, automaton)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_table(path: &Path) -> Result<OperationTable, CliError> {
    OperationTable::parse(&read_file(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli, budget: Budget) -> CmdResult {
    match cli.command {
        Command::Classify { automaton } => cmd_classify(&automaton),
        Command::Solve { instance, aut, method, assume_width1, meet, table } => cmd_solve(
            &instance,
            &aut,
            &method,
            assume_width1,
            meet.as_deref(),
            table.as_deref(),
            budget,
        ),
        Command::CheckPoly { automaton, op, table } => {
            cmd_check_poly(&automaton, op.as_deref(), table.as_deref())
        }
        Command::Translate { instance, aut, affine, majority } => {
            cmd_translate(&instance, &aut, affine, majority.as_deref())
        }
        Command::Minimize { instance, aut, out } => cmd_minimize(&instance, &aut, out.as_deref()),
        Command::Oracle { cmd } => match cmd {
            OracleCmd::Enumerate { automaton, n } => cmd_oracle_enumerate(&automaton, n, budget),
            OracleCmd::Solve { instance, aut } => cmd_oracle_solve(&instance, &aut, budget),
            OracleCmd::Checkpoly { automaton, op, table, max_len } => {
                cmd_oracle_checkpoly(&automaton, op.as_deref(), table.as_deref(), max_len, budget)
            }
        },
        Command::Fixtures { out } => cmd_fixtures(&out),
        Command::Generate { kind } => cmd_generate(kind),
    }
}

// ----------------------------------------------------------------------
// classify
// ----------------------------------------------------------------------

fn cmd_classify(path: &Path) -> CmdResult {
    let automaton = load_automaton(path)?;
    if automaton.domain().is_boolean() {
        let verdict = ops::classify_dichotomy(&automaton).map_err(usage)?;
        let report = ClassifyReport::from_verdict(automaton.domain(), &verdict);
        let code = match verdict.classification {
            Classification::InP => {
                eprintln!(
                    "in P: polymorphisms {:?}",
                    verdict.tractable_ops.iter().map(|o| o.name()).collect::<Vec<_>>()
                );
                0
            }
            Classification::NpComplete => {
                eprintln!("NP-complete: six hardness witnesses recorded");
                1
            }
        };
        report::emit(&report);
        return Ok(code);
    }
    // Partial report for non-Boolean domains: the affine check is the one
    // classification that needs no user-supplied table.
    let mut note = String::from("non-Boolean domain: full classification needs user tables");
    let mut classification = "unknown";
    if let Some(q) = automaton.domain().as_numeric() {
        if affine::is_prime(q) {
            let fq = OperationTable::affine(q).map_err(usage)?;
            if ops::check_user_table(&automaton, &fq).map_err(usage)?.holds {
                classification = "in_p";
                note = format!("affine: f_{q} is a polymorphism; solvable via --method affine:{q}");
            } else {
                note =
                    format!("f_{q} is not a polymorphism; semilattice/NU checks need user tables");
            }
        }
    }
    eprintln!("{note}");
    report::emit(&ClassifyReport {
        command: "classify",
        status: "classified",
        classification,
        tractable_ops: vec![],
        witnesses: vec![],
        note: Some(note),
    });
    Ok(0)
}

// ----------------------------------------------------------------------
// solve
// ----------------------------------------------------------------------

fn require_polymorphism(a: &Automaton, f: &OperationTable, what: &str) -> Result<(), CliError> {
    let verdict = ops::check_user_table(a, f).map_err(usage)?;
    if verdict.holds {
        Ok(())
    } else {
        let cex = verdict.counterexample.unwrap();
        let d = a.domain();
        Err(CliError::Usage(format!(
            "automaton does not admit {what} as a polymorphism: inputs {:?} map to rejected {}",
            cex.inputs.iter().map(|w| d.format_word(w)).collect::<Vec<_>>(),
            d.format_word(&cex.output),
        )))
    }
}

fn emit_solve(
    instance: &Instance,
    method: &str,
    outcome: &SolveOutcome,
    note: Option<String>,
) -> CmdResult {
    match outcome {
        SolveOutcome::Sat(phi) => {
            // fail-closed: re-verify before emitting
            if !instance.verify(phi) {
                return Err(CliError::Usage(
                    "internal: produced assignment failed re-verification".into(),
                ));
            }
            eprintln!("sat via {method}");
            report::emit(&SolveReport {
                command: "solve",
                status: "sat",
                method: method.to_string(),
                assignment: Some(assignment_map(instance, phi)),
                note,
            });
            Ok(0)
        }
        SolveOutcome::Unsat => {
            eprintln!("unsat via {method}");
            report::emit(&SolveReport {
                command: "solve",
                status: "unsat",
                method: method.to_string(),
                assignment: None,
                note,
            });
            Ok(1)
        }
    }
}

fn solve_constant(instance: &Instance, c: u16) -> SolveOutcome {
    let phi = Assignment::new(vec![c; instance.var_count()]);
    if instance.verify(&phi) {
        SolveOutcome::Sat(phi)
    } else {
        SolveOutcome::Unsat
    }
}

fn cmd_solve(
    instance_path: &Path,
    aut_path: &Path,
    method: &str,
    assume_width1: bool,
    meet: Option<&Path>,
    table: Option<&Path>,
    budget: Budget,
) -> CmdResult {
    let automaton = load_automaton(aut_path)?;
    let instance = load_instance(instance_path, automaton)?;
    match method {
        "auto" => solve_auto(&instance, budget),
        "and" => {
            require_polymorphism(instance.automaton(), &SchaeferOp::And.table(), "and")?;
            let got = semilattice::solve_and(&instance).map_err(usage)?;
            emit_solve(&instance, "and", &got, None)
        }
        "or" => {
            require_polymorphism(instance.automaton(), &SchaeferOp::Or.table(), "or")?;
            let got = semilattice::solve_or(&instance).map_err(usage)?;
            emit_solve(&instance, "or", &got, None)
        }
        "width1" => {
            if !assume_width1 {
                return Err(CliError::Usage(
                    "--method width1 requires --assume-width1: width 1 is a promise, not a checked property"
                        .into(),
                ));
            }
            match width1::solve_width1(&instance) {
                width1::Decision::No => {
                    eprintln!("unsat via width1 (refuted by 1-minimality)");
                    report::emit(&SolveReport {
                        command: "solve",
                        status: "unsat",
                        method: "width1".into(),
                        assignment: None,
                        note: None,
                    });
                    Ok(1)
                }
                width1::Decision::Yes => {
                    eprintln!("satisfiable under the width-1 promise (decision only)");
                    report::emit(&SolveReport {
                        command: "solve",
                        status: "sat_decision",
                        method: "width1".into(),
                        assignment: None,
                        note: Some(
                            "decision only; sound iff the language has width 1 (promise)".into(),
                        ),
                    });
                    Ok(0)
                }
            }
        }
        "semilattice" => {
            let meet_path = meet.ok_or_else(|| {
                CliError::Usage("--method semilattice requires --meet TABLE".into())
            })?;
            let meet = load_table(meet_path)?;
            let got = width1::solve_semilattice_general(&instance, &meet).map_err(usage)?;
            emit_solve(&instance, "semilattice", &got, None)
        }
        "majority" => {
            let g = match table {
                Some(p) => load_table(p)?,
                None if instance.domain().is_boolean() => SchaeferOp::Maj.table(),
                None => {
                    return Err(CliError::Usage(
                        "--method majority needs --table TABLE on non-Boolean domains".into(),
                    ))
                }
            };
            require_polymorphism(instance.automaton(), &g, "the majority table")?;
            let net = nu::translate_majority(&instance, &g).map_err(usage)?;
            let got = nu::path_consistency_solve(&net, &g).map_err(usage)?;
            emit_solve(&instance, "majority", &got, None)
        }
        "brute" => {
            let got = oracle::brute_solve(&instance, budget)?;
            emit_solve(&instance, "brute", &got, None)
        }
        m => {
            if let Some(q) = m.strip_prefix("affine:") {
                let q: u16 =
                    q.parse().map_err(|_| CliError::Usage(format!("bad affine modulus in `{m}`")))?;
                let fq = OperationTable::affine(q).map_err(usage)?;
                require_polymorphism(instance.automaton(), &fq, &format!("f_{q}"))?;
                let got = affine::solve_affine(&instance, q).map_err(usage)?;
                return emit_solve(&instance, &format!("affine:{q}"), &got, None);
            }
            if let Some(k) = m.strip_prefix("nu:") {
                let k: usize =
                    k.parse().map_err(|_| CliError::Usage(format!("bad NU arity in `{m}`")))?;
                let table_path = table.ok_or_else(|| {
                    CliError::Usage("--method nu:<k> requires --table TABLE".into())
                })?;
                let g = load_table(table_path)?;
                if g.arity() != k {
                    return Err(CliError::Usage(format!(
                        "table arity {} does not match nu:{k}",
                        g.arity()
                    )));
                }
                require_polymorphism(instance.automaton(), &g, "the NU table")?;
                let got = nu::solve_nu(&instance, &g).map_err(usage)?;
                return emit_solve(&instance, &format!("nu:{k}"), &got, None);
            }
            Err(CliError::Usage(format!("unknown method `{m}`")))
        }
    }
}

fn solve_auto(instance: &Instance, budget: Budget) -> CmdResult {
    let automaton = instance.automaton();
    if !automaton.domain().is_boolean() {
        if let Some(q) = automaton.domain().as_numeric() {
            if affine::is_prime(q) {
                let fq = OperationTable::affine(q).map_err(usage)?;
                if ops::check_user_table(automaton, &fq).map_err(usage)?.holds {
                    let got = affine::solve_affine(instance, q).map_err(usage)?;
                    return emit_solve(instance, &format!("affine:{q}"), &got, None);
                }
            }
        }
        let note =
            "no tractable structure detected on this domain; brute-force fallback".to_string();
        eprintln!("warning: {note}");
        let got = oracle::brute_solve(instance, budget)?;
        return emit_solve(instance, "brute", &got, Some(note));
    }
    let verdict = ops::classify_dichotomy(automaton).map_err(usage)?;
    if verdict.classification == Classification::NpComplete {
        let note = "AutCSP(A) is NP-complete; brute-force fallback".to_string();
        eprintln!("warning: {note}");
        let got = oracle::brute_solve(instance, budget)?;
        return emit_solve(instance, "brute", &got, Some(note));
    }
    for op in &verdict.tractable_ops {
        match op {
            SchaeferOp::Const0 | SchaeferOp::Const1 => {
                // The constant-assignment evaluation is complete only
                // without unary domain constraints.
                if instance.domain_constraints().is_empty() {
                    let c = if *op == SchaeferOp::Const0 { 0 } else { 1 };
                    let got = solve_constant(instance, c);
                    return emit_solve(instance, op.name(), &got, None);
                }
            }
            SchaeferOp::And => {
                let got = semilattice::solve_and(instance).map_err(usage)?;
                return emit_solve(instance, "and", &got, None);
            }
            SchaeferOp::Or => {
                let got = semilattice::solve_or(instance).map_err(usage)?;
                return emit_solve(instance, "or", &got, None);
            }
            SchaeferOp::Maj => {
                let g = SchaeferOp::Maj.table();
                let net = nu::translate_majority(instance, &g).map_err(usage)?;
                let got = nu::path_consistency_solve(&net, &g).map_err(usage)?;
                return emit_solve(instance, "majority", &got, None);
            }
            SchaeferOp::Minor => {
                let got = affine::solve_affine(instance, 2).map_err(usage)?;
                return emit_solve(instance, "affine:2", &got, None);
            }
        }
    }
    // Only constants hold but domain lines are present: fall back honestly.
    let note = "only constant polymorphisms hold and the instance carries domain constraints; brute-force fallback".to_string();
    eprintln!("warning: {note}");
    let got = oracle::brute_solve(instance, budget)?;
    emit_solve(instance, "brute", &got, Some(note))
}

// ----------------------------------------------------------------------
// check-poly
// ----------------------------------------------------------------------

fn resolve_table(
    automaton: &Automaton,
    op: Option<&str>,
    table: Option<&Path>,
) -> Result<(String, OperationTable), CliError> {
    match (op, table) {
        (Some(name), None) => {
            let op = SchaeferOp::from_name(name)
                .ok_or_else(|| CliError::Usage(format!("unknown operation `{name}`")))?;
            if !automaton.domain().is_boolean() {
                return Err(CliError::Usage(format!(
                    "--op {name} needs the Boolean domain; use --table for {}",
                    automaton.domain()
                )));
            }
            Ok((name.to_string(), op.table()))
        }
        (None, Some(path)) => Ok((path.display().to_string(), load_table(path)?)),
        _ => Err(CliError::Usage("pass exactly one of --op NAME or --table FILE".into())),
    }
}

fn cmd_check_poly(path: &Path, op: Option<&str>, table: Option<&Path>) -> CmdResult {
    let automaton = load_automaton(path)?;
    let (name, table) = resolve_table(&automaton, op, table)?;
    let verdict = ops::check_user_table(&automaton, &table).map_err(usage)?;
    eprintln!("{name}: {}", if verdict.holds { "polymorphism" } else { "not a polymorphism" });
    let code = u8::from(!verdict.holds);
    report::emit(&CheckPolyReport {
        command: "check-poly",
        status: "classified",
        op: name,
        arity: table.arity(),
        holds: verdict.holds,
        counterexample: verdict
            .counterexample
            .as_ref()
            .map(|c| CexJson::new(automaton.domain(), c)),
        max_len: None,
    });
    Ok(code)
}

// ----------------------------------------------------------------------
// translate
// ----------------------------------------------------------------------

fn cmd_translate(
    instance_path: &Path,
    aut_path: &Path,
    affine_q: Option<u16>,
    majority: Option<&Path>,
) -> CmdResult {
    let automaton = load_automaton(aut_path)?;
    let instance = load_instance(instance_path, automaton)?;
    match (affine_q, majority) {
        (Some(q), None) => {
            let mut constraints = Vec::new();
            for c in instance.constraints() {
                let scope: Vec<String> =
                    c.scope.iter().map(|&v| instance.variables()[v].clone()).collect();
                let sys = affine::extract_linear_system(instance.automaton(), c.scope.len(), q)
                    .map_err(usage)?;
                constraints.push(AffineConstraintJson {
                    scope,
                    empty_relation: sys.is_none(),
                    system: sys.map(|s| LinearSystemJson::new(&s, q)),
                });
            }
            let global = affine::assemble_global_system(&instance, q).map_err(usage)?;
            eprintln!(
                "affine translation over GF({q}): {} constraint systems, {} global rows",
                constraints.len(),
                global.matrix.rows()
            );
            report::emit(&TranslateAffineReport {
                command: "translate",
                status: "ok",
                kind: "affine",
                q,
                vars: instance.variables().to_vec(),
                constraints,
                global: LinearSystemJson::new(&global, q),
            });
            Ok(0)
        }
        (None, Some(table_path)) => {
            let g = load_table(table_path)?;
            let net = nu::translate_majority(&instance, &g).map_err(usage)?;
            let domain = instance.domain();
            let unary: BTreeMap<String, Vec<String>> = (0..net.var_count())
                .map(|v| {
                    (
                        net.var_names()[v].clone(),
                        mask_iter(net.unary(v)).map(|d| domain.symbol(d).to_string()).collect(),
                    )
                })
                .collect();
            let mut pairs = Vec::new();
            for x in 0..net.var_count() {
                for y in x + 1..net.var_count() {
                    let rel = net.relation(x, y);
                    pairs.push(PairJson {
                        x: net.var_names()[x].clone(),
                        y: net.var_names()[y].clone(),
                        tuples: rel
                            .tuples()
                            .iter()
                            .map(|&(a, b)| domain.format_word(&[a, b]))
                            .collect(),
                    });
                }
            }
            eprintln!("majority translation: {} pairs", pairs.len());
            report::emit(&TranslateMajorityReport {
                command: "translate",
                status: "ok",
                kind: "majority",
                vars: instance.variables().to_vec(),
                unary,
                pairs,
            });
            Ok(0)
        }
        _ => Err(CliError::Usage("pass exactly one of --affine Q or --majority TABLE".into())),
    }
}

// ----------------------------------------------------------------------
// minimize
// ----------------------------------------------------------------------

fn cmd_minimize(instance_path: &Path, aut_path: &Path, out: Option<&Path>) -> CmdResult {
    let automaton = load_automaton(aut_path)?;
    let instance = load_instance(instance_path, automaton)?;
    let minimized = width1::one_minimize(&instance);
    let expanded = minimized.to_instance(&instance);
    let text = expanded.to_text();
    if let Some(path) = out {
        std::fs::write(path, &text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let domain = instance.domain();
    let domains: BTreeMap<String, Vec<String>> = instance
        .variables()
        .iter()
        .enumerate()
        .map(|(v, name)| {
            (
                name.clone(),
                mask_iter(minimized.domains[v]).map(|d| domain.symbol(d).to_string()).collect(),
            )
        })
        .collect();
    eprintln!(
        "1-minimized: {} updates, {}",
        minimized.trace.len(),
        if minimized.refuted { "refuted" } else { "not refuted" }
    );
    let refuted = minimized.refuted;
    report::emit(&MinimizeReport {
        command: "minimize",
        status: "ok",
        refuted,
        updates: minimized.trace.len(),
        domains,
        instance_text: text,
    });
    Ok(u8::from(refuted))
}

// ----------------------------------------------------------------------
// oracle
// ----------------------------------------------------------------------

fn cmd_oracle_enumerate(path: &Path, n: usize, budget: Budget) -> CmdResult {
    let automaton = load_automaton(path)?;
    let relation = oracle::enumerate_relation(&automaton, n, budget)?;
    eprintln!("|R_{n}| = {}", relation.len());
    report::emit(&EnumerateReport {
        command: "oracle-enumerate",
        status: "ok",
        n,
        count: relation.len(),
        tuples: relation.iter().map(|w| automaton.domain().format_word(w)).collect(),
    });
    Ok(0)
}

fn cmd_oracle_solve(instance_path: &Path, aut_path: &Path, budget: Budget) -> CmdResult {
    let automaton = load_automaton(aut_path)?;
    let instance = load_instance(instance_path, automaton)?;
    let got = oracle::brute_solve(&instance, budget)?;
    emit_solve(&instance, "brute", &got, None)
}

fn cmd_oracle_checkpoly(
    path: &Path,
    op: Option<&str>,
    table: Option<&Path>,
    max_len: usize,
    budget: Budget,
) -> CmdResult {
    let automaton = load_automaton(path)?;
    let (name, table) = resolve_table(&automaton, op, table)?;
    if table.domain() != automaton.domain() {
        return Err(CliError::Usage(format!(
            "table domain {} does not match automaton domain {}",
            table.domain(),
            automaton.domain()
        )));
    }
    let verdict = oracle::brute_is_polymorphism(&automaton, &table, max_len, budget)?;
    eprintln!(
        "{name}: {} (complete up to length {max_len})",
        if verdict.holds { "no refutation found" } else { "refuted" }
    );
    let code = u8::from(!verdict.holds);
    report::emit(&CheckPolyReport {
        command: "oracle-checkpoly",
        status: "classified",
        op: name,
        arity: table.arity(),
        holds: verdict.holds,
        counterexample: verdict
            .counterexample
            .as_ref()
            .map(|c| CexJson::new(automaton.domain(), c)),
        max_len: Some(max_len),
    });
    Ok(code)
}

// ----------------------------------------------------------------------
// fixtures / generate
// ----------------------------------------------------------------------

fn cmd_fixtures(out: &Path) -> CmdResult {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", out.display())))?;
    let mut files = Vec::new();
    for (name, automaton) in fixtures::all() {
        let path = out.join(format!("{name}.aut"));
        std::fs::write(&path, automaton.to_text())
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        files.push(path.display().to_string());
    }
    eprintln!("wrote {} fixtures to {}", files.len(), out.display());
    report::emit(&FilesReport { command: "fixtures", status: "ok", kind: "fixtures".into(), files });
    Ok(0)
}

fn cmd_generate(kind: GenerateCmd) -> CmdResult {
    match kind {
        GenerateCmd::NaeSingleConstraint { clauses, vars, seed, out } => {
            if clauses == 0 {
                return Err(CliError::Usage("--clauses must be at least 1".into()));
            }
            if vars < 3 {
                return Err(CliError::Usage("--vars must be at least 3 for NAE₃ clauses".into()));
            }
            std::fs::create_dir_all(&out)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", out.display())))?;
            let mut rng = SplitMix64::new(seed);
            let names: Vec<String> = (0..vars).map(|i| format!("x{i}")).collect();
            let mut scope = Vec::with_capacity(3 * clauses);
            for _ in 0..clauses {
                // three distinct variables per clause
                let a = rng.below(vars);
                let b = loop {
                    let b = rng.below(vars);
                    if b != a {
                        break b;
                    }
                };
                let c = loop {
                    let c = rng.below(vars);
                    if c != a && c != b {
                        break c;
                    }
                };
                scope.extend([a, b, c]);
            }
            let automaton = fixtures::nae3_star();
            let instance = Instance::new(
                names,
                vec![autcsp_core::Constraint { scope }],
                automaton.clone(),
                Default::default(),
            )
            .expect("generated instance is well formed");
            let aut_path = out.join("nae3_star.aut");
            let inst_path = out.join("nae_single.inst");
            std::fs::write(&aut_path, automaton.to_text())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            std::fs::write(&inst_path, instance.to_text())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            eprintln!("single constraint of arity {} over NAE3*", 3 * clauses);
            report::emit(&FilesReport {
                command: "generate",
                status: "ok",
                kind: "nae-single-constraint".into(),
                files: vec![aut_path.display().to_string(), inst_path.display().to_string()],
            });
            Ok(0)
        }
        GenerateCmd::Random { seed, out, states, domain_size, vars, constraints, max_arity } => {
            if states == 0 || vars == 0 || max_arity == 0 {
                return Err(CliError::Usage(
                    "--states, --vars, --max-arity must be positive".into(),
                ));
            }
            let domain =
                autcsp_core::Domain::new((0..domain_size).map(|d| d.to_string()).collect())
                    .map_err(usage)?;
            std::fs::create_dir_all(&out)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", out.display())))?;
            let mut rng = SplitMix64::new(seed);
            let automaton = gen::random_automaton(&mut rng, states, &domain);
            let instance = gen::random_instance(
                &mut rng,
                automaton.clone(),
                vars,
                constraints,
                1,
                max_arity,
                15,
            );
            let aut_path = out.join("random.aut");
            let inst_path = out.join("random.inst");
            std::fs::write(&aut_path, automaton.to_text())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            std::fs::write(&inst_path, instance.to_text())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            eprintln!("random automaton ({} states) and instance written", automaton.state_count());
            report::emit(&FilesReport {
                command: "generate",
                status: "ok",
                kind: "random".into(),
                files: vec![aut_path.display().to_string(), inst_path.display().to_string()],
            });
            Ok(0)
        }
    }
}
