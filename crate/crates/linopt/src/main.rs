//! Command-line interface: exact-discrimination checks, feasibility
//! searches, minimum-error optimization, and dephased distributions over
//! JSON state-set and unitary files.
//!
//! Exit codes: 0 pass/success, 1 principled negative (failed check or
//! no-solution evidence), 2 input error, 3 precondition violation
//! (non-orthogonal input states). Reports go to standard output as
//! canonical JSON; the human summary and timing go to standard error.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::json;

use linopt::cli::{
    complex_json, distribution_json, failure_json, feasibility_verdict_json, fixed_verdict_json,
    load_state_set, load_unitary, protocol_json, AnalysisReport, StateDoc, StateSetDocument,
    TermDoc,
};
use linopt::criteria::{fixed_array_check, CriteriaError};
use linopt::estimation::{dephase, min_error_probability, optimize_min_error, EstimationError};
use linopt::feasibility::{
    augment_with_ancilla, conditional_search, find_tower_mode, FeasibilityError, ACCEPT_TOL,
};
use linopt::states::four_state_family;

#[derive(Parser)]
#[command(
    name = "linopt",
    about = "Exact and approximate discrimination of photonic states with linear optics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SearchMode {
    Tower,
    Conditional,
}

#[derive(Subcommand)]
enum Command {
    /// Check the full hierarchy of conditions for a fixed interferometer.
    CheckFixed {
        statefile: String,
        unitaryfile: String,
        /// Magnitude below which a condition counts as satisfied.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Search for a detection mode (tower) or a full conditional protocol.
    Search {
        statefile: String,
        #[arg(long, value_enum, default_value = "tower")]
        mode: SearchMode,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Tensor the document's auxiliary state onto every signal state.
        #[arg(long)]
        aux: bool,
    },
    /// Minimize the minimum-error probability over interferometers.
    MinError {
        statefile: String,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Outcome distributions after a fixed interferometer and counting.
    Dephase {
        statefile: String,
        unitaryfile: String,
    },
    /// Emit the four-state two-qubit family document for given amplitudes.
    GenFourFamily {
        /// α as two floats: real part, imaginary part.
        #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
        alpha: Vec<f64>,
        #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
        beta: Vec<f64>,
        #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
        gamma: Vec<f64>,
        #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
        delta: Vec<f64>,
    },
}

/// 0 pass, 1 principled negative, 2 input error, 3 precondition violation.
enum Outcome {
    Pass(AnalysisReport, String),
    Negative(AnalysisReport, String),
    InputError(String),
    Precondition(String),
}

fn classify_feasibility(e: FeasibilityError) -> Outcome {
    match e {
        FeasibilityError::Criteria(CriteriaError::NotOrthogonal(k, l, ov)) => {
            Outcome::Precondition(format!("states {k} and {l} are not orthogonal (|⟨·|·⟩| = {ov:.3e})"))
        }
        other => Outcome::InputError(other.to_string()),
    }
}

fn run_check_fixed(statefile: &str, unitaryfile: &str, tol: f64) -> Outcome {
    let (doc, sdig) = match load_state_set(statefile) {
        Ok(v) => v,
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let (udoc, udig) = match load_unitary(unitaryfile) {
        Ok(v) => v,
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let states = match doc.signal_states() {
        Ok(v) => v,
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let u = match udoc.to_unitary() {
        Ok(v) => v,
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    if u.dim() != doc.modes {
        return Outcome::InputError(format!(
            "unitary dimension {} does not match {} modes",
            u.dim(),
            doc.modes
        ));
    }
    let verdict = match fixed_array_check(&states, &u, tol) {
        Ok(v) => v,
        Err(CriteriaError::NotOrthogonal(k, l, ov)) => {
            return Outcome::Precondition(format!(
                "states {k} and {l} are not orthogonal (|⟨·|·⟩| = {ov:.3e})"
            ))
        }
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let report = AnalysisReport {
        command: format!("check-fixed {statefile} {unitaryfile} --tol {tol:e}"),
        inputs: BTreeMap::from([("states".to_string(), sdig), ("unitary".to_string(), udig)]),
        seed: None,
        tol: Some(tol),
        result: fixed_verdict_json(&verdict),
    };
    if verdict.passed() {
        Outcome::Pass(report, "all hierarchy conditions satisfied".into())
    } else {
        Outcome::Negative(report, "hierarchy condition violated".into())
    }
}

fn load_search_states(
    statefile: &str,
    use_aux: bool,
) -> Result<(StateSetDocument, String, Vec<linopt::fock::FockState>), Outcome> {
    let (doc, sdig) = load_state_set(statefile).map_err(|e| Outcome::InputError(e.to_string()))?;
    let mut states = doc
        .signal_states()
        .map_err(|e| Outcome::InputError(e.to_string()))?;
    if use_aux {
        let aux = doc
            .aux_state()
            .map_err(|e| Outcome::InputError(e.to_string()))?
            .ok_or_else(|| Outcome::InputError("--aux given but document has no aux state".into()))?;
        states = augment_with_ancilla(&states, &aux);
    }
    Ok((doc, sdig, states))
}

fn run_search(statefile: &str, mode: SearchMode, restarts: usize, seed: u64, aux: bool) -> Outcome {
    let (doc, sdig, states) = match load_search_states(statefile, aux) {
        Ok(v) => v,
        Err(out) => return out,
    };
    let mode_name = match mode {
        SearchMode::Tower => "tower",
        SearchMode::Conditional => "conditional",
    };
    let command = format!(
        "search {statefile} --mode {mode_name} --restarts {restarts} --seed {seed}{}",
        if aux { " --aux" } else { "" }
    );
    let inputs = BTreeMap::from([("states".to_string(), sdig)]);
    let labels = doc.labels();
    match mode {
        SearchMode::Tower => match find_tower_mode(&states, restarts, ACCEPT_TOL, seed) {
            Ok(verdict) => {
                let found = verdict.found();
                let report = AnalysisReport {
                    command,
                    inputs,
                    seed: Some(seed),
                    tol: Some(ACCEPT_TOL),
                    result: feasibility_verdict_json(&verdict),
                };
                if found {
                    Outcome::Pass(
                        report,
                        format!("tower mode found, residual {:.3e}", verdict.residual()),
                    )
                } else {
                    Outcome::Negative(
                        report,
                        format!("no tower mode, best residual {:.3e}", verdict.residual()),
                    )
                }
            }
            Err(e) => classify_feasibility(e),
        },
        SearchMode::Conditional => {
            let depth = states[0].modes();
            match conditional_search(&states, depth, restarts, seed) {
                Ok(Ok(protocol)) => {
                    let report = AnalysisReport {
                        command,
                        inputs,
                        seed: Some(seed),
                        tol: Some(ACCEPT_TOL),
                        result: json!({
                            "verdict": "protocol_found",
                            "protocol": protocol_json(&protocol, &labels),
                        }),
                    };
                    Outcome::Pass(report, "complete conditional protocol found".into())
                }
                Ok(Err(failure)) => {
                    let report = AnalysisReport {
                        command,
                        inputs,
                        seed: Some(seed),
                        tol: Some(ACCEPT_TOL),
                        result: json!({
                            "verdict": "no_protocol",
                            "failure": failure_json(&failure, &labels),
                        }),
                    };
                    Outcome::Negative(report, "conditional search obstructed".into())
                }
                Err(e) => classify_feasibility(e),
            }
        }
    }
}

fn run_min_error(statefile: &str, restarts: usize, seed: u64) -> Outcome {
    let (doc, sdig) = match load_state_set(statefile) {
        Ok(v) => v,
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let states = match doc.signal_states() {
        Ok(v) => v,
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let (u, value) = match optimize_min_error(&states, restarts, seed) {
        Ok(v) => v,
        Err(e @ EstimationError::NoRestarts) => return Outcome::InputError(e.to_string()),
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let dist = dephase(&states, &u).expect("dimensions match");
    let rows: Vec<Vec<serde_json::Value>> = (0..u.dim())
        .map(|i| (0..u.dim()).map(|j| complex_json(u.matrix()[(i, j)])).collect())
        .collect();
    let report = AnalysisReport {
        command: format!("min-error {statefile} --restarts {restarts} --seed {seed}"),
        inputs: BTreeMap::from([("states".to_string(), sdig)]),
        seed: Some(seed),
        tol: None,
        result: json!({
            "min_error_probability": value,
            "unitary": rows,
            "distributions": distribution_json(&dist, &doc.labels()),
        }),
    };
    Outcome::Pass(report, format!("best min-error probability {value:.6}"))
}

fn run_dephase(statefile: &str, unitaryfile: &str) -> Outcome {
    let (doc, sdig) = match load_state_set(statefile) {
        Ok(v) => v,
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let (udoc, udig) = match load_unitary(unitaryfile) {
        Ok(v) => v,
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let states = match doc.signal_states() {
        Ok(v) => v,
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let u = match udoc.to_unitary() {
        Ok(v) => v,
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let dist = match dephase(&states, &u) {
        Ok(v) => v,
        Err(e) => return Outcome::InputError(e.to_string()),
    };
    let pe = min_error_probability(&dist).expect("nonempty state set");
    let report = AnalysisReport {
        command: format!("dephase {statefile} {unitaryfile}"),
        inputs: BTreeMap::from([("states".to_string(), sdig), ("unitary".to_string(), udig)]),
        seed: None,
        tol: None,
        result: json!({
            "distributions": distribution_json(&dist, &doc.labels()),
            "min_error_probability": pe,
        }),
    };
    Outcome::Pass(report, format!("min-error probability {pe:.6}"))
}

fn run_gen_four_family(alpha: C64, beta: C64, gamma: C64, delta: C64) -> Outcome {
    for (name, a, b) in [("alpha/beta", alpha, beta), ("gamma/delta", gamma, delta)] {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > 1e-9 {
            return Outcome::InputError(format!(
                "{name} must satisfy |first|² + |second|² = 1 (got {n})"
            ));
        }
    }
    let states = four_state_family(alpha, beta, gamma, delta);
    let labels = ["s1", "s2", "s3", "s4"];
    let doc = StateSetDocument {
        comment: Some(format!(
            "four two-qubit states over four modes: alpha={} beta={} gamma={} delta={}",
            alpha, beta, gamma, delta
        )),
        modes: 4,
        states: states
            .iter()
            .zip(labels)
            .map(|(st, label)| StateDoc {
                label: label.to_string(),
                terms: st
                    .terms()
                    .map(|(occ, amp)| TermDoc { occ: occ.0.clone(), amp: [amp.re, amp.im] })
                    .collect(),
            })
            .collect(),
        aux: None,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    print!("{text}");
    // not an analysis; no report object
    std::process::exit(0);
}

fn parse_complex(v: &[f64]) -> C64 {
    C64::new(v[0], v[1])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = match cli.command {
        Command::CheckFixed { statefile, unitaryfile, tol } => {
            if !(tol.is_finite() && tol > 0.0) {
                Outcome::InputError("--tol must be a positive finite number".into())
            } else {
                run_check_fixed(&statefile, &unitaryfile, tol)
            }
        }
        Command::Search { statefile, mode, restarts, seed, aux } => {
            if restarts == 0 {
                Outcome::InputError("--restarts must be at least 1".into())
            } else {
                run_search(&statefile, mode, restarts, seed, aux)
            }
        }
        Command::MinError { statefile, restarts, seed } => {
            if restarts == 0 {
                Outcome::InputError("--restarts must be at least 1".into())
            } else {
                run_min_error(&statefile, restarts, seed)
            }
        }
        Command::Dephase { statefile, unitaryfile } => run_dephase(&statefile, &unitaryfile),
        Command::GenFourFamily { alpha, beta, gamma, delta } => run_gen_four_family(
            parse_complex(&alpha),
            parse_complex(&beta),
            parse_complex(&gamma),
            parse_complex(&delta),
        ),
    };
    let elapsed = started.elapsed();
    match outcome {
        Outcome::Pass(report, summary) => {
            print!("{}", report.to_canonical_json());
            eprintln!("ok: {summary} ({elapsed:.2?})");
            ExitCode::from(0)
        }
        Outcome::Negative(report, summary) => {
            print!("{}", report.to_canonical_json());
            eprintln!("negative: {summary} ({elapsed:.2?})");
            ExitCode::from(1)
        }
        Outcome::InputError(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Outcome::Precondition(msg) => {
            eprintln!("precondition violated: {msg}");
            ExitCode::from(3)
        }
    }
}
