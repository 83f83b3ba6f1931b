//! File formats and report plumbing for the command-line interface.
//!
//! State sets and unitaries travel as UTF-8 JSON with complex numbers as
//! [re, im] pairs. Reports are canonical JSON on standard output —
//! byte-identical for identical (input, seed, version) — with the human
//! summary and timing on standard error only, so wall-clock noise never
//! touches the determinism contract.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::criteria::FixedArrayVerdict;
use crate::estimation::OutcomeDistribution;
use crate::feasibility::{
    FailureReport, FeasibilityVerdict, Obstruction, Protocol,
};
use crate::fock::{FockState, Occupation};
use crate::optics::{ModeVector, PassiveUnitary};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid document: {0}")]
    Invalid(String),
}

/// One basis term: occupation numbers and a complex amplitude as [re, im].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDoc {
    pub occ: Vec<u32>,
    pub amp: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDoc {
    pub label: String,
    pub terms: Vec<TermDoc>,
}

/// On-disk state set: a mode count, labeled states, and an optional shared
/// auxiliary state in the same shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSetDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub modes: usize,
    pub states: Vec<StateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<StateDoc>,
}

/// On-disk unitary: rows of complex entries as [re, im].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitaryDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
    pub dim: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

fn state_from_doc(doc: &StateDoc, modes: usize) -> Result<FockState, CliError> {
    if doc.terms.is_empty() {
        return Err(CliError::Invalid(format!("state '{}' has no terms", doc.label)));
    }
    let mut terms = Vec::with_capacity(doc.terms.len());
    for t in &doc.terms {
        if t.occ.len() != modes {
            return Err(CliError::Invalid(format!(
                "state '{}': occupation length {} does not match modes {}",
                doc.label,
                t.occ.len(),
                modes
            )));
        }
        terms.push((Occupation::new(t.occ.clone()), C64::new(t.amp[0], t.amp[1])));
    }
    FockState::from_terms(modes, terms)
        .map_err(|e| CliError::Invalid(format!("state '{}': {e}", doc.label)))
}

impl StateSetDocument {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.states.is_empty() {
            return Err(CliError::Invalid("no states in document".into()));
        }
        let mut seen = BTreeMap::new();
        for st in &self.states {
            if seen.insert(st.label.clone(), ()).is_some() {
                return Err(CliError::Invalid(format!("duplicate label '{}'", st.label)));
            }
        }
        Ok(())
    }

    pub fn signal_states(&self) -> Result<Vec<FockState>, CliError> {
        self.validate()?;
        self.states.iter().map(|s| state_from_doc(s, self.modes)).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(|s| s.label.clone()).collect()
    }

    /// The auxiliary state, parsed with its own mode count (the length of
    /// its occupation vectors).
    pub fn aux_state(&self) -> Result<Option<FockState>, CliError> {
        match &self.aux {
            None => Ok(None),
            Some(doc) => {
                let modes = doc
                    .terms
                    .first()
                    .map(|t| t.occ.len())
                    .ok_or_else(|| CliError::Invalid("aux state has no terms".into()))?;
                Ok(Some(state_from_doc(doc, modes)?))
            }
        }
    }
}

impl UnitaryDocument {
    pub fn to_unitary(&self) -> Result<PassiveUnitary, CliError> {
        if self.rows.len() != self.dim || self.rows.iter().any(|r| r.len() != self.dim) {
            return Err(CliError::Invalid(format!(
                "unitary is not {0}×{0}",
                self.dim
            )));
        }
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| {
            C64::new(self.rows[i][j][0], self.rows[i][j][1])
        });
        PassiveUnitary::new(m).map_err(|e| CliError::Invalid(e.to_string()))
    }

    pub fn from_unitary(u: &PassiveUnitary, comment: Option<String>) -> Self {
        let dim = u.dim();
        let rows = (0..dim)
            .map(|i| (0..dim).map(|j| {
                let z = u.matrix()[(i, j)];
                [z.re, z.im]
            }).collect())
            .collect();
        Self { comment, dim, rows }
    }
}

fn read_to_string(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn load_state_set(path: &str) -> Result<(StateSetDocument, String), CliError> {
    let text = read_to_string(path)?;
    let doc: StateSetDocument = serde_json::from_str(&text)
        .map_err(|source| CliError::Json { path: path.into(), source })?;
    doc.validate()?;
    Ok((doc, digest(text.as_bytes())))
}

pub fn load_unitary(path: &str) -> Result<(UnitaryDocument, String), CliError> {
    let text = read_to_string(path)?;
    let doc: UnitaryDocument = serde_json::from_str(&text)
        .map_err(|source| CliError::Json { path: path.into(), source })?;
    Ok((doc, digest(text.as_bytes())))
}

/// SHA-256 hex digest of raw file bytes.
pub fn digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// The machine-readable analysis report written to standard output.
#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub command: String,
    /// Input-file digests keyed by role ("states", "unitary").
    pub inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub result: Value,
}

impl AnalysisReport {
    /// Canonical serialization: pretty JSON (struct field order, sorted
    /// maps) plus a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

pub fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn mode_vector_json(nu: &ModeVector) -> Value {
    Value::Array(nu.as_slice().iter().map(|z| complex_json(*z)).collect())
}

pub fn fixed_verdict_json(v: &FixedArrayVerdict) -> Value {
    match v {
        FixedArrayVerdict::Pass => json!({ "verdict": "pass" }),
        FixedArrayVerdict::Fail { pair, modes, value } => json!({
            "verdict": "fail",
            "pair": [pair.0, pair.1],
            "modes": modes,
            "value": complex_json(*value),
        }),
    }
}

pub fn feasibility_verdict_json(v: &FeasibilityVerdict) -> Value {
    match v {
        FeasibilityVerdict::SolutionFound { witness, residual, restarts, threshold } => json!({
            "verdict": "solution_found",
            "witness": mode_vector_json(witness),
            "residual": residual,
            "restarts": restarts,
            "threshold": threshold,
        }),
        FeasibilityVerdict::NoSolutionEvidence { residual, restarts, threshold } => json!({
            "verdict": "no_solution_evidence",
            "residual": residual,
            "restarts": restarts,
            "threshold": threshold,
        }),
    }
}

pub fn protocol_json(p: &Protocol, labels: &[String]) -> Value {
    match p {
        Protocol::Decide { surviving } => json!({
            "decide": surviving.iter().map(|&k| labels[k].clone()).collect::<Vec<_>>(),
        }),
        Protocol::Measure { mode, branches } => {
            let mut br = serde_json::Map::new();
            for (outcome, branch) in branches {
                br.insert(
                    outcome.to_string(),
                    json!({
                        "survivors": branch
                            .survivors
                            .iter()
                            .map(|&k| labels[k].clone())
                            .collect::<Vec<_>>(),
                        "next": protocol_json(&branch.next, labels),
                    }),
                );
            }
            json!({ "measure": mode_vector_json(mode), "branches": Value::Object(br) })
        }
    }
}

pub fn failure_json(f: &FailureReport, labels: &[String]) -> Value {
    let obstruction = match &f.obstruction {
        Obstruction::NoTowerMode { residual, restarts } => json!({
            "kind": "no_tower_mode",
            "residual": residual,
            "restarts": restarts,
        }),
        Obstruction::NonOrthogonalBranch { outcome, pair, overlap } => json!({
            "kind": "non_orthogonal_branch",
            "outcome": outcome,
            "pair": [labels[pair.0].clone(), labels[pair.1].clone()],
            "overlap": overlap,
        }),
        Obstruction::DepthExhausted { survivors } => json!({
            "kind": "depth_exhausted",
            "survivors": survivors.iter().map(|&k| labels[k].clone()).collect::<Vec<_>>(),
        }),
    };
    json!({
        "path": f.path,
        "obstruction": obstruction,
        "modes_tried": f.modes_tried,
    })
}

pub fn distribution_json(dist: &OutcomeDistribution, labels: &[String]) -> Value {
    let mut per_state = serde_json::Map::new();
    for (label, d) in labels.iter().zip(&dist.per_state) {
        let mut patterns = serde_json::Map::new();
        for (occ, p) in d {
            let key = occ
                .0
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",");
            patterns.insert(key, json!(p));
        }
        per_state.insert(label.clone(), Value::Object(patterns));
    }
    Value::Object(per_state)
}
