//! Feasibility searches: does a nontrivial mode vector satisfy the
//! single-mode condition tower, and does a conditional-dynamics protocol
//! exist?
//!
//! Infeasibility verdicts are evidence-graded: `NoSolutionEvidence` reports
//! the number of restarts and the minimum residual found, and never claims a
//! proof. The analytically proved No-Go families are additionally pinned by
//! exact algebraic oracles in the acceptance suite.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::criteria::{check_orthogonal, CriteriaError};
use crate::fock::{FockError, FockState, Occupation};
use crate::optics::{ModeVector, OpticsError, PassiveUnitary};
use crate::optimize::bfgs;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Residual at or below this counts as a tower solution.
pub const ACCEPT_TOL: f64 = 1e-10;

/// Branch probabilities below this are treated as numerically zero.
pub const BRANCH_PRUNE_TOL: f64 = 1e-12;

/// Conditional states overlapping by more than this are non-orthogonal.
pub const BRANCH_ORTHO_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum FeasibilityError {
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error("restarts must be at least 1")]
    NoRestarts,
    #[error("depth budget {budget} exceeds mode count {modes}")]
    DepthBudget { budget: usize, modes: usize },
}

/// Outcome of [`find_tower_mode`].
#[derive(Debug, Clone)]
pub enum FeasibilityVerdict {
    SolutionFound {
        witness: ModeVector,
        residual: f64,
        restarts: usize,
        threshold: f64,
    },
    NoSolutionEvidence {
        residual: f64,
        restarts: usize,
        threshold: f64,
    },
}

impl FeasibilityVerdict {
    pub fn found(&self) -> bool {
        matches!(self, FeasibilityVerdict::SolutionFound { .. })
    }

    pub fn residual(&self) -> f64 {
        match self {
            FeasibilityVerdict::SolutionFound { residual, .. } => *residual,
            FeasibilityVerdict::NoSolutionEvidence { residual, .. } => *residual,
        }
    }

    pub fn witness(&self) -> Option<&ModeVector> {
        match self {
            FeasibilityVerdict::SolutionFound { witness, .. } => Some(witness),
            FeasibilityVerdict::NoSolutionEvidence { .. } => None,
        }
    }
}

fn unit_from_params(p: &DVector<f64>) -> ModeVector {
    let dim = p.len() / 2;
    let norm = p.norm();
    ModeVector(
        (0..dim)
            .map(|i| C64::new(p[i] / norm, p[dim + i] / norm))
            .collect(),
    )
}

fn params_from_unit(nu: &ModeVector) -> DVector<f64> {
    let dim = nu.dim();
    DVector::from_fn(2 * dim, |i, _| {
        if i < dim {
            nu.0[i].re
        } else {
            nu.0[i - dim].im
        }
    })
}

/// Σ_{k<l} Σ_{n=1}^{n_max} |⟨χ_k|(ĉ†)ⁿĉⁿ|χ_l⟩|² for ĉ = Σ_i ν_i â_i.
/// Zero iff ν satisfies the full single-mode tower.
pub fn tower_objective(states: &[FockState], nu: &ModeVector) -> Result<f64, FeasibilityError> {
    let n_max = states.iter().map(FockState::cutoff).max().unwrap_or(0);
    let mut chains: Vec<Vec<FockState>> = Vec::with_capacity(states.len());
    for st in states {
        let mut chain = vec![st.clone()];
        for _ in 0..n_max {
            let next = chain.last().unwrap().mode_annihilate(nu.as_slice())?;
            chain.push(next);
        }
        chains.push(chain);
    }
    let mut total = 0.0;
    for k in 0..states.len() {
        for l in (k + 1)..states.len() {
            for n in 1..=(n_max as usize) {
                total += chains[k][n].inner(&chains[l][n])?.norm_sqr();
            }
        }
    }
    Ok(total)
}

/// Objective and analytic gradient of the normalized tower objective with
/// respect to the 2N real parameters p = (Re ν, Im ν), evaluated at
/// g(p) = tower_objective(p/‖p‖).
pub fn tower_objective_grad(
    states: &[FockState],
    p: &DVector<f64>,
) -> Result<(f64, DVector<f64>), FeasibilityError> {
    let dim = p.len() / 2;
    let pnorm = p.norm();
    let nu = unit_from_params(p);
    let n_max = states.iter().map(FockState::cutoff).max().unwrap_or(0) as usize;

    let mut chains: Vec<Vec<FockState>> = Vec::with_capacity(states.len());
    for st in states {
        let mut chain = vec![st.clone()];
        for _ in 0..n_max {
            let next = chain.last().unwrap().mode_annihilate(nu.as_slice())?;
            chain.push(next);
        }
        chains.push(chain);
    }
    // a_i c^{n−1} χ for every state, order, and mode
    let mut value = 0.0;
    // Wirtinger derivative ∂f/∂ν̄_i on the unit sphere
    let mut wirtinger = vec![C64::ZERO; dim];
    for k in 0..states.len() {
        for l in (k + 1)..states.len() {
            for n in 1..=n_max {
                let t = chains[k][n].inner(&chains[l][n])?;
                value += t.norm_sqr();
                if t.norm() == 0.0 {
                    continue;
                }
                for (i, w) in wirtinger.iter_mut().enumerate() {
                    let dk = chains[k][n - 1].annihilate(i)?;
                    let dl = chains[l][n - 1].annihilate(i)?;
                    let d_bra = dk.inner(&chains[l][n])?; // ⟨a_i c^{n−1}χ_k, cⁿχ_l⟩
                    let d_ket = chains[k][n].inner(&dl)?; // ⟨cⁿχ_k, a_i c^{n−1}χ_l⟩
                    *w += (n as f64) * (t.conj() * d_bra + t * d_ket.conj());
                }
            }
        }
    }
    // euclidean gradient at the unit point
    let mut grad_unit = DVector::zeros(2 * dim);
    for i in 0..dim {
        grad_unit[i] = 2.0 * wirtinger[i].re;
        grad_unit[dim + i] = 2.0 * wirtinger[i].im;
    }
    // chain rule through the normalization p ↦ p/‖p‖
    let u = p.scale(1.0 / pnorm);
    let radial = grad_unit.dot(&u);
    let grad = (grad_unit - u.scale(radial)).scale(1.0 / pnorm);
    Ok((value, grad))
}

/// Deterministic multistart seeds: all standard basis vectors, all two-mode
/// uniform superpositions with relative phases {1, i, −1, −i}, then random
/// unit vectors up to `restarts` total.
fn start_points(dim: usize, restarts: usize, rng: &mut ChaCha8Rng) -> Vec<ModeVector> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut starts = Vec::new();
    for i in 0..dim {
        starts.push(ModeVector::basis(dim, i));
    }
    let phases = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];
    for i in 0..dim {
        for j in (i + 1)..dim {
            for ph in phases {
                let mut v = vec![C64::ZERO; dim];
                v[i] = C64::new(s, 0.0);
                v[j] = ph * s;
                starts.push(ModeVector(v));
            }
        }
    }
    while starts.len() < restarts {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let nu = ModeVector(v);
        if nu.norm() > 1e-3 {
            starts.push(nu.normalized());
        }
    }
    starts
}

/// Multistart local minimization of the tower objective over the unit sphere.
pub fn find_tower_mode(
    states: &[FockState],
    restarts: usize,
    accept_tol: f64,
    seed: u64,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    let minima = tower_minima(states, restarts, seed)?;
    let (best_nu, best_val) = minima
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .expect("at least one restart");
    if best_val <= accept_tol {
        Ok(FeasibilityVerdict::SolutionFound {
            witness: best_nu,
            residual: best_val,
            restarts,
            threshold: accept_tol,
        })
    } else {
        Ok(FeasibilityVerdict::NoSolutionEvidence {
            residual: best_val,
            restarts,
            threshold: accept_tol,
        })
    }
}

/// All local minima found by the multistart, sorted by residual and
/// deterministic given the seed.
fn tower_minima(
    states: &[FockState],
    restarts: usize,
    seed: u64,
) -> Result<Vec<(ModeVector, f64)>, FeasibilityError> {
    if restarts == 0 {
        return Err(FeasibilityError::NoRestarts);
    }
    check_orthogonal(states, crate::criteria::CONDITION_TOL)?;
    let dim = states[0].modes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts = start_points(dim, restarts, &mut rng);
    let mut minima = Vec::with_capacity(starts.len());
    for start in &starts {
        let p0 = params_from_unit(start);
        let res = bfgs(
            &p0,
            |p| tower_objective_grad(states, p).expect("dimension checked"),
            1e-12,
            400,
        );
        let nu = unit_from_params(&res.x);
        minima.push((nu, res.value));
    }
    minima.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(minima)
}

/// Distinct tower solutions (residual ≤ accept_tol), deduplicated by
/// pairwise fidelity ≥ 0.99, at most `cap` of them.
pub fn distinct_tower_solutions(
    states: &[FockState],
    restarts: usize,
    accept_tol: f64,
    cap: usize,
    seed: u64,
) -> Result<Vec<ModeVector>, FeasibilityError> {
    let minima = tower_minima(states, restarts, seed)?;
    let mut out: Vec<ModeVector> = Vec::new();
    for (nu, val) in minima {
        if val > accept_tol {
            break;
        }
        if out.iter().all(|m| m.dot(&nu).norm() < 0.99) {
            out.push(nu);
            if out.len() == cap {
                break;
            }
        }
    }
    Ok(out)
}

/// One photon-count outcome on the measured mode: its probability per input
/// state and the normalized conditional states of the remaining modes.
#[derive(Debug, Clone)]
pub struct OutcomeBranch {
    pub outcome: u32,
    pub probability_per_state: Vec<f64>,
    /// Normalized conditional state for each input, `None` when the branch
    /// probability is below [`BRANCH_PRUNE_TOL`].
    pub conditional_states: Vec<Option<FockState>>,
}

/// Rotate ν into output mode 0 via the deterministic unitary completion,
/// then slice each transformed state by the photon count in mode 0.
pub fn partial_dephase(
    states: &[FockState],
    nu: &ModeVector,
) -> Result<Vec<OutcomeBranch>, FeasibilityError> {
    let u = PassiveUnitary::extend_from_row(nu)?;
    let mut per_outcome: BTreeMap<u32, Vec<BTreeMap<Occupation, C64>>> = BTreeMap::new();
    for (k, st) in states.iter().enumerate() {
        let transformed = u.apply(st)?;
        for (occ, amp) in transformed.terms() {
            let m = occ.0[0];
            let rest = Occupation(occ.0[1..].to_vec());
            let slot = per_outcome
                .entry(m)
                .or_insert_with(|| vec![BTreeMap::new(); states.len()]);
            slot[k].insert(rest, *amp);
        }
    }
    let rem_modes = states[0].modes() - 1;
    let mut branches = Vec::new();
    for (m, slices) in per_outcome {
        let mut probs = Vec::with_capacity(states.len());
        let mut conds = Vec::with_capacity(states.len());
        for slice in slices {
            let p: f64 = slice.values().map(|a| a.norm_sqr()).sum();
            probs.push(p);
            if p > BRANCH_PRUNE_TOL {
                let st = FockState::from_terms(rem_modes, slice)?.normalized();
                conds.push(Some(st));
            } else {
                conds.push(None);
            }
        }
        branches.push(OutcomeBranch {
            outcome: m,
            probability_per_state: probs,
            conditional_states: conds,
        });
    }
    Ok(branches)
}

/// Tensor each signal state with the shared auxiliary state.
pub fn augment_with_ancilla(signal_states: &[FockState], aux: &FockState) -> Vec<FockState> {
    signal_states.iter().map(|s| s.tensor(aux)).collect()
}

/// A conditional-dynamics protocol: measure the mode defined by `mode`
/// (rotated to output 0), then follow the branch for the observed count.
#[derive(Debug, Clone)]
pub enum Protocol {
    /// At most one candidate survives; it is identified (or the branch is
    /// empty).
    Decide { surviving: Vec<usize> },
    Measure {
        mode: ModeVector,
        branches: BTreeMap<u32, ProtocolBranch>,
    },
}

#[derive(Debug, Clone)]
pub struct ProtocolBranch {
    /// Labels (indices into the original state list) still possible here.
    pub survivors: Vec<usize>,
    pub next: Protocol,
}

/// Why a node of the search could not be completed.
#[derive(Debug, Clone)]
pub enum Obstruction {
    /// No mode vector satisfied the single-mode tower; best residual found.
    NoTowerMode { residual: f64, restarts: usize },
    /// Conditional states for this outcome are non-orthogonal: exact
    /// discrimination is impossible past this point.
    NonOrthogonalBranch {
        outcome: u32,
        pair: (usize, usize),
        overlap: f64,
    },
    /// Depth budget exhausted with several candidates still alive.
    DepthExhausted { survivors: Vec<usize> },
}

#[derive(Debug, Clone)]
pub struct FailureReport {
    /// Outcome path from the root to the obstructed node.
    pub path: Vec<u32>,
    pub obstruction: Obstruction,
    /// Distinct tower solutions tried at the obstructed node.
    pub modes_tried: usize,
}

pub type SearchResult = Result<Protocol, FailureReport>;

/// Recursive conditional-dynamics search.
///
/// At each node: find mode vectors satisfying the tower for the surviving
/// candidates, branch on photon-count outcomes, and recurse on the
/// conditional states. A branch with at most one surviving candidate is a
/// success leaf; a branch whose conditional states are non-orthogonal is a
/// dead end that forces backtracking to another tower solution (up to
/// `restarts` distinct minima per node).
pub fn conditional_search(
    states: &[FockState],
    depth_budget: usize,
    restarts: usize,
    seed: u64,
) -> Result<SearchResult, FeasibilityError> {
    check_orthogonal(states, crate::criteria::CONDITION_TOL)?;
    if depth_budget > states[0].modes() {
        return Err(FeasibilityError::DepthBudget {
            budget: depth_budget,
            modes: states[0].modes(),
        });
    }
    let labels: Vec<usize> = (0..states.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    search_node(states, &labels, depth_budget, restarts, &mut rng, &mut Vec::new())
}

fn search_node(
    states: &[FockState],
    labels: &[usize],
    depth: usize,
    restarts: usize,
    rng: &mut ChaCha8Rng,
    path: &mut Vec<u32>,
) -> Result<SearchResult, FeasibilityError> {
    if labels.len() <= 1 {
        return Ok(Ok(Protocol::Decide { surviving: labels.to_vec() }));
    }
    if depth == 0 || states[0].modes() == 0 {
        return Ok(Err(FailureReport {
            path: path.clone(),
            obstruction: Obstruction::DepthExhausted { survivors: labels.to_vec() },
            modes_tried: 0,
        }));
    }
    let node_seed = rng.gen::<u64>();
    let candidates = distinct_tower_solutions(states, restarts, ACCEPT_TOL, restarts, node_seed)?;
    if candidates.is_empty() {
        let verdict = find_tower_mode(states, restarts, ACCEPT_TOL, node_seed)?;
        return Ok(Err(FailureReport {
            path: path.clone(),
            obstruction: Obstruction::NoTowerMode {
                residual: verdict.residual(),
                restarts,
            },
            modes_tried: 0,
        }));
    }
    let mut last_failure: Option<FailureReport> = None;
    let tried = candidates.len();
    'modes: for nu in candidates {
        let branches = partial_dephase(states, &nu)?;
        // dead-end check before recursing
        for br in &branches {
            let surv: Vec<usize> = (0..labels.len())
                .filter(|&k| br.probability_per_state[k] > BRANCH_PRUNE_TOL)
                .collect();
            for a in 0..surv.len() {
                for b in (a + 1)..surv.len() {
                    let (sa, sb) = (surv[a], surv[b]);
                    let ov = br.conditional_states[sa]
                        .as_ref()
                        .unwrap()
                        .inner(br.conditional_states[sb].as_ref().unwrap())?
                        .norm();
                    if ov > BRANCH_ORTHO_TOL {
                        last_failure = Some(FailureReport {
                            path: path.clone(),
                            obstruction: Obstruction::NonOrthogonalBranch {
                                outcome: br.outcome,
                                pair: (labels[sa], labels[sb]),
                                overlap: ov,
                            },
                            modes_tried: tried,
                        });
                        continue 'modes;
                    }
                }
            }
        }
        // recurse
        let mut out_branches = BTreeMap::new();
        for br in &branches {
            let surv_idx: Vec<usize> = (0..labels.len())
                .filter(|&k| br.probability_per_state[k] > BRANCH_PRUNE_TOL)
                .collect();
            let surv_labels: Vec<usize> = surv_idx.iter().map(|&k| labels[k]).collect();
            let sub_states: Vec<FockState> = surv_idx
                .iter()
                .map(|&k| br.conditional_states[k].clone().unwrap())
                .collect();
            path.push(br.outcome);
            let sub = search_node(&sub_states, &surv_labels, depth - 1, restarts, rng, path)?;
            path.pop();
            match sub {
                Ok(protocol) => {
                    out_branches.insert(
                        br.outcome,
                        ProtocolBranch { survivors: surv_labels, next: protocol },
                    );
                }
                Err(report) => {
                    last_failure = Some(report);
                    continue 'modes;
                }
            }
        }
        return Ok(Ok(Protocol::Measure { mode: nu, branches: out_branches }));
    }
    Ok(Err(last_failure.expect("at least one candidate tried")))
}
