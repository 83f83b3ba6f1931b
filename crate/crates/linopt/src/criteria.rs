//! The hierarchy of exact-distinguishability conditions.
//!
//! For an orthogonal set {χ_k} and output mode operators ĉ_j = Σ_i ν_i â_i,
//! exact discrimination by a fixed interferometer plus photon counting is
//! equivalent to the vanishing of all matrix elements
//! ⟨χ_k| ĉ_j†ĉ_j ĉ_j'†ĉ_j' … |χ_l⟩ (number-ordered form) between distinct
//! states. The equivalent normally ordered form
//! ⟨χ_k| ĉ_j†ĉ_j'†… ĉ_jĉ_j'… |χ_l⟩ breaks off once the product order
//! exceeds the total photon number, which makes the hierarchy finite for
//! bounded photon number. The subset of conditions referring to powers of a
//! single mode operator, ⟨χ_k|(ĉ†)ⁿĉⁿ|χ_l⟩ = 0 ∀n, is necessary for any
//! strategy that starts by measuring that mode.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::fock::{FockError, FockState};
use crate::optics::{ModeVector, PassiveUnitary};

/// Default tolerance for "exact" condition checks.
pub const CONDITION_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error("states {0} and {1} are not orthogonal (|⟨χ_{0}|χ_{1}⟩| = {2:.3e})")]
    NotOrthogonal(usize, usize, f64),
    #[error("empty state set")]
    EmptySet,
    #[error("empty mode tuple")]
    EmptyTuple,
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// Evaluation order for [`hierarchy_value`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HierarchyForm {
    /// Product of number operators ĉ_j†ĉ_j in tuple order.
    NumberOrdered,
    /// All creations left, all annihilations right.
    NormallyOrdered,
}

/// The sesquilinear form M_{i i'} = ⟨χ_k| â_i† â_{i'} |χ_l⟩ whose evaluation
/// ν†Mν is the first-order condition for mode vector ν.
#[derive(Debug, Clone)]
pub struct FirstOrderForm {
    pub matrix: DMatrix<C64>,
}

impl FirstOrderForm {
    /// ν†Mν.
    pub fn evaluate(&self, nu: &ModeVector) -> C64 {
        let n = self.matrix.nrows();
        let mut acc = C64::ZERO;
        for i in 0..n {
            for ip in 0..n {
                acc += nu.0[i].conj() * nu.0[ip] * self.matrix[(i, ip)];
            }
        }
        acc
    }
}

/// Compute M_{i i'} = ⟨χ_k| a_i† a_{i'} |χ_l⟩ from sparse ladder actions.
pub fn first_order_form(
    chi_k: &FockState,
    chi_l: &FockState,
) -> Result<FirstOrderForm, CriteriaError> {
    let n = chi_k.modes();
    let ann_k: Vec<FockState> =
        (0..n).map(|i| chi_k.annihilate(i)).collect::<Result<_, _>>()?;
    let ann_l: Vec<FockState> =
        (0..n).map(|i| chi_l.annihilate(i)).collect::<Result<_, _>>()?;
    let mut matrix = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for ip in 0..n {
            matrix[(i, ip)] = ann_k[i].inner(&ann_l[ip])?;
        }
    }
    Ok(FirstOrderForm { matrix })
}

/// ⟨χ_k| (ĉ†)ⁿ ĉⁿ |χ_l⟩ with ĉ = Σ_i ν_i â_i.
pub fn condcond_value(
    chi_k: &FockState,
    chi_l: &FockState,
    nu: &ModeVector,
    n: u32,
) -> Result<C64, CriteriaError> {
    let mut bra = chi_k.clone();
    let mut ket = chi_l.clone();
    for _ in 0..n {
        bra = bra.mode_annihilate(nu.as_slice())?;
        ket = ket.mode_annihilate(nu.as_slice())?;
        if bra.is_zero() || ket.is_zero() {
            return Ok(C64::ZERO);
        }
    }
    Ok(bra.inner(&ket)?)
}

/// Evaluate a hierarchy matrix element for a tuple of mode vectors, in
/// either operator ordering.
pub fn hierarchy_value(
    chi_k: &FockState,
    chi_l: &FockState,
    modes: &[ModeVector],
    form: HierarchyForm,
) -> Result<C64, CriteriaError> {
    if modes.is_empty() {
        return Err(CriteriaError::EmptyTuple);
    }
    match form {
        HierarchyForm::NormallyOrdered => {
            let mut bra = chi_k.clone();
            let mut ket = chi_l.clone();
            for nu in modes {
                bra = bra.mode_annihilate(nu.as_slice())?;
                ket = ket.mode_annihilate(nu.as_slice())?;
                if bra.is_zero() || ket.is_zero() {
                    return Ok(C64::ZERO);
                }
            }
            Ok(bra.inner(&ket)?)
        }
        HierarchyForm::NumberOrdered => {
            // apply ĉ†ĉ factors to the ket, rightmost (last tuple entry) first
            let mut ket = chi_l.clone();
            for nu in modes.iter().rev() {
                let down = ket.mode_annihilate(nu.as_slice())?;
                let conj: Vec<C64> = nu.0.iter().map(|v| v.conj()).collect();
                ket = down.mode_create(&conj)?;
                if ket.is_zero() {
                    return Ok(C64::ZERO);
                }
            }
            Ok(chi_k.inner(&ket)?)
        }
    }
}

/// Outcome of [`fixed_array_check`].
#[derive(Debug, Clone, PartialEq)]
pub enum FixedArrayVerdict {
    Pass,
    /// First violating (k, l, mode multiset as row indices, value).
    Fail {
        pair: (usize, usize),
        modes: Vec<usize>,
        value: C64,
    },
}

impl FixedArrayVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, FixedArrayVerdict::Pass)
    }
}

/// Check orthogonality of a state set to `tol`; error carries the first
/// violating pair.
pub fn check_orthogonal(states: &[FockState], tol: f64) -> Result<(), CriteriaError> {
    if states.is_empty() {
        return Err(CriteriaError::EmptySet);
    }
    for k in 0..states.len() {
        for l in (k + 1)..states.len() {
            let ov = states[k].inner(&states[l])?.norm();
            if ov > tol {
                return Err(CriteriaError::NotOrthogonal(k, l, ov));
            }
        }
    }
    Ok(())
}

/// Evaluate the normally ordered hierarchy with mode vectors set to the rows
/// of U, over all multisets of modes of size 1..=n_max, for all ordered pairs
/// k ≠ l. Passes iff every |value| ≤ tol.
///
/// Multisets suffice because number operators of distinct output modes
/// commute.
pub fn fixed_array_check(
    states: &[FockState],
    u: &PassiveUnitary,
    tol: f64,
) -> Result<FixedArrayVerdict, CriteriaError> {
    check_orthogonal(states, tol)?;
    let n_max = states.iter().map(FockState::cutoff).max().unwrap_or(0);
    let rows = u.rows();
    let dim = rows.len();
    for size in 1..=n_max {
        for multiset in multisets(dim, size as usize) {
            let tuple: Vec<ModeVector> =
                multiset.iter().map(|&j| rows[j].clone()).collect();
            for k in 0..states.len() {
                for l in 0..states.len() {
                    if k == l {
                        continue;
                    }
                    let value = hierarchy_value(
                        &states[k],
                        &states[l],
                        &tuple,
                        HierarchyForm::NormallyOrdered,
                    )?;
                    if value.norm() > tol {
                        return Ok(FixedArrayVerdict::Fail {
                            pair: (k, l),
                            modes: multiset,
                            value,
                        });
                    }
                }
            }
        }
    }
    Ok(FixedArrayVerdict::Pass)
}

/// All non-decreasing index sequences of the given size over 0..dim.
pub fn multisets(dim: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(dim: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for j in start..dim {
            cur.push(j);
            rec(dim, size, j, cur, out);
            cur.pop();
        }
    }
    rec(dim, size, 0, &mut cur, &mut out);
    out
}
