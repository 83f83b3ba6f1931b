//! Passive linear-optics unitaries and their action on Fock states.
//!
//! A passive circuit is an N×N unitary U acting on the mode operators,
//! c⃗ = U a⃗. On states, the action substitutes creation operators:
//! a state written as P(a₁†,…,a_N†)|0⟩ maps to P(b₁†,…,b_N†)|0⟩ with
//! b_i† = Σ_j U_{ji} a_j†. This fixes the convention testably: total photon
//! number is preserved, and a single photon in mode i maps to amplitudes
//! U_{ji} over modes j.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::fock::{FockError, FockState};

/// Elementwise tolerance for the unitarity invariant U†U = I.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum OpticsError {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("beam splitter requires two distinct modes, got {0}")]
    DegenerateBeamSplitter(usize),
    #[error("mode index {index} out of range for dimension {dim}")]
    ModeIndex { index: usize, dim: usize },
    #[error("dimension mismatch: unitary is {dim}×{dim}, state has {modes} modes")]
    DimensionMismatch { dim: usize, modes: usize },
    #[error("mode vector has norm {0:.3e}, too close to zero")]
    ZeroVector(f64),
    #[error(transparent)]
    Fock(#[from] FockError),
}

/// A unit-norm complex N-vector ν defining an output mode operator
/// ĉ = Σ_i ν_i â_i.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector(pub Vec<C64>);

impl ModeVector {
    pub fn new(entries: Vec<C64>) -> Self {
        ModeVector(entries)
    }

    /// Standard basis vector e_i.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![C64::ZERO; dim];
        v[i] = C64::ONE;
        ModeVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        ModeVector(self.0.iter().map(|v| v / n).collect())
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn dot(&self, other: &Self) -> C64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// An N×N complex unitary describing an interferometer.
#[derive(Debug, Clone, PartialEq)]
pub struct PassiveUnitary {
    matrix: DMatrix<C64>,
}

impl PassiveUnitary {
    /// Wrap a matrix, checking unitarity to [`UNITARITY_TOL`].
    pub fn new(matrix: DMatrix<C64>) -> Result<Self, OpticsError> {
        let dev = unitarity_deviation(&matrix);
        if dev > UNITARITY_TOL {
            return Err(OpticsError::NotUnitary(dev));
        }
        Ok(PassiveUnitary { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        PassiveUnitary { matrix: DMatrix::identity(dim, dim) }
    }

    /// U = exp(−iH) for Hermitian H.
    pub fn from_hermitian(h: &DMatrix<C64>) -> Result<Self, OpticsError> {
        let dev = hermiticity_deviation(h);
        if dev > UNITARITY_TOL {
            return Err(OpticsError::NotHermitian(dev));
        }
        let m = h.map(|z| C64::new(0.0, -1.0) * z);
        let u = m.exp();
        PassiveUnitary::new(u)
    }

    /// Identity except the 2×2 block on modes (i, j):
    /// [[cosθ, e^{iφ}sinθ], [−e^{−iφ}sinθ, cosθ]].
    pub fn beam_splitter(
        dim: usize,
        i: usize,
        j: usize,
        theta: f64,
        phi: f64,
    ) -> Result<Self, OpticsError> {
        if i == j {
            return Err(OpticsError::DegenerateBeamSplitter(i));
        }
        for &k in &[i, j] {
            if k >= dim {
                return Err(OpticsError::ModeIndex { index: k, dim });
            }
        }
        let mut m = DMatrix::identity(dim, dim);
        let (s, c) = theta.sin_cos();
        let e = C64::from_polar(1.0, phi);
        m[(i, i)] = C64::new(c, 0.0);
        m[(i, j)] = e * s;
        m[(j, i)] = -e.conj() * s;
        m[(j, j)] = C64::new(c, 0.0);
        Ok(PassiveUnitary { matrix: m })
    }

    /// Complete ν/‖ν‖ to a unitary whose first row is ν, by Gram–Schmidt
    /// over the standard basis in index order (near-parallel vectors are
    /// skipped). Deterministic given ν.
    pub fn extend_from_row(nu: &ModeVector) -> Result<Self, OpticsError> {
        let n = nu.norm();
        if n <= 1e-10 {
            return Err(OpticsError::ZeroVector(n));
        }
        let dim = nu.dim();
        let mut rows: Vec<Vec<C64>> = vec![nu.0.iter().map(|v| v / n).collect()];
        for k in 0..dim {
            if rows.len() == dim {
                break;
            }
            let mut v = vec![C64::ZERO; dim];
            v[k] = C64::ONE;
            for r in &rows {
                let proj: C64 = r.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ri) in v.iter_mut().zip(r) {
                    *vi -= proj * ri;
                }
            }
            let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if vn > 1e-8 {
                for vi in v.iter_mut() {
                    *vi /= vn;
                }
                rows.push(v);
            }
        }
        let m = DMatrix::from_fn(dim, dim, |r, c| rows[r][c]);
        PassiveUnitary::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Row j of U as a mode vector: c_j = Σ_i U_{ji} a_i.
    pub fn row(&self, j: usize) -> ModeVector {
        ModeVector(self.matrix.row(j).iter().copied().collect())
    }

    pub fn rows(&self) -> Vec<ModeVector> {
        (0..self.dim()).map(|j| self.row(j)).collect()
    }

    /// Matrix product self · other.
    pub fn compose(&self, other: &Self) -> Result<Self, OpticsError> {
        PassiveUnitary::new(&self.matrix * &other.matrix)
    }

    pub fn adjoint(&self) -> Self {
        PassiveUnitary { matrix: self.matrix.adjoint() }
    }

    /// Transform a state: substitute a_i† → Σ_j U_{ji} a_j† term by term.
    pub fn apply(&self, state: &FockState) -> Result<FockState, OpticsError> {
        let dim = self.dim();
        if state.modes() != dim {
            return Err(OpticsError::DimensionMismatch { dim, modes: state.modes() });
        }
        let columns: Vec<Vec<C64>> = (0..dim)
            .map(|i| self.matrix.column(i).iter().copied().collect())
            .collect();
        let mut out = FockState::zero(dim);
        for (occ, amp) in state.terms() {
            let mut norm_factor = 1.0;
            for &n in &occ.0 {
                for k in 1..=n {
                    norm_factor *= (k as f64).sqrt();
                }
            }
            let mut term = FockState::vacuum(dim).scaled(amp / norm_factor);
            for (i, &n) in occ.0.iter().enumerate() {
                for _ in 0..n {
                    term = term.mode_create(&columns[i])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

pub fn unitarity_deviation(m: &DMatrix<C64>) -> f64 {
    let prod = m.adjoint() * m;
    let id = DMatrix::<C64>::identity(m.nrows(), m.ncols());
    (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The beam-splitter configuration that realizes the paper's partial Bell
/// measurement for dual-rail qubits on modes (1,2) and (3,4): 50:50 mixing
/// of mode 1 with 3 and mode 2 with 4. Found by search over disjoint mode
/// pairings; see `tests` for the verification against the dephased Bell
/// distributions.
pub fn bell_analyzer() -> PassiveUnitary {
    let bs02 = PassiveUnitary::beam_splitter(4, 0, 2, std::f64::consts::FRAC_PI_4, 0.0).unwrap();
    let bs13 = PassiveUnitary::beam_splitter(4, 1, 3, std::f64::consts::FRAC_PI_4, 0.0).unwrap();
    bs02.compose(&bs13).unwrap()
}
