//! Sparse multi-mode Fock-space states and ladder-operator actions.
//!
//! States are stored as sparse maps from occupation vectors (photon counts
//! per mode) to complex amplitudes. All operations are pure functions over
//! immutable values; amplitudes smaller than [`DROP_TOL`] are dropped after
//! every operation so that floating-point dust never accumulates in the
//! sparsity pattern.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Amplitude magnitudes below this are removed from the sparse map.
pub const DROP_TOL: f64 = 1e-14;

/// Tolerance for the "normalized" flag: |⟨ψ|ψ⟩ − 1| ≤ NORM_TOL.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FockError {
    #[error("occupation vector has length {found}, expected {expected}")]
    OccupationLength { expected: usize, found: usize },
    #[error("mode index {index} out of range for {modes} modes")]
    ModeIndex { index: usize, modes: usize },
    #[error("mode counts differ: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },
    #[error("state has no nonzero amplitude")]
    ZeroState,
    #[error("mode vector has length {found}, expected {expected}")]
    VectorLength { expected: usize, found: usize },
}

/// Photon counts per mode; the Fock-basis index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(pub Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    /// Total photon number of the pattern.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

impl From<&[u32]> for Occupation {
    fn from(counts: &[u32]) -> Self {
        Occupation(counts.to_vec())
    }
}

impl<const K: usize> From<[u32; K]> for Occupation {
    fn from(counts: [u32; K]) -> Self {
        Occupation(counts.to_vec())
    }
}

/// A pure multi-mode state with sparse complex amplitudes over occupation
/// vectors, carrying a total-photon cutoff.
///
/// The cutoff is tracked explicitly and grows under creation operators;
/// no operation in this module ever silently truncates.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    cutoff: u32,
    amplitudes: BTreeMap<Occupation, C64>,
}

impl FockState {
    /// Build a state from a term list. Duplicate occupation vectors are
    /// summed; the cutoff is set to the maximum total photon number among
    /// the terms. The result is not auto-normalized.
    pub fn from_terms(
        modes: usize,
        terms: impl IntoIterator<Item = (Occupation, C64)>,
    ) -> Result<Self, FockError> {
        let mut amplitudes: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.modes() != modes {
                return Err(FockError::OccupationLength {
                    expected: modes,
                    found: occ.modes(),
                });
            }
            *amplitudes.entry(occ).or_insert(C64::ZERO) += amp;
        }
        amplitudes.retain(|_, a| a.norm() > DROP_TOL);
        if amplitudes.is_empty() {
            return Err(FockError::ZeroState);
        }
        let cutoff = amplitudes.keys().map(Occupation::total).max().unwrap_or(0);
        Ok(FockState { modes, cutoff, amplitudes })
    }

    /// The zero state (empty amplitude map). Distinct from vacuum.
    pub fn zero(modes: usize) -> Self {
        FockState { modes, cutoff: 0, amplitudes: BTreeMap::new() }
    }

    /// The vacuum |0…0⟩.
    pub fn vacuum(modes: usize) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(Occupation(vec![0; modes]), C64::ONE);
        FockState { modes, cutoff: 0, amplitudes }
    }

    /// A single Fock basis state |n₁…n_N⟩ with unit amplitude.
    pub fn basis(occ: Occupation) -> Self {
        let modes = occ.modes();
        let cutoff = occ.total();
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(occ, C64::ONE);
        FockState { modes, cutoff, amplitudes }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.amplitudes.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude(&self, occ: &Occupation) -> C64 {
        self.amplitudes.get(occ).copied().unwrap_or(C64::ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// Rescale to unit norm. Returns the zero state untouched.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scaled(C64::new(1.0 / n, 0.0))
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut amplitudes: BTreeMap<Occupation, C64> = self
            .amplitudes
            .iter()
            .map(|(occ, a)| (occ.clone(), a * factor))
            .collect();
        amplitudes.retain(|_, a| a.norm() > DROP_TOL);
        FockState { modes: self.modes, cutoff: self.cutoff, amplitudes }
    }

    /// Sum of two states over the same modes; cutoff is the max of the two.
    pub fn add(&self, other: &Self) -> Result<Self, FockError> {
        self.check_modes(other)?;
        let mut amplitudes = self.amplitudes.clone();
        for (occ, a) in &other.amplitudes {
            *amplitudes.entry(occ.clone()).or_insert(C64::ZERO) += a;
        }
        amplitudes.retain(|_, a| a.norm() > DROP_TOL);
        Ok(FockState {
            modes: self.modes,
            cutoff: self.cutoff.max(other.cutoff),
            amplitudes,
        })
    }

    fn check_modes(&self, other: &Self) -> Result<(), FockError> {
        if self.modes != other.modes {
            Err(FockError::ModeMismatch { left: self.modes, right: other.modes })
        } else {
            Ok(())
        }
    }

    fn check_mode_index(&self, mode: usize) -> Result<(), FockError> {
        if mode >= self.modes {
            Err(FockError::ModeIndex { index: mode, modes: self.modes })
        } else {
            Ok(())
        }
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64, FockError> {
        self.check_modes(other)?;
        // iterate the smaller map
        let (small, large) = if self.amplitudes.len() <= other.amplitudes.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = C64::ZERO;
        for (occ, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(occ) {
                if std::ptr::eq(small, self) {
                    acc += a.conj() * b;
                } else {
                    acc += b.conj() * a;
                }
            }
        }
        Ok(acc)
    }

    /// â_j: each term |…n_j…⟩ maps to √n_j |…n_j−1…⟩. May return the zero
    /// state.
    pub fn annihilate(&self, mode: usize) -> Result<Self, FockError> {
        self.check_mode_index(mode)?;
        let mut amplitudes: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, a) in &self.amplitudes {
            let n = occ.0[mode];
            if n == 0 {
                continue;
            }
            let mut counts = occ.0.clone();
            counts[mode] = n - 1;
            let amp = a * (n as f64).sqrt();
            *amplitudes.entry(Occupation(counts)).or_insert(C64::ZERO) += amp;
        }
        amplitudes.retain(|_, a| a.norm() > DROP_TOL);
        Ok(FockState {
            modes: self.modes,
            cutoff: self.cutoff.saturating_sub(1),
            amplitudes,
        })
    }

    /// â_j†: |…n_j…⟩ → √(n_j+1) |…n_j+1…⟩. The cutoff grows by one.
    pub fn create(&self, mode: usize) -> Result<Self, FockError> {
        self.check_mode_index(mode)?;
        let mut amplitudes: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, a) in &self.amplitudes {
            let n = occ.0[mode];
            let mut counts = occ.0.clone();
            counts[mode] = n + 1;
            let amp = a * ((n + 1) as f64).sqrt();
            *amplitudes.entry(Occupation(counts)).or_insert(C64::ZERO) += amp;
        }
        amplitudes.retain(|_, a| a.norm() > DROP_TOL);
        Ok(FockState { modes: self.modes, cutoff: self.cutoff + 1, amplitudes })
    }

    /// ĉ = Σ_i ν_i â_i applied to the state.
    pub fn mode_annihilate(&self, nu: &[C64]) -> Result<Self, FockError> {
        if nu.len() != self.modes {
            return Err(FockError::VectorLength { expected: self.modes, found: nu.len() });
        }
        let mut out = FockState::zero(self.modes);
        out.cutoff = self.cutoff.saturating_sub(1);
        for (i, v) in nu.iter().enumerate() {
            if v.norm() <= DROP_TOL {
                continue;
            }
            let part = self.annihilate(i)?;
            out = out.add(&part.scaled(*v))?;
        }
        out.cutoff = self.cutoff.saturating_sub(1);
        Ok(out)
    }

    /// ĉ† = Σ_j μ_j â_j† applied to the state (μ passed as the coefficients
    /// of the creation operators).
    pub fn mode_create(&self, mu: &[C64]) -> Result<Self, FockError> {
        if mu.len() != self.modes {
            return Err(FockError::VectorLength { expected: self.modes, found: mu.len() });
        }
        let mut out = FockState::zero(self.modes);
        for (j, v) in mu.iter().enumerate() {
            if v.norm() <= DROP_TOL {
                continue;
            }
            let part = self.create(j)?;
            out = out.add(&part.scaled(*v))?;
        }
        out.cutoff = self.cutoff + 1;
        Ok(out)
    }

    /// Tensor product: mode counts add, occupation vectors concatenate,
    /// amplitudes multiply, cutoffs add.
    pub fn tensor(&self, other: &Self) -> Self {
        let modes = self.modes + other.modes;
        let mut amplitudes: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ_a, a) in &self.amplitudes {
            for (occ_b, b) in &other.amplitudes {
                let mut counts = occ_a.0.clone();
                counts.extend_from_slice(&occ_b.0);
                let amp = a * b;
                if amp.norm() > DROP_TOL {
                    amplitudes.insert(Occupation(counts), amp);
                }
            }
        }
        FockState { modes, cutoff: self.cutoff + other.cutoff, amplitudes }
    }
}
