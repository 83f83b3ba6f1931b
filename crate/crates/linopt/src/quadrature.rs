//! Homodyne quadrature operators on truncated Fock spaces and the
//! beam-splitter quadrature identity.
//!
//! The quadrature x̂^{(θ)} = (â e^{−iθ} + â† e^{+iθ})/2 (half-quadrature
//! normalization) extends the photon-counting hierarchy to homodyne
//! detection: after an interferometer U the conditions read
//! ⟨χ_k| x̂^c_j x̂^c_{j'} … |χ_l⟩ = 0 with ĉ_j = Σ_i U_{ji} â_i. The module
//! also verifies, at the operator level, that a 50:50 beam splitter maps
//! mode quadratures onto the relative position (x̂₁−x̂₂)/√2 and total
//! momentum (p̂₁+p̂₂)/√2 — the basis of the continuous-variable Bell
//! measurement. Exact relative-position eigenstates are unnormalizable, so
//! only this operator-level statement is checked; sparse states are never
//! silently truncated, and the identity is compared on basis pairs with
//! total photon number ≤ cutoff − 1 (the truncation interior, since x̂
//! couples neighboring number sectors).

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::fock::{FockError, FockState, Occupation};
use crate::optics::{OpticsError, PassiveUnitary};

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("mode index {index} out of range for {modes} modes")]
    ModeIndex { index: usize, modes: usize },
    #[error("unitary dimension {dim} does not match state with {modes} modes")]
    DimensionMismatch { dim: usize, modes: usize },
    #[error("quadrature product needs at least one factor")]
    EmptySpecs,
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

/// One quadrature factor: which mode and at which local-oscillator angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    mode: usize,
    angle: f64,
}

impl QuadratureSpec {
    /// The angle is reduced modulo 2π.
    pub fn new(mode: usize, angle: f64) -> Self {
        Self { mode, angle: angle.rem_euclid(TAU) }
    }

    pub fn mode(&self) -> usize {
        self.mode
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// x̂^{(θ)} = (â_j e^{−iθ} + â_j† e^{+iθ})/2 applied to the state; the
/// cutoff grows by one through the creation branch.
pub fn apply_quadrature(
    state: &FockState,
    spec: QuadratureSpec,
) -> Result<FockState, QuadratureError> {
    if spec.mode >= state.modes() {
        return Err(QuadratureError::ModeIndex { index: spec.mode, modes: state.modes() });
    }
    let phase = C64::from_polar(1.0, spec.angle);
    let down = state.annihilate(spec.mode)?.scaled(0.5 * phase.conj());
    let up = state.create(spec.mode)?.scaled(0.5 * phase);
    Ok(down.add(&up)?)
}

/// x̂^{c,(θ)}_j = (ĉ_j e^{−iθ} + ĉ_j† e^{+iθ})/2 with ĉ_j = Σ_i U_{ji} â_i.
fn apply_mode_quadrature(
    state: &FockState,
    u: &PassiveUnitary,
    spec: QuadratureSpec,
) -> Result<FockState, QuadratureError> {
    if spec.mode >= u.dim() {
        return Err(QuadratureError::ModeIndex { index: spec.mode, modes: u.dim() });
    }
    let row = u.row(spec.mode);
    let conj_row: Vec<C64> = row.as_slice().iter().map(|z| z.conj()).collect();
    let phase = C64::from_polar(1.0, spec.angle);
    let down = state.mode_annihilate(row.as_slice())?.scaled(0.5 * phase.conj());
    let up = state.mode_create(&conj_row)?.scaled(0.5 * phase);
    Ok(down.add(&up)?)
}

/// ⟨χ_k| x̂^c_{j₁} x̂^c_{j₂} … |χ_l⟩ in list order (the rightmost factor
/// acts on |χ_l⟩ first). Quadratures of different modes commute; same-mode
/// factors at different angles do not, and the list order is authoritative.
pub fn quadrature_condition(
    chi_k: &FockState,
    chi_l: &FockState,
    u: &PassiveUnitary,
    specs: &[QuadratureSpec],
) -> Result<C64, QuadratureError> {
    if specs.is_empty() {
        return Err(QuadratureError::EmptySpecs);
    }
    if u.dim() != chi_l.modes() {
        return Err(QuadratureError::DimensionMismatch { dim: u.dim(), modes: chi_l.modes() });
    }
    let mut ket = chi_l.clone();
    for spec in specs.iter().rev() {
        ket = apply_mode_quadrature(&ket, u, *spec)?;
    }
    Ok(chi_k.inner(&ket)?)
}

/// Two-mode occupations with total photon number ≤ max_total.
fn interior_basis(max_total: u32) -> Vec<Occupation> {
    let mut occs = Vec::new();
    for n1 in 0..=max_total {
        for n2 in 0..=(max_total - n1) {
            occs.push(Occupation::from([n1, n2]));
        }
    }
    occs
}

/// Max deviation of x̂₁^c vs (x̂₁−x̂₂)/√2 and x̂₂^c vs (p̂₁+p̂₂)/√2 for the
/// beam splitter at (θ, φ), over basis kets with total photons ≤ cutoff−1.
pub fn bs_identity_deviation(cutoff: u32, theta: f64, phi: f64) -> f64 {
    let u = PassiveUnitary::beam_splitter(2, 0, 1, theta, phi).expect("valid 2-mode bs");
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let x = |m| QuadratureSpec::new(m, 0.0);
    let p = |m| QuadratureSpec::new(m, PI / 2.0);
    let mut max_dev: f64 = 0.0;
    for occ in interior_basis(cutoff.saturating_sub(1)) {
        let ket = FockState::basis(occ);
        // x̂₁^c vs (x̂₁ − x̂₂)/√2
        let lhs = apply_mode_quadrature(&ket, &u, x(0)).unwrap();
        let rhs = apply_quadrature(&ket, x(0))
            .unwrap()
            .add(&apply_quadrature(&ket, x(1)).unwrap().scaled(C64::from(-1.0)))
            .unwrap()
            .scaled(C64::from(s2));
        max_dev = max_dev.max(lhs.add(&rhs.scaled(C64::from(-1.0))).unwrap().norm());
        // x̂₂^c at angle π/2 vs (p̂₁ + p̂₂)/√2
        let lhs = apply_mode_quadrature(&ket, &u, p(1)).unwrap();
        let rhs = apply_quadrature(&ket, p(0))
            .unwrap()
            .add(&apply_quadrature(&ket, p(1)).unwrap())
            .unwrap()
            .scaled(C64::from(s2));
        max_dev = max_dev.max(lhs.add(&rhs.scaled(C64::from(-1.0))).unwrap().norm());
    }
    max_dev
}

/// Which sign/phase variant of the 50:50 beam splitter realizes the
/// quadrature identity, and how well.
#[derive(Debug, Clone, Copy)]
pub struct BsIdentityReport {
    pub theta: f64,
    pub phi: f64,
    pub deviation: f64,
}

/// Searches the four sign/phase variants of the 50:50 block (θ = ±π/4,
/// φ ∈ {0, π}) and returns the best one with its max deviation over the
/// truncation interior (total photons ≤ cutoff−1).
pub fn bs_quadrature_identity_check(cutoff: u32) -> BsIdentityReport {
    assert!(cutoff >= 2, "cutoff must be at least 2");
    let mut best: Option<BsIdentityReport> = None;
    for theta in [FRAC_PI_4, -FRAC_PI_4] {
        for phi in [0.0, PI] {
            let deviation = bs_identity_deviation(cutoff, theta, phi);
            if best.map_or(true, |b| deviation < b.deviation) {
                best = Some(BsIdentityReport { theta, phi, deviation });
            }
        }
    }
    best.expect("four candidates")
}
