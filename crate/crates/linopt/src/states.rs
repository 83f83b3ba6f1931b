//! Constructors for the example state families analyzed throughout the
//! crate: dual-rail Bell states, the nine two-qutrit product states, the
//! |20⟩/|11⟩ pair family, and the four-state two-qubit family.

use num_complex::Complex64 as C64;

use crate::fock::{FockState, Occupation};

fn s2() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

fn two_photon(modes: usize, i: usize, j: usize, amp: C64) -> (Occupation, C64) {
    let mut occ = vec![0u32; modes];
    occ[i] += 1;
    occ[j] += 1;
    (Occupation(occ), amp)
}

/// The four dual-rail Bell states over four modes, in the order
/// Ψ+, Ψ−, Φ+, Φ−: Ψ± = (a₁†a₄† ± a₂†a₃†)|0⟩/√2, Φ± = (a₁†a₃† ± a₂†a₄†)|0⟩/√2.
pub fn bell_states() -> Vec<FockState> {
    let mk = |p: (usize, usize), q: (usize, usize), sign: f64| {
        FockState::from_terms(
            4,
            [
                two_photon(4, p.0, p.1, C64::new(s2(), 0.0)),
                two_photon(4, q.0, q.1, C64::new(sign * s2(), 0.0)),
            ],
        )
        .unwrap()
    };
    vec![
        mk((0, 3), (1, 2), 1.0),
        mk((0, 3), (1, 2), -1.0),
        mk((0, 2), (1, 3), 1.0),
        mk((0, 2), (1, 3), -1.0),
    ]
}

/// The nine two-qutrit product states encoded as two photons over six modes:
/// s₁,₂ = a₁†(a₄†±a₅†)|0⟩/√2, s₃,₄ = a₃†(a₅†±a₆†)|0⟩/√2,
/// s₅,₆ = a₄†(a₂†±a₃†)|0⟩/√2, s₇,₈ = a₆†(a₁†±a₂†)|0⟩/√2, s₉ = a₂†a₅†|0⟩.
/// `drop` removes one state by its 1-based label.
pub fn qutrit_states(drop: Option<usize>) -> Vec<FockState> {
    let pair = |i: usize, j: usize, k: usize, sign: f64| {
        FockState::from_terms(
            6,
            [
                two_photon(6, i, j, C64::new(s2(), 0.0)),
                two_photon(6, i, k, C64::new(sign * s2(), 0.0)),
            ],
        )
        .unwrap()
    };
    let mut states = vec![
        pair(0, 3, 4, 1.0),
        pair(0, 3, 4, -1.0),
        pair(2, 4, 5, 1.0),
        pair(2, 4, 5, -1.0),
        pair(3, 1, 2, 1.0),
        pair(3, 1, 2, -1.0),
        pair(5, 0, 1, 1.0),
        pair(5, 0, 1, -1.0),
        FockState::from_terms(6, [two_photon(6, 1, 4, C64::ONE)]).unwrap(),
    ];
    if let Some(d) = drop {
        states.remove(d - 1);
    }
    states
}

/// The orthogonal pair (α|20⟩ + β|11⟩, β̄|20⟩ − ᾱ|11⟩).
/// Callers should pass |α|² + |β|² = 1 for normalized states.
pub fn pair_family(alpha: C64, beta: C64) -> Vec<FockState> {
    let mk = |a: C64, b: C64| {
        FockState::from_terms(
            2,
            [
                (Occupation::from([2, 0]), a),
                (Occupation::from([1, 1]), b),
            ],
        )
        .unwrap()
    };
    vec![mk(alpha, beta), mk(beta.conj(), -alpha.conj())]
}

/// The symmetric pair (|20⟩ ± |11⟩)/√2.
pub fn pair_symmetric() -> Vec<FockState> {
    let a = C64::new(s2(), 0.0);
    pair_family(a, a)
}

/// The orthogonal set of four two-qubit states over four modes:
/// s₁ = (α a₁†a₄† + β a₂†a₃†)|0⟩, s₂ = (β̄ a₁†a₄† − ᾱ a₂†a₃†)|0⟩,
/// s₃ = (γ a₁†a₃† + δ a₂†a₄†)|0⟩, s₄ = (δ̄ a₁†a₃† − γ̄ a₂†a₄†)|0⟩.
/// Callers should pass |α|²+|β|² = |γ|²+|δ|² = 1.
pub fn four_state_family(alpha: C64, beta: C64, gamma: C64, delta: C64) -> Vec<FockState> {
    let mk = |p: C64, q: C64, first: (usize, usize), second: (usize, usize)| {
        FockState::from_terms(
            4,
            [two_photon(4, first.0, first.1, p), two_photon(4, second.0, second.1, q)],
        )
        .unwrap()
    };
    vec![
        mk(alpha, beta, (0, 3), (1, 2)),
        mk(beta.conj(), -alpha.conj(), (0, 3), (1, 2)),
        mk(gamma, delta, (0, 2), (1, 3)),
        mk(delta.conj(), -gamma.conj(), (0, 2), (1, 3)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::check_orthogonal;

    #[test]
    fn families_are_orthonormal() {
        let bell = bell_states();
        check_orthogonal(&bell, 1e-12).unwrap();
        for st in &bell {
            assert!(st.is_normalized());
        }
        let qutrit = qutrit_states(None);
        assert_eq!(qutrit.len(), 9);
        check_orthogonal(&qutrit, 1e-12).unwrap();
        let pair = pair_family(C64::new(0.6, 0.0), C64::new(0.0, 0.8));
        check_orthogonal(&pair, 1e-12).unwrap();
        let four = four_state_family(
            C64::new(0.6, 0.0),
            C64::new(0.8, 0.0),
            C64::new(0.0, 0.28),
            C64::new(0.96, 0.0),
        );
        check_orthogonal(&four, 1e-12).unwrap();
        for st in &four {
            assert!(st.is_normalized());
        }
    }
}
