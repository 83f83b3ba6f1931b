//! Total dephasing to classical outcome distributions and minimum-error
//! state estimation.
//!
//! Photon counting after an interferometer U turns each input state into a
//! classical distribution over detection patterns, P(pattern|k) =
//! |⟨pattern|Uχ_k⟩|². The minimum-error probability for equiprobable inputs
//! is 1 − (1/K) Σ_i max_k P(i|k); minimizing it over U quantifies the best
//! approximate discrimination a fixed array can reach.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::fock::{FockState, Occupation};
use crate::optics::{OpticsError, PassiveUnitary};
use crate::optimize::nelder_mead;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("empty state set")]
    EmptySet,
    #[error("priors must sum to 1 and match the state count")]
    BadPriors,
    #[error("restarts must be at least 1")]
    NoRestarts,
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

/// Per-state classical distributions over detection patterns.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    pub per_state: Vec<BTreeMap<Occupation, f64>>,
}

impl OutcomeDistribution {
    /// All patterns occurring with nonzero probability in any state.
    pub fn support(&self) -> Vec<&Occupation> {
        let mut patterns: Vec<&Occupation> = Vec::new();
        for dist in &self.per_state {
            for p in dist.keys() {
                if !patterns.contains(&p) {
                    patterns.push(p);
                }
            }
        }
        patterns.sort();
        patterns
    }

    /// Total probability mass shared between the supports of states k and l.
    pub fn support_overlap(&self, k: usize, l: usize) -> f64 {
        self.per_state[k]
            .iter()
            .filter_map(|(p, pk)| self.per_state[l].get(p).map(|pl| pk.min(*pl)))
            .sum()
    }
}

/// P(pattern|k) = |amplitude of pattern in U χ_k|².
pub fn dephase(
    states: &[FockState],
    u: &PassiveUnitary,
) -> Result<OutcomeDistribution, EstimationError> {
    let mut per_state = Vec::with_capacity(states.len());
    for st in states {
        let transformed = u.apply(st)?;
        let mut dist: BTreeMap<Occupation, f64> = BTreeMap::new();
        for (occ, amp) in transformed.terms() {
            let p = amp.norm_sqr();
            if p > 0.0 {
                *dist.entry(occ.clone()).or_insert(0.0) += p;
            }
        }
        per_state.push(dist);
    }
    Ok(OutcomeDistribution { per_state })
}

/// 1 − Σ_i max_k π_k P(i|k) with uniform priors π_k = 1/K.
pub fn min_error_probability(dist: &OutcomeDistribution) -> Result<f64, EstimationError> {
    let k = dist.per_state.len();
    if k == 0 {
        return Err(EstimationError::EmptySet);
    }
    let priors = vec![1.0 / k as f64; k];
    min_error_probability_with_priors(dist, &priors)
}

/// 1 − Σ_i max_k π_k P(i|k) for arbitrary priors.
pub fn min_error_probability_with_priors(
    dist: &OutcomeDistribution,
    priors: &[f64],
) -> Result<f64, EstimationError> {
    if dist.per_state.is_empty() {
        return Err(EstimationError::EmptySet);
    }
    if priors.len() != dist.per_state.len() || (priors.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(EstimationError::BadPriors);
    }
    let mut success = 0.0;
    for pattern in dist.support() {
        let best = dist
            .per_state
            .iter()
            .zip(priors)
            .map(|(d, pi)| pi * d.get(pattern).copied().unwrap_or(0.0))
            .fold(0.0, f64::max);
        success += best;
    }
    Ok((1.0 - success).max(0.0))
}

/// Hermitian matrix from its N² real parameters: N diagonal entries followed
/// by (re, im) pairs for each i < j.
pub fn hermitian_from_params(dim: usize, p: &DVector<f64>) -> DMatrix<C64> {
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = C64::new(p[i], 0.0);
    }
    let mut idx = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let z = C64::new(p[idx], p[idx + 1]);
            idx += 2;
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

fn beam_splitter_generator(dim: usize, pairs: &[(usize, usize)], theta: f64) -> DVector<f64> {
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for &(i, j) in pairs {
        h[(i, j)] = C64::new(0.0, theta);
        h[(j, i)] = C64::new(0.0, -theta);
    }
    // back to the parameter vector
    let mut p = DVector::zeros(dim * dim);
    let mut idx = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            p[idx] = h[(i, j)].re;
            p[idx + 1] = h[(i, j)].im;
            idx += 2;
        }
    }
    p
}

/// Deterministic starts: identity, every single-pair 50:50 beam splitter,
/// every disjoint two-pair 50:50 combination, then random Hermitians.
fn hermitian_starts(dim: usize, restarts: usize, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
    let theta = std::f64::consts::FRAC_PI_4;
    let mut starts = vec![DVector::zeros(dim * dim)];
    for i in 0..dim {
        for j in (i + 1)..dim {
            starts.push(beam_splitter_generator(dim, &[(i, j)], theta));
        }
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            for k in 0..dim {
                for l in (k + 1)..dim {
                    if k > i && k != j && l != j {
                        starts.push(beam_splitter_generator(dim, &[(i, j), (k, l)], theta));
                    }
                }
            }
        }
    }
    while starts.len() < restarts {
        starts.push(DVector::from_fn(dim * dim, |_, _| rng.gen_range(-1.5..1.5)));
    }
    starts
}

/// Multistart minimization of min_error_probability(dephase(states,
/// exp(−iH))) over Hermitian H. The objective is piecewise-smooth (max over
/// k), so the inner minimizer is derivative-free; the achieved value, not
/// stationarity, is the acceptance quantity. Deterministic given the seed.
pub fn optimize_min_error(
    states: &[FockState],
    restarts: usize,
    seed: u64,
) -> Result<(PassiveUnitary, f64), EstimationError> {
    if restarts == 0 {
        return Err(EstimationError::NoRestarts);
    }
    if states.is_empty() {
        return Err(EstimationError::EmptySet);
    }
    let dim = states[0].modes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts = hermitian_starts(dim, restarts, &mut rng);
    let objective = |p: &DVector<f64>| -> f64 {
        let h = hermitian_from_params(dim, p);
        let u = PassiveUnitary::from_hermitian(&h).expect("parametrized Hermitian");
        let dist = dephase(states, &u).expect("dimensions match");
        min_error_probability(&dist).expect("nonempty")
    };
    let mut best: Option<(DVector<f64>, f64)> = None;
    for start in &starts {
        let res = nelder_mead(start, objective, 0.35, 1e-12, 1500);
        if best.as_ref().map_or(true, |(_, v)| res.value < *v) {
            best = Some((res.x, res.value));
        }
    }
    let (p, value) = best.expect("at least one start");
    let u = PassiveUnitary::from_hermitian(&hermitian_from_params(dim, &p))?;
    Ok((u, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::bell_analyzer;
    use crate::states::bell_states;

    #[test]
    fn dephase_bell_through_analyzer() {
        let bell = bell_states();
        let u = bell_analyzer();
        let dist = dephase(&bell, &u).unwrap();
        // Ψ+ → {1100, 0011} at 1/2 each
        let psi_p = &dist.per_state[0];
        assert_eq!(psi_p.len(), 2);
        assert!((psi_p[&Occupation::from([1, 1, 0, 0])] - 0.5).abs() < 1e-10);
        assert!((psi_p[&Occupation::from([0, 0, 1, 1])] - 0.5).abs() < 1e-10);
        // Ψ− → {1001, 0110}
        let psi_m = &dist.per_state[1];
        assert!((psi_m[&Occupation::from([1, 0, 0, 1])] - 0.5).abs() < 1e-10);
        assert!((psi_m[&Occupation::from([0, 1, 1, 0])] - 0.5).abs() < 1e-10);
        // Φ± → uniform over the four double patterns
        for state in [&dist.per_state[2], &dist.per_state[3]] {
            for occ in [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]] {
                assert!((state[&Occupation::from(occ)] - 0.25).abs() < 1e-10);
            }
        }
        assert!((min_error_probability(&dist).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn dephase_identity_is_squared_amplitudes() {
        let bell = bell_states();
        let dist = dephase(&bell, &PassiveUnitary::identity(4)).unwrap();
        for (st, d) in bell.iter().zip(&dist.per_state) {
            for (occ, amp) in st.terms() {
                assert!((d[occ] - amp.norm_sqr()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn min_error_disjoint_and_identical() {
        // disjoint supports → 0
        let mut a = BTreeMap::new();
        a.insert(Occupation::from([1, 0]), 1.0);
        let mut b = BTreeMap::new();
        b.insert(Occupation::from([0, 1]), 1.0);
        let dist = OutcomeDistribution { per_state: vec![a.clone(), b] };
        assert!(min_error_probability(&dist).unwrap().abs() < 1e-12);
        // K identical distributions → 1 − 1/K
        let dist = OutcomeDistribution { per_state: vec![a.clone(), a.clone(), a] };
        assert!((min_error_probability(&dist).unwrap() - (1.0 - 1.0 / 3.0)).abs() < 1e-12);
        // empty set is an error
        let dist = OutcomeDistribution { per_state: vec![] };
        assert!(matches!(
            min_error_probability(&dist),
            Err(EstimationError::EmptySet)
        ));
    }

    #[test]
    fn min_error_single_state_is_zero() {
        let bell = bell_states();
        let dist = dephase(&bell[..1], &PassiveUnitary::identity(4)).unwrap();
        assert!(min_error_probability(&dist).unwrap().abs() < 1e-12);
    }

    #[test]
    fn min_error_invariant_under_mode_relabeling() {
        use nalgebra::DMatrix;
        let bell = bell_states();
        let u = bell_analyzer();
        let perm = {
            let mut m = DMatrix::<C64>::zeros(4, 4);
            for (i, j) in [(0, 2), (1, 0), (2, 3), (3, 1)] {
                m[(i, j)] = C64::ONE;
            }
            PassiveUnitary::new(m).unwrap()
        };
        let permuted = perm.compose(&u).unwrap();
        let a = min_error_probability(&dephase(&bell, &u).unwrap()).unwrap();
        let b = min_error_probability(&dephase(&bell, &permuted).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn optimize_two_maximally_entangled() {
        // Ψ± alone are perfectly distinguishable; the optimizer must reach ~0
        let bell = bell_states();
        let (_, value) = optimize_min_error(&bell[..2], 20, 0).unwrap();
        assert!(value <= 1e-6, "best value {value}");
    }
}
