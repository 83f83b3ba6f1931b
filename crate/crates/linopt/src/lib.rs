//! Decide whether orthogonal multi-mode photonic states can be exactly
//! discriminated with linear optics and photon counting, and quantify
//! approximate discrimination when they cannot.
//!
//! The library evaluates a hierarchy of algebraic conditions on mode
//! operators after a passive interferometer: if every matrix element
//! ⟨χ_k|ĉ†…ĉ|χ_l⟩ between distinct states vanishes up to the photon
//! cutoff, a fixed array of linear optics distinguishes the set; the
//! single-mode subset of conditions governs conditional (measure one mode,
//! then choose new optics) strategies. On top of the exact criteria it
//! provides dephased outcome distributions, minimum-error probabilities,
//! and a numerical optimizer over interferometers, plus the homodyne
//! (quadrature) variant of the conditions on truncated Fock spaces.

pub mod cli;
pub mod criteria;
pub mod estimation;
pub mod feasibility;
pub mod fock;
pub mod optics;
pub mod optimize;
pub mod quadrature;
pub mod states;
