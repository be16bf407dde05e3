//! Exact spectra and level-behavior classification for a pair of close
//! quantum levels under a Hermitian perturbation.
//!
//! The crate solves the 2×2 secular equation of the pair in closed form,
//! evaluates the indicator energy ε that places the perturbation's effect
//! on the gap axis, and classifies the response as repulsion,
//! rapprochement, an unchanged gap, or superimposition. A cyclic Jacobi
//! eigensolver acts as an independent oracle, a k-sweep traces the
//! continuous restoration of degeneracy by a counter-perturbation, and a
//! seeded Monte Carlo census measures how common each case is.
//!
//! All operations are pure functions of their inputs; values are `Send`
//! and `Sync` and safe to use concurrently.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod oracle;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
pub use spectral::{
    classify_by_gap, classify_by_indicator, effective_hamiltonian, indicator_energy,
    perturbed_gap, solve_two_level, EffectiveHamiltonian, Epsilon, IndicatorResult, LevelCase,
    MixingCoefficients, PerturbationBlock, PerturbedPair, Tolerance, UnperturbedPair,
};
