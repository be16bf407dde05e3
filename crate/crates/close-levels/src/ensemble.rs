//! Seeded Monte Carlo census over random perturbation blocks.
//!
//! Each sample is a pure function of `(seed, index)`, so the census is
//! reproducible regardless of evaluation order or parallelism. The
//! generator is a splitmix64 stream (sample `i` owns positions
//! `4i..4i+4`) feeding Box–Muller; it is part of the output contract and
//! must stay stable across releases.
//!
//! Diagonal elements are drawn from `Normal(0, σ²)`; the real and
//! imaginary parts of the off-diagonal from `Normal(0, σ²/2)`, the usual
//! Hermitian random-matrix convention. This keeps the ensemble symmetric
//! in v11 ↔ v22.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    classify_by_gap, classify_by_indicator, LevelCase, PerturbationBlock, Tolerance,
    UnperturbedPair,
};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Maps a raw draw into the open interval (0, 1).
fn unit_open(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Box–Muller pair from two uniforms in (0, 1).
fn gaussian_pair(u1: f64, u2: f64) -> (f64, f64) {
    let radius = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (radius * c, radius * s)
}

/// Census parameters: the pair, the Gaussian scale, the sample budget,
/// the seed, and the comparison tolerance used by the classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pair: UnperturbedPair,
    sigma: f64,
    samples: u64,
    seed: u64,
    tol: Tolerance,
}

impl EnsembleSpec {
    pub fn new(
        pair: UnperturbedPair,
        sigma: f64,
        samples: u64,
        seed: u64,
        tol: Tolerance,
    ) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidInput(format!("sigma must be > 0, got {sigma}")));
        }
        if samples < 1 {
            return Err(Error::InvalidInput("samples must be ≥ 1".into()));
        }
        Ok(Self {
            pair,
            sigma,
            samples,
            seed,
            tol,
        })
    }

    pub fn pair(&self) -> &UnperturbedPair {
        &self.pair
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn tol(&self) -> &Tolerance {
        &self.tol
    }
}

/// The random block for sample `index`. Pure in `(seed, index)`.
pub fn sample_perturbation(spec: &EnsembleSpec, index: u64) -> PerturbationBlock {
    let mut state = spec
        .seed
        .wrapping_add(GOLDEN.wrapping_mul(index.wrapping_mul(4)));
    let u1 = unit_open(splitmix64(&mut state));
    let u2 = unit_open(splitmix64(&mut state));
    let u3 = unit_open(splitmix64(&mut state));
    let u4 = unit_open(splitmix64(&mut state));
    let (z0, z1) = gaussian_pair(u1, u2);
    let (z2, z3) = gaussian_pair(u3, u4);
    let off_sigma = spec.sigma / std::f64::consts::SQRT_2;
    PerturbationBlock::new(
        spec.sigma * z0,
        spec.sigma * z1,
        Complex64::new(off_sigma * z2, off_sigma * z3),
    )
    .expect("gaussian draws are finite")
}

/// Per-case sample counts of one census run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseFrequencies {
    pub repulsion: u64,
    pub rapprochement: u64,
    pub unchanged: u64,
    pub superimposition: u64,
    pub total: u64,
}

impl CaseFrequencies {
    pub fn count(&self, case: LevelCase) -> u64 {
        match case {
            LevelCase::Repulsion => self.repulsion,
            LevelCase::Rapprochement => self.rapprochement,
            LevelCase::Unchanged => self.unchanged,
            LevelCase::Superimposition => self.superimposition,
        }
    }

    pub fn frequency(&self, case: LevelCase) -> f64 {
        self.count(case) as f64 / self.total as f64
    }
}

/// Classifies every sample and tallies the four cases. Deterministic for a
/// fixed spec.
pub fn case_census(spec: &EnsembleSpec) -> CaseFrequencies {
    let mut counts = CaseFrequencies {
        repulsion: 0,
        rapprochement: 0,
        unchanged: 0,
        superimposition: 0,
        total: spec.samples,
    };
    for i in 0..spec.samples {
        let v = sample_perturbation(spec, i);
        match classify_by_indicator(&spec.pair, &v, &spec.tol).level_case {
            LevelCase::Repulsion => counts.repulsion += 1,
            LevelCase::Rapprochement => counts.rapprochement += 1,
            LevelCase::Unchanged => counts.unchanged += 1,
            LevelCase::Superimposition => counts.superimposition += 1,
        }
    }
    counts
}

/// Re-classifies every sample with the gap comparison and reports whether
/// the two classifiers ever disagree. Used by verification paths.
pub fn census_classifier_agreement(spec: &EnsembleSpec) -> bool {
    (0..spec.samples).all(|i| {
        let v = sample_perturbation(spec, i);
        classify_by_indicator(&spec.pair, &v, &spec.tol).level_case
            == classify_by_gap(&spec.pair, &v, &spec.tol)
    })
}
