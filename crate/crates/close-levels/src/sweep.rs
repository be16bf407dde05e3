//! Degeneracy-restoration sweep.
//!
//! Starting from a base system plus a degeneracy-lifting perturbation V̂,
//! the counter-perturbation −kV̂ is applied for k from 0 to 1. Each grid
//! point solves the pair with the residual perturbation (1−k)·V̂, which is
//! the same composite system without materializing the shifted Hamiltonian.
//! At k = 1 the perturbation is fully cancelled and the base spectrum
//! (degenerate, in the interesting configuration) is recovered exactly.

use crate::error::{Error, Result};
use crate::spectral::{
    classify_by_indicator, effective_hamiltonian, solve_two_level, LevelCase, PerturbationBlock,
    Tolerance, UnperturbedPair,
};

/// Base system, lifting perturbation, and the k grid to sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    base: UnperturbedPair,
    v: PerturbationBlock,
    k_grid: Vec<f64>,
}

impl SweepConfig {
    /// The grid must be strictly ascending within [0, 1] and include both
    /// endpoints.
    pub fn new(base: UnperturbedPair, v: PerturbationBlock, k_grid: Vec<f64>) -> Result<Self> {
        if k_grid.len() < 2 {
            return Err(Error::InvalidInput(
                "k grid needs at least the endpoints 0 and 1".into(),
            ));
        }
        for w in k_grid.windows(2) {
            if w[0].is_nan() || w[1].is_nan() || w[0] >= w[1] {
                return Err(Error::InvalidInput(format!(
                    "k grid must be strictly ascending, got {} before {}",
                    w[0], w[1]
                )));
            }
        }
        if k_grid[0] != 0.0 || *k_grid.last().unwrap() != 1.0 {
            return Err(Error::InvalidInput(
                "k grid must start at 0 and end at 1".into(),
            ));
        }
        Ok(Self { base, v, k_grid })
    }

    /// Uniform grid with `steps` points on [0, 1]; 101 is the default used
    /// by the CLI.
    pub fn uniform(base: UnperturbedPair, v: PerturbationBlock, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidInput(format!(
                "k grid needs at least 2 steps, got {steps}"
            )));
        }
        let denom = (steps - 1) as f64;
        let grid = (0..steps).map(|i| i as f64 / denom).collect();
        Self::new(base, v, grid)
    }

    pub fn base(&self) -> &UnperturbedPair {
        &self.base
    }

    pub fn v(&self) -> &PerturbationBlock {
        &self.v
    }

    pub fn k_grid(&self) -> &[f64] {
        &self.k_grid
    }
}

/// One evaluated grid point of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub k: f64,
    pub e1: f64,
    pub e2: f64,
    pub gap: f64,
    pub level_case: LevelCase,
}

/// Evaluates the pair under the residual perturbation (1−k)·V̂ at every
/// grid point, in grid order. Each point is independent of the others.
pub fn degeneracy_restoration_sweep(cfg: &SweepConfig) -> Result<Vec<SweepPoint>> {
    let tol = Tolerance::default();
    cfg.k_grid
        .iter()
        .map(|&k| {
            let residual = cfg.v.scaled(1.0 - k)?;
            let solved = solve_two_level(&effective_hamiltonian(&cfg.base, &residual)?)?;
            let level_case = classify_by_indicator(&cfg.base, &residual, &tol).level_case;
            Ok(SweepPoint {
                k,
                e1: solved.e1,
                e2: solved.e2,
                gap: solved.gap,
                level_case,
            })
        })
        .collect()
}

/// Projection of the sweep onto (k, gap), for plot export.
pub fn gap_profile(cfg: &SweepConfig) -> Result<Vec<(f64, f64)>> {
    Ok(degeneracy_restoration_sweep(cfg)?
        .into_iter()
        .map(|p| (p.k, p.gap))
        .collect())
}
