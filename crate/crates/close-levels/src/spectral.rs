//! Exact treatment of a pair of close levels under a Hermitian perturbation.
//!
//! The 2×2 effective Hamiltonian of the pair,
//!
//! ```text
//! H = | E⁰₁ + V₁₁   V₁₂        |
//!     | V₁₂*        E⁰₂ + V₂₂ |
//! ```
//!
//! is diagonalized in closed form:
//!
//! ```text
//! E_{1,2} = (H₁₁ + H₂₂)/2 ∓ ½·√((H₂₂ − H₁₁)² + 4|H₁₂|²)
//! ```
//!
//! The perturbed gap ΔE = E₂ − E₁ and the indicator energy
//!
//! ```text
//! ε = ((V₁₁ − V₂₂)² + 4|V₁₂|²) / (2(V₁₁ − V₂₂))
//! ```
//!
//! classify the pair's response into repulsion, rapprochement, an unchanged
//! gap, or superimposition, depending on where ε falls relative to the
//! unperturbed gap ΔE⁰.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The two unperturbed energies of the close pair, `e0_lower ≤ e0_upper`.
///
/// Equality is permitted: a degenerate pair is the starting point of the
/// degeneracy-restoration sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnperturbedPair {
    e0_lower: f64,
    e0_upper: f64,
}

impl UnperturbedPair {
    pub fn new(e0_lower: f64, e0_upper: f64) -> Result<Self> {
        if !e0_lower.is_finite() {
            return Err(Error::NonFinite { field: "e0_lower" });
        }
        if !e0_upper.is_finite() {
            return Err(Error::NonFinite { field: "e0_upper" });
        }
        if e0_upper < e0_lower {
            return Err(Error::InvalidInput(format!(
                "e0_upper ({e0_upper}) must not be below e0_lower ({e0_lower})"
            )));
        }
        Ok(Self { e0_lower, e0_upper })
    }

    pub fn e0_lower(&self) -> f64 {
        self.e0_lower
    }

    pub fn e0_upper(&self) -> f64 {
        self.e0_upper
    }

    /// Unperturbed gap ΔE⁰ = E⁰₂ − E⁰₁ ≥ 0.
    pub fn gap(&self) -> f64 {
        self.e0_upper - self.e0_lower
    }

    /// Midpoint of the pair, used to place spectator levels.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.e0_lower + self.e0_upper)
    }
}

/// The Hermitian 2×2 perturbation block: real diagonal `v11`, `v22` and
/// complex off-diagonal `v12`. `v21` is implied as `conj(v12)` and never
/// stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationBlock {
    v11: f64,
    v22: f64,
    v12: Complex64,
}

impl PerturbationBlock {
    pub fn new(v11: f64, v22: f64, v12: Complex64) -> Result<Self> {
        if !v11.is_finite() {
            return Err(Error::NonFinite { field: "v11" });
        }
        if !v22.is_finite() {
            return Err(Error::NonFinite { field: "v22" });
        }
        if !v12.re.is_finite() || !v12.im.is_finite() {
            return Err(Error::NonFinite { field: "v12" });
        }
        Ok(Self { v11, v22, v12 })
    }

    /// Block with every element zero.
    pub fn zero() -> Self {
        Self {
            v11: 0.0,
            v22: 0.0,
            v12: Complex64::new(0.0, 0.0),
        }
    }

    pub fn v11(&self) -> f64 {
        self.v11
    }

    pub fn v22(&self) -> f64 {
        self.v22
    }

    pub fn v12(&self) -> Complex64 {
        self.v12
    }

    /// Magnitude scale of the block, `max(|v11|, |v22|, |v12|)`.
    pub fn scale(&self) -> f64 {
        self.v11.abs().max(self.v22.abs()).max(self.v12.norm())
    }

    /// The block multiplied elementwise by a real factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.v11 * factor, self.v22 * factor, self.v12 * factor)
    }
}

/// The 2×2 effective Hamiltonian of the pair: `h11 = e0_lower + v11`,
/// `h22 = e0_upper + v22`, `h12 = v12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveHamiltonian {
    h11: f64,
    h22: f64,
    h12: Complex64,
}

impl EffectiveHamiltonian {
    pub fn new(h11: f64, h22: f64, h12: Complex64) -> Result<Self> {
        if !h11.is_finite() {
            return Err(Error::NonFinite { field: "h11" });
        }
        if !h22.is_finite() {
            return Err(Error::NonFinite { field: "h22" });
        }
        if !h12.re.is_finite() || !h12.im.is_finite() {
            return Err(Error::NonFinite { field: "h12" });
        }
        Ok(Self { h11, h22, h12 })
    }

    pub fn h11(&self) -> f64 {
        self.h11
    }

    pub fn h22(&self) -> f64 {
        self.h22
    }

    pub fn h12(&self) -> Complex64 {
        self.h12
    }
}

/// Amplitudes of the zero-order perturbed states in the `|1⟩, |2⟩` basis:
/// `|ψ₁⟩ = a|1⟩ + b|2⟩`, `|ψ₂⟩ = c|1⟩ + d|2⟩`.
///
/// Phase convention: `a` is real and ≥ 0 (if `a = 0`, `b` is real > 0);
/// the same rule applies to `c` in the second row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MixingCoefficients {
    /// The identity mixing (no rotation of the basis), used for a scalar
    /// effective Hamiltonian where any basis is an eigenbasis.
    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }
}

/// Exact perturbed energies `e1 ≤ e2`, their gap, and the mixing amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbedPair {
    pub e1: f64,
    pub e2: f64,
    pub gap: f64,
    pub mixing: MixingCoefficients,
}

/// The indicator energy ε. The closed form divides by `v11 − v22`; the two
/// singular limits are carried as explicit variants instead of a fault.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Finite(f64),
    /// `v11 = v22` with `v12 ≠ 0`: ε diverges, the gap always grows.
    Unbounded,
    /// `v11 = v22` and `v12 = 0`: the 0/0 point; the gap is unchanged.
    NullCase,
}

/// Four-way classification of the pair's response to the perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelCase {
    /// ΔE > ΔE⁰.
    Repulsion,
    /// ΔE < ΔE⁰.
    Rapprochement,
    /// ΔE = ΔE⁰.
    Unchanged,
    /// ΔE = 0 with ΔE⁰ > 0.
    Superimposition,
}

impl LevelCase {
    pub const ALL: [LevelCase; 4] = [
        LevelCase::Repulsion,
        LevelCase::Rapprochement,
        LevelCase::Unchanged,
        LevelCase::Superimposition,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            LevelCase::Repulsion => "repulsion",
            LevelCase::Rapprochement => "rapprochement",
            LevelCase::Unchanged => "unchanged",
            LevelCase::Superimposition => "superimposition",
        }
    }
}

impl std::fmt::Display for LevelCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Indicator energy plus the case it selects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorResult {
    pub epsilon: Epsilon,
    pub level_case: LevelCase,
}

/// Comparison policy for the paper's exact equalities: two values are equal
/// when they differ by no more than `max(abs, rel·scale)` where `scale` is
/// the magnitude scale of the inputs at hand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-9, abs: 0.0 }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !rel.is_finite() || rel <= 0.0 {
            return Err(Error::InvalidInput(format!("tol rel must be > 0, got {rel}")));
        }
        if !abs.is_finite() || abs < 0.0 {
            return Err(Error::InvalidInput(format!("tol abs must be ≥ 0, got {abs}")));
        }
        Ok(Self { rel, abs })
    }

    /// Equality band at a given magnitude scale.
    pub fn band(&self, scale: f64) -> f64 {
        self.abs.max(self.rel * scale)
    }

    pub fn eq(&self, x: f64, y: f64, scale: f64) -> bool {
        (x - y).abs() <= self.band(scale)
    }

    pub fn is_zero(&self, x: f64, scale: f64) -> bool {
        x.abs() <= self.band(scale)
    }
}

/// Assembles the 2×2 effective Hamiltonian: one addition per diagonal entry,
/// off-diagonal copied verbatim.
pub fn effective_hamiltonian(
    pair: &UnperturbedPair,
    v: &PerturbationBlock,
) -> Result<EffectiveHamiltonian> {
    let h11 = pair.e0_lower + v.v11;
    let h22 = pair.e0_upper + v.v22;
    if !h11.is_finite() {
        return Err(Error::NonFinite { field: "h11" });
    }
    if !h22.is_finite() {
        return Err(Error::NonFinite { field: "h22" });
    }
    Ok(EffectiveHamiltonian { h11, h22, h12: v.v12 })
}

/// Solves the secular equation of the 2×2 effective Hamiltonian.
///
/// The minus root of the square root is assigned to `e1`; with
/// `e0_lower ≤ e0_upper` this is the root that continuously connects to
/// `E⁰₁` as the perturbation vanishes. Mixing amplitudes follow the phase
/// convention of [`MixingCoefficients`].
pub fn solve_two_level(h: &EffectiveHamiltonian) -> Result<PerturbedPair> {
    let diff = h.h22 - h.h11;
    let disc = diff * diff + 4.0 * h.h12.norm_sqr();
    if !disc.is_finite() {
        return Err(Error::NonFinite { field: "discriminant" });
    }
    // Already diagonal: take the entries themselves so the V̂ → 0 limit
    // reproduces the unperturbed energies exactly.
    let (e1, e2) = if h.h12.norm_sqr() == 0.0 {
        (h.h11.min(h.h22), h.h11.max(h.h22))
    } else {
        let half = 0.5 * disc.sqrt();
        let mean = 0.5 * (h.h11 + h.h22);
        if !mean.is_finite() {
            return Err(Error::NonFinite { field: "trace" });
        }
        (mean - half, mean + half)
    };

    let mixing = if e1 == e2 {
        // Scalar matrix: every vector is an eigenvector.
        MixingCoefficients::identity()
    } else {
        let (a, b) = canonical_eigenvector(h, e1);
        let (c, d) = canonical_eigenvector(h, e2);
        MixingCoefficients { a, b, c, d }
    };

    Ok(PerturbedPair {
        e1,
        e2,
        gap: e2 - e1,
        mixing,
    })
}

/// Normalized eigenvector of `h` for eigenvalue `e`, phase-fixed so the
/// first component is real ≥ 0 (second component real > 0 if the first
/// vanishes).
fn canonical_eigenvector(h: &EffectiveHamiltonian, e: f64) -> (Complex64, Complex64) {
    // Both rows of (H − e) give a null vector; pick the larger one to
    // avoid cancellation near the diagonal limit.
    let u = (h.h12, Complex64::new(e - h.h11, 0.0));
    let w = (Complex64::new(e - h.h22, 0.0), h.h12.conj());
    let (x, y) = if u.0.norm_sqr() + u.1.norm_sqr() >= w.0.norm_sqr() + w.1.norm_sqr() {
        u
    } else {
        w
    };
    let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
    let (x, y) = (x / norm, y / norm);
    if x.norm() > 0.0 {
        let phase = x.conj() / x.norm();
        (Complex64::new(x.norm(), 0.0), y * phase)
    } else {
        (Complex64::new(0.0, 0.0), Complex64::new(y.norm(), 0.0))
    }
}

/// The perturbed gap ΔE = √((v22 − v11 + ΔE⁰)² + 4|v12|²), evaluated
/// without going through the eigenvalues.
pub fn perturbed_gap(pair: &UnperturbedPair, v: &PerturbationBlock) -> f64 {
    let shifted = v.v22 - v.v11 + pair.gap();
    (shifted * shifted + 4.0 * v.v12.norm_sqr()).sqrt()
}

/// The indicator energy ε = ((v11 − v22)² + 4|v12|²) / (2(v11 − v22)).
///
/// Equality with the singular denominator is decided at the block's own
/// magnitude scale.
pub fn indicator_energy(v: &PerturbationBlock, tol: &Tolerance) -> Epsilon {
    indicator_with_scale(v, tol, v.scale())
}

pub(crate) fn indicator_with_scale(v: &PerturbationBlock, tol: &Tolerance, scale: f64) -> Epsilon {
    let d = v.v11 - v.v22;
    if !tol.is_zero(d, scale) {
        Epsilon::Finite((d * d + 4.0 * v.v12.norm_sqr()) / (2.0 * d))
    } else if tol.is_zero(v.v12.norm(), scale) {
        Epsilon::NullCase
    } else {
        Epsilon::Unbounded
    }
}

/// Classifies the pair's response by placing ε relative to the interval
/// `(0, ΔE⁰)`:
///
/// - superimposition: ε = ΔE⁰/2 with `v12 = 0` and ΔE⁰ > 0 (gap collapses);
/// - unchanged: ε = 0, ε = ΔE⁰, or the 0/0 null case;
/// - repulsion: ε outside `[0, ΔE⁰]`, or the unbounded case;
/// - rapprochement: ε strictly inside `(0, ΔE⁰)`.
///
/// Superimposition is tested first; its conditions sit on the boundary of
/// the rapprochement region.
pub fn classify_by_indicator(
    pair: &UnperturbedPair,
    v: &PerturbationBlock,
    tol: &Tolerance,
) -> IndicatorResult {
    let d0 = pair.gap();
    let scale = d0.max(v.scale());
    let band = tol.band(scale);
    let epsilon = indicator_with_scale(v, tol, scale);

    let superimposition = v.v12.norm() <= band
        && d0 > band
        && perturbed_gap(pair, v) <= band
        && matches!(epsilon, Epsilon::Finite(e) if (e - 0.5 * d0).abs() <= band);

    let level_case = if superimposition {
        LevelCase::Superimposition
    } else {
        match epsilon {
            Epsilon::NullCase => LevelCase::Unchanged,
            Epsilon::Unbounded => LevelCase::Repulsion,
            Epsilon::Finite(e) => {
                if e.abs() <= band || (e - d0).abs() <= band {
                    LevelCase::Unchanged
                } else if e < 0.0 || e > d0 {
                    LevelCase::Repulsion
                } else {
                    LevelCase::Rapprochement
                }
            }
        }
    };

    IndicatorResult { epsilon, level_case }
}

/// Independent classification by comparing the perturbed gap with ΔE⁰
/// directly. Serves as the consistency oracle for [`classify_by_indicator`].
pub fn classify_by_gap(
    pair: &UnperturbedPair,
    v: &PerturbationBlock,
    tol: &Tolerance,
) -> LevelCase {
    let d0 = pair.gap();
    let scale = d0.max(v.scale());
    let band = tol.band(scale);
    let gap = perturbed_gap(pair, v);
    if gap <= band && d0 > band {
        LevelCase::Superimposition
    } else if (gap - d0).abs() <= band {
        LevelCase::Unchanged
    } else if gap > d0 {
        LevelCase::Repulsion
    } else {
        LevelCase::Rapprochement
    }
}
