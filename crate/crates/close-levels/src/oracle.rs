//! Brute-force Hermitian eigensolver used to verify the closed-form
//! two-level results, plus the spectator-level embedding that probes when
//! the 2×2 truncation is trustworthy.
//!
//! The solver is a cyclic-by-rows Jacobi iteration with complex rotations;
//! each pivot is first phase-rotated to a real off-diagonal entry, then
//! annihilated by a standard real rotation. Only eigenvalues are kept.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{effective_hamiltonian, solve_two_level, EffectiveHamiltonian,
    PerturbationBlock, UnperturbedPair};

/// Hermiticity slack accepted at construction; entries are symmetrized
/// afterwards so the stored matrix is exactly Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-14;

/// Default off-diagonal convergence threshold, relative to the input's
/// Frobenius norm.
pub const DEFAULT_REL_THRESHOLD: f64 = 1e-13;

/// Default sweep cap for [`jacobi_diagonalize`].
pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// Dense N×N Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds from row-major entries, checking Hermiticity to
    /// [`HERMITICITY_TOL`] and symmetrizing. Diagonal imaginary parts are
    /// zeroed exactly.
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension must be ≥ 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}×{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        for (idx, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite entry at flat index {idx}"
                )));
            }
        }
        let mut m = entries;
        for j in 0..n {
            if m[j * n + j].im.abs() > HERMITICITY_TOL {
                return Err(Error::InvalidInput(format!(
                    "diagonal entry ({j},{j}) has imaginary part {}",
                    m[j * n + j].im
                )));
            }
            m[j * n + j] = Complex64::new(m[j * n + j].re, 0.0);
            for k in (j + 1)..n {
                let upper = m[j * n + k];
                let lower = m[k * n + j];
                if (upper - lower.conj()).norm() > HERMITICITY_TOL {
                    return Err(Error::InvalidInput(format!(
                        "entries ({j},{k}) and ({k},{j}) are not conjugate"
                    )));
                }
                let sym = 0.5 * (upper + lower.conj());
                m[j * n + k] = sym;
                m[k * n + j] = sym.conj();
            }
        }
        Ok(Self { n, entries: m })
    }

    /// The 2×2 matrix of an effective Hamiltonian.
    pub fn from_effective(h: &EffectiveHamiltonian) -> Self {
        Self {
            n: 2,
            entries: vec![
                Complex64::new(h.h11(), 0.0),
                h.h12(),
                h.h12().conj(),
                Complex64::new(h.h22(), 0.0),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j * self.n + k]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn off_diagonal_norm(&self) -> f64 {
        off_norm(&self.entries, self.n)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|j| self.entries[j * self.n + j].re).sum()
    }
}

fn off_norm(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for j in 0..n {
        for k in 0..n {
            if j != k {
                s += a[j * n + k].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Sorted real eigenvalues plus the off-diagonal Frobenius norm left at
/// convergence.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub residual: f64,
}

/// Default absolute threshold for `m`: [`DEFAULT_REL_THRESHOLD`] times its
/// Frobenius norm (floored away from zero for the all-zero matrix).
pub fn default_threshold(m: &HermitianMatrix) -> f64 {
    (DEFAULT_REL_THRESHOLD * m.frobenius_norm()).max(f64::MIN_POSITIVE)
}

/// Cyclic Jacobi diagonalization. Iterates row-ordered sweeps of complex
/// rotations until the off-diagonal Frobenius norm drops to `threshold`,
/// failing with the residual after `max_sweeps`.
pub fn jacobi_diagonalize(
    m: &HermitianMatrix,
    threshold: f64,
    max_sweeps: usize,
) -> Result<Spectrum> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "threshold must be > 0, got {threshold}"
        )));
    }
    if max_sweeps < 1 {
        return Err(Error::InvalidInput("max_sweeps must be ≥ 1".into()));
    }

    let n = m.n;
    let mut a = m.entries.clone();
    let mut residual = off_norm(&a, n);
    let mut sweeps = 0;

    while residual > threshold {
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence { residual, sweeps });
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, n, p, q);
            }
        }
        sweeps += 1;
        residual = off_norm(&a, n);
    }

    let mut eigenvalues: Vec<f64> = (0..n).map(|j| a[j * n + j].re).collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(Spectrum { eigenvalues, residual })
}

/// Convenience wrapper with the default threshold and sweep cap.
pub fn jacobi_diagonalize_default(m: &HermitianMatrix) -> Result<Spectrum> {
    jacobi_diagonalize(m, default_threshold(m), DEFAULT_MAX_SWEEPS)
}

/// Annihilates entry (p,q) with the unitary U = P·J, where P carries the
/// phase of a_pq onto the q column and J is the real rotation that zeros
/// the resulting real symmetric 2×2 pivot block.
fn rotate(a: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase_conj = apq.conj() / r; // e^{-iφ}

    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let tau = (aqq - app) / (2.0 * r);
    // Smaller-angle root of t² + 2τt − 1 = 0.
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // New diagonal entries are the pivot-block eigenvalues; evaluating
    // them through the secular closed form keeps a decoupled 2×2 block
    // bit-identical to the two-level solution.
    let diff = aqq - app;
    let half = 0.5 * (diff * diff + 4.0 * apq.norm_sqr()).sqrt();
    let mean = 0.5 * (app + aqq);
    let (new_pp, new_qq) = if app <= aqq {
        (mean - half, mean + half)
    } else {
        (mean + half, mean - half)
    };

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = akp * c - akq * phase_conj * s;
        let new_kq = akp * s + akq * phase_conj * c;
        a[k * n + p] = new_kp;
        a[k * n + q] = new_kq;
        a[p * n + k] = new_kp.conj();
        a[q * n + k] = new_kq.conj();
    }
    a[p * n + p] = Complex64::new(new_pp, 0.0);
    a[q * n + q] = Complex64::new(new_qq, 0.0);
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
}

/// A close pair embedded among far spectator levels, all coupled to the
/// pair basis states by one real magnitude `coupling`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpec {
    pair: UnperturbedPair,
    v: PerturbationBlock,
    spectators: Vec<f64>,
    coupling: f64,
}

impl EmbeddingSpec {
    pub fn new(
        pair: UnperturbedPair,
        v: PerturbationBlock,
        spectators: Vec<f64>,
        coupling: f64,
    ) -> Result<Self> {
        if !coupling.is_finite() || coupling < 0.0 {
            return Err(Error::InvalidInput(format!(
                "coupling must be ≥ 0, got {coupling}"
            )));
        }
        let gap = pair.gap();
        for (i, &s) in spectators.iter().enumerate() {
            if !s.is_finite() {
                return Err(Error::InvalidInput(format!("spectator {i} is not finite")));
            }
            let dist = (s - pair.e0_lower()).abs().min((s - pair.e0_upper()).abs());
            if dist <= gap {
                return Err(Error::InvalidInput(format!(
                    "spectator {i} at {s} is within the pair gap ΔE⁰ = {gap} of the pair; \
                     the pair must be the closest levels"
                )));
            }
        }
        Ok(Self {
            pair,
            v,
            spectators,
            coupling,
        })
    }

    pub fn pair(&self) -> &UnperturbedPair {
        &self.pair
    }

    pub fn v(&self) -> &PerturbationBlock {
        &self.v
    }

    pub fn spectators(&self) -> &[f64] {
        &self.spectators
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }
}

/// Builds the (2+s)×(2+s) matrix: the effective Hamiltonian in the
/// upper-left block, spectator energies on the remaining diagonal, the
/// real coupling between each pair state and each spectator, and zeros
/// between spectators.
pub fn embed_pair(spec: &EmbeddingSpec) -> Result<HermitianMatrix> {
    let h = effective_hamiltonian(&spec.pair, &spec.v)?;
    let s = spec.spectators.len();
    let n = 2 + s;
    let zero = Complex64::new(0.0, 0.0);
    let mut entries = vec![zero; n * n];
    entries[0] = Complex64::new(h.h11(), 0.0);
    entries[1] = h.h12();
    entries[n] = h.h12().conj();
    entries[n + 1] = Complex64::new(h.h22(), 0.0);
    for (i, &e) in spec.spectators.iter().enumerate() {
        let j = 2 + i;
        entries[j * n + j] = Complex64::new(e, 0.0);
        let w = Complex64::new(spec.coupling, 0.0);
        entries[j] = w; // (0, j)
        entries[n + j] = w; // (1, j)
        entries[j * n] = w;
        entries[j * n + 1] = w;
    }
    HermitianMatrix::new(n, entries)
}

/// For each scale, pushes the spectators away from the pair midpoint by
/// that factor and reports the worst disagreement between the full-matrix
/// eigenvalues nearest the two-level predictions and those predictions.
pub fn validity_scan(
    pair: &UnperturbedPair,
    v: &PerturbationBlock,
    base_spectators: &[f64],
    coupling: f64,
    scales: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if scales.is_empty() {
        return Err(Error::InvalidInput("scales must be non-empty".into()));
    }
    for w in scales.windows(2) {
        if w[0].is_nan() || w[1].is_nan() || w[0] >= w[1] {
            return Err(Error::InvalidInput(format!(
                "scales must be strictly ascending, got {} before {}",
                w[0], w[1]
            )));
        }
    }
    if !scales.iter().all(|s| s.is_finite() && *s > 0.0) {
        return Err(Error::InvalidInput("scales must be positive and finite".into()));
    }

    let predicted = solve_two_level(&effective_hamiltonian(pair, v)?)?;
    let mid = pair.midpoint();

    let mut out = Vec::with_capacity(scales.len());
    for &scale in scales {
        let spectators: Vec<f64> = base_spectators
            .iter()
            .map(|&s| mid + scale * (s - mid))
            .collect();
        let spec = EmbeddingSpec::new(*pair, *v, spectators, coupling)?;
        let matrix = embed_pair(&spec)?;
        let spectrum = jacobi_diagonalize_default(&matrix)?;
        let max_error = [predicted.e1, predicted.e2]
            .iter()
            .map(|&target| {
                spectrum
                    .eigenvalues
                    .iter()
                    .map(|&ev| (ev - target).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0_f64, f64::max);
        out.push((scale, max_error));
    }
    Ok(out)
}
