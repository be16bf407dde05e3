//! Problem/result documents and the logic behind the CLI subcommands.
//!
//! Input is a single JSON document with the field names of
//! [`ProblemDocument`]; unknown fields are rejected. Structured output is
//! JSON, tabular output is comma-separated with a header row. All numbers
//! are printed with shortest round-trip formatting, so output documents
//! parse back to the exact same doubles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::{sample_perturbation, CaseFrequencies, EnsembleSpec};
use crate::error::{Error, Result};
use crate::oracle::{jacobi_diagonalize_default, validity_scan, HermitianMatrix};
use crate::spectral::{
    classify_by_indicator, effective_hamiltonian, solve_two_level, Epsilon, LevelCase,
    PerturbationBlock, Tolerance, UnperturbedPair,
};
use crate::sweep::{degeneracy_restoration_sweep, SweepConfig, SweepPoint};

/// Self-describing problem input. Mirrors the pair and block invariants;
/// tolerance overrides are optional and may also come from flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub e0_lower: f64,
    pub e0_upper: f64,
    pub v11: f64,
    pub v22: f64,
    pub v12_re: f64,
    pub v12_im: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_abs: Option<f64>,
}

impl ProblemDocument {
    pub fn pair(&self) -> Result<UnperturbedPair> {
        UnperturbedPair::new(self.e0_lower, self.e0_upper)
    }

    pub fn block(&self) -> Result<PerturbationBlock> {
        PerturbationBlock::new(self.v11, self.v22, Complex64::new(self.v12_re, self.v12_im))
    }

    /// Tolerance resolution: command-line flags win over document fields,
    /// which win over the defaults.
    pub fn tolerance(&self, rel_flag: Option<f64>, abs_flag: Option<f64>) -> Result<Tolerance> {
        let default = Tolerance::default();
        let rel = rel_flag.or(self.tol_rel).unwrap_or(default.rel);
        let abs = abs_flag.or(self.tol_abs).unwrap_or(default.abs);
        Tolerance::new(rel, abs)
    }
}

/// ε as it appears in output documents: a number, or one of the two
/// singular labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonValue {
    Finite(f64),
    Label(EpsilonLabel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsilonLabel {
    Unbounded,
    NullCase,
}

impl From<Epsilon> for EpsilonValue {
    fn from(e: Epsilon) -> Self {
        match e {
            Epsilon::Finite(x) => EpsilonValue::Finite(x),
            Epsilon::Unbounded => EpsilonValue::Label(EpsilonLabel::Unbounded),
            Epsilon::NullCase => EpsilonValue::Label(EpsilonLabel::NullCase),
        }
    }
}

impl std::fmt::Display for EpsilonValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EpsilonValue::Finite(x) => write!(f, "{x}"),
            EpsilonValue::Label(EpsilonLabel::Unbounded) => f.write_str("unbounded"),
            EpsilonValue::Label(EpsilonLabel::NullCase) => f.write_str("null-case"),
        }
    }
}

/// Mixing amplitudes flattened to re/im pairs for serialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingDocument {
    pub a_re: f64,
    pub a_im: f64,
    pub b_re: f64,
    pub b_im: f64,
    pub c_re: f64,
    pub c_im: f64,
    pub d_re: f64,
    pub d_im: f64,
}

/// Full analysis result for one problem document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub e1: f64,
    pub e2: f64,
    pub gap: f64,
    pub epsilon: EpsilonValue,
    pub case: LevelCase,
    pub mixing: MixingDocument,
}

/// Runs the full analysis pipeline on one document.
pub fn analyze(doc: &ProblemDocument, tol: &Tolerance) -> Result<ResultDocument> {
    let pair = doc.pair()?;
    let v = doc.block()?;
    let solved = solve_two_level(&effective_hamiltonian(&pair, &v)?)?;
    let indicator = classify_by_indicator(&pair, &v, tol);
    let m = solved.mixing;
    Ok(ResultDocument {
        e1: solved.e1,
        e2: solved.e2,
        gap: solved.gap,
        epsilon: indicator.epsilon.into(),
        case: indicator.level_case,
        mixing: MixingDocument {
            a_re: m.a.re,
            a_im: m.a.im,
            b_re: m.b.re,
            b_im: m.b.im,
            c_re: m.c.re,
            c_im: m.c.im,
            d_re: m.d.re,
            d_im: m.d.im,
        },
    })
}

pub fn result_table(r: &ResultDocument) -> String {
    let m = &r.mixing;
    format!(
        "e1,e2,gap,epsilon,case,a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im\n\
         {},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        r.e1,
        r.e2,
        r.gap,
        r.epsilon,
        r.case,
        m.a_re,
        m.a_im,
        m.b_re,
        m.b_im,
        m.c_re,
        m.c_im,
        m.d_re,
        m.d_im
    )
}

/// One sweep row as exported in structured format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: f64,
    pub e1: f64,
    pub e2: f64,
    pub gap: f64,
    pub case: LevelCase,
}

impl From<SweepPoint> for SweepRow {
    fn from(p: SweepPoint) -> Self {
        Self {
            k: p.k,
            e1: p.e1,
            e2: p.e2,
            gap: p.gap,
            case: p.level_case,
        }
    }
}

pub fn run_sweep(doc: &ProblemDocument, k_steps: usize) -> Result<Vec<SweepRow>> {
    let cfg = SweepConfig::uniform(doc.pair()?, doc.block()?, k_steps)?;
    Ok(degeneracy_restoration_sweep(&cfg)?
        .into_iter()
        .map(SweepRow::from)
        .collect())
}

pub fn sweep_table(rows: &[SweepRow]) -> String {
    let mut out = String::from("k,e1,e2,gap,case\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.k, r.e1, r.e2, r.gap, r.case));
    }
    out
}

/// Census output: counts and frequencies per case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusDocument {
    pub total: u64,
    pub counts: CaseTally<u64>,
    pub frequencies: CaseTally<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseTally<T> {
    pub repulsion: T,
    pub rapprochement: T,
    pub unchanged: T,
    pub superimposition: T,
}

impl From<CaseFrequencies> for CensusDocument {
    fn from(c: CaseFrequencies) -> Self {
        Self {
            total: c.total,
            counts: CaseTally {
                repulsion: c.repulsion,
                rapprochement: c.rapprochement,
                unchanged: c.unchanged,
                superimposition: c.superimposition,
            },
            frequencies: CaseTally {
                repulsion: c.frequency(LevelCase::Repulsion),
                rapprochement: c.frequency(LevelCase::Rapprochement),
                unchanged: c.frequency(LevelCase::Unchanged),
                superimposition: c.frequency(LevelCase::Superimposition),
            },
        }
    }
}

pub fn census_table(doc: &CensusDocument) -> String {
    format!(
        "case,count,frequency\n\
         repulsion,{},{}\n\
         rapprochement,{},{}\n\
         unchanged,{},{}\n\
         superimposition,{},{}\n",
        doc.counts.repulsion,
        doc.frequencies.repulsion,
        doc.counts.rapprochement,
        doc.frequencies.rapprochement,
        doc.counts.unchanged,
        doc.frequencies.unchanged,
        doc.counts.superimposition,
        doc.frequencies.superimposition,
    )
}

/// Relative deviation allowed between the closed form and the oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub scale: f64,
    pub max_error: f64,
}

/// Outcome of the `verify` subcommand: the 2×2 oracle-equivalence run and
/// the spectator-distance scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub samples: u64,
    pub seed: u64,
    pub coupling: f64,
    pub max_oracle_deviation: f64,
    pub oracle_tolerance: f64,
    pub oracle_ok: bool,
    pub scan: Vec<ScanPoint>,
    pub scan_ok: bool,
    pub passed: bool,
}

/// Checks the closed form against the Jacobi oracle on seeded random 2×2
/// blocks, then runs the validity scan with the given coupling and scales.
pub fn run_verify(samples: u64, seed: u64, scales: &[f64], coupling: f64) -> Result<VerifyReport> {
    let pair = UnperturbedPair::new(0.0, 1.0)?;
    let spec = EnsembleSpec::new(pair, 0.5, samples, seed, Tolerance::default())?;

    let mut max_dev: f64 = 0.0;
    for i in 0..samples {
        let v = sample_perturbation(&spec, i);
        let h = effective_hamiltonian(&pair, &v)?;
        let solved = solve_two_level(&h)?;
        let m = HermitianMatrix::from_effective(&h);
        let spectrum = jacobi_diagonalize_default(&m)?;
        let norm = m.frobenius_norm().max(1.0);
        let dev = ((spectrum.eigenvalues[0] - solved.e1).abs())
            .max((spectrum.eigenvalues[1] - solved.e2).abs())
            / norm;
        max_dev = max_dev.max(dev);
    }
    let oracle_ok = max_dev <= ORACLE_TOLERANCE;

    let v = PerturbationBlock::new(0.1, -0.1, Complex64::new(0.2, 0.0))?;
    let scan: Vec<ScanPoint> = validity_scan(&pair, &v, &[-10.0, 11.0], coupling, scales)?
        .into_iter()
        .map(|(scale, max_error)| ScanPoint { scale, max_error })
        .collect();
    let scan_ok = if coupling == 0.0 {
        scan.iter().all(|p| p.max_error == 0.0)
    } else {
        scan.windows(2).all(|w| w[1].max_error < w[0].max_error)
    };

    Ok(VerifyReport {
        samples,
        seed,
        coupling,
        max_oracle_deviation: max_dev,
        oracle_tolerance: ORACLE_TOLERANCE,
        oracle_ok,
        scan,
        scan_ok,
        passed: oracle_ok && scan_ok,
    })
}

pub fn verify_table(r: &VerifyReport) -> String {
    let mut out = format!(
        "metric,value\n\
         samples,{}\n\
         seed,{}\n\
         coupling,{}\n\
         max_oracle_deviation,{}\n\
         oracle_tolerance,{}\n\
         oracle_ok,{}\n\
         scan_ok,{}\n\
         passed,{}\n\
         scale,max_error\n",
        r.samples,
        r.seed,
        r.coupling,
        r.max_oracle_deviation,
        r.oracle_tolerance,
        r.oracle_ok,
        r.scan_ok,
        r.passed
    );
    for p in &r.scan {
        out.push_str(&format!("{},{}\n", p.scale, p.max_error));
    }
    out
}

/// Parses a problem document, mapping serde diagnostics (which name the
/// offending field) into input errors.
pub fn parse_problem(text: &str) -> Result<ProblemDocument> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
}
