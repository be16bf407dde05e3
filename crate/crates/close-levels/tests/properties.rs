//! Property tests for the algebraic invariants of the two-level solution,
//! the classifiers, the Jacobi oracle, and the sweep.

use num_complex::Complex64;
use proptest::prelude::*;

use close_levels::ensemble::{sample_perturbation, EnsembleSpec};
use close_levels::oracle::{jacobi_diagonalize_default, HermitianMatrix};
use close_levels::spectral::{
    classify_by_gap, classify_by_indicator, effective_hamiltonian, indicator_energy,
    perturbed_gap, solve_two_level, Epsilon, PerturbationBlock, Tolerance, UnperturbedPair,
};
use close_levels::sweep::{degeneracy_restoration_sweep, SweepConfig};

fn arb_block() -> impl Strategy<Value = PerturbationBlock> {
    (
        -2.0..2.0f64,
        -2.0..2.0f64,
        -2.0..2.0f64,
        -2.0..2.0f64,
    )
        .prop_map(|(v11, v22, re, im)| {
            PerturbationBlock::new(v11, v22, Complex64::new(re, im)).unwrap()
        })
}

fn arb_pair() -> impl Strategy<Value = UnperturbedPair> {
    (-2.0..2.0f64, 0.0..3.0f64)
        .prop_map(|(lo, gap)| UnperturbedPair::new(lo, lo + gap).unwrap())
}

/// Determinant by Laplace expansion; test-side oracle, independent of the
/// eigensolver.
fn det(entries: &[Complex64], n: usize) -> Complex64 {
    if n == 1 {
        return entries[0];
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for col in 0..n {
        let mut minor = Vec::with_capacity((n - 1) * (n - 1));
        for row in 1..n {
            for c in 0..n {
                if c != col {
                    minor.push(entries[row * n + c]);
                }
            }
        }
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * entries[col] * det(&minor, n - 1);
    }
    acc
}

fn arb_hermitian(n: usize) -> impl Strategy<Value = HermitianMatrix> {
    prop::collection::vec(-2.0..2.0f64, 2 * n * n).prop_map(move |raw| {
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            entries[j * n + j] = Complex64::new(raw[2 * (j * n + j)], 0.0);
            for k in (j + 1)..n {
                let z = Complex64::new(raw[2 * (j * n + k)], raw[2 * (j * n + k) + 1]);
                entries[j * n + k] = z;
                entries[k * n + j] = z.conj();
            }
        }
        HermitianMatrix::new(n, entries).unwrap()
    })
}

proptest! {
    #[test]
    fn gap_matches_eigenvalue_difference(pair in arb_pair(), v in arb_block()) {
        let solved = solve_two_level(&effective_hamiltonian(&pair, &v).unwrap()).unwrap();
        let gap = perturbed_gap(&pair, &v);
        let scale = gap.abs().max(solved.gap.abs()).max(1.0);
        prop_assert!((gap - solved.gap).abs() <= 1e-12 * scale);
    }

    #[test]
    fn trace_and_determinant_identities(pair in arb_pair(), v in arb_block()) {
        let h = effective_hamiltonian(&pair, &v).unwrap();
        let p = solve_two_level(&h).unwrap();
        let scale = h.h11().abs().max(h.h22().abs()).max(h.h12().norm()).max(1.0);
        prop_assert!((p.e1 + p.e2 - (h.h11() + h.h22())).abs() <= 1e-12 * scale);
        let det2 = h.h11() * h.h22() - h.h12().norm_sqr();
        prop_assert!((p.e1 * p.e2 - det2).abs() <= 1e-12 * scale * scale);
    }

    #[test]
    fn classifiers_agree_and_identity_holds(pair in arb_pair(), v in arb_block()) {
        let tol = Tolerance::default();
        let by_ind = classify_by_indicator(&pair, &v, &tol);
        prop_assert_eq!(by_ind.level_case, classify_by_gap(&pair, &v, &tol));

        if let Epsilon::Finite(eps) = by_ind.epsilon {
            let d0 = pair.gap();
            let gap = perturbed_gap(&pair, &v);
            let lhs = gap * gap - d0 * d0;
            let rhs = 2.0 * (v.v11() - v.v22()) * (eps - d0);
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn uniform_shift_leaves_everything_unchanged(
        pair in arb_pair(), v in arb_block(), shift in -1.0..1.0f64
    ) {
        let tol = Tolerance::default();
        let shifted = PerturbationBlock::new(v.v11() + shift, v.v22() + shift, v.v12()).unwrap();
        let (g, gs) = (perturbed_gap(&pair, &v), perturbed_gap(&pair, &shifted));
        prop_assert!((g - gs).abs() <= 1e-12 * g.max(1.0), "gap {g} shifted {gs}");
        let e_base = classify_by_indicator(&pair, &v, &tol);
        let e_shift = classify_by_indicator(&pair, &shifted, &tol);
        prop_assert_eq!(e_base.level_case, e_shift.level_case);
        match (e_base.epsilon, e_shift.epsilon) {
            (Epsilon::Finite(a), Epsilon::Finite(b)) => {
                let scale = a.abs().max(b.abs()).max(1.0);
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn offdiagonal_phase_is_irrelevant(
        pair in arb_pair(), v in arb_block(), theta in 0.0..std::f64::consts::TAU
    ) {
        let tol = Tolerance::default();
        let rotated = PerturbationBlock::new(
            v.v11(),
            v.v22(),
            v.v12() * Complex64::from_polar(1.0, theta),
        )
        .unwrap();
        let a = solve_two_level(&effective_hamiltonian(&pair, &v).unwrap()).unwrap();
        let b = solve_two_level(&effective_hamiltonian(&pair, &rotated).unwrap()).unwrap();
        let scale = a.e1.abs().max(a.e2.abs()).max(1.0);
        prop_assert!((a.e1 - b.e1).abs() <= 1e-12 * scale);
        prop_assert!((a.e2 - b.e2).abs() <= 1e-12 * scale);
        prop_assert_eq!(
            classify_by_indicator(&pair, &v, &tol).level_case,
            classify_by_indicator(&pair, &rotated, &tol).level_case
        );
    }

    #[test]
    fn gap_never_falls_below_coupling_bound(pair in arb_pair(), v in arb_block()) {
        let gap = perturbed_gap(&pair, &v);
        let bound = 2.0 * v.v12().norm();
        prop_assert!(gap + 1e-12 * bound.max(1.0) >= bound, "gap {gap} bound {bound}");
    }

    #[test]
    fn mixing_is_normalized_orthogonal_and_solves_the_rows(
        pair in arb_pair(), v in arb_block()
    ) {
        let h = effective_hamiltonian(&pair, &v).unwrap();
        let p = solve_two_level(&h).unwrap();
        let m = p.mixing;
        prop_assert!((m.a.norm_sqr() + m.b.norm_sqr() - 1.0).abs() <= 1e-12);
        prop_assert!((m.c.norm_sqr() + m.d.norm_sqr() - 1.0).abs() <= 1e-12);
        prop_assert!(m.a.im == 0.0 && m.a.re >= 0.0);
        prop_assert!(m.c.im == 0.0 && m.c.re >= 0.0);
        let scale = h.h11().abs().max(h.h22().abs()).max(h.h12().norm()).max(1.0);
        if p.e1 != p.e2 {
            prop_assert!((m.a.conj() * m.c + m.b.conj() * m.d).norm() <= 1e-12);
        }
        let residuals = [
            (h.h11() - p.e1) * m.a + h.h12() * m.b,
            h.h12().conj() * m.a + (h.h22() - p.e1) * m.b,
            (h.h11() - p.e2) * m.c + h.h12() * m.d,
            h.h12().conj() * m.c + (h.h22() - p.e2) * m.d,
        ];
        for r in residuals {
            prop_assert!(r.norm() <= 1e-10 * scale, "residual {r}");
        }
    }

    #[test]
    fn indicator_finiteness_tracks_the_diagonal_difference(v in arb_block()) {
        let tol = Tolerance::default();
        let scale = v.scale();
        let finite = matches!(indicator_energy(&v, &tol), Epsilon::Finite(_));
        prop_assert_eq!(finite, (v.v11() - v.v22()).abs() > tol.band(scale));
    }

    #[test]
    fn eigenvalue_sum_is_trace_and_product_is_determinant(
        m in (2usize..=4).prop_flat_map(arb_hermitian)
    ) {
        let s = jacobi_diagonalize_default(&m).unwrap();
        let trace = m.trace();
        let sum: f64 = s.eigenvalues.iter().sum();
        let scale = trace.abs().max(sum.abs()).max(1.0);
        prop_assert!((sum - trace).abs() <= 1e-10 * scale);

        let n = m.dim();
        let entries: Vec<Complex64> =
            (0..n * n).map(|i| m.entry(i / n, i % n)).collect();
        let d = det(&entries, n);
        prop_assert!(d.im.abs() <= 1e-10 * d.norm().max(1.0));
        let product: f64 = s.eigenvalues.iter().product();
        let scale = d.re.abs().max(product.abs()).max(1.0);
        prop_assert!((product - d.re).abs() <= 1e-10 * scale, "det {} product {}", d.re, product);
    }

    #[test]
    fn spectrum_survives_diagonal_phase_conjugation(
        m in arb_hermitian(3),
        phases in prop::collection::vec(0.0..std::f64::consts::TAU, 3)
    ) {
        let n = m.dim();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for k in 0..n {
                let factor = Complex64::from_polar(1.0, phases[k] - phases[j]);
                entries[j * n + k] = m.entry(j, k) * factor;
            }
        }
        // Re-symmetrize rounding noise from the phase products.
        for j in 0..n {
            entries[j * n + j] = Complex64::new(entries[j * n + j].re, 0.0);
            for k in (j + 1)..n {
                entries[k * n + j] = entries[j * n + k].conj();
            }
        }
        let conjugated = HermitianMatrix::new(n, entries).unwrap();
        let a = jacobi_diagonalize_default(&m).unwrap();
        let b = jacobi_diagonalize_default(&conjugated).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            let scale = x.abs().max(y.abs()).max(1.0);
            prop_assert!((x - y).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn oracle_matches_closed_form_on_random_blocks(v in arb_block()) {
        let pair = UnperturbedPair::new(0.0, 1.0).unwrap();
        let h = effective_hamiltonian(&pair, &v).unwrap();
        let solved = solve_two_level(&h).unwrap();
        let m = HermitianMatrix::from_effective(&h);
        let s = jacobi_diagonalize_default(&m).unwrap();
        let scale = m.frobenius_norm().max(1.0);
        prop_assert!((s.eigenvalues[0] - solved.e1).abs() <= 1e-12 * scale);
        prop_assert!((s.eigenvalues[1] - solved.e2).abs() <= 1e-12 * scale);
    }

    #[test]
    fn degenerate_sweep_is_linear_in_k(v in arb_block(), e0 in -1.0..1.0f64) {
        let base = UnperturbedPair::new(e0, e0).unwrap();
        let cfg = SweepConfig::uniform(base, v, 21).unwrap();
        let points = degeneracy_restoration_sweep(&cfg).unwrap();
        let gap0 = points[0].gap;
        for p in &points {
            prop_assert!((p.gap - (1.0 - p.k) * gap0).abs() <= 1e-12 * gap0.max(1.0));
        }
        prop_assert_eq!(points.last().unwrap().gap, 0.0);
    }

    #[test]
    fn nondegenerate_sweep_matches_scaled_gap_formula(
        pair in arb_pair(), v in arb_block()
    ) {
        let cfg = SweepConfig::uniform(pair, v, 11).unwrap();
        let points = degeneracy_restoration_sweep(&cfg).unwrap();
        for p in &points {
            let scaled = v.scaled(1.0 - p.k).unwrap();
            let expected = perturbed_gap(&pair, &scaled);
            prop_assert!((p.gap - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn sweep_gap_is_lipschitz(pair in arb_pair(), v in arb_block()) {
        let cfg = SweepConfig::uniform(pair, v, 51).unwrap();
        let points = degeneracy_restoration_sweep(&cfg).unwrap();
        let lip = 2.0 * (v.v11().abs() + v.v22().abs() + 2.0 * v.v12().norm());
        for w in points.windows(2) {
            let dk = w[1].k - w[0].k;
            prop_assert!(
                (w[1].gap - w[0].gap).abs() <= lip * dk + 1e-12,
                "jump {} over dk {}",
                (w[1].gap - w[0].gap).abs(),
                dk
            );
        }
    }

    #[test]
    fn sampling_is_pure_in_seed_and_index(seed in any::<u64>(), index in 0u64..1000) {
        let pair = UnperturbedPair::new(0.0, 1.0).unwrap();
        let spec = EnsembleSpec::new(pair, 0.5, 1000, seed, Tolerance::default()).unwrap();
        prop_assert_eq!(
            sample_perturbation(&spec, index),
            sample_perturbation(&spec, index)
        );
    }
}
