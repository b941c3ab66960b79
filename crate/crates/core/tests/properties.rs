use jc_blockade::effective::{derive_params, G2Coefficients};
use jc_blockade::hilbert::ModelParams;
use jc_blockade::liouvillian::{build_liouvillian, DensityMatrix};
use jc_blockade::observables::{
    default_wigner_grid, fidelity_m, fock_occupations, fock_occupations_composite, partial_trace_atom, wigner,
};
use jc_blockade::propagate::KrylovPropagator;
use jc_blockade::steadystate::{residual, steady_state};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

/// Random density matrix `X X† / tr(X X†)` from a flat list of entries.
fn density(dim: usize, entries: &[(f64, f64)]) -> DensityMatrix {
    let x = Array2::from_shape_fn((dim, dim), |(i, j)| {
        let (re, im) = entries[i * dim + j];
        C64::new(re, im)
    });
    let m = x.dot(&x.t().mapv(|z| z.conj()));
    let tr: C64 = m.diag().sum();
    DensityMatrix::new(m / tr).unwrap()
}

fn entries(dim: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim)
}

fn params() -> impl Strategy<Value = ModelParams> {
    (1.0..50.0f64, 0.1..5.0f64, 0.0..5.0f64, -2.0..2.0f64).prop_map(|(g, gamma, eps, d)| ModelParams::new(g, gamma, eps, d).with_n_max(4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn generator_preserves_trace_and_hermiticity(p in params(), e in entries(10)) {
        let l = build_liouvillian(&p).unwrap();
        let rho = density(p.dim(), &e);
        let out = l.apply(rho.matrix()).unwrap();
        prop_assert!(out.diag().sum().norm() <= 1e-10 * l.scale());
        let herm = (&out - &out.t().mapv(|z| z.conj())).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        prop_assert!(herm <= 1e-10 * l.scale());
    }

    #[test]
    fn steady_state_is_a_state(p in params()) {
        let l = build_liouvillian(&p).unwrap();
        let rho = steady_state(&l).unwrap();
        prop_assert!(rho.min_eigenvalue() >= -1e-8);
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(residual(&l, &rho) <= 1e-9 * l.scale());
    }

    #[test]
    fn propagation_keeps_trace(p in params(), e in entries(10), t in 0.0..3.0f64) {
        let l = build_liouvillian(&p).unwrap();
        let v = density(p.dim(), &e).to_vec();
        let out = KrylovPropagator::new(&l).evolve_vec(&v, t).unwrap();
        let rho = DensityMatrix::from_vec(&out, p.dim());
        prop_assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-9);
        prop_assert!(rho.hermiticity_defect() < 1e-9);
    }

    #[test]
    fn occupations_agree_by_both_traces(e in entries(10)) {
        let rho = density(10, &e);
        let a = fock_occupations(&partial_trace_atom(&rho).unwrap());
        let b = fock_occupations_composite(&rho).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_is_monotone_and_bounded(e in entries(6)) {
        let field = density(6, &e);
        let mut last = 0.0;
        for m in 0..6 {
            let f = fidelity_m(&field, m).unwrap();
            prop_assert!(f + 1e-15 >= last && f <= 1.0 + 1e-12);
            last = f;
        }
        prop_assert!((last - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coefficient_identity_is_exact(gamma in 1e-3..1e3f64, omega in 1e-3..1e3f64) {
        let c = G2Coefficients::new(gamma, omega).unwrap();
        prop_assert_eq!(c.identity_defect(), 0.0);
        let explicit = G2Coefficients::beat_amplitude(gamma, omega);
        prop_assert!((c.c4 - explicit).abs() <= 1e-12 * explicit.abs().max(1.0));
    }

    #[test]
    fn cascade_rates_sum_to_twice_gamma(g in 100.0..5000.0f64, eps in 0.0..50.0f64) {
        let fp = derive_params(&ModelParams::new(g, 2.0, eps, -0.7));
        prop_assert_eq!(fp.gamma31 + fp.gamma32, 2.0 * fp.gamma);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn wigner_integrates_to_one(e in entries(4)) {
        // a few photons at most, well inside the default grid
        let grid = default_wigner_grid();
        let map = wigner(&density(4, &e), &grid, &grid).unwrap();
        prop_assert!((map.normalization - 1.0).abs() < 1e-3);
        prop_assert!(!map.truncation_warning);
    }
}
