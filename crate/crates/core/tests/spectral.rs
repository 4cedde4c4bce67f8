mod common;

use common::{random_hermitian, random_state, rng, simpson, simpson_intervals};
use ergowalk::kernel;
use ergowalk::spectral::{
    eigendecompose, evolve, infinite_time_average_density, limit_expectation, point_mass, time_averaged_expectation,
    windowed_expectation, zero_energy_projection_average, HermitianOperator, State,
};
use ergowalk::Complex64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn path(n: usize) -> HermitianOperator {
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n - 1 {
        m[(i, i + 1)] = 1.0;
        m[(i + 1, i)] = 1.0;
    }
    HermitianOperator::from_real_symmetric(&m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn projectors_resolve_the_identity(seed in 0u64..10_000, n in 1usize..24) {
        let h = random_hermitian(&mut rng(seed), n, 3.0);
        let d = eigendecompose(&h, None).unwrap();
        let mut sum = DMatrix::<Complex64>::zeros(n, n);
        let projectors: Vec<_> = d.levels().iter().map(|l| l.projector()).collect();
        for (k, p) in projectors.iter().enumerate() {
            sum += p;
            prop_assert!((p.adjoint() - p).norm() < 1e-12);
            for (j, q) in projectors.iter().enumerate() {
                let prod = p * q;
                let expected = if j == k { p.clone() } else { DMatrix::zeros(n, n) };
                prop_assert!((prod - expected).norm() < 1e-11);
            }
        }
        prop_assert!((sum - DMatrix::<Complex64>::identity(n, n)).norm() < 1e-11);
    }

    #[test]
    fn averaged_density_is_a_probability(seed in 0u64..10_000, n in 1usize..24) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 2.0);
        let psi = random_state(&mut r, n);
        let d = eigendecompose(&h, None).unwrap();
        let dens = infinite_time_average_density(&d, &psi).unwrap();
        prop_assert!(dens.iter().all(|&x| x >= 0.0));
        prop_assert!((dens.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_preserves_norm(seed in 0u64..10_000, n in 1usize..24, t in -50.0f64..50.0) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 2.0);
        let psi = random_state(&mut r, n);
        let d = eigendecompose(&h, None).unwrap();
        prop_assert!((evolve(&d, &psi, t).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_obeys_its_decay_bound(t in 1.0f64..1e6, w in -10.0f64..10.0) {
        prop_assume!(w.abs() > 1e-9);
        prop_assert!(kernel::continuous(t, w).norm() <= 2.0 / (t * w.abs()) + 1e-15);
        prop_assert!(kernel::continuous(t, w).norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn long_horizon_approaches_the_limit(seed in 0u64..10_000, n in 2usize..10) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, n, 2.0);
        let psi = random_state(&mut r, n);
        let a: Vec<Complex64> = (0..n).map(|i| Complex64::new((i as f64).cos(), 0.0)).collect();
        let d = eigendecompose(&h, None).unwrap();
        let limit = limit_expectation(&d, &psi, &psi, &a).unwrap();
        let finite = time_averaged_expectation(&d, &psi, &a, 1e9).unwrap();
        let gap = d.min_gap().unwrap_or(1.0);
        prop_assert!((finite - limit).norm() <= 2.0 * n as f64 / (1e9 * gap) + 1e-12);
    }
}

fn expectation_at(d: &ergowalk::spectral::SpectralDecomposition, psi: &State, a: &[Complex64], t: f64) -> f64 {
    let out = evolve(d, psi, t).unwrap();
    out.iter().zip(a).map(|(z, w)| (w * z.norm_sqr()).re).sum()
}

#[test]
fn windowed_average_matches_quadrature() {
    let mut r = rng(7);
    for n in [2, 5, 8] {
        let h = random_hermitian(&mut r, n, 2.0);
        let psi = random_state(&mut r, n);
        let a: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + i as f64, 0.0)).collect();
        let d = eigendecompose(&h, None).unwrap();
        for (start, end) in [(0.0, 20.0), (9.0, 10.0), (3.5, 40.0)] {
            let closed = windowed_expectation(&d, &psi, &a, start, end).unwrap();
            let intervals = simpson_intervals(4.0, end - start);
            let quad = simpson(|t| expectation_at(&d, &psi, &a, t), start, end, intervals) / (end - start);
            assert!((closed.re - quad).abs() < 1e-9, "n={n} window=({start},{end}) {closed} vs {quad}");
            assert!(closed.im.abs() < 1e-12);
        }
    }
}

#[test]
fn infinite_average_density_matches_long_quadrature() {
    // path graph: simple spectrum, ω_max = 2·2cos(π/6)
    let n = 5;
    let d = eigendecompose(&path(n), None).unwrap();
    let psi = point_mass(n, 1);
    let limit = infinite_time_average_density(&d, &psi).unwrap();
    let horizon = 2e4;
    let basis: Vec<(f64, Vec<Complex64>)> = d
        .levels()
        .iter()
        .map(|l| (l.energy(), l.project(&psi).iter().copied().collect()))
        .collect();
    let gap = d.min_gap().unwrap();
    for site in 0..n {
        let amp = |t: f64| -> f64 {
            basis.iter().map(|(e, v)| v[site] * Complex64::from_polar(1.0, -t * e)).sum::<Complex64>().norm_sqr()
        };
        let quad = simpson(amp, 0.0, horizon, simpson_intervals(4.0, horizon)) / horizon;
        assert!((quad - limit[site]).abs() <= 10.0 / (gap * horizon), "site {site}: {quad} vs {}", limit[site]);
    }
}

#[test]
fn zero_energy_projection_on_odd_path() {
    let d = eigendecompose(&path(5), None).unwrap();
    // kernel of the 5-path: (1, 0, -1, 0, 1)/√3
    let phi = point_mass(5, 0);
    let psi = point_mass(5, 2);
    let z = zero_energy_projection_average(&d, &phi, &psi).unwrap();
    assert!((z + 1.0 / 3.0).norm() < 1e-13);
}

#[test]
fn two_site_density_example() {
    let h = HermitianOperator::from_real_symmetric(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
    let d = eigendecompose(&h, None).unwrap();
    let dens = infinite_time_average_density(&d, &point_mass(2, 0)).unwrap();
    assert!((dens[0] - 0.5).abs() < 1e-15 && (dens[1] - 0.5).abs() < 1e-15);
}
