mod common;

use std::f64::consts::{PI, SQRT_2};

use ergowalk::crystal::{
    band_grid, cell_averages, floquet_transform, library, numeric_crosscheck, Edge, PeriodicGraph,
};
use ergowalk::lattice::{exact_time_average_limit, LatticeObservable, LatticeTorus};
use ergowalk::spectral::{eigendecompose, evolve, State};
use ergowalk::{Complex64, Error};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
    }
}

fn graph_strategy() -> impl Strategy<Value = PeriodicGraph> {
    (0usize..7).prop_map(|i| library::all().swap_remove(i))
}

#[test]
fn floquet_matrices_of_the_examples() {
    let theta = 0.137;
    let ct = 2.0 * (2.0 * PI * theta).cos();
    let z1 = library::zd(1).unwrap().floquet_matrix(&[theta]).unwrap();
    assert!((z1.matrix()[(0, 0)] - c(ct)).norm() < 1e-14);

    let strip = library::strip(3).floquet_matrix(&[theta]).unwrap();
    let want = DMatrix::from_row_slice(3, 3, &[ct, 1.0, 0.0, 1.0, ct, 1.0, 0.0, 1.0, ct]).map(c);
    assert!((strip.matrix() - want).norm() < 1e-14);

    let cyl = library::cylinder(4).floquet_matrix(&[theta]).unwrap();
    let mut want = DMatrix::<f64>::identity(4, 4) * ct;
    for i in 0..4 {
        want[(i, (i + 1) % 4)] = 1.0;
        want[((i + 1) % 4, i)] = 1.0;
    }
    assert!((cyl.matrix() - want.map(c)).norm() < 1e-14);
}

#[test]
fn strip_bands_and_constant_projectors() {
    let grid = band_grid(&library::strip(3), 8, None).unwrap();
    let vectors = [
        [1.0 / 2.0, SQRT_2 / 2.0, 1.0 / 2.0],
        [-1.0 / SQRT_2, 0.0, 1.0 / SQRT_2],
        [1.0 / 2.0, -SQRT_2 / 2.0, 1.0 / 2.0],
    ];
    let reference: Vec<DMatrix<Complex64>> = vectors
        .iter()
        .map(|v| {
            let col = nalgebra::DVector::from_iterator(3, v.iter().map(|&x| c(x)));
            &col * col.adjoint()
        })
        .collect();
    for point in grid.points() {
        let ct = 2.0 * (2.0 * PI * point.index[0] as f64 / 8.0).cos();
        assert_close(&point.eigenvalues, &[ct - SQRT_2, ct, ct + SQRT_2], 1e-13);
        let levels = point.decomposition.levels();
        assert_eq!(levels.len(), 3);
        // ascending energies: ct - √2, ct, ct + √2
        for (level, want) in levels.iter().zip([&reference[2], &reference[1], &reference[0]]) {
            assert!((level.projector() - want).norm() < 1e-12);
        }
    }
    assert!(grid.flat_bands().is_empty());
}

#[test]
fn cylinder_middle_bands_merge() {
    let grid = band_grid(&library::cylinder(4), 6, None).unwrap();
    for point in grid.points() {
        let ranks: Vec<usize> = point.decomposition.levels().iter().map(|l| l.rank()).collect();
        assert_eq!(ranks, vec![1, 2, 1]);
    }
}

#[test]
fn example_weights() {
    let strip = band_grid(&library::strip(3), 8, None).unwrap();
    assert_close(&strip.point_mass_weights(0).unwrap(), &[3.0 / 8.0, 1.0 / 4.0, 3.0 / 8.0], 1e-12);
    assert_close(&strip.point_mass_weights(1).unwrap(), &[1.0 / 4.0, 1.0 / 2.0, 1.0 / 4.0], 1e-12);
    assert_close(&strip.point_mass_weights(2).unwrap(), &[3.0 / 8.0, 1.0 / 4.0, 3.0 / 8.0], 1e-12);
    let cyl = band_grid(&library::cylinder(4), 8, None).unwrap();
    assert_close(&cyl.point_mass_weights(0).unwrap(), &[3.0 / 8.0, 1.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0], 1e-12);
    assert_close(&cyl.point_mass_weights(1).unwrap(), &[1.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0, 3.0 / 8.0], 1e-12);
    for graph in [library::ladder(), library::honeycomb()] {
        let grid = band_grid(&graph, 8, None).unwrap();
        for p in 0..2 {
            assert_close(&grid.point_mass_weights(p).unwrap(), &[0.5, 0.5], 1e-12);
        }
    }
    assert!(strip.point_mass_weights(3).is_err());
}

#[test]
fn cell_uniform_states() {
    let graph = library::strip(3);
    let grid = band_grid(&graph, 8, None).unwrap();
    let avgs = [0.3, -1.1, 2.5];
    let psi = graph.cell_uniform_state(&[5], 8).unwrap();
    let got = grid.limit_average_general(&psi, &avgs).unwrap();
    assert!((got - (avgs[0] + 2.0 * avgs[1] + avgs[2]) / 4.0).abs() < 1e-12);
    // same as a point mass in the middle
    let middle = grid.limit_average_point_mass(1, &avgs).unwrap();
    assert!((got - middle).abs() < 1e-12);

    let graph = library::cylinder(4);
    let grid = band_grid(&graph, 8, None).unwrap();
    let avgs = [0.3, -1.1, 2.5, 0.7];
    let psi = graph.cell_uniform_state(&[0], 8).unwrap();
    let got = grid.limit_average_general(&psi, &avgs).unwrap();
    assert!((got - avgs.iter().sum::<f64>() / 4.0).abs() < 1e-12);
}

#[test]
fn transform_of_point_masses_and_constants() {
    let graph = library::honeycomb();
    let side = 5;
    let psi = graph.point_mass(&[2, 3], 1, side).unwrap();
    let hat = floquet_transform(side, 2, 2, &psi).unwrap();
    for r in 0..side * side {
        let (r1, r2) = (r / side, r % side);
        let want = Complex64::from_polar(1.0 / side as f64, -2.0 * PI * (r1 * 2 + r2 * 3) as f64 / side as f64);
        assert!((hat[r * 2 + 1] - want).norm() < 1e-14);
        assert!(hat[r * 2].norm() < 1e-14);
    }
    let constant = vec![c(1.0 / (50f64).sqrt()); 50];
    let hat = floquet_transform(side, 2, 2, &constant).unwrap();
    assert!(hat[2..].iter().all(|z| z.norm() < 1e-14));
    assert!((hat[0] - c(1.0 / SQRT_2)).norm() < 1e-14);
    assert!(floquet_transform(side, 2, 2, &constant[1..]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn floquet_matrix_is_hermitian_and_even(graph in graph_strategy(), t in prop::collection::vec(0.0f64..1.0, 2)) {
        let theta = &t[..graph.dim()];
        let neg: Vec<f64> = theta.iter().map(|x| -x).collect();
        let h = graph.floquet_matrix(theta).unwrap();
        let hn = graph.floquet_matrix(&neg).unwrap();
        prop_assert!((h.matrix().adjoint() - h.matrix()).norm() < 1e-12);
        prop_assert!((hn.matrix() - h.matrix().conjugate()).norm() < 1e-12);
    }

    #[test]
    fn floquet_transform_is_unitary(side in 2usize..9, vertices in 1usize..4, seed in 0u64..1000) {
        let mut rng = common::rng(seed);
        let psi: Vec<Complex64> = (0..side * side * vertices)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let hat = floquet_transform(side, 2, vertices, &psi).unwrap();
        let n0: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let n1: f64 = hat.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((n0 - n1).abs() < 1e-10 * n0);
    }

    #[test]
    fn weights_normalize_and_average_out(graph in graph_strategy()) {
        let side = if graph.dim() == 1 { 8 } else { 4 };
        let grid = band_grid(&graph, side, None).unwrap();
        let nu = graph.vertices();
        let mut democratic = vec![0.0; nu];
        for p in 0..nu {
            let w = grid.point_mass_weights(p).unwrap();
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (acc, x) in democratic.iter_mut().zip(&w) {
                *acc += x / nu as f64;
            }
        }
        for x in democratic {
            prop_assert!((x - 1.0 / nu as f64).abs() < 1e-12);
        }
        // a locally constant observable keeps its common average
        let avgs = vec![0.625; nu];
        prop_assert!((grid.limit_average_point_mass(0, &avgs).unwrap() - 0.625).abs() < 1e-12);
    }

    #[test]
    fn projectors_complete_at_every_point(graph in graph_strategy()) {
        let grid = band_grid(&graph, 5, None).unwrap();
        let nu = graph.vertices();
        for point in grid.points() {
            let mut sum = DMatrix::<Complex64>::zeros(nu, nu);
            for level in point.decomposition.levels() {
                sum += level.projector();
            }
            prop_assert!((sum - DMatrix::<Complex64>::identity(nu, nu)).norm() < 1e-10);
        }
    }
}

#[test]
fn crosscheck_against_dense_operator() {
    let graph = library::strip(3);
    let side = 8;
    let psi = graph.point_mass(&[0], 0, side).unwrap();
    let mut rng = common::rng(3);
    let a: Vec<f64> = (0..side * 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let check = numeric_crosscheck(&graph, side, &psi, &a).unwrap();
    assert!(check.discrepancy <= 1e-9, "{check:?}");
    // observable with no variation along the cells: no m ≠ 0 residue
    let local: Vec<f64> = (0..side * 3).map(|s| [0.2, 0.9, -0.4][s % 3]).collect();
    let check = numeric_crosscheck(&graph, side, &psi, &local).unwrap();
    assert!(check.residue.abs() < 1e-12 && check.discrepancy < 1e-9);
    let avgs = cell_averages(side, 1, 3, &local).unwrap();
    assert!((check.closed_form - (3.0 * 0.2 + 2.0 * 0.9 + 3.0 * -0.4) / 8.0).abs() < 1e-12, "{avgs:?}");

    let ones = vec![1.0; side * 3];
    let check = numeric_crosscheck(&graph, side, &psi, &ones).unwrap();
    assert!((check.closed_form - 1.0).abs() < 1e-12 && (check.numeric - 1.0).abs() < 1e-12);
}

#[test]
fn crosscheck_on_every_shipped_graph() {
    for graph in library::all() {
        let side: usize = if graph.dim() == 1 { 8 } else { 4 };
        let cells = side.pow(graph.dim() as u32);
        let mut rng = common::rng(11);
        let a: Vec<f64> = (0..cells * graph.vertices()).map(|_| rng.gen_range(0.0..1.0)).collect();
        let psi = graph.point_mass(&vec![1; graph.dim()], 0, side).unwrap();
        let check = numeric_crosscheck(&graph, side, &psi, &a).unwrap();
        assert!(check.discrepancy <= 1e-9, "{}: {check:?}", graph.name());
    }
}

#[test]
fn one_dimensional_lattice_agrees_with_lattice_module() {
    let side = 8;
    let graph = library::zd(1).unwrap();
    let torus = LatticeTorus::new(1, side).unwrap();
    let samples = [0.1, 0.9, -0.3, 0.4, 0.0, 1.2, -0.7, 0.5];
    let obs = LatticeObservable::from_real_samples(torus, &samples).unwrap();
    for v in 0..side {
        let psi = graph.point_mass(&[v], 0, side).unwrap();
        let full = band_grid(&graph, side, None).unwrap().full_limit(&psi, &samples).unwrap();
        let lattice = exact_time_average_limit(&torus, &[v], &obs).unwrap();
        assert!((full - lattice).norm() < 1e-12);
    }
}

#[test]
fn floquet_condition_ratios() {
    for side in [4, 7, 8, 16, 33] {
        let grid = band_grid(&library::zd(1).unwrap(), side, None).unwrap();
        let ratio = grid.floquet_condition_ratio();
        assert!(ratio <= 2.0 / side as f64 + 1e-15, "N={side}: {ratio}");
        // brute force over the lattice resonance sets
        let torus = LatticeTorus::new(1, side).unwrap();
        let lam = torus.eigenvalues();
        let most = (1..side)
            .map(|m| (0..side).filter(|&l| (lam[(l + m) % side] - lam[l]).abs() <= grid.tolerance()).count())
            .max()
            .unwrap();
        assert!((ratio - most as f64 / side as f64).abs() < 1e-15);
    }
    for side in [8, 16, 32] {
        let grid = band_grid(&library::flat_band(), side, None).unwrap();
        assert!(grid.floquet_condition_ratio() >= 0.2);
    }
    let ratios: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| band_grid(&library::honeycomb(), n, None).unwrap().floquet_condition_ratio())
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
}

#[test]
fn flat_band_detection_and_freezing() {
    let graph = library::flat_band();
    let grid = band_grid(&graph, 8, None).unwrap();
    let flat = grid.flat_bands();
    assert_eq!(flat.len(), 1);
    assert!(flat[0].energy.abs() < 1e-12);
    assert!(flat[0].ranks.iter().all(|&r| r >= 1));
    assert!(band_grid(&library::zd(2).unwrap(), 6, None).unwrap().flat_bands().is_empty());

    let side = 8;
    let dense = eigendecompose(&graph.dense_operator(side).unwrap(), None).unwrap();
    let mut psi = State::zeros(side * 2);
    psi[graph.site_index(&[3], 0, side)] = c(1.0 / SQRT_2);
    psi[graph.site_index(&[3], 1, side)] = c(-1.0 / SQRT_2);
    let start: Vec<f64> = psi.iter().map(|z| z.norm()).collect();
    for step in 0..=20 {
        let out = evolve(&dense, &psi, step as f64 * 0.5).unwrap();
        for (z, m) in out.iter().zip(&start) {
            assert!((z.norm() - m).abs() < 1e-12);
        }
    }
}

#[test]
fn json_round_trip_and_symmetric_closure() {
    for graph in library::all() {
        let back = PeriodicGraph::from_json_str(&graph.to_json()).unwrap();
        assert_eq!(back.edges(), graph.edges());
        assert_eq!(back.dim(), graph.dim());
        assert_eq!(back.vertices(), graph.vertices());
        assert_eq!(back.name(), graph.name());
    }
    let half = r#"{"name": "half", "d": 1, "nu": 1, "edges": [[0, 0, [1]]]}"#;
    let g = PeriodicGraph::from_json_str(half).unwrap();
    assert_eq!(g.edges().len(), 2);
    let strict = PeriodicGraph::new("half", 1, 1, vec![Edge::new(0, 0, vec![1])], vec![0.0]);
    assert!(matches!(strict, Err(Error::AsymmetricGraph(_))));
    let z3 = PeriodicGraph::from_json_str(r#"{"d": 3, "family": "zd"}"#).unwrap();
    assert_eq!(z3.edges().len(), 6);
    assert!(PeriodicGraph::from_json_str(r#"{"d": 1, "nu": 1, "edges": [[0, 2, [1]]]}"#).is_err());
    assert!(PeriodicGraph::from_json_str(r#"{"d": 1, "nu": 1, "edges": [[0, 0, [1, 0]]]}"#).is_err());
    assert!(PeriodicGraph::from_json_str("{not json").is_err());
}

#[test]
fn shipped_graph_files_match_the_library() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/graphs");
    for graph in library::all() {
        let file = if graph.name() == "z2" { "zd.json".to_string() } else { format!("{}.json", graph.name()) };
        let loaded = PeriodicGraph::from_path(dir.join(&file)).unwrap_or_else(|e| panic!("{file}: {e}"));
        let mut want = graph.edges().to_vec();
        let mut got = loaded.edges().to_vec();
        want.sort_by(|a, b| (a.from, a.to, &a.offset).cmp(&(b.from, b.to, &b.offset)));
        got.sort_by(|a, b| (a.from, a.to, &a.offset).cmp(&(b.from, b.to, &b.offset)));
        assert_eq!(got, want, "{file}");
        assert_eq!(loaded.vertices(), graph.vertices());
    }
}

#[test]
fn band_csv_layout() {
    let grid = band_grid(&library::cylinder(4), 3, None).unwrap();
    let mut buf = Vec::new();
    grid.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r1,level,energy,degeneracy");
    assert_eq!(lines.len(), 1 + 3 * 3);
    assert!(lines[1].starts_with("0,0,"));
    assert!(lines[2].ends_with(",2"));
}
