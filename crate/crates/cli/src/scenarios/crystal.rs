use ergowalk::crystal::{band_grid, numeric_crosscheck, PeriodicGraph};
use ergowalk::spectral::{eigendecompose, evolve, State};
use ergowalk::Complex64;

use super::StepError;
use crate::config::{CellUniform, CrystalWeights, FlatBand};
use crate::report::{Check, Report, Table};

const CLOSED_FORM_TOL: f64 = 1e-12;
const DENSE_TOL: f64 = 1e-9;
const MODULUS_TOL: f64 = 1e-12;
const FLOQUET_FLOOR: f64 = 0.2;

/// `a(v_q + k) = q + 1` on every cell `k`.
fn cell_periodic(graph: &PeriodicGraph, side: usize) -> Vec<f64> {
    let nu = graph.vertices();
    (0..side.pow(graph.dim() as u32) * nu).map(|i| (i % nu + 1) as f64).collect()
}

pub fn weights(s: &CrystalWeights, tolerance: Option<f64>, report: &mut Report) -> Result<(), StepError> {
    let mut weights = Table::new("weights", &["graph", "vertex", "q", "weight", "expected", "error"]);
    let mut dense = Table::new("crosscheck", &["graph", "vertex", "expected", "numeric", "floquet", "discrepancy"]);
    let (mut worst, mut worst_dense, mut worst_floquet) = (0.0f64, 0.0f64, 0.0f64);
    for case in &s.cases {
        let g = &case.graph;
        let grid = band_grid(g, s.side, tolerance)?;
        let w = grid.point_mass_weights(case.vertex)?;
        for (q, (got, want)) in w.iter().zip(&case.expected).enumerate() {
            let error = (got - want).abs();
            worst = worst.max(error);
            weights.push(vec![g.name().into(), case.vertex.into(), q.into(), (*got).into(), (*want).into(), error.into()]);
        }
        let a = cell_periodic(g, s.side);
        let psi = g.point_mass(&vec![0; g.dim()], case.vertex, s.side)?;
        let check = numeric_crosscheck(g, s.side, &psi, &a)?;
        let expected: f64 = case.expected.iter().enumerate().map(|(q, w)| w * (q + 1) as f64).sum();
        let discrepancy = (check.numeric - expected).abs();
        worst_dense = worst_dense.max(discrepancy);
        worst_floquet = worst_floquet.max(check.discrepancy);
        dense.push(vec![
            g.name().into(),
            case.vertex.into(),
            expected.into(),
            check.numeric.into(),
            (check.closed_form + check.residue).into(),
            discrepancy.into(),
        ]);
    }
    report.tables.push(weights);
    report.tables.push(dense);
    report.check(Check::at_most("closed-form weights against the expected fractions", worst, CLOSED_FORM_TOL));
    report.check(Check::at_most("dense long-time average against the expected weights", worst_dense, DENSE_TOL));
    report.check(Check::at_most("dense long-time average against the Floquet closed form", worst_floquet, DENSE_TOL));
    Ok(())
}

pub fn cell_uniform(s: &CellUniform, tolerance: Option<f64>, report: &mut Report) -> Result<(), StepError> {
    let mut table = Table::new("cell_uniform", &["graph", "value", "expected", "error"]);
    let mut worst: f64 = 0.0;
    for case in &s.cases {
        let g = &case.graph;
        let grid = band_grid(g, s.side, tolerance)?;
        let psi = g.cell_uniform_state(&vec![0; g.dim()], s.side)?;
        let value = grid.limit_average_general(&psi, &case.averages)?;
        let error = (value - case.expected).abs();
        worst = worst.max(error);
        table.push(vec![g.name().into(), value.into(), case.expected.into(), error.into()]);
    }
    report.tables.push(table);
    report.check(Check::at_most("cell-uniform limits against the expected values", worst, CLOSED_FORM_TOL));
    Ok(())
}

pub fn flat_band(s: &FlatBand, tolerance: Option<f64>, report: &mut Report) -> Result<(), StepError> {
    let g = &s.graph;
    let side = s.evolution_side;
    let decomposition = eigendecompose(&g.dense_operator(side)?, tolerance)?;
    let norm = s.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut psi = State::zeros(side.pow(g.dim() as u32) * g.vertices());
    for (vertex, amp) in s.amplitudes.iter().enumerate() {
        psi[g.site_index(&s.cell, vertex, side)] = Complex64::new(amp / norm, 0.0);
    }
    let steps = (s.end / s.step + 1e-9).floor() as usize;
    let mut evolution = Table::new("evolution", &["t", "max_modulus_change"]);
    let mut worst: f64 = 0.0;
    for k in 0..=steps {
        let t = k as f64 * s.step;
        let out = evolve(&decomposition, &psi, t)?;
        let change = out.iter().zip(psi.iter()).map(|(z, w)| (z.norm() - w.norm()).abs()).fold(0.0, f64::max);
        worst = worst.max(change);
        evolution.push(vec![t.into(), change.into()]);
    }
    let mut floquet = Table::new("floquet", &["N", "ratio", "flat_bands", "flat_energies"]);
    let mut smallest = f64::INFINITY;
    let mut always_flat = true;
    for &n in &s.sizes {
        let grid = band_grid(g, n, tolerance)?;
        let ratio = grid.floquet_condition_ratio();
        let flat = grid.flat_bands();
        smallest = smallest.min(ratio);
        always_flat &= !flat.is_empty();
        let energies: Vec<String> = flat.iter().map(|b| format!("{:.16e}", b.energy)).collect();
        floquet.push(vec![n.into(), ratio.into(), flat.len().into(), energies.join(" ").into()]);
    }
    report.tables.push(evolution);
    report.tables.push(floquet);
    report.check(Check::at_most("largest change of the pointwise modulus", worst, MODULUS_TOL));
    report.check(Check::at_least("smallest Floquet-condition ratio", smallest, FLOQUET_FLOOR));
    report.check(Check::holds("a flat band is detected at every N", always_flat));
    Ok(())
}
