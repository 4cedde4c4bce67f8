use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;

use super::graph::PeriodicGraph;
use crate::error::{invalid, Error, Result};
use crate::fourier::{dft, flatten, unflatten};
use crate::spectral::{self, eigendecompose, SpectralDecomposition, State};

/// Largest number of quasimomenta `N^d` in a band grid.
pub const MAX_GRID: usize = 1 << 20;

/// Spectral data of `H(r/N)` at one grid point.
#[derive(Clone, Debug)]
pub struct BandPoint {
    pub index: Vec<usize>,
    /// Raw eigenvalues, ascending, with multiplicity.
    pub eigenvalues: Vec<f64>,
    pub decomposition: SpectralDecomposition,
}

#[derive(Clone, Debug)]
pub struct BandGrid {
    dim: usize,
    side: usize,
    vertices: usize,
    tolerance: f64,
    points: Vec<BandPoint>,
}

/// A band that stays at one energy over the whole grid, with the rank of
/// the spectral projector onto that energy at every grid point.
#[derive(Clone, Debug)]
pub struct FlatBand {
    pub energy: f64,
    pub ranks: Vec<usize>,
}

/// Result of comparing the closed-form Floquet average with a dense
/// diagonalization of `H_N`.
#[derive(Clone, Debug)]
pub struct CrossCheck {
    /// Closed form keeping only the `m = 0` Floquet term.
    pub closed_form: f64,
    /// Contribution of the resonant `m ≠ 0` terms.
    pub residue: f64,
    pub numeric: f64,
    /// `|numeric - (closed_form + residue)|`.
    pub discrepancy: f64,
}

/// Eigendecomposes `H(r/N)` at every `r ∈ {0..N-1}^d`.
///
/// All points share one grouping tolerance, by default `1e-9` times the
/// row-sum bound on the spectrum.
pub fn band_grid(graph: &PeriodicGraph, side: usize, tolerance: Option<f64>) -> Result<BandGrid> {
    if side == 0 {
        return Err(invalid("band grid needs N >= 1"));
    }
    let count = side.checked_pow(graph.dim() as u32).unwrap_or(usize::MAX);
    if count > MAX_GRID {
        return Err(Error::TooLarge { dim: count, max: MAX_GRID });
    }
    let tol = match tolerance {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(invalid(format!("tolerance must be positive, got {t}"))),
        None => 1e-9 * graph.spectral_bound().max(1.0),
    };
    let points = (0..count)
        .into_par_iter()
        .map(|flat| {
            let index = unflatten(flat, side, graph.dim());
            let theta: Vec<f64> = index.iter().map(|&r| r as f64 / side as f64).collect();
            let decomposition = eigendecompose(&graph.floquet_matrix(&theta)?, Some(tol))?;
            let eigenvalues = decomposition.eigenvalues().to_vec();
            Ok(BandPoint { index, eigenvalues, decomposition })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BandGrid { dim: graph.dim(), side, vertices: graph.vertices(), tolerance: tol, points })
}

/// `(Uψ)_r(v_i) = N^{-d/2} Σ_k e^{-2πi r·k/N} ψ(v_i + k)`, laid out as
/// `r * ν + i`.
pub fn floquet_transform(side: usize, dim: usize, vertices: usize, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    let cells = side.pow(dim as u32);
    if psi.len() != cells * vertices {
        return Err(invalid(format!("state has length {}, expected {}", psi.len(), cells * vertices)));
    }
    let scale = 1.0 / (cells as f64).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    let mut line = vec![Complex64::new(0.0, 0.0); cells];
    for i in 0..vertices {
        for (k, slot) in line.iter_mut().enumerate() {
            *slot = psi[k * vertices + i];
        }
        dft(&mut line, side, dim, FftDirection::Forward);
        for (r, value) in line.iter().enumerate() {
            out[r * vertices + i] = value * scale;
        }
    }
    Ok(out)
}

/// `⟨a_q⟩ = N^{-d} Σ_k a(v_q + k)` for every vertex `q` of the cell.
pub fn cell_averages(side: usize, dim: usize, vertices: usize, a: &[f64]) -> Result<Vec<f64>> {
    let cells = side.pow(dim as u32);
    if a.len() != cells * vertices {
        return Err(invalid(format!("observable has length {}, expected {}", a.len(), cells * vertices)));
    }
    let mut avg = vec![0.0; vertices];
    for (s, x) in a.iter().enumerate() {
        avg[s % vertices] += x;
    }
    avg.iter_mut().for_each(|x| *x /= cells as f64);
    Ok(avg)
}

impl BandGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn points(&self) -> &[BandPoint] {
        &self.points
    }

    fn shifted(&self, r: usize, m: usize) -> usize {
        let a = unflatten(r, self.side, self.dim);
        let b = unflatten(m, self.side, self.dim);
        let sum: Vec<usize> = a.iter().zip(&b).map(|(x, y)| (x + y) % self.side).collect();
        flatten(&sum, self.side)
    }

    fn check_cell_vector(&self, what: &str, len: usize) -> Result<()> {
        if len != self.vertices {
            return Err(invalid(format!("{what} has length {len}, cell has {} vertices", self.vertices)));
        }
        Ok(())
    }

    /// `sup_{m≠0} #{(r, s, w) : |E_s((r+m)/N) - E_w(r/N)| ≤ tol} / N^d`.
    pub fn floquet_condition_ratio(&self) -> f64 {
        let count = self.points.len();
        let tol = self.tolerance;
        let per_shift: Vec<usize> = (1..count)
            .into_par_iter()
            .map(|m| {
                (0..count)
                    .map(|r| {
                        let here = &self.points[r].eigenvalues;
                        let there = &self.points[self.shifted(r, m)].eigenvalues;
                        there
                            .iter()
                            .map(|es| here.iter().filter(|ew| (es - *ew).abs() <= tol).count())
                            .sum::<usize>()
                    })
                    .sum()
            })
            .collect();
        per_shift.into_iter().max().unwrap_or(0) as f64 / count as f64
    }

    /// Energies present at every grid point.
    pub fn flat_bands(&self) -> Vec<FlatBand> {
        let tol = self.tolerance;
        let Some(first) = self.points.first() else {
            return Vec::new();
        };
        first
            .decomposition
            .levels()
            .iter()
            .filter_map(|level| {
                let energy = level.energy();
                let ranks: Vec<usize> = self
                    .points
                    .iter()
                    .map(|p| {
                        p.decomposition
                            .levels()
                            .iter()
                            .filter(|l| (l.energy() - energy).abs() <= tol)
                            .map(|l| l.rank())
                            .sum()
                    })
                    .collect();
                ranks.iter().all(|&r| r > 0).then_some(FlatBand { energy, ranks })
            })
            .collect()
    }

    /// `W_q = N^{-d} Σ_r Σ_s |P_s(r)[q][p]|²`, the share of the long-time
    /// mass from `δ_{v_p}` that sits on the orbit of `v_q`.
    pub fn point_mass_weights(&self, p: usize) -> Result<Vec<f64>> {
        if p >= self.vertices {
            return Err(invalid(format!("vertex {p} is outside the cell of {} vertices", self.vertices)));
        }
        let mut weights = vec![0.0; self.vertices];
        for point in &self.points {
            for level in point.decomposition.levels() {
                for (q, w) in weights.iter_mut().enumerate() {
                    *w += level.projector_entry(q, p).norm_sqr();
                }
            }
        }
        let n = self.points.len() as f64;
        weights.iter_mut().for_each(|w| *w /= n);
        Ok(weights)
    }

    /// `⟨a⟩_p = Σ_q ⟨a_q⟩ W_q`.
    pub fn limit_average_point_mass(&self, p: usize, cell_averages: &[f64]) -> Result<f64> {
        self.check_cell_vector("cell averages", cell_averages.len())?;
        Ok(self.point_mass_weights(p)?.iter().zip(cell_averages).map(|(w, a)| w * a).sum())
    }

    fn transformed(&self, psi: &[Complex64]) -> Result<Vec<State>> {
        let hat = floquet_transform(self.side, self.dim, self.vertices, psi)?;
        Ok(hat.chunks(self.vertices).map(State::from_column_slice).collect())
    }

    /// `Σ_r Σ_q ⟨a_q⟩ Σ_s |[P_s(r)(Uψ)_r](q)|²`, the long-time average of an
    /// observable whose only contribution comes from its cell averages.
    pub fn limit_average_general(&self, psi: &[Complex64], cell_averages: &[f64]) -> Result<f64> {
        self.check_cell_vector("cell averages", cell_averages.len())?;
        let hat = self.transformed(psi)?;
        let mut total = 0.0;
        for (point, phi) in self.points.iter().zip(&hat) {
            for comp in point.decomposition.components(phi) {
                total += comp.iter().zip(cell_averages).map(|(z, a)| a * z.norm_sqr()).sum::<f64>();
            }
        }
        Ok(total)
    }

    /// Exact long-time average of a full observable on `Γ_N`, including the
    /// resonances between different quasimomenta:
    ///
    /// `N^{-d} Σ_i Σ_{r,r'} â_i(r'-r) Σ_{E_{s'}(r') = E_s(r)} conj(φ_{r',s'}(i)) φ_{r,s}(i)`
    ///
    /// where `φ_{r,s} = P_s(r)(Uψ)_r` and `â_i` is the DFT of `a` along the
    /// orbit of `v_i`.
    pub fn full_limit(&self, psi: &[Complex64], a: &[f64]) -> Result<Complex64> {
        let cells = self.points.len();
        if a.len() != cells * self.vertices {
            return Err(invalid(format!("observable has length {}, expected {}", a.len(), cells * self.vertices)));
        }
        let hat = self.transformed(psi)?;
        let comps: Vec<Vec<(f64, State)>> = self
            .points
            .iter()
            .zip(&hat)
            .map(|(p, phi)| p.decomposition.levels().iter().map(|l| (l.energy(), l.project(phi))).collect())
            .collect();
        let mut a_hat: Vec<Vec<Complex64>> = Vec::with_capacity(self.vertices);
        for i in 0..self.vertices {
            let mut line: Vec<Complex64> = (0..cells).map(|k| Complex64::new(a[k * self.vertices + i], 0.0)).collect();
            dft(&mut line, self.side, self.dim, FftDirection::Forward);
            a_hat.push(line);
        }
        let tol = self.tolerance;
        let terms: Vec<Complex64> = (0..cells)
            .into_par_iter()
            .map(|r| {
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..cells {
                    let rp = self.shifted(r, m);
                    for (e, x) in &comps[r] {
                        for (ep, y) in &comps[rp] {
                            if (e - ep).abs() > tol {
                                continue;
                            }
                            for i in 0..self.vertices {
                                acc += a_hat[i][m] * y[i].conj() * x[i];
                            }
                        }
                    }
                }
                acc
            })
            .collect();
        Ok(terms.iter().sum::<Complex64>() / cells as f64)
    }

    /// CSV with columns `r1..rd, level, energy, degeneracy`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let head: Vec<String> = (1..=self.dim).map(|i| format!("r{i}")).collect();
        writeln!(out, "{},level,energy,degeneracy", head.join(","))?;
        for p in &self.points {
            let idx: Vec<String> = p.index.iter().map(|r| r.to_string()).collect();
            for (s, level) in p.decomposition.levels().iter().enumerate() {
                writeln!(out, "{},{s},{:.16e},{}", idx.join(","), level.energy(), level.rank())?;
            }
        }
        Ok(())
    }
}

/// Builds the dense operator on `Γ_N`, diagonalizes it, and compares the
/// long-time average of `a` from `ψ` with the Floquet closed form.
pub fn numeric_crosscheck(graph: &PeriodicGraph, side: usize, psi: &[Complex64], a: &[f64]) -> Result<CrossCheck> {
    let grid = band_grid(graph, side, None)?;
    let averages = cell_averages(side, graph.dim(), graph.vertices(), a)?;
    let closed_form = grid.limit_average_general(psi, &averages)?;
    let full = grid.full_limit(psi, a)?.re;
    let dense = eigendecompose(&graph.dense_operator(side)?, Some(grid.tolerance()))?;
    let state = State::from_column_slice(psi);
    let observable: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let numeric = spectral::limit_expectation(&dense, &state, &state, &observable)?.re;
    Ok(CrossCheck { closed_form, residue: full - closed_form, numeric, discrepancy: (numeric - full).abs() })
}
