use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fourier::flatten;
use crate::spectral::{HermitianOperator, MAX_DIM};

/// Largest cell offset allowed on an edge, per coordinate.
pub const MAX_OFFSET: i64 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub offset: Vec<i64>,
}

impl Edge {
    pub fn new(from: usize, to: usize, offset: Vec<i64>) -> Self {
        Self { from, to, offset }
    }

    pub fn reversed(&self) -> Self {
        Self { from: self.to, to: self.from, offset: self.offset.iter().map(|o| -o).collect() }
    }
}

#[derive(Clone, Debug)]
pub struct PeriodicGraph {
    name: String,
    dim: usize,
    vertices: usize,
    edges: Vec<Edge>,
    potential: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nu: Option<usize>,
    /// `"zd"` generates the hypercubic lattice of dimension `d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<(usize, usize, Vec<i64>)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    potential: Option<Vec<f64>>,
}

fn multiset(edges: &[Edge]) -> HashMap<&Edge, i64> {
    let mut counts = HashMap::new();
    for e in edges {
        *counts.entry(e).or_insert(0) += 1;
    }
    counts
}

/// Edges whose reverse is missing (counted with multiplicity).
fn missing_reverses(edges: &[Edge]) -> Vec<Edge> {
    let counts = multiset(edges);
    let mut missing = Vec::new();
    let mut keys: Vec<&&Edge> = counts.keys().collect();
    keys.sort_by(|a, b| (a.from, a.to, &a.offset).cmp(&(b.from, b.to, &b.offset)));
    for e in keys {
        let rev = e.reversed();
        let have = counts.get(&rev).copied().unwrap_or(0);
        let need = counts[*e];
        for _ in have..need {
            missing.push(rev.clone());
        }
    }
    missing
}

impl PeriodicGraph {
    /// Validated graph. The edge list must already be symmetric.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        vertices: usize,
        edges: Vec<Edge>,
        potential: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("graph dimension must be at least 1"));
        }
        if vertices == 0 {
            return Err(invalid("fundamental cell must have at least one vertex"));
        }
        if potential.len() != vertices {
            return Err(invalid(format!(
                "potential has {} entries for {vertices} vertices",
                potential.len()
            )));
        }
        if potential.iter().any(|q| !q.is_finite()) {
            return Err(invalid("potential has non-finite entries"));
        }
        for (idx, e) in edges.iter().enumerate() {
            if e.from >= vertices || e.to >= vertices {
                return Err(invalid(format!("edge {idx} references a vertex outside 0..{vertices}")));
            }
            if e.offset.len() != dim {
                return Err(invalid(format!("edge {idx} has an offset of length {}, expected {dim}", e.offset.len())));
            }
            if e.offset.iter().any(|o| o.abs() > MAX_OFFSET) {
                return Err(invalid(format!("edge {idx} has an offset beyond ±{MAX_OFFSET}")));
            }
        }
        let missing = missing_reverses(&edges);
        if let Some(first) = missing.first() {
            return Err(Error::AsymmetricGraph(format!(
                "{} reverse edge(s) missing, first ({}, {}, {:?})",
                missing.len(),
                first.from,
                first.to,
                first.offset
            )));
        }
        Ok(Self { name: name.into(), dim, vertices, edges, potential })
    }

    /// Like [`PeriodicGraph::new`] but adds missing reverse edges, returning
    /// how many were added.
    pub fn with_symmetric_closure(
        name: impl Into<String>,
        dim: usize,
        vertices: usize,
        mut edges: Vec<Edge>,
        potential: Vec<f64>,
    ) -> Result<(Self, usize)> {
        let missing = missing_reverses(&edges);
        let added = missing.len();
        edges.extend(missing);
        Ok((Self::new(name, dim, vertices, edges, potential)?, added))
    }

    /// Parses the JSON graph format. Asymmetric edge lists are closed with a
    /// logged warning.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        let name = file.name.unwrap_or_else(|| "unnamed".into());
        if let Some(family) = &file.family {
            return match family.as_str() {
                "zd" => Ok(super::library::zd(file.d)?),
                other => Err(invalid(format!("unknown graph family '{other}'"))),
            };
        }
        let nu = file.nu.ok_or_else(|| invalid("graph file needs 'nu'"))?;
        let edges: Vec<Edge> = file
            .edges
            .ok_or_else(|| invalid("graph file needs 'edges'"))?
            .into_iter()
            .map(|(i, j, o)| Edge::new(i, j, o))
            .collect();
        let potential = file.potential.unwrap_or_else(|| vec![0.0; nu]);
        let (graph, added) = Self::with_symmetric_closure(name, file.d, nu, edges, potential)?;
        if added > 0 {
            log::warn!("graph '{}': added {added} missing reverse edge(s)", graph.name);
        }
        Ok(graph)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            name: Some(self.name.clone()),
            d: self.dim,
            nu: Some(self.vertices),
            family: None,
            edges: Some(self.edges.iter().map(|e| (e.from, e.to, e.offset.clone())).collect()),
            potential: Some(self.potential.clone()),
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices per fundamental cell.
    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Row-sum bound on the spectral radius of every Floquet matrix.
    pub fn spectral_bound(&self) -> f64 {
        let mut rows = vec![0.0; self.vertices];
        for e in &self.edges {
            rows[e.from] += 1.0;
        }
        rows.iter().zip(&self.potential).map(|(r, q)| r + q.abs()).fold(0.0, f64::max)
    }

    /// `H(θ)[i][j] = Q_i δ_ij + Σ_{edges (i,j,o)} e^{2πi θ·o}`.
    pub fn floquet_matrix(&self, theta: &[f64]) -> Result<HermitianOperator> {
        if theta.len() != self.dim {
            return Err(invalid(format!("quasimomentum has length {}, expected {}", theta.len(), self.dim)));
        }
        let nu = self.vertices;
        let mut h = DMatrix::<Complex64>::zeros(nu, nu);
        for (i, q) in self.potential.iter().enumerate() {
            h[(i, i)] += q;
        }
        for e in &self.edges {
            let dot: f64 = theta.iter().zip(&e.offset).map(|(t, &o)| t * o as f64).sum();
            h[(e.from, e.to)] += Complex64::from_polar(1.0, 2.0 * PI * dot);
        }
        HermitianOperator::new(h)
    }

    /// Index of vertex `vertex` of cell `cell` in `Γ_N`.
    pub fn site_index(&self, cell: &[usize], vertex: usize, side: usize) -> usize {
        flatten(cell, side) * self.vertices + vertex
    }

    /// `δ_{v_p}` placed in cell `cell` of `Γ_N`.
    pub fn point_mass(&self, cell: &[usize], vertex: usize, side: usize) -> Result<Vec<Complex64>> {
        self.check_cell(cell, side)?;
        if vertex >= self.vertices {
            return Err(invalid(format!("vertex {vertex} is outside the cell of {} vertices", self.vertices)));
        }
        let mut psi = vec![Complex64::new(0.0, 0.0); side.pow(self.dim as u32) * self.vertices];
        psi[self.site_index(cell, vertex, side)] = Complex64::new(1.0, 0.0);
        Ok(psi)
    }

    /// `ν^{-1/2}` on every vertex of one cell.
    pub fn cell_uniform_state(&self, cell: &[usize], side: usize) -> Result<Vec<Complex64>> {
        self.check_cell(cell, side)?;
        let mut psi = vec![Complex64::new(0.0, 0.0); side.pow(self.dim as u32) * self.vertices];
        let value = Complex64::new(1.0 / (self.vertices as f64).sqrt(), 0.0);
        for i in 0..self.vertices {
            psi[self.site_index(cell, i, side)] = value;
        }
        Ok(psi)
    }

    fn check_cell(&self, cell: &[usize], side: usize) -> Result<()> {
        if cell.len() != self.dim || cell.iter().any(|&c| c >= side) {
            return Err(invalid(format!("cell {cell:?} is not in L_N^{} for N = {side}", self.dim)));
        }
        let cells = side.checked_pow(self.dim as u32).unwrap_or(usize::MAX);
        if cells > super::bands::MAX_GRID {
            return Err(Error::TooLarge { dim: cells, max: super::bands::MAX_GRID });
        }
        Ok(())
    }

    /// Dense adjacency plus potential on the truncation `Γ_N`.
    pub fn dense_operator(&self, side: usize) -> Result<HermitianOperator> {
        if side == 0 {
            return Err(invalid("side length must be positive"));
        }
        let cells = side.checked_pow(self.dim as u32).unwrap_or(usize::MAX);
        let n = cells.saturating_mul(self.vertices);
        if n > MAX_DIM {
            return Err(Error::TooLarge { dim: n, max: MAX_DIM });
        }
        let mut m = DMatrix::<f64>::zeros(n, n);
        for c in 0..cells {
            let cell = crate::fourier::unflatten(c, side, self.dim);
            for (i, q) in self.potential.iter().enumerate() {
                let s = self.site_index(&cell, i, side);
                m[(s, s)] += q;
            }
            for e in &self.edges {
                let target: Vec<usize> = cell
                    .iter()
                    .zip(&e.offset)
                    .map(|(&k, &o)| (k as i64 + o).rem_euclid(side as i64) as usize)
                    .collect();
                m[(self.site_index(&cell, e.from, side), self.site_index(&target, e.to, side))] += 1.0;
            }
        }
        HermitianOperator::from_real_symmetric(&m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_constructor_rejects_missing_reverse() {
        let err = PeriodicGraph::new("x", 1, 1, vec![Edge::new(0, 0, vec![1])], vec![0.0]).unwrap_err();
        assert!(matches!(err, Error::AsymmetricGraph(_)));
    }

    #[test]
    fn json_closes_asymmetric_lists() {
        let g = PeriodicGraph::from_json_str(r#"{"d":1,"nu":1,"edges":[[0,0,[1]]]}"#).unwrap();
        assert_eq!(g.edges().len(), 2);
        let h = g.floquet_matrix(&[0.25]).unwrap();
        assert!(h.matrix()[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn rejects_malformed_specs() {
        assert!(PeriodicGraph::from_json_str(r#"{"d":1,"nu":1,"edges":[[0,1,[1]]]}"#).is_err());
        assert!(PeriodicGraph::from_json_str(r#"{"d":1,"nu":1,"edges":[[0,0,[9]]]}"#).is_err());
        assert!(PeriodicGraph::from_json_str(r#"{"d":2,"nu":1,"edges":[[0,0,[1]]]}"#).is_err());
        assert!(PeriodicGraph::from_json_str(r#"{"d":1,"nu":2,"edges":[],"potential":[1]}"#).is_err());
        assert!(PeriodicGraph::from_json_str(r#"{"d":1,"family":"cubic"}"#).is_err());
        assert!(PeriodicGraph::from_json_str("not json").is_err());
    }

    #[test]
    fn json_roundtrip() {
        let g = super::super::library::honeycomb();
        let back = PeriodicGraph::from_json_str(&g.to_json()).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.name(), g.name());
    }
}
