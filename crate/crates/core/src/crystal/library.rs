//! Built-in periodic graphs.

use super::graph::{Edge, PeriodicGraph};
use crate::error::Result;

fn both_ways(edges: &mut Vec<Edge>, from: usize, to: usize, offset: Vec<i64>) {
    let e = Edge::new(from, to, offset);
    edges.push(e.reversed());
    edges.push(e);
}

fn unit(dim: usize, axis: usize) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[axis] = 1;
    v
}

fn build(name: &str, dim: usize, vertices: usize, edges: Vec<Edge>) -> PeriodicGraph {
    PeriodicGraph::new(name, dim, vertices, edges, vec![0.0; vertices]).expect("built-in graph is valid")
}

/// `Z^d` with nearest-neighbour edges.
pub fn zd(dim: usize) -> Result<PeriodicGraph> {
    let mut edges = Vec::new();
    for axis in 0..dim {
        both_ways(&mut edges, 0, 0, unit(dim, axis));
    }
    PeriodicGraph::new(format!("z{dim}"), dim, 1, edges, vec![0.0])
}

/// Strip of `width` rows: a path across the cell, copied along `Z`.
pub fn strip(width: usize) -> PeriodicGraph {
    let mut edges = Vec::new();
    for i in 0..width {
        both_ways(&mut edges, i, i, vec![1]);
    }
    for i in 1..width {
        both_ways(&mut edges, i - 1, i, vec![0]);
    }
    build(&format!("strip{width}"), 1, width, edges)
}

/// Two rows joined by rungs.
pub fn ladder() -> PeriodicGraph {
    build("ladder", 1, 2, strip(2).edges().to_vec())
}

/// Cycle of `circumference` vertices across the cell, copied along `Z`.
pub fn cylinder(circumference: usize) -> PeriodicGraph {
    let mut edges = Vec::new();
    for i in 0..circumference {
        both_ways(&mut edges, i, i, vec![1]);
        both_ways(&mut edges, i, (i + 1) % circumference, vec![0]);
    }
    build(&format!("cylinder{circumference}"), 1, circumference, edges)
}

/// Honeycomb: two sublattices, each `A` site joined to three `B` sites.
pub fn honeycomb() -> PeriodicGraph {
    let mut edges = Vec::new();
    for offset in [vec![0, 0], vec![-1, 0], vec![0, -1]] {
        both_ways(&mut edges, 0, 1, offset);
    }
    build("honeycomb", 2, 2, edges)
}

/// Triangular lattice: six neighbours per site.
pub fn triangular() -> PeriodicGraph {
    let mut edges = Vec::new();
    for offset in [vec![1, 0], vec![0, 1], vec![1, -1]] {
        both_ways(&mut edges, 0, 0, offset);
    }
    build("triangular", 2, 1, edges)
}

/// Two rows with crossing diagonals and no rungs. The state `(1, -1)/√2` on
/// one cell is a compactly supported eigenvector with eigenvalue 0.
pub fn flat_band() -> PeriodicGraph {
    let mut edges = Vec::new();
    for (i, j) in [(0, 0), (1, 1), (0, 1), (1, 0)] {
        edges.push(Edge::new(i, j, vec![1]));
        edges.push(Edge::new(i, j, vec![-1]));
    }
    build("flatband", 1, 2, edges)
}

/// Every built-in graph under the name used for its shipped JSON file.
pub fn all() -> Vec<PeriodicGraph> {
    vec![
        zd(2).expect("z2 is valid"),
        ladder(),
        strip(3),
        cylinder(4),
        honeycomb(),
        triangular(),
        flat_band(),
    ]
}
