//! Periodic graphs and their Floquet decomposition.
//!
//! A periodic graph is described by one fundamental cell of `ν` vertices and
//! a list of directed edges `(i, j, o)`: vertex `i` of cell `k` is adjacent
//! to vertex `j` of cell `k + o`. The truncation `Γ_N` wraps cells modulo
//! `N`, and the Floquet transform block-diagonalizes its adjacency operator
//! into the `ν × ν` matrices `H(r/N)`.

mod bands;
mod graph;
pub mod library;

pub use bands::{
    band_grid, cell_averages, floquet_transform, numeric_crosscheck, BandGrid, BandPoint, CrossCheck,
    FlatBand,
};
pub use graph::{Edge, PeriodicGraph, MAX_OFFSET};
