//! Dense Hermitian operators and their spectral resolution.
//!
//! States are complex column vectors and observables are multiplication
//! operators, given as one complex value per site.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::kernel;

pub type State = DVector<Complex64>;

/// Largest dimension accepted by [`eigendecompose`].
pub const MAX_DIM: usize = 4096;

/// Relative tolerance for the Hermitian check.
const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct HermitianOperator {
    matrix: DMatrix<Complex64>,
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(invalid(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 {
            return Err(invalid("operator must have positive dimension"));
        }
        if matrix.nrows() > MAX_DIM {
            return Err(Error::TooLarge { dim: matrix.nrows(), max: MAX_DIM });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("operator has non-finite entries"));
        }
        let scale = matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let n = matrix.nrows();
        let mut deviation = 0.0f64;
        for i in 0..n {
            for j in i..n {
                deviation = deviation.max((matrix[(i, j)] - matrix[(j, i)].conj()).norm());
            }
        }
        let tolerance = HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE);
        if deviation > tolerance {
            return Err(Error::NotHermitian { deviation, tolerance });
        }
        Ok(Self { matrix })
    }

    pub fn from_real_symmetric(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, psi: &State) -> State {
        &self.matrix * psi
    }
}

/// One eigenvalue cluster. The projector is kept in factored form
/// `V V^*` with `V` holding an orthonormal basis of the eigenspace.
#[derive(Clone, Debug)]
pub struct Level {
    energy: f64,
    basis: DMatrix<Complex64>,
}

impl Level {
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    pub fn projector(&self) -> DMatrix<Complex64> {
        &self.basis * self.basis.adjoint()
    }

    /// Entry `P[row, col]` without forming the matrix.
    pub fn projector_entry(&self, row: usize, col: usize) -> Complex64 {
        self.basis
            .row(row)
            .iter()
            .zip(self.basis.row(col).iter())
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn project(&self, psi: &State) -> State {
        &self.basis * (self.basis.adjoint() * psi)
    }
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    dim: usize,
    levels: Vec<Level>,
    eigenvalues: Vec<f64>,
    grouping_tolerance: f64,
}

/// Default grouping tolerance: `1e-9` times the spectral radius, floored at
/// `1e-9` so that the zero operator still groups.
pub fn default_tolerance(eigenvalues: &[f64]) -> f64 {
    let radius = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    1e-9 * radius.max(1.0)
}

/// Eigenvalues ascending and orthonormal eigenvectors of a Hermitian
/// matrix, checked by `‖MV - VΛ‖ ≤ 1e-10 · max(‖M‖, 1)`.
pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = m.nrows();
    let mat = faer::Mat::<Complex64>::from_fn(n, n, |i, j| m[(i, j)]);
    let eig = mat
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
    let values: Vec<f64> = (0..n).map(|k| eig.S()[k].re).collect();
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("eigensolver returned non-finite eigenvalues".into()));
    }
    let u = eig.U();
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    let lambda = DMatrix::from_diagonal(&DVector::from_iterator(n, values.iter().map(|&x| Complex64::new(x, 0.0))));
    let residual = (m * &vectors - &vectors * lambda).norm();
    if residual > 1e-10 * m.norm().max(1.0) {
        return Err(Error::Numerical(format!("eigensolver residual {residual:e} is too large")));
    }
    Ok((values, vectors))
}

/// Eigendecomposition with eigenvalues grouped into levels.
///
/// Sorted eigenvalues closer than `tolerance` to their predecessor join the
/// same level. `None` selects [`default_tolerance`].
pub fn eigendecompose(
    op: &HermitianOperator,
    tolerance: Option<f64>,
) -> Result<SpectralDecomposition> {
    if let Some(tol) = tolerance {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(invalid(format!("grouping tolerance must be positive, got {tol}")));
        }
    }
    let n = op.dim();
    let (values, vectors) = hermitian_eigen(&op.matrix)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let tol = tolerance.unwrap_or_else(|| default_tolerance(&sorted));

    let mut levels = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && sorted[end] - sorted[end - 1] <= tol {
            end += 1;
        }
        let cols: Vec<usize> = order[start..end].to_vec();
        let basis = vectors.select_columns(cols.iter());
        let energy = sorted[start..end].iter().sum::<f64>() / (end - start) as f64;
        levels.push(Level { energy, basis });
        start = end;
    }
    Ok(SpectralDecomposition { dim: n, levels, eigenvalues: sorted, grouping_tolerance: tol })
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// All eigenvalues in ascending order, with multiplicity.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn grouping_tolerance(&self) -> f64 {
        self.grouping_tolerance
    }

    /// Smallest distance between distinct levels.
    pub fn min_gap(&self) -> Option<f64> {
        self.levels.windows(2).map(|w| w[1].energy - w[0].energy).reduce(f64::min)
    }

    /// `P_k ψ` for every level.
    pub fn components(&self, psi: &State) -> Vec<State> {
        self.levels.iter().map(|l| l.project(psi)).collect()
    }

    fn check_state(&self, psi: &State) -> Result<()> {
        if psi.len() != self.dim {
            return Err(invalid(format!(
                "state has length {}, operator has dimension {}",
                psi.len(),
                self.dim
            )));
        }
        Ok(())
    }

    fn check_observable(&self, a: &[Complex64]) -> Result<()> {
        if a.len() != self.dim {
            return Err(invalid(format!(
                "observable has length {}, operator has dimension {}",
                a.len(),
                self.dim
            )));
        }
        Ok(())
    }
}

/// `e^{-itH} ψ`.
pub fn evolve(decomp: &SpectralDecomposition, psi: &State, t: f64) -> Result<State> {
    decomp.check_state(psi)?;
    let mut out = State::zeros(decomp.dim);
    for level in &decomp.levels {
        out += level.project(psi) * Complex64::from_polar(1.0, -t * level.energy);
    }
    Ok(out)
}

/// `x ↦ Σ_k |P_k ψ(x)|²`, the `T → ∞` limit of the averaged density.
pub fn infinite_time_average_density(
    decomp: &SpectralDecomposition,
    psi: &State,
) -> Result<Vec<f64>> {
    decomp.check_state(psi)?;
    let mut density = vec![0.0; decomp.dim];
    for comp in decomp.components(psi) {
        for (d, z) in density.iter_mut().zip(comp.iter()) {
            *d += z.norm_sqr();
        }
    }
    Ok(density)
}

fn weighted_inner(u: &State, a: &[Complex64], v: &State) -> Complex64 {
    u.iter().zip(a).zip(v.iter()).map(|((x, w), y)| x.conj() * w * y).sum()
}

/// `lim (1/T)∫_0^T ⟨e^{-itH}φ, a e^{-itH}ψ⟩ dt = Σ_k ⟨P_k φ, a P_k ψ⟩`.
pub fn limit_expectation(
    decomp: &SpectralDecomposition,
    phi: &State,
    psi: &State,
    a: &[Complex64],
) -> Result<Complex64> {
    decomp.check_state(phi)?;
    decomp.check_state(psi)?;
    decomp.check_observable(a)?;
    Ok(decomp
        .levels
        .iter()
        .map(|l| weighted_inner(&l.project(phi), a, &l.project(psi)))
        .sum())
}

/// Average of `⟨ψ(t), a ψ(t)⟩` over `t ∈ [start, end]`, evaluated through
/// the closed-form kernel on every pair of levels.
pub fn windowed_expectation(
    decomp: &SpectralDecomposition,
    psi: &State,
    a: &[Complex64],
    start: f64,
    end: f64,
) -> Result<Complex64> {
    decomp.check_state(psi)?;
    decomp.check_observable(a)?;
    if !(end > start) {
        return Err(invalid(format!("empty time window [{start}, {end}]")));
    }
    let comps = decomp.components(psi);
    let weighted: Vec<State> = comps
        .iter()
        .map(|c| State::from_iterator(c.len(), c.iter().zip(a).map(|(z, w)| z * w)))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (k, lk) in decomp.levels.iter().enumerate() {
        for (j, lj) in decomp.levels.iter().enumerate() {
            let inner = comps[k].dotc(&weighted[j]);
            total += kernel::window(start, end, lk.energy - lj.energy) * inner;
        }
    }
    Ok(total)
}

/// `(1/T) ∫_0^T ⟨ψ(t), a ψ(t)⟩ dt`.
pub fn time_averaged_expectation(
    decomp: &SpectralDecomposition,
    psi: &State,
    a: &[Complex64],
    horizon: f64,
) -> Result<Complex64> {
    if !(horizon > 0.0) {
        return Err(invalid(format!("horizon must be positive, got {horizon}")));
    }
    windowed_expectation(decomp, psi, a, 0.0, horizon)
}

/// `⟨φ, P_0 ψ⟩`, the limit of `(1/T)∫⟨φ, e^{itH}ψ⟩`. Zero when 0 is not an
/// eigenvalue.
pub fn zero_energy_projection_average(
    decomp: &SpectralDecomposition,
    phi: &State,
    psi: &State,
) -> Result<Complex64> {
    decomp.check_state(phi)?;
    decomp.check_state(psi)?;
    Ok(decomp
        .levels
        .iter()
        .find(|l| l.energy.abs() <= decomp.grouping_tolerance)
        .map(|l| phi.dotc(&l.project(psi)))
        .unwrap_or_default())
}

pub fn point_mass(dim: usize, site: usize) -> State {
    let mut psi = State::zeros(dim);
    psi[site] = Complex64::new(1.0, 0.0);
    psi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> HermitianOperator {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n - 1 {
            m[(i, i + 1)] = 1.0;
            m[(i + 1, i)] = 1.0;
        }
        HermitianOperator::from_real_symmetric(&m).unwrap()
    }

    #[test]
    fn two_site_hopping() {
        let h = HermitianOperator::from_real_symmetric(&DMatrix::from_row_slice(
            2,
            2,
            &[0.0, 1.0, 1.0, 0.0],
        ))
        .unwrap();
        let d = eigendecompose(&h, None).unwrap();
        let energies: Vec<f64> = d.levels().iter().map(|l| l.energy()).collect();
        assert!((energies[0] + 1.0).abs() < 1e-14 && (energies[1] - 1.0).abs() < 1e-14);
        let p = d.levels()[1].projector();
        for z in p.iter() {
            assert!((z - 0.5).norm() < 1e-14);
        }
        let dens = infinite_time_average_density(&d, &point_mass(2, 0)).unwrap();
        assert!((dens[0] - 0.5).abs() < 1e-14 && (dens[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[one * 2.0, one + i, -i * 0.5, one - i, -one, one * 0.3, i * 0.5, one * 0.3, one * 0.7],
        );
        let h = HermitianOperator::new(m.clone()).unwrap();
        let d = eigendecompose(&h, None).unwrap();
        let mut rebuilt = DMatrix::<Complex64>::zeros(3, 3);
        for l in d.levels() {
            rebuilt += l.projector() * Complex64::new(l.energy(), 0.0);
        }
        assert!((rebuilt - m).norm() < 1e-12);
    }

    #[test]
    fn degenerate_levels_are_grouped() {
        // cycle of length 4: eigenvalues 2, 0, 0, -2
        let mut m = DMatrix::<f64>::zeros(4, 4);
        for i in 0..4 {
            m[(i, (i + 1) % 4)] = 1.0;
            m[((i + 1) % 4, i)] = 1.0;
        }
        let d = eigendecompose(&HermitianOperator::from_real_symmetric(&m).unwrap(), None).unwrap();
        let ranks: Vec<usize> = d.levels().iter().map(|l| l.rank()).collect();
        assert_eq!(ranks, vec![1, 2, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(
            HermitianOperator::from_real_symmetric(&m),
            Err(Error::NotHermitian { .. })
        ));
        let rect = DMatrix::<Complex64>::zeros(2, 3);
        assert!(HermitianOperator::new(rect).is_err());
        let big = DMatrix::<Complex64>::zeros(MAX_DIM + 1, 1);
        assert!(HermitianOperator::new(big).is_err());
        let d = eigendecompose(&path(3), None).unwrap();
        assert!(evolve(&d, &State::zeros(4), 1.0).is_err());
        assert!(eigendecompose(&path(3), Some(0.0)).is_err());
    }

    #[test]
    fn evolution_is_unitary_and_reversible() {
        let d = eigendecompose(&path(6), None).unwrap();
        let psi = point_mass(6, 2);
        let out = evolve(&d, &psi, 3.7).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-13);
        let back = evolve(&d, &out, -3.7).unwrap();
        assert!((back - psi).norm() < 1e-13);
    }

    #[test]
    fn zero_energy_average_on_odd_path() {
        // path of length 3 has kernel (1, 0, -1)/√2
        let d = eigendecompose(&path(3), None).unwrap();
        let z = zero_energy_projection_average(&d, &point_mass(3, 0), &point_mass(3, 0)).unwrap();
        assert!((z - 0.5).norm() < 1e-14);
        let d2 = eigendecompose(&path(2), None).unwrap();
        let z2 = zero_energy_projection_average(&d2, &point_mass(2, 0), &point_mass(2, 0)).unwrap();
        assert_eq!(z2, Complex64::new(0.0, 0.0));
    }
}
