//! Quantum walk on the discrete torus `Λ_N = (Z/NZ)^d`.
//!
//! The adjacency operator is diagonal in the plane-wave basis
//! `e_k(n) = N^{-d/2} e^{2πi k·n/N}` with eigenvalue `Σ_i 2cos(2πk_i/N)`, so
//! evolution is a pair of FFTs and time averages reduce to counting resonant
//! pairs `λ_{ℓ+m} = λ_ℓ`.
//!
//! Observables are stored both as samples `a(n)` and as plain DFT
//! coefficients `c_m` with `a(n) = Σ_m c_m e^{2πi m·n/N}`. The orthonormal
//! coefficient is `a_m = N^{d/2} c_m`, so `a_m e_m(v) = c_m e^{2πi m·v/N}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;

use crate::error::{invalid, Error, Result};
use crate::fourier::{dft, flatten, unflatten};
use crate::kernel;
use crate::spectral::HermitianOperator;

/// Largest number of sites `N^d` accepted.
pub const MAX_SITES: usize = 1 << 22;

/// Two eigenvalues closer than this are treated as equal.
pub const RESONANCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeTorus {
    dim: usize,
    side: usize,
}

impl LatticeTorus {
    pub fn new(dim: usize, side: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("lattice dimension must be at least 1"));
        }
        if side < 2 {
            return Err(invalid(format!("side length must be at least 2, got {side}")));
        }
        let sites = (side as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if sites > MAX_SITES as u128 {
            return Err(Error::TooLarge { dim: sites.min(usize::MAX as u128) as usize, max: MAX_SITES });
        }
        Ok(Self { dim, side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn sites(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        flatten(coords, self.side)
    }

    pub fn coords(&self, index: usize) -> Vec<usize> {
        unflatten(index, self.side, self.dim)
    }

    fn cos_table(&self) -> Vec<f64> {
        (0..self.side).map(|k| 2.0 * (2.0 * PI * k as f64 / self.side as f64).cos()).collect()
    }

    pub fn eigenvalue(&self, k: &[usize]) -> f64 {
        let table = self.cos_table();
        k.iter().map(|&ki| table[ki % self.side]).sum()
    }

    /// Eigenvalues indexed like the sites.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let table = self.cos_table();
        (0..self.sites())
            .map(|i| self.coords(i).iter().map(|&k| table[k]).sum())
            .collect()
    }

    /// Smallest gap between distinct eigenvalues.
    pub fn min_gap(&self) -> f64 {
        let mut eig = self.eigenvalues();
        eig.sort_by(f64::total_cmp);
        eig.windows(2)
            .map(|w| w[1] - w[0])
            .filter(|&g| g > RESONANCE_TOL)
            .fold(f64::INFINITY, f64::min)
    }

    /// Dense adjacency matrix, for cross-checks on small tori.
    pub fn dense_adjacency(&self) -> Result<HermitianOperator> {
        let n = self.sites();
        let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let c = self.coords(i);
            for axis in 0..self.dim {
                for step in [1, self.side - 1] {
                    let mut nb = c.clone();
                    nb[axis] = (nb[axis] + step) % self.side;
                    m[(i, self.index(&nb))] += 1.0;
                }
            }
        }
        HermitianOperator::from_real_symmetric(&m)
    }

    fn check_site(&self, v: &[usize]) -> Result<()> {
        if v.len() != self.dim || v.iter().any(|&x| x >= self.side) {
            return Err(invalid(format!("site {v:?} is not in the {}-dimensional torus of side {}", self.dim, self.side)));
        }
        Ok(())
    }

    fn check_len(&self, what: &str, len: usize) -> Result<()> {
        if len != self.sites() {
            return Err(invalid(format!("{what} has length {len}, torus has {} sites", self.sites())));
        }
        Ok(())
    }

    fn reduce(&self, k: &[i64]) -> Vec<usize> {
        k.iter().map(|&x| x.rem_euclid(self.side as i64) as usize).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObservableSource {
    Samples,
    /// `a(n) = f(n/N)` for a function on the unit cube.
    ScaledFunction,
    /// Restriction to `[0, N-1]^d` of a summable function on `Z^d`.
    L1Restriction,
}

#[derive(Clone, Debug)]
pub struct LatticeObservable {
    torus: LatticeTorus,
    samples: Vec<Complex64>,
    coefficients: Vec<Complex64>,
    source: ObservableSource,
}

impl LatticeObservable {
    fn from_parts(torus: LatticeTorus, samples: Vec<Complex64>, source: ObservableSource) -> Result<Self> {
        torus.check_len("observable", samples.len())?;
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("observable has non-finite samples"));
        }
        let mut coefficients = samples.clone();
        dft(&mut coefficients, torus.side, torus.dim, FftDirection::Forward);
        let scale = 1.0 / torus.sites() as f64;
        coefficients.iter_mut().for_each(|c| *c *= scale);
        Ok(Self { torus, samples, coefficients, source })
    }

    pub fn from_samples(torus: LatticeTorus, samples: Vec<Complex64>) -> Result<Self> {
        Self::from_parts(torus, samples, ObservableSource::Samples)
    }

    pub fn from_real_samples(torus: LatticeTorus, samples: &[f64]) -> Result<Self> {
        Self::from_samples(torus, samples.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `a(n) = f(n/N)` sampled on the grid.
    pub fn sample_function(torus: LatticeTorus, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let n = torus.side as f64;
        let samples = (0..torus.sites())
            .map(|i| {
                let x: Vec<f64> = torus.coords(i).iter().map(|&c| c as f64 / n).collect();
                f(&x)
            })
            .collect();
        Self::from_parts(torus, samples, ObservableSource::ScaledFunction)
    }

    /// `a(n) = f(n/N)` for `f(x) = Σ_k f̂_k e^{2πi k·x}`. Frequencies alias
    /// modulo `N`.
    pub fn scaled_fourier(torus: LatticeTorus, fhat: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        let mut coefficients = vec![Complex64::new(0.0, 0.0); torus.sites()];
        for (k, value) in fhat {
            if k.len() != torus.dim {
                return Err(invalid(format!("frequency {k:?} has the wrong dimension")));
            }
            coefficients[torus.index(&torus.reduce(k))] += value;
        }
        let mut samples = coefficients.clone();
        dft(&mut samples, torus.side, torus.dim, FftDirection::Inverse);
        Self::from_parts(torus, samples, ObservableSource::ScaledFunction)
    }

    /// Restriction of `a: Z^d → C` to `[0, N-1]^d`; points outside are dropped.
    pub fn l1_restriction(torus: LatticeTorus, entries: &[(Vec<i64>, Complex64)]) -> Result<Self> {
        let mut samples = vec![Complex64::new(0.0, 0.0); torus.sites()];
        for (n, value) in entries {
            if n.len() != torus.dim {
                return Err(invalid(format!("point {n:?} has the wrong dimension")));
            }
            if n.iter().all(|&x| x >= 0 && (x as usize) < torus.side) {
                let c: Vec<usize> = n.iter().map(|&x| x as usize).collect();
                samples[torus.index(&c)] += value;
            }
        }
        Self::from_parts(torus, samples, ObservableSource::L1Restriction)
    }

    /// `a(n) = e^{2πi m·n/N}`.
    pub fn plane_wave(torus: LatticeTorus, m: &[i64]) -> Result<Self> {
        Self::scaled_fourier(torus, &[(m.to_vec(), Complex64::new(1.0, 0.0))])
    }

    pub fn torus(&self) -> LatticeTorus {
        self.torus
    }

    pub fn source(&self) -> ObservableSource {
        self.source
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Plain DFT coefficients `c_m`, indexed like the sites.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficient `a_m = ⟨e_m, a⟩ = N^{d/2} c_m` in the orthonormal basis.
    pub fn fourier_coefficient(&self, m: &[usize]) -> Complex64 {
        self.coefficients[self.torus.index(m)] * (self.torus.sites() as f64).sqrt()
    }

    /// `⟨a⟩`, the mean over the torus.
    pub fn mean(&self) -> Complex64 {
        self.coefficients[0]
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `Σ_{m≠0} |a_m e_m(v)|`, which does not depend on `v`.
    pub fn nonconstant_l1(&self) -> f64 {
        self.active_modes().iter().map(|&m| self.coefficients[m].norm()).sum()
    }

    /// Nonconstant modes carrying weight. Coefficients below `1e-15` of the
    /// largest one are FFT round-off and are skipped.
    fn active_modes(&self) -> Vec<usize> {
        let top = self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let floor = 1e-15 * top;
        (1..self.coefficients.len())
            .filter(|&m| self.coefficients[m].norm() > floor)
            .collect()
    }
}

fn phase(torus: &LatticeTorus, m: &[usize], v: &[usize]) -> Complex64 {
    let n = torus.side as u128;
    let dot: u128 = m.iter().zip(v).map(|(&a, &b)| a as u128 * b as u128).sum::<u128>() % n;
    Complex64::from_polar(1.0, 2.0 * PI * dot as f64 / n as f64)
}

/// `e^{-itA} ψ` by FFT.
pub fn evolve_state(torus: &LatticeTorus, psi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    torus.check_len("state", psi.len())?;
    let mut buf = psi.to_vec();
    dft(&mut buf, torus.side, torus.dim, FftDirection::Forward);
    for (z, lam) in buf.iter_mut().zip(torus.eigenvalues()) {
        *z *= Complex64::from_polar(1.0, -t * lam);
    }
    dft(&mut buf, torus.side, torus.dim, FftDirection::Inverse);
    let scale = 1.0 / torus.sites() as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
    Ok(buf)
}

pub fn point_mass(torus: &LatticeTorus, v: &[usize]) -> Result<Vec<Complex64>> {
    torus.check_site(v)?;
    let mut psi = vec![Complex64::new(0.0, 0.0); torus.sites()];
    psi[torus.index(v)] = Complex64::new(1.0, 0.0);
    Ok(psi)
}

/// `e^{-itA} δ_v`.
pub fn evolve_point_mass(torus: &LatticeTorus, v: &[usize], t: f64) -> Result<Vec<Complex64>> {
    evolve_state(torus, &point_mass(torus, v)?, t)
}

/// `⟨ψ(t), a ψ(t)⟩`.
pub fn instantaneous_expectation(
    torus: &LatticeTorus,
    psi: &[Complex64],
    a: &LatticeObservable,
    t: f64,
) -> Result<Complex64> {
    check_observable(torus, a)?;
    let out = evolve_state(torus, psi, t)?;
    Ok(out.iter().zip(a.samples()).map(|(z, w)| w * z.norm_sqr()).sum())
}

/// Coordinates `⟨e_ℓ, ψ⟩` in the plane-wave basis.
pub fn spectral_coordinates(torus: &LatticeTorus, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    torus.check_len("state", psi.len())?;
    let mut buf = psi.to_vec();
    dft(&mut buf, torus.side, torus.dim, FftDirection::Forward);
    let scale = 1.0 / (torus.sites() as f64).sqrt();
    buf.iter_mut().for_each(|z| *z *= scale);
    Ok(buf)
}

fn check_observable(torus: &LatticeTorus, a: &LatticeObservable) -> Result<()> {
    if a.torus != *torus {
        return Err(invalid("observable lives on a different torus"));
    }
    Ok(())
}

/// `A_m = {ℓ : λ_{ℓ+m} = λ_ℓ}` as flat site indices, ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceSet {
    pub shift: Vec<usize>,
    pub members: Vec<usize>,
}

/// Resonance set of a shift `m`.
///
/// For `m ≠ 0` one axis `j` with `m_j ≠ 0` is solved in closed form: with
/// the other coordinates fixed, `λ_{ℓ+m} - λ_ℓ = 0` reads
/// `sin(π(2ℓ_j + m_j)/N) = R / (4 sin(π m_j/N))`, which has at most two
/// solutions modulo `N`. Each candidate is confirmed against the eigenvalues
/// directly. This costs `O(N^{d-1})` and enforces `|A_m| ≤ 2N^{d-1}`.
pub fn resonance_set(torus: &LatticeTorus, m: &[usize]) -> Result<ResonanceSet> {
    torus.check_site(m)?;
    let n = torus.side;
    if m.iter().all(|&x| x == 0) {
        return Ok(ResonanceSet { shift: m.to_vec(), members: (0..torus.sites()).collect() });
    }
    let table = torus.cos_table();
    let axis = m.iter().position(|&x| x != 0).expect("nonzero shift");
    let mj = m[axis];
    let denom = 4.0 * (PI * mj as f64 / n as f64).sin();
    let others = n.pow((torus.dim - 1) as u32);
    let mut members = Vec::new();
    let mut ell = vec![0usize; torus.dim];
    let mut candidates = Vec::with_capacity(6);
    for rest in 0..others {
        // spread `rest` over the axes other than `axis`
        let mut r = rest;
        for i in (0..torus.dim).rev() {
            if i != axis {
                ell[i] = r % n;
                r /= n;
            }
        }
        let residual: f64 = (0..torus.dim)
            .filter(|&i| i != axis)
            .map(|i| table[(ell[i] + m[i]) % n] - table[ell[i]])
            .sum();
        let s = residual / denom;
        if s.abs() > 1.0 + 1e-9 {
            continue;
        }
        let theta = s.clamp(-1.0, 1.0).asin();
        candidates.clear();
        for x in [n as f64 * theta / PI, n as f64 - n as f64 * theta / PI] {
            let centre = ((x - mj as f64) / 2.0).round() as i64;
            for delta in -1..=1 {
                for wrap in [0, n as i64 / 2] {
                    // 2ℓ_j + m_j is fixed modulo 2N, so ℓ_j modulo N up to the half-period ambiguity
                    candidates.push((centre + delta + wrap).rem_euclid(n as i64) as usize);
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        for &c in &candidates {
            ell[axis] = c;
            let diff: f64 = (0..torus.dim).map(|i| table[(ell[i] + m[i]) % n] - table[ell[i]]).sum();
            if diff.abs() <= RESONANCE_TOL {
                members.push(torus.index(&ell));
            }
        }
    }
    members.sort_unstable();
    members.dedup();
    let bound = 2 * others;
    if members.len() > bound {
        return Err(Error::Numerical(format!(
            "resonance set of {m:?} has {} members, above the bound {bound}",
            members.len()
        )));
    }
    Ok(ResonanceSet { shift: m.to_vec(), members })
}

/// `lim_{T→∞} (1/T) ∫_0^T ⟨δ_v(t), a δ_v(t)⟩ dt
///   = ⟨a⟩ + N^{-d} Σ_{m≠0} a_m e_m(v) |A_m|`.
pub fn exact_time_average_limit(
    torus: &LatticeTorus,
    v: &[usize],
    a: &LatticeObservable,
) -> Result<Complex64> {
    torus.check_site(v)?;
    check_observable(torus, a)?;
    let modes = a.active_modes();
    let counts: Vec<usize> = modes
        .par_iter()
        .map(|&m| resonance_set(torus, &torus.coords(m)).map(|s| s.members.len()))
        .collect::<Result<_>>()?;
    let scale = 1.0 / torus.sites() as f64;
    let mut total = a.mean();
    for (&m, count) in modes.iter().zip(counts) {
        total += a.coefficients[m] * phase(torus, &torus.coords(m), v) * (count as f64 * scale);
    }
    Ok(total)
}

/// `lim (1/T) ∫_0^T ⟨δ_v(t), a δ_w(t)⟩ dt`, summed pointwise over
/// resonance sets. For `v = w` this is [`exact_time_average_limit`].
pub fn cross_term_limit(
    torus: &LatticeTorus,
    v: &[usize],
    w: &[usize],
    a: &LatticeObservable,
) -> Result<Complex64> {
    torus.check_site(v)?;
    torus.check_site(w)?;
    check_observable(torus, a)?;
    let diff: Vec<usize> = v.iter().zip(w).map(|(&x, &y)| (x + torus.side - y) % torus.side).collect();
    let modes = a.active_modes();
    let terms: Vec<Complex64> = modes
        .par_iter()
        .map(|&m| {
            let shift = torus.coords(m);
            let set = resonance_set(torus, &shift)?;
            let inner: Complex64 =
                set.members.iter().map(|&l| phase(torus, &torus.coords(l), &diff)).sum();
            Ok(a.coefficients[m] * phase(torus, &shift, v) * inner)
        })
        .collect::<Result<_>>()?;
    let scale = 1.0 / torus.sites() as f64;
    let mut total: Complex64 = terms.iter().sum::<Complex64>() * scale;
    if v == w {
        total += a.mean();
    }
    Ok(total)
}

/// `lim (1/T) ∫_0^T ⟨φ(t), a ψ(t)⟩ dt = Σ_m c_m Σ_{ℓ∈A_m} conj(φ̂_{ℓ+m}) ψ̂_ℓ`
/// with `φ̂, ψ̂` the plane-wave coordinates.
pub fn general_state_limit(
    torus: &LatticeTorus,
    phi: &[Complex64],
    psi: &[Complex64],
    a: &LatticeObservable,
) -> Result<Complex64> {
    check_observable(torus, a)?;
    let phi_hat = spectral_coordinates(torus, phi)?;
    let psi_hat = spectral_coordinates(torus, psi)?;
    let overlap: Complex64 = phi_hat.iter().zip(&psi_hat).map(|(x, y)| x.conj() * y).sum();
    let modes = a.active_modes();
    let terms: Vec<Complex64> = modes
        .par_iter()
        .map(|&m| {
            let shift = torus.coords(m);
            let set = resonance_set(torus, &shift)?;
            let inner: Complex64 = set
                .members
                .iter()
                .map(|&l| {
                    let lc = torus.coords(l);
                    let up: Vec<usize> = lc.iter().zip(&shift).map(|(x, y)| (x + y) % torus.side).collect();
                    phi_hat[torus.index(&up)].conj() * psi_hat[l]
                })
                .sum();
            Ok(a.coefficients[m] * inner)
        })
        .collect::<Result<_>>()?;
    Ok(a.mean() * overlap + terms.iter().sum::<Complex64>())
}

/// `(1/T) ∫_0^T ⟨φ(t), a ψ(t)⟩ dt` through the closed-form kernel, costing
/// one pass over the torus per active mode of `a`.
pub fn averaged_expectation(
    torus: &LatticeTorus,
    phi: &[Complex64],
    psi: &[Complex64],
    a: &LatticeObservable,
    horizon: f64,
) -> Result<Complex64> {
    check_observable(torus, a)?;
    if !(horizon > 0.0) {
        return Err(invalid(format!("horizon must be positive, got {horizon}")));
    }
    let phi_hat = spectral_coordinates(torus, phi)?;
    let psi_hat = spectral_coordinates(torus, psi)?;
    let lam = torus.eigenvalues();
    let overlap: Complex64 = phi_hat.iter().zip(&psi_hat).map(|(x, y)| x.conj() * y).sum();
    let terms: Vec<Complex64> = a
        .active_modes()
        .par_iter()
        .map(|&m| {
            let shift = torus.coords(m);
            let inner: Complex64 = (0..torus.sites())
                .map(|l| {
                    let up: Vec<usize> =
                        torus.coords(l).iter().zip(&shift).map(|(x, y)| (x + y) % torus.side).collect();
                    let u = torus.index(&up);
                    let omega = lam[u] - lam[l];
                    let k = if omega.abs() <= RESONANCE_TOL {
                        Complex64::new(1.0, 0.0)
                    } else {
                        kernel::continuous(horizon, omega)
                    };
                    phi_hat[u].conj() * psi_hat[l] * k
                })
                .sum();
            a.coefficients[m] * inner
        })
        .collect();
    Ok(a.mean() * overlap + terms.iter().sum::<Complex64>())
}

/// `a(n) = 2cos(2πn_1/N)` for odd `N` and `2cos(4πn_1/N)` for even `N`: the
/// time-averaged limit from `δ_v` misses `⟨a⟩ = 0` by exactly
/// [`slow_mode_deviation`].
pub fn slow_mode_observable(torus: LatticeTorus) -> Result<LatticeObservable> {
    let freq: i64 = if torus.side % 2 == 1 { 1 } else { 2 };
    let mut m = vec![0i64; torus.dim];
    m[0] = freq;
    let mut neg = m.clone();
    neg[0] = -freq;
    LatticeObservable::scaled_fourier(torus, &[(m, Complex64::new(1.0, 0.0)), (neg, Complex64::new(1.0, 0.0))])
}

/// `2cos(2πv_1/N)/N` for odd `N`, `4cos(4πv_1/N)/N` for even `N`.
pub fn slow_mode_deviation(torus: &LatticeTorus, v: &[usize]) -> f64 {
    let n = torus.side as f64;
    let x = v[0] as f64;
    if torus.side % 2 == 1 {
        2.0 * (2.0 * PI * x / n).cos() / n
    } else {
        4.0 * (4.0 * PI * x / n).cos() / n
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StartSite {
    Origin,
    Site(Vec<usize>),
    /// The start site maximizing the instantaneous expectation.
    Best,
}

#[derive(Clone, Debug)]
pub struct FixedTimeRow {
    pub dim: usize,
    pub side: usize,
    pub time: f64,
    pub start: Vec<usize>,
    pub instantaneous: f64,
    pub mean: f64,
    pub gap: f64,
    pub horizon: f64,
    pub averaged_gap: f64,
}

/// `v ↦ ⟨δ_v(t), a δ_v(t)⟩` for every start site at once, as a circular
/// correlation of `a` with `|e^{-itA}δ_0|²`.
pub fn instantaneous_profile(torus: &LatticeTorus, a: &LatticeObservable, t: f64) -> Result<Vec<f64>> {
    check_observable(torus, a)?;
    let origin = vec![0; torus.dim];
    let kernel_state = evolve_point_mass(torus, &origin, t)?;
    let mut p: Vec<Complex64> = kernel_state.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
    let mut s = a.samples.clone();
    dft(&mut p, torus.side, torus.dim, FftDirection::Forward);
    dft(&mut s, torus.side, torus.dim, FftDirection::Forward);
    let mut prod: Vec<Complex64> = s.iter().zip(&p).map(|(x, y)| x * y.conj()).collect();
    dft(&mut prod, torus.side, torus.dim, FftDirection::Inverse);
    let scale = 1.0 / torus.sites() as f64;
    Ok(prod.iter().map(|z| z.re * scale).collect())
}

/// For each `(N, t)`: the expectation of `a_N(n) = f(n/N)` at the fixed time
/// `t`, its gap above `⟨a_N⟩`, and the same gap after averaging over
/// `[0, horizon(N)]`.
pub fn fixed_time_experiment(
    dim: usize,
    sizes: &[usize],
    times: &[f64],
    start: &StartSite,
    horizon: impl Fn(usize) -> f64,
    f: impl Fn(&[f64]) -> f64,
) -> Result<Vec<FixedTimeRow>> {
    let mut rows = Vec::new();
    for &side in sizes {
        let torus = LatticeTorus::new(dim, side)?;
        let a = LatticeObservable::sample_function(torus, |x| Complex64::new(f(x), 0.0))?;
        let mean = a.mean().re;
        for &t in times {
            let profile = instantaneous_profile(&torus, &a, t)?;
            let site = match start {
                StartSite::Origin => 0,
                StartSite::Site(v) => {
                    torus.check_site(v)?;
                    torus.index(v)
                }
                StartSite::Best => (0..profile.len())
                    .max_by(|&x, &y| profile[x].total_cmp(&profile[y]))
                    .expect("nonempty torus"),
            };
            let v = torus.coords(site);
            let delta = point_mass(&torus, &v)?;
            let h = horizon(side);
            let averaged = averaged_expectation(&torus, &delta, &delta, &a, h)?.re;
            rows.push(FixedTimeRow {
                dim,
                side,
                time: t,
                start: v,
                instantaneous: profile[site],
                mean,
                gap: profile[site] - mean,
                horizon: h,
                averaged_gap: averaged - mean,
            });
        }
    }
    Ok(rows)
}

/// `⟨δ_v(t), a δ_v(t)⟩` for `d = 1`, `a(x) = e^{2πix/N}`:
/// `(e^{2πiv/N}/N) Σ_ℓ e^{-4it sin(π(2ℓ+1)/N) sin(π/N)}`.
pub fn persistent_oscillation(side: usize, v: usize, t: f64) -> Complex64 {
    persistent_with_kernel(side, v, |b| Complex64::from_polar(1.0, t * b))
}

/// Average of [`persistent_oscillation`] over the window `[T-1, T]`.
pub fn persistent_oscillation_windowed(side: usize, v: usize, end: f64) -> Complex64 {
    persistent_with_kernel(side, v, |b| kernel::window(end - 1.0, end, b))
}

fn persistent_with_kernel(side: usize, v: usize, k: impl Fn(f64) -> Complex64) -> Complex64 {
    let n = side as f64;
    let s1 = (PI / n).sin();
    let sum: Complex64 = (0..side)
        .map(|l| k(-4.0 * (PI * (2 * l + 1) as f64 / n).sin() * s1))
        .sum();
    Complex64::from_polar(1.0 / n, 2.0 * PI * v as f64 / n) * sum
}

#[derive(Clone, Debug)]
pub struct OscillationRow {
    pub time: f64,
    pub instantaneous: Complex64,
    pub windowed: Complex64,
}

pub fn oscillation_experiment(side: usize, v: usize, times: &[f64]) -> Result<Vec<OscillationRow>> {
    if side < 2 || v >= side {
        return Err(invalid(format!("need N >= 2 and 0 <= v < N, got N = {side}, v = {v}")));
    }
    Ok(times
        .iter()
        .map(|&t| OscillationRow {
            time: t,
            instantaneous: persistent_oscillation(side, v, t),
            windowed: persistent_oscillation_windowed(side, v, t),
        })
        .collect())
}

/// Max minus min of `Re(e^{-2πiv/N} z)` over a series; the rotation makes
/// the values real.
pub fn oscillation_amplitude(values: &[Complex64], side: usize, v: usize) -> f64 {
    let rot = Complex64::from_polar(1.0, -2.0 * PI * v as f64 / side as f64);
    let re: Vec<f64> = values.iter().map(|z| (z * rot).re).collect();
    let hi = re.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = re.iter().cloned().fold(f64::INFINITY, f64::min);
    hi - lo
}

#[derive(Clone, Debug)]
pub struct SimultaneousLimit {
    pub horizon: f64,
    pub finite: Complex64,
    pub limit: Complex64,
    /// `Σ_{m≠0} |a_m e_m(v)| · (2/T) / min gap`.
    pub correction_bound: f64,
    pub difference: f64,
}

pub fn simultaneous_limit_check(
    torus: &LatticeTorus,
    v: &[usize],
    a: &LatticeObservable,
    horizon: f64,
) -> Result<SimultaneousLimit> {
    let delta = point_mass(torus, v)?;
    let finite = averaged_expectation(torus, &delta, &delta, a, horizon)?;
    let limit = exact_time_average_limit(torus, v, a)?;
    let correction_bound = a.nonconstant_l1() * 2.0 / (horizon * torus.min_gap());
    Ok(SimultaneousLimit { horizon, finite, limit, correction_bound, difference: (finite - limit).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_eigenvalues() {
        let t = LatticeTorus::new(1, 4).unwrap();
        let e = t.eigenvalues();
        let expected = [2.0, 0.0, -2.0, 0.0];
        for (x, y) in e.iter().zip(expected) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn resonance_set_in_one_dimension() {
        // 2ℓ + m ≡ 0 mod N
        let t = LatticeTorus::new(1, 8).unwrap();
        assert_eq!(resonance_set(&t, &[2]).unwrap().members, vec![3, 7]);
        let t = LatticeTorus::new(1, 7).unwrap();
        assert_eq!(resonance_set(&t, &[1]).unwrap().members, vec![3]);
        assert_eq!(resonance_set(&t, &[0]).unwrap().members.len(), 7);
    }

    #[test]
    fn constant_observable_has_no_correction() {
        let t = LatticeTorus::new(2, 6).unwrap();
        let a = LatticeObservable::from_real_samples(t, &vec![0.7; 36]).unwrap();
        let lim = exact_time_average_limit(&t, &[1, 2], &a).unwrap();
        assert!((lim - 0.7).norm() < 1e-14);
        assert_eq!(a.nonconstant_l1(), 0.0);
    }

    #[test]
    fn slow_mode_example_values() {
        let t = LatticeTorus::new(1, 5).unwrap();
        let a = slow_mode_observable(t).unwrap();
        let lim = exact_time_average_limit(&t, &[0], &a).unwrap();
        assert!((lim.re - 0.4).abs() < 1e-12 && lim.im.abs() < 1e-12);
        let t = LatticeTorus::new(1, 6).unwrap();
        let a = slow_mode_observable(t).unwrap();
        let lim = exact_time_average_limit(&t, &[0], &a).unwrap();
        assert!((lim.re - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn persistent_oscillation_at_zero_time() {
        assert!((persistent_oscillation(5, 0, 0.0) - 1.0).norm() < 1e-14);
        let w = persistent_oscillation_windowed(5, 0, 1.0);
        assert!(w.im.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(LatticeTorus::new(0, 4).is_err());
        assert!(LatticeTorus::new(1, 1).is_err());
        assert!(LatticeTorus::new(3, 1 << 10).is_err());
        let t = LatticeTorus::new(1, 4).unwrap();
        assert!(point_mass(&t, &[4]).is_err());
        assert!(LatticeObservable::from_real_samples(t, &[1.0; 3]).is_err());
        let other = LatticeObservable::from_real_samples(LatticeTorus::new(1, 5).unwrap(), &[1.0; 5]).unwrap();
        assert!(exact_time_average_limit(&t, &[0], &other).is_err());
    }
}
