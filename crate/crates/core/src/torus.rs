//! Spectrally truncated dynamics on the flat torus `R^d / Π b_i Z`.
//!
//! Laplace eigenfunctions are `ê_ℓ(x) = e^{2πi Σ ℓ_i x_i / b_i} / √V` with
//! eigenvalue `λ_ℓ = 4π² Σ ℓ_i² / b_i²`. A state is a finite list of modes
//! with coefficients; an observable is a trigonometric polynomial
//! `a = Σ_m a_m e^{2πi m·x/b}`, so `a ê_ℓ = Σ_m a_m ê_{ℓ+m}` and every
//! time average is a finite sum over pairs `(ℓ, ℓ+m)`.
//!
//! On the unit torus the resonance test `λ_{ℓ+m} = λ_ℓ` is the integer
//! identity `2ℓ·m + |m|² = 0`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::kernel;

/// Largest number of modes in any state or mode set.
pub const MAX_MODES: usize = 10_000_000;

/// Relative tolerance for resonance on non-unit tori.
const RESONANCE_REL_TOL: f64 = 1e-9;

fn check_lengths(lengths: &[f64]) -> Result<()> {
    if lengths.is_empty() {
        return Err(invalid("torus needs at least one side length"));
    }
    if lengths.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(invalid(format!("side lengths must be positive, got {lengths:?}")));
    }
    Ok(())
}

fn is_unit(lengths: &[f64]) -> bool {
    lengths.iter().all(|&b| b == 1.0)
}

pub fn mode_eigenvalue(lengths: &[f64], l: &[i64]) -> f64 {
    4.0 * PI * PI * l.iter().zip(lengths).map(|(&x, b)| (x * x) as f64 / (b * b)).sum::<f64>()
}

/// Whether `λ_{ℓ+m} = λ_ℓ`.
pub fn is_resonant(lengths: &[f64], l: &[i64], m: &[i64]) -> bool {
    if is_unit(lengths) {
        let lm: i64 = l.iter().zip(m).map(|(a, b)| a * b).sum();
        let mm: i64 = m.iter().map(|b| b * b).sum();
        return 2 * lm + mm == 0;
    }
    let up: Vec<i64> = l.iter().zip(m).map(|(a, b)| a + b).collect();
    let (x, y) = (mode_eigenvalue(lengths, &up), mode_eigenvalue(lengths, l));
    (x - y).abs() <= RESONANCE_REL_TOL * x.max(y).max(1.0)
}

/// Dense lookup from modes to positions over their bounding box.
#[derive(Clone, Debug)]
struct ModeTable {
    low: Vec<i64>,
    extent: Vec<usize>,
    slots: Vec<u32>,
}

impl ModeTable {
    const EMPTY: u32 = u32::MAX;

    fn new(dim: usize, modes: &[Vec<i64>]) -> Result<Self> {
        let mut low = vec![i64::MAX; dim];
        let mut high = vec![i64::MIN; dim];
        for l in modes {
            for i in 0..dim {
                low[i] = low[i].min(l[i]);
                high[i] = high[i].max(l[i]);
            }
        }
        if modes.is_empty() {
            return Ok(Self { low: vec![0; dim], extent: vec![0; dim], slots: Vec::new() });
        }
        let extent: Vec<usize> = low.iter().zip(&high).map(|(a, b)| (b - a + 1) as usize).collect();
        let volume = extent.iter().try_fold(1usize, |acc, &e| acc.checked_mul(e));
        let volume = match volume {
            Some(v) if v <= 8 * MAX_MODES => v,
            _ => return Err(Error::TooLarge { dim: usize::MAX, max: 8 * MAX_MODES }),
        };
        let mut table = Self { low, extent, slots: vec![Self::EMPTY; volume] };
        for (pos, l) in modes.iter().enumerate() {
            let slot = table.slot(l).expect("mode inside its bounding box");
            table.slots[slot] = pos as u32;
        }
        Ok(table)
    }

    fn slot(&self, l: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for i in 0..self.extent.len() {
            let off = l[i] - self.low[i];
            if off < 0 || off as usize >= self.extent[i] {
                return None;
            }
            idx = idx * self.extent[i] + off as usize;
        }
        Some(idx)
    }

    fn get(&self, l: &[i64]) -> Option<usize> {
        self.slot(l).map(|s| self.slots[s]).filter(|&p| p != Self::EMPTY).map(|p| p as usize)
    }
}

/// All `ℓ ∈ Z^d` with `λ_ℓ ≤ E`, in lexicographic order.
#[derive(Clone, Debug)]
pub struct DualModeSet {
    lengths: Vec<f64>,
    energy: f64,
    modes: Vec<Vec<i64>>,
    eigenvalues: Vec<f64>,
    table: ModeTable,
}

pub fn enumerate_modes(lengths: &[f64], energy: f64) -> Result<DualModeSet> {
    check_lengths(lengths)?;
    if !(energy.is_finite() && energy >= 0.0) {
        return Err(invalid(format!("energy cap must be finite and non-negative, got {energy}")));
    }
    let dim = lengths.len();
    let radius: Vec<i64> = lengths.iter().map(|b| (b * energy.sqrt() / (2.0 * PI)).floor() as i64 + 1).collect();
    let box_volume = radius.iter().map(|&r| (2 * r + 1) as f64).product::<f64>();
    if box_volume > 8.0 * MAX_MODES as f64 {
        return Err(Error::TooLarge { dim: box_volume as usize, max: MAX_MODES });
    }
    let mut modes = Vec::new();
    let mut l: Vec<i64> = radius.iter().map(|r| -r).collect();
    'scan: loop {
        if mode_eigenvalue(lengths, &l) <= energy {
            modes.push(l.clone());
            if modes.len() > MAX_MODES {
                return Err(Error::TooLarge { dim: modes.len(), max: MAX_MODES });
            }
        }
        for i in (0..dim).rev() {
            if l[i] < radius[i] {
                l[i] += 1;
                continue 'scan;
            }
            l[i] = -radius[i];
        }
        break;
    }
    let eigenvalues = modes.iter().map(|l| mode_eigenvalue(lengths, l)).collect();
    let table = ModeTable::new(dim, &modes)?;
    Ok(DualModeSet { lengths: lengths.to_vec(), energy, modes, eigenvalues, table })
}

impl DualModeSet {
    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Vec<i64>] {
        &self.modes
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn contains(&self, l: &[i64]) -> bool {
        l.len() == self.dim() && self.table.get(l).is_some()
    }

    /// Weyl-law count `ω_d (√E / 2π)^d Π b_i` with `ω_d` the unit-ball volume.
    pub fn weyl_estimate(&self) -> f64 {
        let d = self.dim() as f64;
        let ball = PI.powf(d / 2.0) / statrs::function::gamma::gamma(d / 2.0 + 1.0);
        ball * (self.energy.sqrt() / (2.0 * PI)).powf(d) * self.lengths.iter().product::<f64>()
    }
}

/// `#{ℓ : ℓ, ℓ+m both in the set, λ_{ℓ+m} = λ_ℓ}` for `m ≠ 0`.
pub fn resonant_pair_count(set: &DualModeSet, m: &[i64]) -> Result<usize> {
    if m.len() != set.dim() {
        return Err(invalid(format!("shift {m:?} has the wrong dimension")));
    }
    if m.iter().all(|&x| x == 0) {
        return Err(invalid("resonant pairs are counted for nonzero shifts only"));
    }
    Ok(set
        .modes
        .iter()
        .filter(|l| {
            let up: Vec<i64> = l.iter().zip(m).map(|(a, b)| a + b).collect();
            set.contains(&up) && is_resonant(&set.lengths, l, m)
        })
        .count())
}

/// Trigonometric polynomial `Σ_m a_m e^{2πi m·x/b}` with finite support.
#[derive(Clone, Debug)]
pub struct TorusObservable {
    dim: usize,
    entries: Vec<(Vec<i64>, Complex64)>,
}

impl TorusObservable {
    /// Duplicate frequencies are merged.
    pub fn new(dim: usize, entries: Vec<(Vec<i64>, Complex64)>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("observable dimension must be at least 1"));
        }
        let mut merged: Vec<(Vec<i64>, Complex64)> = Vec::new();
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        for (m, a) in entries {
            if m.len() != dim {
                return Err(invalid(format!("frequency {m:?} has the wrong dimension")));
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(invalid(format!("coefficient of {m:?} is not finite")));
            }
            match seen.get(&m) {
                Some(&i) => merged[i].1 += a,
                None => {
                    seen.insert(m.clone(), merged.len());
                    merged.push((m, a));
                }
            }
        }
        Ok(Self { dim, entries: merged })
    }

    pub fn plane_wave(m: &[i64]) -> Result<Self> {
        Self::new(m.len(), vec![(m.to_vec(), Complex64::new(1.0, 0.0))])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(Vec<i64>, Complex64)] {
        &self.entries
    }

    /// `⟨a⟩`, the mean over the torus.
    pub fn mean(&self) -> Complex64 {
        self.entries.iter().filter(|(m, _)| m.iter().all(|&x| x == 0)).map(|(_, a)| *a).sum()
    }

    /// Largest `|m|_∞` in the support.
    pub fn support_radius(&self) -> i64 {
        self.entries.iter().flat_map(|(m, _)| m.iter().map(|x| x.abs())).max().unwrap_or(0)
    }

    /// `Σ_{m≠0} |a_m|`.
    pub fn nonconstant_l1(&self) -> f64 {
        self.entries.iter().filter(|(m, _)| m.iter().any(|&x| x != 0)).map(|(_, a)| a.norm()).sum()
    }

    /// Whether `a_{-m} = conj(a_m)` within `tol`, i.e. `a` is real valued.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        let map: HashMap<&Vec<i64>, Complex64> = self.entries.iter().map(|(m, a)| (m, *a)).collect();
        self.entries.iter().all(|(m, a)| {
            let neg: Vec<i64> = m.iter().map(|x| -x).collect();
            let other = map.get(&neg).copied().unwrap_or_default();
            (a.conj() - other).norm() <= tol
        })
    }

    pub fn evaluate(&self, lengths: &[f64], x: &[f64]) -> Complex64 {
        self.entries
            .iter()
            .map(|(m, a)| {
                let dot: f64 = m.iter().zip(x).zip(lengths).map(|((&k, xi), b)| k as f64 * xi / b).sum();
                a * Complex64::from_polar(1.0, 2.0 * PI * dot)
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateKind {
    /// Normalized spectral projection of `δ_y`.
    Sharp { point: Vec<f64> },
    /// Same with coefficients weighted by a cutoff of the eigenvalue.
    Cutoff { point: Vec<f64> },
    /// Normalized indicator of `Π [y_i, y_i + ε_i]`, truncated per axis.
    Box { corner: Vec<f64>, widths: Vec<f64> },
    PlaneWave,
    Custom,
}

/// `ψ = Σ_ℓ c_ℓ ê_ℓ` over a finite mode list.
#[derive(Clone, Debug)]
pub struct TruncatedState {
    lengths: Vec<f64>,
    modes: Vec<Vec<i64>>,
    coefficients: Vec<Complex64>,
    eigenvalues: Vec<f64>,
    table: ModeTable,
    kind: StateKind,
    truncation_loss: f64,
}

fn phase_at(l: &[i64], x: &[f64], lengths: &[f64]) -> Complex64 {
    let dot: f64 = l.iter().zip(x).zip(lengths).map(|((&k, xi), b)| k as f64 * xi / b).sum();
    Complex64::from_polar(1.0, 2.0 * PI * dot)
}

/// `⟨e_r, 1_{[y, y+ε]}/√ε⟩` on the unit circle.
fn box_coefficient(r: i64, corner: f64, width: f64) -> Complex64 {
    if r == 0 {
        return Complex64::new(width.sqrt(), 0.0);
    }
    let w = 2.0 * PI * r as f64;
    let inner = (Complex64::from_polar(1.0, w * (corner + width)) - Complex64::from_polar(1.0, w * corner))
        / (Complex64::i() * w * width.sqrt());
    inner.conj()
}

impl TruncatedState {
    pub fn from_coefficients(
        lengths: &[f64],
        modes: Vec<Vec<i64>>,
        coefficients: Vec<Complex64>,
        kind: StateKind,
        truncation_loss: f64,
    ) -> Result<Self> {
        check_lengths(lengths)?;
        if modes.len() != coefficients.len() {
            return Err(invalid("modes and coefficients differ in length"));
        }
        if modes.len() > MAX_MODES {
            return Err(Error::TooLarge { dim: modes.len(), max: MAX_MODES });
        }
        if modes.iter().any(|l| l.len() != lengths.len()) {
            return Err(invalid("mode dimension does not match the torus"));
        }
        let table = ModeTable::new(lengths.len(), &modes)?;
        if modes.iter().enumerate().any(|(i, l)| table.get(l) != Some(i)) {
            return Err(invalid("state lists a mode twice"));
        }
        let eigenvalues = modes.iter().map(|l| mode_eigenvalue(lengths, l)).collect();
        Ok(Self { lengths: lengths.to_vec(), modes, coefficients, eigenvalues, table, kind, truncation_loss })
    }

    /// `δ_y^E = Σ_{λ_ℓ ≤ E} conj(ê_ℓ(y)) ê_ℓ`, normalized.
    pub fn sharp(set: &DualModeSet, point: &[f64]) -> Result<Self> {
        Self::cutoff_inner(set, point, |_| 1.0, StateKind::Sharp { point: point.to_vec() })
    }

    /// `Σ_ℓ χ(λ_ℓ) conj(ê_ℓ(y)) ê_ℓ`, normalized.
    pub fn cutoff(set: &DualModeSet, point: &[f64], chi: impl Fn(f64) -> f64) -> Result<Self> {
        Self::cutoff_inner(set, point, chi, StateKind::Cutoff { point: point.to_vec() })
    }

    fn cutoff_inner(set: &DualModeSet, point: &[f64], chi: impl Fn(f64) -> f64, kind: StateKind) -> Result<Self> {
        if point.len() != set.dim() {
            return Err(invalid(format!("point {point:?} has the wrong dimension")));
        }
        let raw: Vec<Complex64> = set
            .modes
            .iter()
            .zip(&set.eigenvalues)
            .map(|(l, &lam)| phase_at(l, point, &set.lengths).conj() * chi(lam))
            .collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("state has no weight below the energy cap"));
        }
        let coeffs = raw.iter().map(|z| z / norm).collect();
        Self::from_coefficients(&set.lengths, set.modes.clone(), coeffs, kind, 0.0)
    }

    /// Normalized indicator of the box `Π [y_i, y_i + ε_i]` on the unit
    /// torus, truncated to `|r_i| ≤ R_i` with the smallest `R_i` keeping the
    /// lost `L²` mass at most `loss_target`.
    pub fn boxed(corner: &[f64], widths: &[f64], loss_target: f64) -> Result<Self> {
        let d = corner.len();
        if d == 0 || widths.len() != d {
            return Err(invalid("box needs matching, nonempty corner and widths"));
        }
        if widths.iter().any(|e| !(*e > 0.0 && *e <= 1.0)) {
            return Err(invalid(format!("box widths must lie in (0, 1], got {widths:?}")));
        }
        if !(loss_target > 0.0 && loss_target < 1.0) {
            return Err(invalid(format!("loss target must lie in (0, 1), got {loss_target}")));
        }
        let per_axis = 1.0 - (1.0 - loss_target).powf(1.0 / d as f64);
        let mut axes: Vec<(i64, Vec<Complex64>, f64)> = Vec::with_capacity(d);
        for (&y, &eps) in corner.iter().zip(widths) {
            let mut kept = eps;
            let mut radius = 0i64;
            while 1.0 - kept > per_axis {
                radius += 1;
                if radius > 1_000_000 {
                    return Err(Error::TooLarge { dim: radius as usize, max: 1_000_000 });
                }
                kept += box_coefficient(radius, y, eps).norm_sqr() + box_coefficient(-radius, y, eps).norm_sqr();
            }
            let coeffs = (-radius..=radius).map(|r| box_coefficient(r, y, eps)).collect();
            axes.push((radius, coeffs, kept));
        }
        let total: usize = axes.iter().map(|(r, _, _)| (2 * r + 1) as usize).product();
        if total > MAX_MODES {
            return Err(Error::TooLarge { dim: total, max: MAX_MODES });
        }
        let mut modes = Vec::with_capacity(total);
        let mut coefficients = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rest = flat;
            let mut l = vec![0i64; d];
            let mut c = Complex64::new(1.0, 0.0);
            for i in (0..d).rev() {
                let width = (2 * axes[i].0 + 1) as usize;
                let pos = rest % width;
                rest /= width;
                l[i] = pos as i64 - axes[i].0;
                c *= axes[i].1[pos];
            }
            modes.push(l);
            coefficients.push(c);
        }
        let loss = 1.0 - axes.iter().map(|(_, _, k)| k).product::<f64>();
        let kind = StateKind::Box { corner: corner.to_vec(), widths: widths.to_vec() };
        Self::from_coefficients(&vec![1.0; d], modes, coefficients, kind, loss)
    }

    /// The normalized eigenfunction `ê_j`.
    pub fn plane_wave(lengths: &[f64], j: &[i64]) -> Result<Self> {
        Self::from_coefficients(lengths, vec![j.to_vec()], vec![Complex64::new(1.0, 0.0)], StateKind::PlaneWave, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn modes(&self) -> &[Vec<i64>] {
        &self.modes
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    /// `L²` mass dropped by the truncation.
    pub fn truncation_loss(&self) -> f64 {
        self.truncation_loss
    }

    pub fn coefficient(&self, l: &[i64]) -> Complex64 {
        self.table.get(l).map(|i| self.coefficients[i]).unwrap_or_default()
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        other
            .modes
            .iter()
            .zip(&other.coefficients)
            .map(|(l, c)| self.coefficient(l).conj() * c)
            .sum()
    }

    /// `ψ(t, x) = Σ_ℓ c_ℓ e^{-itλ_ℓ} ê_ℓ(x)`.
    pub fn evaluate(&self, t: f64, x: &[f64]) -> Complex64 {
        let volume: f64 = self.lengths.iter().product();
        let sum: Complex64 = self
            .modes
            .iter()
            .zip(&self.coefficients)
            .zip(&self.eigenvalues)
            .map(|((l, c), lam)| c * Complex64::from_polar(1.0, -t * lam) * phase_at(l, x, &self.lengths))
            .sum();
        sum / volume.sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Horizon {
    /// `T → ∞`: only resonant pairs survive.
    Infinite,
    /// `(1/T) ∫_0^T`.
    Continuous(f64),
    /// `(1/T) Σ_{t=0}^{T-1}`.
    Discrete(u64),
}

impl Horizon {
    fn weight(&self, omega: f64) -> Complex64 {
        match *self {
            Horizon::Infinite => Complex64::new(0.0, 0.0),
            Horizon::Continuous(t) => kernel::continuous(t, omega),
            Horizon::Discrete(steps) => kernel::discrete(steps, omega),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Horizon::Continuous(t) if !(t > 0.0 && t.is_finite()) => {
                Err(invalid(format!("horizon must be positive, got {t}")))
            }
            Horizon::Discrete(0) => Err(invalid("discrete horizon needs at least one step")),
            _ => Ok(()),
        }
    }
}

/// A time average split into `a_0⟨φ,ψ⟩`, the resonant pairs, and the
/// oscillating pairs weighted by the time kernel.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AveragedValue {
    pub mean_term: Complex64,
    pub resonant_term: Complex64,
    pub oscillatory_term: Complex64,
}

impl AveragedValue {
    pub fn total(&self) -> Complex64 {
        self.mean_term + self.resonant_term + self.oscillatory_term
    }
}

fn check_pair(phi: &TruncatedState, psi: &TruncatedState, a: &TorusObservable) -> Result<()> {
    if phi.lengths != psi.lengths {
        return Err(invalid("states live on different tori"));
    }
    if a.dim != phi.dim() {
        return Err(invalid("observable dimension does not match the torus"));
    }
    Ok(())
}

/// Time average of `⟨φ(t), a ψ(t)⟩`:
///
/// `Σ_m a_m Σ_ℓ K(λ_{ℓ+m} - λ_ℓ) conj(φ_{ℓ+m}) ψ_ℓ`
///
/// with `K` the kernel of the horizon, replaced by 1 on resonant pairs.
pub fn averaged_expectation(
    phi: &TruncatedState,
    psi: &TruncatedState,
    a: &TorusObservable,
    horizon: Horizon,
) -> Result<AveragedValue> {
    check_pair(phi, psi, a)?;
    horizon.validate()?;
    let mean_term = a.mean() * phi.inner(psi);
    let shifts: Vec<&(Vec<i64>, Complex64)> = a.entries.iter().filter(|(m, _)| m.iter().any(|&x| x != 0)).collect();
    let parts: Vec<(Complex64, Complex64)> = shifts
        .par_iter()
        .map(|(m, am)| {
            let mut res = Complex64::new(0.0, 0.0);
            let mut osc = Complex64::new(0.0, 0.0);
            let mut up = vec![0i64; m.len()];
            for (pos, l) in psi.modes.iter().enumerate() {
                for i in 0..m.len() {
                    up[i] = l[i] + m[i];
                }
                let Some(j) = phi.table.get(&up) else { continue };
                let w = phi.coefficients[j].conj() * psi.coefficients[pos];
                if is_resonant(&psi.lengths, l, m) {
                    res += w;
                } else {
                    osc += w * horizon.weight(phi.eigenvalues[j] - psi.eigenvalues[pos]);
                }
            }
            (am * res, am * osc)
        })
        .collect();
    let mut out = AveragedValue { mean_term, ..Default::default() };
    for (r, o) in parts {
        out.resonant_term += r;
        out.oscillatory_term += o;
    }
    Ok(out)
}

/// `⟨φ(t), a ψ(t)⟩` at a single time.
pub fn instantaneous_expectation(
    phi: &TruncatedState,
    psi: &TruncatedState,
    a: &TorusObservable,
    t: f64,
) -> Result<Complex64> {
    check_pair(phi, psi, a)?;
    let mut total = Complex64::new(0.0, 0.0);
    for (m, am) in &a.entries {
        let mut acc = Complex64::new(0.0, 0.0);
        for (pos, l) in psi.modes.iter().enumerate() {
            let up: Vec<i64> = l.iter().zip(m).map(|(x, y)| x + y).collect();
            if let Some(j) = phi.table.get(&up) {
                let omega = phi.eigenvalues[j] - psi.eigenvalues[pos];
                acc += phi.coefficients[j].conj() * psi.coefficients[pos] * Complex64::from_polar(1.0, t * omega);
            }
        }
        total += am * acc;
    }
    Ok(total)
}

/// `(1/T) ∫_0^T ⟨δ_y^E(t), a δ_y^E(t)⟩ dt`.
pub fn sharp_state_average(set: &DualModeSet, y: &[f64], a: &TorusObservable, horizon: f64) -> Result<AveragedValue> {
    let s = TruncatedState::sharp(set, y)?;
    averaged_expectation(&s, &s, a, Horizon::Continuous(horizon))
}

/// `(1/T) ∫_0^T ⟨δ_x^E(t), a δ_y^E(t)⟩ dt` for `x ≠ y`.
pub fn cross_point_average(
    set: &DualModeSet,
    x: &[f64],
    y: &[f64],
    a: &TorusObservable,
    horizon: f64,
) -> Result<AveragedValue> {
    if x == y {
        return Err(invalid("cross-point average needs two distinct points"));
    }
    let sx = TruncatedState::sharp(set, x)?;
    let sy = TruncatedState::sharp(set, y)?;
    averaged_expectation(&sx, &sy, a, Horizon::Continuous(horizon))
}

/// `(1/T) Σ_{t=0}^{T-1} ⟨ψ(t), a ψ(t)⟩`.
pub fn discrete_time_average(state: &TruncatedState, a: &TorusObservable, steps: u64) -> Result<AveragedValue> {
    averaged_expectation(state, state, a, Horizon::Discrete(steps))
}

/// `φ = ê_j`, `ψ = ê_k`, `a = e_m`: returns the `T → ∞` time average and the
/// product `⟨φ, ψ⟩⟨a⟩`. With `j = k + m` and `|j| = |k|` the two differ.
pub fn degenerate_pair_counterexample(j: &[i64], k: &[i64], m: &[i64]) -> Result<(Complex64, Complex64)> {
    if j.len() != k.len() || k.len() != m.len() {
        return Err(invalid("j, k, m must have the same dimension"));
    }
    let lengths = vec![1.0; j.len()];
    let phi = TruncatedState::plane_wave(&lengths, j)?;
    let psi = TruncatedState::plane_wave(&lengths, k)?;
    let a = TorusObservable::plane_wave(m)?;
    let limit = averaged_expectation(&phi, &psi, &a, Horizon::Infinite)?.total();
    Ok((limit, phi.inner(&psi) * a.mean()))
}

/// `(N_E - 1)/N_E · (-1)^n · e^{2πiy}`: the value of `⟨δ_y^E(t), e_1 δ_y^E(t)⟩`
/// at `t = n/(4π)` in dimension one.
pub fn revival_value(set: &DualModeSet, y: f64, n: i64) -> Result<Complex64> {
    if set.dim() != 1 {
        return Err(invalid("revival value is defined in dimension one"));
    }
    let count = set.len() as f64;
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(Complex64::from_polar(sign * (count - 1.0) / count, 2.0 * PI * y))
}

/// `(√E - π)/√E`, which equals `(N_E - 1)/N_E` exactly when
/// `E = π²(2L+1)²` and approximates it to `O(1/E)` otherwise.
pub fn asymptotic_revival_constant(energy: f64) -> f64 {
    (energy.sqrt() - PI) / energy.sqrt()
}

#[derive(Clone, Debug)]
pub struct DensityProfile {
    pub resolution: usize,
    /// Row-major samples on the uniform grid `x_j = j b / resolution`.
    pub values: Vec<f64>,
    pub max: f64,
    pub min: f64,
    /// Riemann sum of the density; exact while the grid resolves every
    /// frequency present.
    pub mass: f64,
}

impl DensityProfile {
    pub fn ratio(&self) -> f64 {
        self.max / self.min
    }
}

/// `x ↦ (1/T) ∫_0^T |ψ(t, x)|² dt` on a uniform grid, for `d ≤ 2`.
pub fn density_profile(state: &TruncatedState, horizon: Horizon, resolution: usize) -> Result<DensityProfile> {
    horizon.validate()?;
    let d = state.dim();
    if d > 2 {
        return Err(invalid("density profile is implemented for d <= 2"));
    }
    if resolution == 0 {
        return Err(invalid("resolution must be positive"));
    }
    // Fourier coefficients of the averaged density, keyed by ℓ - ℓ'
    let mut freq: HashMap<Vec<i64>, Complex64> = HashMap::new();
    for (i, l) in state.modes.iter().enumerate() {
        for (j, lp) in state.modes.iter().enumerate() {
            let omega = state.eigenvalues[j] - state.eigenvalues[i];
            let delta: Vec<i64> = l.iter().zip(lp).map(|(a, b)| a - b).collect();
            let k = if delta.iter().all(|&x| x == 0) || omega == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                horizon.weight(omega)
            };
            *freq.entry(delta).or_default() += state.coefficients[j].conj() * state.coefficients[i] * k;
        }
    }
    let mut terms: Vec<(Vec<i64>, Complex64)> = freq.into_iter().collect();
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    let volume: f64 = state.lengths.iter().product();
    let points = resolution.pow(d as u32);
    let values: Vec<f64> = (0..points)
        .into_par_iter()
        .map(|p| {
            let x: Vec<f64> = if d == 1 {
                vec![p as f64 * state.lengths[0] / resolution as f64]
            } else {
                vec![
                    (p / resolution) as f64 * state.lengths[0] / resolution as f64,
                    (p % resolution) as f64 * state.lengths[1] / resolution as f64,
                ]
            };
            terms.iter().map(|(delta, c)| (c * phase_at(delta, &x, &state.lengths)).re).sum::<f64>() / volume
        })
        .collect();
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mass = values.iter().sum::<f64>() / points as f64 * volume;
    Ok(DensityProfile { resolution, values, max, min, mass })
}

/// Base bump for shrinking observables, known through its Fourier transform
/// on `R^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// `e^{-|x|²/(2w²)}`.
    Gaussian { width: f64 },
}

impl Profile {
    /// `∫ a(x) e^{-2πi ξ·x} dx`.
    pub fn transform(&self, xi: &[f64]) -> f64 {
        match *self {
            Profile::Gaussian { width } => {
                let d = xi.len() as f64;
                let r2: f64 = xi.iter().map(|x| x * x).sum();
                (2.0 * PI * width * width).powf(d / 2.0) * (-2.0 * PI * PI * width * width * r2).exp()
            }
        }
    }

    /// `|ξ|` beyond which the transform is below `rel` of its peak.
    fn frequency_cutoff(&self, rel: f64) -> f64 {
        match *self {
            Profile::Gaussian { width } => (-rel.ln() / (2.0 * PI * PI * width * width)).sqrt(),
        }
    }
}

/// Periodization of `x ↦ a(s(x - x₀))` on the unit torus:
/// `a_m = s^{-d} e^{-2πi m·x₀} â(m/s)`, truncated where `â` falls below
/// `1e-13` of its peak.
pub fn dilated_observable(profile: Profile, scale: f64, centre: &[f64]) -> Result<TorusObservable> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(invalid(format!("dilation scale must be positive, got {scale}")));
    }
    let d = centre.len();
    let radius = (scale * profile.frequency_cutoff(1e-13)).ceil() as i64;
    let side = (2 * radius + 1) as usize;
    let count = side.checked_pow(d as u32).filter(|&c| c <= MAX_MODES);
    let Some(count) = count else {
        return Err(Error::TooLarge { dim: usize::MAX, max: MAX_MODES });
    };
    let factor = scale.powi(-(d as i32));
    let mut entries = Vec::with_capacity(count);
    for flat in 0..count {
        let mut rest = flat;
        let mut m = vec![0i64; d];
        for slot in m.iter_mut().rev() {
            *slot = (rest % side) as i64 - radius;
            rest /= side;
        }
        let xi: Vec<f64> = m.iter().map(|&k| k as f64 / scale).collect();
        let value = profile.transform(&xi) * factor;
        entries.push((m.clone(), phase_at(&m, centre, &vec![1.0; d]).conj() * value));
    }
    TorusObservable::new(d, entries)
}

#[derive(Clone, Debug)]
pub struct ShrinkingRow {
    pub energy: f64,
    pub scale: f64,
    pub modes: usize,
    /// `∫ a^{E,x₀} = E^{-βd} ∫ a`.
    pub integral: f64,
    pub value: Complex64,
    pub deviation: f64,
}

/// For each `E`: the time average from `δ_y^E` of `a(E^β(x - x₀))`, against
/// its integral.
pub fn shrinking_observable_sweep(
    energies: &[f64],
    beta: f64,
    centre: &[f64],
    point: &[f64],
    profile: Profile,
    horizon: Horizon,
) -> Result<Vec<ShrinkingRow>> {
    if point.len() != centre.len() {
        return Err(invalid("centre and point differ in dimension"));
    }
    let lengths = vec![1.0; point.len()];
    energies
        .iter()
        .map(|&energy| {
            let scale = energy.powf(beta);
            let a = dilated_observable(profile, scale, centre)?;
            let set = enumerate_modes(&lengths, energy)?;
            let s = TruncatedState::sharp(&set, point)?;
            let value = averaged_expectation(&s, &s, &a, horizon)?.total();
            let integral = a.mean().re;
            Ok(ShrinkingRow { energy, scale, modes: set.len(), integral, value, deviation: (value - integral).norm() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_circle_mode_count() {
        let set = enumerate_modes(&[1.0], 100.0).unwrap();
        assert_eq!(set.len(), 3);
        let set = enumerate_modes(&[1.0], 4.0 * PI * PI).unwrap();
        assert_eq!(set.len(), 3);
        assert!(enumerate_modes(&[1.0], -1.0).is_err());
        assert!(enumerate_modes(&[0.0], 1.0).is_err());
    }

    #[test]
    fn resonant_pair_counts_in_one_dimension() {
        let set = enumerate_modes(&[1.0], 1e4).unwrap();
        // 2ℓm + m² = 0 has no solution for odd m
        assert_eq!(resonant_pair_count(&set, &[1]).unwrap(), 0);
        assert_eq!(resonant_pair_count(&set, &[2]).unwrap(), 1);
        assert!(resonant_pair_count(&set, &[0]).is_err());
    }

    #[test]
    fn degenerate_pair_values() {
        let (limit, product) = degenerate_pair_counterexample(&[1, 0], &[0, 1], &[1, -1]).unwrap();
        assert!((limit - 1.0).norm() < 1e-15);
        assert_eq!(product, Complex64::new(0.0, 0.0));
        let (limit, _) = degenerate_pair_counterexample(&[2, 0], &[0, 1], &[2, -1]).unwrap();
        assert_eq!(limit, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn box_state_is_nearly_normalized() {
        let s = TruncatedState::boxed(&[0.3], &[0.1], 1e-3).unwrap();
        assert!(s.truncation_loss() <= 1e-3);
        assert!((s.norm() * s.norm() - (1.0 - s.truncation_loss())).abs() < 1e-12);
        assert!(TruncatedState::boxed(&[0.3], &[0.0], 1e-3).is_err());
        assert!(TruncatedState::boxed(&[0.3], &[0.1], 0.0).is_err());
    }

    #[test]
    fn observable_validation() {
        assert!(TorusObservable::new(2, vec![(vec![1], Complex64::new(1.0, 0.0))]).is_err());
        let a = TorusObservable::new(1, vec![(vec![1], Complex64::new(1.0, 0.0)), (vec![1], Complex64::new(1.0, 0.0))])
            .unwrap();
        assert_eq!(a.entries().len(), 1);
        assert!(!a.is_self_adjoint(1e-12));
    }
}
