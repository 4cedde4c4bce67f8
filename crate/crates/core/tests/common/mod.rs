#![allow(dead_code)]

use ergowalk::spectral::HermitianOperator;
use ergowalk::Complex64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Composite Simpson rule over `[a, b]` with at least `min_intervals`
/// intervals (rounded up to even).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, min_intervals: usize) -> f64 {
    let n = (min_intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Interval count so that `ω_max · step ≤ 0.01`.
pub fn simpson_intervals(omega_max: f64, length: f64) -> usize {
    (length * omega_max / 0.01).ceil().max(2.0) as usize
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random Hermitian matrix with entries uniform in the unit square,
/// scaled to spectral norm at most `radius`.
pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> HermitianOperator {
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let norm = m.clone().symmetric_eigen().eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let scaled = m / Complex64::new(norm / radius, 0.0);
    // re-symmetrize after scaling to kill rounding asymmetry
    let sym = (&scaled + scaled.adjoint()) * Complex64::new(0.5, 0.0);
    HermitianOperator::new(sym).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> nalgebra::DVector<Complex64> {
    let v = nalgebra::DVector::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}
