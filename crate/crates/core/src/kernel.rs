//! Closed-form time-average kernels.
//!
//! All three integrate the phase `e^{itω}` over a time window and divide by
//! its length, so a resonant frequency (`ω = 0`) always maps to exactly 1.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `sin(x)/x` with the removable singularity filled in.
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// `(1/T) ∫_0^T e^{itω} dt = (e^{iTω} - 1) / (iTω)`.
pub fn continuous(horizon: f64, omega: f64) -> Complex64 {
    let half = 0.5 * horizon * omega;
    Complex64::from_polar(sinc(half), half)
}

/// Average of `e^{itω}` over `[start, end]`.
///
/// With `[T-1, T]` this is `e^{iTω}(1 - e^{-iω})/(iω)`.
pub fn window(start: f64, end: f64, omega: f64) -> Complex64 {
    Complex64::from_polar(1.0, start * omega) * continuous(end - start, omega)
}

/// `(1/T) Σ_{t=0}^{T-1} e^{itω}`, equal to 1 whenever `ω ∈ 2πZ`.
pub fn discrete(steps: u64, omega: f64) -> Complex64 {
    assert!(steps > 0, "discrete average needs at least one step");
    // only ω mod 2π matters at integer times
    let reduced = omega - 2.0 * PI * (omega / (2.0 * PI)).round();
    let half = 0.5 * reduced;
    let denom = half.sin();
    let t = steps as f64;
    let modulus = if denom.abs() < 1e-300 {
        1.0
    } else {
        (t * half).sin() / (t * denom)
    };
    Complex64::from_polar(modulus, (t - 1.0) * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_continuous(t: f64, w: f64) -> Complex64 {
        if w == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        (Complex64::new(0.0, t * w).exp() - 1.0) / Complex64::new(0.0, t * w)
    }

    #[test]
    fn continuous_matches_textbook_form() {
        for &(t, w) in &[(1.0, 0.3), (10.0, -2.5), (1e5, 1e-3), (3.0, 7.0)] {
            assert!((continuous(t, w) - naive_continuous(t, w)).norm() < 1e-12);
        }
        assert_eq!(continuous(5.0, 0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn window_matches_paper_form() {
        let (t, b) = (40.0, 1.3);
        let i = Complex64::i();
        let expected = (i * t * b).exp() * (1.0 - (-i * b).exp()) / (i * b);
        assert!((window(t - 1.0, t, b) - expected).norm() < 1e-12);
    }

    #[test]
    fn discrete_matches_direct_sum() {
        for &(steps, w) in &[(1u64, 0.7), (7, 0.7), (100, 2.0), (13, -4.0), (50, 1e-9)] {
            let direct: Complex64 = (0..steps)
                .map(|s| Complex64::from_polar(1.0, s as f64 * w))
                .sum::<Complex64>()
                / steps as f64;
            assert!((discrete(steps, w) - direct).norm() < 1e-12, "{steps} {w}");
        }
        assert!((discrete(9, 2.0 * PI) - 1.0).norm() < 1e-12);
        assert!((discrete(9, -6.0 * PI) - 1.0).norm() < 1e-12);
    }
}
