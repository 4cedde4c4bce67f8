//! Multidimensional DFT on `side^dim` row-major arrays.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place unnormalized DFT along every axis.
///
/// `Forward` uses the kernel `e^{-2πi k·n/N}`, `Inverse` uses `e^{+2πi k·n/N}`.
pub(crate) fn dft(data: &mut [Complex64], side: usize, dim: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), side.pow(dim as u32));
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(side, direction);
    let mut line = vec![Complex64::new(0.0, 0.0); side];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = side.pow((dim - 1 - axis) as u32);
        let block = stride * side;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, value) in line.iter().enumerate() {
                    data[start + k * stride] = *value;
                }
            }
        }
    }
}

/// Row-major multi-index of a flat position.
pub(crate) fn unflatten(mut index: usize, side: usize, dim: usize) -> Vec<usize> {
    let mut out = vec![0; dim];
    for slot in out.iter_mut().rev() {
        *slot = index % side;
        index /= side;
    }
    out
}

pub(crate) fn flatten(coords: &[usize], side: usize) -> usize {
    coords.iter().fold(0, |acc, &c| acc * side + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matches_naive_dft_in_two_dimensions() {
        let (side, dim) = (5, 2);
        let data: Vec<Complex64> = (0..25)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.1).cos()))
            .collect();
        let mut fast = data.clone();
        dft(&mut fast, side, dim, FftDirection::Forward);
        for k in 0..25 {
            let kk = unflatten(k, side, dim);
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..25 {
                let nn = unflatten(n, side, dim);
                let phase = -2.0 * PI * (kk[0] * nn[0] + kk[1] * nn[1]) as f64 / side as f64;
                acc += data[n] * Complex64::from_polar(1.0, phase);
            }
            assert!((acc - fast[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn flatten_roundtrip() {
        for i in 0..64 {
            assert_eq!(flatten(&unflatten(i, 4, 3), 4), i);
        }
    }
}
