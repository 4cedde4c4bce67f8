//! Gauss quadrature on `[-1, 1]`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};

/// Nodes and weights of an `n`-point rule, nodes ascending.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre rule by Newton iteration on `P_n`; exact for polynomials
/// of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Result<Rule> {
    if n == 0 {
        return Err(invalid("quadrature needs at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                let (_, dp) = legendre_with_derivative(n, x);
                deriv = dp;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok(Rule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss rule for the weight `(1 - t²)^{α - 1/2}`, `α > 0`, by the
/// Golub–Welsch eigenvalue method. Cubic in `n`; meant for moderate sizes.
pub fn gauss_gegenbauer(n: usize, alpha: f64) -> Result<Rule> {
    if n == 0 {
        return Err(invalid("quadrature needs at least one node"));
    }
    if !(alpha > 0.0) {
        return Err(invalid(format!("Gegenbauer parameter must be positive, got {alpha}")));
    }
    if (alpha - 0.5).abs() < 1e-15 {
        return gauss_legendre(n);
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let beta = kf * (kf + 2.0 * alpha - 1.0) / (4.0 * (kf + alpha) * (kf + alpha - 1.0));
        jacobi[(k, k - 1)] = beta.sqrt();
        jacobi[(k - 1, k)] = beta.sqrt();
    }
    let mass = (0.5 * PI.ln() + ln_gamma(alpha + 0.5) - ln_gamma(alpha + 1.0)).exp();
    let (values, vectors) = crate::spectral::hermitian_eigen(&jacobi.map(|x| Complex64::new(x, 0.0)))?;
    let mut pairs: Vec<(f64, f64)> = (0..n).map(|i| (values[i], mass * vectors[(0, i)].norm_sqr())).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_monomials() {
        let rule = gauss_legendre(12).unwrap();
        for k in 0..24 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((rule.integrate(|x| x.powi(k)) - exact).abs() < 1e-14, "degree {k}");
        }
    }

    #[test]
    fn large_rule_weights_sum_to_two() {
        let rule = gauss_legendre(2016).unwrap();
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn chebyshev_second_kind_weight() {
        // α = 1: weight √(1 - t²), ∫ = π/2, ∫ t² = π/8
        let rule = gauss_gegenbauer(10, 1.0).unwrap();
        assert!((rule.integrate(|_| 1.0) - PI / 2.0).abs() < 1e-13);
        assert!((rule.integrate(|x| x * x) - PI / 8.0).abs() < 1e-13);
    }
}
