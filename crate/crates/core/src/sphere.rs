//! Zonal harmonics on `S^{d-1} ⊂ R^d`, `d ≥ 3`.
//!
//! The degree-`k` eigenspace of the Laplacian has dimension `N_{k,d}` and
//! zonal function `Z_ξ^{(k)}(η) = N_{k,d}/|S^{d-1}| · P_{k,d}(ξ·η)`, where
//! `P_{k,d}` is the Legendre polynomial of dimension `d` normalized by
//! `P_{k,d}(1) = 1`. The state concentrated at `ξ` after `n` steps weights
//! degree `k` by `μ_{n,k,d} = n!(n+d-2)! / ((n-k)!(n+k+d-2)!)`.
//!
//! Factorial-heavy quantities go through log-gamma.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Result};
use crate::quadrature::{gauss_gegenbauer, gauss_legendre, Rule};

fn check_dim(d: usize) -> Result<()> {
    if d < 3 {
        return Err(invalid(format!("sphere routines need d >= 3, got {d}")));
    }
    Ok(())
}

fn check_degree(n: usize, k: usize) -> Result<()> {
    if k > n {
        return Err(invalid(format!("degree {k} exceeds n = {n}")));
    }
    Ok(())
}

/// `|S^{d-1}| = 2π^{d/2} / Γ(d/2)`.
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / ln_gamma(h).exp()
}

/// `N_{k,d} = (2k+d-2)(k+d-3)! / (k!(d-2)!)`.
pub fn harmonic_dimension(k: usize, d: usize) -> Result<f64> {
    check_dim(d)?;
    let (kf, df) = (k as f64, d as f64);
    let log = (2.0 * kf + df - 2.0).ln() + ln_gamma(kf + df - 2.0) - ln_gamma(kf + 1.0) - ln_gamma(df - 1.0);
    Ok(log.exp())
}

fn check_argument(t: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(invalid(format!("argument {t} is outside [-1, 1]")));
    }
    Ok(())
}

/// Classical Legendre polynomial `P_n(t)` by the three-term recurrence.
pub fn legendre(n: usize, t: f64) -> Result<f64> {
    check_argument(t)?;
    legendre_general(n, 3, t)
}

/// Gegenbauer polynomial `C_n^{(α)}(t)`.
pub fn gegenbauer(n: usize, alpha: f64, t: f64) -> f64 {
    let (mut c0, mut c1) = (1.0, 2.0 * alpha * t);
    if n == 0 {
        return c0;
    }
    for k in 2..=n {
        let kf = k as f64;
        let c2 = (2.0 * t * (kf + alpha - 1.0) * c1 - (kf + 2.0 * alpha - 2.0) * c0) / kf;
        c0 = c1;
        c1 = c2;
    }
    c1
}

/// `P_{n,d}(t) = C_n^{((d-2)/2)}(t) / binom(n+d-3, n)`.
///
/// Dividing the Gegenbauer recurrence through by the binomial factor gives
/// `(n+d-3) P_n = (2n+d-4) t P_{n-1} - (n-1) P_{n-2}`, which stays bounded
/// by 1 on `[-1, 1]`.
pub fn legendre_general(n: usize, d: usize, t: f64) -> Result<f64> {
    check_dim(d)?;
    check_argument(t)?;
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return Ok(1.0);
    }
    for k in 2..=n {
        let (kf, df) = (k as f64, d as f64);
        let p2 = ((2.0 * kf + df - 4.0) * t * p1 - (kf - 1.0) * p0) / (kf + df - 3.0);
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

/// `Z_ξ^{(k)}(η)` as a function of `t = ξ·η`.
pub fn zonal_value(k: usize, d: usize, t: f64) -> Result<f64> {
    Ok(harmonic_dimension(k, d)? / sphere_area(d) * legendre_general(k, d, t)?)
}

/// `μ_{n,k,d} = n!(n+d-2)! / ((n-k)!(n+k+d-2)!)`.
pub fn projection_weight(n: usize, k: usize, d: usize) -> Result<f64> {
    check_dim(d)?;
    check_degree(n, k)?;
    let (nf, kf, df) = (n as f64, k as f64, d as f64);
    let log = ln_gamma(nf + 1.0) + ln_gamma(nf + df - 1.0) - ln_gamma(nf - kf + 1.0) - ln_gamma(nf + kf + df - 1.0);
    Ok(log.exp())
}

fn weights(n: usize, d: usize) -> Result<Vec<(f64, f64)>> {
    let area = sphere_area(d);
    (0..=n)
        .map(|k| Ok((projection_weight(n, k, d)?, harmonic_dimension(k, d)? / area)))
        .collect()
}

/// `M_{n,d} = Σ_k μ² N_{k,d} / |S^{d-1}|`.
pub fn normalization(n: usize, d: usize) -> Result<f64> {
    Ok(weights(n, d)?.iter().map(|(mu, z)| mu * mu * z).sum())
}

/// `Σ_k μ N_{k,d} / |S^{d-1}|`, the value at the pole.
pub fn pole_value_sum(n: usize, d: usize) -> Result<f64> {
    Ok(weights(n, d)?.iter().map(|(mu, z)| mu * z).sum())
}

/// Closed form of [`pole_value_sum`]:
/// `(n+d-2)! / ((4π)^{(d-1)/2} Γ(n + (d-1)/2))`, equal to `(n+1)/(4π)` for
/// `d = 3`.
pub fn pole_value(n: usize, d: usize) -> Result<f64> {
    check_dim(d)?;
    let (nf, df) = (n as f64, d as f64);
    let log = ln_gamma(nf + df - 1.0) - ln_gamma(nf + (df - 1.0) / 2.0) - (df - 1.0) / 2.0 * (4.0 * PI).ln();
    Ok(log.exp())
}

/// `p^{(n)}(t) = (1/M) Σ_k μ² Z^{(k)}(t)²`.
pub fn concentration_density(n: usize, d: usize, t: f64) -> Result<f64> {
    check_argument(t)?;
    let mut total = 0.0;
    let mut norm = 0.0;
    // P_{k,d}(t) by the same recurrence as `legendre_general`, one pass
    let (mut p0, mut p1) = (1.0, t);
    for (k, (mu, z)) in weights(n, d)?.into_iter().enumerate() {
        let p = match k {
            0 => 1.0,
            1 => t,
            _ => {
                let (kf, df) = (k as f64, d as f64);
                let p2 = ((2.0 * kf + df - 4.0) * t * p1 - (kf - 1.0) * p0) / (kf + df - 3.0);
                p0 = p1;
                p1 = p2;
                p2
            }
        };
        total += mu * mu * (z * p).powi(2);
        norm += mu * mu * z;
    }
    Ok(total / norm)
}

/// Quadrature rule for `∫_{-1}^1 f(t) (1-t²)^{(d-3)/2} dt`.
fn funk_hecke_rule(nodes: usize, d: usize) -> Result<Rule> {
    if d == 3 {
        gauss_legendre(nodes)
    } else {
        gauss_gegenbauer(nodes, (d as f64 - 2.0) / 2.0)
    }
}

/// `∫_{S^{d-1}} p^{(n)} dS` by Funk–Hecke and a `4n+16`-node Gauss rule.
pub fn density_mass(n: usize, d: usize) -> Result<f64> {
    check_dim(d)?;
    let rule = funk_hecke_rule(4 * n + 16, d)?;
    let mut total = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        total += w * concentration_density(n, d, t)?;
    }
    Ok(total * sphere_area(d - 1))
}

/// `((2k+1)/2) ∫ t² P_k(t)² dt = (1/(2k+1)) (k²/(2k-1) + (k+1)²/(2k+3))`.
pub fn quadratic_moment(k: usize) -> f64 {
    let kf = k as f64;
    let lower = if k == 0 { 0.0 } else { kf * kf / (2.0 * kf - 1.0) };
    (lower + (kf + 1.0).powi(2) / (2.0 * kf + 3.0)) / (2.0 * kf + 1.0)
}

/// Same quantity by Gauss–Legendre quadrature.
pub fn quadratic_moment_quadrature(k: usize) -> Result<f64> {
    let rule = gauss_legendre(2 * k + 4)?;
    let mut total = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        total += w * t * t * legendre(k, t)?.powi(2);
    }
    Ok(total * (2 * k + 1) as f64 / 2.0)
}

/// `(1/M) Σ_k μ² (1/4π)(k²/(2k-1) + (k+1)²/(2k+3))` on `S²`, with the lower
/// bound `1/2 - 1/(24πM)`.
pub fn s_state_quadratic_average(n: usize) -> Result<(f64, f64)> {
    let m = normalization(n, 3)?;
    let mut total = 0.0;
    for k in 0..=n {
        let mu = projection_weight(n, k, 3)?;
        total += mu * mu * (2 * k + 1) as f64 * quadratic_moment(k) / (4.0 * PI);
    }
    Ok((total / m, 0.5 - 1.0 / (24.0 * PI * m)))
}

/// `Σ_k μ_{n,k,3}²`.
pub fn dixon_sum(n: usize) -> Result<f64> {
    (0..=n).map(|k| projection_weight(n, k, 3).map(|mu| mu * mu)).sum()
}

/// `Γ(3/2)Γ(3/2+2n)Γ(2+n)² / (Γ(2)Γ(2+2n)Γ(3/2+n)²)`.
pub fn dixon_closed_form(n: usize) -> f64 {
    let nf = n as f64;
    (ln_gamma(1.5) + ln_gamma(1.5 + 2.0 * nf) + 2.0 * ln_gamma(2.0 + nf)
        - ln_gamma(2.0)
        - ln_gamma(2.0 + 2.0 * nf)
        - 2.0 * ln_gamma(1.5 + nf))
    .exp()
}

/// `(1/2)√(πn/2)`.
pub fn dixon_asymptotic(n: usize) -> f64 {
    0.5 * (PI * n as f64 / 2.0).sqrt()
}

/// `⟨R_ξ^{(n)}, f(ξ·)⟩ = Σ_k μ_k N_{k,d}/|S^{d-1}| · |S^{d-2}| ∫ P_{k,d} f (1-t²)^{(d-3)/2} dt`,
/// which tends to `f(1)` as `n` grows.
pub fn delta_sequence_check(n: usize, d: usize, f: impl Fn(f64) -> f64) -> Result<f64> {
    check_dim(d)?;
    let rule = funk_hecke_rule(4 * n + 16, d)?;
    let fvals: Vec<f64> = rule.nodes.iter().map(|&t| f(t)).collect();
    let ring = sphere_area(d - 1);
    let mut total = 0.0;
    for (k, (mu, z)) in weights(n, d)?.into_iter().enumerate() {
        let mut integral = 0.0;
        for ((&t, &w), fv) in rule.nodes.iter().zip(&rule.weights).zip(&fvals) {
            integral += w * legendre_general(k, d, t)? * fv;
        }
        total += mu * z * ring * integral;
    }
    Ok(total)
}

/// Whether the Laplace eigenvalues `k(k+d-2)`, `k ≤ n`, are pairwise
/// distinct. Checked in integers.
pub fn degrees_resolve(n: usize, d: usize) -> bool {
    let values: Vec<u128> = (0..=n as u128).map(|k| k * (k + d as u128 - 2)).collect();
    values.windows(2).all(|w| w[0] < w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((harmonic_dimension(0, 3).unwrap() - 1.0).abs() < 1e-13);
        assert!((harmonic_dimension(1, 3).unwrap() - 3.0).abs() < 1e-13);
        assert!((harmonic_dimension(2, 4).unwrap() - 9.0).abs() < 1e-12);
        assert!((legendre(2, 0.5).unwrap() + 0.125).abs() < 1e-15);
        assert!((quadratic_moment(0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((quadratic_moment(1) - 0.6).abs() < 1e-15);
        assert!((projection_weight(5, 0, 3).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(harmonic_dimension(1, 2).is_err());
        assert!(projection_weight(3, 4, 3).is_err());
        assert!(legendre(3, 1.5).is_err());
    }

    #[test]
    fn pole_value_in_three_dimensions() {
        for n in [0, 1, 7, 40] {
            assert!((pole_value(n, 3).unwrap() - (n as f64 + 1.0) / (4.0 * PI)).abs() < 1e-12);
        }
    }
}
