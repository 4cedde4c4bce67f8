//! Least-squares rates in log-log coordinates.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct RateFit {
    pub sweep: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Fitted exponent `p` in `deviation ≈ C · sweep^p`.
    pub slope: f64,
    /// `ln C`.
    pub intercept: f64,
    /// Root mean square of the log residuals.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least 3 points to fit a rate, got {0}")]
    TooFewPoints(usize),
    #[error("sweep has {sweep} values but there are {deviations} deviations")]
    LengthMismatch { sweep: usize, deviations: usize },
    #[error("{what} {value} at index {index} is not positive, so it has no logarithm")]
    Nonpositive { what: &'static str, index: usize, value: f64 },
    #[error("sweep values are all equal")]
    DegenerateSweep,
}

pub fn fit_rate(sweep: &[f64], deviations: &[f64]) -> Result<RateFit, FitError> {
    if sweep.len() != deviations.len() {
        return Err(FitError::LengthMismatch { sweep: sweep.len(), deviations: deviations.len() });
    }
    if sweep.len() < 3 {
        return Err(FitError::TooFewPoints(sweep.len()));
    }
    for (what, values) in [("sweep value", sweep), ("deviation", deviations)] {
        if let Some(index) = values.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(FitError::Nonpositive { what, index, value: values[index] });
        }
    }
    let xs: Vec<f64> = sweep.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = deviations.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FitError::DegenerateSweep);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sq: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(RateFit {
        sweep: sweep.to_vec(),
        deviations: deviations.to_vec(),
        slope,
        intercept,
        residual: (sq / n).sqrt(),
    })
}
