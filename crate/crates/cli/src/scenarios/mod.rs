pub mod crystal;
pub mod lattice;
pub mod sphere;
pub mod torus;

use crate::fit::{fit_rate, RateFit};
use crate::StepError;

fn fit(sweep: &[f64], deviations: &[f64]) -> Result<RateFit, StepError> {
    Ok(fit_rate(sweep, deviations)?)
}

fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}
