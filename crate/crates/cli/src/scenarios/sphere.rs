use ergowalk::sphere::{
    concentration_density, dixon_asymptotic, dixon_closed_form, dixon_sum, quadratic_moment,
    quadratic_moment_quadrature, s_state_quadratic_average,
};

use super::{fit, StepError};
use crate::config::SphereGap;
use crate::report::{Check, Report, Table};

const QUADRATURE_TOL: f64 = 1e-10;
const HIGH_DEGREE_TOL: f64 = 2e-3;
/// Rounding slack for the lower bound, which is attained at `n = 0`.
const BOUND_SLACK: f64 = 1e-12;
const GAP_AVERAGE: f64 = 0.45;
const GAP_OVER_UNIFORM: f64 = 0.11;
const PEAK_SLOPE: f64 = 0.2;
const DIXON_TOL: f64 = 1e-10;
const DIXON_RATIO_TOL: f64 = 0.05;

pub fn gap(s: &SphereGap, report: &mut Report) -> Result<(), StepError> {
    let mut moments = Table::new("moments", &["k", "closed_form", "quadrature", "error"]);
    let mut worst: f64 = 0.0;
    for k in 0..=s.max_degree {
        let closed = quadratic_moment(k);
        let quad = quadratic_moment_quadrature(k)?;
        worst = worst.max((closed - quad).abs());
        moments.push(vec![k.into(), closed.into(), quad.into(), (closed - quad).abs().into()]);
    }
    let uniform = quadratic_moment(0);

    let mut states = Table::new("s_state", &["n", "average", "lower_bound"]);
    let mut margin = f64::INFINITY;
    for n in 0..=s.max_steps {
        let (average, bound) = s_state_quadratic_average(n)?;
        margin = margin.min(average - bound);
        states.push(vec![n.into(), average.into(), bound.into()]);
    }
    let (at_gap, _) = s_state_quadratic_average(s.gap_steps)?;

    let mut peaks = Table::new("peak", &["n", "density_at_pole"]);
    let mut values = Vec::new();
    for &n in &s.peak_steps {
        let v = concentration_density(n, 3, 1.0)?;
        values.push(v);
        peaks.push(vec![n.into(), v.into()]);
    }
    let sweep: Vec<f64> = s.peak_steps.iter().map(|&n| n as f64).collect();
    let rate = fit(&sweep, &values)?;

    let mut dixon = Table::new("dixon", &["n", "sum", "closed_form", "relative_error"]);
    let mut worst_dixon: f64 = 0.0;
    for n in 0..=s.dixon_steps {
        let sum = dixon_sum(n)?;
        let closed = dixon_closed_form(n);
        let rel = (sum - closed).abs() / closed;
        worst_dixon = worst_dixon.max(rel);
        dixon.push(vec![n.into(), sum.into(), closed.into(), rel.into()]);
    }
    let ratio = dixon_closed_form(s.dixon_steps) / dixon_asymptotic(s.dixon_steps);

    report.tables.extend([moments, states, peaks, dixon]);
    report.check(Check::at_most("moment closed form against quadrature", worst, QUADRATURE_TOL));
    report.check(Check::at_most(
        format!("|moment(k={}) - 1/2|", s.degree),
        (quadratic_moment(s.degree) - 0.5).abs(),
        HIGH_DEGREE_TOL,
    ));
    report.check(Check::at_most("|uniform average - 1/3|", (uniform - 1.0 / 3.0).abs(), 1e-15));
    report.check(Check::at_least("smallest margin over 1/2 - 1/(24 pi M)", margin, -BOUND_SLACK));
    report.check(Check::at_least(format!("S-state average at n={}", s.gap_steps), at_gap, GAP_AVERAGE));
    report.check(Check::at_least(
        format!("S-state average minus uniform at n={}", s.gap_steps),
        at_gap - uniform,
        GAP_OVER_UNIFORM,
    ));
    report.check(Check::holds("pole density increases with n", values.windows(2).all(|w| w[0] < w[1])));
    report.check(Check::at_least("fitted log-slope of the pole density", rate.slope, PEAK_SLOPE));
    report.fit("pole_density", rate);
    report.check(Check::at_most("Dixon sum relative error", worst_dixon, DIXON_TOL));
    report.check(Check::at_most(
        format!("|closed form / asymptotic - 1| at n={}", s.dixon_steps),
        (ratio - 1.0).abs(),
        DIXON_RATIO_TOL,
    ));
    Ok(())
}
