use std::f64::consts::PI;

use ergowalk::torus::{
    asymptotic_revival_constant, averaged_expectation, enumerate_modes, instantaneous_expectation, sharp_state_average,
    Horizon, TorusObservable, TruncatedState,
};
use ergowalk::Complex64;

use super::{fit, strictly_decreasing, StepError};
use crate::config::{BoxStates, Revival, TorusRate};
use crate::report::{Check, Report, Table};

const RATE_CEILING: f64 = -0.2;
const REVIVAL_TOL: f64 = 1e-10;
const REVIVAL_FLOOR: f64 = 0.5;
const BOX_CEILING: f64 = 0.05;
/// Parseval loss allowed when truncating box states.
const BOX_LOSS: f64 = 1e-3;

/// `1/2 + Σ_{1≤|m|≤K} a_m e_m` with `a_{±m} = 0.3 (1 ± i/2) / m²`.
fn smooth_observable(cutoff: i64) -> Result<TorusObservable, StepError> {
    let mut entries = vec![(vec![0], Complex64::new(0.5, 0.0))];
    for m in 1..=cutoff {
        let a = Complex64::new(0.3, 0.15) / (m * m) as f64;
        entries.push((vec![m], a));
        entries.push((vec![-m], a.conj()));
    }
    Ok(TorusObservable::new(1, entries)?)
}

pub fn rate(s: &TorusRate, report: &mut Report) -> Result<(), StepError> {
    let a = smooth_observable(s.cutoff)?;
    let mean = a.mean();
    let mut table =
        Table::new("deviation", &["E", "modes", "mean_term", "resonant_term", "oscillatory_term", "deviation"]);
    let mut deviations = Vec::new();
    for &energy in &s.energies {
        let set = enumerate_modes(&[1.0], energy)?;
        let value = sharp_state_average(&set, &[s.point], &a, s.horizon)?;
        let deviation = (value.total() - mean).norm();
        deviations.push(deviation);
        table.push(vec![
            energy.into(),
            set.len().into(),
            value.mean_term.re.into(),
            value.resonant_term.re.into(),
            value.oscillatory_term.re.into(),
            deviation.into(),
        ]);
    }
    report.tables.push(table);
    report.check(Check::holds("deviation decreases along the energy sweep", strictly_decreasing(&deviations)));
    let rate = fit(&s.energies, &deviations)?;
    report.check(Check::at_most("fitted log-slope of the deviation", rate.slope, RATE_CEILING));
    report.fit("deviation", rate);
    Ok(())
}

pub fn revival(s: &Revival, report: &mut Report) -> Result<(), StepError> {
    let a = TorusObservable::plane_wave(&[1])?;
    let wave = Complex64::from_polar(1.0, 2.0 * PI * s.point);
    let mut table = Table::new(
        "revival",
        &["L", "E", "modes", "n", "re_value", "im_value", "re_expected", "im_expected", "error"],
    );
    let mut worst: f64 = 0.0;
    let mut last = 0.0;
    for &half in &s.half_widths {
        let energy = PI * PI * ((2 * half + 1) as f64).powi(2);
        let set = enumerate_modes(&[1.0], energy)?;
        let psi = TruncatedState::sharp(&set, &[s.point])?;
        let constant = asymptotic_revival_constant(energy);
        for &n in &s.steps {
            let value = instantaneous_expectation(&psi, &psi, &a, n as f64 / (4.0 * PI))?;
            let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let expected = wave * sign * constant;
            let error = (value - expected).norm();
            worst = worst.max(error);
            last = value.norm();
            table.push(vec![
                (half as i64).into(),
                energy.into(),
                set.len().into(),
                n.into(),
                value.re.into(),
                value.im.into(),
                expected.re.into(),
                expected.im.into(),
                error.into(),
            ]);
        }
    }
    report.tables.push(table);
    report.check(Check::at_most("instantaneous value against c_E (-1)^n e_1(y)", worst, REVIVAL_TOL));
    report.check(Check::at_least("modulus at the largest energy, where the mean is 0", last, REVIVAL_FLOOR));
    Ok(())
}

pub fn boxes(s: &BoxStates, report: &mut Report) -> Result<(), StepError> {
    let a = TorusObservable::plane_wave(&[s.frequency])?;
    let mut table = Table::new("box_states", &["eps", "modes", "truncation_loss", "abs_value"]);
    let mut values = Vec::new();
    for &eps in &s.widths {
        let state = TruncatedState::boxed(&[s.corner], &[eps], BOX_LOSS)?;
        let value = averaged_expectation(&state, &state, &a, Horizon::Infinite)?.total().norm();
        values.push(value);
        table.push(vec![eps.into(), state.modes().len().into(), state.truncation_loss().into(), value.into()]);
    }
    let narrow = s.widths[0];
    let phi = TruncatedState::boxed(&[s.disjoint[0]], &[narrow], BOX_LOSS)?;
    let psi = TruncatedState::boxed(&[s.disjoint[1]], &[narrow], BOX_LOSS)?;
    let cross = averaged_expectation(&phi, &psi, &a, Horizon::Infinite)?.total().norm();
    let mut pair = Table::new("disjoint", &["eps", "x", "y", "abs_overlap", "abs_value"]);
    pair.push(vec![narrow.into(), s.disjoint[0].into(), s.disjoint[1].into(), phi.inner(&psi).norm().into(), cross.into()]);
    report.tables.push(table);
    report.tables.push(pair);
    // widths are listed increasing, so shrinking boxes read right to left
    let shrinking: Vec<f64> = values.iter().rev().cloned().collect();
    report.check(Check::holds("|value| decreases as the box shrinks", strictly_decreasing(&shrinking)));
    report.check(Check::at_most("|value| at the smallest width", values[0], BOX_CEILING));
    report.check(Check::at_most("|cross average| of disjoint boxes at the smallest width", cross, BOX_CEILING));
    Ok(())
}
