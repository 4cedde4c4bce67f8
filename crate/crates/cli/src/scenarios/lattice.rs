use ergowalk::lattice::{
    exact_time_average_limit, fixed_time_experiment, oscillation_experiment, oscillation_amplitude, slow_mode_deviation,
    slow_mode_observable, LatticeObservable, LatticeTorus, StartSite,
};
use ergowalk::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fit, StepError};
use crate::config::{BoundSweep, FixedTime, Oscillation, SlowMode, Start};
use crate::report::{Check, Report, Table};

const CLOSED_FORM_TOL: f64 = 1e-12;
const SLOPE_TOL: f64 = 0.05;
const FIXED_TIME_GAP: f64 = 0.4;
const TAIL_AMPLITUDE: f64 = 0.1;
const WINDOWED_AMPLITUDE: f64 = 0.05;

pub fn slow_mode(s: &SlowMode, report: &mut Report) -> Result<(), StepError> {
    let mut table = Table::new("deviation", &["N", "site", "limit_minus_mean", "closed_form", "error"]);
    let mut worst: f64 = 0.0;
    let mut families: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
    for &side in &s.sizes {
        let torus = LatticeTorus::new(s.dim, side)?;
        let a = slow_mode_observable(torus)?;
        let mut v = vec![0; s.dim];
        v[0] = s.site;
        let deviation = exact_time_average_limit(&torus, &v, &a)? - a.mean();
        let closed = slow_mode_deviation(&torus, &v);
        let error = (deviation - Complex64::new(closed, 0.0)).norm();
        worst = worst.max(error);
        table.push(vec![side.into(), s.site.into(), deviation.re.into(), closed.into(), error.into()]);
        families[side % 2].push((side as f64, deviation.norm()));
    }
    report.tables.push(table);
    report.check(Check::at_most("limit minus mean against the closed form", worst, CLOSED_FORM_TOL));
    // the two parities have different constants, so each gets its own line
    let mut fitted = false;
    for (family, name) in families.iter().zip(["even N", "odd N"]) {
        if family.len() < 3 {
            continue;
        }
        let (sizes, devs): (Vec<f64>, Vec<f64>) = family.iter().cloned().unzip();
        let rate = fit(&sizes, &devs)?;
        report.check(Check::at_most(format!("{name} log-slope distance from -1"), (rate.slope + 1.0).abs(), SLOPE_TOL));
        report.fit(name, rate);
        fitted = true;
    }
    report.check(Check::holds("some parity family has at least 3 sizes", fitted));
    Ok(())
}

/// `f̂_k = (u + iw)/(1 + |k|²)` with `u, w` uniform in `[-1, 1]`, `|k|∞ ≤ K`.
fn random_band_limited(rng: &mut ChaCha8Rng, dim: usize, cutoff: i64) -> Vec<(Vec<i64>, Complex64)> {
    let width = (2 * cutoff + 1) as usize;
    (0..width.pow(dim as u32))
        .map(|flat| {
            let mut rest = flat;
            let k: Vec<i64> = (0..dim)
                .map(|_| {
                    let c = (rest % width) as i64 - cutoff;
                    rest /= width;
                    c
                })
                .collect();
            let norm2: i64 = k.iter().map(|x| x * x).sum();
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (k, z / (1 + norm2) as f64)
        })
        .collect()
}

pub fn bound(s: &BoundSweep, report: &mut Report) -> Result<(), StepError> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut table = Table::new("bound", &["d", "N", "instance", "site", "deviation", "bound", "ratio"]);
    let mut worst: f64 = 0.0;
    for &dim in &s.dims {
        for &side in &s.sizes {
            let torus = LatticeTorus::new(dim, side)?;
            for instance in 0..s.instances {
                let fhat = random_band_limited(&mut rng, dim, s.cutoff);
                let site: Vec<usize> = (0..dim).map(|_| rng.gen_range(0..side)).collect();
                let a = LatticeObservable::scaled_fourier(torus, &fhat)?;
                let deviation = (exact_time_average_limit(&torus, &site, &a)? - a.mean()).norm();
                let mass: f64 =
                    fhat.iter().filter(|(k, _)| k.iter().any(|&x| x != 0)).map(|(_, z)| z.norm()).sum();
                let bound = 2.0 * mass / side as f64;
                let ratio = deviation / bound;
                worst = worst.max(ratio);
                table.push(vec![
                    dim.into(),
                    side.into(),
                    instance.into(),
                    torus.index(&site).into(),
                    deviation.into(),
                    bound.into(),
                    ratio.into(),
                ]);
            }
        }
    }
    report.tables.push(table);
    report.check(Check::at_most("largest deviation relative to (2/N) sum |f_k|", worst, 1.0));
    Ok(())
}

pub fn fixed_time(s: &FixedTime, report: &mut Report) -> Result<(), StepError> {
    let start = match s.start {
        Start::Origin => StartSite::Origin,
        Start::Best => StartSite::Best,
    };
    let rows = fixed_time_experiment(1, &s.sizes, &s.times, &start, |_| s.horizon, |x| 1.0 - x[0])?;
    let mut table = Table::new(
        "fixed_time",
        &["N", "t", "site", "instantaneous", "mean", "gap", "horizon", "averaged_gap"],
    );
    let mut smallest = f64::INFINITY;
    for r in &rows {
        smallest = smallest.min(r.gap);
        table.push(vec![
            r.side.into(),
            r.time.into(),
            r.start[0].into(),
            r.instantaneous.into(),
            r.mean.into(),
            r.gap.into(),
            r.horizon.into(),
            r.averaged_gap.into(),
        ]);
    }
    report.tables.push(table);
    report.check(Check::at_least("smallest fixed-time gap above the mean", smallest, FIXED_TIME_GAP));
    Ok(())
}

pub fn oscillation(s: &Oscillation, report: &mut Report) -> Result<(), StepError> {
    let step = (s.end - s.start) / (s.samples - 1) as f64;
    let times: Vec<f64> = (0..s.samples).map(|i| s.start + step * i as f64).collect();
    let rows = oscillation_experiment(s.side, s.site, &times)?;
    let mut table = Table::new("series", &["t", "re_instantaneous", "im_instantaneous", "re_windowed", "im_windowed"]);
    for r in &rows {
        table.push(vec![
            r.time.into(),
            r.instantaneous.re.into(),
            r.instantaneous.im.into(),
            r.windowed.re.into(),
            r.windowed.im.into(),
        ]);
    }
    let inst: Vec<Complex64> = rows.iter().map(|r| r.instantaneous).collect();
    let windowed: Vec<Complex64> = rows.iter().map(|r| r.windowed).collect();
    report.tables.push(table);
    report.check(Check::compare(
        "instantaneous oscillation amplitude",
        oscillation_amplitude(&inst, s.side, s.site),
        crate::report::Relation::Above,
        TAIL_AMPLITUDE,
    ));
    report.check(Check::compare(
        "unit-window average oscillation amplitude",
        oscillation_amplitude(&windowed, s.side, s.site),
        crate::report::Relation::Above,
        WINDOWED_AMPLITUDE,
    ));
    Ok(())
}
