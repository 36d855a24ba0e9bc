use dirac_spectra::potential::Var;
use dirac_spectra::radial::{self as rad, BandClass, Trend};

use super::{ordered, profile, radial_system};
use crate::args::ProfileArgs;
use crate::error::{CliError, Context};
use crate::output::{list, Cell, Report, Table};

fn profile_params(report: &mut Report, p: &ProfileArgs) {
    report.param("eta", p.eta.as_str());
    report.param("dim", p.dim);
}

pub fn bands(p: &ProfileArgs, period: f64, grid: &[f64], tol: f64, dry: bool) -> Result<Report, CliError> {
    let eta = profile("eta", &p.eta, Var::R)?;
    let mut report = Report::new("bands");
    profile_params(&mut report, p);
    report.param("p", period);
    report.param("lambda_points", grid.len());
    report.param("lambda_min", grid.first().copied());
    report.param("lambda_max", grid.last().copied());
    report.param("tol", tol);
    if dry {
        return Ok(report);
    }
    let map = rad::band_map(&eta, period, grid, tol).at(|| "band map".into())?;
    let mut t = Table::new("bands", &["lambda", "discriminant", "class"]);
    for r in &map.rows {
        let class = match r.class {
            BandClass::Band => "band",
            BandClass::Exceptional => "exceptional",
        };
        t.push(vec![r.lambda.into(), r.discriminant.into(), class.into()]);
    }
    let ex: Vec<f64> = map.exceptional().map(|r| r.lambda).collect();
    report.note("mean", map.mean);
    report.note("exceptional_count", ex.len());
    report.note("exceptional", list(&ex));
    report.tables.push(t);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn monodromy(p: &ProfileArgs, period: f64, k: f64, lambdas: &[f64], js: &[u32], tol: f64, dry: bool) -> Result<Report, CliError> {
    let sys = radial_system(p, k, 0.0)?.with_period(period).at(|| "--p".into())?;
    if js.is_empty() || js.contains(&0) {
        return Err(CliError::config("j", "period indices start at 1"));
    }
    if k != 0.0 && js.contains(&1) {
        return Err(CliError::config("j", "the first period touches r = 0, singular for k != 0"));
    }
    let mut report = Report::new("monodromy");
    profile_params(&mut report, p);
    report.param("p", period);
    report.param("k", k);
    report.param("lambda", list(lambdas));
    report.param("j", list(&js.iter().map(|&j| j as f64).collect::<Vec<_>>()));
    report.param("tol", tol);
    let jobs: Vec<(f64, u32)> = lambdas.iter().flat_map(|&l| js.iter().map(move |&j| (l, j))).collect();
    if dry {
        report.note("jobs", jobs.len());
        return Ok(report);
    }
    let mean = rad::profile_mean(sys.eta(), period, tol).at(|| "profile mean".into())?;
    let rows = ordered(&jobs, |&(lambda, j)| {
        rad::monodromy(&sys.with_lambda(lambda), j as usize, tol).at(|| format!("lambda = {lambda:?}, j = {j}"))
    })?;
    let mut t = Table::new(
        "monodromy",
        &["lambda", "j", "m11", "m12", "m21", "m22", "det", "discriminant", "deviation", "bound", "within_bound"],
    );
    let mut worst_det = 0.0f64;
    let mut all_within = true;
    for (&(lambda, j), m) in jobs.iter().zip(&rows) {
        let closed = rad::closed_form_monodromy(lambda, mean, period);
        let deviation = (m.transfer.m - closed).norm();
        let bound = if k == 0.0 { 0.0 } else { rad::monodromy_deviation_bound(k, j as usize) };
        // k = 0 compares with the closed form at integration accuracy
        let within = deviation <= bound + 1e-6;
        all_within &= within;
        worst_det = worst_det.max((m.transfer.det() - 1.0).abs());
        let [[a, b], [c, d]] = m.transfer.m.0;
        t.push(vec![
            lambda.into(),
            j.into(),
            a.into(),
            b.into(),
            c.into(),
            d.into(),
            m.transfer.det().into(),
            m.discriminant.into(),
            deviation.into(),
            bound.into(),
            within.into(),
        ]);
    }
    report.note("mean", mean);
    report.note("max_det_drift", worst_det);
    report.note("all_within_bound", all_within);
    report.tables.push(t);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn boundedness(p: &ProfileArgs, period: f64, k: f64, lambdas: &[f64], r_max: f64, tol: f64, dry: bool) -> Result<Report, CliError> {
    let sys = radial_system(p, k, 0.0)?.with_period(period).at(|| "--p".into())?;
    if r_max < 2.0 * period {
        return Err(CliError::config("r-max", "must be at least two periods"));
    }
    let mut report = Report::new("boundedness");
    profile_params(&mut report, p);
    report.param("p", period);
    report.param("k", k);
    report.param("lambda", list(lambdas));
    report.param("r_max", r_max);
    report.param("tol", tol);
    if dry {
        return Ok(report);
    }
    let reps = ordered(lambdas, |&lambda| {
        rad::boundedness_probe(&sys.with_lambda(lambda), r_max, tol).at(|| format!("lambda = {lambda:?}"))
    })?;
    let mut growth = Table::new(
        "growth",
        &["lambda", "growth_exponent", "last_j", "discriminant", "mu1_re", "mu1_im", "mu2_re", "mu2_im"],
    );
    let mut windows = Table::new("windows", &["lambda", "start", "end", "sup_norm"]);
    for rep in &reps {
        let d = rep.last_period;
        growth.push(vec![
            rep.lambda.into(),
            rep.growth_exponent.into(),
            d.map(|d| d.j).into(),
            d.map(|d| d.discriminant).into(),
            d.map(|d| d.mu[0].re).into(),
            d.map(|d| d.mu[0].im).into(),
            d.map(|d| d.mu[1].re).into(),
            d.map(|d| d.mu[1].im).into(),
        ]);
        for w in &rep.windows {
            windows.push(vec![rep.lambda.into(), w.start.into(), w.end.into(), w.sup_norm.into()]);
        }
    }
    let max_exp = reps.iter().map(|r| r.growth_exponent).fold(f64::NEG_INFINITY, f64::max);
    report.note("max_growth_exponent", max_exp);
    report.tables.push(growth);
    report.tables.push(windows);
    Ok(report)
}

pub fn bv(p: &ProfileArgs, lambdas: &[f64], r0: f64, r_max: f64, dry: bool) -> Result<Report, CliError> {
    let eta = profile("eta", &p.eta, Var::R)?;
    if r_max <= r0 {
        return Err(CliError::config("r-max", "must exceed --r0"));
    }
    let mut report = Report::new("bv-check");
    profile_params(&mut report, p);
    report.param("lambda", list(lambdas));
    report.param("r0", r0);
    report.param("r_max", r_max);
    if dry {
        return Ok(report);
    }
    let reps = ordered(lambdas, |&lambda| rad::bv_check(&eta, lambda, r0, r_max).at(|| format!("lambda = {lambda:?}")))?;
    let mut summary = Table::new("bv", &["lambda", "tv", "pole", "trend", "log_slope", "log_r_squared", "points"]);
    let mut ladder = Table::new("ladder", &["lambda", "R", "tv"]);
    for (&lambda, rep) in lambdas.iter().zip(&reps) {
        let trend = match rep.trend {
            Trend::Converging => "converging",
            Trend::LogDivergent => "log-divergent",
            Trend::Unknown => "unknown",
        };
        summary.push(vec![
            lambda.into(),
            rep.tv.into(),
            rep.pole.into(),
            trend.into(),
            rep.log_slope.into(),
            rep.log_r_squared.into(),
            rep.points.into(),
        ]);
        for &(r, tv) in &rep.ladder {
            ladder.push(vec![lambda.into(), r.into(), tv.into()]);
        }
    }
    report.note("poles", reps.iter().filter(|r| r.pole.is_some()).count());
    report.tables.push(summary);
    report.tables.push(ladder);
    Ok(report)
}

pub fn limit(p: &ProfileArgs, starts: &[f64], len: f64, bins: usize, dry: bool) -> Result<Report, CliError> {
    let eta = profile("eta", &p.eta, Var::R)?;
    let mut report = Report::new("limit-range");
    profile_params(&mut report, p);
    report.param("windows", list(starts));
    report.param("window_len", len);
    report.param("bins", bins);
    if dry {
        return Ok(report);
    }
    let ranges = rad::limit_range(&eta, starts, len, bins).at(|| "limit range".into())?;
    let mut t = Table::new("limit_range", &["lower", "upper"]);
    for &(a, b) in &ranges {
        t.push(vec![a.into(), b.into()]);
    }
    report.note("intervals", ranges.len());
    report.note(
        "range",
        Cell::Text(ranges.iter().map(|(a, b)| format!("[{a:?}, {b:?}]")).collect::<Vec<_>>().join(" ")),
    );
    report.tables.push(t);
    Ok(report)
}
