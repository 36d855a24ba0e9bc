use dirac_spectra::explicit::{GridSpec, SpinorSource};
use dirac_spectra::potential::{parse, PotentialSpec};
use dirac_spectra::virial::{self, Localization, L2Verdict};
use dirac_spectra::weyl::{mass_ratio_analysis, schnol_residual, SchnolOptions};
use dirac_spectra::ErrorClass;

use super::{basis, field, kind_name, ordered, potential, radial_system, Field, FieldSetup};
use crate::args::{value_name, FieldArg, FieldArgs, PotentialArgs, ProfileArgs};
use crate::error::{CliError, Context};
use crate::output::{list, Report, Table};

fn field_params(report: &mut Report, a: &FieldArgs, setup: &FieldSetup) {
    report.param("field", value_name(&a.field));
    match a.field {
        FieldArg::Layered => {
            report.param("q", a.q.clone());
            report.param("lambda", a.lambda);
        }
        _ => report.param("phi0", a.phi0),
    }
    report.param("dim", setup.field.dim());
}

fn check_indices(n_list: &[u32]) -> Result<u32, CliError> {
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::config("n-list", "indices must be positive and strictly increasing"));
    }
    Ok(*n_list.last().expect("nonempty"))
}

pub fn schnol(a: &FieldArgs, n_list: &[u32], tol: f64, precheck: Option<(f64, f64, f64)>, dry: bool) -> Result<Report, CliError> {
    let n_max = check_indices(n_list)?;
    let reach = 2.0 * n_max as f64 * (a.dim as f64).sqrt() + 1.0;
    let setup = field(a, reach.max(precheck.map_or(0.0, |(_, l, _)| l * 2.0)), tol)?;
    let mut opts = SchnolOptions::new(tol);
    if let Some((h, l, threshold)) = precheck {
        let grid = GridSpec::new(setup.field.dim(), l, h, 2).at(|| format!("precheck grid L = {l:?}, h = {h:?}"))?;
        opts.precheck = Some((grid, threshold));
    }
    let mut report = Report::new("schnol");
    field_params(&mut report, a, &setup);
    report.param("n_list", list(&n_list.iter().map(|&n| n as f64).collect::<Vec<_>>()));
    report.param("tol", tol);
    report.param("precheck", precheck.map(|(h, l, t)| format!("h={h:?};L={l:?};threshold={t:?}")));
    if dry {
        return Ok(report);
    }
    let rep = schnol_residual(&setup.field, &setup.q, setup.lambda, n_list, &opts).at(|| "schnol residual".into())?;
    let mut t = Table::new("schnol", &["n", "cutoff_norm", "residual", "n_times_residual"]);
    for r in &rep.rows {
        t.push(vec![r.n.into(), r.norm.into(), r.residual.into(), (r.r_n * r.residual).into()]);
    }
    report.note("residual_slope", rep.residual_slope());
    report.tables.push(t);
    Ok(report)
}

pub fn mass_ratio(a: &FieldArgs, n_list: &[u32], tol: f64, dry: bool) -> Result<Report, CliError> {
    let n_max = check_indices(n_list)?;
    let setup = field(a, 2.0 * n_max as f64 * (a.dim as f64).sqrt() + 1.0, tol)?;
    let mut report = Report::new("mass-ratio");
    field_params(&mut report, a, &setup);
    report.param("n_list", list(&n_list.iter().map(|&n| n as f64).collect::<Vec<_>>()));
    report.param("tol", tol);
    if dry {
        return Ok(report);
    }
    let rep = mass_ratio_analysis(&setup.field, n_list, tol).at(|| "mass ratio".into())?;
    let mut t = Table::new("mass_ratio", &["n", "mass", "mass_double", "ratio", "n2_ratio"]);
    for r in &rep.rows {
        let nf = r.n as f64;
        t.push(vec![r.n.into(), r.mass.into(), r.mass_double.into(), r.ratio.into(), (nf * nf * r.ratio).into()]);
    }
    report.note("subsequence", list(&rep.subsequence.iter().map(|&n| n as f64).collect::<Vec<_>>()));
    report.tables.push(t);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn virial(
    a: &PotentialArgs,
    radius: f64,
    density: usize,
    integral: Option<FieldArg>,
    phi0: usize,
    integral_radius: f64,
    tol: f64,
    dry: bool,
) -> Result<Report, CliError> {
    let q = potential(a)?;
    if density == 0 {
        return Err(CliError::config("density", "must be positive"));
    }
    let field = match integral {
        None => None,
        Some(FieldArg::ZeroMode) => Some(Field::ZeroMode(dirac_spectra::explicit::ZeroMode3d::new(basis(4, phi0)?)?)),
        Some(FieldArg::ZeroResonance) => {
            Some(Field::ZeroResonance(dirac_spectra::explicit::ZeroResonance2d::new(basis(2, phi0)?)?))
        }
        Some(FieldArg::Layered) => return Err(CliError::config("integral", "layered fields are not square integrable")),
    };
    if let Some(f) = &field {
        if f.dim() != q.dim() {
            return Err(CliError::config("integral", "field and potential dimensions differ"));
        }
    }
    let mut report = Report::new("virial");
    report.param("q", a.q.as_str());
    report.param("kind", kind_name(&q));
    report.param("dim", q.dim());
    report.param("radius", radius);
    report.param("density", density);
    report.param("integral", integral.map(|f| value_name(&f)));
    report.param("integral_radius", integral_radius);
    report.param("tol", tol);
    if dry {
        return Ok(report);
    }
    let b = virial::virial_bounds(&q, radius, density).at(|| "virial bounds".into())?;
    let mut t = Table::new("refinements", &["density", "lower", "upper"]);
    for r in &b.domain.refinements {
        t.push(vec![r.density.into(), r.lower.into(), r.upper.into()]);
    }
    report.tables.push(t);
    if let Some(tail) = &b.tail {
        let mut t = Table::new("tail", &["radii", "lower", "upper"]);
        t.push(vec![list(&tail.radii), tail.lower.into(), tail.upper.into()]);
        report.tables.push(t);
    }
    report.note("lower", b.lower);
    report.note("upper", b.upper);
    report.note("argmin", list(&b.argmin));
    report.note("argmax", list(&b.argmax));
    report.note("cauchy", b.domain.cauchy);
    report.note("zero_in_range", b.lower <= 0.0 && 0.0 <= b.upper);
    if let Some(f) = &field {
        let v = virial::virial_integral(f, &q, integral_radius, tol).at(|| "virial integral".into())?;
        report.note("virial_integral", v);
        report.note("integral_in_range", b.lower <= v && v <= b.upper);
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn radial_eig(
    p: &ProfileArgs,
    k: f64,
    r_max: f64,
    n: usize,
    collocated: bool,
    probe: Option<&[f64]>,
    probe_r_max: f64,
    tol: f64,
    dry: bool,
) -> Result<Report, CliError> {
    let sys = radial_system(p, k, 0.0)?;
    if n < 2 {
        return Err(CliError::config("N", "need at least two nodes"));
    }
    if collocated && n > 400 {
        return Err(CliError::config("collocated", "the dense comparison needs N <= 400"));
    }
    if probe.is_some() && probe_r_max <= 64.0 {
        return Err(CliError::config("probe-r-max", "must exceed 64"));
    }
    // expression profiles also get virial bounds of η(|x|)
    let spec = match p.eta.strip_prefix('@') {
        Some(_) => None,
        None => Some(PotentialSpec::radial(parse(&p.eta).at(|| "--eta".into())?, p.dim, None).at(|| "--eta".into())?),
    };
    let mut report = Report::new("radial-eig");
    report.param("eta", p.eta.as_str());
    report.param("dim", p.dim);
    report.param("k", k);
    report.param("R", r_max);
    report.param("N", n);
    report.param("h", r_max / n as f64);
    report.param("collocated", collocated);
    report.param("probe_lambda", probe.map(list));
    report.param("probe_r_max", probe_r_max);
    report.param("tol", tol);
    if dry {
        return Ok(report);
    }
    let spectrum = virial::discrete_radial_eigenvalues(&sys, r_max, n).at(|| format!("discrete spectrum R = {r_max:?}, N = {n}"))?;
    let mut t = Table::new("eigenvalues", &["index", "value", "outer_mass", "class"]);
    for (i, e) in spectrum.eigenvalues.iter().enumerate() {
        let class = match e.class {
            Localization::Interior => "interior",
            Localization::Boundary => "boundary",
            Localization::Unresolved => "unresolved",
        };
        t.push(vec![i.into(), e.value.into(), e.outer_mass.into(), class.into()]);
    }
    report.tables.push(t);
    let interior: Vec<f64> = spectrum.interior().map(|e| e.value).collect();
    report.note("eigenvalues", spectrum.eigenvalues.len());
    report.note("interior", interior.len());
    if let Some(spec) = &spec {
        let b = virial::virial_bounds(spec, r_max, 200).at(|| "virial bounds".into())?;
        let outside = interior.iter().filter(|v| **v < b.lower - 0.05 || **v > b.upper + 0.05).count();
        report.note("virial_lower", b.lower);
        report.note("virial_upper", b.upper);
        report.note("interior_outside_bounds", outside);
    }
    if collocated {
        let c = virial::collocated_radial_eigenvalues(&sys, r_max, n).at(|| "collocated spectrum".into())?;
        let mut t = Table::new("collocated", &["index", "value"]);
        for (i, v) in c.iter().enumerate() {
            t.push(vec![i.into(), (*v).into()]);
        }
        report.tables.push(t);
    }
    if let Some(lambdas) = probe {
        let reps = ordered(lambdas, |&lambda| {
            virial::l2_solution_probe(&sys.with_lambda(lambda), probe_r_max, tol).at(|| format!("probe at lambda = {lambda:?}"))
        })?;
        let mut t = Table::new("probe", &["lambda", "verdict", "growth_rate", "growth_exponent", "last_min_mass"]);
        for rep in &reps {
            let verdict = match rep.verdict {
                L2Verdict::NoL2SolutionEvidence => "no-l2-solution-evidence",
                L2Verdict::PossibleEigenvalue => "possible-eigenvalue",
            };
            let last = rep.samples.last().map(|s| s.min_mass);
            t.push(vec![rep.lambda.into(), verdict.into(), rep.growth_rate.into(), rep.growth_exponent.into(), last.into()]);
        }
        report.tables.push(t);
    }
    Ok(report)
}

/// Fixed sample points in `[-1.4, 1.4]^d`.
fn probe_points(dim: usize) -> Vec<Vec<f64>> {
    (0..16)
        .map(|i| {
            let i = i as f64;
            [(1.3 * i + 0.1).sin(), (0.7 * i + 0.3).cos(), (2.1 * i + 0.5).sin()][..dim].iter().map(|v| 1.4 * v).collect()
        })
        .collect()
}

pub fn parse_check(a: &PotentialArgs, dry: bool) -> Result<Report, CliError> {
    let q = potential(a)?;
    let printed = q.expr().to_string();
    let reparsed = parse(&printed).at(|| format!("reparsing `{printed}`"))?;
    let mut report = Report::new("parse-check");
    report.param("q", a.q.as_str());
    report.param("dim", a.dim);
    report.note("kind", kind_name(&q));
    report.note("printed", printed.as_str());
    report.note("ast", format!("{:?}", q.expr()));
    report.note("fixpoint", &reparsed == q.expr() && reparsed.to_string() == printed);
    if dry {
        return Ok(report);
    }
    let step = 1e-5;
    let mut t = Table::new("gradient", &["point", "x", "value", "grad", "max_fd_error", "smooth"]);
    let mut worst = 0.0f64;
    for (i, x) in probe_points(q.dim()).iter().enumerate() {
        let g = q.grad(x).at(|| format!("gradient at {x:?}"))?;
        let mut err = 0.0f64;
        if g.smooth {
            for j in 0..q.dim() {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[j] += step;
                xm[j] -= step;
                let fd = (q.eval(&xp)? - q.eval(&xm)?) / (2.0 * step);
                err = err.max((fd - g.grad[j]).abs() / fd.abs().max(1.0));
            }
            worst = worst.max(err);
        }
        t.push(vec![i.into(), list(x), g.value.into(), list(&g.grad[..q.dim()]), err.into(), g.smooth.into()]);
    }
    let pass = worst <= 1e-6;
    report.note("max_gradient_error", worst);
    report.note("gradient_selftest", if pass { "pass" } else { "fail" });
    report.tables.push(t);
    if !pass {
        return Err(CliError {
            class: ErrorClass::Invariant,
            message: format!("gradient self-test: relative error {worst:?} exceeds 1e-6"),
        });
    }
    Ok(report)
}
