use std::f64::consts::PI;

use dirac_spectra::explicit::{residual_norm_streaming, weighted_l2_norm_squared, GridSpec, LayeredSolution, ResidualNorms, SpinorSource, ZeroMode3d, ZeroResonance2d};
use dirac_spectra::potential::{Kind, PotentialSpec};
use dirac_spectra::ErrorClass;

use super::{basis, closed_form_potential, potential, slope};
use crate::args::PotentialArgs;
use crate::error::{CliError, Context};
use crate::output::{Cell, Report, Table};

/// The grid at `h` and, when it fits the box, the one at `2h`.
fn grids(dim: usize, l: f64, h: f64, margin: usize) -> Result<(GridSpec, Option<GridSpec>), CliError> {
    let fine = GridSpec::new(dim, l, h, margin).at(|| format!("grid L = {l:?}, h = {h:?}"))?;
    Ok((fine, GridSpec::new(dim, l, 2.0 * h, margin).ok()))
}

fn residual_table<S: SpinorSource + Sync>(
    src: &S,
    q: &PotentialSpec,
    lambda: f64,
    fine: &GridSpec,
    coarse: Option<&GridSpec>,
    report: &mut Report,
) -> Result<ResidualNorms, CliError> {
    let run = |g: &GridSpec| residual_norm_streaming(src, q, lambda, g).at(|| format!("residual on the grid h = {:?}", g.h()));
    let (a, b) = rayon::join(|| run(fine), || coarse.map(run).transpose());
    let (a, b) = (a?, b?);
    let mut t = Table::new("residual", &["h", "L", "interior_nodes", "sup", "l2"]);
    for (g, n) in std::iter::once((fine, &a)).chain(coarse.zip(b.as_ref())) {
        t.push(vec![g.h().into(), g.half_width().into(), n.nodes.into(), n.sup.into(), n.l2.into()]);
    }
    report.tables.push(t);
    report.note("sup_residual", a.sup);
    if let Some(b) = b {
        let ratio = b.sup / a.sup;
        report.note("refinement_ratio", ratio);
        report.note("observed_order", ratio.log2());
    }
    Ok(a)
}

pub fn zero_mode(h: f64, l: f64, margin: usize, phi0: usize, tol: f64, residual_tol: Option<f64>, dry: bool) -> Result<Report, CliError> {
    let src = ZeroMode3d::new(basis(4, phi0)?)?;
    let (fine, coarse) = grids(3, l, h, margin)?;
    let q = closed_form_potential(3);
    let mut report = Report::new("zero-mode");
    report.param("q", "-3/(1+r^2)");
    report.param("h", h);
    report.param("L", l);
    report.param("margin", margin);
    report.param("phi0", phi0);
    report.param("tol", tol);
    report.param("residual_tol", residual_tol);
    if dry {
        report.note("grid_nodes", fine.len());
        report.note("coarse_grid", coarse.is_some());
        return Ok(report);
    }
    let norms = residual_table(&src, &q, 0.0, &fine, coarse.as_ref(), &mut report)?;
    let n2 = weighted_l2_norm_squared(&src, 0.0, f64::INFINITY, tol).at(|| "norm quadrature".into())?;
    report.note("norm_squared", n2);
    report.note("pi_squared", PI * PI);
    report.note("norm_squared_error", (n2 - PI * PI).abs());
    if let Some(t) = residual_tol {
        report.note("residual_within_tol", norms.sup <= t);
        if norms.sup > t {
            return Err(CliError {
                class: ErrorClass::Invariant,
                message: format!("--residual-tol: sup residual {:?} exceeds {t:?}", norms.sup),
            });
        }
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn zero_resonance(h: f64, l: f64, margin: usize, phi0: usize, radii: &[f64], s: f64, tol: f64, dry: bool) -> Result<Report, CliError> {
    let src = ZeroResonance2d::new(basis(2, phi0)?)?;
    let (fine, coarse) = grids(2, l, h, margin)?;
    if radii.len() < 2 || radii.iter().any(|r| !(*r > 1.0 && r.is_finite())) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::config("radii", "need at least two increasing finite radii above 1"));
    }
    let q = closed_form_potential(2);
    let mut report = Report::new("zero-resonance");
    report.param("q", "-2/(1+r^2)");
    report.param("h", h);
    report.param("L", l);
    report.param("margin", margin);
    report.param("phi0", phi0);
    report.param("radii", crate::output::list(radii));
    report.param("s", s);
    report.param("tol", tol);
    if dry {
        report.note("grid_nodes", fine.len());
        return Ok(report);
    }
    residual_table(&src, &q, 0.0, &fine, coarse.as_ref(), &mut report)?;

    let mut mass = Table::new("mass", &["R", "mass", "exact", "two_pi_ln_R"]);
    let mut weighted = Table::new("weighted", &["R", "s", "weighted_norm"]);
    let (mut lx, mut my) = (Vec::new(), Vec::new());
    for &r in radii {
        let m = weighted_l2_norm_squared(&src, 0.0, r, tol).at(|| format!("mass at R = {r:?}"))?;
        mass.push(vec![r.into(), m.into(), (PI * (1.0 + r * r).ln()).into(), (2.0 * PI * r.ln()).into()]);
        lx.push(r.ln());
        my.push(m);
    }
    for r in radii.iter().copied().chain([f64::INFINITY]) {
        let w = weighted_l2_norm_squared(&src, s, r, tol).at(|| format!("weighted norm at R = {r:?}"))?.sqrt();
        weighted.push(vec![r.into(), s.into(), w.into()]);
    }
    let fitted = slope(&lx, &my);
    report.note("mass_log_slope", fitted);
    report.note("mass_log_slope_relative_error", (fitted / (2.0 * PI) - 1.0).abs());
    report.tables.push(mass);
    report.tables.push(weighted);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn layered(args: &PotentialArgs, lambda: f64, h: f64, l: f64, margin: usize, xi_step: f64, tol: f64, dry: bool) -> Result<Report, CliError> {
    let q = potential(args)?;
    if !matches!(q.kind(), Kind::Layered { .. }) {
        return Err(CliError::config("q", "a layered profile in t is required"));
    }
    let (fine, coarse) = grids(args.dim, l, h, margin)?;
    let mut report = Report::new("layered");
    report.param("q", args.q.as_str());
    report.param("dim", args.dim);
    report.param("direction", crate::output::list(q.direction().expect("layered").as_slice()));
    report.param("lambda", lambda);
    report.param("h", h);
    report.param("L", l);
    report.param("margin", margin);
    report.param("xi_step", xi_step);
    report.param("tol", tol);
    if dry {
        report.note("grid_nodes", fine.len());
        return Ok(report);
    }
    let src = LayeredSolution::for_box(lambda, &q, l, xi_step, tol).at(|| format!("layered solution at lambda = {lambda:?}"))?;
    residual_table(&src, &q, lambda, &fine, coarse.as_ref(), &mut report)?;
    // |f| = |φ₀| = 1 everywhere
    let mut worst = 0.0f64;
    for lin in (0..fine.len()).step_by(97) {
        let x = fine.point(lin);
        worst = worst.max((src.eval(&x[..args.dim])?.norm() - 1.0).abs());
    }
    report.note("modulus_deviation", worst);
    let phi0: Vec<String> = src.phi0().components().iter().map(|c| format!("{:?}{:+?}i", c.re, c.im)).collect();
    report.note("phi0", Cell::Text(phi0.join(" ")));
    Ok(report)
}
