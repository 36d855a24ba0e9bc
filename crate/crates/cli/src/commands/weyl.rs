use dirac_spectra::clifford::UnitVector;
use dirac_spectra::potential::{Kind, PotentialSpec, Var};
use dirac_spectra::weyl::{sequence_row, BumpKind, BumpProfile, Distortion, PlanarApproxSpec, PlanarElement, SequenceRow, SingularSequenceReport, Smoothing, WeylOptions};

use super::{expr, ordered, potential, profile};
use crate::args::{value_name, ChiArg, FloatList, SmoothingArg, WeylArgs};
use crate::error::{CliError, Context};
use crate::output::{list, Cell, Report, Table};

/// `n=N;radius=R;eta=EXPR[;direction=..][;center=..]`; direction and center
/// default to the potential's direction and the origin.
fn element(text: &str, dim: usize, default_dir: Option<&UnitVector>) -> Result<PlanarElement, CliError> {
    let bad = |msg: String| CliError::config("element", format!("`{text}`: {msg}"));
    let (mut n, mut radius, mut eta, mut dir, mut center) = (None, None, None, None, [0.0; 3]);
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| bad(format!("`{part}` is not key=value")))?;
        let v = v.trim();
        match k.trim() {
            "n" => n = Some(v.parse::<u32>().map_err(|_| bad("n must be a non-negative integer".into()))?),
            "radius" => radius = Some(v.parse::<f64>().map_err(|_| bad("radius must be a number".into()))?),
            "eta" => eta = Some(profile("element", v, Var::T)?),
            "direction" => {
                let d: FloatList = v.parse().map_err(bad)?;
                if d.0.len() != dim {
                    return Err(bad(format!("direction needs {dim} components")));
                }
                dir = Some(UnitVector::normalized(&d.0).at(|| "--element direction".into())?);
            }
            "center" => {
                let c: FloatList = v.parse().map_err(bad)?;
                if c.0.len() != dim {
                    return Err(bad(format!("center needs {dim} components")));
                }
                center[..dim].copy_from_slice(&c.0);
            }
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }
    let direction = match dir.or(default_dir.copied()) {
        Some(d) => d,
        None => UnitVector::axis(dim, 0).at(|| "--dim".into())?,
    };
    Ok(PlanarElement {
        n: n.ok_or_else(|| bad("missing n".into()))?,
        direction,
        center,
        radius: radius.ok_or_else(|| bad("missing radius".into()))?,
        eta: eta.ok_or_else(|| bad("missing eta".into()))?,
    })
}

fn distortion(text: &str, exponent: f64, dim: usize) -> Result<Distortion, CliError> {
    match text {
        "quadratic" => Ok(Distortion::Quadratic { exponent }),
        "0" | "zero" => Ok(Distortion::Zero),
        _ => Ok(Distortion::Expr(PotentialSpec::cartesian(expr("phi", text)?, dim).at(|| "--phi".into())?)),
    }
}

/// Planar (`distorted = None`) or distorted Weyl report over `λ × n`.
pub fn planar(a: &WeylArgs, distorted: Option<(&str, f64)>, dry: bool) -> Result<Report, CliError> {
    let q = potential(&a.potential)?;
    let dim = a.potential.dim;
    let smoothing = match a.smoothing {
        SmoothingArg::None => Smoothing::None,
        SmoothingArg::Gaussian => Smoothing::Gaussian { width_factor: a.width_factor },
    };
    let spec = if a.element.is_empty() {
        if !matches!(q.kind(), Kind::Layered { .. }) {
            return Err(CliError::config("element", "give elements explicitly unless --q is layered"));
        }
        let n_list = a.n_list.as_ref().map_or(vec![1, 2, 3, 4], |l| l.0.clone());
        PlanarApproxSpec::from_layered(&q, &n_list, smoothing).at(|| "--n-list".into())?
    } else {
        let mut elems = a.element.iter().map(|e| element(e, dim, q.direction())).collect::<Result<Vec<_>, _>>()?;
        elems.sort_by_key(|e| e.n);
        PlanarApproxSpec::new(dim, elems, smoothing).at(|| "--element".into())?
    };
    let n_list: Vec<u32> = match &a.n_list {
        Some(l) => l.0.clone(),
        None => spec.elements().iter().map(|e| e.n).collect(),
    };
    let elems = n_list
        .iter()
        .map(|&n| spec.element(n).ok_or_else(|| CliError::config("n-list", format!("index {n} has no element"))))
        .collect::<Result<Vec<_>, _>>()?;
    let phi = distorted.map(|(text, e)| distortion(text, e, dim)).transpose()?;
    let chi_kind = match a.chi {
        ChiArg::Exp => BumpKind::Exp,
        ChiArg::Poly => BumpKind::Poly,
    };
    let chi = BumpProfile::new(chi_kind, dim).at(|| "--chi".into())?;
    let opts = WeylOptions { xi_step: a.xi_step, tol: a.tol, resolution: a.resolution, ..WeylOptions::new(chi, a.grid_h) };

    let name = if distorted.is_some() { "weyl-distorted" } else { "weyl-planar" };
    let mut report = Report::new(name);
    report.param("q", a.potential.q.as_str());
    report.param("dim", dim);
    report.param("lambda", list(&a.lambda.0));
    report.param("n_list", list(&n_list.iter().map(|&n| n as f64).collect::<Vec<_>>()));
    report.param("radii", list(&elems.iter().map(|e| e.radius).collect::<Vec<_>>()));
    report.param("chi", value_name(&a.chi));
    report.param("grid_h", a.grid_h);
    report.param("smoothing", value_name(&a.smoothing));
    report.param("width_factor", a.width_factor);
    report.param("resolution", a.resolution);
    report.param("xi_step", a.xi_step);
    report.param("tol", a.tol);
    if let Some((text, e)) = distorted {
        report.param("phi", text);
        report.param("exponent", e);
    }
    let jobs: Vec<(f64, &PlanarElement)> = a.lambda.0.iter().flat_map(|&l| elems.iter().map(move |e| (l, *e))).collect();
    if dry {
        report.note("jobs", jobs.len());
        return Ok(report);
    }
    let rows: Vec<SequenceRow> = ordered(&jobs, |&(lambda, e)| {
        sequence_row(e, dim, smoothing, phi.as_ref(), &q, lambda, &opts).at(|| format!("lambda = {lambda:?}, n = {}", e.n))
    })?;

    let mut cols = vec!["lambda", "n", "r_n", "norm", "residual", "t1", "t2", "t3", "allowance", "bound", "within_bound"];
    if phi.is_some() {
        cols.extend(["cond_potential", "cond_curvature"]);
    }
    let mut t = Table::new("rows", &cols);
    let mut per_lambda = Table::new("slopes", &["lambda", "residual_slope", "bounds_hold", "t3_decreasing"]);
    for (i, &lambda) in a.lambda.0.iter().enumerate() {
        let chunk = &rows[i * elems.len()..(i + 1) * elems.len()];
        for r in chunk {
            let mut row: Vec<Cell> = vec![
                lambda.into(),
                r.n.into(),
                r.r_n.into(),
                r.norm.into(),
                r.residual.into(),
                r.t1.into(),
                r.t2.into(),
                r.t3.into(),
                r.allowance.into(),
                r.bound().into(),
                r.within_bound().into(),
            ];
            if phi.is_some() {
                let (c2, c3) = r.conditions.unwrap_or((0.0, 0.0));
                row.extend([c2.into(), c3.into()]);
            }
            t.push(row);
        }
        let rep = SingularSequenceReport { lambda, rows: chunk.to_vec() };
        per_lambda.push(vec![
            lambda.into(),
            rep.residual_slope().into(),
            rep.bounds_hold().into(),
            chunk.windows(2).all(|w| w[1].t3 <= w[0].t3).into(),
        ]);
    }
    report.note("bounds_hold", rows.iter().all(SequenceRow::within_bound));
    report.tables.push(t);
    report.tables.push(per_lambda);
    Ok(report)
}
