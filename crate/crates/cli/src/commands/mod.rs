//! One function per subcommand. Each validates its inputs, returns early with
//! the resolved plan on `--dry-run`, and otherwise fills a [`Report`].

mod explicit;
mod radial;
mod spectral;
mod weyl;

use std::fs;

use rayon::prelude::*;

use dirac_spectra::clifford::{Spinor, UnitVector};
use dirac_spectra::explicit::{LayeredSolution, SpinorSource, ZeroMode3d, ZeroResonance2d};
use dirac_spectra::potential::{parse, Kind, PotentialSpec, Profile, SampledProfile, Var};
use dirac_spectra::radial::RadialSystem;

use crate::args::{Command, FieldArg, FieldArgs, KindArg, PotentialArgs, ProfileArgs};
use crate::error::{CliError, Context};
use crate::output::Report;

pub fn run(cmd: &Command) -> Result<Report, CliError> {
    let dry = cmd.common().dry_run;
    match cmd {
        Command::ZeroMode { h, l, margin, phi0, tol, residual_tol, .. } => {
            explicit::zero_mode(*h, *l, *margin, *phi0, *tol, *residual_tol, dry)
        }
        Command::ZeroResonance { h, l, margin, phi0, radii, s, tol, .. } => {
            explicit::zero_resonance(*h, *l, *margin, *phi0, &radii.0, *s, *tol, dry)
        }
        Command::Layered { potential, lambda, h, l, margin, xi_step, tol, .. } => {
            explicit::layered(potential, *lambda, *h, *l, *margin, *xi_step, *tol, dry)
        }
        Command::Bands { profile, p, lambda_range, tol, .. } => radial::bands(profile, *p, &lambda_range.0, *tol, dry),
        Command::Monodromy { profile, p, k, lambda, j, tol, .. } => {
            radial::monodromy(profile, *p, *k, &lambda.0, &j.0, *tol, dry)
        }
        Command::Boundedness { profile, p, k, lambda, r_max, tol, .. } => {
            radial::boundedness(profile, *p, *k, &lambda.0, *r_max, *tol, dry)
        }
        Command::BvCheck { profile, lambda, r0, r_max, .. } => radial::bv(profile, &lambda.0, *r0, *r_max, dry),
        Command::LimitRange { profile, windows, window_len, bins, .. } => {
            radial::limit(profile, &windows.0, *window_len, *bins, dry)
        }
        Command::WeylPlanar { weyl, .. } => weyl::planar(weyl, None, dry),
        Command::WeylDistorted { weyl, phi, exponent, .. } => weyl::planar(weyl, Some((phi.as_str(), *exponent)), dry),
        Command::Schnol { field, n_list, tol, precheck_h, precheck_l, precheck_tol, .. } => {
            spectral::schnol(field, &n_list.0, *tol, precheck_h.map(|h| (h, *precheck_l, *precheck_tol)), dry)
        }
        Command::MassRatio { field, n_list, tol, .. } => spectral::mass_ratio(field, &n_list.0, *tol, dry),
        Command::Virial { potential, radius, density, integral, phi0, integral_radius, tol, .. } => {
            spectral::virial(potential, *radius, *density, *integral, *phi0, *integral_radius, *tol, dry)
        }
        Command::RadialEig { profile, k, r, n, collocated, probe_lambda, probe_r_max, tol, .. } => spectral::radial_eig(
            profile,
            *k,
            *r,
            *n,
            *collocated,
            probe_lambda.as_ref().map(|g| g.0.as_slice()),
            *probe_r_max,
            *tol,
            dry,
        ),
        Command::ParseCheck { potential, .. } => spectral::parse_check(potential, dry),
    }
}

fn expr(key: &'static str, text: &str) -> Result<dirac_spectra::potential::Expr, CliError> {
    parse(text).at(|| format!("--{key} `{text}`"))
}

fn direction(dim: usize, v: Option<&[f64]>) -> Result<UnitVector, CliError> {
    match v {
        None => UnitVector::axis(dim, 0).at(|| "--dim".into()),
        Some(v) if v.len() != dim => Err(CliError::config("direction", format!("needs {dim} components"))),
        Some(v) => UnitVector::normalized(v).at(|| "--direction".into()),
    }
}

pub(crate) fn potential(a: &PotentialArgs) -> Result<PotentialSpec, CliError> {
    let e = expr("q", &a.q)?;
    let dir = a.direction.as_ref().map(|d| d.0.as_slice());
    let spec = match a.kind {
        KindArg::Auto if e.uses(Var::T) => PotentialSpec::layered(e, direction(a.dim, dir)?),
        KindArg::Auto => PotentialSpec::infer(e, a.dim),
        KindArg::Radial => PotentialSpec::radial(e, a.dim, None),
        KindArg::Layered => PotentialSpec::layered(e, direction(a.dim, dir)?),
        KindArg::Cartesian => PotentialSpec::cartesian(e, a.dim),
    };
    spec.at(|| "--q".into())
}

fn kind_name(q: &PotentialSpec) -> &'static str {
    match q.kind() {
        Kind::Cartesian => "cartesian",
        Kind::Radial { .. } => "radial",
        Kind::Layered { .. } => "layered",
    }
}

/// Rows of a two-column `s, value` table; `#` comments and a non-numeric
/// header line are skipped.
fn read_table(path: &str) -> Result<SampledProfile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config("eta", format!("cannot read {path}: {e}")))?;
    let (mut s, mut v) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|c| !c.is_empty()).collect();
        let nums: Result<Vec<f64>, _> = cols.iter().map(|c| c.parse::<f64>()).collect();
        match nums {
            Ok(n) if n.len() == 2 => {
                s.push(n[0]);
                v.push(n[1]);
            }
            _ if s.is_empty() && i == 0 => continue,
            _ => return Err(CliError::config("eta", format!("{path}:{}: expected two numbers", i + 1))),
        }
    }
    SampledProfile::new(s, v).at(|| format!("--eta {path}"))
}

/// `η` from an expression in `var` or from `@FILE`.
pub(crate) fn profile(key: &'static str, text: &str, var: Var) -> Result<Profile, CliError> {
    match text.strip_prefix('@') {
        Some(path) => Ok(Profile::Table(read_table(path)?)),
        None => Profile::expr(expr(key, text)?, var).at(|| format!("--{key} `{text}` (variable {})", var.name())),
    }
}

fn radial_system(p: &ProfileArgs, k: f64, lambda: f64) -> Result<RadialSystem, CliError> {
    RadialSystem::new(profile("eta", &p.eta, Var::R)?, p.dim, k, lambda).at(|| "radial system".into())
}

/// Eigensolutions with known potential and energy.
pub(crate) enum Field {
    ZeroMode(ZeroMode3d),
    ZeroResonance(ZeroResonance2d),
    Layered(LayeredSolution),
}

pub(crate) struct FieldSetup {
    pub field: Field,
    pub q: PotentialSpec,
    pub lambda: f64,
}

fn basis(dim: usize, i: usize) -> Result<Spinor, CliError> {
    Spinor::basis(dim, i).map_err(|_| CliError::config("phi0", format!("index must be below {dim}")))
}

/// Zero mode and resonance potentials.
pub(crate) fn closed_form_potential(dim: usize) -> PotentialSpec {
    let text = if dim == 3 { "-3/(1+r^2)" } else { "-2/(1+r^2)" };
    PotentialSpec::radial(parse(text).expect("fixed expression"), dim, None).expect("fixed potential")
}

/// `reach` bounds `|x·k|` over the region where a layered field is sampled.
pub(crate) fn field(a: &FieldArgs, reach: f64, tol: f64) -> Result<FieldSetup, CliError> {
    match a.field {
        FieldArg::ZeroMode => Ok(FieldSetup {
            field: Field::ZeroMode(ZeroMode3d::new(basis(4, a.phi0)?)?),
            q: closed_form_potential(3),
            lambda: 0.0,
        }),
        FieldArg::ZeroResonance => Ok(FieldSetup {
            field: Field::ZeroResonance(ZeroResonance2d::new(basis(2, a.phi0)?)?),
            q: closed_form_potential(2),
            lambda: 0.0,
        }),
        FieldArg::Layered => {
            let text = a.q.as_deref().ok_or_else(|| CliError::config("q", "the layered field needs a profile in t"))?;
            let dir = direction(a.dim, a.direction.as_ref().map(|d| d.0.as_slice()))?;
            let q = PotentialSpec::layered(expr("q", text)?, dir).at(|| "--q".into())?;
            let sol = LayeredSolution::new(a.lambda, &q, -reach, reach, 0.005, tol.min(1e-10))
                .at(|| format!("layered solution at lambda = {:?}", a.lambda))?;
            Ok(FieldSetup { field: Field::Layered(sol), q, lambda: a.lambda })
        }
    }
}

/// Maps `f` over `jobs` in parallel, keeping the input order; the first
/// failure in that order is returned.
pub(crate) fn ordered<J: Sync, T: Send>(jobs: &[J], f: impl Fn(&J) -> Result<T, CliError> + Sync + Send) -> Result<Vec<T>, CliError> {
    jobs.par_iter().map(f).collect::<Vec<_>>().into_iter().collect()
}

/// Least-squares slope.
pub(crate) fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

impl SpinorSource for Field {
    fn dim(&self) -> usize {
        match self {
            Field::ZeroMode(f) => f.dim(),
            Field::ZeroResonance(f) => f.dim(),
            Field::Layered(f) => f.dim(),
        }
    }

    fn eval(&self, x: &[f64]) -> dirac_spectra::Result<Spinor> {
        match self {
            Field::ZeroMode(f) => f.eval(x),
            Field::ZeroResonance(f) => f.eval(x),
            Field::Layered(f) => f.eval(x),
        }
    }

    fn radial_modulus(&self, r: f64) -> Option<f64> {
        match self {
            Field::ZeroMode(f) => f.radial_modulus(r),
            Field::ZeroResonance(f) => f.radial_modulus(r),
            Field::Layered(f) => f.radial_modulus(r),
        }
    }
}
