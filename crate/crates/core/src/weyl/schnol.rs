//! Cutoffs of an exact eigensolution: `f_n = χ(x/n) f / ‖χ(x/n) f‖`.

use alloc::vec::Vec;

use num_traits::Float;

use super::{SequenceRow, SingularSequenceReport};
use crate::explicit::{residual_norm_streaming, weighted_l2_norm_squared, GridSpec, SpinorSource};
use crate::potential::PotentialSpec;
use crate::quad::{self, BallResolution, BallRule};
use crate::{Error, Result};

fn g(t: f64) -> (f64, f64) {
    if t > 0.0 {
        let v = (-1.0 / t).exp();
        (v, v / (t * t))
    } else {
        (0.0, 0.0)
    }
}

/// Smooth step equal to 1 for `ρ ≤ 1` and 0 for `ρ ≥ 2`, with its derivative.
pub fn smooth_step(rho: f64) -> (f64, f64) {
    if rho <= 1.0 {
        return (1.0, 0.0);
    }
    if rho >= 2.0 {
        return (0.0, 0.0);
    }
    let (a, da) = g(2.0 - rho);
    let (b, db) = g(rho - 1.0);
    let s = a + b;
    (a / s, (-da * b - a * db) / (s * s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchnolOptions {
    /// Grid and sup-residual threshold for confirming `(H - λ) f = 0` first.
    pub precheck: Option<(GridSpec, f64)>,
    pub tol: f64,
}

impl SchnolOptions {
    pub fn new(tol: f64) -> Self {
        SchnolOptions { precheck: None, tol }
    }
}

/// `(∫ χ(x/n)²|f|², ∫ |∇χ(x/n)|²|f|²)` with `∇` in the scaled variable.
fn cutoff_integrals<S: SpinorSource>(f: &S, n: f64, tol: f64) -> Result<(f64, f64)> {
    let d = f.dim();
    if f.radial_modulus(0.0).is_some() {
        let m2 = |r: f64| f.radial_modulus(r).unwrap_or(0.0).powi(2);
        let inner = quad::radial_integral(d, |r| Ok(m2(r)), n, tol)?.value;
        let area = quad::sphere_area(d);
        let p = d as i32 - 1;
        let shell = quad::integrate(|r| Ok(r.powi(p) * smooth_step(r / n).0.powi(2) * m2(r)), n, 2.0 * n, tol / area)?;
        let grad = quad::integrate(|r| Ok(r.powi(p) * smooth_step(r / n).1.powi(2) * m2(r)), n, 2.0 * n, tol / area)?;
        return Ok((inner + area * shell.value, area * grad.value));
    }
    let center = [0.0; 3];
    let both = |res: BallResolution| -> Result<(f64, f64)> {
        let rule = BallRule::new(d, res)?;
        let mass = rule.integrate(&center[..d], 2.0 * n, |x| {
            let c = smooth_step(crate::potential::norm(x) / n).0;
            Ok(c * c * f.eval(x)?.norm_sqr())
        })?;
        let g = rule.integrate(&center[..d], 2.0 * n, |x| {
            let dc = smooth_step(crate::potential::norm(x) / n).1;
            Ok(dc * dc * f.eval(x)?.norm_sqr())
        })?;
        Ok((mass, g))
    };
    let mut res = BallResolution::default();
    let mut prev = both(res)?;
    for _ in 0..5 {
        res.radial_panels *= 2;
        res.polar *= 2;
        res.azimuth *= 2;
        let next = both(res)?;
        if (next.0 - prev.0).abs() <= tol * next.0.max(1.0) && (next.1 - prev.1).abs() <= tol * next.1.max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature { a: 0.0, b: 2.0 * n, estimate: prev.0, error: f64::INFINITY })
}

/// Residuals `‖(H - λ) f_n‖` from the cutoff identity
/// `(H - λ) f_n = (1/(n‖χ_n f‖)) (-i D·∇χ)(x/n) f`, valid when `(H - λ) f = 0`.
///
/// Rows carry `r_n = n`, `norm = ‖χ_n f‖` and `t1 = residual`. With
/// `precheck` set, `(H - λ) f` is first measured on the given grid (with `λ`
/// absorbed into `q`) and must not exceed the threshold.
pub fn schnol_residual<S: SpinorSource>(
    f: &S,
    q: &PotentialSpec,
    lambda: f64,
    n_list: &[u32],
    opts: &SchnolOptions,
) -> Result<SingularSequenceReport> {
    if q.dim() != f.dim() {
        return Err(Error::arg("q", "potential and field dimensions differ"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::arg("tol", "tolerance must be positive"));
    }
    if let Some((grid, threshold)) = &opts.precheck {
        let shifted = q.shifted(lambda);
        let norms = residual_norm_streaming(f, &shifted, 0.0, grid)?;
        if !(norms.sup <= *threshold) {
            return Err(Error::Invariant(alloc::format!(
                "field is not an eigensolution: sup residual {} exceeds {threshold}",
                norms.sup
            )));
        }
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n == 0 {
            return Err(Error::arg("n_list", "cutoff indices start at 1"));
        }
        let nf = n as f64;
        let (mass, grad) = cutoff_integrals(f, nf, opts.tol)?;
        if !(mass > 0.0) {
            return Err(Error::VanishingField { radius: 2.0 * nf });
        }
        let norm = mass.sqrt();
        let residual = grad.sqrt() / (nf * norm);
        rows.push(SequenceRow {
            n,
            r_n: nf,
            norm,
            residual,
            t1: residual,
            t2: 0.0,
            t3: 0.0,
            allowance: 0.0,
            conditions: None,
        });
    }
    Ok(SingularSequenceReport { lambda, rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassRow {
    pub n: u32,
    /// `M(n) = ∫_{|x| ≤ n} |f|²`.
    pub mass: f64,
    pub mass_double: f64,
    /// `(M(2n) - M(n)) / (n² M(n))`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassRatioReport {
    pub rows: Vec<MassRow>,
    /// Indices `n` at which the ratio attains a new running minimum.
    pub subsequence: Vec<u32>,
}

/// Mass function and ratio over strictly increasing `n_list`.
pub fn mass_ratio_analysis<S: SpinorSource>(f: &S, n_list: &[u32], tol: f64) -> Result<MassRatioReport> {
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::arg("n_list", "indices must be positive and strictly increasing"));
    }
    let mut rows: Vec<MassRow> = Vec::with_capacity(n_list.len());
    let mut subsequence = Vec::new();
    let mut best = f64::INFINITY;
    for &n in n_list {
        let nf = n as f64;
        let mass = weighted_l2_norm_squared(f, 0.0, nf, tol)?;
        let mass_double = weighted_l2_norm_squared(f, 0.0, 2.0 * nf, tol)?;
        let slack = 2.0 * tol;
        if mass_double < mass - slack || rows.last().is_some_and(|p| mass < p.mass - slack) {
            return Err(Error::Invariant(alloc::format!("mass function decreases near n = {n}")));
        }
        if !(mass > 0.0) {
            return Err(Error::VanishingField { radius: nf });
        }
        let ratio = (mass_double - mass) / (nf * nf * mass);
        if ratio < best {
            best = ratio;
            subsequence.push(n);
        }
        rows.push(MassRow { n, mass, mass_double, ratio });
    }
    Ok(MassRatioReport { rows, subsequence })
}
