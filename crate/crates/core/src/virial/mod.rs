//! Virial bounds on the point spectrum, the virial integral, and desk-scale
//! checks with discretized radial operators.
//!
//! Every eigenvalue lies in `[m_q, M_q]`, the range of `v(x) = q(x) + x·∇q(x)`,
//! because a normalized eigenfunction satisfies `∫ v |f|² = λ`.

mod discrete;
mod probe;

pub use discrete::{collocated_radial_eigenvalues, discrete_radial_eigenvalues, DiscreteEigenvalue, DiscreteSpectrum, Localization};
pub use probe::{l2_solution_probe, L2ProbeReport, L2Verdict, ProbeSample};

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::explicit::SpinorSource;
use crate::potential::{Kind, PotentialSpec};
use crate::quad::{self, BallResolution, BallRule};
use crate::{Error, Result};

/// `v(x) = q(x) + x·∇q(x)`; fails at points where `q` has no derivative.
pub fn virial_function(q: &PotentialSpec, x: &[f64]) -> Result<f64> {
    let g = q.grad(x)?;
    if !g.smooth {
        return Err(Error::NonDifferentiable { point: x.to_vec() });
    }
    Ok(g.value + g.radial_derivative)
}

/// One density level of the grid search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub density: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchDomain {
    pub radius: f64,
    pub refinements: Vec<Refinement>,
    /// Each doubling moved the bounds by no more than the doubling before.
    pub cauchy: bool,
}

/// Extremes of `v` at radii `2ʲ R` beyond the search ball (radial potentials).
#[derive(Debug, Clone, PartialEq)]
pub struct TailRecord {
    pub radii: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VirialBounds {
    pub lower: f64,
    pub upper: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
    pub domain: SearchDomain,
    pub tail: Option<TailRecord>,
}

fn point_on(q: &PotentialSpec, s: f64) -> Vec<f64> {
    let mut x = vec![0.0; q.dim()];
    match q.kind() {
        Kind::Layered { direction } => {
            for (xi, k) in x.iter_mut().zip(direction.as_slice()) {
                *xi = s * k;
            }
        }
        _ => x[0] = s,
    }
    x
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
fn golden<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    Ok(if fm <= fc.min(fd) {
        (m, fm)
    } else if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    })
}

/// Minimum over the 1-D line `[lo, hi]` of `sign·v`, at `density + 1` grid points then refined.
fn line_extreme(q: &PotentialSpec, lo: f64, hi: f64, density: usize, sign: f64) -> Result<(f64, f64)> {
    let h = (hi - lo) / density as f64;
    let f = |s: f64| -> Result<f64> { Ok(sign * virial_function(q, &point_on(q, s))?) };
    let mut best = (lo, f(lo)?);
    let mut best_i = 0;
    for i in 1..=density {
        let s = lo + i as f64 * h;
        let v = f(s)?;
        if v < best.1 {
            best = (s, v);
            best_i = i;
        }
    }
    let a = lo + best_i.saturating_sub(1) as f64 * h;
    let b = (lo + (best_i + 1) as f64 * h).min(hi);
    let refined = golden(f, a, b, 1e-12 * (hi - lo).max(1.0))?;
    Ok(if refined.1 < best.1 { refined } else { best })
}

fn clamp_to_ball(x: &mut [f64], radius: f64) {
    let n = crate::potential::norm(x);
    if n > radius {
        x.iter_mut().for_each(|v| *v *= radius / n);
    }
}

/// Nelder–Mead from `start` inside the ball, simplex size `step`.
fn nelder_mead<F: FnMut(&[f64]) -> Result<f64>>(mut f: F, start: &[f64], step: f64, radius: f64) -> Result<(Vec<f64>, f64)> {
    let d = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((start.to_vec(), f(start)?));
    for i in 0..d {
        let mut p = start.to_vec();
        p[i] += step;
        clamp_to_ball(&mut p, radius);
        let v = f(&p)?;
        simplex.push((p, v));
    }
    let eval = |p: Vec<f64>, f: &mut F| -> Result<(Vec<f64>, f64)> {
        let mut p = p;
        clamp_to_ball(&mut p, radius);
        let v = f(&p)?;
        Ok((p, v))
    };
    for _ in 0..2000 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[d].1 - simplex[0].1;
        let size = simplex.iter().map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)).fold(0.0, f64::max);
        if spread.abs() <= 1e-15 * simplex[0].1.abs().max(1.0) && size <= 1e-10 * radius.max(1.0) {
            break;
        }
        let centroid: Vec<f64> = (0..d).map(|j| simplex[..d].iter().map(|(p, _)| p[j]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..d).map(|j| centroid[j] + t * (simplex[d].0[j] - centroid[j])).collect() };
        let r = eval(along(-1.0), &mut f)?;
        if r.1 < simplex[0].1 {
            let e = eval(along(-2.0), &mut f)?;
            simplex[d] = if e.1 < r.1 { e } else { r };
        } else if r.1 < simplex[d - 1].1 {
            simplex[d] = r;
        } else {
            let c = if r.1 < simplex[d].1 { eval(along(-0.5), &mut f)? } else { eval(along(0.5), &mut f)? };
            if c.1 < simplex[d].1.min(r.1) {
                simplex[d] = c;
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let p: Vec<f64> = item.0.iter().zip(&best).map(|(a, b)| b + 0.5 * (a - b)).collect();
                    *item = eval(p, &mut f)?;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(simplex.swap_remove(0))
}

fn cartesian_extreme(q: &PotentialSpec, radius: f64, density: usize, sign: f64) -> Result<(Vec<f64>, f64)> {
    let d = q.dim();
    let h = 2.0 * radius / density as f64;
    let f = |x: &[f64]| -> Result<f64> { Ok(sign * virial_function(q, x)?) };
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    'scan: loop {
        for j in 0..d {
            x[j] = -radius + idx[j] as f64 * h;
        }
        if crate::potential::norm(&x) <= radius {
            let v = f(&x)?;
            if best.as_ref().is_none_or(|b| v < b.1) {
                best = Some((x.clone(), v));
            }
        }
        for j in 0..d {
            idx[j] += 1;
            if idx[j] <= density {
                continue 'scan;
            }
            idx[j] = 0;
        }
        break;
    }
    let (start, v0) = best.ok_or_else(|| Error::arg("density", "grid has no point in the ball"))?;
    let refined = nelder_mead(f, &start, h, radius)?;
    Ok(if refined.1 < v0 { refined } else { (start, v0) })
}

fn extremes(q: &PotentialSpec, radius: f64, density: usize) -> Result<(Vec<f64>, f64, Vec<f64>, f64)> {
    match q.kind() {
        Kind::Cartesian => {
            let (amin, vmin) = cartesian_extreme(q, radius, density, 1.0)?;
            let (amax, vmax) = cartesian_extreme(q, radius, density, -1.0)?;
            Ok((amin, vmin, amax, -vmax))
        }
        kind => {
            let lo = if let Kind::Radial { .. } = kind { 0.0 } else { -radius };
            let (smin, vmin) = line_extreme(q, lo, radius, density, 1.0)?;
            let (smax, vmax) = line_extreme(q, lo, radius, density, -1.0)?;
            Ok((point_on(q, smin), vmin, point_on(q, smax), -vmax))
        }
    }
}

/// `(m_q, M_q)` over the ball of radius `radius`.
///
/// Radial and layered potentials reduce to a line search; Cartesian ones scan
/// a cube grid of `density` cells per axis and polish with Nelder–Mead. The
/// search is repeated at densities `density`, `2·density`, `4·density` and
/// the finest level is returned.
pub fn virial_bounds(q: &PotentialSpec, radius: f64, density: usize) -> Result<VirialBounds> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::arg("R", "search radius must be positive and finite"));
    }
    if density < 2 {
        return Err(Error::arg("density", "grid density must be at least 2"));
    }
    let mut refinements = Vec::new();
    let mut last = None;
    for level in 0..3 {
        let n = density << level;
        let e = extremes(q, radius, n)?;
        refinements.push(Refinement { density: n, lower: e.1, upper: e.3 });
        last = Some(e);
    }
    let (argmin, lower, argmax, upper) = last.expect("three levels ran");
    let change = |i: usize| {
        (refinements[i].lower - refinements[i - 1].lower)
            .abs()
            .max((refinements[i].upper - refinements[i - 1].upper).abs())
    };
    let cauchy = change(2) <= change(1) + 1e-14;
    let tail = match q.kind() {
        Kind::Radial { .. } => {
            let radii: Vec<f64> = (1..=20).map(|j| radius * (1u64 << j) as f64).collect();
            let vals = radii.iter().map(|&r| virial_function(q, &point_on(q, r))).collect::<Result<Vec<f64>>>()?;
            Some(TailRecord {
                lower: vals.iter().copied().fold(f64::INFINITY, f64::min),
                upper: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                radii,
            })
        }
        _ => None,
    };
    Ok(VirialBounds { lower, upper, argmin, argmax, domain: SearchDomain { radius, refinements, cauchy }, tail })
}

/// `∫ v |f|² / ∫ |f|²` over `|x| ≤ radius`.
///
/// A radial `q` with a field of radial modulus uses adaptive radial quadrature
/// (`radius` may be infinite); otherwise product ball rules are refined until
/// two successive values agree to `tol`.
pub fn virial_integral<S: SpinorSource>(f: &S, q: &PotentialSpec, radius: f64, tol: f64) -> Result<f64> {
    if q.dim() != f.dim() {
        return Err(Error::arg("q", "potential and field dimensions differ"));
    }
    if !(tol > 0.0) || !(radius > 0.0) {
        return Err(Error::arg("tol", "tolerance and radius must be positive"));
    }
    let d = f.dim();
    if let (Kind::Radial { .. }, Some(_)) = (q.kind(), f.radial_modulus(0.0)) {
        let m2 = |r: f64| f.radial_modulus(r).unwrap_or(0.0).powi(2);
        let mass = quad::radial_integral(d, |r| Ok(m2(r)), radius, tol * 1e-2)?.value;
        if !(mass > 0.0) {
            return Err(Error::VanishingField { radius });
        }
        let num = quad::radial_integral(d, |r| Ok(virial_function(q, &point_on(q, r))? * m2(r)), radius, tol * 1e-2 * mass)?;
        return Ok(num.value / mass);
    }
    if !radius.is_finite() {
        return Err(Error::arg("R", "an infinite radius needs a radial potential and a field with radial modulus"));
    }
    let center = [0.0; 3];
    let ratio = |res: BallResolution| -> Result<f64> {
        let rule = BallRule::new(d, res)?;
        let mass = rule.integrate(&center[..d], radius, |x| Ok(f.eval(x)?.norm_sqr()))?;
        if !(mass > 0.0) {
            return Err(Error::VanishingField { radius });
        }
        let num = rule.integrate(&center[..d], radius, |x| Ok(virial_function(q, x)? * f.eval(x)?.norm_sqr()))?;
        Ok(num / mass)
    };
    let mut res = BallResolution::default();
    let mut prev = ratio(res)?;
    for _ in 0..5 {
        res.radial_panels *= 2;
        res.polar *= 2;
        res.azimuth *= 2;
        let next = ratio(res)?;
        if (next - prev).abs() <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature { a: 0.0, b: radius, estimate: prev, error: f64::INFINITY })
}

#[cfg(test)]
mod tests;
