//! Band maps of periodic profiles and growth of solutions.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::{monodromy, profile_mean, propagate_observed, RadialSystem};
use crate::linalg::Mat2;
use crate::potential::Profile;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandClass {
    Band,
    /// `(λ - η̂)p ∈ πℤ` to grid resolution: `|D| = 2`.
    Exceptional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRow {
    pub lambda: f64,
    /// `2 cos((λ - η̂)p)`.
    pub discriminant: f64,
    pub class: BandClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandMap {
    pub period: f64,
    pub mean: f64,
    pub rows: Vec<BandRow>,
}

impl BandMap {
    pub fn exceptional(&self) -> impl Iterator<Item = &BandRow> {
        self.rows.iter().filter(|r| r.class == BandClass::Exceptional)
    }
}

/// Classifies each `λ` of `grid` for a periodic profile.
///
/// `λ` is exceptional when `(λ - η̂)p` lies within `p·s/2` of `πℤ`, where `s`
/// is the smaller neighbouring grid spacing; a lone point uses `1e-12`.
pub fn band_map(eta: &Profile, p: f64, grid: &[f64], tol: f64) -> Result<BandMap> {
    if grid.iter().any(|l| !l.is_finite()) {
        return Err(Error::arg("lambda", "grid values must be finite"));
    }
    let mean = profile_mean(eta, p, tol)?;
    let n = grid.len();
    let rows = (0..n)
        .map(|i| {
            let lambda = grid[i];
            let left = if i > 0 { (lambda - grid[i - 1]).abs() } else { f64::INFINITY };
            let right = if i + 1 < n { (grid[i + 1] - lambda).abs() } else { f64::INFINITY };
            let spacing = left.min(right);
            let half = if spacing.is_finite() { 0.5 * spacing } else { 1e-12 };
            let phase = (lambda - mean) * p;
            let dist = (phase - core::f64::consts::PI * (phase / core::f64::consts::PI).round()).abs();
            let class = if dist < p * half { BandClass::Exceptional } else { BandClass::Band };
            BandRow { lambda, discriminant: 2.0 * phase.cos(), class }
        })
        .collect();
    Ok(BandMap { period: p, mean, rows })
}

/// Maximum of `‖Ψ(r)‖` over `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
    pub sup_norm: f64,
}

/// Monodromy eigen-data of one period: `μ` and the eigenvector matrix `E`
/// (columns), reported for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyDiagnostics {
    pub j: usize,
    pub discriminant: f64,
    pub mu: [Complex64; 2],
    pub eigenvectors: [[Complex64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub lambda: f64,
    pub k: f64,
    pub windows: Vec<Window>,
    /// Least-squares slope of `ln sup‖Ψ‖` against `ln r` over the windows.
    pub growth_exponent: f64,
    pub last_period: Option<MonodromyDiagnostics>,
}

fn eigen_data(m: &Mat2, j: usize) -> MonodromyDiagnostics {
    let [[a, b], [c, d]] = m.0;
    let half = 0.5 * (a + d);
    let disc = Complex64::new(half * half - m.det(), 0.0).sqrt();
    let mu = [Complex64::new(half, 0.0) + disc, Complex64::new(half, 0.0) - disc];
    let vec_for = |mu: Complex64| -> [Complex64; 2] {
        // (M - μ) v = 0: take v = (b, μ - a) or (μ - d, c), whichever is larger
        let v1 = [Complex64::new(b, 0.0), mu - a];
        let v2 = [mu - d, Complex64::new(c, 0.0)];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        if n == 0.0 {
            return [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        }
        let s = 1.0 / n.sqrt();
        [v[0] * s, v[1] * s]
    };
    let e0 = vec_for(mu[0]);
    let e1 = vec_for(mu[1]);
    MonodromyDiagnostics {
        j,
        discriminant: a + d,
        mu,
        eigenvectors: [[e0[0], e1[0]], [e0[1], e1[1]]],
    }
}

/// Sup-norm of the fundamental matrix on dyadic windows `[2^m p, 2^{m+1} p]`
/// up to `r_max`, started from `Ψ(p) = I`.
///
/// Each accepted step is sampled at its ends and three interior points of
/// the dense output.
pub fn boundedness_probe(sys: &RadialSystem, r_max: f64, tol: f64) -> Result<GrowthReport> {
    let p = sys.period().ok_or_else(|| Error::arg("period", "boundedness probe needs a periodic profile"))?;
    if !(r_max >= 2.0 * p) {
        return Err(Error::arg("R_max", "R_max must be at least two periods"));
    }
    let mut edges = Vec::new();
    let mut e = p;
    while e < r_max {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(r_max);
    let mut windows: Vec<Window> = edges
        .windows(2)
        .map(|w| Window { start: w[0], end: w[1], sup_norm: 0.0 })
        .collect();
    let mut record = |r: f64, m: Mat2| {
        let i = windows.partition_point(|w| w.end < r).min(windows.len() - 1);
        windows[i].sup_norm = windows[i].sup_norm.max(m.norm());
    };
    propagate_observed(sys, p, r_max, tol, |step| {
        for s in 1..=4 {
            let r = step.t0 + (step.t1 - step.t0) * s as f64 / 4.0;
            let y = if s == 4 { step.y1 } else { step.eval(r) };
            record(r, Mat2::from_flat(y));
        }
        // a long step must still visit every window it crosses
        for &edge in edges.iter().filter(|&&e| e > step.t0 && e < step.t1) {
            record(edge, Mat2::from_flat(step.eval(edge)));
        }
    })?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = windows.iter().map(|w| (w.end.ln(), w.sup_norm.ln())).unzip();
    let growth_exponent = slope(&xs, &ys);
    let last_j = (r_max / p).floor() as usize;
    let last_period = if last_j >= 2 {
        Some(eigen_data(&monodromy(sys, last_j, tol)?.transfer.m, last_j))
    } else {
        None
    };
    Ok(GrowthReport { lambda: sys.lambda(), k: sys.k(), windows, growth_exponent, last_period })
}

/// Least-squares slope; zero for fewer than two points.
pub(crate) fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
