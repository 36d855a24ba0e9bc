//! The bounded-variation hypothesis and limit ranges of radial profiles.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::bands::slope;
use crate::potential::Profile;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Converging,
    LogDivergent,
    Unknown,
}

/// Total variation of `g(r) = 1/(r(λ - η(r)) - 1)` on `[r0, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BvReport {
    /// `∞` when `g` has a pole in the interval.
    pub tv: f64,
    /// First sign change of `r(λ - η(r)) - 1`.
    pub pole: Option<f64>,
    pub trend: Trend,
    /// `(R_i, TV on [r0, R_i])` for `R_i = 2^i r0`, ending at `R`.
    pub ladder: Vec<(f64, f64)>,
    /// Slope and `R²` of the least-squares fit of `TV(R_i)` against `ln R_i`.
    pub log_slope: f64,
    pub log_r_squared: f64,
    /// Number of partition points behind `tv`.
    pub points: usize,
}

const MAX_POINTS: usize = 1 << 25;

fn denominator(eta: &Profile, lambda: f64, r: f64) -> Result<f64> {
    Ok(r * (lambda - eta.at(r)?) - 1.0)
}

fn sample(eta: &Profile, lambda: f64, r0: f64, r1: f64, n: usize) -> Result<Vec<f64>> {
    let h = (r1 - r0) / n as f64;
    (0..=n).map(|i| denominator(eta, lambda, if i == n { r1 } else { r0 + i as f64 * h })).collect()
}

fn locate_pole(eta: &Profile, lambda: f64, mut a: f64, mut b: f64) -> Result<f64> {
    let mut fa = denominator(eta, lambda, a)?;
    if fa == 0.0 {
        return Ok(a);
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = denominator(eta, lambda, m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

fn variation(den: &[f64]) -> f64 {
    den.windows(2).map(|w| (1.0 / w[1] - 1.0 / w[0]).abs()).sum()
}

/// Total variation on uniform partitions of `[r0, R]`, doubled until two
/// successive sums agree to `1e-9` relative (at most five doublings).
///
/// The trend compares successive increments of `TV` over the doubling ladder:
/// the last three ratios below `0.75` mean converging; otherwise a log-linear
/// fit with `R² ≥ 0.99` and positive slope means log-divergent.
pub fn bv_check(eta: &Profile, lambda: f64, r0: f64, r_max: f64) -> Result<BvReport> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::arg("r0", "r0 must be positive"));
    }
    if !(r_max > r0 && r_max.is_finite()) {
        return Err(Error::arg("R", "R must exceed r0"));
    }
    if !lambda.is_finite() {
        return Err(Error::arg("lambda", "spectral parameter must be finite"));
    }
    let mut n = ((64.0 * (r_max - r0)).ceil() as usize).clamp(4096, MAX_POINTS);
    let mut den = sample(eta, lambda, r0, r_max, n)?;
    let h0 = (r_max - r0) / n as f64;
    for (i, w) in den.windows(2).enumerate() {
        if w[0] == 0.0 || (w[0] > 0.0) != (w[1] > 0.0) {
            let a = r0 + i as f64 * h0;
            let pole = locate_pole(eta, lambda, a, (a + h0).min(r_max))?;
            return Ok(BvReport {
                tv: f64::INFINITY,
                pole: Some(pole),
                trend: Trend::Unknown,
                ladder: Vec::new(),
                log_slope: f64::NAN,
                log_r_squared: f64::NAN,
                points: n + 1,
            });
        }
    }
    let mut tv = variation(&den);
    for _ in 0..5 {
        if 2 * n > MAX_POINTS {
            break;
        }
        let finer = sample(eta, lambda, r0, r_max, 2 * n)?;
        let tv2 = variation(&finer);
        n *= 2;
        den = finer;
        let done = (tv2 - tv).abs() <= 1e-9 * tv2.abs().max(f64::MIN_POSITIVE);
        tv = tv2;
        if done {
            break;
        }
    }
    let h = (r_max - r0) / n as f64;
    let mut cumulative = vec![0.0; n + 1];
    for i in 1..=n {
        cumulative[i] = cumulative[i - 1] + (1.0 / den[i] - 1.0 / den[i - 1]).abs();
    }
    let mut ladder = Vec::new();
    let mut r = 2.0 * r0;
    while r < r_max * (1.0 - 1e-12) {
        let idx = (((r - r0) / h).round() as usize).min(n);
        ladder.push((r, cumulative[idx]));
        r *= 2.0;
    }
    ladder.push((r_max, tv));
    let (log_slope, log_r_squared) = log_fit(&ladder);
    let increments: Vec<f64> = ladder.windows(2).map(|w| w[1].1 - w[0].1).collect();
    // the last rung may be shorter than a doubling; leave it out of the ratios
    let doubling = if (ladder.len() >= 2) && (ladder[ladder.len() - 1].0 / ladder[ladder.len() - 2].0 - 2.0).abs() > 1e-9
    {
        &increments[..increments.len().saturating_sub(1)]
    } else {
        &increments[..]
    };
    let converging = doubling.len() >= 4
        && doubling[doubling.len() - 4..].windows(2).all(|w| w[1] <= 0.75 * w[0] || w[0] == 0.0);
    let trend = if converging {
        Trend::Converging
    } else if log_r_squared >= 0.99 && log_slope > 0.0 {
        Trend::LogDivergent
    } else {
        Trend::Unknown
    };
    Ok(BvReport { tv, pole: None, trend, ladder, log_slope, log_r_squared, points: n + 1 })
}

fn log_fit(ladder: &[(f64, f64)]) -> (f64, f64) {
    let x: Vec<f64> = ladder.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = ladder.iter().map(|p| p.1).collect();
    if x.len() < 3 {
        return (f64::NAN, f64::NAN);
    }
    let b = slope(&x, &y);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let ss_tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let ss_res: f64 = x.iter().zip(&y).map(|(a, v)| (v - my - b * (a - mx)).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (b, r2)
}

const SAMPLES_PER_WINDOW: usize = 4096;

/// Histogram estimate of `∩_{r>0} closure{η(s) : s ≥ r}`.
///
/// `η` is sampled on every window `[w, w + len]`; a common histogram with
/// `bins` bins over all samples marks the occupied bins of each window. The
/// tail beyond `w_i` is represented by the windows starting at or after
/// `w_i`; the estimate is the intersection of those tails, returned as closed
/// intervals merged at bin resolution.
pub fn limit_range(eta: &Profile, window_starts: &[f64], window_len: f64, bins: usize) -> Result<Vec<(f64, f64)>> {
    if window_starts.is_empty() {
        return Err(Error::arg("windows", "at least one window is required"));
    }
    if window_starts.windows(2).any(|w| !(w[1] > w[0])) || window_starts.iter().any(|w| !w.is_finite()) {
        return Err(Error::arg("windows", "window starts must be finite and increasing"));
    }
    if !(window_len > 0.0 && window_len.is_finite()) {
        return Err(Error::arg("window_len", "window length must be positive"));
    }
    if bins == 0 {
        return Err(Error::arg("bins", "need at least one bin"));
    }
    let mut samples = Vec::with_capacity(window_starts.len());
    for &w in window_starts {
        let vals = (0..=SAMPLES_PER_WINDOW)
            .map(|i| eta.at(w + window_len * i as f64 / SAMPLES_PER_WINDOW as f64))
            .collect::<Result<Vec<f64>>>()?;
        samples.push(vals);
    }
    let lo = samples.iter().flatten().fold(f64::INFINITY, |a, &v| a.min(v));
    let hi = samples.iter().flatten().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::arg("eta", "profile is not finite on the windows"));
    }
    if hi - lo <= 1e-14 * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
        return Ok(vec![(lo, hi)]);
    }
    let width = (hi - lo) / bins as f64;
    let occupied = |vals: &[f64]| -> Vec<bool> {
        let mut b = vec![false; bins];
        for &v in vals {
            b[(((v - lo) / width) as usize).min(bins - 1)] = true;
        }
        b
    };
    let mut tail = vec![false; bins];
    let mut result = vec![true; bins];
    for vals in samples.iter().rev() {
        for (t, o) in tail.iter_mut().zip(occupied(vals)) {
            *t |= o;
        }
        for (r, t) in result.iter_mut().zip(&tail) {
            *r &= *t;
        }
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < bins {
        if result[i] {
            let start = i;
            while i + 1 < bins && result[i + 1] {
                i += 1;
            }
            out.push((lo + start as f64 * width, lo + (i + 1) as f64 * width));
        }
        i += 1;
    }
    Ok(out)
}
