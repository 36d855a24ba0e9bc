//! Mass growth of the fundamental system of the radial equation.

use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::Mat2;
use crate::ode::{self, Tolerances};
use crate::radial::RadialSystem;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L2Verdict {
    /// Every solution's mass grows at least linearly: consistent with `λ ∉ σ_p`.
    NoL2SolutionEvidence,
    /// Some solution may be square integrable; nothing is asserted.
    PossibleEigenvalue,
}

/// Extreme eigenvalues of the Gram matrix `∫_{R/2}^{R} Ψᵀ Ψ dr`.
///
/// `min_mass` is the smallest `∫_{R/2}^{R} |u|²` over solutions with `|u(r₀)| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSample {
    pub r: f64,
    pub min_mass: f64,
    pub max_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct L2ProbeReport {
    pub lambda: f64,
    pub k: f64,
    pub r0: f64,
    pub samples: Vec<ProbeSample>,
    /// Least-squares slope of shell `min_mass` against `R` over the last four shells.
    pub growth_rate: f64,
    /// Log-log slope over the same samples.
    pub growth_exponent: f64,
    pub verdict: L2Verdict,
}

/// Starting radius, away from the `k/r` singularity.
pub const PROBE_START: f64 = 1.0;

fn gram_extremes(g00: f64, g01: f64, g11: f64) -> (f64, f64) {
    let m = 0.5 * (g00 + g11);
    let d = (0.25 * (g00 - g11).powi(2) + g01 * g01).sqrt();
    (m - d, m + d)
}

/// Integrates `Ψ` with `Ψ(r₀) = I` together with `G(R) = ∫_{r₀}^{R} ΨᵀΨ`, and
/// samples the dyadic shells `[R/2, R]` for `R = R_max/2⁵, …, R_max`.
///
/// A square-integrable solution has shell mass tending to zero; bounded
/// oscillating ones have shell mass proportional to `R`. The verdict is
/// [`L2Verdict::NoL2SolutionEvidence`] when the fitted rate over the last four
/// shells is positive, their log-log exponent is at least 1/2 and the shell
/// Gram matrices are well conditioned (`max/min < 1e12`); exponential
/// dichotomies therefore never produce it.
pub fn l2_solution_probe(sys: &RadialSystem, r_max: f64, tol: f64) -> Result<L2ProbeReport> {
    if !(r_max > 64.0 * PROBE_START && r_max.is_finite()) {
        return Err(Error::arg("R_max", "probe radius must exceed 64"));
    }
    if !(tol > 0.0) {
        return Err(Error::arg("tol", "tolerance must be positive"));
    }
    let t = tol.min(1e-10);
    let tols = Tolerances { rtol: t, atol: t, ..Tolerances::uniform(t) };
    let f = |r: f64, y: &[f64; 7]| -> Result<[f64; 7]> {
        let g = sys.generator(r)?;
        let psi = Mat2::from_flat([y[0], y[1], y[2], y[3]]);
        let d = (g * psi).flat();
        Ok([
            d[0],
            d[1],
            d[2],
            d[3],
            y[0] * y[0] + y[2] * y[2],
            y[0] * y[1] + y[2] * y[3],
            y[1] * y[1] + y[3] * y[3],
        ])
    };
    let mut y = [1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
    let mut r = PROBE_START;
    let mut samples = Vec::new();
    let mut prev = [0.0; 3];
    for j in (0..=6).rev() {
        let target = r_max / (1u32 << j) as f64;
        y = ode::integrate(f, r, y, target, &tols, |_| {})?;
        r = target;
        if j < 6 {
            let (lo, hi) = gram_extremes(y[4] - prev[0], y[5] - prev[1], y[6] - prev[2]);
            samples.push(ProbeSample { r, min_mass: lo, max_mass: hi });
        }
        prev = [y[4], y[5], y[6]];
    }
    let tail = &samples[samples.len() - 4..];
    let xs: Vec<f64> = tail.iter().map(|s| s.r).collect();
    let ys: Vec<f64> = tail.iter().map(|s| s.min_mass).collect();
    let growth_rate = crate::radial::slope(&xs, &ys);
    let positive = tail.iter().all(|s| s.min_mass > 0.0);
    let growth_exponent = if positive {
        let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
        crate::radial::slope(&lx, &ly)
    } else {
        0.0
    };
    let last = samples[samples.len() - 1];
    let conditioned = positive && last.max_mass / last.min_mass < 1e12;
    let verdict = if growth_rate > 0.0 && growth_exponent >= 0.5 && conditioned {
        L2Verdict::NoL2SolutionEvidence
    } else {
        L2Verdict::PossibleEigenvalue
    };
    Ok(L2ProbeReport {
        lambda: sys.lambda(),
        k: sys.k(),
        r0: PROBE_START,
        samples,
        growth_rate,
        growth_exponent,
        verdict,
    })
}
