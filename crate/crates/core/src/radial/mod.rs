//! The separated radial system and its transfer matrices.
//!
//! After separation in polar or spherical coordinates each angular channel
//! `k` obeys `-iσ₂ u' + η u + σ₁ (k/r) u = λ u` for `u: (0, ∞) → ℝ²`.
//! Multiplying by `iσ₂` gives the real first-order form `u' = G(r) u` with
//!
//! ```text
//! G(r) = [[ -k/r,     λ - η(r) ],
//!         [ -(λ - η(r)),  k/r  ]]
//! ```
//!
//! which is trace-free, so transfer matrices have unit determinant.

mod bands;
mod bv;

pub use bands::{band_map, boundedness_probe, BandClass, BandMap, BandRow, GrowthReport, MonodromyDiagnostics, Window};
pub(crate) use bands::slope;
pub use bv::{bv_check, limit_range, BvReport, Trend};

use alloc::vec::Vec;

use num_traits::Float;

use crate::linalg::Mat2;
use crate::ode::{self, Tolerances};
use crate::potential::{Kind, PotentialSpec, Profile};
use crate::quad;
use crate::{Error, Result};

/// Largest admissible drift of `det Ψ` from 1.
pub const DET_TOLERANCE: f64 = 1e-10;

/// One angular channel of the radial problem at a fixed spectral parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSystem {
    eta: Profile,
    period: Option<f64>,
    k: f64,
    lambda: f64,
    dim: usize,
}

fn is_integer(x: f64) -> bool {
    x.is_finite() && x == x.round()
}

fn check_index(dim: usize, k: f64) -> Result<()> {
    let ok = match dim {
        3 => is_integer(k),
        2 => k == 0.0 || is_integer(k - 0.5),
        _ => return Err(Error::arg("dimension", "dimension must be 2 or 3")),
    };
    if ok {
        Ok(())
    } else if dim == 3 {
        Err(Error::arg("k", "angular index must be a nonzero integer in 3-D (or 0)"))
    } else {
        Err(Error::arg("k", "angular index must be a half-integer in 2-D (or 0)"))
    }
}

impl RadialSystem {
    /// `k = 0` is accepted in both dimensions as the comparison system.
    pub fn new(eta: Profile, dim: usize, k: f64, lambda: f64) -> Result<Self> {
        check_index(dim, k)?;
        if !lambda.is_finite() {
            return Err(Error::arg("lambda", "spectral parameter must be finite"));
        }
        Ok(RadialSystem { eta, period: None, k, lambda, dim })
    }

    /// From a radial [`PotentialSpec`], inheriting its declared period.
    pub fn from_spec(spec: &PotentialSpec, k: f64, lambda: f64) -> Result<Self> {
        if !matches!(spec.kind(), Kind::Radial { .. }) {
            return Err(Error::arg("eta", "a radial potential is required"));
        }
        let sys = Self::new(spec.to_profile()?, spec.dim(), k, lambda)?;
        match spec.period() {
            Some(p) => sys.with_period(p),
            None => Ok(sys),
        }
    }

    pub fn with_period(mut self, p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::arg("period", "period must be positive and finite"));
        }
        self.period = Some(p);
        Ok(self)
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        RadialSystem { lambda, ..self.clone() }
    }

    pub fn with_k(&self, k: f64) -> Result<Self> {
        check_index(self.dim, k)?;
        Ok(RadialSystem { k, ..self.clone() })
    }

    pub fn eta(&self) -> &Profile {
        &self.eta
    }
    pub fn period(&self) -> Option<f64> {
        self.period
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `G(r)`.
    pub fn generator(&self, r: f64) -> Result<Mat2> {
        let kr = if self.k == 0.0 {
            0.0
        } else if r > 0.0 {
            self.k / r
        } else {
            return Err(Error::Singularity { r });
        };
        let w = self.lambda - self.eta.at(r)?;
        Ok(Mat2([[-kr, w], [-w, kr]]))
    }
}

/// The first `cutoff` angular indices ordered by `|k|`, positive first:
/// `±1, ±2, …` in 3-D and `±½, ±3/2, …` in 2-D.
pub fn angular_indices(dim: usize, cutoff: usize) -> Result<Vec<f64>> {
    let offset = match dim {
        3 => 1.0,
        2 => 0.5,
        _ => return Err(Error::arg("dimension", "dimension must be 2 or 3")),
    };
    if cutoff == 0 {
        return Err(Error::arg("cutoff", "cutoff must be at least 1"));
    }
    Ok((0..cutoff)
        .map(|i| {
            let m = offset + (i / 2) as f64;
            if i % 2 == 0 {
                m
            } else {
                -m
            }
        })
        .collect())
}

/// `u' = G(r) u`.
pub fn radial_rhs(r: f64, u: [f64; 2], sys: &RadialSystem) -> Result<[f64; 2]> {
    Ok(sys.generator(r)?.apply(u))
}

/// `Ψ(r₁)` for `Ψ' = GΨ`, `Ψ(r₀) = I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m: Mat2,
    pub r0: f64,
    pub r1: f64,
}

impl TransferMatrix {
    pub fn det(&self) -> f64 {
        self.m.det()
    }

    /// `other ∘ self`; requires `self.r1 == other.r0`.
    pub fn then(&self, other: &TransferMatrix) -> Result<TransferMatrix> {
        if self.r1 != other.r0 {
            return Err(Error::arg("interval", "transfer matrices must share an endpoint"));
        }
        Ok(TransferMatrix { m: other.m * self.m, r0: self.r0, r1: other.r1 })
    }

    /// Propagator from `r1` back to `r0`; exact inverse since `det = 1`.
    pub fn inverse(&self) -> TransferMatrix {
        let [[a, b], [c, d]] = self.m.0;
        TransferMatrix { m: Mat2([[d, -b], [-c, a]]), r0: self.r1, r1: self.r0 }
    }
}

fn integration_tolerances(tol: f64, span: f64) -> Result<Tolerances> {
    if !(tol > 0.0) {
        return Err(Error::arg("tol", "tolerance must be positive"));
    }
    // det Ψ drifts by roughly half the local tolerance per unit length, so
    // long intervals need a proportionally tighter one to keep it under 1e-10
    let t = (tol * 1e-2).min(1e-12).min(2e-11 / span.max(1.0)).max(1e-15);
    Ok(Tolerances { rtol: t, atol: t, ..Tolerances::uniform(t) })
}

fn check_interval(sys: &RadialSystem, r0: f64, r1: f64) -> Result<()> {
    if !r0.is_finite() || !r1.is_finite() {
        return Err(Error::arg("r", "interval endpoints must be finite"));
    }
    if sys.k != 0.0 && (r0 <= 0.0 || r1 <= 0.0) {
        return Err(Error::Singularity { r: 0.0 });
    }
    Ok(())
}

/// As [`propagate`], handing every accepted step (flattened `Ψ`, row-major,
/// with dense output) to `observe`.
pub fn propagate_observed<O>(sys: &RadialSystem, r0: f64, r1: f64, tol: f64, mut observe: O) -> Result<TransferMatrix>
where
    O: FnMut(&ode::Step<4>),
{
    check_interval(sys, r0, r1)?;
    let tols = integration_tolerances(tol, (r1 - r0).abs())?;
    let f = |r: f64, y: &[f64; 4]| -> Result<[f64; 4]> {
        let g = sys.generator(r)?;
        let m = g * Mat2::from_flat(*y);
        Ok(m.flat())
    };
    let y = ode::integrate(f, r0, Mat2::IDENTITY.flat(), r1, &tols, &mut observe)?;
    let out = TransferMatrix { m: Mat2::from_flat(y), r0, r1 };
    if !((out.det() - 1.0).abs() <= DET_TOLERANCE) {
        return Err(Error::Invariant(alloc::format!(
            "det of the transfer matrix on [{r0}, {r1}] drifted to {:e}",
            out.det()
        )));
    }
    Ok(out)
}

/// Fundamental matrix `Ψ(r1)` with `Ψ(r0) = I`, by adaptive Dormand–Prince.
pub fn propagate(sys: &RadialSystem, r0: f64, r1: f64, tol: f64) -> Result<TransferMatrix> {
    propagate_observed(sys, r0, r1, tol, |_| {})
}

/// `Q(r) = ∫₀ʳ η`.
pub fn profile_antiderivative(eta: &Profile, r: f64, tol: f64) -> Result<f64> {
    Ok(quad::integrate(|s| eta.at(s), 0.0, r, tol)?.value)
}

/// `Φ(r) = I cos θ - iσ₂ sin θ`, `θ = Q(r) - λ(r - anchor)`; the solution of
/// the `k = 0` system. With `Q(anchor) = 0` it equals `I` at the anchor.
pub fn free_propagator(eta: &Profile, r: f64, anchor: f64, lambda: f64, tol: f64) -> Result<TransferMatrix> {
    let theta = profile_antiderivative(eta, r, tol)? - lambda * (r - anchor);
    Ok(TransferMatrix { m: Mat2::rotation(-theta), r0: anchor, r1: r })
}

/// Monodromy over the `j`-th period `[(j-1)p, jp]` and its trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    pub j: usize,
    pub transfer: TransferMatrix,
    pub discriminant: f64,
}

pub fn monodromy(sys: &RadialSystem, j: usize, tol: f64) -> Result<Monodromy> {
    let p = sys.period.ok_or_else(|| Error::arg("period", "monodromy needs a periodic profile"))?;
    if j == 0 {
        return Err(Error::arg("j", "period index starts at 1"));
    }
    let t = propagate(sys, (j - 1) as f64 * p, j as f64 * p, tol)?;
    Ok(Monodromy { j, transfer: t, discriminant: t.m.trace() })
}

/// `I cos θ + iσ₂ sin θ` with `θ = (λ - η̂)p`: the monodromy of the `k = 0` system.
pub fn closed_form_monodromy(lambda: f64, mean: f64, p: f64) -> Mat2 {
    Mat2::rotation((lambda - mean) * p)
}

/// `(1 + 1/(j-1))^{|k|} - 1`, the bound on `‖M_j - M‖`.
pub fn monodromy_deviation_bound(k: f64, j: usize) -> f64 {
    if j < 2 {
        return f64::INFINITY;
    }
    (1.0 + 1.0 / (j - 1) as f64).powf(k.abs()) - 1.0
}

/// `η̂ = (1/p) ∫₀ᵖ η`.
pub fn profile_mean(eta: &Profile, p: f64, tol: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::arg("period", "period must be positive"));
    }
    Ok(quad::integrate(|s| eta.at(s), 0.0, p, tol * p)?.value / p)
}
