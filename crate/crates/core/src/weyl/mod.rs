//! Singular sequences `f_n = χ_n F_n` and their residuals.
//!
//! A sequence element is a normalized cutoff `χ_n(x) = r_n^{-d/2} χ((x - a_n)/r_n)`
//! times a unit-modulus spinor field `F_n` that solves the layered equation
//! for a profile `η_n` along `k_n`. Reports compare the measured residual
//! `‖(H - λ) f_n‖` against the three terms of the analytic bound.

mod schnol;
mod sequence;

pub use schnol::{mass_ratio_analysis, schnol_residual, smooth_step, MassRatioReport, MassRow, SchnolOptions};
pub use sequence::{
    distorted_residual_report, planar_residual_report, planar_weyl_element, sequence_row, WeylElement, WeylOptions,
};

use alloc::vec::Vec;

use num_traits::Float;

use crate::clifford::UnitVector;
use crate::potential::{Kind, PotentialSpec, Profile};
use crate::quad;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpKind {
    /// `(1 - |x|²)⁴`, C³ across the sphere.
    Poly,
    /// `exp(1/(|x|² - 1))`, C^∞.
    Exp,
}

/// Radial bump supported in the closed unit ball, normalized in L².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    kind: BumpKind,
    dim: usize,
    c: f64,
    grad_l2: f64,
    sup: f64,
}

fn shape(kind: BumpKind, rho: f64) -> (f64, f64) {
    if !(rho < 1.0) {
        return (0.0, 0.0);
    }
    let w = rho * rho - 1.0;
    match kind {
        BumpKind::Poly => {
            let w3 = w * w * w;
            (w3 * w, 8.0 * rho * w3)
        }
        BumpKind::Exp => {
            let b = (1.0 / w).exp();
            (b, -2.0 * rho * b / (w * w))
        }
    }
}

impl BumpProfile {
    pub fn new(kind: BumpKind, dim: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::arg("dimension", "bump needs d = 2 or 3"));
        }
        let area = quad::sphere_area(dim);
        let p = dim as i32 - 1;
        let mass = quad::integrate(|r| Ok(r.powi(p) * shape(kind, r).0.powi(2)), 0.0, 1.0, 1e-15)?.value * area;
        let grad = quad::integrate(|r| Ok(r.powi(p) * shape(kind, r).1.powi(2)), 0.0, 1.0, 1e-13)?.value * area;
        let c = 1.0 / mass.sqrt();
        Ok(BumpProfile { kind, dim, c, grad_l2: c * grad.sqrt(), sup: c * shape(kind, 0.0).0 })
    }

    pub fn kind(&self) -> BumpKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normalization(&self) -> f64 {
        self.c
    }

    /// `‖∇χ‖_{L²}`, which equals `‖(D·∇)χ‖_{L²}` since `|(D·v) u| = |v||u|`.
    pub fn grad_l2(&self) -> f64 {
        self.grad_l2
    }

    /// `‖χ‖_∞ = χ(0)`.
    pub fn sup(&self) -> f64 {
        self.sup
    }

    /// Value and radial derivative at `|x| = rho`.
    pub fn radial(&self, rho: f64) -> (f64, f64) {
        let (v, dv) = shape(self.kind, rho);
        (self.c * v, self.c * dv)
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        self.radial(crate::potential::norm(y)).0
    }

    pub fn gradient(&self, y: &[f64]) -> [f64; 3] {
        let rho = crate::potential::norm(y);
        let mut g = [0.0; 3];
        if rho > 0.0 {
            let dv = self.radial(rho).1 / rho;
            for (gi, yi) in g.iter_mut().zip(y) {
                *gi = dv * yi;
            }
        }
        g
    }
}

/// Replacement of `η_n` by a smooth `η̃_n` before building `F_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    None,
    /// Convolution with a normalized Gaussian of standard deviation
    /// `width_factor / r_n`, truncated at six deviations.
    Gaussian { width_factor: f64 },
}

/// Nodes and weights (summing to 1) of the truncated Gaussian mollifier.
pub(crate) fn mollifier(sigma: f64) -> (Vec<f64>, Vec<f64>) {
    let (y, w) = quad::composite_gauss_legendre(-6.0 * sigma, 6.0 * sigma, 4, 8);
    let mut w: Vec<f64> = y.iter().zip(&w).map(|(y, w)| w * (-0.5 * (y / sigma).powi(2)).exp()).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    (y, w)
}

/// One index of a planar approximation: `q ≈ η_n((x - a_n)·k_n)` on `B_{r_n}(a_n)`.
#[derive(Debug, Clone)]
pub struct PlanarElement {
    pub n: u32,
    pub direction: UnitVector,
    pub center: [f64; 3],
    pub radius: f64,
    pub eta: Profile,
}

#[derive(Debug, Clone)]
pub struct PlanarApproxSpec {
    dim: usize,
    elements: Vec<PlanarElement>,
    smoothing: Smoothing,
}

impl PlanarApproxSpec {
    pub fn new(dim: usize, elements: Vec<PlanarElement>, smoothing: Smoothing) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::arg("dimension", "planar sequences need d = 2 or 3"));
        }
        if elements.is_empty() {
            return Err(Error::arg("n_list", "at least one element is required"));
        }
        for (i, e) in elements.iter().enumerate() {
            if e.direction.dim() != dim {
                return Err(Error::arg("direction", "direction dimension differs from the sequence"));
            }
            if !(e.radius > 0.0 && e.radius.is_finite()) || e.center.iter().any(|c| !c.is_finite()) {
                return Err(Error::arg("radius", "radius must be positive and the center finite"));
            }
            if i > 0 && !(e.radius > elements[i - 1].radius && e.n > elements[i - 1].n) {
                return Err(Error::arg("radius", "indices and radii must be strictly increasing"));
            }
        }
        if let Smoothing::Gaussian { width_factor } = smoothing {
            if !(width_factor > 0.0 && width_factor.is_finite()) {
                return Err(Error::arg("smoothing", "mollifier width must be positive"));
            }
        }
        Ok(PlanarApproxSpec { dim, elements, smoothing })
    }

    /// Constant direction of a layered `q`, `a_n = 0`, `r_n = 4·2ⁿ`, `η_n = η`.
    pub fn from_layered(q: &PotentialSpec, n_list: &[u32], smoothing: Smoothing) -> Result<Self> {
        let Kind::Layered { direction } = q.kind() else {
            return Err(Error::arg("q", "default sequence parameters need a layered potential"));
        };
        let eta = q.to_profile()?;
        let elements = n_list
            .iter()
            .map(|&n| {
                if n > 60 {
                    return Err(Error::arg("n_list", "index too large for r_n = 4·2^n"));
                }
                Ok(PlanarElement {
                    n,
                    direction: *direction,
                    center: [0.0; 3],
                    radius: 4.0 * (1u64 << n) as f64,
                    eta: eta.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(q.dim(), elements, smoothing)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[PlanarElement] {
        &self.elements
    }

    pub fn smoothing(&self) -> Smoothing {
        self.smoothing
    }

    pub fn element(&self, n: u32) -> Option<&PlanarElement> {
        self.elements.iter().find(|e| e.n == n)
    }
}

/// Scalar `φ_n` bending the level sets of the phase into `(x - a_n)·k_n + φ_n(x)`.
#[derive(Debug, Clone)]
pub enum Distortion {
    Zero,
    /// `|x - a_n|² / r_n^exponent`.
    Quadratic { exponent: f64 },
    /// The same Cartesian expression for every `n`.
    Expr(PotentialSpec),
}

impl Distortion {
    /// `(φ(x), ∇φ(x))` for the element with center `a` and radius `r`.
    pub fn value_grad(&self, x: &[f64], a: &[f64; 3], r: f64) -> Result<(f64, [f64; 3])> {
        match self {
            Distortion::Zero => Ok((0.0, [0.0; 3])),
            Distortion::Quadratic { exponent } => {
                let s = r.powf(-exponent);
                let mut g = [0.0; 3];
                let mut v = 0.0;
                for (i, xi) in x.iter().enumerate() {
                    let y = xi - a[i];
                    v += y * y;
                    g[i] = 2.0 * y * s;
                }
                Ok((v * s, g))
            }
            Distortion::Expr(spec) => {
                let g = spec.grad(x)?;
                if !g.smooth {
                    return Err(Error::NonDifferentiable { point: x.to_vec() });
                }
                Ok((g.value, g.grad))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistortedApproxSpec {
    planar: PlanarApproxSpec,
    distortion: Distortion,
}

impl DistortedApproxSpec {
    pub fn new(planar: PlanarApproxSpec, distortion: Distortion) -> Result<Self> {
        match &distortion {
            Distortion::Quadratic { exponent } if !exponent.is_finite() => {
                return Err(Error::arg("distortion", "exponent must be finite"))
            }
            Distortion::Expr(spec) if spec.dim() != planar.dim() => {
                return Err(Error::arg("distortion", "distortion dimension differs from the sequence"))
            }
            _ => {}
        }
        Ok(DistortedApproxSpec { planar, distortion })
    }

    pub fn planar(&self) -> &PlanarApproxSpec {
        &self.planar
    }

    pub fn distortion(&self) -> &Distortion {
        &self.distortion
    }
}

/// One row of a [`SingularSequenceReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceRow {
    pub n: u32,
    pub r_n: f64,
    /// `‖f_n‖`; for Schnol rows, `‖χ_n f‖` before normalization.
    pub norm: f64,
    pub residual: f64,
    /// Cutoff term.
    pub t1: f64,
    /// Potential-approximation term.
    pub t2: f64,
    /// Smoothing or distortion term.
    pub t3: f64,
    /// Ten times the Richardson estimate of the stencil error in `residual`.
    pub allowance: f64,
    /// Distorted sequences only: `r^{-d}∫|q - η̃_n(u)|²` and `r^{-d}∫|∇φ_n|²|η̃_n(u)|²`.
    pub conditions: Option<(f64, f64)>,
}

impl SequenceRow {
    pub fn bound(&self) -> f64 {
        self.t1 + self.t2 + self.t3
    }

    pub fn within_bound(&self) -> bool {
        self.residual <= self.bound() + self.allowance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularSequenceReport {
    pub lambda: f64,
    pub rows: Vec<SequenceRow>,
}

impl SingularSequenceReport {
    pub fn bounds_hold(&self) -> bool {
        self.rows.iter().all(SequenceRow::within_bound)
    }

    /// Least-squares slope of `ln residual` against `ln r_n`.
    pub fn residual_slope(&self) -> Option<f64> {
        let rows: Vec<&SequenceRow> = self.rows.iter().filter(|r| r.residual > 0.0).collect();
        if rows.len() < 2 {
            return None;
        }
        let x: Vec<f64> = rows.iter().map(|r| r.r_n.ln()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.residual.ln()).collect();
        Some(crate::radial::slope(&x, &y))
    }
}
