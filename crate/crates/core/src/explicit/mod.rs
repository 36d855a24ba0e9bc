//! Closed-form eigensolutions, grids and residuals.
//!
//! * [`zero_mode_3d`]: `⟨x⟩⁻³(I + iα·x)φ₀`, a zero mode of `-iα·∇ - 3/⟨x⟩²`.
//! * [`zero_resonance_2d`]: `⟨x⟩⁻²(I + iσ·x)φ₀`, a zero resonance of `-iσ·∇ - 2/⟨x⟩²`.
//! * [`layered_eigensolution`]: `e^{-i(D·k)ξ(x·k)} e^{iλx·k} φ₀` for `q(x) = η(x·k)`.
//!
//! Grid work lives in [`grid`]; norms in [`norms`].

mod grid;
mod norms;

pub use grid::{
    apply_dirac, residual_norm, residual_norm_streaming, stencil_residual_at, GridSpec, ResidualNorms, SpinorField,
};
pub use norms::{weighted_l2_norm, weighted_l2_norm_squared, weighted_l2_norm_squared_field};

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::clifford::{dirac_dot, dirac_exp_apply, plus_eigenspinor, CMatrix, Spinor, UnitVector};
use crate::potential::{Kind, PotentialSpec};
use crate::quad;
use crate::{Error, Result};

const UNIT_TOL: f64 = 1e-10;

fn check_unit(phi0: &Spinor, dim: usize) -> Result<()> {
    if phi0.dim() != dim {
        return Err(Error::arg("phi0", "spinor dimension does not match the operator"));
    }
    if !phi0.is_unit(UNIT_TOL) {
        return Err(Error::arg("phi0", "spinor must have unit norm"));
    }
    Ok(())
}

/// `⟨x⟩^{-p} (I + i D·x) φ₀`.
fn bracket_form(x: &[f64], phi0: &Spinor, p: i32) -> Result<Spinor> {
    let dx = dirac_dot(x)?;
    let jx = dx.apply(phi0).scale(Complex64::new(0.0, 1.0));
    let w = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
    Ok((*phi0 + jx).scale(Complex64::new(w.sqrt().powi(-p), 0.0)))
}

/// `⟨x⟩⁻³(I₄ + iα·x)φ₀` for `x ∈ ℝ³`; `|f(x)| = ⟨x⟩⁻²`.
pub fn zero_mode_3d(x: &[f64], phi0: &Spinor) -> Result<Spinor> {
    if x.len() != 3 {
        return Err(Error::arg("x", "zero mode is defined on R^3"));
    }
    check_unit(phi0, 4)?;
    bracket_form(x, phi0, 3)
}

/// `⟨x⟩⁻²(I₂ + iσ·x)φ₀` for `x ∈ ℝ²`; `|ψ(x)| = ⟨x⟩⁻¹`.
pub fn zero_resonance_2d(x: &[f64], phi0: &Spinor) -> Result<Spinor> {
    if x.len() != 2 {
        return Err(Error::arg("x", "zero resonance is defined on R^2"));
    }
    check_unit(phi0, 2)?;
    bracket_form(x, phi0, 2)
}

fn layered_profile(eta: &PotentialSpec) -> Result<&UnitVector> {
    match eta.kind() {
        Kind::Layered { direction } => Ok(direction),
        _ => Err(Error::arg("eta", "a layered potential is required")),
    }
}

/// `e^{-i(D·k)ξ(x·k)} e^{iλx·k} φ₀` with `ξ(t) = ∫₀ᵗ η`, `φ₀` the `+1`
/// eigenspinor of `D·k` and `k` the direction of `eta`.
///
/// `ξ` is computed by adaptive quadrature to absolute error `tol`. The result
/// has unit length and solves `(-iD·∇ + η(x·k)) f = λ f`.
pub fn layered_eigensolution(lambda: f64, eta: &PotentialSpec, x: &[f64], tol: f64) -> Result<Spinor> {
    let k = layered_profile(eta)?;
    if x.len() != k.dim() {
        return Err(Error::arg("x", "point dimension does not match the direction"));
    }
    let phi0 = plus_eigenspinor(k)?;
    let dk = dirac_dot(k.as_slice())?;
    let t = k.dot(x);
    let xi = eta.antiderivative_profile(t, tol)?;
    Ok(layered_value(&dk, &phi0, lambda * t, xi))
}

fn layered_value(dk: &CMatrix, phi0: &Spinor, phase: f64, xi: f64) -> Spinor {
    let (s, c) = phase.sin_cos();
    dirac_exp_apply(dk, xi, &phi0.scale(Complex64::new(c, s)))
}

/// A spinor-valued function on `ℝ^d` that can be sampled anywhere.
pub trait SpinorSource {
    /// Spatial dimension.
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> Result<Spinor>;

    /// `|f|` as a function of `|x|`, when `|f|` is radial.
    fn radial_modulus(&self, _r: f64) -> Option<f64> {
        None
    }
}

impl<S: SpinorSource + ?Sized> SpinorSource for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> Result<Spinor> {
        (**self).eval(x)
    }
    fn radial_modulus(&self, r: f64) -> Option<f64> {
        (**self).radial_modulus(r)
    }
}

/// Closure-backed [`SpinorSource`].
pub struct FnSource<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Result<Spinor>> FnSource<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnSource { dim, f }
    }
}

impl<F: Fn(&[f64]) -> Result<Spinor>> SpinorSource for FnSource<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> Result<Spinor> {
        (self.f)(x)
    }
}

/// [`zero_mode_3d`] as a source.
#[derive(Debug, Clone, Copy)]
pub struct ZeroMode3d {
    phi0: Spinor,
}

impl ZeroMode3d {
    pub fn new(phi0: Spinor) -> Result<Self> {
        check_unit(&phi0, 4)?;
        Ok(ZeroMode3d { phi0 })
    }
}

impl SpinorSource for ZeroMode3d {
    fn dim(&self) -> usize {
        3
    }
    fn eval(&self, x: &[f64]) -> Result<Spinor> {
        zero_mode_3d(x, &self.phi0)
    }
    fn radial_modulus(&self, r: f64) -> Option<f64> {
        Some(1.0 / (1.0 + r * r))
    }
}

/// [`zero_resonance_2d`] as a source.
#[derive(Debug, Clone, Copy)]
pub struct ZeroResonance2d {
    phi0: Spinor,
}

impl ZeroResonance2d {
    pub fn new(phi0: Spinor) -> Result<Self> {
        check_unit(&phi0, 2)?;
        Ok(ZeroResonance2d { phi0 })
    }
}

impl SpinorSource for ZeroResonance2d {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, x: &[f64]) -> Result<Spinor> {
        zero_resonance_2d(x, &self.phi0)
    }
    fn radial_modulus(&self, r: f64) -> Option<f64> {
        Some(1.0 / (1.0 + r * r).sqrt())
    }
}

/// `ξ(t) = ∫₀ᵗ η` tabulated on a uniform grid, evaluated by cubic Hermite
/// interpolation with `η` as the slope.
#[derive(Debug, Clone, PartialEq)]
pub struct XiTable {
    t0: f64,
    step: f64,
    xi: Vec<f64>,
    eta: Vec<f64>,
}

impl XiTable {
    /// Tabulates on `[t0, t1]` (extended to a whole number of steps). Each cell
    /// integral is computed to `tol · step`, so the accumulated error is about
    /// `tol · (t1 - t0)`.
    pub fn new<F>(mut eta: F, t0: f64, t1: f64, step: f64, tol: f64) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if !(t1 > t0) || !(step > 0.0) || !t0.is_finite() || !t1.is_finite() {
            return Err(Error::arg("range", "need t0 < t1 and a positive step"));
        }
        let cells = ((t1 - t0) / step).ceil() as usize;
        let mut xi = Vec::with_capacity(cells + 1);
        let mut etas = Vec::with_capacity(cells + 1);
        let start = quad::integrate(&mut eta, 0.0, t0, tol)?.value;
        xi.push(start);
        etas.push(eta(t0)?);
        let mut acc = start;
        for i in 0..cells {
            let a = t0 + i as f64 * step;
            let b = t0 + (i + 1) as f64 * step;
            acc += quad::integrate(&mut eta, a, b, tol * step)?.value;
            xi.push(acc);
            etas.push(eta(b)?);
        }
        Ok(XiTable { t0, step, xi, eta: etas })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `η` at the table nodes.
    pub fn etas(&self) -> &[f64] {
        &self.eta
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t0, self.t0 + (self.xi.len() - 1) as f64 * self.step)
    }

    /// `(ξ(t), η(t))`, the latter from the Hermite derivative.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let u = (t - self.t0) / self.step;
        let last = self.xi.len() - 1;
        if !(u >= -1e-9 && u <= last as f64 + 1e-9) {
            return Err(Error::Domain { message: "outside the tabulated range", point: alloc::vec![t] });
        }
        let i = (u.floor().max(0.0) as usize).min(last - 1);
        let s = u - i as f64;
        let (p0, p1) = (self.xi[i], self.xi[i + 1]);
        let (m0, m1) = (self.eta[i] * self.step, self.eta[i + 1] * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1;
        let dv = (6.0 * s2 - 6.0 * s) * p0 + (3.0 * s2 - 4.0 * s + 1.0) * m0 + (-6.0 * s2 + 6.0 * s) * p1
            + (3.0 * s2 - 2.0 * s) * m1;
        Ok((v, dv / self.step))
    }
}

/// [`layered_eigensolution`] as a source, with `ξ` tabulated over the
/// projections `x·k ∈ [t0, t1]`.
#[derive(Debug, Clone)]
pub struct LayeredSolution {
    lambda: f64,
    k: UnitVector,
    dk: CMatrix,
    phi0: Spinor,
    xi: XiTable,
}

impl LayeredSolution {
    pub fn new(lambda: f64, eta: &PotentialSpec, t0: f64, t1: f64, step: f64, tol: f64) -> Result<Self> {
        let k = *layered_profile(eta)?;
        let xi = XiTable::new(|t| eta.profile(t), t0, t1, step, tol)?;
        Ok(LayeredSolution { lambda, dk: dirac_dot(k.as_slice())?, phi0: plus_eigenspinor(&k)?, k, xi })
    }

    /// Table covering every point of the centered box of half-width `l`.
    pub fn for_box(lambda: f64, eta: &PotentialSpec, l: f64, step: f64, tol: f64) -> Result<Self> {
        let reach = l * (eta.dim() as f64).sqrt() + 2.0 * step;
        Self::new(lambda, eta, -reach, reach, step, tol)
    }

    pub fn phi0(&self) -> &Spinor {
        &self.phi0
    }
}

impl SpinorSource for LayeredSolution {
    fn dim(&self) -> usize {
        self.k.dim()
    }
    fn eval(&self, x: &[f64]) -> Result<Spinor> {
        let t = self.k.dot(x);
        let (xi, _) = self.xi.eval(t)?;
        Ok(layered_value(&self.dk, &self.phi0, self.lambda * t, xi))
    }
    fn radial_modulus(&self, _r: f64) -> Option<f64> {
        Some(1.0)
    }
}

#[cfg(test)]
mod tests;
