//! Scalar potentials written in a small expression language.
//!
//! A [`PotentialSpec`] pairs an [`Expr`] with how it is evaluated on `ℝ^d`:
//!
//! * `Cartesian`: an expression in `x1..xd`;
//! * `Radial`: a profile `η(r)` evaluated at `r = |x|`, optionally declared periodic;
//! * `Layered`: a profile `η(t)` evaluated at `t = x·k` for a unit direction `k`.
//!
//! Gradients use forward-mode dual numbers. The grammar is documented in
//! [`parse`](fn@parse).

mod ast;
mod eval;
mod parse;

use alloc::vec::Vec;

pub use ast::{BinOp, Expr, Func, Var};
pub use eval::Dual;
pub use parse::parse;

use crate::clifford::UnitVector;
use crate::quad;
use crate::{Error, Result};
use eval::{Fault, Slots};

use num_traits::Float;

/// How an expression is mapped onto `ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    Cartesian,
    Radial { period: Option<f64> },
    Layered { direction: UnitVector },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    expr: Expr,
    kind: Kind,
    dim: usize,
}

/// Value and gradient of a potential at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub value: f64,
    pub grad: [f64; 3],
    /// `x·∇q`.
    pub radial_derivative: f64,
    /// False where the expression has no derivative; `grad` is then zero-filled.
    pub smooth: bool,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::arg("dimension", "dimension must be 2 or 3"))
    }
}

fn only_vars(expr: &Expr, allowed: &[Var]) -> Result<()> {
    let mut bad = None;
    expr.for_each_var(&mut |v| {
        if bad.is_none() && !allowed.contains(&v) {
            bad = Some(v);
        }
    });
    match bad {
        None => Ok(()),
        Some(v) => Err(Error::Argument {
            name: "potential",
            message: alloc::format!("variable `{}` is not allowed in this kind of potential", v.name()),
        }),
    }
}

fn domain(f: Fault, x: &[f64]) -> Error {
    Error::Domain { message: f.0, point: x.to_vec() }
}

impl PotentialSpec {
    pub fn cartesian(expr: Expr, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let allowed: &[Var] = if dim == 2 { &[Var::X1, Var::X2] } else { &[Var::X1, Var::X2, Var::X3] };
        only_vars(&expr, allowed)?;
        Ok(PotentialSpec { expr, kind: Kind::Cartesian, dim })
    }

    pub fn radial(expr: Expr, dim: usize, period: Option<f64>) -> Result<Self> {
        check_dim(dim)?;
        only_vars(&expr, &[Var::R])?;
        if let Some(p) = period {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::arg("period", "period must be positive and finite"));
            }
        }
        Ok(PotentialSpec { expr, kind: Kind::Radial { period }, dim })
    }

    pub fn layered(expr: Expr, direction: UnitVector) -> Result<Self> {
        only_vars(&expr, &[Var::T])?;
        Ok(PotentialSpec { expr, dim: direction.dim(), kind: Kind::Layered { direction } })
    }

    /// Constant potential `q ≡ c`.
    pub fn constant(c: f64, dim: usize) -> Result<Self> {
        Self::cartesian(Expr::Num(c), dim)
    }

    /// `q - c`, of the same kind.
    pub fn shifted(&self, c: f64) -> Self {
        if c == 0.0 {
            return self.clone();
        }
        let expr = Expr::bin(BinOp::Sub, self.expr.clone(), Expr::Num(c));
        PotentialSpec { expr, kind: self.kind.clone(), dim: self.dim }
    }

    /// Picks the kind from the variables used: `r` → radial, `t` → layered along
    /// `e₁`, otherwise Cartesian.
    pub fn infer(expr: Expr, dim: usize) -> Result<Self> {
        if expr.uses(Var::R) {
            Self::radial(expr, dim, None)
        } else if expr.uses(Var::T) {
            Self::layered(expr, UnitVector::axis(dim, 0)?)
        } else {
            Self::cartesian(expr, dim)
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> Option<f64> {
        match self.kind {
            Kind::Radial { period } => period,
            _ => None,
        }
    }

    pub fn direction(&self) -> Option<&UnitVector> {
        match &self.kind {
            Kind::Layered { direction } => Some(direction),
            _ => None,
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::arg("x", "point dimension does not match the potential"));
        }
        Ok(())
    }

    /// `q(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let mut slots: Slots<f64> = [0.0; 5];
        match &self.kind {
            Kind::Cartesian => slots[..self.dim].copy_from_slice(x),
            Kind::Radial { .. } => slots[3] = norm(x),
            Kind::Layered { direction } => slots[4] = direction.dot(x),
        }
        eval::eval(&self.expr, &slots).map_err(|f| domain(f, x))
    }

    /// `q(x)`, `∇q(x)` and `x·∇q(x)` by forward-mode differentiation.
    pub fn grad(&self, x: &[f64]) -> Result<Gradient> {
        self.check_point(x)?;
        let mut smooth = true;
        match &self.kind {
            Kind::Cartesian => {
                let mut slots: Slots<Dual> = [Dual::constant(0.0); 5];
                for (i, xi) in x.iter().enumerate() {
                    let mut d = [0.0; 3];
                    d[i] = 1.0;
                    slots[i] = Dual::seeded(*xi, d);
                }
                let out = eval::eval_dual(&self.expr, &slots, &mut smooth).map_err(|f| domain(f, x))?;
                let rd = x.iter().zip(out.d.iter()).map(|(a, b)| a * b).sum();
                Ok(Gradient { value: out.v, grad: out.d, radial_derivative: rd, smooth })
            }
            Kind::Radial { .. } => {
                let r = norm(x);
                let (v, dv, ok) = self.profile_derivative(r).map_err(|e| relocate(e, x))?;
                let mut grad = [0.0; 3];
                let mut smooth = ok;
                if r > 0.0 {
                    for i in 0..self.dim {
                        grad[i] = dv * x[i] / r;
                    }
                } else if dv != 0.0 {
                    smooth = false;
                }
                Ok(Gradient { value: v, grad, radial_derivative: r * dv, smooth })
            }
            Kind::Layered { direction } => {
                let t = direction.dot(x);
                let (v, dv, ok) = self.profile_derivative(t).map_err(|e| relocate(e, x))?;
                let mut grad = [0.0; 3];
                for (g, k) in grad.iter_mut().zip(direction.as_slice()) {
                    *g = dv * k;
                }
                Ok(Gradient { value: v, grad, radial_derivative: t * dv, smooth: ok })
            }
        }
    }

    /// `η(s)` for radial (`s = r`) and layered (`s = t`) potentials.
    pub fn profile(&self, s: f64) -> Result<f64> {
        let slot = self.profile_slot()?;
        let mut slots: Slots<f64> = [0.0; 5];
        slots[slot] = s;
        eval::eval(&self.expr, &slots).map_err(|f| domain(f, &[s]))
    }

    /// `(η(s), η'(s), smooth)`.
    pub fn profile_derivative(&self, s: f64) -> Result<(f64, f64, bool)> {
        let slot = self.profile_slot()?;
        let mut slots: Slots<Dual> = [Dual::constant(0.0); 5];
        slots[slot] = Dual::seeded(s, [1.0, 0.0, 0.0]);
        let mut smooth = true;
        let out = eval::eval_dual(&self.expr, &slots, &mut smooth).map_err(|f| domain(f, &[s]))?;
        Ok((out.v, out.d[0], smooth))
    }

    fn profile_slot(&self) -> Result<usize> {
        match self.kind {
            Kind::Radial { .. } => Ok(Var::R.slot()),
            Kind::Layered { .. } => Ok(Var::T.slot()),
            Kind::Cartesian => Err(Error::arg("potential", "a radial or layered profile is required")),
        }
    }

    /// `∫₀ᵗ η(τ) dτ` by adaptive quadrature with absolute error `tol`.
    pub fn antiderivative_profile(&self, t: f64, tol: f64) -> Result<f64> {
        self.profile_slot()?;
        Ok(quad::integrate(|s| self.profile(s), 0.0, t, tol)?.value)
    }

    /// The profile as a standalone 1-D function.
    pub fn to_profile(&self) -> Result<Profile> {
        let slot = self.profile_slot()?;
        let var = if slot == Var::R.slot() { Var::R } else { Var::T };
        Ok(Profile::Expr { expr: self.expr.clone(), var })
    }
}

fn relocate(e: Error, x: &[f64]) -> Error {
    match e {
        Error::Domain { message, .. } => Error::Domain { message, point: x.to_vec() },
        other => other,
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// A one-dimensional profile: an expression in a single variable or a sampled table.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Expr { expr: Expr, var: Var },
    Table(SampledProfile),
}

impl Profile {
    /// Wraps an expression that may only use `var`.
    pub fn expr(expr: Expr, var: Var) -> Result<Self> {
        only_vars(&expr, &[var])?;
        Ok(Profile::Expr { expr, var })
    }

    pub fn constant(c: f64) -> Self {
        Profile::Expr { expr: Expr::Num(c), var: Var::R }
    }

    pub fn at(&self, s: f64) -> Result<f64> {
        match self {
            Profile::Expr { expr, var } => {
                let mut slots: Slots<f64> = [0.0; 5];
                slots[var.slot()] = s;
                eval::eval(expr, &slots).map_err(|f| domain(f, &[s]))
            }
            Profile::Table(t) => Ok(t.at(s)),
        }
    }

    /// `(η(s), η'(s))`; tables use the slope of the containing segment.
    pub fn with_derivative(&self, s: f64) -> Result<(f64, f64)> {
        match self {
            Profile::Expr { expr, var } => {
                let mut slots: Slots<Dual> = [Dual::constant(0.0); 5];
                slots[var.slot()] = Dual::seeded(s, [1.0, 0.0, 0.0]);
                let mut smooth = true;
                let d = eval::eval_dual(expr, &slots, &mut smooth).map_err(|f| domain(f, &[s]))?;
                Ok((d.v, d.d[0]))
            }
            Profile::Table(t) => Ok((t.at(s), t.slope(s))),
        }
    }
}

/// Tabulated profile with linear interpolation, held constant beyond the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    s: Vec<f64>,
    v: Vec<f64>,
}

impl SampledProfile {
    pub fn new(s: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if s.len() != v.len() || s.len() < 2 {
            return Err(Error::arg("table", "need at least two (r, eta) rows of equal length"));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::arg("table", "abscissae must be strictly increasing"));
        }
        if s.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(Error::arg("table", "entries must be finite"));
        }
        Ok(SampledProfile { s, v })
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.s
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    fn segment(&self, x: f64) -> usize {
        match self.s.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.min(self.s.len() - 2),
            Err(i) => i.clamp(1, self.s.len() - 1) - 1,
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        let n = self.s.len();
        if x <= self.s[0] {
            return self.v[0];
        }
        if x >= self.s[n - 1] {
            return self.v[n - 1];
        }
        let i = self.segment(x);
        let w = (x - self.s[i]) / (self.s[i + 1] - self.s[i]);
        self.v[i] + w * (self.v[i + 1] - self.v[i])
    }

    pub fn slope(&self, x: f64) -> f64 {
        let n = self.s.len();
        if x < self.s[0] || x > self.s[n - 1] {
            return 0.0;
        }
        let i = self.segment(x);
        (self.v[i + 1] - self.v[i]) / (self.s[i + 1] - self.s[i])
    }
}
