//! Planar and distorted sequence elements, and their residual reports.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use super::{
    mollifier, BumpProfile, DistortedApproxSpec, Distortion, PlanarApproxSpec, PlanarElement, SequenceRow,
    SingularSequenceReport, Smoothing,
};
use crate::clifford::{dirac_dot, dirac_exp_apply, plus_eigenspinor, CMatrix, Spinor, UnitVector};
use crate::explicit::{stencil_residual_at, SpinorSource, XiTable};
use crate::potential::{PotentialSpec, Profile};
use crate::quad::{self, BallResolution, BallRule};
use crate::{Error, Result};

/// Numerical parameters shared by the residual reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylOptions {
    pub chi: BumpProfile,
    /// Stencil spacing for the measured residual; the allowance also uses `2h`.
    pub grid_h: f64,
    /// Node spacing of the `ξ_n` table.
    pub xi_step: f64,
    pub tol: f64,
    /// Multiplies the default number of quadrature nodes per direction.
    pub resolution: f64,
}

impl WeylOptions {
    pub fn new(chi: BumpProfile, grid_h: f64) -> Self {
        WeylOptions { chi, grid_h, xi_step: 0.005, tol: 1e-12, resolution: 1.0 }
    }

    fn check(&self, dim: usize) -> Result<()> {
        if self.chi.dim() != dim {
            return Err(Error::arg("chi", "bump dimension differs from the sequence"));
        }
        for (name, v) in [("grid_h", self.grid_h), ("xi_step", self.xi_step), ("tol", self.tol), ("resolution", self.resolution)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::arg(name, "must be positive and finite"));
            }
        }
        Ok(())
    }
}

/// `η̃_n`: the profile itself, or its mollification.
struct Smoothed<'a> {
    eta: &'a Profile,
    kernel: Option<(Vec<f64>, Vec<f64>)>,
}

impl<'a> Smoothed<'a> {
    fn new(eta: &'a Profile, smoothing: Smoothing, radius: f64) -> Self {
        let kernel = match smoothing {
            Smoothing::None => None,
            Smoothing::Gaussian { width_factor } => Some(mollifier(width_factor / radius)),
        };
        Smoothed { eta, kernel }
    }

    fn at(&self, s: f64) -> Result<f64> {
        match &self.kernel {
            None => self.eta.at(s),
            Some((y, w)) => {
                let mut acc = 0.0;
                for (yi, wi) in y.iter().zip(w) {
                    acc += wi * self.eta.at(s - yi)?;
                }
                Ok(acc)
            }
        }
    }
}

/// `f_n = χ_n F_n` as a closure. Vanishes outside `B_{r_n}(a_n)`.
#[derive(Debug, Clone)]
pub struct WeylElement {
    dim: usize,
    lambda: f64,
    k: UnitVector,
    dk: CMatrix,
    phi0: Spinor,
    center: [f64; 3],
    radius: f64,
    chi: BumpProfile,
    xi: XiTable,
    distortion: Distortion,
}

impl WeylElement {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> &[f64] {
        &self.center[..self.dim]
    }

    pub fn direction(&self) -> &UnitVector {
        &self.k
    }

    pub fn phi0(&self) -> &Spinor {
        &self.phi0
    }

    /// `F_n(x)` without the cutoff.
    pub fn carrier(&self, x: &[f64]) -> Result<Spinor> {
        let mut s = 0.0;
        for (i, xi) in x.iter().enumerate() {
            s += (xi - self.center[i]) * self.k.as_slice()[i];
        }
        let u = match self.distortion {
            Distortion::Zero => s,
            _ => s + self.distortion.value_grad(x, &self.center, self.radius)?.0,
        };
        let (xi, _) = self.xi.eval(u)?;
        let (sn, cs) = (self.lambda * self.k.dot(x)).sin_cos();
        let phase = self.phi0.scale(num_complex::Complex64::new(cs, sn));
        Ok(dirac_exp_apply(&self.dk, xi, &phase))
    }
}

impl SpinorSource for WeylElement {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> Result<Spinor> {
        if x.len() != self.dim {
            return Err(Error::arg("x", "point dimension differs from the element"));
        }
        let mut y = [0.0; 3];
        for i in 0..self.dim {
            y[i] = (x[i] - self.center[i]) / self.radius;
        }
        let (c, _) = self.chi.radial(crate::potential::norm(&y[..self.dim]));
        if c == 0.0 {
            return Spinor::zeros(self.phi0.dim());
        }
        let scale = c * self.radius.powf(-0.5 * self.dim as f64);
        Ok(self.carrier(x)?.scale(num_complex::Complex64::new(scale, 0.0)))
    }
}

/// Range of `φ` over the ball and the largest `|∇φ|`, padded for sampled expressions.
fn distortion_extent(distortion: &Distortion, dim: usize, center: &[f64; 3], radius: f64) -> Result<(f64, f64, f64)> {
    match distortion {
        Distortion::Zero => Ok((0.0, 0.0, 0.0)),
        Distortion::Quadratic { exponent } => {
            let s = radius.powf(-exponent);
            Ok((0.0, radius * radius * s, 2.0 * radius * s))
        }
        Distortion::Expr(_) => {
            let rule = BallRule::new(dim, BallResolution::default())?;
            let (mut lo, mut hi, mut g) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
            let mut x = [0.0; 3];
            for p in &rule.points {
                for i in 0..dim {
                    x[i] = center[i] + radius * p[i];
                }
                let (v, grad) = distortion.value_grad(&x[..dim], center, radius)?;
                lo = lo.min(v);
                hi = hi.max(v);
                g = g.max(grad.iter().map(|c| c * c).sum::<f64>().sqrt());
            }
            let pad = 0.1 * (hi - lo);
            Ok((lo - pad, hi + pad, 1.1 * g))
        }
    }
}

struct Built<'a> {
    element: WeylElement,
    eta_tilde: Smoothed<'a>,
    eta_sup: f64,
    eta_slope: f64,
    grad_sup: f64,
}

fn build<'a>(
    elem: &'a PlanarElement,
    dim: usize,
    smoothing: Smoothing,
    distortion: &Distortion,
    lambda: f64,
    reach: f64,
    opts: &WeylOptions,
) -> Result<Built<'a>> {
    opts.check(dim)?;
    let r = elem.radius;
    let eta_tilde = Smoothed::new(&elem.eta, smoothing, r);
    let (lo, hi, grad_sup) = distortion_extent(distortion, dim, &elem.center, r)?;
    let pad = reach + 2.0 * opts.xi_step;
    let xi = XiTable::new(|t| eta_tilde.at(t), -r + lo - pad, r + hi + pad, opts.xi_step, opts.tol)?;
    let etas = xi.etas();
    let eta_sup = etas.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let eta_slope = etas.windows(2).fold(0.0f64, |m, w| m.max((w[1] - w[0]).abs())) / xi.step();
    let element = WeylElement {
        dim,
        lambda,
        k: elem.direction,
        dk: dirac_dot(elem.direction.as_slice())?,
        phi0: plus_eigenspinor(&elem.direction)?,
        center: elem.center,
        radius: r,
        chi: opts.chi,
        xi,
        distortion: distortion.clone(),
    };
    Ok(Built { element, eta_tilde, eta_sup, eta_slope, grad_sup })
}

/// The sequence element with index `n`.
pub fn planar_weyl_element(n: u32, spec: &PlanarApproxSpec, lambda: f64, chi: BumpProfile) -> Result<WeylElement> {
    let elem = spec.element(n).ok_or_else(|| Error::arg("n", "index not present in the sequence"))?;
    let opts = WeylOptions::new(chi, 1.0);
    Ok(build(elem, spec.dim(), spec.smoothing(), &Distortion::Zero, lambda, 0.0, &opts)?.element)
}

/// Product rule on `B_r(a)` in spherical (polar in 2-D) coordinates whose
/// pole is `k`, so that resolution along `k` is controlled directly.
fn aligned_nodes(dim: usize, k: &UnitVector, center: &[f64; 3], radius: f64, along: usize) -> (Vec<[f64; 3]>, Vec<f64>) {
    let kv = k.as_slice();
    let radial_panels = along.div_ceil(16).max(8);
    let (rx, rw) = quad::composite_gauss_legendre(0.0, 1.0, radial_panels, 8);
    let jac = radius.powi(dim as i32);
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    let mut push = |dir: [f64; 3], w: f64| {
        for (rho, wr) in rx.iter().zip(&rw) {
            let mut p = [0.0; 3];
            for i in 0..dim {
                p[i] = center[i] + radius * rho * dir[i];
            }
            pts.push(p);
            wts.push(w * wr * rho.powi(dim as i32 - 1) * jac);
        }
    };
    if dim == 2 {
        let perp = [-kv[1], kv[0]];
        let m = (2 * along).max(64);
        let dt = 2.0 * PI / m as f64;
        for a in 0..m {
            let (s, c) = ((a as f64 + 0.5) * dt).sin_cos();
            push([c * kv[0] + s * perp[0], c * kv[1] + s * perp[1], 0.0], dt);
        }
    } else {
        let k3 = [kv[0], kv[1], kv[2]];
        let smallest = (0..3).min_by(|&i, &j| k3[i].abs().total_cmp(&k3[j].abs())).unwrap_or(0);
        let mut e = [0.0; 3];
        e[smallest] = 1.0;
        let e1 = normalize(cross(&k3, &e));
        let e2 = cross(&k3, &e1);
        let (cx, cw) = quad::composite_gauss_legendre(-1.0, 1.0, along.div_ceil(8).max(2), 8);
        let m = 16;
        let dp = 2.0 * PI / m as f64;
        for (ct, wt) in cx.iter().zip(&cw) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for a in 0..m {
                let (s, c) = ((a as f64 + 0.5) * dp).sin_cos();
                let mut dir = [0.0; 3];
                for i in 0..3 {
                    dir[i] = ct * k3[i] + st * (c * e1[i] + s * e2[i]);
                }
                push(dir, wt * dp);
            }
        }
    }
    (pts, wts)
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// One row of a planar (`distortion = None`) or distorted report.
///
/// The measured residual applies the 4th-order stencil of spacing `h` to the
/// closure at the nodes of a product rule aligned with `k_n`; the same
/// computation at `2h` gives the Richardson allowance `10·|R_h - R_2h|/15`.
pub fn sequence_row(
    elem: &PlanarElement,
    dim: usize,
    smoothing: Smoothing,
    distortion: Option<&Distortion>,
    q: &PotentialSpec,
    lambda: f64,
    opts: &WeylOptions,
) -> Result<SequenceRow> {
    if q.dim() != dim {
        return Err(Error::arg("q", "potential dimension differs from the sequence"));
    }
    let distorted = distortion.is_some();
    let phi = distortion.unwrap_or(&Distortion::Zero);
    let h = opts.grid_h;
    let b = build(elem, dim, smoothing, phi, lambda, 4.0 * h, opts)?;
    let omega = lambda.abs() + b.eta_sup * (1.0 + b.grad_sup);
    if h * omega > PI / 4.0 {
        return Err(Error::UnderResolved { h, required: PI / (4.0 * omega) });
    }
    let r = elem.radius;
    let freq = 1.0 + b.eta_slope + b.eta_sup * b.grad_sup;
    let along = (opts.resolution * (1.3 * r * freq).max(32.0)).ceil() as usize;
    let (pts, wts) = aligned_nodes(dim, &elem.direction, &elem.center, r, along);

    let kv = elem.direction.as_slice();
    let (mut norm2, mut res_h, mut res_2h, mut i2, mut i3) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (p, w) in pts.iter().zip(&wts) {
        let x = &p[..dim];
        norm2 += w * b.element.eval(x)?.norm_sqr();
        res_h += w * stencil_residual_at(&b.element, q, lambda, x, h)?.norm_sqr();
        res_2h += w * stencil_residual_at(&b.element, q, lambda, x, 2.0 * h)?.norm_sqr();
        let mut s = 0.0;
        for i in 0..dim {
            s += (x[i] - elem.center[i]) * kv[i];
        }
        let qx = q.eval(x)?;
        if distorted {
            let (v, g) = phi.value_grad(x, &elem.center, r)?;
            let et = b.eta_tilde.at(s + v)?;
            i2 += w * (qx - et).powi(2);
            i3 += w * g.iter().map(|c| c * c).sum::<f64>() * et * et;
        } else {
            i2 += w * (qx - elem.eta.at(s)?).powi(2);
        }
    }
    let norm = norm2.sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::Invariant(alloc::format!("‖f_n‖ = {norm} for n = {}", elem.n)));
    }
    let vol = r.powi(-(dim as i32));
    let sup = opts.chi.sup();
    let t1 = opts.chi.grad_l2() / r;
    let t2 = sup * (vol * i2).sqrt();
    let t3 = if distorted {
        sup * (vol * i3).sqrt()
    } else {
        match smoothing {
            Smoothing::None => 0.0,
            Smoothing::Gaussian { .. } => {
                let gap = quad::integrate(|s| Ok((elem.eta.at(s)? - b.eta_tilde.at(s)?).powi(2)), -r, r, opts.tol)?.value;
                let cd = if dim == 3 { PI } else { 2.0 };
                sup * (cd / r * gap).sqrt()
            }
        }
    };
    let residual = res_h.sqrt();
    Ok(SequenceRow {
        n: elem.n,
        r_n: r,
        norm,
        residual,
        t1,
        t2,
        t3,
        allowance: 10.0 * (residual - res_2h.sqrt()).abs() / 15.0,
        conditions: distorted.then_some((vol * i2, vol * i3)),
    })
}

fn select<'a>(spec: &'a PlanarApproxSpec, n_list: &[u32]) -> Result<Vec<&'a PlanarElement>> {
    n_list
        .iter()
        .map(|&n| spec.element(n).ok_or_else(|| Error::arg("n_list", alloc::format!("index {n} not in the sequence"))))
        .collect()
}

/// Rows for `n_list`, in order, with terms from the planar three-term bound.
pub fn planar_residual_report(
    spec: &PlanarApproxSpec,
    q: &PotentialSpec,
    lambda: f64,
    n_list: &[u32],
    opts: &WeylOptions,
) -> Result<SingularSequenceReport> {
    let rows = select(spec, n_list)?
        .into_iter()
        .map(|e| sequence_row(e, spec.dim(), spec.smoothing(), None, q, lambda, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(SingularSequenceReport { lambda, rows })
}

/// As [`planar_residual_report`] with the phase bent by `φ_n`. `T2` compares
/// `q` with `η̃_n(u)`, `T3` is the curvature term; [`Distortion::Zero`]
/// returns the planar report itself.
pub fn distorted_residual_report(
    spec: &DistortedApproxSpec,
    q: &PotentialSpec,
    lambda: f64,
    n_list: &[u32],
    opts: &WeylOptions,
) -> Result<SingularSequenceReport> {
    let planar = spec.planar();
    if let Distortion::Zero = spec.distortion() {
        return planar_residual_report(planar, q, lambda, n_list, opts);
    }
    let rows = select(planar, n_list)?
        .into_iter()
        .map(|e| sequence_row(e, planar.dim(), planar.smoothing(), Some(spec.distortion()), q, lambda, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(SingularSequenceReport { lambda, rows })
}
