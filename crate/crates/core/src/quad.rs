//! Quadrature: adaptive Gauss–Kronrod (7/15) on finite and semi-infinite
//! intervals, Gauss–Legendre rules, and product rules on the unit ball.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_traits::Float;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// One 15-point Kronrod panel; returns `(kronrod, |kronrod - gauss|)`.
pub fn gauss_kronrod_15<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let (value, error) = (kronrod * half, ((kronrod - gauss) * half).abs());
    if !(value.is_finite() && error.is_finite()) {
        return Err(Error::Quadrature { a, b, estimate: value, error: f64::INFINITY });
    }
    Ok((value, error))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_PANELS: usize = 20_000;

/// Globally adaptive integration of `f` over `[a, b]` to absolute error `tol`.
///
/// `b < a` is allowed and flips the sign. The integrand may fail (domain
/// errors in a potential, for instance); the first failure is returned.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::arg("tol", "tolerance must be positive"));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
    }
    if b < a {
        let e = integrate(f, b, a, tol)?;
        return Ok(Estimate { value: -e.value, ..e });
    }
    let (v, e) = gauss_kronrod_15(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    let mut evaluations = 15;
    while total_err > tol {
        if heap.len() >= MAX_PANELS {
            return Err(Error::Quadrature { a, b, estimate: total, error: total_err });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature { a, b, estimate: total, error: total_err });
        }
        let (v1, e1) = gauss_kronrod_15(&mut f, worst.a, mid)?;
        let (v2, e2) = gauss_kronrod_15(&mut f, mid, worst.b)?;
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 || total_err <= tol {
            // running sums drift; resum before trusting them
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = panels.iter().map(|p| p.value).sum();
    Ok(Estimate { value, error: total_err, evaluations })
}

/// Integral of `f` over `[a, ∞)` via `x = a + t/(1-t)`.
pub fn integrate_to_infinity<F>(mut f: F, a: f64, tol: f64) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate(
        |t| {
            let s = 1.0 - t;
            let x = a + t / s;
            if !x.is_finite() {
                return Ok(0.0);
            }
            Ok(f(x)? / (s * s))
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integral over `[a, b]` where `b` may be `+∞`.
pub fn integrate_range<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if b == f64::INFINITY {
        integrate_to_infinity(f, a, tol)
    } else {
        integrate(f, a, b, tol)
    }
}

/// Area of the unit sphere `S^{d-1}`: `2π` for `d = 2`, `4π` for `d = 3`.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("dimension must be 2 or 3"),
    }
}

/// `∫_{|x| ≤ radius} g(|x|) dx` for a radial integrand in `d` dimensions.
pub fn radial_integral<F>(d: usize, mut g: F, radius: f64, tol: f64) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let area = sphere_area(d);
    let e = integrate_range(
        |r| Ok(g(r)? * r.powi(d as i32 - 1)),
        0.0,
        radius,
        tol / area,
    )?;
    Ok(Estimate { value: e.value * area, error: e.error * area, evaluations: e.evaluations })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` panels of `order` points.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let width = (b - a) / panels as f64;
    let mut x = Vec::with_capacity(panels * order);
    let mut w = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        for (xi, wi) in gx.iter().zip(&gw) {
            x.push(lo + 0.5 * width * (xi + 1.0));
            w.push(0.5 * width * wi);
        }
    }
    (x, w)
}

/// Product quadrature on the closed unit ball of dimension 2 or 3.
///
/// Radial direction: composite Gauss–Legendre; polar angle (3-D): Gauss–Legendre
/// in `cos θ`; azimuth: trapezoid. Weights include the Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct BallRule {
    pub dim: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// Resolution of a [`BallRule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallResolution {
    pub radial_panels: usize,
    pub radial_order: usize,
    pub polar: usize,
    pub azimuth: usize,
}

impl Default for BallResolution {
    fn default() -> Self {
        BallResolution { radial_panels: 8, radial_order: 8, polar: 24, azimuth: 48 }
    }
}

impl BallRule {
    pub fn new(dim: usize, res: BallResolution) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::arg("dimension", "ball rule needs d = 2 or 3"));
        }
        if res.radial_panels == 0 || res.radial_order == 0 || res.azimuth == 0 || (dim == 3 && res.polar == 0) {
            return Err(Error::arg("resolution", "all quadrature counts must be positive"));
        }
        let (rx, rw) = composite_gauss_legendre(0.0, 1.0, res.radial_panels, res.radial_order);
        let dphi = 2.0 * PI / res.azimuth as f64;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if dim == 2 {
            for (r, wr) in rx.iter().zip(&rw) {
                for a in 0..res.azimuth {
                    let phi = (a as f64 + 0.5) * dphi;
                    let (s, c) = phi.sin_cos();
                    points.push([r * c, r * s, 0.0]);
                    weights.push(wr * r * dphi);
                }
            }
        } else {
            let (cx, cw) = gauss_legendre(res.polar);
            for (r, wr) in rx.iter().zip(&rw) {
                for (ct, wt) in cx.iter().zip(&cw) {
                    let st = (1.0 - ct * ct).max(0.0).sqrt();
                    for a in 0..res.azimuth {
                        let phi = (a as f64 + 0.5) * dphi;
                        let (s, c) = phi.sin_cos();
                        points.push([r * st * c, r * st * s, r * ct]);
                        weights.push(wr * r * r * wt * dphi);
                    }
                }
            }
        }
        Ok(BallRule { dim, points, weights })
    }

    /// `∫_{B_radius(center)} f(x) dx` using the rule scaled to the ball.
    pub fn integrate<F>(&self, center: &[f64], radius: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let jac = radius.powi(self.dim as i32);
        let mut acc = 0.0;
        let mut x = [0.0; 3];
        for (p, w) in self.points.iter().zip(&self.weights) {
            for i in 0..self.dim {
                x[i] = center[i] + radius * p[i];
            }
            acc += w * f(&x[..self.dim])?;
        }
        Ok(acc * jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let e = integrate(|x| Ok(x * x * x - 2.0 * x + 1.0), -1.0, 2.0, 1e-12).unwrap();
        // 16/4 - 1/4 - (4 - 1) + 3 = 3.75
        assert!((e.value - 3.75).abs() < 1e-13);
    }

    #[test]
    fn sine_over_half_period() {
        let e = integrate(|x| Ok(x.sin()), 0.0, PI, 1e-12).unwrap();
        assert!((e.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let e = integrate(|x| Ok(x.exp()), 1.0, 0.0, 1e-12).unwrap();
        assert!((e.value + (1.0f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn improper_lorentzian() {
        let e = integrate_to_infinity(|x| Ok(1.0 / (1.0 + x * x)), 0.0, 1e-11).unwrap();
        assert!((e.value - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn radial_volume_of_ball() {
        let v = radial_integral(3, |_| Ok(1.0), 2.0, 1e-12).unwrap();
        assert!((v.value - 4.0 / 3.0 * PI * 8.0).abs() < 1e-10);
        let a = radial_integral(2, |_| Ok(1.0), 2.0, 1e-12).unwrap();
        assert!((a.value - PI * 4.0).abs() < 1e-10);
    }

    #[test]
    fn integrand_error_propagates() {
        let r = integrate(|x| if x > 0.5 { Err(Error::Singularity { r: x }) } else { Ok(1.0) }, 0.0, 1.0, 1e-8);
        assert!(matches!(r, Err(Error::Singularity { .. })));
    }

    #[test]
    fn nonconvergence_reported() {
        let r = integrate(|x| Ok(1.0 / x.abs().sqrt().max(1e-300).powi(4)), -1.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::Quadrature { .. })), "{r:?}");
    }

    #[test]
    fn gauss_legendre_moments() {
        let (x, w) = gauss_legendre(10);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        let m18: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((m18 - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn ball_rule_volume_and_moment() {
        let rule = BallRule::new(3, BallResolution::default()).unwrap();
        let vol = rule.integrate(&[1.0, 2.0, 3.0], 2.0, |_| Ok(1.0)).unwrap();
        assert!((vol - 4.0 / 3.0 * PI * 8.0).abs() < 1e-11);
        // ∫_{B_1} x₃² = 4π/15
        let m = rule.integrate(&[0.0; 3], 1.0, |x| Ok(x[2] * x[2])).unwrap();
        assert!((m - 4.0 * PI / 15.0).abs() < 1e-13);
        let disc = BallRule::new(2, BallResolution::default()).unwrap();
        let area = disc.integrate(&[0.0, 0.0], 3.0, |_| Ok(1.0)).unwrap();
        assert!((area - 9.0 * PI).abs() < 1e-11);
    }
}
