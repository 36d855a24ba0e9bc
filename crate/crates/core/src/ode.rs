//! Dormand–Prince 5(4) with dense output for small fixed-size systems.

use num_traits::Float;

use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-size control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible step, relative to `|t|`.
    pub min_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances { rtol: tol, atol: tol, min_step: 1e-14, max_step: f64::INFINITY, max_steps: 50_000_000 }
    }
}

/// An accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> Step<N> {
    /// Dense output at `t ∈ [t0, t1]` (4th order).
    pub fn eval(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / (self.t1 - self.t0);
        let th1 = 1.0 - theta;
        let r = &self.rcont;
        core::array::from_fn(|i| {
            r[0][i] + theta * (r[1][i] + th1 * (r[2][i] + theta * (r[3][i] + th1 * r[4][i])))
        })
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    core::array::from_fn(|i| {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        y[i] + h * acc
    })
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `observe` sees every accepted step in order. Returns `y(t1)`.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: &Tolerances,
    mut observe: O,
) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(&Step<N>),
{
    if t0 == t1 {
        return Ok(y0);
    }
    let dir = if t1 > t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    let mut h = initial_step(&y, &k1, span, tol).min(tol.max_step).min(span);
    let mut steps = 0usize;
    let mut err_prev = 1e-4f64;
    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            return Ok(y);
        }
        if h >= remaining {
            h = remaining;
        }
        let hmin = tol.min_step * t.abs().max(span).max(1.0);
        if h < hmin {
            return Err(Error::StepUnderflow { r: t });
        }
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::StepUnderflow { r: t });
        }
        let hs = h * dir;
        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let t_new = if h == remaining { t1 } else { t + hs };
        let k6 = f(
            t + hs,
            &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y_new = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t_new, &y_new)?;
        let mut err = 0.0;
        for i in 0..N {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            let rcont: [[f64; N]; 5] = {
                let r1 = y;
                let r2: [f64; N] = core::array::from_fn(|i| y_new[i] - y[i]);
                let r3: [f64; N] = core::array::from_fn(|i| hs * k1[i] - r2[i]);
                let r4: [f64; N] = core::array::from_fn(|i| r2[i] - hs * k7[i] - r3[i]);
                let r5: [f64; N] = core::array::from_fn(|i| {
                    hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                });
                [r1, r2, r3, r4, r5]
            };
            observe(&Step { t0: t, t1: t_new, y0: y, y1: y_new, rcont });
            t = t_new;
            y = y_new;
            k1 = k7;
            // PI controller (Hairer's β = 0.04)
            let fac = 0.9 * err.max(1e-10).powf(-0.17) * err_prev.powf(0.04);
            err_prev = err.max(1e-4);
            h = (h * fac.clamp(0.2, 10.0)).min(tol.max_step);
        } else {
            let fac = 0.9 * err.powf(-0.2);
            h *= fac.clamp(0.2, 1.0);
        }
    }
}

fn initial_step<const N: usize>(y: &[f64; N], f0: &[f64; N], span: f64, tol: &Tolerances) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    let d0 = (d0 / N as f64).sqrt();
    let d1 = (d1 / N as f64).sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span).max(1e-12 * span)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let y = integrate(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], 2.0, &Tolerances::uniform(1e-12), |_| {}).unwrap();
        assert!((y[0] - 2f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_backward() {
        let f = |_, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let y = integrate(f, 3.0, [3f64.cos(), -3f64.sin()], 0.0, &Tolerances::uniform(1e-12), |_| {}).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn dense_output_tracks_solution() {
        let f = |_, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let mut worst = 0.0f64;
        integrate(f, 0.0, [0.0, 1.0], 10.0, &Tolerances::uniform(1e-10), |s| {
            for j in 1..4 {
                let t = s.t0 + (s.t1 - s.t0) * j as f64 / 4.0;
                worst = worst.max((s.eval(t)[0] - t.sin()).abs());
            }
        })
        .unwrap();
        assert!(worst < 1e-7, "{worst}");
    }

    #[test]
    fn blow_up_reports_underflow() {
        let r = integrate(|_, y: &[f64; 1]| Ok([y[0] * y[0]]), 0.0, [1.0], 2.0, &Tolerances::uniform(1e-10), |_| {});
        assert!(matches!(r, Err(Error::StepUnderflow { .. })));
    }
}
