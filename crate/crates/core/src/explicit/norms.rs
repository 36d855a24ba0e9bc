//! Weighted norms `‖⟨x⟩^{-s} f‖_{L²(B_R)}`.

use num_traits::Float;

use super::{SpinorField, SpinorSource};
use crate::quad::{self, BallResolution, BallRule};
use crate::{Error, Result};

fn check(s: f64, radius: f64, tol: f64) -> Result<()> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::arg("s", "weight exponent must be finite and non-negative"));
    }
    if !(radius > 0.0) {
        return Err(Error::arg("R", "radius must be positive"));
    }
    if !(tol > 0.0) {
        return Err(Error::arg("tol", "tolerance must be positive"));
    }
    Ok(())
}

/// `∫_{|x| ≤ R} ⟨x⟩^{-2s} |f(x)|² dx`; `R` may be infinite.
///
/// Sources with a radial modulus reduce to one adaptive radial integral with
/// absolute error `tol`. Other sources need a finite `R` and use product ball
/// rules, refined until two successive rules agree to `tol`.
pub fn weighted_l2_norm_squared<S: SpinorSource>(source: &S, s: f64, radius: f64, tol: f64) -> Result<f64> {
    check(s, radius, tol)?;
    let d = source.dim();
    if source.radial_modulus(0.0).is_some() {
        let g = |r: f64| -> Result<f64> {
            let m = source.radial_modulus(r).unwrap_or(0.0);
            Ok((1.0 + r * r).powf(-s) * m * m)
        };
        return Ok(quad::radial_integral(d, g, radius, tol)?.value);
    }
    if !radius.is_finite() {
        return Err(Error::arg("R", "an infinite radius needs a field with radial modulus"));
    }
    let center = [0.0; 3];
    let integrand = |x: &[f64]| -> Result<f64> {
        let w = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
        Ok(w.powf(-s) * source.eval(x)?.norm_sqr())
    };
    let mut res = BallResolution::default();
    let mut prev = BallRule::new(d, res)?.integrate(&center[..d], radius, integrand)?;
    for _ in 0..5 {
        res.radial_panels *= 2;
        res.polar *= 2;
        res.azimuth *= 2;
        let next = BallRule::new(d, res)?.integrate(&center[..d], radius, integrand)?;
        if (next - prev).abs() <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature { a: 0.0, b: radius, estimate: prev, error: f64::INFINITY })
}

/// Square root of [`weighted_l2_norm_squared`].
pub fn weighted_l2_norm<S: SpinorSource>(source: &S, s: f64, radius: f64, tol: f64) -> Result<f64> {
    Ok(weighted_l2_norm_squared(source, s, radius, tol)?.sqrt())
}

/// Trapezoid-rule version on a stored field: nodes with `|x| ≤ R`, product
/// trapezoid weights over the box.
pub fn weighted_l2_norm_squared_field(field: &SpinorField, s: f64, radius: f64) -> Result<f64> {
    check(s, radius, 1.0)?;
    let grid = field.grid();
    let d = grid.dim();
    let last = grid.nodes_per_axis() - 1;
    let mut acc = 0.0;
    for (lin, v) in field.values().iter().enumerate() {
        let idx = grid.index(lin);
        let x = grid.point(lin);
        let r2: f64 = x[..d].iter().map(|c| c * c).sum();
        if r2.sqrt() > radius {
            continue;
        }
        let w: f64 = idx[..d].iter().map(|&i| if i == 0 || i == last { 0.5 } else { 1.0 }).product();
        acc += w * (1.0 + r2).powf(-s) * v.norm_sqr();
    }
    Ok(acc * grid.h().powi(d as i32))
}
