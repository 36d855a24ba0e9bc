//! Finite-difference versions of `-iσ₂ d/dr + η + σ₁ k/r` on `(0, R]`.
//!
//! Writing `u = (u₁, u₂)`, the operator is `[[η, A*], [A, η]]` with
//! `A = d/dr + k/r`. The staggered grid keeps `u₁` at `r = ih` and `u₂` at
//! `r = (i + ½)h`, so `A` is a two-point difference and, interleaved as
//! `u₂(h/2), u₁(h), u₂(3h/2), …`, the matrix is symmetric tridiagonal.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{jacobi_eigenvalues, SymTridiagonal};
use crate::radial::RadialSystem;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Localization {
    Interior,
    /// More than 5% of the eigenvector's mass lies in the outer 10% of `(0, R]`.
    Boundary,
    /// `h·(|λ| + sup|η|) > π/4`: the mode oscillates on the grid scale.
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteEigenvalue {
    pub value: f64,
    /// Fraction of the squared norm with `r ≥ 0.9 R`.
    pub outer_mass: f64,
    pub class: Localization,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSpectrum {
    pub h: f64,
    /// Ascending.
    pub eigenvalues: Vec<DiscreteEigenvalue>,
}

impl DiscreteSpectrum {
    pub fn values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| e.value).collect()
    }

    pub fn interior(&self) -> impl Iterator<Item = &DiscreteEigenvalue> {
        self.eigenvalues.iter().filter(|e| e.class == Localization::Interior)
    }
}

fn check(r_max: f64, n: usize) -> Result<f64> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::arg("R", "truncation radius must be positive and finite"));
    }
    if n < 2 {
        return Err(Error::arg("N", "need at least two grid points"));
    }
    Ok(r_max / n as f64)
}

/// Eigenvalues of the staggered discretization with `N` nodes per component
/// (`h = R/N`), `u₁(0) = 0` and hard truncation after `u₁(R)`.
///
/// Each eigenvalue is classified by its eigenvector; only
/// [`Localization::Interior`] modes approximate eigenvalues of the half-line
/// operator.
pub fn discrete_radial_eigenvalues(sys: &RadialSystem, r_max: f64, n: usize) -> Result<DiscreteSpectrum> {
    let h = check(r_max, n)?;
    let k = sys.k();
    let eta = sys.eta();
    let size = 2 * n;
    let mut diag = vec![0.0; size];
    let mut off = vec![0.0; size - 1];
    let mut radius = vec![0.0; size];
    for i in 0..n {
        // u₂ at (i + ½)h sits at 2i, u₁ at (i + 1)h at 2i + 1
        let half = (i as f64 + 0.5) * h;
        let whole = (i + 1) as f64 * h;
        radius[2 * i] = half;
        radius[2 * i + 1] = whole;
        diag[2 * i] = eta.at(half)?;
        diag[2 * i + 1] = eta.at(whole)?;
        // (A u₁)(half) = (u₁(half + h/2) - u₁(half - h/2))/h + (k/half)·mean
        let kr = 0.5 * k / half;
        if i > 0 {
            off[2 * i - 1] = -1.0 / h + kr;
        }
        off[2 * i] = 1.0 / h + kr;
    }
    let eta_sup = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let t = SymTridiagonal::new(diag, off)?;
    let values = t.eigenvalues()?;
    let eigenvalues = values
        .into_iter()
        .map(|value| {
            let v = t.eigenvector(value);
            let total: f64 = v.iter().map(|x| x * x).sum();
            let outer: f64 = v.iter().zip(&radius).filter(|(_, r)| **r >= 0.9 * r_max).map(|(x, _)| x * x).sum();
            let outer_mass = if total > 0.0 { outer / total } else { 0.0 };
            let class = if h * (value.abs() + eta_sup) > core::f64::consts::FRAC_PI_4 {
                Localization::Unresolved
            } else if outer_mass > 0.05 {
                Localization::Boundary
            } else {
                Localization::Interior
            };
            DiscreteEigenvalue { value, outer_mass, class }
        })
        .collect();
    Ok(DiscreteSpectrum { h, eigenvalues })
}

/// Eigenvalues of the naive collocated discretization (both components at
/// `r = ih`, central differences, Dirichlet at both ends), for comparison.
/// Dense, so intended for `N` up to a few hundred.
pub fn collocated_radial_eigenvalues(sys: &RadialSystem, r_max: f64, n: usize) -> Result<Vec<f64>> {
    let h = check(r_max, n)?;
    if n > 400 {
        return Err(Error::arg("N", "collocated comparison is dense; use N <= 400"));
    }
    let k = sys.k();
    let size = 2 * n;
    let mut a = vec![0.0; size * size];
    // u₁ at index i, u₂ at n + i
    for i in 0..n {
        let r = (i + 1) as f64 * h;
        let e = sys.eta().at(r)?;
        a[i * size + i] = e;
        a[(n + i) * size + n + i] = e;
        let kr = k / r;
        a[(n + i) * size + i] = kr;
        a[i * size + n + i] = kr;
        for (j, c) in [(i.wrapping_sub(1), -0.5 / h), (i + 1, 0.5 / h)] {
            if j < n {
                // row u₂: +D; row u₁: -D = Dᵀ
                a[(n + i) * size + j] += c;
                a[j * size + n + i] += c;
            }
        }
    }
    jacobi_eigenvalues(&a, size)
}
