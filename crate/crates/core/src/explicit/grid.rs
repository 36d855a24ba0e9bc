//! Uniform grids, the 4th-order Dirac stencil and residual norms.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::SpinorSource;
use crate::clifford::{spinor_dim, Spinor};
use crate::potential::PotentialSpec;
use crate::{Error, Result};

type Raw = [Complex64; 4];
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Centered box `[-L, L]^d` with spacing `h`; `margin` nodes on each face are
/// excluded from stencil output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    h: f64,
    margin: usize,
    n: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, h: f64, margin: usize) -> Result<Self> {
        spinor_dim(dim)?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::arg("h", "spacing must be positive"));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::arg("L", "half-width must be positive"));
        }
        let cells = 2.0 * half_width / h;
        let rounded = cells.round();
        if (cells - rounded).abs() > 1e-9 * cells.max(1.0) || rounded < 1.0 {
            return Err(Error::arg("h", "2L/h must be a whole number"));
        }
        let n = rounded as usize + 1;
        if n <= 2 * margin {
            return Err(Error::arg("margin", "margin leaves no interior nodes"));
        }
        Ok(GridSpec { dim, half_width, h, margin, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn margin(&self) -> usize {
        self.margin
    }
    /// Nodes per axis.
    pub fn nodes_per_axis(&self) -> usize {
        self.n
    }
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h
    }

    /// Multi-index of a linear node index; axis 0 varies slowest.
    pub fn index(&self, mut lin: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in (0..self.dim).rev() {
            idx[a] = lin % self.n;
            lin /= self.n;
        }
        idx
    }

    pub fn linear(&self, idx: &[usize]) -> usize {
        idx[..self.dim].iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn point(&self, lin: usize) -> [f64; 3] {
        let idx = self.index(lin);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.coord(idx[a]);
        }
        x
    }

    fn is_interior(&self, idx: &[usize]) -> bool {
        idx[..self.dim].iter().all(|&i| i >= self.margin && i < self.n - self.margin)
    }
}

/// Spinor values on every node of a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    grid: GridSpec,
    values: Vec<Spinor>,
}

impl SpinorField {
    pub fn from_values(grid: GridSpec, values: Vec<Spinor>) -> Result<Self> {
        let sd = spinor_dim(grid.dim)?;
        if values.len() != grid.len() {
            return Err(Error::arg("values", "one spinor per grid node is required"));
        }
        if values.iter().any(|v| v.dim() != sd) {
            return Err(Error::arg("values", "spinor dimension does not match the grid"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("values", "entries must be finite"));
        }
        Ok(SpinorField { grid, values })
    }

    pub fn sample<S: SpinorSource>(grid: GridSpec, source: &S) -> Result<Self> {
        if source.dim() != grid.dim {
            return Err(Error::arg("grid", "grid and source dimensions differ"));
        }
        let values = (0..grid.len())
            .map(|i| source.eval(&grid.point(i)[..grid.dim]))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn values(&self) -> &[Spinor] {
        &self.values
    }
}

/// Sup and L² norms of a residual over the interior nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualNorms {
    pub sup: f64,
    pub l2: f64,
    /// Interior node count.
    pub nodes: usize,
}

/// `-i Σ_j D_j v_j` where `v_j` approximates `∂_j f`.
fn dirac_of_derivatives(dim: usize, d: &[Raw; 3]) -> Raw {
    let i = Complex64::new(0.0, 1.0);
    let mut out = [ZERO; 4];
    if dim == 2 {
        // σ₁ (p,q) = (q,p), σ₂ (p,q) = (-iq, ip)
        out[0] = d[0][1] - i * d[1][1];
        out[1] = d[0][0] + i * d[1][0];
        for o in out[..2].iter_mut() {
            *o *= -i;
        }
    } else {
        // α_j (a,b) = (σ_j b, σ_j a) with a, b the upper and lower halves
        let s = |j: usize, p: Complex64, q: Complex64| -> [Complex64; 2] {
            match j {
                0 => [q, p],
                1 => [-i * q, i * p],
                _ => [p, -q],
            }
        };
        for (j, v) in d.iter().enumerate() {
            let up = s(j, v[2], v[3]);
            let lo = s(j, v[0], v[1]);
            out[0] += up[0];
            out[1] += up[1];
            out[2] += lo[0];
            out[3] += lo[1];
        }
        for o in out.iter_mut() {
            *o *= -i;
        }
    }
    out
}

fn raw(s: &Spinor) -> Raw {
    let mut r = [ZERO; 4];
    r[..s.dim()].copy_from_slice(s.components());
    r
}

/// Streams the grid plane by plane (planes of constant first index), keeping
/// five planes, and hands `(H - λ) f` at each interior node to `visit`.
fn sweep<P, V>(grid: &GridSpec, q: &PotentialSpec, lambda: f64, mut plane: P, mut visit: V) -> Result<()>
where
    P: FnMut(usize) -> Result<Vec<Raw>>,
    V: FnMut(usize, &Raw),
{
    if grid.margin < 2 {
        return Err(Error::arg("margin", "the 4th-order stencil needs a margin of at least 2"));
    }
    if q.dim() != grid.dim {
        return Err(Error::arg("q", "potential and grid dimensions differ"));
    }
    let n = grid.n;
    let d = grid.dim;
    let sd = spinor_dim(d)?;
    let plane_len = n.pow(d as u32 - 1);
    let strides: [usize; 3] = if d == 2 { [0, 1, 0] } else { [0, n, 1] };
    let c1 = 8.0 / (12.0 * grid.h);
    let c2 = -1.0 / (12.0 * grid.h);
    let m = grid.margin;
    let mut ring: Vec<Vec<Raw>> = Vec::with_capacity(5);
    for i0 in (m - 2)..(m + 2) {
        ring.push(plane(i0)?);
    }
    for i0 in m..(n - m) {
        ring.push(plane(i0 + 2)?);
        if ring.len() > 5 {
            ring.remove(0);
        }
        let (pm2, pm1, p0, pp1, pp2) = (&ring[0], &ring[1], &ring[2], &ring[3], &ring[4]);
        for j in 0..plane_len {
            let mut idx = [i0, 0, 0];
            let mut rest = j;
            for a in (1..d).rev() {
                idx[a] = rest % n;
                rest /= n;
            }
            if !grid.is_interior(&idx) {
                continue;
            }
            let mut der = [[ZERO; 4]; 3];
            for c in 0..sd {
                der[0][c] = (pp1[j][c] - pm1[j][c]) * c1 + (pp2[j][c] - pm2[j][c]) * c2;
            }
            for a in 1..d {
                let s = strides[a];
                for c in 0..sd {
                    der[a][c] = (p0[j + s][c] - p0[j - s][c]) * c1 + (p0[j + 2 * s][c] - p0[j - 2 * s][c]) * c2;
                }
            }
            let mut out = dirac_of_derivatives(d, &der);
            let mut x = [0.0; 3];
            for a in 0..d {
                x[a] = grid.coord(idx[a]);
            }
            let shift = q.eval(&x[..d])? - lambda;
            for c in 0..sd {
                out[c] += p0[j][c] * shift;
            }
            visit(grid.linear(&idx), &out);
        }
    }
    Ok(())
}

fn field_plane(field: &SpinorField, i0: usize) -> Vec<Raw> {
    let len = field.grid.n.pow(field.grid.dim as u32 - 1);
    field.values[i0 * len..(i0 + 1) * len].iter().map(raw).collect()
}

fn norm_sqr(v: &Raw) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// `(-i D·∇ + q) f` on interior nodes by 4th-order central differences;
/// margin nodes are set to zero.
pub fn apply_dirac(field: &SpinorField, q: &PotentialSpec) -> Result<SpinorField> {
    let grid = field.grid;
    let sd = spinor_dim(grid.dim)?;
    let mut out = vec![Spinor::zeros(sd)?; grid.len()];
    sweep(&grid, q, 0.0, |i| Ok(field_plane(field, i)), |lin, v| {
        out[lin] = Spinor::from_slice(&v[..sd]).expect("dimension checked");
    })?;
    Ok(SpinorField { grid, values: out })
}

/// Sup and L² norms of `(H - λ) f` over interior nodes of a stored field.
pub fn residual_norm(field: &SpinorField, q: &PotentialSpec, lambda: f64) -> Result<ResidualNorms> {
    let grid = field.grid;
    let mut acc = Norms::default();
    sweep(&grid, q, lambda, |i| Ok(field_plane(field, i)), |_, v| acc.add(v))?;
    Ok(acc.finish(&grid))
}

/// As [`residual_norm`], sampling `source` plane by plane so the full grid is
/// never stored.
pub fn residual_norm_streaming<S: SpinorSource>(
    source: &S,
    q: &PotentialSpec,
    lambda: f64,
    grid: &GridSpec,
) -> Result<ResidualNorms> {
    if source.dim() != grid.dim {
        return Err(Error::arg("grid", "grid and source dimensions differ"));
    }
    let n = grid.n;
    let d = grid.dim;
    let plane_len = n.pow(d as u32 - 1);
    let mut acc = Norms::default();
    let sample = |i0: usize| -> Result<Vec<Raw>> {
        let mut out = Vec::with_capacity(plane_len);
        let mut x = [0.0; 3];
        x[0] = grid.coord(i0);
        for j in 0..plane_len {
            let mut rest = j;
            for a in (1..d).rev() {
                x[a] = grid.coord(rest % n);
                rest /= n;
            }
            let v = source.eval(&x[..d])?;
            if !v.is_finite() {
                return Err(Error::Domain { message: "non-finite field value", point: x[..d].to_vec() });
            }
            out.push(raw(&v));
        }
        Ok(out)
    };
    sweep(grid, q, lambda, sample, |_, v| acc.add(v))?;
    Ok(acc.finish(grid))
}

#[derive(Default)]
struct Norms {
    sup: f64,
    sum: f64,
    nodes: usize,
}

impl Norms {
    fn add(&mut self, v: &Raw) {
        let s = norm_sqr(v);
        self.sup = self.sup.max(s.sqrt());
        self.sum += s;
        self.nodes += 1;
    }

    fn finish(&self, grid: &GridSpec) -> ResidualNorms {
        ResidualNorms {
            sup: self.sup,
            l2: (self.sum * grid.h.powi(grid.dim as i32)).sqrt(),
            nodes: self.nodes,
        }
    }
}

/// `(-i D·∇ + q - λ) f` at an arbitrary point, with the same 4th-order
/// central differences of spacing `h` applied to the closure.
pub fn stencil_residual_at<S: SpinorSource>(source: &S, q: &PotentialSpec, lambda: f64, x: &[f64], h: f64) -> Result<Spinor> {
    let d = source.dim();
    if x.len() != d || q.dim() != d {
        return Err(Error::arg("x", "point, source and potential dimensions differ"));
    }
    let sd = spinor_dim(d)?;
    let c1 = 8.0 / (12.0 * h);
    let c2 = -1.0 / (12.0 * h);
    let mut der = [[ZERO; 4]; 3];
    let mut y = [0.0; 3];
    y[..d].copy_from_slice(x);
    for (a, da) in der.iter_mut().enumerate().take(d) {
        let mut at = |s: f64| -> Result<Raw> {
            y[a] = x[a] + s;
            let v = raw(&source.eval(&y[..d])?);
            y[a] = x[a];
            Ok(v)
        };
        let (p1, m1, p2, m2) = (at(h)?, at(-h)?, at(2.0 * h)?, at(-2.0 * h)?);
        for c in 0..sd {
            da[c] = (p1[c] - m1[c]) * c1 + (p2[c] - m2[c]) * c2;
        }
    }
    let mut out = dirac_of_derivatives(d, &der);
    let f0 = raw(&source.eval(x)?);
    let shift = q.eval(x)? - lambda;
    for c in 0..sd {
        out[c] += f0[c] * shift;
    }
    Spinor::from_slice(&out[..sd])
}

#[cfg(test)]
pub(super) fn dirac_of_derivatives_for_test(dim: usize, d: &[Raw; 3]) -> Raw {
    dirac_of_derivatives(dim, d)
}
