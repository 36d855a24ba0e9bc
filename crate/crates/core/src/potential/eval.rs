//! Plain and forward-mode evaluation of [`Expr`] trees.

use core::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::Float;

use super::ast::{BinOp, Expr, Func};

/// Why an evaluation failed; the caller attaches the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Fault(pub &'static str);

/// Variable values indexed by `Var::slot`.
pub(crate) type Slots<T> = [T; 5];

fn pow_real(b: f64, e: f64) -> Result<f64, Fault> {
    if b < 0.0 && e.fract() != 0.0 {
        return Err(Fault("negative base with non-integer exponent"));
    }
    if b == 0.0 && e < 0.0 {
        return Err(Fault("zero raised to a negative power"));
    }
    if e.fract() == 0.0 && e.abs() <= 64.0 {
        Ok(b.powi(e as i32))
    } else {
        Ok(b.powf(e))
    }
}

fn finite(v: f64) -> Result<f64, Fault> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Fault("non-finite result"))
    }
}

pub(crate) fn eval(e: &Expr, vars: &Slots<f64>) -> Result<f64, Fault> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Pi => core::f64::consts::PI,
        Expr::Var(v) => vars[v.slot()],
        Expr::Neg(a) => -eval(a, vars)?,
        Expr::Bin(op, l, r) => {
            let a = eval(l, vars)?;
            let b = eval(r, vars)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(Fault("division by zero"));
                    }
                    a / b
                }
                BinOp::Pow => pow_real(a, b)?,
            }
        }
        Expr::Call(f, a) => {
            let x = eval(a, vars)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Abs => x.abs(),
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(Fault("square root of a negative number"));
                    }
                    x.sqrt()
                }
                Func::Log => {
                    if x <= 0.0 {
                        return Err(Fault("logarithm of a non-positive number"));
                    }
                    x.ln()
                }
            }
        }
    };
    finite(v)
}

/// Value with gradient with respect to up to three seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: [f64; 3],
}

impl Dual {
    pub const fn constant(v: f64) -> Dual {
        Dual { v, d: [0.0; 3] }
    }

    pub fn seeded(v: f64, d: [f64; 3]) -> Dual {
        Dual { v, d }
    }

    fn chain(self, v: f64, dv: f64) -> Dual {
        Dual { v, d: self.d.map(|x| x * dv) }
    }

    fn has_slope(&self) -> bool {
        self.d.iter().any(|x| *x != 0.0)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: core::array::from_fn(|i| self.d[i] + o.d[i]) }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: core::array::from_fn(|i| self.d[i] - o.d[i]) }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, d: core::array::from_fn(|i| self.d[i] * o.v + self.v * o.d[i]) }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let inv = 1.0 / o.v;
        Dual { v: self.v * inv, d: core::array::from_fn(|i| (self.d[i] - self.v * inv * o.d[i]) * inv) }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { v: -self.v, d: self.d.map(|x| -x) }
    }
}

/// Forward-mode evaluation; `smooth` is cleared where the expression has no
/// derivative (kinks of `abs`, `sqrt` at 0, `0^p` with `p < 1`).
pub(crate) fn eval_dual(e: &Expr, vars: &Slots<Dual>, smooth: &mut bool) -> Result<Dual, Fault> {
    let out = match e {
        Expr::Num(v) => Dual::constant(*v),
        Expr::Pi => Dual::constant(core::f64::consts::PI),
        Expr::Var(v) => vars[v.slot()],
        Expr::Neg(a) => -eval_dual(a, vars, smooth)?,
        Expr::Bin(op, l, r) => {
            let a = eval_dual(l, vars, smooth)?;
            let b = eval_dual(r, vars, smooth)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.v == 0.0 {
                        return Err(Fault("division by zero"));
                    }
                    a / b
                }
                BinOp::Pow => pow_dual(a, b, smooth)?,
            }
        }
        Expr::Call(f, a) => {
            let x = eval_dual(a, vars, smooth)?;
            match f {
                Func::Sin => {
                    let (s, c) = x.v.sin_cos();
                    x.chain(s, c)
                }
                Func::Cos => {
                    let (s, c) = x.v.sin_cos();
                    x.chain(c, -s)
                }
                Func::Exp => {
                    let ex = x.v.exp();
                    x.chain(ex, ex)
                }
                Func::Abs => {
                    if x.v == 0.0 && x.has_slope() {
                        *smooth = false;
                    }
                    let s = if x.v < 0.0 { -1.0 } else if x.v > 0.0 { 1.0 } else { 0.0 };
                    x.chain(x.v.abs(), s)
                }
                Func::Sqrt => {
                    if x.v < 0.0 {
                        return Err(Fault("square root of a negative number"));
                    }
                    let s = x.v.sqrt();
                    if s == 0.0 {
                        if x.has_slope() {
                            *smooth = false;
                        }
                        Dual::constant(0.0)
                    } else {
                        x.chain(s, 0.5 / s)
                    }
                }
                Func::Log => {
                    if x.v <= 0.0 {
                        return Err(Fault("logarithm of a non-positive number"));
                    }
                    x.chain(x.v.ln(), 1.0 / x.v)
                }
            }
        }
    };
    finite(out.v)?;
    if out.d.iter().any(|v| !v.is_finite()) {
        *smooth = false;
        return Ok(Dual { v: out.v, d: [0.0; 3] });
    }
    Ok(out)
}

fn pow_dual(a: Dual, b: Dual, smooth: &mut bool) -> Result<Dual, Fault> {
    let v = pow_real(a.v, b.v)?;
    let exponent_const = !b.has_slope();
    if a.v == 0.0 {
        // d(a^b) = b a^(b-1) a'  (+ a^b ln a b', which vanishes with a^b)
        if b.v > 1.0 || (b.v == 1.0 && exponent_const) {
            let c = if b.v == 1.0 { 1.0 } else { 0.0 };
            return Ok(a.chain(v, c));
        }
        if a.has_slope() || b.has_slope() {
            *smooth = false;
        }
        return Ok(Dual::constant(v));
    }
    let da = b.v * pow_real(a.v, b.v - 1.0)?;
    let mut out = a.chain(v, da);
    if !exponent_const {
        if a.v < 0.0 {
            return Err(Fault("negative base with variable exponent"));
        }
        let lg = v * a.v.ln();
        for i in 0..3 {
            out.d[i] += lg * b.d[i];
        }
    }
    Ok(out)
}
