use super::grid::dirac_of_derivatives_for_test;
use super::*;
use crate::clifford::{alpha, pauli};
use crate::potential::parse;
use core::f64::consts::PI;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn phi4() -> Spinor {
    Spinor::from_slice(&[c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)]).unwrap()
}

fn phi2() -> Spinor {
    Spinor::from_slice(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap()
}

fn q3() -> PotentialSpec {
    PotentialSpec::radial(parse("-3/(1+r^2)").unwrap(), 3, None).unwrap()
}

fn q2() -> PotentialSpec {
    PotentialSpec::radial(parse("-2/(1+r^2)").unwrap(), 2, None).unwrap()
}

/// `(-i D·∇ + q - λ) f` at a point from an independent 4th-order difference.
fn pointwise_residual<F: Fn(&[f64]) -> Spinor>(f: F, q: &PotentialSpec, lambda: f64, x: &[f64], h: f64) -> f64 {
    let d = x.len();
    let mut total = f(x).scale(c(q.eval(x).unwrap() - lambda, 0.0));
    for j in 0..d {
        let at = |s: f64| {
            let mut y = x.to_vec();
            y[j] += s;
            f(&y)
        };
        let der = (at(-2.0 * h) - at(2.0 * h) + (at(h) - at(-h)).scale(c(8.0, 0.0))).scale(c(1.0 / (12.0 * h), 0.0));
        let m = if d == 2 { pauli(j + 1).unwrap() } else { alpha(j + 1).unwrap() };
        total = total + m.apply(&der).scale(c(0.0, -1.0));
    }
    total.norm()
}

#[test]
fn zero_mode_examples() {
    let p = phi4();
    assert_eq!(zero_mode_3d(&[0.0; 3], &p).unwrap(), p);
    let f = zero_mode_3d(&[0.0, 0.6, 0.8], &p).unwrap();
    assert!((f.norm() - 0.5).abs() < 1e-15);
    let r = pointwise_residual(|x| zero_mode_3d(x, &p).unwrap(), &q3(), 0.0, &[0.5, 0.5, 0.5], 1e-3);
    assert!(r < 1e-9, "{r}");
    let bad = Spinor::from_slice(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!(zero_mode_3d(&[0.0; 3], &bad).is_err());
    assert!(zero_mode_3d(&[0.0; 2], &p).is_err());
}

#[test]
fn zero_resonance_examples() {
    let p = phi2();
    assert_eq!(zero_resonance_2d(&[0.0; 2], &p).unwrap(), p);
    let f = zero_resonance_2d(&[3f64.sqrt(), 0.0], &p).unwrap();
    assert!((f.norm() - 0.5).abs() < 1e-15);
    let r = pointwise_residual(|x| zero_resonance_2d(x, &p).unwrap(), &q2(), 0.0, &[0.3, -0.7], 1e-3);
    assert!(r < 1e-9, "{r}");
}

#[test]
fn pointwise_norm_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let eta = PotentialSpec::layered(parse("sin(t)").unwrap(), UnitVector::normalized(&[1.0, 2.0, -2.0]).unwrap())
        .unwrap();
    let sol = LayeredSolution::for_box(0.37, &eta, 10.0, 0.01, 1e-12).unwrap();
    for _ in 0..1000 {
        let x: [f64; 3] = core::array::from_fn(|_| rng.gen_range(-10.0..10.0));
        let w = 1.0 + x.iter().map(|v| v * v).sum::<f64>();
        let f = zero_mode_3d(&x, &phi4()).unwrap();
        assert!((f.norm() - 1.0 / w).abs() <= 1e-12);
        let g = zero_resonance_2d(&x[..2], &phi2()).unwrap();
        let w2 = 1.0 + x[0] * x[0] + x[1] * x[1];
        assert!((g.norm() - 1.0 / w2.sqrt()).abs() <= 1e-12);
        assert!((sol.eval(&x).unwrap().norm() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn layered_examples() {
    let k = UnitVector::axis(3, 2).unwrap();
    let zero = PotentialSpec::layered(parse("0").unwrap(), k).unwrap();
    let phi0 = plus_eigenspinor(&k).unwrap();
    let f = layered_eigensolution(0.0, &zero, &[0.3, -1.0, 2.0], 1e-12).unwrap();
    assert!((f - phi0).norm() < 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let eta = PotentialSpec::layered(parse("sin(t)").unwrap(), UnitVector::normalized(&[0.0, 3.0, 4.0]).unwrap())
        .unwrap();
    for _ in 0..100 {
        let x: [f64; 3] = core::array::from_fn(|_| rng.gen_range(-5.0..5.0));
        let f = layered_eigensolution(0.37, &eta, &x, 1e-12).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
        let r = pointwise_residual(|y| layered_eigensolution(0.37, &eta, y, 1e-13).unwrap(), &eta, 0.37, &x, 1e-3);
        assert!(r < 1e-8, "{r}");
    }
    let radial = q3();
    assert!(layered_eigensolution(0.0, &radial, &[0.0; 3], 1e-10).is_err());
}

#[test]
fn layered_residual_on_grid_is_fourth_order() {
    let k = UnitVector::normalized(&[1.0, 1.0, 0.0]).unwrap();
    let eta = PotentialSpec::layered(parse("sin(t)").unwrap(), k).unwrap();
    let sol = LayeredSolution::for_box(0.37, &eta, 1.0, 1e-3, 1e-13).unwrap();
    let coarse = residual_norm_streaming(&sol, &eta, 0.37, &GridSpec::new(3, 1.0, 0.1, 2).unwrap()).unwrap();
    let fine = residual_norm_streaming(&sol, &eta, 0.37, &GridSpec::new(3, 1.0, 0.05, 2).unwrap()).unwrap();
    // |f⁽⁵⁾| ≤ |λ| + sup|η| + ... ≈ 2⁵; stencil constant 1/30
    assert!(fine.sup <= 2.0 * 32.0 / 30.0 * 0.05f64.powi(4), "{fine:?}");
    let ratio = coarse.sup / fine.sup;
    assert!((12.0..=20.0).contains(&ratio), "{ratio}");
}

#[test]
fn stencil_matrix_form_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for d in [2usize, 3] {
        let sd = if d == 2 { 2 } else { 4 };
        for _ in 0..20 {
            let der: [[Complex64; 4]; 3] = core::array::from_fn(|_| {
                core::array::from_fn(|i| if i < sd { c(rng.gen(), rng.gen()) } else { c(0.0, 0.0) })
            });
            let fast = dirac_of_derivatives_for_test(d, &der);
            let mut dense = Spinor::zeros(sd).unwrap();
            for j in 0..d {
                let m = if d == 2 { pauli(j + 1).unwrap() } else { alpha(j + 1).unwrap() };
                dense = dense + m.apply(&Spinor::from_slice(&der[j][..sd]).unwrap()).scale(c(0.0, -1.0));
            }
            for i in 0..sd {
                assert!((fast[i] - dense.components()[i]).norm() < 1e-15);
            }
        }
    }
}

#[test]
fn apply_dirac_constant_and_plane_wave() {
    let grid = GridSpec::new(3, 1.0, 0.1, 2).unwrap();
    let zero = PotentialSpec::constant(0.0, 3).unwrap();
    let p = phi4();
    let cst = SpinorField::sample(grid, &FnSource::new(3, |_| Ok(p))).unwrap();
    let out = apply_dirac(&cst, &zero).unwrap();
    assert!(out.values().iter().all(|v| v.norm() < 1e-13));

    let k = UnitVector::normalized(&[2.0, -1.0, 2.0]).unwrap();
    let phi0 = plus_eigenspinor(&k).unwrap();
    let lambda = 1.3;
    let wave = FnSource::new(3, move |x: &[f64]| {
        let (s, cc) = (lambda * k.dot(x)).sin_cos();
        Ok(phi0.scale(c(cc, s)))
    });
    for h in [0.1, 0.05] {
        let grid = GridSpec::new(3, 1.0, h, 2).unwrap();
        let f = SpinorField::sample(grid, &wave).unwrap();
        let hf = apply_dirac(&f, &zero).unwrap();
        let mut worst = 0.0f64;
        for (lin, (a, b)) in hf.values().iter().zip(f.values()).enumerate() {
            let idx = grid.index(lin);
            if idx.iter().all(|&i| i >= 2 && i < grid.nodes_per_axis() - 2) {
                worst = worst.max((*a - b.scale(c(lambda, 0.0))).norm());
            }
        }
        assert!(worst <= lambda.powi(5) / 30.0 * h.powi(4) * 1.01, "{h}: {worst}");
        let norms = residual_norm(&f, &zero, lambda).unwrap();
        assert!((norms.sup - worst).abs() < 1e-15);
    }
}

#[test]
fn zero_mode_residual_converges_at_fourth_order() {
    let src = ZeroMode3d::new(phi4()).unwrap();
    let a = residual_norm_streaming(&src, &q3(), 0.0, &GridSpec::new(3, 2.0, 0.1, 2).unwrap()).unwrap();
    let b = residual_norm_streaming(&src, &q3(), 0.0, &GridSpec::new(3, 2.0, 0.05, 2).unwrap()).unwrap();
    let ratio = a.sup / b.sup;
    assert!((12.0..=20.0).contains(&ratio), "{ratio}");
    assert!(b.l2 < a.l2);
    let src2 = ZeroResonance2d::new(phi2()).unwrap();
    let a = residual_norm_streaming(&src2, &q2(), 0.0, &GridSpec::new(2, 3.0, 0.1, 2).unwrap()).unwrap();
    let b = residual_norm_streaming(&src2, &q2(), 0.0, &GridSpec::new(2, 3.0, 0.05, 2).unwrap()).unwrap();
    let ratio = a.sup / b.sup;
    assert!((12.0..=20.0).contains(&ratio), "{ratio}");
}

#[test]
fn streaming_matches_stored() {
    let src = ZeroMode3d::new(phi4()).unwrap();
    let grid = GridSpec::new(3, 1.5, 0.1, 3).unwrap();
    let f = SpinorField::sample(grid, &src).unwrap();
    assert_eq!(residual_norm(&f, &q3(), 0.4).unwrap(), residual_norm_streaming(&src, &q3(), 0.4, &grid).unwrap());
}

#[test]
fn shifted_residual_equals_field_norm() {
    // (H - 1) f = -f for the zero mode
    let src = ZeroMode3d::new(phi4()).unwrap();
    let grid = GridSpec::new(3, 4.0, 0.1, 2).unwrap();
    let r = residual_norm_streaming(&src, &q3(), 1.0, &grid).unwrap();
    let mut sum = 0.0;
    for lin in 0..grid.len() {
        let idx = grid.index(lin);
        if idx.iter().all(|&i| i >= 2 && i < grid.nodes_per_axis() - 2) {
            sum += src.eval(&grid.point(lin)).unwrap().norm_sqr();
        }
    }
    let direct = (sum * 1e-3).sqrt();
    assert!((r.l2 - direct).abs() < 1e-3 * direct, "{} vs {direct}", r.l2);
}

#[test]
fn noise_has_large_residual() {
    let grid = GridSpec::new(2, 1.0, 0.1, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let values = (0..grid.len())
        .map(|_| Spinor::from_slice(&[c(rng.gen(), rng.gen()), c(rng.gen(), rng.gen())]).unwrap())
        .collect();
    let f = SpinorField::from_values(grid, values).unwrap();
    let r = residual_norm(&f, &q2(), 0.0).unwrap();
    assert!(r.sup > 1.0);
}

#[test]
fn grid_validation() {
    assert!(GridSpec::new(3, 1.0, 0.3, 2).is_err());
    assert!(GridSpec::new(3, 1.0, 0.0, 2).is_err());
    assert!(GridSpec::new(4, 1.0, 0.1, 2).is_err());
    assert!(GridSpec::new(2, 0.2, 0.1, 3).is_err());
    let g = GridSpec::new(2, 1.0, 0.1, 1).unwrap();
    assert_eq!(g.nodes_per_axis(), 21);
    let f = SpinorField::sample(g, &ZeroResonance2d::new(phi2()).unwrap()).unwrap();
    assert!(matches!(apply_dirac(&f, &q2()), Err(Error::Argument { name: "margin", .. })));
    assert!(apply_dirac(&f, &q3()).is_err());
    for lin in [0, 7, 440] {
        assert_eq!(g.linear(&g.index(lin)), lin);
    }
}

#[test]
fn weighted_norm_examples() {
    let zm = ZeroMode3d::new(phi4()).unwrap();
    let n2 = weighted_l2_norm_squared(&zm, 0.0, f64::INFINITY, 1e-10).unwrap();
    assert!((n2 - PI * PI).abs() < 1e-8, "{n2}");

    let zr = ZeroResonance2d::new(phi2()).unwrap();
    for r in [10.0, 1e3, 1e5] {
        let m = weighted_l2_norm_squared(&zr, 0.0, r, 1e-10).unwrap();
        let log_bracket = 0.5 * (1.0f64 + r * r).ln();
        assert!((m - 2.0 * PI * log_bracket).abs() < 1e-8);
    }
    let a = weighted_l2_norm_squared(&zr, 0.5, 1e4, 1e-10).unwrap();
    let b = weighted_l2_norm_squared(&zr, 0.5, f64::INFINITY, 1e-10).unwrap();
    // ∫ 2π r (1+r²)^{-3/2} dr = 2π
    assert!((b - 2.0 * PI).abs() < 1e-8);
    assert!(a <= b && b - a < 1e-3);
}

#[test]
fn weighted_norm_is_monotone() {
    let zm = ZeroMode3d::new(phi4()).unwrap();
    let mut prev = 0.0;
    for r in [0.5, 1.0, 2.0, 4.0, 8.0, f64::INFINITY] {
        let v = weighted_l2_norm_squared(&zm, 0.25, r, 1e-11).unwrap();
        assert!(v >= prev);
        prev = v;
    }
    let mut prev = f64::INFINITY;
    for s in [0.0, 0.5, 1.0, 2.0] {
        let v = weighted_l2_norm_squared(&zm, s, 3.0, 1e-11).unwrap();
        assert!(v <= prev);
        prev = v;
    }
}

#[test]
fn general_sources_use_ball_rules() {
    let zm = ZeroMode3d::new(phi4()).unwrap();
    let plain = FnSource::new(3, |x: &[f64]| zm.eval(x));
    let a = weighted_l2_norm_squared(&plain, 0.5, 2.0, 1e-7).unwrap();
    let b = weighted_l2_norm_squared(&zm, 0.5, 2.0, 1e-12).unwrap();
    assert!((a - b).abs() < 1e-7, "{a} {b}");
    assert!(weighted_l2_norm_squared(&plain, 0.0, f64::INFINITY, 1e-6).is_err());

    let grid = GridSpec::new(3, 3.0, 0.1, 0).unwrap();
    let f = SpinorField::sample(grid, &zm).unwrap();
    let t = weighted_l2_norm_squared_field(&f, 0.0, 2.0).unwrap();
    let exact = weighted_l2_norm_squared(&zm, 0.0, 2.0, 1e-12).unwrap();
    assert!((t - exact).abs() < 2e-2 * exact, "{t} {exact}");
}

#[test]
fn xi_table_matches_quadrature() {
    let eta = PotentialSpec::layered(parse("sin(2*pi*t)+0.3").unwrap(), UnitVector::axis(2, 0).unwrap()).unwrap();
    let table = XiTable::new(|t| eta.profile(t), -3.0, 3.0, 0.01, 1e-13).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let t = rng.gen_range(-3.0..3.0);
        let (xi, e) = table.eval(t).unwrap();
        assert!((xi - eta.antiderivative_profile(t, 1e-13).unwrap()).abs() < 1e-8);
        assert!((e - eta.profile(t).unwrap()).abs() < 1e-5);
    }
    assert!(table.eval(3.5).is_err());
}

#[test]
fn pointwise_stencil_matches_grid() {
    let src = ZeroMode3d::new(phi4()).unwrap();
    let grid = GridSpec::new(3, 1.0, 0.1, 2).unwrap();
    let f = SpinorField::sample(grid, &src).unwrap();
    let hf = apply_dirac(&f, &q3()).unwrap();
    for idx in [[5usize, 7, 9], [2, 2, 2], [10, 12, 18]] {
        let lin = grid.linear(&idx);
        let p = stencil_residual_at(&src, &q3(), 0.0, &grid.point(lin), 0.1).unwrap();
        assert!((p - hf.values()[lin]).norm() < 1e-12);
    }
}
