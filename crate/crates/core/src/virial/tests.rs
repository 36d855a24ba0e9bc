use super::*;
use crate::clifford::Spinor;
use crate::explicit::{FnSource, ZeroMode3d, ZeroResonance2d};
use crate::potential::{parse, Profile};
use crate::radial::RadialSystem;
use core::f64::consts::PI;
use num_complex::Complex64;

fn radial(expr: &str, d: usize) -> PotentialSpec {
    PotentialSpec::radial(parse(expr).unwrap(), d, None).unwrap()
}

fn cartesian(expr: &str, d: usize) -> PotentialSpec {
    PotentialSpec::cartesian(parse(expr).unwrap(), d).unwrap()
}

fn sys(expr: &str, k: f64, lambda: f64) -> RadialSystem {
    RadialSystem::new(Profile::expr(parse(expr).unwrap(), crate::potential::Var::R).unwrap(), 3, k, lambda).unwrap()
}

#[test]
fn bounds_of_zero_mode_potential() {
    let b = virial_bounds(&radial("-3/(1+r^2)", 3), 10.0, 200).unwrap();
    assert!((b.lower + 3.0).abs() < 1e-6);
    assert!((b.upper - 0.375).abs() < 1e-6);
    assert!(crate::potential::norm(&b.argmin) < 1e-3);
    assert!((crate::potential::norm(&b.argmax) - 3f64.sqrt()).abs() < 1e-4);
    assert!(b.domain.cauchy);
    let tail = b.tail.unwrap();
    assert!(tail.lower > 0.0 && tail.upper < 0.375);
}

#[test]
fn bounds_of_constant_and_planar_potentials() {
    let b = virial_bounds(&PotentialSpec::constant(1.5, 2).unwrap(), 5.0, 16).unwrap();
    assert_eq!((b.lower, b.upper), (1.5, 1.5));
    let b = virial_bounds(&radial("-2/(1+r^2)", 2), 10.0, 200).unwrap();
    assert!((b.lower + 2.0).abs() < 1e-9);
    // v(t) = sin t + t cos t on [-2, 2]
    let k = crate::clifford::UnitVector::normalized(&[1.0, 1.0]).unwrap();
    let q = PotentialSpec::layered(parse("sin(t)").unwrap(), k).unwrap();
    let b = virial_bounds(&q, 2.0, 64).unwrap();
    // v' = 2 cos t - t sin t vanishes at t ≈ 1.0769
    let t = 1.076873986862;
    let vmax = t.sin() + t * t.cos();
    assert!((b.upper - vmax).abs() < 1e-9);
    assert!((b.lower + vmax).abs() < 1e-9);
}

#[test]
fn cartesian_search_matches_radial_search() {
    let b = virial_bounds(&cartesian("-3/(1+x1^2+x2^2+x3^2)", 3), 4.0, 8).unwrap();
    assert!((b.lower + 3.0).abs() < 1e-6, "{}", b.lower);
    assert!((b.upper - 0.375).abs() < 1e-6, "{}", b.upper);
    assert_eq!(b.domain.refinements.len(), 3);
}

#[test]
fn bounds_are_scale_invariant() {
    let q = cartesian("-2/(1+x1^2+2*x2^2)", 2);
    let qs = cartesian("-2/(1+(3*x1)^2+2*(3*x2)^2)", 2);
    let a = virial_bounds(&q, 9.0, 32).unwrap();
    let b = virial_bounds(&qs, 3.0, 32).unwrap();
    assert!((a.lower - b.lower).abs() < 1e-6);
    assert!((a.upper - b.upper).abs() < 1e-6);
}

#[test]
fn non_differentiable_potential_is_reported() {
    match virial_bounds(&cartesian("abs(x1)", 2), 1.0, 4) {
        Err(Error::NonDifferentiable { point }) => assert_eq!(point[0], 0.0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn virial_integral_of_zero_mode_vanishes() {
    let f = ZeroMode3d::new(Spinor::basis(4, 0).unwrap()).unwrap();
    let v = virial_integral(&f, &radial("-3/(1+r^2)", 3), f64::INFINITY, 1e-8).unwrap();
    assert!(v.abs() < 1e-6, "{v}");
}

#[test]
fn virial_integral_is_a_mean() {
    let f = ZeroResonance2d::new(Spinor::basis(2, 1).unwrap()).unwrap();
    let c = virial_integral(&f, &PotentialSpec::constant(0.7, 2).unwrap(), 30.0, 1e-10).unwrap();
    assert!((c - 0.7).abs() < 1e-10);
    let g = FnSource::new(2, |x: &[f64]| {
        let m = (-(x[0] - 0.5).powi(2) - x[1] * x[1]).exp();
        Spinor::from_slice(&[Complex64::new(m, 0.0), Complex64::new(0.0, 0.3 * m)])
    });
    let q = cartesian("cos(x1)*exp(-x2^2)", 2);
    let b = virial_bounds(&q, 6.0, 32).unwrap();
    let v = virial_integral(&g, &q, 6.0, 1e-8).unwrap();
    assert!(v >= b.lower - 1e-8 && v <= b.upper + 1e-8);
}

#[test]
fn free_discrete_spectrum_is_symmetric() {
    for n in [500, 4000] {
        let s = discrete_radial_eigenvalues(&sys("0", 1.0, 0.0), 40.0, n).unwrap();
        let v = s.values();
        let m = v.len();
        for i in 0..m {
            assert!((v[i] + v[m - 1 - i]).abs() < 1e-8, "n={n} i={i}");
        }
    }
}

#[test]
fn constant_profile_shifts_spectrum() {
    let a = discrete_radial_eigenvalues(&sys("0", 2.0, 0.0), 30.0, 600).unwrap().values();
    let b = discrete_radial_eigenvalues(&sys("1.25", 2.0, 0.0), 30.0, 600).unwrap().values();
    for (x, y) in a.iter().zip(&b) {
        assert!((y - x - 1.25).abs() < 1e-8);
    }
}

#[test]
fn interior_eigenvalues_respect_virial_bounds() {
    let s = discrete_radial_eigenvalues(&sys("-3/(1+r^2)", 1.0, 0.0), 60.0, 2000).unwrap();
    let interior: Vec<f64> = s.interior().map(|e| e.value).collect();
    for v in &interior {
        assert!(*v >= -3.05 && *v <= 0.425, "{v}");
    }
    assert!(s.eigenvalues.iter().any(|e| e.class == Localization::Boundary));
    // the zero mode lives in this channel
    assert!(interior.iter().any(|v| v.abs() < 1e-3), "{interior:?}");
}

#[test]
fn staggering_removes_doubled_modes() {
    let r = 20.0;
    let s = sys("0", 0.0, 0.0);
    let count = |v: &[f64]| v.iter().filter(|x| x.abs() < 1.0).count() as f64;
    let staggered = count(&discrete_radial_eigenvalues(&s, r, 200).unwrap().values());
    let collocated = count(&collocated_radial_eigenvalues(&s, r, 200).unwrap());
    // continuum density: 2R/π states per unit of λ
    let expected = 2.0 * r / PI;
    assert!((staggered - expected).abs() <= 2.0, "{staggered} vs {expected}");
    assert!(collocated >= 1.7 * staggered, "{collocated} vs {staggered}");
}

#[test]
fn probe_finds_no_square_integrable_solution() {
    for (expr, lambda) in [("5/(1+r)", 2.0), ("0", 0.5)] {
        let rep = l2_solution_probe(&sys(expr, 1.0, lambda), 1000.0, 1e-10).unwrap();
        assert_eq!(rep.verdict, L2Verdict::NoL2SolutionEvidence, "{expr}: {rep:?}");
        assert!(rep.growth_exponent > 0.9);
    }
}

#[test]
fn probe_does_not_exclude_the_zero_mode() {
    let verdicts: Vec<L2Verdict> = [1.0, -1.0]
        .iter()
        .map(|&k| l2_solution_probe(&sys("-3/(1+r^2)", k, 0.0), 1000.0, 1e-10).unwrap().verdict)
        .collect();
    assert!(verdicts.contains(&L2Verdict::PossibleEigenvalue), "{verdicts:?}");
}

