//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p diracspec --test acceptance`.

use std::collections::BTreeMap;
use std::error::Error;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dirac_spectra::clifford::{Spinor, UnitVector};
use dirac_spectra::explicit::{residual_norm_streaming, weighted_l2_norm_squared, GridSpec, LayeredSolution, ZeroMode3d, ZeroResonance2d};
use dirac_spectra::linalg::Mat2;
use dirac_spectra::potential::{parse, PotentialSpec, Profile, Var};
use dirac_spectra::radial::{boundedness_probe, bv_check, monodromy, RadialSystem, Trend};
use dirac_spectra::virial::{discrete_radial_eigenvalues, virial_bounds, virial_integral};
use dirac_spectra::weyl::{
    mass_ratio_analysis, schnol_residual, sequence_row, BumpKind, BumpProfile, Distortion, PlanarApproxSpec, SchnolOptions,
    SequenceRow, SingularSequenceReport, Smoothing, WeylOptions,
};
use dirac_spectra::Error as CoreError;

type Check = Result<(bool, String), Box<dyn Error>>;
type Criterion = (&'static str, fn() -> Check);

fn zero_mode_potential() -> PotentialSpec {
    PotentialSpec::radial(parse("-3/(1+r^2)").unwrap(), 3, None).unwrap()
}

fn profile(text: &str) -> Profile {
    Profile::expr(parse(text).unwrap(), Var::R).unwrap()
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn within_time(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e <= limit, format!("{:.1} s of {} s", e.as_secs_f64(), limit.as_secs()))
}

fn zero_mode_order() -> Check {
    let t = Instant::now();
    let f = ZeroMode3d::new(Spinor::basis(4, 0)?)?;
    let q = zero_mode_potential();
    let fine = residual_norm_streaming(&f, &q, 0.0, &GridSpec::new(3, 4.0, 0.025, 2)?)?;
    let coarse = residual_norm_streaming(&f, &q, 0.0, &GridSpec::new(3, 4.0, 0.05, 2)?)?;
    let ratio = coarse.sup / fine.sup;
    let (fast, time) = within_time(t, Duration::from_secs(30));
    Ok((
        (12.0..=20.0).contains(&ratio) && fast,
        format!("sup residual {:.3e} at h = 0.05, {:.3e} at h = 0.025, ratio {ratio:.2}; {time}", coarse.sup, fine.sup),
    ))
}

fn norms_and_resonance() -> Check {
    let t = Instant::now();
    let f = ZeroMode3d::new(Spinor::basis(4, 0)?)?;
    let n2 = weighted_l2_norm_squared(&f, 0.0, f64::INFINITY, 1e-12)?;
    let psi = ZeroResonance2d::new(Spinor::basis(2, 0)?)?;
    let radii = [1e2, 1e3, 1e4, 1e5];
    let mut mass = Vec::new();
    for r in radii {
        mass.push(weighted_l2_norm_squared(&psi, 0.0, r, 1e-10)?);
    }
    let lx: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let slope = fit_slope(&lx, &mass);
    // ∫ 2πr (1+r²)^{-3/2} dr = 2π(1 - (1+R²)^{-1/2})
    let weighted: Vec<f64> = radii.iter().map(|&r| weighted_l2_norm_squared(&psi, 0.5, r, 1e-10)).collect::<Result<_, _>>()?;
    let limit = weighted_l2_norm_squared(&psi, 0.5, f64::INFINITY, 1e-10)?;
    let increments_shrink = weighted.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>().windows(2).all(|d| d[1] < d[0]);
    let converges = (limit - 2.0 * PI).abs() < 1e-8 && (limit - weighted[3]).abs() < 1e-4 && increments_shrink;
    let norm_ok = (n2 - PI * PI).abs() <= 1e-6;
    let slope_ok = (slope / (2.0 * PI) - 1.0).abs() <= 0.01;
    let (fast, time) = within_time(t, Duration::from_secs(10));
    Ok((
        norm_ok && slope_ok && converges && fast,
        format!(
            "|f|^2 - pi^2 = {:.1e}; mass slope {slope:.5} vs 2pi; weighted norm^2 {:.10} at 1e5, {limit:.10} at infinity; {time}",
            n2 - PI * PI,
            weighted[3]
        ),
    ))
}

fn periodic_system(k: f64, lambda: f64) -> Result<RadialSystem, CoreError> {
    RadialSystem::new(profile("sin(2*pi*r)"), 3, k, lambda)?.with_period(1.0)
}

fn monodromy_closed_form() -> Check {
    let t = Instant::now();
    let (mut dev, mut det) = (0.0f64, 0.0f64);
    for lambda in [0.3, 0.7, 2.5] {
        let m = monodromy(&periodic_system(0.0, lambda)?, 1, 1e-12)?;
        let closed = Mat2([[lambda.cos(), lambda.sin()], [-lambda.sin(), lambda.cos()]]);
        dev = dev.max((m.transfer.m - closed).norm());
        det = det.max((m.transfer.det() - 1.0).abs());
    }
    let (fast, time) = within_time(t, Duration::from_secs(5));
    Ok((dev <= 1e-8 && det <= 1e-10 && fast, format!("max deviation {dev:.2e}, max |det - 1| {det:.2e}; {time}")))
}

fn monodromy_deviation() -> Check {
    let t = Instant::now();
    let sys = periodic_system(1.0, 0.7)?;
    let free = Mat2([[0.7f64.cos(), 0.7f64.sin()], [-0.7f64.sin(), 0.7f64.cos()]]);
    let (mut worst, mut failures) = (f64::NEG_INFINITY, Vec::new());
    for j in 2..=200usize {
        let m = monodromy(&sys, j, 1e-12)?;
        let bound = 1.0 / (j - 1) as f64;
        let excess = (m.transfer.m - free).norm() - bound;
        worst = worst.max(excess);
        if excess > 1e-6 {
            failures.push(j);
        }
    }
    let (fast, time) = within_time(t, Duration::from_secs(60));
    Ok((failures.is_empty() && fast, format!("max of deviation - bound over j = 2..200: {worst:.3e}; violations {failures:?}; {time}")))
}

fn mid_band_boundedness() -> Check {
    let t = Instant::now();
    let rep = boundedness_probe(&periodic_system(1.0, 0.4 * PI)?, 1e4, 1e-9)?;
    let (fast, time) = within_time(t, Duration::from_secs(120));
    let disc = rep.last_period.map_or(f64::NAN, |d| d.discriminant);
    Ok((
        rep.growth_exponent <= 0.05 && fast,
        format!("growth exponent {:.4} over {} windows, last discriminant {disc:.4}; {time}", rep.growth_exponent, rep.windows.len()),
    ))
}

fn bv_dichotomy() -> Check {
    let (lambda, r0, big_r) = (1.5, 2.0, 1e4);
    let flat = bv_check(&profile("0.5"), lambda, r0, big_r)?;
    // g(r) = 1/(r(λ - c) - 1) decreases to 0, so TV on [r0, ∞) is g(r0)
    let closed = 1.0 / (r0 * (lambda - 0.5) - 1.0);
    let flat_ok = flat.trend == Trend::Converging && (flat.tv / closed - 1.0).abs() <= 0.01;
    let periodic = bv_check(&profile("sin(2*pi*r)"), 5.0, 1.0, 2048.0)?;
    let periodic_ok = periodic.log_r_squared >= 0.99 && periodic.trend == Trend::LogDivergent;
    Ok((
        flat_ok && periodic_ok,
        format!(
            "constant: TV {:.6} vs {closed:.6} ({:?}); periodic: slope {:.4}, R^2 {:.5} ({:?})",
            flat.tv, flat.trend, periodic.log_slope, periodic.log_r_squared, periodic.trend
        ),
    ))
}

fn weyl_rows(dim: usize, direction: &[f64], lambdas: &[f64], distortion: Option<&Distortion>) -> Result<Vec<SingularSequenceReport>, CoreError> {
    let q = PotentialSpec::layered(parse("sin(t)")?, UnitVector::normalized(direction)?)?;
    let spec = PlanarApproxSpec::from_layered(&q, &[1, 2, 3, 4], Smoothing::None)?;
    let opts = WeylOptions::new(BumpProfile::new(BumpKind::Exp, dim)?, 0.05);
    lambdas
        .iter()
        .map(|&lambda| {
            let rows = spec
                .elements()
                .iter()
                .map(|e| sequence_row(e, dim, Smoothing::None, distortion, &q, lambda, &opts))
                .collect::<Result<Vec<SequenceRow>, _>>()?;
            Ok(SingularSequenceReport { lambda, rows })
        })
        .collect()
}

fn describe(reps: &[SingularSequenceReport]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for rep in reps {
        let radii: Vec<f64> = rep.rows.iter().map(|r| r.r_n).collect();
        let slope = rep.residual_slope().unwrap_or(f64::NAN);
        ok &= radii == [8.0, 16.0, 32.0, 64.0] && rep.bounds_hold() && (-1.1..=-0.9).contains(&slope);
        parts.push(format!("lambda {}: slope {slope:.4}, bounds {}", rep.lambda, rep.bounds_hold()));
    }
    (ok, parts.join("; "))
}

fn weyl_decay() -> Check {
    let lambdas = [0.37, 5.0];
    let t = Instant::now();
    let (ok3, d3) = describe(&weyl_rows(3, &[1.0, 2.0, 2.0], &lambdas, None)?);
    let (fast3, time3) = within_time(t, Duration::from_secs(600));

    let t = Instant::now();
    let bent = weyl_rows(3, &[1.0, 2.0, 2.0], &lambdas, Some(&Distortion::Quadratic { exponent: 1.5 }))?;
    let (fast_bent, time_bent) = within_time(t, Duration::from_secs(600));
    let mut t3_ok = true;
    let mut t3_text = Vec::new();
    for rep in &bent {
        let t3: Vec<f64> = rep.rows.iter().map(|r| r.t3).collect();
        let lr: Vec<f64> = rep.rows.iter().map(|r| r.r_n.ln()).collect();
        // |∇φ_n| ≤ 2 r_n^{-1/2} on the support, so T3 = O(r_n^{-1/2})
        let slope = fit_slope(&lr, &t3.iter().map(|v| v.ln()).collect::<Vec<_>>());
        t3_ok &= t3.windows(2).all(|w| w[1] < w[0]) && slope < -0.4 && rep.bounds_hold();
        t3_text.push(format!("lambda {}: T3 {:.3} -> {:.3}, slope {slope:.3}", rep.lambda, t3[0], t3[t3.len() - 1]));
    }

    let t = Instant::now();
    let (ok2, d2) = describe(&weyl_rows(2, &[3.0, 4.0], &lambdas, None)?);
    let (fast2, time2) = within_time(t, Duration::from_secs(60));
    Ok((
        ok3 && fast3 && t3_ok && fast_bent && ok2 && fast2,
        format!(
            "d = 3 {d3} ({time3}); distorted {} ({time_bent}); d = 2 {d2} ({time2})",
            t3_text.join(", ")
        ),
    ))
}

fn schnol() -> Check {
    // |f| ≡ 1: M(n) = (4π/3)n³, so n²·ratio = 7
    let q = PotentialSpec::layered(parse("sin(t)")?, UnitVector::normalized(&[1.0, 2.0, 2.0])?)?;
    let flat = LayeredSolution::for_box(0.7, &q, 200.0, 0.005, 1e-12)?;
    let ratio = mass_ratio_analysis(&flat, &[8, 16, 32, 64], 1e-8)?;
    let worst = ratio.rows.iter().map(|r| ((r.n as f64).powi(2) * r.ratio / 7.0 - 1.0).abs()).fold(0.0, f64::max);
    let f = ZeroMode3d::new(Spinor::basis(4, 0)?)?;
    let n_list = [8, 16, 32, 64, 128];
    let rep = schnol_residual(&f, &zero_mode_potential(), 0.0, &n_list, &SchnolOptions::new(1e-10))?;
    let slope = rep.residual_slope().unwrap_or(f64::NAN);
    Ok((
        worst <= 0.01 && (-1.1..=-0.9).contains(&slope),
        format!("|f| = 1: max relative error of n^2 ratio vs 7 = {worst:.2e}; zero mode residual slope {slope:.4}"),
    ))
}

fn virial() -> Check {
    let q = zero_mode_potential();
    // v = (3r² - 3)/(1+r²)²: -3 at r = 0, 3/8 at r² = 3
    let b = virial_bounds(&q, 10.0, 200)?;
    let f = ZeroMode3d::new(Spinor::basis(4, 0)?)?;
    let integral = virial_integral(&f, &q, f64::INFINITY, 1e-10)?;
    let ok = (b.lower + 3.0).abs() <= 1e-6 && (b.upper - 0.375).abs() <= 1e-6 && integral.abs() <= 1e-6 && b.lower <= 0.0 && 0.0 <= b.upper;
    Ok((ok, format!("[m, M] = [{:.9}, {:.9}], virial integral {integral:.2e}", b.lower, b.upper)))
}

fn discrete() -> Check {
    let (r, n) = (60.0, 2000);
    let free = discrete_radial_eigenvalues(&RadialSystem::new(Profile::constant(0.0), 3, 1.0, 0.0)?, r, n)?.values();
    let asym = free.iter().zip(free.iter().rev()).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
    let c = 0.7;
    let shifted = discrete_radial_eigenvalues(&RadialSystem::new(Profile::constant(c), 3, 1.0, 0.0)?, r, n)?.values();
    let shift = free.iter().zip(&shifted).map(|(a, b)| (b - a - c).abs()).fold(0.0, f64::max);
    let well = discrete_radial_eigenvalues(&RadialSystem::new(profile("-3/(1+r^2)"), 3, 1.0, 0.0)?, r, n)?;
    let b = virial_bounds(&zero_mode_potential(), 10.0, 200)?;
    let interior: Vec<f64> = well.interior().map(|e| e.value).collect();
    let inside = interior.iter().all(|&v| v >= b.lower - 0.05 && v <= b.upper + 0.05);
    Ok((
        asym <= 1e-8 && shift <= 1e-8 && inside && free.len() == shifted.len(),
        format!("symmetry defect {asym:.1e}, shift defect {shift:.1e}, {} interior eigenvalues {interior:.4?}", interior.len()),
    ))
}

const CORPUS: [&str; 20] = [
    "-3/(1+x1^2+x2^2+x3^2)",
    "x1*x2 - x3",
    "sin(x1)*cos(x2)",
    "exp(-(x1^2+x2^2+x3^2))",
    "sqrt(1+x1^2+x2^2)",
    "log(2+sin(x3))",
    "x1^3 - 2*x2^2*x3",
    "1/(3+cos(x1*x2))",
    "exp(x1/4)*sin(2*pi*x2)",
    "(1+x1^2)^-1.5",
    "cos(x1+x2+x3)^2",
    "x2*exp(-x1^2)/(1+x3^2)",
    "sin(sqrt(2+x1^2+x3^2))",
    "2^x1 + x2^2",
    "abs(x1)+abs(x2) + 5",
    "-(x1-1)^4/(2+x2^2)",
    "log(1+x1^2+x2^2+x3^2)",
    "sin(x1)^2+cos(x1)^2",
    "(2+x3)^(1+x1^2/10)",
    "pi*x1 - exp(cos(x2)) + 1e-3*x3^5",
];

fn dsl() -> Check {
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut fixpoint = true;
    for text in CORPUS {
        let e = parse(text)?;
        let printed = e.to_string();
        let again = parse(&printed)?;
        fixpoint &= again == e && again.to_string() == printed;
        let q = PotentialSpec::cartesian(e, 3)?;
        for i in 1..=40 {
            // quasi-random points in [-1.5, 1.5]³ off the kinks of abs
            let mut x = [0.0; 3];
            for (j, s) in [2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt()].iter().enumerate() {
                x[j] = 3.0 * ((i as f64 * s).fract() - 0.5);
                if x[j].abs() < 0.05 {
                    x[j] += 0.1;
                }
            }
            let g = q.grad(&x)?;
            let (mut err, mut scale) = (0.0f64, 0.0f64);
            for k in 0..3 {
                let (mut xp, mut xm) = (x, x);
                xp[k] += h;
                xm[k] -= h;
                let fd = (q.eval(&xp)? - q.eval(&xm)?) / (2.0 * h);
                err = err.max((fd - g.grad[k]).abs());
                scale = scale.max(fd.abs());
            }
            worst = worst.max(err / scale.max(1.0));
        }
    }
    let malformed: [(&str, usize); 6] = [("1+*2", 2), ("sin(x1", 6), ("2*)", 2), ("foo(x1)", 0), ("x1 $ 2", 3), ("x1 + x9", 5)];
    let mut positioned = true;
    let mut seen = Vec::new();
    for (text, want) in malformed {
        let at = match parse(text) {
            Err(CoreError::Syntax { offset, .. }) | Err(CoreError::UnknownIdentifier { offset, .. }) => Some(offset),
            _ => None,
        };
        positioned &= at == Some(want);
        seen.push(format!("{text:?}@{at:?}"));
    }
    Ok((
        worst <= 1e-6 && fixpoint && positioned,
        format!("worst relative gradient error {worst:.2e}; fixpoint {fixpoint}; errors {}", seen.join(" ")),
    ))
}

fn outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn determinism() -> Check {
    let runs: [&[&str]; 6] = [
        &["weyl-planar", "--q", "sin(t)", "--dim", "2", "--n-list", "1,2"],
        &["monodromy", "--eta", "sin(2*pi*r)", "--k", "1", "--j", "2,5,50", "--lambda", "0.3,0.7,2.5"],
        &["boundedness", "--eta", "sin(2*pi*r)", "--lambda", "1.2566370614359172,3.0", "--r-max", "200"],
        &["radial-eig", "--eta", "-3/(1+r^2)", "--R", "30", "--N", "400"],
        &["virial", "--q", "-3/(1+r^2)", "--density", "50", "--integral", "zero-mode"],
        &["mass-ratio", "--n-list", "4,8,16"],
    ];
    let mut differing = Vec::new();
    for args in runs {
        for format in ["csv", "json"] {
            let mut seen = Vec::new();
            for threads in ["1", "4", "4"] {
                let dir = tempfile::tempdir()?;
                let out = Command::new(env!("CARGO_BIN_EXE_diracspec"))
                    .args(args)
                    .args(["--threads", threads, "--format", format, "--out-dir"])
                    .arg(dir.path())
                    .env_remove("DIRACSPEC_OUT")
                    .output()?;
                if !out.status.success() {
                    return Ok((false, format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))));
                }
                seen.push(outputs(dir.path()));
            }
            if seen.iter().any(|s| s != &seen[0] || s.is_empty()) {
                differing.push(format!("{} {format}", args[0]));
            }
        }
    }
    Ok((differing.is_empty(), format!("{} runs compared at 1, 4, 4 threads; differing {differing:?}", runs.len() * 2)))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("zero mode fourth-order residual", zero_mode_order),
        ("zero mode norm and 2D resonance mass", norms_and_resonance),
        ("free monodromy closed form", monodromy_closed_form),
        ("monodromy deviation bound", monodromy_deviation),
        ("mid-band boundedness", mid_band_boundedness),
        ("BV dichotomy", bv_dichotomy),
        ("Weyl residual decay", weyl_decay),
        ("Schnol mass ratio and residual", schnol),
        ("virial bounds and integral", virial),
        ("discrete radial operator", discrete),
        ("potential language", dsl),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (title, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        let t = Instant::now();
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".into()),
        };
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {n:>2} {verdict} {title} [{:.1} s]: {detail}", t.elapsed().as_secs_f64());
        if !pass {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
