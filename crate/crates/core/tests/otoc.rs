mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use otoc_torus::otoc::{
    analytic_cat_otoc, commutator_otoc, fit_lyapunov_from_otoc, heisenberg_evolve, otoc_family_linear,
};
use otoc_torus::{
    cat_matrix_power, otoc_series, quantize, ClassicalMapSpec, OperatorChoice, OperatorMatrix, PhaseVector,
    TorusSpace, LAMBDA_CAT,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn xp_series(spec: ClassicalMapSpec, n: usize, t_max: usize) -> otoc_torus::OtocSeries {
    let s = TorusSpace::new(n).unwrap();
    let map = quantize(&spec, &s).unwrap();
    let (a, b) = OperatorChoice::XP.build(&s);
    otoc_series(&map, &a, &b, t_max, "XP").unwrap()
}

#[test]
fn unperturbed_cat_matches_closed_form() {
    for n in [256usize, 1024] {
        let series = xp_series(ClassicalMapSpec::cat(0.0), n, 12);
        for p in &series.points {
            let a = cat_matrix_power(p.t as u64).reduced(n as u64)[0][0] as f64;
            let x = PI * a / n as f64;
            assert!((p.c - x.sin().powi(2)).abs() < 1e-8, "N={n} t={}", p.t);
            assert!((p.o1.re - 0.25 * (2.0 * x).cos()).abs() < 1e-8);
            assert!(p.o1.im.abs() < 1e-8);
            assert!((p.o2 - 0.25).abs() < 1e-10);
            let closed = analytic_cat_otoc(p.t, n);
            assert_abs_diff_eq!(closed.c, x.sin().powi(2), epsilon = 1e-14);
        }
    }
}

#[test]
fn closed_form_examples() {
    let c0 = analytic_cat_otoc(0, 1024);
    assert_abs_diff_eq!(c0.c, (PI / 1024.0).sin().powi(2), epsilon = 1e-16);
    assert_eq!(analytic_cat_otoc(3, 1024).a_mod_n, 13);
    assert_eq!(analytic_cat_otoc(8, 1024).a_mod_n, 1597 % 1024);
    // a_t ~ (phi / sqrt 5) e^{lambda t}
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let small = analytic_cat_otoc(4, 1024);
    assert!((small.c / small.c_approx / (golden * golden / 5.0) - 1.0).abs() < 0.01);
}

#[test]
fn commutator_form_matches_trace_decomposition() {
    let n = 64;
    let s = TorusSpace::new(n).unwrap();
    for spec in [
        ClassicalMapSpec::cat(0.02),
        ClassicalMapSpec::standard(19.74),
        ClassicalMapSpec::harper(0.94),
    ] {
        let map = quantize(&spec, &s).unwrap();
        for choice in [
            OperatorChoice::XP,
            OperatorChoice::F {
                xi: PhaseVector::new(&s, 2, 5),
                chi: PhaseVector::new(&s, 3, 1),
            },
        ] {
            let (a, b) = choice.build(&s);
            let series = otoc_series(&map, &a, &b, 5, "x").unwrap();
            for p in &series.points {
                let at = heisenberg_evolve(&a, &map, p.t).unwrap();
                let direct = commutator_otoc(&at, &b).unwrap();
                assert!((direct - p.c).abs() < 1e-10, "{spec} {choice} t={}", p.t);
            }
        }
    }
}

#[test]
fn translation_family_closed_form() {
    let n = 32;
    let s = TorusSpace::new(n).unwrap();
    let spec = ClassicalMapSpec::cat(0.0);
    let map = quantize(&spec, &s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..6 {
        let xi = PhaseVector::new(&s, rng.random_range(0..32), rng.random_range(0..32));
        let chi = PhaseVector::new(&s, rng.random_range(0..32), rng.random_range(0..32));
        if xi.is_origin() || chi.is_origin() {
            continue;
        }
        let (a, b) = OperatorChoice::F { xi, chi }.build(&s);
        let series = otoc_series(&map, &a, &b, 6, "F").unwrap();
        for p in &series.points {
            let want = otoc_family_linear(&spec, &s, xi, chi, p.t).unwrap();
            assert!((p.c - want).abs() < 1e-10, "xi={xi} chi={chi} t={}", p.t);
        }
    }
    assert!(otoc_family_linear(
        &ClassicalMapSpec::cat(0.1),
        &s,
        PhaseVector::new(&s, 0, 1),
        PhaseVector::new(&s, 1, 0),
        1
    )
    .is_err());
}

#[test]
fn otoc_is_nonnegative_and_o2_constant_for_linear_cat() {
    let series = xp_series(ClassicalMapSpec::cat(0.0), 128, 40);
    let o2 = series.o2();
    for (p, v) in series.points.iter().zip(&o2) {
        assert!(p.c >= -1e-10);
        assert!((v - o2[0]).abs() < 1e-10);
    }
    let perturbed = xp_series(ClassicalMapSpec::standard(19.74), 128, 20);
    assert!(perturbed.points.iter().all(|p| p.c >= -1e-10));
}

#[test]
fn growth_and_saturation_k002() {
    let series = xp_series(ClassicalMapSpec::cat(0.02), 1024, 22);
    let mean = series.mean_c(11, 22).unwrap();
    assert!((mean - 0.5).abs() < 0.05, "mean {mean}");
    let c0 = series.points[0].c;
    // O1 - O2 = -C / 2 stays below the exponential envelope in the growth window
    for p in &series.points[1..=6] {
        let envelope = c0 * (2.0 * LAMBDA_CAT * p.t as f64).exp() / 2.0 * 1.1;
        assert!((p.o1.re - p.o2).abs() <= envelope, "t={}", p.t);
    }
}

#[test]
fn growth_fit_unperturbed() {
    let series = xp_series(ClassicalMapSpec::cat(0.0), 1024, 8);
    let fit = fit_lyapunov_from_otoc(&series, 1, 6).unwrap();
    assert!((fit.value / LAMBDA_CAT - 1.0).abs() < 0.03, "{}", fit.value);
    // the exact series gives the same number
    let exact: Vec<f64> = (1..=6).map(|t| analytic_cat_otoc(t, 1024).c.ln()).collect();
    let ts: Vec<f64> = (1..=6).map(|t| t as f64).collect();
    assert_abs_diff_eq!(fit.value, common::slope(&ts, &exact) / 2.0, epsilon = 1e-8);
}

#[test]
fn fit_recovers_synthetic_rate() {
    let mut series = xp_series(ClassicalMapSpec::cat(0.0), 16, 10);
    for p in series.points.iter_mut() {
        p.c = (2.0 * 0.5 * p.t as f64).exp();
    }
    let fit = fit_lyapunov_from_otoc(&series, 1, 8).unwrap();
    assert_abs_diff_eq!(fit.value, 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    assert!(fit_lyapunov_from_otoc(&series, 4, 3).is_err());
    assert!(fit_lyapunov_from_otoc(&series, 2, 11).is_err());
}

#[test]
fn non_hermitian_operators_are_rejected() {
    let s = TorusSpace::new(8).unwrap();
    let map = quantize(&ClassicalMapSpec::cat(0.0), &s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = OperatorMatrix::dense(common::random_matrix(8, &mut rng));
    let (x, _) = OperatorChoice::XP.build(&s);
    assert!(otoc_series(&map, &a, &x, 3, "bad").is_err());
    let wrong = OperatorMatrix::identity(9);
    assert!(otoc_series(&map, &x, &wrong, 3, "bad").is_err());
}

#[test]
fn commutator_reference_is_limited() {
    let big = OperatorMatrix::identity(65);
    assert!(commutator_otoc(&big, &big).is_err());
}
