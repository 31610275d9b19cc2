mod common;

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use common::{adjoint, cis, max_diff, random_matrix, random_traceless_hermitian, weyl};
use ndarray::Array2;
use otoc_torus::coarse_grain::{apply_dephasing_chord, apply_dephasing_dense};
use otoc_torus::phase_space::translation;
use otoc_torus::{
    build_kernel, channel_step, otoc_series, quantize, ClassicalMapSpec, CoarseGrainedMap, OperatorChoice,
    OperatorMatrix, PhaseVector, TorusSpace, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn op(a: &Array2<C64>) -> OperatorMatrix {
    OperatorMatrix::dense(a.clone())
}

#[test]
fn kernel_invariants() {
    for (n, eps) in [(8, 0.3), (16, 0.05), (64, 0.01), (1024, 0.01), (1000, 0.1)] {
        let s = TorusSpace::new(n).unwrap();
        let k = build_kernel(&s, eps).unwrap();
        assert_abs_diff_eq!(k.c_weights.sum(), 1.0, epsilon = 1e-12);
        assert!(k.c_weights.iter().all(|&w| w >= -1e-12));
        assert!(k.clipped < 1e-10);
        assert_eq!(k.c_tilde[[0, 0]], 1.0);
        assert!(k.diag_chord.iter().all(|&d| (-1e-12..=1.0 + 1e-12).contains(&d)));
        assert_abs_diff_eq!(k.diag_chord[[0, 0]], 1.0, epsilon = 1e-12);
    }
}

#[test]
fn zero_strength_is_identity() {
    let s = TorusSpace::new(12).unwrap();
    let k = build_kernel(&s, 0.0).unwrap();
    assert!(k.is_identity());
    assert_abs_diff_eq!(k.c_weights[[0, 0]], 1.0, epsilon = 1e-14);
    assert!(k.diag_chord.iter().all(|d| (d - 1.0).abs() < 1e-12));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_matrix(12, &mut rng);
    assert!(max_diff(&apply_dephasing_chord(&k, &op(&a)).unwrap().to_dense(), &a) < 1e-12);
    assert!(build_kernel(&s, -0.1).is_err());
    assert!(build_kernel(&s, f64::NAN).is_err());
}

#[test]
fn chord_eigenvalues_from_direct_sum() {
    let n = 8;
    let s = TorusSpace::new(n).unwrap();
    let k = build_kernel(&s, 0.3).unwrap();
    for cq in 0..n {
        for cp in 0..n {
            let mut sum = C64::new(0.0, 0.0);
            for xq in 0..n {
                for xp in 0..n {
                    let sp = (xp * cq) as f64 - (xq * cp) as f64;
                    sum += k.c_weights[[xq, xp]] * cis(2.0 * PI * sp / n as f64);
                }
            }
            assert!(sum.im.abs() < 1e-12);
            assert!((sum.re - k.diag_chord[[cq, cp]]).abs() < 1e-12);
            // symmetric profile: the eigenvalue is the smoothing profile itself
            assert!((k.diag_chord[[cq, cp]] - k.c_tilde[[cp, cq]]).abs() < 1e-12);
        }
    }
}

#[test]
fn weight_variance_grows_linearly_with_strength() {
    // weights are modified Bessel functions I_xi(z) e^{-z}, z = eps N / (4 pi), variance z
    let n = 1024;
    let s = TorusSpace::new(n).unwrap();
    let mut prev = None;
    for eps in [0.005, 0.01, 0.02] {
        let v = build_kernel(&s, eps).unwrap().weight_variance();
        assert!((v / (eps * n as f64 / (4.0 * PI)) - 1.0).abs() < 1e-8, "eps={eps}: {v}");
        if let Some(p) = prev {
            assert_abs_diff_eq!(v / p, 2.0, epsilon = 1e-8);
        }
        prev = Some(v);
    }
}

#[test]
fn dense_sum_matches_translation_oracle() {
    let n = 8;
    let s = TorusSpace::new(n).unwrap();
    let k = build_kernel(&s, 0.4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random_matrix(n, &mut rng);
    let mut want = Array2::<C64>::zeros((n, n));
    for xq in 0..n {
        for xp in 0..n {
            let t = weyl(n, xq as i64, xp as i64);
            want = want + adjoint(&t).dot(&a).dot(&t) * C64::new(k.c_weights[[xq, xp]], 0.0);
        }
    }
    let got = apply_dephasing_dense(&k, &op(&a), false).unwrap().to_dense();
    assert!(max_diff(&got, &want) < 1e-12);
}

#[test]
fn dense_and_chord_dephasing_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [8, 16, 32] {
        let s = TorusSpace::new(n).unwrap();
        for eps in [0.01, 0.1, 0.5] {
            let k = build_kernel(&s, eps).unwrap();
            let a = op(&random_matrix(n, &mut rng));
            let d = apply_dephasing_dense(&k, &a, false).unwrap().to_dense();
            let c = apply_dephasing_chord(&k, &a).unwrap().to_dense();
            assert!(max_diff(&d, &c) < 1e-10, "N={n} eps={eps}");
        }
    }
}

#[test]
fn dense_sum_refuses_large_dimensions() {
    let s = TorusSpace::new(65).unwrap();
    let k = build_kernel(&s, 0.1).unwrap();
    assert!(apply_dephasing_dense(&k, &OperatorMatrix::identity(65), false).is_err());
}

#[test]
fn translations_are_eigenoperators() {
    let n = 16;
    let s = TorusSpace::new(n).unwrap();
    let k = build_kernel(&s, 0.2).unwrap();
    for (q, p) in [(0, 1), (3, 7), (15, 2)] {
        let t = translation(&s, PhaseVector::new(&s, q, p));
        let out = apply_dephasing_chord(&k, &t).unwrap().to_dense();
        let want = t.to_dense() * C64::new(k.diag_chord[[q as usize, p as usize]], 0.0);
        assert!(max_diff(&out, &want) < 1e-12);
    }
}

#[test]
fn trace_and_hermiticity_preserved() {
    let n = 32;
    let s = TorusSpace::new(n).unwrap();
    let k = build_kernel(&s, 0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..20 {
        let a = common::random_hermitian(n, &mut rng);
        let out = apply_dephasing_chord(&k, &op(&a)).unwrap().to_dense();
        assert!(max_diff(&out, &adjoint(&out)) < 1e-12);
        assert!((common::trace(&out) - common::trace(&a)).norm() < 1e-12);
    }
}

#[test]
fn channel_structure_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [8, 16, 33, 64] {
        let s = TorusSpace::new(n).unwrap();
        for spec in [
            ClassicalMapSpec::cat(0.02),
            ClassicalMapSpec::standard(19.74),
            ClassicalMapSpec::harper(0.94),
        ] {
            let map = quantize(&spec, &s).unwrap();
            for eps in [0.0, 0.01, 0.1, 1.0] {
                let k = build_kernel(&s, eps).unwrap();
                let id = channel_step(&map, &k, &OperatorMatrix::identity(n)).unwrap().to_dense();
                assert!(max_diff(&id, &common::eye(n)) < 1e-12, "{spec} N={n} eps={eps}");
                let a = random_traceless_hermitian(n, &mut rng);
                let before = common::hs_norm_sqr(&a);
                let after = common::hs_norm_sqr(&channel_step(&map, &k, &op(&a)).unwrap().to_dense());
                assert!(after <= before * (1.0 + 1e-10));
                if eps > 0.0 {
                    assert!(after < before * (1.0 - 1e-6), "{spec} N={n} eps={eps}");
                }
            }
        }
    }
}

#[test]
fn zero_strength_step_is_unitary_step() {
    let n = 16;
    let s = TorusSpace::new(n).unwrap();
    let map = quantize(&ClassicalMapSpec::standard(3.0), &s).unwrap();
    let k = build_kernel(&s, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let a = op(&random_matrix(n, &mut rng));
    let one = channel_step(&map, &k, &a).unwrap();
    let two = map.heisenberg(&a).unwrap();
    assert!(one.max_abs_diff(&two) < 1e-14);
}

#[test]
fn coarse_graining_makes_o2_decay() {
    let n = 1024;
    let s = TorusSpace::new(n).unwrap();
    let map = quantize(&ClassicalMapSpec::cat(0.02), &s).unwrap();
    let channel = CoarseGrainedMap::new(map, build_kernel(&s, 0.01).unwrap()).unwrap();
    let (a, b) = OperatorChoice::XP.build(&s);
    let series = otoc_series(&channel, &a, &b, 16, "XP").unwrap();
    let o1 = series.o1_abs();
    let o2 = series.o2();
    // envelope: running max over the future is non-increasing, and both fall by orders of magnitude
    let envelope = |v: &[f64], t: usize| v[t..].iter().cloned().fold(0.0, f64::max);
    for t in 9..16 {
        assert!(envelope(&o1, t + 1) <= envelope(&o1, t));
        assert!(envelope(&o2, t + 1) <= envelope(&o2, t));
    }
    assert!(o2[16] < 1e-3 * o2[0], "{}", o2[16]);
    assert!(o1[16] < 1e-3 * o1[0]);
}

#[test]
fn mismatched_dimensions_are_errors() {
    let s8 = TorusSpace::new(8).unwrap();
    let s9 = TorusSpace::new(9).unwrap();
    let map = quantize(&ClassicalMapSpec::cat(0.0), &s8).unwrap();
    let k9 = build_kernel(&s9, 0.1).unwrap();
    assert!(CoarseGrainedMap::new(map.clone(), k9.clone()).is_err());
    assert!(channel_step(&map, &build_kernel(&s8, 0.1).unwrap(), &OperatorMatrix::identity(9)).is_err());
    assert!(apply_dephasing_chord(&k9, &OperatorMatrix::identity(8)).is_err());
}
