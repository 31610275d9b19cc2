#![allow(dead_code)]

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use otoc_torus::C64;
use rand::Rng;

pub fn cis(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

pub fn max_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn eye(n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

/// `|q> -> |q+1>`.
pub fn shift(n: usize) -> Array2<C64> {
    let mut v = Array2::zeros((n, n));
    for q in 0..n {
        v[[(q + 1) % n, q]] = C64::new(1.0, 0.0);
    }
    v
}

/// `|q> -> e^{2 pi i q / N} |q>`.
pub fn clock(n: usize) -> Array2<C64> {
    let mut u = Array2::zeros((n, n));
    for q in 0..n {
        u[[q, q]] = cis(2.0 * PI * q as f64 / n as f64);
    }
    u
}

pub fn power(m: &Array2<C64>, k: usize) -> Array2<C64> {
    (0..k).fold(eye(m.nrows()), |acc, _| acc.dot(m))
}

/// `V^q U^p e^{i pi q p / N}` built by repeated matrix products.
pub fn weyl(n: usize, q: i64, p: i64) -> Array2<C64> {
    let nn = n as i64;
    let vq = power(&shift(n), q.rem_euclid(nn) as usize);
    let up = power(&clock(n), p.rem_euclid(nn) as usize);
    vq.dot(&up) * cis(PI * (q * p) as f64 / n as f64)
}

pub fn random_matrix<R: Rng>(n: usize, rng: &mut R) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
}

pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> Array2<C64> {
    let a = random_matrix(n, rng);
    (&a + &adjoint(&a)) * C64::new(0.5, 0.0)
}

pub fn random_traceless_hermitian<R: Rng>(n: usize, rng: &mut R) -> Array2<C64> {
    let mut a = random_hermitian(n, rng);
    let shift = trace(&a) / n as f64;
    for i in 0..n {
        a[[i, i]] -= shift;
    }
    a
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> Array1<C64> {
    let v = Array1::from_shape_fn(n, |_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v / C64::new(norm, 0.0)
}

pub fn hs_norm_sqr(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Largest Lyapunov exponent from a plain tangent-vector iteration with
/// analytic derivatives written out per map.
pub fn tangent_lyapunov(map: &str, k: f64, n_traj: usize, steps: usize, seed: u64) -> f64 {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let tp = 2.0 * PI;
    let mut total = 0.0;
    for _ in 0..n_traj {
        let (mut q, mut p): (f64, f64) = (rng.random(), rng.random());
        let (mut dq, mut dp) = (1.0f64, 0.3f64);
        let mut acc = 0.0;
        for t in 0..steps + 50 {
            let (p1, dp1, q1, dq1) = match map {
                "cat" => {
                    let p1 = p + q - tp * k * (tp * q).sin();
                    let dp1 = dp + dq * (1.0 - tp * tp * k * (tp * q).cos());
                    let q1 = q + p1 + tp * k * (tp * p1).sin();
                    let dq1 = dq + dp1 * (1.0 + tp * tp * k * (tp * p1).cos());
                    (p1, dp1, q1, dq1)
                }
                "standard" => {
                    let p1 = p + k / tp * (tp * q).sin();
                    let dp1 = dp + dq * k * (tp * q).cos();
                    (p1, dp1, q + p1, dq + dp1)
                }
                _ => {
                    let p1 = p - k * (tp * q).sin();
                    let dp1 = dp - dq * tp * k * (tp * q).cos();
                    let q1 = q + k * (tp * p1).sin();
                    let dq1 = dq + dp1 * tp * k * (tp * p1).cos();
                    (p1, dp1, q1, dq1)
                }
            };
            q = q1.rem_euclid(1.0);
            p = p1.rem_euclid(1.0);
            let norm = dq1.hypot(dp1);
            dq = dq1 / norm;
            dp = dp1 / norm;
            if t >= 50 {
                acc += norm.ln();
            }
        }
        total += acc / steps as f64;
    }
    total / n_traj as f64
}

/// Trapezoid average of `f(dq, dp)` over an isotropic Gaussian.
pub fn gaussian_mean(sigma: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    let m = 121;
    let h = 14.0 / (m - 1) as f64;
    let nodes: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let x = -7.0 + h * i as f64;
            (x * sigma, (-0.5 * x * x).exp())
        })
        .collect();
    let (mut acc, mut w) = (0.0, 0.0);
    for &(a, wa) in &nodes {
        for &(b, wb) in &nodes {
            acc += wa * wb * f(a, b);
            w += wa * wb;
        }
    }
    acc / w
}
