//! Classical diagnostics: Lyapunov exponents, powers of the cat monodromy
//! matrix and the Ehrenfest time.

use log::warn;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maps::{classical_step, jacobian, ClassicalMapSpec};

/// `ln((3 + sqrt 5) / 2)`, the Lyapunov exponent of the unperturbed cat map.
pub const LAMBDA_CAT: f64 = 0.962_423_650_119_206_9;

/// Steps discarded before accumulating growth, so the tangent vector aligns
/// with the unstable direction.
pub const LYAPUNOV_BURN_IN: usize = 32;

const FIXED_POINT_TOL: f64 = 1e-12;
const MAX_RESAMPLES: usize = 1000;

/// Exact `M^t` for `M = [[2, 1], [1, 1]]`, entries `[[a, b], [c, d]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonodromyPower {
    pub t: u64,
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl MonodromyPower {
    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// Entries reduced into `[0, n)`.
    pub fn reduced(&self, n: u64) -> [[u64; 2]; 2] {
        let m = BigInt::from(n);
        let r = |x: &BigInt| {
            let v = ((x % &m) + &m) % &m;
            v.to_u64().expect("reduced entry fits in u64")
        };
        [[r(&self.a), r(&self.b)], [r(&self.c), r(&self.d)]]
    }

    /// `ln(a_t)`, usable when `a_t` overflows `f64`.
    pub fn ln_a(&self) -> f64 {
        let bits = self.a.bits();
        if bits < 1000 {
            self.a.to_f64().unwrap().ln()
        } else {
            let shift = bits - 64;
            let top = (&self.a >> shift).to_f64().unwrap();
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

pub fn cat_matrix_power(t: u64) -> MonodromyPower {
    let (mut a, mut b, mut c, mut d) = (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one());
    for _ in 0..t {
        // [[a, b], [c, d]] * [[2, 1], [1, 1]]
        let (na, nb) = (&a * 2 + &b, &a + &b);
        let (nc, nd) = (&c * 2 + &d, &c + &d);
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
    MonodromyPower { t, a, b, c, d }
}

/// `M^t mod n` for any integer `t` (negative powers use `M^{-1} = [[1,-1],[-1,2]]`).
pub fn monodromy_power_mod(t: i64, n: u64) -> [[i64; 2]; 2] {
    let n = n as i128;
    let base: [[i128; 2]; 2] = if t >= 0 { [[2, 1], [1, 1]] } else { [[1, -1], [-1, 2]] };
    let mul = |x: [[i128; 2]; 2], y: [[i128; 2]; 2]| {
        let mut z = [[0i128; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                z[i][j] = (x[i][0] * y[0][j] + x[i][1] * y[1][j]).rem_euclid(n);
            }
        }
        z
    };
    let mut result = [[1 % n, 0], [0, 1 % n]];
    let mut b = [[base[0][0].rem_euclid(n), base[0][1].rem_euclid(n)], [base[1][0].rem_euclid(n), base[1][1].rem_euclid(n)]];
    let mut e = t.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            result = mul(result, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    [[result[0][0] as i64, result[0][1] as i64], [result[1][0] as i64, result[1][1] as i64]]
}

pub fn ehrenfest_time(n: usize, lambda: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!("Lyapunov exponent must be positive, got {lambda}")));
    }
    Ok((n as f64).ln() / lambda)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    /// Mean of the per-trajectory rates.
    pub lambda: f64,
    /// `(1/t) ln <exp(t lambda_i)>`: growth factors averaged before the log.
    pub lambda_generalized: f64,
    pub n_trajectories: usize,
    pub t_horizon: usize,
    pub standard_error: f64,
    /// Initial points redrawn because they hit a fixed point.
    pub resampled: usize,
}

fn trajectory_rate(spec: &ClassicalMapSpec, t_horizon: usize, rng: &mut ChaCha8Rng) -> (f64, usize) {
    let mut resampled = 0;
    'draw: loop {
        let mut x = (rng.random::<f64>(), rng.random::<f64>());
        let mut v = [1.0, 0.0];
        let mut log_growth = 0.0;
        for step in 0..LYAPUNOV_BURN_IN + t_horizon {
            let next = classical_step(spec, x);
            let dq = crate::maps::circle_delta(next.0, x.0);
            let dp = crate::maps::circle_delta(next.1, x.1);
            if dq.hypot(dp) < FIXED_POINT_TOL && resampled < MAX_RESAMPLES {
                resampled += 1;
                continue 'draw;
            }
            let w = jacobian(spec, x).apply(v);
            let norm = w[0].hypot(w[1]);
            v = [w[0] / norm, w[1] / norm];
            if step >= LYAPUNOV_BURN_IN {
                log_growth += norm.ln();
            }
            x = next;
        }
        return (log_growth / t_horizon as f64, resampled);
    }
}

/// Largest Lyapunov exponent from tangent-vector renormalization over
/// `n_traj` uniformly drawn initial points.
///
/// Trajectory `i` draws from stream `i` of a ChaCha8 generator seeded with
/// `seed`, so the result does not depend on scheduling.
pub fn lyapunov(spec: &ClassicalMapSpec, n_traj: usize, t_horizon: usize, seed: u64) -> Result<LyapunovEstimate> {
    spec.validate()?;
    if t_horizon < 10 {
        return Err(Error::InvalidParameter(format!("t_horizon must be >= 10, got {t_horizon}")));
    }
    if n_traj == 0 {
        return Err(Error::InvalidParameter("n_traj must be positive".into()));
    }
    let runs: Vec<(f64, usize)> = (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            trajectory_rate(spec, t_horizon, &mut rng)
        })
        .collect();
    let nf = n_traj as f64;
    let tf = t_horizon as f64;
    let lambda = runs.iter().map(|r| r.0).sum::<f64>() / nf;
    let var = if n_traj > 1 {
        runs.iter().map(|r| (r.0 - lambda).powi(2)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    let standard_error = (var / nf).sqrt();
    let peak = runs.iter().map(|r| tf * r.0).fold(f64::NEG_INFINITY, f64::max);
    let lse = peak + (runs.iter().map(|r| (tf * r.0 - peak).exp()).sum::<f64>() / nf).ln();
    let resampled = runs.iter().map(|r| r.1).sum();
    if standard_error > 0.05 * lambda.abs() {
        warn!("Lyapunov estimate for {spec}: standard error {standard_error:.3e} exceeds 5% of lambda = {lambda:.4}");
    }
    Ok(LyapunovEstimate {
        lambda,
        lambda_generalized: lse / tf,
        n_trajectories: n_traj,
        t_horizon,
        standard_error,
        resampled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_powers() {
        let m0 = cat_matrix_power(0);
        assert_eq!((m0.a, m0.b, m0.c, m0.d), (1.into(), 0.into(), 0.into(), 1.into()));
        let m1 = cat_matrix_power(1);
        assert_eq!((m1.a, m1.b, m1.c, m1.d), (2.into(), 1.into(), 1.into(), 1.into()));
        let a: Vec<BigInt> = (2..5).map(|t| cat_matrix_power(t).a).collect();
        assert_eq!(a, vec![5.into(), 13.into(), 34.into()]);
    }

    #[test]
    fn determinant_and_trace_recurrence() {
        let mut prev = cat_matrix_power(0).a;
        let mut cur = cat_matrix_power(1).a;
        for t in 2..200u64 {
            let m = cat_matrix_power(t);
            assert!(m.det().is_one());
            assert_eq!(m.a, &cur * 3 - &prev);
            prev = cur;
            cur = m.a;
        }
    }

    #[test]
    fn modular_power_agrees_with_exact() {
        for n in [2u64, 7, 64, 1000, 1024] {
            for t in 0..40i64 {
                let exact = cat_matrix_power(t as u64).reduced(n);
                let fast = monodromy_power_mod(t, n);
                for i in 0..2 {
                    for j in 0..2 {
                        assert_eq!(exact[i][j] as i64, fast[i][j]);
                    }
                }
                let inv = monodromy_power_mod(-t, n);
                let mut prod = [[0i64; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        prod[i][j] = (fast[i][0] * inv[0][j] + fast[i][1] * inv[1][j]).rem_euclid(n as i64);
                    }
                }
                assert_eq!(prod, [[1 % n as i64, 0], [0, 1 % n as i64]]);
            }
        }
    }

    #[test]
    fn a_t_grows_at_lambda() {
        // a_t = F_{2t+1} ~ phi^{2t+1} / sqrt 5, so ln(a_t)/t carries a -0.32/t offset
        let offset = (0.5 * (1.0 + 5f64.sqrt()) / 5f64.sqrt()).ln();
        for t in 5..=40u64 {
            let m = cat_matrix_power(t);
            let rate = m.ln_a() / t as f64;
            assert!((rate - LAMBDA_CAT - offset / t as f64).abs() < 1e-3);
            if t >= 7 {
                assert!((rate - LAMBDA_CAT).abs() < 0.05);
            }
        }
        assert!((LAMBDA_CAT - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn ehrenfest_examples() {
        assert!((ehrenfest_time(1024, 0.9624).unwrap() - 7.20).abs() < 0.005);
        assert!((ehrenfest_time(1000, 0.9624).unwrap() - 7.18).abs() < 0.005);
        assert!(ehrenfest_time(1024, 0.0).is_err());
        assert!(ehrenfest_time(1, 1.0).is_err());
        let lam = 3f64.ln();
        assert!((ehrenfest_time(3, lam).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cat_rate_is_exact() {
        for seed in [0, 1, 99] {
            let est = lyapunov(&ClassicalMapSpec::cat(0.0), 64, 50, seed).unwrap();
            assert!((est.lambda - LAMBDA_CAT).abs() < 1e-6, "{}", est.lambda);
            assert!(est.lambda_generalized >= est.lambda - 1e-12);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = ClassicalMapSpec::standard(5.0);
        let a = lyapunov(&spec, 50, 40, 7).unwrap();
        let b = lyapunov(&spec, 50, 40, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_short_horizon() {
        assert!(lyapunov(&ClassicalMapSpec::cat(0.0), 10, 5, 0).is_err());
    }
}
