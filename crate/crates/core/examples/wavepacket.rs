//! One quantum step of a coherent state versus the classical map.
//!
//! Prints, per map, the largest error between the quantum sine expectations
//! after one step and (a) the sine of the classically mapped centre, and
//! (b) the classical average over the initial Gaussian, in units of 1/N.
//!
//!     cargo run --release --example wavepacket -- 2048

use std::f64::consts::PI;

use otoc_torus::maps::{coherent_covariance, gaussian_state, sine_expectations};
use otoc_torus::{classical_step, quantize, ClassicalMapSpec, Direction, TorusSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> otoc_torus::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(2048, |s| s.parse().expect("N"));
    let space = TorusSpace::new(n)?;
    let sigma = (space.h_eff() / 2.0).sqrt();
    let maps = [
        ClassicalMapSpec::cat(0.02),
        ClassicalMapSpec::standard(19.74),
        ClassicalMapSpec::harper(0.94),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in maps {
        let u = quantize(&spec, &space)?;
        let (mut centre_err, mut cloud_err) = (0.0f64, 0.0f64);
        for _ in 0..8 {
            let (q0, p0) = (rng.random::<f64>(), rng.random::<f64>());
            let psi = gaussian_state(&space, q0, p0, coherent_covariance(&space));
            let (sq, sp) = sine_expectations(&space, &u.apply_state(&psi, Direction::Forward)?);

            let (q1, p1) = classical_step(&spec, (q0, p0));
            centre_err = centre_err
                .max((sq - (2.0 * PI * q1).sin()).abs())
                .max((sp - (2.0 * PI * p1).sin()).abs());

            let (aq, ap) = gaussian_average(&spec, q0, p0, sigma);
            cloud_err = cloud_err.max((sq - aq).abs()).max((sp - ap).abs());
        }
        println!(
            "{spec:<28} centre: {:8.2}/N   gaussian average: {:6.2}/N",
            centre_err * n as f64,
            cloud_err * n as f64
        );
    }
    Ok(())
}

/// Average of `(sin 2 pi q', sin 2 pi p')` over an isotropic Gaussian of
/// width `sigma` around `(q0, p0)`; trapezoid rule on +-7 sigma.
fn gaussian_average(spec: &ClassicalMapSpec, q0: f64, p0: f64, sigma: f64) -> (f64, f64) {
    let m = 121;
    let h = 14.0 / (m - 1) as f64;
    let nodes: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let x = -7.0 + h * i as f64;
            (x * sigma, (-0.5 * x * x).exp())
        })
        .collect();
    let (mut sq, mut sp, mut wsum) = (0.0, 0.0, 0.0);
    for &(dq, wq) in &nodes {
        for &(dp, wp) in &nodes {
            let (q, p) = classical_step(spec, (q0 + dq, p0 + dp));
            let w = wq * wp;
            sq += w * (2.0 * PI * q).sin();
            sp += w * (2.0 * PI * p).sin();
            wsum += w;
        }
    }
    (sq / wsum, sp / wsum)
}
