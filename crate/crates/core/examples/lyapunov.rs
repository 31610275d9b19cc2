//! Classical Lyapunov exponents and Ehrenfest times for the three maps.
//!
//!     cargo run --release --example lyapunov

use otoc_torus::{ehrenfest_time, lyapunov, ClassicalMapSpec, LAMBDA_CAT};

fn main() -> otoc_torus::Result<()> {
    println!("exact cat rate ln((3 + sqrt 5) / 2) = {LAMBDA_CAT:.9}");
    for spec in [
        ClassicalMapSpec::cat(0.0),
        ClassicalMapSpec::cat(0.02),
        ClassicalMapSpec::standard(19.74),
        ClassicalMapSpec::harper(0.94),
    ] {
        let est = lyapunov(&spec, 4000, 200, 1)?;
        println!(
            "{spec:<28} lambda = {:.5} +- {:.1e}   generalized = {:.5}   t_E(N=1024) = {:.2}",
            est.lambda,
            est.standard_error,
            est.lambda_generalized,
            ehrenfest_time(1024, est.lambda)?
        );
    }
    Ok(())
}
