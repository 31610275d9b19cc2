//! Growth, saturation and exponential decay of the OTOC of a perturbed cat
//! map once a weak dephasing channel follows every step.
//!
//!     cargo run --release --example coarse_grained_decay -- 1024 0.01

use otoc_torus::otoc::fit_lyapunov_from_otoc;
use otoc_torus::{
    build_kernel, ehrenfest_time, fit_tail_rate, otoc_series, quantize, trim_tail_window, ClassicalMapSpec,
    CoarseGrainedMap, OperatorChoice, TorusSpace, LAMBDA_CAT,
};
use otoc_torus::resonances::TAIL_TRIM_LEVEL;

fn main() -> otoc_torus::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(1024, |s| s.parse().expect("N"));
    let eps: f64 = args.next().map_or(0.01, |s| s.parse().expect("epsilon"));
    let space = TorusSpace::new(n)?;
    let map = quantize(&ClassicalMapSpec::cat(0.02), &space)?;
    let kernel = build_kernel(&space, eps)?;
    println!("kernel variance per axis {:.3}", kernel.weight_variance());
    let channel = CoarseGrainedMap::new(map, kernel)?;
    let (x, p) = OperatorChoice::XP.build(&space);
    let series = otoc_series(&channel, &x, &p, 30, "XP")?;

    for pt in &series.points {
        println!("{:>3}  C = {:.5e}  |O1| = {:.5e}  O2 = {:.5e}", pt.t, pt.c, pt.o1.norm(), pt.o2);
    }
    let t_e = ehrenfest_time(n, LAMBDA_CAT)?;
    let growth = fit_lyapunov_from_otoc(&series, 1, 6)?;
    println!("t_E = {t_e:.2}; growth rate over [1,6]: {:.4} (R^2 {:.4})", growth.value, growth.r_squared);
    if let Some((a, b)) = trim_tail_window(&series, t_e.ceil() as usize + 2, 30, TAIL_TRIM_LEVEL) {
        let tail = fit_tail_rate(&series, a, b)?;
        println!("tail over [{a},{b}]: |alpha1| = {:.4} (R^2 {:.4})", tail.alpha, tail.r_squared);
    }
    Ok(())
}
