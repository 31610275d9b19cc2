//! Sweep of the dephasing strength through the runner. The fitted tail
//! rate levels off as epsilon grows; the plateau widens with N.
//!
//!     cargo run --release --example epsilon_sweep -- out/sweep

use std::path::PathBuf;

use otoc_torus::runner::{run_sweep, MapKind, RunConfig, SweepAxis};

fn main() -> otoc_torus::Result<()> {
    let outputs = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("epsilon_sweep"), PathBuf::from);
    let base = RunConfig {
        map: MapKind::Cat,
        n: 512,
        map_param: 0.02,
        t_max: 30,
        outputs,
        ..RunConfig::default()
    };
    let sweep = run_sweep(&base, &SweepAxis::Epsilon(vec![0.01, 0.02, 0.05, 0.1]))?;
    for e in &sweep.entries {
        match &e.result {
            Ok((_, Some(tail))) => println!("eps = {:<5} |alpha1| = {:.4}  [{}, {}]", e.value, tail.alpha, tail.start, tail.end),
            Ok((_, None)) => println!("eps = {:<5} no tail window", e.value),
            Err(msg) => println!("eps = {:<5} failed: {msg}", e.value),
        }
    }
    println!("summary in {}", sweep.output.dir.join("summary.csv").display());
    Ok(())
}
