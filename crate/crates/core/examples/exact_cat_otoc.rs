//! OTOC of the unperturbed cat map against its closed form.
//!
//!     cargo run --release --example exact_cat_otoc -- 1024

use otoc_torus::otoc::analytic_cat_otoc;
use otoc_torus::{otoc_series, quantize, ClassicalMapSpec, OperatorChoice, TorusSpace};

fn main() -> otoc_torus::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(1024, |s| s.parse().expect("N"));
    let space = TorusSpace::new(n)?;
    let map = quantize(&ClassicalMapSpec::cat(0.0), &space)?;
    let (x, p) = OperatorChoice::XP.build(&space);
    let series = otoc_series(&map, &x, &p, 16, "XP")?;

    println!("{:>3} {:>6} {:>14} {:>14} {:>10} {:>14}", "t", "a_t%N", "C", "closed form", "error", "small-arg");
    for pt in &series.points {
        let exact = analytic_cat_otoc(pt.t, n);
        println!(
            "{:>3} {:>6} {:>14.6e} {:>14.6e} {:>10.1e} {:>14.6e}",
            pt.t,
            exact.a_mod_n,
            pt.c,
            exact.c,
            (pt.c - exact.c).abs(),
            exact.c_approx
        );
    }
    Ok(())
}
