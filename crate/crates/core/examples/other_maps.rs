//! Standard and Harper maps: tail decay of the OTOC under dephasing, in
//! both kick conventions. Both maps saturate within t_E of about 3 steps.
//!
//!     cargo run --release --example other_maps -- 512 0.05

use otoc_torus::resonances::TAIL_TRIM_LEVEL;
use otoc_torus::{
    build_kernel, fit_tail_rate, lyapunov, otoc_series, trim_tail_window, ClassicalMapSpec, CoarseGrainedMap,
    KickMode, OperatorChoice, QuantumMap, TorusSpace,
};

fn main() -> otoc_torus::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(512, |s| s.parse().expect("N"));
    let eps: f64 = args.next().map_or(0.05, |s| s.parse().expect("epsilon"));
    let space = TorusSpace::new(n)?;
    let (x, p) = OperatorChoice::XP.build(&space);

    for spec in [ClassicalMapSpec::standard(19.74), ClassicalMapSpec::harper(0.94)] {
        let lambda = lyapunov(&spec, 2000, 100, 3)?.lambda;
        let t_e = (n as f64).ln() / lambda;
        for mode in [KickMode::Correspondence, KickMode::AsPrinted] {
            let map = QuantumMap::new(&spec, &space, mode)?;
            let channel = CoarseGrainedMap::new(map, build_kernel(&space, eps)?)?;
            let series = otoc_series(&channel, &x, &p, 30, "XP")?;
            let tail = trim_tail_window(&series, t_e.ceil() as usize + 2, 30, TAIL_TRIM_LEVEL)
                .map(|(a, b)| fit_tail_rate(&series, a, b))
                .transpose()?;
            println!(
                "{spec:<22} {:<14} lambda = {lambda:.3}  t_E = {t_e:.2}  tail |alpha1| = {}",
                mode.name(),
                tail.map_or("none".into(), |f| format!("{:.4}", f.alpha))
            );
        }
    }
    Ok(())
}
