//! Leading resonances of the coarse-grained channel: exact diagonalization
//! at small N next to Arnoldi, then Arnoldi alone at a larger N.
//!
//!     cargo run --release --example krylov_resonances -- 256

use otoc_torus::{
    build_kernel, dense_spectrum, krylov_leading, quantize, ClassicalMapSpec, CoarseGrainedMap, KrylovSeed,
    TorusSpace,
};

fn channel(n: usize, eps: f64) -> otoc_torus::Result<CoarseGrainedMap> {
    let space = TorusSpace::new(n)?;
    CoarseGrainedMap::new(quantize(&ClassicalMapSpec::cat(0.02), &space)?, build_kernel(&space, eps)?)
}

fn main() -> otoc_torus::Result<()> {
    let big: usize = std::env::args().nth(1).map_or(256, |s| s.parse().expect("N"));

    let small = channel(16, 10.0 / 16.0)?;
    let dense = dense_spectrum(&small)?.spectrum.nontrivial_moduli(5);
    let kry = krylov_leading(&small, &KrylovSeed::Random(1), 60, 8)?.nontrivial_moduli(5);
    println!("N=16  dense  {dense:.5?}");
    println!("N=16  krylov {kry:.5?}");

    let spectrum = krylov_leading(&channel(big, 0.1)?, &KrylovSeed::Position, 40, 6)?;
    println!("N={big} eps=0.1, seeded with X:");
    for (i, a) in spectrum.alphas.iter().enumerate() {
        println!(
            "  {i}: |alpha| = {:.5}  arg = {:+.4}  residual = {:.1e}",
            a.norm(),
            a.arg(),
            spectrum.residuals[i]
        );
    }
    Ok(())
}
