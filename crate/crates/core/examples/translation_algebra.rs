//! Phase-space translations on the discrete torus: composition phases,
//! orthogonality, and the chord expansion of an operator.
//!
//!     cargo run --release --example translation_algebra -- 7

use otoc_torus::phase_space::{
    chord_transform, inverse_chord_transform, sine_position, symplectic_product_lifted, translation_lifted,
};
use otoc_torus::{TorusSpace, C64};

fn main() -> otoc_torus::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(7, |s| s.parse().expect("N"));
    let space = TorusSpace::new(n)?;
    let ni = n as i64;

    let mut worst: f64 = 0.0;
    for a in 0..ni * ni {
        let xi = (a / ni, a % ni);
        let tx = translation_lifted(&space, xi.0, xi.1);
        for b in 0..ni * ni {
            let chi = (b / ni, b % ni);
            let lhs = tx.to_dense().dot(&translation_lifted(&space, chi.0, chi.1).to_dense());
            let rhs = translation_lifted(&space, xi.0 + chi.0, xi.1 + chi.1).to_dense()
                * space.tau_pow(symplectic_product_lifted(xi, chi));
            worst = lhs.iter().zip(&rhs).map(|(u, v)| (u - v).norm()).fold(worst, f64::max);
        }
    }
    println!("N={n}: composition law over all {} pairs, max error {worst:.1e}", n.pow(4));

    let t = translation_lifted(&space, 1, 2).to_dense();
    let overlap: C64 = t.iter().zip(translation_lifted(&space, 2, 1).to_dense().iter()).map(|(a, b)| a.conj() * b).sum();
    println!("Tr(T_(1,2)^dagger T_(2,1)) = {overlap:.2e}");

    let x = sine_position(&space);
    let chords = chord_transform(&space, &x)?;
    for (idx, c) in chords.coeffs.indexed_iter().filter(|(_, c)| c.norm() > 1e-12) {
        println!("sine of position: chord {idx:?} coefficient {c:.4}");
    }
    let back = inverse_chord_transform(&space, &chords)?;
    println!("round trip error {:.1e}", back.max_abs_diff(&x));
    Ok(())
}
