//! Translation dephasing `D_eps(A) = sum_xi c(xi) T_xi^dagger A T_xi` and the
//! coarse-grained Heisenberg step `A -> D_eps(U^dagger A U)`.
//!
//! Translations are eigenoperators of the dephasing,
//! `D_eps(T_chi) = d(chi) T_chi` with
//! `d(chi) = sum_xi c(xi) e^{i 2 pi <chi, xi> / N}`, so the production path
//! is a pointwise product in the chord basis.

use std::f64::consts::PI;

use log::{debug, warn};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{Dft, C64};
use crate::maps::{ClassicalMapSpec, KickMode, QuantumMap};
use crate::operator::OperatorMatrix;
use crate::otoc::Propagator;
use crate::phase_space::{check_dim, ChordTransform, TorusSpace};

/// Largest `N` accepted by the literal translation sum unless forced.
pub const DENSE_DEPHASING_LIMIT: usize = 64;

#[derive(Debug, Clone)]
pub struct CoarseGrainKernel {
    space: TorusSpace,
    pub epsilon: f64,
    /// `c_tilde[[mu, nu]]`, the smoothing profile in the Fourier-dual variables.
    pub c_tilde: Array2<f64>,
    /// `c_weights[[xi_q, xi_p]]`, convex weights summing to 1.
    pub c_weights: Array2<f64>,
    /// `diag_chord[[chi_q, chi_p]]`, channel eigenvalue on `T_chi`.
    pub diag_chord: Array2<f64>,
    /// Total magnitude of negative weights removed before normalization.
    pub clipped: f64,
}

pub fn smoothing_profile(space: &TorusSpace, epsilon: f64) -> Array2<f64> {
    let n = space.dim();
    let nf = n as f64;
    let s2 = |m: usize| (PI * m as f64 / nf).sin().powi(2);
    Array2::from_shape_fn((n, n), |(mu, nu)| (-(epsilon * nf / PI) * (s2(mu) + s2(nu)) / 2.0).exp())
}

/// 2D forward DFT of a real array, returned complex.
fn dft2(dft: &Dft, a: &Array2<f64>) -> Array2<C64> {
    let mut m = a.mapv(|x| C64::new(x, 0.0));
    dft.forward_rows(&mut m);
    dft.forward_cols(&mut m);
    m
}

pub fn build_kernel(space: &TorusSpace, epsilon: f64) -> Result<CoarseGrainKernel> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    let n = space.dim();
    let dft = Dft::new(n);
    let c_tilde = smoothing_profile(space, epsilon);
    let raw = dft2(&dft, &c_tilde);
    let imag = raw.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    debug!("kernel N={n} eps={epsilon}: max imaginary weight {imag:.2e}");

    let mut weights = raw.mapv(|z| z.re);
    let total: f64 = weights.sum();
    let mut clipped = 0.0;
    weights.mapv_inplace(|w| {
        if w < 0.0 {
            clipped += -w / total;
            0.0
        } else {
            w
        }
    });
    if clipped > 0.0 {
        if clipped > 1e-10 {
            warn!("kernel N={n} eps={epsilon}: clipped negative weight mass {clipped:.3e}");
        } else {
            debug!("kernel N={n} eps={epsilon}: clipped negative weight mass {clipped:.3e}");
        }
    }
    let total: f64 = weights.sum();
    weights.mapv_inplace(|w| w / total);

    // d(chi_q, chi_p) = G[-chi_p, chi_q] with G the forward 2D DFT of c.
    let g = dft2(&dft, &weights);
    let diag_chord = Array2::from_shape_fn((n, n), |(cq, cp)| g[[(n - cp) % n, cq]].re);
    Ok(CoarseGrainKernel {
        space: *space,
        epsilon,
        c_tilde,
        c_weights: weights,
        diag_chord,
        clipped,
    })
}

impl CoarseGrainKernel {
    pub fn space(&self) -> &TorusSpace {
        &self.space
    }

    pub fn is_identity(&self) -> bool {
        self.epsilon == 0.0
    }

    /// Second moment of the weights per axis, with `xi` taken in `(-N/2, N/2]`.
    pub fn weight_variance(&self) -> f64 {
        let n = self.space.dim() as i64;
        let centered = |k: usize| {
            let k = k as i64;
            if k > n / 2 {
                k - n
            } else {
                k
            }
        };
        self.c_weights
            .indexed_iter()
            .map(|((q, _), w)| w * (centered(q) as f64).powi(2))
            .sum()
    }
}

/// Literal weighted sum over all `N^2` translations; `O(N^4)`.
pub fn apply_dephasing_dense(kernel: &CoarseGrainKernel, a: &OperatorMatrix, force: bool) -> Result<OperatorMatrix> {
    let space = kernel.space;
    check_dim(&space, a)?;
    let n = space.dim();
    if n > DENSE_DEPHASING_LIMIT && !force {
        return Err(Error::TooLarge {
            op: "apply_dephasing_dense",
            n,
            limit: DENSE_DEPHASING_LIMIT,
        });
    }
    let ad = a.to_dense();
    let mut out = Array2::<C64>::zeros((n, n));
    for xq in 0..n {
        for xp in 0..n {
            let w = kernel.c_weights[[xq, xp]];
            if w == 0.0 {
                continue;
            }
            // (T^dagger A T)_{ij} = tau^{2 xi_p (j - i)} A_{i + xi_q, j + xi_q}
            for i in 0..n {
                for j in 0..n {
                    let ph = space.tau_pow(2 * (xp as i64) * (j as i64 - i as i64));
                    out[[i, j]] += ad[[(i + xq) % n, (j + xq) % n]] * ph * w;
                }
            }
        }
    }
    Ok(OperatorMatrix::dense(out))
}

/// Production dephasing: chord transform, pointwise scaling, inverse.
pub fn apply_dephasing_chord(kernel: &CoarseGrainKernel, a: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_dim(&kernel.space, a)?;
    let chord = ChordTransform::new(&kernel.space);
    Ok(OperatorMatrix::dense(dephase_with(&chord, kernel, &a.to_dense())))
}

fn dephase_with(chord: &ChordTransform, kernel: &CoarseGrainKernel, a: &Array2<C64>) -> Array2<C64> {
    let mut c = chord.forward(a);
    ndarray::Zip::from(&mut c)
        .and(&kernel.diag_chord)
        .for_each(|z, d| *z *= *d);
    chord.inverse(&c)
}

/// Unitary map followed by dephasing, one step per application.
#[derive(Debug, Clone)]
pub struct CoarseGrainedMap {
    map: QuantumMap,
    kernel: CoarseGrainKernel,
    chord: ChordTransform,
}

impl CoarseGrainedMap {
    pub fn new(map: QuantumMap, kernel: CoarseGrainKernel) -> Result<Self> {
        if map.space().dim() != kernel.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: map.space().dim(),
                got: kernel.space.dim(),
            });
        }
        let chord = ChordTransform::new(map.space());
        Ok(CoarseGrainedMap { map, kernel, chord })
    }

    pub fn map(&self) -> &QuantumMap {
        &self.map
    }

    pub fn kernel(&self) -> &CoarseGrainKernel {
        &self.kernel
    }
}

impl Propagator for CoarseGrainedMap {
    fn space(&self) -> &TorusSpace {
        self.map.space()
    }

    fn spec(&self) -> ClassicalMapSpec {
        *self.map.spec()
    }

    fn kick_mode(&self) -> KickMode {
        self.map.kick_mode()
    }

    fn epsilon(&self) -> f64 {
        self.kernel.epsilon
    }

    fn step_dense(&self, a: &Array2<C64>) -> Array2<C64> {
        let evolved = self.map.conjugate_dense(a);
        if self.kernel.is_identity() {
            evolved
        } else {
            dephase_with(&self.chord, &self.kernel, &evolved)
        }
    }
}

/// `D_eps(U^dagger A U)`.
pub fn channel_step(map: &QuantumMap, kernel: &CoarseGrainKernel, a: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_dim(map.space(), a)?;
    let evolved = map.heisenberg(a)?;
    if kernel.is_identity() {
        return Ok(evolved);
    }
    apply_dephasing_chord(kernel, &evolved)
}
