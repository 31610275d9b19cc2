//! Discrete torus kinematics: Schwinger shift and clock operators, Weyl
//! translations, sine observables and the chord (translation-basis)
//! transform.
//!
//! Conventions: position states `|q>`, `q in Z_N`; momentum states with
//! `<q|p> = e^{+i 2 pi q p / N} / sqrt(N)`; `tau = e^{i pi / N}`.
//! A phase-space vector is `(q, p)` and the symplectic product is
//! `<u, v> = u_p v_q - u_q v_p`.

use std::f64::consts::PI;
use std::fmt;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{Dft, C64, I};
use crate::operator::{Basis, OperatorMatrix};

/// Hilbert space of dimension `N` on the quantized unit torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusSpace {
    dim: usize,
    tau: C64,
    h_eff: f64,
}

impl TorusSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(TorusSpace {
            dim,
            tau: C64::from_polar(1.0, PI / dim as f64),
            h_eff: 1.0 / (2.0 * PI * dim as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }

    /// Effective Planck constant `1 / (2 pi N)`. Stored for reference only;
    /// every formula in the crate is written in terms of `N`.
    pub fn h_eff(&self) -> f64 {
        self.h_eff
    }

    /// `tau^k`, evaluated from the exponent reduced mod `2N` so that large
    /// integer exponents do not lose precision.
    pub fn tau_pow(&self, k: i64) -> C64 {
        let m = k.rem_euclid(2 * self.dim as i64);
        C64::from_polar(1.0, PI * m as f64 / self.dim as f64)
    }

    /// `e^{i 2 pi k / N}`.
    pub fn omega_pow(&self, k: i64) -> C64 {
        self.tau_pow(2 * k)
    }

    pub fn reduce(&self, k: i64) -> usize {
        k.rem_euclid(self.dim as i64) as usize
    }
}

/// Phase-space displacement `(xi_q, xi_p)` in `Z_N^2`, stored canonically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseVector {
    pub q: usize,
    pub p: usize,
}

impl PhaseVector {
    pub fn new(space: &TorusSpace, q: i64, p: i64) -> Self {
        PhaseVector {
            q: space.reduce(q),
            p: space.reduce(p),
        }
    }

    pub const ORIGIN: PhaseVector = PhaseVector { q: 0, p: 0 };

    pub fn is_origin(&self) -> bool {
        self.q == 0 && self.p == 0
    }

    pub fn lifted(&self) -> (i64, i64) {
        (self.q as i64, self.p as i64)
    }
}

impl fmt::Display for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q, self.p)
    }
}

/// `<xi, chi> = xi_p chi_q - xi_q chi_p` on the canonical representatives.
pub fn symplectic_product(xi: PhaseVector, chi: PhaseVector) -> i64 {
    symplectic_product_lifted(xi.lifted(), chi.lifted())
}

/// Symplectic product of unreduced integer vectors `(q, p)`.
pub fn symplectic_product_lifted(xi: (i64, i64), chi: (i64, i64)) -> i64 {
    xi.1 * chi.0 - xi.0 * chi.1
}

/// Cyclic shift `V|q> = |q + 1 mod N>`.
pub fn shift_v(space: &TorusSpace) -> OperatorMatrix {
    let n = space.dim();
    let mut v = Array2::<C64>::zeros((n, n));
    for q in 0..n {
        v[[(q + 1) % n, q]] = C64::new(1.0, 0.0);
    }
    OperatorMatrix::dense(v)
}

/// Clock `U|q> = tau^{2q} |q>`, kept diagonal in position.
pub fn clock_u(space: &TorusSpace) -> OperatorMatrix {
    let diag = Array1::from_iter((0..space.dim()).map(|q| space.tau_pow(2 * q as i64)));
    OperatorMatrix::diagonal(Basis::Position, diag)
}

/// Weyl translation `T_xi = V^{xi_q} U^{xi_p} tau^{xi_q xi_p}` on canonical
/// representatives.
pub fn translation(space: &TorusSpace, xi: PhaseVector) -> OperatorMatrix {
    OperatorMatrix::dense(translation_entries(space, xi.q as i64, xi.p as i64))
}

/// Translation by an unreduced integer vector. `V` and `U` only depend on the
/// components mod `N`, but the symmetrizing phase `tau^{q p}` has period
/// `2N`; this is the form for which `T_xi T_chi = tau^{<xi,chi>} T_{xi+chi}`
/// holds exactly.
pub fn translation_lifted(space: &TorusSpace, q: i64, p: i64) -> OperatorMatrix {
    OperatorMatrix::dense(translation_entries(space, q, p))
}

fn translation_entries(space: &TorusSpace, q: i64, p: i64) -> Array2<C64> {
    let n = space.dim();
    let shift = space.reduce(q);
    let mut t = Array2::<C64>::zeros((n, n));
    let sym = space.tau_pow(q * p);
    for b in 0..n {
        t[[(b + shift) % n, b]] = sym * space.tau_pow(2 * p * b as i64);
    }
    t
}

/// `X = (U - U^dagger) / 2i`, diagonal in position with entries `sin(2 pi q / N)`.
pub fn sine_position(space: &TorusSpace) -> OperatorMatrix {
    let diag = Array1::from_iter((0..space.dim()).map(|q| {
        let u = space.tau_pow(2 * q as i64);
        (u - u.conj()) / (2.0 * I)
    }));
    OperatorMatrix::diagonal(Basis::Position, diag)
}

/// `P = (V - V^dagger) / 2i`. With the plane-wave convention `V` has
/// eigenvalue `e^{-i 2 pi p / N}` on `|p>`, so the stored momentum diagonal
/// is `-sin(2 pi p / N)`.
pub fn sine_momentum(space: &TorusSpace) -> OperatorMatrix {
    let diag = Array1::from_iter((0..space.dim()).map(|p| {
        let v = space.tau_pow(-2 * p as i64);
        (v - v.conj()) / (2.0 * I)
    }));
    OperatorMatrix::diagonal(Basis::Momentum, diag)
}

/// `F_xi = (T_xi - T_xi^dagger) / 2i`.
///
/// `F_(0,1)` is `X` and `F_(1,0)` is `P`; those two cases return the
/// basis-tagged diagonal forms from [`sine_position`] / [`sine_momentum`].
pub fn hermitian_f(space: &TorusSpace, xi: PhaseVector) -> OperatorMatrix {
    match (xi.q, xi.p) {
        (0, 1) => sine_position(space),
        (1, 0) => sine_momentum(space),
        _ => hermitian_f_dense(space, xi),
    }
}

/// Dense `F_xi` straight from the translation matrix, without special cases.
pub fn hermitian_f_dense(space: &TorusSpace, xi: PhaseVector) -> OperatorMatrix {
    let t = translation_entries(space, xi.q as i64, xi.p as i64);
    let n = space.dim();
    let f = Array2::from_shape_fn((n, n), |(i, j)| (t[[i, j]] - t[[j, i]].conj()) / (2.0 * I));
    OperatorMatrix::dense(f)
}

/// Expansion coefficients in the translation basis,
/// `coeffs[[chi_q, chi_p]] = Tr(T_chi^dagger A) / N`.
#[derive(Debug, Clone)]
pub struct ChordCoefficients {
    pub coeffs: Array2<C64>,
}

impl ChordCoefficients {
    pub fn get(&self, chi: PhaseVector) -> C64 {
        self.coeffs[[chi.q, chi.p]]
    }

    /// `sum_chi |c(chi)|^2`, equal to `Tr(A^dagger A) / N`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// FFT-based chord transform with its phase table cached for reuse.
///
/// For each diagonal offset `chi_q` the coefficients over `chi_p` are one
/// DFT of `b -> A[b + chi_q, b]`, so both directions cost `O(N^2 log N)`.
#[derive(Debug, Clone)]
pub struct ChordTransform {
    space: TorusSpace,
    dft: Dft,
    // tau^{chi_q chi_p}
    phase: Array2<C64>,
}

impl ChordTransform {
    pub fn new(space: &TorusSpace) -> Self {
        let n = space.dim();
        let phase = Array2::from_shape_fn((n, n), |(cq, cp)| space.tau_pow((cq * cp) as i64));
        ChordTransform {
            space: *space,
            dft: Dft::new(n),
            phase,
        }
    }

    pub fn space(&self) -> &TorusSpace {
        &self.space
    }

    pub fn forward(&self, a: &Array2<C64>) -> Array2<C64> {
        let n = self.space.dim();
        let mut d = Array2::<C64>::zeros((n, n));
        for cq in 0..n {
            for b in 0..n {
                d[[cq, b]] = a[[(b + cq) % n, b]];
            }
        }
        self.dft.forward_rows(&mut d);
        let inv_n = 1.0 / n as f64;
        ndarray::Zip::from(&mut d)
            .and(&self.phase)
            .for_each(|z, ph| *z = *z * ph.conj() * inv_n);
        d
    }

    pub fn inverse(&self, coeffs: &Array2<C64>) -> Array2<C64> {
        let n = self.space.dim();
        let mut d = coeffs * &self.phase;
        self.dft.inverse_rows(&mut d);
        let mut a = Array2::<C64>::zeros((n, n));
        for cq in 0..n {
            for b in 0..n {
                a[[(b + cq) % n, b]] = d[[cq, b]];
            }
        }
        a
    }
}

pub fn chord_transform(space: &TorusSpace, a: &OperatorMatrix) -> Result<ChordCoefficients> {
    check_dim(space, a)?;
    Ok(ChordCoefficients {
        coeffs: ChordTransform::new(space).forward(&a.to_dense()),
    })
}

pub fn inverse_chord_transform(space: &TorusSpace, c: &ChordCoefficients) -> Result<OperatorMatrix> {
    if c.coeffs.nrows() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: c.coeffs.nrows(),
        });
    }
    Ok(OperatorMatrix::dense(
        ChordTransform::new(space).inverse(&c.coeffs),
    ))
}

pub(crate) fn check_dim(space: &TorusSpace, a: &OperatorMatrix) -> Result<()> {
    if a.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: a.dim(),
        });
    }
    Ok(())
}
