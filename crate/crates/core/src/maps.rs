//! Classical torus maps (perturbed cat, Chirikov standard, Harper) and their
//! kick-DFT-kick quantizations.
//!
//! Every map here has the form of a position kick followed by a drift,
//!
//! ```text
//! p' = p + f(q)
//! q' = q + g(p')        (mod 1)
//! ```
//!
//! with `f = -V'` and `g = T'`. The quantum map is
//! `U = F^dagger e^{-i 2 pi N T(p/N)} F e^{-i 2 pi N V(q/N)}`, `F` being the
//! position-to-momentum DFT.

use std::f64::consts::PI;
use std::fmt;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{Dft, C64};
use crate::operator::OperatorMatrix;
use crate::phase_space::{check_dim, TorusSpace};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassicalMapSpec {
    /// `p' = p + q - 2 pi k sin(2 pi q)`, `q' = q + p' + 2 pi k sin(2 pi p')`.
    Cat { k: f64 },
    /// `p' = p + (K / 2 pi) sin(2 pi q)`, `q' = q + p'`.
    Standard { k: f64 },
    /// `p' = p - K1 sin(2 pi q)`, `q' = q + K2 sin(2 pi p')`.
    Harper { k1: f64, k2: f64 },
}

impl ClassicalMapSpec {
    pub fn cat(k: f64) -> Self {
        ClassicalMapSpec::Cat { k }
    }

    pub fn standard(k: f64) -> Self {
        ClassicalMapSpec::Standard { k }
    }

    /// Symmetric Harper map, `K1 = K2 = K`.
    pub fn harper(k: f64) -> Self {
        ClassicalMapSpec::Harper { k1: k, k2: k }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassicalMapSpec::Cat { .. } => "cat",
            ClassicalMapSpec::Standard { .. } => "standard",
            ClassicalMapSpec::Harper { .. } => "harper",
        }
    }

    /// The scalar strength (`k` or `K`); `K1` for the Harper map.
    pub fn parameter(&self) -> f64 {
        match *self {
            ClassicalMapSpec::Cat { k } | ClassicalMapSpec::Standard { k } => k,
            ClassicalMapSpec::Harper { k1, .. } => k1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ClassicalMapSpec::Cat { k } | ClassicalMapSpec::Standard { k } => k.is_finite(),
            ClassicalMapSpec::Harper { k1, k2 } => k1.is_finite() && k2.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("non-finite map parameter in {self}")))
        }
    }

    /// Unperturbed cat map, the only linear case.
    pub fn is_linear_cat(&self) -> bool {
        matches!(*self, ClassicalMapSpec::Cat { k } if k == 0.0)
    }

    fn kick(&self, q: f64) -> f64 {
        match *self {
            ClassicalMapSpec::Cat { k } => q - TWO_PI * k * (TWO_PI * q).sin(),
            ClassicalMapSpec::Standard { k } => k / TWO_PI * (TWO_PI * q).sin(),
            ClassicalMapSpec::Harper { k1, .. } => -k1 * (TWO_PI * q).sin(),
        }
    }

    fn kick_derivative(&self, q: f64) -> f64 {
        match *self {
            ClassicalMapSpec::Cat { k } => 1.0 - TWO_PI * TWO_PI * k * (TWO_PI * q).cos(),
            ClassicalMapSpec::Standard { k } => k * (TWO_PI * q).cos(),
            ClassicalMapSpec::Harper { k1, .. } => -TWO_PI * k1 * (TWO_PI * q).cos(),
        }
    }

    fn drift(&self, p: f64) -> f64 {
        match *self {
            ClassicalMapSpec::Cat { k } => p + TWO_PI * k * (TWO_PI * p).sin(),
            ClassicalMapSpec::Standard { .. } => p,
            ClassicalMapSpec::Harper { k2, .. } => k2 * (TWO_PI * p).sin(),
        }
    }

    fn drift_derivative(&self, p: f64) -> f64 {
        match *self {
            ClassicalMapSpec::Cat { k } => 1.0 + TWO_PI * TWO_PI * k * (TWO_PI * p).cos(),
            ClassicalMapSpec::Standard { .. } => 1.0,
            ClassicalMapSpec::Harper { k2, .. } => TWO_PI * k2 * (TWO_PI * p).cos(),
        }
    }
}

impl fmt::Display for ClassicalMapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ClassicalMapSpec::Cat { k } => write!(f, "cat(k={k})"),
            ClassicalMapSpec::Standard { k } => write!(f, "standard(K={k})"),
            ClassicalMapSpec::Harper { k1, k2 } => write!(f, "harper(K1={k1}, K2={k2})"),
        }
    }
}

/// Reduce into `[0, 1)`; `rem_euclid` can return exactly 1.0 for tiny
/// negative inputs.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed distance on the circle, in `[-1/2, 1/2)`.
pub fn circle_delta(a: f64, b: f64) -> f64 {
    (a - b + 0.5).rem_euclid(1.0) - 0.5
}

/// One iteration of the classical map; the image is reduced mod 1.
pub fn classical_step(spec: &ClassicalMapSpec, point: (f64, f64)) -> (f64, f64) {
    let (q, p) = point;
    let p1 = p + spec.kick(q);
    let q1 = q + spec.drift(p1);
    (wrap_unit(q1), wrap_unit(p1))
}

/// Tangent map `d(q', p') / d(q, p)` as `[[dq'/dq, dq'/dp], [dp'/dq, dp'/dp]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian2(pub [[f64; 2]; 2]);

impl Jacobian2 {
    pub fn det(&self) -> f64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

pub fn jacobian(spec: &ClassicalMapSpec, point: (f64, f64)) -> Jacobian2 {
    let (q, p) = point;
    let a = spec.kick_derivative(q);
    let p1 = p + spec.kick(q);
    let g = spec.drift_derivative(p1);
    Jacobian2([[1.0 + g * a, g], [a, 1.0]])
}

/// How the nonlinear kick strengths of the quantum map are calibrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KickMode {
    /// Phases obtained from the classical generating functions, so that the
    /// quantum map has the classical map as its limit.
    #[default]
    Correspondence,
    /// Kick phases without the correspondence rescaling:
    /// `e^{-i2pi(q^2/2N + kN cos)}` for the cat position kick and
    /// `2 pi N K cos` phases for the standard and Harper maps.
    AsPrinted,
}

impl KickMode {
    pub fn name(&self) -> &'static str {
        match self {
            KickMode::Correspondence => "correspondence",
            KickMode::AsPrinted => "as_printed",
        }
    }
}

/// Strengths `kappa` of the `2 pi kappa cos(2 pi j / N)` terms in the
/// position and momentum kick phases.
pub fn kick_prefactors(spec: &ClassicalMapSpec, space: &TorusSpace, mode: KickMode) -> (f64, f64) {
    let n = space.dim() as f64;
    match (*spec, mode) {
        (ClassicalMapSpec::Cat { k }, _) => (k * n, k * n),
        (ClassicalMapSpec::Standard { k }, KickMode::Correspondence) => (n * k / (TWO_PI * TWO_PI), 0.0),
        (ClassicalMapSpec::Standard { k }, KickMode::AsPrinted) => (n * k, 0.0),
        (ClassicalMapSpec::Harper { k1, k2 }, KickMode::Correspondence) => {
            (n * k1 / TWO_PI, n * k2 / TWO_PI)
        }
        (ClassicalMapSpec::Harper { k1, k2 }, KickMode::AsPrinted) => (n * k1, n * k2),
    }
}

/// Position-kick strength; see [`kick_prefactors`].
pub fn kick_prefactor(spec: &ClassicalMapSpec, space: &TorusSpace, mode: KickMode) -> f64 {
    kick_prefactors(spec, space, mode).0
}

/// Which diagonal factor acts first on a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KickOrder {
    /// `U = F^dagger K_p F K_q`.
    #[default]
    PositionFirst,
    /// `U = K_q F^dagger K_p F`.
    MomentumFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Adjoint,
}

/// Unitary one-step propagator stored as two kick diagonals.
#[derive(Debug, Clone)]
pub struct QuantumMap {
    space: TorusSpace,
    spec: ClassicalMapSpec,
    mode: KickMode,
    order: KickOrder,
    dft: Dft,
    phase_position: Array1<C64>,
    phase_momentum: Array1<C64>,
}

pub fn quantize(spec: &ClassicalMapSpec, space: &TorusSpace) -> Result<QuantumMap> {
    QuantumMap::new(spec, space, KickMode::Correspondence)
}

impl QuantumMap {
    pub fn new(spec: &ClassicalMapSpec, space: &TorusSpace, mode: KickMode) -> Result<Self> {
        spec.validate()?;
        let n = space.dim();
        let nf = n as f64;
        let (kq, kp) = kick_prefactors(spec, space, mode);
        let cosine = |j: usize| (TWO_PI * j as f64 / nf).cos();
        let quad = |j: usize| {
            // j^2 / 2N reduced mod 1 before scaling by 2 pi
            let jj = (j as u128 * j as u128) % (2 * n as u128);
            jj as f64 / (2.0 * nf)
        };
        // Phase angles divided by 2 pi.
        let (pos, mom): (Vec<f64>, Vec<f64>) = (0..n)
            .map(|j| match (*spec, mode) {
                (ClassicalMapSpec::Cat { .. }, KickMode::Correspondence) => {
                    (quad(j) + kq * cosine(j), -quad(j) + kp * cosine(j))
                }
                (ClassicalMapSpec::Cat { .. }, KickMode::AsPrinted) => {
                    (-quad(j) - kq * cosine(j), -quad(j) + kp * cosine(j))
                }
                (ClassicalMapSpec::Standard { .. }, _) => (-kq * cosine(j), -quad(j)),
                (ClassicalMapSpec::Harper { .. }, _) => (kq * cosine(j), kp * cosine(j)),
            })
            .unzip();
        let to_phase = |v: Vec<f64>| Array1::from_iter(v.into_iter().map(|a| C64::from_polar(1.0, TWO_PI * a)));
        Ok(QuantumMap {
            space: *space,
            spec: *spec,
            mode,
            order: KickOrder::PositionFirst,
            dft: Dft::new(n),
            phase_position: to_phase(pos),
            phase_momentum: to_phase(mom),
        })
    }

    /// Build from explicit kick diagonals.
    pub fn from_phases(
        space: &TorusSpace,
        spec: ClassicalMapSpec,
        phase_position: Array1<C64>,
        phase_momentum: Array1<C64>,
        order: KickOrder,
    ) -> Result<Self> {
        for v in [&phase_position, &phase_momentum] {
            if v.len() != space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    got: v.len(),
                });
            }
        }
        Ok(QuantumMap {
            space: *space,
            spec,
            mode: KickMode::Correspondence,
            order,
            dft: Dft::new(space.dim()),
            phase_position,
            phase_momentum,
        })
    }

    pub fn with_order(mut self, order: KickOrder) -> Self {
        self.order = order;
        self
    }

    pub fn space(&self) -> &TorusSpace {
        &self.space
    }

    pub fn spec(&self) -> &ClassicalMapSpec {
        &self.spec
    }

    pub fn kick_mode(&self) -> KickMode {
        self.mode
    }

    pub fn order(&self) -> KickOrder {
        self.order
    }

    pub fn phase_position(&self) -> &Array1<C64> {
        &self.phase_position
    }

    pub fn phase_momentum(&self) -> &Array1<C64> {
        &self.phase_momentum
    }

    /// Apply `U` (or `U^dagger`) to a state vector in the position basis.
    pub fn apply_state(&self, psi: &Array1<C64>, direction: Direction) -> Result<Array1<C64>> {
        if psi.len() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                got: psi.len(),
            });
        }
        let kq = &self.phase_position;
        let kp = &self.phase_momentum;
        let out = match (self.order, direction) {
            (KickOrder::PositionFirst, Direction::Forward) => {
                let m = self.dft.state_to_momentum(&(psi * kq)) * kp;
                self.dft.state_to_position(&m)
            }
            (KickOrder::PositionFirst, Direction::Adjoint) => {
                let m = self.dft.state_to_momentum(psi) * &kp.mapv(|z| z.conj());
                self.dft.state_to_position(&m) * &kq.mapv(|z| z.conj())
            }
            (KickOrder::MomentumFirst, Direction::Forward) => {
                let m = self.dft.state_to_momentum(psi) * kp;
                self.dft.state_to_position(&m) * kq
            }
            (KickOrder::MomentumFirst, Direction::Adjoint) => {
                let x = psi * &kq.mapv(|z| z.conj());
                let m = self.dft.state_to_momentum(&x) * &kp.mapv(|z| z.conj());
                self.dft.state_to_position(&m)
            }
        };
        Ok(out)
    }

    /// `U A` or `U^dagger A`, column by column.
    pub fn apply_left(&self, a: &OperatorMatrix, direction: Direction) -> Result<OperatorMatrix> {
        check_dim(&self.space, a)?;
        let dense = a.to_dense();
        Ok(OperatorMatrix::dense(self.apply_left_dense(&dense, direction)))
    }

    fn apply_left_dense(&self, a: &Array2<C64>, direction: Direction) -> Array2<C64> {
        let n = self.space.dim();
        let inv_sqrt = 1.0 / (n as f64).sqrt();
        let scale_rows = |m: &mut Array2<C64>, d: &Array1<C64>, conj: bool| {
            for (mut row, z) in m.rows_mut().into_iter().zip(d.iter()) {
                let z = if conj { z.conj() } else { *z };
                row.mapv_inplace(|x| x * z);
            }
        };
        let mut m = a.clone();
        let fwd = |m: &mut Array2<C64>| {
            self.dft.forward_cols(m);
            m.mapv_inplace(|x| x * inv_sqrt);
        };
        let inv = |m: &mut Array2<C64>| {
            self.dft.inverse_cols(m);
            m.mapv_inplace(|x| x * inv_sqrt);
        };
        match (self.order, direction) {
            (KickOrder::PositionFirst, Direction::Forward) => {
                scale_rows(&mut m, &self.phase_position, false);
                fwd(&mut m);
                scale_rows(&mut m, &self.phase_momentum, false);
                inv(&mut m);
            }
            (KickOrder::PositionFirst, Direction::Adjoint) => {
                fwd(&mut m);
                scale_rows(&mut m, &self.phase_momentum, true);
                inv(&mut m);
                scale_rows(&mut m, &self.phase_position, true);
            }
            (KickOrder::MomentumFirst, Direction::Forward) => {
                fwd(&mut m);
                scale_rows(&mut m, &self.phase_momentum, false);
                inv(&mut m);
                scale_rows(&mut m, &self.phase_position, false);
            }
            (KickOrder::MomentumFirst, Direction::Adjoint) => {
                scale_rows(&mut m, &self.phase_position, true);
                fwd(&mut m);
                scale_rows(&mut m, &self.phase_momentum, true);
                inv(&mut m);
            }
        }
        m
    }

    /// Heisenberg step `U^dagger A U` on a dense position-basis matrix.
    pub fn conjugate_dense(&self, a: &Array2<C64>) -> Array2<C64> {
        let kq = &self.phase_position;
        let kp = &self.phase_momentum;
        let sandwich = |m: &mut Array2<C64>, d: &Array1<C64>| {
            for ((i, j), x) in m.indexed_iter_mut() {
                *x *= d[i].conj() * d[j];
            }
        };
        match self.order {
            KickOrder::PositionFirst => {
                let mut b = self.dft.to_momentum(a);
                sandwich(&mut b, kp);
                let mut c = self.dft.to_position(&b);
                sandwich(&mut c, kq);
                c
            }
            KickOrder::MomentumFirst => {
                let mut b = a.clone();
                sandwich(&mut b, kq);
                let mut c = self.dft.to_momentum(&b);
                sandwich(&mut c, kp);
                self.dft.to_position(&c)
            }
        }
    }

    pub fn heisenberg(&self, a: &OperatorMatrix) -> Result<OperatorMatrix> {
        check_dim(&self.space, a)?;
        Ok(OperatorMatrix::dense(self.conjugate_dense(&a.to_dense())))
    }

    /// Dense `N x N` matrix of `U`.
    pub fn materialize(&self) -> OperatorMatrix {
        let id = crate::linalg::identity(self.space.dim());
        OperatorMatrix::dense(self.apply_left_dense(&id, Direction::Forward))
    }
}

/// Apply the map to an operator from the left (`U A` / `U^dagger A`).
pub fn apply_map(map: &QuantumMap, a: &OperatorMatrix, direction: Direction) -> Result<OperatorMatrix> {
    map.apply_left(a, direction)
}

/// Periodized Gaussian wavepacket centred at `(q0, p0)` in `[0,1)^2`.
///
/// `covariance` is the phase-space covariance `[[s_qq, s_qp], [s_qp, s_pp]]`;
/// it must describe a pure state (`det = (h_eff/2)^2`), of which only `s_qq`
/// and `s_qp` are used.
pub fn gaussian_state(space: &TorusSpace, q0: f64, p0: f64, covariance: [[f64; 2]; 2]) -> Array1<C64> {
    let n = space.dim();
    let nf = n as f64;
    let hbar = space.h_eff();
    let sqq = covariance[0][0];
    let sqp = covariance[0][1];
    let chirp = sqp / (2.0 * sqq * hbar);
    let images = (6.0 * sqq.sqrt()).ceil() as i64 + 1;
    let mut psi = Array1::<C64>::zeros(n);
    for (j, amp) in psi.iter_mut().enumerate() {
        let x = j as f64 / nf;
        for m in -images..=images {
            let d = x - q0 + m as f64;
            let env = -d * d / (4.0 * sqq);
            if env < -745.0 {
                continue;
            }
            let phase = chirp * d * d + TWO_PI * nf * p0 * (x + m as f64);
            *amp += C64::from_polar(env.exp(), phase);
        }
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    psi.mapv_inplace(|z| z / norm);
    psi
}

/// Minimum-uncertainty coherent-state covariance, `(h_eff / 2) I`.
pub fn coherent_covariance(space: &TorusSpace) -> [[f64; 2]; 2] {
    let s = space.h_eff() / 2.0;
    [[s, 0.0], [0.0, s]]
}

/// `(<sin 2 pi q>, <sin 2 pi p>)` for a position-basis state, with `q, p`
/// the position and momentum labels divided by `N`.
pub fn sine_expectations(space: &TorusSpace, psi: &Array1<C64>) -> (f64, f64) {
    let n = space.dim();
    let s = |j: usize| (TWO_PI * j as f64 / n as f64).sin();
    let xq: f64 = psi.iter().enumerate().map(|(j, z)| z.norm_sqr() * s(j)).sum();
    let phi = Dft::new(n).state_to_momentum(psi);
    let xp: f64 = phi.iter().enumerate().map(|(j, z)| z.norm_sqr() * s(j)).sum();
    (xq, xp)
}
