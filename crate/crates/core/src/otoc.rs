//! Out-of-time-ordered correlators under unitary or coarse-grained evolution.
//!
//! With normalized traces `<.> = Tr(.) / N`:
//!
//! ```text
//! O1(t) = <A(t) B A(t) B>,  O2(t) = <A(t)^2 B^2>,  C(t) = -2 Re(O1 - O2)
//! ```
//!
//! which equals `<[A(t), B][A(t), B]^dagger>` for Hermitian `A`, `B`.

use std::f64::consts::PI;
use std::fmt;

use log::warn;
use ndarray::{Array1, Array2};

use crate::classical::{monodromy_power_mod, LAMBDA_CAT};
use crate::error::{Error, Result};
use crate::linalg::{self, Dft, C64};
use crate::maps::{ClassicalMapSpec, KickMode, QuantumMap};
use crate::operator::{Basis, OperatorMatrix};
use crate::phase_space::{check_dim, symplectic_product_lifted, PhaseVector, TorusSpace};

const HERMITIAN_TOL: f64 = 1e-8;

/// One step of Heisenberg-picture evolution on dense position-basis matrices.
pub trait Propagator: Sync {
    fn space(&self) -> &TorusSpace;
    fn spec(&self) -> ClassicalMapSpec;
    fn kick_mode(&self) -> KickMode;
    /// Coarse-graining strength; 0 for unitary evolution.
    fn epsilon(&self) -> f64;
    fn step_dense(&self, a: &Array2<C64>) -> Array2<C64>;

    fn step(&self, a: &OperatorMatrix) -> Result<OperatorMatrix> {
        check_dim(self.space(), a)?;
        Ok(OperatorMatrix::dense(self.step_dense(&a.to_dense())))
    }
}

impl Propagator for QuantumMap {
    fn space(&self) -> &TorusSpace {
        QuantumMap::space(self)
    }

    fn spec(&self) -> ClassicalMapSpec {
        *QuantumMap::spec(self)
    }

    fn kick_mode(&self) -> KickMode {
        QuantumMap::kick_mode(self)
    }

    fn epsilon(&self) -> f64 {
        0.0
    }

    fn step_dense(&self, a: &Array2<C64>) -> Array2<C64> {
        self.conjugate_dense(a)
    }
}

/// `U^{dagger steps} A U^{steps}`.
pub fn heisenberg_evolve(a: &OperatorMatrix, map: &QuantumMap, steps: usize) -> Result<OperatorMatrix> {
    check_dim(map.space(), a)?;
    if steps == 0 {
        return Ok(a.clone());
    }
    let mut cur = a.to_dense();
    for _ in 0..steps {
        cur = map.conjugate_dense(&cur);
    }
    Ok(OperatorMatrix::dense(cur))
}

/// Which pair of observables an OTOC run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorChoice {
    /// `A = X`, `B = P`.
    XP,
    /// `A = F_xi`, `B = F_chi`.
    F { xi: PhaseVector, chi: PhaseVector },
}

impl OperatorChoice {
    pub fn build(&self, space: &TorusSpace) -> (OperatorMatrix, OperatorMatrix) {
        use crate::phase_space::{hermitian_f, sine_momentum, sine_position};
        match *self {
            OperatorChoice::XP => (sine_position(space), sine_momentum(space)),
            OperatorChoice::F { xi, chi } => (hermitian_f(space, xi), hermitian_f(space, chi)),
        }
    }
}

impl fmt::Display for OperatorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorChoice::XP => write!(f, "XP"),
            OperatorChoice::F { xi, chi } => write!(f, "F({},{};{},{})", xi.q, xi.p, chi.q, chi.p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtocPoint {
    pub t: usize,
    pub c: f64,
    pub o1: C64,
    pub o2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtocMeta {
    pub map: ClassicalMapSpec,
    pub n: usize,
    pub epsilon: f64,
    pub kick_mode: KickMode,
    pub operators: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtocSeries {
    pub points: Vec<OtocPoint>,
    pub meta: OtocMeta,
}

impl OtocSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn c(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.c).collect()
    }

    pub fn o1(&self) -> Vec<C64> {
        self.points.iter().map(|p| p.o1).collect()
    }

    pub fn o1_abs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.o1.norm()).collect()
    }

    pub fn o2(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.o2).collect()
    }

    /// Mean of `C(t)` over `t in [start, end]`.
    pub fn mean_c(&self, start: usize, end: usize) -> Result<f64> {
        check_window(start, end, self.len())?;
        let slice = &self.points[start..=end];
        Ok(slice.iter().map(|p| p.c).sum::<f64>() / slice.len() as f64)
    }
}

pub(crate) fn check_window(start: usize, end: usize, len: usize) -> Result<()> {
    if start >= end || end >= len {
        return Err(Error::InvalidWindow { start, end, len });
    }
    Ok(())
}

/// `(O1, O2)` for the current `A(t)` and a fixed `B`.
fn contract(a: &Array2<C64>, b: &OperatorMatrix, dft: &Dft) -> (C64, f64) {
    let n = a.nrows();
    let nf = n as f64;
    let diag_contract = |m: &Array2<C64>, d: &Array1<C64>| {
        let mut o1 = C64::new(0.0, 0.0);
        let mut o2 = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let w = m[[i, j]] * m[[j, i]];
                o1 += w * d[j] * d[i];
                o2 += w * d[i] * d[i];
            }
        }
        (o1 / nf, o2.re / nf)
    };
    match b.as_diagonal() {
        Some((Basis::Position, d)) => diag_contract(a, d),
        Some((Basis::Momentum, d)) => diag_contract(&dft.to_momentum(a), d),
        None => {
            let bd = b.as_dense().expect("dense operator");
            let ab = a.dot(bd);
            let a2 = a.dot(a);
            let b2 = bd.dot(bd);
            let o1 = (0..n)
                .map(|i| (0..n).map(|j| ab[[i, j]] * ab[[j, i]]).sum::<C64>())
                .sum::<C64>();
            let o2 = linalg::hs_inner(&linalg::adjoint(&a2), &b2);
            (o1 / nf, o2.re / nf)
        }
    }
}

/// OTOC time series for `t = 0..=t_max`, advancing `A` by one propagator
/// step per iteration. Both operators must be Hermitian.
pub fn otoc_series<P: Propagator + ?Sized>(
    prop: &P,
    a: &OperatorMatrix,
    b: &OperatorMatrix,
    t_max: usize,
    label: &str,
) -> Result<OtocSeries> {
    let space = *prop.space();
    check_dim(&space, a)?;
    check_dim(&space, b)?;
    a.require_hermitian(HERMITIAN_TOL)?;
    b.require_hermitian(HERMITIAN_TOL)?;
    let dft = Dft::new(space.dim());
    let mut cur = a.to_dense();
    let mut points = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            cur = prop.step_dense(&cur);
        }
        let (o1, o2) = contract(&cur, b, &dft);
        points.push(OtocPoint {
            t,
            c: -2.0 * (o1.re - o2),
            o1,
            o2,
        });
    }
    Ok(OtocSeries {
        points,
        meta: OtocMeta {
            map: prop.spec(),
            n: space.dim(),
            epsilon: prop.epsilon(),
            kick_mode: prop.kick_mode(),
            operators: label.to_string(),
        },
    })
}

/// `<[A, B][A, B]^dagger>` from the explicit commutator. Reference
/// implementation for small `N`.
pub fn commutator_otoc(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<f64> {
    const LIMIT: usize = 64;
    if a.dim() > LIMIT {
        return Err(Error::TooLarge {
            op: "commutator_otoc",
            n: a.dim(),
            limit: LIMIT,
        });
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let (ad, bd) = (a.to_dense(), b.to_dense());
    let comm = ad.dot(&bd) - bd.dot(&ad);
    Ok(linalg::hs_norm_sqr(&comm) / a.dim() as f64)
}

/// Closed-form OTOC of `X`, `P` under the unperturbed cat map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticCatOtoc {
    /// `a_t mod N`.
    pub a_mod_n: u64,
    pub c: f64,
    pub o1: f64,
    pub o2: f64,
    /// Small-argument form `(pi^2 / N^2) e^{2 lambda t}`.
    pub c_approx: f64,
}

pub fn analytic_cat_otoc(t: usize, n: usize) -> AnalyticCatOtoc {
    let a = monodromy_power_mod(t as i64, n as u64)[0][0] as u64;
    let x = PI * a as f64 / n as f64;
    AnalyticCatOtoc {
        a_mod_n: a,
        c: x.sin().powi(2),
        o1: 0.25 * (2.0 * x).cos(),
        o2: 0.25,
        c_approx: (PI / n as f64).powi(2) * (2.0 * LAMBDA_CAT * t as f64).exp(),
    }
}

/// `C(t)` for `A = F_xi`, `B = F_chi` under the unperturbed cat map:
/// `sin^2(pi <M^{-t} xi, chi> / N)`. Chords evolve with the inverse
/// monodromy in the Heisenberg picture.
pub fn otoc_family_linear(
    spec: &ClassicalMapSpec,
    space: &TorusSpace,
    xi: PhaseVector,
    chi: PhaseVector,
    t: usize,
) -> Result<f64> {
    if !spec.is_linear_cat() {
        return Err(Error::UnsupportedMap(format!(
            "closed-form OTOC needs the unperturbed cat map, got {spec}"
        )));
    }
    let n = space.dim() as i64;
    let m = monodromy_power_mod(-(t as i64), n as u64);
    let (q, p) = xi.lifted();
    let moved = (
        (m[0][0] * q + m[0][1] * p).rem_euclid(n),
        (m[1][0] * q + m[1][1] * p).rem_euclid(n),
    );
    let s = symplectic_product_lifted(moved, chi.lifted()).rem_euclid(n);
    Ok((PI * s as f64 / n as f64).sin().powi(2))
}

/// Least-squares exponential rate over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub value: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub start: usize,
    pub end: usize,
}

/// Slope of `ln C(t)` over `t in [start, end]`, halved.
pub fn fit_lyapunov_from_otoc(series: &OtocSeries, start: usize, end: usize) -> Result<RateFit> {
    check_window(start, end, series.len())?;
    let (t, y): (Vec<f64>, Vec<f64>) = series.points[start..=end]
        .iter()
        .map(|p| (p.t as f64, p.c.max(f64::MIN_POSITIVE).ln()))
        .unzip();
    let (slope, _, r2) = linalg::linear_fit(&t, &y);
    if r2 < 0.98 {
        warn!("growth fit over [{start}, {end}] has R^2 = {r2:.4}");
    }
    Ok(RateFit {
        value: slope / 2.0,
        slope,
        r_squared: r2,
        start,
        end,
    })
}
