//! Dense complex helpers shared by every module: DFT plans for matrices,
//! small utilities on `Array2<C64>`, and a Schur-based eigensolver that
//! returns both right and left eigenvectors.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, ArrayView2, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Cached forward/inverse FFT plans of length `n`.
///
/// Forward is `sum_q e^{-i 2 pi q p / n} x_q`, inverse uses `e^{+i...}`;
/// both unnormalized, matching rustfft.
#[derive(Clone)]
pub struct Dft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Dft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dft").field("n", &self.n).finish()
    }
}

impl Dft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Dft {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward_slice(&self, data: &mut [C64]) {
        self.forward.process(data);
    }

    pub fn inverse_slice(&self, data: &mut [C64]) {
        self.inverse.process(data);
    }

    /// Unnormalized forward transform of every row.
    pub fn forward_rows(&self, m: &mut Array2<C64>) {
        self.rows(m, &self.forward);
    }

    pub fn inverse_rows(&self, m: &mut Array2<C64>) {
        self.rows(m, &self.inverse);
    }

    /// Unnormalized forward transform of every column.
    pub fn forward_cols(&self, m: &mut Array2<C64>) {
        self.cols(m, &self.forward);
    }

    pub fn inverse_cols(&self, m: &mut Array2<C64>) {
        self.cols(m, &self.inverse);
    }

    fn rows(&self, m: &mut Array2<C64>, plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(m.ncols(), self.n);
        if !m.is_standard_layout() {
            *m = m.as_standard_layout().to_owned();
        }
        let slice = m.as_slice_mut().expect("standard layout");
        // rustfft processes consecutive chunks of length n in one call
        plan.process(slice);
    }

    fn cols(&self, m: &mut Array2<C64>, plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(m.nrows(), self.n);
        let mut t = m.t().as_standard_layout().to_owned();
        self.rows(&mut t, plan);
        *m = t.reversed_axes().as_standard_layout().to_owned();
    }

    /// Position-basis operator to momentum basis: `F A F^dagger` with
    /// `<q|p> = e^{+i 2 pi q p / N} / sqrt(N)`.
    pub fn to_momentum(&self, a: &Array2<C64>) -> Array2<C64> {
        let mut b = a.clone();
        self.forward_cols(&mut b);
        self.inverse_rows(&mut b);
        b.mapv_inplace(|z| z / self.n as f64);
        b
    }

    /// Inverse of [`Dft::to_momentum`].
    pub fn to_position(&self, b: &Array2<C64>) -> Array2<C64> {
        let mut a = b.clone();
        self.inverse_cols(&mut a);
        self.forward_rows(&mut a);
        a.mapv_inplace(|z| z / self.n as f64);
        a
    }

    /// State amplitudes in position to momentum (unitary normalization).
    pub fn state_to_momentum(&self, psi: &Array1<C64>) -> Array1<C64> {
        let mut out = psi.to_vec();
        self.forward.process(&mut out);
        let s = 1.0 / (self.n as f64).sqrt();
        Array1::from_iter(out.into_iter().map(|z| z * s))
    }

    pub fn state_to_position(&self, phi: &Array1<C64>) -> Array1<C64> {
        let mut out = phi.to_vec();
        self.inverse.process(&mut out);
        let s = 1.0 / (self.n as f64).sqrt();
        Array1::from_iter(out.into_iter().map(|z| z * s))
    }
}

pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: ArrayView2<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |A - A^dagger|`.
pub fn hermiticity_residual(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

/// `max |A^dagger A - I|`.
pub fn unitarity_residual(a: &Array2<C64>) -> f64 {
    let prod = adjoint(a).dot(a);
    max_abs_diff(&prod, &identity(a.nrows()))
}

pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

/// Hilbert-Schmidt inner product `Tr(A^dagger B)`.
pub fn hs_inner(a: &Array2<C64>, b: &Array2<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn hs_norm_sqr(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Dense eigen-decomposition of a general complex matrix.
///
/// `right` and `left` hold eigenvectors as columns, each of unit 2-norm,
/// with `left[:, k]^dagger A = values[k] left[:, k]^dagger`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub right: Array2<C64>,
    pub left: Array2<C64>,
}

fn to_nalgebra(a: ArrayView2<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

fn schur(a: ArrayView2<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    let m = to_nalgebra(a);
    let s = nalgebra::Schur::try_new(m, 1e-15, 100 * n.max(10))
        .ok_or_else(|| Error::Eigen(format!("Schur iteration did not converge (n = {n})")))?;
    Ok(s.unpack())
}

/// Eigenvalues only.
pub fn eigenvalues(a: ArrayView2<C64>) -> Result<Vec<C64>> {
    let (_, t) = schur(a)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

pub fn eigen(a: ArrayView2<C64>) -> Result<Eigen> {
    let (q, t) = schur(a)?;
    let n = t.nrows();
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let guard = |d: C64| {
        if d.norm() < 1e-14 * scale {
            C64::new(1e-14 * scale, 0.0)
        } else {
            d
        }
    };

    // Right eigenvectors of T by back substitution.
    let mut xr = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lam = values[k];
        xr[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * xr[(j, k)];
            }
            xr[(i, k)] = -s / guard(t[(i, i)] - lam);
        }
    }
    // Left: T^dagger z = conj(lam) z, forward substitution on the lower triangle.
    let mut xl = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lam = values[k].conj();
        xl[(k, k)] = C64::new(1.0, 0.0);
        for i in (k + 1)..n {
            let mut s = C64::new(0.0, 0.0);
            for j in k..i {
                s += t[(j, i)].conj() * xl[(j, k)];
            }
            xl[(i, k)] = -s / guard(t[(i, i)].conj() - lam);
        }
    }
    let right = &q * xr;
    let left = &q * xl;
    let normalize = |m: DMatrix<C64>| {
        let mut out = Array2::<C64>::zeros((n, n));
        for k in 0..n {
            let norm = m.column(k).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for i in 0..n {
                out[[i, k]] = m[(i, k)] / norm;
            }
        }
        out
    };
    Ok(Eigen {
        values,
        right: normalize(right),
        left: normalize(left),
    })
}

/// Least-squares line `y = intercept + slope x`; returns (slope, intercept, R^2).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    (slope, intercept, r2)
}

/// Swap the two axes of a square matrix into a fresh standard-layout array.
pub fn transposed(a: &Array2<C64>) -> Array2<C64> {
    a.view().reversed_axes().as_standard_layout().to_owned()
}

pub(crate) fn column(a: &Array2<C64>, k: usize) -> Array1<C64> {
    a.index_axis(Axis(1), k).to_owned()
}
