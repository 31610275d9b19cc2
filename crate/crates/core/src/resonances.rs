//! Ruelle-Pollicott resonances of the coarse-grained channel.
//!
//! Three routes: full diagonalization of the `N^2 x N^2` superoperator
//! (small `N`), Arnoldi iteration in the space of Hermitian operators
//! (large `N`), and exponential fits to the tail of `|O1(t)|`.

use std::fmt;

use log::warn;
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::maps::ClassicalMapSpec;
use crate::operator::OperatorMatrix;
use crate::otoc::{check_window, OtocSeries, Propagator};
use crate::phase_space::{check_dim, sine_position};

/// Largest `N` for the dense superoperator.
pub const DENSE_LIMIT: usize = 24;
/// Ritz values with residual above this are reported as not converged.
pub const CONVERGENCE_TOL: f64 = 1e-4;
/// Relative modulus window defining the leading cluster.
pub const CLUSTER_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dense,
    Krylov,
    TailFit,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dense => "dense",
            Method::Krylov => "krylov",
            Method::TailFit => "tail_fit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumParams {
    pub n: usize,
    pub epsilon: f64,
    pub map: ClassicalMapSpec,
}

#[derive(Debug, Clone)]
pub struct ResonanceSpectrum {
    /// Sorted by decreasing modulus.
    pub alphas: Vec<C64>,
    pub method: Method,
    pub params: SpectrumParams,
    /// `||S R_i - alpha_i R_i||` for unit-norm `R_i`.
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
    /// Two eigenvalues closer than `1e-8`.
    pub degenerate: bool,
}

impl ResonanceSpectrum {
    /// Indices of the first eigenvalue with modulus below `1 - 1e-8`
    /// (the leading nontrivial resonance) and of all others within
    /// [`CLUSTER_TOL`] of its modulus.
    pub fn leading_cluster(&self) -> Vec<usize> {
        let Some(first) = self.alphas.iter().position(|a| a.norm() < 1.0 - 1e-8) else {
            return Vec::new();
        };
        let lead = self.alphas[first].norm();
        (first..self.alphas.len())
            .filter(|&i| (self.alphas[i].norm() - lead).abs() <= CLUSTER_TOL * lead)
            .collect()
    }

    /// Leading nontrivial resonance.
    pub fn alpha1(&self) -> Option<C64> {
        self.leading_cluster().first().map(|&i| self.alphas[i])
    }

    /// Moduli of the leading `k` nontrivial resonances.
    pub fn nontrivial_moduli(&self, k: usize) -> Vec<f64> {
        self.alphas
            .iter()
            .map(|a| a.norm())
            .filter(|m| *m < 1.0 - 1e-8)
            .take(k)
            .collect()
    }
}

fn sort_by_modulus(values: &[C64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| {
        values[j]
            .norm()
            .partial_cmp(&values[i].norm())
            .unwrap()
            .then(values[j].arg().partial_cmp(&values[i].arg()).unwrap())
    });
    idx
}

fn has_degeneracy(values: &[C64], tol: f64) -> bool {
    let mut sorted: Vec<C64> = values.to_vec();
    sorted.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    for i in 0..sorted.len() {
        for j in (i + 1)..sorted.len() {
            if sorted[j].re - sorted[i].re > tol {
                break;
            }
            if (sorted[j] - sorted[i]).norm() < tol {
                return true;
            }
        }
    }
    false
}

fn params_of<P: Propagator + ?Sized>(prop: &P) -> SpectrumParams {
    SpectrumParams {
        n: prop.space().dim(),
        epsilon: prop.epsilon(),
        map: prop.spec(),
    }
}

/// Matrix of the channel on `vec(A)[a N + b] = A[a, b]`: column `j` is the
/// image of the `j`-th matrix unit.
pub fn dense_superoperator<P: Propagator + ?Sized>(prop: &P) -> Result<Array2<C64>> {
    let n = prop.space().dim();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            op: "dense_superoperator",
            n,
            limit: DENSE_LIMIT,
        });
    }
    let n2 = n * n;
    let mut s = Array2::<C64>::zeros((n2, n2));
    let mut unit = Array2::<C64>::zeros((n, n));
    for j in 0..n2 {
        unit[[j / n, j % n]] = C64::new(1.0, 0.0);
        let image = prop.step_dense(&unit);
        unit[[j / n, j % n]] = C64::new(0.0, 0.0);
        for (k, z) in image.iter().enumerate() {
            s[[k, j]] = *z;
        }
    }
    Ok(s)
}

/// Complete eigensystem of a dense superoperator, with biorthogonal
/// left/right eigen-operators.
#[derive(Debug, Clone)]
pub struct DenseDecomposition {
    pub spectrum: ResonanceSpectrum,
    /// `right[i]` is `R_i` as an `N x N` matrix, unit Hilbert-Schmidt norm.
    pub right: Vec<Array2<C64>>,
    /// `left[i]` is `L_i`, scaled so `Tr(L_i^dagger R_j) = delta_ij`.
    pub left: Vec<Array2<C64>>,
}

impl DenseDecomposition {
    /// `x_i = Tr(L_i^dagger A)`.
    pub fn coefficients(&self, a: &Array2<C64>) -> Vec<C64> {
        self.left.iter().map(|l| linalg::hs_inner(l, a)).collect()
    }

    /// `sum_i x_i alpha_i^t R_i` over the selected indices.
    pub fn evolve(&self, a: &Array2<C64>, t: usize, terms: &[usize]) -> Array2<C64> {
        let n = a.nrows();
        let mut out = Array2::<C64>::zeros((n, n));
        for &i in terms {
            let x = linalg::hs_inner(&self.left[i], a);
            let w = x * self.spectrum.alphas[i].powu(t as u32);
            out.scaled_add(w, &self.right[i]);
        }
        out
    }

    /// `sum_i alpha_i R_i L_i^dagger` as an `N^2 x N^2` matrix.
    pub fn resynthesize(&self) -> Array2<C64> {
        let n = self.right[0].nrows();
        let n2 = n * n;
        let mut s = Array2::<C64>::zeros((n2, n2));
        for (i, alpha) in self.spectrum.alphas.iter().enumerate() {
            let r = self.right[i].as_slice().unwrap();
            let l = self.left[i].as_slice().unwrap();
            for a in 0..n2 {
                let ra = alpha * r[a];
                for b in 0..n2 {
                    s[[a, b]] += ra * l[b].conj();
                }
            }
        }
        s
    }
}

pub fn full_spectrum(matrix: &Array2<C64>, params: SpectrumParams) -> Result<DenseDecomposition> {
    let n2 = matrix.nrows();
    let n = (n2 as f64).sqrt().round() as usize;
    if n * n != n2 || matrix.ncols() != n2 {
        return Err(Error::InvalidParameter(format!(
            "superoperator must be N^2 x N^2, got {} x {}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let eig = linalg::eigen(matrix.view())?;
    let order = sort_by_modulus(&eig.values);
    let alphas: Vec<C64> = order.iter().map(|&i| eig.values[i]).collect();
    let mut right = Vec::with_capacity(n2);
    let mut left = Vec::with_capacity(n2);
    let mut residuals = Vec::with_capacity(n2);
    for (&k, alpha) in order.iter().zip(&alphas) {
        let r = linalg::column(&eig.right, k);
        let mut l = linalg::column(&eig.left, k);
        let overlap: C64 = l.iter().zip(r.iter()).map(|(x, y)| x.conj() * y).sum();
        if overlap.norm() < 1e-12 {
            warn!("eigenvalue {alpha} has nearly orthogonal left/right vectors (overlap {:.2e})", overlap.norm());
        }
        let s = overlap.conj();
        l.mapv_inplace(|z| z / s);
        let sr = matrix.dot(&r);
        residuals.push((sr - r.mapv(|z| z * alpha)).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
        right.push(r.into_shape_with_order((n, n)).unwrap());
        left.push(l.into_shape_with_order((n, n)).unwrap());
    }
    let degenerate = has_degeneracy(&alphas, 1e-8);
    let converged = residuals.iter().map(|r| *r < CONVERGENCE_TOL).collect();
    Ok(DenseDecomposition {
        spectrum: ResonanceSpectrum {
            alphas,
            method: Method::Dense,
            params,
            residuals,
            converged,
            degenerate,
        },
        right,
        left,
    })
}

/// Dense superoperator of `prop` followed by [`full_spectrum`].
pub fn dense_spectrum<P: Propagator + ?Sized>(prop: &P) -> Result<DenseDecomposition> {
    full_spectrum(&dense_superoperator(prop)?, params_of(prop))
}

/// Hermitian matrices as real vectors of length `N^2`: the diagonal, then
/// `sqrt 2` times the real and imaginary parts of the upper triangle. The
/// map is an isometry from the Hilbert-Schmidt inner product.
struct HermitianPacking {
    n: usize,
}

impl HermitianPacking {
    fn pack(&self, a: &Array2<C64>) -> Vec<f64> {
        let n = self.n;
        let s = std::f64::consts::SQRT_2;
        let mut v = Vec::with_capacity(n * n);
        v.extend((0..n).map(|i| a[[i, i]].re));
        for i in 0..n {
            for j in (i + 1)..n {
                // average both triangles to stay Hermitian under round-off
                let z = (a[[i, j]] + a[[j, i]].conj()) * 0.5;
                v.push(s * z.re);
                v.push(s * z.im);
            }
        }
        v
    }

    /// Project out the identity component.
    fn remove_trace(&self, v: &mut [f64]) {
        let mean = v[..self.n].iter().sum::<f64>() / self.n as f64;
        v[..self.n].iter_mut().for_each(|x| *x -= mean);
    }

    fn unpack(&self, v: &[f64]) -> Array2<C64> {
        let n = self.n;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut a = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = C64::new(v[i], 0.0);
        }
        let mut k = n;
        for i in 0..n {
            for j in (i + 1)..n {
                let z = C64::new(v[k] * s, v[k + 1] * s);
                a[[i, j]] = z;
                a[[j, i]] = z.conj();
                k += 2;
            }
        }
        a
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Starting operator for the Krylov iteration.
#[derive(Debug, Clone)]
pub enum KrylovSeed {
    /// `X = sin(2 pi q / N)`.
    Position,
    /// Random traceless Hermitian matrix from a seeded generator.
    Random(u64),
    Operator(OperatorMatrix),
}

impl KrylovSeed {
    fn build(&self, n: usize) -> Result<Array2<C64>> {
        match self {
            KrylovSeed::Position => {
                let space = crate::phase_space::TorusSpace::new(n)?;
                Ok(sine_position(&space).to_dense())
            }
            KrylovSeed::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut a = Array2::<C64>::zeros((n, n));
                for i in 0..n {
                    a[[i, i]] = C64::new(rng.random::<f64>() - 0.5, 0.0);
                    for j in (i + 1)..n {
                        let z = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                        a[[i, j]] = z;
                        a[[j, i]] = z.conj();
                    }
                }
                let shift = linalg::trace(&a) / n as f64;
                for i in 0..n {
                    a[[i, i]] -= shift;
                }
                Ok(a)
            }
            KrylovSeed::Operator(op) => {
                if op.dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: op.dim() });
                }
                op.require_hermitian(1e-8)?;
                Ok(op.to_dense())
            }
        }
    }
}

/// Leading resonances from Arnoldi iteration on Hermitian operators.
///
/// The Krylov space `span{A0, S A0, ..., S^{depth-1} A0}` is orthonormalized
/// in the Hilbert-Schmidt inner product with two passes of Gram-Schmidt; the
/// Ritz values of the projected (real) Hessenberg matrix are returned with
/// residuals `h_{m+1,m} |y_m|`.
pub fn krylov_leading<P: Propagator + ?Sized>(
    prop: &P,
    seed: &KrylovSeed,
    depth: usize,
    n_wanted: usize,
) -> Result<ResonanceSpectrum> {
    let n = prop.space().dim();
    if depth < n_wanted + 2 {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} must be at least n_wanted + 2 = {}",
            n_wanted + 2
        )));
    }
    let a0 = seed.build(n)?;
    let tr = linalg::trace(&a0).norm();
    let scale = linalg::hs_norm_sqr(&a0).sqrt();
    if scale == 0.0 {
        return Err(Error::InvalidParameter("seed operator is zero".into()));
    }
    if tr > 1e-10 * scale * (n as f64).sqrt() {
        return Err(Error::NotTraceless { trace: tr });
    }
    let pack = HermitianPacking { n };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(depth + 1);
    let mut v = pack.pack(&a0);
    pack.remove_trace(&mut v);
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    basis.push(v);
    let mut h = vec![vec![0.0f64; depth]; depth + 1];
    let mut m = depth;
    for j in 0..depth {
        let image = prop.step_dense(&pack.unpack(&basis[j]));
        let mut w = pack.pack(&image);
        pack.remove_trace(&mut w);
        for _pass in 0..2 {
            for (i, vi) in basis.iter().enumerate() {
                let c = dot(vi, &w);
                h[i][j] += c;
                axpy(-c, vi, &mut w);
            }
        }
        let beta = dot(&w, &w).sqrt();
        h[j + 1][j] = beta;
        if beta < 1e-13 {
            m = j + 1;
            break;
        }
        w.iter_mut().for_each(|x| *x /= beta);
        basis.push(w);
    }
    let hm = Array2::from_shape_fn((m, m), |(i, j)| C64::new(h[i][j], 0.0));
    let beta = h[m][m - 1];
    let eig = linalg::eigen(hm.view())?;
    let order = sort_by_modulus(&eig.values);
    let keep = n_wanted.min(m);
    let mut alphas = Vec::with_capacity(keep);
    let mut residuals = Vec::with_capacity(keep);
    for &k in order.iter().take(keep) {
        alphas.push(eig.values[k]);
        residuals.push(beta * eig.right[[m - 1, k]].norm());
    }
    let converged: Vec<bool> = residuals.iter().map(|r| *r < CONVERGENCE_TOL).collect();
    if converged.iter().any(|c| !c) {
        warn!(
            "krylov: {} of {} Ritz values above residual {CONVERGENCE_TOL:e} at depth {m}",
            converged.iter().filter(|c| !**c).count(),
            keep
        );
    }
    let degenerate = has_degeneracy(&alphas, 1e-8);
    Ok(ResonanceSpectrum {
        alphas,
        method: Method::Krylov,
        params: params_of(prop),
        residuals,
        converged,
        degenerate,
    })
}

/// Exponential tail fit of `|O1(t)| ~ |alpha_1|^{2t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub alpha: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub start: usize,
    pub end: usize,
    /// Some `|O1|` inside the window fell below `1e-13`.
    pub hit_floor: bool,
}

pub const O1_FLOOR: f64 = 1e-13;

/// `|alpha_1| = exp(slope / 2)` from least squares on `ln |O1(t)|` over
/// `t in [start, end]` (at least 4 points).
pub fn fit_tail_rate(series: &OtocSeries, start: usize, end: usize) -> Result<TailFit> {
    check_window(start, end, series.len())?;
    if end - start + 1 < 4 {
        return Err(Error::InvalidWindow {
            start,
            end,
            len: series.len(),
        });
    }
    let pts = &series.points[start..=end];
    let hit_floor = pts.iter().any(|p| p.o1.norm() < O1_FLOOR);
    if hit_floor {
        warn!("tail fit over [{start}, {end}]: |O1| reaches the numerical floor {O1_FLOOR:e}");
    }
    let (t, y): (Vec<f64>, Vec<f64>) = pts
        .iter()
        .map(|p| (p.t as f64, p.o1.norm().max(f64::MIN_POSITIVE).ln()))
        .unzip();
    let (slope, _, r2) = linalg::linear_fit(&t, &y);
    Ok(TailFit {
        alpha: (slope / 2.0).exp(),
        slope,
        r_squared: r2,
        start,
        end,
        hit_floor,
    })
}

/// Margin above [`O1_FLOOR`] used when trimming default tail windows.
pub const TAIL_TRIM_LEVEL: f64 = 1e-11;

/// Shorten `[start, end]` so that it stops before `|O1|` first drops below
/// `level`. `None` if fewer than four points remain.
pub fn trim_tail_window(series: &OtocSeries, start: usize, end: usize, level: f64) -> Option<(usize, usize)> {
    let end = end.min(series.len().checked_sub(1)?);
    let stop = (start..=end)
        .find(|&t| series.points[t].o1.norm() < level)
        .map_or(end, |t| t.saturating_sub(1));
    (stop >= start + 3).then_some((start, stop))
}

/// `O1(t)` predicted from the spectral expansion of `A`, keeping the
/// eigen-operators listed in `terms` (all of them when `None`).
pub fn spectral_o1_prediction(
    decomp: &DenseDecomposition,
    a: &OperatorMatrix,
    b: &OperatorMatrix,
    t: usize,
    terms: Option<&[usize]>,
) -> Result<C64> {
    let n = decomp.right[0].nrows();
    let space = crate::phase_space::TorusSpace::new(n)?;
    check_dim(&space, a)?;
    check_dim(&space, b)?;
    let all: Vec<usize> = (0..decomp.right.len()).collect();
    let at = decomp.evolve(&a.to_dense(), t, terms.unwrap_or(&all));
    let bd = b.to_dense();
    let ab = at.dot(&bd);
    let tr: C64 = (0..n).map(|i| (0..n).map(|j| ab[[i, j]] * ab[[j, i]]).sum::<C64>()).sum();
    Ok(tr / n as f64)
}

/// Overlap `|Tr(R^dagger I)| / sqrt(N)` of an eigen-operator with the
/// normalized identity.
pub fn identity_overlap(r: &Array2<C64>) -> f64 {
    let n = r.nrows();
    let tr: C64 = r.diag().sum();
    tr.norm() / (n as f64).sqrt() / linalg::hs_norm_sqr(r).sqrt()
}

/// Packed vectors round-trip helper exposed for tests.
#[doc(hidden)]
pub fn pack_roundtrip(a: &Array2<C64>) -> (Array1<f64>, Array2<C64>) {
    let p = HermitianPacking { n: a.nrows() };
    let v = p.pack(a);
    let back = p.unpack(&v);
    (Array1::from(v), back)
}
