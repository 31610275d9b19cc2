//! `OperatorMatrix`: an N x N observable or propagator, stored densely in the
//! position basis or as a diagonal in a tagged basis.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{self, Dft, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Position,
    Momentum,
}

#[derive(Debug, Clone)]
enum Storage {
    Dense(Array2<C64>),
    Diagonal { basis: Basis, diag: Array1<C64> },
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    storage: Storage,
}

impl OperatorMatrix {
    /// Wrap a dense matrix given in the position basis.
    pub fn dense(entries: Array2<C64>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols(), "operator must be square");
        OperatorMatrix {
            storage: Storage::Dense(entries),
        }
    }

    pub fn diagonal(basis: Basis, diag: Array1<C64>) -> Self {
        OperatorMatrix {
            storage: Storage::Diagonal { basis, diag },
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(Basis::Position, Array1::from_elem(n, C64::new(1.0, 0.0)))
    }

    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Dense(a) => a.nrows(),
            Storage::Diagonal { diag, .. } => diag.len(),
        }
    }

    /// Basis the stored entries refer to. Dense storage is always position.
    pub fn basis(&self) -> Basis {
        match &self.storage {
            Storage::Dense(_) => Basis::Position,
            Storage::Diagonal { basis, .. } => *basis,
        }
    }

    pub fn as_diagonal(&self) -> Option<(Basis, &Array1<C64>)> {
        match &self.storage {
            Storage::Diagonal { basis, diag } => Some((*basis, diag)),
            Storage::Dense(_) => None,
        }
    }

    pub fn as_dense(&self) -> Option<&Array2<C64>> {
        match &self.storage {
            Storage::Dense(a) => Some(a),
            Storage::Diagonal { .. } => None,
        }
    }

    /// Dense position-basis matrix.
    pub fn to_dense(&self) -> Array2<C64> {
        match &self.storage {
            Storage::Dense(a) => a.clone(),
            Storage::Diagonal {
                basis: Basis::Position,
                diag,
            } => Array2::from_diag(diag),
            Storage::Diagonal {
                basis: Basis::Momentum,
                diag,
            } => Dft::new(diag.len()).to_position(&Array2::from_diag(diag)),
        }
    }

    pub fn into_dense(self) -> Array2<C64> {
        match self.storage {
            Storage::Dense(a) => a,
            _ => self.to_dense(),
        }
    }

    /// Dense matrix in the momentum basis.
    pub fn to_momentum_dense(&self) -> Array2<C64> {
        match &self.storage {
            Storage::Diagonal {
                basis: Basis::Momentum,
                diag,
            } => Array2::from_diag(diag),
            _ => Dft::new(self.dim()).to_momentum(&self.to_dense()),
        }
    }

    pub fn adjoint(&self) -> Self {
        match &self.storage {
            Storage::Dense(a) => Self::dense(linalg::adjoint(a)),
            Storage::Diagonal { basis, diag } => Self::diagonal(*basis, diag.mapv(|z| z.conj())),
        }
    }

    pub fn trace(&self) -> C64 {
        match &self.storage {
            Storage::Dense(a) => linalg::trace(a),
            Storage::Diagonal { diag, .. } => diag.sum(),
        }
    }

    pub fn hermiticity_residual(&self) -> f64 {
        match &self.storage {
            Storage::Dense(a) => linalg::hermiticity_residual(a),
            Storage::Diagonal { diag, .. } => {
                diag.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
            }
        }
    }

    pub fn unitarity_residual(&self) -> f64 {
        match &self.storage {
            Storage::Dense(a) => linalg::unitarity_residual(a),
            Storage::Diagonal { diag, .. } => diag
                .iter()
                .map(|z| (z.norm_sqr() - 1.0).abs())
                .fold(0.0, f64::max),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() < tol
    }

    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        let residual = self.hermiticity_residual();
        if residual < tol {
            Ok(())
        } else {
            Err(Error::NotHermitian { residual })
        }
    }

    pub fn scaled(&self, s: C64) -> Self {
        match &self.storage {
            Storage::Dense(a) => Self::dense(a.mapv(|z| z * s)),
            Storage::Diagonal { basis, diag } => Self::diagonal(*basis, diag.mapv(|z| z * s)),
        }
    }

    /// Dense product `self * other` in the position basis.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        match (&self.storage, &other.storage) {
            (
                Storage::Diagonal { basis: b1, diag: d1 },
                Storage::Diagonal { basis: b2, diag: d2 },
            ) if b1 == b2 => Ok(Self::diagonal(*b1, d1 * d2)),
            _ => Ok(Self::dense(self.to_dense().dot(&other.to_dense()))),
        }
    }

    /// `max |self - other|` on dense position-basis entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff(&self.to_dense(), &other.to_dense())
    }
}

impl From<Array2<C64>> for OperatorMatrix {
    fn from(a: Array2<C64>) -> Self {
        Self::dense(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn momentum_diagonal_densifies_to_circulant() {
        let n = 5;
        let d = Array1::from_iter((0..n).map(|p| C64::new(p as f64, 0.0)));
        let op = OperatorMatrix::diagonal(Basis::Momentum, d);
        let a = op.to_dense();
        // a function of momentum is translation invariant in position
        for i in 0..n {
            for j in 0..n {
                let k = ((i + n - j) % n, 0);
                assert!((a[[i, j]] - a[[k.0, k.1]]).norm() < 1e-12);
            }
        }
        assert!((op.trace() - C64::new(10.0, 0.0)).norm() < 1e-12);
        assert!((linalg::trace(&a) - C64::new(10.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn mismatched_product_is_rejected() {
        let a = OperatorMatrix::identity(3);
        let b = OperatorMatrix::identity(4);
        assert!(matches!(
            a.matmul(&b),
            Err(Error::DimensionMismatch { expected: 3, got: 4 })
        ));
    }
}
