use nalgebra::{Cholesky, DMatrix, DVectorView, DVectorViewMut, Dyn};

use crate::error::{Error, Result};

/// Dense symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Builds the matrix from `entry(i, j)` evaluated for `j <= i`.
    pub fn from_fn(dim: usize, mut entry: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..=i {
                let v = entry(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self(m)
    }

    /// From a full row-major square matrix; only the lower triangle is read.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("matrix must be square".into()));
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn max_diag(&self) -> f64 {
        self.0.diagonal().iter().copied().fold(0.0, f64::max)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

/// Lower-triangular Cholesky factor `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerFactor(DMatrix<f64>);

impl LowerFactor {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// `L[i][j]`; zero above the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// `L z`, written into `out`.
    pub fn mul_into(&self, z: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let z = DVectorView::from_slice(z, n);
        let mut out = DVectorViewMut::from_slice(out, n);
        out.gemv(1.0, &self.0, &z, 0.0);
    }

    /// `max |(L L^T - target)[i][j]|`.
    pub fn reconstruction_error(&self, target: &SymmetricMatrix) -> f64 {
        (&self.0 * self.0.transpose() - &target.0).amax()
    }
}

/// Multiples of the largest diagonal entry tried, in order, as diagonal
/// jitter when factorizing a Gram matrix.
pub const JITTER_LADDER: [f64; 4] = [0.0, 1e-14, 1e-12, 1e-10];

/// Cholesky factor of `G + eps I` together with the `eps` that was needed.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdFactor {
    pub factor: LowerFactor,
    /// Absolute diagonal jitter added (`0` when none was needed).
    pub jitter: f64,
}

/// Factorizes `G` as `L L^T = G + eps I`, escalating `eps` through
/// [`JITTER_LADDER`] (scaled by the largest diagonal entry) until the
/// Cholesky factorization succeeds.
pub fn psd_factor(g: &SymmetricMatrix) -> Result<PsdFactor> {
    let max_diag = g.max_diag();
    if !(max_diag > 0.0 && max_diag.is_finite()) {
        return Err(Error::FactorizationFailure { max_diag });
    }
    for rel in JITTER_LADDER {
        let jitter = rel * max_diag;
        let mut m = g.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += jitter;
        }
        if let Some(l) = blocked_cholesky(m) {
            if l.iter().all(|x| x.is_finite()) {
                return Ok(PsdFactor { factor: LowerFactor(l), jitter });
            }
        }
    }
    Err(Error::FactorizationFailure { max_diag })
}

/// Panel width of the blocked factorization.
const BLOCK: usize = 128;

/// Right-looking blocked Cholesky: each diagonal block is factorized with
/// nalgebra's `Cholesky`, the panel below it by a triangular solve, and the
/// trailing matrix is updated with one matrix product per block. `None` if
/// a diagonal block is not positive definite.
fn blocked_cholesky(mut a: DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = a.nrows();
    let mut k = 0;
    while k < n {
        let b = BLOCK.min(n - k);
        let l11 = Cholesky::<f64, Dyn>::new(a.view((k, k), (b, b)).clone_owned())?.unpack();
        a.view_mut((k, k), (b, b)).copy_from(&l11);
        let rest = n - k - b;
        if rest > 0 {
            let a21t = a.view((k + b, k), (rest, b)).transpose();
            let l21 = l11.solve_lower_triangular(&a21t)?.transpose();
            a.view_mut((k + b, k + b), (rest, rest)).gemm(-1.0, &l21, &l21.transpose(), 1.0);
            a.view_mut((k + b, k), (rest, b)).copy_from(&l21);
        }
        k += b;
    }
    a.fill_upper_triangle(0.0, 1);
    Some(a)
}
