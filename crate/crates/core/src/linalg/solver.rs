//! Direct sparse LU backed by faer.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{c64, MatMut};

use super::{CsrMatrix, LinalgError};

/// Relative residual above which a factorization is declared singular.
const SINGULAR_RESIDUAL: f64 = 1e-6;

/// LU factorization of a square sparse matrix, reusable across right-hand
/// sides.
pub struct SparseLu {
    n: usize,
    // factorization of the transpose: the CSR arrays of A are the CSC arrays of Aᵀ
    lu_transpose: Lu<usize, f64>,
}

impl std::fmt::Debug for SparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseLu").field("n", &self.n).finish_non_exhaustive()
    }
}

impl SparseLu {
    pub fn new(a: &CsrMatrix) -> Result<Self, LinalgError> {
        if a.nrows() != a.ncols() {
            return Err(LinalgError::DimensionMismatch(format!("LU of {}x{}", a.nrows(), a.ncols())));
        }
        let n = a.nrows();
        let symbolic = SymbolicSparseColMat::new_checked(n, n, a.row_ptr().to_vec(), None, a.col_idx().to_vec());
        let at = SparseColMat::new(symbolic, a.values().to_vec());
        let lu_transpose = at.sp_lu().map_err(map_lu_error)?;
        drop(at);
        let lu = SparseLu { n, lu_transpose };
        lu.probe(a)?;
        Ok(lu)
    }

    fn probe(&self, a: &CsrMatrix) -> Result<(), LinalgError> {
        if self.n == 0 {
            return Ok(());
        }
        let ones = vec![1.0; self.n];
        let b = a.mul_vec(&ones);
        let x = self.solve(&b);
        let residual = relative_residual(a, &x, &b);
        let err = x.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        if !residual.is_finite() || !err.is_finite() || residual > SINGULAR_RESIDUAL {
            return Err(LinalgError::NumericallySingular { residual });
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        self.lu_transpose.solve_transpose_in_place(MatMut::from_column_major_slice_mut(b, self.n, 1));
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        self.lu_transpose.solve_in_place(MatMut::from_column_major_slice_mut(b, self.n, 1));
    }
}

fn map_lu_error(e: LuError) -> LinalgError {
    match e {
        LuError::SymbolicSingular { index } => LinalgError::Singular { index },
        LuError::Generic(g) => LinalgError::Factorization(format!("{g:?}")),
    }
}

/// LU factorization of a complex matrix stored on a real CSR pattern.
pub struct ComplexSparseLu {
    n: usize,
    lu_transpose: Lu<usize, c64>,
}

impl std::fmt::Debug for ComplexSparseLu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComplexSparseLu").field("n", &self.n).finish_non_exhaustive()
    }
}

impl ComplexSparseLu {
    /// `values[k]` is the entry at position `k` of the pattern of `pattern`.
    pub fn new(pattern: &CsrMatrix, values: Vec<c64>) -> Result<Self, LinalgError> {
        let n = pattern.nrows();
        if n != pattern.ncols() || values.len() != pattern.nnz() {
            return Err(LinalgError::DimensionMismatch(format!(
                "complex LU of {}x{} with {} values for {} entries",
                n,
                pattern.ncols(),
                values.len(),
                pattern.nnz()
            )));
        }
        let symbolic =
            SymbolicSparseColMat::new_checked(n, n, pattern.row_ptr().to_vec(), None, pattern.col_idx().to_vec());
        let probe_rhs: Vec<c64> = (0..n)
            .map(|i| {
                let (lo, hi) = (pattern.row_ptr()[i], pattern.row_ptr()[i + 1]);
                values[lo..hi].iter().copied().sum()
            })
            .collect();
        let at = SparseColMat::new(symbolic, values);
        let lu_transpose = at.sp_lu().map_err(map_lu_error)?;
        drop(at);
        let lu = ComplexSparseLu { n, lu_transpose };
        let mut x = probe_rhs.clone();
        lu.solve_in_place(&mut x);
        let err = x.iter().map(|v| (v - c64::new(1.0, 0.0)).norm()).fold(0.0, f64::max);
        if !(err <= SINGULAR_RESIDUAL.sqrt()) {
            return Err(LinalgError::NumericallySingular { residual: err });
        }
        Ok(lu)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [c64]) {
        assert_eq!(b.len(), self.n);
        self.lu_transpose.solve_transpose_in_place(MatMut::from_column_major_slice_mut(b, self.n, 1));
    }
}

/// `‖A x − b‖₂ / ‖b‖₂` (absolute residual when `b = 0`).
pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nb > 0.0 {
        r / nb
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseMatrix, TripletBuilder};

    #[test]
    fn identity_returns_rhs() {
        let lu = SparseLu::new(&CsrMatrix::identity(5)).unwrap();
        let b = vec![1.0, -2.0, 3.0, 0.5, 9.0];
        assert_eq!(lu.solve(&b), b);
    }

    #[test]
    fn hand_system() {
        let a = CsrMatrix::from_dense(&DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]));
        let x = SparseLu::new(&a).unwrap().solve(&[3.0, 3.0]);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nonsymmetric_and_transpose() {
        let d = DenseMatrix::from_rows(&[vec![4.0, 1.0, 0.0], vec![0.0, 3.0, 2.0], vec![1.0, 0.0, 5.0]]);
        let a = CsrMatrix::from_dense(&d);
        let lu = SparseLu::new(&a).unwrap();
        let b = vec![1.0, 2.0, 3.0];
        let x = lu.solve(&b);
        assert!(relative_residual(&a, &x, &b) < 1e-15);
        let mut y = b.clone();
        lu.solve_transpose_in_place(&mut y);
        assert!(relative_residual(&a.transpose(), &y, &b) < 1e-15);
    }

    #[test]
    fn complex_system() {
        // [[1+i, 2], [0, 3i]] x = b
        let mut t = TripletBuilder::new(2, 2);
        t.push(0, 0, 1.0);
        t.push(0, 1, 1.0);
        t.push(1, 1, 1.0);
        let pattern = t.build();
        let values = vec![c64::new(1.0, 1.0), c64::new(2.0, 0.0), c64::new(0.0, 3.0)];
        let lu = ComplexSparseLu::new(&pattern, values).unwrap();
        let x = [c64::new(0.5, -1.0), c64::new(2.0, 0.25)];
        let mut b = vec![c64::new(1.0, 1.0) * x[0] + c64::new(2.0, 0.0) * x[1], c64::new(0.0, 3.0) * x[1]];
        lu.solve_in_place(&mut b);
        assert!((b[0] - x[0]).norm() < 1e-15 && (b[1] - x[1]).norm() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut t = TripletBuilder::new(3, 3);
        t.push(0, 0, 1.0);
        t.push(1, 1, 1.0);
        t.push(0, 1, 1.0);
        let err = SparseLu::new(&t.build()).unwrap_err();
        assert!(matches!(err, LinalgError::Singular { .. } | LinalgError::NumericallySingular { .. }), "{err:?}");
        let d = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(SparseLu::new(&CsrMatrix::from_dense(&d)).is_err());
    }
}
