//! Small row-major dense matrices for element-local work and time matrices.

use std::ops::{Index, IndexMut};

use super::LinalgError;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Panics if the rows have unequal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        DenseMatrix { nrows, ncols, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scaled(&self, s: f64) -> Self {
        DenseMatrix { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} + {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(DenseMatrix { nrows: self.nrows, ncols: self.ncols, data })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.ncols != other.nrows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.ncols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.ncols)
            .map(|j| (0..self.nrows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Result<DenseLu, LinalgError> {
        DenseLu::new(self)
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        let lu = self.lu()?;
        let n = self.nrows;
        let mut inv = Self::zeros(n, n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            col.iter_mut().for_each(|c| *c = 0.0);
            col[j] = 1.0;
            lu.solve_in_place(&mut col);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }

    /// Cholesky factor of a symmetric positive definite matrix.
    pub fn cholesky(&self) -> Result<Cholesky, LinalgError> {
        Cholesky::new(self)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &self.data[i * self.ncols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.data[i * self.ncols + j]
    }
}

/// LU with partial pivoting.
#[derive(Clone, Debug)]
pub struct DenseLu {
    factors: DenseMatrix,
    perm: Vec<usize>,
}

impl DenseLu {
    fn new(a: &DenseMatrix) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::DimensionMismatch(format!("LU of {}x{}", a.nrows, a.ncols)));
        }
        let n = a.nrows;
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for k in 0..n {
            let (p, pv) = (k..n).map(|i| (i, f[(i, k)].abs())).fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            if pv <= f64::EPSILON * scale * n as f64 || pv == 0.0 {
                return Err(LinalgError::Singular { index: k });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    f.data.swap(p * n + j, k * n + j);
                }
            }
            let d = f[(k, k)];
            for i in k + 1..n {
                let l = f[(i, k)] / d;
                f[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        f[(i, j)] -= l * f[(k, j)];
                    }
                }
            }
        }
        Ok(DenseLu { factors: f, perm })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.perm.len();
        let f = &self.factors;
        let pb: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        b.copy_from_slice(&pb);
        for i in 0..n {
            let s: f64 = (0..i).map(|j| f[(i, j)] * b[j]).sum();
            b[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| f[(i, j)] * b[j]).sum();
            b[i] = (b[i] - s) / f[(i, i)];
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cholesky {
    lower: DenseMatrix,
}

impl Cholesky {
    fn new(a: &DenseMatrix) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::DimensionMismatch(format!("Cholesky of {}x{}", a.nrows, a.ncols)));
        }
        let n = a.nrows;
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(LinalgError::Singular { index: j });
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Cholesky { lower: l })
    }

    pub fn lower(&self) -> &DenseMatrix {
        &self.lower
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let l = &self.lower;
        let n = l.nrows;
        for i in 0..n {
            let s: f64 = (0..i).map(|k| l[(i, k)] * b[k]).sum();
            b[i] = (b[i] - s) / l[(i, i)];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| l[(k, i)] * b[k]).sum();
            b[i] = (b[i] - s) / l[(i, i)];
        }
    }
}
