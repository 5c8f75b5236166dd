//! Compressed sparse row matrices.

use std::ops::Range;

use super::{DenseMatrix, LinalgError};

/// Collects `(row, col, value)` entries. Duplicates are summed in insertion
/// order, so the result only depends on the order of `push` calls.
#[derive(Clone, Debug, Default)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    rows: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletBuilder { nrows, ncols, ..Default::default() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, capacity: usize) -> Self {
        TripletBuilder {
            nrows,
            ncols,
            rows: Vec::with_capacity(capacity),
            cols: Vec::with_capacity(capacity),
            values: Vec::with_capacity(capacity),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols, "({row}, {col}) out of range");
        self.rows.push(row);
        self.cols.push(col);
        self.values.push(value);
    }

    /// Adds a dense block at `(row0 + i, col0 + j)`.
    pub fn push_block(&mut self, row0: usize, col0: usize, block: &DenseMatrix) {
        for i in 0..block.nrows() {
            for j in 0..block.ncols() {
                self.push(row0 + i, col0 + j, block[(i, j)]);
            }
        }
    }

    /// Adds a dense block scattered to arbitrary global indices.
    pub fn push_scattered(&mut self, rows: &[usize], cols: &[usize], block: &DenseMatrix) {
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                self.push(r, c, block[(i, j)]);
            }
        }
    }

    pub fn extend(&mut self, other: TripletBuilder) {
        self.rows.extend(other.rows);
        self.cols.extend(other.cols);
        self.values.extend(other.values);
    }

    /// Explicit zeros are kept, so the pattern only depends on the positions.
    pub fn build(self) -> CsrMatrix {
        let n = self.nrows;
        let mut counts = vec![0usize; n + 1];
        for &r in &self.rows {
            counts[r + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut order = vec![0usize; self.values.len()];
        for (k, &r) in self.rows.iter().enumerate() {
            order[next[r]] = k;
            next[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut scratch: Vec<usize> = Vec::new();
        for r in 0..n {
            scratch.clear();
            scratch.extend_from_slice(&order[counts[r]..counts[r + 1]]);
            scratch.sort_by_key(|&k| self.cols[k]);
            let mut last = usize::MAX;
            for &k in &scratch {
                let c = self.cols[k];
                if c == last {
                    *values.last_mut().unwrap() += self.values[k];
                } else {
                    col_idx.push(c);
                    values.push(self.values[k]);
                    last = c;
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { nrows: n, ncols: self.ncols, row_ptr, col_idx, values }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix { nrows: n, ncols: n, row_ptr: (0..=n).collect(), col_idx: (0..n).collect(), values: vec![1.0; n] }
    }

    /// Validates sortedness and ranges.
    pub fn from_parts(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, LinalgError> {
        let bad = |m: &str| Err(LinalgError::DimensionMismatch(m.to_string()));
        if row_ptr.len() != nrows + 1 || row_ptr[0] != 0 || *row_ptr.last().unwrap() != col_idx.len() {
            return bad("row pointer inconsistent with index array");
        }
        if col_idx.len() != values.len() {
            return bad("index and value arrays differ in length");
        }
        for r in 0..nrows {
            if row_ptr[r] > row_ptr[r + 1] {
                return bad("row pointer decreases");
            }
            let cols = &col_idx[row_ptr[r]..row_ptr[r + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) || cols.iter().any(|&c| c >= ncols) {
                return bad("column indices out of range or not strictly increasing");
            }
        }
        Ok(CsrMatrix { nrows, ncols, row_ptr, col_idx, values })
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut b = TripletBuilder::new(a.nrows(), a.ncols());
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                if a[(i, j)] != 0.0 {
                    b.push(i, j, a[(i, j)]);
                }
            }
        }
        b.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&c, v)| v * x[c]).sum();
        }
    }

    /// `y += s A x`.
    pub fn mul_vec_add(&self, s: f64, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi += s * cols.iter().zip(vals).map(|(&c, v)| v * x[c]).sum::<f64>();
        }
    }

    /// `uᵀ A v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        assert_eq!(u.len(), self.nrows);
        (0..self.nrows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                u[i] * cols.iter().zip(vals).map(|(&c, a)| a * v[c]).sum::<f64>()
            })
            .sum()
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                col_idx[next[c]] = i;
                values[next[c]] = v;
                next[c] += 1;
            }
        }
        CsrMatrix { nrows: self.ncols, ncols: self.nrows, row_ptr: counts, col_idx, values }
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// `Σ s_k A_k` over the union pattern.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> Result<Self, LinalgError> {
        let Some(&(_, first)) = terms.first() else {
            return Err(LinalgError::DimensionMismatch("empty linear combination".into()));
        };
        let (nr, nc) = (first.nrows, first.ncols);
        if let Some((_, m)) = terms.iter().find(|(_, m)| m.nrows != nr || m.ncols != nc) {
            return Err(LinalgError::DimensionMismatch(format!("{}x{} vs {}x{}", nr, nc, m.nrows, m.ncols)));
        }
        let mut row_ptr = Vec::with_capacity(nr + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut acc = vec![0.0; nc];
        let mut used = vec![false; nc];
        let mut cols: Vec<usize> = Vec::new();
        for i in 0..nr {
            cols.clear();
            for (s, m) in terms {
                let (c, v) = m.row(i);
                for (&j, &a) in c.iter().zip(v) {
                    if !used[j] {
                        used[j] = true;
                        cols.push(j);
                    }
                    acc[j] += s * a;
                }
            }
            cols.sort_unstable();
            for &j in &cols {
                col_idx.push(j);
                values.push(acc[j]);
                acc[j] = 0.0;
                used[j] = false;
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix { nrows: nr, ncols: nc, row_ptr, col_idx, values })
    }

    /// Sub-matrix `A[rows, cols]`.
    pub fn block(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for i in rows.clone() {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                if cols.contains(&j) {
                    col_idx.push(j - cols.start);
                    values.push(a);
                }
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix { nrows: rows.len(), ncols: cols.len(), row_ptr, col_idx, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |a_ij - a_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let t = self.transpose();
        CsrMatrix::linear_combination(&[(1.0, self), (-1.0, &t)]).map_or(f64::INFINITY, |d| d.max_abs())
    }

    /// Max column sum.
    pub fn norm1(&self) -> f64 {
        let mut sums = vec![0.0; self.ncols];
        for (&c, v) in self.col_idx.iter().zip(&self.values) {
            sums[c] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                d[(i, j)] = a;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_sorted() {
        let mut b = TripletBuilder::new(2, 3);
        b.push(1, 2, 1.0);
        b.push(0, 1, 2.0);
        b.push(1, 0, 3.0);
        b.push(1, 2, 4.0);
        let a = b.build();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.row(1), (&[0usize, 2][..], &[3.0, 5.0][..]));
        assert_eq!(a.get(0, 1), 2.0);
        assert_eq!(a.get(0, 0), 0.0);
    }

    #[test]
    fn transpose_and_products() {
        let d = DenseMatrix::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 3.0, -1.0]]);
        let a = CsrMatrix::from_dense(&d);
        assert_eq!(a.transpose().to_dense(), d.transpose());
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 2.0]);
        assert_eq!(a.bilinear(&[1.0, 2.0], &[1.0, 1.0, 1.0]), 7.0);
        assert_eq!(a.norm1(), 3.0);
    }

    #[test]
    fn combination_uses_union_pattern() {
        let a = CsrMatrix::identity(3);
        let b = CsrMatrix::from_dense(&DenseMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
        ]));
        let c = CsrMatrix::linear_combination(&[(2.0, &a), (-1.0, &b)]).unwrap();
        assert_eq!(c.nnz(), 5);
        assert_eq!(c.get(0, 1), -1.0);
        assert_eq!(c.get(2, 2), 2.0);
        assert_eq!(b.symmetry_defect(), 1.0);
        assert_eq!(c.block(0..2, 1..3).to_dense(), DenseMatrix::from_rows(&[vec![-1.0, 0.0], vec![2.0, 0.0]]));
    }

    #[test]
    fn from_parts_rejects_unsorted() {
        assert!(CsrMatrix::from_parts(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::from_parts(1, 3, vec![0, 2], vec![1, 2], vec![1.0, 1.0]).is_ok());
    }
}
