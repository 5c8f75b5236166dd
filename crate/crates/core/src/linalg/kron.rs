//! Kronecker sums `Σ_k T_k ⊗ S_k` with small dense `T_k` and sparse `S_k`.

use super::{CsrMatrix, DenseMatrix, LinalgError};

fn check(terms: &[(&DenseMatrix, &CsrMatrix)]) -> Result<(usize, usize), LinalgError> {
    let Some((t0, s0)) = terms.first() else {
        return Err(LinalgError::DimensionMismatch("no Kronecker terms".into()));
    };
    let (r, n) = (t0.nrows(), s0.nrows());
    for (t, s) in terms {
        if !t.is_square() || t.nrows() != r {
            return Err(LinalgError::DimensionMismatch(format!("time block {}x{}, expected {r}x{r}", t.nrows(), t.ncols())));
        }
        if s.nrows() != n || s.ncols() != n {
            return Err(LinalgError::DimensionMismatch(format!("space block {}x{}, expected {n}x{n}", s.nrows(), s.ncols())));
        }
    }
    Ok((r, n))
}

/// Explicit sparse `Σ_k T_k ⊗ S_k`. Every `(ℓ, m)` block carries the union
/// pattern of the space blocks, so the pattern does not depend on the time
/// step.
pub fn kron_assemble(terms: &[(&DenseMatrix, &CsrMatrix)]) -> Result<CsrMatrix, LinalgError> {
    let (r, n) = check(terms)?;
    if r < 2 {
        return Err(LinalgError::TimeDegree);
    }
    let unit: Vec<(f64, &CsrMatrix)> = terms.iter().map(|(_, s)| (0.0, *s)).collect();
    let union = CsrMatrix::linear_combination(&unit)?;
    // values of each space block scattered onto the union pattern
    let scattered: Vec<Vec<f64>> = terms
        .iter()
        .map(|(_, s)| {
            let mut v = vec![0.0; union.nnz()];
            for i in 0..n {
                let (uc, _) = union.row(i);
                let base = union.row_ptr()[i];
                let (sc, sv) = s.row(i);
                let mut k = 0;
                for (&c, &a) in sc.iter().zip(sv) {
                    while uc[k] != c {
                        k += 1;
                    }
                    v[base + k] = a;
                }
            }
            v
        })
        .collect();
    let nnz = r * r * union.nnz();
    let mut row_ptr = Vec::with_capacity(r * n + 1);
    let mut col_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    row_ptr.push(0);
    for l in 0..r {
        for i in 0..n {
            let range = union.row_ptr()[i]..union.row_ptr()[i + 1];
            let cols = &union.col_idx()[range.clone()];
            for m in 0..r {
                col_idx.extend(cols.iter().map(|&c| m * n + c));
                for k in range.clone() {
                    let mut v = 0.0;
                    for ((t, _), s) in terms.iter().zip(&scattered) {
                        v += t[(l, m)] * s[k];
                    }
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
    }
    CsrMatrix::from_parts(r * n, r * n, row_ptr, col_idx, values)
}

/// `(Σ_k T_k ⊗ S_k) x` without forming the product.
pub fn kron_matvec(terms: &[(&DenseMatrix, &CsrMatrix)], x: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let (r, n) = check(terms)?;
    if x.len() != r * n {
        return Err(LinalgError::DimensionMismatch(format!("vector of length {}, expected {}", x.len(), r * n)));
    }
    let mut y = vec![0.0; r * n];
    for (t, s) in terms {
        for m in 0..r {
            let sx = s.mul_vec(&x[m * n..(m + 1) * n]);
            for l in 0..r {
                let c = t[(l, m)];
                if c != 0.0 {
                    y[l * n..(l + 1) * n].iter_mut().zip(&sx).for_each(|(a, b)| *a += c * b);
                }
            }
        }
    }
    Ok(y)
}
