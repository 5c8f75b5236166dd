//! Hager / Higham 1-norm condition estimation.

use super::{CsrMatrix, LinalgError, SparseLu};

/// Estimate of `‖A⁻¹‖₁` from solves with `A` and `Aᵀ`.
pub fn inverse_norm1(lu: &SparseLu) -> f64 {
    let n = lu.order();
    if n == 0 {
        return 0.0;
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut estimate = 0.0;
    let mut last_index = usize::MAX;
    for _ in 0..5 {
        let mut y = x.clone();
        lu.solve_in_place(&mut y);
        let norm: f64 = y.iter().map(|v| v.abs()).sum();
        if norm <= estimate {
            break;
        }
        estimate = norm;
        let mut z: Vec<f64> = y.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
        lu.solve_transpose_in_place(&mut z);
        let (j, zmax) = z.iter().enumerate().fold((0, -1.0), |b, (i, v)| if v.abs() > b.1 { (i, v.abs()) } else { b });
        let zx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if zmax <= zx || j == last_index {
            break;
        }
        last_index = j;
        x.iter_mut().for_each(|v| *v = 0.0);
        x[j] = 1.0;
    }
    // alternating-sign probe guards against the worst cases of the power iteration
    let mut b: Vec<f64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * (1.0 + i as f64 / (n as f64 - 1.0).max(1.0))
        })
        .collect();
    lu.solve_in_place(&mut b);
    let alt = 2.0 * b.iter().map(|v| v.abs()).sum::<f64>() / (3.0 * n as f64);
    estimate.max(alt)
}

/// `‖A‖₁ · est(‖A⁻¹‖₁)`.
pub fn condest_1norm(a: &CsrMatrix, lu: &SparseLu) -> f64 {
    a.norm1() * inverse_norm1(lu)
}

/// Factorizes `a` and estimates its 1-norm condition number.
pub fn estimate_condition(a: &CsrMatrix) -> Result<f64, LinalgError> {
    let lu = SparseLu::new(a)?;
    Ok(condest_1norm(a, &lu))
}
