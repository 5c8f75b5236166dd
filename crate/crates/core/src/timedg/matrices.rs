use super::TimeError;
use crate::fespace::quadrature::gauss_lobatto;
use crate::linalg::DenseMatrix;

/// Lagrange basis on the `r + 1` Gauss-Lobatto nodes of a slab.
#[derive(Clone, Debug)]
pub struct TimeBasis {
    degree: usize,
    /// Nodes on [0, 1].
    nodes: Vec<f64>,
    /// Weights on [0, 1].
    weights: Vec<f64>,
    barycentric: Vec<f64>,
}

impl TimeBasis {
    pub fn new(degree: usize) -> Result<Self, TimeError> {
        if degree < 1 {
            return Err(TimeError::InvalidDegree(degree));
        }
        let (x, w) = gauss_lobatto(degree + 1);
        let nodes: Vec<f64> = x.iter().map(|v| 0.5 * (v + 1.0)).collect();
        let weights: Vec<f64> = w.iter().map(|v| 0.5 * v).collect();
        let barycentric = (0..nodes.len())
            .map(|j| 1.0 / (0..nodes.len()).filter(|&k| k != j).map(|k| nodes[j] - nodes[k]).product::<f64>())
            .collect();
        Ok(TimeBasis { degree, nodes, weights, barycentric })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn reference_nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn reference_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn nodes(&self, start: f64, step: f64) -> Vec<f64> {
        self.nodes.iter().map(|s| start + step * s).collect()
    }

    pub fn weights(&self, step: f64) -> Vec<f64> {
        self.weights.iter().map(|w| step * w).collect()
    }

    /// Values of all basis functions at reference time `s`.
    pub fn values(&self, s: f64) -> Vec<f64> {
        let n = self.nodes.len();
        if let Some(j) = self.nodes.iter().position(|&x| x == s) {
            let mut v = vec![0.0; n];
            v[j] = 1.0;
            return v;
        }
        let l: f64 = self.nodes.iter().map(|x| s - x).product();
        (0..n).map(|j| l * self.barycentric[j] / (s - self.nodes[j])).collect()
    }

    /// `D[l][m] = dψ_m/ds (s_l)` on the reference slab.
    pub fn differentiation(&self) -> DenseMatrix {
        let n = self.nodes.len();
        let mut d = DenseMatrix::zeros(n, n);
        for l in 0..n {
            let mut diag = 0.0;
            for m in 0..n {
                if m != l {
                    let v = self.barycentric[m] / self.barycentric[l] / (self.nodes[l] - self.nodes[m]);
                    d[(l, m)] = v;
                    diag -= v;
                }
            }
            d[(l, l)] = diag;
        }
        d
    }
}

/// Slab matrices with every entry integrated by the slab's own Gauss-Lobatto
/// rule.
#[derive(Clone, Debug)]
pub struct TimeMatrices {
    pub step: f64,
    /// `(ψ̇_m, ψ_l)`
    pub n1: DenseMatrix,
    /// `(ψ_m, ψ_l)`, diagonal
    pub n2: DenseMatrix,
    /// `ψ_m(t⁺) ψ_l(t⁺)` at the slab start
    pub n3: DenseMatrix,
    /// `(N1 + N3)⁻¹`
    pub n4: DenseMatrix,
    /// `N4 N2`
    pub n5: DenseMatrix,
    /// `N2 N4`
    pub n6: DenseMatrix,
    /// `N2 N4 N2`
    pub n7: DenseMatrix,
}

impl TimeMatrices {
    pub fn new(basis: &TimeBasis, step: f64) -> Result<Self, TimeError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(TimeError::InvalidStep(step));
        }
        let n = basis.len();
        let d = basis.differentiation();
        let w = basis.reference_weights();
        let mut n1 = DenseMatrix::zeros(n, n);
        for l in 0..n {
            for m in 0..n {
                // Σ_q w_q ψ̇_m(s_q) ψ_l(s_q) collapses onto q = l
                n1[(l, m)] = w[l] * d[(l, m)];
            }
        }
        let n2 = DenseMatrix::from_diagonal(&basis.weights(step));
        let mut n3 = DenseMatrix::zeros(n, n);
        n3[(0, 0)] = 1.0;
        let n4 = n1.add(&n3)?.inverse()?;
        let n5 = n4.matmul(&n2)?;
        let n6 = n2.matmul(&n4)?;
        let n7 = n6.matmul(&n2)?;
        Ok(TimeMatrices { step, n1, n2, n3, n4, n5, n6, n7 })
    }

    pub fn build(degree: usize, step: f64) -> Result<Self, TimeError> {
        Self::new(&TimeBasis::new(degree)?, step)
    }

    /// `N1 + N3`
    pub fn jump_matrix(&self) -> DenseMatrix {
        self.n1.add(&self.n3).expect("square matrices of equal size")
    }

    /// `N5 / Δt`, the Runge-Kutta matrix of the equivalent collocation scheme.
    pub fn butcher(&self) -> DenseMatrix {
        self.n5.scaled(1.0 / self.step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DenseMatrix, b: &[Vec<f64>], tol: f64) -> bool {
        let b = DenseMatrix::from_rows(b);
        a.add(&b.scaled(-1.0)).unwrap().max_abs() <= tol
    }

    #[test]
    fn linear_slab_matrices() {
        let t = TimeMatrices::build(1, 0.1).unwrap();
        assert!(close(&t.n1, &[vec![-0.5, 0.5], vec![-0.5, 0.5]], 1e-15));
        assert!(close(&t.n2, &[vec![0.05, 0.0], vec![0.0, 0.05]], 1e-16));
        assert!(close(&t.n3, &[vec![1.0, 0.0], vec![0.0, 0.0]], 0.0));
        assert!(close(&t.n4, &[vec![1.0, -1.0], vec![1.0, 1.0]], 1e-14));
        assert!(close(&t.n5, &[vec![0.05, -0.05], vec![0.05, 0.05]], 1e-15));
    }

    #[test]
    fn lagrange_property_and_weights() {
        for r in 1..6 {
            let b = TimeBasis::new(r).unwrap();
            assert!((b.weights(0.3).iter().sum::<f64>() - 0.3).abs() < 1e-15);
            assert_eq!(b.reference_nodes()[0], 0.0);
            assert!((b.reference_nodes()[r] - 1.0).abs() < 1e-15);
            for (j, &s) in b.reference_nodes().iter().enumerate() {
                let v = b.values(s);
                for (k, vk) in v.iter().enumerate() {
                    assert_eq!(*vk, if j == k { 1.0 } else { 0.0 });
                }
            }
            // partition of unity off the nodes
            assert!((b.values(0.37).iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn differentiation_is_exact_on_polynomials() {
        let b = TimeBasis::new(3).unwrap();
        let d = b.differentiation();
        let s = b.reference_nodes();
        let f: Vec<f64> = s.iter().map(|x| x * x * x - 2.0 * x).collect();
        let df = d.matvec(&f);
        for (x, v) in s.iter().zip(df) {
            assert!((v - (3.0 * x * x - 2.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn degree_zero_and_bad_step_rejected() {
        assert!(matches!(TimeBasis::new(0), Err(TimeError::InvalidDegree(0))));
        assert!(matches!(TimeMatrices::build(1, 0.0), Err(TimeError::InvalidStep(_))));
        assert!(matches!(TimeMatrices::build(1, f64::NAN), Err(TimeError::InvalidStep(_))));
    }
}
