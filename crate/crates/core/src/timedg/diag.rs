//! Slab solve through the eigendecomposition of the time coupling.
//!
//! With `X = N2⁻¹ (N1 + N3) = S Λ S⁻¹` the slab matrix factors as
//! `(N2 S ⊗ I) diag(λ_l M + D + λ_l⁻¹ K) (S⁻¹ ⊗ I)`, so one slab costs one
//! complex solve of space size per conjugate pair of eigenvalues.

use faer::linalg::solvers::{DenseSolveCore, Eigen};
use faer::{c64, Mat};
use rayon::prelude::*;

use super::{TimeError, TimeMatrices};
use crate::linalg::{ComplexSparseLu, CsrMatrix, LinalgError};

/// Eigenvalues closer than this (relative) to the real axis are real.
const REAL_AXIS: f64 = 1e-10;

enum Mode {
    /// Solved with its own factorization.
    Own(usize),
    /// Conjugate of the solution of another eigenvalue.
    ConjugateOf(usize),
}

pub(super) struct DiagonalizedSlab {
    nodes: usize,
    n: usize,
    /// `S`, row-major.
    vectors: Vec<c64>,
    /// `S⁻¹ N2⁻¹`, row-major.
    left: Vec<c64>,
    modes: Vec<Mode>,
    factors: Vec<ComplexSparseLu>,
}

fn eigen_failure(what: &str) -> TimeError {
    TimeError::Linalg(LinalgError::Factorization(format!("time coupling eigendecomposition: {what}")))
}

impl DiagonalizedSlab {
    pub(super) fn new(
        time: &TimeMatrices,
        mass: &CsrMatrix,
        damping: &CsrMatrix,
        stiffness: &CsrMatrix,
    ) -> Result<Self, TimeError> {
        let nodes = time.n2.nrows();
        let p = time.jump_matrix();
        let x = Mat::<f64>::from_fn(nodes, nodes, |i, j| p[(i, j)] / time.n2[(i, i)]);
        let eig = Eigen::new_from_real(x.as_ref()).map_err(|e| eigen_failure(&format!("{e:?}")))?;
        let mut lambda: Vec<c64> = eig.S().column_vector().iter().copied().collect();
        let mut s = Mat::<c64>::from_fn(nodes, nodes, |i, j| eig.U()[(i, j)]);
        let mut modes: Vec<Option<Mode>> = (0..nodes).map(|_| None).collect();
        let mut reps = Vec::new();
        for k in 0..nodes {
            if modes[k].is_some() {
                continue;
            }
            let lk = lambda[k];
            if lk.im.abs() <= REAL_AXIS * lk.norm() {
                // rotate the eigenvector onto the real axis
                let (imax, _) = (0..nodes).map(|i| (i, s[(i, k)].norm())).fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
                let phase = s[(imax, k)].conj() / s[(imax, k)].norm();
                for i in 0..nodes {
                    s[(i, k)] = c64::new((s[(i, k)] * phase).re, 0.0);
                }
                lambda[k] = c64::new(lk.re, 0.0);
                modes[k] = Some(Mode::Own(reps.len()));
                reps.push(k);
                continue;
            }
            let partner = (k + 1..nodes)
                .filter(|&m| modes[m].is_none())
                .min_by(|&a, &b| (lambda[a] - lk.conj()).norm().total_cmp(&(lambda[b] - lk.conj()).norm()))
                .ok_or_else(|| eigen_failure("unpaired complex eigenvalue"))?;
            if (lambda[partner] - lk.conj()).norm() > 1e-8 * lk.norm() {
                return Err(eigen_failure("unpaired complex eigenvalue"));
            }
            lambda[partner] = lk.conj();
            for i in 0..nodes {
                s[(i, partner)] = s[(i, k)].conj();
            }
            modes[k] = Some(Mode::Own(reps.len()));
            modes[partner] = Some(Mode::ConjugateOf(k));
            reps.push(k);
        }
        let inverse = s.partial_piv_lu().inverse();
        let vectors = (0..nodes * nodes).map(|ij| s[(ij / nodes, ij % nodes)]).collect();
        let left = (0..nodes * nodes)
            .map(|ij| {
                let (i, j) = (ij / nodes, ij % nodes);
                inverse[(i, j)] / time.n2[(j, j)]
            })
            .collect();
        let pattern = CsrMatrix::linear_combination(&[(1.0, mass), (1.0, damping), (1.0, stiffness)])?;
        let on_pattern = |a: &CsrMatrix| {
            CsrMatrix::linear_combination(&[(1.0, a), (0.0, &pattern)]).map(|m| m.values().to_vec())
        };
        let (mv, dv, kv) = (on_pattern(mass)?, on_pattern(damping)?, on_pattern(stiffness)?);
        let factors = reps
            .iter()
            .map(|&k| {
                let l = lambda[k];
                let li = l.inv();
                let values = mv.iter().zip(&dv).zip(&kv).map(|((m, d), kk)| l * m + c64::new(*d, 0.0) + li * kk).collect();
                ComplexSparseLu::new(&pattern, values)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let modes = modes.into_iter().map(|m| m.expect("every eigenvalue classified")).collect();
        Ok(DiagonalizedSlab { nodes, n: mass.nrows(), vectors, left, modes, factors })
    }

    pub(super) fn factor_count(&self) -> usize {
        self.factors.len()
    }

    /// Solves the slab system for the stacked node blocks of `rhs`.
    pub(super) fn solve_in_place(&self, rhs: &mut [f64]) {
        let (nodes, n) = (self.nodes, self.n);
        let own: Vec<usize> = (0..nodes).filter(|&k| matches!(self.modes[k], Mode::Own(_))).collect();
        let solutions: Vec<(usize, Vec<c64>)> = own
            .par_iter()
            .map(|&k| {
                let Mode::Own(f) = self.modes[k] else { unreachable!() };
                let mut y = vec![c64::new(0.0, 0.0); n];
                for j in 0..nodes {
                    let c = self.left[k * nodes + j];
                    y.iter_mut().zip(&rhs[j * n..(j + 1) * n]).for_each(|(a, &b)| *a += c * b);
                }
                self.factors[f].solve_in_place(&mut y);
                (k, y)
            })
            .collect();
        rhs.iter_mut().for_each(|v| *v = 0.0);
        for (k, w) in &solutions {
            let paired = self.modes.iter().any(|m| matches!(m, Mode::ConjugateOf(o) if o == k));
            // a conjugate partner contributes the complex conjugate term
            let scale = if paired { 2.0 } else { 1.0 };
            for l in 0..nodes {
                let c = self.vectors[l * nodes + k] * scale;
                rhs[l * n..(l + 1) * n].iter_mut().zip(w).for_each(|(v, z)| *v += (c * z).re);
            }
        }
    }
}
