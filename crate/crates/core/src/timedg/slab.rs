use serde::{Deserialize, Serialize};

use super::diag::DiagonalizedSlab;
use super::{TimeBasis, TimeError, TimeMatrices};
use crate::assembly::Forcing;
use crate::linalg::{inverse_norm1, kron_assemble, CsrMatrix, LinalgError, SparseLu};

/// Slab matrices with more entries than this are solved by diagonalization
/// under [`SlabSolver::Auto`].
pub const AUTO_MONOLITHIC_LIMIT: usize = 4_000_000;

/// How the slab system is solved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlabSolver {
    /// Monolithic below [`AUTO_MONOLITHIC_LIMIT`] entries, diagonalized above.
    #[default]
    Auto,
    /// Sparse LU of the explicit Kronecker slab matrix.
    Monolithic,
    /// One complex space-sized LU per conjugate pair of time eigenvalues.
    Diagonalized,
}

enum SlabFactor {
    Monolithic { lu: SparseLu, norm1: f64 },
    Diagonalized(DiagonalizedSlab),
}

/// Displacement and velocity at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub time: f64,
    pub displacement: Vec<f64>,
    pub velocity: Vec<f64>,
}

impl State {
    pub fn zero(time: f64, ndof: usize) -> Self {
        State { time, displacement: vec![0.0; ndof], velocity: vec![0.0; ndof] }
    }

    pub fn is_finite(&self) -> bool {
        self.displacement.iter().chain(&self.velocity).all(|v| v.is_finite())
    }
}

/// Coefficients of one slab at its Gauss-Lobatto nodes.
#[derive(Clone, Debug)]
pub struct SlabSolution {
    pub times: Vec<f64>,
    pub weights: Vec<f64>,
    pub displacement: Vec<Vec<f64>>,
    pub velocity: Vec<Vec<f64>>,
}

impl SlabSolution {
    /// Trace at the end of the slab.
    pub fn end_state(&self) -> State {
        State {
            time: *self.times.last().expect("at least two nodes"),
            displacement: self.displacement.last().expect("at least two nodes").clone(),
            velocity: self.velocity.last().expect("at least two nodes").clone(),
        }
    }
}

/// Factorized slab matrix `(N1 + N3) ⊗ M + N2 ⊗ D + N7 ⊗ K` for one step
/// size, with the space matrices it was built from.
pub struct SlabOperator<'a> {
    basis: TimeBasis,
    time: TimeMatrices,
    mass: &'a CsrMatrix,
    damping: &'a CsrMatrix,
    stiffness: &'a CsrMatrix,
    factor: SlabFactor,
    nnz: usize,
}

impl<'a> SlabOperator<'a> {
    pub fn new(
        degree: usize,
        step: f64,
        mass: &'a CsrMatrix,
        damping: &'a CsrMatrix,
        stiffness: &'a CsrMatrix,
    ) -> Result<Self, TimeError> {
        Self::with_solver(degree, step, mass, damping, stiffness, SlabSolver::Monolithic)
    }

    pub fn with_solver(
        degree: usize,
        step: f64,
        mass: &'a CsrMatrix,
        damping: &'a CsrMatrix,
        stiffness: &'a CsrMatrix,
        solver: SlabSolver,
    ) -> Result<Self, TimeError> {
        let basis = TimeBasis::new(degree)?;
        let time = TimeMatrices::new(&basis, step)?;
        let space_nnz = CsrMatrix::linear_combination(&[(1.0, mass), (1.0, damping), (1.0, stiffness)])?.nnz();
        let nnz = space_nnz * basis.len() * basis.len();
        let monolithic = match solver {
            SlabSolver::Auto => nnz <= AUTO_MONOLITHIC_LIMIT,
            SlabSolver::Monolithic => true,
            SlabSolver::Diagonalized => false,
        };
        let factor = if monolithic {
            let slab = Self::slab_matrix(&time, mass, damping, stiffness)?;
            let norm1 = slab.norm1();
            SlabFactor::Monolithic { lu: SparseLu::new(&slab)?, norm1 }
        } else {
            SlabFactor::Diagonalized(DiagonalizedSlab::new(&time, mass, damping, stiffness)?)
        };
        Ok(SlabOperator { basis, time, mass, damping, stiffness, factor, nnz })
    }

    /// The explicit slab matrix.
    pub fn slab_matrix(
        time: &TimeMatrices,
        mass: &CsrMatrix,
        damping: &CsrMatrix,
        stiffness: &CsrMatrix,
    ) -> Result<CsrMatrix, LinalgError> {
        let p = time.jump_matrix();
        kron_assemble(&[(&p, mass), (&time.n2, damping), (&time.n7, stiffness)])
    }

    pub fn time_matrices(&self) -> &TimeMatrices {
        &self.time
    }

    pub fn basis(&self) -> &TimeBasis {
        &self.basis
    }

    pub fn ndof(&self) -> usize {
        self.mass.nrows()
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn damping(&self) -> &CsrMatrix {
        self.damping
    }

    /// The strategy in use, never `Auto`.
    pub fn solver(&self) -> SlabSolver {
        match self.factor {
            SlabFactor::Monolithic { .. } => SlabSolver::Monolithic,
            SlabFactor::Diagonalized(_) => SlabSolver::Diagonalized,
        }
    }

    /// Number of sparse factorizations held.
    pub fn factor_count(&self) -> usize {
        match &self.factor {
            SlabFactor::Monolithic { .. } => 1,
            SlabFactor::Diagonalized(d) => d.factor_count(),
        }
    }

    /// 1-norm condition estimate of the slab matrix; factorizes the explicit
    /// matrix when the operator is diagonalized.
    pub fn condition_estimate(&self) -> Result<f64, TimeError> {
        match &self.factor {
            SlabFactor::Monolithic { lu, norm1 } => Ok(norm1 * inverse_norm1(lu)),
            SlabFactor::Diagonalized(_) => {
                let slab = Self::slab_matrix(&self.time, self.mass, self.damping, self.stiffness)?;
                Ok(slab.norm1() * inverse_norm1(&SparseLu::new(&slab)?))
            }
        }
    }

    /// Advances `state` over one slab of length `step`.
    pub fn advance(&self, state: &State, forcing: &dyn Forcing) -> SlabSolution {
        let n = self.ndof();
        let nodes = self.basis.len();
        let t = &self.time;
        let times = self.basis.nodes(state.time, t.step);
        let weights = self.basis.weights(t.step);
        let ku = self.stiffness.mul_vec(&state.displacement);
        let mv = self.mass.mul_vec(&state.velocity);
        let mut rhs = vec![0.0; nodes * n];
        let mut load = vec![0.0; n];
        for (l, chunk) in rhs.chunks_mut(n).enumerate() {
            if !forcing.is_zero() {
                load.iter_mut().for_each(|v| *v = 0.0);
                forcing.add_load(times[l], &mut load);
                let w = t.n2[(l, l)];
                chunk.iter_mut().zip(&load).for_each(|(r, f)| *r = w * f);
            }
            let c = t.n6[(l, 0)];
            chunk.iter_mut().zip(&ku).for_each(|(r, k)| *r -= c * k);
            if l == 0 {
                chunk.iter_mut().zip(&mv).for_each(|(r, m)| *r += m);
            }
        }
        match &self.factor {
            SlabFactor::Monolithic { lu, .. } => lu.solve_in_place(&mut rhs),
            SlabFactor::Diagonalized(d) => d.solve_in_place(&mut rhs),
        }
        let velocity: Vec<Vec<f64>> = rhs.chunks(n).map(<[f64]>::to_vec).collect();
        let mut displacement = Vec::with_capacity(nodes);
        for l in 0..nodes {
            let mut u: Vec<f64> = state.displacement.iter().map(|v| t.n4[(l, 0)] * v).collect();
            for (m, vel) in velocity.iter().enumerate() {
                let c = t.n5[(l, m)];
                u.iter_mut().zip(vel).for_each(|(a, b)| *a += c * b);
            }
            displacement.push(u);
        }
        SlabSolution { times, weights, displacement, velocity }
    }
}
