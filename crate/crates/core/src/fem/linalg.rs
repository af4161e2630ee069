//! Sparse assembly and direct solves (`faer`), with a residual check and a
//! few steps of iterative refinement.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("singular or degenerate system: {0}")]
    Singular(String),
    #[error("relative residual {residual:.3e} above tolerance {tolerance:.1e}")]
    Residual { residual: f64, tolerance: f64 },
}

/// Triplet accumulator for a square sparse matrix; duplicates are summed.
#[derive(Debug, Clone)]
pub struct SparseBuilder {
    n: usize,
    triplets: Vec<Triplet<usize, usize, f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factorization {
    /// Symmetric positive definite.
    Cholesky,
    /// General (used for the bordered saddle-point systems).
    Lu,
}

impl SparseBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            triplets: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, capacity: usize) -> Self {
        Self {
            n,
            triplets: Vec::with_capacity(capacity),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if v != 0.0 {
            self.triplets.push(Triplet::new(i, j, v));
        }
    }

    /// `A x` evaluated from the triplets.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for t in &self.triplets {
            y[t.row] += t.val * x[t.col];
        }
        y
    }

    /// Solves `A x = b`, refining until `|b - A x| <= tol |b|` (or `tol` in
    /// absolute terms when `b = 0`).
    pub fn solve(&self, b: &[f64], kind: Factorization, tol: f64) -> Result<Vec<f64>, SolveError> {
        faer::set_global_parallelism(faer::Par::Seq);
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(self.n, self.n, &self.triplets)
            .map_err(|e| SolveError::Singular(format!("{e:?}")))?;
        let rhs = Col::<f64>::from_fn(self.n, |i| b[i]);
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = if bnorm > 0.0 { bnorm } else { 1.0 };

        let solve_with: Box<dyn Fn(&Col<f64>) -> Col<f64>> = match kind {
            Factorization::Cholesky => {
                let f = a
                    .sp_cholesky(faer::Side::Lower)
                    .map_err(|e| SolveError::Singular(format!("{e:?}")))?;
                Box::new(move |r: &Col<f64>| f.solve(r))
            }
            Factorization::Lu => {
                let f = a
                    .sp_lu()
                    .map_err(|e| SolveError::Singular(format!("{e:?}")))?;
                Box::new(move |r: &Col<f64>| f.solve(r))
            }
        };
        let mut x: Vec<f64> = {
            let c = solve_with(&rhs);
            (0..self.n).map(|i| c[i]).collect()
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::Singular(
                "factorization produced non-finite values".into(),
            ));
        }
        let mut res = 0.0;
        for _ in 0..4 {
            let ax = self.mul(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            res = r.iter().map(|v| v * v).sum::<f64>().sqrt() / scale;
            if res <= tol {
                return Ok(x);
            }
            let dx = solve_with(&Col::<f64>::from_fn(self.n, |i| r[i]));
            for (xi, i) in x.iter_mut().zip(0..) {
                *xi += dx[i];
            }
        }
        let ax = self.mul(&x);
        let r2: f64 = b
            .iter()
            .zip(&ax)
            .map(|(b, a)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
            / scale;
        res = res.min(r2);
        if res <= tol {
            Ok(x)
        } else {
            Err(SolveError::Residual {
                residual: res,
                tolerance: tol,
            })
        }
    }
}
