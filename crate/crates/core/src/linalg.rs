//! Sparse direct solves backed by faer.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, Lu};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

fn to_faer(a: &SparseMatrix) -> Result<SparseColMat<usize, f64>> {
    let triplets: Vec<Triplet<usize, usize, f64>> = a
        .triplets()
        .map(|(i, j, v)| Triplet::new(i, j, v))
        .collect();
    SparseColMat::try_new_from_triplets(a.nrows(), a.ncols(), &triplets).map_err(|e| {
        Error::Factorization {
            reason: format!("matrix conversion failed: {e:?}"),
        }
    })
}

fn solve_with<S: Solve<f64>>(solver: &S, rhs: &[f64]) -> Vec<f64> {
    let mut x = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    solver.solve_in_place(x.as_mut());
    (0..rhs.len()).map(|i| x[(i, 0)]).collect()
}

/// LU factorization with partial pivoting, for general (including symmetric
/// indefinite) square systems.
pub struct LuSolver {
    lu: Lu<usize, f64>,
    n: usize,
}

impl LuSolver {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        let lu = to_faer(a)?.sp_lu().map_err(|e| Error::Factorization {
            reason: format!("{e:?}"),
        })?;
        Ok(LuSolver { lu, n: a.nrows() })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.len(),
            });
        }
        Ok(solve_with(&self.lu, rhs))
    }

    fn solve_transpose(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = Mat::<f64>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        self.lu.solve_transpose_in_place(x.as_mut());
        (0..rhs.len()).map(|i| x[(i, 0)]).collect()
    }

    /// Hager's estimate of `‖A⁻¹‖₁`, reusing the factorization.
    pub fn inverse_norm_one_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut estimate = 0.0;
        for _ in 0..5 {
            let y = solve_with(&self.lu, &x);
            let y_norm: f64 = y.iter().map(|v| v.abs()).sum();
            if !y_norm.is_finite() {
                return f64::INFINITY;
            }
            if y_norm <= estimate {
                break;
            }
            estimate = y_norm;
            let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.abs()))
                .fold((0, 0.0), |acc, c| if c.1 > acc.1 { c } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        estimate
    }
}

/// Sparse Cholesky factorization of a symmetric positive definite matrix.
pub struct CholeskySolver {
    llt: Llt<usize, f64>,
    n: usize,
}

impl CholeskySolver {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        let llt = to_faer(a)?
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Factorization {
                reason: format!("{e:?}"),
            })?;
        Ok(CholeskySolver { llt, n: a.nrows() })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: rhs.len(),
            });
        }
        Ok(solve_with(&self.llt, rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_indefinite() {
        // [[1, 2], [2, -3]] is symmetric indefinite
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, -3.0)]);
        let lu = LuSolver::factor(&a).unwrap();
        let x = lu.solve(&[5.0, -4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
        // A⁻¹ = [[3, 2], [2, -1]] / 7, ‖A⁻¹‖₁ = 5/7
        assert!((lu.inverse_norm_one_estimate() - 5.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn cholesky_solves_spd() {
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 4.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)]);
        let x = CholeskySolver::factor(&a).unwrap().solve(&[1.0, 2.0]).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-14);
        assert!((x[0] + 3.0 * x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_is_reported() {
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0)]);
        assert!(LuSolver::factor(&a).is_err() || {
            let x = LuSolver::factor(&a).unwrap().solve(&[1.0, 1.0]).unwrap();
            !x.iter().all(|v| v.is_finite())
        });
    }
}
