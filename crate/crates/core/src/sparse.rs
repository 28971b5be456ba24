//! Compressed sparse row matrices assembled from triplets.

use std::io::Write;

use crate::error::{Error, Result};

/// Row-compressed sparse matrix with sorted, duplicate-free column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
            symmetric: nrows == ncols,
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates in
    /// input order. The symmetry flag is set when the result equals its
    /// transpose bit for bit.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        debug_assert!(triplets.iter().all(|&(i, j, _)| i < nrows && j < ncols));
        // stable: duplicates keep their input order so summation is deterministic
        triplets.sort_by_key(|&(i, j, _)| (i, j));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *values.last_mut().expect("nonempty") += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut m = SparseMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
            symmetric: false,
        };
        m.symmetric = m.check_symmetric();
        m
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

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Stored entries of row `i` as `(col, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// Exact entrywise comparison with the transpose.
    fn check_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        self.triplets().all(|(i, j, v)| {
            let r = self.row_ptr[j]..self.row_ptr[j + 1];
            match self.col_idx[r.clone()].binary_search(&i) {
                Ok(k) => self.values[r.start + k] == v,
                Err(_) => v == 0.0,
            }
        })
    }

    /// Largest `|A_ij - A_ji|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        assert_eq!(self.nrows, self.ncols, "asymmetry of a rectangular matrix");
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ncols, x.len())?;
        Ok((0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect())
    }

    /// `uᵀ A w`.
    pub fn bilinear(&self, u: &[f64], w: &[f64]) -> Result<f64> {
        check_len(self.nrows, u.len())?;
        check_len(self.ncols, w.len())?;
        Ok((0..self.nrows)
            .map(|i| u[i] * self.row(i).map(|(j, v)| v * w[j]).sum::<f64>())
            .sum())
    }

    pub fn quadratic_form(&self, u: &[f64]) -> Result<f64> {
        self.bilinear(u, u)
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// One norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.ncols];
        for (_, j, v) in self.triplets() {
            sums[j] += v.abs();
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// Linear combination `Σ c_k A_k` of equally sized matrices; entries are
    /// summed in argument order.
    pub fn linear_combination(terms: &[(f64, &SparseMatrix)]) -> Result<SparseMatrix> {
        let (nrows, ncols) = match terms.first() {
            Some((_, m)) => (m.nrows, m.ncols),
            None => return Err(Error::InvalidParameter("empty linear combination".into())),
        };
        let mut triplets = Vec::with_capacity(terms.iter().map(|(_, m)| m.nnz()).sum());
        for &(c, m) in terms {
            if m.nrows != nrows || m.ncols != ncols {
                return Err(Error::DimensionMismatch {
                    expected: nrows * ncols,
                    got: m.nrows * m.ncols,
                });
            }
            triplets.extend(m.triplets().map(|(i, j, v)| (i, j, c * v)));
        }
        Ok(SparseMatrix::from_triplets(nrows, ncols, triplets))
    }

    /// Submatrix on the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut triplets = Vec::new();
        for (new_i, &i) in rows.iter().enumerate() {
            for (j, v) in self.row(i) {
                if col_map[j] != usize::MAX {
                    triplets.push((new_i, col_map[j], v));
                }
            }
        }
        SparseMatrix::from_triplets(rows.len(), cols.len(), triplets)
    }

    /// Dense copy, row-major. Intended for tests on small matrices.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v;
        }
        d
    }

    /// Coordinate-format dump, one `row col value` line per stored entry.
    pub fn write_coo<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, j, v) in self.triplets() {
            writeln!(w, "{i} {j} {v:.16e}")?;
        }
        Ok(())
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub(crate) fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
