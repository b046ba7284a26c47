//! Sparse integer matrices stored column-major.

use std::fmt;

/// A sparse integer matrix with sorted `(row, value)` entries per column.
/// Zero entries are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    nrows: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            cols: vec![Vec::new(); ncols],
        }
    }

    /// Builds a matrix from unsorted column entries; duplicate rows are summed.
    pub fn from_columns(nrows: usize, cols: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = cols
            .into_iter()
            .map(|mut c| {
                c.sort_unstable_by_key(|&(r, _)| r);
                let mut out: Vec<(usize, i64)> = Vec::with_capacity(c.len());
                for (r, v) in c {
                    assert!(r < nrows, "row {r} out of range {nrows}");
                    match out.last_mut() {
                        Some(last) if last.0 == r => last.1 += v,
                        _ => out.push((r, v)),
                    }
                }
                out.retain(|&(_, v)| v != 0);
                out
            })
            .collect();
        SparseMatrix { nrows, cols }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut cols = vec![Vec::new(); ncols];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    cols[j].push((i, v));
                }
            }
        }
        SparseMatrix { nrows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[(usize, i64)]> {
        self.cols.iter().map(|c| c.as_slice())
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.cols[j]
            .binary_search_by_key(&i, |&(r, _)| r)
            .map_or(0, |k| self.cols[j][k].1)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.ncols()]; self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                out[i][j] = v;
            }
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                cols[i].push((j, v));
            }
        }
        SparseMatrix {
            nrows: self.ncols(),
            cols,
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), rhs.nrows, "dimension mismatch in product");
        let cols = rhs
            .cols
            .iter()
            .map(|rc| {
                let mut acc: Vec<(usize, i64)> = Vec::new();
                for &(k, rv) in rc {
                    for &(i, lv) in &self.cols[k] {
                        acc.push((i, lv * rv));
                    }
                }
                acc
            })
            .collect();
        SparseMatrix::from_columns(self.nrows, cols)
    }

    /// Returns a copy with rows and columns permuted: entry `(i, j)` moves to
    /// `(row_perm[i], col_perm[j])`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.ncols()];
        for (j, c) in self.cols.iter().enumerate() {
            cols[col_perm[j]] = c.iter().map(|&(i, v)| (row_perm[i], v)).collect();
        }
        SparseMatrix::from_columns(self.nrows, cols)
    }
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseMatrix {}x{}", self.nrows, self.ncols())?;
        for row in self.to_dense() {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}
