//! Sparse LU factorization with partial pivoting.
//!
//! Left-looking column factorization over a dense scatter workspace. Row
//! swaps are never performed physically: L is stored against original row
//! indices and a pivot-order array records the elimination sequence. The
//! factorization is reusable, which is what makes fixed-step implicit
//! integration cheap (factor once, solve every step).

use crate::error::Error;
use crate::sparse::SparseMatrix;

/// Reusable LU factors of a square sparse matrix.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    /// Column k: multipliers (original row, value), unit pivot implicit.
    l_cols: Vec<Vec<(usize, f64)>>,
    /// Column k: strictly-above-diagonal entries (pivot step j < k, value).
    u_cols: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
    /// pivot_row[k] = original row eliminated at step k.
    pivot_row: Vec<usize>,
}

impl SparseLu {
    /// Factor a square matrix. A pivot smaller than `1e-14 * max_abs(m)`
    /// stops the factorization with [`Error::SingularMatrix`] naming the
    /// offending column.
    pub fn factor(m: &SparseMatrix) -> Result<Self, Error> {
        if m.rows() != m.cols() {
            return Err(Error::ShapeMismatch {
                expected_rows: m.rows(),
                expected_cols: m.rows(),
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let n = m.rows();
        let threshold = 1e-14 * m.max_abs();

        // Column-major copy of the input.
        let mut a_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (r, c, v) in m.entries() {
            a_cols[c].push((r, v));
        }

        let mut l_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut u_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut u_diag = Vec::with_capacity(n);
        let mut pivot_row = Vec::with_capacity(n);
        // pivot_step[row] = step at which `row` was chosen, n if still free.
        let mut pivot_step = vec![n; n];

        let mut w = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();

        for (k, a_col) in a_cols.iter().enumerate() {
            for &(r, v) in a_col {
                if w[r] == 0.0 {
                    touched.push(r);
                }
                w[r] += v;
            }
            // Apply earlier columns in pivot order. An update at step j only
            // fills rows that were still free at step j, so every
            // contribution to w[pivot_row[j]] lands before step j is read.
            let mut u_col = Vec::new();
            for j in 0..k {
                let ujk = w[pivot_row[j]];
                if ujk == 0.0 {
                    continue;
                }
                u_col.push((j, ujk));
                for &(r, l) in &l_cols[j] {
                    if w[r] == 0.0 {
                        touched.push(r);
                    }
                    w[r] -= l * ujk;
                }
            }
            // Partial pivot among rows not yet eliminated.
            let mut piv = n;
            let mut piv_abs = 0.0;
            for &r in &touched {
                if pivot_step[r] == n && w[r].abs() > piv_abs {
                    piv = r;
                    piv_abs = w[r].abs();
                }
            }
            if piv == n || piv_abs <= threshold {
                return Err(Error::SingularMatrix { col: k });
            }
            let diag = w[piv];
            let mut l_col = Vec::new();
            for &r in &touched {
                if pivot_step[r] == n && r != piv && w[r] != 0.0 {
                    l_col.push((r, w[r] / diag));
                }
            }
            pivot_step[piv] = k;
            pivot_row.push(piv);
            u_diag.push(diag);
            u_cols.push(u_col);
            l_cols.push(l_col);
            for r in touched.drain(..) {
                w[r] = 0.0;
            }
        }

        Ok(Self { n, l_cols, u_cols, u_diag, pivot_row })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `A x = b` for the factored matrix.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, Error> {
        if b.len() != self.n {
            return Err(Error::VectorLength { expected: self.n, found: b.len() });
        }
        // Forward substitution, column oriented, in pivot order.
        let mut w = b.to_vec();
        let mut y = vec![0.0; self.n];
        for k in 0..self.n {
            let yk = w[self.pivot_row[k]];
            y[k] = yk;
            if yk != 0.0 {
                for &(r, l) in &self.l_cols[k] {
                    w[r] -= l * yk;
                }
            }
        }
        // Back substitution.
        for k in (0..self.n).rev() {
            let xk = y[k] / self.u_diag[k];
            y[k] = xk;
            if xk != 0.0 {
                for &(j, u) in &self.u_cols[k] {
                    y[j] -= u * xk;
                }
            }
        }
        Ok(y)
    }
}

/// One-shot solve of `A x = b`.
pub fn solve_sparse_lu(a: &SparseMatrix, b: &[f64]) -> Result<Vec<f64>, Error> {
    SparseLu::factor(a)?.solve(b)
}
